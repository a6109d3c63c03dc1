//! Ordered Schmidt spectra and entanglement entropy.
//!
//! A bipartite pure state with amplitude matrix `M` (rows indexed by Alice's
//! basis, columns by Bob's) has squared Schmidt coefficients equal to the
//! squared singular values of `M`. Only those coefficients matter for local
//! manipulation, since states sharing them are related by local unitaries,
//! so every other module takes a [`SchmidtSpectrum`] as input.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::NORM_TOL;

/// Complex amplitudes `psi[a][b]` of a bipartite pure state, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl AmplitudeMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(index) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from nested rows, which must all have the same length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, entries)
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(Complex64::norm_sqr).sum()
    }
}

/// Squared Schmidt coefficients `alpha_1 >= ... >= alpha_N > 0`, summing to 1.
///
/// The same type holds the source spectrum, the average target and every
/// target of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SchmidtSpectrum {
    coeffs: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Same as [`make_spectrum`] with the default zero tolerance.
    pub fn new(raw: &[f64]) -> Result<Self> {
        make_spectrum(raw, crate::ZERO_TOL)
    }

    /// The product state, a single coefficient equal to 1.
    pub fn product() -> Self {
        Self { coeffs: vec![1.0] }
    }

    /// The maximally entangled spectrum on `levels` levels.
    pub fn uniform(levels: usize) -> Self {
        assert!(levels > 0, "uniform spectrum needs at least one level");
        Self {
            coeffs: vec![1.0 / levels as f64; levels],
        }
    }

    /// Wraps coefficients already sorted nonincreasing and strictly positive,
    /// rescaling them to sum to one.
    pub(crate) fn from_sorted_positive(mut coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        debug_assert!(coeffs.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(coeffs.iter().all(|&c| c > 0.0));
        let total: f64 = coeffs.iter().sum();
        for c in &mut coeffs {
            *c /= total;
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Number of nonzero Schmidt coefficients.
    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient at zero-based `index`, or 0 past the rank.
    pub fn coeff_or_zero(&self, index: usize) -> f64 {
        self.coeffs.get(index).copied().unwrap_or(0.0)
    }

    /// Coefficients zero-padded to `len` entries.
    pub fn padded(&self, len: usize) -> Vec<f64> {
        (0..len.max(self.rank()))
            .map(|i| self.coeff_or_zero(i))
            .collect()
    }

    pub fn is_uniform(&self, tol: f64) -> bool {
        let first = self.coeffs[0];
        self.coeffs.iter().all(|&c| (first - c).abs() <= tol)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }
}

/// Sorts, strips and renormalizes a list of nonnegative weights.
///
/// Entries are normalized, those below `zero_tol` are removed and the rest
/// renormalized. The sort is stable, so equal coefficients keep their input
/// order.
pub fn make_spectrum(raw: &[f64], zero_tol: f64) -> Result<SchmidtSpectrum> {
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeCoefficient { index, value });
        }
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let mut coeffs: Vec<f64> = raw
        .iter()
        .map(|&v| v / total)
        .filter(|&v| v > 0.0 && v >= zero_tol)
        .collect();
    if coeffs.is_empty() {
        return Err(Error::ZeroSpectrum);
    }
    coeffs.sort_by(|a, b| b.total_cmp(a));
    Ok(SchmidtSpectrum::from_sorted_positive(coeffs))
}

/// Squared singular values of the amplitude matrix, as an ordered spectrum.
pub fn schmidt_decompose(m: &AmplitudeMatrix, zero_tol: f64) -> Result<SchmidtSpectrum> {
    let norm = m.squared_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let matrix = DMatrix::from_row_slice(m.rows, m.cols, &m.entries);
    let singular = matrix.singular_values();
    let squared: Vec<f64> = singular.iter().map(|s| s * s).collect();
    make_spectrum(&squared, zero_tol)
}

/// Entanglement entropy, stored in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Entropy(f64);

impl Entropy {
    pub fn from_nats(nats: f64) -> Self {
        Self(nats)
    }

    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }
}

/// `-sum alpha_i ln alpha_i`, with `0 ln 0 = 0`.
pub fn entropy(s: &SchmidtSpectrum) -> Entropy {
    Entropy(-s.coeffs.iter().map(|&a| xlnx(a)).sum::<f64>())
}

/// `x ln x` extended by continuity to `x = 0`.
pub(crate) fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
