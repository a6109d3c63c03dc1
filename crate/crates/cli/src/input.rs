use std::fs;
use std::io::Read;
use std::path::Path;

use lqcc_core::lp::{LpProblem, Relation};
use lqcc_core::{
    schmidt_decompose, AmplitudeMatrix, DiagonalPovm, PovmElement, SchmidtSpectrum, TargetEnsemble,
};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

/// Reads a file, or all of stdin for `-`.
pub fn read_source(path: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        let mut text = String::new();
        stdin.read_to_string(&mut text).map_err(io_err)?;
        Ok(text)
    } else {
        fs::read_to_string(Path::new(path)).map_err(io_err)
    }
}

pub fn parse_json<T: DeserializeOwned>(path: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_string(),
        message: e.to_string(),
    })
}

#[derive(Debug, Deserialize)]
struct Amplitude {
    re: f64,
    #[serde(default)]
    im: f64,
}

/// A state given either by amplitudes or directly by its spectrum. Other
/// keys are ignored so reports can be fed back in.
#[derive(Debug, Deserialize)]
struct StateSpec {
    amplitudes: Option<Vec<Vec<Amplitude>>>,
    spectrum: Option<Vec<f64>>,
}

impl StateSpec {
    fn into_spectrum(self, path: &str, zero_tol: f64) -> Result<SchmidtSpectrum, CliError> {
        match (self.amplitudes, self.spectrum) {
            (Some(rows), None) => {
                let rows: Vec<Vec<Complex64>> = rows
                    .into_iter()
                    .map(|r| r.into_iter().map(|a| Complex64::new(a.re, a.im)).collect())
                    .collect();
                let m = AmplitudeMatrix::from_rows(&rows)?;
                Ok(schmidt_decompose(&m, zero_tol)?)
            }
            (None, Some(raw)) => Ok(lqcc_core::make_spectrum(&raw, zero_tol)?),
            (Some(_), Some(_)) => Err(CliError::Parse {
                path: path.to_string(),
                message: "state has both \"amplitudes\" and \"spectrum\"".into(),
            }),
            (None, None) => Err(CliError::Parse {
                path: path.to_string(),
                message: "state needs \"amplitudes\" or \"spectrum\"".into(),
            }),
        }
    }
}

pub fn load_state(
    path: &str,
    stdin: &mut dyn Read,
    zero_tol: f64,
) -> Result<SchmidtSpectrum, CliError> {
    let text = read_source(path, stdin)?;
    parse_json::<StateSpec>(path, &text)?.into_spectrum(path, zero_tol)
}

#[derive(Debug, Deserialize)]
struct EnsembleEntry {
    p: f64,
    #[serde(flatten)]
    state: StateSpec,
}

#[derive(Debug, Deserialize)]
struct EnsembleSpec {
    ensemble: Vec<EnsembleEntry>,
}

pub fn load_ensemble(
    path: &str,
    stdin: &mut dyn Read,
    zero_tol: f64,
) -> Result<TargetEnsemble, CliError> {
    let text = read_source(path, stdin)?;
    let spec: EnsembleSpec = parse_json(path, &text)?;
    let entries = spec
        .ensemble
        .into_iter()
        .map(|e| Ok((e.p, e.state.into_spectrum(path, zero_tol)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(TargetEnsemble::new(entries)?)
}

#[derive(Debug, Deserialize)]
struct PovmSpec {
    elements: Vec<ElementSpec>,
}

#[derive(Debug, Deserialize)]
struct ElementSpec {
    label: usize,
    diag: Vec<f64>,
}

/// Reads the `elements` of a `build-povm` report; the support is the
/// longest diagonal.
pub fn load_povm(path: &str, stdin: &mut dyn Read) -> Result<DiagonalPovm, CliError> {
    let text = read_source(path, stdin)?;
    let spec: PovmSpec = parse_json(path, &text)?;
    let support = spec
        .elements
        .iter()
        .map(|e| e.diag.len())
        .max()
        .unwrap_or(0);
    let elements = spec
        .elements
        .into_iter()
        .map(|e| PovmElement {
            label: e.label,
            diag: e.diag,
        })
        .collect();
    Ok(DiagonalPovm::new(elements, support)?)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum WeightsSpec {
    Bare(Vec<f64>),
    Keyed { weights: Vec<f64> },
}

pub fn load_weights(path: &str, stdin: &mut dyn Read) -> Result<Vec<f64>, CliError> {
    let text = read_source(path, stdin)?;
    Ok(match parse_json::<WeightsSpec>(path, &text)? {
        WeightsSpec::Bare(w) | WeightsSpec::Keyed { weights: w } => w,
    })
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RelationSpec {
    #[serde(alias = "<=")]
    Le,
    #[serde(alias = ">=")]
    Ge,
    #[serde(alias = "=")]
    Eq,
}

/// `maximize objective.x` subject to `matrix x (rel) bounds`, `x >= 0`.
#[derive(Debug, Deserialize)]
struct LpSpec {
    objective: Vec<f64>,
    matrix: Vec<Vec<f64>>,
    bounds: Vec<f64>,
    relations: Option<Vec<RelationSpec>>,
}

pub fn load_lp(path: &str, stdin: &mut dyn Read) -> Result<LpProblem, CliError> {
    let text = read_source(path, stdin)?;
    let spec: LpSpec = parse_json(path, &text)?;
    let relations = match spec.relations {
        Some(r) => r
            .into_iter()
            .map(|r| match r {
                RelationSpec::Le => Relation::Le,
                RelationSpec::Ge => Relation::Ge,
                RelationSpec::Eq => Relation::Eq,
            })
            .collect(),
        None => vec![Relation::Le; spec.matrix.len()],
    };
    Ok(LpProblem::with_relations(
        spec.objective,
        spec.matrix,
        spec.bounds,
        relations,
    )?)
}
