fn main() {
    std::process::exit(lqcc_cli::run(std::env::args_os()));
}
