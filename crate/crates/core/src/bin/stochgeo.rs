use std::process::ExitCode;

fn main() -> ExitCode {
    stochgeo::cli::run_from(std::env::args_os())
}
