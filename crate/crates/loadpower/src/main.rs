use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(loadpower::cli::run())
}
