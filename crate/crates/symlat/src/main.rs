use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(symlat::cli::run(std::env::args()) as u8)
}
