use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(hotkv::cli::run(std::env::args_os()) as u8)
}
