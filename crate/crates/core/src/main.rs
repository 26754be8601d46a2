use std::io::{stderr, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = quadprime::cli::run_cli(std::env::args_os(), &mut stdout(), &mut stderr());
    ExitCode::from(code as u8)
}
