use std::process::ExitCode;

fn main() -> ExitCode {
    let code = vvlab::cli::main_from_args(std::env::args().skip(1));
    ExitCode::from(code as u8)
}
