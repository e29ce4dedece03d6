use std::process::ExitCode;

fn main() -> ExitCode {
    let code = eco_core::cli::main(std::env::args_os());
    ExitCode::from(code as u8)
}
