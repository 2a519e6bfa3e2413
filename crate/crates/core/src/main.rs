use std::process::ExitCode;

fn main() -> ExitCode {
    let code = tumour_damage::cli::run_cli(std::env::args_os());
    ExitCode::from(code as u8)
}
