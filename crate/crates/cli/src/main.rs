use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(declist_cli::run(std::env::args_os()))
}
