use std::process::ExitCode;

fn main() -> ExitCode {
    stackelberg_cli::main_with(std::env::args_os())
}
