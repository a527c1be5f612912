use std::process::ExitCode;

fn main() -> ExitCode {
    nrho::main_with_args(std::env::args_os())
}
