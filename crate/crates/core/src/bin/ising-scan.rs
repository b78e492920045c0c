use std::process::ExitCode;

fn main() -> ExitCode {
    ising_scan::cli::main_from_args(std::env::args_os())
}
