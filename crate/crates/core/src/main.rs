use std::process::ExitCode;

fn main() -> ExitCode {
    amu_spectra::cli::main_with_args(std::env::args_os())
}
