use std::process::ExitCode;

fn main() -> ExitCode {
    auvnav::cli::main()
}
