use std::process::ExitCode;

fn main() -> ExitCode {
    msfbm::cli::main()
}
