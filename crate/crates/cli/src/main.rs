use std::process::ExitCode;

fn main() -> ExitCode {
    gxy_cli::main_entry()
}
