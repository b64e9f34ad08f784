use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = annular_rasmussen::cli::main_with_args(std::env::args_os());
    let result = if outcome.code == 0 {
        std::io::stdout().write_all(outcome.output.as_bytes())
    } else {
        std::io::stderr().write_all(outcome.output.as_bytes())
    };
    if result.is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.code as u8)
}
