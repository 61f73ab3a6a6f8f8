use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = slcs::cli::run(std::env::args().skip(1));
    let code = ExitCode::from(outcome.exit_code as u8);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for line in &outcome.lines {
        if let Err(e) = writeln!(out, "{line}") {
            if e.kind() == io::ErrorKind::BrokenPipe {
                return code;
            }
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    code
}
