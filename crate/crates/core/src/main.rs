use std::io::Write;
use std::process::ExitCode;

use hyshift::cli::{configure_threads, run, EXIT_ERROR};

fn main() -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    let (code, out) = run(std::env::args_os());
    if code == EXIT_ERROR {
        eprint!("{out}");
    } else {
        let _ = std::io::stdout().write_all(out.as_bytes());
    }
    ExitCode::from(code as u8)
}
