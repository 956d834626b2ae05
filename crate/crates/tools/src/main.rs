use std::process::ExitCode;

use clap::Parser;
use jnd_tools::cli::{run, Cli};
use jnd_tools::Error;

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim_end(), 2),
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => fail(e.kind(), &e.to_string(), 2),
        Err(e) => {
            let body = e.to_body();
            eprintln!("{}", serde_json::to_string(&body).unwrap_or_default());
            ExitCode::from(1)
        }
    }
}
