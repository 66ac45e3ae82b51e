use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pandemic_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let output = run(cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &output.text)
            .map_err(|e| CliError::Config(format!("--out {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Config(format!("stdout: {e}")))?;
        }
    }
    if cli.verify {
        for check in &output.checks.items {
            eprintln!("verify: {check}");
        }
        let failed = output.checks.failures().count();
        if failed > 0 {
            return Err(CliError::Verify(format!(
                "{failed} of {} checks disagree",
                output.checks.items.len()
            )));
        }
    }
    Ok(())
}
