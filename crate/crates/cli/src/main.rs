//! `spectra`: command-line experiments on regular positive spectrahedra.
//!
//! Exit codes: 0 on success, 2 on invalid arguments or input, 1 on runtime failure.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Rejected argument or input, reported with exit code 2.
#[derive(Debug)]
pub struct Validation(pub String);

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Validation {}

fn is_validation(e: &anyhow::Error) -> bool {
    use spectra_core::Error as E;
    e.chain().any(|c| {
        c.is::<Validation>()
            || matches!(
                c.downcast_ref::<E>(),
                Some(
                    E::Input(_)
                        | E::Dimension { .. }
                        | E::Asymmetric(_)
                        | E::Infeasible(_)
                        | E::FieldExponent(_)
                        | E::Seed(_)
                        | E::Json(_)
                )
            )
    })
}

/// Caps the rayon pool at `SPECTRA_THREADS` when set.
fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("SPECTRA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Validation(format!("SPECTRA_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

/// Joins the error chain, skipping causes already quoted by their parent.
fn render(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    let mut last = out.clone();
    for cause in e.chain().skip(1) {
        let msg = cause.to_string();
        if !last.contains(&msg) {
            out.push_str(": ");
            out.push_str(&msg);
        }
        last = msg;
    }
    out
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    match &cli.command {
        Command::GenInstance(a) => commands::gen_instance(a),
        Command::Eval(a) => commands::eval(a),
        Command::Regularity(a) => commands::regularity(a),
        Command::Fool(a) => commands::fool(a),
        Command::Anticonc(a) => commands::anticonc(a),
        Command::Ns(a) => commands::ns(a),
        Command::As(a) => commands::avg_sens(a),
        Command::Buckets(a) => commands::buckets(a),
        Command::Factcheck(a) => commands::factcheck(a),
        Command::DerivCheck(a) => commands::deriv_check(a),
        Command::MollifierCheck(a) => commands::mollifier_check(a),
        Command::PrgSelftest(a) => commands::prg_selftest(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", render(&e));
            ExitCode::from(if is_validation(&e) { 2 } else { 1 })
        }
    }
}
