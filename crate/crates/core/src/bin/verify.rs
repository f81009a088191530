use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use lienil::verify::{default_requests, emit_report, run_check, CheckRequest, Format, VerifyError, CATALOG};

/// Runs named verification checks and prints a report.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Cli {
    /// Name of the check to run (see --list).
    #[arg(required_unless_present_any = ["all", "list"], conflicts_with = "all")]
    check: Option<String>,

    /// Run every catalog check (flags are applied where the check has that parameter).
    #[arg(long)]
    all: bool,

    /// List the catalog with default parameters and exit.
    #[arg(long)]
    list: bool,

    #[arg(long)]
    n: Option<i64>,

    #[arg(long)]
    m: Option<i64>,

    /// Field characteristic (0 for the rationals); sets `char`, or `p` for checks without `char`.
    #[arg(long = "char")]
    characteristic: Option<i64>,

    #[arg(long = "max-deg")]
    max_deg: Option<i64>,

    /// Any other parameter, as key=value. May be repeated.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, i64)>,

    #[arg(long, default_value = "json")]
    format: Format,

    /// Worker threads (0 lets the runtime decide).
    #[arg(long, env = "LIENIL_THREADS", default_value_t = 0)]
    threads: usize,
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v = v.trim().parse::<i64>().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

impl Cli {
    /// The overrides in application order; `strict` rejects keys the check lacks.
    fn apply(&self, mut req: CheckRequest, strict: bool) -> Result<CheckRequest, VerifyError> {
        let char_key = if req.params.contains_key("char") { "char" } else { "p" };
        let flags = [("n", self.n), ("m", self.m), (char_key, self.characteristic), ("max_deg", self.max_deg)];
        let overrides = flags
            .iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .chain(self.params.iter().cloned());
        for (k, v) in overrides {
            if req.params.contains_key(&k) || strict {
                req = req.with(&k, v);
            }
        }
        Ok(req)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    if cli.list {
        let mut out = io::stdout().lock();
        for spec in CATALOG {
            let defaults: Vec<String> = spec.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "{:<22} {:<40} {}", spec.name, defaults.join(" "), spec.statement);
        }
        return ExitCode::SUCCESS;
    }
    let requests = if cli.all {
        default_requests().into_iter().map(|r| cli.apply(r, false)).collect::<Result<Vec<_>, _>>()
    } else {
        let name = cli.check.as_deref().expect("clap enforces a check name");
        CheckRequest::new(name).and_then(|r| cli.apply(r, true)).map(|r| vec![r])
    };
    let requests = match requests {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut results = Vec::with_capacity(requests.len());
    for req in &requests {
        match run_check(req) {
            Ok(r) => results.push(r),
            Err(e) => {
                eprintln!("error: {}: {e}", req.name);
                return ExitCode::from(2);
            }
        }
    }
    let mut out = io::stdout().lock();
    if let Err(e) = emit_report(&results, cli.format, &mut out) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }
    if results.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
