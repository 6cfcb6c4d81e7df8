//! Command-line surface: `build`, `verify`, `check` and `table`.
//!
//! Every command returns its exit code instead of exiting, and writes to the
//! given streams, so the commands can be driven from tests.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::arcs::{build_arcs_with, check_feasibility, ArcsError, BuildOptions, Feasibility, Params};
use crate::blocks::{BlockError, BlockProvider};
use crate::compose::ComposeError;
use crate::graphs::Decomposition;
use crate::io::{from_json, to_json, IoError};
use crate::verify::verify_arcs;

/// Exit codes; a stable contract.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const OPEN_EXCEPTION: i32 = 3;
    pub const UNSUPPORTED: i32 = 4;
    pub const CONSTRUCTION_BUG: i32 = 5;
    pub const VERIFY_FAILED: i32 = 6;
}

#[derive(Debug, Parser)]
#[command(name = "cycleframe", version, about = "Build and verify almost resolvable cycle systems of (K_u × K_g)(λ)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub lambda: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub u: u32,
    #[arg(long)]
    pub g: u32,
}

impl From<ParamArgs> for Params {
    fn from(a: ParamArgs) -> Self {
        Params { lambda: a.lambda, k: a.k, u: a.u, g: a.g }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a decomposition and write it as JSON.
    Build {
        #[command(flatten)]
        params: ParamArgs,
        /// Output file; standard output when absent.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Skip verification of the result (benchmarking only).
        #[arg(long)]
        no_verify: bool,
    },
    /// Verify a decomposition read from a JSON file.
    Verify { input: PathBuf },
    /// Print the feasibility verdict without building.
    Check {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Build and verify every feasible cell of a grid, printing CSV.
    Table {
        /// Values of λ: `2`, `1,2` or `1..4` (inclusive).
        #[arg(long, value_parser = parse_range)]
        lambda: Range,
        #[arg(long, value_parser = parse_range)]
        k: Range,
        #[arg(long, value_parser = parse_range)]
        u: Range,
        #[arg(long, value_parser = parse_range)]
        g: Range,
        /// Skip verification of each built cell.
        #[arg(long)]
        no_verify: bool,
    },
}

/// A list of values from `a`, `a,b,c`, `a..b` (inclusive) or the empty string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Range(pub Vec<u32>);

pub fn parse_range(text: &str) -> Result<Range, String> {
    let mut values = Vec::new();
    for piece in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let number = |s: &str| s.trim().parse::<u32>().map_err(|e| format!("{s:?}: {e}"));
        match piece.split_once("..") {
            Some((lo, hi)) => values.extend(number(lo)?..=number(hi)?),
            None => values.push(number(piece)?),
        }
    }
    values.sort_unstable();
    values.dedup();
    Ok(Range(values))
}

/// Exit code for a failed build.
pub fn exit_code(e: &ArcsError) -> i32 {
    match e {
        ArcsError::Infeasible(_) => exit::INFEASIBLE,
        ArcsError::OpenException(_) => exit::OPEN_EXCEPTION,
        ArcsError::UnsupportedCase(_) => exit::UNSUPPORTED,
        // A block that no construction or search could supply.
        ArcsError::Block(BlockError::UnsupportedBlock(_))
        | ArcsError::Compose(ComposeError::Block(BlockError::UnsupportedBlock(_))) => exit::UNSUPPORTED,
        _ => exit::CONSTRUCTION_BUG,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Build { params, out: path, no_verify } => {
            cmd_build(&params.into(), path.as_deref(), BuildOptions { verify: !no_verify }, out, err)
        }
        Command::Verify { input } => cmd_verify(&input, err),
        Command::Check { params } => cmd_check(&params.into(), out),
        Command::Table { lambda, k, u, g, no_verify } => {
            let options = BuildOptions { verify: !no_verify };
            let provider = BlockProvider::global();
            cmd_table(&lambda, &k, &u, &g, out, |p| build_arcs_with(provider, p, options))
        }
    }
}

pub fn cmd_build(
    p: &Params,
    path: Option<&Path>,
    options: BuildOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let d = match build_arcs_with(BlockProvider::global(), p, options) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return exit_code(&e);
        }
    };
    let json = to_json(&d, p);
    let written = match path {
        Some(path) => std::fs::write(path, json),
        None => out.write_all(json.as_bytes()),
    };
    match written {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "cannot write output: {e}");
            exit::IO
        }
    }
}

pub fn cmd_verify(path: &Path, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            let _ = writeln!(err, "cannot read {}: {e}", path.display());
            return exit::IO;
        }
    };
    let (p, d) = match from_json(&text) {
        Ok(parsed) => parsed,
        Err(e @ IoError::Json(_)) => {
            let _ = writeln!(err, "{e}");
            return exit::IO;
        }
        // Well-formed JSON describing an invalid cycle is a failed verification.
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return exit::VERIFY_FAILED;
        }
    };
    match verify_arcs(&d, &p) {
        Ok(()) => exit::OK,
        Err(v) => {
            let _ = writeln!(err, "{v}");
            exit::VERIFY_FAILED
        }
    }
}

pub fn cmd_check(p: &Params, out: &mut dyn Write) -> i32 {
    let verdict = check_feasibility(p);
    let _ = writeln!(out, "{verdict}");
    match verdict {
        Feasibility::Feasible(_) => exit::OK,
        Feasibility::Infeasible(_) => exit::INFEASIBLE,
        Feasibility::OpenException(_) => exit::OPEN_EXCEPTION,
        Feasibility::UnsupportedCase => exit::UNSUPPORTED,
    }
}

/// One CSV row of a table sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub params: Params,
    pub verdict: String,
    pub factors: Option<usize>,
    pub millis: Option<u128>,
    pub failed: bool,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rows for every cell of the grid, in parameter order; feasible cells are
/// built concurrently with `build`.
pub fn table_rows<F>(lambda: &Range, k: &Range, u: &Range, g: &Range, build: F) -> Vec<Row>
where
    F: Fn(&Params) -> Result<Decomposition, ArcsError> + Sync,
{
    let mut cells = Vec::new();
    for &l in &lambda.0 {
        for &kk in &k.0 {
            for &uu in &u.0 {
                for &gg in &g.0 {
                    cells.push(Params { lambda: l, k: kk, u: uu, g: gg });
                }
            }
        }
    }
    cells
        .par_iter()
        .map(|p| {
            let verdict = check_feasibility(p);
            if !matches!(verdict, Feasibility::Feasible(_)) {
                return Row { params: *p, verdict: verdict.to_string(), factors: None, millis: None, failed: false };
            }
            let start = Instant::now();
            let built = build(p);
            let millis = Some(start.elapsed().as_millis());
            match built {
                Ok(d) => Row { params: *p, verdict: "built".into(), factors: Some(d.len()), millis, failed: false },
                Err(e) => Row { params: *p, verdict: format!("FAILED: {e}"), factors: None, millis, failed: true },
            }
        })
        .collect()
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut s = String::from("lambda,k,u,g,verdict,factors,millis\n");
    for r in rows {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.params.lambda,
            r.params.k,
            r.params.u,
            r.params.g,
            csv_field(&r.verdict),
            opt(r.factors.map(|f| f.to_string())),
            opt(r.millis.map(|m| m.to_string())),
        );
    }
    s
}

pub fn cmd_table<F>(lambda: &Range, k: &Range, u: &Range, g: &Range, out: &mut dyn Write, build: F) -> i32
where
    F: Fn(&Params) -> Result<Decomposition, ArcsError> + Sync,
{
    let rows = table_rows(lambda, k, u, g, build);
    if out.write_all(render_csv(&rows).as_bytes()).is_err() {
        return exit::IO;
    }
    if rows.iter().any(|r| r.failed) {
        exit::CONSTRUCTION_BUG
    } else {
        exit::OK
    }
}
