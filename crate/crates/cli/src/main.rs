//! `bundlecalc`: seeded checks of the commutation theorems plus a few
//! direct calculators for groups and modules.
//!
//! Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 usage or input error.

use anyhow::{bail, Context, Result};
use bundlecalc_core::fingroup::{enumerate_homs, FiniteGroup};
use bundlecalc_core::finmod::{pontryagin_dual, tor, FiniteModule, FiniteRing};
use bundlecalc_harness::suite::trial_seed;
use bundlecalc_harness::{check_with, gen_instance, run_suite_with, Bounds, CheckOptions, TheoremId, Verdict};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const USAGE_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "bundlecalc", version, about = "Checks commutation theorems for bundles of finite groups and modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded instances of one theorem and check them.
    Check {
        theorem: TheoremId,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Record wall-clock time in each report.
        #[arg(long)]
        timing: bool,
        /// Write the JSON report (one trial) or suite report (several) here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the instance a theorem would be checked on.
    Gen {
        theorem: TheoremId,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tor_i over Z/n of two modules given as JSON (inline or a file path).
    Tor {
        #[arg(long)]
        ring: i64,
        #[arg(long = "i")]
        degree: usize,
        #[arg(long)]
        module: String,
        #[arg(long)]
        coeff: String,
    },
    /// Pontryagin dual of a module given as JSON (inline or a file path).
    Dual {
        #[arg(long)]
        module: String,
    },
    /// All homomorphisms between two groups, given by name (`C4`, `S3`,
    /// `C2xC2`, ...) or as JSON tables.
    Homs {
        #[arg(long)]
        group: String,
        #[arg(long)]
        target: String,
    },
    /// Run seeded trials of several theorems.
    Suite {
        /// Theorems to run; all of them when none are named.
        #[arg(conflicts_with = "all")]
        theorems: Vec<TheoremId>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    max_base: Option<usize>,
    #[arg(long)]
    max_fibre_order: Option<usize>,
    #[arg(long)]
    max_ring: Option<usize>,
    #[arg(long)]
    max_test_order: Option<usize>,
}

impl BoundArgs {
    fn resolve(&self) -> Bounds {
        let d = Bounds::default();
        Bounds {
            max_base: self.max_base.unwrap_or(d.max_base),
            max_fibre_order: self.max_fibre_order.unwrap_or(d.max_fibre_order),
            max_ring: self.max_ring.unwrap_or(d.max_ring),
            max_test_order: self.max_test_order.unwrap_or(d.max_test_order),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(verdict) => ExitCode::from(verdict.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}

fn run(command: Command) -> Result<Verdict> {
    match command {
        Command::Check { theorem, seed, trials, bounds, timing, json } => {
            let bounds = bounds.resolve();
            let options = CheckOptions { timing };
            if trials == 1 {
                let instance = gen_instance(theorem, trial_seed(seed, 0), &bounds)?;
                let report = check_with(theorem, &instance, options)?;
                emit(&format!("{theorem} seed {}: {}\n", report.seed, verdict_name(report.verdict)));
                write_optional(json.as_deref(), &report.to_json())?;
                Ok(report.verdict)
            } else {
                let suite = run_suite_with(&[theorem], trials, seed, &bounds, options)?;
                print_suite(&suite);
                write_optional(json.as_deref(), &suite.to_json())?;
                Ok(suite.verdict)
            }
        }
        Command::Gen { theorem, seed, bounds, out } => {
            let instance = gen_instance(theorem, seed, &bounds.resolve())?;
            let text = format!("{}\n", serde_json::to_string_pretty(&instance)?);
            match out {
                Some(path) => write(&path, &text)?,
                None => emit(&text),
            }
            Ok(Verdict::Pass)
        }
        Command::Tor { ring, degree, module, coeff } => {
            let ring = FiniteRing::zmod(ring)?;
            let m = Arc::new(module_over(&ring, read_json(&module)?).context("--module")?);
            let n = Arc::new(module_over(&ring, read_json(&coeff)?).context("--coeff")?);
            let t = tor(degree, &m, &n)?;
            print_json(&json!({
                "degree": degree,
                "ring": ring,
                "invariant_factors": t.module.factors(),
                "order": t.module.order().map(|o| o.to_string()),
                "module": &*t.module,
            }))
        }
        Command::Dual { module } => {
            let m: FiniteModule = serde_json::from_value(read_json(&module)?).context("--module")?;
            print_json(&serde_json::to_value(pontryagin_dual(&m))?)
        }
        Command::Homs { group, target } => {
            let g = parse_group(&group).context("--group")?;
            let t = parse_group(&target).context("--target")?;
            let homs = enumerate_homs(&g, &t);
            let homs: Vec<&[usize]> = homs.iter().map(|h| h.values()).collect();
            print_json(&json!({ "group": group, "target": target, "count": homs.len(), "homs": homs }))
        }
        Command::Suite { theorems, all, trials, seed, bounds, timing, json } => {
            let theorems = if all || theorems.is_empty() { TheoremId::ALL.to_vec() } else { theorems };
            let suite = run_suite_with(&theorems, trials, seed, &bounds.resolve(), CheckOptions { timing })?;
            print_suite(&suite);
            write_optional(json.as_deref(), &suite.to_json())?;
            Ok(suite.verdict)
        }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn print_suite(suite: &bundlecalc_harness::SuiteReport) {
    for t in &suite.theorems {
        emit(&format!(
            "{}: {} ({} pass, {} fail, {} inconclusive)\n",
            t.theorem,
            verdict_name(t.verdict),
            t.passed,
            t.failed,
            t.inconclusive
        ));
    }
    emit(&format!("overall: {}\n", verdict_name(suite.verdict)));
}

fn print_json(value: &Value) -> Result<Verdict> {
    emit(&format!("{}\n", serde_json::to_string_pretty(value)?));
    Ok(Verdict::Pass)
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_optional(path: Option<&Path>, text: &str) -> Result<()> {
    path.map_or(Ok(()), |p| write(p, text))
}

/// Inline JSON if the argument looks like JSON, otherwise a file to read.
fn read_json(arg: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing JSON from {arg}"))
}

/// A module over `ring`; a JSON module may omit its ring, but must not name another.
fn module_over(ring: &FiniteRing, mut value: Value) -> Result<FiniteModule> {
    if let Some(obj) = value.as_object_mut() {
        obj.entry("ring").or_insert(serde_json::to_value(ring)?);
    }
    let m: FiniteModule = serde_json::from_value(value)?;
    if m.ring() != ring {
        bail!("module is over {}, expected {ring}", m.ring());
    }
    Ok(m)
}

fn parse_group(arg: &str) -> Result<FiniteGroup> {
    if arg.trim_start().starts_with('{') {
        Ok(serde_json::from_str(arg)?)
    } else {
        Ok(FiniteGroup::from_spec(arg)?)
    }
}
