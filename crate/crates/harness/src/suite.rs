use crate::bounds::Bounds;
use crate::check::{check_with, CheckOptions};
use crate::error::{HarnessError, Result};
use crate::instance::gen_instance;
use crate::report::{Report, Verdict};
use crate::seed::mix;
use crate::theorem::TheoremId;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub theorem: TheoremId,
    pub verdict: Verdict,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub reports: Vec<Report>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub bounds: Bounds,
    pub verdict: Verdict,
    pub theorems: Vec<TheoremSummary>,
}

impl SuiteReport {
    /// Pretty JSON with a trailing newline; the byte form written to disk.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("suite reports serialize");
        s.push('\n');
        s
    }
}

/// Seed of trial `i`: `mix(seed, i)`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    mix(seed, i as u64)
}

/// Runs `trials` seeded checks of each theorem. Trials run in parallel;
/// reports come back in theorem order, then trial order.
pub fn run_suite(theorems: &[TheoremId], trials: usize, seed: u64, bounds: &Bounds) -> Result<SuiteReport> {
    run_suite_with(theorems, trials, seed, bounds, CheckOptions::default())
}

pub fn run_suite_with(theorems: &[TheoremId], trials: usize, seed: u64, bounds: &Bounds, options: CheckOptions) -> Result<SuiteReport> {
    if trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    bounds.validate()?;
    let jobs: Vec<(TheoremId, usize)> = theorems.iter().flat_map(|&t| (0..trials).map(move |i| (t, i))).collect();
    let reports: Vec<Report> = jobs
        .par_iter()
        .map(|&(t, i)| {
            let instance = gen_instance(t, trial_seed(seed, i), bounds)?;
            check_with(t, &instance, options)
        })
        .collect::<Result<_>>()?;
    let mut summaries = Vec::new();
    for (chunk, &theorem) in reports.chunks(trials).zip(theorems) {
        let count = |v: Verdict| chunk.iter().filter(|r| r.verdict == v).count();
        summaries.push(TheoremSummary {
            theorem,
            verdict: chunk.iter().fold(Verdict::Pass, |acc, r| acc.combine(r.verdict)),
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            inconclusive: count(Verdict::Inconclusive),
            reports: chunk.to_vec(),
        });
    }
    let verdict = summaries.iter().fold(Verdict::Pass, |acc, s| acc.combine(s.verdict));
    Ok(SuiteReport { seed, trials, bounds: *bounds, verdict, theorems: summaries })
}
