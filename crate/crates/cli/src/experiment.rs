//! Seeded experiment sweeps: draw instances, run mechanisms, check
//! every row against the registered worst-case bound for its
//! mechanism, objective and grouping symmetry, and emit CSV plus a
//! JSON summary. A violated bound aborts the run with replay
//! information, since it can only mean an implementation bug.

use std::fmt::Write as _;

use groupfair_core::{distortion, run_mechanism, MechanismError, MechanismId, Objective};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ensemble::{gen_random_euclidean_with, instance_digest, trial_rng, PRNG_NAME};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: u64,
    /// Inclusive ranges for agents, alternatives, groups, dimensions.
    pub n: (usize, usize),
    pub m: (usize, usize),
    pub k: (usize, usize),
    pub dims: (usize, usize),
    pub symmetric: bool,
    pub mechanisms: Vec<MechanismId>,
    pub objectives: Vec<Objective>,
    /// Allow mechanism-objective pairs with no registered bound.
    pub exploratory: bool,
    /// Slack for bound checks.
    pub tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            trials: 100,
            n: (4, 12),
            m: (2, 4),
            k: (1, 4),
            dims: (1, 3),
            symmetric: false,
            mechanisms: vec![MechanismId::MinTotal],
            objectives: vec![Objective::MaxOfAvg],
            exploratory: false,
            tolerance: 1e-9,
        }
    }
}

/// Closed-form worst-case guarantee, parameterized by instance shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFormula {
    /// `3 - 2μ/n` with `μ` the smallest group size.
    RefinedThree,
    Three,
    /// The number of groups `k`.
    GroupCount,
    Five,
    TwoKPlusOne,
}

impl BoundFormula {
    pub fn value(&self, n: usize, k: usize, mu: usize) -> f64 {
        match self {
            BoundFormula::RefinedThree => 3.0 - 2.0 * mu as f64 / n as f64,
            BoundFormula::Three => 3.0,
            BoundFormula::GroupCount => k as f64,
            BoundFormula::Five => 5.0,
            BoundFormula::TwoKPlusOne => 2.0 * k as f64 + 1.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BoundFormula::RefinedThree => "3-2mu/n",
            BoundFormula::Three => "3",
            BoundFormula::GroupCount => "k",
            BoundFormula::Five => "5",
            BoundFormula::TwoKPlusOne => "2k+1",
        }
    }
}

/// The guarantee a sweep enforces for a mechanism-objective pair, if
/// one exists under the given grouping symmetry.
pub fn registered_bound(
    mechanism: MechanismId,
    objective: Objective,
    symmetric: bool,
) -> Option<BoundFormula> {
    use MechanismId::*;
    use Objective::*;
    match (mechanism, objective) {
        (MinTotal, MaxOfAvg) => Some(BoundFormula::RefinedThree),
        (MinTotal, AvgOfMax) if symmetric => Some(BoundFormula::Three),
        (MinMax, AvgOfMax) => Some(BoundFormula::GroupCount),
        (Matching | PluralityVeto, MaxOfAvg) => Some(BoundFormula::Five),
        (Matching | PluralityVeto, AvgOfMax) if symmetric => Some(BoundFormula::Five),
        (TopChoice, AvgOfMax) => Some(BoundFormula::TwoKPlusOne),
        (Gpm, MaxOfAvg) => Some(BoundFormula::Three),
        (GroupScore, AvgOfMax) => Some(BoundFormula::Three),
        (VirtualMma, MaxOfAvg) => Some(BoundFormula::Three),
        (VirtualVam, AvgOfMax) => Some(BoundFormula::Three),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentRow {
    pub trial: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub sym: bool,
    pub digest: u64,
    pub mechanism: MechanismId,
    pub objective: Objective,
    pub winner: usize,
    pub winner_cost: f64,
    pub opt: usize,
    pub opt_cost: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryEntry {
    pub mechanism: String,
    pub objective: String,
    pub rows: usize,
    pub max_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub p95_ratio: Option<f64>,
    pub bound: Option<&'static str>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub summary: Vec<SummaryEntry>,
    /// Hash over per-trial instance digests, in trial order.
    pub ensemble_digest: u64,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("trial {trial} failed (replay: seed {seed}, trial {trial}): {message}")]
    Trial {
        trial: u64,
        seed: u64,
        message: String,
    },
    #[error(
        "bound violated at trial {trial} (replay: seed {seed}, trial {trial}): \
         {mechanism}/{objective} ratio {ratio} exceeds {limit}"
    )]
    BoundViolation {
        trial: u64,
        seed: u64,
        mechanism: MechanismId,
        objective: Objective,
        ratio: f64,
        limit: f64,
    },
}

fn validate_config(cfg: &ExperimentConfig) -> Result<(), ExperimentError> {
    let range_ok = |lo: usize, hi: usize| lo <= hi;
    if !range_ok(cfg.n.0, cfg.n.1) || cfg.n.0 < 1 {
        return Err(ExperimentError::Config("agent range is empty".into()));
    }
    if !range_ok(cfg.m.0, cfg.m.1) || cfg.m.0 < 2 {
        return Err(ExperimentError::Config(
            "alternative range must start at 2".into(),
        ));
    }
    if !range_ok(cfg.k.0, cfg.k.1) || cfg.k.0 < 1 {
        return Err(ExperimentError::Config("group range is empty".into()));
    }
    if cfg.k.0 > cfg.n.1 {
        return Err(ExperimentError::Config(
            "group range exceeds every agent count".into(),
        ));
    }
    if !range_ok(cfg.dims.0, cfg.dims.1) || cfg.dims.0 < 1 {
        return Err(ExperimentError::Config("dimension range is empty".into()));
    }
    if cfg.mechanisms.is_empty() || cfg.objectives.is_empty() {
        return Err(ExperimentError::Config(
            "need at least one mechanism and one objective".into(),
        ));
    }
    if cfg.tolerance.is_nan() || cfg.tolerance < 0.0 {
        return Err(ExperimentError::Config("tolerance must be >= 0".into()));
    }
    if !cfg.exploratory {
        for &mechanism in &cfg.mechanisms {
            for &objective in &cfg.objectives {
                if registered_bound(mechanism, objective, cfg.symmetric).is_none() {
                    return Err(ExperimentError::Config(format!(
                        "no registered bound for {mechanism}/{objective} \
                         (symmetric = {}); pass exploratory to run anyway",
                        cfg.symmetric
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Draws shape parameters for one trial, retrying until `k` fits `n`.
fn draw_shape(
    cfg: &ExperimentConfig,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(usize, usize, usize, usize), ExperimentError> {
    for _ in 0..1000 {
        let n = rng.gen_range(cfg.n.0..=cfg.n.1);
        let m = rng.gen_range(cfg.m.0..=cfg.m.1);
        let dim = rng.gen_range(cfg.dims.0..=cfg.dims.1);
        let candidates: Vec<usize> = (cfg.k.0..=cfg.k.1.min(n))
            .filter(|&k| !cfg.symmetric || n % k == 0)
            .collect();
        if !candidates.is_empty() {
            let k = candidates[rng.gen_range(0..candidates.len())];
            return Ok((n, m, k, dim));
        }
    }
    Err(ExperimentError::Config(
        "no (n, k) pair in the configured ranges is compatible".into(),
    ))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    validate_config(cfg)?;
    let mut rows = Vec::new();
    let mut ensemble_digest: u64 = 0xcbf29ce484222325;
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial);
        let (n, m, k, dim) = draw_shape(cfg, &mut rng)?;
        let (instance, grouping) = gen_random_euclidean_with(n, m, k, dim, &mut rng, cfg.symmetric)
            .map_err(|e| ExperimentError::Trial {
                trial,
                seed: cfg.seed,
                message: e.to_string(),
            })?;
        let digest = instance_digest(&instance);
        ensemble_digest ^= digest.rotate_left((trial % 63) as u32 + 1);
        ensemble_digest = ensemble_digest.wrapping_mul(0x100000001b3);
        let mu = grouping.min_group_size();
        for &mechanism in &cfg.mechanisms {
            let winner = match run_mechanism(mechanism, &instance, &grouping) {
                Ok(w) => w,
                // two-alternative rules sit out trials with wider fields
                Err(MechanismError::TwoAlternativesRequired { .. }) => continue,
                Err(e) => {
                    return Err(ExperimentError::Trial {
                        trial,
                        seed: cfg.seed,
                        message: format!("{mechanism}: {e}"),
                    })
                }
            };
            for &objective in &cfg.objectives {
                let report = distortion(&instance, &grouping, objective, winner);
                // a NaN ratio must trip this check too
                if report.ratio.is_nan() || report.ratio < 1.0 - 1e-12 {
                    return Err(ExperimentError::Trial {
                        trial,
                        seed: cfg.seed,
                        message: format!("{mechanism}/{objective}: ratio {} below 1", report.ratio),
                    });
                }
                if let Some(bound) = registered_bound(mechanism, objective, cfg.symmetric) {
                    let limit = bound.value(n, k, mu);
                    if report.ratio > limit + cfg.tolerance {
                        return Err(ExperimentError::BoundViolation {
                            trial,
                            seed: cfg.seed,
                            mechanism,
                            objective,
                            ratio: report.ratio,
                            limit,
                        });
                    }
                }
                rows.push(ExperimentRow {
                    trial,
                    n,
                    m,
                    k,
                    sym: cfg.symmetric,
                    digest,
                    mechanism,
                    objective,
                    winner,
                    winner_cost: report.winner_cost,
                    opt: report.opt,
                    opt_cost: report.opt_cost,
                    ratio: report.ratio,
                });
            }
        }
    }
    let summary = summarize(cfg, &rows);
    Ok(ExperimentReport {
        rows,
        summary,
        ensemble_digest,
    })
}

fn summarize(cfg: &ExperimentConfig, rows: &[ExperimentRow]) -> Vec<SummaryEntry> {
    let mut entries = Vec::new();
    for &mechanism in &cfg.mechanisms {
        for &objective in &cfg.objectives {
            let mut ratios: Vec<f64> = rows
                .iter()
                .filter(|r| r.mechanism == mechanism && r.objective == objective)
                .map(|r| r.ratio)
                .collect();
            ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let count = ratios.len();
            let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
            let (max, mean, p95) = if count == 0 {
                (None, None, None)
            } else {
                let max = ratios[count - 1];
                let mean = ratios.iter().sum::<f64>() / count as f64;
                let p95_idx = ((count as f64 * 0.95).ceil() as usize).clamp(1, count) - 1;
                (finite(max), finite(mean), finite(ratios[p95_idx]))
            };
            entries.push(SummaryEntry {
                mechanism: mechanism.to_string(),
                objective: objective.to_string(),
                rows: count,
                max_ratio: max,
                mean_ratio: mean,
                p95_ratio: p95,
                bound: registered_bound(mechanism, objective, cfg.symmetric).map(|b| b.label()),
            });
        }
    }
    entries
}

/// Renders the report as CSV with a versioned header; identical
/// configurations produce byte-identical output.
pub fn report_to_csv(cfg: &ExperimentConfig, report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str("#schema=1\n");
    let _ = writeln!(out, "#prng={PRNG_NAME}");
    let _ = writeln!(out, "#seed={}", cfg.seed);
    out.push_str("trial,n,m,k,sym,mechanism,objective,winner,winner_cost,opt,opt_cost,ratio\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.n,
            r.m,
            r.k,
            r.sym,
            r.mechanism,
            r.objective,
            r.winner,
            r.winner_cost,
            r.opt,
            r.opt_cost,
            r.ratio
        );
    }
    out
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    schema: u32,
    prng: &'static str,
    seed: u64,
    trials: u64,
    rows: usize,
    ensemble_digest: String,
    summary: &'a [SummaryEntry],
}

/// Renders the JSON summary; recomputable from the CSV rows.
pub fn report_to_summary_json(cfg: &ExperimentConfig, report: &ExperimentReport) -> String {
    let doc = SummaryDoc {
        schema: 1,
        prng: PRNG_NAME,
        seed: cfg.seed,
        trials: cfg.trials,
        rows: report.rows.len(),
        ensemble_digest: format!("{:016x}", report.ensemble_digest),
        summary: &report.summary,
    };
    let mut text = serde_json::to_string_pretty(&doc).unwrap();
    text.push('\n');
    text
}
