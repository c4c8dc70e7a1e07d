//! Adversarial tooling: known-bad instance families, exhaustive grouping
//! search, and worst-case metric completion for a fixed profile.

pub mod generators;
pub mod grid;
pub mod lp;
pub mod partition;
pub mod simplex;

use thiserror::Error;

use crate::model::{Grouping, Instance, Objective};

pub use generators::{
    gen_full_avgmax_asym, gen_full_avgmax_symmetric, gen_full_maxavg, gen_ordinal_avgmax_asym,
    gen_ordinal_avgmax_symmetric, gen_ordinal_maxavg, generate, FamilyId, FamilyParams,
    LowerBoundInstance,
};
pub use grid::{grid_worst_metric, grid_worst_metric_with_budget};
pub use lp::{lp_worst_metric, lp_worst_metric_with_budget, LpOutcome};

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("family {family}: {what}")]
    InvalidParameter {
        family: generators::FamilyId,
        what: String,
    },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("instance has {n} agents; exhaustive grouping search refuses more than {max}")]
    TooManyAgents { n: usize, max: usize },
    #[error("instance has {points} points; this audit refuses more than {max}")]
    TooManyPoints { points: usize, max: usize },
    #[error("{count} subproblems exceed the budget of {max}")]
    TooManySubproblems { count: u128, max: u128 },
    #[error("{count} grid placements exceed the budget of {max}")]
    TooManyPlacements { count: u128, max: u128 },
    #[error("k = {k} does not split {n} agents into equal groups")]
    GroupSizeMismatch { n: usize, k: usize },
    #[error("k = {k} is out of range for {n} agents")]
    BadGroupCount { n: usize, k: usize },
    #[error("grid step must be positive and span non-negative, both finite")]
    BadGrid,
    #[error("pinned alternative distances are not a metric ({0} violations)")]
    BadPinnedDistances(usize),
    #[error("worst-metric program is infeasible; valid inputs cannot reach this")]
    LpInfeasible,
    #[error("worst-metric witness failed re-validation ({0} violations)")]
    InvalidWitness(usize),
}

/// Cap on agents for exhaustive grouping enumeration.
pub const WORST_GROUPING_MAX_AGENTS: usize = 12;

/// Exhaustively searches all groupings with `k` groups for the one that
/// maximizes the winner's distortion. Refuses instances beyond the
/// enumeration budget rather than silently sampling.
pub fn worst_grouping(
    inst: &Instance,
    k: usize,
    objective: Objective,
    winner: usize,
    symmetric_only: bool,
) -> Result<(Grouping, f64), AdversaryError> {
    worst_grouping_with_budget(
        inst,
        k,
        objective,
        winner,
        symmetric_only,
        WORST_GROUPING_MAX_AGENTS,
    )
}

pub fn worst_grouping_with_budget(
    inst: &Instance,
    k: usize,
    objective: Objective,
    winner: usize,
    symmetric_only: bool,
    max_agents: usize,
) -> Result<(Grouping, f64), AdversaryError> {
    assert!(winner < inst.m(), "winner index out of range");
    let n = inst.n();
    if n > max_agents {
        return Err(AdversaryError::TooManyAgents { n, max: max_agents });
    }
    if k < 1 || k > n {
        return Err(AdversaryError::BadGroupCount { n, k });
    }
    if symmetric_only && !n.is_multiple_of(k) {
        return Err(AdversaryError::GroupSizeMismatch { n, k });
    }

    let mut best_ratio = f64::NEG_INFINITY;
    let mut best_blocks: Option<Vec<Vec<usize>>> = None;
    let mut visit = |blocks: &[Vec<usize>]| {
        let ratio = ratio_for_blocks(inst, blocks, objective, winner);
        if ratio > best_ratio {
            best_ratio = ratio;
            best_blocks = Some(blocks.to_vec());
        }
    };
    if symmetric_only {
        partition::for_each_symmetric_partition(n, k, &mut visit);
    } else {
        partition::for_each_partition(n, k, &mut visit);
    }
    let grouping = Grouping::new(best_blocks.unwrap(), n).unwrap();
    Ok((grouping, best_ratio))
}

/// Winner-to-optimum cost ratio under a raw block list, without building
/// a `Grouping`; the enumeration loop is hot.
fn ratio_for_blocks(
    inst: &Instance,
    blocks: &[Vec<usize>],
    objective: Objective,
    winner: usize,
) -> f64 {
    let cost_of = |x: usize| -> f64 {
        match objective {
            Objective::MaxOfAvg => blocks
                .iter()
                .map(|b| b.iter().map(|&i| inst.agent_alt(i, x)).sum::<f64>() / b.len() as f64)
                .fold(f64::NEG_INFINITY, f64::max),
            Objective::AvgOfMax => {
                blocks
                    .iter()
                    .map(|b| {
                        b.iter()
                            .map(|&i| inst.agent_alt(i, x))
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .sum::<f64>()
                    / blocks.len() as f64
            }
        }
    };
    let winner_cost = cost_of(winner);
    let opt_cost = (0..inst.m()).map(cost_of).fold(f64::INFINITY, f64::min);
    if opt_cost == 0.0 {
        if winner_cost == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        winner_cost / opt_cost
    }
}
