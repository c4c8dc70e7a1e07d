//! Group-sensitive cost objectives and distortion accounting.

use crate::model::{Grouping, Instance, Objective};

/// Worst group's average distance to alternative `x`.
pub fn max_of_avg(inst: &Instance, grouping: &Grouping, x: usize) -> f64 {
    assert!(x < inst.m(), "alternative index {x} out of range");
    let mut worst = f64::NEG_INFINITY;
    for group in grouping.groups() {
        let sum: f64 = group.iter().map(|&i| inst.agent_alt(i, x)).sum();
        let avg = sum / group.len() as f64;
        if avg > worst {
            worst = avg;
        }
    }
    worst
}

/// Average over groups of the group's largest distance to alternative `x`.
pub fn avg_of_max(inst: &Instance, grouping: &Grouping, x: usize) -> f64 {
    assert!(x < inst.m(), "alternative index {x} out of range");
    let mut sum = 0.0;
    for group in grouping.groups() {
        let mut worst = f64::NEG_INFINITY;
        for &i in group {
            let d = inst.agent_alt(i, x);
            if d > worst {
                worst = d;
            }
        }
        sum += worst;
    }
    sum / grouping.k() as f64
}

/// Cost of alternative `x` under the chosen objective.
pub fn cost(inst: &Instance, grouping: &Grouping, objective: Objective, x: usize) -> f64 {
    match objective {
        Objective::MaxOfAvg => max_of_avg(inst, grouping, x),
        Objective::AvgOfMax => avg_of_max(inst, grouping, x),
    }
}

/// Costs of every alternative, with the exact minimizer set.
#[derive(Debug, Clone, PartialEq)]
pub struct CostProfile {
    pub costs: Vec<f64>,
    /// All indices attaining the minimum cost exactly, ascending.
    pub argmin: Vec<usize>,
}

impl CostProfile {
    /// Lowest-index optimal alternative.
    pub fn best(&self) -> usize {
        self.argmin[0]
    }

    pub fn min_cost(&self) -> f64 {
        self.costs[self.argmin[0]]
    }
}

pub fn cost_profile(inst: &Instance, grouping: &Grouping, objective: Objective) -> CostProfile {
    let costs: Vec<f64> = (0..inst.m())
        .map(|x| cost(inst, grouping, objective, x))
        .collect();
    let min = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    let argmin = (0..costs.len()).filter(|&x| costs[x] == min).collect();
    CostProfile { costs, argmin }
}

/// The optimal alternative and its cost; ties go to the lowest index.
pub fn optimal_alternative(
    inst: &Instance,
    grouping: &Grouping,
    objective: Objective,
) -> (usize, f64) {
    let profile = cost_profile(inst, grouping, objective);
    (profile.best(), profile.min_cost())
}

/// One winner's cost compared against the optimum.
///
/// A zero-cost optimum makes the ratio 1 when the winner is also at zero
/// cost and infinite otherwise; `unbounded` flags the infinite case.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub winner: usize,
    pub winner_cost: f64,
    pub opt: usize,
    pub opt_cost: f64,
    pub ratio: f64,
    pub unbounded: bool,
    pub objective: Objective,
    pub mechanism: String,
}

impl DistortionReport {
    pub fn with_mechanism(mut self, mechanism: &str) -> DistortionReport {
        self.mechanism = mechanism.to_string();
        self
    }
}

pub fn distortion(
    inst: &Instance,
    grouping: &Grouping,
    objective: Objective,
    winner: usize,
) -> DistortionReport {
    assert!(winner < inst.m(), "winner index {winner} out of range");
    let winner_cost = cost(inst, grouping, objective, winner);
    let (opt, opt_cost) = optimal_alternative(inst, grouping, objective);
    let (ratio, unbounded) = if opt_cost == 0.0 {
        if winner_cost == 0.0 {
            (1.0, false)
        } else {
            (f64::INFINITY, true)
        }
    } else {
        (winner_cost / opt_cost, false)
    };
    DistortionReport {
        winner,
        winner_cost,
        opt,
        opt_cost,
        ratio,
        unbounded,
        objective,
        mechanism: String::new(),
    }
}
