//! Parametric instance families with known worst-case distortion ratios.
//!
//! Each generator lays agents and alternatives on a line so that the
//! adversarial alternative is index 0 and wins every relevant tie-break,
//! while the predicted ratio follows in closed form from the layout. The
//! ratios approach the matching upper bounds as the parameter grows.

use std::fmt;
use std::str::FromStr;

use crate::adversary::AdversaryError;
use crate::model::{Grouping, Instance, Objective};

/// Which construction produced an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Full information, worst group average; ratio `3λ/(λ+2) -> 3`.
    FullMaxAvg,
    /// Full information, averaged group maxima, equal-size groups;
    /// ratio `(3λ+1)/(λ+3) -> 3`.
    FullAvgMaxSym,
    /// Full information, averaged group maxima, uneven groups; ratio `k`.
    FullAvgMaxAsym,
    /// Ordinal, worst group average; ratio `(5λ+1)/(λ+1) -> 5`.
    OrdMaxAvg,
    /// Ordinal, averaged group maxima, equal-size groups;
    /// ratio `(5λ-4)/(λ(1+ε/10)) -> 5`.
    OrdAvgMaxSym,
    /// Ordinal, averaged group maxima, uneven groups; ratio `2k+1`.
    OrdAvgMaxAsym,
}

impl FamilyId {
    pub const ALL: [FamilyId; 6] = [
        FamilyId::FullMaxAvg,
        FamilyId::FullAvgMaxSym,
        FamilyId::FullAvgMaxAsym,
        FamilyId::OrdMaxAvg,
        FamilyId::OrdAvgMaxSym,
        FamilyId::OrdAvgMaxAsym,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyId::FullMaxAvg => "full-maxavg",
            FamilyId::FullAvgMaxSym => "full-avgmax-sym",
            FamilyId::FullAvgMaxAsym => "full-avgmax-asym",
            FamilyId::OrdMaxAvg => "ord-maxavg",
            FamilyId::OrdAvgMaxSym => "ord-avgmax-sym",
            FamilyId::OrdAvgMaxAsym => "ord-avgmax-asym",
        }
    }

    pub fn objective(&self) -> Objective {
        match self {
            FamilyId::FullMaxAvg | FamilyId::OrdMaxAvg => Objective::MaxOfAvg,
            _ => Objective::AvgOfMax,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = AdversaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| AdversaryError::UnknownFamily(s.to_string()))
    }
}

/// A generated instance together with its intended reading.
#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    pub instance: Instance,
    pub grouping: Grouping,
    pub objective: Objective,
    /// The alternative the construction forces through tie-breaks.
    pub adversarial_winner: usize,
    /// Exact distortion of `adversarial_winner` on this instance.
    pub predicted_ratio: f64,
    pub family: FamilyId,
    /// The parameters the family was built from.
    pub params: FamilyParams,
}

fn line(agent_pos: Vec<f64>, alt_pos: Vec<f64>, groups: Vec<Vec<usize>>) -> (Instance, Grouping) {
    let n = agent_pos.len();
    let instance = Instance::from_line(&agent_pos, &alt_pos).unwrap();
    let grouping = Grouping::new(groups, n).unwrap();
    (instance, grouping)
}

/// Shared layout for the two full-information families: the winner and
/// runner-up alternatives straddle three agent clusters at 0, 2 and 4,
/// grouped into one block of `λ` far agents plus `λ` mixed blocks.
fn straddle_layout(lambda: usize, alt_pos: Vec<f64>) -> (Instance, Grouping) {
    let n = lambda * (lambda + 1);
    let mut agent_pos = Vec::with_capacity(n);
    let mut groups = Vec::with_capacity(lambda + 1);
    groups.push((0..lambda).collect::<Vec<_>>());
    agent_pos.extend(std::iter::repeat_n(4.0, lambda));
    for j in 0..lambda {
        let start = lambda + j * lambda;
        groups.push((start..start + lambda).collect());
        agent_pos.push(0.0);
        agent_pos.extend(std::iter::repeat_n(2.0, lambda - 1));
    }
    line(agent_pos, alt_pos, groups)
}

/// Full-information, worst-group-average family.
///
/// Alternatives at 1 and 3; an all-far group makes the alternative at 1
/// cost 3 while the one at 3 costs `(λ+2)/λ`, yet total distances tie, so
/// a total-minimizing rule picks index 0.
pub fn gen_full_maxavg(lambda: usize) -> Result<LowerBoundInstance, AdversaryError> {
    if lambda < 2 {
        return Err(AdversaryError::InvalidParameter {
            family: FamilyId::FullMaxAvg,
            what: "lambda must be at least 2".into(),
        });
    }
    let l = lambda as f64;
    let (instance, grouping) = straddle_layout(lambda, vec![1.0, 3.0]);
    Ok(LowerBoundInstance {
        instance,
        grouping,
        objective: Objective::MaxOfAvg,
        adversarial_winner: 0,
        predicted_ratio: 3.0 * l / (l + 2.0),
        family: FamilyId::FullMaxAvg,
        params: FamilyParams {
            lambda: Some(lambda),
            ..Default::default()
        },
    })
}

/// Full-information, averaged-group-maxima family with equal group sizes.
///
/// Same layout, but alternative order is swapped: the costly alternative
/// (position 3) is index 0 so the total-distance tie still elects it.
pub fn gen_full_avgmax_symmetric(lambda: usize) -> Result<LowerBoundInstance, AdversaryError> {
    if lambda < 2 {
        return Err(AdversaryError::InvalidParameter {
            family: FamilyId::FullAvgMaxSym,
            what: "lambda must be at least 2".into(),
        });
    }
    let l = lambda as f64;
    let (instance, grouping) = straddle_layout(lambda, vec![3.0, 1.0]);
    Ok(LowerBoundInstance {
        instance,
        grouping,
        objective: Objective::AvgOfMax,
        adversarial_winner: 0,
        predicted_ratio: (3.0 * l + 1.0) / (l + 3.0),
        family: FamilyId::FullAvgMaxSym,
        params: FamilyParams {
            lambda: Some(lambda),
            ..Default::default()
        },
    })
}

/// Full-information, averaged-group-maxima family with uneven groups.
///
/// `k` agents sit on the winner at 0 and `k` on the runner-up at 1. One
/// group holds all winner-side agents plus a single runner-up agent; the
/// rest are singletons. Worst distances tie at 1, so a max-minimizing
/// rule picks index 0, at ratio exactly `k`.
pub fn gen_full_avgmax_asym(k: usize) -> Result<LowerBoundInstance, AdversaryError> {
    if k < 2 {
        return Err(AdversaryError::InvalidParameter {
            family: FamilyId::FullAvgMaxAsym,
            what: "k must be at least 2".into(),
        });
    }
    let mut agent_pos = vec![0.0; k];
    agent_pos.extend(vec![1.0; k]);
    let mut groups = vec![(0..=k).collect::<Vec<_>>()];
    groups.extend((k + 1..2 * k).map(|i| vec![i]));
    let (instance, grouping) = line(agent_pos, vec![0.0, 1.0], groups);
    Ok(LowerBoundInstance {
        instance,
        grouping,
        objective: Objective::AvgOfMax,
        adversarial_winner: 0,
        predicted_ratio: k as f64,
        family: FamilyId::FullAvgMaxAsym,
        params: FamilyParams {
            k: Some(k),
            ..Default::default()
        },
    })
}

/// Ordinal, worst-group-average family; `lambda` must be odd.
///
/// Alternatives at 0 and 2. One group floats just past 2, and `λ` blocks
/// split between 1 and 2. First-place votes tie, and the domination
/// graph of index 0 has a perfect matching, so matching-based rules
/// elect it at ratio `(5λ+1)/(λ+1)`.
pub fn gen_ordinal_maxavg(lambda: usize) -> Result<LowerBoundInstance, AdversaryError> {
    if lambda < 3 || lambda.is_multiple_of(2) {
        return Err(AdversaryError::InvalidParameter {
            family: FamilyId::OrdMaxAvg,
            what: "lambda must be odd and at least 3".into(),
        });
    }
    let l = lambda as f64;
    let n = lambda * (lambda + 1);
    let far = 2.0 + (l + 1.0) / (2.0 * l);
    let mut agent_pos = Vec::with_capacity(n);
    let mut groups = Vec::with_capacity(lambda + 1);
    groups.push((0..lambda).collect::<Vec<_>>());
    agent_pos.extend(std::iter::repeat_n(far, lambda));
    for j in 0..lambda {
        let start = lambda + j * lambda;
        groups.push((start..start + lambda).collect());
        agent_pos.extend(std::iter::repeat_n(1.0, lambda.div_ceil(2)));
        agent_pos.extend(std::iter::repeat_n(2.0, (lambda - 1) / 2));
    }
    let (instance, grouping) = line(agent_pos, vec![0.0, 2.0], groups);
    Ok(LowerBoundInstance {
        instance,
        grouping,
        objective: Objective::MaxOfAvg,
        adversarial_winner: 0,
        predicted_ratio: (5.0 * l + 1.0) / (l + 1.0),
        family: FamilyId::OrdMaxAvg,
        params: FamilyParams {
            lambda: Some(lambda),
            ..Default::default()
        },
    })
}

/// Ordinal, averaged-group-maxima family with equal group sizes.
///
/// Alternatives at 0 and 2. `λ` groups hold `λ-1` agents at `1 - ε/10`
/// and one at 3; `λ-2` groups hold `λ` agents at 2. First-place votes
/// tie at `λ(λ-1)` each and index 0 keeps a perfect matching, for ratio
/// `(5λ-4)/(λ(1+ε/10))`.
pub fn gen_ordinal_avgmax_symmetric(
    lambda: usize,
    epsilon: f64,
) -> Result<LowerBoundInstance, AdversaryError> {
    if lambda < 2 {
        return Err(AdversaryError::InvalidParameter {
            family: FamilyId::OrdAvgMaxSym,
            what: "lambda must be at least 2".into(),
        });
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(AdversaryError::InvalidParameter {
            family: FamilyId::OrdAvgMaxSym,
            what: "epsilon must lie in (0, 1]".into(),
        });
    }
    let l = lambda as f64;
    let near = 1.0 - epsilon / 10.0;
    let n = 2 * lambda * (lambda - 1);
    let mut agent_pos = Vec::with_capacity(n);
    let mut groups = Vec::with_capacity(2 * (lambda - 1));
    for j in 0..lambda {
        let start = j * lambda;
        groups.push((start..start + lambda).collect::<Vec<_>>());
        agent_pos.extend(std::iter::repeat_n(near, lambda - 1));
        agent_pos.push(3.0);
    }
    for j in 0..lambda.saturating_sub(2) {
        let start = lambda * lambda + j * lambda;
        groups.push((start..start + lambda).collect());
        agent_pos.extend(std::iter::repeat_n(2.0, lambda));
    }
    let (instance, grouping) = line(agent_pos, vec![0.0, 2.0], groups);
    Ok(LowerBoundInstance {
        instance,
        grouping,
        objective: Objective::AvgOfMax,
        adversarial_winner: 0,
        predicted_ratio: (5.0 * l - 4.0) / (l * (1.0 + epsilon / 10.0)),
        family: FamilyId::OrdAvgMaxSym,
        params: FamilyParams {
            lambda: Some(lambda),
            epsilon: Some(epsilon),
            ..Default::default()
        },
    })
}

/// Ordinal, averaged-group-maxima family with uneven groups.
///
/// Alternatives at 0 and 2; one group has `k` agents at 1 (equidistant,
/// so index order makes them top index 0) plus one at 3, and `k-1`
/// singletons sit at 2. First-place votes tie at `k` each, so a
/// plurality rule elects index 0 at ratio `2k+1`.
pub fn gen_ordinal_avgmax_asym(k: usize) -> Result<LowerBoundInstance, AdversaryError> {
    if k < 2 {
        return Err(AdversaryError::InvalidParameter {
            family: FamilyId::OrdAvgMaxAsym,
            what: "k must be at least 2".into(),
        });
    }
    let mut agent_pos = vec![1.0; k];
    agent_pos.push(3.0);
    agent_pos.extend(vec![2.0; k - 1]);
    let mut groups = vec![(0..=k).collect::<Vec<_>>()];
    groups.extend((k + 1..2 * k).map(|i| vec![i]));
    let (instance, grouping) = line(agent_pos, vec![0.0, 2.0], groups);
    Ok(LowerBoundInstance {
        instance,
        grouping,
        objective: Objective::AvgOfMax,
        adversarial_winner: 0,
        predicted_ratio: 2.0 * k as f64 + 1.0,
        family: FamilyId::OrdAvgMaxAsym,
        params: FamilyParams {
            k: Some(k),
            ..Default::default()
        },
    })
}

/// Parameters for [`generate`]; families ignore what they do not use.
#[derive(Debug, Clone, Copy, Default)]
pub struct FamilyParams {
    pub lambda: Option<usize>,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
}

/// Default tilt parameter for the equal-size ordinal family.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Dispatches to the family's generator, checking required parameters.
pub fn generate(
    family: FamilyId,
    params: FamilyParams,
) -> Result<LowerBoundInstance, AdversaryError> {
    let need = |p: Option<usize>, what: &str| {
        p.ok_or_else(|| AdversaryError::InvalidParameter {
            family,
            what: format!("{what} is required"),
        })
    };
    match family {
        FamilyId::FullMaxAvg => gen_full_maxavg(need(params.lambda, "lambda")?),
        FamilyId::FullAvgMaxSym => gen_full_avgmax_symmetric(need(params.lambda, "lambda")?),
        FamilyId::FullAvgMaxAsym => gen_full_avgmax_asym(need(params.k, "k")?),
        FamilyId::OrdMaxAvg => gen_ordinal_maxavg(need(params.lambda, "lambda")?),
        FamilyId::OrdAvgMaxSym => gen_ordinal_avgmax_symmetric(
            need(params.lambda, "lambda")?,
            params.epsilon.unwrap_or(DEFAULT_EPSILON),
        ),
        FamilyId::OrdAvgMaxAsym => gen_ordinal_avgmax_asym(need(params.k, "k")?),
    }
}
