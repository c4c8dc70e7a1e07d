//! Voting mechanisms, grouped by how much of the instance they may see.
//!
//! Each mechanism consumes an input type carrying exactly the information
//! its class is allowed: full agent-alternative distances, ordinal
//! rankings only, rankings plus the grouping, or rankings plus grouping
//! plus distances among the alternatives themselves. The types own copies
//! of their slice of the instance so a mechanism cannot reach anything
//! else. All ties break toward the lowest index.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::matching::{domination_graph, has_perfect_matching};
use crate::model::{
    metric_violations, Grouping, Instance, MetricViolation, ModelError, OrdinalProfile,
};

#[derive(Debug, Error)]
pub enum MechanismError {
    #[error("no alternative's domination graph has a perfect matching")]
    NoMatchingAlternative,
    #[error("mechanism requires exactly 2 alternatives, got {m}")]
    TwoAlternativesRequired { m: usize },
    #[error("alternative distances fail metric validation ({} violations, first: {})",
        violations.len(), violations[0])]
    InvalidAltMetric { violations: Vec<MetricViolation> },
    #[error("profile has {profile} agents but grouping covers {grouping}")]
    AgentCountMismatch { profile: usize, grouping: usize },
    #[error("unknown mechanism {0:?}")]
    UnknownMechanism(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Agent-to-alternative distances, the full-information view.
#[derive(Debug, Clone)]
pub struct FullInfo {
    dist: Vec<Vec<f64>>,
}

impl FullInfo {
    pub fn new(dist: Vec<Vec<f64>>) -> Result<Self, MechanismError> {
        if dist.is_empty() {
            return Err(ModelError::NoAgents.into());
        }
        let m = dist[0].len();
        if m < 2 {
            return Err(ModelError::TooFewAlternatives(m).into());
        }
        for (row, r) in dist.iter().enumerate() {
            if r.len() != m {
                return Err(ModelError::RowLength {
                    row,
                    len: r.len(),
                    expected: m,
                }
                .into());
            }
            for (q, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ModelError::NonFinite { p: row, q }.into());
                }
            }
        }
        Ok(FullInfo { dist })
    }

    pub fn from_instance(inst: &Instance) -> FullInfo {
        let dist = (0..inst.n())
            .map(|i| (0..inst.m()).map(|x| inst.agent_alt(i, x)).collect())
            .collect();
        FullInfo { dist }
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn m(&self) -> usize {
        self.dist[0].len()
    }

    #[inline]
    pub fn d(&self, agent: usize, x: usize) -> f64 {
        self.dist[agent][x]
    }
}

/// Rankings only, the ordinal view.
#[derive(Debug, Clone)]
pub struct Ordinal {
    pub profile: OrdinalProfile,
}

impl Ordinal {
    pub fn new(profile: OrdinalProfile) -> Ordinal {
        Ordinal { profile }
    }

    pub fn from_instance(inst: &Instance) -> Ordinal {
        Ordinal {
            profile: OrdinalProfile::from_instance(inst),
        }
    }
}

/// Rankings plus the agent grouping.
#[derive(Debug, Clone)]
pub struct GroupAwareOrdinal {
    pub profile: OrdinalProfile,
    pub grouping: Grouping,
}

impl GroupAwareOrdinal {
    pub fn new(profile: OrdinalProfile, grouping: Grouping) -> Result<Self, MechanismError> {
        if profile.n() != grouping.n() {
            return Err(MechanismError::AgentCountMismatch {
                profile: profile.n(),
                grouping: grouping.n(),
            });
        }
        Ok(GroupAwareOrdinal { profile, grouping })
    }

    pub fn from_instance(inst: &Instance, grouping: Grouping) -> Result<Self, MechanismError> {
        Self::new(OrdinalProfile::from_instance(inst), grouping)
    }
}

/// Rankings, grouping, and the distances among alternatives.
#[derive(Debug, Clone)]
pub struct GroupAwareWithAltDistances {
    pub profile: OrdinalProfile,
    pub grouping: Grouping,
    alt_dist: Vec<Vec<f64>>,
}

impl GroupAwareWithAltDistances {
    /// `tol` is the metric tolerance for the alternative-distance block.
    pub fn new(
        profile: OrdinalProfile,
        grouping: Grouping,
        alt_dist: Vec<Vec<f64>>,
        tol: f64,
    ) -> Result<Self, MechanismError> {
        if profile.n() != grouping.n() {
            return Err(MechanismError::AgentCountMismatch {
                profile: profile.n(),
                grouping: grouping.n(),
            });
        }
        let m = profile.m();
        if alt_dist.len() != m {
            return Err(ModelError::RowCount {
                rows: alt_dist.len(),
                expected: m,
            }
            .into());
        }
        for (row, r) in alt_dist.iter().enumerate() {
            if r.len() != m {
                return Err(ModelError::RowLength {
                    row,
                    len: r.len(),
                    expected: m,
                }
                .into());
            }
            for (q, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ModelError::NonFinite { p: row, q }.into());
                }
            }
        }
        let violations = metric_violations(m, |x, y| alt_dist[x][y], tol);
        if !violations.is_empty() {
            return Err(MechanismError::InvalidAltMetric { violations });
        }
        Ok(GroupAwareWithAltDistances {
            profile,
            grouping,
            alt_dist,
        })
    }

    pub fn from_instance(inst: &Instance, grouping: Grouping) -> Result<Self, MechanismError> {
        let m = inst.m();
        let alt_dist = (0..m)
            .map(|x| (0..m).map(|y| inst.alt_alt(x, y)).collect())
            .collect();
        Self::new(
            OrdinalProfile::from_instance(inst),
            grouping,
            alt_dist,
            crate::model::DEFAULT_METRIC_TOL,
        )
    }

    #[inline]
    pub fn alt_dist(&self, x: usize, y: usize) -> f64 {
        self.alt_dist[x][y]
    }
}

fn argmin(costs: &[f64]) -> usize {
    let mut best = 0;
    for x in 1..costs.len() {
        if costs[x] < costs[best] {
            best = x;
        }
    }
    best
}

fn argmax_count(counts: &[usize]) -> usize {
    let mut best = 0;
    for x in 1..counts.len() {
        if counts[x] > counts[best] {
            best = x;
        }
    }
    best
}

/// Alternative minimizing the total distance to the agents.
pub fn min_total_distance(inp: &FullInfo) -> usize {
    let costs: Vec<f64> = (0..inp.m())
        .map(|x| (0..inp.n()).map(|i| inp.d(i, x)).sum())
        .collect();
    argmin(&costs)
}

/// Alternative minimizing the largest agent distance.
pub fn min_max_distance(inp: &FullInfo) -> usize {
    let costs: Vec<f64> = (0..inp.m())
        .map(|x| {
            (0..inp.n())
                .map(|i| inp.d(i, x))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    argmin(&costs)
}

/// Lowest-index alternative whose domination graph has a perfect matching.
pub fn matching_winner(inp: &Ordinal) -> Result<usize, MechanismError> {
    for x in 0..inp.profile.m() {
        let graph = domination_graph(&inp.profile, x);
        if has_perfect_matching(&graph).is_some() {
            return Ok(x);
        }
    }
    Err(MechanismError::NoMatchingAlternative)
}

/// Veto-by-rank elimination.
///
/// Alternatives start with their plurality scores; anything at zero is
/// eliminated immediately. Agents then act in `order`, each decrementing
/// the score of their least-preferred surviving alternative, and any
/// alternative hitting zero is eliminated unless it is the last one
/// standing. The survivor wins.
pub fn plurality_veto(inp: &Ordinal, order: &[usize]) -> usize {
    let profile = &inp.profile;
    let (n, m) = (profile.n(), profile.m());
    assert_eq!(order.len(), n, "veto order must cover every agent");
    let mut seen = vec![false; n];
    for &i in order {
        assert!(i < n && !seen[i], "veto order must be a permutation");
        seen[i] = true;
    }

    let mut score = vec![0i64; m];
    for i in 0..n {
        score[profile.top(i)] += 1;
    }
    let mut alive = vec![true; m];
    let mut live = m;
    for x in 0..m {
        if score[x] == 0 {
            alive[x] = false;
            live -= 1;
        }
    }
    for &agent in order {
        let target = *profile
            .ranking(agent)
            .iter()
            .rev()
            .find(|&&x| alive[x])
            .unwrap();
        score[target] -= 1;
        if score[target] == 0 && live > 1 {
            alive[target] = false;
            live -= 1;
        }
    }
    alive.iter().position(|&a| a).unwrap()
}

/// Most first-place votes; ties go to the lowest index.
pub fn top_choice_winner(inp: &Ordinal) -> usize {
    let mut counts = vec![0usize; inp.profile.m()];
    for i in 0..inp.profile.n() {
        counts[inp.profile.top(i)] += 1;
    }
    argmax_count(&counts)
}

/// Compares `a/b` and `c/d` without leaving integer arithmetic.
fn frac_cmp(a: usize, b: usize, c: usize, d: usize) -> std::cmp::Ordering {
    (a as u128 * d as u128).cmp(&(c as u128 * b as u128))
}

/// Two-alternative rule: the winner is the alternative with the largest
/// within-group support fraction across groups.
pub fn group_proportional_majority(inp: &GroupAwareOrdinal) -> Result<usize, MechanismError> {
    let m = inp.profile.m();
    if m != 2 {
        return Err(MechanismError::TwoAlternativesRequired { m });
    }
    // best supporting fraction per alternative, kept as exact rationals
    let mut best = [(0usize, 1usize); 2];
    for group in inp.grouping.groups() {
        let size = group.len();
        let for0 = group.iter().filter(|&&i| inp.profile.top(i) == 0).count();
        for (x, count) in [(0, for0), (1, size - for0)] {
            if frac_cmp(count, size, best[x].0, best[x].1).is_gt() {
                best[x] = (count, size);
            }
        }
    }
    if frac_cmp(best[1].0, best[1].1, best[0].0, best[0].1).is_gt() {
        Ok(1)
    } else {
        Ok(0)
    }
}

/// Two-alternative rule: each unanimous group gives its favorite 2 points,
/// each split group gives both 1; higher score wins, ties to index 0.
pub fn group_score(inp: &GroupAwareOrdinal) -> Result<usize, MechanismError> {
    let m = inp.profile.m();
    if m != 2 {
        return Err(MechanismError::TwoAlternativesRequired { m });
    }
    let mut score = [0usize; 2];
    for group in inp.grouping.groups() {
        let for0 = group.iter().filter(|&&i| inp.profile.top(i) == 0).count();
        if for0 == group.len() {
            score[0] += 2;
        } else if for0 == 0 {
            score[1] += 2;
        } else {
            score[0] += 1;
            score[1] += 1;
        }
    }
    if score[1] > score[0] {
        Ok(1)
    } else {
        Ok(0)
    }
}

/// Stand-in cost of alternative `x` when each agent is placed at their
/// top choice: worst group average of top-to-x distances.
fn virtual_max_of_avg(inp: &GroupAwareWithAltDistances, x: usize) -> f64 {
    inp.grouping
        .groups()
        .iter()
        .map(|group| {
            let sum: f64 = group
                .iter()
                .map(|&i| inp.alt_dist(inp.profile.top(i), x))
                .sum();
            sum / group.len() as f64
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn virtual_avg_of_max(inp: &GroupAwareWithAltDistances, x: usize) -> f64 {
    let sum: f64 = inp
        .grouping
        .groups()
        .iter()
        .map(|group| {
            group
                .iter()
                .map(|&i| inp.alt_dist(inp.profile.top(i), x))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    sum / inp.grouping.k() as f64
}

/// Minimizes the worst group's average top-to-alternative distance.
pub fn virtual_minimax_of_avg(inp: &GroupAwareWithAltDistances) -> usize {
    let costs: Vec<f64> = (0..inp.profile.m())
        .map(|x| virtual_max_of_avg(inp, x))
        .collect();
    argmin(&costs)
}

/// Minimizes the average over groups of the worst top-to-alternative
/// distance.
pub fn virtual_miniavg_of_max(inp: &GroupAwareWithAltDistances) -> usize {
    let costs: Vec<f64> = (0..inp.profile.m())
        .map(|x| virtual_avg_of_max(inp, x))
        .collect();
    argmin(&costs)
}

/// Stable identifiers for every mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismId {
    MinTotal,
    MinMax,
    Matching,
    PluralityVeto,
    TopChoice,
    Gpm,
    GroupScore,
    VirtualMma,
    VirtualVam,
}

impl MechanismId {
    pub const ALL: [MechanismId; 9] = [
        MechanismId::MinTotal,
        MechanismId::MinMax,
        MechanismId::Matching,
        MechanismId::PluralityVeto,
        MechanismId::TopChoice,
        MechanismId::Gpm,
        MechanismId::GroupScore,
        MechanismId::VirtualMma,
        MechanismId::VirtualVam,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MechanismId::MinTotal => "min-total",
            MechanismId::MinMax => "min-max",
            MechanismId::Matching => "matching",
            MechanismId::PluralityVeto => "plurality-veto",
            MechanismId::TopChoice => "top-choice",
            MechanismId::Gpm => "gpm",
            MechanismId::GroupScore => "group-score",
            MechanismId::VirtualMma => "virtual-mma",
            MechanismId::VirtualVam => "virtual-vam",
        }
    }

    /// Whether the mechanism reads the grouping.
    pub fn is_group_aware(&self) -> bool {
        matches!(
            self,
            MechanismId::Gpm
                | MechanismId::GroupScore
                | MechanismId::VirtualMma
                | MechanismId::VirtualVam
        )
    }

    /// Whether the mechanism needs cardinal agent-alternative distances.
    pub fn is_full_information(&self) -> bool {
        matches!(self, MechanismId::MinTotal | MechanismId::MinMax)
    }

    /// Whether the mechanism observes exact alternative-alternative
    /// distances, so adversarial completions must keep them fixed.
    pub fn uses_alternative_distances(&self) -> bool {
        matches!(self, MechanismId::VirtualMma | MechanismId::VirtualVam)
    }
}

impl fmt::Display for MechanismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MechanismId {
    type Err = MechanismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MechanismId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| MechanismError::UnknownMechanism(s.to_string()))
    }
}

/// Runs a mechanism on an instance, constructing exactly the input view
/// its class permits. Veto order is ascending agent index.
pub fn run_mechanism(
    id: MechanismId,
    inst: &Instance,
    grouping: &Grouping,
) -> Result<usize, MechanismError> {
    match id {
        MechanismId::MinTotal => Ok(min_total_distance(&FullInfo::from_instance(inst))),
        MechanismId::MinMax => Ok(min_max_distance(&FullInfo::from_instance(inst))),
        MechanismId::Matching => matching_winner(&Ordinal::from_instance(inst)),
        MechanismId::PluralityVeto => {
            let order: Vec<usize> = (0..inst.n()).collect();
            Ok(plurality_veto(&Ordinal::from_instance(inst), &order))
        }
        MechanismId::TopChoice => Ok(top_choice_winner(&Ordinal::from_instance(inst))),
        MechanismId::Gpm => {
            group_proportional_majority(&GroupAwareOrdinal::from_instance(inst, grouping.clone())?)
        }
        MechanismId::GroupScore => {
            group_score(&GroupAwareOrdinal::from_instance(inst, grouping.clone())?)
        }
        MechanismId::VirtualMma => Ok(virtual_minimax_of_avg(
            &GroupAwareWithAltDistances::from_instance(inst, grouping.clone())?,
        )),
        MechanismId::VirtualVam => Ok(virtual_miniavg_of_max(
            &GroupAwareWithAltDistances::from_instance(inst, grouping.clone())?,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opposed_two() -> Ordinal {
        Ordinal::new(OrdinalProfile::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap())
    }

    #[test]
    fn min_total_and_min_max() {
        // agents at 0, 1, 1 on a line with alternatives at 0 and 1
        let inp = FullInfo::new(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(min_total_distance(&inp), 1);
        // max distance is 1 for both; tie goes to index 0
        assert_eq!(min_max_distance(&inp), 0);
    }

    #[test]
    fn matching_winner_lowest_index() {
        assert_eq!(matching_winner(&opposed_two()).unwrap(), 0);
    }

    #[test]
    fn veto_order_matters_for_opposed_pair() {
        let inp = opposed_two();
        assert_eq!(plurality_veto(&inp, &[0, 1]), 0);
        assert_eq!(plurality_veto(&inp, &[1, 0]), 1);
    }

    #[test]
    fn veto_eliminates_zero_scores_upfront() {
        // 3 agents, 3 alternatives; nobody tops alternative 2
        let profile =
            OrdinalProfile::new(3, vec![vec![0, 2, 1], vec![0, 1, 2], vec![1, 2, 0]]).unwrap();
        let inp = Ordinal::new(profile);
        // scores (2, 1, 0); alternative 2 drops immediately.
        // agent 0 vetoes 1 (last surviving in 0 > 2 > 1), eliminating it;
        // remaining vetoes drain 0, which survives as the last standing.
        assert_eq!(plurality_veto(&inp, &[0, 1, 2]), 0);
    }

    #[test]
    fn top_choice_counts_and_ties() {
        let profile = OrdinalProfile::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(top_choice_winner(&Ordinal::new(profile)), 0);
        let profile = OrdinalProfile::new(2, vec![vec![1, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(top_choice_winner(&Ordinal::new(profile)), 1);
    }

    #[test]
    fn gpm_best_fraction_wins() {
        // group 0: two for a, one for b (2/3); group 1: four for b (1)
        let rankings = vec![
            vec![0, 1],
            vec![0, 1],
            vec![1, 0],
            vec![1, 0],
            vec![1, 0],
            vec![1, 0],
            vec![1, 0],
        ];
        let profile = OrdinalProfile::new(2, rankings).unwrap();
        let grouping = Grouping::new(vec![vec![0, 1, 2], vec![3, 4, 5, 6]], 7).unwrap();
        let inp = GroupAwareOrdinal::new(profile, grouping).unwrap();
        assert_eq!(group_proportional_majority(&inp).unwrap(), 1);
    }

    #[test]
    fn gpm_tie_goes_to_zero() {
        let profile = OrdinalProfile::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let grouping = Grouping::singletons(2);
        let inp = GroupAwareOrdinal::new(profile, grouping).unwrap();
        // both alternatives have a unanimous singleton group
        assert_eq!(group_proportional_majority(&inp).unwrap(), 0);
    }

    #[test]
    fn gpm_requires_two_alternatives() {
        let profile = OrdinalProfile::new(3, vec![vec![0, 1, 2]]).unwrap();
        let inp = GroupAwareOrdinal::new(profile, Grouping::singletons(1)).unwrap();
        assert!(matches!(
            group_proportional_majority(&inp),
            Err(MechanismError::TwoAlternativesRequired { m: 3 })
        ));
    }

    #[test]
    fn group_score_counts_unanimity() {
        // groups: unanimous for a, mixed, unanimous for b -> 3 vs 3, tie to a
        let rankings = vec![vec![0, 1], vec![0, 1], vec![0, 1], vec![1, 0], vec![1, 0]];
        let profile = OrdinalProfile::new(2, rankings).unwrap();
        let grouping = Grouping::new(vec![vec![0, 1], vec![2, 3], vec![4]], 5).unwrap();
        let inp = GroupAwareOrdinal::new(profile, grouping).unwrap();
        assert_eq!(group_score(&inp).unwrap(), 0);
        // drop the mixed group's a-supporter: b now wins 4 to 2
        let rankings = vec![vec![0, 1], vec![0, 1], vec![1, 0], vec![1, 0], vec![1, 0]];
        let profile = OrdinalProfile::new(2, rankings).unwrap();
        let grouping = Grouping::new(vec![vec![0, 1], vec![2, 3], vec![4]], 5).unwrap();
        let inp = GroupAwareOrdinal::new(profile, grouping).unwrap();
        assert_eq!(group_score(&inp).unwrap(), 1);
    }

    fn alt_line() -> Vec<Vec<f64>> {
        // alternatives a, b, c at 0, 1, 2 on a line
        vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ]
    }

    #[test]
    fn virtual_minimax_of_avg_balances_groups() {
        // tops: group {0,1} -> a, a; group {2} -> c
        let profile =
            OrdinalProfile::new(3, vec![vec![0, 1, 2], vec![0, 2, 1], vec![2, 1, 0]]).unwrap();
        let grouping = Grouping::new(vec![vec![0, 1], vec![2]], 3).unwrap();
        let inp = GroupAwareWithAltDistances::new(profile, grouping, alt_line(), 1e-9).unwrap();
        assert_eq!(virtual_minimax_of_avg(&inp), 1);
    }

    #[test]
    fn virtual_miniavg_of_max_examples() {
        // tops: group {0,1} -> a, c; group {2} -> a
        let profile =
            OrdinalProfile::new(3, vec![vec![0, 1, 2], vec![2, 1, 0], vec![0, 2, 1]]).unwrap();
        let grouping = Grouping::new(vec![vec![0, 1], vec![2]], 3).unwrap();
        let inp =
            GroupAwareWithAltDistances::new(profile.clone(), grouping, alt_line(), 1e-9).unwrap();
        // costs: a -> (2 + 0)/2 = 1, b -> 1, c -> 2; tie to a
        assert_eq!(virtual_miniavg_of_max(&inp), 0);
        // one big group: costs 2, 1, 2; b wins
        let grouping = Grouping::one_group(3);
        let inp = GroupAwareWithAltDistances::new(profile, grouping, alt_line(), 1e-9).unwrap();
        assert_eq!(virtual_miniavg_of_max(&inp), 1);
    }

    #[test]
    fn alt_distance_block_must_be_metric() {
        let profile = OrdinalProfile::new(3, vec![vec![0, 1, 2]]).unwrap();
        let mut bad = alt_line();
        bad[0][2] = 9.0;
        bad[2][0] = 9.0;
        let err = GroupAwareWithAltDistances::new(profile, Grouping::singletons(1), bad, 1e-9)
            .unwrap_err();
        assert!(matches!(err, MechanismError::InvalidAltMetric { .. }));
    }

    #[test]
    fn mechanism_ids_round_trip() {
        for id in MechanismId::ALL {
            assert_eq!(id.as_str().parse::<MechanismId>().unwrap(), id);
        }
        assert!("majority".parse::<MechanismId>().is_err());
        assert!(MechanismId::Gpm.is_group_aware());
        assert!(!MechanismId::Matching.is_group_aware());
        assert!(MechanismId::MinTotal.is_full_information());
    }

    #[test]
    fn dispatcher_runs_every_mechanism() {
        let inst = Instance::from_line(&[0.0, 1.0], &[0.0, 1.0]).unwrap();
        let grouping = Grouping::singletons(2);
        for id in MechanismId::ALL {
            let winner = run_mechanism(id, &inst, &grouping).unwrap();
            assert!(winner < inst.m());
        }
    }
}
