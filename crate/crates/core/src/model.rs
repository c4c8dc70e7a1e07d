//! Core problem data: metric instances, agent groupings, ordinal profiles.
//!
//! An instance places `n` agents and `m` alternatives in a common finite
//! metric space. Points are indexed `0..n` for agents followed by
//! `n..n + m` for alternatives, and all pairwise distances are stored in
//! one symmetric matrix.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Default tolerance for metric validation.
pub const DEFAULT_METRIC_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("instance needs at least 1 agent")]
    NoAgents,
    #[error("instance needs at least 2 alternatives, got {0}")]
    TooFewAlternatives(usize),
    #[error("distance matrix has {rows} rows, expected {expected}")]
    RowCount { rows: usize, expected: usize },
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    RowLength {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("non-finite distance at ({p}, {q})")]
    NonFinite { p: usize, q: usize },
    #[error("group {group} is empty")]
    EmptyGroup { group: usize },
    #[error("agent {agent} appears in both group {first} and group {second}")]
    OverlappingGroups {
        agent: usize,
        first: usize,
        second: usize,
    },
    #[error("agent {agent} is not covered by any group")]
    UncoveredAgent { agent: usize },
    #[error("group {group} names agent {agent}, but the instance has {n} agents")]
    AgentOutOfRange {
        group: usize,
        agent: usize,
        n: usize,
    },
    #[error("grouping must have at least 1 group")]
    NoGroups,
    #[error("ranking of agent {agent} is not a permutation of 0..{m}")]
    InvalidRanking { agent: usize, m: usize },
    #[error("point sets have mismatched dimensions")]
    DimensionMismatch,
    #[error("unknown objective {0:?}, expected max-of-avg or avg-of-max")]
    UnknownObjective(String),
}

/// A single deviation from the metric axioms, with its location and slack.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    /// `d(p, p)` is not zero.
    NonzeroDiagonal { point: usize, value: f64 },
    /// `|d(p, q) - d(q, p)|` exceeds the tolerance.
    Asymmetric { p: usize, q: usize, slack: f64 },
    /// A negative entry.
    Negative { p: usize, q: usize, value: f64 },
    /// `d(from, to) > d(from, via) + d(via, to)`, by `slack`.
    Triangle {
        from: usize,
        via: usize,
        to: usize,
        slack: f64,
    },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::NonzeroDiagonal { point, value } => {
                write!(f, "d({point}, {point}) = {value}, expected 0")
            }
            MetricViolation::Asymmetric { p, q, slack } => {
                write!(f, "d({p}, {q}) and d({q}, {p}) differ by {slack}")
            }
            MetricViolation::Negative { p, q, value } => {
                write!(f, "d({p}, {q}) = {value} is negative")
            }
            MetricViolation::Triangle {
                from,
                via,
                to,
                slack,
            } => {
                write!(
                    f,
                    "triangle violation ({from}, {via}, {to}): d({from}, {to}) exceeds d({from}, {via}) + d({via}, {to}) by {slack}"
                )
            }
        }
    }
}

/// `n` agents and `m` alternatives with all pairwise distances.
///
/// The matrix is stored row-major over the `n + m` points. Construction
/// checks shape and finiteness only; metric axioms are checked separately
/// by [`Instance::validate`] so that near-metrics can still be loaded and
/// audited.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    m: usize,
    dist: Vec<f64>,
}

impl Instance {
    pub fn new(n: usize, m: usize, dist: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        if n < 1 {
            return Err(ModelError::NoAgents);
        }
        if m < 2 {
            return Err(ModelError::TooFewAlternatives(m));
        }
        let p = n + m;
        if dist.len() != p {
            return Err(ModelError::RowCount {
                rows: dist.len(),
                expected: p,
            });
        }
        let mut flat = Vec::with_capacity(p * p);
        for (row, r) in dist.iter().enumerate() {
            if r.len() != p {
                return Err(ModelError::RowLength {
                    row,
                    len: r.len(),
                    expected: p,
                });
            }
            flat.extend_from_slice(r);
        }
        for (idx, v) in flat.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFinite {
                    p: idx / p,
                    q: idx % p,
                });
            }
        }
        Ok(Instance { n, m, dist: flat })
    }

    /// Builds a one-dimensional instance from positions on the real line.
    pub fn from_line(agent_pos: &[f64], alt_pos: &[f64]) -> Result<Self, ModelError> {
        let n = agent_pos.len();
        let m = alt_pos.len();
        if n < 1 {
            return Err(ModelError::NoAgents);
        }
        if m < 2 {
            return Err(ModelError::TooFewAlternatives(m));
        }
        let p = n + m;
        let mut pos = Vec::with_capacity(p);
        pos.extend_from_slice(agent_pos);
        pos.extend_from_slice(alt_pos);
        for (i, v) in pos.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFinite { p: i, q: i });
            }
        }
        let mut dist = vec![0.0; p * p];
        for i in 0..p {
            let row = &mut dist[i * p..(i + 1) * p];
            let pi = pos[i];
            for (j, d) in row.iter_mut().enumerate() {
                *d = (pi - pos[j]).abs();
            }
        }
        Ok(Instance { n, m, dist })
    }

    /// Builds a Euclidean instance from coordinate vectors of equal dimension.
    pub fn from_points(agents: &[Vec<f64>], alts: &[Vec<f64>]) -> Result<Self, ModelError> {
        let n = agents.len();
        let m = alts.len();
        if n < 1 {
            return Err(ModelError::NoAgents);
        }
        if m < 2 {
            return Err(ModelError::TooFewAlternatives(m));
        }
        let points: Vec<&Vec<f64>> = agents.iter().chain(alts.iter()).collect();
        let dim = points[0].len();
        if points.iter().any(|c| c.len() != dim) {
            return Err(ModelError::DimensionMismatch);
        }
        let p = n + m;
        let mut dist = vec![0.0; p * p];
        for i in 0..p {
            for j in (i + 1)..p {
                let d: f64 = points[i]
                    .iter()
                    .zip(points[j].iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if !d.is_finite() {
                    return Err(ModelError::NonFinite { p: i, q: j });
                }
                dist[i * p + j] = d;
                dist[j * p + i] = d;
            }
        }
        Ok(Instance { n, m, dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Total point count `n + m`.
    pub fn num_points(&self) -> usize {
        self.n + self.m
    }

    /// Distance between two points by raw point index.
    #[inline]
    pub fn point_dist(&self, p: usize, q: usize) -> f64 {
        self.dist[p * (self.n + self.m) + q]
    }

    /// Distance from agent `i` to alternative `x`.
    #[inline]
    pub fn agent_alt(&self, i: usize, x: usize) -> f64 {
        debug_assert!(i < self.n && x < self.m);
        self.point_dist(i, self.n + x)
    }

    /// Distance between two alternatives.
    #[inline]
    pub fn alt_alt(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.m && y < self.m);
        self.point_dist(self.n + x, self.n + y)
    }

    /// Distance between two agents.
    #[inline]
    pub fn agent_agent(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        self.point_dist(i, j)
    }

    /// Row of the distance matrix for one point.
    pub fn row(&self, p: usize) -> &[f64] {
        let np = self.n + self.m;
        &self.dist[p * np..(p + 1) * np]
    }

    /// The full matrix in nested form, as serialized.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.num_points())
            .map(|p| self.row(p).to_vec())
            .collect()
    }

    /// The same instance with every distance multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Instance {
        Instance {
            n: self.n,
            m: self.m,
            dist: self.dist.iter().map(|d| d * c).collect(),
        }
    }

    /// Checks the metric axioms, returning every violation found.
    ///
    /// A slack of up to `tol` is forgiven on each axiom. Triangle
    /// violations are reported once per unordered point pair, for each
    /// intermediate point that witnesses the gap.
    pub fn validate(&self, tol: f64) -> Result<(), Vec<MetricViolation>> {
        let out = metric_violations(self.num_points(), |p, q| self.point_dist(p, q), tol);
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

/// Scans a distance function over `p` points for metric-axiom violations.
pub fn metric_violations(
    p: usize,
    d: impl Fn(usize, usize) -> f64,
    tol: f64,
) -> Vec<MetricViolation> {
    let mut out = Vec::new();
    for i in 0..p {
        let dii = d(i, i);
        if dii.abs() > tol {
            out.push(MetricViolation::NonzeroDiagonal {
                point: i,
                value: dii,
            });
        }
    }
    for i in 0..p {
        for j in (i + 1)..p {
            let dij = d(i, j);
            let dji = d(j, i);
            if (dij - dji).abs() > tol {
                out.push(MetricViolation::Asymmetric {
                    p: i,
                    q: j,
                    slack: (dij - dji).abs(),
                });
            }
            if dij < -tol {
                out.push(MetricViolation::Negative {
                    p: i,
                    q: j,
                    value: dij,
                });
            }
        }
    }
    for i in 0..p {
        for j in (i + 1)..p {
            let dij = d(i, j);
            for v in 0..p {
                if v == i || v == j {
                    continue;
                }
                let slack = dij - d(i, v) - d(v, j);
                if slack > tol {
                    out.push(MetricViolation::Triangle {
                        from: i,
                        via: v,
                        to: j,
                        slack,
                    });
                }
            }
        }
    }
    out
}

/// Checks the metric axioms of an instance at the given tolerance.
pub fn validate_instance(inst: &Instance, tol: f64) -> Result<(), Vec<MetricViolation>> {
    inst.validate(tol)
}

/// A partition of the agents into `k` non-empty, disjoint, exhaustive groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    n: usize,
    groups: Vec<Vec<usize>>,
}

impl Grouping {
    pub fn new(groups: Vec<Vec<usize>>, n: usize) -> Result<Self, ModelError> {
        if groups.is_empty() {
            return Err(ModelError::NoGroups);
        }
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for (g, members) in groups.iter().enumerate() {
            if members.is_empty() {
                return Err(ModelError::EmptyGroup { group: g });
            }
            for &agent in members {
                if agent >= n {
                    return Err(ModelError::AgentOutOfRange { group: g, agent, n });
                }
                if let Some(first) = owner[agent] {
                    return Err(ModelError::OverlappingGroups {
                        agent,
                        first,
                        second: g,
                    });
                }
                owner[agent] = Some(g);
            }
        }
        if let Some(agent) = owner.iter().position(|o| o.is_none()) {
            return Err(ModelError::UncoveredAgent { agent });
        }
        Ok(Grouping { n, groups })
    }

    /// One group per agent.
    pub fn singletons(n: usize) -> Grouping {
        Grouping {
            n,
            groups: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Every agent in a single group.
    pub fn one_group(n: usize) -> Grouping {
        Grouping {
            n,
            groups: vec![(0..n).collect()],
        }
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, g: usize) -> &[usize] {
        &self.groups[g]
    }

    /// True when all groups have equal size.
    pub fn is_symmetric(&self) -> bool {
        let s = self.groups[0].len();
        self.groups.iter().all(|g| g.len() == s)
    }

    /// Size of the smallest group.
    pub fn min_group_size(&self) -> usize {
        self.groups.iter().map(|g| g.len()).min().unwrap()
    }

    pub fn into_groups(self) -> Vec<Vec<usize>> {
        self.groups
    }
}

/// Strict preference rankings, one per agent, over `m` alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalProfile {
    m: usize,
    rankings: Vec<Vec<usize>>,
    // positions[i][x] = rank of alternative x in agent i's list, 0 = top
    positions: Vec<Vec<usize>>,
}

impl OrdinalProfile {
    pub fn new(m: usize, rankings: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        if m < 2 {
            return Err(ModelError::TooFewAlternatives(m));
        }
        if rankings.is_empty() {
            return Err(ModelError::NoAgents);
        }
        let mut positions = Vec::with_capacity(rankings.len());
        for (agent, r) in rankings.iter().enumerate() {
            let mut pos = vec![usize::MAX; m];
            if r.len() != m {
                return Err(ModelError::InvalidRanking { agent, m });
            }
            for (rank, &x) in r.iter().enumerate() {
                if x >= m || pos[x] != usize::MAX {
                    return Err(ModelError::InvalidRanking { agent, m });
                }
                pos[x] = rank;
            }
            positions.push(pos);
        }
        Ok(OrdinalProfile {
            m,
            rankings,
            positions,
        })
    }

    /// Ranks alternatives by distance, ascending; equidistant alternatives
    /// are ordered by ascending index.
    pub fn from_instance(inst: &Instance) -> OrdinalProfile {
        let m = inst.m();
        let rankings = (0..inst.n())
            .map(|i| {
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&x, &y| {
                    inst.agent_alt(i, x)
                        .partial_cmp(&inst.agent_alt(i, y))
                        .unwrap()
                        .then(x.cmp(&y))
                });
                order
            })
            .collect();
        OrdinalProfile::new(m, rankings).unwrap()
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ranking(&self, agent: usize) -> &[usize] {
        &self.rankings[agent]
    }

    pub fn rankings(&self) -> &[Vec<usize>] {
        &self.rankings
    }

    /// Position of alternative `x` in agent `i`'s ranking; 0 is the top.
    #[inline]
    pub fn rank_position(&self, agent: usize, x: usize) -> usize {
        self.positions[agent][x]
    }

    /// Agent `i`'s top choice.
    #[inline]
    pub fn top(&self, agent: usize) -> usize {
        self.rankings[agent][0]
    }
}

/// Derives the ordinal profile induced by an instance's distances.
pub fn ordinal_profile_from_instance(inst: &Instance) -> OrdinalProfile {
    OrdinalProfile::from_instance(inst)
}

/// Which group-sensitive cost a candidate is judged by.
///
/// `MaxOfAvg` takes the worst group's average distance; `AvgOfMax`
/// averages each group's worst distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    MaxOfAvg,
    AvgOfMax,
}

impl Objective {
    pub const ALL: [Objective; 2] = [Objective::MaxOfAvg, Objective::AvgOfMax];

    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::MaxOfAvg => "max-of-avg",
            Objective::AvgOfMax => "avg-of-max",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max-of-avg" => Ok(Objective::MaxOfAvg),
            "avg-of-max" => Ok(Objective::AvgOfMax),
            other => Err(ModelError::UnknownObjective(other.to_string())),
        }
    }
}
