//! Domination graphs and the perfect-matching machinery built on them.
//!
//! For an alternative `x`, the domination graph pairs agents `i` and `j`
//! whenever `i` ranks `x` at least as high as `j`'s top choice. A perfect
//! matching in this graph certifies that `x` is close to every agent's
//! favorite on average, which is what the distance bound below exploits.

use thiserror::Error;

use crate::model::{Instance, OrdinalProfile};

/// Tolerance for the matching-based distance bound check.
pub const DISTANCE_BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("domination graph of alternative {x} has no perfect matching")]
    NoPerfectMatching { x: usize },
    #[error("alternative index {x} out of range for m = {m}")]
    AlternativeOutOfRange { x: usize, m: usize },
}

/// Bipartite graph on agents x agents for one alternative.
#[derive(Debug, Clone)]
pub struct DominationGraph {
    n: usize,
    // adj[i] lists the agents j with rank(i, x) <= rank(i, top(j)), ascending
    adj: Vec<Vec<usize>>,
}

impl DominationGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }
}

/// Builds the domination graph of alternative `x` from a profile.
pub fn domination_graph(profile: &OrdinalProfile, x: usize) -> DominationGraph {
    let n = profile.n();
    let adj = (0..n)
        .map(|i| {
            let rx = profile.rank_position(i, x);
            (0..n)
                .filter(|&j| rx <= profile.rank_position(i, profile.top(j)))
                .collect()
        })
        .collect();
    DominationGraph { n, adj }
}

/// Hopcroft-Karp maximum matching on a left-to-right adjacency list.
fn maximum_matching(n: usize, adj: &[Vec<usize>]) -> (usize, Vec<Option<usize>>) {
    const NIL: usize = usize::MAX;
    let mut pair_left = vec![NIL; n];
    let mut pair_right = vec![NIL; n];
    let mut dist = vec![0usize; n];
    let mut queue = Vec::with_capacity(n);
    let mut size = 0;

    loop {
        // BFS builds layers from free left vertices.
        queue.clear();
        let mut found_free_right = false;
        for u in 0..n {
            if pair_left[u] == NIL {
                dist[u] = 0;
                queue.push(u);
            } else {
                dist[u] = NIL;
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                let w = pair_right[v];
                if w == NIL {
                    found_free_right = true;
                } else if dist[w] == NIL {
                    dist[w] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        if !found_free_right {
            break;
        }

        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            pair_left: &mut [usize],
            pair_right: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for idx in 0..adj[u].len() {
                let v = adj[u][idx];
                let w = pair_right[v];
                if w == NIL
                    || (dist[w] == dist[u].wrapping_add(1)
                        && augment(w, adj, pair_left, pair_right, dist))
                {
                    pair_left[u] = v;
                    pair_right[v] = u;
                    return true;
                }
            }
            dist[u] = NIL;
            false
        }

        for u in 0..n {
            if pair_left[u] == NIL && augment(u, adj, &mut pair_left, &mut pair_right, &mut dist) {
                size += 1;
            }
        }
    }

    let pairing = pair_left
        .into_iter()
        .map(|v| if v == NIL { None } else { Some(v) })
        .collect();
    (size, pairing)
}

/// Returns a perfect matching as `mu[i] = j` if one exists.
pub fn has_perfect_matching(graph: &DominationGraph) -> Option<Vec<usize>> {
    let (size, pairing) = maximum_matching(graph.n, &graph.adj);
    if size == graph.n {
        Some(pairing.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

/// Size of a maximum matching in the domination graph.
pub fn maximum_matching_size(graph: &DominationGraph) -> usize {
    maximum_matching(graph.n, &graph.adj).0
}

/// Checks `d(x, y) <= (4/n) * sum_i d(i, y)` for an alternative `x` whose
/// domination graph has a perfect matching.
///
/// The matching is a precondition: without it the inequality is not
/// guaranteed and the call fails rather than answering.
pub fn distance_bound_holds(inst: &Instance, x: usize, y: usize) -> Result<bool, MatchingError> {
    let m = inst.m();
    if x >= m {
        return Err(MatchingError::AlternativeOutOfRange { x, m });
    }
    if y >= m {
        return Err(MatchingError::AlternativeOutOfRange { x: y, m });
    }
    let profile = OrdinalProfile::from_instance(inst);
    let graph = domination_graph(&profile, x);
    if has_perfect_matching(&graph).is_none() {
        return Err(MatchingError::NoPerfectMatching { x });
    }
    let n = inst.n() as f64;
    let total: f64 = (0..inst.n()).map(|i| inst.agent_alt(i, y)).sum();
    Ok(inst.alt_alt(x, y) <= 4.0 / n * total + DISTANCE_BOUND_TOL)
}
