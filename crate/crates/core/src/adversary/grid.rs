//! Brute-force adversary over one-dimensional grid placements.
//!
//! Places every agent and alternative on multiples of `step` inside
//! `[0, span]`, keeps the placements whose induced rankings match the
//! reported profile, and returns the largest distortion of the fixed
//! winner. Independent of the simplex route: line metrics are a subset
//! of all metrics, so the result can never exceed the completion bound,
//! and on families that live on integer positions it meets it exactly.

use crate::adversary::AdversaryError;
use crate::model::{Grouping, Instance, Objective, OrdinalProfile};
use crate::objectives::distortion;

/// Cap on points (`n + m`) for exhaustive placement.
pub const GRID_MAX_POINTS: usize = 8;
/// Cap on the number of enumerated placements.
pub const GRID_MAX_PLACEMENTS: u128 = 200_000_000;

pub fn grid_worst_metric(
    profile: &OrdinalProfile,
    grouping: &Grouping,
    winner: usize,
    objective: Objective,
    step: f64,
    span: f64,
) -> Result<f64, AdversaryError> {
    grid_worst_metric_with_budget(
        profile,
        grouping,
        winner,
        objective,
        step,
        span,
        GRID_MAX_POINTS,
        GRID_MAX_PLACEMENTS,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn grid_worst_metric_with_budget(
    profile: &OrdinalProfile,
    grouping: &Grouping,
    winner: usize,
    objective: Objective,
    step: f64,
    span: f64,
    max_points: usize,
    max_placements: u128,
) -> Result<f64, AdversaryError> {
    let n = profile.n();
    let m = profile.m();
    assert_eq!(n, grouping.n(), "profile and grouping disagree on agents");
    assert!(winner < m, "winner index out of range");
    if !(step > 0.0 && step.is_finite() && span >= 0.0 && span.is_finite()) {
        return Err(AdversaryError::BadGrid);
    }
    let points = n + m;
    if points > max_points {
        return Err(AdversaryError::TooManyPoints {
            points,
            max: max_points,
        });
    }
    let values = (span / step + 1e-9).floor() as usize + 1;
    let placements = (values as u128)
        .checked_pow(points as u32)
        .unwrap_or(u128::MAX);
    if placements > max_placements {
        return Err(AdversaryError::TooManyPlacements {
            count: placements,
            max: max_placements,
        });
    }

    let mut digits = vec![0usize; points];
    let mut pos = vec![0.0f64; points];
    let mut best = 1.0f64;
    loop {
        for (p, &d) in digits.iter().enumerate() {
            pos[p] = d as f64 * step;
        }
        if placement_consistent(profile, &pos) {
            let inst = Instance::from_line(&pos[..n], &pos[n..]).unwrap();
            let report = distortion(&inst, grouping, objective, winner);
            if report.unbounded {
                return Ok(f64::INFINITY);
            }
            if report.ratio > best {
                best = report.ratio;
            }
        }
        let mut p = points;
        loop {
            if p == 0 {
                return Ok(best);
            }
            p -= 1;
            digits[p] += 1;
            if digits[p] < values {
                break;
            }
            digits[p] = 0;
        }
    }
}

/// A placement matches the profile when each agent's distances along its
/// reported ranking are non-decreasing.
fn placement_consistent(profile: &OrdinalProfile, pos: &[f64]) -> bool {
    let n = profile.n();
    let m = profile.m();
    for i in 0..n {
        let r = profile.ranking(i);
        for t in 0..m - 1 {
            let near = (pos[i] - pos[n + r[t]]).abs();
            let far = (pos[i] - pos[n + r[t + 1]]).abs();
            if near > far + 1e-12 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::generators::gen_ordinal_avgmax_asym;
    use crate::adversary::lp::{lp_worst_metric, LpOutcome};

    #[test]
    fn never_exceeds_completion_bound() {
        let profile = OrdinalProfile::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let grouping = Grouping::singletons(2);
        for objective in Objective::ALL {
            for winner in 0..2 {
                let g =
                    grid_worst_metric(&profile, &grouping, winner, objective, 0.5, 3.0).unwrap();
                let lp =
                    match lp_worst_metric(&profile, &grouping, winner, objective, None).unwrap() {
                        LpOutcome::Bounded { ratio, .. } => ratio,
                        LpOutcome::Unbounded => f64::INFINITY,
                    };
                assert!(g <= lp + 1e-6, "grid {g} above completion {lp}");
            }
        }
    }

    #[test]
    fn integer_family_attains_completion_value() {
        let lb = gen_ordinal_avgmax_asym(2).unwrap();
        let profile = OrdinalProfile::from_instance(&lb.instance);
        let g =
            grid_worst_metric(&profile, &lb.grouping, 0, Objective::AvgOfMax, 1.0, 4.0).unwrap();
        assert!((g - 5.0).abs() < 1e-9, "got {g}");
    }

    #[test]
    fn detects_unbounded_minority_winner() {
        // lone agent at 0 with its top alternative on top of it
        let profile = OrdinalProfile::new(2, vec![vec![0, 1]]).unwrap();
        let grouping = Grouping::singletons(1);
        let g = grid_worst_metric(&profile, &grouping, 1, Objective::MaxOfAvg, 1.0, 2.0).unwrap();
        assert!(g.is_infinite());
    }

    #[test]
    fn rejects_bad_grids_and_budgets() {
        let profile = OrdinalProfile::new(2, vec![vec![0, 1]]).unwrap();
        let grouping = Grouping::singletons(1);
        for (step, span) in [(0.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (f64::NAN, 1.0)] {
            assert!(matches!(
                grid_worst_metric(&profile, &grouping, 0, Objective::MaxOfAvg, step, span),
                Err(AdversaryError::BadGrid)
            ));
        }
        assert!(matches!(
            grid_worst_metric_with_budget(
                &profile,
                &grouping,
                0,
                Objective::MaxOfAvg,
                1.0,
                1.0,
                2,
                GRID_MAX_PLACEMENTS
            ),
            Err(AdversaryError::TooManyPoints { points: 3, max: 2 })
        ));
        assert!(matches!(
            grid_worst_metric_with_budget(
                &profile,
                &grouping,
                0,
                Objective::MaxOfAvg,
                1.0,
                3.0,
                GRID_MAX_POINTS,
                10
            ),
            Err(AdversaryError::TooManyPlacements { count: 64, max: 10 })
        ));
    }

    #[test]
    fn value_count_includes_both_endpoints() {
        // span 2 with step 1 enumerates 0, 1, 2 for each of 3 points
        let profile = OrdinalProfile::new(2, vec![vec![0, 1]]).unwrap();
        let grouping = Grouping::singletons(1);
        let err = grid_worst_metric_with_budget(
            &profile,
            &grouping,
            0,
            Objective::MaxOfAvg,
            1.0,
            2.0,
            GRID_MAX_POINTS,
            26,
        );
        assert!(matches!(
            err,
            Err(AdversaryError::TooManyPlacements { count: 27, max: 26 })
        ));
    }
}
