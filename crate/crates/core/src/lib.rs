//! Group-fair metric voting: objectives, mechanisms, and adversarial
//! search tools for measuring distortion when agents are partitioned
//! into groups.
//!
//! An [`Instance`] holds agent-to-alternative distances that satisfy
//! the metric axioms. A [`Grouping`] partitions the agents. The two
//! [`Objective`]s aggregate group costs either as the worst group
//! average or the average of group maxima, and [`distortion`] compares
//! an elected alternative against the best one in hindsight.
//!
//! Mechanisms consume deliberately restricted views of an instance
//! (full distances, rankings only, rankings plus groups, or rankings
//! plus groups plus inter-alternative distances) so that what each rule
//! is allowed to see is enforced by construction. The [`adversary`]
//! module hosts the other side of the argument: closed-form worst-case
//! families, a linear-programming search for the worst metric behind a
//! fixed profile, a grid-placement oracle to cross-check it, and an
//! exhaustive search for the worst grouping of a fixed metric.

pub mod adversary;
pub mod io;
pub mod matching;
pub mod mechanisms;
pub mod model;
pub mod objectives;

pub use adversary::{
    generate, grid_worst_metric, lp_worst_metric, worst_grouping, AdversaryError, FamilyId,
    FamilyParams, LowerBoundInstance, LpOutcome,
};
pub use io::{instance_from_json, instance_to_json, load_instance, save_instance, FileError};
pub use matching::{
    distance_bound_holds, domination_graph, has_perfect_matching, DominationGraph, MatchingError,
};
pub use mechanisms::{
    run_mechanism, FullInfo, GroupAwareOrdinal, GroupAwareWithAltDistances, MechanismError,
    MechanismId, Ordinal,
};
pub use model::{
    Grouping, Instance, MetricViolation, ModelError, Objective, OrdinalProfile, DEFAULT_METRIC_TOL,
};
pub use objectives::{cost, cost_profile, distortion, optimal_alternative, DistortionReport};
