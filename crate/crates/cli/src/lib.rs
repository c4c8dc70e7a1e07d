//! Library half of the `groupfair` command-line tool: seeded instance
//! ensembles and the experiment sweep engine, kept separate from the
//! binary so tests can drive them in-process.

pub mod ensemble;
pub mod experiment;
