//! JSON persistence for instances and groupings.
//!
//! Distances are written in scientific notation with 17 significant
//! digits, which is enough for every f64 to survive a save/load round
//! trip bit-exactly.

use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{Grouping, Instance, ModelError};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
}

#[derive(Deserialize)]
struct InstanceFile {
    n: usize,
    m: usize,
    dist: Vec<Vec<f64>>,
    #[serde(default)]
    groups: Option<Vec<Vec<usize>>>,
}

/// Streams the JSON form row by row, so large instances never need the
/// whole text in memory at once.
fn write_instance<W: Write>(
    w: &mut W,
    inst: &Instance,
    grouping: Option<&Grouping>,
) -> std::io::Result<()> {
    writeln!(w, "{{")?;
    writeln!(w, "  \"n\": {},", inst.n())?;
    writeln!(w, "  \"m\": {},", inst.m())?;
    write!(w, "  \"dist\": [")?;
    for p in 0..inst.num_points() {
        if p > 0 {
            write!(w, ",")?;
        }
        write!(w, "\n    [")?;
        for (q, v) in inst.row(p).iter().enumerate() {
            if q > 0 {
                write!(w, ", ")?;
            }
            write!(w, "{v:.16e}")?;
        }
        write!(w, "]")?;
    }
    write!(w, "\n  ]")?;
    if let Some(g) = grouping {
        write!(w, ",\n  \"groups\": [")?;
        for (i, group) in g.groups().iter().enumerate() {
            if i > 0 {
                write!(w, ",")?;
            }
            write!(w, "\n    [")?;
            for (j, agent) in group.iter().enumerate() {
                if j > 0 {
                    write!(w, ", ")?;
                }
                write!(w, "{agent}")?;
            }
            write!(w, "]")?;
        }
        write!(w, "\n  ]")?;
    }
    write!(w, "\n}}")
}

/// Serializes an instance (and optional grouping) to a JSON string.
pub fn instance_to_json(inst: &Instance, grouping: Option<&Grouping>) -> String {
    let mut buf = Vec::new();
    write_instance(&mut buf, inst, grouping).unwrap();
    String::from_utf8(buf).unwrap()
}

/// Parses an instance (and optional grouping) from a JSON string.
///
/// `origin` labels errors, typically with the file path.
pub fn instance_from_json(
    text: &str,
    origin: &str,
) -> Result<(Instance, Option<Grouping>), FileError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|source| FileError::Json {
        path: origin.to_string(),
        source,
    })?;
    let inst = Instance::new(file.n, file.m, file.dist).map_err(|source| FileError::Model {
        path: origin.to_string(),
        source,
    })?;
    let grouping = match file.groups {
        Some(groups) => {
            Some(
                Grouping::new(groups, inst.n()).map_err(|source| FileError::Model {
                    path: origin.to_string(),
                    source,
                })?,
            )
        }
        None => None,
    };
    Ok((inst, grouping))
}

pub fn save_instance(
    inst: &Instance,
    grouping: Option<&Grouping>,
    path: &Path,
) -> Result<(), FileError> {
    let wrap = |source| FileError::Write {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(wrap)?;
    let mut w = std::io::BufWriter::new(file);
    write_instance(&mut w, inst, grouping).map_err(wrap)?;
    writeln!(w).map_err(wrap)?;
    w.flush().map_err(wrap)
}

pub fn load_instance(path: &Path) -> Result<(Instance, Option<Grouping>), FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })?;
    instance_from_json(&text, &path.display().to_string())
}
