//! Louvain community detection over neighborhood graphs.

mod louvain;
mod modularity;

pub use louvain::{louvain, louvain_traced, LouvainConfig, LouvainTrace};
pub use modularity::modularity;

use serde::{Deserialize, Serialize};

use crate::csng::{aggregate_to_streamlines, symmetrize, Csng};
use crate::streamline::StreamlineSet;
use crate::{Error, Level, Result};

/// Community assignment over the nodes of one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub level: Level,
    pub assignment: Vec<usize>,
    pub n_communities: usize,
    pub modularity: f64,
}

impl Partition {
    /// Relabels communities densely in order of first appearance.
    pub fn from_labels(level: Level, labels: &[usize], modularity: f64) -> Self {
        let (assignment, n_communities) = densify(labels);
        Self {
            level,
            assignment,
            n_communities,
            modularity,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Member node ids of each community.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_communities];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    /// Community sizes, indexed by community id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.n_communities];
        for &c in &self.assignment {
            out[c] += 1;
        }
        out
    }
}

pub(crate) fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let assignment = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (assignment, map.len())
}

/// Which graph the detection runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Louvain on the symmetrized segment graph.
    Segment,
    /// Louvain on a streamline graph, or on the relationship-strength
    /// aggregation of a segment graph.
    Streamline,
    /// Louvain on a sub-curve graph.
    #[serde(alias = "sub-curve")]
    SubCurve,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "segment" => Ok(Self::Segment),
            "streamline" => Ok(Self::Streamline),
            "subcurve" | "sub-curve" => Ok(Self::SubCurve),
            other => Err(format!("unknown detection variant '{other}'")),
        }
    }
}

impl Variant {
    pub fn level(&self) -> Level {
        match self {
            Variant::Segment => Level::Segment,
            Variant::Streamline => Level::Streamline,
            Variant::SubCurve => Level::SubCurve,
        }
    }
}

/// Runs the requested detection variant. The returned partition is at the
/// variant's level.
pub fn detect(set: &StreamlineSet, g: &Csng, variant: Variant, config: &LouvainConfig) -> Result<Partition> {
    let mismatch = |expected| Error::LevelMismatch {
        expected,
        found: g.level(),
    };
    match (variant, g.level()) {
        (Variant::Segment, Level::Segment) | (Variant::SubCurve, Level::SubCurve) => {
            louvain(&symmetrize(g), config)
        }
        (Variant::Streamline, Level::Streamline) => louvain(&symmetrize(g), config),
        (Variant::Streamline, Level::Segment) => {
            let rel = aggregate_to_streamlines(g, set)?;
            louvain(&rel.graph, config)
        }
        (Variant::Segment, _) => Err(mismatch(Level::Segment)),
        (Variant::SubCurve, _) => Err(mismatch(Level::SubCurve)),
        (Variant::Streamline, _) => Err(mismatch(Level::Streamline)),
    }
}
