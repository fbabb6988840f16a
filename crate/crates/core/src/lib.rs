//! Multi-level neighborhood graphs over streamline datasets and flow
//! community extraction.
//!
//! The pipeline: ingest polylines ([`streamline`]), find element neighbors
//! with a KD-tree ([`neighbor`]), store them as a compressed graph
//! ([`csng`]), run Louvain modularity optimization ([`community`]), then
//! explore and refine the result ([`session`], [`amcs`], [`service`]).

use serde::{Deserialize, Serialize};

pub mod amcs;
pub mod attributes;
pub mod baseline;
pub mod bench;
pub mod community;
pub mod csng;
mod error;
pub mod geometry;
pub mod metrics;
pub mod neighbor;
pub mod service;
pub mod session;
pub mod streamline;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::Point3;
pub use streamline::StreamlineSet;

/// Granularity of graph elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Segment,
    #[serde(alias = "sub-curve")]
    SubCurve,
    Streamline,
}

impl Level {
    pub fn as_str(&self) -> &'static str {
        match self {
            Level::Segment => "segment",
            Level::SubCurve => "subcurve",
            Level::Streamline => "streamline",
        }
    }

    pub(crate) fn code(&self) -> u8 {
        match self {
            Level::Segment => 0,
            Level::SubCurve => 1,
            Level::Streamline => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Level::Segment),
            1 => Some(Level::SubCurve),
            2 => Some(Level::Streamline),
            _ => None,
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "segment" => Ok(Level::Segment),
            "subcurve" | "sub-curve" => Ok(Level::SubCurve),
            "streamline" => Ok(Level::Streamline),
            other => Err(format!("unknown level '{other}'")),
        }
    }
}
