//! Phase timings of the neighborhood-graph and detection pipeline.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::community::{detect, LouvainConfig, Partition, Variant};
use crate::csng::{build_csng_with_index, Csng, CsngConfig};
use crate::neighbor::build_kdtree;
use crate::streamline::StreamlineSet;
use crate::{Level, Point3, Result};

/// One row of a scaling report. Times are wall-clock milliseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub label: String,
    pub streamlines: usize,
    pub segments: usize,
    pub data_ms: f64,
    pub kdtree_ms: f64,
    pub knn_ms: f64,
    pub detection_ms: f64,
    pub nodes: usize,
    pub edges: usize,
    pub communities: usize,
    pub peak_memory_bytes: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

const HEADER: [&str; 11] = [
    "label",
    "streamlines",
    "segments",
    "data_ms",
    "kdtree_ms",
    "knn_ms",
    "detection_ms",
    "nodes",
    "edges",
    "communities",
    "peak_memory_bytes",
];

impl BenchRow {
    fn cells(&self) -> [String; 11] {
        [
            self.label.clone(),
            self.streamlines.to_string(),
            self.segments.to_string(),
            format!("{:.3}", self.data_ms),
            format!("{:.3}", self.kdtree_ms),
            format!("{:.3}", self.knn_ms),
            format!("{:.3}", self.detection_ms),
            self.nodes.to_string(),
            self.edges.to_string(),
            self.communities.to_string(),
            self.peak_memory_bytes.to_string(),
        ]
    }
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = HEADER.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.cells().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("| {} |\n", HEADER.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
        for r in &self.rows {
            let _ = writeln!(out, "| {} |", r.cells().join(" | "));
        }
        out
    }
}

/// Rough footprint of the dataset, index and graph.
pub fn dataset_bytes(set: &StreamlineSet) -> usize {
    set.point_count() * std::mem::size_of::<Point3>() + std::mem::size_of_val(set.segments())
}

/// Output of [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub csng: Csng,
    pub partition: Partition,
    pub row: BenchRow,
}

/// Builds the KD-tree and CSNG at `level`, then runs detection, timing each
/// phase. `data_ms` is supplied by the caller since loading happens earlier.
pub fn run_pipeline(
    label: &str,
    set: &StreamlineSet,
    data_ms: f64,
    level: Level,
    variant: Variant,
    csng: &CsngConfig,
    louvain: &LouvainConfig,
) -> Result<PipelineRun> {
    let t = Instant::now();
    let index = build_kdtree(set, level, csng.subcurve_len)?;
    let kdtree_ms = ms(t);
    let t = Instant::now();
    let graph = build_csng_with_index(set, &index, csng)?;
    let knn_ms = ms(t);
    let t = Instant::now();
    let partition = detect(set, &graph, variant, louvain)?;
    let detection_ms = ms(t);
    let row = BenchRow {
        label: label.to_string(),
        streamlines: set.streamlines().len(),
        segments: set.segments().len(),
        data_ms,
        kdtree_ms,
        knn_ms,
        detection_ms,
        nodes: graph.n_nodes(),
        edges: graph.n_edges(),
        communities: partition.n_communities,
        peak_memory_bytes: dataset_bytes(set) + index.memory_bytes() + graph.memory_bytes(),
    };
    Ok(PipelineRun {
        csng: graph,
        partition,
        row,
    })
}

pub(crate) fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}
