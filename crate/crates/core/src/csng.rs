//! Curve segment neighborhood graphs in compressed sparse row form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::neighbor::{all_neighbors, build_kdtree, NeighborIndex, NeighborList, NeighborQueryConfig};
use crate::streamline::StreamlineSet;
use crate::{Error, Level, Result};

const MAGIC: &[u8; 4] = b"CSNG";
const FORMAT_VERSION: u32 = 1;

/// Neighbor configuration a graph was built with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsngConfig {
    #[serde(flatten)]
    pub neighbor: NeighborQueryConfig,
    /// Segments per sub-curve; only meaningful at sub-curve level.
    #[serde(default = "default_subcurve_len")]
    pub subcurve_len: usize,
}

fn default_subcurve_len() -> usize {
    8
}

impl CsngConfig {
    pub fn new(neighbor: NeighborQueryConfig) -> Self {
        Self {
            neighbor,
            subcurve_len: default_subcurve_len(),
        }
    }
}

/// Weighted graph over the elements of one level. Undirected graphs store
/// both directions of every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Csng {
    level: Level,
    directed: bool,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    distances: Vec<f64>,
    config: Option<CsngConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_nodes: usize,
    /// Directed entries for directed graphs, unordered pairs otherwise.
    pub n_edges: usize,
    pub total_weight: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub min_weighted_degree: f64,
    pub max_weighted_degree: f64,
    pub mean_weighted_degree: f64,
    /// `degree_histogram[d]` = number of nodes with (out-)degree `d`.
    pub degree_histogram: Vec<usize>,
}

impl Csng {
    /// Assembles a graph from `(source, target, weight, distance)` triples.
    /// Self edges are dropped, duplicates keep the max weight and the min
    /// distance. For undirected graphs each triple is inserted both ways.
    pub fn from_edges(
        level: Level,
        n_nodes: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize, f64, f64)>,
        config: Option<CsngConfig>,
    ) -> Self {
        let mut list: Vec<(u32, u32, f64, f64)> = Vec::new();
        for (s, t, w, d) in edges {
            assert!(s < n_nodes && t < n_nodes, "edge endpoint out of range");
            if s == t {
                continue;
            }
            list.push((s as u32, t as u32, w, d));
            if !directed {
                list.push((t as u32, s as u32, w, d));
            }
        }
        list.sort_unstable_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(u32, u32, f64, f64)> = Vec::with_capacity(list.len());
        for e in list {
            match merged.last_mut() {
                Some(last) if last.0 == e.0 && last.1 == e.1 => {
                    last.2 = last.2.max(e.2);
                    last.3 = last.3.min(e.3);
                }
                _ => merged.push(e),
            }
        }
        let mut offsets = vec![0usize; n_nodes + 1];
        for e in &merged {
            offsets[e.0 as usize + 1] += 1;
        }
        for i in 0..n_nodes {
            offsets[i + 1] += offsets[i];
        }
        Self {
            level,
            directed,
            offsets,
            targets: merged.iter().map(|e| e.1).collect(),
            weights: merged.iter().map(|e| e.2).collect(),
            distances: merged.iter().map(|e| e.3).collect(),
            config,
        }
    }

    /// Graph with binary weights from per-element neighbor lists.
    pub fn from_neighbor_lists(
        level: Level,
        lists: &[NeighborList],
        directed: bool,
        config: Option<CsngConfig>,
    ) -> Self {
        let n = lists.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let total: usize = lists.iter().map(|l| l.neighbors.len()).sum();
        let mut targets = Vec::with_capacity(total);
        let mut distances = Vec::with_capacity(total);
        offsets.push(0);
        for list in lists {
            let mut row: Vec<(usize, f64)> = list.neighbors.clone();
            row.sort_unstable_by_key(|x| x.0);
            for (t, d) in row {
                targets.push(t as u32);
                distances.push(d);
            }
            offsets.push(targets.len());
        }
        Self {
            level,
            directed,
            offsets,
            weights: vec![1.0; targets.len()],
            targets,
            distances,
            config,
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn config(&self) -> Option<&CsngConfig> {
        self.config.as_ref()
    }

    pub fn n_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored (directed) entries.
    pub fn n_entries(&self) -> usize {
        self.targets.len()
    }

    /// Directed entry count for directed graphs, unordered pairs otherwise.
    pub fn n_edges(&self) -> usize {
        if self.directed {
            self.targets.len()
        } else {
            self.targets.len() / 2
        }
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn weights(&self, node: usize) -> &[f64] {
        &self.weights[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn distances(&self, node: usize) -> &[f64] {
        &self.distances[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn weighted_degree(&self, node: usize) -> f64 {
        self.weights(node).iter().sum()
    }

    /// Iterates `(source, target, weight, distance)` over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.n_nodes()).flat_map(move |i| {
            let lo = self.offsets[i];
            (lo..self.offsets[i + 1])
                .map(move |e| (i, self.targets[e] as usize, self.weights[e], self.distances[e]))
        })
    }

    /// Weight of the stored entry `source -> target`, if present.
    pub fn edge_weight(&self, source: usize, target: usize) -> Option<f64> {
        let row = self.neighbors(source);
        row.binary_search(&(target as u32))
            .ok()
            .map(|k| self.weights[self.offsets[source] + k])
    }

    /// Total edge weight W: the sum over stored entries, halved for
    /// undirected graphs.
    pub fn total_weight(&self) -> f64 {
        let sum: f64 = self.weights.iter().sum();
        if self.directed {
            sum
        } else {
            sum / 2.0
        }
    }

    /// Heap bytes held by the compressed arrays.
    pub fn memory_bytes(&self) -> usize {
        self.offsets.len() * 8 + self.targets.len() * (4 + 8 + 8)
    }

    /// Subgraph induced by `members` (given in the order of the new ids).
    pub fn induced_subgraph(&self, members: &[usize]) -> Csng {
        let mut local = std::collections::HashMap::with_capacity(members.len());
        for (k, &m) in members.iter().enumerate() {
            local.insert(m, k);
        }
        let mut offsets = Vec::with_capacity(members.len() + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        let mut distances = Vec::new();
        offsets.push(0);
        for &m in members {
            let mut row: Vec<(u32, f64, f64)> = self
                .neighbors(m)
                .iter()
                .zip(self.weights(m))
                .zip(self.distances(m))
                .filter_map(|((&t, &w), &d)| local.get(&(t as usize)).map(|&lt| (lt as u32, w, d)))
                .collect();
            row.sort_unstable_by_key(|x| x.0);
            for (t, w, d) in row {
                targets.push(t);
                weights.push(w);
                distances.push(d);
            }
            offsets.push(targets.len());
        }
        Csng {
            level: self.level,
            directed: self.directed,
            offsets,
            targets,
            weights,
            distances,
            config: self.config,
        }
    }

    /// Writes the binary exchange format (little endian): magic, version,
    /// level, node count, entry count, directed flag, then offsets (u64),
    /// targets (u32), weights (f32) and distances (f32).
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&[self.level.code()])?;
        out.write_all(&(self.n_nodes() as u64).to_le_bytes())?;
        out.write_all(&(self.targets.len() as u64).to_le_bytes())?;
        out.write_all(&[self.directed as u8])?;
        for &o in &self.offsets {
            out.write_all(&(o as u64).to_le_bytes())?;
        }
        for &t in &self.targets {
            out.write_all(&t.to_le_bytes())?;
        }
        for &w in &self.weights {
            out.write_all(&(w as f32).to_le_bytes())?;
        }
        for &d in &self.distances {
            out.write_all(&(d as f32).to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the binary exchange format. Weights and distances come back at
    /// f32 precision; the neighbor configuration is not stored.
    pub fn read_binary<R: Read>(mut input: R) -> Result<Csng> {
        let bad = |m: &str| Error::MalformedInput(format!("csng binary: {m}"));
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = read_u32(&mut input)?;
        if version != FORMAT_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let mut byte = [0u8; 1];
        input.read_exact(&mut byte)?;
        let level = Level::from_code(byte[0]).ok_or_else(|| bad("unknown level"))?;
        let n_nodes = read_u64(&mut input)? as usize;
        let n_entries = read_u64(&mut input)? as usize;
        input.read_exact(&mut byte)?;
        let directed = byte[0] != 0;
        let offsets = (0..=n_nodes)
            .map(|_| read_u64(&mut input).map(|v| v as usize))
            .collect::<Result<Vec<_>>>()?;
        if offsets.first() != Some(&0)
            || offsets.last() != Some(&n_entries)
            || offsets.windows(2).any(|w| w[0] > w[1])
        {
            return Err(bad("inconsistent offsets"));
        }
        let targets = (0..n_entries)
            .map(|_| read_u32(&mut input))
            .collect::<Result<Vec<_>>>()?;
        if targets.iter().any(|&t| t as usize >= n_nodes) {
            return Err(bad("target out of range"));
        }
        let weights = (0..n_entries)
            .map(|_| read_u32(&mut input).map(|b| f32::from_bits(b) as f64))
            .collect::<Result<Vec<_>>>()?;
        let distances = (0..n_entries)
            .map(|_| read_u32(&mut input).map(|b| f32::from_bits(b) as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Csng {
            level,
            directed,
            offsets,
            targets,
            weights,
            distances,
            config: None,
        })
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Builds the neighborhood graph of one level. kNN graphs are directed,
/// radius graphs undirected; all weights are 1 and the measured distance
/// is kept per edge.
pub fn build_csng(set: &StreamlineSet, level: Level, config: &CsngConfig) -> Result<Csng> {
    let index = build_kdtree(set, level, config.subcurve_len)?;
    build_csng_with_index(set, &index, config)
}

/// Same as [`build_csng`] with a prebuilt index.
pub fn build_csng_with_index(set: &StreamlineSet, index: &NeighborIndex, config: &CsngConfig) -> Result<Csng> {
    if index.level() == Level::SubCurve && index.subcurve_len() != config.subcurve_len {
        return Err(Error::InvalidConfig("index built with another sub-curve length".into()));
    }
    let lists = all_neighbors(index, set, &config.neighbor)?;
    Ok(Csng::from_neighbor_lists(
        index.level(),
        &lists,
        config.neighbor.is_directed(),
        Some(*config),
    ))
}

/// Undirected union of a graph and its transpose: an edge exists if either
/// direction did, with the max weight and the min distance.
pub fn symmetrize(g: &Csng) -> Csng {
    if !g.directed {
        return g.clone();
    }
    Csng::from_edges(g.level, g.n_nodes(), false, g.entries(), g.config)
}

/// Streamline graph weighted by relationship strength.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationshipGraph {
    /// Undirected streamline-level graph with weights R(a, b).
    pub graph: Csng,
    /// Unnormalized cross weight `Σ w_ij` per stored entry, parallel to the
    /// graph's entries.
    pub cross_weight: Vec<f64>,
}

/// Aggregates a segment graph into streamline relationship strengths
/// `R(a, b) = Σ_{i∈a} Σ_{j∈b} w_ij / (|a|·|b|)` over the symmetrized
/// weights. Pairs without cross edges get no edge. The stored distance is
/// the smallest cross-edge distance.
pub fn aggregate_to_streamlines(g: &Csng, set: &StreamlineSet) -> Result<RelationshipGraph> {
    if g.level != Level::Segment {
        return Err(Error::LevelMismatch {
            expected: Level::Segment,
            found: g.level,
        });
    }
    if g.n_nodes() != set.segments().len() {
        return Err(Error::LengthMismatch {
            expected: set.segments().len(),
            got: g.n_nodes(),
        });
    }
    let sym = symmetrize(g);
    let owner: Vec<usize> = set.segments().iter().map(|s| s.streamline_id).collect();
    let mut pairs: Vec<(u32, u32, f64, f64)> = Vec::new();
    for (i, j, w, d) in sym.entries() {
        if i < j && owner[i] != owner[j] {
            let (a, b) = (owner[i].min(owner[j]), owner[i].max(owner[j]));
            pairs.push((a as u32, b as u32, w, d));
        }
    }
    pairs.sort_unstable_by_key(|p| (p.0, p.1));
    let mut merged: Vec<(u32, u32, f64, f64)> = Vec::new();
    for p in pairs {
        match merged.last_mut() {
            Some(last) if last.0 == p.0 && last.1 == p.1 => {
                last.2 += p.2;
                last.3 = last.3.min(p.3);
            }
            _ => merged.push(p),
        }
    }
    let sizes: Vec<f64> = set
        .streamlines()
        .iter()
        .map(|s| s.segment_count() as f64)
        .collect();
    let graph = Csng::from_edges(
        Level::Streamline,
        set.streamlines().len(),
        false,
        merged.iter().map(|&(a, b, sum, d)| {
            let r = sum / (sizes[a as usize] * sizes[b as usize]);
            (a as usize, b as usize, r, d)
        }),
        g.config,
    );
    let cross_weight = graph
        .entries()
        .map(|(i, j, _, _)| {
            let (a, b) = (i.min(j) as u32, i.max(j) as u32);
            let k = merged
                .binary_search_by(|m| (m.0, m.1).cmp(&(a, b)))
                .expect("aggregated pair present");
            merged[k].2
        })
        .collect();
    Ok(RelationshipGraph { graph, cross_weight })
}

pub fn graph_stats(g: &Csng) -> GraphStats {
    let n = g.n_nodes();
    if n == 0 {
        return GraphStats {
            n_nodes: 0,
            n_edges: 0,
            total_weight: 0.0,
            min_degree: 0,
            max_degree: 0,
            mean_degree: 0.0,
            min_weighted_degree: 0.0,
            max_weighted_degree: 0.0,
            mean_weighted_degree: 0.0,
            degree_histogram: Vec::new(),
        };
    }
    let degrees: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let wdeg: Vec<f64> = (0..n).map(|i| g.weighted_degree(i)).collect();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mut degree_histogram = vec![0usize; max_degree + 1];
    for &d in &degrees {
        degree_histogram[d] += 1;
    }
    GraphStats {
        n_nodes: n,
        n_edges: g.n_edges(),
        total_weight: g.total_weight(),
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        max_degree,
        mean_degree: degrees.iter().sum::<usize>() as f64 / n as f64,
        min_weighted_degree: wdeg.iter().cloned().fold(f64::INFINITY, f64::min),
        max_weighted_degree: wdeg.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        mean_weighted_degree: wdeg.iter().sum::<f64>() / n as f64,
        degree_histogram,
    }
}
