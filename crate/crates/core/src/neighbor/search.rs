use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kdtree::KdTree;
use super::measure::{pair_distance, ProximityMeasure};
use crate::geometry::Point3;
use crate::streamline::{ElementSpan, StreamlineSet};
use crate::{Error, Level, Result};

/// Initial representative-point over-fetch, as a multiple of k.
const OVERFETCH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "lowercase")]
pub enum Strategy {
    Knn { k: usize },
    Rbn { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborQueryConfig {
    #[serde(flatten)]
    pub strategy: Strategy,
    #[serde(default)]
    pub measure: ProximityMeasure,
}

impl NeighborQueryConfig {
    pub fn knn(k: usize, measure: ProximityMeasure) -> Self {
        Self {
            strategy: Strategy::Knn { k },
            measure,
        }
    }

    pub fn rbn(radius: f64, measure: ProximityMeasure) -> Self {
        Self {
            strategy: Strategy::Rbn { radius },
            measure,
        }
    }

    /// Radius search at 10% of the dataset diagonal.
    pub fn default_rbn(set: &StreamlineSet, measure: ProximityMeasure) -> Self {
        Self::rbn(0.1 * set.diagonal(), measure)
    }

    pub fn validate(&self) -> Result<()> {
        match self.strategy {
            Strategy::Knn { k } if k < 1 => Err(Error::InvalidConfig("knn requires k >= 1".into())),
            Strategy::Rbn { radius } if !(radius.is_finite() && radius > 0.0) => Err(
                Error::InvalidConfig(format!("rbn radius must be positive, got {radius}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(self.strategy, Strategy::Knn { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborList {
    pub query_id: usize,
    /// `(element id, distance)`, ascending by distance then id.
    pub neighbors: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
enum Representatives {
    /// One point per element (segment midpoints) with the element's sample
    /// spread around it.
    Centers {
        tree: KdTree,
        centers: Vec<Point3>,
        spread: Vec<f64>,
        max_spread: f64,
    },
    /// Every sample point, tagged with its owning element.
    Samples { tree: KdTree, owner: Vec<u32> },
}

/// Spatial index over the elements of one level.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    level: Level,
    subcurve_len: usize,
    spans: Vec<ElementSpan>,
    reps: Representatives,
}

impl NeighborIndex {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn subcurve_len(&self) -> usize {
        self.subcurve_len
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn spans(&self) -> &[ElementSpan] {
        &self.spans
    }

    /// Number of representative points stored in the tree.
    pub fn tree_size(&self) -> usize {
        match &self.reps {
            Representatives::Centers { tree, .. } | Representatives::Samples { tree, .. } => tree.len(),
        }
    }

    /// Element owning the representative point nearest to `query`.
    pub fn nearest_element(&self, query: &Point3) -> Option<usize> {
        match &self.reps {
            Representatives::Centers { tree, .. } => tree.nearest(query, 1).first().map(|x| x.1 as usize),
            Representatives::Samples { tree, owner } => {
                tree.nearest(query, 1).first().map(|x| owner[x.1 as usize] as usize)
            }
        }
    }

    pub fn memory_bytes(&self) -> usize {
        let spans = self.spans.len() * std::mem::size_of::<ElementSpan>();
        spans
            + match &self.reps {
                Representatives::Centers { tree, centers, spread, .. } => {
                    tree.memory_bytes() + centers.len() * 24 + spread.len() * 8
                }
                Representatives::Samples { tree, owner } => tree.memory_bytes() + owner.len() * 4,
            }
    }
}

/// Builds the spatial index for a level: segment midpoints at segment
/// level, every polyline point tagged with its owner otherwise.
pub fn build_kdtree(set: &StreamlineSet, level: Level, subcurve_len: usize) -> Result<NeighborIndex> {
    let spans = set.element_spans(level, subcurve_len);
    if spans.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let reps = match level {
        Level::Segment => {
            let centers: Vec<Point3> = set.segments().iter().map(|s| s.midpoint()).collect();
            let spread: Vec<f64> = set.segments().iter().map(|s| 0.5 * s.length()).collect();
            let max_spread = spread.iter().cloned().fold(0.0, f64::max);
            Representatives::Centers {
                tree: KdTree::build(&centers),
                centers,
                spread,
                max_spread,
            }
        }
        Level::SubCurve | Level::Streamline => {
            let mut points = Vec::new();
            let mut owner = Vec::new();
            for (id, span) in spans.iter().enumerate() {
                let pts = set.span_points(span);
                points.extend_from_slice(pts);
                owner.extend(std::iter::repeat_n(id as u32, pts.len()));
            }
            Representatives::Samples {
                tree: KdTree::build(&points),
                owner,
            }
        }
    };
    Ok(NeighborIndex {
        level,
        subcurve_len,
        spans,
        reps,
    })
}

/// Distance between two sub-curves or two streamlines over their polyline
/// points.
pub fn curve_distance(
    set: &StreamlineSet,
    index: &NeighborIndex,
    a: usize,
    b: usize,
    measure: ProximityMeasure,
) -> Result<f64> {
    let n = index.spans.len();
    for id in [a, b] {
        if id >= n {
            return Err(Error::InvalidId { id, level: index.level });
        }
    }
    Ok(element_distance(set, index, a, b, measure))
}

fn element_distance(set: &StreamlineSet, index: &NeighborIndex, a: usize, b: usize, measure: ProximityMeasure) -> f64 {
    pair_distance(
        a,
        set.span_points(&index.spans[a]),
        b,
        set.span_points(&index.spans[b]),
        measure,
    )
}

/// Neighbors of one element, exact under the configured measure.
pub fn query_neighbors(
    index: &NeighborIndex,
    set: &StreamlineSet,
    query_id: usize,
    config: &NeighborQueryConfig,
) -> Result<NeighborList> {
    config.validate()?;
    if query_id >= index.spans.len() {
        return Err(Error::InvalidId {
            id: query_id,
            level: index.level,
        });
    }
    let neighbors = match (&index.reps, config.strategy) {
        (Representatives::Centers { .. }, Strategy::Knn { k }) => {
            knn_centers(index, set, query_id, k, config.measure)
        }
        (Representatives::Centers { .. }, Strategy::Rbn { radius }) => {
            rbn_centers(index, set, query_id, radius, config.measure)
        }
        (Representatives::Samples { .. }, Strategy::Knn { k }) => {
            knn_samples(index, set, query_id, k, config.measure)
        }
        (Representatives::Samples { .. }, Strategy::Rbn { radius }) => {
            let cands = gather_samples(index, set, query_id, radius);
            let mut scored = score(index, set, query_id, &cands, config.measure);
            scored.retain(|&(_, d)| d <= radius);
            scored
        }
    };
    Ok(NeighborList { query_id, neighbors })
}

/// Runs [`query_neighbors`] for every element on the rayon pool. Output is
/// ordered by query id and independent of the thread count.
pub fn all_neighbors(
    index: &NeighborIndex,
    set: &StreamlineSet,
    config: &NeighborQueryConfig,
) -> Result<Vec<NeighborList>> {
    config.validate()?;
    (0..index.spans.len())
        .into_par_iter()
        .map(|q| query_neighbors(index, set, q, config))
        .collect()
}

fn score(
    index: &NeighborIndex,
    set: &StreamlineSet,
    query: usize,
    candidates: &[usize],
    measure: ProximityMeasure,
) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> = candidates
        .iter()
        .map(|&c| (c, element_distance(set, index, query, c, measure)))
        .collect();
    scored.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    scored
}

/// Slack absorbing rounding in the triangle-inequality bounds.
fn slack(scale: f64) -> f64 {
    1e-9 * (1.0 + scale.abs())
}

fn knn_centers(
    index: &NeighborIndex,
    set: &StreamlineSet,
    query: usize,
    k: usize,
    measure: ProximityMeasure,
) -> Vec<(usize, f64)> {
    let Representatives::Centers {
        tree,
        centers,
        spread,
        max_spread,
    } = &index.reps
    else {
        unreachable!("center representatives")
    };
    let n = index.spans.len();
    let want = k.min(n - 1);
    if want == 0 {
        return Vec::new();
    }
    let mut fetch = (OVERFETCH * want + 1).min(n);
    loop {
        let found = tree.nearest(&centers[query], fetch);
        let cands: Vec<usize> = found
            .iter()
            .map(|x| x.1 as usize)
            .filter(|&c| c != query)
            .collect();
        let mut scored = score(index, set, query, &cands, measure);
        scored.truncate(want);
        if fetch >= n {
            return scored;
        }
        // Every unfetched element has its center at least `reach` away, so
        // each of its samples is at least `reach - spread[q] - max_spread` from
        // each sample of the query.
        let reach = found.last().map(|x| x.0.sqrt()).unwrap_or(0.0);
        let bound = reach - spread[query] - max_spread;
        let kth = scored.last().map(|x| x.1).unwrap_or(f64::INFINITY);
        if kth < bound - slack(reach) {
            return scored;
        }
        fetch = (fetch * 2).min(n);
    }
}

fn rbn_centers(
    index: &NeighborIndex,
    set: &StreamlineSet,
    query: usize,
    radius: f64,
    measure: ProximityMeasure,
) -> Vec<(usize, f64)> {
    let Representatives::Centers {
        tree,
        centers,
        spread,
        max_spread,
    } = &index.reps
    else {
        unreachable!("center representatives")
    };
    let reach = radius + spread[query] + max_spread;
    let mut cands = Vec::new();
    tree.within(&centers[query], reach + slack(reach), |id, _| {
        if id as usize != query {
            cands.push(id as usize);
        }
    });
    let mut scored = score(index, set, query, &cands, measure);
    scored.retain(|&(_, d)| d <= radius);
    scored
}

/// Elements (other than the query) with at least one sample within `radius`
/// of one of the query's samples, sorted by id.
fn gather_samples(index: &NeighborIndex, set: &StreamlineSet, query: usize, radius: f64) -> Vec<usize> {
    let Representatives::Samples { tree, owner } = &index.reps else {
        unreachable!("sample representatives")
    };
    let reach = radius + slack(radius);
    let mut cands = Vec::new();
    for p in set.span_points(&index.spans[query]) {
        tree.within(p, reach, |id, _| {
            let o = owner[id as usize] as usize;
            if o != query {
                cands.push(o);
            }
        });
    }
    cands.sort_unstable();
    cands.dedup();
    cands
}

fn knn_samples(
    index: &NeighborIndex,
    set: &StreamlineSet,
    query: usize,
    k: usize,
    measure: ProximityMeasure,
) -> Vec<(usize, f64)> {
    let Representatives::Samples { tree, owner } = &index.reps else {
        unreachable!("sample representatives")
    };
    let n = index.spans.len();
    let want = k.min(n - 1);
    if want == 0 {
        return Vec::new();
    }
    let pts = set.span_points(&index.spans[query]);
    let probe = pts[pts.len() / 2];

    // Seed radius: distance from one query sample to the `want`-th distinct
    // other owner. Gathering at that radius yields at least `want` candidates.
    let mut fetch = (OVERFETCH * want + pts.len()).min(tree.len());
    let seed = loop {
        let found = tree.nearest(&probe, fetch);
        let mut seen: Vec<usize> = Vec::with_capacity(want);
        let mut hit = None;
        for &(d2, id) in &found {
            let o = owner[id as usize] as usize;
            if o != query && !seen.contains(&o) {
                seen.push(o);
                if seen.len() == want {
                    hit = Some(d2.sqrt());
                    break;
                }
            }
        }
        match hit {
            Some(r) => break Some(r),
            None if fetch >= tree.len() => break None,
            None => fetch = (fetch * 2).min(tree.len()),
        }
    };
    let Some(seed) = seed else {
        let all: Vec<usize> = (0..n).filter(|&c| c != query).collect();
        let mut scored = score(index, set, query, &all, measure);
        scored.truncate(want);
        return scored;
    };

    // Any element outside the gathered set has shortest distance > radius,
    // and every measure is bounded below by the shortest distance.
    let mut radius = seed;
    loop {
        let cands = gather_samples(index, set, query, radius);
        let mut scored = score(index, set, query, &cands, measure);
        scored.truncate(want);
        let kth = scored[want - 1].1;
        if kth <= radius {
            return scored;
        }
        radius = kth;
    }
}
