//! Per-segment node attributes derived from geometry and the segment graph.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csng::Csng;
use crate::geometry::angle_between;
use crate::streamline::StreamlineSet;
use crate::{Error, Level, Result};

pub const DEFAULT_CURVATURE_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementAttributes {
    /// Mean angle (radians) between the segment direction and its neighbors'.
    pub saliency: f64,
    /// Mean stored edge distance to out-neighbors.
    pub avg_neighbor_distance: f64,
    /// Turning angle per unit arc length over a sliding window of points.
    pub curvature: f64,
}

/// Saliency, neighbor distance and curvature for every segment.
/// Segments without neighbors get zero saliency and distance.
pub fn compute_attributes(set: &StreamlineSet, csng: &Csng, window: usize) -> Result<Vec<ElementAttributes>> {
    if csng.level() != Level::Segment {
        return Err(Error::LevelMismatch {
            expected: Level::Segment,
            found: csng.level(),
        });
    }
    if csng.n_nodes() != set.segments().len() {
        return Err(Error::LengthMismatch {
            expected: set.segments().len(),
            got: csng.n_nodes(),
        });
    }
    let segments = set.segments();
    Ok((0..segments.len())
        .into_par_iter()
        .map(|i| {
            let dir = segments[i].direction();
            let nbrs = csng.neighbors(i);
            let (saliency, avg_neighbor_distance) = if nbrs.is_empty() {
                (0.0, 0.0)
            } else {
                let angles: f64 = nbrs
                    .iter()
                    .map(|&j| angle_between(&dir, &segments[j as usize].direction()))
                    .sum();
                let dist: f64 = csng.distances(i).iter().sum();
                (angles / nbrs.len() as f64, dist / nbrs.len() as f64)
            };
            ElementAttributes {
                saliency,
                avg_neighbor_distance,
                curvature: window_curvature(set, i, window),
            }
        })
        .collect())
}

/// Total turning over the window divided by the arc length between the
/// midpoints of its first and last segment. The window spans `window`
/// points centered on the segment and is shifted inward at streamline ends.
fn window_curvature(set: &StreamlineSet, segment: usize, window: usize) -> f64 {
    let seg = &set.segments()[segment];
    let range = set.segment_range(seg.streamline_id);
    let count = range.len();
    // a window of w points covers w - 1 segments
    let span = window.saturating_sub(1).max(1).min(count);
    let pos = seg.index_in_streamline;
    let lo = pos.saturating_sub((span - 1) / 2).min(count - span);
    let hi = lo + span - 1;
    if hi == lo {
        return 0.0;
    }
    let segs = &set.segments()[range.start + lo..=range.start + hi];
    let mut turning = 0.0;
    let mut arc = 0.0;
    for pair in segs.windows(2) {
        turning += angle_between(&pair[0].direction(), &pair[1].direction());
        arc += 0.5 * (pair[0].length() + pair[1].length());
    }
    turning / arc
}
