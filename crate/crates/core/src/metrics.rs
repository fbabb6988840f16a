//! Agreement with ground-truth labels and per-community statistics.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::csng::{symmetrize, Csng};
use crate::streamline::StreamlineSet;
use crate::{Error, Result};

/// `|A ∩ B| / |A ∪ B|`, with two empty sets scoring 1.
pub fn jaccard<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Size-weighted mean over predicted communities of their best Jaccard match
/// against any ground-truth class.
pub fn weighted_jaccard<P, T>(predicted: &[P], truth: &[T]) -> Result<f64>
where
    P: Eq + Hash + Copy,
    T: Eq + Hash + Copy,
{
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    if predicted.is_empty() {
        return Ok(1.0);
    }
    let mut pred_size: HashMap<P, usize> = HashMap::new();
    let mut truth_size: HashMap<T, usize> = HashMap::new();
    let mut overlap: HashMap<(P, T), usize> = HashMap::new();
    for (&p, &t) in predicted.iter().zip(truth) {
        *pred_size.entry(p).or_default() += 1;
        *truth_size.entry(t).or_default() += 1;
        *overlap.entry((p, t)).or_default() += 1;
    }
    let mut best: HashMap<P, f64> = HashMap::new();
    for (&(p, t), &n) in &overlap {
        let j = n as f64 / (pred_size[&p] + truth_size[&t] - n) as f64;
        let e = best.entry(p).or_insert(0.0);
        if j > *e {
            *e = j;
        }
    }
    let weighted: f64 = best.iter().map(|(p, j)| pred_size[p] as f64 * j).sum();
    Ok(weighted / predicted.len() as f64)
}

/// Expands per-streamline labels to per-segment labels.
pub fn segment_labels(set: &StreamlineSet, streamline_labels: &[i64]) -> Result<Vec<i64>> {
    if streamline_labels.len() != set.streamlines().len() {
        return Err(Error::LengthMismatch {
            expected: set.streamlines().len(),
            got: streamline_labels.len(),
        });
    }
    Ok(set
        .segments()
        .iter()
        .map(|s| streamline_labels[s.streamline_id])
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityStats {
    pub community_id: usize,
    pub size: usize,
    pub internal_edges: usize,
    pub external_edges: usize,
    pub isolation: f64,
    pub internal_density: f64,
    pub mean_neighbor_distance: f64,
}

/// Edge counts, isolation, density and mean internal edge distance for every
/// community, counted on the symmetrized graph.
pub fn community_stats(g: &Csng, p: &Partition) -> Result<Vec<CommunityStats>> {
    if p.level != g.level() {
        return Err(Error::LevelMismatch {
            expected: g.level(),
            found: p.level,
        });
    }
    if p.assignment.len() != g.n_nodes() {
        return Err(Error::LengthMismatch {
            expected: g.n_nodes(),
            got: p.assignment.len(),
        });
    }
    let g = symmetrize(g);
    let k = p.n_communities;
    let mut internal = vec![0usize; k];
    let mut external = vec![0usize; k];
    let mut dist = vec![0.0; k];
    for (i, j, _, d) in g.entries() {
        if i >= j {
            continue;
        }
        let (a, b) = (p.assignment[i], p.assignment[j]);
        if a == b {
            internal[a] += 1;
            dist[a] += d;
        } else {
            external[a] += 1;
            external[b] += 1;
        }
    }
    Ok(p.sizes()
        .into_iter()
        .enumerate()
        .map(|(c, size)| {
            let touching = internal[c] + external[c];
            let pairs = size * size.saturating_sub(1) / 2;
            CommunityStats {
                community_id: c,
                size,
                internal_edges: internal[c],
                external_edges: external[c],
                isolation: if touching == 0 {
                    0.0
                } else {
                    external[c] as f64 / touching as f64
                },
                internal_density: if pairs == 0 {
                    0.0
                } else {
                    internal[c] as f64 / pairs as f64
                },
                mean_neighbor_distance: if internal[c] == 0 {
                    0.0
                } else {
                    dist[c] / internal[c] as f64
                },
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterTemplate {
    LargeIsolated,
    LargeDispersed,
    SmallConnected,
}

impl std::str::FromStr for FilterTemplate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "large_isolated" => Ok(Self::LargeIsolated),
            "large_dispersed" => Ok(Self::LargeDispersed),
            "small_connected" => Ok(Self::SmallConnected),
            other => Err(format!("unknown filter template '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterThresholds {
    pub s_hi: f64,
    pub s_lo: f64,
    pub iso_lo: f64,
    pub d_hi: f64,
    pub rho_hi: f64,
}

/// Linear-interpolation quantile of unsorted values, `q` in `[0, 1]`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

impl FilterThresholds {
    /// Size and distance thresholds from the quartiles of `stats`.
    pub fn from_stats(stats: &[CommunityStats]) -> Self {
        let sizes: Vec<f64> = stats.iter().map(|s| s.size as f64).collect();
        let dists: Vec<f64> = stats.iter().map(|s| s.mean_neighbor_distance).collect();
        Self {
            s_hi: quantile(&sizes, 0.75),
            s_lo: quantile(&sizes, 0.25),
            iso_lo: 0.05,
            d_hi: quantile(&dists, 0.75),
            rho_hi: 0.5,
        }
    }
}

/// Community ids selected by a template; thresholds default to
/// [`FilterThresholds::from_stats`].
pub fn filter_communities(
    stats: &[CommunityStats],
    template: FilterTemplate,
    thresholds: Option<FilterThresholds>,
) -> Vec<usize> {
    let t = thresholds.unwrap_or_else(|| FilterThresholds::from_stats(stats));
    filter_by(stats, |s| {
        let size = s.size as f64;
        match template {
            FilterTemplate::LargeIsolated => size >= t.s_hi && s.isolation <= t.iso_lo,
            FilterTemplate::LargeDispersed => size >= t.s_hi && s.mean_neighbor_distance >= t.d_hi,
            FilterTemplate::SmallConnected => size <= t.s_lo && s.internal_density >= t.rho_hi,
        }
    })
}

pub fn filter_by(stats: &[CommunityStats], pred: impl Fn(&CommunityStats) -> bool) -> Vec<usize> {
    stats.iter().filter(|s| pred(s)).map(|s| s.community_id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Level;

    #[test]
    fn set_jaccard() {
        let a: HashSet<_> = [1, 2, 3].into();
        let b: HashSet<_> = [2, 3, 4].into();
        assert_eq!(jaccard(&a, &b), 0.5);
        assert_eq!(jaccard(&a, &a), 1.0);
        let c: HashSet<_> = [7].into();
        assert_eq!(jaccard(&a, &c), 0.0);
        let e: HashSet<i32> = HashSet::new();
        assert_eq!(jaccard(&e, &e), 1.0);
    }

    #[test]
    fn weighted_examples() {
        assert!((weighted_jaccard(&[0, 0, 1, 1], &[0, 0, 0, 1]).unwrap() - 7.0 / 12.0).abs() < 1e-15);
        assert_eq!(weighted_jaccard(&[5, 5, 2, 2], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert!((weighted_jaccard(&[0; 9], &[0, 0, 0, 1, 1, 1, 2, 2, 2]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(weighted_jaccard(&[0, 1], &[0]).is_err());
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> Csng {
        Csng::from_edges(
            Level::Segment,
            n,
            false,
            edges.iter().map(|&(a, b)| (a, b, 1.0, (a + b) as f64)),
            None,
        )
    }

    #[test]
    fn triangle_stats() {
        let g = graph(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let p = Partition::from_labels(Level::Segment, &[0, 0, 0, 1], 0.0);
        let s = community_stats(&g, &p).unwrap();
        assert_eq!(s[0].internal_edges, 3);
        assert_eq!(s[0].internal_density, 1.0);
        assert_eq!(s[0].isolation, 0.25);
        assert_eq!(s[1].isolation, 1.0);
        assert_eq!(s[1].internal_density, 0.0);
        assert!((s[0].mean_neighbor_distance - 2.0).abs() < 1e-15);
    }

    #[test]
    fn stats_level_mismatch() {
        let g = graph(2, &[(0, 1)]);
        let p = Partition::from_labels(Level::Streamline, &[0, 0], 0.0);
        assert!(matches!(community_stats(&g, &p), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn filters() {
        let g = graph(8, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (5, 6)]);
        let p = Partition::from_labels(Level::Segment, &[0, 0, 0, 1, 1, 1, 1, 2], 0.0);
        let s = community_stats(&g, &p).unwrap();
        assert_eq!(filter_communities(&s, FilterTemplate::LargeIsolated, None), vec![1]);
        assert!(filter_communities(&[], FilterTemplate::SmallConnected, None).is_empty());
    }

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[4.0, 1.0, 3.0, 2.0], 0.5), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), 2.0);
    }
}
