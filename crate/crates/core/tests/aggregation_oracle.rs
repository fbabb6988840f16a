mod common;

use common::*;
use flowcomm::csng::{aggregate_to_streamlines, build_csng, symmetrize, CsngConfig};
use flowcomm::neighbor::{NeighborQueryConfig, ProximityMeasure};
use flowcomm::Level;

/// Dense double loop over all segment pairs of two streamlines.
fn dense_r(g: &flowcomm::csng::Csng, set: &flowcomm::StreamlineSet, a: usize, b: usize) -> f64 {
    let ra = set.segment_range(a);
    let rb = set.segment_range(b);
    let mut sum = 0.0;
    for i in ra.clone() {
        for j in rb.clone() {
            let w = g.edge_weight(i, j).unwrap_or(0.0).max(g.edge_weight(j, i).unwrap_or(0.0));
            sum += w;
        }
    }
    sum / (ra.len() * rb.len()) as f64
}

#[test]
fn relationship_strength_matches_dense_oracle() {
    for seed in 0..20u64 {
        let set = random_set(seed, 20, 12, seed % 2 == 0);
        let cfg = if seed % 3 == 0 {
            NeighborQueryConfig::rbn(1.0, ProximityMeasure::Shortest)
        } else {
            NeighborQueryConfig::knn(4, ProximityMeasure::Longest)
        };
        let g = build_csng(&set, Level::Segment, &CsngConfig::new(cfg)).unwrap();
        let rel = aggregate_to_streamlines(&g, &set).unwrap();
        let n = set.streamlines().len();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let want = dense_r(&g, &set, a, b);
                let got = rel.graph.edge_weight(a, b).unwrap_or(0.0);
                assert!((got - want).abs() <= 1e-12, "seed {seed} pair ({a},{b}): {got} vs {want}");
                assert!((0.0..=1.0).contains(&got));
            }
        }

        // mass conservation: cross weights are integer sums, compared exactly
        let sym = symmetrize(&g);
        let owner: Vec<usize> = set.segments().iter().map(|s| s.streamline_id).collect();
        let total_cross: f64 = sym
            .entries()
            .filter(|&(i, j, _, _)| i < j && owner[i] != owner[j])
            .map(|(_, _, w, _)| w)
            .sum();
        let mut conserved = 0.0;
        let mut rebuilt = 0.0;
        for ((i, j, r, _), cw) in rel.graph.entries().zip(&rel.cross_weight) {
            if i < j {
                conserved += cw;
                let sizes = (set.segment_range(i).len() * set.segment_range(j).len()) as f64;
                rebuilt += r * sizes;
                assert_eq!((r * sizes).round(), *cw);
            }
        }
        assert_eq!(conserved, total_cross);
        assert!((rebuilt - total_cross).abs() <= 1e-12 * total_cross.max(1.0));
    }
}
