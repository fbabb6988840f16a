mod common;

use common::*;
use flowcomm::community::{detect, louvain, louvain_traced, modularity, LouvainConfig, Variant};
use flowcomm::csng::{aggregate_to_streamlines, build_csng, Csng, CsngConfig};
use flowcomm::metrics::weighted_jaccard;
use flowcomm::neighbor::{NeighborQueryConfig, ProximityMeasure};
use flowcomm::synth::{bundles, BundleParams};
use flowcomm::{Error, Level};
use rand::Rng;

fn csng(n: usize, edges: &[(usize, usize, f64)]) -> Csng {
    Csng::from_edges(Level::Segment, n, false, edges.iter().map(|&(a, b, w)| (a, b, w, 1.0)), None)
}

fn weighted(seed: u64, n: usize, p: f64, connected: bool) -> Vec<(usize, usize, f64)> {
    let mut r = rng(seed ^ 0xABCD);
    random_graph(seed, n, p, connected)
        .into_iter()
        .map(|(a, b)| (a, b, if seed % 2 == 0 { 1.0 } else { r.random_range(0.1..3.0) }))
        .collect()
}

#[test]
fn closed_form_matches_double_sum() {
    for seed in 0..100u64 {
        let mut r = rng(seed);
        let n = r.random_range(2..=12);
        let edges = weighted(seed, n, 0.35, true);
        let g = csng(n, &edges);
        let k = r.random_range(1..=n);
        let assignment: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        for gamma in [0.5, 1.0, 2.0] {
            let fast = modularity(&g, &assignment, gamma).unwrap();
            let slow = dense_modularity(n, &edges, &assignment, gamma);
            assert!((fast - slow).abs() <= 1e-12, "seed {seed}: {fast} vs {slow}");
        }
    }
}

#[test]
fn reference_values() {
    let tri: Vec<_> = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)].iter().map(|&(a, b)| (a, b, 1.0)).collect();
    let g = csng(6, &tri);
    assert_eq!(modularity(&g, &[0, 0, 0, 1, 1, 1], 1.0).unwrap(), 0.5);
    assert_eq!(modularity(&g, &[0; 6], 1.0).unwrap(), 0.0);
    assert!(matches!(modularity(&csng(3, &[]), &[0, 1, 2], 1.0), Err(Error::DegenerateGraph)));
    assert!(matches!(modularity(&g, &[0, 0], 1.0), Err(Error::LengthMismatch { .. })));
}

#[test]
fn louvain_is_near_optimal_on_small_graphs() {
    for seed in 0..50u64 {
        let n = 4 + (seed as usize % 7);
        let edges = weighted(seed, n, 0.3, true);
        let g = csng(n, &edges);
        let p = louvain(&g, &LouvainConfig::default()).unwrap();
        let best = optimum_modularity(n, &edges, 1.0);
        let q = dense_modularity(n, &edges, &p.assignment, 1.0);
        assert!((q - p.modularity).abs() < 1e-12);
        assert!(q >= 0.95 * best - 1e-12, "seed {seed}: {q} vs optimum {best}");
    }
}

#[test]
fn louvain_finds_the_optimum_on_disjoint_cliques() {
    for sizes in [vec![3, 3], vec![4, 3, 3], vec![5, 2, 3], vec![3, 3, 3]] {
        let mut edges = Vec::new();
        let mut start = 0;
        let mut truth = Vec::new();
        for (c, &s) in sizes.iter().enumerate() {
            for a in start..start + s {
                truth.push(c as i64);
                for b in a + 1..start + s {
                    edges.push((a, b, 1.0));
                }
            }
            start += s;
        }
        let g = csng(start, &edges);
        let p = louvain(&g, &LouvainConfig::default()).unwrap();
        let best = optimum_modularity(start, &edges, 1.0);
        assert!((p.modularity - best).abs() < 1e-12);
        assert!(same_partition(&p.assignment, &truth));
    }
}

#[test]
fn rounds_strictly_improve_and_beat_singletons() {
    for seed in 0..30u64 {
        let edges = weighted(seed, 40, 0.08, true);
        let g = csng(40, &edges);
        let (p, trace) = louvain_traced(&g, &LouvainConfig { seed, ..Default::default() }).unwrap();
        for w in trace.modularity.windows(2) {
            assert!(w[1] > w[0]);
        }
        let singletons: Vec<usize> = (0..40).collect();
        assert!(p.modularity >= modularity(&g, &singletons, 1.0).unwrap());
        assert!(p.assignment.iter().all(|&c| c < p.n_communities));
    }
}

#[test]
fn seeded_runs_are_identical() {
    let edges = weighted(11, 60, 0.06, true);
    let g = csng(60, &edges);
    let cfg = LouvainConfig { seed: 42, ..Default::default() };
    assert_eq!(louvain(&g, &cfg).unwrap(), louvain(&g, &cfg).unwrap());
}

fn two_bundle_graph(seed: u64, lines: usize) -> (flowcomm::StreamlineSet, Csng) {
    let set = bundles(&BundleParams { lines_per_bundle: lines, seed, ..Default::default() }).unwrap();
    let g = build_csng(&set, Level::Streamline, &CsngConfig::new(NeighborQueryConfig::knn(3, ProximityMeasure::Longest))).unwrap();
    (set, g)
}

#[test]
fn two_bundles_are_recovered() {
    for seed in 0..10 {
        let (set, g) = two_bundle_graph(seed, 6);
        let p = detect(&set, &g, Variant::Streamline, &LouvainConfig::default()).unwrap();
        assert_eq!(p.n_communities, 2);
        assert_eq!(weighted_jaccard(&p.assignment, set.labels().unwrap()).unwrap(), 1.0);
    }
}

#[test]
fn ten_line_bundles_split_at_the_modularity_optimum() {
    // With ten lines per bundle and k = 3, the bundle partition is not the
    // modularity maximum: Louvain's finer partition scores strictly higher.
    for seed in 0..3 {
        let (set, g) = two_bundle_graph(seed, 10);
        let p = detect(&set, &g, Variant::Streamline, &LouvainConfig::default()).unwrap();
        let bundles: Vec<usize> = set.labels().unwrap().iter().map(|&l| l as usize).collect();
        let q_bundles = modularity(&g, &bundles, 1.0).unwrap();
        assert!(p.n_communities > 2);
        assert!(p.modularity > q_bundles, "{} vs {}", p.modularity, q_bundles);
    }
}

#[test]
fn resolution_is_monotone_on_the_bundle_family() {
    for b in 2..=4 {
        let set = bundles(&BundleParams { bundles: b, seed: b as u64, ..Default::default() }).unwrap();
        let g = build_csng(&set, Level::Streamline, &CsngConfig::new(NeighborQueryConfig::knn(3, ProximityMeasure::Longest))).unwrap();
        let counts: Vec<usize> = [0.2, 1.0, 5.0]
            .iter()
            .map(|&resolution| {
                detect(&set, &g, Variant::Streamline, &LouvainConfig { resolution, ..Default::default() })
                    .unwrap()
                    .n_communities
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }
}

#[test]
fn aggregated_streamline_variant_recovers_bundles() {
    let cfg = CsngConfig::new(NeighborQueryConfig::knn(6, ProximityMeasure::Longest));
    for seed in 0..10 {
        let set = bundles(&BundleParams { seed, ..Default::default() }).unwrap();
        let seg = build_csng(&set, Level::Segment, &cfg).unwrap();
        let p = detect(&set, &seg, Variant::Streamline, &LouvainConfig::default()).unwrap();
        assert_eq!(p.level, Level::Streamline);
        assert_eq!(weighted_jaccard(&p.assignment, set.labels().unwrap()).unwrap(), 1.0);
    }
}

#[test]
fn detection_variants_and_levels() {
    let set = bundles(&BundleParams::default()).unwrap();
    let cfg = CsngConfig::new(NeighborQueryConfig::knn(3, ProximityMeasure::Longest));
    let seg = build_csng(&set, Level::Segment, &cfg).unwrap();
    let segp = detect(&set, &seg, Variant::Segment, &LouvainConfig::default()).unwrap();
    assert_eq!(segp.assignment.len(), set.segments().len());
    assert!(matches!(
        detect(&set, &seg, Variant::SubCurve, &LouvainConfig::default()),
        Err(Error::LevelMismatch { .. })
    ));
    let rel = aggregate_to_streamlines(&seg, &set).unwrap();
    assert!(matches!(
        detect(&set, &rel.graph, Variant::Segment, &LouvainConfig::default()),
        Err(Error::LevelMismatch { .. })
    ));

    let one = flowcomm::StreamlineSet::from_polylines(
        vec![vec![flowcomm::Point3::new(0.0, 0.0, 0.0), flowcomm::Point3::new(1.0, 0.0, 0.0)]],
        None,
    )
    .unwrap()
    .0;
    let g1 = build_csng(&one, Level::Streamline, &cfg).unwrap();
    assert_eq!(detect(&one, &g1, Variant::Streamline, &LouvainConfig::default()).unwrap().n_communities, 1);
}
