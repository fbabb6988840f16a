mod common;

use std::collections::BTreeSet;

use common::*;
use flowcomm::amcs::{build_amcs, rasterize_amcs, AmcsOrdering, Palette};
use flowcomm::csng::{build_csng, CsngConfig};
use flowcomm::neighbor::{NeighborQueryConfig, ProximityMeasure, Strategy};
use flowcomm::{Level, Point3, StreamlineSet};
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn entries_match_dense_oracle() {
    for seed in 0..20u64 {
        let set = random_set(seed, 25, 25, seed % 2 == 0);
        let n = set.segments().len();
        let elems = samples(&set, Level::Segment, 1);
        let strategies = [Strategy::Knn { k: 1 }, Strategy::Knn { k: 4 }, Strategy::Rbn { radius: 1.5 }];
        for strategy in strategies {
            let m = ProximityMeasure::Longest;
            let cfg = match strategy {
                Strategy::Knn { k } => NeighborQueryConfig::knn(k, m),
                Strategy::Rbn { radius } => NeighborQueryConfig::rbn(radius, m),
            };
            let g = build_csng(&set, Level::Segment, &CsngConfig::new(cfg)).unwrap();
            let brute = brute_neighbors(&elems, strategy, m);

            let mut r = rng(seed * 7 + 1);
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(&mut r);
            ids.truncate(r.random_range(1..=n.min(500)));

            for ordering in [AmcsOrdering::ByStreamline, AmcsOrdering::ById] {
                let a = build_amcs(&g, &set, &ids, ordering).unwrap();
                let selected: BTreeSet<usize> = ids.iter().copied().collect();
                assert_eq!(a.n, selected.len());
                let mut expect_order: Vec<usize> = selected.iter().copied().collect();
                if ordering == AmcsOrdering::ByStreamline {
                    let segs = set.segments();
                    expect_order.sort_by_key(|&s| (segs[s].streamline_id, segs[s].index_in_streamline));
                }
                assert_eq!(a.ordering, expect_order);

                // dense boolean matrix from the brute-force neighbor table
                let mut dense = vec![vec![false; a.n]; a.n];
                let pos = |s: usize| a.ordering.iter().position(|&x| x == s);
                for (i, &s) in a.ordering.iter().enumerate() {
                    for &(t, _) in &brute[s] {
                        if let Some(j) = pos(t) {
                            dense[i][j] = true;
                        }
                    }
                }
                let want: Vec<(usize, usize)> = (0..a.n)
                    .flat_map(|i| (0..a.n).map(move |j| (i, j)))
                    .filter(|&(i, j)| dense[i][j])
                    .collect();
                assert_eq!(a.entries, want, "seed {seed} {strategy:?}");
                assert_eq!(a.symmetric, matches!(strategy, Strategy::Rbn { .. }));
                if a.symmetric {
                    assert!(a.entries.iter().all(|&(i, j)| a.contains(j, i)));
                }

                // every streamline occupies one contiguous run
                if ordering == AmcsOrdering::ByStreamline {
                    let mut seen = BTreeSet::new();
                    let mut prev = None;
                    for &s in &a.ordering {
                        let line = set.segments()[s].streamline_id;
                        if prev != Some(line) {
                            assert!(seen.insert(line), "streamline {line} split in ordering");
                            prev = Some(line);
                        }
                    }
                }
            }
        }
    }
}

fn parallel(m: usize, separation: f64) -> StreamlineSet {
    let lines = (0..2)
        .map(|l| (0..=m).map(|i| Point3::new(i as f64, separation * l as f64, 0.0)).collect())
        .collect();
    StreamlineSet::from_polylines(lines, None).unwrap().0
}

#[test]
fn parallel_pair_gives_two_bands() {
    for m in [1, 5, 20, 100] {
        for sep in [0.3, 0.5, 0.9] {
            let set = parallel(m, sep);
            let cfg = NeighborQueryConfig::knn(1, ProximityMeasure::Longest);
            let g = build_csng(&set, Level::Segment, &CsngConfig::new(cfg)).unwrap();
            let all: Vec<usize> = (0..2 * m).collect();
            let a = build_amcs(&g, &set, &all, AmcsOrdering::ByStreamline).unwrap();
            let mut want: Vec<(usize, usize)> = (0..m).flat_map(|i| [(i, m + i), (m + i, i)]).collect();
            want.sort();
            assert_eq!(a.entries, want, "m {m} sep {sep}");
            assert!(!a.symmetric);
        }
    }
}

#[test]
fn pooled_raster_matches_pooling_oracle() {
    let m = 128;
    let set = parallel(m, 0.5);
    let g = build_csng(&set, Level::Segment, &CsngConfig::new(NeighborQueryConfig::knn(1, ProximityMeasure::Longest))).unwrap();
    let all: Vec<usize> = (0..2 * m).collect();
    let a = build_amcs(&g, &set, &all, AmcsOrdering::ByStreamline).unwrap();
    for palette in [Palette::Light, Palette::Dark] {
        let r = rasterize_amcs(&a, 64, palette).unwrap();
        assert_eq!((r.width, r.height), (64, 64));
        let fg = match palette {
            Palette::Light => [0, 0, 0],
            Palette::Dark => [255, 176, 0],
        };
        let mut pooled = vec![vec![false; 64]; 64];
        for &(i, j) in &a.entries {
            pooled[i * 64 / a.n][j * 64 / a.n] = true;
        }
        for y in 0..64 {
            for x in 0..64 {
                assert_eq!(r.pixel(x, y) == fg, pooled[y][x], "pixel ({x},{y})");
            }
        }
        let ppm = r.to_ppm();
        assert!(ppm.starts_with(b"P6\n64 64\n255\n"));
        assert_eq!(ppm.len(), b"P6\n64 64\n255\n".len() + 64 * 64 * 3);
    }
}

#[test]
fn json_export_shape() {
    let set = parallel(3, 0.5);
    let g = build_csng(&set, Level::Segment, &CsngConfig::new(NeighborQueryConfig::rbn(0.6, ProximityMeasure::Longest))).unwrap();
    let a = build_amcs(&g, &set, &[0, 1, 2, 3, 4, 5], AmcsOrdering::ByStreamline).unwrap();
    let v: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(v["n"], 6);
    assert_eq!(v["symmetric"], true);
    assert_eq!(v["ordering"].as_array().unwrap().len(), 6);
    assert!(v["entries"].as_array().unwrap().iter().all(|e| e.as_array().unwrap().len() == 2));
}
