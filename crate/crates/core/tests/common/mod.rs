//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use flowcomm::geometry::Point3;
use flowcomm::neighbor::{ProximityMeasure, Strategy};
use flowcomm::streamline::StreamlineSet;
use flowcomm::Level;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random-walk polylines inside a box. With `lattice` the coordinates are
/// small integers, which produces many exactly tied distances.
pub fn random_set(seed: u64, lines: usize, max_points: usize, lattice: bool) -> StreamlineSet {
    let mut r = rng(seed);
    let mut polylines = Vec::new();
    for _ in 0..lines {
        let n = r.random_range(2..=max_points);
        let mut p = if lattice {
            Point3::new(
                r.random_range(0..8) as f64,
                r.random_range(0..8) as f64,
                r.random_range(0..4) as f64,
            )
        } else {
            Point3::new(r.random_range(0.0..10.0), r.random_range(0.0..10.0), r.random_range(0.0..5.0))
        };
        let mut line = vec![p];
        while line.len() < n {
            let step = if lattice {
                let axis = r.random_range(0..3);
                let mut d = [0.0; 3];
                d[axis] = if r.random_bool(0.5) { 1.0 } else { -1.0 };
                Point3::new(d[0], d[1], d[2])
            } else {
                Point3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-0.5..0.5))
            };
            p = p + step;
            if line.last() != Some(&p) {
                line.push(p);
            }
        }
        polylines.push(line);
    }
    StreamlineSet::from_polylines(polylines, None).unwrap().0
}

fn d2(a: &Point3, b: &Point3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    dx * dx + dy * dy + dz * dz
}

/// Reference measure: closest-pair, symmetric Hausdorff or mean
/// closest-point distance, always evaluated with the lower-id sample first.
pub fn oracle_distance(a: &[Point3], b: &[Point3], m: ProximityMeasure) -> f64 {
    let closest = |p: &Point3, to: &[Point3]| to.iter().map(|q| d2(p, q)).fold(f64::INFINITY, f64::min);
    match m {
        ProximityMeasure::Shortest => a.iter().map(|p| closest(p, b)).fold(f64::INFINITY, f64::min).sqrt(),
        ProximityMeasure::Longest => {
            let ab = a.iter().map(|p| closest(p, b)).fold(0.0, f64::max);
            let ba = b.iter().map(|q| closest(q, a)).fold(0.0, f64::max);
            ab.max(ba).sqrt()
        }
        ProximityMeasure::Average => {
            let sa: f64 = a.iter().map(|p| closest(p, b).sqrt()).sum();
            let sb: f64 = b.iter().map(|q| closest(q, a).sqrt()).sum();
            (sa + sb) / (a.len() + b.len()) as f64
        }
    }
}

/// Element samples of one level, by element id.
pub fn samples(set: &StreamlineSet, level: Level, subcurve_len: usize) -> Vec<Vec<Point3>> {
    set.element_spans(level, subcurve_len)
        .iter()
        .map(|s| set.streamlines()[s.streamline].points[s.start..s.end].to_vec())
        .collect()
}

/// O(N²) neighbor table: every other element scored, sorted by
/// (distance, id), then cut by k or radius.
pub fn brute_neighbors(elems: &[Vec<Point3>], strategy: Strategy, m: ProximityMeasure) -> Vec<Vec<(usize, f64)>> {
    (0..elems.len())
        .map(|q| {
            let mut all: Vec<(usize, f64)> = (0..elems.len())
                .filter(|&j| j != q)
                .map(|j| {
                    let d = if q < j {
                        oracle_distance(&elems[q], &elems[j], m)
                    } else {
                        oracle_distance(&elems[j], &elems[q], m)
                    };
                    (j, d)
                })
                .collect();
            all.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
            match strategy {
                Strategy::Knn { k } => all.truncate(k),
                Strategy::Rbn { radius } => all.retain(|&(_, d)| d <= radius),
            }
            all
        })
        .collect()
}

/// Random simple undirected graph; with `connected` a random spanning tree
/// is laid down first.
pub fn random_graph(seed: u64, n: usize, p: f64, connected: bool) -> Vec<(usize, usize)> {
    let mut r = rng(seed);
    let mut edges = std::collections::BTreeSet::new();
    if connected {
        for v in 1..n {
            let u = r.random_range(0..v);
            edges.insert((u, v));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    edges.into_iter().collect()
}

/// Direct double sum `1/2W Σ_ij [A_ij − γ k_i k_j / 2W] δ(c_i, c_j)` over a
/// dense adjacency matrix.
pub fn dense_modularity(n: usize, edges: &[(usize, usize, f64)], assignment: &[usize], gamma: f64) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_w: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] == assignment[j] {
                q += a[i][j] - gamma * k[i] * k[j] / two_w;
            }
        }
    }
    q / two_w
}

/// Calls `f` with every set partition of `0..n` as a restricted growth
/// string.
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a = vec![0usize; n];
    let mut max = vec![0usize; n];
    loop {
        f(&a);
        let mut i = n;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            if a[i] <= max[i - 1] {
                a[i] += 1;
                break;
            }
        }
        for j in i + 1..n {
            a[j] = 0;
        }
        for j in i..n {
            max[j] = if j == 0 { a[0] } else { max[j - 1].max(a[j]) };
        }
    }
}

/// Best modularity over all partitions.
pub fn optimum_modularity(n: usize, edges: &[(usize, usize, f64)], gamma: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for_each_partition(n, |p| best = best.max(dense_modularity(n, edges, p, gamma)));
    best
}

/// Two labelings describe the same partition.
pub fn same_partition(a: &[usize], b: &[i64]) -> bool {
    let mut fwd = std::collections::HashMap::new();
    let mut back = std::collections::HashMap::new();
    a.iter().zip(b).all(|(x, y)| *fwd.entry(*x).or_insert(*y) == *y && *back.entry(*y).or_insert(*x) == *x)
}
