//! PCA k-means clustering of streamlines or segments on normalized
//! coordinate features.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::Point3;
use crate::streamline::StreamlineSet;
use crate::{Error, Level, Result};

pub const DEFAULT_POINTS_PER_LINE: usize = 32;

/// How streamlines with a point count different from the target are brought
/// to a fixed width.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    /// Arc-length resampling in both directions.
    #[default]
    Resample,
    /// Long lines are resampled down, short lines keep their points and are
    /// padded with zeros.
    ZeroPad,
}

/// Row-major feature matrix with every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub level: Level,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KMeansConfig {
    pub k_c: usize,
    pub max_iters: usize,
    pub variance_retained: f64,
    pub seed: u64,
    /// Independent k-means++ initializations; the lowest WCSS is kept.
    pub n_init: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            k_c: 2,
            max_iters: 100,
            variance_retained: 0.95,
            seed: 0,
            n_init: 10,
        }
    }
}

struct Normalizer {
    min: Point3,
    inv: [f64; 3],
}

impl Normalizer {
    fn new(set: &StreamlineSet) -> Self {
        let (min, max) = set.bounding_box();
        let inv = [max.x - min.x, max.y - min.y, max.z - min.z].map(|e| if e > 0.0 { 1.0 / e } else { 0.0 });
        Self { min, inv }
    }

    fn push(&self, p: Point3, out: &mut Vec<f64>) {
        for axis in 0..3 {
            let v = (p.coord(axis) - self.min.coord(axis)) * self.inv[axis];
            out.push(v.clamp(0.0, 1.0));
        }
    }
}

/// Resamples a polyline to `count` points spaced evenly by arc length.
pub fn resample_count(points: &[Point3], count: usize) -> Vec<Point3> {
    if points.len() == count {
        return points.to_vec();
    }
    let mut cumulative = Vec::with_capacity(points.len());
    let mut total = 0.0;
    cumulative.push(0.0);
    for w in points.windows(2) {
        total += w[0].dist(&w[1]);
        cumulative.push(total);
    }
    let last = *points.last().expect("non-empty polyline");
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        if k + 1 == count {
            out.push(last);
            break;
        }
        let target = total * k as f64 / (count - 1) as f64;
        while seg + 2 < cumulative.len() && cumulative[seg + 1] < target {
            seg += 1;
        }
        let len = cumulative[seg + 1] - cumulative[seg];
        let t = if len > 0.0 {
            ((target - cumulative[seg]) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(points[seg].lerp(&points[seg + 1], t));
    }
    out
}

/// Builds one feature row per streamline (3·`points_per_line` columns) or
/// per segment (6 columns: both endpoints), normalized by the dataset
/// bounding box.
pub fn featurize(set: &StreamlineSet, level: Level, points_per_line: usize, padding: Padding) -> Result<FeatureMatrix> {
    let norm = Normalizer::new(set);
    match level {
        Level::Segment => {
            let segments = set.segments();
            if segments.is_empty() {
                return Err(Error::EmptyDataset);
            }
            let mut data = Vec::with_capacity(segments.len() * 6);
            for s in segments {
                norm.push(s.endpoints.0, &mut data);
                norm.push(s.endpoints.1, &mut data);
            }
            Ok(FeatureMatrix {
                level,
                rows: segments.len(),
                cols: 6,
                data,
            })
        }
        Level::Streamline => {
            if points_per_line < 2 {
                return Err(Error::InvalidConfig(format!(
                    "points_per_line must be at least 2, got {points_per_line}"
                )));
            }
            let lines = set.streamlines();
            if lines.is_empty() {
                return Err(Error::EmptyDataset);
            }
            let cols = 3 * points_per_line;
            let mut data = Vec::with_capacity(lines.len() * cols);
            for line in lines {
                let start = data.len();
                let pts = match padding {
                    Padding::ZeroPad if line.points.len() < points_per_line => line.points.clone(),
                    _ => resample_count(&line.points, points_per_line),
                };
                for p in pts {
                    norm.push(p, &mut data);
                }
                data.resize(start + cols, 0.0);
            }
            Ok(FeatureMatrix {
                level,
                rows: lines.len(),
                cols,
                data,
            })
        }
        Level::SubCurve => Err(Error::LevelMismatch {
            expected: Level::Streamline,
            found: Level::SubCurve,
        }),
    }
}

/// Result of a principal component projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub rows: usize,
    pub components: usize,
    /// Row-major projected data, `rows × components`.
    pub data: Vec<f64>,
    /// Explained-variance fraction of every component, largest first.
    pub explained: Vec<f64>,
    pub mean: Vec<f64>,
    /// Column-major basis, `cols × components`.
    pub basis: Vec<f64>,
}

impl PcaResult {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.components..(i + 1) * self.components]
    }

    /// Maps a projected row back to feature space.
    pub fn reconstruct(&self, i: usize) -> Vec<f64> {
        let cols = self.mean.len();
        let mut out = self.mean.clone();
        for (c, &coef) in self.row(i).iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += coef * self.basis[c * cols + j];
            }
        }
        out
    }
}

/// Projects mean-centered rows onto the fewest principal components whose
/// cumulative explained variance reaches `variance_retained`. Data with zero
/// total variance yields one constant component.
pub fn pca_reduce(m: &FeatureMatrix, variance_retained: f64) -> Result<PcaResult> {
    if !(variance_retained > 0.0 && variance_retained <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "variance_retained must be in (0, 1], got {variance_retained}"
        )));
    }
    if m.rows < 2 {
        return Err(Error::InvalidConfig(format!("PCA needs at least 2 rows, got {}", m.rows)));
    }
    let (n, d) = (m.rows, m.cols);
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (mu, v) in mean.iter_mut().zip(m.row(i)) {
            *mu += v;
        }
    }
    for mu in &mut mean {
        *mu /= n as f64;
    }
    const CHUNK: usize = 256;
    let cov = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = DMatrix::<f64>::zeros(d, d);
            for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(n) {
                let row = m.row(i);
                for a in 0..d {
                    let ca = row[a] - mean[a];
                    if ca == 0.0 {
                        continue;
                    }
                    for b in a..d {
                        acc[(a, b)] += ca * (row[b] - mean[b]);
                    }
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(DMatrix::<f64>::zeros(d, d), |a, b| a + b);
    let mut cov = cov / (n - 1) as f64;
    for a in 0..d {
        for b in 0..a {
            cov[(a, b)] = cov[(b, a)];
        }
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = values.iter().sum();

    if total <= 0.0 {
        let mut basis = vec![0.0; d];
        basis[0] = 1.0;
        return Ok(PcaResult {
            rows: n,
            components: 1,
            data: vec![0.0; n],
            explained: vec![0.0],
            mean,
            basis,
        });
    }

    let mut components = d;
    let mut cumulative = 0.0;
    for (c, v) in values.iter().enumerate() {
        cumulative += v;
        if cumulative >= variance_retained * total * (1.0 - 1e-12) {
            components = c + 1;
            break;
        }
    }
    let mut basis = Vec::with_capacity(d * components);
    for &i in order.iter().take(components) {
        basis.extend(eig.eigenvectors.column(i).iter());
    }
    let data: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let row = m.row(i);
            let basis = &basis;
            let mean = &mean;
            (0..components).map(move |c| {
                let v = &basis[c * d..(c + 1) * d];
                (0..d).map(|j| (row[j] - mean[j]) * v[j]).sum::<f64>()
            })
        })
        .collect();
    Ok(PcaResult {
        rows: n,
        components,
        data,
        explained: values[..components].iter().map(|v| v / total).collect(),
        mean,
        basis,
    })
}

/// Output of [`kmeans`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub k_c: usize,
    pub centroids: Vec<Vec<f64>>,
    pub wcss: f64,
    /// WCSS after every Lloyd iteration.
    pub wcss_trace: Vec<f64>,
    pub iterations: usize,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn wcss(rows: &[&[f64]], assignment: &[usize], centroids: &[Vec<f64>]) -> f64 {
    rows.iter()
        .zip(assignment)
        .map(|(r, &c)| dist2(r, &centroids[c]))
        .sum()
}

/// Seeded k-means++ initialization followed by Lloyd iterations until the
/// assignment stops changing or `max_iters` is reached, repeated `n_init`
/// times. `rows` are the points; every row must have the same width.
pub fn kmeans(rows: &[&[f64]], config: &KMeansConfig) -> Result<KMeansResult> {
    let n = rows.len();
    if config.k_c == 0 || config.k_c > n {
        return Err(Error::InvalidK { k: config.k_c, rows: n });
    }
    if config.n_init == 0 || config.max_iters == 0 {
        return Err(Error::InvalidConfig("n_init and max_iters must be at least 1".into()));
    }
    let mut best: Option<KMeansResult> = None;
    for run in 0..config.n_init as u64 {
        let seed = config.seed ^ run.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let result = lloyd(rows, config.k_c, config.max_iters, &mut ChaCha8Rng::seed_from_u64(seed));
        if best.as_ref().is_none_or(|b| result.wcss < b.wcss) {
            best = Some(result);
        }
    }
    Ok(best.expect("n_init >= 1"))
}

fn lloyd(rows: &[&[f64]], k: usize, max_iters: usize, rng: &mut ChaCha8Rng) -> KMeansResult {
    let n = rows.len();

    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = rows.iter().map(|r| dist2(r, rows[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            while d2[pick] == 0.0 {
                pick -= 1;
            }
            pick
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (i, r) in rows.iter().enumerate() {
            d2[i] = d2[i].min(dist2(r, rows[next]));
        }
    }
    let mut centroids: Vec<Vec<f64>> = chosen.iter().map(|&i| rows[i].to_vec()).collect();

    let nearest = |row: &[f64], current: Option<usize>, centroids: &[Vec<f64>]| {
        let mut best = current.unwrap_or(0);
        let mut best_d = dist2(row, &centroids[best]);
        for (c, centroid) in centroids.iter().enumerate() {
            let d = dist2(row, centroid);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        best
    };
    let mut assignment: Vec<usize> = rows.par_iter().map(|r| nearest(r, None, &centroids)).collect();
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let width = rows[0].len();
        let mut sums = vec![vec![0.0; width]; k];
        let mut counts = vec![0usize; k];
        for (r, &c) in rows.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(r.iter()) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        trace.push(wcss(rows, &assignment, &centroids));
        iterations += 1;
        if iterations >= max_iters {
            break;
        }
        let next: Vec<usize> = rows
            .par_iter()
            .zip(assignment.par_iter())
            .map(|(r, &c)| nearest(r, Some(c), &centroids))
            .collect();
        if next == assignment {
            break;
        }
        assignment = next;
    }
    KMeansResult {
        wcss: *trace.last().unwrap(),
        assignment,
        k_c: k,
        centroids,
        wcss_trace: trace,
        iterations,
    }
}

/// Full baseline run: featurize, reduce, cluster.
pub fn pca_kmeans(
    set: &StreamlineSet,
    level: Level,
    points_per_line: usize,
    padding: Padding,
    config: &KMeansConfig,
) -> Result<(KMeansResult, usize)> {
    let features = featurize(set, level, points_per_line, padding)?;
    let reduced = pca_reduce(&features, config.variance_retained)?;
    let rows: Vec<&[f64]> = (0..reduced.rows).map(|i| reduced.row(i)).collect();
    Ok((kmeans(&rows, config)?, reduced.components))
}
