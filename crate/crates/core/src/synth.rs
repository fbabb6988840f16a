//! Seeded synthetic streamline families with construction labels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::Point3;
use crate::streamline::StreamlineSet;
use crate::{Error, Result};

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Parallel bundles of straight lines along the x axis. Inside a bundle the
/// lines sit on a sunflower disk with nearest-line spacing close to 1; the
/// cross-sections of neighboring bundles are `gap` apart edge to edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BundleParams {
    pub bundles: usize,
    pub lines_per_bundle: usize,
    pub points_per_line: usize,
    pub gap: f64,
    pub jitter: f64,
    pub seed: u64,
}

impl Default for BundleParams {
    fn default() -> Self {
        Self {
            bundles: 2,
            lines_per_bundle: 6,
            points_per_line: 20,
            gap: 100.0,
            jitter: 0.1,
            seed: 0,
        }
    }
}

/// Pairs of interlocking half-circle bundles. The second arc of a pair opens
/// the other way and hooks into the first, so that the clearance between the
/// two bundles equals the line spacing inside a bundle (about 1). Each line
/// has its ends trimmed at random and per-point Gaussian noise. Pairs are
/// stacked along z when there are more than two bundles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InterleavedParams {
    pub bundles: usize,
    pub lines_per_bundle: usize,
    /// Arc radius of the bundle center lines.
    pub radius: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for InterleavedParams {
    fn default() -> Self {
        Self {
            bundles: 2,
            lines_per_bundle: 12,
            radius: 20.0,
            noise: 0.15,
            seed: 0,
        }
    }
}

/// Helical line families winding around `axes` parallel vertical axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VortexParams {
    pub axes: usize,
    pub lines_per_axis: usize,
    pub points_per_line: usize,
    pub turns: f64,
    pub seed: u64,
}

impl Default for VortexParams {
    fn default() -> Self {
        Self {
            axes: 3,
            lines_per_axis: 20,
            points_per_line: 200,
            turns: 3.0,
            seed: 0,
        }
    }
}

/// Uniform straight lines on a square lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridParams {
    pub side: usize,
    pub points_per_line: usize,
    pub spacing: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            side: 5,
            points_per_line: 20,
            spacing: 1.0,
        }
    }
}

fn sunflower(count: usize) -> Vec<(f64, f64)> {
    let c = 0.56;
    (0..count)
        .map(|i| {
            let r = c * (i as f64 + 0.5).sqrt();
            let t = i as f64 * GOLDEN_ANGLE;
            (r * t.cos(), r * t.sin())
        })
        .collect()
}

fn disk_radius(disk: &[(f64, f64)]) -> f64 {
    disk.iter().map(|(y, z)| y.hypot(*z)).fold(0.0, f64::max)
}

fn noise(sigma: f64) -> Result<Option<Normal<f64>>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidConfig(format!("jitter must be non-negative, got {sigma}")));
    }
    Ok(if sigma > 0.0 {
        Some(Normal::new(0.0, sigma).expect("finite positive sigma"))
    } else {
        None
    })
}

fn perturb(p: Point3, dist: &Option<Normal<f64>>, rng: &mut ChaCha8Rng) -> Point3 {
    match dist {
        Some(d) => Point3::new(p.x + d.sample(rng), p.y + d.sample(rng), p.z + d.sample(rng)),
        None => p,
    }
}

fn positive(name: &str, v: usize, min: usize) -> Result<()> {
    if v < min {
        return Err(Error::InvalidConfig(format!("{name} must be at least {min}, got {v}")));
    }
    Ok(())
}

fn finish(lines: Vec<Vec<Point3>>, labels: Vec<i64>) -> Result<StreamlineSet> {
    Ok(StreamlineSet::from_polylines(lines, Some(labels))?.0)
}

pub fn bundles(p: &BundleParams) -> Result<StreamlineSet> {
    positive("bundles", p.bundles, 1)?;
    positive("lines_per_bundle", p.lines_per_bundle, 1)?;
    positive("points_per_line", p.points_per_line, 2)?;
    if !(p.gap.is_finite() && p.gap >= 0.0) {
        return Err(Error::InvalidConfig(format!("gap must be non-negative, got {}", p.gap)));
    }
    let dist = noise(p.jitter)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let disk = sunflower(p.lines_per_bundle);
    let pitch = 2.0 * disk_radius(&disk) + p.gap;
    let mut lines = Vec::new();
    let mut labels = Vec::new();
    for b in 0..p.bundles {
        let offset = b as f64 * pitch;
        for &(y, z) in &disk {
            let line = (0..p.points_per_line)
                .map(|i| perturb(Point3::new(i as f64, y + offset, z), &dist, &mut rng))
                .collect();
            lines.push(line);
            labels.push(b as i64);
        }
    }
    finish(lines, labels)
}

pub fn interleaved(p: &InterleavedParams) -> Result<StreamlineSet> {
    positive("bundles", p.bundles, 1)?;
    positive("lines_per_bundle", p.lines_per_bundle, 1)?;
    let disk = sunflower(p.lines_per_bundle);
    let rho = disk_radius(&disk);
    let big = p.radius;
    if !(big.is_finite() && big >= 4.0 * (rho + 1.0)) {
        return Err(Error::InvalidConfig(format!(
            "radius must be at least {}, got {big}",
            4.0 * (rho + 1.0)
        )));
    }
    let dist = noise(p.noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let lift = big - 2.0 * rho - 1.0;
    let steps = (std::f64::consts::PI * big).ceil() as usize;
    let mut lines = Vec::new();
    let mut labels = Vec::new();
    for b in 0..p.bundles {
        let flipped = b % 2 == 1;
        let (cx, cy) = if flipped { (big, lift) } else { (0.0, 0.0) };
        let z0 = (b / 2) as f64 * big;
        for &(dr, dz) in &disk {
            let r = big + dr;
            let t0 = rng.random_range(0.0..0.1);
            let t1 = rng.random_range(0.9..1.0);
            let line = (0..=steps)
                .map(|i| {
                    let t = t0 + (t1 - t0) * i as f64 / steps as f64;
                    let a = std::f64::consts::PI * t;
                    let y = if flipped { cy - r * a.sin() } else { cy + r * a.sin() };
                    perturb(Point3::new(cx + r * a.cos(), y, z0 + dz), &dist, &mut rng)
                })
                .collect();
            lines.push(line);
            labels.push(b as i64);
        }
    }
    finish(lines, labels)
}

pub fn vortex(p: &VortexParams) -> Result<StreamlineSet> {
    positive("axes", p.axes, 1)?;
    positive("lines_per_axis", p.lines_per_axis, 1)?;
    positive("points_per_line", p.points_per_line, 2)?;
    if !(p.turns.is_finite() && p.turns > 0.0) {
        return Err(Error::InvalidConfig(format!("turns must be positive, got {}", p.turns)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let height = 20.0;
    let max_radius = 3.0;
    let mut lines = Vec::new();
    let mut labels = Vec::new();
    for a in 0..p.axes {
        let cx = a as f64 * (2.0 * max_radius + 4.0);
        for _ in 0..p.lines_per_axis {
            let r = rng.random_range(0.5..max_radius);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let z0 = rng.random_range(-1.0..1.0);
            let line = (0..p.points_per_line)
                .map(|i| {
                    let t = i as f64 / (p.points_per_line - 1) as f64;
                    let angle = phase + t * p.turns * std::f64::consts::TAU;
                    Point3::new(cx + r * angle.cos(), r * angle.sin(), z0 + t * height)
                })
                .collect();
            lines.push(line);
            labels.push(a as i64);
        }
    }
    finish(lines, labels)
}

pub fn grid(p: &GridParams) -> Result<StreamlineSet> {
    positive("side", p.side, 1)?;
    positive("points_per_line", p.points_per_line, 2)?;
    if !(p.spacing.is_finite() && p.spacing > 0.0) {
        return Err(Error::InvalidSpacing(p.spacing));
    }
    let mut lines = Vec::new();
    for i in 0..p.side {
        for j in 0..p.side {
            let (y, z) = (i as f64 * p.spacing, j as f64 * p.spacing);
            lines.push(
                (0..p.points_per_line)
                    .map(|k| Point3::new(k as f64 * p.spacing, y, z))
                    .collect(),
            );
        }
    }
    let labels = vec![0; lines.len()];
    finish(lines, labels)
}
