//! Point-sampled proximity measures between elements.
//!
//! These are proximity functions, not metrics: none of them obeys the
//! triangle inequality in general. All three are symmetric, and
//! `longest >= average >= shortest` for every pair.

use serde::{Deserialize, Serialize};

use crate::geometry::Point3;
use crate::streamline::Segment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProximityMeasure {
    Shortest,
    #[default]
    Longest,
    Average,
}

impl std::str::FromStr for ProximityMeasure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shortest" => Ok(Self::Shortest),
            "longest" => Ok(Self::Longest),
            "average" => Ok(Self::Average),
            other => Err(format!("unknown distance measure '{other}'")),
        }
    }
}

/// Measure between two point samples, evaluated in the given order.
///
/// Shortest and longest are order independent bit for bit; the average is a
/// floating point sum, so callers wanting exact symmetry should go through
/// [`pair_distance`].
pub fn sample_distance(a: &[Point3], b: &[Point3], measure: ProximityMeasure) -> f64 {
    match measure {
        ProximityMeasure::Shortest => {
            let mut best = f64::INFINITY;
            for p in a {
                for q in b {
                    best = best.min(p.dist2(q));
                }
            }
            best.sqrt()
        }
        ProximityMeasure::Longest => {
            let directed = |from: &[Point3], to: &[Point3]| {
                from.iter()
                    .map(|p| to.iter().map(|q| p.dist2(q)).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max)
            };
            directed(a, b).max(directed(b, a)).sqrt()
        }
        ProximityMeasure::Average => {
            // mean closest-point distance, taken over both samples
            let closest_sum = |from: &[Point3], to: &[Point3]| {
                from.iter()
                    .map(|p| to.iter().map(|q| p.dist2(q)).fold(f64::INFINITY, f64::min).sqrt())
                    .sum::<f64>()
            };
            (closest_sum(a, b) + closest_sum(b, a)) / (a.len() + b.len()) as f64
        }
    }
}

/// Measure between two identified elements, evaluated with the lower id
/// first so the result does not depend on argument order.
pub fn pair_distance(
    a_id: usize,
    a: &[Point3],
    b_id: usize,
    b: &[Point3],
    measure: ProximityMeasure,
) -> f64 {
    if a_id <= b_id {
        sample_distance(a, b, measure)
    } else {
        sample_distance(b, a, measure)
    }
}

/// Measure between two segments over their endpoint samples.
pub fn segment_distance(a: &Segment, b: &Segment, measure: ProximityMeasure) -> f64 {
    let pa = [a.endpoints.0, a.endpoints.1];
    let pb = [b.endpoints.0, b.endpoints.1];
    pair_distance(a.id, &pa, b.id, &pb, measure)
}
