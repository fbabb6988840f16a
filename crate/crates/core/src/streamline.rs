//! Streamline ingestion, preprocessing and decomposition.
//!
//! Every element at every level (segment, sub-curve, streamline) is a
//! contiguous run of one streamline's points, so the neighbor search and the
//! graph builders work over [`ElementSpan`]s instead of copying geometry.

use std::io::{BufRead, Read};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::geometry::Point3;
use crate::{Error, Level, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Streamline {
    pub id: usize,
    pub points: Vec<Point3>,
}

impl Streamline {
    pub fn segment_count(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: usize,
    pub streamline_id: usize,
    pub index_in_streamline: usize,
    pub endpoints: (Point3, Point3),
}

impl Segment {
    pub fn direction(&self) -> Point3 {
        self.endpoints.1 - self.endpoints.0
    }

    pub fn length(&self) -> f64 {
        self.endpoints.0.dist(&self.endpoints.1)
    }

    pub fn midpoint(&self) -> Point3 {
        self.endpoints.0.midpoint(&self.endpoints.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubCurve {
    pub id: usize,
    pub streamline_id: usize,
    pub segment_ids: Range<usize>,
}

impl SubCurve {
    pub fn len(&self) -> usize {
        self.segment_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segment_ids.is_empty()
    }
}

/// Element of any level, as a half-open range of points on one streamline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementSpan {
    pub streamline: usize,
    pub start: usize,
    pub end: usize,
}

/// An immutable, validated streamline dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamlineSet {
    streamlines: Vec<Streamline>,
    segments: Vec<Segment>,
    /// First segment id of each streamline, plus a trailing total.
    segment_offsets: Vec<usize>,
    bounding_box: (Point3, Point3),
    diagonal: f64,
    labels: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub discarded_streamlines: usize,
    pub collapsed_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Json,
    Text,
}

#[derive(Deserialize)]
struct JsonFile {
    streamlines: Vec<Vec<[f64; 3]>>,
    #[serde(default)]
    labels: Option<Vec<i64>>,
}

#[derive(Serialize)]
struct JsonFileOut<'a> {
    streamlines: Vec<Vec<[f64; 3]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<&'a [i64]>,
}

impl StreamlineSet {
    /// Builds a set from raw polylines. Non-finite coordinates are rejected,
    /// duplicate consecutive points are collapsed and polylines left with
    /// fewer than two points are dropped (along with their label).
    pub fn from_polylines(
        polylines: Vec<Vec<Point3>>,
        labels: Option<Vec<i64>>,
    ) -> Result<(Self, IngestReport)> {
        if let Some(l) = &labels {
            if l.len() != polylines.len() {
                return Err(Error::MalformedInput(format!(
                    "{} labels for {} streamlines",
                    l.len(),
                    polylines.len()
                )));
            }
        }
        let mut report = IngestReport::default();
        let mut kept = Vec::with_capacity(polylines.len());
        let mut kept_labels = labels.as_ref().map(|_| Vec::new());
        for (i, raw) in polylines.into_iter().enumerate() {
            let mut points: Vec<Point3> = Vec::with_capacity(raw.len());
            for p in raw {
                if !p.is_finite() {
                    return Err(Error::MalformedInput(format!(
                        "non-finite coordinate in streamline {i}"
                    )));
                }
                if points.last() == Some(&p) {
                    report.collapsed_points += 1;
                    continue;
                }
                points.push(p);
            }
            if points.len() < 2 {
                report.discarded_streamlines += 1;
                continue;
            }
            if let (Some(out), Some(src)) = (kept_labels.as_mut(), labels.as_ref()) {
                out.push(src[i]);
            }
            kept.push(points);
        }
        if kept.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok((Self::assemble(kept, kept_labels), report))
    }

    /// Assumes already-validated polylines.
    fn assemble(polylines: Vec<Vec<Point3>>, labels: Option<Vec<i64>>) -> Self {
        let total: usize = polylines.iter().map(|p| p.len() - 1).sum();
        let mut segments = Vec::with_capacity(total);
        let mut segment_offsets = Vec::with_capacity(polylines.len() + 1);
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let streamlines: Vec<Streamline> = polylines
            .into_iter()
            .enumerate()
            .map(|(id, points)| {
                segment_offsets.push(segments.len());
                for (k, w) in points.windows(2).enumerate() {
                    segments.push(Segment {
                        id: segments.len(),
                        streamline_id: id,
                        index_in_streamline: k,
                        endpoints: (w[0], w[1]),
                    });
                }
                for p in &points {
                    lo = lo.min(p);
                    hi = hi.max(p);
                }
                Streamline { id, points }
            })
            .collect();
        segment_offsets.push(segments.len());
        Self {
            streamlines,
            segments,
            segment_offsets,
            bounding_box: (lo, hi),
            diagonal: lo.dist(&hi),
            labels,
        }
    }

    pub fn streamlines(&self) -> &[Streamline] {
        &self.streamlines
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn bounding_box(&self) -> (Point3, Point3) {
        self.bounding_box
    }

    pub fn diagonal(&self) -> f64 {
        self.diagonal
    }

    /// Per-streamline ground-truth labels, when the input carried them.
    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.streamlines.len() {
            return Err(Error::LengthMismatch {
                expected: self.streamlines.len(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Segment ids belonging to a streamline.
    pub fn segment_range(&self, streamline: usize) -> Range<usize> {
        self.segment_offsets[streamline]..self.segment_offsets[streamline + 1]
    }

    pub fn point_count(&self) -> usize {
        self.streamlines.iter().map(|s| s.points.len()).sum()
    }

    /// Points of an element span.
    pub fn span_points(&self, span: &ElementSpan) -> &[Point3] {
        &self.streamlines[span.streamline].points[span.start..span.end]
    }

    /// Element spans at a level. `subcurve_len` is only used for sub-curves.
    pub fn element_spans(&self, level: Level, subcurve_len: usize) -> Vec<ElementSpan> {
        match level {
            Level::Segment => self
                .segments
                .iter()
                .map(|s| ElementSpan {
                    streamline: s.streamline_id,
                    start: s.index_in_streamline,
                    end: s.index_in_streamline + 2,
                })
                .collect(),
            Level::SubCurve => decompose_subcurves(self, subcurve_len.max(1))
                .into_iter()
                .map(|sc| {
                    let first = self.segments[sc.segment_ids.start].index_in_streamline;
                    ElementSpan {
                        streamline: sc.streamline_id,
                        start: first,
                        end: first + sc.len() + 1,
                    }
                })
                .collect(),
            Level::Streamline => self
                .streamlines
                .iter()
                .map(|s| ElementSpan {
                    streamline: s.id,
                    start: 0,
                    end: s.points.len(),
                })
                .collect(),
        }
    }

    /// For every segment, the id of the element containing it at `level`.
    pub fn segment_owners(&self, level: Level, subcurve_len: usize) -> Vec<usize> {
        match level {
            Level::Segment => (0..self.segments.len()).collect(),
            Level::Streamline => self.segments.iter().map(|s| s.streamline_id).collect(),
            Level::SubCurve => {
                let mut out = vec![0; self.segments.len()];
                for sc in decompose_subcurves(self, subcurve_len.max(1)) {
                    for s in sc.segment_ids.clone() {
                        out[s] = sc.id;
                    }
                }
                out
            }
        }
    }

    /// Number of elements at a level.
    pub fn element_count(&self, level: Level, subcurve_len: usize) -> usize {
        match level {
            Level::Segment => self.segments.len(),
            Level::Streamline => self.streamlines.len(),
            Level::SubCurve => {
                let n = subcurve_len.max(1);
                self.streamlines
                    .iter()
                    .map(|s| s.segment_count().div_ceil(n))
                    .sum()
            }
        }
    }

    pub fn to_json(&self) -> String {
        let out = JsonFileOut {
            streamlines: self
                .streamlines
                .iter()
                .map(|s| s.points.iter().map(|&p| p.into()).collect())
                .collect(),
            labels: self.labels.as_deref(),
        };
        serde_json::to_string(&out).expect("streamline sets always serialize")
    }
}

/// Parses a dataset in one of the two supported formats.
pub fn load_streamlines<R: Read>(
    mut source: R,
    format: InputFormat,
) -> Result<(StreamlineSet, IngestReport)> {
    match format {
        InputFormat::Json => {
            let file: JsonFile = serde_json::from_reader(source)
                .map_err(|e| Error::MalformedInput(e.to_string()))?;
            let polylines = file
                .streamlines
                .into_iter()
                .map(|line| line.into_iter().map(Point3::from).collect())
                .collect();
            StreamlineSet::from_polylines(polylines, file.labels)
        }
        InputFormat::Text => {
            let mut text = String::new();
            source
                .read_to_string(&mut text)
                .map_err(|e| Error::MalformedInput(e.to_string()))?;
            StreamlineSet::from_polylines(parse_text(text.as_bytes())?, None)
        }
    }
}

fn parse_text<R: BufRead>(source: R) -> Result<Vec<Vec<Point3>>> {
    let mut lines = Vec::new();
    let mut current: Vec<Point3> = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line = line.map_err(|e| Error::MalformedInput(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            if !current.is_empty() {
                lines.push(std::mem::take(&mut current));
            }
            continue;
        }
        let coords: Vec<f64> = trimmed
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::MalformedInput(format!("line {}: {e}", lineno + 1)))?;
        if coords.len() != 3 {
            return Err(Error::MalformedInput(format!(
                "line {}: expected 3 coordinates, found {}",
                lineno + 1,
                coords.len()
            )));
        }
        let p = Point3::new(coords[0], coords[1], coords[2]);
        if !p.is_finite() {
            return Err(Error::MalformedInput(format!(
                "line {}: non-finite coordinate",
                lineno + 1
            )));
        }
        current.push(p);
    }
    if !current.is_empty() {
        lines.push(current);
    }
    Ok(lines)
}

/// Resamples every streamline at uniform arc-length spacing. Original
/// endpoints are kept exactly; the last step carries the remainder.
pub fn resample_uniform(set: &StreamlineSet, spacing: f64) -> Result<StreamlineSet> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidSpacing(spacing));
    }
    let polylines = set
        .streamlines
        .iter()
        .map(|s| resample_polyline(&s.points, spacing))
        .collect();
    Ok(StreamlineSet::assemble(polylines, set.labels.clone()))
}

fn resample_polyline(points: &[Point3], spacing: f64) -> Vec<Point3> {
    let first = points[0];
    let last = *points.last().expect("non-empty polyline");
    let mut out = vec![first];
    // arc position of the next sample, and arc position at the start of the current piece
    let mut next = spacing;
    let mut walked = 0.0;
    for w in points.windows(2) {
        let len = w[0].dist(&w[1]);
        while next <= walked + len {
            let t = (next - walked) / len;
            out.push(w[0].lerp(&w[1], t));
            next += spacing;
        }
        walked += len;
    }
    let tail = walked - (next - spacing);
    if out.len() > 1 && tail <= 1e-9 * spacing {
        // last sample already sits on the endpoint
        out.pop();
    }
    out.push(last);
    out
}

/// Keeps streamlines with at least `min_segments` segments.
pub fn filter_short(set: &StreamlineSet, min_segments: usize) -> Result<StreamlineSet> {
    if min_segments < 1 {
        return Err(Error::InvalidConfig("min_segments must be >= 1".into()));
    }
    let mut labels = set.labels.as_ref().map(|_| Vec::new());
    let polylines: Vec<Vec<Point3>> = set
        .streamlines
        .iter()
        .filter(|s| s.segment_count() >= min_segments)
        .map(|s| {
            if let (Some(out), Some(src)) = (labels.as_mut(), set.labels.as_ref()) {
                out.push(src[s.id]);
            }
            s.points.clone()
        })
        .collect();
    if polylines.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(StreamlineSet::assemble(polylines, labels))
}

/// Splits each streamline into runs of `n` consecutive segments; a shorter
/// trailing run becomes its own sub-curve.
pub fn decompose_subcurves(set: &StreamlineSet, n: usize) -> Vec<SubCurve> {
    assert!(n >= 1, "sub-curve length must be at least 1");
    let mut out = Vec::with_capacity(set.element_count(Level::SubCurve, n));
    for s in &set.streamlines {
        let range = set.segment_range(s.id);
        let mut start = range.start;
        while start < range.end {
            let end = (start + n).min(range.end);
            out.push(SubCurve {
                id: out.len(),
                streamline_id: s.id,
                segment_ids: start..end,
            });
            start = end;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn json_counts() {
        let src = r#"{"streamlines": [[[0,0,0],[1,0,0],[2,0,0]], [[0,1,0],[1,1,0],[2,1,0]]]}"#;
        let (set, report) = load_streamlines(src.as_bytes(), InputFormat::Json).unwrap();
        assert_eq!(set.streamlines().len(), 2);
        assert_eq!(set.segments().len(), 4);
        assert_eq!(report, IngestReport::default());
        assert_eq!(set.segment_range(1), 2..4);
        assert!((set.diagonal() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn duplicate_points_collapse() {
        let (set, report) =
            StreamlineSet::from_polylines(vec![vec![p(0., 0., 0.), p(0., 0., 0.), p(1., 0., 0.)]], None)
                .unwrap();
        assert_eq!(set.streamlines().len(), 1);
        assert_eq!(set.segments().len(), 1);
        assert_eq!(report.collapsed_points, 1);
    }

    #[test]
    fn degenerate_lines_are_dropped_with_their_labels() {
        let (set, report) = StreamlineSet::from_polylines(
            vec![
                vec![p(0., 0., 0.), p(0., 0., 0.)],
                vec![p(0., 0., 0.), p(1., 0., 0.)],
            ],
            Some(vec![7, 9]),
        )
        .unwrap();
        assert_eq!(report.discarded_streamlines, 1);
        assert_eq!(set.labels(), Some(&[9][..]));
        assert_eq!(set.streamlines()[0].id, 0);
    }

    #[test]
    fn nan_is_rejected() {
        let text = "0 0 0\n1 NaN 0\n";
        assert!(matches!(
            load_streamlines(text.as_bytes(), InputFormat::Text),
            Err(Error::MalformedInput(_))
        ));
        let json = r#"{"streamlines": [[[0,0,0],[NaN,0,0]]]}"#;
        assert!(matches!(
            load_streamlines(json.as_bytes(), InputFormat::Json),
            Err(Error::MalformedInput(_))
        ));
    }

    #[test]
    fn empty_dataset() {
        let json = r#"{"streamlines": [[[0,0,0]]]}"#;
        assert!(matches!(
            load_streamlines(json.as_bytes(), InputFormat::Json),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn text_format() {
        let text = "# header\n0 0 0\n1 0 0\n\n\n0 1 0\n1 1 0\n2 1 0\n";
        let (set, _) = load_streamlines(text.as_bytes(), InputFormat::Text).unwrap();
        assert_eq!(set.streamlines().len(), 2);
        assert_eq!(set.segments().len(), 3);
        assert!(load_streamlines("0 0\n".as_bytes(), InputFormat::Text).is_err());
    }

    #[test]
    fn label_length_must_match() {
        let json = r#"{"streamlines": [[[0,0,0],[1,0,0]]], "labels": [1, 2]}"#;
        assert!(load_streamlines(json.as_bytes(), InputFormat::Json).is_err());
    }

    #[test]
    fn resample_straight_line() {
        let (set, _) =
            StreamlineSet::from_polylines(vec![vec![p(0., 0., 0.), p(1., 0., 0.)]], None).unwrap();
        let out = resample_uniform(&set, 0.25).unwrap();
        let xs: Vec<f64> = out.streamlines()[0].points.iter().map(|q| q.x).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let coarse = resample_uniform(&set, 5.0).unwrap();
        assert_eq!(coarse.streamlines()[0].points, vec![p(0., 0., 0.), p(1., 0., 0.)]);
        assert!(matches!(resample_uniform(&set, 0.0), Err(Error::InvalidSpacing(_))));
        assert!(matches!(resample_uniform(&set, f64::NAN), Err(Error::InvalidSpacing(_))));
    }

    #[test]
    fn filter_short_lines() {
        let line = |n: usize, y: f64| (0..=n).map(|i| p(i as f64, y, 0.)).collect::<Vec<_>>();
        let (set, _) = StreamlineSet::from_polylines(vec![line(5, 0.), line(2, 1.)], Some(vec![3, 4])).unwrap();
        let out = filter_short(&set, 3).unwrap();
        assert_eq!(out.streamlines().len(), 1);
        assert_eq!(out.segments().len(), 5);
        assert_eq!(out.labels(), Some(&[3][..]));
        assert_eq!(filter_short(&set, 1).unwrap(), set);
        assert!(matches!(filter_short(&set, 9), Err(Error::EmptyDataset)));
    }

    #[test]
    fn subcurve_remainder() {
        let line: Vec<Point3> = (0..=10).map(|i| p(i as f64, 0., 0.)).collect();
        let (set, _) = StreamlineSet::from_polylines(vec![line], None).unwrap();
        let sizes: Vec<usize> = decompose_subcurves(&set, 4).iter().map(SubCurve::len).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
        assert_eq!(decompose_subcurves(&set, 1).len(), 10);
        let spans = set.element_spans(Level::SubCurve, 4);
        assert_eq!(spans[2], ElementSpan { streamline: 0, start: 8, end: 11 });
        assert_eq!(set.element_count(Level::SubCurve, 4), 3);
    }
}
