//! Adjacency Matrix of Curve Segments: the boolean neighbor matrix of a
//! segment selection, ordered by streamline.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csng::Csng;
use crate::streamline::StreamlineSet;
use crate::{Error, Level, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmcsOrdering {
    /// Grouped by streamline, each group from beginning to end.
    #[default]
    ByStreamline,
    ById,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Amcs {
    pub n: usize,
    pub symmetric: bool,
    pub ordering: Vec<usize>,
    /// `(row, col)` positions of set cells, sorted.
    pub entries: Vec<(usize, usize)>,
    /// Streamline of the segment at every position.
    #[serde(skip)]
    pub groups: Vec<usize>,
}

impl Amcs {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.entries.binary_search(&(row, col)).is_ok()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("amcs serializes")
    }
}

/// Builds the AMCS of `members` from a segment-level graph. Entry `(i, j)`
/// is set when `ordering[i] → ordering[j]` is an edge of `g`.
pub fn build_amcs(g: &Csng, set: &StreamlineSet, members: &[usize], ordering: AmcsOrdering) -> Result<Amcs> {
    if g.level() != Level::Segment {
        return Err(Error::LevelMismatch {
            expected: Level::Segment,
            found: g.level(),
        });
    }
    if g.n_nodes() != set.segments().len() {
        return Err(Error::LengthMismatch {
            expected: set.segments().len(),
            got: g.n_nodes(),
        });
    }
    if members.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(&bad) = members.iter().find(|&&m| m >= g.n_nodes()) {
        return Err(Error::InvalidId {
            id: bad,
            level: Level::Segment,
        });
    }
    let mut order = members.to_vec();
    order.sort_unstable();
    order.dedup();
    let segments = set.segments();
    if ordering == AmcsOrdering::ByStreamline {
        order.sort_by_key(|&s| (segments[s].streamline_id, segments[s].index_in_streamline));
    }
    let position: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut entries: Vec<(usize, usize)> = order
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &s)| {
            let position = &position;
            g.neighbors(s)
                .iter()
                .filter_map(move |&t| position.get(&(t as usize)).map(|&j| (i, j)))
        })
        .collect();
    entries.sort_unstable();
    Ok(Amcs {
        n: order.len(),
        symmetric: !g.is_directed(),
        groups: order.iter().map(|&s| segments[s].streamline_id).collect(),
        ordering: order,
        entries,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    /// Black cells on white.
    #[default]
    Light,
    /// Amber cells on near-black.
    Dark,
}

impl Palette {
    fn colors(&self) -> ([u8; 3], [u8; 3], [u8; 3]) {
        match self {
            Palette::Light => ([255, 255, 255], [0, 0, 0], [200, 200, 200]),
            Palette::Dark => ([16, 16, 24], [255, 176, 0], [70, 70, 90]),
        }
    }
}

/// RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Maps matrix index `i` to its pixel when `n` cells share `size` pixels.
fn bucket(i: usize, n: usize, size: usize) -> usize {
    i * size / n
}

/// Renders the matrix at most `max_pixels` wide. Larger matrices are
/// max-pooled: a pixel is set when any covered cell is set. Streamline group
/// boundaries are drawn on background pixels.
pub fn rasterize_amcs(m: &Amcs, max_pixels: usize, palette: Palette) -> Result<Raster> {
    if max_pixels < 16 {
        return Err(Error::InvalidConfig(format!("max_pixels must be at least 16, got {max_pixels}")));
    }
    let size = m.n.clamp(1, max_pixels);
    let (bg, fg, sep) = palette.colors();
    let mut set = vec![false; size * size];
    for &(r, c) in &m.entries {
        set[bucket(r, m.n, size) * size + bucket(c, m.n, size)] = true;
    }
    let mut boundary = vec![false; size];
    for i in 1..m.groups.len() {
        if m.groups[i] != m.groups[i - 1] {
            boundary[bucket(i, m.n, size)] = true;
        }
    }
    let mut pixels = vec![0u8; size * size * 3];
    pixels.par_chunks_mut(size * 3).enumerate().for_each(|(y, row)| {
        for x in 0..size {
            let color = if set[y * size + x] {
                fg
            } else if boundary[x] || boundary[y] {
                sep
            } else {
                bg
            };
            row[3 * x..3 * x + 3].copy_from_slice(&color);
        }
    });
    Ok(Raster {
        width: size,
        height: size,
        pixels,
    })
}
