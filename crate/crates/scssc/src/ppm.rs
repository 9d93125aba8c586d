//! Binary PPM (P6) renderings of label maps and superpixel boundaries.

use std::fs;
use std::path::Path;

use scssc_core::cube::PixelMatrix;
use scssc_core::superpixels::SegmentationMap;
use scssc_core::Geometry;

use crate::{Error, Result};

/// Fixed palette; label `l` uses entry `(l - 1) % 24`, label 0 is black.
pub const PALETTE: [[u8; 3]; 24] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
    [255, 250, 200],
    [128, 0, 0],
    [170, 255, 195],
    [128, 128, 0],
    [255, 215, 180],
    [0, 0, 128],
    [128, 128, 128],
    [255, 255, 255],
    [102, 51, 153],
    [0, 90, 50],
    [255, 99, 71],
];

pub fn label_color(label: u32) -> [u8; 3] {
    if label == 0 {
        [0, 0, 0]
    } else {
        PALETTE[(label as usize - 1) % PALETTE.len()]
    }
}

fn encode(geometry: Geometry, color: impl Fn(usize) -> [u8; 3]) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", geometry.cols, geometry.rows).into_bytes();
    for r in 0..geometry.rows {
        for c in 0..geometry.cols {
            out.extend_from_slice(&color(geometry.index(r, c)));
        }
    }
    out
}

pub fn label_map_ppm(labels: &[u32], geometry: Geometry) -> Vec<u8> {
    encode(geometry, |j| label_color(labels[j]))
}

pub fn write_label_map(path: &Path, labels: &[u32], geometry: Geometry) -> Result<()> {
    fs::write(path, label_map_ppm(labels, geometry)).map_err(|e| Error::io(path, e))
}

/// False-color image (three channels in `[0, 1]`) with segment edges in red.
pub fn write_boundary_overlay(
    path: &Path,
    image: &PixelMatrix,
    map: &SegmentationMap,
) -> Result<()> {
    let g = image.geometry();
    let a = map.assignments();
    let edge = |j: usize| {
        let (r, c) = g.unindex(j);
        (r + 1 < g.rows && a[g.index(r + 1, c)] != a[j])
            || (c + 1 < g.cols && a[g.index(r, c + 1)] != a[j])
    };
    let bytes = encode(g, |j| {
        if edge(j) {
            [255, 0, 0]
        } else {
            let p = image.column(j);
            [0, 1, 2].map(|i| (p[i].clamp(0.0, 1.0) * 255.0).round() as u8)
        }
    });
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
