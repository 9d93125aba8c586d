//! Plain CSV artifacts: label grids in row-major scan order and sparse dumps.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use scssc_core::cube::GroundTruth;
use scssc_core::selection::ExemplarDictionary;
use scssc_core::sparse::CscMatrix;
use scssc_core::Geometry;

use crate::envi::load_envi;
use crate::{Error, Result};

fn write(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One CSV line per image row; `labels` are in linear pixel order.
pub fn labels_to_csv(labels: &[u32], geometry: Geometry) -> String {
    let mut s = String::with_capacity(labels.len() * 3);
    for r in 0..geometry.rows {
        for c in 0..geometry.cols {
            if c > 0 {
                s.push(',');
            }
            write!(s, "{}", labels[geometry.index(r, c)]).expect("string write");
        }
        s.push('\n');
    }
    s
}

pub fn write_labels_csv(path: &Path, labels: &[u32], geometry: Geometry) -> Result<()> {
    write(path, labels_to_csv(labels, geometry))
}

/// Reads a row-major integer grid back into linear pixel order.
pub fn read_labels_csv(path: &Path) -> Result<(Vec<u32>, Geometry)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|v| v.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| {
                Error::format(
                    path,
                    format!("line {}: expected non-negative integers", i + 1),
                )
            })?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::format(
                    path,
                    format!(
                        "line {} has {} columns, expected {}",
                        i + 1,
                        row.len(),
                        first.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::format(path, "no labels"));
    }
    let geometry = Geometry::new(rows.len(), rows[0].len())?;
    let mut labels = vec![0; geometry.len()];
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            labels[geometry.index(r, c)] = v;
        }
    }
    Ok((labels, geometry))
}

/// Ground truth from a CSV grid or a single-band ENVI header; must match `geometry`.
pub fn load_ground_truth(path: &Path, geometry: Geometry) -> Result<GroundTruth> {
    let is_header = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("hdr"));
    let (labels, found) = if is_header {
        let (cube, _) = load_envi(path)?;
        if cube.bands() != 1 {
            return Err(Error::format(
                path,
                format!("ground truth must have one band, found {}", cube.bands()),
            ));
        }
        let labels = cube
            .values()
            .iter()
            .map(|&v| {
                if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                    Ok(v as u32)
                } else {
                    Err(Error::format(
                        path,
                        format!("label {v} is not a non-negative integer"),
                    ))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        (labels, cube.geometry())
    } else {
        read_labels_csv(path)?
    };
    if found != geometry {
        return Err(Error::format(
            path,
            format!(
                "ground truth is {}x{} but the scene is {}x{}",
                found.rows, found.cols, geometry.rows, geometry.cols
            ),
        ));
    }
    Ok(GroundTruth::new(labels))
}

/// `row,col,value` triplets with a header line, 0-based indices.
pub fn write_triplets_csv(path: &Path, m: &CscMatrix) -> Result<()> {
    let mut s = String::from("row,col,value\n");
    for (i, j, v) in m.triplets() {
        writeln!(s, "{i},{j},{v:?}").expect("string write");
    }
    write(path, s)
}

/// `segment,pixel,round`: 1-based segment id, 0-based linear pixel, 0-based round.
pub fn write_exemplars_csv(path: &Path, dict: &ExemplarDictionary) -> Result<()> {
    let mut s = String::from("segment,pixel,round\n");
    for (e, j, round) in dict.records() {
        writeln!(s, "{e},{j},{round}").expect("string write");
    }
    write(path, s)
}
