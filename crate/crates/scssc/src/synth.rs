//! Planted-subspace scenes: random low-dimensional subspaces tiled into
//! rectangular blocks.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use scssc_core::cube::{GroundTruth, SpectralCube};
use scssc_core::Geometry;

use crate::csv::write_labels_csv;
use crate::envi::{write_envi, DataType, EnviFormat, Interleave};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Number of subspaces (and classes).
    pub subspaces: usize,
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub rows: usize,
    pub cols: usize,
    /// Blocks per column and per row of the image; block `b` in row-major
    /// order draws from subspace `b % subspaces`.
    pub blocks: (usize, usize),
    pub noise: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// `subspaces` blocks arranged as close to square as possible.
    pub fn new(
        subspaces: usize,
        ambient_dim: usize,
        subspace_dim: usize,
        rows: usize,
        cols: usize,
    ) -> Self {
        let by = (1..=subspaces)
            .filter(|d| subspaces % d == 0 && d * d <= subspaces)
            .max()
            .unwrap_or(1);
        Self {
            subspaces,
            ambient_dim,
            subspace_dim,
            rows,
            cols,
            blocks: (by, subspaces.div_ceil(by)),
            noise: 0.0,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        let (by, bx) = self.blocks;
        if self.subspaces == 0 || self.subspace_dim == 0 {
            return Err(Error::Config(
                "subspace count and dimension must be positive".into(),
            ));
        }
        if self.subspace_dim >= self.ambient_dim {
            return Err(Error::Config(format!(
                "subspace dimension {} must be below the ambient dimension {}",
                self.subspace_dim, self.ambient_dim
            )));
        }
        if by == 0 || bx == 0 || by > self.rows || bx > self.cols || by * bx < self.subspaces {
            return Err(Error::Config(format!(
                "a {by}x{bx} block layout cannot hold {} subspaces in a {}x{} image",
                self.subspaces, self.rows, self.cols
            )));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::Config("noise must be a non-negative number".into()));
        }
        Ok(())
    }

    /// Subspace index of pixel `(r, c)`.
    pub fn block_of(&self, r: usize, c: usize) -> usize {
        let (by, bx) = self.blocks;
        let (br, bc) = (r * by / self.rows, c * bx / self.cols);
        (br * bx + bc) % self.subspaces
    }
}

#[derive(Debug, Clone)]
pub struct SynthScene {
    pub cube: SpectralCube,
    pub truth: GroundTruth,
    /// Orthonormal bases, each `ambient_dim × subspace_dim` column-major.
    pub bases: Vec<Vec<f64>>,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn random_basis(rng: &mut ChaCha8Rng, dim: usize, sub: usize) -> Vec<f64> {
    loop {
        let mut basis: Vec<f64> = Vec::with_capacity(dim * sub);
        for _ in 0..sub {
            let mut v: Vec<f64> = (0..dim).map(|_| normal(rng)).collect();
            // two Gram-Schmidt passes keep the basis orthonormal to rounding
            for _ in 0..2 {
                for b in basis.chunks(dim) {
                    let p: f64 = b.iter().zip(&v).map(|(a, x)| a * x).sum();
                    v.iter_mut().zip(b).for_each(|(x, a)| *x -= p * a);
                }
            }
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-8 {
                break;
            }
            basis.extend(v.iter().map(|x| x / n));
        }
        if basis.len() == dim * sub {
            return basis;
        }
    }
}

pub fn generate(spec: &SynthSpec) -> Result<SynthScene> {
    spec.validate()?;
    let (dim, sub) = (spec.ambient_dim, spec.subspace_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bases: Vec<Vec<f64>> = (0..spec.subspaces)
        .map(|_| random_basis(&mut rng, dim, sub))
        .collect();
    let geometry = Geometry::new(spec.rows, spec.cols)?;
    let mut values = Vec::with_capacity(geometry.len() * dim);
    let mut labels = Vec::with_capacity(geometry.len());
    for j in 0..geometry.len() {
        let (r, c) = geometry.unindex(j);
        let s = spec.block_of(r, c);
        let basis = &bases[s];
        let (point, norm) = loop {
            let w: Vec<f64> = (0..sub).map(|_| normal(&mut rng)).collect();
            let p: Vec<f64> = (0..dim)
                .map(|i| (0..sub).map(|t| basis[t * dim + i] * w[t]).sum())
                .collect();
            let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-8 {
                break (p, n);
            }
        };
        for x in point {
            let e = if spec.noise > 0.0 {
                spec.noise * normal(&mut rng)
            } else {
                0.0
            };
            values.push(x / norm + e);
        }
        labels.push(s as u32 + 1);
    }
    Ok(SynthScene {
        cube: SpectralCube::new(geometry, dim, values)?,
        truth: GroundTruth::new(labels),
        bases,
    })
}

/// Writes `scene.hdr`/`scene.img` (float64 BSQ) and `gt.csv` into `dir`.
pub fn write_scene(dir: &Path, scene: &SynthScene) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let format = EnviFormat {
        interleave: Interleave::Bsq,
        data_type: DataType::Float64,
        big_endian: false,
    };
    let header = write_envi(&dir.join("scene"), &scene.cube, format)?;
    let gt = dir.join("gt.csv");
    write_labels_csv(&gt, &scene.truth.labels, scene.cube.geometry())?;
    Ok((header, gt))
}
