mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use scssc_core::cube::{unvectorize, vectorize, SpectralCube};
use scssc_core::grid::{grid_to_row, row_to_grid};
use scssc_core::preprocess::{false_color, pca_fit, pca_fit_project, reduced_dim, unit_normalize};
use scssc_core::Geometry;

fn random_matrix(seed: u64, dim: usize, rows: usize, cols: usize) -> scssc_core::cube::PixelMatrix {
    let mut g = rng(seed);
    // anisotropic so the spectrum is well separated
    let data = (0..rows * cols)
        .flat_map(|_| {
            (0..dim)
                .map(|b| (1.0 + b as f64).powi(2) * gaussian(&mut g))
                .collect::<Vec<_>>()
        })
        .collect();
    pixels(dim, rows, cols, data)
}

#[test]
fn pca_matches_covariance_eigendecomposition() {
    let x = random_matrix(1, 8, 10, 12);
    let n = x.n();
    let model = pca_fit(&x, 8).unwrap();
    let centered = DMatrix::from_fn(8, n, |b, j| x.column(j)[b] - model.mean[b]);
    let cov = &centered * centered.transpose() / (n as f64 - 1.0);
    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]];
    for (i, &o) in order.iter().enumerate() {
        assert!((model.explained_variance[i] - eig.eigenvalues[o]).abs() < 1e-9 * top);
        let v = eig.eigenvectors.column(o);
        let dot: f64 = (0..8).map(|b| v[b] * model.axis(i)[b]).sum();
        assert!((dot.abs() - 1.0).abs() < 1e-9);
        let big = model
            .axis(i)
            .iter()
            .copied()
            .fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        assert!(big > 0.0);
    }
}

#[test]
fn basis_is_orthonormal_and_sorted() {
    let x = random_matrix(2, 12, 7, 9);
    let model = pca_fit(&x, 5).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let d: f64 = model
                .axis(i)
                .iter()
                .zip(model.axis(j))
                .map(|(a, b)| a * b)
                .sum();
            assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
    assert!(model.explained_variance.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn three_component_prefix_is_consistent() {
    let x = random_matrix(3, 16, 6, 6);
    let d = reduced_dim(16, 0.25);
    assert_eq!(d, 4);
    let (_, full) = pca_fit_project(&x, d).unwrap();
    let (_, three) = pca_fit_project(&x, 3).unwrap();
    for j in 0..x.n() {
        for i in 0..3 {
            assert!((full.column(j)[i] - three.column(j)[i]).abs() < 1e-10);
        }
    }
}

#[test]
fn dimension_rule() {
    assert_eq!(reduced_dim(200, 0.25), 50);
    assert_eq!(reduced_dim(103, 0.25), 25);
    assert_eq!(reduced_dim(8, 0.25), 3);
    assert_eq!(reduced_dim(2, 0.25), 2);
}

#[test]
fn normalization_cases() {
    let x = pixels(2, 1, 2, vec![3.0, 4.0, 0.6, 0.8]);
    let y = unit_normalize(&x).unwrap();
    assert!((y.column(0)[0] - 0.6).abs() < 1e-15 && (y.column(0)[1] - 0.8).abs() < 1e-15);
    assert!((y.column(1)[0] - 0.6).abs() < 1e-12 && (y.column(1)[1] - 0.8).abs() < 1e-12);
    assert!(unit_normalize(&pixels(2, 1, 2, vec![1.0, 0.0, 0.0, 0.0])).is_err());
}

#[test]
fn false_color_channels_span_unit_interval() {
    let x = random_matrix(4, 10, 8, 8);
    let model = pca_fit(&x, 3).unwrap();
    let img = false_color(&model, &x).unwrap();
    assert_eq!(img.dim(), 3);
    for ch in 0..3 {
        let vals: Vec<f64> = img.columns().map(|c| c[ch]).collect();
        assert_eq!(vals.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
    }
}

#[test]
fn linearization_examples() {
    let g = Geometry::new(2, 3).unwrap();
    assert_eq!(g.index(1, 0), 1);
    assert_eq!(g.index(0, 1), 2);
    let cube = SpectralCube::from_fn(Geometry::new(1, 4).unwrap(), 1, |_, c, _| c as f64).unwrap();
    let x = vectorize(&cube);
    assert_eq!(x.as_slice(), &[0.0, 1.0, 2.0, 3.0]);
    let grid = row_to_grid(&[1.0, 2.0, 3.0, 4.0], Geometry::new(2, 2).unwrap()).unwrap();
    assert_eq!(
        (
            grid.get(0, 0),
            grid.get(0, 1),
            grid.get(1, 0),
            grid.get(1, 1)
        ),
        (1.0, 3.0, 2.0, 4.0)
    );
    assert!(row_to_grid(&[1.0; 3], Geometry::new(2, 2).unwrap()).is_err());
}

proptest! {
    #[test]
    fn linearization_is_bijective(rows in 1usize..40, cols in 1usize..40) {
        let g = Geometry::new(rows, cols).unwrap();
        for r in 0..rows {
            for c in 0..cols {
                prop_assert_eq!(g.unindex(g.index(r, c)), (r, c));
            }
        }
    }

    #[test]
    fn cube_and_grid_roundtrips(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8, bands in 1usize..8) {
        let mut g = rng(seed);
        let geom = Geometry::new(rows, cols).unwrap();
        let vals: Vec<f64> = (0..geom.len() * bands).map(|_| gaussian(&mut g)).collect();
        let cube = SpectralCube::new(geom, bands, vals.clone()).unwrap();
        prop_assert_eq!(&unvectorize(&vectorize(&cube)), &cube);
        let row = &vals[..geom.len()];
        prop_assert_eq!(grid_to_row(&row_to_grid(row, geom).unwrap()), row.to_vec());
    }

    #[test]
    fn projection_is_nonexpansive(seed in any::<u64>(), d in 1usize..6) {
        let x = random_matrix(seed, 6, 5, 5);
        let model = pca_fit(&x, 6).unwrap();
        let y = model.project(&x, d).unwrap();
        for j in 0..x.n() {
            let c: f64 = x.column(j).iter().zip(&model.mean).map(|(a, m)| (a - m) * (a - m)).sum::<f64>().sqrt();
            let s: f64 = y.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(s <= c + 1e-10);
        }
    }

    #[test]
    fn normalized_columns_have_unit_norm(seed in any::<u64>()) {
        let x = random_matrix(seed, 7, 4, 6);
        let y = unit_normalize(&x).unwrap();
        for c in y.columns() {
            prop_assert!((c.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
        }
    }
}
