mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use scssc_core::coding::{CoefficientMatrix, CoefficientStage};
use scssc_core::embedding::{degrees, normalize_abs_columns, smooth_coefficients, spectral_embed};
use scssc_core::sparse::CscMatrix;
use scssc_core::{Error, Geometry, Sequential};

fn coeffs(rows: usize, cols: usize, dense: &[f64]) -> CoefficientMatrix {
    CoefficientMatrix {
        matrix: CscMatrix::from_dense(rows, cols, dense, 0.0),
        stage: CoefficientStage::Raw,
    }
}

/// Random sparse signed `m × n` matrix with every column nonzero, normalized.
fn random_normalized(g: &mut impl Rng, m: usize, n: usize, density: f64) -> CoefficientMatrix {
    let mut d = vec![0.0; m * n];
    for j in 0..n {
        d[j * m + g.random_range(0..m)] = gaussian(g);
        for i in 0..m {
            if g.random::<f64>() < density {
                d[j * m + i] = gaussian(g);
            }
        }
    }
    normalize_abs_columns(&coeffs(m, n, &d)).0
}

fn dense_of(c: &CoefficientMatrix) -> DMatrix<f64> {
    let m = &c.matrix;
    DMatrix::from_column_slice(m.rows(), m.cols(), &m.to_dense())
}

#[test]
fn degrees_match_materialized_affinity() {
    let mut g = rng(1);
    for _ in 0..20 {
        let n = g.random_range(5..500);
        let m = g.random_range(2..n.min(60));
        let c = random_normalized(&mut g, m, n, 0.1);
        let a = dense_of(&c).transpose() * dense_of(&c);
        let d = degrees(&c);
        for i in 0..n {
            assert!((d.degrees[i] - a.row(i).sum()).abs() < 1e-10);
        }
    }
}

#[test]
fn degree_hand_cases() {
    let eye = coeffs(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    assert_eq!(degrees(&eye).degrees, vec![1.0; 3]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let twin = coeffs(2, 2, &[s, s, s, s]);
    for d in degrees(&twin).degrees {
        assert!((d - 2.0).abs() < 1e-15);
    }
}

#[test]
fn singular_values_match_dense_eigendecomposition() {
    let mut g = rng(2);
    for _ in 0..20 {
        let n = g.random_range(10..300);
        let m = g.random_range(4..n.min(40));
        let c = random_normalized(&mut g, m, n, 0.2);
        let d = degrees(&c);
        let k = g.random_range(1..=m.min(6));
        let emb = spectral_embed(&c, &d, k, &Sequential).unwrap();
        let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.inv_sqrt()));
        let b = dense_of(&c) * &scale;
        let eig = (b.transpose() * &b).symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for i in 0..k {
            let lambda = eig.eigenvalues[order[i]];
            assert!(
                (emb.singular_values[i].powi(2) - lambda).abs() < 1e-8,
                "{i}: {lambda}"
            );
            let gap_below = lambda - eig.eigenvalues[order[i + 1]];
            let gap_above = if i == 0 {
                f64::INFINITY
            } else {
                eig.eigenvalues[order[i - 1]] - lambda
            };
            if gap_below.min(gap_above) > 1e-4 {
                let v = eig.eigenvectors.column(order[i]);
                let dot: f64 = (0..n).map(|j| v[j] * emb.point(j)[i]).sum();
                assert!((dot.abs() - 1.0).abs() < 1e-6, "vector {i}: {dot}");
            }
        }
    }
}

#[test]
fn right_vectors_are_orthonormal() {
    let mut g = rng(3);
    let c = random_normalized(&mut g, 30, 200, 0.15);
    let emb = spectral_embed(&c, &degrees(&c), 5, &Sequential).unwrap();
    let p = DMatrix::from_row_slice(200, 5, &emb.points);
    let gram = p.transpose() * &p;
    assert!((gram - DMatrix::identity(5, 5)).amax() < 1e-8);
}

#[test]
fn signs_make_largest_entry_positive() {
    let mut g = rng(4);
    let c = random_normalized(&mut g, 12, 80, 0.3);
    let emb = spectral_embed(&c, &degrees(&c), 4, &Sequential).unwrap();
    for i in 0..4 {
        let col: Vec<f64> = (0..80).map(|j| emb.point(j)[i]).collect();
        let big = col
            .iter()
            .copied()
            .fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        assert!(big > 0.0);
    }
}

#[test]
fn disjoint_blocks_embed_as_constants() {
    // rows {0,1} serve columns 0..5, rows {2,3} serve columns 5..10
    let mut d = vec![0.0; 4 * 10];
    let mut g = rng(5);
    for j in 0..10 {
        let base = if j < 5 { 0 } else { 2 };
        d[j * 4 + base] = 0.5 + g.random::<f64>();
        d[j * 4 + base + 1] = 0.5 + g.random::<f64>();
    }
    let c = normalize_abs_columns(&coeffs(4, 10, &d)).0;
    let mut emb = spectral_embed(&c, &degrees(&c), 2, &Sequential).unwrap();
    assert!((emb.singular_values[1] - 1.0).abs() < 1e-12);
    // within a block rows are D^{1/2}-scaled copies of one direction
    emb.normalize_rows();
    let dist = |a: usize, b: usize| -> f64 {
        emb.point(a)
            .iter()
            .zip(emb.point(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let scale = dist(0, 5);
    assert!(scale > 1e-3);
    for j in 1..5 {
        assert!(dist(0, j) < 1e-2 * scale && dist(5, 5 + j) < 1e-2 * scale);
    }
}

#[test]
fn rank_one_closed_form() {
    // every column parallel to u: C̃ = u wᵀ with ‖column‖ = 1
    let u = unit(vec![1.0, 2.0, 2.0]);
    let n = 7;
    let d: Vec<f64> = (0..n).flat_map(|_| u.clone()).collect();
    let c = coeffs(3, n, &d);
    let deg = degrees(&c);
    for &v in &deg.degrees {
        assert!((v - n as f64).abs() < 1e-12);
    }
    let emb = spectral_embed(&c, &deg, 1, &Sequential).unwrap();
    // B = u (D^{-1/2} 1)ᵀ, so σ = ‖D^{-1/2} 1‖ = 1 and p = D^{-1/2}·1 / σ
    assert!((emb.singular_values[0] - 1.0).abs() < 1e-12);
    for j in 0..n {
        assert!((emb.point(j)[0] - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
    }
    assert_eq!(
        spectral_embed(&c, &deg, 2, &Sequential).unwrap_err(),
        Error::RankDeficient {
            requested: 2,
            rank: 1
        }
    );
}

#[test]
fn smoothing_hand_cases() {
    let geom = Geometry::new(3, 3).unwrap();
    let mut impulse = vec![0.0; 9];
    impulse[4] = 1.0;
    let c = coeffs(1, 9, &impulse);
    let s = smooth_coefficients(&c, geom, 3, &Sequential).unwrap();
    for j in 0..9 {
        assert!((s.matrix.get(0, j) - 1.0 / 9.0).abs() < 1e-15);
    }
    assert_eq!(
        smooth_coefficients(&c, geom, 1, &Sequential)
            .unwrap()
            .matrix,
        c.matrix
    );
    assert!(smooth_coefficients(&c, geom, 4, &Sequential).is_err());
    assert!(smooth_coefficients(&c, geom, 0, &Sequential).is_err());
}

#[test]
fn smoothing_preserves_interior_constant() {
    let geom = Geometry::new(12, 10).unwrap();
    for k in 1..=4 {
        let c = coeffs(1, 120, &vec![0.7; 120]);
        let s = smooth_coefficients(&c, geom, k, &Sequential).unwrap();
        for r in k..12 - k {
            for col in k..10 - k {
                assert!((s.matrix.get(0, geom.index(r, col)) - 0.7).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn smoothing_matches_direct_window_sum() {
    let mut g = rng(6);
    let geom = Geometry::new(9, 7).unwrap();
    let m = 3;
    let dense: Vec<f64> = (0..m * 63)
        .map(|_| {
            if g.random::<f64>() < 0.3 {
                gaussian(&mut g)
            } else {
                0.0
            }
        })
        .collect();
    let c = coeffs(m, 63, &dense);
    for k in 1..=7 {
        let s = smooth_coefficients(&c, geom, k, &Sequential).unwrap();
        let a = (k - 1) / 2;
        for row in 0..m {
            for r in 0..9 {
                for col in 0..7 {
                    let mut sum = 0.0;
                    for dr in 0..k {
                        for dc in 0..k {
                            let (rr, cc) = (
                                r as isize + dr as isize - a as isize,
                                col as isize + dc as isize - a as isize,
                            );
                            if (0..9).contains(&rr) && (0..7).contains(&cc) {
                                sum += dense[geom.index(rr as usize, cc as usize) * m + row];
                            }
                        }
                    }
                    let got = s.matrix.get(row, geom.index(r, col));
                    assert!((got - sum / (k * k) as f64).abs() < 1e-12, "k={k}");
                }
            }
        }
    }
}

#[test]
fn normalization_cases() {
    let c = normalize_abs_columns(&coeffs(2, 2, &[-3.0, 4.0, 0.0, 0.0]));
    assert_eq!(c.0.matrix.get(0, 0), 0.6);
    assert_eq!(c.0.matrix.get(1, 0), 0.8);
    assert_eq!(c.1, vec![1]);
    assert_eq!(c.0.stage, CoefficientStage::Normalized);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_columns_are_unit_and_nonnegative(seed in any::<u64>(), m in 1usize..10, n in 1usize..40) {
        let mut g = rng(seed);
        let dense: Vec<f64> = (0..m * n).map(|_| if g.random::<f64>() < 0.4 { gaussian(&mut g) } else { 0.0 }).collect();
        let (c, zero) = normalize_abs_columns(&coeffs(m, n, &dense));
        for j in 0..n {
            let (_, v) = c.matrix.column(j);
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(v.iter().all(|&x| x >= 0.0));
            if zero.contains(&j) { prop_assert!(v.iter().all(|&x| x == 0.0)); } else { prop_assert!((norm - 1.0).abs() < 1e-12); }
        }
    }

    #[test]
    fn interior_row_sum_is_preserved(seed in any::<u64>(), k in 1usize..5) {
        let geom = Geometry::new(20, 20).unwrap();
        let mut g = rng(seed);
        let mut dense = vec![0.0; 400];
        for r in k..20 - k {
            for c in k..20 - k {
                if g.random::<f64>() < 0.2 { dense[geom.index(r, c)] = g.random::<f64>(); }
            }
        }
        let s = smooth_coefficients(&coeffs(1, 400, &dense), geom, k, &Sequential).unwrap();
        let before: f64 = dense.iter().sum();
        let after: f64 = s.matrix.values().iter().sum();
        prop_assert!((before - after).abs() < 1e-8);
    }
}
