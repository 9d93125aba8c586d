use alloc::vec;
use alloc::vec::Vec;

use crate::math::{dot, sqrt};

/// Singular values (descending) and right singular vectors of a matrix.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// `n × n` column-major; column `i` pairs with `singular_values[i]`.
    pub v: Vec<f64>,
    pub n: usize,
}

/// One-sided (Hestenes) Jacobi SVD of the column-major `m × n` matrix `a`.
///
/// Columns are rotated pairwise until mutually orthogonal; the column norms
/// are then the singular values and the accumulated rotations form `V`.
pub fn jacobi_svd(a: &[f64], m: usize, n: usize) -> Svd {
    assert_eq!(a.len(), m * n);
    let mut w = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let eps = f64::EPSILON;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let cp = &w[p * m..(p + 1) * m];
                    let cq = &w[q * m..(q + 1) * m];
                    (dot(cp, cp), dot(cq, cq), dot(cp, cq))
                };
                if gamma == 0.0 || gamma.abs() <= eps * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut w, m, p, q, c, s);
                rotate(&mut v, n, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| sqrt(dot(&w[j * m..(j + 1) * m], &w[j * m..(j + 1) * m])))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let mut sorted_v = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        sorted_v[dst * n..(dst + 1) * n].copy_from_slice(&v[src * n..(src + 1) * n]);
    }
    Svd {
        singular_values: order.iter().map(|&i| norms[i]).collect(),
        v: sorted_v,
        n,
    }
}

fn rotate(w: &mut [f64], m: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = w.split_at_mut(q * m);
    let cp = &mut head[p * m..(p + 1) * m];
    let cq = &mut tail[..m];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}
