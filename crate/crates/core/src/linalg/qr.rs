use alloc::vec;
use alloc::vec::Vec;

use crate::math::norm2;

/// Upper-triangular factor `R` (`n × n`, column-major) of a Householder QR of
/// the column-major `m × n` matrix `a`, `m ≥ n`. `Q` is not formed.
pub fn householder_r(a: &[f64], m: usize, n: usize) -> Vec<f64> {
    assert!(m >= n && a.len() == m * n);
    let mut w = a.to_vec();
    for k in 0..n {
        let col = &w[k * m + k..(k + 1) * m];
        let norm = norm2(col);
        if norm == 0.0 {
            continue;
        }
        let alpha = if col[0] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col.to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;
        w[k * m + k] = alpha;
        for x in &mut w[k * m + k + 1..(k + 1) * m] {
            *x = 0.0;
        }
        for j in k + 1..n {
            let cj = &mut w[j * m + k..(j + 1) * m];
            let s = beta * cj.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
            for (x, y) in cj.iter_mut().zip(&v) {
                *x -= s * y;
            }
        }
    }
    let mut r = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..=j {
            r[j * n + i] = w[j * m + i];
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_reproduces_gram_matrix() {
        let (m, n) = (7, 3);
        let a: Vec<f64> = (0..m * n)
            .map(|i| ((i * 37 % 11) as f64) - 5.0 + 0.1 * i as f64)
            .collect();
        let r = householder_r(&a, m, n);
        // A^T A == R^T R
        for p in 0..n {
            for q in 0..n {
                let ata: f64 = (0..m).map(|i| a[p * m + i] * a[q * m + i]).sum();
                let rtr: f64 = (0..n).map(|i| r[p * n + i] * r[q * n + i]).sum();
                assert!((ata - rtr).abs() < 1e-10, "{ata} vs {rtr}");
            }
        }
    }
}
