//! Symmetric eigendecomposition by Householder tridiagonalization, Sturm
//! bisection and inverse iteration.
//!
//! Only the requested eigenpairs are computed after the `O(n³)` reduction,
//! so the top-`k` vectors of a large Gram matrix cost `O(n² k)` extra.

use alloc::vec;
use alloc::vec::Vec;

use crate::exec::Executor;
use crate::math::{dot, sqrt};

/// Symmetric tridiagonal matrix together with the Householder reflectors that
/// reduced a dense symmetric matrix to it: `A = Q T Qᵀ`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    /// Reflector `k` acts on indices `k + 1..n` and is stored as `(beta, v)`.
    reflectors: Vec<(f64, Vec<f64>)>,
}

/// Eigenvalues (descending) and the matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column-major `n × values.len()`.
    pub vectors: Vec<f64>,
    pub n: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    /// Largest `k` eigenpairs of the row-major symmetric `n × n` matrix `a`.
    pub fn top_k<E: Executor>(a: Vec<f64>, n: usize, k: usize, exec: &E) -> Self {
        let tri = Tridiagonal::reduce(a, n, exec);
        tri.top_k(k)
    }

    /// All eigenpairs, eigenvalues descending.
    pub fn full<E: Executor>(a: Vec<f64>, n: usize, exec: &E) -> Self {
        Self::top_k(a, n, n, exec)
    }
}

impl Tridiagonal {
    /// Reduces the row-major symmetric `n × n` matrix `a` (both triangles stored).
    pub fn reduce<E: Executor>(mut a: Vec<f64>, n: usize, exec: &E) -> Self {
        assert_eq!(a.len(), n * n);
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        for k in 0..n.saturating_sub(2) {
            let x: Vec<f64> = a[k * n + k + 1..(k + 1) * n].to_vec();
            let norm = sqrt(dot(&x, &x));
            let alpha = if x[0] > 0.0 { -norm } else { norm };
            let mut v = x;
            v[0] -= alpha;
            let vv = dot(&v, &v);
            diag[k] = a[k * n + k];
            if norm == 0.0 || vv == 0.0 {
                off[k] = a[k * n + k + 1];
                reflectors.push((0.0, v));
                continue;
            }
            let beta = 2.0 / vv;
            off[k] = alpha;
            let m = n - k - 1;
            let base = k + 1;
            // p = beta * S v, computed row by row.
            let p: Vec<f64> = {
                let a_ref = &a;
                let v_ref = &v;
                exec.map(m, |i| {
                    beta * dot(&a_ref[(base + i) * n + base..(base + i + 1) * n], v_ref)
                })
            };
            let kk = 0.5 * beta * dot(&p, &v);
            let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
            // S -= v wᵀ + w vᵀ on rows base..n; earlier rows are final.
            let tail = &mut a[base * n..];
            let (v_ref, w_ref) = (&v, &w);
            exec.for_each_chunk_mut(tail, n, |i, row| {
                let (vi, wi) = (v_ref[i], w_ref[i]);
                for (j, x) in row[base..].iter_mut().enumerate() {
                    *x -= vi * w_ref[j] + wi * v_ref[j];
                }
            });
            reflectors.push((beta, v));
        }
        if n >= 2 {
            diag[n - 2] = a[(n - 2) * n + n - 2];
            off[n - 2] = a[(n - 2) * n + n - 1];
        }
        if n >= 1 {
            diag[n - 1] = a[n * n - 1];
        }
        Self {
            diag,
            off,
            reflectors,
        }
    }

    /// Builds a tridiagonal matrix directly (no reflectors, `Q = I`).
    pub fn from_parts(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self {
            diag,
            off,
            reflectors: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Largest `k` eigenpairs of the original matrix.
    pub fn top_k(&self, k: usize) -> SymmetricEigen {
        let n = self.n();
        let k = k.min(n);
        let tnorm = self
            .diag
            .iter()
            .enumerate()
            .map(|(i, d)| {
                d.abs()
                    + if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                    + if i + 1 < n { self.off[i].abs() } else { 0.0 }
            })
            .fold(0.0, f64::max);
        // Split into unreduced blocks.
        let eps = f64::EPSILON;
        let mut off = self.off.clone();
        for (i, e) in off.iter_mut().enumerate() {
            if e.abs() <= eps * (self.diag[i].abs() + self.diag[i + 1].abs())
                || e.abs() <= eps * tnorm * 1e-3
            {
                *e = 0.0;
            }
        }
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 0..n {
            if i + 1 == n || off[i] == 0.0 {
                blocks.push((start, i + 1));
                start = i + 1;
            }
        }
        // Candidate eigenvalues: the top k of every block.
        let mut cands: Vec<(f64, usize, usize)> = Vec::new();
        for (b, &(s, e)) in blocks.iter().enumerate() {
            let d = &self.diag[s..e];
            let o = &off[s..e - 1];
            let m = e - s;
            for idx in 0..k.min(m) {
                cands.push((bisect_eigenvalue(d, o, m - 1 - idx), b, idx));
            }
        }
        cands.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        cands.truncate(k);

        let mut values = Vec::with_capacity(k);
        let mut vectors = vec![0.0; n * k];
        // Process per block so clustered eigenvalues can be reorthogonalized.
        for (b, &(s, e)) in blocks.iter().enumerate() {
            let mut mine: Vec<(usize, f64)> = cands
                .iter()
                .enumerate()
                .filter(|(_, c)| c.1 == b)
                .map(|(slot, c)| (slot, c.0))
                .collect();
            if mine.is_empty() {
                continue;
            }
            mine.sort_by(|x, y| y.1.total_cmp(&x.1));
            let d = &self.diag[s..e];
            let o = &off[s..e - 1];
            let zs = inverse_iteration(d, o, &mine.iter().map(|m| m.1).collect::<Vec<_>>(), tnorm);
            for ((slot, _), z) in mine.iter().zip(zs) {
                vectors[slot * n + s..slot * n + e].copy_from_slice(&z);
            }
        }
        for c in &cands {
            values.push(c.0);
        }
        for col in vectors.chunks_exact_mut(n.max(1)).take(k) {
            self.apply_q(col);
        }
        SymmetricEigen { values, vectors, n }
    }

    /// Number of eigenvalues strictly greater than `x`.
    pub fn count_above(&self, x: f64) -> usize {
        let n = self.n();
        if n == 0 {
            return 0;
        }
        let emax2 = self.off.iter().map(|e| e * e).fold(1.0, f64::max);
        n - sturm_count(&self.diag, &self.off, x, f64::MIN_POSITIVE * emax2)
    }

    /// All eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .rev()
            .map(|i| bisect_eigenvalue(&self.diag, &self.off, i))
            .collect()
    }

    /// `z <- Q z`.
    fn apply_q(&self, z: &mut [f64]) {
        for (k, (beta, v)) in self.reflectors.iter().enumerate().rev() {
            if *beta == 0.0 {
                continue;
            }
            let seg = &mut z[k + 1..];
            let s = beta * dot(seg, v);
            for (x, vi) in seg.iter_mut().zip(v) {
                *x -= s * vi;
            }
        }
    }
}

/// Number of eigenvalues of the tridiagonal `(d, e)` strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `idx`-th smallest eigenvalue (0-based) of the tridiagonal `(d, e)`.
fn bisect_eigenvalue(d: &[f64], e: &[f64], idx: usize) -> f64 {
    let n = d.len();
    if n == 1 {
        return d[0];
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut emax2: f64 = 0.0;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
        if i + 1 < n {
            emax2 = emax2.max(e[i] * e[i]);
        }
    }
    let pivmin = f64::MIN_POSITIVE * emax2.max(1.0);
    let span = (hi - lo).max(hi.abs().max(lo.abs()) * f64::EPSILON);
    lo -= 2.0 * f64::EPSILON * span + pivmin;
    hi += 2.0 * f64::EPSILON * span + pivmin;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin;
        if hi - lo <= tol {
            break;
        }
        if sturm_count(d, e, mid, pivmin) > idx {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvectors of an unreduced tridiagonal block for the given eigenvalues
/// (sorted descending). Vectors of clustered eigenvalues are kept orthogonal.
fn inverse_iteration(d: &[f64], e: &[f64], lambdas: &[f64], tnorm: f64) -> Vec<Vec<f64>> {
    let m = d.len();
    if m == 1 {
        return lambdas.iter().map(|_| vec![1.0]).collect();
    }
    let eps = f64::EPSILON;
    let scale = tnorm.max(f64::MIN_POSITIVE);
    let cluster_gap = 1e-3 * scale;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(lambdas.len());
    let mut cluster_start = 0;
    let mut prev_shift = f64::NAN;
    for (j, &lam) in lambdas.iter().enumerate() {
        if j > 0 && (lambdas[j - 1] - lam) > cluster_gap {
            cluster_start = j;
        }
        // Separate coincident shifts so the factorizations differ.
        let mut shift = lam;
        if j > 0 && (prev_shift - shift).abs() < 10.0 * eps * scale {
            shift = prev_shift - 10.0 * eps * scale;
        }
        prev_shift = shift;
        let lu = TriLu::factor(d, e, shift, eps * scale);
        let mut z = start_vector(m, j);
        normalize(&mut z);
        let mut converged = 0;
        for _ in 0..10 {
            lu.solve(&mut z);
            for prev in &out[cluster_start..] {
                let s = dot(&z, prev);
                for (zi, pi) in z.iter_mut().zip(prev) {
                    *zi -= s * pi;
                }
            }
            let growth = normalize(&mut z);
            if growth * eps * scale * (m as f64) >= 1.0 {
                converged += 1;
                if converged >= 2 {
                    break;
                }
            }
        }
        // Deterministic sign: first nonzero entry positive.
        if let Some(first) = z.iter().find(|v| v.abs() > eps) {
            if *first < 0.0 {
                z.iter_mut().for_each(|v| *v = -*v);
            }
        }
        out.push(z);
    }
    out
}

fn normalize(z: &mut [f64]) -> f64 {
    let nrm = sqrt(dot(z, z));
    if nrm > 0.0 {
        z.iter_mut().for_each(|v| *v /= nrm);
    }
    nrm
}

fn start_vector(m: usize, salt: usize) -> Vec<f64> {
    // Fixed pseudo-random start; any vector with components along the
    // target eigenvector works.
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (salt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..m)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

/// LU factorization with partial pivoting of `T - shift·I`.
struct TriLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl TriLu {
    fn factor(d: &[f64], e: &[f64], shift: f64, tiny: f64) -> Self {
        let m = d.len();
        let mut dd: Vec<f64> = d.iter().map(|x| x - shift).collect();
        let mut du = e.to_vec();
        let mut dl = e.to_vec();
        let mut du2 = vec![0.0; m.saturating_sub(2)];
        let mut swapped = vec![false; m - 1];
        let tiny = tiny.max(f64::MIN_POSITIVE);
        for i in 0..m - 1 {
            if dd[i].abs() >= dl[i].abs() {
                if dd[i] == 0.0 {
                    dd[i] = tiny;
                }
                let fact = dl[i] / dd[i];
                dl[i] = fact;
                dd[i + 1] -= fact * du[i];
            } else {
                let fact = dd[i] / dl[i];
                dd[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = temp - fact * dd[i + 1];
                if i + 2 < m {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if dd[m - 1].abs() < tiny {
            dd[m - 1] = if dd[m - 1] < 0.0 { -tiny } else { tiny };
        }
        for x in dd.iter_mut() {
            if *x == 0.0 {
                *x = tiny;
            }
        }
        Self {
            d: dd,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let m = self.d.len();
        for i in 0..m - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[m - 1] /= self.d[m - 1];
        b[m - 2] = (b[m - 2] - self.du[m - 2] * b[m - 1]) / self.d[m - 2];
        for i in (0..m.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
