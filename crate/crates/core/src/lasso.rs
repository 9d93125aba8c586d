//! LASSO self-representation shared by exemplar selection, dictionary coding
//! and the full-SSC baseline.
//!
//! The cost minimized for a pixel `x` against dictionary `A` is
//! `‖c‖₁ + (τ/2)‖x − Ac‖²`. Internally the solver works on the equivalent
//! form `½‖x − Ac‖² + λ‖c‖₁` with `λ = 1/τ` using cyclic coordinate descent
//! over a working set, and certifies the result with both the duality gap and
//! the KKT conditions of that form.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{dot, sqrt};
use crate::{Error, Result};

/// Tolerance on `|‖a_i‖ − 1|` for dictionary columns.
pub const UNIT_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoParams {
    /// Data-fidelity weight τ, must exceed 1.
    pub tau: f64,
    /// Stopping tolerance on the duality gap and on the largest KKT violation
    /// of the `λ = 1/τ` form.
    pub tol: f64,
    /// Cap on coordinate-descent sweeps.
    pub max_iter: usize,
}

impl LassoParams {
    pub fn new(tau: f64) -> Self {
        Self {
            tau,
            tol: 1e-6,
            max_iter: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 1.0) || !self.tau.is_finite() {
            return Err(Error::param(alloc::format!(
                "tau must be a finite value above 1 (got {}); for unit-norm data the zero code is optimal otherwise",
                self.tau
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoSolution {
    pub coefficients: Vec<f64>,
    /// `‖c‖₁ + (τ/2)‖x − Ac‖²`.
    pub objective: f64,
    pub iterations: usize,
    /// Duality gap on the same scale as `objective`.
    pub duality_gap: f64,
}

/// Borrowed `dim × atoms` column-major dictionary with unit-norm columns.
///
/// An atom may be excluded from the support, which turns the problem into
/// the "no self-representation" variant used by full SSC.
#[derive(Debug, Clone, Copy)]
pub struct Dictionary<'a> {
    data: &'a [f64],
    dim: usize,
    atoms: usize,
}

impl<'a> Dictionary<'a> {
    pub fn new(data: &'a [f64], dim: usize) -> Result<Self> {
        if dim == 0 || data.is_empty() {
            return Err(Error::param("dictionary must have at least one atom"));
        }
        if data.len() % dim != 0 {
            return Err(Error::dim(
                "dictionary length is not a multiple of the dimension",
            ));
        }
        let dict = Self {
            data,
            dim,
            atoms: data.len() / dim,
        };
        for i in 0..dict.atoms {
            let nrm = crate::math::norm2(dict.atom(i));
            if (nrm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::param(alloc::format!(
                    "dictionary column {i} has norm {nrm}, expected 1"
                )));
            }
        }
        Ok(dict)
    }

    #[inline]
    pub fn atom(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Solves the LASSO problem for `x` against `dict`.
pub fn lasso(dict: &Dictionary<'_>, x: &[f64], params: &LassoParams) -> Result<LassoSolution> {
    lasso_excluding(dict, x, None, params)
}

/// As [`lasso`], with atom `exclude` forced to zero.
pub fn lasso_excluding(
    dict: &Dictionary<'_>,
    x: &[f64],
    exclude: Option<usize>,
    params: &LassoParams,
) -> Result<LassoSolution> {
    params.validate()?;
    if x.len() != dict.dim {
        return Err(Error::dim(alloc::format!(
            "pixel of dimension {} against a dictionary of dimension {}",
            x.len(),
            dict.dim
        )));
    }
    let m = dict.atoms;
    let lambda = 1.0 / params.tau;
    let allowed = |i: usize| exclude != Some(i);
    let sq_norm: Vec<f64> = (0..m).map(|i| dot(dict.atom(i), dict.atom(i))).collect();
    let mut c = vec![0.0; m];
    let mut r = x.to_vec();
    let mut corr = vec![0.0; m];
    let mut active: Vec<usize> = Vec::new();
    let mut sweeps = 0usize;
    // Coordinate sweeps between certificate checks; grows while the exact
    // support refinement is unavailable.
    let mut round = 8usize;
    let mut gap;
    loop {
        // Exact residual and correlations for the certificate.
        r.copy_from_slice(x);
        for &i in &active {
            let ci = c[i];
            for (ri, ai) in r.iter_mut().zip(dict.atom(i)) {
                *ri -= ci * ai;
            }
        }
        let mut corr_max: f64 = 0.0;
        for i in 0..m {
            corr[i] = if allowed(i) {
                dot(dict.atom(i), &r)
            } else {
                0.0
            };
            corr_max = corr_max.max(corr[i].abs());
        }
        let l1: f64 = active.iter().map(|&i| c[i].abs()).sum();
        let rr = dot(&r, &r);
        let primal = 0.5 * rr + lambda * l1;
        let s = if corr_max > lambda {
            lambda / corr_max
        } else {
            1.0
        };
        // dual(θ) = ½‖x‖² − ½‖x − θ‖² with θ = s·r
        let xr = dot(x, &r);
        let dual = s * xr - 0.5 * s * s * rr;
        gap = (primal - dual).max(0.0);
        let mut kkt: f64 = 0.0;
        let mut violators = Vec::new();
        for i in 0..m {
            if !allowed(i) {
                continue;
            }
            if c[i] == 0.0 {
                let v = corr[i].abs() - lambda;
                if v > 0.0 {
                    kkt = kkt.max(v);
                    violators.push(i);
                }
            } else {
                kkt = kkt.max((corr[i] - lambda * c[i].signum()).abs());
            }
        }
        if (gap <= params.tol && kkt <= params.tol) || sweeps >= params.max_iter {
            break;
        }
        for i in violators {
            if let Err(pos) = active.binary_search(&i) {
                active.insert(pos, i);
            }
        }
        // Coordinate descent restricted to the working set.
        let inner_tol = 0.1 * params.tol;
        let round_end = sweeps + round;
        loop {
            sweeps += 1;
            let mut max_delta: f64 = 0.0;
            for &i in &active {
                let a = dict.atom(i);
                let old = c[i];
                let z = dot(a, &r) + sq_norm[i] * old;
                let new = soft_threshold(z, lambda) / sq_norm[i];
                let delta = new - old;
                if delta != 0.0 {
                    for (ri, ai) in r.iter_mut().zip(a) {
                        *ri -= delta * ai;
                    }
                    c[i] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }
            if max_delta <= inner_tol || sweeps >= params.max_iter.min(round_end) {
                break;
            }
        }
        active.retain(|&i| c[i] != 0.0);
        if !refine_on_support(dict, x, lambda, &active, &mut c) {
            round = round.saturating_mul(2);
        }
        active.retain(|&i| c[i] != 0.0);
    }
    let l1: f64 = c.iter().map(|v| v.abs()).sum();
    let objective = l1 + 0.5 * params.tau * dot(&r, &r);
    Ok(LassoSolution {
        coefficients: c,
        objective,
        iterations: sweeps,
        duality_gap: params.tau * gap,
    })
}

/// Moves `c` toward the minimizer of the objective restricted to the sign
/// pattern of the support, stopping where the first coefficient reaches zero.
/// The objective is a convex quadratic on that orthant, so it never increases.
/// Linearly dependent supports are first shrunk along a null direction of the
/// support atoms.
fn refine_on_support(
    dict: &Dictionary<'_>,
    x: &[f64],
    lambda: f64,
    support: &[usize],
    c: &mut [f64],
) -> bool {
    let mut support = support.to_vec();
    loop {
        let k = support.len();
        if k == 0 {
            return false;
        }
        let mut g = alloc::vec![0.0; k * k];
        let mut b = alloc::vec![0.0; k];
        for (p, &i) in support.iter().enumerate() {
            b[p] = dot(dict.atom(i), x) - lambda * c[i].signum();
            for (q, &j) in support.iter().enumerate().take(p + 1) {
                let v = dot(dict.atom(i), dict.atom(j));
                g[p * k + q] = v;
                g[q * k + p] = v;
            }
        }
        match cholesky_solve(&mut g, &mut b, k) {
            Ok(()) => {
                newton_step(&support, &b, c);
                return true;
            }
            Err(j) => {
                if !shrink_dependent(dict, x, lambda, &support, &g, k, j, c) {
                    return false;
                }
                support.retain(|&i| c[i] != 0.0);
            }
        }
    }
}

fn newton_step(support: &[usize], target: &[f64], c: &mut [f64]) {
    let mut t: f64 = 1.0;
    let mut blocking = None;
    for (p, &i) in support.iter().enumerate() {
        if target[p] * c[i] <= 0.0 {
            let at = c[i] / (c[i] - target[p]);
            if at < t {
                t = at;
                blocking = Some(p);
            }
        }
    }
    for (p, &i) in support.iter().enumerate() {
        c[i] = if Some(p) == blocking {
            0.0
        } else {
            c[i] + t * (target[p] - c[i])
        };
    }
}

/// Atom `support[j]` is (numerically) a combination of the atoms before it;
/// `l` holds the partial Cholesky factor up to row `j`. Moves along the
/// resulting null direction until a coefficient vanishes, keeping the move
/// only if the objective does not increase.
#[allow(clippy::too_many_arguments)]
fn shrink_dependent(
    dict: &Dictionary<'_>,
    x: &[f64],
    lambda: f64,
    support: &[usize],
    l: &[f64],
    k: usize,
    j: usize,
    c: &mut [f64],
) -> bool {
    // w solves G[..j, ..j] w = G[..j, j]; row j of `l` already holds L⁻¹ G[..j, j]
    let mut dir = alloc::vec![0.0; j + 1];
    for p in (0..j).rev() {
        let mut v = l[j * k + p];
        for q in p + 1..j {
            v -= l[q * k + p] * dir[q];
        }
        dir[p] = v / l[p * k + p];
    }
    dir[j] = -1.0;
    let slope: f64 = (0..=j).map(|p| c[support[p]].signum() * dir[p]).sum();
    if slope > 0.0 {
        dir.iter_mut().for_each(|v| *v = -*v);
    }
    let step = |dir: &[f64]| {
        (0..=j)
            .filter(|&p| dir[p] * c[support[p]] < 0.0)
            .map(|p| (-c[support[p]] / dir[p], p))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    };
    let (t, blocking) = match step(&dir) {
        Some(s) => s,
        None => {
            dir.iter_mut().for_each(|v| *v = -*v);
            match step(&dir) {
                Some(s) => s,
                None => return false,
            }
        }
    };
    let before = support_objective(dict, x, lambda, support, c);
    let old: Vec<f64> = support.iter().map(|&i| c[i]).collect();
    for p in 0..=j {
        let i = support[p];
        c[i] = if p == blocking {
            0.0
        } else {
            c[i] + t * dir[p]
        };
    }
    if support_objective(dict, x, lambda, support, c) > before {
        for (&i, &v) in support.iter().zip(&old) {
            c[i] = v;
        }
        return false;
    }
    true
}

fn support_objective(
    dict: &Dictionary<'_>,
    x: &[f64],
    lambda: f64,
    support: &[usize],
    c: &[f64],
) -> f64 {
    let mut r = x.to_vec();
    let mut l1 = 0.0;
    for &i in support {
        l1 += c[i].abs();
        for (ri, ai) in r.iter_mut().zip(dict.atom(i)) {
            *ri -= c[i] * ai;
        }
    }
    0.5 * dot(&r, &r) + lambda * l1
}

/// Solves `g y = b` in place for symmetric positive definite `g`. When `g` is
/// numerically singular, returns the index of the first dependent column and
/// leaves the factor of the leading block in the lower triangle.
fn cholesky_solve(g: &mut [f64], b: &mut [f64], k: usize) -> core::result::Result<(), usize> {
    let scale = (0..k).map(|i| g[i * k + i]).fold(0.0, f64::max);
    for j in 0..k {
        for p in 0..j {
            let mut v = g[j * k + p];
            for q in 0..p {
                v -= g[j * k + q] * g[p * k + q];
            }
            g[j * k + p] = v / g[p * k + p];
        }
        let mut d = g[j * k + j];
        for p in 0..j {
            d -= g[j * k + p] * g[j * k + p];
        }
        if d <= 1e-10 * scale {
            return Err(j);
        }
        g[j * k + j] = sqrt(d);
    }
    for i in 0..k {
        let mut v = b[i];
        for p in 0..i {
            v -= g[i * k + p] * b[p];
        }
        b[i] = v / g[i * k + i];
    }
    for i in (0..k).rev() {
        let mut v = b[i];
        for p in i + 1..k {
            v -= g[p * k + i] * b[p];
        }
        b[i] = v / g[i * k + i];
    }
    Ok(())
}

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Self-representation cost of `x` against the columns of `dict`: the
/// optimal LASSO objective.
pub fn self_rep_cost(x: &[f64], dict: &Dictionary<'_>, params: &LassoParams) -> Result<f64> {
    Ok(lasso(dict, x, params)?.objective)
}

/// `‖c‖₁ + (τ/2)‖x − Ac‖²` evaluated from scratch.
pub fn objective(dict: &Dictionary<'_>, x: &[f64], c: &[f64], tau: f64) -> f64 {
    let r = residual(dict, x, c);
    c.iter().map(|v| v.abs()).sum::<f64>() + 0.5 * tau * dot(&r, &r)
}

/// `x − Ac`.
pub fn residual(dict: &Dictionary<'_>, x: &[f64], c: &[f64]) -> Vec<f64> {
    let mut r = x.to_vec();
    for (i, &ci) in c.iter().enumerate() {
        if ci != 0.0 {
            for (ri, ai) in r.iter_mut().zip(dict.atom(i)) {
                *ri -= ci * ai;
            }
        }
    }
    r
}

/// Largest violation of the optimality conditions of `½‖x − Ac‖² + (1/τ)‖c‖₁`.
pub fn kkt_violation(dict: &Dictionary<'_>, x: &[f64], c: &[f64], tau: f64) -> f64 {
    let lambda = 1.0 / tau;
    let r = residual(dict, x, c);
    (0..dict.atoms)
        .map(|i| {
            let g = dot(dict.atom(i), &r);
            if c[i] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g - lambda * c[i].signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}
