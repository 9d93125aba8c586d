//! Scaling benchmark: SC-SSC per-stage wall time against full SSC on
//! synthetic scenes of growing size.

use std::fmt::Write as _;
use std::time::Instant;

use scssc_core::cube::vectorize;
use scssc_core::metrics::evaluate;
use scssc_core::pipeline::{sc_ssc, PipelineParams};
use scssc_core::preprocess::{pca_fit, reduced_dim, unit_normalize};
use scssc_core::ssc::{ssc_small_oracle, SscParams, SSC_SIZE_CAP};

use crate::exec::{RayonExecutor, StdClock};
use crate::synth::{generate, SynthSpec};
use crate::Result;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Pixel counts; each scene is the nearest square image.
    pub sizes: Vec<usize>,
    /// ρ values run at every size.
    pub rhos: Vec<f64>,
    pub params: PipelineParams,
    /// Target pixels per superpixel; `E = N / pixels_per_segment`.
    pub pixels_per_segment: usize,
    pub subspaces: usize,
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub noise: f64,
    pub seed: u64,
    /// Run full SSC when `N` does not exceed this.
    pub ssc_cap: usize,
}

impl BenchConfig {
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut params = PipelineParams::new(0.3, 100, 5, 4);
        params.tau = 10.0;
        Self {
            sizes,
            rhos: vec![0.3],
            params,
            pixels_per_segment: 49,
            subspaces: 4,
            ambient_dim: 30,
            subspace_dim: 3,
            noise: 0.01,
            seed: 7,
            ssc_cap: SSC_SIZE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub method: String,
    pub rho: Option<f64>,
    pub stage: String,
    pub seconds: f64,
    pub oa: f64,
}

pub fn run_bench(cfg: &BenchConfig, exec: &RayonExecutor) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &size in &cfg.sizes {
        let side = (size as f64).sqrt().round().max(2.0) as usize;
        let mut spec = SynthSpec::new(cfg.subspaces, cfg.ambient_dim, cfg.subspace_dim, side, side);
        spec.noise = cfg.noise;
        spec.seed = cfg.seed;
        let scene = generate(&spec)?;
        let n = side * side;
        for &rho in &cfg.rhos {
            let mut p = cfg.params.clone();
            p.rho = rho;
            p.clusters = cfg.subspaces;
            p.segments = (n / cfg.pixels_per_segment.max(1)).max(2);
            p.kernel_size = p.kernel_size.min(side);
            let clock = StdClock::default();
            let res = sc_ssc(&scene.cube, &p, exec, &clock)?;
            let oa = evaluate(&res.labels, &scene.truth)?.oa;
            let method = String::from("sc-ssc");
            for t in &res.timings {
                rows.push(BenchRow {
                    n,
                    method: method.clone(),
                    rho: Some(rho),
                    stage: t.stage.name().into(),
                    seconds: t.seconds,
                    oa,
                });
            }
            for (i, s) in res.phase_seconds().iter().enumerate() {
                rows.push(BenchRow {
                    n,
                    method: method.clone(),
                    rho: Some(rho),
                    stage: format!("phase{}", i + 1),
                    seconds: *s,
                    oa,
                });
            }
            rows.push(BenchRow {
                n,
                method,
                rho: Some(rho),
                stage: "total".into(),
                seconds: res.total_seconds(),
                oa,
            });
        }
        if n <= cfg.ssc_cap {
            let t0 = Instant::now();
            let raw = vectorize(&scene.cube);
            let d = reduced_dim(raw.dim(), cfg.params.pca_fraction);
            let x = unit_normalize(&pca_fit(&raw, d)?.project(&raw, d)?)?;
            let mut sp = SscParams::new(cfg.params.tau, cfg.subspaces);
            sp.seed = cfg.params.seed;
            sp.restarts = cfg.params.restarts;
            sp.cap = cfg.ssc_cap;
            sp.lasso.tol = cfg.params.lasso_tol;
            let out = ssc_small_oracle(&x, &sp, exec)?;
            let seconds = t0.elapsed().as_secs_f64();
            let oa = evaluate(&out.labels, &scene.truth)?.oa;
            rows.push(BenchRow {
                n,
                method: "ssc".into(),
                rho: None,
                stage: "total".into(),
                seconds,
                oa,
            });
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("N,method,rho,stage,seconds,OA\n");
    for r in rows {
        let rho = r.rho.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            s,
            "{},{},{},{},{:.6},{:.4}",
            r.n, r.method, rho, r.stage, r.seconds, r.oa
        )
        .unwrap();
    }
    s
}

/// Total seconds of `method` at size `n` (and `rho`, when given).
pub fn total_seconds(rows: &[BenchRow], method: &str, n: usize, rho: Option<f64>) -> Option<f64> {
    rows.iter()
        .find(|r| {
            r.method == method && r.n == n && r.stage == "total" && (rho.is_none() || r.rho == rho)
        })
        .map(|r| r.seconds)
}
