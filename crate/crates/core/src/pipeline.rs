//! End-to-end SC-SSC: PCA → SLIC → exemplar selection → coding → smoothing →
//! implicit-degree spectral embedding → k-means.

use alloc::string::String;
use alloc::vec::Vec;

use crate::coding::{code_against_dictionary, CodingParams, CoefficientMatrix};
use crate::cube::{vectorize, SpectralCube};
use crate::embedding::{degrees, normalize_abs_columns, smooth_coefficients, spectral_embed};
use crate::kmeans::{kmeans, KMeansParams};
use crate::lasso::LassoParams;
use crate::preprocess::{false_color, pca_fit, reduced_dim, unit_normalize};
use crate::selection::{build_dictionary, ExemplarDictionary};
use crate::superpixels::{slic, SegmentationMap, SlicParams};
use crate::{Error, Executor, Result};

pub use crate::exec::{Executor as ExecutorTrait, Sequential};

/// Which optional stages run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Toggles {
    pub use_pca: bool,
    pub use_superpixels: bool,
    pub use_smoothing: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Self {
            use_pca: true,
            use_superpixels: true,
            use_smoothing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    /// LASSO fidelity weight τ > 1.
    pub tau: f64,
    /// Fraction of each superpixel kept as exemplars, in (0, 1).
    pub rho: f64,
    /// Requested number of superpixels.
    pub segments: usize,
    /// Side of the box kernel used to smooth coefficient rows.
    pub kernel_size: usize,
    /// Number of output clusters.
    pub clusters: usize,
    /// Kept spectral dimension as a fraction of the band count.
    pub pca_fraction: f64,
    pub seed: u64,
    pub restarts: usize,
    pub compactness: f64,
    pub lasso_tol: f64,
    pub exclude_self: bool,
    pub normalize_embedding_rows: bool,
    pub toggles: Toggles,
}

impl PipelineParams {
    pub fn new(rho: f64, segments: usize, kernel_size: usize, clusters: usize) -> Self {
        Self {
            tau: 10.0,
            rho,
            segments,
            kernel_size,
            clusters,
            pca_fraction: 0.25,
            seed: 0,
            restarts: 10,
            compactness: 10.0,
            lasso_tol: 1e-6,
            exclude_self: false,
            normalize_embedding_rows: false,
            toggles: Toggles::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lasso = self.lasso();
        lasso.validate()?;
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::param(alloc::format!(
                "rho must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if self.toggles.use_superpixels && self.segments < 2 {
            return Err(Error::param("segments must exceed 1"));
        }
        if self.kernel_size == 0 {
            return Err(Error::param("kernel size must be at least 1"));
        }
        if self.clusters == 0 {
            return Err(Error::param("at least one cluster is required"));
        }
        if !(self.pca_fraction > 0.0 && self.pca_fraction <= 1.0) {
            return Err(Error::param("pca_fraction must lie in (0, 1]"));
        }
        if !(self.compactness > 0.0) {
            return Err(Error::param("compactness must be positive"));
        }
        Ok(())
    }

    pub fn lasso(&self) -> LassoParams {
        LassoParams {
            tau: self.tau,
            tol: self.lasso_tol,
            max_iter: 10_000,
        }
    }

    /// Kernel size actually used, honoring the smoothing toggle.
    pub fn effective_kernel(&self) -> usize {
        if self.toggles.use_smoothing {
            self.kernel_size
        } else {
            1
        }
    }
}

/// Monotonic clock in seconds; [`NoClock`] reports zero everywhere.
pub trait Clock {
    fn now(&self) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Pca,
    Superpixels,
    Selection,
    Coding,
    Smoothing,
    Embedding,
    Clustering,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Pca,
        Stage::Superpixels,
        Stage::Selection,
        Stage::Coding,
        Stage::Smoothing,
        Stage::Embedding,
        Stage::Clustering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Pca => "pca",
            Stage::Superpixels => "superpixels",
            Stage::Selection => "selection",
            Stage::Coding => "coding",
            Stage::Smoothing => "smoothing",
            Stage::Embedding => "embedding",
            Stage::Clustering => "clustering",
        }
    }

    /// Position in the coarse four-phase breakdown: spatial similarity
    /// extraction, exemplar selection, coding, spectral clustering.
    pub fn phase(self) -> usize {
        match self {
            Stage::Pca | Stage::Superpixels => 1,
            Stage::Selection => 2,
            Stage::Coding => 3,
            Stage::Smoothing | Stage::Embedding | Stage::Clustering => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
    pub skipped: bool,
}

/// Labels and bookkeeping of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Cluster of every pixel in `1..=k`, linear pixel order.
    pub labels: Vec<u32>,
    pub timings: Vec<StageTiming>,
    pub params: PipelineParams,
    pub feature_dim: usize,
    pub segments: usize,
    pub exemplars: usize,
    /// Pixels whose smoothed code vanished; they embed at the origin.
    pub zero_columns: usize,
    pub singular_values: Vec<f64>,
}

impl ClusterResult {
    pub fn seconds(&self, stage: Stage) -> f64 {
        self.timings
            .iter()
            .filter(|t| t.stage == stage)
            .map(|t| t.seconds)
            .sum()
    }

    /// Wall time per phase `1..=4`.
    pub fn phase_seconds(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for t in &self.timings {
            out[t.stage.phase() - 1] += t.seconds;
        }
        out
    }

    pub fn total_seconds(&self) -> f64 {
        self.timings.iter().map(|t| t.seconds).sum()
    }
}

/// Intermediate products kept for inspection and dumps.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub result: ClusterResult,
    pub segmentation: SegmentationMap,
    pub dictionary: ExemplarDictionary,
    pub coefficients: CoefficientMatrix,
}

struct Timer<'a, C: Clock> {
    clock: &'a C,
    timings: Vec<StageTiming>,
}

impl<C: Clock> Timer<'_, C> {
    fn run<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = self.clock.now();
        let out = f().map_err(|e| e.in_stage(stage.name()))?;
        self.timings.push(StageTiming {
            stage,
            seconds: self.clock.now() - t0,
            skipped: false,
        });
        Ok(out)
    }

    fn skip(&mut self, stage: Stage) {
        self.timings.push(StageTiming {
            stage,
            seconds: 0.0,
            skipped: true,
        });
    }
}

/// Runs the full pipeline and returns the labels.
pub fn sc_ssc<E: Executor, C: Clock>(
    cube: &SpectralCube,
    params: &PipelineParams,
    exec: &E,
    clock: &C,
) -> Result<ClusterResult> {
    Ok(run(cube, params, exec, clock)?.result)
}

/// As [`sc_ssc`], also returning the intermediate products.
pub fn run<E: Executor, C: Clock>(
    cube: &SpectralCube,
    params: &PipelineParams,
    exec: &E,
    clock: &C,
) -> Result<PipelineOutput> {
    params.validate().map_err(|e| e.in_stage("config"))?;
    let mut timer = Timer {
        clock,
        timings: Vec::new(),
    };
    let raw = vectorize(cube);
    let geometry = cube.geometry();
    let n = geometry.len();
    let bands = cube.bands();

    let need_image = params.toggles.use_superpixels;
    let d = if params.toggles.use_pca {
        reduced_dim(bands, params.pca_fraction).min(n)
    } else {
        bands
    };
    let (features, image) = if params.toggles.use_pca || need_image {
        timer.run(Stage::Pca, || {
            let comps = if params.toggles.use_pca { d.max(3) } else { 3 }
                .min(bands)
                .min(n);
            let model = pca_fit(&raw, comps)?;
            let features = if params.toggles.use_pca {
                unit_normalize(&model.project(&raw, d)?)?
            } else {
                unit_normalize(&raw)?
            };
            let image = if need_image {
                Some(false_color(&model, &raw)?)
            } else {
                None
            };
            Ok((features, image))
        })?
    } else {
        timer.skip(Stage::Pca);
        (
            unit_normalize(&raw).map_err(|e| e.in_stage(Stage::Pca.name()))?,
            None,
        )
    };

    let segmentation = match image {
        Some(img) => timer.run(Stage::Superpixels, || {
            let mut sp = SlicParams::new(params.segments.min(n));
            sp.compactness = params.compactness;
            slic(&img, &sp)
        })?,
        None => {
            timer.skip(Stage::Superpixels);
            SegmentationMap::single(n)
        }
    };

    let lasso = params.lasso();
    let dictionary = timer.run(Stage::Selection, || {
        build_dictionary(&features, &segmentation, params.rho, &lasso, exec)
    })?;
    let k = params.clusters;
    if k > dictionary.len().min(n) {
        return Err(Error::param(alloc::format!(
            "{k} clusters requested but only {} exemplars were selected",
            dictionary.len()
        ))
        .in_stage(Stage::Selection.name()));
    }

    let coding = CodingParams {
        lasso,
        exclude_self: params.exclude_self,
    };
    let coefficients = timer.run(Stage::Coding, || {
        code_against_dictionary(&features, &dictionary, &coding, exec)
    })?;

    let kernel = params.effective_kernel();
    let smoothed = if kernel > 1 {
        timer.run(Stage::Smoothing, || {
            smooth_coefficients(&coefficients, geometry, kernel, exec)
        })?
    } else {
        timer.skip(Stage::Smoothing);
        coefficients.clone()
    };

    let (embedding, zero_columns) = timer.run(Stage::Embedding, || {
        let (normalized, zero) = normalize_abs_columns(&smoothed);
        let deg = degrees(&normalized);
        let mut emb = spectral_embed(&normalized, &deg, k, exec)?;
        if params.normalize_embedding_rows {
            emb.normalize_rows();
        }
        Ok((emb, zero.len()))
    })?;

    let labels = timer.run(Stage::Clustering, || {
        let mut km = KMeansParams::new(k, params.seed);
        km.restarts = params.restarts;
        Ok(kmeans(&embedding.points, k, &km)?.labels)
    })?;

    let result = ClusterResult {
        labels,
        timings: timer.timings,
        params: params.clone(),
        feature_dim: features.dim(),
        segments: segmentation.segments(),
        exemplars: dictionary.len(),
        zero_columns,
        singular_values: embedding.singular_values,
    };
    Ok(PipelineOutput {
        result,
        segmentation,
        dictionary,
        coefficients,
    })
}

/// Human-readable one-line summary of the parameters.
pub fn describe(params: &PipelineParams) -> String {
    alloc::format!(
        "tau={} rho={} E={} Ks={} k={} pca={} superpixels={} smoothing={}",
        params.tau,
        params.rho,
        params.segments,
        params.kernel_size,
        params.clusters,
        params.toggles.use_pca,
        params.toggles.use_superpixels,
        params.toggles.use_smoothing
    )
}
