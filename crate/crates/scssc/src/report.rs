//! JSON sidecars and console tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use scssc_core::metrics::EvaluationReport;
use scssc_core::pipeline::{ClusterResult, Stage};
use serde::Serialize;

use crate::config::Config;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct MetricsJson {
    pub classes: Vec<u32>,
    /// Matched predicted label per class, 0 if none.
    pub matched_clusters: Vec<u32>,
    pub ua: Vec<f64>,
    pub aa: f64,
    pub oa: f64,
    pub kappa: f64,
    pub nmi: f64,
    pub evaluated_pixels: u64,
    /// Aligned confusion counts, one row per class.
    pub confusion: Vec<Vec<u64>>,
}

impl From<&EvaluationReport> for MetricsJson {
    fn from(r: &EvaluationReport) -> Self {
        let c = &r.confusion;
        Self {
            classes: c.classes.clone(),
            matched_clusters: c.clusters[..c.rows()].to_vec(),
            ua: r.ua.clone(),
            aa: r.aa,
            oa: r.oa,
            kappa: r.kappa,
            nmi: r.nmi,
            evaluated_pixels: r.n_evaluated,
            confusion: (0..c.rows())
                .map(|a| (0..c.cols()).map(|b| c.at(a, b)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageJson {
    pub stage: &'static str,
    pub phase: usize,
    pub seconds: f64,
    pub skipped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingJson {
    pub stages: Vec<StageJson>,
    /// Seconds per phase: spatial similarity, selection, coding, clustering.
    pub phases: [f64; 4],
    pub total_seconds: f64,
    pub threads: usize,
    pub segments: usize,
    pub exemplars: usize,
    pub feature_dim: usize,
    pub zero_columns: usize,
    pub config: Config,
}

impl TimingJson {
    pub fn new(result: &ClusterResult, config: &Config, threads: usize) -> Self {
        Self {
            stages: result
                .timings
                .iter()
                .map(|t| StageJson {
                    stage: t.stage.name(),
                    phase: t.stage.phase(),
                    seconds: t.seconds,
                    skipped: t.skipped,
                })
                .collect(),
            phases: result.phase_seconds(),
            total_seconds: result.total_seconds(),
            threads,
            segments: result.segments,
            exemplars: result.exemplars,
            feature_dim: result.feature_dim,
            zero_columns: result.zero_columns,
            config: config.clone(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn metrics_table(r: &EvaluationReport) -> String {
    let mut s = String::new();
    let c = &r.confusion;
    writeln!(s, "{:>8} {:>8} {:>9}", "class", "cluster", "UA (%)").unwrap();
    for a in 0..c.rows() {
        writeln!(
            s,
            "{:>8} {:>8} {:>9.2}",
            c.classes[a], c.clusters[a], r.ua[a]
        )
        .unwrap();
    }
    writeln!(s, "AA    {:>9.2}", r.aa).unwrap();
    writeln!(s, "OA    {:>9.2}", r.oa).unwrap();
    writeln!(s, "Kappa {:>9.4}", r.kappa).unwrap();
    writeln!(s, "NMI   {:>9.4}", r.nmi).unwrap();
    s
}

pub fn timing_table(result: &ClusterResult) -> String {
    let mut s = String::new();
    for stage in Stage::ALL {
        let t = result.timings.iter().find(|t| t.stage == stage);
        match t {
            Some(t) if t.skipped => writeln!(s, "{:<12} skipped", stage.name()).unwrap(),
            Some(t) => writeln!(s, "{:<12} {:>9.3} s", stage.name(), t.seconds).unwrap(),
            None => {}
        }
    }
    writeln!(s, "{:<12} {:>9.3} s", "total", result.total_seconds()).unwrap();
    s
}
