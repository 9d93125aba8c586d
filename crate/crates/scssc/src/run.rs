//! The `run` workflow: load a scene, cluster it, write every artifact.

use std::path::{Path, PathBuf};

use scssc_core::cube::vectorize;
use scssc_core::metrics::{evaluate, EvaluationReport};
use scssc_core::pipeline::{run as run_pipeline, ClusterResult};
use scssc_core::preprocess::{false_color, pca_fit};

use crate::config::Config;
use crate::csv::{load_ground_truth, write_exemplars_csv, write_labels_csv, write_triplets_csv};
use crate::envi::load_envi;
use crate::exec::{RayonExecutor, StdClock};
use crate::ppm::{write_boundary_overlay, write_label_map};
use crate::report::{write_json, MetricsJson, TimingJson};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct RunRequest {
    pub scene: PathBuf,
    pub ground_truth: Option<PathBuf>,
    pub config: Config,
    pub out_dir: PathBuf,
    /// Also write the segment map, exemplar list and raw coefficients.
    pub dump_intermediates: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub result: ClusterResult,
    pub metrics: Option<EvaluationReport>,
}

pub fn run_scene(req: &RunRequest, exec: &RayonExecutor) -> Result<RunOutcome> {
    let (cube, _) = load_envi(&req.scene)?;
    let geometry = cube.geometry();
    let truth = match &req.ground_truth {
        Some(p) => Some(load_ground_truth(p, geometry)?.with_ignore_label(req.config.ignore_label)),
        None => None,
    };
    let params = req.config.params();
    params
        .validate()
        .map_err(|e| Error::Config(e.to_string()))?;
    std::fs::create_dir_all(&req.out_dir).map_err(|e| Error::io(&req.out_dir, e))?;

    let clock = StdClock::default();
    let out = run_pipeline(&cube, &params, exec, &clock)?;
    let result = out.result;
    let dir = &req.out_dir;
    write_labels_csv(&dir.join("labels.csv"), &result.labels, geometry)?;
    write_label_map(&dir.join("labels.ppm"), &result.labels, geometry)?;
    write_json(
        &dir.join("timing.json"),
        &TimingJson::new(&result, &req.config, exec.threads()),
    )?;
    let metrics = match &truth {
        Some(t) => {
            let r = evaluate(&result.labels, t)?;
            write_json(&dir.join("metrics.json"), &MetricsJson::from(&r))?;
            Some(r)
        }
        None => None,
    };
    if req.dump_intermediates {
        write_labels_csv(
            &dir.join("segments.csv"),
            out.segmentation.assignments(),
            geometry,
        )?;
        write_exemplars_csv(&dir.join("exemplars.csv"), &out.dictionary)?;
        write_triplets_csv(&dir.join("coefficients.csv"), &out.coefficients.matrix)?;
        let raw = vectorize(&cube);
        let comps = 3.min(raw.dim()).min(raw.n());
        if comps == 3 {
            let image = false_color(&pca_fit(&raw, 3)?, &raw)?;
            write_boundary_overlay(&dir.join("segments.ppm"), &image, &out.segmentation)?;
        }
    }
    Ok(RunOutcome { result, metrics })
}

/// Scores an existing label grid.
pub fn score_labels(
    labels: &Path,
    ground_truth: &Path,
    ignore_label: u32,
) -> Result<EvaluationReport> {
    let (pred, geometry) = crate::csv::read_labels_csv(labels)?;
    let truth = load_ground_truth(ground_truth, geometry)?.with_ignore_label(ignore_label);
    Ok(evaluate(&pred, &truth)?)
}
