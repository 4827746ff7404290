//! End-to-end orchestration: parse, scale, threshold, align, fit, validate,
//! bootstrap, timescales, empirical durations and continuity fits.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::align::{shift_to_reltime, AlignError, AlignedDataset};
use crate::dataset::{
    minmax_scale, parse_dataset, scale_with_range, ContinuityMode, Dataset, DatasetError, ScaleRange,
};
use crate::density::{
    find_bimodal_threshold, Bandwidth, BimodalThreshold, DensityError, DensityEstimate, KdeOptions, DEFAULT_GRID_SIZE,
};
use crate::inference::{
    bootstrap_fits, characteristic_timescale, continuity_comparison, empirical_durations, out_of_sample_validation,
    plateau_thresholds, BootstrapEnsemble, ContinuityFit, EmpiricalDurations, InferenceError, PlateauThresholds,
    TimescaleEstimate, ValidationReport,
};
use crate::logistic::{fit_logistic, FitConfig, FitResult, LogisticError, LogisticParams};

/// `k` used for the empirical per-region durations.
pub const EMPIRICAL_K_SIGMA: f64 = 3.0;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("data error: {0}")]
    Dataset(#[from] DatasetError),
    #[error("cannot locate the SPC1 threshold: {0}")]
    Density(#[from] DensityError),
    #[error("alignment error: {0}")]
    Align(#[from] AlignError),
    #[error("fit error: {0}")]
    Fit(#[from] LogisticError),
    #[error("inference error: {0}")]
    Inference(#[from] InferenceError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl PipelineError {
    /// 2 for bad input data, 3 for numerical failures, 1 for output I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Dataset(_)
            | PipelineError::Align(_)
            | PipelineError::Config(_)
            | PipelineError::Input { .. } => 2,
            PipelineError::Density(_) | PipelineError::Fit(_) | PipelineError::Inference(_) => 3,
            PipelineError::Output { .. } => 1,
        }
    }
}

/// How far the pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    /// Through the full fit and its out-of-sample validation.
    Fit,
    /// Adds the bootstrap, timescales and empirical durations.
    Bootstrap,
    /// Adds the continuity fits, without the bootstrap.
    Continuity,
    /// Everything.
    Report,
}

impl Stage {
    fn bootstrap(self) -> bool {
        matches!(self, Stage::Bootstrap | Stage::Report)
    }

    fn continuity(self) -> bool {
        matches!(self, Stage::Continuity | Stage::Report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input_path: PathBuf,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub n_bootstrap: usize,
    pub n_validation: usize,
    pub k_sigma_list: Vec<f64>,
    pub bandwidth: Bandwidth,
    pub grid_size: usize,
    pub continuity_modes: Vec<ContinuityMode>,
    /// Override for the min-max extrema; by default they come from the input.
    pub scale_range: Option<ScaleRange>,
    pub fit: FitConfig,
    pub stage: Stage,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input_path: PathBuf::new(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            n_bootstrap: 1000,
            n_validation: 100,
            k_sigma_list: vec![1.0, 3.0],
            bandwidth: Bandwidth::Scott,
            grid_size: DEFAULT_GRID_SIZE,
            continuity_modes: ContinuityMode::ALL.to_vec(),
            scale_range: None,
            fit: FitConfig::default(),
            stage: Stage::Report,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let err = |m: String| Err(PipelineError::Config(m));
        if self.n_bootstrap == 0 || self.n_validation == 0 {
            return err("bootstrap and validation counts must be at least 1".into());
        }
        if self.k_sigma_list.is_empty() || self.k_sigma_list.iter().any(|k| !(*k > 0.0)) {
            return err(format!("k-sigma list must hold positive values, got {:?}", self.k_sigma_list));
        }
        if let Bandwidth::Fixed(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return err(format!("bandwidth must be positive, got {h}"));
            }
        }
        if self.grid_size < 3 {
            return err("grid size must be at least 3".into());
        }
        Ok(())
    }

    /// SHA-256 over every setting except the input and output paths.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.input_path = PathBuf::new();
        c.output_dir = PathBuf::new();
        let json = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub stage: Stage,
    pub config_sha256: String,
    pub input_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorRow {
    pub nga: String,
    pub n_points: usize,
    pub anchor_year: Option<i64>,
    /// Calendar year of the row the input file marks as RelTime 0.
    pub recorded_anchor: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimescaleFailure {
    pub k_sigma: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub provenance: Provenance,
    pub scale: ScaleRange,
    pub n_regions: usize,
    pub n_points: usize,
    pub density: DensityEstimate,
    pub threshold: BimodalThreshold,
    pub anchors: Vec<AnchorRow>,
    pub aligned: AlignedDataset,
    pub mean_points_retained: f64,
    pub mean_points_discarded: Option<f64>,
    pub full_fit: FitResult,
    pub validation: ValidationReport,
    pub bootstrap: Option<BootstrapEnsemble>,
    pub thresholds: Vec<PlateauThresholds>,
    pub timescales: Vec<TimescaleEstimate>,
    /// Requested `k_sigma` values for which no duration could be computed.
    pub timescale_failures: Vec<TimescaleFailure>,
    pub empirical: Option<EmpiricalDurations>,
    pub continuity: Vec<ContinuityFit>,
}

impl ReportBundle {
    pub fn timescale(&self, k_sigma: f64) -> Option<&TimescaleEstimate> {
        self.timescales.iter().find(|t| t.k_sigma == k_sigma)
    }

    pub fn continuity_fit(&self, mode: ContinuityMode) -> Option<&ContinuityFit> {
        self.continuity.iter().find(|c| c.mode == mode)
    }
}

/// Read the input file and run every stage up to `config.stage`. Nothing is
/// written to disk.
pub fn run_pipeline(config: &PipelineConfig) -> Result<ReportBundle, PipelineError> {
    config.validate()?;
    let bytes = std::fs::read(&config.input_path)
        .map_err(|source| PipelineError::Input { path: config.input_path.clone(), source })?;
    let dataset = parse_dataset(bytes.as_slice())?;
    analyze(dataset, config, &hex::encode(Sha256::digest(&bytes)))
}

/// Run the analysis on an already parsed (unscaled) dataset.
pub fn analyze(dataset: Dataset, config: &PipelineConfig, input_sha256: &str) -> Result<ReportBundle, PipelineError> {
    config.validate()?;
    let n_regions = dataset.regions.len();
    let n_points = dataset.n_points();
    let dataset = match config.scale_range {
        Some(range) => scale_with_range(dataset, range)?,
        None => minmax_scale(dataset)?,
    };
    let scale = dataset.scale.expect("scaled dataset records its range");

    let pooled: Vec<f64> = dataset.regions.iter().flat_map(|r| r.points.iter().filter_map(|p| p.spc1_scaled)).collect();
    let options = KdeOptions { bandwidth: config.bandwidth, grid_size: config.grid_size, clip: None };
    let density = crate::density::gaussian_kde_with(&pooled, &options)?;
    let threshold = find_bimodal_threshold(&density)?;
    if !(threshold.spc1_0 > 0.0 && threshold.spc1_0 < 1.0) {
        return Err(AlignError::InvalidThreshold(threshold.spc1_0).into());
    }
    let aligned = shift_to_reltime(&dataset, threshold.spc1_0)?;
    let anchors = anchor_rows(&dataset, &aligned);
    let (mean_points_retained, mean_points_discarded) = point_count_means(&anchors);

    let full_fit = fit_logistic(&aligned.pooled_points(), LogisticParams::default_init(), &config.fit)?;
    let validation = out_of_sample_validation(&aligned, &full_fit, config.n_validation, config.seed, &config.fit)?;

    let mut bootstrap = None;
    let mut thresholds = Vec::new();
    let mut timescales = Vec::new();
    let mut timescale_failures = Vec::new();
    let mut empirical = None;
    if config.stage.bootstrap() {
        let ensemble = bootstrap_fits(&aligned, &full_fit, config.n_bootstrap, config.seed, &config.fit)?;
        let mut ks = config.k_sigma_list.clone();
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        for &k in &ks {
            let result = plateau_thresholds(&ensemble, k).and_then(|th| {
                thresholds.push(th);
                characteristic_timescale(&ensemble, &th)
            });
            match result {
                Ok(t) => timescales.push(t),
                Err(e) => timescale_failures.push(TimescaleFailure { k_sigma: k, reason: e.to_string() }),
            }
        }
        let th = match thresholds.iter().find(|t| t.k_sigma == EMPIRICAL_K_SIGMA) {
            Some(t) => Some(*t),
            None => plateau_thresholds(&ensemble, EMPIRICAL_K_SIGMA).ok(),
        };
        if let Some(th) = th {
            empirical = Some(empirical_durations(&aligned, th.th1, th.th2)?);
        }
        bootstrap = Some(ensemble);
    }

    let mut continuity = Vec::new();
    if config.stage.continuity() {
        let mut modes = config.continuity_modes.clone();
        modes.sort();
        modes.dedup();
        for mode in modes {
            continuity.push(continuity_comparison(&aligned, &full_fit, mode, &config.fit)?);
        }
    }

    Ok(ReportBundle {
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            stage: config.stage,
            config_sha256: config.fingerprint(),
            input_sha256: input_sha256.to_string(),
        },
        scale,
        n_regions,
        n_points,
        density,
        threshold,
        anchors,
        aligned,
        mean_points_retained,
        mean_points_discarded,
        full_fit,
        validation,
        bootstrap,
        thresholds,
        timescales,
        timescale_failures,
        empirical,
        continuity,
    })
}

fn anchor_rows(dataset: &Dataset, aligned: &AlignedDataset) -> Vec<AnchorRow> {
    dataset
        .regions
        .iter()
        .map(|r| AnchorRow {
            nga: r.nga.clone(),
            n_points: r.points.len(),
            anchor_year: aligned.region(&r.nga).map(|a| a.anchor_year),
            recorded_anchor: r.points.iter().find(|p| p.rel_time_recorded == Some(0)).map(|p| p.abs_time),
        })
        .collect()
}

fn point_count_means(rows: &[AnchorRow]) -> (f64, Option<f64>) {
    let mean_of = |crossed: bool| {
        let v: Vec<f64> =
            rows.iter().filter(|r| r.anchor_year.is_some() == crossed).map(|r| r.n_points as f64).collect();
        (!v.is_empty()).then(|| crate::stats::mean(&v))
    };
    (mean_of(true).unwrap_or(0.0), mean_of(false))
}

/// Write the text report, its JSON sidecar and every plot artifact.
pub fn write_outputs(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let out_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PipelineError::Output { path, source }
    };
    std::fs::create_dir_all(dir).map_err(out_err(dir))?;
    let mut written = Vec::new();
    let text = dir.join("report.txt");
    std::fs::write(&text, crate::report::render_text(bundle)).map_err(out_err(&text))?;
    written.push(text);
    let json = dir.join("report.json");
    std::fs::write(&json, crate::report::render_json(bundle)).map_err(out_err(&json))?;
    written.push(json);
    written.extend(crate::plots::emit_plot_data(bundle, dir).map_err(out_err(dir))?);
    Ok(written)
}
