//! Experiment orchestration: wires the simulator, feature extraction,
//! detector, association, and imaging stages into reproducible runs that
//! emit CSV/PGM artifacts plus a hashed manifest.

mod capture;
mod energy_gap;
mod localization;
mod presence;
mod simulate;

pub use capture::CaptureEngine;
pub use energy_gap::run_energy_gap;
pub use localization::run_localization;
pub use presence::run_presence;
pub use simulate::run_simulate;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::channel_sim::SimError;
use crate::cir_processing::CirError;
use crate::config::{ConfigError, ExperimentKind};
use crate::io::{write_manifest, IoError, LocalizationRow};
use crate::mobile_assoc::AssocError;
use crate::rti::RtiError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Cir(#[from] CirError),
    #[error(transparent)]
    Assoc(#[from] AssocError),
    #[error(transparent)]
    Rti(#[from] RtiError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Runtime(String),
}

/// Energy-gap experiment metrics (empty room vs link-line presence).
#[derive(Debug, Clone)]
pub struct EnergyGapMetrics {
    pub displacements_m: Vec<f64>,
    pub e_empty_db: Vec<f64>,
    pub e_presence_db: Vec<f64>,
    /// min over displacements of (E_empty - E_presence).
    pub min_gap_db: f64,
    /// max - min of the empty-room early-window E over the sweep.
    pub early_range_db: f64,
    /// max - min of the empty-room 10-20 ns window energy (dB) over the sweep.
    pub late_range_db: f64,
}

/// Per-variant presence detection outcome.
#[derive(Debug, Clone)]
pub struct PresenceVariantMetrics {
    pub swing_amplitude_m: f64,
    pub scheduled_events: usize,
    pub hits: usize,
    pub misses: usize,
    pub false_alarms: usize,
    pub episodes: Vec<(f64, f64)>,
}

/// Localization campaign outcome.
#[derive(Debug, Clone)]
pub struct LocalizationMetrics {
    pub rows: Vec<LocalizationRow>,
    pub mean_error_m: f64,
    pub num_references: usize,
    pub num_links: usize,
    /// Per-session bookkeeping: kept captures equal the sum of link counts
    /// plus the association drops.
    pub kept_per_session: Vec<usize>,
    pub link_counts_per_session: Vec<usize>,
    pub dropped_per_session: Vec<usize>,
}

/// Everything a finished experiment hands back: artifact paths plus the
/// numbers the acceptance checks care about.
#[derive(Debug)]
pub struct RunReport {
    pub kind: ExperimentKind,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub overrides: Vec<String>,
    pub artifacts: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub energy_gap: Option<EnergyGapMetrics>,
    pub presence: Option<Vec<PresenceVariantMetrics>>,
    pub localization: Option<LocalizationMetrics>,
}

impl RunReport {
    fn new(kind: ExperimentKind, out_dir: &Path, seed: u64, overrides: &[String]) -> Self {
        Self {
            kind,
            out_dir: out_dir.to_path_buf(),
            seed,
            overrides: overrides.to_vec(),
            artifacts: Vec::new(),
            summary: Vec::new(),
            energy_gap: None,
            presence: None,
            localization: None,
        }
    }

    /// Write `run_report.txt` and the hash manifest; every artifact must
    /// exist on disk by now.
    fn finalize(mut self) -> Result<RunReport, PipelineError> {
        let report_path = self.out_dir.join("run_report.txt");
        {
            let file = File::create(&report_path).map_err(|e| IoError::io(&report_path, e))?;
            let mut w = BufWriter::new(file);
            let io = |e| IoError::io(&report_path, e);
            writeln!(w, "experiment: {}", self.kind.as_str()).map_err(io)?;
            writeln!(w, "seed: {}", self.seed).map_err(io)?;
            if self.overrides.is_empty() {
                writeln!(w, "overrides: (none)").map_err(io)?;
            } else {
                for ov in &self.overrides {
                    writeln!(w, "override: {ov}").map_err(io)?;
                }
            }
            for line in &self.summary {
                writeln!(w, "{line}").map_err(io)?;
            }
            w.flush().map_err(io)?;
        }
        self.artifacts.push(report_path);

        for artifact in &self.artifacts {
            if !artifact.exists() {
                return Err(PipelineError::Runtime(format!(
                    "declared artifact missing: {}",
                    artifact.display()
                )));
            }
        }
        let manifest = write_manifest(&self.out_dir, &self.artifacts)?;
        self.artifacts.push(manifest);
        Ok(self)
    }
}

pub(crate) fn ensure_out_dir(out_dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(out_dir).map_err(|e| IoError::io(out_dir, e).into())
}

/// Capture instants `start, start+step, ...` up to and including `end`
/// (within half a step of float slack).
pub(crate) fn time_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let t = start + k as f64 * step;
        if t > end + step * 1e-9 {
            break;
        }
        out.push(t);
        k += 1;
    }
    out
}
