//! File formats: the binary waveform trace, the pipeline CSV schemas, PGM
//! image output, and the hashed run manifest.

mod csvio;
mod manifest;
mod pgm;
mod trace;

pub use csvio::{
    read_feature_records, read_position_log, write_detection_log, write_feature_records,
    write_image_csv, write_link_stats, write_localization_report, write_position_log,
    write_y_vector, DetectionLogRow, FeatureRecord, LocalizationRow,
};
pub use manifest::write_manifest;
pub use pgm::write_pgm;
pub use trace::{read_trace, write_trace, TRACE_MAGIC, TRACE_VERSION};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what} at {path}:{line}: {msg}")]
    Malformed {
        what: &'static str,
        path: String,
        line: usize,
        msg: String,
    },
    #[error("bad trace file {path}: {msg}")]
    BadTrace { path: String, msg: String },
}

impl IoError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
