//! Pipeline CSV schemas. Floats are printed with Rust's shortest-roundtrip
//! formatting, so writing and re-reading is value-exact and byte-stable
//! across runs.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::IoError;
use crate::geometry::Point2;
use crate::mobile_assoc::{PositionLog, SessionStats};
use crate::rti::ImageVector;

/// One per-capture feature row: `capture_time_s,tx_slot,rx_x_m,rx_y_m,e_db,kept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureRecord {
    pub capture_time: f64,
    pub tx_slot: usize,
    pub rx: Point2,
    pub e_db: f64,
    pub kept: bool,
}

pub fn write_feature_records(path: &Path, records: &[FeatureRecord]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    let io = |e| IoError::io(path, e);
    writeln!(w, "capture_time_s,tx_slot,rx_x_m,rx_y_m,e_db,kept").map_err(io)?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.capture_time,
            r.tx_slot,
            r.rx.x,
            r.rx.y,
            r.e_db,
            u8::from(r.kept)
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_feature_records(path: &Path) -> Result<Vec<FeatureRecord>, IoError> {
    let mut out = Vec::new();
    for (line_no, line) in lines(path)?.enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line_no == 0 || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let malformed = |msg: String| IoError::Malformed {
            what: "feature record",
            path: path.display().to_string(),
            line: line_no + 1,
            msg,
        };
        if fields.len() != 6 {
            return Err(malformed(format!(
                "expected 6 fields, got {}",
                fields.len()
            )));
        }
        out.push(FeatureRecord {
            capture_time: parse_f64(fields[0]).map_err(&malformed)?,
            tx_slot: fields[1]
                .parse()
                .map_err(|e| malformed(format!("tx_slot: {e}")))?,
            rx: Point2::new(
                parse_f64(fields[2]).map_err(&malformed)?,
                parse_f64(fields[3]).map_err(&malformed)?,
            ),
            e_db: parse_f64(fields[4]).map_err(&malformed)?,
            kept: fields[5] == "1",
        });
    }
    Ok(out)
}

pub fn write_position_log(path: &Path, log: &PositionLog) -> Result<(), IoError> {
    let mut w = writer(path)?;
    let io = |e| IoError::io(path, e);
    writeln!(w, "time_s,x_m,y_m").map_err(io)?;
    for (t, p) in &log.entries {
        writeln!(w, "{},{},{}", t, p.x, p.y).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_position_log(path: &Path, cadence_s: f64) -> Result<PositionLog, IoError> {
    let mut entries = Vec::new();
    for (line_no, line) in lines(path)?.enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line_no == 0 || line.is_empty() {
            continue;
        }
        let malformed = |msg: String| IoError::Malformed {
            what: "position log",
            path: path.display().to_string(),
            line: line_no + 1,
            msg,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(malformed(format!(
                "expected 3 fields, got {}",
                fields.len()
            )));
        }
        entries.push((
            parse_f64(fields[0]).map_err(&malformed)?,
            Point2::new(
                parse_f64(fields[1]).map_err(&malformed)?,
                parse_f64(fields[2]).map_err(&malformed)?,
            ),
        ));
    }
    PositionLog::new(entries, cadence_s).map_err(|e| IoError::Malformed {
        what: "position log",
        path: path.display().to_string(),
        line: 0,
        msg: e.to_string(),
    })
}

/// One detector step: `time_s,e_db,event,presence`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionLogRow {
    pub time: f64,
    pub e_db: f64,
    pub event: bool,
    pub presence: bool,
}

pub fn write_detection_log(path: &Path, rows: &[DetectionLogRow]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    let io = |e| IoError::io(path, e);
    writeln!(w, "time_s,e_db,event,presence").map_err(io)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.time,
            r.e_db,
            u8::from(r.event),
            u8::from(r.presence)
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_link_stats(path: &Path, stats: &SessionStats) -> Result<(), IoError> {
    let mut w = writer(path)?;
    let io = |e| IoError::io(path, e);
    writeln!(w, "tx_slot,ref_index,ref_x_m,ref_y_m,count,median_db").map_err(io)?;
    for link in &stats.links {
        let c = stats.refs.coords[link.ref_index];
        match link.median_db {
            Some(m) => writeln!(
                w,
                "{},{},{},{},{},{}",
                link.tx_slot, link.ref_index, c.x, c.y, link.count, m
            )
            .map_err(io)?,
            None => writeln!(
                w,
                "{},{},{},{},{},",
                link.tx_slot, link.ref_index, c.x, c.y, link.count
            )
            .map_err(io)?,
        }
    }
    w.flush().map_err(io)
}

pub fn write_y_vector(path: &Path, stats: &SessionStats, y: &[f64]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    let io = |e| IoError::io(path, e);
    writeln!(w, "link_index,tx_slot,ref_index,y_db").map_err(io)?;
    for (l, value) in y.iter().enumerate() {
        let link = &stats.links[l];
        writeln!(w, "{},{},{},{}", l, link.tx_slot, link.ref_index, value).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_image_csv(path: &Path, image: &ImageVector) -> Result<(), IoError> {
    let mut w = writer(path)?;
    let io = |e| IoError::io(path, e);
    writeln!(w, "x_m,y_m,intensity").map_err(io)?;
    for (i, v) in image.values.iter().enumerate() {
        let c = image.grid.centroid(i);
        writeln!(w, "{},{},{}", c.x, c.y, v).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// One localization result: `position_id,true_x_m,true_y_m,est_x_m,est_y_m,error_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationRow {
    pub position_id: usize,
    pub truth: Point2,
    pub estimate: Point2,
    pub error_m: f64,
}

/// Write the per-position error table plus a trailing mean row.
pub fn write_localization_report(path: &Path, rows: &[LocalizationRow]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    let io = |e| IoError::io(path, e);
    writeln!(w, "position_id,true_x_m,true_y_m,est_x_m,est_y_m,error_m").map_err(io)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.position_id, r.truth.x, r.truth.y, r.estimate.x, r.estimate.y, r.error_m
        )
        .map_err(io)?;
    }
    if !rows.is_empty() {
        let mean = rows.iter().map(|r| r.error_m).sum::<f64>() / rows.len() as f64;
        writeln!(w, "mean,,,,,{mean}").map_err(io)?;
    }
    w.flush().map_err(io)
}

fn writer(path: &Path) -> Result<BufWriter<File>, IoError> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| IoError::io(path, e))?,
    ))
}

fn lines(path: &Path) -> Result<std::io::Lines<BufReader<File>>, IoError> {
    Ok(BufReader::new(File::open(path).map_err(|e| IoError::io(path, e))?).lines())
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|e| format!("bad float {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_records_roundtrip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let records = vec![
            FeatureRecord {
                capture_time: 0.1,
                tx_slot: 1,
                rx: Point2::new(7.5, 2.3123456789012345),
                e_db: -121.73205080756887,
                kept: true,
            },
            FeatureRecord {
                capture_time: 0.2,
                tx_slot: 2,
                rx: Point2::new(7.5, 2.34),
                e_db: f64::NEG_INFINITY,
                kept: false,
            },
        ];
        write_feature_records(&path, &records).unwrap();
        let back = read_feature_records(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn malformed_feature_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "header\n1,2,3\n").unwrap();
        match read_feature_records(&path) {
            Err(IoError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn position_log_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pos.csv");
        let log = PositionLog::new(
            vec![(0.0, Point2::new(2.2, 1.7)), (0.3, Point2::new(2.224, 1.7))],
            0.3,
        )
        .unwrap();
        write_position_log(&path, &log).unwrap();
        let back = read_position_log(&path, 0.3).unwrap();
        assert_eq!(back.entries, log.entries);
    }
}
