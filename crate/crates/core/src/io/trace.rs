//! Binary waveform trace format.
//!
//! Little-endian layout:
//! ```text
//! magic    4 bytes  "UWBC"
//! version  u16
//! period   u32      sampling period in femtoseconds
//! count    u32      number of samples
//! time     f64      capture timestamp, seconds
//! tx       2 x f64  transmitter coordinate, metres
//! rx       2 x f64  receiver coordinate, metres
//! samples  count x f32
//! ```
//! The period is stored in femtoseconds so sub-picosecond sampling grids
//! (15.89 ps = 15890 fs) survive the integer header field exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::IoError;
use crate::cir_processing::SampledWaveform;
use crate::geometry::Point2;

pub const TRACE_MAGIC: [u8; 4] = *b"UWBC";
pub const TRACE_VERSION: u16 = 1;

pub fn write_trace(path: &Path, wf: &SampledWaveform) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| IoError::io(path, e);

    w.write_all(&TRACE_MAGIC).map_err(io)?;
    w.write_all(&TRACE_VERSION.to_le_bytes()).map_err(io)?;
    let period_fs = (wf.sample_period * 1e15).round();
    debug_assert!(period_fs > 0.0 && period_fs <= u32::MAX as f64);
    w.write_all(&(period_fs as u32).to_le_bytes()).map_err(io)?;
    w.write_all(&(wf.samples.len() as u32).to_le_bytes())
        .map_err(io)?;
    w.write_all(&wf.capture_time.to_le_bytes()).map_err(io)?;
    w.write_all(&wf.tx_coord.x.to_le_bytes()).map_err(io)?;
    w.write_all(&wf.tx_coord.y.to_le_bytes()).map_err(io)?;
    w.write_all(&wf.rx_coord.x.to_le_bytes()).map_err(io)?;
    w.write_all(&wf.rx_coord.y.to_le_bytes()).map_err(io)?;
    for s in &wf.samples {
        w.write_all(&(*s as f32).to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_trace(path: &Path) -> Result<SampledWaveform, IoError> {
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut r = BufReader::new(file);
    let io = |e| IoError::io(path, e);
    let bad = |msg: String| IoError::BadTrace {
        path: path.display().to_string(),
        msg,
    };

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if magic != TRACE_MAGIC {
        return Err(bad(format!("bad magic {magic:?}")));
    }
    let version = read_u16(&mut r).map_err(io)?;
    if version != TRACE_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let period_fs = read_u32(&mut r).map_err(io)?;
    if period_fs == 0 {
        return Err(bad("zero sampling period".into()));
    }
    let count = read_u32(&mut r).map_err(io)? as usize;
    let capture_time = read_f64(&mut r).map_err(io)?;
    let tx = Point2::new(read_f64(&mut r).map_err(io)?, read_f64(&mut r).map_err(io)?);
    let rx = Point2::new(read_f64(&mut r).map_err(io)?, read_f64(&mut r).map_err(io)?);

    let mut samples = Vec::with_capacity(count);
    let mut buf = [0u8; 4];
    for _ in 0..count {
        r.read_exact(&mut buf).map_err(io)?;
        samples.push(f32::from_le_bytes(buf) as f64);
    }

    Ok(SampledWaveform::new(samples, period_fs as f64 / 1e15).with_meta(capture_time, tx, rx))
}

fn read_u16(r: &mut impl Read) -> std::io::Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
