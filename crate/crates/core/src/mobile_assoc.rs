//! Association of measurements taken at mobile coordinates with a static set
//! of virtual reference receivers, per-link median statistics, and the
//! calibration-vs-occupied differencing that forms the imaging measurement
//! vector.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Error)]
pub enum AssocError {
    #[error("time {t} s outside position log span [{start}, {end}] s")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("calibration and occupied sessions use different reference sets")]
    ReferenceSetMismatch,
}

/// Timestamped receiver positions logged by the positioning system.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionLog {
    /// (timestamp s, coordinate m), strictly increasing timestamps.
    pub entries: Vec<(f64, Point2)>,
    /// Nominal logging cadence in seconds (metadata only).
    pub cadence_s: f64,
}

impl PositionLog {
    pub fn new(entries: Vec<(f64, Point2)>, cadence_s: f64) -> Result<Self, AssocError> {
        if entries.is_empty() {
            return Err(AssocError::InvalidParameter("empty position log".into()));
        }
        if !entries.windows(2).all(|w| w[1].0 > w[0].0) {
            return Err(AssocError::InvalidParameter(
                "position log timestamps must be strictly increasing".into(),
            ));
        }
        Ok(Self { entries, cadence_s })
    }

    pub fn span(&self) -> (f64, f64) {
        (self.entries[0].0, self.entries[self.entries.len() - 1].0)
    }
}

/// Linear interpolation of the logged positions at time `t`.
pub fn interpolate_position(log: &PositionLog, t: f64) -> Result<Point2, AssocError> {
    let (start, end) = log.span();
    if t < start || t > end {
        return Err(AssocError::OutOfRange { t, start, end });
    }
    let idx = log
        .entries
        .partition_point(|(et, _)| *et <= t)
        .saturating_sub(1);
    if idx + 1 >= log.entries.len() {
        return Ok(log.entries[idx].1);
    }
    let (t0, p0) = log.entries[idx];
    let (t1, p1) = log.entries[idx + 1];
    Ok(p0 + (p1 - p0) * ((t - t0) / (t1 - t0)))
}

/// One early-energy measurement taken at a mobile receiver coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub capture_time: f64,
    /// Transmitter slot, 1-based.
    pub tx_slot: usize,
    pub mobile_coord: Point2,
    /// E in dB; must be finite (discarded captures never become records).
    pub energy_db: f64,
}

/// Static virtual receiver coordinates that mobile measurements snap to.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceReceiverSet {
    pub coords: Vec<Point2>,
    pub max_spacing: f64,
}

impl ReferenceReceiverSet {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Concatenate reference sets (e.g. one per wall).
    pub fn merge(mut self, other: ReferenceReceiverSet) -> ReferenceReceiverSet {
        self.coords.extend(other.coords);
        ReferenceReceiverSet {
            coords: self.coords,
            max_spacing: self.max_spacing.max(other.max_spacing),
        }
    }
}

/// Evenly space reference receivers along a track polyline so that
/// consecutive spacing stays strictly below `max_spacing`; endpoints are
/// included. A zero-length track collapses to a single point.
pub fn generate_reference_receivers(track: &[Point2], max_spacing: f64) -> ReferenceReceiverSet {
    assert!(max_spacing > 0.0, "max_spacing must be > 0");
    assert!(!track.is_empty(), "track must not be empty");

    let length: f64 = track.windows(2).map(|w| w[0].distance(w[1])).sum();
    if length == 0.0 {
        return ReferenceReceiverSet {
            coords: vec![track[0]],
            max_spacing,
        };
    }

    let intervals = (length / max_spacing).floor() as usize + 1;
    let step = length / intervals as f64;
    let mut coords = Vec::with_capacity(intervals + 1);
    for i in 0..=intervals {
        coords.push(point_at_arc_length(track, step * i as f64, length));
    }
    ReferenceReceiverSet {
        coords,
        max_spacing,
    }
}

fn point_at_arc_length(track: &[Point2], s: f64, total: f64) -> Point2 {
    let mut remaining = s.min(total);
    for leg in track.windows(2) {
        let d = leg[0].distance(leg[1]);
        if d == 0.0 {
            continue;
        }
        if remaining <= d {
            return leg[0] + (leg[1] - leg[0]) * (remaining / d);
        }
        remaining -= d;
    }
    track[track.len() - 1]
}

/// Index of the nearest reference receiver; ties break to the lowest index.
pub fn assign_reference(z_mc: Point2, refs: &ReferenceReceiverSet) -> usize {
    assert!(!refs.is_empty(), "reference set must not be empty");
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in refs.coords.iter().enumerate() {
        let d = z_mc.distance(*c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Per-link (tx slot, reference index) energy statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStats {
    pub tx_slot: usize,
    pub ref_index: usize,
    /// Collected energies, sorted ascending.
    pub energies: Vec<f64>,
    /// Exact middle order statistic (mean of the two middles when even);
    /// `None` for an empty set.
    pub median_db: Option<f64>,
    pub count: usize,
}

/// A full session reduced to per-link statistics over a reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionStats {
    pub refs: ReferenceReceiverSet,
    pub num_slots: usize,
    /// Indexed by l = (tx_slot - 1) * R + ref_index.
    pub links: Vec<LinkStats>,
    /// Records ignored because their nearest reference exceeded the cutoff.
    pub dropped_by_cutoff: usize,
}

impl SessionStats {
    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn kept_records(&self) -> usize {
        self.links.iter().map(|l| l.count).sum()
    }
}

pub fn exact_median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Group records onto links by nearest reference receiver and reduce each
/// set to its exact median. Records farther than `assoc_cutoff` from every
/// reference are dropped (counted); links with no records carry count 0.
pub fn bin_and_median(
    records: &[MeasurementRecord],
    refs: &ReferenceReceiverSet,
    num_slots: usize,
    assoc_cutoff: Option<f64>,
) -> SessionStats {
    let r = refs.len();
    let mut sets: Vec<Vec<f64>> = vec![Vec::new(); num_slots * r];
    let mut dropped = 0usize;

    for rec in records {
        debug_assert!(rec.energy_db.is_finite());
        debug_assert!((1..=num_slots).contains(&rec.tx_slot));
        let ref_index = assign_reference(rec.mobile_coord, refs);
        if let Some(cutoff) = assoc_cutoff {
            if rec.mobile_coord.distance(refs.coords[ref_index]) > cutoff {
                dropped += 1;
                continue;
            }
        }
        sets[(rec.tx_slot - 1) * r + ref_index].push(rec.energy_db);
    }

    let links = sets
        .into_iter()
        .enumerate()
        .map(|(l, mut energies)| {
            energies.sort_by(|a, b| a.partial_cmp(b).unwrap());
            LinkStats {
                tx_slot: l / r + 1,
                ref_index: l % r,
                median_db: exact_median(&energies),
                count: energies.len(),
                energies,
            }
        })
        .collect();

    SessionStats {
        refs: refs.clone(),
        num_slots,
        links,
        dropped_by_cutoff: dropped,
    }
}

/// Per-link change in median energy, clipped to zero from below:
/// y_l = max(M_cal - M_occ, 0), and 0 whenever either set is empty.
/// Both sessions must have been built over the same reference set.
pub fn delta_median(cal: &SessionStats, occ: &SessionStats) -> Result<Vec<f64>, AssocError> {
    if cal.refs != occ.refs || cal.num_slots != occ.num_slots {
        return Err(AssocError::ReferenceSetMismatch);
    }
    Ok(cal
        .links
        .iter()
        .zip(occ.links.iter())
        .map(|(c, o)| match (c.median_db, o.median_db) {
            (Some(mc), Some(mo)) => (mc - mo).max(0.0),
            _ => 0.0,
        })
        .collect())
}
