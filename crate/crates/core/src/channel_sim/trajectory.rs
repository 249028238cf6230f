use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::Point2;

/// A timestamped waypoint track for a node in motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTrajectory {
    /// (timestamp s, coordinate m), timestamps strictly increasing.
    pub waypoints: Vec<(f64, Point2)>,
    /// Nominal speed in m/s (informational; waypoints are authoritative).
    pub speed: f64,
}

impl NodeTrajectory {
    pub fn new(waypoints: Vec<(f64, Point2)>, speed: f64) -> Result<Self, SimError> {
        if waypoints.is_empty() {
            return Err(SimError::InvalidParameter(
                "trajectory needs >= 1 waypoint".into(),
            ));
        }
        for w in waypoints.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(SimError::InvalidParameter(
                    "trajectory timestamps must be strictly increasing".into(),
                ));
            }
        }
        if waypoints
            .iter()
            .any(|(t, p)| !t.is_finite() || !p.is_finite())
        {
            return Err(SimError::InvalidParameter("non-finite waypoint".into()));
        }
        Ok(Self { waypoints, speed })
    }

    /// Constant-speed traversal of a polyline, starting at `t_start`.
    /// Zero-length legs are dropped.
    pub fn from_polyline(points: &[Point2], speed: f64, t_start: f64) -> Result<Self, SimError> {
        if points.is_empty() {
            return Err(SimError::InvalidParameter("empty polyline".into()));
        }
        if !(speed > 0.0) {
            return Err(SimError::InvalidParameter("speed must be > 0".into()));
        }
        let mut waypoints = vec![(t_start, points[0])];
        let mut t = t_start;
        for leg in points.windows(2) {
            let d = leg[0].distance(leg[1]);
            if d == 0.0 {
                continue;
            }
            t += d / speed;
            waypoints.push((t, leg[1]));
        }
        Self::new(waypoints, speed)
    }

    /// Triangle-wave oscillation from `base` along unit direction `dir`:
    /// travels `amplitude` metres out and back, reversing every
    /// `half_period` seconds, until at least `t_end`.
    pub fn oscillation(
        base: Point2,
        dir: Point2,
        amplitude: f64,
        half_period: f64,
        t_start: f64,
        t_end: f64,
    ) -> Result<Self, SimError> {
        if !(amplitude > 0.0) || !(half_period > 0.0) || !(t_end > t_start) {
            return Err(SimError::InvalidParameter(
                "invalid oscillation parameters".into(),
            ));
        }
        let far = base + dir.normalized() * amplitude;
        let mut waypoints = Vec::new();
        let mut t = t_start;
        let mut at_far = false;
        waypoints.push((t, base));
        while t < t_end {
            t += half_period;
            at_far = !at_far;
            waypoints.push((t, if at_far { far } else { base }));
        }
        Self::new(waypoints, amplitude / half_period)
    }

    pub fn span(&self) -> (f64, f64) {
        (
            self.waypoints[0].0,
            self.waypoints[self.waypoints.len() - 1].0,
        )
    }
}

/// Linear interpolation between the bracketing waypoints.
pub fn sample_trajectory(traj: &NodeTrajectory, t: f64) -> Result<Point2, SimError> {
    let (start, end) = traj.span();
    if t < start || t > end {
        return Err(SimError::TimeOutOfRange { t, start, end });
    }
    let idx = traj
        .waypoints
        .partition_point(|(wt, _)| *wt <= t)
        .saturating_sub(1);
    if idx + 1 >= traj.waypoints.len() {
        return Ok(traj.waypoints[idx].1);
    }
    let (t0, p0) = traj.waypoints[idx];
    let (t1, p1) = traj.waypoints[idx + 1];
    let alpha = (t - t0) / (t1 - t0);
    Ok(p0 + (p1 - p0) * alpha)
}
