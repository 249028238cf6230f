use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{
    ensure_out_dir, time_grid, CaptureEngine, PipelineError, PresenceVariantMetrics, RunReport,
};
use crate::channel_sim::{sample_trajectory, NodeTrajectory, PersonState};
use crate::cir_processing::GateState;
use crate::config::{
    point, ExperimentConfig, ExperimentKind, PresenceConfig, PresenceVariantConfig,
};
use crate::geometry::{Point2, Segment};
use crate::io::{
    read_feature_records, write_detection_log, write_feature_records, DetectionLogRow, IoError,
};
use crate::presence_detector::{detector_update, episodes, score_episodes, DetectorState};
use crate::seed;

/// Oscillating-receiver link-line presence experiment: swing variants with
/// scheduled walk-through crossings and momentary standing events, scored
/// against ground truth.
pub fn run_presence(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport, PipelineError> {
    let pc = cfg
        .presence
        .as_ref()
        .ok_or_else(|| PipelineError::Runtime("presence section missing".into()))?;
    ensure_out_dir(out_dir)?;
    let engine = CaptureEngine::new(cfg.scene.clone(), cfg.channel.clone())?;
    let mut report = RunReport::new(ExperimentKind::Presence, out_dir, cfg.seed, &cfg.overrides);

    let mut all_metrics = Vec::new();
    for variant in &pc.variants {
        let metrics = run_variant(cfg, pc, variant, &engine, out_dir, &mut report)?;
        report.summary.push(format!(
            "swing {:.2} m: {}/{} presences detected, {} false alarms",
            metrics.swing_amplitude_m, metrics.hits, metrics.scheduled_events, metrics.false_alarms
        ));
        all_metrics.push(metrics);
    }

    report.presence = Some(all_metrics);
    report.finalize()
}

/// Walker state for one scheduled crossing: a straight walk through the
/// nominal link line, perpendicular to it.
struct Walker {
    crossing_time: f64,
    anchor: Point2,
    normal: Point2,
    speed: f64,
    extent: f64,
}

impl Walker {
    fn position_at(&self, t: f64) -> Option<Point2> {
        let offset = (t - self.crossing_time) * self.speed;
        if offset.abs() > self.extent {
            return None;
        }
        Some(self.anchor + self.normal * offset)
    }
}

fn run_variant(
    cfg: &ExperimentConfig,
    pc: &PresenceConfig,
    variant: &PresenceVariantConfig,
    engine: &CaptureEngine,
    out_dir: &Path,
    report: &mut RunReport,
) -> Result<PresenceVariantMetrics, PipelineError> {
    let tx = point(pc.tx);
    let rx_base = point(pc.rx_base);
    let swing_dir = point(pc.swing_dir).normalized();
    let label = format!("{:.0}cm", variant.swing_amplitude_m * 100.0);

    let traj = NodeTrajectory::oscillation(
        rx_base,
        swing_dir,
        variant.swing_amplitude_m,
        pc.swing_half_period_s,
        0.0,
        pc.duration_s,
    )?;

    // Nominal link geometry for the walkers.
    let link = Segment::new(tx, rx_base);
    let link_dir = link.direction();
    let normal = Point2::new(-link_dir.y, link_dir.x);
    let anchor_at = |x_m: f64| {
        // Point on the nominal link with the given x (links here are never
        // vertical; validated scenes keep tx.x != rx.x).
        let t = (x_m - tx.x) / (rx_base.x - tx.x);
        link.point_at(t)
    };
    let walkers: Vec<Walker> = variant
        .crossings
        .iter()
        .map(|c| Walker {
            crossing_time: c.time_s,
            anchor: anchor_at(c.x_m),
            normal,
            speed: pc.walk_speed_mps,
            extent: pc.walk_extent_m,
        })
        .collect();

    let person_at = |t: f64| -> PersonState {
        for w in &walkers {
            if let Some(pos) = w.position_at(t) {
                return PersonState::standing(pos, cfg.person.radius_m, cfg.person.shadow_loss_db);
            }
        }
        for s in &variant.standings {
            if t >= s.start_s && t <= s.start_s + s.duration_s {
                return PersonState::standing(
                    anchor_at(s.x_m),
                    cfg.person.radius_m,
                    cfg.person.shadow_loss_db,
                );
            }
        }
        PersonState::absent()
    };

    // Capture loop.
    let times = time_grid(0.0, pc.duration_s, pc.capture_cadence_s);
    let mut gate = GateState::new();
    let mut records = Vec::with_capacity(times.len());
    for (k, t) in times.iter().enumerate() {
        let rx = sample_trajectory(&traj, *t)?;
        let person = person_at(*t);
        let cap_seed = seed::derive_indexed(cfg.seed, &format!("presence/{label}"), k as u64);
        let processed = engine.capture(*t, tx, 1, rx, rx, &person, cap_seed, &mut gate)?;
        records.push(processed.record);
    }

    let features_path = out_dir.join(format!("features_{label}.csv"));
    write_feature_records(&features_path, &records)?;
    report.artifacts.push(features_path.clone());

    // The detector consumes the feature CSV, not the in-memory rows.
    let feed = read_feature_records(&features_path)?;
    let mut det_state = DetectorState::new();
    let mut log_rows = Vec::new();
    let mut presence_flags = Vec::new();
    for rec in feed.iter().filter(|r| r.kept && r.e_db.is_finite()) {
        let step = detector_update(&mut det_state, &cfg.detector, rec.e_db);
        log_rows.push(DetectionLogRow {
            time: rec.capture_time,
            e_db: rec.e_db,
            event: step.event,
            presence: step.presence,
        });
        presence_flags.push((rec.capture_time, step.presence));
    }

    let log_path = out_dir.join(format!("detection_log_{label}.csv"));
    write_detection_log(&log_path, &log_rows)?;
    report.artifacts.push(log_path);

    let eps = episodes(&presence_flags, pc.episode_gap_s);
    let truth = truth_intervals(pc, variant);
    let score = score_episodes(&eps, &truth);

    let episodes_path = out_dir.join(format!("episodes_{label}.csv"));
    {
        let file = File::create(&episodes_path).map_err(|e| IoError::io(&episodes_path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| IoError::io(&episodes_path, e);
        writeln!(w, "start_s,end_s").map_err(io)?;
        for (s, e) in &eps {
            writeln!(w, "{s},{e}").map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    report.artifacts.push(episodes_path);

    Ok(PresenceVariantMetrics {
        swing_amplitude_m: variant.swing_amplitude_m,
        scheduled_events: truth.len(),
        hits: score.hits,
        misses: score.misses,
        false_alarms: score.false_alarms,
        episodes: eps,
    })
}

/// Ground truth: the walker is "present" while within the truth margin of
/// the link line; a standing event is present for its whole interval.
fn truth_intervals(pc: &PresenceConfig, variant: &PresenceVariantConfig) -> Vec<(f64, f64)> {
    let half = pc.truth_margin_m / pc.walk_speed_mps;
    let mut truth: Vec<(f64, f64)> = variant
        .crossings
        .iter()
        .map(|c| (c.time_s - half, c.time_s + half))
        .collect();
    truth.extend(
        variant
            .standings
            .iter()
            .map(|s| (s.start_s, s.start_s + s.duration_s + pc.episode_gap_s)),
    );
    truth.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    truth
}
