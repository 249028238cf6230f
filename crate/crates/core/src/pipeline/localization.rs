use std::path::Path;

use super::{
    ensure_out_dir, time_grid, CaptureEngine, LocalizationMetrics, PipelineError, RunReport,
};
use crate::channel_sim::{sample_trajectory, NodeTrajectory, PersonState};
use crate::cir_processing::GateState;
use crate::config::{point, ExperimentConfig, ExperimentKind, LocalizationConfig};
use crate::geometry::{Point2, Rect};
use crate::io::{
    read_feature_records, read_position_log, write_feature_records, write_image_csv,
    write_link_stats, write_localization_report, write_pgm, write_position_log, write_y_vector,
    LocalizationRow,
};
use crate::mobile_assoc::{
    bin_and_median, delta_median, generate_reference_receivers, interpolate_position,
    MeasurementRecord, PositionLog, ReferenceReceiverSet, SessionStats,
};
use crate::rti::{
    build_weights, localization_error, localize, solve_image, LinkGeometry, RtiParams, VoxelGrid,
};
use crate::seed;

/// Mobile-receiver localization campaign: a calibration pass plus one
/// occupied pass per standing position, reduced to per-link medians,
/// differenced, imaged, and localized.
pub fn run_localization(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<RunReport, PipelineError> {
    let lc = cfg
        .localization
        .as_ref()
        .ok_or_else(|| PipelineError::Runtime("localization section missing".into()))?;
    ensure_out_dir(out_dir)?;
    let engine = CaptureEngine::new(cfg.scene.clone(), cfg.channel.clone())?;
    let mut report = RunReport::new(
        ExperimentKind::Localization,
        out_dir,
        cfg.seed,
        &cfg.overrides,
    );

    // Reference receivers, wall by wall.
    let refs = lc
        .ref_walls
        .iter()
        .map(|wall| {
            generate_reference_receivers(
                &[point(wall[0]), point(wall[1])],
                cfg.rti.ref_max_spacing_m,
            )
        })
        .reduce(ReferenceReceiverSet::merge)
        .ok_or_else(|| PipelineError::Runtime("no reference walls configured".into()))?;

    // Receiver trajectory: each wall at track speed, transits between walls
    // at transit speed.
    let traj = build_track(lc)?;
    let (t_start, t_end) = traj.span();

    // The position log is written once (the track repeats every session) and
    // read back; downstream association uses only the logged coordinates.
    let mut entries = Vec::new();
    for t in time_grid(t_start, t_end, lc.position_log_cadence_s) {
        entries.push((t, sample_trajectory(&traj, t)?));
    }
    if entries.last().map(|(t, _)| *t < t_end).unwrap_or(true) {
        entries.push((t_end, sample_trajectory(&traj, t_end)?));
    }
    let log = PositionLog::new(entries, lc.position_log_cadence_s).map_err(PipelineError::Assoc)?;
    let log_path = out_dir.join("position_log.csv");
    write_position_log(&log_path, &log)?;
    report.artifacts.push(log_path.clone());
    let log = read_position_log(&log_path, lc.position_log_cadence_s)?;

    let capture_times = time_grid(t_start, t_end, lc.capture_cadence_s);
    let num_slots = lc.tx_slots.len();

    // Calibration session (empty room), then one session per standing position.
    let mut sessions: Vec<(String, Option<Point2>)> = vec![("cal".into(), None)];
    for (i, pos) in lc.standing_positions.iter().enumerate() {
        sessions.push((format!("pos{}", i + 1), Some(point(*pos))));
    }

    let mut session_stats: Vec<SessionStats> = Vec::new();
    let mut kept_per_session = Vec::new();
    let mut link_counts_per_session = Vec::new();
    let mut dropped_per_session = Vec::new();
    for (label, person_pos) in &sessions {
        let person = match person_pos {
            Some(p) => PersonState::standing(*p, cfg.person.radius_m, cfg.person.shadow_loss_db),
            None => PersonState::absent(),
        };
        let mut rows = Vec::new();
        for (slot_idx, tx) in lc.tx_slots.iter().enumerate() {
            let tx = point(*tx);
            let tx_slot = slot_idx + 1;
            let mut gate = GateState::new();
            let stream = format!("loc/{label}/tx{tx_slot}");
            for (k, t) in capture_times.iter().enumerate() {
                let rx_true = sample_trajectory(&traj, *t)?;
                let rx_logged = interpolate_position(&log, *t)?;
                let cap_seed = seed::derive_indexed(cfg.seed, &stream, k as u64);
                let processed = engine.capture(
                    *t, tx, tx_slot, rx_true, rx_logged, &person, cap_seed, &mut gate,
                )?;
                rows.push(processed.record);
            }
        }
        let features_path = out_dir.join(format!("features_{label}.csv"));
        write_feature_records(&features_path, &rows)?;
        report.artifacts.push(features_path.clone());

        // Association runs off the CSV, mirroring the on-disk interface.
        let feed = read_feature_records(&features_path)?;
        let records: Vec<MeasurementRecord> = feed
            .iter()
            .filter(|r| r.kept && r.e_db.is_finite())
            .map(|r| MeasurementRecord {
                capture_time: r.capture_time,
                tx_slot: r.tx_slot,
                mobile_coord: r.rx,
                energy_db: r.e_db,
            })
            .collect();
        let stats = bin_and_median(&records, &refs, num_slots, Some(cfg.rti.assoc_cutoff_m));
        kept_per_session.push(records.len());
        link_counts_per_session.push(stats.kept_records());
        dropped_per_session.push(stats.dropped_by_cutoff);

        let stats_path = out_dir.join(format!("linkstats_{label}.csv"));
        write_link_stats(&stats_path, &stats)?;
        report.artifacts.push(stats_path);
        session_stats.push(stats);
    }

    // Imaging geometry shared by every position.
    let region = Rect::new(
        Point2::new(lc.grid_region[0], lc.grid_region[1]),
        Point2::new(lc.grid_region[2], lc.grid_region[3]),
    );
    let grid = VoxelGrid::covering(region, cfg.rti.voxel_size_m, lc.grid_margin_voxels);
    let links: Vec<LinkGeometry> = (0..num_slots)
        .flat_map(|s| {
            let tx = point(lc.tx_slots[s]);
            refs.coords.iter().map(move |rc| LinkGeometry::new(tx, *rc))
        })
        .collect();
    let weights = build_weights(&links, &grid, cfg.rti.excess_path_len_m);
    let params = RtiParams {
        excess_path_len_m: cfg.rti.excess_path_len_m,
        reg_weight: cfg.rti.reg_weight,
        prior_variance: cfg.rti.prior_variance,
        corr_distance_m: cfg.rti.corr_distance_m,
    };

    let cal = &session_stats[0];
    let mut rows = Vec::new();
    for (i, occ) in session_stats.iter().enumerate().skip(1) {
        let label = &sessions[i].0;
        let y = delta_median(cal, occ)?;
        let y_path = out_dir.join(format!("yvec_{label}.csv"));
        write_y_vector(&y_path, occ, &y)?;
        report.artifacts.push(y_path);

        let image = solve_image(&weights, &grid, &y, &params)?;
        let image_csv = out_dir.join(format!("image_{label}.csv"));
        write_image_csv(&image_csv, &image)?;
        report.artifacts.push(image_csv);
        let image_pgm = out_dir.join(format!("image_{label}.pgm"));
        write_pgm(&image_pgm, &image)?;
        report.artifacts.push(image_pgm);

        let (estimate, _peak) = localize(&image);
        let truth = sessions[i].1.unwrap();
        rows.push(LocalizationRow {
            position_id: i,
            truth,
            estimate,
            error_m: localization_error(estimate, truth),
        });
    }

    let report_path = out_dir.join("localization_report.csv");
    write_localization_report(&report_path, &rows)?;
    report.artifacts.push(report_path);

    let mean_error_m = rows.iter().map(|r| r.error_m).sum::<f64>() / rows.len().max(1) as f64;
    for row in &rows {
        report.summary.push(format!(
            "position {}: error {:.3} m (true {:.2},{:.2} est {:.2},{:.2})",
            row.position_id, row.error_m, row.truth.x, row.truth.y, row.estimate.x, row.estimate.y
        ));
    }
    report
        .summary
        .push(format!("mean error: {mean_error_m:.3} m"));
    report.summary.push(format!(
        "references: {} (spacing < {} m), links: {}",
        refs.len(),
        cfg.rti.ref_max_spacing_m,
        links.len()
    ));

    report.localization = Some(LocalizationMetrics {
        rows,
        mean_error_m,
        num_references: refs.len(),
        num_links: links.len(),
        kept_per_session,
        link_counts_per_session,
        dropped_per_session,
    });
    report.finalize()
}

fn build_track(lc: &LocalizationConfig) -> Result<NodeTrajectory, PipelineError> {
    let mut waypoints: Vec<(f64, Point2)> = Vec::new();
    let mut t = 0.0;
    for (i, wall) in lc.ref_walls.iter().enumerate() {
        let a = point(wall[0]);
        let b = point(wall[1]);
        if let Some(&(_, prev)) = waypoints.last() {
            let transit = prev.distance(a);
            if transit > 0.0 {
                t += transit / lc.transit_speed_mps;
                waypoints.push((t, a));
            }
        } else {
            waypoints.push((t, a));
        }
        let len = a.distance(b);
        if len == 0.0 {
            return Err(PipelineError::Runtime(format!(
                "ref wall {i} has zero length"
            )));
        }
        t += len / lc.receiver_speed_mps;
        waypoints.push((t, b));
    }
    Ok(NodeTrajectory::new(waypoints, lc.receiver_speed_mps)?)
}
