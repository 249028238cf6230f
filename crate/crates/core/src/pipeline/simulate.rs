use std::path::Path;

use super::{ensure_out_dir, time_grid, CaptureEngine, PipelineError, RunReport};
use crate::channel_sim::{sample_trajectory, NodeTrajectory, PersonState};
use crate::cir_processing::GateState;
use crate::config::{point, ExperimentConfig, ExperimentKind};
use crate::geometry::Point2;
use crate::io::{read_trace, write_feature_records, write_trace};
use crate::seed;

/// Trace generation: run the config's primary capture sequence, write every
/// raw waveform to the binary trace format, then read the traces back and
/// reduce them to the feature CSV.
pub fn run_simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport, PipelineError> {
    ensure_out_dir(out_dir)?;
    let traces_dir = out_dir.join("traces");
    std::fs::create_dir_all(&traces_dir).map_err(|e| crate::io::IoError::io(&traces_dir, e))?;
    let engine = CaptureEngine::new(cfg.scene.clone(), cfg.channel.clone())?;
    let mut report = RunReport::new(cfg.kind, out_dir, cfg.seed, &cfg.overrides);

    // Capture plan: the experiment's canonical empty-scene pass.
    let plan: Vec<(f64, Point2, Point2)> = match cfg.kind {
        ExperimentKind::EnergyGap => {
            let eg = cfg.energy_gap.as_ref().unwrap();
            let dir = point(eg.displacement_dir).normalized();
            (0..eg.num_positions)
                .map(|k| {
                    let rx = point(eg.rx_base) + dir * (k as f64 * eg.displacement_step_m);
                    (k as f64, point(eg.tx), rx)
                })
                .collect()
        }
        ExperimentKind::Presence => {
            let pc = cfg.presence.as_ref().unwrap();
            let variant = &pc.variants[0];
            let traj = NodeTrajectory::oscillation(
                point(pc.rx_base),
                point(pc.swing_dir).normalized(),
                variant.swing_amplitude_m,
                pc.swing_half_period_s,
                0.0,
                pc.duration_s,
            )?;
            time_grid(0.0, pc.duration_s, pc.capture_cadence_s)
                .into_iter()
                .map(|t| Ok((t, point(pc.tx), sample_trajectory(&traj, t)?)))
                .collect::<Result<_, PipelineError>>()?
        }
        ExperimentKind::Localization => {
            let lc = cfg.localization.as_ref().unwrap();
            let wall = &lc.ref_walls[0];
            let traj = NodeTrajectory::from_polyline(
                &[point(wall[0]), point(wall[1])],
                lc.receiver_speed_mps,
                0.0,
            )?;
            let (t0, t1) = traj.span();
            time_grid(t0, t1, lc.capture_cadence_s)
                .into_iter()
                .map(|t| Ok((t, point(lc.tx_slots[0]), sample_trajectory(&traj, t)?)))
                .collect::<Result<_, PipelineError>>()?
        }
    };

    let person = PersonState::absent();
    let mut trace_paths = Vec::with_capacity(plan.len());
    for (k, (t, tx, rx)) in plan.iter().enumerate() {
        let cap_seed = seed::derive_indexed(cfg.seed, "simulate", k as u64);
        let wf = engine
            .simulate(*tx, *rx, &person, cap_seed)?
            .with_meta(*t, *tx, *rx);
        let path = traces_dir.join(format!("cap_{k:05}.uwbc"));
        write_trace(&path, &wf)?;
        trace_paths.push(path);
    }

    // Feature extraction reads the traces back from disk.
    let mut gate = GateState::new();
    let mut records = Vec::with_capacity(trace_paths.len());
    for path in &trace_paths {
        let wf = read_trace(path)?;
        let processed = engine.process(&wf, 1, wf.rx_coord, &mut gate);
        records.push(processed.record);
    }
    let features_path = out_dir.join("features.csv");
    write_feature_records(&features_path, &records)?;

    report.artifacts.extend(trace_paths);
    report.artifacts.push(features_path);
    report.summary.push(format!(
        "simulated {} captures; {} kept",
        records.len(),
        records.iter().filter(|r| r.kept).count()
    ));
    report.finalize()
}
