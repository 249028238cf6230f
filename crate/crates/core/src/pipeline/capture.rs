use super::PipelineError;
use crate::channel_sim::{
    apply_person_shadowing, enumerate_paths, gaussian_monocycle, synthesize_cir, PersonState,
    Pulse, SceneLayout,
};
use crate::cir_processing::{
    early_energy, time_align, AlignedWaveform, GateState, SampledWaveform,
};
use crate::config::ChannelConfig;
use crate::geometry::Point2;
use crate::io::FeatureRecord;

/// How much waveform to keep past the earliest-path delay, so late-delay
/// analysis windows (the 10-20 ns fading band) stay populated.
const ANALYSIS_HORIZON_S: f64 = 25.0e-9;

/// Shared per-experiment capture machinery: probe pulse, scene, and channel
/// parameters.
pub struct CaptureEngine {
    pub pulse: Pulse,
    pub scene: SceneLayout,
    pub channel: ChannelConfig,
}

/// One fully processed capture.
pub struct ProcessedCapture {
    pub record: FeatureRecord,
    pub aligned: Option<AlignedWaveform>,
}

impl CaptureEngine {
    pub fn new(scene: SceneLayout, channel: ChannelConfig) -> Result<Self, PipelineError> {
        scene.validate()?;
        let pulse = gaussian_monocycle(
            channel.center_freq_hz,
            channel.bandwidth_hz,
            channel.sample_period_s,
        )?;
        Ok(Self {
            pulse,
            scene,
            channel,
        })
    }

    /// Simulate the raw waveform for one capture. Noise scales with the
    /// unshadowed direct-path amplitude so the receiver noise floor does not
    /// move when a person steps into the scene.
    pub fn simulate(
        &self,
        tx: Point2,
        rx: Point2,
        person: &PersonState,
        seed: u64,
    ) -> Result<SampledWaveform, PipelineError> {
        let paths = enumerate_paths(&self.scene, tx, rx, self.channel.max_reflection_order);
        let direct_amp = paths[0].amplitude.abs();
        let paths = apply_person_shadowing(&paths, person);

        let ts = self.channel.sample_period_s;
        let margin = (crate::channel_sim::INTERP_HALF_WIDTH + 8) as f64 * ts;
        let max_delay = paths.last().map(|p| p.delay_s).unwrap_or(0.0);
        let duration =
            (max_delay.max(paths[0].delay_s + ANALYSIS_HORIZON_S)) + self.pulse.duration() + margin;

        let noise_std = self.channel.noise_rel * direct_amp;
        Ok(synthesize_cir(
            &paths,
            &self.pulse,
            duration,
            noise_std,
            seed,
        )?)
    }

    /// Gate + align + early energy. Discarded captures yield a feature row
    /// with `kept = false` and a -inf energy.
    pub fn process(
        &self,
        wf: &SampledWaveform,
        tx_slot: usize,
        rx_logged: Point2,
        gate: &mut GateState,
    ) -> ProcessedCapture {
        let discarded = |why: &'static str| {
            let _ = why;
            ProcessedCapture {
                record: FeatureRecord {
                    capture_time: wf.capture_time,
                    tx_slot,
                    rx: rx_logged,
                    e_db: f64::NEG_INFINITY,
                    kept: false,
                },
                aligned: None,
            }
        };

        let Ok(aligned) = time_align(wf, &self.pulse, self.channel.rho) else {
            return discarded("alignment");
        };
        if !gate.admit_energy(wf.total_energy()) {
            return discarded("energy");
        }
        let e = early_energy(&aligned, self.channel.early_window_s);
        ProcessedCapture {
            record: FeatureRecord {
                capture_time: wf.capture_time,
                tx_slot,
                rx: rx_logged,
                e_db: e.value_db,
                kept: e.is_usable(),
            },
            aligned: Some(aligned),
        }
    }

    /// Simulate and process in one step.
    #[allow(clippy::too_many_arguments)]
    pub fn capture(
        &self,
        t: f64,
        tx: Point2,
        tx_slot: usize,
        rx_true: Point2,
        rx_logged: Point2,
        person: &PersonState,
        seed: u64,
        gate: &mut GateState,
    ) -> Result<ProcessedCapture, PipelineError> {
        let wf = self
            .simulate(tx, rx_true, person, seed)?
            .with_meta(t, tx, rx_true);
        Ok(self.process(&wf, tx_slot, rx_logged, gate))
    }
}
