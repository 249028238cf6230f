use std::collections::VecDeque;

use super::{time_align, SampledWaveform};
use crate::channel_sim::Pulse;

/// Default ratio of a capture's total energy to the running median above
/// which the capture counts as interference-corrupted.
pub const DEFAULT_ENERGY_FACTOR: f64 = 10.0;

/// Number of recent kept captures whose energies feed the running median.
pub const DEFAULT_HISTORY_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateDecision {
    Keep,
    Discard,
}

/// Per-link gating state: the total energies of recently kept captures.
#[derive(Debug, Clone, Default)]
pub struct GateState {
    recent_energies: VecDeque<f64>,
    history_len: usize,
    energy_factor: f64,
}

impl GateState {
    pub fn new() -> Self {
        Self::with_params(DEFAULT_HISTORY_LEN, DEFAULT_ENERGY_FACTOR)
    }

    pub fn with_params(history_len: usize, energy_factor: f64) -> Self {
        Self {
            recent_energies: VecDeque::with_capacity(history_len),
            history_len: history_len.max(1),
            energy_factor,
        }
    }

    fn running_median(&self) -> Option<f64> {
        if self.recent_energies.is_empty() {
            return None;
        }
        let mut v: Vec<f64> = self.recent_energies.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = v.len();
        Some(if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        })
    }

    fn record_kept(&mut self, energy: f64) {
        if self.recent_energies.len() == self.history_len {
            self.recent_energies.pop_front();
        }
        self.recent_energies.push_back(energy);
    }

    /// Energy-median half of the gate, for callers that already aligned the
    /// capture: admits (and records) the energy unless it exceeds the factor
    /// times the running median.
    pub fn admit_energy(&mut self, energy: f64) -> bool {
        if let Some(median) = self.running_median() {
            if energy > self.energy_factor * median {
                return false;
            }
        }
        self.record_kept(energy);
        true
    }
}

/// Discard a capture when alignment fails or its total energy exceeds
/// `energy_factor` times the running median of recent kept captures on the
/// same link. The state is explicit and owned by the caller.
pub fn quality_gate(
    h: &SampledWaveform,
    template: &Pulse,
    rho: f64,
    state: &mut GateState,
) -> GateDecision {
    if time_align(h, template, rho).is_err() {
        return GateDecision::Discard;
    }
    if state.admit_energy(h.total_energy()) {
        GateDecision::Keep
    } else {
        GateDecision::Discard
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_sim::{gaussian_monocycle, synthesize_cir, PathComponent};
    use crate::geometry::Point2;

    const TS: f64 = 15.89e-12;

    fn pulse() -> Pulse {
        gaussian_monocycle(4.5e9, 3.0e9, TS).unwrap()
    }

    fn capture(amplitude: f64, seed: u64) -> SampledWaveform {
        let path = PathComponent {
            amplitude,
            delay_s: 2.0e-9,
            order: 0,
            polyline: vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)],
        };
        synthesize_cir(&[path], &pulse(), 10.0e-9, amplitude * 0.01, seed).unwrap()
    }

    #[test]
    fn clean_captures_are_kept() {
        let mut state = GateState::new();
        for seed in 0..10 {
            assert_eq!(
                quality_gate(&capture(0.5, seed), &pulse(), 0.75, &mut state),
                GateDecision::Keep
            );
        }
    }

    #[test]
    fn pure_noise_is_discarded_for_alignment_failure() {
        let mut state = GateState::new();
        let noise = synthesize_cir(&[], &pulse(), 10.0e-9, 0.05, 3).unwrap();
        assert_eq!(
            quality_gate(&noise, &pulse(), 0.75, &mut state),
            GateDecision::Discard
        );
        assert!(state.recent_energies.is_empty());
    }

    #[test]
    fn interferer_at_fifty_times_energy_is_discarded() {
        let mut state = GateState::new();
        for seed in 0..20 {
            quality_gate(&capture(0.5, seed), &pulse(), 0.75, &mut state);
        }
        // sqrt(50) amplitude ratio = 50x energy; still aligns, so only the
        // median rule can reject it.
        let interferer = capture(0.5 * 50.0_f64.sqrt(), 99);
        assert_eq!(
            quality_gate(&interferer, &pulse(), 0.75, &mut state),
            GateDecision::Discard
        );
        // A subsequent normal capture is still kept.
        assert_eq!(
            quality_gate(&capture(0.5, 100), &pulse(), 0.75, &mut state),
            GateDecision::Keep
        );
    }
}
