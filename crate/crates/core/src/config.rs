//! Experiment configuration: structured text (TOML) with nested sections,
//! unknown-key detection with nearest-name suggestions, and exhaustive
//! semantic validation.

use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::channel_sim::{SceneLayout, Wall};
use crate::geometry::{Point2, Rect, Segment};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("invalid configuration in {path}:\n{}", issues.join("\n"))]
    Invalid { path: String, issues: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    EnergyGap,
    Presence,
    Localization,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::EnergyGap => "energy_gap",
            ExperimentKind::Presence => "presence",
            ExperimentKind::Localization => "localization",
        }
    }
}

/// Channel synthesis and feature-extraction parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct ChannelConfig {
    pub center_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub sample_period_s: f64,
    /// Noise standard deviation relative to the direct-path peak amplitude.
    pub noise_rel: f64,
    /// Alignment correlation threshold rho.
    pub rho: f64,
    /// Early-energy window, seconds.
    pub early_window_s: f64,
    /// PDP bin width, seconds.
    pub pdp_bin_s: f64,
    pub max_reflection_order: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            center_freq_hz: 4.5e9,
            bandwidth_hz: 3.0e9,
            sample_period_s: 15.89e-12,
            noise_rel: 0.01,
            rho: 0.75,
            early_window_s: 3.0e-9,
            pdp_bin_s: 100.0e-12,
            max_reflection_order: 3,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct PersonConfig {
    pub radius_m: f64,
    pub shadow_loss_db: f64,
}

impl Default for PersonConfig {
    fn default() -> Self {
        Self {
            radius_m: 0.15,
            shadow_loss_db: 10.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct RtiConfig {
    pub excess_path_len_m: f64,
    pub voxel_size_m: f64,
    pub reg_weight: f64,
    pub prior_variance: f64,
    pub corr_distance_m: f64,
    pub ref_max_spacing_m: f64,
    pub assoc_cutoff_m: f64,
}

impl Default for RtiConfig {
    fn default() -> Self {
        Self {
            excess_path_len_m: 0.05,
            voxel_size_m: 0.15,
            reg_weight: 100.0,
            prior_variance: 1.0,
            corr_distance_m: 0.5,
            ref_max_spacing_m: 0.12,
            assoc_cutoff_m: 0.10,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct EnergyGapConfig {
    pub tx: [f64; 2],
    pub rx_base: [f64; 2],
    #[serde(default = "default_dir_y")]
    pub displacement_dir: [f64; 2],
    #[serde(default = "default_step")]
    pub displacement_step_m: f64,
    #[serde(default = "default_positions")]
    pub num_positions: usize,
    pub person_position: [f64; 2],
}

fn default_dir_y() -> [f64; 2] {
    [0.0, 1.0]
}
fn default_step() -> f64 {
    0.02
}
fn default_positions() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize)]
pub struct CrossingConfig {
    /// Instant the walker's centre crosses the link line, seconds.
    pub time_s: f64,
    /// Crossing abscissa along the link, metres.
    pub x_m: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StandingConfig {
    pub start_s: f64,
    pub duration_s: f64,
    pub x_m: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PresenceVariantConfig {
    pub swing_amplitude_m: f64,
    #[serde(default)]
    pub crossings: Vec<CrossingConfig>,
    #[serde(default)]
    pub standings: Vec<StandingConfig>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PresenceConfig {
    pub tx: [f64; 2],
    pub rx_base: [f64; 2],
    #[serde(default = "default_dir_y")]
    pub swing_dir: [f64; 2],
    #[serde(default = "default_half_period")]
    pub swing_half_period_s: f64,
    #[serde(default = "default_presence_cadence")]
    pub capture_cadence_s: f64,
    pub duration_s: f64,
    #[serde(default = "default_walk_speed")]
    pub walk_speed_mps: f64,
    #[serde(default = "default_walk_extent")]
    pub walk_extent_m: f64,
    #[serde(default = "default_truth_margin")]
    pub truth_margin_m: f64,
    #[serde(default = "default_episode_gap")]
    pub episode_gap_s: f64,
    pub variants: Vec<PresenceVariantConfig>,
}

fn default_half_period() -> f64 {
    2.0
}
fn default_presence_cadence() -> f64 {
    1.0 / 3.0
}
fn default_walk_speed() -> f64 {
    0.46
}
fn default_walk_extent() -> f64 {
    1.2
}
fn default_truth_margin() -> f64 {
    1.0
}
fn default_episode_gap() -> f64 {
    2.0
}

#[derive(Debug, Clone, Deserialize)]
pub struct LocalizationConfig {
    pub tx_slots: Vec<[f64; 2]>,
    /// Receiver tracks, one per wall; also the reference receiver walls.
    pub ref_walls: Vec<[[f64; 2]; 2]>,
    #[serde(default = "default_rx_speed")]
    pub receiver_speed_mps: f64,
    #[serde(default = "default_transit_speed")]
    pub transit_speed_mps: f64,
    #[serde(default = "default_loc_cadence")]
    pub capture_cadence_s: f64,
    #[serde(default = "default_poslog_cadence")]
    pub position_log_cadence_s: f64,
    pub standing_positions: Vec<[f64; 2]>,
    /// Monitored region [min_x, min_y, max_x, max_y] the image grid covers.
    pub grid_region: [f64; 4],
    #[serde(default = "default_grid_margin")]
    pub grid_margin_voxels: usize,
}

fn default_rx_speed() -> f64 {
    0.08
}
fn default_transit_speed() -> f64 {
    0.4
}
fn default_loc_cadence() -> f64 {
    0.1
}
fn default_poslog_cadence() -> f64 {
    0.3
}
fn default_grid_margin() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
struct RawExperiment {
    kind: String,
    #[serde(default = "default_seed")]
    seed: u64,
    scene: String,
    #[serde(default)]
    channel: ChannelConfig,
    #[serde(default)]
    person: PersonConfig,
    #[serde(default)]
    detector: DetectorSection,
    #[serde(default)]
    rti: RtiConfig,
    energy_gap: Option<EnergyGapConfig>,
    presence: Option<PresenceConfig>,
    localization: Option<LocalizationConfig>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
struct DetectorSection {
    tau: f64,
    short_len: usize,
    long_len: usize,
    event_window: usize,
    event_count_threshold: usize,
}

impl Default for DetectorSection {
    fn default() -> Self {
        let d = crate::presence_detector::DetectorConfig::default();
        Self {
            tau: d.tau,
            short_len: d.short_len,
            long_len: d.long_len,
            event_window: d.event_window,
            event_count_threshold: d.event_count_threshold,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawScene {
    bounds: [f64; 4],
    #[serde(default)]
    walls: Vec<RawWall>,
}

#[derive(Debug, Clone, Deserialize)]
struct RawWall {
    a: [f64; 2],
    b: [f64; 2],
    transmission_loss_db: f64,
    reflection_coeff: f64,
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub scene_path: PathBuf,
    pub scene: SceneLayout,
    pub channel: ChannelConfig,
    pub person: PersonConfig,
    pub detector: crate::presence_detector::DetectorConfig,
    pub rti: RtiConfig,
    pub energy_gap: Option<EnergyGapConfig>,
    pub presence: Option<PresenceConfig>,
    pub localization: Option<LocalizationConfig>,
    /// `KEY=VALUE` overrides applied on top of the file, echoed into reports.
    pub overrides: Vec<String>,
}

pub fn point(xy: [f64; 2]) -> Point2 {
    Point2::new(xy[0], xy[1])
}

fn parse_document(text: &str) -> Result<toml::Value, toml::de::Error> {
    text.parse::<toml::Table>().map(toml::Value::Table)
}

/// Parse, override, and validate a config file. Semantic violations are
/// collected exhaustively rather than reported first-failure.
pub fn validate_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut value: toml::Value =
        parse_document(&text).map_err(|e: toml::de::Error| ConfigError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;

    let mut issues = Vec::new();
    check_unknown_keys(&value, &EXPERIMENT_SCHEMA, "", &mut issues);

    for ov in overrides {
        if let Err(msg) = apply_override(&mut value, ov) {
            issues.push(msg);
        }
    }

    if !issues.is_empty() {
        return Err(ConfigError::Invalid {
            path: path.display().to_string(),
            issues,
        });
    }

    let raw: RawExperiment = value
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;

    resolve(raw, path, overrides)
}

fn resolve(
    raw: RawExperiment,
    path: &Path,
    overrides: &[String],
) -> Result<ExperimentConfig, ConfigError> {
    let mut issues = Vec::new();

    let kind = match raw.kind.as_str() {
        "energy_gap" => Some(ExperimentKind::EnergyGap),
        "presence" => Some(ExperimentKind::Presence),
        "localization" => Some(ExperimentKind::Localization),
        other => {
            issues.push(format!(
                "kind: unknown experiment kind {other:?} (expected energy_gap, presence, or localization)"
            ));
            None
        }
    };

    // The scene path is resolved relative to the config file.
    let scene_path = path.parent().unwrap_or(Path::new(".")).join(&raw.scene);
    let scene = match load_scene(&scene_path) {
        Ok(s) => Some(s),
        Err(e) => {
            issues.push(format!("scene: {e}"));
            None
        }
    };

    let ch = &raw.channel;
    if !(ch.sample_period_s > 0.0) {
        issues.push("channel.sample_period_s: must be > 0".into());
    }
    if !(ch.bandwidth_hz > 0.0) {
        issues.push("channel.bandwidth_hz: must be > 0".into());
    }
    if ch.center_freq_hz - ch.bandwidth_hz / 2.0 <= 0.0 {
        issues.push("channel: center_freq_hz - bandwidth_hz/2 must be > 0".into());
    }
    if !(ch.rho > 0.0 && ch.rho < 1.0) {
        issues.push("channel.rho: must be in (0, 1)".into());
    }
    if !(ch.noise_rel >= 0.0) {
        issues.push("channel.noise_rel: must be >= 0".into());
    }
    if !(ch.early_window_s > 0.0) {
        issues.push("channel.early_window_s: must be > 0".into());
    }
    if ch.pdp_bin_s < ch.sample_period_s {
        issues.push("channel.pdp_bin_s: must be >= channel.sample_period_s".into());
    }

    if !(raw.person.radius_m > 0.0) {
        issues.push("person.radius_m: must be > 0".into());
    }
    if raw.person.shadow_loss_db < 0.0 {
        issues.push("person.shadow_loss_db: must be >= 0".into());
    }

    let detector = crate::presence_detector::DetectorConfig {
        tau: raw.detector.tau,
        short_len: raw.detector.short_len,
        long_len: raw.detector.long_len,
        event_window: raw.detector.event_window,
        event_count_threshold: raw.detector.event_count_threshold,
    };
    if let Err(e) = detector.validate() {
        issues.push(format!("detector: {e}"));
    }

    let rti = &raw.rti;
    for (name, v) in [
        ("rti.excess_path_len_m", rti.excess_path_len_m),
        ("rti.voxel_size_m", rti.voxel_size_m),
        ("rti.prior_variance", rti.prior_variance),
        ("rti.corr_distance_m", rti.corr_distance_m),
        ("rti.ref_max_spacing_m", rti.ref_max_spacing_m),
        ("rti.assoc_cutoff_m", rti.assoc_cutoff_m),
    ] {
        if !(v > 0.0) {
            issues.push(format!("{name}: must be > 0"));
        }
    }
    if !(rti.reg_weight >= 0.0) {
        issues.push("rti.reg_weight: must be >= 0".into());
    }

    match kind {
        Some(ExperimentKind::EnergyGap) => {
            if let Some(eg) = &raw.energy_gap {
                if !(eg.displacement_step_m > 0.0) {
                    issues.push("energy_gap.displacement_step_m: must be > 0".into());
                }
                if eg.num_positions == 0 {
                    issues.push("energy_gap.num_positions: must be >= 1".into());
                }
                if eg.tx == eg.rx_base {
                    issues.push("energy_gap: tx and rx_base must differ".into());
                }
            } else {
                issues.push("energy_gap: section required for kind = \"energy_gap\"".into());
            }
        }
        Some(ExperimentKind::Presence) => {
            if let Some(p) = &raw.presence {
                if !(p.capture_cadence_s > 0.0) {
                    issues.push("presence.capture_cadence_s: must be > 0".into());
                }
                if !(p.duration_s > 0.0) {
                    issues.push("presence.duration_s: must be > 0".into());
                }
                if !(p.walk_speed_mps > 0.0) {
                    issues.push("presence.walk_speed_mps: must be > 0".into());
                }
                if p.variants.is_empty() {
                    issues.push("presence.variants: at least one variant required".into());
                }
                for (vi, v) in p.variants.iter().enumerate() {
                    if !(v.swing_amplitude_m > 0.0) {
                        issues.push(format!(
                            "presence.variants[{vi}].swing_amplitude_m: must be > 0"
                        ));
                    }
                    let lead = p.walk_extent_m / p.walk_speed_mps;
                    for (ci, c) in v.crossings.iter().enumerate() {
                        if c.time_s - lead < 0.0 || c.time_s + lead > p.duration_s {
                            issues.push(format!(
                                "presence.variants[{vi}].crossings[{ci}]: walk [{:.2}, {:.2}] s leaves the experiment window",
                                c.time_s - lead,
                                c.time_s + lead
                            ));
                        }
                    }
                    for (si, s) in v.standings.iter().enumerate() {
                        if s.start_s < 0.0 || s.start_s + s.duration_s > p.duration_s {
                            issues.push(format!(
                                "presence.variants[{vi}].standings[{si}]: outside the experiment window"
                            ));
                        }
                    }
                }
            } else {
                issues.push("presence: section required for kind = \"presence\"".into());
            }
        }
        Some(ExperimentKind::Localization) => {
            if let Some(l) = &raw.localization {
                if l.tx_slots.is_empty() {
                    issues.push("localization.tx_slots: at least one transmitter".into());
                }
                if l.ref_walls.is_empty() {
                    issues.push("localization.ref_walls: at least one wall track".into());
                }
                if l.standing_positions.is_empty() {
                    issues.push("localization.standing_positions: at least one position".into());
                }
                for (name, v) in [
                    ("localization.receiver_speed_mps", l.receiver_speed_mps),
                    ("localization.transit_speed_mps", l.transit_speed_mps),
                    ("localization.capture_cadence_s", l.capture_cadence_s),
                    (
                        "localization.position_log_cadence_s",
                        l.position_log_cadence_s,
                    ),
                ] {
                    if !(v > 0.0) {
                        issues.push(format!("{name}: must be > 0"));
                    }
                }
                if l.grid_region[2] <= l.grid_region[0] || l.grid_region[3] <= l.grid_region[1] {
                    issues
                        .push("localization.grid_region: max corner must exceed min corner".into());
                }
            } else {
                issues.push("localization: section required for kind = \"localization\"".into());
            }
        }
        None => {}
    }

    if !issues.is_empty() {
        return Err(ConfigError::Invalid {
            path: path.display().to_string(),
            issues,
        });
    }

    Ok(ExperimentConfig {
        kind: kind.unwrap(),
        seed: raw.seed,
        scene_path,
        scene: scene.unwrap(),
        channel: raw.channel,
        person: raw.person,
        detector,
        rti: raw.rti,
        energy_gap: raw.energy_gap,
        presence: raw.presence,
        localization: raw.localization,
        overrides: overrides.to_vec(),
    })
}

fn load_scene(path: &Path) -> Result<SceneLayout, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let value: toml::Value =
        parse_document(&text).map_err(|e: toml::de::Error| ConfigError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
    let mut issues = Vec::new();
    check_unknown_keys(&value, &SCENE_SCHEMA, "", &mut issues);
    if !issues.is_empty() {
        return Err(ConfigError::Invalid {
            path: path.display().to_string(),
            issues,
        });
    }
    let raw: RawScene = value
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
    let scene = SceneLayout {
        bounds: Rect::new(
            Point2::new(raw.bounds[0], raw.bounds[1]),
            Point2::new(raw.bounds[2], raw.bounds[3]),
        ),
        walls: raw
            .walls
            .iter()
            .map(|w| Wall {
                segment: Segment::new(point(w.a), point(w.b)),
                transmission_loss_db: w.transmission_loss_db,
                reflection_coeff: w.reflection_coeff,
            })
            .collect(),
    };
    scene.validate().map_err(|e| ConfigError::Invalid {
        path: path.display().to_string(),
        issues: vec![e.to_string()],
    })?;
    Ok(scene)
}

// ---------------------------------------------------------------------------
// Key schema and override handling
// ---------------------------------------------------------------------------

/// Allowed keys per section; arrays of tables recurse through `children`.
struct KeySchema {
    section: &'static str,
    keys: &'static [&'static str],
    children: &'static [&'static KeySchema],
}

static CROSSING_SCHEMA: KeySchema = KeySchema {
    section: "crossings",
    keys: &["time_s", "x_m"],
    children: &[],
};
static STANDING_SCHEMA: KeySchema = KeySchema {
    section: "standings",
    keys: &["start_s", "duration_s", "x_m"],
    children: &[],
};
static VARIANT_SCHEMA: KeySchema = KeySchema {
    section: "variants",
    keys: &["swing_amplitude_m", "crossings", "standings"],
    children: &[&CROSSING_SCHEMA, &STANDING_SCHEMA],
};
static CHANNEL_SCHEMA: KeySchema = KeySchema {
    section: "channel",
    keys: &[
        "center_freq_hz",
        "bandwidth_hz",
        "sample_period_s",
        "noise_rel",
        "rho",
        "early_window_s",
        "pdp_bin_s",
        "max_reflection_order",
    ],
    children: &[],
};
static PERSON_SCHEMA: KeySchema = KeySchema {
    section: "person",
    keys: &["radius_m", "shadow_loss_db"],
    children: &[],
};
static DETECTOR_SCHEMA: KeySchema = KeySchema {
    section: "detector",
    keys: &[
        "tau",
        "short_len",
        "long_len",
        "event_window",
        "event_count_threshold",
    ],
    children: &[],
};
static RTI_SCHEMA: KeySchema = KeySchema {
    section: "rti",
    keys: &[
        "excess_path_len_m",
        "voxel_size_m",
        "reg_weight",
        "prior_variance",
        "corr_distance_m",
        "ref_max_spacing_m",
        "assoc_cutoff_m",
    ],
    children: &[],
};
static ENERGY_GAP_SCHEMA: KeySchema = KeySchema {
    section: "energy_gap",
    keys: &[
        "tx",
        "rx_base",
        "displacement_dir",
        "displacement_step_m",
        "num_positions",
        "person_position",
    ],
    children: &[],
};
static PRESENCE_SCHEMA: KeySchema = KeySchema {
    section: "presence",
    keys: &[
        "tx",
        "rx_base",
        "swing_dir",
        "swing_half_period_s",
        "capture_cadence_s",
        "duration_s",
        "walk_speed_mps",
        "walk_extent_m",
        "truth_margin_m",
        "episode_gap_s",
        "variants",
    ],
    children: &[&VARIANT_SCHEMA],
};
static LOCALIZATION_SCHEMA: KeySchema = KeySchema {
    section: "localization",
    keys: &[
        "tx_slots",
        "ref_walls",
        "receiver_speed_mps",
        "transit_speed_mps",
        "capture_cadence_s",
        "position_log_cadence_s",
        "standing_positions",
        "grid_region",
        "grid_margin_voxels",
    ],
    children: &[],
};
static EXPERIMENT_SCHEMA: KeySchema = KeySchema {
    section: "",
    keys: &[
        "kind",
        "seed",
        "scene",
        "channel",
        "person",
        "detector",
        "rti",
        "energy_gap",
        "presence",
        "localization",
    ],
    children: &[
        &CHANNEL_SCHEMA,
        &PERSON_SCHEMA,
        &DETECTOR_SCHEMA,
        &RTI_SCHEMA,
        &ENERGY_GAP_SCHEMA,
        &PRESENCE_SCHEMA,
        &LOCALIZATION_SCHEMA,
    ],
};
static WALL_SCHEMA: KeySchema = KeySchema {
    section: "walls",
    keys: &["a", "b", "transmission_loss_db", "reflection_coeff"],
    children: &[],
};
static SCENE_SCHEMA: KeySchema = KeySchema {
    section: "",
    keys: &["bounds", "walls"],
    children: &[&WALL_SCHEMA],
};

fn check_unknown_keys(value: &toml::Value, schema: &KeySchema, at: &str, issues: &mut Vec<String>) {
    let Some(table) = value.as_table() else {
        return;
    };
    for (key, sub) in table {
        let here = if at.is_empty() {
            key.clone()
        } else {
            format!("{at}.{key}")
        };
        if !schema.keys.contains(&key.as_str()) {
            let mut msg = format!("unknown key `{here}`");
            if let Some(best) = nearest_key(key, schema.keys) {
                msg.push_str(&format!("; did you mean `{best}`?"));
            }
            issues.push(msg);
            continue;
        }
        if let Some(child) = schema.children.iter().find(|c| c.section == key.as_str()) {
            match sub {
                toml::Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        check_unknown_keys(item, child, &format!("{here}[{i}]"), issues);
                    }
                }
                other => check_unknown_keys(other, child, &here, issues),
            }
        }
    }
}

fn nearest_key<'a>(key: &str, candidates: &[&'a str]) -> Option<&'a str> {
    candidates
        .iter()
        .map(|c| (levenshtein(key, c), *c))
        .filter(|(d, _)| *d <= 3)
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c)
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Apply one `dotted.key=value` override onto the parsed tree. Values parse
/// as TOML scalars (numbers, booleans) and fall back to strings.
fn apply_override(root: &mut toml::Value, spec: &str) -> Result<(), String> {
    let Some((key_path, raw_value)) = spec.split_once('=') else {
        return Err(format!("override `{spec}` is not of the form KEY=VALUE"));
    };
    let parsed: toml::Value = match format!("v = {raw_value}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        _ => toml::Value::String(raw_value.to_string()),
    };

    let parts: Vec<&str> = key_path.split('.').collect();
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| format!("override `{spec}`: `{part}` is not a section"))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| format!("override `{spec}`: parent is not a section"))?;
    table.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}
