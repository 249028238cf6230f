//! C ABI over the core sensing primitives: probe-pulse construction, the
//! early-energy feature, the presence detector, and the tomographic imager.
//! Handles are opaque; every call returns a status code and never unwinds
//! across the boundary.

// Wide flat argument lists are the point of a C constructor.
#![allow(clippy::too_many_arguments)]
// `!(x > 0.0)` in argument checks also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use mobrti::channel_sim::{gaussian_monocycle, Pulse};
use mobrti::cir_processing::{early_energy, time_align, CirError, SampledWaveform};
use mobrti::geometry::Point2;
use mobrti::presence_detector::{detector_update, DetectorConfig, DetectorState};
use mobrti::rti::{
    build_weights, localize, solve_image, ImageVector, LinkGeometry, RtiError, RtiParams,
    VoxelGrid, WeightMatrix,
};

/// Call outcome. Zero is success; anything else identifies the failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobrtiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    AlignmentFailed = 3,
    EmptyWindow = 4,
    DimensionMismatch = 5,
    SingularSystem = 6,
    Panic = 7,
}

/// Opaque probe pulse handle.
pub struct MobrtiPulse {
    pulse: Pulse,
}

/// Opaque streaming presence detector handle.
pub struct MobrtiDetector {
    config: DetectorConfig,
    state: DetectorState,
}

/// Opaque tomographic imager handle: voxel grid, link set, and solver
/// parameters. Weights are rebuilt lazily after link changes.
pub struct MobrtiImager {
    grid: VoxelGrid,
    params: RtiParams,
    links: Vec<LinkGeometry>,
    weights: Option<WeightMatrix>,
}

fn guarded<F: FnOnce() -> MobrtiStatus>(f: F) -> MobrtiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => MobrtiStatus::Panic,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mobrti_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build a band-limited probe pulse. On success `*out` owns the handle;
/// release it with `mobrti_pulse_destroy`.
///
/// # Safety
/// `out` must be a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn mobrti_pulse_create(
    center_freq_hz: f64,
    bandwidth_hz: f64,
    sample_period_s: f64,
    out: *mut *mut MobrtiPulse,
) -> MobrtiStatus {
    guarded(|| {
        if out.is_null() {
            return MobrtiStatus::NullPointer;
        }
        match gaussian_monocycle(center_freq_hz, bandwidth_hz, sample_period_s) {
            Ok(pulse) => {
                let handle = Box::new(MobrtiPulse { pulse });
                unsafe { *out = Box::into_raw(handle) };
                MobrtiStatus::Ok
            }
            Err(_) => MobrtiStatus::InvalidArgument,
        }
    })
}

/// Number of samples in the pulse; 0 for a null handle.
///
/// # Safety
/// `pulse` must be null or a live handle from `mobrti_pulse_create`.
#[no_mangle]
pub unsafe extern "C" fn mobrti_pulse_len(pulse: *const MobrtiPulse) -> usize {
    if pulse.is_null() {
        return 0;
    }
    unsafe { &*pulse }.pulse.len()
}

/// # Safety
/// `pulse` must be a handle returned by `mobrti_pulse_create`, not yet
/// destroyed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mobrti_pulse_destroy(pulse: *mut MobrtiPulse) {
    if !pulse.is_null() {
        drop(unsafe { Box::from_raw(pulse) });
    }
}

/// Align a raw capture against the pulse at threshold `rho` and return the
/// early-energy feature over the first `window_s` seconds, in dB. Writes the
/// alignment lag (in samples) to `out_lag` when non-null.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out_e_db` must be
/// writable; `out_lag` may be null.
#[no_mangle]
pub unsafe extern "C" fn mobrti_early_energy(
    pulse: *const MobrtiPulse,
    samples: *const f64,
    len: usize,
    sample_period_s: f64,
    rho: f64,
    window_s: f64,
    out_e_db: *mut f64,
    out_lag: *mut usize,
) -> MobrtiStatus {
    guarded(|| {
        if pulse.is_null() || samples.is_null() || out_e_db.is_null() {
            return MobrtiStatus::NullPointer;
        }
        if len == 0 || !(sample_period_s > 0.0) || !(window_s > 0.0) {
            return MobrtiStatus::InvalidArgument;
        }
        let pulse = unsafe { &*pulse };
        let data = unsafe { std::slice::from_raw_parts(samples, len) };
        let wf = SampledWaveform::new(data.to_vec(), sample_period_s);
        match time_align(&wf, &pulse.pulse, rho) {
            Ok(aligned) => {
                let e = early_energy(&aligned, window_s);
                unsafe {
                    *out_e_db = e.value_db;
                    if !out_lag.is_null() {
                        *out_lag = aligned.alignment_lag;
                    }
                }
                if e.is_usable() {
                    MobrtiStatus::Ok
                } else {
                    MobrtiStatus::EmptyWindow
                }
            }
            Err(CirError::NoAlignment { .. }) => MobrtiStatus::AlignmentFailed,
            Err(_) => MobrtiStatus::InvalidArgument,
        }
    })
}

/// Create a moving-average presence detector.
///
/// # Safety
/// `out` must be a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn mobrti_detector_create(
    tau: f64,
    short_len: usize,
    long_len: usize,
    event_window: usize,
    event_count_threshold: usize,
    out: *mut *mut MobrtiDetector,
) -> MobrtiStatus {
    guarded(|| {
        if out.is_null() {
            return MobrtiStatus::NullPointer;
        }
        let config = DetectorConfig {
            tau,
            short_len,
            long_len,
            event_window,
            event_count_threshold,
        };
        if config.validate().is_err() {
            return MobrtiStatus::InvalidArgument;
        }
        let handle = Box::new(MobrtiDetector {
            config,
            state: DetectorState::new(),
        });
        unsafe { *out = Box::into_raw(handle) };
        MobrtiStatus::Ok
    })
}

/// Feed one finite early-energy measurement (dB); reports the event and
/// presence flags for this step.
///
/// # Safety
/// `detector` must be a live handle from `mobrti_detector_create`;
/// `out_event` and `out_presence` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mobrti_detector_update(
    detector: *mut MobrtiDetector,
    e_db: f64,
    out_event: *mut bool,
    out_presence: *mut bool,
) -> MobrtiStatus {
    guarded(|| {
        if detector.is_null() || out_event.is_null() || out_presence.is_null() {
            return MobrtiStatus::NullPointer;
        }
        if !e_db.is_finite() {
            return MobrtiStatus::InvalidArgument;
        }
        let d = unsafe { &mut *detector };
        let step = detector_update(&mut d.state, &d.config, e_db);
        unsafe {
            *out_event = step.event;
            *out_presence = step.presence;
        }
        MobrtiStatus::Ok
    })
}

/// # Safety
/// `detector` must be a handle returned by `mobrti_detector_create`, not yet
/// destroyed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mobrti_detector_destroy(detector: *mut MobrtiDetector) {
    if !detector.is_null() {
        drop(unsafe { Box::from_raw(detector) });
    }
}

/// Create an imager over a row-major voxel grid with the given elliptical
/// weighting and regularization parameters.
///
/// # Safety
/// `out` must be a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn mobrti_imager_create(
    origin_x: f64,
    origin_y: f64,
    voxel_size: f64,
    nx: usize,
    ny: usize,
    excess_path_len_m: f64,
    reg_weight: f64,
    prior_variance: f64,
    corr_distance_m: f64,
    out: *mut *mut MobrtiImager,
) -> MobrtiStatus {
    guarded(|| {
        if out.is_null() {
            return MobrtiStatus::NullPointer;
        }
        if !(voxel_size > 0.0) || nx == 0 || ny == 0 {
            return MobrtiStatus::InvalidArgument;
        }
        let params = RtiParams {
            excess_path_len_m,
            reg_weight,
            prior_variance,
            corr_distance_m,
        };
        if params.validate().is_err() {
            return MobrtiStatus::InvalidArgument;
        }
        let handle = Box::new(MobrtiImager {
            grid: VoxelGrid::new(Point2::new(origin_x, origin_y), voxel_size, nx, ny),
            params,
            links: Vec::new(),
            weights: None,
        });
        unsafe { *out = Box::into_raw(handle) };
        MobrtiStatus::Ok
    })
}

/// Append one static link (transmitter and reference receiver coordinates).
///
/// # Safety
/// `imager` must be a live handle from `mobrti_imager_create`.
#[no_mangle]
pub unsafe extern "C" fn mobrti_imager_add_link(
    imager: *mut MobrtiImager,
    tx_x: f64,
    tx_y: f64,
    rx_x: f64,
    rx_y: f64,
) -> MobrtiStatus {
    guarded(|| {
        if imager.is_null() {
            return MobrtiStatus::NullPointer;
        }
        let tx = Point2::new(tx_x, tx_y);
        let rx = Point2::new(rx_x, rx_y);
        if !(tx.is_finite() && rx.is_finite()) || tx == rx {
            return MobrtiStatus::InvalidArgument;
        }
        let im = unsafe { &mut *imager };
        im.links.push(LinkGeometry::new(tx, rx));
        im.weights = None;
        MobrtiStatus::Ok
    })
}

/// Number of links added so far; 0 for a null handle.
///
/// # Safety
/// `imager` must be null or a live handle from `mobrti_imager_create`.
#[no_mangle]
pub unsafe extern "C" fn mobrti_imager_num_links(imager: *const MobrtiImager) -> usize {
    if imager.is_null() {
        return 0;
    }
    unsafe { &*imager }.links.len()
}

/// Number of voxels in the image; 0 for a null handle.
///
/// # Safety
/// `imager` must be null or a live handle from `mobrti_imager_create`.
#[no_mangle]
pub unsafe extern "C" fn mobrti_imager_num_voxels(imager: *const MobrtiImager) -> usize {
    if imager.is_null() {
        return 0;
    }
    unsafe { &*imager }.grid.num_voxels()
}

/// Solve the regularized least-squares image for the measurement vector `y`
/// (one entry per link, in insertion order) and write the voxel intensities
/// to `out_image` in row-major grid order.
///
/// # Safety
/// `y` must point to `y_len` readable doubles and `out_image` to
/// `mobrti_imager_num_voxels(imager)` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mobrti_imager_solve(
    imager: *mut MobrtiImager,
    y: *const f64,
    y_len: usize,
    out_image: *mut f64,
) -> MobrtiStatus {
    guarded(|| {
        if imager.is_null() || y.is_null() || out_image.is_null() {
            return MobrtiStatus::NullPointer;
        }
        let im = unsafe { &mut *imager };
        if y_len != im.links.len() {
            return MobrtiStatus::DimensionMismatch;
        }
        if im.weights.is_none() {
            im.weights = Some(build_weights(
                &im.links,
                &im.grid,
                im.params.excess_path_len_m,
            ));
        }
        let weights = im.weights.as_ref().unwrap();
        let y = unsafe { std::slice::from_raw_parts(y, y_len) };
        match solve_image(weights, &im.grid, y, &im.params) {
            Ok(image) => {
                let out =
                    unsafe { std::slice::from_raw_parts_mut(out_image, im.grid.num_voxels()) };
                out.copy_from_slice(&image.values);
                MobrtiStatus::Ok
            }
            Err(RtiError::SingularSystem) => MobrtiStatus::SingularSystem,
            Err(RtiError::DimensionMismatch { .. }) => MobrtiStatus::DimensionMismatch,
            Err(_) => MobrtiStatus::InvalidArgument,
        }
    })
}

/// Peak-intensity localization over an image produced by
/// `mobrti_imager_solve`: writes the argmax voxel centroid and its value.
///
/// # Safety
/// `image` must point to `image_len` readable doubles; the three outputs
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn mobrti_imager_localize(
    imager: *const MobrtiImager,
    image: *const f64,
    image_len: usize,
    out_x: *mut f64,
    out_y: *mut f64,
    out_peak: *mut f64,
) -> MobrtiStatus {
    guarded(|| {
        if imager.is_null()
            || image.is_null()
            || out_x.is_null()
            || out_y.is_null()
            || out_peak.is_null()
        {
            return MobrtiStatus::NullPointer;
        }
        let im = unsafe { &*imager };
        if image_len != im.grid.num_voxels() || image_len == 0 {
            return MobrtiStatus::DimensionMismatch;
        }
        let values = unsafe { std::slice::from_raw_parts(image, image_len) };
        let img = ImageVector {
            values: values.to_vec(),
            grid: im.grid,
        };
        let (p, peak) = localize(&img);
        unsafe {
            *out_x = p.x;
            *out_y = p.y;
            *out_peak = peak;
        }
        MobrtiStatus::Ok
    })
}

/// # Safety
/// `imager` must be a handle returned by `mobrti_imager_create`, not yet
/// destroyed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mobrti_imager_destroy(imager: *mut MobrtiImager) {
    if !imager.is_null() {
        drop(unsafe { Box::from_raw(imager) });
    }
}
