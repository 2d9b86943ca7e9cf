//! C ABI for `slitpath`.
//!
//! Configurations are opaque heap handles created by one of the
//! `slitpath_config_*` constructors and released with
//! [`slitpath_config_free`]. Every fallible call returns a
//! [`SlitpathStatus`]; on failure the message is available from
//! [`slitpath_last_error_message`] on the same thread. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use slitpath::analysis::{deviation_profile, find_spikes_and_peaks};
use slitpath::bohmian::velocity_profile;
use slitpath::config::{default_config, load_config};
use slitpath::model::validate_config_with;
use slitpath::propagators::wavefunction;
use slitpath::{Config, Error, ExperimentGeometry, Mode, PhysicalConstants, Point, Settings, SlitArray};

/// Opaque validated configuration.
pub struct SlitpathConfig {
    inner: Config,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitpathStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Parse = 4,
    Domain = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Values accepted by the `mode` arguments.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitpathMode {
    Classical = 0,
    Full = 1,
}

/// Physical inputs for [`slitpath_config_new`]. Numerical settings take
/// their defaults. A non-positive `hbar` or `electron_mass` selects the
/// CODATA value.
#[repr(C)]
pub struct SlitpathParams {
    pub hbar: f64,
    pub electron_mass: f64,
    pub source_distance_m: f64,
    pub detector_distance_m: f64,
    pub longitudinal_velocity_mps: f64,
    /// Strictly increasing slit centres, `slit_count` values.
    pub slit_centers_m: *const f64,
    pub slit_count: usize,
    pub slit_half_width_m: f64,
    pub include_nonclassical: bool,
}

/// Summary of a deviation profile along one detector line.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SlitpathReport {
    /// Largest relative deviation over peaks.
    pub max_relative_deviation: f64,
    /// Largest relative deviation over all floor-defined samples.
    pub max_defined_relative_deviation: f64,
    pub velocity_floor_mps: f64,
    pub spike_count: usize,
    pub peak_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SlitpathStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Validation(_) => SlitpathStatus::Validation,
            Error::Parse { .. } => SlitpathStatus::Parse,
            Error::Io(_) => SlitpathStatus::Io,
            Error::Domain(_) => SlitpathStatus::Domain,
            Error::NonConvergence { .. } | Error::StepFailure { .. } | Error::EmptyProfile => {
                SlitpathStatus::Numerical
            }
        };
        Failure(status, e.to_string())
    }
}

impl From<slitpath::ValidationError> for Failure {
    fn from(e: slitpath::ValidationError) -> Self {
        Error::from(e).into()
    }
}

fn null(what: &str) -> Failure {
    Failure(SlitpathStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(SlitpathStatus::InvalidArgument, message.into())
}

fn set_last_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SlitpathStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            SlitpathStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(Some(message));
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(Some(format!("internal panic: {message}")));
            SlitpathStatus::Panic
        }
    }
}

unsafe fn config_ref<'a>(config: *const SlitpathConfig) -> Result<&'a Config, Failure> {
    config.as_ref().map(|c| &c.inner).ok_or_else(|| null("config"))
}

unsafe fn out_mut<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| null(what))
}

unsafe fn input_slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output_slice<'a, T>(ptr: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

fn mode_from(mode: u32) -> Result<Mode, Failure> {
    match mode {
        0 => Ok(Mode::Classical),
        1 => Ok(Mode::Full),
        other => Err(invalid(format!("unknown mode {other}"))),
    }
}

fn store(out: &mut *mut SlitpathConfig, config: Config) {
    *out = Box::into_raw(Box::new(SlitpathConfig { inner: config }));
}

/// Message for the last failed call on this thread, or NULL after a
/// successful call. Valid until the next `slitpath_*` call on the same thread.
#[no_mangle]
pub extern "C" fn slitpath_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn slitpath_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Built-in three-slit configuration.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn slitpath_config_default(out: *mut *mut SlitpathConfig) -> SlitpathStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        store(out, default_config());
        Ok(())
    })
}

/// Load and validate a `key = value` configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn slitpath_config_load(
    path: *const c_char,
    out: *mut *mut SlitpathConfig,
) -> SlitpathStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not valid UTF-8"))?;
        store(out, load_config(path)?);
        Ok(())
    })
}

/// Build and validate a configuration from physical parameters.
///
/// # Safety
/// `params` must point to a readable [`SlitpathParams`] whose
/// `slit_centers_m` holds `slit_count` values; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn slitpath_config_new(
    params: *const SlitpathParams,
    out: *mut *mut SlitpathConfig,
) -> SlitpathStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let centers = input_slice(p.slit_centers_m, p.slit_count, "slit_centers_m")?.to_vec();
        let defaults = PhysicalConstants::default();
        let constants = PhysicalConstants {
            hbar: if p.hbar > 0.0 { p.hbar } else { defaults.hbar },
            electron_mass: if p.electron_mass > 0.0 { p.electron_mass } else { defaults.electron_mass },
        };
        let geometry = ExperimentGeometry {
            source_distance: p.source_distance_m,
            detector_distance: p.detector_distance_m,
            longitudinal_velocity: p.longitudinal_velocity_mps,
        };
        let settings = Settings {
            include_nonclassical: p.include_nonclassical,
            ..Settings::default()
        };
        let config = validate_config_with(constants, geometry, SlitArray::new(centers, p.slit_half_width_m), settings)?;
        store(out, config);
        Ok(())
    })
}

/// Release a configuration. NULL is ignored.
///
/// # Safety
/// `config` must come from a `slitpath_config_*` constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn slitpath_config_free(config: *mut SlitpathConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Inter-slit hop time for two slit centres, s.
///
/// # Safety
/// `config` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn slitpath_hop_time(
    config: *const SlitpathConfig,
    slit_i: f64,
    slit_j: f64,
    out: *mut f64,
) -> SlitpathStatus {
    guard(|| {
        let config = config_ref(config)?;
        let out = out_mut(out, "out")?;
        *out = slitpath::hop_time(slit_i, slit_j, config.constants())?;
        Ok(())
    })
}

/// Wavefunction at `(x, y)`, split into real and imaginary parts.
///
/// # Safety
/// `config` must be a live handle; `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn slitpath_wavefunction(
    config: *const SlitpathConfig,
    x: f64,
    y: f64,
    mode: u32,
    re: *mut f64,
    im: *mut f64,
) -> SlitpathStatus {
    guard(|| {
        let config = config_ref(config)?;
        let re = out_mut(re, "re")?;
        let im = out_mut(im, "im")?;
        let psi = wavefunction(config, Point::new(x, y), mode_from(mode)?)?;
        *re = psi.re;
        *im = psi.im;
        Ok(())
    })
}

/// Bohmian `v_y` at `n` heights on the line at distance `x`. Undefined
/// samples get `NaN` and `defined[i] = 0`.
///
/// # Safety
/// `ys` must hold `n` readable values; `v` and `defined` must hold `n` writable slots.
#[no_mangle]
pub unsafe extern "C" fn slitpath_velocity_profile(
    config: *const SlitpathConfig,
    x: f64,
    ys: *const f64,
    n: usize,
    mode: u32,
    v: *mut f64,
    defined: *mut u8,
) -> SlitpathStatus {
    guard(|| {
        let config = config_ref(config)?;
        let ys = input_slice(ys, n, "ys")?;
        let v = output_slice(v, n, "v")?;
        let defined = output_slice(defined, n, "defined")?;
        let profile = velocity_profile(config, x, ys, mode_from(mode)?)?;
        for (i, value) in profile.into_iter().enumerate() {
            v[i] = value.unwrap_or(f64::NAN);
            defined[i] = u8::from(value.is_some());
        }
        Ok(())
    })
}

/// Relative deviation `|v_full - v_classical| / |v_classical|` at `n`
/// heights, with spike/peak summary. `rel_diff` may be NULL; otherwise it
/// receives `n` values, `NaN` where not floor-defined.
///
/// # Safety
/// `ys` must hold `n` readable values; `rel_diff`, if not NULL, `n` writable
/// slots; `report` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn slitpath_deviation_report(
    config: *const SlitpathConfig,
    x: f64,
    ys: *const f64,
    n: usize,
    rel_diff: *mut f64,
    report: *mut SlitpathReport,
) -> SlitpathStatus {
    guard(|| {
        let config = config_ref(config)?;
        let ys = input_slice(ys, n, "ys")?;
        let report = out_mut(report, "report")?;
        if n == 0 {
            return Err(Error::EmptyProfile.into());
        }
        let profile = deviation_profile(config, x, ys)?;
        let summary = find_spikes_and_peaks(&profile, profile.velocity_floor)?;
        if !rel_diff.is_null() {
            let out = output_slice(rel_diff, n, "rel_diff")?;
            for (slot, s) in out.iter_mut().zip(&profile.samples) {
                *slot = if s.defined { s.rel_diff.unwrap_or(f64::NAN) } else { f64::NAN };
            }
        }
        *report = SlitpathReport {
            max_relative_deviation: summary.max_relative_deviation,
            max_defined_relative_deviation: profile.max_defined_relative().unwrap_or(f64::NAN),
            velocity_floor_mps: summary.velocity_floor_used,
            spike_count: summary.spike_positions.len(),
            peak_count: summary.peak_positions.len(),
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_a_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, SlitpathStatus::Panic);
        let message = unsafe { CStr::from_ptr(slitpath_last_error_message()) };
        assert!(message.to_str().unwrap().contains("boom"));
        assert_eq!(guard(|| Ok(())), SlitpathStatus::Ok);
        assert!(slitpath_last_error_message().is_null());
    }

    #[test]
    fn errors_map_to_statuses() {
        let f: Failure = Error::EmptyProfile.into();
        assert_eq!(f.0, SlitpathStatus::Numerical);
        let f: Failure = Error::Domain("x".into()).into();
        assert_eq!(f.0, SlitpathStatus::Domain);
        assert!(mode_from(2).is_err());
    }
}
