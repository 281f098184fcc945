//! C interface to `sphtherm`.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free` function. Every fallible call returns an [`SphStatus`];
//! on failure, [`sph_last_error_message`] describes the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sphtherm::cavity::{analyze, CavityConductivity, CavityConstants, CavityGeometry, CavitySpec};
use sphtherm::geometry::{load_profile, load_profile_file, ProfileSpec};
use sphtherm::particles::ResolutionSpec;
use sphtherm::pipeline::{simulate, with_threads, RunOptions, Simulation};
use sphtherm::solver::SolverConfig;
use sphtherm::Error;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphStatus {
    SphOk = 0,
    SphNullPointer = 1,
    SphInvalidArgument = 2,
    SphGeometryError = 3,
    SphCavityError = 4,
    SphParticleError = 5,
    SphSolverError = 6,
    SphReportError = 7,
    SphIoError = 8,
    SphConfigError = 9,
    /// The run stopped at `max_steps`; the simulation handle is still returned.
    SphNotConverged = 10,
    SphBufferTooSmall = 11,
    SphPanic = 12,
}

/// Profile document, validated.
pub struct SphProfile(ProfileSpec);

/// Solved simulation: particle field and report.
pub struct SphSimulation(Simulation);

/// Run parameters. Obtain defaults from [`sph_run_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SphRunOptions {
    /// Particle spacing, m.
    pub dp: f64,
    /// Smoothing length over spacing.
    pub h_over_dp: f64,
    /// Steady-state tolerance on max |dT/dt|, K/s.
    pub tolerance: f64,
    pub max_steps: u64,
    /// Worker threads; 0 uses the global pool.
    pub threads: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: SphStatus, msg: impl Into<String>) -> SphStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> SphStatus {
    match e {
        Error::Geometry(_) => SphStatus::SphGeometryError,
        Error::Cavity(_) | Error::CavityNamed { .. } => SphStatus::SphCavityError,
        Error::Particles(_) => SphStatus::SphParticleError,
        Error::Solver(_) => SphStatus::SphSolverError,
        Error::Report(_) => SphStatus::SphReportError,
        Error::Io { .. } => SphStatus::SphIoError,
        Error::Config(_) => SphStatus::SphConfigError,
    }
}

fn from_error(e: Error) -> SphStatus {
    fail(status_of(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> SphStatus) -> SphStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic".into());
        fail(SphStatus::SphPanic, format!("panic: {msg}"))
    })
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, SphStatus> {
    if s.is_null() {
        return Err(fail(SphStatus::SphNullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        fail(
            SphStatus::SphInvalidArgument,
            "string argument is not UTF-8",
        )
    })
}

unsafe fn store<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn sph_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library (not the last-error message).
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sph_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn sph_run_options_default() -> SphRunOptions {
    let res = ResolutionSpec::default();
    let solver = SolverConfig::default();
    SphRunOptions {
        dp: res.dp,
        h_over_dp: res.h_over_dp,
        tolerance: solver.steady_tolerance,
        max_steps: solver.max_steps,
        threads: 0,
    }
}

/// Loads and validates a TOML profile from a file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sph_profile_load_file(
    path: *const c_char,
    out: *mut *mut SphProfile,
) -> SphStatus {
    guard(|| {
        if out.is_null() {
            return fail(SphStatus::SphNullPointer, "null output pointer");
        }
        let path = match c_str(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_profile_file(path) {
            Ok(p) => {
                store(out, SphProfile(p));
                SphStatus::SphOk
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Parses and validates a TOML profile held in memory.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sph_profile_load_str(
    text: *const c_char,
    out: *mut *mut SphProfile,
) -> SphStatus {
    guard(|| {
        if out.is_null() {
            return fail(SphStatus::SphNullPointer, "null output pointer");
        }
        let text = match c_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_profile(text) {
            Ok(p) => {
                store(out, SphProfile(p));
                SphStatus::SphOk
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// # Safety
/// `profile` must be null or a handle from `sph_profile_load_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sph_profile_free(profile: *mut SphProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Solves `profile` to steady state. `options` may be null for defaults.
/// Returns `SphNotConverged` with a valid `*out` when the step limit is hit.
///
/// # Safety
/// `profile` must be a live handle, `options` null or valid, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sph_simulate(
    profile: *const SphProfile,
    options: *const SphRunOptions,
    out: *mut *mut SphSimulation,
) -> SphStatus {
    guard(|| {
        if profile.is_null() || out.is_null() {
            return fail(SphStatus::SphNullPointer, "null profile or output pointer");
        }
        let o = if options.is_null() {
            sph_run_options_default()
        } else {
            *options
        };
        let opts = RunOptions {
            resolution: ResolutionSpec {
                dp: o.dp,
                h_over_dp: o.h_over_dp,
                ..Default::default()
            },
            solver: SolverConfig {
                steady_tolerance: o.tolerance,
                max_steps: o.max_steps,
                ..Default::default()
            },
            record_history: false,
        };
        let threads = (o.threads > 0).then_some(o.threads as usize);
        let profile = &(*profile).0;
        match with_threads(threads, || simulate(profile, &opts)).and_then(|r| r) {
            Ok(sim) => {
                let converged = sim.state.converged;
                store(out, SphSimulation(sim));
                if converged {
                    SphStatus::SphOk
                } else {
                    fail(
                        SphStatus::SphNotConverged,
                        "steady state not reached within max_steps",
                    )
                }
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `sim` must be null or a handle from `sph_simulate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sph_simulation_free(sim: *mut SphSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Number of particles; 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sph_simulation_particle_count(sim: *const SphSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.0.particles.len())
}

/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sph_simulation_converged(sim: *const SphSimulation) -> bool {
    sim.as_ref().is_some_and(|s| s.0.state.converged)
}

/// Copies particle temperatures (°C) into `buf`, which holds `len` values.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn sph_simulation_copy_temperatures(
    sim: *const SphSimulation,
    buf: *mut f64,
    len: usize,
) -> SphStatus {
    guard(|| {
        let (Some(sim), false) = (sim.as_ref(), buf.is_null()) else {
            return fail(SphStatus::SphNullPointer, "null handle or buffer");
        };
        let t = &sim.0.particles.temperature;
        if len < t.len() {
            return fail(
                SphStatus::SphBufferTooSmall,
                format!("need {} values, got {len}", t.len()),
            );
        }
        ptr::copy_nonoverlapping(t.as_ptr(), buf, t.len());
        SphStatus::SphOk
    })
}

/// Copies particle positions as interleaved `x, y` pairs; `len` counts doubles.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn sph_simulation_copy_positions(
    sim: *const SphSimulation,
    buf: *mut f64,
    len: usize,
) -> SphStatus {
    guard(|| {
        let (Some(sim), false) = (sim.as_ref(), buf.is_null()) else {
            return fail(SphStatus::SphNullPointer, "null handle or buffer");
        };
        let pos = &sim.0.particles.position;
        if len < 2 * pos.len() {
            return fail(
                SphStatus::SphBufferTooSmall,
                format!("need {} values, got {len}", 2 * pos.len()),
            );
        }
        let out = std::slice::from_raw_parts_mut(buf, 2 * pos.len());
        for (pair, p) in out.chunks_exact_mut(2).zip(pos) {
            pair[0] = p.x;
            pair[1] = p.y;
        }
        SphStatus::SphOk
    })
}

/// Heat flow rates through the internal and external faces, W/m, both
/// positive for heat flowing from inside to outside. Either output may be null.
///
/// # Safety
/// `sim` must be a live handle; outputs null or valid.
#[no_mangle]
pub unsafe extern "C" fn sph_simulation_heat_flow(
    sim: *const SphSimulation,
    q_internal: *mut f64,
    q_external: *mut f64,
) -> SphStatus {
    guard(|| {
        let Some(sim) = sim.as_ref() else {
            return fail(SphStatus::SphNullPointer, "null handle");
        };
        if let Some(q) = q_internal.as_mut() {
            *q = sim.0.report.q_internal;
        }
        if let Some(q) = q_external.as_mut() {
            *q = sim.0.report.q_external;
        }
        SphStatus::SphOk
    })
}

/// Thermal conductance L2D, W/(m·K).
///
/// # Safety
/// `sim` must be a live handle and `l2d` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sph_simulation_l2d(sim: *const SphSimulation, l2d: *mut f64) -> SphStatus {
    guard(|| {
        let (Some(sim), Some(l2d)) = (sim.as_ref(), l2d.as_mut()) else {
            return fail(SphStatus::SphNullPointer, "null handle or output");
        };
        *l2d = sim.0.report.l2d;
        SphStatus::SphOk
    })
}

/// Full report as JSON; free with [`sph_string_free`]. Null on failure.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sph_simulation_report_json(sim: *const SphSimulation) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let Some(sim) = sim.as_ref() else {
            return fail(SphStatus::SphNullPointer, "null handle");
        };
        match CString::new(sim.0.report.to_json()) {
            Ok(s) => {
                out = s.into_raw();
                SphStatus::SphOk
            }
            Err(e) => fail(SphStatus::SphReportError, e.to_string()),
        }
    });
    out
}

/// Equivalent conductivity of a rectangular air cavity with default constants.
/// `width` is across the heat flow, `depth` along it, `gap` the opening (0 if closed).
/// A fully ventilated cavity sets `*exposed` and leaves `*k_eq` untouched.
///
/// # Safety
/// `k_eq` and `exposed` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sph_cavity_conductivity(
    width: f64,
    depth: f64,
    gap: f64,
    k_eq: *mut f64,
    exposed: *mut bool,
) -> SphStatus {
    guard(|| {
        let (Some(k_eq), Some(exposed)) = (k_eq.as_mut(), exposed.as_mut()) else {
            return fail(SphStatus::SphNullPointer, "null output pointer");
        };
        let spec = CavitySpec {
            geometry: CavityGeometry::Rectangle { width, depth },
            gap_width: gap,
        };
        match analyze(&spec, &CavityConstants::default()) {
            Ok(a) => {
                match a.conductivity {
                    CavityConductivity::Conductive { k_eq: k } => {
                        *k_eq = k;
                        *exposed = false;
                    }
                    CavityConductivity::FullyVentilated => *exposed = true,
                }
                SphStatus::SphOk
            }
            Err(e) => from_error(e.into()),
        }
    })
}
