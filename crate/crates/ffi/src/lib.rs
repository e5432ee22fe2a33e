//! C API over the road alignment library.
//!
//! Every function returns an [`RaStatus`]. On failure a message is kept per
//! thread and can be read with [`ra_last_error_message`]. Handles are opaque and
//! must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use roadalign::cli::{run_experiment, RunArgs};
use roadalign::config::RunConfig;
use roadalign::moo::{seed_alignment, BiObjectiveProblem, RoadProblem};
use roadalign::terrain::{ElevationRaster, TerrainGrid};
use roadalign::Error;

/// Status codes. The non-zero error classes match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaStatus {
    Ok = 0,
    OutputError = 1,
    ConfigError = 2,
    TerrainError = 3,
    SeedingError = 4,
    SolverError = 5,
    NullPointer = 10,
    InvalidArgument = 11,
    Panic = 12,
}

impl RaStatus {
    fn from_error(e: &Error) -> Self {
        match e.exit_code() {
            1 => RaStatus::OutputError,
            2 => RaStatus::ConfigError,
            3 => RaStatus::TerrainError,
            4 => RaStatus::SeedingError,
            _ => RaStatus::SolverError,
        }
    }
}

/// Loaded terrain.
pub struct RaTerrain {
    grid: TerrainGrid,
}

/// A configured alignment problem (terrain, endpoints, costs, constraints).
pub struct RaProblem {
    problem: RoadProblem,
}

/// Costs and feasibility of one design.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RaCostBreakdown {
    pub v_cut: f64,
    pub v_fill: f64,
    pub length: f64,
    pub cost_earthwork: f64,
    pub cost_utility: f64,
    /// 1 when every constraint holds.
    pub feasible: i32,
    /// Largest signed violation (≤ 0 when feasible).
    pub worst_violation: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), (RaStatus, String)>) -> RaStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RaStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RaStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (RaStatus, String) {
    (RaStatus::from_error(&e), e.to_string())
}

fn null(what: &str) -> (RaStatus, String) {
    (RaStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, (RaStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RaStatus::InvalidArgument, format!("`{what}` is not UTF-8")))?;
    Ok(PathBuf::from(s))
}

/// Message describing the last failure on this thread, or NULL. The pointer is
/// valid until the next API call on the same thread.
#[no_mangle]
pub extern "C" fn ra_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Loads an ASCII grid terrain file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_terrain_load(path: *const c_char, out: *mut *mut RaTerrain) -> RaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = path_arg(path, "path")?;
        let grid = TerrainGrid::load_ascii(&path).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(RaTerrain { grid }));
        Ok(())
    })
}

/// Builds a terrain from `n_cols × n_rows` samples, row 0 at `origin_y`, row-major.
///
/// # Safety
/// `values` must point to `n_cols * n_rows` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_terrain_from_raster(
    origin_x: f64,
    origin_y: f64,
    spacing: f64,
    n_cols: usize,
    n_rows: usize,
    values: *const f64,
    out: *mut *mut RaTerrain,
) -> RaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        let len = n_cols
            .checked_mul(n_rows)
            .ok_or((RaStatus::InvalidArgument, "raster size overflows".to_string()))?;
        let raster = ElevationRaster {
            origin_x,
            origin_y,
            spacing,
            n_cols,
            n_rows,
            values: std::slice::from_raw_parts(values, len).to_vec(),
        };
        let grid = TerrainGrid::from_raster(&raster).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(RaTerrain { grid }));
        Ok(())
    })
}

/// Ground elevation at `(x, y)`.
///
/// # Safety
/// `terrain` must come from a `ra_terrain_*` constructor; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_terrain_elevation(
    terrain: *const RaTerrain,
    x: f64,
    y: f64,
    out: *mut f64,
) -> RaStatus {
    guard(|| {
        let t = terrain.as_ref().ok_or_else(|| null("terrain"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = t.grid.ground_elevation(x, y).map_err(lib_err)?;
        Ok(())
    })
}

/// # Safety
/// `terrain` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ra_terrain_free(terrain: *mut RaTerrain) {
    if !terrain.is_null() {
        drop(Box::from_raw(terrain));
    }
}

/// Reads a run config and its terrain.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_problem_from_config(
    config_path: *const c_char,
    out: *mut *mut RaProblem,
) -> RaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = path_arg(config_path, "config_path")?;
        let cfg = RunConfig::load(&path).map_err(lib_err)?;
        let problem = cfg.build_problem().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(RaProblem { problem }));
        Ok(())
    })
}

/// Length of the flat design vector `[X, Y, R, Z]`, or 0 for a NULL handle.
///
/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_problem_dimension(problem: *const RaProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.problem.dimension())
}

/// Writes the feasible seed design into `out`.
///
/// # Safety
/// `problem` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ra_problem_seed(problem: *const RaProblem, out: *mut f64, len: usize) -> RaStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let seed = seed_alignment(&p.problem).map_err(lib_err)?.to_flat();
        if len != seed.len() {
            return Err((
                RaStatus::InvalidArgument,
                format!("buffer holds {len} values, design has {}", seed.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&seed);
        Ok(())
    })
}

/// Costs one flat design and checks its constraints.
///
/// # Safety
/// `problem` must be a live handle; `x` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_problem_evaluate(
    problem: *const RaProblem,
    x: *const f64,
    len: usize,
    out: *mut RaCostBreakdown,
) -> RaStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if x.is_null() {
            return Err(null("x"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let x = std::slice::from_raw_parts(x, len);
        let e = p.problem.evaluate_flat(x).map_err(lib_err)?;
        *out = RaCostBreakdown {
            v_cut: e.costs.v_cut,
            v_fill: e.costs.v_fill,
            length: e.costs.length,
            cost_earthwork: e.costs.cost_earthwork,
            cost_utility: e.costs.cost_utility,
            feasible: e.constraints.feasible as i32,
            worst_violation: e.constraints.worst,
        };
        Ok(())
    })
}

/// # Safety
/// `problem` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ra_problem_free(problem: *mut RaProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs the experiment described by a config file and writes its outputs.
/// `out_dir` may be NULL to use the directory named in the config.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_dir` NULL or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ra_run_experiment(config_path: *const c_char, out_dir: *const c_char) -> RaStatus {
    guard(|| {
        let config = path_arg(config_path, "config_path")?;
        let out = if out_dir.is_null() {
            None
        } else {
            Some(path_arg(out_dir, "out_dir")?)
        };
        let args = RunArgs { config, out, seed: None, solver: None, budget: None };
        run_experiment(&args).map_err(lib_err)?;
        Ok(())
    })
}
