//! C interface to `bellnoise`.
//!
//! Every fallible function returns a [`BnStatus`]; on failure the message is
//! available from [`bn_last_error`] on the same thread until the next
//! failing call. Handles come from `bn_scenario_parse`, `bn_scenario_preset`
//! and `bn_scenario_run` and are released with the matching `*_free`.
//!
//! Operators cross the boundary as two arrays of 16 doubles (real and
//! imaginary parts) in row-major order over the basis
//! `{↑↓, ↓↑, ↑↑, ↓↓}`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use bellnoise::analytic::{self, Regime};
use bellnoise::entanglement::concurrence_wootters;
use bellnoise::operators::{bell_state, BellState, TwoQubitOperator, C64};
use bellnoise::runner::run_scenario_with_threads;
use bellnoise::scenario::{preset, Method, Scenario};
use bellnoise::trace::ConcurrenceTrace;
use bellnoise::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    MethodGeometry = 4,
    Numerical = 5,
    GridMismatch = 6,
    NotDensityMatrix = 7,
    NotXcorr = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BnBellState {
    PsiMinus = 0,
    PsiPlus = 1,
    PhiPlus = 2,
    PhiMinus = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BnMethod {
    Analytic = 0,
    Qsba = 1,
    Cumulant2 = 2,
    MonteCarlo = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BnGeometry {
    Dephasing = 0,
    Isotropic = 1,
    Transverse = 2,
}

/// One row of a concurrence trace. `stderr` is NaN for deterministic
/// methods.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BnTraceRow {
    pub t: f64,
    pub method: BnMethod,
    pub state: BnBellState,
    pub concurrence: f64,
    pub stderr: f64,
}

/// Validated simulation scenario.
pub struct BnScenario(Scenario);

/// Concurrence trace produced by [`bn_scenario_run`].
pub struct BnTrace(ConcurrenceTrace);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BnStatus {
    match e {
        Error::InvalidArgument(_) | Error::UnsupportedNoise(_) => BnStatus::InvalidArgument,
        Error::Config { .. } | Error::Trace { .. } => BnStatus::Config,
        Error::MethodGeometry { .. } => BnStatus::MethodGeometry,
        Error::Numerical(_) => BnStatus::Numerical,
        Error::GridMismatch(_) => BnStatus::GridMismatch,
        Error::NotDensityMatrix => BnStatus::NotDensityMatrix,
        Error::NotXcorr => BnStatus::NotXcorr,
        Error::Io(_) => BnStatus::Io,
    }
}

/// Runs `f`, recording errors and panics in the thread-local slot.
fn guard(f: impl FnOnce() -> Result<(), BnStatus>) -> BnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BnStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            BnStatus::Panic
        }
    }
}

fn fail(e: Error) -> BnStatus {
    let s = status_of(&e);
    set_last_error(e.to_string());
    s
}

fn null(name: &str) -> BnStatus {
    set_last_error(format!("`{name}` is NULL"));
    BnStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, BnStatus> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(Error::InvalidArgument(format!("`{name}` is not UTF-8"))))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, BnStatus> {
    p.as_mut().ok_or_else(|| null(name))
}

fn bell(s: BnBellState) -> BellState {
    match s {
        BnBellState::PsiMinus => BellState::PsiMinus,
        BnBellState::PsiPlus => BellState::PsiPlus,
        BnBellState::PhiPlus => BellState::PhiPlus,
        BnBellState::PhiMinus => BellState::PhiMinus,
    }
}

fn bn_bell(s: BellState) -> BnBellState {
    match s {
        BellState::PsiMinus => BnBellState::PsiMinus,
        BellState::PsiPlus => BnBellState::PsiPlus,
        BellState::PhiPlus => BnBellState::PhiPlus,
        BellState::PhiMinus => BnBellState::PhiMinus,
    }
}

fn bn_method(m: Method) -> BnMethod {
    match m {
        Method::Analytic => BnMethod::Analytic,
        Method::Qsba => BnMethod::Qsba,
        Method::Cumulant2 => BnMethod::Cumulant2,
        Method::MonteCarlo => BnMethod::MonteCarlo,
    }
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Writes the density matrix of a Bell state.
///
/// # Safety
/// `re` and `im` must each point to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bn_bell_state(state: BnBellState, re: *mut f64, im: *mut f64) -> BnStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let m = bell_state(bell(state));
        for i in 0..4 {
            for j in 0..4 {
                let z = m.get(i, j);
                *re.add(4 * i + j) = z.re;
                *im.add(4 * i + j) = z.im;
            }
        }
        Ok(())
    })
}

/// Wootters concurrence of a density matrix.
///
/// # Safety
/// `re` and `im` must each point to 16 readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bn_concurrence(re: *const f64, im: *const f64, out: *mut f64) -> BnStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let out = out_arg(out, "out")?;
        let entries: Vec<C64> = (0..16).map(|k| C64::new(*re.add(k), *im.add(k))).collect();
        let rho = TwoQubitOperator::from_row_slice(&entries).map_err(fail)?;
        *out = concurrence_wootters(&rho).map_err(fail)?.value;
        Ok(())
    })
}

/// Closed-form concurrence under white noise of the given geometry, or
/// under dephasing when `geometry` is dephasing (then `t_white` is the
/// white-noise time and `gamma` the cross-correlation).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bn_white_concurrence(
    geometry: BnGeometry,
    state: BnBellState,
    gamma: f64,
    t_white: f64,
    t: f64,
    out: *mut f64,
) -> BnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = bell(state);
        *out = match geometry {
            BnGeometry::Dephasing => {
                let valid = (0.0..=1.0).contains(&gamma) && t_white > 0.0 && t >= 0.0;
                if !valid {
                    return Err(fail(Error::InvalidArgument(
                        "need 0 <= gamma <= 1, T > 0, t >= 0".into(),
                    )));
                }
                analytic::dephasing_concurrence(s, t / t_white, gamma * t / t_white)
            }
            BnGeometry::Isotropic => {
                analytic::isotropic_white_concurrence(s, gamma, t_white, t).map_err(fail)?
            }
            BnGeometry::Transverse => {
                analytic::transverse_white_concurrence(s, gamma, t_white, t).map_err(fail)?
            }
        };
        Ok(())
    })
}

/// First zero of the white-noise concurrence, `+inf` when there is none.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bn_sudden_death_time(
    geometry: BnGeometry,
    state: BnBellState,
    gamma: f64,
    t_white: f64,
    out: *mut f64,
) -> BnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let regime = match geometry {
            BnGeometry::Dephasing => Regime::Dephasing,
            BnGeometry::Isotropic => Regime::IsotropicWhite { gamma, t_white },
            BnGeometry::Transverse => Regime::TransverseWhite { gamma, t_white },
        };
        *out = analytic::sudden_death_time(bell(state), regime).map_err(fail)?;
        Ok(())
    })
}

/// Quasi-static concurrence for transverse noise; `correlated` selects
/// fully correlated rather than independent noise.
///
/// # Safety
/// `out` must be writable; `valid` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn bn_qsba_concurrence(
    state: BnBellState,
    correlated: bool,
    sigma1: f64,
    sigma2: f64,
    omega: f64,
    t: f64,
    out: *mut f64,
    valid: *mut bool,
) -> BnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let q = analytic::qsba_concurrence(bell(state), correlated, [sigma1, sigma2], omega, t)
            .map_err(fail)?;
        *out = q.value;
        if let Some(v) = valid.as_mut() {
            *v = q.valid;
        }
        Ok(())
    })
}

/// Parses a scenario from config text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bn_scenario_parse(
    text: *const c_char,
    out: *mut *mut BnScenario,
) -> BnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = Scenario::from_config_str(str_arg(text, "text")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(BnScenario(s)));
        Ok(())
    })
}

/// Loads a bundled preset (`fig1` … `fig6`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bn_scenario_preset(
    name: *const c_char,
    out: *mut *mut BnScenario,
) -> BnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = str_arg(name, "name")?;
        let s = preset(name)
            .ok_or_else(|| fail(Error::InvalidArgument(format!("no preset named `{name}`"))))?;
        *out = Box::into_raw(Box::new(BnScenario(s)));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bn_scenario_free(scenario: *mut BnScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs every method of the scenario. `threads == 0` uses the default
/// worker pool; the result does not depend on the thread count.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bn_scenario_run(
    scenario: *const BnScenario,
    threads: u32,
    out: *mut *mut BnTrace,
) -> BnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let threads = (threads > 0).then_some(threads as usize);
        let trace = run_scenario_with_threads(&s.0, threads).map_err(fail)?;
        *out = Box::into_raw(Box::new(BnTrace(trace)));
        Ok(())
    })
}

/// # Safety
/// `trace` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bn_trace_len(trace: *const BnTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.rows().len())
}

/// # Safety
/// `trace` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bn_trace_row(
    trace: *const BnTrace,
    index: usize,
    out: *mut BnTraceRow,
) -> BnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        let r = t.0.rows().get(index).ok_or_else(|| {
            fail(Error::InvalidArgument(format!(
                "row {index} out of range ({} rows)",
                t.0.rows().len()
            )))
        })?;
        *out = BnTraceRow {
            t: r.t,
            method: bn_method(r.method),
            state: bn_bell(r.state),
            concurrence: r.concurrence,
            stderr: r.stderr.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Writes the trace as CSV.
///
/// # Safety
/// `trace` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bn_trace_write_csv(
    trace: *const BnTrace,
    path: *const c_char,
) -> BnStatus {
    guard(|| {
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        t.0.save(Path::new(str_arg(path, "path")?)).map_err(fail)
    })
}

/// # Safety
/// `trace` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bn_trace_free(trace: *mut BnTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}
