//! C ABI over `pathduality`.
//!
//! Objects are opaque handles created by `pd_*_new` / `pd_*_sample` /
//! `pd_*_load` and released with the matching `pd_*_free`. Every fallible
//! call returns a [`PdStatus`]; on failure `pd_last_error_message` holds a
//! description for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use pathduality::discrimination::{helstrom, min_error_solve, pairwise_bound, Ensemble, SolverOptions};
use pathduality::duality::{entanglement_witnesses, DualityOptions, RelationId, ScenarioAnalysis};
use pathduality::harness::{parse_scenario, sample_scenario, ScenarioFile};
use pathduality::interferometer::ScenarioSpec;
use pathduality::linalg::{Complex64, ComplexMatrix};
use pathduality::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidInput = 3,
    Precondition = 4,
    Parse = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdRelation {
    L1Memory = 0,
    L1NoMemory = 1,
    TwoPathEquality = 2,
    MixedState = 3,
    EntropicNoMemory = 4,
    EntropicMemory = 5,
    Accessible = 6,
    WitnessPurity = 7,
    WitnessCondEnt = 8,
}

fn relation_from_raw(r: i32) -> Option<RelationId> {
    Some(match r {
        0 => RelationId::L1Memory,
        1 => RelationId::L1NoMemory,
        2 => RelationId::TwoPathEquality,
        3 => RelationId::MixedState,
        4 => RelationId::EntropicNoMemory,
        5 => RelationId::EntropicMemory,
        6 => RelationId::Accessible,
        7 => RelationId::WitnessPurity,
        8 => RelationId::WitnessCondEnt,
        _ => return None,
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PdReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
    pub satisfied: bool,
    pub certified: bool,
    /// All intermediate derivation checks held.
    pub aux_ok: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PdDiscrimination {
    pub p_success: f64,
    pub certificate_gap: f64,
    pub dual_bound: f64,
    pub iterations: u64,
    pub converged: bool,
    pub certified: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PdWitnesses {
    /// `Tr ρ_A² - Tr ρ_AB²`
    pub purity_witness: f64,
    /// `S(B|A)` in bits
    pub cond_ent_witness: f64,
}

/// Opaque interferometer scenario.
pub struct PdScenario {
    spec: ScenarioSpec,
}

/// Opaque pure-state ensemble.
pub struct PdEnsemble {
    ensemble: Ensemble,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PdStatus {
    match e {
        Error::Parse { .. } => PdStatus::Parse,
        Error::Io(_) => PdStatus::Io,
        Error::Precondition(_) => PdStatus::Precondition,
        Error::InvalidConfig(_) => PdStatus::InvalidArgument,
        _ => PdStatus::InvalidInput,
    }
}

struct Fail(PdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PdStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PdStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            PdStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn complex_slice(re: *const f64, im: *const f64, len: usize, what: &str) -> Result<Vec<Complex64>, Fail> {
    if re.is_null() || im.is_null() {
        return Err(null(what));
    }
    let (re, im) = (slice::from_raw_parts(re, len), slice::from_raw_parts(im, len));
    Ok(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

fn rows(flat: Vec<Complex64>, width: usize) -> Vec<Vec<Complex64>> {
    flat.chunks(width).map(<[Complex64]>::to_vec).collect()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Haar-random scenario, deterministic in `seed`.
///
/// # Safety
/// `out_handle` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pd_scenario_sample(
    seed: u64,
    n: usize,
    d_b: usize,
    d_d: usize,
    out_handle: *mut *mut PdScenario,
) -> PdStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        if n < 2 || d_b == 0 || d_d == 0 {
            return Err(Fail(
                PdStatus::InvalidArgument,
                format!("need n >= 2, d_b >= 1, d_d >= 1 (got {n}, {d_b}, {d_d})"),
            ));
        }
        let spec = sample_scenario(seed, n, d_b, d_d);
        *slot = Box::into_raw(Box::new(PdScenario { spec }));
        Ok(())
    })
}

/// Reads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_scenario_load(path: *const c_char, out_handle: *mut *mut PdScenario) -> PdStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|e| Fail(PdStatus::InvalidArgument, e.to_string()))?;
        match parse_scenario(Path::new(path))? {
            ScenarioFile::Scenario(spec) => {
                *slot = Box::into_raw(Box::new(PdScenario { spec }));
                Ok(())
            }
            _ => Err(Fail(PdStatus::InvalidInput, format!("{path}: not a single-particle scenario"))),
        }
    })
}

/// Scenario from row-major arrays: amplitudes `n × d_b`, detector states
/// `n × d_d`, real and imaginary parts separately.
///
/// # Safety
/// Each array must hold the stated number of doubles; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_scenario_from_arrays(
    n: usize,
    d_b: usize,
    d_d: usize,
    amp_re: *const f64,
    amp_im: *const f64,
    det_re: *const f64,
    det_im: *const f64,
    out_handle: *mut *mut PdScenario,
) -> PdStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let len_a = n.checked_mul(d_b).ok_or_else(|| Fail(PdStatus::InvalidArgument, "n * d_b overflows".into()))?;
        let len_d = n.checked_mul(d_d).ok_or_else(|| Fail(PdStatus::InvalidArgument, "n * d_d overflows".into()))?;
        if d_d == 0 {
            return Err(Fail(PdStatus::InvalidArgument, "d_d must be at least 1".into()));
        }
        let amps = ComplexMatrix::new(n, d_b, complex_slice(amp_re, amp_im, len_a, "amplitudes")?)?;
        let det = rows(complex_slice(det_re, det_im, len_d, "detector")?, d_d);
        let spec = ScenarioSpec::new(amps, det)?;
        *slot = Box::into_raw(Box::new(PdScenario { spec }));
        Ok(())
    })
}

/// # Safety
/// `s` must come from a `pd_scenario_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pd_scenario_free(s: *mut PdScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_scenario_dims(
    s: *const PdScenario,
    n: *mut usize,
    d_b: *mut usize,
    d_d: *mut usize,
) -> PdStatus {
    guard(|| {
        let spec = &deref(s, "scenario")?.spec;
        *out(n, "n")? = spec.n();
        *out(d_b, "d_b")? = spec.d_b();
        *out(d_d, "d_d")? = spec.d_d();
        Ok(())
    })
}

/// Evaluates one duality relation (a `PdRelation` value) with default
/// tolerances.
///
/// # Safety
/// `s` must be a live handle; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_scenario_check(
    s: *const PdScenario,
    relation: i32,
    report: *mut PdReport,
) -> PdStatus {
    guard(|| {
        let spec = &deref(s, "scenario")?.spec;
        let slot = out(report, "report")?;
        let relation = relation_from_raw(relation)
            .ok_or_else(|| Fail(PdStatus::InvalidArgument, format!("unknown relation {relation}")))?;
        let r = ScenarioAnalysis::new(spec, DualityOptions::default())?.evaluate(relation)?;
        *slot = PdReport {
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            satisfied: r.satisfied,
            certified: r.solver_certified,
            aux_ok: r.aux_ok(),
        };
        Ok(())
    })
}

/// Entanglement witnesses of the particle-memory state after the detector.
///
/// # Safety
/// `s` must be a live handle; `w` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_scenario_witnesses(s: *const PdScenario, w: *mut PdWitnesses) -> PdStatus {
    guard(|| {
        let spec = &deref(s, "scenario")?.spec;
        let slot = out(w, "witnesses")?;
        let a = ScenarioAnalysis::new(spec, DualityOptions::default())?;
        let (pw, cw) = entanglement_witnesses(&a.reduced().rho_ab, &spec.particle_memory_dims())?;
        *slot = PdWitnesses {
            purity_witness: pw,
            cond_ent_witness: cw,
        };
        Ok(())
    })
}

/// Ensemble of `m` pure states in dimension `dim`; states row-major `m × dim`.
///
/// # Safety
/// `probs` holds `m` doubles, `re`/`im` hold `m * dim`; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_ensemble_new(
    m: usize,
    dim: usize,
    probs: *const f64,
    re: *const f64,
    im: *const f64,
    out_handle: *mut *mut PdEnsemble,
) -> PdStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        if probs.is_null() {
            return Err(null("probs"));
        }
        if dim == 0 {
            return Err(Fail(PdStatus::InvalidArgument, "dim must be at least 1".into()));
        }
        let len = m.checked_mul(dim).ok_or_else(|| Fail(PdStatus::InvalidArgument, "m * dim overflows".into()))?;
        let p = slice::from_raw_parts(probs, m).to_vec();
        let states = rows(complex_slice(re, im, len, "states")?, dim);
        let ensemble = Ensemble::new(p, states)?;
        *slot = Box::into_raw(Box::new(PdEnsemble { ensemble }));
        Ok(())
    })
}

/// The detector ensemble `{p_i, |φ_i⟩}` of a scenario.
///
/// # Safety
/// `s` must be a live handle; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_ensemble_from_scenario(
    s: *const PdScenario,
    out_handle: *mut *mut PdEnsemble,
) -> PdStatus {
    guard(|| {
        let spec = &deref(s, "scenario")?.spec;
        let slot = out(out_handle, "out")?;
        *slot = Box::into_raw(Box::new(PdEnsemble {
            ensemble: Ensemble::from_scenario(spec),
        }));
        Ok(())
    })
}

/// # Safety
/// `e` must come from a `pd_ensemble_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pd_ensemble_free(e: *mut PdEnsemble) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Certified minimum-error discrimination.
///
/// # Safety
/// `e` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_min_error(e: *const PdEnsemble, result: *mut PdDiscrimination) -> PdStatus {
    guard(|| {
        let ens = &deref(e, "ensemble")?.ensemble;
        let slot = out(result, "result")?;
        let r = min_error_solve(ens, SolverOptions::default());
        *slot = PdDiscrimination {
            p_success: r.p_success,
            certificate_gap: r.certificate_gap,
            dual_bound: r.dual_bound(),
            iterations: r.iterations as u64,
            converged: r.converged,
            certified: r.certified(),
        };
        Ok(())
    })
}

/// Closed-form optimum for a two-state ensemble.
///
/// # Safety
/// `e` must be a live handle; `p_success` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_helstrom(e: *const PdEnsemble, p_success: *mut f64) -> PdStatus {
    guard(|| {
        let ens = &deref(e, "ensemble")?.ensemble;
        let slot = out(p_success, "p_success")?;
        *slot = helstrom(ens)?.p_success;
        Ok(())
    })
}

/// Pairwise trace-norm upper bound on the optimal success probability.
///
/// # Safety
/// `e` must be a live handle; `bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pd_pairwise_bound(e: *const PdEnsemble, bound: *mut f64) -> PdStatus {
    guard(|| {
        let ens = &deref(e, "ensemble")?.ensemble;
        *out(bound, "bound")? = pairwise_bound(ens);
        Ok(())
    })
}
