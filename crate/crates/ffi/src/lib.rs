//! C ABI for `stagematch`.
//!
//! Instances and matchings are opaque heap handles released with their
//! `*_free` function. Every entry point returns an [`SmStatus`]; on failure
//! a message is available from [`sm_last_error_message`] on the same thread.
//! Panics never cross the boundary: they are reported as
//! [`SmStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use stagematch::cli::{parse_document, solve_document};
use stagematch::{
    deferred_acceptance, divorces, enumerate_stable, is_stable, max_weight_stable, solve_two_stage, Error, Instance,
    ManId, Matching, Proposers, TwoStageProblem, Variant, WeightFn, WomanId,
};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidInstance = 3,
    InvalidProblem = 4,
    CapExceeded = 5,
    ParseError = 6,
    NotFound = 7,
    Panic = 8,
}

/// How the rosters change between the two stages.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmVariant {
    WomenArrive = 0,
    MenLeave = 1,
    LeaveAndArrive = 2,
}

/// Opaque preference instance.
pub struct SmInstance(Instance);

/// Opaque matching.
pub struct SmMatching(Matching);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SmStatus {
    match e {
        Error::CapExceeded { .. } => SmStatus::CapExceeded,
        Error::PreferenceDrift { .. } | Error::Nesting { .. } | Error::VariantMismatch { .. } => {
            SmStatus::InvalidProblem
        }
        Error::InvalidParameter(_) => SmStatus::InvalidArgument,
        _ => SmStatus::InvalidInstance,
    }
}

/// Runs `f`, recording the message of any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (SmStatus, String)>) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SmStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SmStatus, String) {
    (SmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (SmStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (SmStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), (SmStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds an instance with complete strict lists.
///
/// `man_ids` and `woman_ids` give the identifiers (NULL means `0..n`).
/// `man_prefs` holds `n_men * n_women` woman identifiers, row `i` being the
/// list of the `i`-th man, best first; `woman_prefs` likewise.
///
/// # Safety
/// Array pointers must be valid for the stated lengths; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sm_instance_new(
    n_men: usize,
    man_ids: *const u32,
    n_women: usize,
    woman_ids: *const u32,
    man_prefs: *const u32,
    woman_prefs: *const u32,
    out: *mut *mut SmInstance,
) -> SmStatus {
    guard(|| {
        let ids = |p: *const u32, n: usize, what| -> Result<Vec<u32>, (SmStatus, String)> {
            if p.is_null() {
                Ok((0..n as u32).collect())
            } else {
                Ok(slice(p, n, what)?.to_vec())
            }
        };
        let men = ids(man_ids, n_men, "man_ids")?;
        let women = ids(woman_ids, n_women, "woman_ids")?;
        let cells = n_men
            .checked_mul(n_women)
            .ok_or((SmStatus::InvalidArgument, "instance too large".to_string()))?;
        let mp = slice(man_prefs, cells, "man_prefs")?;
        let wp = slice(woman_prefs, cells, "woman_prefs")?;
        let ml = men
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                (
                    ManId(u),
                    mp[i * n_women..(i + 1) * n_women].iter().map(|&w| WomanId(w)).collect(),
                )
            })
            .collect();
        let wl = women
            .iter()
            .enumerate()
            .map(|(j, &w)| {
                (
                    WomanId(w),
                    wp[j * n_men..(j + 1) * n_men].iter().map(|&u| ManId(u)).collect(),
                )
            })
            .collect();
        let inst = Instance::new(ml, wl).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(SmInstance(inst))), "out")
    })
}

/// # Safety
/// `inst` must come from this library and not be freed twice. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn sm_instance_free(inst: *mut SmInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle; `out_men` and `out_women` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_instance_size(
    inst: *const SmInstance,
    out_men: *mut usize,
    out_women: *mut usize,
) -> SmStatus {
    guard(|| {
        let i = &deref(inst, "inst")?.0;
        put(out_men, i.men().len(), "out_men")?;
        put(out_women, i.women().len(), "out_women")
    })
}

/// Deferred acceptance; `men_propose` selects the men-optimal matching,
/// otherwise the women-optimal one.
///
/// # Safety
/// `inst` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_deferred_acceptance(
    inst: *const SmInstance,
    men_propose: bool,
    out: *mut *mut SmMatching,
) -> SmStatus {
    guard(|| {
        let i = &deref(inst, "inst")?.0;
        let side = if men_propose { Proposers::Men } else { Proposers::Women };
        put(
            out,
            Box::into_raw(Box::new(SmMatching(deferred_acceptance(i, side)))),
            "out",
        )
    })
}

/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_is_stable(inst: *const SmInstance, m: *const SmMatching, out: *mut bool) -> SmStatus {
    guard(|| {
        let i = &deref(inst, "inst")?.0;
        let m = &deref(m, "matching")?.0;
        put(out, is_stable(i, m).map_err(lib_err)?, "out")
    })
}

/// Number of stable matchings. `cap` of 0 means no limit; otherwise more
/// than `cap` matchings yields `CapExceeded`.
///
/// # Safety
/// `inst` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_count_stable(inst: *const SmInstance, cap: usize, out: *mut usize) -> SmStatus {
    guard(|| {
        let i = &deref(inst, "inst")?.0;
        let all = enumerate_stable(i, (cap > 0).then_some(cap)).map_err(lib_err)?;
        put(out, all.len(), "out")
    })
}

/// Stable matching of maximum total weight. The `k`-th weight applies to
/// the pair (`men[k]`, `women[k]`); other pairs weigh 0.
///
/// # Safety
/// Arrays must hold `n_weights` entries; `inst` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_max_weight_stable(
    inst: *const SmInstance,
    n_weights: usize,
    men: *const u32,
    women: *const u32,
    weights: *const i64,
    out: *mut *mut SmMatching,
) -> SmStatus {
    guard(|| {
        let i = &deref(inst, "inst")?.0;
        let (us, ws, xs) = (
            slice(men, n_weights, "men")?,
            slice(women, n_weights, "women")?,
            slice(weights, n_weights, "weights")?,
        );
        let mut f = WeightFn::new();
        for k in 0..n_weights {
            f.set(ManId(us[k]), WomanId(ws[k]), xs[k]);
        }
        put(
            out,
            Box::into_raw(Box::new(SmMatching(max_weight_stable(i, &f)))),
            "out",
        )
    })
}

/// Optimal two-stage solution. Departures are reduced to arrivals
/// internally.
///
/// # Safety
/// Handles must be live; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn sm_opt_two_stage(
    variant: SmVariant,
    stage1: *const SmInstance,
    stage2: *const SmInstance,
    out_m1: *mut *mut SmMatching,
    out_m2: *mut *mut SmMatching,
    out_divorces: *mut usize,
) -> SmStatus {
    guard(|| {
        let s1 = deref(stage1, "stage1")?.0.clone();
        let s2 = deref(stage2, "stage2")?.0.clone();
        if out_m1.is_null() || out_m2.is_null() || out_divorces.is_null() {
            return Err(null("output pointer"));
        }
        let v = match variant {
            SmVariant::WomenArrive => Variant::WomenArrive,
            SmVariant::MenLeave => Variant::MenLeave,
            SmVariant::LeaveAndArrive => Variant::LeaveAndArrive,
        };
        let p = TwoStageProblem::new(v, s1, s2).map_err(lib_err)?;
        let sol = solve_two_stage(&p).map_err(lib_err)?;
        put(out_divorces, sol.divorce_count, "out_divorces")?;
        put(out_m1, Box::into_raw(Box::new(SmMatching(sol.m1))), "out_m1")?;
        put(out_m2, Box::into_raw(Box::new(SmMatching(sol.m2))), "out_m2")
    })
}

/// Pairs of `a` missing from `b`.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_divorces(a: *const SmMatching, b: *const SmMatching, out: *mut usize) -> SmStatus {
    guard(|| {
        let (a, b) = (&deref(a, "a")?.0, &deref(b, "b")?.0);
        put(out, divorces(a, b), "out")
    })
}

/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_matching_len(m: *const SmMatching, out: *mut usize) -> SmStatus {
    guard(|| put(out, deref(m, "matching")?.0.len(), "out"))
}

/// The `index`-th pair in increasing man order.
///
/// # Safety
/// `m` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn sm_matching_pair(
    m: *const SmMatching,
    index: usize,
    out_man: *mut u32,
    out_woman: *mut u32,
) -> SmStatus {
    guard(|| {
        let m = &deref(m, "matching")?.0;
        let (u, w) = m.pairs().nth(index).ok_or((
            SmStatus::NotFound,
            format!("index {index} out of range for {} pairs", m.len()),
        ))?;
        put(out_man, u.0, "out_man")?;
        put(out_woman, w.0, "out_woman")
    })
}

/// Partner of `man`, or `NotFound` if he is single.
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_matching_wife(m: *const SmMatching, man: u32, out: *mut u32) -> SmStatus {
    guard(|| {
        let w = deref(m, "matching")?
            .0
            .wife(ManId(man))
            .ok_or((SmStatus::NotFound, format!("u{man} is single")))?;
        put(out, w.0, "out")
    })
}

/// # Safety
/// `m` must come from this library and not be freed twice. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn sm_matching_free(m: *mut SmMatching) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Parses a problem in the text format, solves it and returns the JSON
/// report (free with [`sm_string_free`]). With `oracle`, the report also
/// carries the optimum found by enumeration.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_solve_text(text: *const c_char, oracle: bool, out_json: *mut *mut c_char) -> SmStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (SmStatus::InvalidArgument, "text is not UTF-8".to_string()))?;
        let doc = parse_document(text).map_err(|e| (SmStatus::ParseError, e.to_string()))?;
        let report = solve_document(doc, None, oracle, None).map_err(|m| (SmStatus::InvalidProblem, m))?;
        let c =
            CString::new(report.json.to_string()).map_err(|_| (SmStatus::Panic, "report contains NUL".to_string()))?;
        put(out_json, c.into_raw(), "out_json")
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
