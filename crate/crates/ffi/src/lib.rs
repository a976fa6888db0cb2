//! C interface to plansym.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every fallible call returns a
//! [`PlansymStatus`]; on failure a message is kept per thread and can be read
//! with [`plansym_last_error`] until the next failing call on that thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use plansym::abstraction::quotient;
use plansym::canonical::{state_form, states_isomorphic};
use plansym::object_graph::ColorLegend;
use plansym::pddl::GroundError;
use plansym::{expand, load_task, GroundTask, State, TransitionSystem};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlansymStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or unsupported PDDL, or a bad state dump.
    Input = 3,
    /// State or action cap exceeded.
    Cap = 4,
    /// Index out of range or buffer too small.
    Range = 5,
    Panic = 6,
}

pub struct PlansymTask {
    task: GroundTask,
}

pub struct PlansymSpace {
    ts: TransitionSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

type Outcome = Result<(), (PlansymStatus, String)>;

fn guard(f: impl FnOnce() -> Outcome) -> PlansymStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PlansymStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PlansymStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (PlansymStatus, String)> {
    if p.is_null() {
        return Err((PlansymStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (PlansymStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn null(what: &str) -> (PlansymStatus, String) {
    (PlansymStatus::NullPointer, format!("{what} is null"))
}

/// Last error message of this thread; empty if none. The pointer is valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn plansym_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn plansym_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and grounds a task from PDDL texts.
///
/// # Safety
/// `domain` and `instance` must be NUL-terminated strings; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn plansym_task_load(
    domain: *const c_char,
    instance: *const c_char,
    out: *mut *mut PlansymTask,
) -> PlansymStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let (d, i) = (text(domain, "domain")?, text(instance, "instance")?);
        let task = load_task(d, i).map_err(|e| {
            let status = match e {
                plansym::Error::Ground(GroundError::TooManyActions { .. }) => PlansymStatus::Cap,
                _ => PlansymStatus::Input,
            };
            (status, e.to_string())
        })?;
        *out = Box::into_raw(Box::new(PlansymTask { task }));
        Ok(())
    })
}

/// # Safety
/// `task` must come from [`plansym_task_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn plansym_task_free(task: *mut PlansymTask) {
    if !task.is_null() {
        drop(Box::from_raw(task));
    }
}

/// # Safety
/// `task` must be a live handle or null (yields 0).
#[no_mangle]
pub unsafe extern "C" fn plansym_task_num_atoms(task: *const PlansymTask) -> usize {
    task.as_ref().map_or(0, |t| t.task.num_atoms())
}

/// # Safety
/// `task` must be a live handle or null (yields 0).
#[no_mangle]
pub unsafe extern "C" fn plansym_task_num_objects(task: *const PlansymTask) -> usize {
    task.as_ref().map_or(0, |t| t.task.objects.len())
}

/// # Safety
/// `task` must be a live handle or null (yields 0).
#[no_mangle]
pub unsafe extern "C" fn plansym_task_num_actions(task: *const PlansymTask) -> usize {
    task.as_ref().map_or(0, |t| t.task.actions.len())
}

/// Expands the reachable state space, refusing more than `max_states`.
///
/// # Safety
/// `task` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn plansym_space_expand(
    task: *const PlansymTask,
    max_states: usize,
    out: *mut *mut PlansymSpace,
) -> PlansymStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let t = task.as_ref().ok_or_else(|| null("task"))?;
        let ts = expand(&t.task, max_states).map_err(|e| (PlansymStatus::Cap, e.to_string()))?;
        *out = Box::into_raw(Box::new(PlansymSpace { ts }));
        Ok(())
    })
}

/// # Safety
/// `space` must come from [`plansym_space_expand`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn plansym_space_free(space: *mut PlansymSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// # Safety
/// `space` must be a live handle or null (yields 0).
#[no_mangle]
pub unsafe extern "C" fn plansym_space_num_states(space: *const PlansymSpace) -> usize {
    space.as_ref().map_or(0, |s| s.ts.num_states())
}

/// # Safety
/// `space` must be a live handle or null (yields 0).
#[no_mangle]
pub unsafe extern "C" fn plansym_space_num_transitions(space: *const PlansymSpace) -> usize {
    space.as_ref().map_or(0, |s| s.ts.num_transitions())
}

/// Index of the initial state.
///
/// # Safety
/// `space` must be a live handle or null (yields 0).
#[no_mangle]
pub unsafe extern "C" fn plansym_space_initial(space: *const PlansymSpace) -> usize {
    space.as_ref().map_or(0, |s| s.ts.initial)
}

/// Optimal cost-to-go of `state`; -1 for dead ends.
///
/// # Safety
/// `space` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn plansym_space_vstar(space: *const PlansymSpace, state: usize, out: *mut i64) -> PlansymStatus {
    guard(|| {
        let s = space.as_ref().ok_or_else(|| null("space"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = s
            .ts
            .vstar
            .get(state)
            .ok_or((PlansymStatus::Range, format!("state {state} out of range")))?;
        *out = v.map_or(-1, i64::from);
        Ok(())
    })
}

/// Number of isomorphism classes among the expanded states.
///
/// # Safety
/// Both handles must be live and from the same task; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn plansym_space_num_classes(
    task: *const PlansymTask,
    space: *const PlansymSpace,
    out: *mut usize,
) -> PlansymStatus {
    guard(|| {
        let t = task.as_ref().ok_or_else(|| null("task"))?;
        let s = space.as_ref().ok_or_else(|| null("space"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let am = quotient(&s.ts, &t.task).map_err(|e| (PlansymStatus::Input, e.to_string()))?;
        *out = am.num_classes();
        Ok(())
    })
}

fn parse_state(task: &GroundTask, dump: &str) -> Result<State, (PlansymStatus, String)> {
    State::parse_text(task, dump).map_err(|e| (PlansymStatus::Input, e))
}

/// Decides whether two state dumps (atoms such as `at(b1,rooma)`) of one
/// task are isomorphic. Writes 1 or 0 to `out`.
///
/// # Safety
/// `task` must be live; `a` and `b` NUL-terminated; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn plansym_states_isomorphic(
    task: *const PlansymTask,
    a: *const c_char,
    b: *const c_char,
    out: *mut i32,
) -> PlansymStatus {
    guard(|| {
        let t = task.as_ref().ok_or_else(|| null("task"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sa = parse_state(&t.task, text(a, "a")?)?;
        let sb = parse_state(&t.task, text(b, "b")?)?;
        *out = states_isomorphic(&sa, &t.task, &sb, &t.task) as i32;
        Ok(())
    })
}

/// Writes the 32-character hex digest of a state's canonical form plus a
/// NUL into `buf`, which must hold at least 33 bytes.
///
/// # Safety
/// `task` must be live; `state` NUL-terminated; `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn plansym_state_digest(
    task: *const PlansymTask,
    state: *const c_char,
    buf: *mut c_char,
    len: usize,
) -> PlansymStatus {
    guard(|| {
        let t = task.as_ref().ok_or_else(|| null("task"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let s = parse_state(&t.task, text(state, "state")?)?;
        let hex = state_form(&s, &t.task, &ColorLegend::for_task(&t.task)).digest_hex();
        if len < hex.len() + 1 {
            return Err((PlansymStatus::Range, format!("buffer needs {} bytes", hex.len() + 1)));
        }
        ptr::copy_nonoverlapping(hex.as_ptr().cast::<c_char>(), buf, hex.len());
        *buf.add(hex.len()) = 0;
        Ok(())
    })
}
