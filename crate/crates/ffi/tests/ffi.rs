use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use plansym::benchmarks;
use plansym_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(plansym_last_error()) }.to_string_lossy().into_owned()
}

fn gripper(n: usize) -> *mut PlansymTask {
    let (d, i) = (c(benchmarks::GRIPPER_DOMAIN), c(&benchmarks::gripper_problem(n)));
    let mut task = ptr::null_mut();
    assert_eq!(unsafe { plansym_task_load(d.as_ptr(), i.as_ptr(), &mut task) }, PlansymStatus::Ok);
    task
}

#[test]
fn expand_and_quotient_gripper() {
    let task = gripper(2);
    unsafe {
        assert_eq!(plansym_task_num_objects(task), 6);
        let mut space = ptr::null_mut();
        assert_eq!(plansym_space_expand(task, 1000, &mut space), PlansymStatus::Ok);
        assert_eq!(plansym_space_num_states(space), benchmarks::gripper_reachable_states(2) as usize);
        let mut v = 0i64;
        assert_eq!(plansym_space_vstar(space, plansym_space_initial(space), &mut v), PlansymStatus::Ok);
        assert_eq!(v, 5);
        assert_eq!(plansym_space_vstar(space, 1 << 20, &mut v), PlansymStatus::Range);
        let mut classes = 0usize;
        assert_eq!(plansym_space_num_classes(task, space, &mut classes), PlansymStatus::Ok);
        assert_eq!(classes, 12);
        plansym_space_free(space);
        plansym_task_free(task);
    }
}

#[test]
fn isomorphism_and_digest() {
    let task = gripper(1);
    let l = c("at-robot(roomb) carry(ball1,left) free(right)");
    let r = c("at-robot(roomb) carry(ball1,right) free(left)");
    let a = c("at-robot(rooma) carry(ball1,right) free(left)");
    unsafe {
        let mut iso = -1;
        assert_eq!(plansym_states_isomorphic(task, l.as_ptr(), r.as_ptr(), &mut iso), PlansymStatus::Ok);
        assert_eq!(iso, 1);
        assert_eq!(plansym_states_isomorphic(task, l.as_ptr(), a.as_ptr(), &mut iso), PlansymStatus::Ok);
        assert_eq!(iso, 0);
        let mut buf = [0 as std::ffi::c_char; 33];
        assert_eq!(plansym_state_digest(task, l.as_ptr(), buf.as_mut_ptr(), 33), PlansymStatus::Ok);
        let dl = CStr::from_ptr(buf.as_ptr()).to_owned();
        assert_eq!(plansym_state_digest(task, r.as_ptr(), buf.as_mut_ptr(), 33), PlansymStatus::Ok);
        assert_eq!(CStr::from_ptr(buf.as_ptr()), dl.as_c_str());
        assert_eq!(dl.to_bytes().len(), 32);
        assert_eq!(plansym_state_digest(task, r.as_ptr(), buf.as_mut_ptr(), 32), PlansymStatus::Range);
        plansym_task_free(task);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut task = ptr::null_mut();
        let bad = c("(define (domain d)");
        let inst = c("(define (problem p) (:domain d))");
        assert_eq!(plansym_task_load(bad.as_ptr(), inst.as_ptr(), &mut task), PlansymStatus::Input);
        assert!(task.is_null());
        assert!(last_error().contains("1:1"), "{}", last_error());
        assert_eq!(plansym_task_load(ptr::null(), inst.as_ptr(), &mut task), PlansymStatus::NullPointer);
        assert!(last_error().contains("domain"));

        let task = gripper(1);
        let mut space = ptr::null_mut();
        assert_eq!(plansym_space_expand(task, 5, &mut space), PlansymStatus::Cap);
        assert!(last_error().starts_with("state cap exceeded"));
        let mut iso = 0;
        let junk = c("nosuch(x)");
        assert_eq!(plansym_states_isomorphic(task, junk.as_ptr(), junk.as_ptr(), &mut iso), PlansymStatus::Input);
        plansym_task_free(task);
        plansym_task_free(ptr::null_mut());
        assert_eq!(plansym_task_num_atoms(ptr::null()), 0);
    }
}

#[test]
fn error_message_is_per_thread() {
    unsafe {
        let mut space = ptr::null_mut();
        assert_eq!(plansym_space_expand(ptr::null(), 1, &mut space), PlansymStatus::NullPointer);
    }
    let msg = last_error();
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(!msg.is_empty());
    assert!(other.is_empty());
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(plansym_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/plansym.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["plansym_task_load", "plansym_space_expand", "plansym_states_isomorphic", "plansym_last_error"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
