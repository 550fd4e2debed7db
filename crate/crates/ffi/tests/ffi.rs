use spw_ffi::*;
use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

const SQUARE_HOLE: &str = r#"{"outer": [[-3,-3],[3,-3],[3,3],[-3,3]], "holes": [[[-0.5,-0.5],[0.5,-0.5],[0.5,0.5],[-0.5,0.5]]], "s": [-2,0], "t": [2,0]}"#;

fn last_error() -> String {
    let p = spw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn from_json(text: &str) -> (SpwStatus, *mut SpwInstance) {
    let c = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    (spw_instance_from_json(c.as_ptr(), &mut inst), inst)
}

#[test]
fn solve_and_oracle_agree() {
    unsafe {
        let (st, inst) = from_json(SQUARE_HOLE);
        assert_eq!(st, SpwStatus::Ok);
        assert!(spw_last_error().is_null());
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(spw_solve(inst, &mut a), SpwStatus::Ok);
        assert_eq!(spw_oracle(inst, &mut b), SpwStatus::Ok);
        let want = 1.0 + 2.0 * 2.5f64.sqrt();
        assert!((spw_result_distance(a) - want).abs() <= 1e-9);
        assert!((spw_result_distance(b) - want).abs() <= 1e-9);
        assert_eq!(spw_result_path_len(a), 4);
        let mut xy = [0.0; 2];
        assert_eq!(spw_result_path_point(a, 0, xy.as_mut_ptr()), SpwStatus::Ok);
        assert_eq!(xy, [-2.0, 0.0]);
        assert_eq!(spw_result_path_point(a, 3, xy.as_mut_ptr()), SpwStatus::Ok);
        assert_eq!(xy, [2.0, 0.0]);
        assert_eq!(spw_result_path_point(a, 4, xy.as_mut_ptr()), SpwStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        spw_result_free(a);
        spw_result_free(b);
        spw_instance_free(inst);
    }
}

#[test]
fn flat_arrays_build_the_same_instance() {
    let outer = [-3.0, -3.0, 3.0, -3.0, 3.0, 3.0, -3.0, 3.0];
    let hole = [-0.5, -0.5, 0.5, -0.5, 0.5, 0.5, -0.5, 0.5];
    let (s, t) = ([-2.0, 0.0], [2.0, 0.0]);
    unsafe {
        let mut inst = ptr::null_mut();
        let st = spw_instance_new(outer.as_ptr(), 4, hole.as_ptr(), [4usize].as_ptr(), 1, s.as_ptr(), t.as_ptr(), &mut inst);
        assert_eq!(st, SpwStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(spw_solve(inst, &mut r), SpwStatus::Ok);
        assert!((spw_result_distance(r) - (1.0 + 2.0 * 2.5f64.sqrt())).abs() <= 1e-9);
        spw_result_free(r);
        spw_instance_free(inst);

        let mut inst = ptr::null_mut();
        let st = spw_instance_new(outer.as_ptr(), 4, ptr::null(), ptr::null(), 0, s.as_ptr(), t.as_ptr(), &mut inst);
        assert_eq!(st, SpwStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(spw_solve(inst, &mut r), SpwStatus::Ok);
        assert_eq!(spw_result_distance(r), 4.0);
        spw_result_free(r);
        spw_instance_free(inst);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let (st, inst) = from_json("{\"outer\": [");
        assert_eq!(st, SpwStatus::Syntax);
        assert!(inst.is_null());
        assert!(last_error().contains("line 1"));

        let (st, _) = from_json(r#"{"outer": [[0,0],[4,0],[4,4],[0,4]], "s": [9,9], "t": [1,1]}"#);
        assert_eq!(st, SpwStatus::InvalidInstance, "{}", last_error());

        let mut out = ptr::null_mut();
        assert_eq!(spw_instance_from_json(ptr::null(), &mut out), SpwStatus::NullArgument);
        assert_eq!(spw_solve(ptr::null(), &mut ptr::null_mut()), SpwStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(spw_instance_from_json(bad.as_ptr().cast(), &mut out), SpwStatus::InvalidUtf8);

        assert!(spw_result_distance(ptr::null()).is_nan());
        assert_eq!(spw_result_path_len(ptr::null()), 0);
        spw_instance_free(ptr::null_mut());
        spw_result_free(ptr::null_mut());
    }
}

#[test]
fn header_is_current_and_links_from_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/spw.h")).unwrap();
    for sym in ["spw_instance_from_json", "spw_instance_new", "spw_solve", "spw_oracle", "spw_result_path_point", "spw_last_error", "SPW_STATUS_DISCONNECTED"] {
        assert!(header.contains(sym), "{sym} missing from spw.h");
    }
    // The staticlib sits next to the test binary's deps directory.
    let target = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = target.join("libspw_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let exe = tempfile_path("spw_smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("cc runs");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), format!("{:.12} 4 2 0", 1.0 + 2.0 * 2.5f64.sqrt()));
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{stem}_{}", std::process::id()))
}
