//! C interface. Every call returns an [`SpwStatus`]; on failure the message
//! is available from [`spw_last_error`] on the same thread until the next
//! call. Handles are opaque and must be released with their `_free`.

use spw_core::domain::PathResult;
use spw_core::geom::Point;
use spw_core::{Error, Instance};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    InvalidInstance = 4,
    OutsideFreeSpace = 5,
    Disconnected = 6,
    OutOfRange = 7,
    Internal = 8,
}

/// A validated polygonal domain with source and target.
pub struct SpwInstance(Instance);

/// A solved shortest path, in input coordinates.
pub struct SpwResult(PathResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpwStatus {
    match e {
        Error::Syntax { .. } => SpwStatus::Syntax,
        Error::Invalid(_) => SpwStatus::InvalidInstance,
        Error::OutsideFreeSpace => SpwStatus::OutsideFreeSpace,
        Error::Disconnected => SpwStatus::Disconnected,
        Error::OutOfRange { .. } => SpwStatus::OutOfRange,
        _ => SpwStatus::Internal,
    }
}

fn fail(status: SpwStatus, msg: impl Into<String>) -> SpwStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), (SpwStatus, String)>) -> SpwStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpwStatus::Ok,
        Ok(Err((s, m))) => fail(s, m),
        Err(p) => {
            let m = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            fail(SpwStatus::Internal, format!("internal panic: {}", m.unwrap_or_default()))
        }
    }
}

fn core_err(e: Error) -> (SpwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SpwStatus, String) {
    (SpwStatus::NullArgument, format!("{what} is null"))
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library; valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn spw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses an instance from a NUL-terminated JSON document.
///
/// # Safety
/// `json` must be null or a valid C string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn spw_instance_from_json(json: *const c_char, out: *mut *mut SpwInstance) -> SpwStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| (SpwStatus::InvalidUtf8, e.to_string()))?;
        let inst = spw_core::parse_instance(text.as_bytes()).map_err(core_err)?;
        *out = Box::into_raw(Box::new(SpwInstance(inst)));
        Ok(())
    })
}

unsafe fn points(xy: *const f64, len: usize) -> Vec<Point> {
    std::slice::from_raw_parts(xy, 2 * len).chunks_exact(2).map(|c| Point::new(c[0], c[1])).collect()
}

/// Builds an instance from flat `x, y` arrays. `outer` holds `outer_len`
/// points; the holes are concatenated in `holes` with `hole_lens[i]` points
/// each. `s` and `t` point at two doubles.
///
/// # Safety
/// Every non-null pointer must reference at least the stated number of
/// elements. `holes` and `hole_lens` may be null when `hole_count` is 0.
#[no_mangle]
pub unsafe extern "C" fn spw_instance_new(
    outer: *const f64,
    outer_len: usize,
    holes: *const f64,
    hole_lens: *const usize,
    hole_count: usize,
    s: *const f64,
    t: *const f64,
    out: *mut *mut SpwInstance,
) -> SpwStatus {
    guard(|| {
        if outer.is_null() || s.is_null() || t.is_null() || out.is_null() {
            return Err(null("outer, s, t or out"));
        }
        if hole_count > 0 && (holes.is_null() || hole_lens.is_null()) {
            return Err(null("holes"));
        }
        let lens: &[usize] = if hole_count == 0 { &[] } else { std::slice::from_raw_parts(hole_lens, hole_count) };
        let mut rings = Vec::with_capacity(hole_count);
        let mut at = 0;
        for &n in lens {
            rings.push(points(holes.add(2 * at), n));
            at += n;
        }
        let inst = Instance::new(points(outer, outer_len), rings, Point::new(*s, *s.add(1)), Point::new(*t, *t.add(1))).map_err(core_err)?;
        *out = Box::into_raw(Box::new(SpwInstance(inst)));
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spw_instance_free(inst: *mut SpwInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

unsafe fn solve_with(inst: *const SpwInstance, out: *mut *mut SpwResult, f: fn(&Instance) -> spw_core::Result<PathResult>) -> SpwStatus {
    guard(|| {
        if inst.is_null() || out.is_null() {
            return Err(null("inst or out"));
        }
        let r = f(&(*inst).0).map_err(core_err)?;
        *out = Box::into_raw(Box::new(SpwResult(r)));
        Ok(())
    })
}

/// Shortest path by wavefront propagation.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spw_solve(inst: *const SpwInstance, out: *mut *mut SpwResult) -> SpwStatus {
    solve_with(inst, out, spw_core::run)
}

/// Shortest path by the visibility-graph reference.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spw_oracle(inst: *const SpwInstance, out: *mut *mut SpwResult) -> SpwStatus {
    solve_with(inst, out, spw_core::oracle_distance)
}

/// Path length, or NaN for a null handle.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spw_result_distance(res: *const SpwResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.0.distance)
}

/// Number of path vertices, s and t included.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spw_result_path_len(res: *const SpwResult) -> usize {
    res.as_ref().map_or(0, |r| r.0.path.len())
}

/// Copies vertex `i` of the path into `xy[0..2]`.
///
/// # Safety
/// `res` must be a live handle and `xy` must hold two doubles.
#[no_mangle]
pub unsafe extern "C" fn spw_result_path_point(res: *const SpwResult, i: usize, xy: *mut f64) -> SpwStatus {
    guard(|| {
        let r = res.as_ref().ok_or_else(|| null("res"))?;
        if xy.is_null() {
            return Err(null("xy"));
        }
        let p = r.0.path.get(i).ok_or_else(|| (SpwStatus::OutOfRange, format!("index {i} out of range (len {})", r.0.path.len())))?;
        *xy = p.x;
        *xy.add(1) = p.y;
        Ok(())
    })
}

/// # Safety
/// `res` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spw_result_free(res: *mut SpwResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}
