//! C ABI over the kfree library.
//!
//! Conventions: every fallible call returns a [`KfStatus`]; outputs go
//! through out-pointers. Point sets are opaque handles released with
//! [`kf_pointset_free`]; strings returned by the library are released with
//! [`kf_string_free`]. The last error message of the calling thread is
//! available through [`kf_last_error_message`]. Specs cross the boundary
//! as the same JSON the CLI and the file formats use, e.g.
//! `{"kind":"kfree_ring","ring":"gauss","k":2}`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kfree::admissibility::{
    find_locator, is_admissible, locator_density_bound, LocateOutcome, LocateStrategy,
    LocatorQuery,
};
use kfree::analytics::{entropy, theoretical_density_with_limit, zeta, Provenance};
use kfree::error::Error;
use kfree::lattice::Point;
use kfree::ring::RingId;
use kfree::sieve::{sieve_with_threads, BoxWindow, Density, PointSet, VSpec};
use kfree::symmetry::{inadmissible_image_witness, stab_search, GroupVerdict, UniMat};

/// Status codes for every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KfStatus {
    Ok = 0,
    /// Malformed arguments: bad JSON, bad UTF-8, null pointers.
    InvalidInput = 1,
    /// Mathematically out of domain for the operation.
    Domain = 2,
    /// A documented precondition was violated.
    Precondition = 3,
    /// Desk-scale resource limit exceeded.
    Resource = 4,
    /// 64-bit coordinate overflow.
    Overflow = 5,
    /// Internal invariant failure.
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(cleaned).unwrap());
    });
}

fn status_of(err: &Error) -> KfStatus {
    match err {
        Error::UnknownRing(_) | Error::InvalidInput(_) | Error::Json(_) => KfStatus::InvalidInput,
        Error::Domain(_) | Error::RingMismatch(_, _) => KfStatus::Domain,
        Error::Precondition(_) => KfStatus::Precondition,
        Error::Resource(_) => KfStatus::Resource,
        Error::Overflow(_) => KfStatus::Overflow,
        Error::Internal(_) | Error::Io(_) => KfStatus::Internal,
    }
}

fn fail(err: Error) -> KfStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// Runs a closure, translating errors and panics into status codes.
fn guarded<F: FnOnce() -> Result<KfStatus, Error>>(f: F) -> KfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(err)) => fail(err),
        Err(_) => {
            set_error("panic across the FFI boundary");
            KfStatus::Internal
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, Error> {
    if ptr.is_null() {
        return Err(Error::invalid("null string pointer"));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| Error::invalid("string is not UTF-8"))
}

fn parse_spec(json: &str) -> Result<VSpec, Error> {
    let spec: VSpec = serde_json::from_str(json)?;
    spec.validate()?;
    Ok(spec)
}

unsafe fn points_from_raw(coords: *const i64, n_points: usize, dim: u8) -> Result<Vec<Point>, Error> {
    if n_points == 0 {
        return Ok(Vec::new());
    }
    if coords.is_null() {
        return Err(Error::invalid("null coordinate pointer"));
    }
    let flat = unsafe { std::slice::from_raw_parts(coords, n_points * dim as usize) };
    flat.chunks_exact(dim as usize).map(Point::new).collect()
}

fn give_string(text: String, out: *mut *mut c_char) -> Result<KfStatus, Error> {
    if out.is_null() {
        return Err(Error::invalid("null output pointer"));
    }
    let cleaned: String = text.chars().filter(|&c| c != '\0').collect();
    unsafe {
        *out = CString::new(cleaned).unwrap().into_raw();
    }
    Ok(KfStatus::Ok)
}

/// The last error message raised on this thread, or NULL. Free with
/// [`kf_string_free`].
#[no_mangle]
pub extern "C" fn kf_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Frees a string returned by this library.
#[no_mangle]
pub extern "C" fn kf_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe {
            drop(CString::from_raw(s));
        }
    }
}

/// Opaque sieved point set.
pub struct KfPointSet {
    inner: PointSet,
}

/// Sieves the window [−radius, radius]^d of the spec (JSON) into a new
/// point-set handle.
#[no_mangle]
pub extern "C" fn kf_pointset_sieve(
    spec_json: *const c_char,
    radius: i64,
    threads: u32,
    out: *mut *mut KfPointSet,
) -> KfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let spec = parse_spec(unsafe { cstr(spec_json) }?)?;
        let window = BoxWindow::new(spec.dim(), radius)?;
        let ps = sieve_with_threads(&spec, &window, threads.max(1) as usize)?;
        unsafe {
            *out = Box::into_raw(Box::new(KfPointSet { inner: ps }));
        }
        Ok(KfStatus::Ok)
    })
}

/// Parses a point set from its JSON serialization.
#[no_mangle]
pub extern "C" fn kf_pointset_from_json(
    json: *const c_char,
    out: *mut *mut KfPointSet,
) -> KfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let ps = PointSet::from_json(unsafe { cstr(json) }?)?;
        unsafe {
            *out = Box::into_raw(Box::new(KfPointSet { inner: ps }));
        }
        Ok(KfStatus::Ok)
    })
}

#[no_mangle]
pub extern "C" fn kf_pointset_len(ps: *const KfPointSet) -> u64 {
    if ps.is_null() {
        return 0;
    }
    unsafe { &*ps }.inner.len() as u64
}

#[no_mangle]
pub extern "C" fn kf_pointset_dim(ps: *const KfPointSet) -> u8 {
    if ps.is_null() {
        return 0;
    }
    unsafe { &*ps }.inner.window.dim
}

/// Copies the flattened coordinates (len·dim values) into `buf` when its
/// capacity suffices; returns the number of values required either way.
#[no_mangle]
pub extern "C" fn kf_pointset_coords(
    ps: *const KfPointSet,
    buf: *mut i64,
    capacity: u64,
) -> u64 {
    if ps.is_null() {
        return 0;
    }
    let inner = &unsafe { &*ps }.inner;
    let dim = inner.window.dim as usize;
    let needed = (inner.len() * dim) as u64;
    if buf.is_null() || capacity < needed {
        return needed;
    }
    let slice = unsafe { std::slice::from_raw_parts_mut(buf, needed as usize) };
    for (i, p) in inner.iter().enumerate() {
        slice[i * dim..(i + 1) * dim].copy_from_slice(p.coords());
    }
    needed
}

/// Serializes the handle to pointset/1 JSON. Free with [`kf_string_free`].
#[no_mangle]
pub extern "C" fn kf_pointset_to_json(
    ps: *const KfPointSet,
    out: *mut *mut c_char,
) -> KfStatus {
    guarded(|| {
        if ps.is_null() {
            return Err(Error::invalid("null handle"));
        }
        give_string(unsafe { &*ps }.inner.to_json(), out)
    })
}

/// Exact member density of the window as a reduced fraction.
#[no_mangle]
pub extern "C" fn kf_pointset_density(
    ps: *const KfPointSet,
    numerator: *mut u64,
    denominator: *mut u64,
) -> KfStatus {
    guarded(|| {
        if ps.is_null() || numerator.is_null() || denominator.is_null() {
            return Err(Error::invalid("null pointer"));
        }
        let Density { numerator: n, denominator: d, .. } = unsafe { &*ps }.inner.density();
        unsafe {
            *numerator = n;
            *denominator = d;
        }
        Ok(KfStatus::Ok)
    })
}

#[no_mangle]
pub extern "C" fn kf_pointset_free(ps: *mut KfPointSet) {
    if !ps.is_null() {
        unsafe {
            drop(Box::from_raw(ps));
        }
    }
}

/// Riemann zeta with guaranteed absolute error ≤ tol (s ≥ 1.5).
#[no_mangle]
pub extern "C" fn kf_zeta(s: f64, tol: f64, out: *mut f64) -> KfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let v = zeta(s, tol)?;
        unsafe {
            *out = v;
        }
        Ok(KfStatus::Ok)
    })
}

/// Theoretical density of the spec; `is_extension` is set when the value
/// is a truncated Euler product rather than a closed form.
#[no_mangle]
pub extern "C" fn kf_theoretical_density(
    spec_json: *const c_char,
    euler_norm_limit: u64,
    out: *mut f64,
    is_extension: *mut bool,
) -> KfStatus {
    guarded(|| {
        if out.is_null() || is_extension.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let spec = parse_spec(unsafe { cstr(spec_json) }?)?;
        let td = theoretical_density_with_limit(&spec, euler_norm_limit)?;
        unsafe {
            *out = td.value;
            *is_extension = !matches!(td.provenance, Provenance::Zeta);
        }
        Ok(KfStatus::Ok)
    })
}

/// Topological entropy constant of the spec (density·log 2).
#[no_mangle]
pub extern "C" fn kf_entropy(
    spec_json: *const c_char,
    out: *mut f64,
    is_extension: *mut bool,
) -> KfStatus {
    guarded(|| {
        if out.is_null() || is_extension.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let spec = parse_spec(unsafe { cstr(spec_json) }?)?;
        let e = entropy(&spec)?;
        unsafe {
            *out = e.value;
            *is_extension = !matches!(e.provenance, Provenance::Zeta);
        }
        Ok(KfStatus::Ok)
    })
}

/// Admissibility of a flattened point list (n_points × dim coordinates).
/// `report_json` (optional) receives the certificate report.
#[no_mangle]
pub extern "C" fn kf_admissible(
    spec_json: *const c_char,
    coords: *const i64,
    n_points: usize,
    verdict: *mut bool,
    report_json: *mut *mut c_char,
) -> KfStatus {
    guarded(|| {
        if verdict.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let spec = parse_spec(unsafe { cstr(spec_json) }?)?;
        let points = unsafe { points_from_raw(coords, n_points, spec.dim()) }?;
        let report = is_admissible(&points, &spec)?;
        unsafe {
            *verdict = report.admissible;
        }
        if !report_json.is_null() {
            give_string(serde_json::to_string(&report)?, report_json)?;
        }
        Ok(KfStatus::Ok)
    })
}

/// Locator search; `found` reports whether a translate was returned, and
/// the JSON carries the translate / impossibility certificate.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn kf_locate(
    spec_json: *const c_char,
    p_coords: *const i64,
    p_len: usize,
    q_coords: *const i64,
    q_len: usize,
    radius: i64,
    crt_guided: bool,
    found: *mut bool,
    outcome_json: *mut *mut c_char,
) -> KfStatus {
    guarded(|| {
        if found.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let spec = parse_spec(unsafe { cstr(spec_json) }?)?;
        let query = LocatorQuery {
            pattern: unsafe { points_from_raw(p_coords, p_len, spec.dim()) }?,
            forbidden: unsafe { points_from_raw(q_coords, q_len, spec.dim()) }?,
            spec,
            radius,
            strategy: if crt_guided { LocateStrategy::CrtGuided } else { LocateStrategy::Scan },
        };
        let outcome = find_locator(&query)?;
        unsafe {
            *found = matches!(outcome, LocateOutcome::Found { .. });
        }
        if !outcome_json.is_null() {
            give_string(serde_json::to_string(&outcome)?, outcome_json)?;
        }
        Ok(KfStatus::Ok)
    })
}

/// Truncated locator-density lower bound for an admissible pattern.
#[no_mangle]
pub extern "C" fn kf_locator_density_bound(
    spec_json: *const c_char,
    p_coords: *const i64,
    p_len: usize,
    truncation: u64,
    out: *mut f64,
) -> KfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let spec = parse_spec(unsafe { cstr(spec_json) }?)?;
        let pattern = unsafe { points_from_raw(p_coords, p_len, spec.dim()) }?;
        let bound = locator_density_bound(&pattern, &spec, truncation)?;
        unsafe {
            *out = bound;
        }
        Ok(KfStatus::Ok)
    })
}

/// Stabiliser search; `exact` is set when the passed matrices equal the
/// predicted group slice, and the JSON carries the full stabreport/1.
#[no_mangle]
pub extern "C" fn kf_stab_search(
    spec_json: *const c_char,
    entry_bound: i64,
    radius: i64,
    threads: u32,
    exact: *mut bool,
    report_json: *mut *mut c_char,
) -> KfStatus {
    guarded(|| {
        if exact.is_null() {
            return Err(Error::invalid("null output pointer"));
        }
        let spec = parse_spec(unsafe { cstr(spec_json) }?)?;
        let report = stab_search(&spec, entry_bound, radius, threads.max(1) as usize)?;
        unsafe {
            *exact = matches!(report.group.verdict, GroupVerdict::Exact);
        }
        if !report_json.is_null() {
            give_string(serde_json::to_string(&report)?, report_json)?;
        }
        Ok(KfStatus::Ok)
    })
}

/// Inadmissible-image witness for a non-stabiliser matrix (row-major
/// entries). The JSON carries the witness/1 object with both verdicts.
#[no_mangle]
pub extern "C" fn kf_witness(
    ring: *const c_char,
    k: u32,
    matrix_rowmajor: *const i64,
    max_shell: i64,
    witness_json: *mut *mut c_char,
) -> KfStatus {
    guarded(|| {
        if matrix_rowmajor.is_null() {
            return Err(Error::invalid("null matrix pointer"));
        }
        let ring = RingId::parse(unsafe { cstr(ring) }?)?;
        let m = unsafe { std::slice::from_raw_parts(matrix_rowmajor, 4) };
        let mat = UniMat::new([[m[0], m[1]], [m[2], m[3]]])?;
        let witness = inadmissible_image_witness(&mat, ring, k, max_shell)?;
        if !witness_json.is_null() {
            give_string(serde_json::to_string(&witness)?, witness_json)?;
        }
        Ok(KfStatus::Ok)
    })
}
