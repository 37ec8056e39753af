//! C ABI for `geoblock`.
//!
//! Conventions:
//! - every fallible function returns a [`GbStatus`] and writes results
//!   through out-pointers, which are left untouched on failure;
//! - the message of the most recent failure on the calling thread is
//!   available from [`gb_last_error`];
//! - handles come from `*_parse`/constructor functions and are released with
//!   the matching `*_free`; strings returned by the library are released with
//!   [`gb_string_free`];
//! - panics never cross the boundary: they are reported as
//!   [`GbStatus::Panic`].
//!
//! The header `include/geoblock.h` is generated from this file at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use geoblock::cli::parse;
use geoblock::compact_groups::{classify_group_config, defect, GroupConfiguration};
use geoblock::lattice::{Lattice, LengthBound, RationalMatrix, TorusPoint};
use geoblock::optimizer::{min_block, SearchOptions};
use geoblock::rank_one::{classify, RankOneKind, RankOneSpace, SecurityStatus, SpherePoint};
use geoblock::torus::{
    midpoint_set, verify_bounded, verify_universal, BoundedCheck, TorusConfiguration,
    UniversalCheck,
};
use geoblock::{BlockingSet, Error, Provenance};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed number, vector or matrix.
    Parse = 3,
    /// Well-formed but unusable input (dimensions, singular data, ...).
    InvalidInput = 4,
    /// The optimizer exceeded its node budget.
    BudgetExhausted = 5,
    /// An eigenvalue gap fell in the guard band around the clustering threshold.
    IllConditioned = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GbSecurity {
    Secure = 0,
    Insecure = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GbSpace {
    Sphere = 0,
    RealProjective = 1,
    ComplexProjective = 2,
    QuaternionicProjective = 3,
    CayleyPlane = 4,
}

/// A configuration `{x, y}` on a flat torus, with exact rational data.
pub struct GbTorusConfig {
    inner: TorusConfiguration,
}

/// A finite set of torus points.
pub struct GbBlockingSet {
    inner: BlockingSet<TorusPoint>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(GbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => GbStatus::Parse,
            Error::BudgetExhausted { .. } => GbStatus::BudgetExhausted,
            Error::IllConditioned { .. } => GbStatus::IllConditioned,
            _ => GbStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Outcome<()>) -> GbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GbStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {message}"));
            GbStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Outcome<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Outcome<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Boxes `value` into `out`; nothing is allocated when `out` is null.
unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> Outcome<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

fn security(s: SecurityStatus) -> GbSecurity {
    match s {
        SecurityStatus::Secure => GbSecurity::Secure,
        SecurityStatus::Insecure => GbSecurity::Insecure,
        SecurityStatus::Undetermined => GbSecurity::Undetermined,
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `x:y` (coordinates `p/q` separated by commas). `basis` (rows
/// separated by `;`, the lattice is generated by its columns) and `gram`
/// may be null for the standard lattice and inner product.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_torus_config_parse(
    config: *const c_char,
    basis: *const c_char,
    gram: *const c_char,
    out: *mut *mut GbTorusConfig,
) -> GbStatus {
    guard(|| {
        let (x, y) = parse::parse_config(str_arg(config, "config")?, "config")?;
        let n = x.dim();
        let basis = match opt_str_arg(basis, "basis")? {
            Some(b) => parse::parse_rational_matrix(b, "basis")?,
            None => RationalMatrix::identity(n),
        };
        let gram = match opt_str_arg(gram, "gram")? {
            Some(g) => parse::parse_rational_matrix(g, "gram")?,
            None => RationalMatrix::identity(n),
        };
        if basis.dim() != n || gram.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: basis.dim().max(gram.dim()),
            }
            .into());
        }
        let lattice = Arc::new(Lattice::new(basis, gram)?);
        let inner = TorusConfiguration::from_vectors(&x, &y, &lattice)?;
        write_handle(out, GbTorusConfig { inner })
    })
}

/// # Safety
/// `cfg` must be null or a live handle from [`gb_torus_config_parse`].
#[no_mangle]
pub unsafe extern "C" fn gb_torus_config_free(cfg: *mut GbTorusConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Torus dimension, or 0 for a null handle.
///
/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_torus_config_dim(cfg: *const GbTorusConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.inner.dim())
}

/// The canonical midpoint blocking set (`2^n` points, `2^n - 1` for `{x, x}`).
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_midpoint_set(
    cfg: *const GbTorusConfig,
    out: *mut *mut GbBlockingSet,
) -> GbStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let inner = midpoint_set(&cfg.inner);
        write_handle(out, GbBlockingSet { inner })
    })
}

/// Parses points separated by `;` on the torus of `cfg`.
///
/// # Safety
/// `cfg` must be a live handle, `points` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gb_blocking_set_parse(
    cfg: *const GbTorusConfig,
    points: *const c_char,
    out: *mut *mut GbBlockingSet,
) -> GbStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let lattice = cfg.inner.lattice();
        let pts = parse::parse_rational_points(str_arg(points, "points")?, "points")?
            .iter()
            .map(|p| geoblock::lattice::reduce(p, lattice))
            .collect::<geoblock::Result<Vec<_>>>()?;
        let inner = BlockingSet::new(pts, Provenance::Manual);
        write_handle(out, GbBlockingSet { inner })
    })
}

/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_blocking_set_free(set: *mut GbBlockingSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_blocking_set_len(set: *const GbBlockingSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Point `index` as `p/q` coordinates separated by commas; free the result
/// with [`gb_string_free`].
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_blocking_set_point(
    set: *const GbBlockingSet,
    index: usize,
    out: *mut *mut c_char,
) -> GbStatus {
    guard(|| {
        let set = handle(set, "set")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = set.inner.points().get(index).ok_or_else(|| {
            Failure(
                GbStatus::InvalidInput,
                format!("index {index} out of range for {} points", set.inner.len()),
            )
        })?;
        let text: Vec<String> = p
            .rep()
            .coordinates()
            .iter()
            .map(geoblock::lattice::format_rational)
            .collect();
        let c = CString::new(text.join(",")).expect("no NULs in numbers");
        out.write(c.into_raw());
        Ok(())
    })
}

/// Checks `set` against every connecting geodesic of `cfg`, of any length.
///
/// # Safety
/// Handles must be live; `blocked` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_verify_universal(
    cfg: *const GbTorusConfig,
    set: *const GbBlockingSet,
    blocked: *mut bool,
) -> GbStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let set = handle(set, "set")?;
        let ok = matches!(verify_universal(&cfg.inner, &set.inner)?, UniversalCheck::Certified(_));
        write(blocked, ok, "blocked")
    })
}

/// Checks `set` against the connecting geodesics of length at most `length`
/// (a rational such as `"7/2"`).
///
/// # Safety
/// Handles must be live, `length` NUL-terminated, `blocked` writable.
#[no_mangle]
pub unsafe extern "C" fn gb_verify_bounded(
    cfg: *const GbTorusConfig,
    set: *const GbBlockingSet,
    length: *const c_char,
    blocked: *mut bool,
) -> GbStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let set = handle(set, "set")?;
        let bound = LengthBound::new(parse::parse_rational(str_arg(length, "length")?, "length")?)?;
        let ok = verify_bounded(&cfg.inner, &set.inner, &bound)? == BoundedCheck::Blocked;
        write(blocked, ok, "blocked")
    })
}

/// Certified minimum blocking set for geodesics up to `length`. A
/// `node_budget` of 0 selects the default. `witness` may be null.
///
/// # Safety
/// `cfg` must be live, `length` NUL-terminated, `optimum` writable, and
/// `witness` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gb_min_block(
    cfg: *const GbTorusConfig,
    length: *const c_char,
    node_budget: u64,
    optimum: *mut usize,
    witness: *mut *mut GbBlockingSet,
) -> GbStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        if optimum.is_null() {
            return Err(null("optimum"));
        }
        let bound = LengthBound::new(parse::parse_rational(str_arg(length, "length")?, "length")?)?;
        let options = if node_budget == 0 {
            SearchOptions::default()
        } else {
            SearchOptions { node_budget }
        };
        let cert = min_block(&cfg.inner, &bound, &options)?;
        write(optimum, cert.optimum, "optimum")?;
        if !witness.is_null() {
            witness.write(Box::into_raw(Box::new(GbBlockingSet { inner: cert.witness })));
        }
        Ok(())
    })
}

/// Classifies `{x, y}` on a compact rank-one space. Points are unit vectors
/// of length `len` in the sphere model (for projective spaces a
/// representative); `n` is the dimension parameter, and for spheres and
/// real projective spaces must equal `len - 1`.
///
/// # Safety
/// `x` and `y` must point to `len` doubles; `status` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gb_sphere_classify(
    space: GbSpace,
    n: usize,
    x: *const f64,
    y: *const f64,
    len: usize,
    status: *mut GbSecurity,
) -> GbStatus {
    guard(|| {
        if x.is_null() || y.is_null() {
            return Err(null("point"));
        }
        let xs = SpherePoint::new(std::slice::from_raw_parts(x, len).to_vec())?;
        let ys = SpherePoint::new(std::slice::from_raw_parts(y, len).to_vec())?;
        let kind = match space {
            GbSpace::Sphere => RankOneKind::Sphere,
            GbSpace::RealProjective => RankOneKind::RealProjective,
            GbSpace::ComplexProjective => RankOneKind::ComplexProjective,
            GbSpace::QuaternionicProjective => RankOneKind::QuaternionicProjective,
            GbSpace::CayleyPlane => RankOneKind::CayleyPlane,
        };
        let v = classify(&RankOneSpace::new(kind, n)?, &xs, &ys)?;
        write(status, security(v.status), "status")
    })
}

/// Classifies `{k1, k2}` in SU(n). Matrices use the CLI syntax: `I`, `-I`,
/// `scalar(θ)`, `diag(θ_1,…,θ_n)` or rows of complex entries. `defect_out`
/// may be null.
///
/// # Safety
/// Strings must be NUL-terminated; `status` writable; `defect_out` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn gb_group_classify(
    n: usize,
    k1: *const c_char,
    k2: *const c_char,
    status: *mut GbSecurity,
    defect_out: *mut usize,
) -> GbStatus {
    guard(|| {
        let a = parse::parse_unitary(str_arg(k1, "k1")?, n, "k1")?;
        let b = parse::parse_unitary(str_arg(k2, "k2")?, n, "k2")?;
        let cfg = GroupConfiguration::new(a, b)?;
        let d = defect(&cfg)?;
        let v = classify_group_config(&cfg)?;
        write(status, security(v.status), "status")?;
        if !defect_out.is_null() {
            defect_out.write(d);
        }
        Ok(())
    })
}

/// Runs the command line `argv[0..argc]` (without a program name) and
/// returns its exit code; the JSON report is written to `report` unless it
/// is null. Returns 2 and sets the last error when the arguments are unusable,
/// and -1 after an internal panic.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `report` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gb_run(
    argv: *const *const c_char,
    argc: usize,
    report: *mut *mut c_char,
) -> i32 {
    let mut code = geoblock::cli::EXIT_INPUT;
    let status = guard(|| {
        if argv.is_null() && argc > 0 {
            return Err(null("argv"));
        }
        let mut args = vec!["geoblock".to_string()];
        for i in 0..argc {
            args.push(str_arg(*argv.add(i), "argument")?.to_string());
        }
        let outcome = geoblock::cli::run(args);
        code = outcome.code;
        if !report.is_null() {
            let text = CString::new(outcome.stdout).expect("JSON has no NULs");
            report.write(text.into_raw());
        }
        Ok(())
    });
    if status == GbStatus::Panic {
        code = -1;
    }
    code
}
