//! C ABI for `sgfif`.
//!
//! Every fallible function returns an [`SgfifStatus`]; on failure a message is
//! available from [`sgfif_last_error`] on the same thread. Objects are opaque
//! handles released with the matching `*_free` function. Triples (`boundary`,
//! `midpoints`, `d`) are pointers to three contiguous doubles.

#![deny(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sgfif::address::Triangle;
use sgfif::energy::{
    delta_factor, energy_closed_form, graph_energy, verify_recursion, EnergyClass,
    HarmonicStructure,
};
use sgfif::laplacian::{classify, laplacian_at, LaplacianCase};
use sgfif::oracle::{solve_discrete_dirichlet, DEFAULT_SOLVER_CAP};
use sgfif::{Address, DepthCap, Error, FifSpec, HarmonicFunction, VertexFunction};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgfifStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidAddress = 2,
    InvalidSpec = 3,
    DepthCap = 4,
    SolverCap = 5,
    NonUniform = 6,
    LaplacianNonexistent = 7,
    InvalidArgument = 8,
    Numerical = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgfifEnergyClass {
    Harmonic = 0,
    Finite = 1,
    Infinite = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgfifLaplacianCase {
    Harmonic = 0,
    Constant = 1,
    Nonexistent = 2,
}

/// A fractal interpolation function specification.
pub struct SgfifSpec(FifSpec);

/// Values of a function on `V_m`, in canonical vertex order.
pub struct SgfifSurface {
    values: VertexFunction,
    addresses: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SgfifStatus {
    match e {
        Error::InvalidAddress { .. } | Error::NotInLevel { .. } | Error::BoundaryVertex(_) => {
            SgfifStatus::InvalidAddress
        }
        Error::InvalidSpec { .. } | Error::Json(_) => SgfifStatus::InvalidSpec,
        Error::DepthCap { .. } => SgfifStatus::DepthCap,
        Error::SolverCap { .. } => SgfifStatus::SolverCap,
        Error::NonUniform(_) => SgfifStatus::NonUniform,
        Error::LaplacianNonexistent => SgfifStatus::LaplacianNonexistent,
        Error::SingularSystem { .. } | Error::CriticalScaling(_) => SgfifStatus::Numerical,
        _ => SgfifStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
    Arg(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Run `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SgfifStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgfifStatus::Ok,
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("`{name}` is NULL"));
            SgfifStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            SgfifStatus::InvalidArgument
        }
        Err(_) => {
            set_error("internal panic".into());
            SgfifStatus::Panic
        }
    }
}

unsafe fn triple(p: *const f64, name: &'static str) -> Result<[f64; 3], Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: caller guarantees three readable doubles.
    let s = unsafe { std::slice::from_raw_parts(p, 3) };
    Ok([s[0], s[1], s[2]])
}

unsafe fn text<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: caller guarantees a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Fail::Arg(format!("`{name}` is not UTF-8: {e}")))
}

unsafe fn spec_ref<'a>(p: *const SgfifSpec) -> Result<&'a FifSpec, Fail> {
    // SAFETY: non-null handles come from `Box::into_raw` in this crate.
    unsafe { p.as_ref() }
        .map(|s| &s.0)
        .ok_or(Fail::Null("spec"))
}

unsafe fn write<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: checked non-null; caller guarantees it is writable.
    unsafe { out.write(value) };
    Ok(())
}

fn parse_address(s: &str) -> Result<Address, Fail> {
    Ok(s.parse::<Address>()?)
}

fn surface(values: VertexFunction) -> *mut SgfifSurface {
    let addresses = values
        .mesh()
        .vertices()
        .iter()
        .map(|v| CString::new(v.to_string()).expect("addresses are ASCII"))
        .collect();
    Box::into_raw(Box::new(SgfifSurface { values, addresses }))
}

/// Message describing the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sgfif_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build a spec from boundary values, midpoint values and vertical scalings.
///
/// # Safety
/// The three inputs must each point to three doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_spec_new(
    boundary: *const f64,
    midpoints: *const f64,
    d: *const f64,
    out: *mut *mut SgfifSpec,
) -> SgfifStatus {
    guard(|| {
        let spec = unsafe {
            FifSpec::new(
                triple(boundary, "boundary")?,
                triple(midpoints, "midpoints")?,
                triple(d, "d")?,
            )?
        };
        unsafe { write(out, Box::into_raw(Box::new(SgfifSpec(spec))), "out") }
    })
}

/// Parse the JSON spec format (`{"boundary": [..], "midpoints": [..], "d": ..}`).
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_spec_from_json(
    json: *const c_char,
    out: *mut *mut SgfifSpec,
) -> SgfifStatus {
    guard(|| {
        let spec = FifSpec::from_json_str(unsafe { text(json, "json") }?)?;
        unsafe { write(out, Box::into_raw(Box::new(SgfifSpec(spec))), "out") }
    })
}

/// Serialize a spec to JSON; release the string with [`sgfif_string_free`].
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_spec_to_json(
    spec: *const SgfifSpec,
    out: *mut *mut c_char,
) -> SgfifStatus {
    guard(|| {
        let json = unsafe { spec_ref(spec) }?.to_json_value().to_string();
        let c = CString::new(json).expect("JSON has no NULs");
        unsafe { write(out, c.into_raw(), "out") }
    })
}

/// # Safety
/// `spec` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sgfif_spec_free(spec: *mut SgfifSpec) {
    if !spec.is_null() {
        drop(unsafe { Box::from_raw(spec) });
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sgfif_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Evaluate the FIF at a vertex address such as `"12.3"`.
///
/// # Safety
/// `spec` must be a live handle, `address` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_spec_eval(
    spec: *const SgfifSpec,
    address: *const c_char,
    out: *mut f64,
) -> SgfifStatus {
    guard(|| {
        let spec = unsafe { spec_ref(spec) }?;
        let a = parse_address(unsafe { text(address, "address") }?)?;
        unsafe { write(out, spec.eval(&a), "out") }
    })
}

/// Evaluate the harmonic function with boundary values `boundary` at `address`.
///
/// # Safety
/// `boundary` must point to three doubles, `address` be NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_harmonic_eval(
    boundary: *const f64,
    address: *const c_char,
    out: *mut f64,
) -> SgfifStatus {
    guard(|| {
        let h = HarmonicFunction::new(unsafe { triple(boundary, "boundary") }?);
        let a = parse_address(unsafe { text(address, "address") }?)?;
        unsafe { write(out, h.eval(&a), "out") }
    })
}

/// Graph energies `E_0 ..= E_levels` (standard harmonic structure), written to
/// `energies`, which must hold `levels + 1` doubles.
///
/// # Safety
/// `spec` must be a live handle and `energies` writable for `levels + 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn sgfif_energy_levels(
    spec: *const SgfifSpec,
    levels: usize,
    energies: *mut f64,
) -> SgfifStatus {
    guard(|| {
        let spec = unsafe { spec_ref(spec) }?;
        if energies.is_null() {
            return Err(Fail::Null("energies"));
        }
        let cap = DepthCap::from_env()?;
        let report = verify_recursion(spec, levels, &HarmonicStructure::default(), cap)?;
        // SAFETY: caller provides room for levels + 1 values.
        let dst = unsafe { std::slice::from_raw_parts_mut(energies, levels + 1) };
        dst.copy_from_slice(&report.energies);
        Ok(())
    })
}

/// Closed-form total energy. `total` is `+INFINITY` when the class is infinite.
///
/// # Safety
/// `spec` must be a live handle; `class_out` and `total` writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_energy_total(
    spec: *const SgfifSpec,
    class_out: *mut SgfifEnergyClass,
    total: *mut f64,
) -> SgfifStatus {
    guard(|| {
        let spec = unsafe { spec_ref(spec) }?;
        let hs = HarmonicStructure::default();
        let e0 = graph_energy(&spec.on_level(0, DepthCap::default())?, &hs);
        let e1 = graph_energy(&spec.on_level(1, DepthCap::default())?, &hs);
        let closed = energy_closed_form(e0, e1, delta_factor(spec.d(), &hs))?;
        let c = match closed.class {
            EnergyClass::Harmonic => SgfifEnergyClass::Harmonic,
            EnergyClass::Finite => SgfifEnergyClass::Finite,
            EnergyClass::Infinite => SgfifEnergyClass::Infinite,
        };
        unsafe {
            write(class_out, c, "class_out")?;
            write(total, closed.total, "total")
        }
    })
}

/// Laplacian existence for a uniform-`d` FIF. `value` receives the constant
/// (0 in the harmonic case, NaN when nonexistent).
///
/// # Safety
/// `spec` must be a live handle; `case_out` and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_classify(
    spec: *const SgfifSpec,
    case_out: *mut SgfifLaplacianCase,
    value: *mut f64,
) -> SgfifStatus {
    guard(|| {
        let c = classify(unsafe { spec_ref(spec) }?)?;
        let case = match c.case {
            LaplacianCase::HarmonicCase => SgfifLaplacianCase::Harmonic,
            LaplacianCase::ConstantCase => SgfifLaplacianCase::Constant,
            LaplacianCase::Nonexistent => SgfifLaplacianCase::Nonexistent,
        };
        unsafe {
            write(case_out, case, "case_out")?;
            write(value, c.constant_value.unwrap_or(f64::NAN), "value")
        }
    })
}

/// `Δf` at an interior vertex.
///
/// # Safety
/// `spec` must be a live handle, `address` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_laplacian_at(
    spec: *const SgfifSpec,
    address: *const c_char,
    out: *mut f64,
) -> SgfifStatus {
    guard(|| {
        let spec = unsafe { spec_ref(spec) }?;
        let a = parse_address(unsafe { text(address, "address") }?)?;
        unsafe { write(out, laplacian_at(spec, &a)?, "out") }
    })
}

/// The FIF solving `u(q_i) = a_i`, `Δu = eta`.
///
/// # Safety
/// `a` must point to three doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_solve_dirichlet(
    a: *const f64,
    eta: f64,
    out: *mut *mut SgfifSpec,
) -> SgfifStatus {
    guard(|| {
        let spec = sgfif::laplacian::solve_dirichlet(unsafe { triple(a, "a") }?, eta)?;
        unsafe { write(out, Box::into_raw(Box::new(SgfifSpec(spec))), "out") }
    })
}

/// Evaluate a spec on every vertex of `V_level`. Honours `FIF_DEPTH_CAP`.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_surface_new(
    spec: *const SgfifSpec,
    level: usize,
    out: *mut *mut SgfifSurface,
) -> SgfifStatus {
    guard(|| {
        let spec = unsafe { spec_ref(spec) }?;
        let values = spec.on_level(level, DepthCap::from_env()?)?;
        unsafe { write(out, surface(values), "out") }
    })
}

/// Solve the discrete Dirichlet problem `(3/2) 5^m Δ_m u = eta` on `V_level`
/// with the sparse linear solver (level at most the solver cap, 7).
///
/// # Safety
/// `a` must point to three doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sgfif_oracle_dirichlet(
    a: *const f64,
    eta: f64,
    level: usize,
    out: *mut *mut SgfifSurface,
) -> SgfifStatus {
    guard(|| {
        let values =
            solve_discrete_dirichlet(unsafe { triple(a, "a") }?, eta, level, DEFAULT_SOLVER_CAP)?;
        unsafe { write(out, surface(values), "out") }
    })
}

/// Number of vertices; 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sgfif_surface_len(s: *const SgfifSurface) -> usize {
    unsafe { s.as_ref() }.map_or(0, |s| s.addresses.len())
}

/// Pointer to `sgfif_surface_len` values, valid while the surface lives; NULL for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sgfif_surface_values(s: *const SgfifSurface) -> *const f64 {
    unsafe { s.as_ref() }.map_or(ptr::null(), |s| s.values.values().as_ptr())
}

/// Canonical address of vertex `index`, valid while the surface lives; NULL if out of range.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sgfif_surface_address(
    s: *const SgfifSurface,
    index: usize,
) -> *const c_char {
    unsafe { s.as_ref() }
        .and_then(|s| s.addresses.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Planar position of vertex `index` in the standard triangle, written to `xy[0..2]`.
///
/// # Safety
/// `s` must be a live handle and `xy` writable for two doubles.
#[no_mangle]
pub unsafe extern "C" fn sgfif_surface_position(
    s: *const SgfifSurface,
    index: usize,
    xy: *mut f64,
) -> SgfifStatus {
    guard(|| {
        let s = unsafe { s.as_ref() }.ok_or(Fail::Null("surface"))?;
        let v = s
            .values
            .mesh()
            .vertices()
            .get(index)
            .ok_or_else(|| Fail::Arg(format!("index {index} out of range")))?;
        if xy.is_null() {
            return Err(Fail::Null("xy"));
        }
        let p = Triangle::default().embed(v.address());
        // SAFETY: caller provides two writable doubles.
        unsafe { std::slice::from_raw_parts_mut(xy, 2) }.copy_from_slice(&p);
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sgfif_surface_free(s: *mut SgfifSurface) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}
