use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sgfif_ffi::*;

fn last_error() -> String {
    let p = sgfif_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn spec(json: &str) -> *mut SgfifSpec {
    let json = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { sgfif_spec_from_json(json.as_ptr(), &mut out) },
        SgfifStatus::Ok
    );
    out
}

#[test]
fn spec_lifecycle_and_eval() {
    let (x, y, d) = ([0.0; 3], [1.0; 3], [0.2; 3]);
    let mut s = ptr::null_mut();
    let st = unsafe { sgfif_spec_new(x.as_ptr(), y.as_ptr(), d.as_ptr(), &mut s) };
    assert_eq!(st, SgfifStatus::Ok);
    let mut v = f64::NAN;
    let addr = CString::new("1.2").unwrap();
    assert_eq!(
        unsafe { sgfif_spec_eval(s, addr.as_ptr(), &mut v) },
        SgfifStatus::Ok
    );
    assert_eq!(v, 1.0);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { sgfif_spec_to_json(s, &mut json) }, SgfifStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { sgfif_string_free(json) };
    let again = spec(&text);
    let mut w = f64::NAN;
    let deep = CString::new("1232.1").unwrap();
    unsafe {
        assert_eq!(sgfif_spec_eval(s, deep.as_ptr(), &mut v), SgfifStatus::Ok);
        assert_eq!(
            sgfif_spec_eval(again, deep.as_ptr(), &mut w),
            SgfifStatus::Ok
        );
        sgfif_spec_free(again);
        sgfif_spec_free(s);
        sgfif_spec_free(ptr::null_mut());
    }
    assert_eq!(v, w);
}

#[test]
fn error_codes() {
    let mut s = ptr::null_mut();
    let (x, d) = ([0.0; 3], [1.5; 3]);
    let st = unsafe { sgfif_spec_new(x.as_ptr(), x.as_ptr(), d.as_ptr(), &mut s) };
    assert_eq!(st, SgfifStatus::InvalidSpec);
    assert!(last_error().contains("`d`"));
    assert!(s.is_null());

    let st = unsafe { sgfif_spec_new(ptr::null(), x.as_ptr(), x.as_ptr(), &mut s) };
    assert_eq!(st, SgfifStatus::NullPointer);
    assert!(last_error().contains("boundary"));

    let bad = CString::new("{\"boundary\": [0, 0]}").unwrap();
    assert_eq!(
        unsafe { sgfif_spec_from_json(bad.as_ptr(), &mut s) },
        SgfifStatus::InvalidSpec
    );

    let u = spec(r#"{"boundary": [0, 0, 0], "midpoints": [1, 1, 1], "d": 0.2}"#);
    let mut v = 0.0;
    let corner = CString::new(".1").unwrap();
    assert_eq!(
        unsafe { sgfif_laplacian_at(u, corner.as_ptr(), &mut v) },
        SgfifStatus::InvalidAddress
    );
    let mut surf = ptr::null_mut();
    assert_eq!(
        unsafe { sgfif_surface_new(u, 40, &mut surf) },
        SgfifStatus::DepthCap
    );
    let a = [0.0; 3];
    assert_eq!(
        unsafe { sgfif_oracle_dirichlet(a.as_ptr(), 1.0, 9, &mut surf) },
        SgfifStatus::SolverCap
    );

    let n = spec(r#"{"boundary": [0, 0, 0], "midpoints": [1, 0, 0], "d": [0.1, 0.2, 0.3]}"#);
    let mut case = SgfifLaplacianCase::Harmonic;
    assert_eq!(
        unsafe { sgfif_classify(n, &mut case, &mut v) },
        SgfifStatus::NonUniform
    );
    unsafe {
        sgfif_spec_free(u);
        sgfif_spec_free(n);
    }
}

#[test]
fn energy_and_laplacian() {
    let u = spec(r#"{"boundary": [0, 0, 0], "midpoints": [1, 1, 1], "d": 0.2}"#);
    let mut e = [0.0; 5];
    assert_eq!(
        unsafe { sgfif_energy_levels(u, 4, e.as_mut_ptr()) },
        SgfifStatus::Ok
    );
    assert_eq!(e[0], 0.0);
    assert!((e[1] - 10.0).abs() < 1e-12);
    let (mut class, mut total) = (SgfifEnergyClass::Infinite, 0.0);
    assert_eq!(
        unsafe { sgfif_energy_total(u, &mut class, &mut total) },
        SgfifStatus::Ok
    );
    assert_eq!(class, SgfifEnergyClass::Finite);
    assert!((total - 12.5).abs() < 1e-12);

    let mut case = SgfifLaplacianCase::Nonexistent;
    let mut value = 0.0;
    assert_eq!(
        unsafe { sgfif_classify(u, &mut case, &mut value) },
        SgfifStatus::Ok
    );
    assert_eq!(case, SgfifLaplacianCase::Constant);
    assert!((value + 15.0).abs() < 1e-12);
    let at = CString::new("2.3").unwrap();
    assert_eq!(
        unsafe { sgfif_laplacian_at(u, at.as_ptr(), &mut value) },
        SgfifStatus::Ok
    );
    assert!((value + 15.0).abs() < 1e-12);

    let big = spec(r#"{"boundary": [0, 0, 0], "midpoints": [1, 1, 1], "d": 0.5}"#);
    assert_eq!(
        unsafe { sgfif_energy_total(big, &mut class, &mut total) },
        SgfifStatus::Ok
    );
    assert_eq!(class, SgfifEnergyClass::Infinite);
    assert!(total.is_infinite());
    unsafe {
        sgfif_spec_free(u);
        sgfif_spec_free(big);
    }
}

#[test]
fn surfaces_agree_with_oracle() {
    let a = [1.0, -0.5, 2.0];
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { sgfif_solve_dirichlet(a.as_ptr(), -4.0, &mut s) },
        SgfifStatus::Ok
    );
    let (mut f, mut o) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(sgfif_surface_new(s, 3, &mut f), SgfifStatus::Ok);
        assert_eq!(
            sgfif_oracle_dirichlet(a.as_ptr(), -4.0, 3, &mut o),
            SgfifStatus::Ok
        );
        let n = sgfif_surface_len(f);
        assert_eq!(n, 42);
        let fv = std::slice::from_raw_parts(sgfif_surface_values(f), n);
        let ov = std::slice::from_raw_parts(sgfif_surface_values(o), n);
        for k in 0..n {
            assert!((fv[k] - ov[k]).abs() < 1e-10);
            let a = CStr::from_ptr(sgfif_surface_address(f, k));
            assert_eq!(a, CStr::from_ptr(sgfif_surface_address(o, k)));
        }
        assert!(sgfif_surface_address(f, n).is_null());
        let mut xy = [0.0; 2];
        assert_eq!(
            sgfif_surface_position(f, 0, xy.as_mut_ptr()),
            SgfifStatus::Ok
        );
        assert_eq!(xy, [0.0, 0.0]);
        assert_eq!(
            sgfif_surface_position(f, n, xy.as_mut_ptr()),
            SgfifStatus::InvalidArgument
        );
        sgfif_surface_free(f);
        sgfif_surface_free(o);
        sgfif_spec_free(s);
    }
}

#[test]
fn harmonic_eval() {
    let b = [1.0, 0.0, 0.0];
    let addr = CString::new("1.3").unwrap();
    let mut v = 0.0;
    assert_eq!(
        unsafe { sgfif_harmonic_eval(b.as_ptr(), addr.as_ptr(), &mut v) },
        SgfifStatus::Ok
    );
    assert_eq!(v, 0.4);
}

/// Compile and run a C program against the generated header and the shared library.
#[test]
fn c_program_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    // target/<profile>/ holds the cdylib
    let lib_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    });
    let so = lib_dir.join("libsgfif_ffi.so");
    if !so.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!(
            "skipping: no C compiler or shared library at {}",
            so.display()
        );
        return;
    }
    let exe = tmp.join("c_smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(manifest.join("tests/c_smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lsgfif_ffi")
        .arg("-lm")
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe)
        .env("LD_LIBRARY_PATH", &lib_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
