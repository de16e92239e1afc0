use std::ffi::{CStr, CString};
use std::ptr;

use nlstw_ffi::*;

fn last_error() -> String {
    let p = nlstw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn grid(l: f64, n: usize) -> *mut NlstwGrid {
    let mut g = ptr::null_mut();
    assert_eq!(nlstw_grid_new(l, l, n, n, &mut g), NlstwStatus::Ok);
    g
}

#[test]
fn bad_grid_sets_last_error() {
    let mut g = ptr::null_mut();
    let st = unsafe { nlstw_grid_new(-1.0, 1.0, 8, 8, &mut g) };
    assert_eq!(st, NlstwStatus::InvalidArgument);
    assert!(g.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_arguments_are_reported() {
    let mut e = 0.0;
    let st = unsafe { nlstw_energy(ptr::null(), ptr::null(), &mut e) };
    assert_eq!(st, NlstwStatus::NullPointer);
    assert!(last_error().contains("null"));
    unsafe {
        nlstw_grid_free(ptr::null_mut());
        nlstw_field_free(ptr::null_mut());
        nlstw_wave_free(ptr::null_mut());
        nlstw_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { nlstw_grid_len(ptr::null()) }, 0);
}

#[test]
fn field_values_round_trip_through_file() {
    unsafe {
        let g = grid(4.0, 8);
        let n = nlstw_grid_len(g);
        assert_eq!(n, 64);
        let re: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).cos()).collect();
        let im: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut f = ptr::null_mut();
        assert_eq!(nlstw_field_from_values(g, re.as_ptr(), im.as_ptr(), n, &mut f), NlstwStatus::Ok);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("f.nlstw1").to_str().unwrap()).unwrap();
        assert_eq!(nlstw_field_write(f, path.as_ptr()), NlstwStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(nlstw_field_read(path.as_ptr(), &mut back), NlstwStatus::Ok);
        assert_eq!(nlstw_field_len(back), n);

        let (mut re2, mut im2) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(nlstw_field_values(back, re2.as_mut_ptr(), im2.as_mut_ptr(), n), NlstwStatus::Ok);
        assert_eq!(re, re2);
        assert_eq!(im, im2);

        let mut short = vec![0.0; 3];
        let st = nlstw_field_values(back, short.as_mut_ptr(), short.as_mut_ptr(), 3);
        assert_eq!(st, NlstwStatus::InvalidArgument);

        nlstw_field_free(back);
        nlstw_field_free(f);
        nlstw_grid_free(g);
    }
}

#[test]
fn missing_file_is_io_error() {
    let path = CString::new("/nonexistent/dir/x.nlstw1").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { nlstw_field_read(path.as_ptr(), &mut f) }, NlstwStatus::Io);
}

#[test]
fn vacuum_has_zero_energy() {
    unsafe {
        let g = grid(4.0, 8);
        let n = nlstw_grid_len(g);
        let (re, im) = (vec![1.0; n], vec![0.0; n]);
        let mut f = ptr::null_mut();
        nlstw_field_from_values(g, re.as_ptr(), im.as_ptr(), n, &mut f);
        let mut nl = ptr::null_mut();
        assert_eq!(nlstw_nonlinearity_gp(&mut nl), NlstwStatus::Ok);
        let (mut e, mut q) = (1.0, 1.0);
        assert_eq!(nlstw_energy(f, nl, &mut e), NlstwStatus::Ok);
        assert_eq!(nlstw_momentum(f, &mut q), NlstwStatus::Ok);
        assert!(e.abs() < 1e-14 && q.abs() < 1e-14);
        nlstw_nonlinearity_free(nl);
        nlstw_field_free(f);
        nlstw_grid_free(g);
    }
}

#[test]
fn cubic_quintic_needs_valid_alpha() {
    let mut nl = ptr::null_mut();
    assert_eq!(unsafe { nlstw_nonlinearity_cubic_quintic(3.0, &mut nl) }, NlstwStatus::Ok);
    unsafe { nlstw_nonlinearity_free(nl) };
    let mut nl = ptr::null_mut();
    let st = unsafe { nlstw_nonlinearity_cubic_quintic(f64::NAN, &mut nl) };
    assert_ne!(st, NlstwStatus::Ok);
}

#[test]
fn momentum_solve_returns_subsonic_wave() {
    unsafe {
        let g = grid(16.0, 64);
        let mut nl = ptr::null_mut();
        nlstw_nonlinearity_gp(&mut nl);
        let mut w = ptr::null_mut();
        let st = nlstw_solve_momentum(g, nl, 1.0, 1e-5, 4000, &mut w);
        assert!(st == NlstwStatus::Ok || st == NlstwStatus::NotConverged, "{st:?}");
        assert!(!w.is_null());
        assert_eq!(nlstw_wave_converged(w), st == NlstwStatus::Ok);
        let (mut c, mut e) = (0.0, 0.0);
        nlstw_wave_speed(w, &mut c);
        nlstw_wave_energy(w, &mut e);
        assert!(c > 0.0 && c < 2f64.sqrt(), "c = {c}");
        assert!(e > 0.0 && e < 2f64.sqrt(), "E = {e}");

        let mut json = ptr::null_mut();
        assert_eq!(nlstw_wave_sidecar_json(w, &mut json), NlstwStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        nlstw_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["c"].as_f64().unwrap() - c).abs() < 1e-15);

        let mut f = ptr::null_mut();
        assert_eq!(nlstw_wave_field(w, &mut f), NlstwStatus::Ok);
        let mut q = 0.0;
        nlstw_momentum(f, &mut q);
        assert!((q - 1.0).abs() < 1e-8, "Q = {q}");

        nlstw_field_free(f);
        nlstw_wave_free(w);
        nlstw_nonlinearity_free(nl);
        nlstw_grid_free(g);
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(nlstw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/nlstw.h")).unwrap();
    for name in [
        "nlstw_last_error",
        "nlstw_grid_new",
        "nlstw_field_read",
        "nlstw_solve_momentum",
        "nlstw_solve_kinetic",
        "nlstw_wave_free",
        "nlstw_kp_lump",
        "NLSTW_STATUS_NOT_CONVERGED",
    ] {
        assert!(header.contains(name), "{name} missing");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"nlstw.h\"\nint main(void) {\n  NlstwGrid *g = 0;\n  \
         NlstwStatus s = nlstw_grid_new(1.0, 1.0, 8, 8, &g);\n  nlstw_grid_free(g);\n  \
         return s == NLSTW_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
