// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use iongate_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ig_last_error_message()) }.to_string_lossy().into_owned()
}

fn profile(name: &str) -> *mut IgConfig {
    let name = CString::new(name).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { ig_config_from_profile(name.as_ptr(), &mut cfg) }, IgStatus::Ok);
    assert!(!cfg.is_null());
    cfg
}

#[test]
fn budget_and_spin_echo_through_handle() {
    let cfg = profile("table1-100us");
    let mut total = 0.0;
    assert_eq!(unsafe { ig_budget_total(cfg, &mut total) }, IgStatus::Ok);
    assert!((total - 0.9e-3).abs() <= 0.1e-3, "{total}");
    let mut e = 0.0;
    assert_eq!(unsafe { ig_spin_echo_error(cfg, 100e-6, &mut e) }, IgStatus::Ok);
    assert!((e - 1.37e-3).abs() < 0.01e-3, "{e}");
    assert_eq!(unsafe { ig_spin_echo_error(cfg, -1.0, &mut e) }, IgStatus::InvalidArgument);
    assert!(last_error().contains("t_g"));
    let (mut d, mut u) = (0.0, 0.0);
    assert_eq!(unsafe { ig_spam_exact(cfg, &mut d, &mut u) }, IgStatus::Ok);
    assert!((0.5 * (d + u) - 1.74e-3).abs() < 1e-8);
    unsafe { ig_config_free(cfg) };
}

#[test]
fn hash_matches_library() {
    let cfg = profile("rbm-paper");
    let mut buf = [0 as std::ffi::c_char; 65];
    assert_eq!(unsafe { ig_config_hash(cfg, buf.as_mut_ptr(), buf.len()) }, IgStatus::Ok);
    let got = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string();
    assert_eq!(got, iongate::config::builtin_profile("rbm-paper").unwrap().hash().unwrap());
    assert_eq!(unsafe { ig_config_hash(cfg, buf.as_mut_ptr(), 10) }, IgStatus::InvalidArgument);
    assert_eq!(unsafe { ig_config_set_seed(cfg, 99) }, IgStatus::Ok);
    assert_eq!(unsafe { ig_config_hash(cfg, buf.as_mut_ptr(), buf.len()) }, IgStatus::Ok);
    assert_ne!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), got);
    assert_eq!(unsafe { ig_config_set_seed(cfg, u64::MAX) }, IgStatus::Config);
    unsafe { ig_config_free(cfg) };
}

#[test]
fn toml_handle_and_errors() {
    let text = iongate::config::builtin_profile("table1-100us").unwrap().to_toml().unwrap();
    let good = CString::new(text.clone()).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { ig_config_from_toml(good.as_ptr(), &mut cfg) }, IgStatus::Ok);
    unsafe { ig_config_free(cfg) };

    let bad = CString::new(text.replacen("heating_rate = 2.2", "heating_rate = -2.2", 1)).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { ig_config_from_toml(bad.as_ptr(), &mut cfg) }, IgStatus::Config);
    assert!(cfg.is_null());
    assert!(last_error().contains("noise.heating_rate"));

    let unknown = CString::new("nope").unwrap();
    assert_eq!(unsafe { ig_config_from_profile(unknown.as_ptr(), &mut cfg) }, IgStatus::Config);
    assert_eq!(unsafe { ig_config_from_profile(ptr::null(), &mut cfg) }, IgStatus::NullPointer);
    assert_eq!(unsafe { ig_budget_total(ptr::null(), ptr::null_mut()) }, IgStatus::NullPointer);
    unsafe { ig_config_free(ptr::null_mut()) };
}

#[test]
fn parity_fit_through_arrays() {
    let d = iongate::tomography::synthesize_parity_seeded(
        0.95,
        0.0,
        0.3,
        &iongate::tomography::uniform_phases(16),
        1000,
        4,
    )
    .unwrap();
    let mut r = IgFitResult::default();
    let s =
        unsafe { ig_fit_parity_ml(d.phases.as_ptr(), d.even_counts.as_ptr(), d.total_shots.as_ptr(), d.len(), &mut r) };
    assert_eq!(s, IgStatus::Ok);
    let f = iongate::tomography::fit_ml_binomial(&d).unwrap();
    assert_eq!(r.contrast, f.c);
    assert_eq!(r.phase, f.phi0);
    assert!(r.contrast_err > 0.0);
    let s = unsafe { ig_fit_parity_ml(d.phases.as_ptr(), d.even_counts.as_ptr(), d.total_shots.as_ptr(), 3, &mut r) };
    assert_eq!(s, IgStatus::Config);
    assert!(last_error().contains("8 phase points"));
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ig_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // The test binary lives in <target>/<profile>/deps next to the static library.
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    let lib = [deps.join("libiongate_ffi.a"), deps.parent().unwrap().join("libiongate_ffi.a")]
        .into_iter()
        .find(|p| p.exists())
        .unwrap_or_else(|| panic!("static library missing near {}", deps.display()));
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "iongate.h"
int main(void) {
    IgConfig *cfg = NULL;
    if (ig_config_from_profile("table1-100us", &cfg) != IG_STATUS_OK) return 1;
    double total = 0.0;
    if (ig_budget_total(cfg, &total) != IG_STATUS_OK) return 2;
    ig_config_free(cfg);
    if (ig_config_from_profile("missing", &cfg) != IG_STATUS_CONFIG) return 3;
    if (strlen(ig_last_error_message()) == 0) return 4;
    printf("%.6e\n", total);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let total: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((total - 0.9e-3).abs() <= 0.1e-3);
}
