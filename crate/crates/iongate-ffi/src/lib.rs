// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over the iongate library.
//!
//! Every function returns an [`IgStatus`]. On failure the message is kept per
//! thread and read with [`ig_last_error_message`]. Configurations are opaque
//! [`IgConfig`] handles released with [`ig_config_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use iongate::budget::budget_table;
use iongate::config::{builtin_profile, ExperimentConfig};
use iongate::readout::spam_exact;
use iongate::spinecho::epsilon_se;
use iongate::tomography::{fit_ml_binomial, ParityDataset};
use iongate::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numeric = 4,
    Io = 5,
    Panic = 6,
}

/// Opaque experiment configuration.
pub struct IgConfig {
    inner: ExperimentConfig,
}

/// Maximum-likelihood parity-fringe fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IgFitResult {
    pub contrast: f64,
    pub offset: f64,
    pub phase: f64,
    pub contrast_err: f64,
    pub offset_err: f64,
    pub phase_err: f64,
    pub log_likelihood: f64,
    pub at_boundary: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> IgStatus {
    match e {
        Error::Config(_) | Error::Validation(_) | Error::Serde(_) => IgStatus::Config,
        Error::InvalidParameter(_) | Error::Dimension(_) => IgStatus::InvalidArgument,
        Error::Io(_) => IgStatus::Io,
        _ => IgStatus::Numeric,
    }
}

fn guard<F: FnOnce() -> Result<(), (IgStatus, String)>>(f: F) -> IgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IgStatus::Ok
        }
        Ok(Err((s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            IgStatus::Panic
        }
    }
}

fn lib<T>(r: iongate::Result<T>) -> Result<T, (IgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (IgStatus, String) {
    (IgStatus::NullPointer, format!("{name} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (IgStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (IgStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn config<'a>(cfg: *const IgConfig) -> Result<&'a ExperimentConfig, (IgStatus, String)> {
    cfg.as_ref().map(|c| &c.inner).ok_or_else(|| null("config"))
}

unsafe fn store_config(out: *mut *mut IgConfig, inner: ExperimentConfig) -> Result<(), (IgStatus, String)> {
    *out = Box::into_raw(Box::new(IgConfig { inner }));
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ig_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ig_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a configuration from a built-in profile name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_config_from_profile(name: *const c_char, out: *mut *mut IgConfig) -> IgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let cfg = lib(builtin_profile(c_str(name, "name")?))?;
        store_config(out, cfg)
    })
}

/// Parse and validate a TOML configuration.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ig_config_from_toml(text: *const c_char, out: *mut *mut IgConfig) -> IgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let cfg = lib(ExperimentConfig::from_toml(c_str(text, "text")?))?;
        lib(cfg.check())?;
        store_config(out, cfg)
    })
}

/// Release a configuration. Null is accepted.
///
/// # Safety
/// `cfg` must come from an `ig_config_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ig_config_free(cfg: *mut IgConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Override the master seed.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ig_config_set_seed(cfg: *mut IgConfig, seed: u64) -> IgStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(|| null("config"))?;
        c.inner.seed = seed;
        c.inner.rb.seed = seed;
        lib(c.inner.check())
    })
}

/// Write the 64-character configuration hash plus NUL into `buf`.
///
/// # Safety
/// `cfg` must be a live handle and `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ig_config_hash(cfg: *const IgConfig, buf: *mut c_char, len: usize) -> IgStatus {
    guard(|| {
        let h = lib(config(cfg)?.hash())?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len <= h.len() {
            return Err((
                IgStatus::InvalidArgument,
                format!("buffer of {len} bytes is too small, need {}", h.len() + 1),
            ));
        }
        ptr::copy_nonoverlapping(h.as_ptr().cast::<c_char>(), buf, h.len());
        *buf.add(h.len()) = 0;
        Ok(())
    })
}

/// Total gate error of the configured error budget.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ig_budget_total(cfg: *const IgConfig, out: *mut f64) -> IgStatus {
    guard(|| {
        let c = config(cfg)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lib(budget_table(&c.noise, &c.gate, &c.alphas))?.total;
        Ok(())
    })
}

/// Spin-echo sequence error at gate duration `t_g` seconds.
///
/// # Safety
/// `cfg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ig_spin_echo_error(cfg: *const IgConfig, t_g: f64, out: *mut f64) -> IgStatus {
    guard(|| {
        let c = config(cfg)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lib(epsilon_se(&c.spin_echo, t_g))?;
        Ok(())
    })
}

/// Expected per-qubit readout errors of the configured detection model.
///
/// # Safety
/// `cfg` must be a live handle; `eps_down` and `eps_up` writable.
#[no_mangle]
pub unsafe extern "C" fn ig_spam_exact(cfg: *const IgConfig, eps_down: *mut f64, eps_up: *mut f64) -> IgStatus {
    guard(|| {
        let c = config(cfg)?;
        if eps_down.is_null() || eps_up.is_null() {
            return Err(null("eps_down or eps_up"));
        }
        lib(c.readout.check())?;
        let (d, u) = spam_exact(&c.readout);
        *eps_down = d;
        *eps_up = u;
        Ok(())
    })
}

/// Maximum-likelihood fit of even-parity counts at `n` analysis phases.
///
/// # Safety
/// The three input arrays must hold `n` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ig_fit_parity_ml(
    phases: *const f64,
    even_counts: *const u64,
    shots: *const u64,
    n: usize,
    out: *mut IgFitResult,
) -> IgStatus {
    guard(|| {
        if phases.is_null() || even_counts.is_null() || shots.is_null() {
            return Err(null("input array"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = lib(ParityDataset::new(
            std::slice::from_raw_parts(phases, n).to_vec(),
            std::slice::from_raw_parts(even_counts, n).to_vec(),
            std::slice::from_raw_parts(shots, n).to_vec(),
        ))?;
        let f = lib(fit_ml_binomial(&d))?;
        *out = IgFitResult {
            contrast: f.c,
            offset: f.c0,
            phase: f.phi0,
            contrast_err: f.c_err,
            offset_err: f.c0_err,
            phase_err: f.phi0_err,
            log_likelihood: f.log_likelihood,
            at_boundary: f.at_boundary,
        };
        Ok(())
    })
}
