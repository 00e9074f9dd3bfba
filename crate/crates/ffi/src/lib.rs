//! C ABI over the `pctele` simulator.
//!
//! Channels and random streams are opaque heap handles released with their
//! `_free` function. Every fallible call returns a [`PcteleStatus`]; on
//! failure [`pctele_last_error`] describes the problem for the calling
//! thread. Strings returned through `char**` out-parameters are owned by the
//! caller and released with [`pctele_string_free`]. Input amplitudes are
//! passed as interleaved `(re, im)` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use pctele::channels::{self, ChannelSpec};
use pctele::cli::{dump_circuit, CircuitArg};
use pctele::report::Report;
use pctele::{Error, Protocol, RngStream};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcteleStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidChannel = 3,
    NotNormalized = 4,
    Internal = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcteleMode {
    Exact = 0,
    Sample = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcteleCircuit {
    U1 = 0,
    U2 = 1,
    Channel1 = 2,
    Channel2 = 3,
}

/// Real channel coefficients: 2 for the one-qubit protocol, 4 for two.
pub struct PcteleChannel {
    spec: ChannelSpec,
}

/// Seeded random stream for sampled runs.
pub struct PcteleRng {
    stream: RngStream,
}

/// Result of one sampled run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PcteleTrial {
    /// 1 when the auxiliary qubit read 0.
    pub success: i32,
    /// Bell code(s), controller bit, auxiliary bit; `num_outcomes` are valid.
    pub outcomes: [u8; 4],
    pub num_outcomes: usize,
    /// Fidelity with the input, or -1 on failure.
    pub fidelity: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PcteleStatus {
    match e {
        Error::InvalidChannel(_) => PcteleStatus::InvalidChannel,
        Error::NotNormalized(_) => PcteleStatus::NotNormalized,
        Error::InvalidInput(_) | Error::CodeOutOfRange { .. } => PcteleStatus::InvalidArgument,
        _ => PcteleStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (PcteleStatus, String)>) -> PcteleStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PcteleStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PcteleStatus::Panic
        }
    }
}

fn lift<T>(r: pctele::Result<T>) -> Result<T, (PcteleStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (PcteleStatus, String) {
    (PcteleStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(
    p: *const T,
    len: usize,
    what: &str,
) -> Result<&'a [T], (PcteleStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn alpha_vec(p: *const f64, len: usize) -> Result<Vec<Complex64>, (PcteleStatus, String)> {
    let raw = slice(p, 2 * len, "alpha")?;
    Ok(raw
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect())
}

unsafe fn channel_ref<'a>(
    p: *const PcteleChannel,
) -> Result<&'a ChannelSpec, (PcteleStatus, String)> {
    p.as_ref().map(|c| &c.spec).ok_or_else(|| null("channel"))
}

fn protocol_for(spec: &ChannelSpec) -> Protocol {
    if spec.len() == 2 {
        Protocol::One
    } else {
        Protocol::Two
    }
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), (PcteleStatus, String)> {
    let c = CString::new(s).map_err(|e| (PcteleStatus::Internal, e.to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pctele_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pctele_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Validates `betas[0..len]` and stores a new channel in `*out`.
///
/// # Safety
/// `betas` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pctele_channel_new(
    betas: *const f64,
    len: usize,
    out: *mut *mut PcteleChannel,
) -> PcteleStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = lift(ChannelSpec::new(slice(betas, len, "betas")?))?;
        *out = Box::into_raw(Box::new(PcteleChannel { spec }));
        Ok(())
    })
}

/// # Safety
/// `channel` must come from [`pctele_channel_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn pctele_channel_free(channel: *mut PcteleChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Number of coefficients (2 or 4), or 0 for a null handle.
///
/// # Safety
/// `channel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pctele_channel_len(channel: *const PcteleChannel) -> usize {
    channel.as_ref().map_or(0, |c| c.spec.len())
}

/// Closed-form success probability for the protocol matching the channel.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pctele_success_probability(
    channel: *const PcteleChannel,
    out: *mut f64,
) -> PcteleStatus {
    guard(|| {
        let spec = channel_ref(channel)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lift(protocol_for(spec).success_probability(spec))?;
        Ok(())
    })
}

/// Success probability summed over the exact branch enumeration.
///
/// # Safety
/// `alpha` must point to `2 * alpha_len` doubles; `channel` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pctele_exact_success_probability(
    channel: *const PcteleChannel,
    alpha: *const f64,
    alpha_len: usize,
    out: *mut f64,
) -> PcteleStatus {
    guard(|| {
        let spec = channel_ref(channel)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let alpha = alpha_vec(alpha, alpha_len)?;
        let results = lift(protocol_for(spec).exact(&alpha, spec))?;
        *out = results
            .iter()
            .filter(|r| r.success)
            .filter_map(|r| r.probability)
            .sum();
        Ok(())
    })
}

/// New stream for trial `stream` under `seed`. Never null.
#[no_mangle]
pub extern "C" fn pctele_rng_new(seed: u64, stream: u64) -> *mut PcteleRng {
    Box::into_raw(Box::new(PcteleRng {
        stream: RngStream::for_trial(seed, stream),
    }))
}

/// # Safety
/// `rng` must come from [`pctele_rng_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn pctele_rng_free(rng: *mut PcteleRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// One sampled protocol run.
///
/// # Safety
/// Pointers must be valid as for [`pctele_exact_success_probability`]; `rng`
/// must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pctele_teleport(
    channel: *const PcteleChannel,
    alpha: *const f64,
    alpha_len: usize,
    rng: *mut PcteleRng,
    out: *mut PcteleTrial,
) -> PcteleStatus {
    guard(|| {
        let spec = channel_ref(channel)?;
        let rng = rng.as_mut().ok_or_else(|| null("rng"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let alpha = alpha_vec(alpha, alpha_len)?;
        let r = lift(protocol_for(spec).teleport(&alpha, spec, &mut rng.stream))?;
        let mut trial = PcteleTrial {
            success: r.success as i32,
            num_outcomes: r.outcomes.len(),
            fidelity: r.fidelity.unwrap_or(-1.0),
            ..Default::default()
        };
        trial.outcomes[..r.outcomes.len()].copy_from_slice(&r.outcomes);
        *out = trial;
        Ok(())
    })
}

/// JSON report, the same document the command line prints with
/// `--output json`. `trials` and `seed` are ignored in exact mode.
///
/// # Safety
/// Pointers as for [`pctele_exact_success_probability`]; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pctele_report_json(
    channel: *const PcteleChannel,
    alpha: *const f64,
    alpha_len: usize,
    mode: PcteleMode,
    trials: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> PcteleStatus {
    guard(|| {
        let spec = channel_ref(channel)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let alpha = alpha_vec(alpha, alpha_len)?;
        let protocol = protocol_for(spec);
        let report = lift(match mode {
            PcteleMode::Exact => Report::exact(protocol, &alpha, spec),
            PcteleMode::Sample => Report::sample(protocol, &alpha, spec, trials, seed),
        })?;
        give_string(report.to_json(), out)
    })
}

/// Gate netlist for `circuit`, ending with a `# max_deviation` line.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pctele_netlist(
    circuit: PcteleCircuit,
    channel: *const PcteleChannel,
    out: *mut *mut c_char,
) -> PcteleStatus {
    guard(|| {
        let spec = channel_ref(channel)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let arg = match circuit {
            PcteleCircuit::U1 => CircuitArg::U1,
            PcteleCircuit::U2 => CircuitArg::U2,
            PcteleCircuit::Channel1 => CircuitArg::Channel1,
            PcteleCircuit::Channel2 => CircuitArg::Channel2,
        };
        give_string(lift(dump_circuit(arg, spec))?, out)
    })
}

/// Amplitudes of the channel state as interleaved `(re, im)` pairs; `out`
/// must hold `2 * 2^n` doubles where `n` is 3 or 5 qubits.
///
/// # Safety
/// `channel` must be a live handle and `out` must have room for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pctele_channel_state(
    channel: *const PcteleChannel,
    out: *mut f64,
    out_len: usize,
) -> PcteleStatus {
    guard(|| {
        let spec = channel_ref(channel)?;
        let state = lift(match spec.len() {
            2 => channels::channel_one(spec),
            _ => channels::channel_two(spec),
        })?;
        let need = 2 * state.dim();
        if out_len < need {
            return Err((
                PcteleStatus::InvalidArgument,
                format!("need room for {need} doubles"),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (pair, a) in dst.chunks_exact_mut(2).zip(state.amplitudes()) {
            pair[0] = a.re;
            pair[1] = a.im;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn pctele_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copies the last error into an owned Rust string (for tests and wrappers).
pub fn last_error_string() -> String {
    unsafe { CStr::from_ptr(pctele_last_error()) }
        .to_string_lossy()
        .into_owned()
}
