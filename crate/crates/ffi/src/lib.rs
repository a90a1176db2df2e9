//! C interface to the `floquet` crate.
//!
//! Objects are returned as opaque handles that the caller releases with the
//! matching `fq_*_free` function. Every fallible call returns an `FqStatus`;
//! the message of the last error on the calling thread is available from
//! `fq_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use floquet::analysis::{circuit_distance, logical_error_rate, RateObservable, RatePoint};
use floquet::builder::Family;
use floquet::circuit::Circuit;
use floquet::decoder::MatchingDecoder;
use floquet::dem::{extract_dem, DetectorErrorModel};
use floquet::error::Error;
use floquet::lattice::build_lattice;
use floquet::logical::{logical_schedule, Observable};
use floquet::noise::{apply_noise, NoiseModel};
use floquet::sim::{sample_shots, ShotBlock};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDimensions = 3,
    InvalidCircuit = 4,
    Parse = 5,
    Nondeterministic = 6,
    Undecomposable = 7,
    OddSyndrome = 8,
    NoCrossing = 9,
    AboveThreshold = 10,
    Io = 11,
    Other = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqFamily {
    Standard = 0,
    Dynamic = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqObservable {
    H = 0,
    V = 1,
    Sum = 2,
}

/// One logical error rate with its 95% interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FqRatePoint {
    pub family: FqFamily,
    pub observable: FqObservable,
    pub d: u32,
    pub p: f64,
    pub shots: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub struct FqCircuit(Circuit);
pub struct FqDem(DetectorErrorModel);
pub struct FqDecoder(MatchingDecoder);
pub struct FqShots(ShotBlock);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FqStatus {
    match e {
        Error::InvalidArgument(_)
        | Error::IndexOutOfRange { .. }
        | Error::UnsupportedObservable(_) => FqStatus::InvalidArgument,
        Error::InvalidDimensions { .. } => FqStatus::InvalidDimensions,
        Error::InvalidCircuit(_) | Error::AlreadyNoisy | Error::Schedule(_) => {
            FqStatus::InvalidCircuit
        }
        Error::Parse { .. } => FqStatus::Parse,
        Error::NondeterministicDetector { .. } => FqStatus::Nondeterministic,
        Error::UndecomposableMechanism(_) => FqStatus::Undecomposable,
        Error::OddSyndrome => FqStatus::OddSyndrome,
        Error::NoCrossing => FqStatus::NoCrossing,
        Error::AboveThreshold => FqStatus::AboveThreshold,
        Error::Io(_) => FqStatus::Io,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), FqStatusError>) -> FqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FqStatus::Ok,
        Ok(Err(FqStatusError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FqStatus::Panic
        }
    }
}

struct FqStatusError(FqStatus, String);

impl From<Error> for FqStatusError {
    fn from(e: Error) -> Self {
        FqStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> FqStatusError {
    FqStatusError(FqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, FqStatusError> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, v: T) -> Result<(), FqStatusError> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), FqStatusError> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = v;
    Ok(())
}

unsafe fn text_in<'a>(s: *const c_char) -> Result<&'a str, FqStatusError> {
    if s.is_null() {
        return Err(null("string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| FqStatusError(FqStatus::InvalidArgument, e.to_string()))
}

unsafe fn text_out(out: *mut *mut c_char, s: String) -> Result<(), FqStatusError> {
    let c = CString::new(s).map_err(|e| FqStatusError(FqStatus::Other, e.to_string()))?;
    put(out, c.into_raw())
}

fn family(f: FqFamily) -> Family {
    match f {
        FqFamily::Standard => Family::Standard,
        FqFamily::Dynamic => Family::Dynamic,
    }
}

fn observable(o: FqObservable) -> Result<Observable, FqStatusError> {
    match o {
        FqObservable::H => Ok(Observable::H),
        FqObservable::V => Ok(Observable::V),
        FqObservable::Sum => Err(FqStatusError(
            FqStatus::InvalidArgument,
            "a circuit tracks H or V, not their sum".into(),
        )),
    }
}

fn rate_point(q: &RatePoint) -> FqRatePoint {
    FqRatePoint {
        family: match q.family {
            Family::Standard => FqFamily::Standard,
            Family::Dynamic => FqFamily::Dynamic,
        },
        observable: match q.observable {
            RateObservable::H => FqObservable::H,
            RateObservable::V => FqObservable::V,
            RateObservable::Sum => FqObservable::Sum,
        },
        d: q.d as u32,
        p: q.p,
        shots: q.shots,
        failures: q.failures,
        rate: q.rate,
        ci_low: q.ci_low,
        ci_high: q.ci_high,
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a memory-experiment circuit on an `l1` x `l2` torus. `p > 0` adds
/// circuit-level depolarizing noise.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_circuit_build(
    fam: FqFamily,
    l1: usize,
    l2: usize,
    cycles: usize,
    obs: FqObservable,
    p: f64,
    out: *mut *mut FqCircuit,
) -> FqStatus {
    guard(|| {
        let lat = build_lattice(l1, l2)?;
        let schedule = logical_schedule(&lat)?;
        let mut c = family(fam).build(&lat, cycles, observable(obs)?, &schedule)?;
        if p > 0.0 {
            c = apply_noise(&c, &NoiseModel::new(p)?)?;
        }
        store(out, FqCircuit(c))
    })
}

/// # Safety
/// `text` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_circuit_parse(
    text: *const c_char,
    out: *mut *mut FqCircuit,
) -> FqStatus {
    guard(|| store(out, FqCircuit(Circuit::parse(text_in(text)?)?)))
}

/// Serialize a circuit; free the result with `fq_string_free`.
///
/// # Safety
/// `c` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_circuit_to_text(
    c: *const FqCircuit,
    out: *mut *mut c_char,
) -> FqStatus {
    guard(|| text_out(out, as_ref(c, "circuit")?.0.to_text()))
}

/// # Safety
/// `c` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fq_circuit_num_qubits(c: *const FqCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.num_qubits())
}

/// # Safety
/// `c` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fq_circuit_num_detectors(c: *const FqCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.detector_records().len())
}

/// # Safety
/// `c` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fq_circuit_num_observables(c: *const FqCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.observable_records().len())
}

/// # Safety
/// `c` must come from this library or be NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fq_circuit_free(c: *mut FqCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Circuit distance up to `w_max`; writes -1 when it exceeds `w_max`.
///
/// # Safety
/// `c` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_circuit_distance(
    c: *const FqCircuit,
    w_max: usize,
    out: *mut i64,
) -> FqStatus {
    guard(|| {
        let d = circuit_distance(&as_ref(c, "circuit")?.0, w_max)?;
        put(out, d.map_or(-1, |d| d as i64))
    })
}

/// Frame-sample `shots` shots of a circuit.
///
/// # Safety
/// `c` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_sample(
    c: *const FqCircuit,
    shots: usize,
    seed: u64,
    out: *mut *mut FqShots,
) -> FqStatus {
    guard(|| {
        store(
            out,
            FqShots(sample_shots(&as_ref(c, "circuit")?.0, shots, seed)?),
        )
    })
}

/// # Safety
/// `s` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fq_shots_count(s: *const FqShots) -> usize {
    s.as_ref().map_or(0, |s| s.0.shots())
}

/// # Safety
/// `s` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fq_shots_num_detectors(s: *const FqShots) -> usize {
    s.as_ref().map_or(0, |s| s.0.num_detectors())
}

/// Number of detection events in shot `shot`.
///
/// # Safety
/// `s` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_shots_fired_count(
    s: *const FqShots,
    shot: usize,
    out: *mut usize,
) -> FqStatus {
    guard(|| {
        let s = &as_ref(s, "shots")?.0;
        if shot >= s.shots() {
            return Err(Error::IndexOutOfRange {
                index: shot,
                len: s.shots(),
            }
            .into());
        }
        put(out, s.fired(shot).len())
    })
}

/// Observable flips of shot `shot` as a bit mask.
///
/// # Safety
/// `s` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_shots_observable_mask(
    s: *const FqShots,
    shot: usize,
    out: *mut u64,
) -> FqStatus {
    guard(|| {
        let s = &as_ref(s, "shots")?.0;
        if shot >= s.shots() {
            return Err(Error::IndexOutOfRange {
                index: shot,
                len: s.shots(),
            }
            .into());
        }
        put(out, s.observable_mask(shot))
    })
}

/// # Safety
/// `s` must come from this library or be NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fq_shots_free(s: *mut FqShots) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `c` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_dem_extract(c: *const FqCircuit, out: *mut *mut FqDem) -> FqStatus {
    guard(|| store(out, FqDem(extract_dem(&as_ref(c, "circuit")?.0))))
}

/// # Safety
/// `text` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_dem_parse(text: *const c_char, out: *mut *mut FqDem) -> FqStatus {
    guard(|| store(out, FqDem(DetectorErrorModel::parse(text_in(text)?)?)))
}

/// # Safety
/// `m` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_dem_to_text(m: *const FqDem, out: *mut *mut c_char) -> FqStatus {
    guard(|| text_out(out, as_ref(m, "dem")?.0.to_text()))
}

/// # Safety
/// `m` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fq_dem_num_mechanisms(m: *const FqDem) -> usize {
    m.as_ref().map_or(0, |m| m.0.mechanisms.len())
}

/// # Safety
/// `m` must come from this library or be NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fq_dem_free(m: *mut FqDem) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_decoder_new(m: *const FqDem, out: *mut *mut FqDecoder) -> FqStatus {
    guard(|| {
        store(
            out,
            FqDecoder(MatchingDecoder::from_dem(&as_ref(m, "dem")?.0)?),
        )
    })
}

/// Decode one syndrome given as `n` detector indices; writes the predicted
/// observable mask.
///
/// # Safety
/// `dec` must be a live handle, `defects` must point to `n` values (or be
/// NULL when `n` is 0), `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_decoder_decode(
    dec: *const FqDecoder,
    defects: *const usize,
    n: usize,
    out: *mut u64,
) -> FqStatus {
    guard(|| {
        let dec = &as_ref(dec, "decoder")?.0;
        let syndrome: &[usize] = if n == 0 {
            &[]
        } else if defects.is_null() {
            return Err(null("defects"));
        } else {
            std::slice::from_raw_parts(defects, n)
        };
        if let Some(&bad) = syndrome.iter().find(|&&d| d >= dec.num_detectors()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: dec.num_detectors(),
            }
            .into());
        }
        put(out, dec.decode(syndrome)?)
    })
}

/// Decode every shot and count those whose prediction differs from the
/// sampled observable flips.
///
/// # Safety
/// `dec` and `s` must be live handles, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_decoder_count_failures(
    dec: *const FqDecoder,
    s: *const FqShots,
    out: *mut u64,
) -> FqStatus {
    guard(|| {
        let dec = &as_ref(dec, "decoder")?.0;
        let s = &as_ref(s, "shots")?.0;
        if s.num_detectors() != dec.num_detectors() {
            return Err(Error::InvalidArgument(
                "shots and decoder disagree on detector count".into(),
            )
            .into());
        }
        put(out, dec.count_logical_errors(s, None)? as u64)
    })
}

/// # Safety
/// `dec` must come from this library or be NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fq_decoder_free(dec: *mut FqDecoder) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// H, V and summed logical error rates at distance `d`; `out` must hold
/// three points.
///
/// # Safety
/// `out` must point to an array of three `FqRatePoint`.
#[no_mangle]
pub unsafe extern "C" fn fq_logical_error_rate(
    fam: FqFamily,
    d: usize,
    p: f64,
    shots: u64,
    seed: u64,
    out: *mut FqRatePoint,
) -> FqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let pts = logical_error_rate(family(fam), d, p, shots, seed)?;
        for (i, q) in pts.iter().enumerate() {
            *out.add(i) = rate_point(q);
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_are_distinct() {
        let all = [
            Error::InvalidArgument(String::new()),
            Error::InvalidDimensions {
                l1: 0,
                l2: 0,
                reason: String::new(),
            },
            Error::InvalidCircuit(String::new()),
            Error::Parse {
                line: 0,
                message: String::new(),
            },
            Error::NondeterministicDetector {
                detectors: vec![],
                observables: vec![],
            },
            Error::UndecomposableMechanism(String::new()),
            Error::OddSyndrome,
            Error::NoCrossing,
            Error::AboveThreshold,
        ];
        let mut codes: Vec<i32> = all.iter().map(|e| status_of(e) as i32).collect();
        codes.dedup();
        assert_eq!(codes.len(), all.len());
        assert!(!codes.contains(&(FqStatus::Ok as i32)));
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), FqStatus::Panic);
        let msg = unsafe { CStr::from_ptr(fq_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }
}
