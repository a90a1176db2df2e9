use std::ffi::{CStr, CString};
use std::ptr;

use floquet_ffi::*;

unsafe fn circuit(fam: FqFamily, l1: usize, l2: usize, cycles: usize, p: f64) -> *mut FqCircuit {
    let mut c = ptr::null_mut();
    assert_eq!(
        fq_circuit_build(fam, l1, l2, cycles, FqObservable::H, p, &mut c),
        FqStatus::Ok
    );
    c
}

#[test]
fn noiseless_pipeline() {
    unsafe {
        let c = circuit(FqFamily::Dynamic, 4, 6, 2, 0.0);
        assert_eq!(fq_circuit_num_qubits(c), 24);
        let mut shots = ptr::null_mut();
        assert_eq!(fq_sample(c, 50, 1, &mut shots), FqStatus::Ok);
        assert_eq!(fq_shots_count(shots), 50);
        assert_eq!(fq_shots_num_detectors(shots), fq_circuit_num_detectors(c));
        for s in 0..50 {
            let mut n = 1;
            assert_eq!(fq_shots_fired_count(shots, s, &mut n), FqStatus::Ok);
            assert_eq!(n, 0);
        }
        fq_shots_free(shots);
        fq_circuit_free(c);
    }
}

#[test]
fn noisy_decode_round_trip() {
    unsafe {
        let c = circuit(FqFamily::Dynamic, 4, 6, 2, 0.01);
        let mut dem = ptr::null_mut();
        assert_eq!(fq_dem_extract(c, &mut dem), FqStatus::Ok);
        assert!(fq_dem_num_mechanisms(dem) > 0);

        let mut text = ptr::null_mut();
        assert_eq!(fq_dem_to_text(dem, &mut text), FqStatus::Ok);
        let mut dem2 = ptr::null_mut();
        assert_eq!(fq_dem_parse(text, &mut dem2), FqStatus::Ok);
        assert_eq!(fq_dem_num_mechanisms(dem2), fq_dem_num_mechanisms(dem));
        fq_string_free(text);

        let mut dec = ptr::null_mut();
        assert_eq!(fq_decoder_new(dem2, &mut dec), FqStatus::Ok);
        let mut mask = 7;
        assert_eq!(
            fq_decoder_decode(dec, ptr::null(), 0, &mut mask),
            FqStatus::Ok
        );
        assert_eq!(mask, 0);
        let bad = [usize::MAX];
        assert_eq!(
            fq_decoder_decode(dec, bad.as_ptr(), 1, &mut mask),
            FqStatus::InvalidArgument
        );

        let mut shots = ptr::null_mut();
        assert_eq!(fq_sample(c, 2000, 3, &mut shots), FqStatus::Ok);
        let mut failures = 0;
        assert_eq!(
            fq_decoder_count_failures(dec, shots, &mut failures),
            FqStatus::Ok
        );
        assert!(failures > 0 && failures < 1000, "{failures}");

        fq_shots_free(shots);
        fq_decoder_free(dec);
        fq_dem_free(dem2);
        fq_dem_free(dem);
        fq_circuit_free(c);
    }
}

#[test]
fn circuit_text_round_trip_and_distance() {
    unsafe {
        let c = circuit(FqFamily::Dynamic, 4, 6, 2, 0.0);
        let mut text = ptr::null_mut();
        assert_eq!(fq_circuit_to_text(c, &mut text), FqStatus::Ok);
        let mut c2 = ptr::null_mut();
        assert_eq!(fq_circuit_parse(text, &mut c2), FqStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(fq_circuit_to_text(c2, &mut again), FqStatus::Ok);
        assert_eq!(CStr::from_ptr(text), CStr::from_ptr(again));
        let mut d = 0;
        assert_eq!(fq_circuit_distance(c2, 3, &mut d), FqStatus::Ok);
        assert_eq!(d, 2);
        assert_eq!(fq_circuit_distance(c2, 1, &mut d), FqStatus::Ok);
        assert_eq!(d, -1);
        fq_string_free(text);
        fq_string_free(again);
        fq_circuit_free(c2);
        fq_circuit_free(c);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(
            fq_circuit_build(FqFamily::Standard, 2, 4, 2, FqObservable::H, 0.0, &mut c),
            FqStatus::InvalidDimensions
        );
        assert!(c.is_null());
        let msg = CStr::from_ptr(fq_last_error()).to_str().unwrap();
        assert!(msg.contains("(2, 4)"), "{msg}");

        assert_eq!(
            fq_circuit_build(FqFamily::Dynamic, 4, 6, 2, FqObservable::Sum, 0.0, &mut c),
            FqStatus::InvalidArgument
        );
        let bad = CString::new("NOT_A_GATE 0").unwrap();
        assert_eq!(fq_circuit_parse(bad.as_ptr(), &mut c), FqStatus::Parse);
        assert_eq!(fq_circuit_parse(ptr::null(), &mut c), FqStatus::NullPointer);
        assert_eq!(
            fq_circuit_to_text(ptr::null(), ptr::null_mut()),
            FqStatus::NullPointer
        );
        assert_eq!(fq_circuit_num_qubits(ptr::null()), 0);
        fq_circuit_free(ptr::null_mut());
    }
}

#[test]
fn rates_through_the_c_api() {
    let mut out = [FqRatePoint {
        family: FqFamily::Standard,
        observable: FqObservable::H,
        d: 0,
        p: 0.0,
        shots: 0,
        failures: 0,
        rate: 0.0,
        ci_low: 0.0,
        ci_high: 0.0,
    }; 3];
    unsafe {
        assert_eq!(
            fq_logical_error_rate(FqFamily::Dynamic, 2, 0.0, 100, 1, out.as_mut_ptr()),
            FqStatus::Ok
        );
    }
    assert_eq!(
        out.map(|q| q.observable),
        [FqObservable::H, FqObservable::V, FqObservable::Sum]
    );
    assert!(out
        .iter()
        .all(|q| q.failures == 0 && q.shots == 100 && q.family == FqFamily::Dynamic));
}
