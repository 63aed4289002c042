use std::ffi::{CStr, CString};
use std::ptr;

use bellnoise_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bn_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn bell_states_are_maximally_entangled() {
    for state in [
        BnBellState::PsiMinus,
        BnBellState::PsiPlus,
        BnBellState::PhiPlus,
        BnBellState::PhiMinus,
    ] {
        let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
        let mut c = 0.0;
        unsafe {
            assert_eq!(
                bn_bell_state(state, re.as_mut_ptr(), im.as_mut_ptr()),
                BnStatus::Ok
            );
            assert_eq!(
                bn_concurrence(re.as_ptr(), im.as_ptr(), &mut c),
                BnStatus::Ok
            );
        }
        assert!((c - 1.0).abs() < 1e-12);
        assert!((re.iter().step_by(5).sum::<f64>() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut c = 0.0;
    let re = [0.0; 16];
    let st = unsafe { bn_concurrence(re.as_ptr(), re.as_ptr(), &mut c) };
    assert_eq!(st, BnStatus::NotDensityMatrix);
    assert!(last_error().contains("density matrix"));

    let st = unsafe { bn_concurrence(ptr::null(), re.as_ptr(), &mut c) };
    assert_eq!(st, BnStatus::NullPointer);

    let bad = CString::new("geometry = cube\n").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { bn_scenario_parse(bad.as_ptr(), &mut s) },
        BnStatus::Config
    );
    assert!(last_error().contains("geometry"));
    assert!(s.is_null());

    let mut out = 0.0;
    let st = unsafe {
        bn_white_concurrence(
            BnGeometry::Isotropic,
            BnBellState::PsiPlus,
            2.0,
            1.0,
            0.5,
            &mut out,
        )
    };
    assert_eq!(st, BnStatus::InvalidArgument);
}

#[test]
fn last_error_is_per_thread() {
    let mut c = 0.0;
    unsafe { bn_concurrence(ptr::null(), ptr::null(), &mut c) };
    let here = last_error();
    let there = std::thread::spawn(last_error).join().unwrap();
    assert!(!here.is_empty());
    assert!(there.is_empty());
}

#[test]
fn closed_forms_and_sudden_death() {
    let mut c = 0.0;
    let mut t = 0.0;
    unsafe {
        assert_eq!(
            bn_white_concurrence(
                BnGeometry::Isotropic,
                BnBellState::PsiMinus,
                1.0,
                1.0,
                3.0,
                &mut c
            ),
            BnStatus::Ok
        );
        assert!((c - 1.0).abs() < 1e-12);
        assert_eq!(
            bn_white_concurrence(
                BnGeometry::Dephasing,
                BnBellState::PhiPlus,
                0.5,
                2.0,
                1.0,
                &mut c
            ),
            BnStatus::Ok
        );
        assert!((c - (-1.5f64).exp()).abs() < 1e-12);
        assert_eq!(
            bn_sudden_death_time(
                BnGeometry::Isotropic,
                BnBellState::PsiPlus,
                0.0,
                2.0,
                &mut t
            ),
            BnStatus::Ok
        );
        assert!((t - 0.5 * 3f64.ln()).abs() < 1e-10);
        let mut valid = false;
        assert_eq!(
            bn_qsba_concurrence(
                BnBellState::PhiPlus,
                true,
                4.0,
                4.0,
                40.0,
                2.0 * 2f64.sqrt() * 1.25,
                &mut c,
                &mut valid
            ),
            BnStatus::Ok
        );
        assert!(valid);
        assert!((c - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn scenario_round_trip() {
    let name = CString::new("fig1").unwrap();
    let mut s = ptr::null_mut();
    let mut trace = ptr::null_mut();
    unsafe {
        assert_eq!(bn_scenario_preset(name.as_ptr(), &mut s), BnStatus::Ok);
        assert_eq!(bn_scenario_run(s, 1, &mut trace), BnStatus::Ok);
        let n = bn_trace_len(trace);
        assert_eq!(n, 4 * 201);
        let mut row = BnTraceRow {
            t: 0.0,
            method: BnMethod::Qsba,
            state: BnBellState::PhiMinus,
            concurrence: 0.0,
            stderr: 0.0,
        };
        assert_eq!(bn_trace_row(trace, 0, &mut row), BnStatus::Ok);
        assert_eq!(row.method, BnMethod::Analytic);
        assert_eq!(row.concurrence, 1.0);
        assert!(row.stderr.is_nan());
        assert_eq!(bn_trace_row(trace, n, &mut row), BnStatus::InvalidArgument);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("fig1.csv").to_str().unwrap()).unwrap();
        assert_eq!(bn_trace_write_csv(trace, path.as_ptr()), BnStatus::Ok);
        let text = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
        assert_eq!(text.lines().count(), n + 1);

        bn_trace_free(trace);
        bn_scenario_free(s);
        bn_trace_free(ptr::null_mut());
        assert_eq!(bn_trace_len(ptr::null()), 0);
    }
}
