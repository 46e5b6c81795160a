use std::ffi::CStr;
use std::ptr;

use cpt_eq_ffi::*;

struct Prefs(*mut CptEqPreferences);

impl Drop for Prefs {
    fn drop(&mut self) {
        unsafe { cpt_eq_preferences_free(self.0) }
    }
}

struct GameHandle(*mut CptEqGame);

impl Drop for GameHandle {
    fn drop(&mut self) {
        unsafe { cpt_eq_game_free(self.0) }
    }
}

fn eut() -> Prefs {
    let mut out = ptr::null_mut();
    let s = unsafe {
        cpt_eq_preferences_new(
            0.0,
            1.0,
            1.0,
            1.0,
            CptEqWeighting::Identity,
            1.0,
            CptEqWeighting::Identity,
            1.0,
            &mut out,
        )
    };
    assert_eq!(s, CptEqStatus::Ok);
    Prefs(out)
}

fn prelec(alpha: f64) -> Prefs {
    let mut out = ptr::null_mut();
    let s = unsafe {
        cpt_eq_preferences_new(
            0.0,
            1.0,
            1.0,
            1.0,
            CptEqWeighting::Prelec,
            alpha,
            CptEqWeighting::Prelec,
            alpha,
            &mut out,
        )
    };
    assert_eq!(s, CptEqStatus::Ok);
    Prefs(out)
}

fn game(counts: &[usize], payoffs: &[f64]) -> GameHandle {
    let mut out = ptr::null_mut();
    let s = unsafe { cpt_eq_game_new(counts.len(), counts.as_ptr(), payoffs.as_ptr(), payoffs.len(), &mut out) };
    assert_eq!(s, CptEqStatus::Ok, "{}", last_error());
    GameHandle(out)
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        cpt_eq_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn coordination() -> GameHandle {
    game(&[2, 2], &[2.0, 0.0, 0.0, 1.0, 3.0, 0.0, 0.0, 1.0])
}

#[test]
fn expected_utility_value() {
    let p = eut();
    let mut v = 0.0;
    let s = unsafe { cpt_eq_value(p.0, [0.5, 0.5].as_ptr(), [40.0, 24.0].as_ptr(), 2, &mut v) };
    assert_eq!(s, CptEqStatus::Ok);
    assert_eq!(v, 32.0);
}

#[test]
fn regret_matches_difference_of_values() {
    let p = prelec(0.6);
    let probs = [0.2, 0.5, 0.3];
    let x = [10.0, -3.0, 4.0];
    let y = [1.0, 2.0, 3.0];
    let (mut r, mut vx, mut vy) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(cpt_eq_regret(p.0, probs.as_ptr(), x.as_ptr(), y.as_ptr(), 3, &mut r), CptEqStatus::Ok);
        assert_eq!(cpt_eq_value(p.0, probs.as_ptr(), x.as_ptr(), 3, &mut vx), CptEqStatus::Ok);
        assert_eq!(cpt_eq_value(p.0, probs.as_ptr(), y.as_ptr(), 3, &mut vy), CptEqStatus::Ok);
    }
    assert!((r - (vx - vy)).abs() < 1e-12);
}

#[test]
fn invalid_probabilities_set_error_message() {
    let p = eut();
    let mut v = 0.0;
    let s = unsafe { cpt_eq_value(p.0, [0.5, 0.6].as_ptr(), [1.0, 2.0].as_ptr(), 2, &mut v) };
    assert_eq!(s, CptEqStatus::InvalidArgument);
    assert!(last_error().contains("probability"), "{}", last_error());
}

#[test]
fn invalid_weighting_parameter_is_rejected() {
    let mut out = ptr::null_mut();
    let s = unsafe {
        cpt_eq_preferences_new(
            0.0,
            1.0,
            1.0,
            1.0,
            CptEqWeighting::Prelec,
            -1.0,
            CptEqWeighting::Identity,
            1.0,
            &mut out,
        )
    };
    assert_eq!(s, CptEqStatus::InvalidArgument);
    assert!(out.is_null());
}

#[test]
fn null_pointers_are_reported() {
    let mut v = 0.0;
    let s = unsafe { cpt_eq_value(ptr::null(), [1.0].as_ptr(), [1.0].as_ptr(), 1, &mut v) };
    assert_eq!(s, CptEqStatus::NullPointer);
    let p = eut();
    let s = unsafe { cpt_eq_value(p.0, [1.0].as_ptr(), [1.0].as_ptr(), 1, ptr::null_mut()) };
    assert_eq!(s, CptEqStatus::NullPointer);
    unsafe {
        cpt_eq_preferences_free(ptr::null_mut());
        cpt_eq_game_free(ptr::null_mut());
    }
}

#[test]
fn payoff_length_is_checked() {
    let mut out = ptr::null_mut();
    let s = unsafe { cpt_eq_game_new(2, [2usize, 2].as_ptr(), [0.0; 7].as_ptr(), 7, &mut out) };
    assert_eq!(s, CptEqStatus::LengthMismatch);
    assert!(out.is_null());
}

#[test]
fn correlated_equilibrium_check() {
    let g = coordination();
    assert_eq!(unsafe { cpt_eq_game_joint_size(g.0) }, 4);
    let a = eut();
    let b = eut();
    let prefs = [a.0 as *const _, b.0 as *const _];
    let mut member = false;
    let mut worst = f64::NAN;
    let diagonal = [0.5, 0.0, 0.0, 0.5];
    let s = unsafe {
        cpt_eq_check_correlated(g.0, prefs.as_ptr(), 2, diagonal.as_ptr(), 4, 1e-9, &mut member, &mut worst)
    };
    assert_eq!(s, CptEqStatus::Ok);
    assert!(member);
    let off = [0.0, 0.5, 0.5, 0.0];
    let s = unsafe {
        cpt_eq_check_correlated(g.0, prefs.as_ptr(), 2, off.as_ptr(), 4, 1e-9, &mut member, ptr::null_mut())
    };
    assert_eq!(s, CptEqStatus::Ok);
    assert!(!member);
}

#[test]
fn wrong_preference_count_is_rejected() {
    let g = coordination();
    let a = eut();
    let prefs = [a.0 as *const _];
    let mut member = false;
    let s = unsafe {
        cpt_eq_check_correlated(g.0, prefs.as_ptr(), 1, [0.25; 4].as_ptr(), 4, 1e-9, &mut member, ptr::null_mut())
    };
    assert_ne!(s, CptEqStatus::Ok);
}

#[test]
fn classification_and_vertices() {
    let g = coordination();
    let a = eut();
    let b = eut();
    let prefs = [a.0 as *const _, b.0 as *const _];
    let mut class = CptEqClassification {
        class: CptEqClass::Equivalent,
        kind: 0,
        alpha: 0.0,
        beta: 0.0,
    };
    let mut count = 0usize;

    let s = unsafe { cpt_eq_classify_2x2(g.0, prefs.as_ptr(), 2, &mut class, ptr::null_mut(), 0, &mut count) };
    assert_eq!(s, CptEqStatus::BufferTooSmall);
    assert_eq!(count, 5);

    let mut vertices = [0.0; 4 * 8];
    let s = unsafe { cpt_eq_classify_2x2(g.0, prefs.as_ptr(), 2, &mut class, vertices.as_mut_ptr(), 8, &mut count) };
    assert_eq!(s, CptEqStatus::Ok);
    assert_eq!(class.class, CptEqClass::Generic);
    assert_eq!(class.kind, 1);
    assert!((class.alpha - 2.0).abs() < 1e-9 && (class.beta - 3.0).abs() < 1e-9);
    let expected = [1.0 / 12.0, 2.0 / 12.0, 3.0 / 12.0, 6.0 / 12.0];
    let hit = vertices[..4 * count]
        .chunks(4)
        .any(|v| v.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-9));
    assert!(hit, "{vertices:?}");
}

#[test]
fn classification_requires_two_by_two() {
    let g = game(&[2, 3], &[0.0; 12]);
    let a = eut();
    let b = eut();
    let prefs = [a.0 as *const _, b.0 as *const _];
    let mut class = CptEqClassification {
        class: CptEqClass::Equivalent,
        kind: 0,
        alpha: 0.0,
        beta: 0.0,
    };
    let mut count = 0usize;
    let s = unsafe { cpt_eq_classify_2x2(g.0, prefs.as_ptr(), 2, &mut class, ptr::null_mut(), 0, &mut count) };
    assert_eq!(s, CptEqStatus::NotTwoByTwo);
}

#[test]
fn region_components_of_worked_example() {
    let payoffs = [
        69.0, 61.0, 20.0, 50.0, 60.0, 30.0, 101.0, 41.0, 0.0, //
        10.0, 0.0, 10.0, 0.0, 10.0, 0.0, 0.0, 10.0, 0.0,
    ];
    let g = game(&[3, 3], &payoffs);
    let a = prelec(0.5);
    let b = eut();
    let prefs = [a.0 as *const _, b.0 as *const _];
    let (mut members, mut components) = (0usize, 0usize);
    let s = unsafe {
        cpt_eq_region_components(g.0, prefs.as_ptr(), 2, 0, 0, 60, 1e-9, &mut members, &mut components)
    };
    assert_eq!(s, CptEqStatus::Ok, "{}", last_error());
    assert!(members > 0);
    assert_eq!(components, 2);

    let s = unsafe {
        cpt_eq_region_components(g.0, prefs.as_ptr(), 2, 5, 0, 60, 1e-9, &mut members, &mut components)
    };
    assert_eq!(s, CptEqStatus::InvalidArgument);
}

#[test]
fn status_strings_are_static() {
    let s = unsafe { CStr::from_ptr(cpt_eq_status_str(CptEqStatus::NotTwoByTwo)) };
    assert_eq!(s.to_str().unwrap(), "game is not 2x2");
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/cpt_eq.h")).unwrap();
    for name in [
        "cpt_eq_last_error",
        "cpt_eq_status_str",
        "cpt_eq_preferences_new",
        "cpt_eq_preferences_free",
        "cpt_eq_value",
        "cpt_eq_regret",
        "cpt_eq_game_new",
        "cpt_eq_game_free",
        "cpt_eq_game_joint_size",
        "cpt_eq_check_correlated",
        "cpt_eq_classify_2x2",
        "cpt_eq_region_components",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing");
    }
    assert!(header.contains("typedef struct CptEqGame CptEqGame;"));
}
