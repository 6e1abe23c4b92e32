use std::ffi::{CStr, CString};
use std::ptr;

use twoprover_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { tp_string_free(s) };
    out
}

fn catalog(name: &str) -> *mut TpGame {
    let name = CString::new(name).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { tp_game_catalog(name.as_ptr(), &mut g) }, TpStatus::Ok);
    g
}

fn exact(g: *const TpGame, kind: TpValueKind) -> (TpStatus, String, f64) {
    let mut text = ptr::null_mut();
    let mut f = 0.0;
    let status = unsafe { tp_value(g, kind, &mut text, &mut f) };
    let text = if status == TpStatus::Ok { take(text) } else { String::new() };
    (status, text, f)
}

fn last_error() -> String {
    let p = tp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn values_through_handles() {
    let chsh = catalog("chsh");
    assert_eq!(exact(chsh, TpValueKind::Classical), (TpStatus::Ok, "3/4".into(), 0.75));
    assert_eq!(exact(chsh, TpValueKind::NoSignaling).1, "1");
    let mut lb = 0.0;
    assert_eq!(unsafe { tp_entangled_lower_bound(chsh, 2, 2, 4, 1, &mut lb) }, TpStatus::Ok);
    assert!(lb > 0.853);

    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { tp_transform(chsh, TpTransformKind::Repeat, 2, &mut rep) }, TpStatus::Ok);
    assert_eq!(exact(rep, TpValueKind::Classical).1, "5/8");
    unsafe {
        tp_game_free(rep);
        tp_game_free(chsh);
    }

    let tiny = catalog("tiny-1in3");
    let mut kind = TpGameKind::TwoProverOneRound;
    assert_eq!(unsafe { tp_game_kind(tiny, &mut kind) }, TpStatus::Ok);
    assert_eq!(kind, TpGameKind::Pcp3);
    assert_eq!(exact(tiny, TpValueKind::Pcp).1, "1/2");
    let (status, _, _) = exact(tiny, TpValueKind::Classical);
    assert_eq!(status, TpStatus::WrongKind);
    assert!(last_error().contains("pcp3"));
    unsafe { tp_game_free(tiny) };
}

#[test]
fn serialize_then_parse() {
    let ms = catalog("magic-square");
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { tp_game_serialize(ms, &mut text) }, TpStatus::Ok);
    let text = CString::new(take(text)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { tp_game_parse(text.as_ptr(), &mut back) }, TpStatus::Ok);
    assert_eq!(exact(back, TpValueKind::Classical).1, "17/18");
    unsafe {
        tp_game_free(back);
        tp_game_free(ms);
    }
}

#[test]
fn error_codes() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { tp_game_parse(ptr::null(), &mut g) }, TpStatus::NullPointer);
    let bad = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { tp_game_parse(bad.as_ptr(), &mut g) }, TpStatus::Parse);
    assert!(last_error().contains("line 1"));
    let unnormalized = CString::new(
        r#"{"format_version": 1, "kind": "two_prover_one_round", "counts": {"q1": 1, "q2": 1, "a1": 1, "a2": 1}, "pi": [[[0, 0], "1/2"]]}"#,
    )
    .unwrap();
    assert_eq!(unsafe { tp_game_parse(unnormalized.as_ptr(), &mut g) }, TpStatus::Validation);
    let unknown = CString::new("nope").unwrap();
    assert_eq!(unsafe { tp_game_catalog(unknown.as_ptr(), &mut g) }, TpStatus::Invalid);
    assert!(g.is_null());
    unsafe { tp_game_free(ptr::null_mut()) };
    assert_eq!(unsafe { CStr::from_ptr(tp_version()) }.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn verify_suite() {
    let name = CString::new("lemma-distance").unwrap();
    let (mut holding, mut total) = (0, 0);
    assert_eq!(unsafe { tp_verify(name.as_ptr(), 3, 10, &mut holding, &mut total) }, TpStatus::Ok);
    assert_eq!((holding, total), (20, 20));
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/twoprover.h")).unwrap();
    for name in [
        "typedef struct TpGame TpGame",
        "TP_STATUS_OK = 0",
        "tp_game_parse",
        "tp_game_free",
        "tp_value",
        "tp_entangled_lower_bound",
        "tp_transform",
        "tp_verify",
        "tp_last_error",
        "tp_string_free",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
