use std::ffi::{c_char, CStr, CString};
use std::ptr;
use treeaxes_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    ta_string_free(s);
    out
}

unsafe fn f2() -> *mut TaPresentation {
    let mut p = ptr::null_mut();
    assert_eq!(ta_presentation_parse(cs("F2").as_ptr(), &mut p), TaStatus::Ok);
    p
}

unsafe fn word(p: *const TaPresentation, s: &str) -> *mut TaWord {
    let mut w = ptr::null_mut();
    assert_eq!(ta_word_parse(p, cs(s).as_ptr(), &mut w), TaStatus::Ok);
    w
}

#[test]
fn word_queries() {
    unsafe {
        let p = f2();
        let w = word(p, "aAabab");
        let mut s = ptr::null_mut();
        assert_eq!(ta_word_to_string(w, &mut s), TaStatus::Ok);
        assert_eq!(take(s), "abab");

        let mut n = 0usize;
        assert_eq!(ta_translation_length(w, &mut n), TaStatus::Ok);
        assert_eq!(n, 4);

        let (mut r, mut e) = (ptr::null_mut(), 0u32);
        assert_eq!(ta_root(w, &mut r, &mut e), TaStatus::Ok);
        assert_eq!(e, 2);
        let mut s = ptr::null_mut();
        ta_word_to_string(r, &mut s);
        assert_eq!(take(s), "ab");

        let mut prim = true;
        assert_eq!(ta_is_primitive(r, &mut prim), TaStatus::Ok);
        assert!(prim);
        let c = word(p, "abAB");
        assert_eq!(ta_is_primitive(c, &mut prim), TaStatus::Ok);
        assert!(!prim);
        let a = word(p, "aab");
        assert_eq!(ta_is_primitive(a, &mut prim), TaStatus::Ok);
        assert!(prim);

        let mut j = ptr::null_mut();
        assert_eq!(ta_analyze_json(w, &mut j), TaStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(j)).unwrap();
        assert_eq!(v["root"], "ab");
        assert_eq!(v["kind"], "loxodromic");

        for h in [w, r, a, c] {
            ta_word_free(h);
        }
        ta_presentation_free(p);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let p = f2();
        let mut w = ptr::null_mut();
        assert_eq!(ta_word_parse(p, cs("abz").as_ptr(), &mut w), TaStatus::Parse);
        assert!(w.is_null());
        let msg = CStr::from_ptr(ta_last_error()).to_str().unwrap();
        assert!(msg.contains("column 3"), "{msg}");

        assert_eq!(ta_word_parse(ptr::null(), cs("a").as_ptr(), &mut w), TaStatus::NullArgument);
        assert_eq!(ta_word_parse(p, ptr::null(), &mut w), TaStatus::NullArgument);

        let id = word(p, "aA");
        let (mut r, mut e) = (ptr::null_mut(), 0u32);
        assert_eq!(ta_root(id, &mut r, &mut e), TaStatus::Degenerate);
        let mut n = 7usize;
        assert_eq!(ta_translation_length(id, &mut n), TaStatus::Ok);
        assert_eq!(n, 0);
        assert!(ta_last_error().is_null());

        let mut q = ptr::null_mut();
        assert_eq!(ta_presentation_parse(cs("Z2*Z3").as_ptr(), &mut q), TaStatus::Ok);
        let s = word(q, "s1s2");
        let mut prim = false;
        assert_eq!(ta_is_primitive(s, &mut prim), TaStatus::Unsupported);
        assert_eq!(ta_presentation_parse(cs("Q9").as_ptr(), &mut q), TaStatus::Parse);

        ta_word_free(s);
        ta_word_free(id);
        ta_word_free(ptr::null_mut());
        ta_presentation_free(p);
        assert!(!CStr::from_ptr(ta_version()).to_str().unwrap().is_empty());
    }
}
