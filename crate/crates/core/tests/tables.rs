mod common;

use braidtri::notation::{canonical_table, same_named_triangulation};
use braidtri::tau::{
    build_hat_tau, build_tau, hat_after_three_two, simplify_hat_to_tau, tau_names, S_BAR,
};
use common::tables::*;

#[test]
fn hat_tau_one_matches_its_table() {
    let t = build_hat_tau(1).unwrap();
    assert_eq!(
        canonical_table(&t),
        golden(&t, &HAT_1, &[("t2'", "w0'"), ("m1", "w1")])
    );
    assert!(t.validate().ok);
}

#[test]
fn hat_tau_three_matches_its_table() {
    let t = build_hat_tau(3).unwrap();
    assert_eq!(
        canonical_table(&t),
        golden(&t, &HAT_3, &[("t2'", "w0'"), ("m1", "w3")])
    );
    assert!(t.validate().ok);
}

#[test]
fn tau_small_cases_match_their_tables() {
    let t1 = build_tau(1).unwrap();
    assert_eq!(
        canonical_table(&t1),
        golden(&t1, &TAU_1, &[("t2'", "w0'"), ("m1", "w1")])
    );
    let t2 = build_tau(2).unwrap();
    assert_eq!(canonical_table(&t2), golden(&t2, &TAU_2, &[]));
    let t3 = build_tau(3).unwrap();
    assert_eq!(
        canonical_table(&t3),
        golden(&t3, &TAU_3, &[("t2'", "w0'"), ("m1", "w3")])
    );
}

#[test]
fn general_schema_up_to_twelve() {
    for p in 2..=12 {
        let t = build_tau(p).unwrap();
        assert_eq!(general_rows(p).len(), 4 * p + 2);
        assert_eq!(canonical_table(&t), general_table(&t, p), "p = {p}");
    }
    let t2 = build_tau(2).unwrap();
    assert_eq!(general_table(&t2, 2), golden(&t2, &TAU_2, &[]));
}

#[test]
fn three_two_move_on_hat_one() {
    let mid = hat_after_three_two(&build_hat_tau(1).unwrap()).unwrap();
    assert_eq!(mid.len(), 5);
    let names: Vec<&str> = mid.tets().iter().map(|t| t.name.as_str()).collect();
    assert!(names.contains(&S_BAR) && names.contains(&"s"));
    let want = golden(
        &mid,
        &AFTER_THREE_TWO_1,
        &[("t2'", "w0'"), ("m1", "w1"), ("s̄", S_BAR)],
    );
    assert_eq!(canonical_table(&mid), want);
}

#[test]
fn simplification_reaches_tau() {
    for p in 1..=12 {
        let hat = build_hat_tau(p).unwrap();
        let mid = hat_after_three_two(&hat).unwrap();
        let tau = simplify_hat_to_tau(&hat, p).unwrap();
        assert_eq!(
            (hat.len(), mid.len(), tau.len()),
            (2 * p + 4, 2 * p + 3, 2 * p + 1)
        );
        assert!(
            same_named_triangulation(&tau, &build_tau(p).unwrap()),
            "p = {p}"
        );
        let names: Vec<String> = tau.tets().iter().map(|t| t.name.clone()).collect();
        assert_eq!(names, tau_names(p));
    }
}
