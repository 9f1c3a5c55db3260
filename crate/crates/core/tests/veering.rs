use braidtri::notation::canonical_table;
use braidtri::pachner::{pachner_2_0, pachner_3_2, ThreeTwoNames};
use braidtri::tau::{build_hat_tau, build_tau, hat_after_three_two, w, wp};
use braidtri::veering::{assign_veering, check_veering, involution, pair_roles, Color, Role};
use braidtri::Triangulation;

fn degree_count(tri: &Triangulation, d: usize) -> usize {
    tri.edge_classes()
        .unwrap()
        .iter()
        .filter(|c| c.degree() == d)
        .count()
}

#[test]
fn edge_census_up_to_fifty() {
    for p in 1..=50 {
        let t = build_tau(p).unwrap();
        assert!(t.validate().ok, "p = {p}");
        assert_eq!(t.len(), 2 * p + 1);
        assert_eq!(t.gluings().len(), 4 * p + 2);
        assert_eq!(t.edge_classes().unwrap().len(), 2 * p + 1);
        assert_eq!(degree_count(&t, 4 * p + 4), 1, "p = {p}");
        assert_eq!(degree_count(&t, 5), 2, "p = {p}");
        if p != 1 {
            assert_eq!(degree_count(&t, 4), 2 * p - 2, "p = {p}");
        }
    }
}

#[test]
fn red_class_of_tau_one() {
    let t = build_tau(1).unwrap();
    let classes = t.edge_classes().unwrap();
    let s = assign_veering(&t).unwrap();
    let red: Vec<_> = classes
        .iter()
        .zip(&s.colors)
        .filter(|(_, c)| **c == Color::Red)
        .collect();
    assert_eq!(red.len(), 1);
    assert_eq!(red[0].0.degree(), 8);
    assert!(red[0].0.contains(0, 0, 1));
}

#[test]
fn tau_is_veering_up_to_fifty() {
    for p in 1..=50 {
        let t = build_tau(p).unwrap();
        let s = assign_veering(&t).unwrap();
        let c = check_veering(&t, &s);
        assert!(c.ok, "p = {p}: {:?}", c.violations);
        for class in t.edge_classes().unwrap() {
            let pis = class
                .members
                .iter()
                .filter(|m| s.taut[m.tet][m.pair()] == 1)
                .count();
            assert_eq!(pis, 2);
        }
    }
}

#[test]
fn roles_follow_the_labels() {
    let t = build_tau(4).unwrap();
    let roles = pair_roles(&t, &assign_veering(&t).unwrap()).unwrap();
    for (k, tet) in t.tets().iter().enumerate() {
        let want = if tet.name == "s" {
            [Role::B, Role::D, Role::R]
        } else {
            [Role::R, Role::D, Role::B]
        };
        assert_eq!(roles[k], want, "{}", tet.name);
    }
}

#[test]
fn moved_pi_breaks_taut_sums() {
    let t = build_tau(3).unwrap();
    let mut s = assign_veering(&t).unwrap();
    s.taut[1] = [1, 0, 0];
    let c = check_veering(&t, &s);
    assert!(!c.ok);
    assert!(c.violations.iter().any(|v| v.starts_with("taut sum")));
}

#[test]
fn all_blue_breaks_the_pattern() {
    let t = build_tau(3).unwrap();
    let mut s = assign_veering(&t).unwrap();
    s.colors.iter_mut().for_each(|c| *c = Color::Blue);
    let c = check_veering(&t, &s);
    assert!(!c.ok);
    assert!(c.violations.iter().any(|v| v.starts_with("color pattern")));
}

#[test]
fn flipped_face_breaks_coorientation() {
    let t = build_tau(2).unwrap();
    let mut s = assign_veering(&t).unwrap();
    s.upward[0] = s.upward[0].map(|x| !x);
    let c = check_veering(&t, &s);
    assert!(c.violations.iter().any(|v| v.starts_with("co-orientation")));
}

#[test]
fn involution_swaps_layers() {
    let t = build_tau(3).unwrap();
    let inv = involution(3).unwrap();
    let at = |n: &str| t.tet_index(n).unwrap();
    for (a, b) in [
        (wp(1), w(2)),
        (wp(2), w(1)),
        (wp(0), w(3)),
        ("s".into(), "s".into()),
    ] {
        assert_eq!(inv.tet_map[at(&a)], at(&b));
    }
    for p in 1..=12 {
        let t = build_tau(p).unwrap();
        let inv = involution(p).unwrap();
        assert!(inv.is_identity_when_squared());
        assert_eq!(
            canonical_table(&inv.push_gluings(&t).unwrap()),
            canonical_table(&t)
        );
    }
}

fn cusp_signature(t: &Triangulation) -> Vec<i64> {
    let mut v: Vec<i64> = t
        .cusp_links()
        .unwrap()
        .iter()
        .map(|c| c.euler_characteristic)
        .collect();
    v.sort();
    v
}

#[test]
fn moves_preserve_cusps() {
    for p in 1..=6 {
        let hat = build_hat_tau(p).unwrap();
        let mid = hat_after_three_two(&hat).unwrap();
        let tau = build_tau(p).unwrap();
        assert_eq!(cusp_signature(&hat), cusp_signature(&mid));
        assert_eq!(cusp_signature(&mid), cusp_signature(&tau));
        assert!(tau.cusp_links().unwrap().iter().all(|c| c.is_torus()));
        let slots: usize = mid.edge_classes().unwrap().iter().map(|c| c.degree()).sum();
        assert_eq!(slots, 6 * mid.len());
    }
}

#[test]
fn moves_reject_wrong_degrees() {
    let tau = build_tau(3).unwrap();
    for e in tau.edge_classes().unwrap() {
        assert!(pachner_2_0(&tau, &e).is_err());
        assert!(pachner_3_2(&tau, &e, &ThreeTwoNames::new("x", "y")).is_err());
    }
}

#[test]
fn generic_three_two_without_labels() {
    let hat = build_hat_tau(2).unwrap();
    let classes = hat.edge_classes().unwrap();
    let e = classes.iter().find(|c| c.degree() == 3).unwrap();
    let out = pachner_3_2(&hat, e, &ThreeTwoNames::new("x", "y")).unwrap();
    assert_eq!(out.len(), hat.len() - 1);
    assert!(out.validate().ok);
    let (x, y) = (out.tet_index("x").unwrap(), out.tet_index("y").unwrap());
    let shared = out
        .gluings()
        .iter()
        .filter(|g| (g.from_tet == x && g.to_tet == y) || (g.from_tet == y && g.to_tet == x))
        .count();
    assert_eq!(shared, 1);
}
