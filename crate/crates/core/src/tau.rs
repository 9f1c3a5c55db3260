//! Triangulations of the complements of the closures of `C^2 s1^p s2^-1`.
//!
//! `build_hat_tau(p)` has `2p + 4` tetrahedra and comes straight from the
//! layered braid picture; two Pachner moves turn it into `build_tau(p)`, which
//! has `2p + 1` tetrahedra.

use crate::error::{Error, Result};
use crate::notation::from_table;
use crate::pachner::{pachner_2_0, pachner_3_2, ThreeTwoNames};
use crate::triangulation::{Tet, Triangulation};

pub const W_LABELS: [&str; 4] = ["0", "1", "2", "5"];
pub const S_LABELS: [&str; 4] = ["a", "b", "c", "d"];
pub const S_BAR: &str = "s\u{304}";

pub fn w(i: usize) -> String {
    format!("w{i}")
}

pub fn wp(i: usize) -> String {
    format!("w{i}'")
}

fn check_p(p: usize) -> Result<()> {
    if p < 1 {
        return Err(Error::Domain(format!("p must be at least 1, got {p}")));
    }
    Ok(())
}

/// Gluings among the `w` layers, shared by both constructions.
fn layer_pairings(p: usize) -> Vec<String> {
    let mut rows = Vec::new();
    for i in 0..p {
        rows.push(format!("{}(015) ~ {}(105)", wp(i), w(i + 1)));
    }
    for i in 0..p.saturating_sub(1) {
        rows.push(format!("{}(125) ~ {}(025)", wp(i), wp(i + 1)));
    }
    for i in 1..p {
        rows.push(format!("{}(025) ~ {}(125)", w(i), w(i + 1)));
    }
    for i in 1..p.saturating_sub(1) {
        rows.push(format!("{}(012) ~ {}(102)", w(i), wp(i + 1)));
    }
    rows
}

/// Tetrahedron names of `build_tau(p)` in order.
pub fn tau_names(p: usize) -> Vec<String> {
    let mut names = vec![wp(0)];
    names.extend((1..=p).map(w));
    names.extend((1..p).map(wp));
    names.push("s".into());
    names
}

/// Tetrahedron names of `build_hat_tau(p)` in order.
pub fn hat_tau_names(p: usize) -> Vec<String> {
    let mut names = vec!["t1'".to_string(), wp(0)];
    for i in 1..p {
        names.push(w(i));
        names.push(wp(i));
    }
    names.push(w(p));
    names.extend(["m2", "b1", "b2'"].map(String::from));
    names
}

pub fn build_tau(p: usize) -> Result<Triangulation> {
    check_p(p)?;
    let tets: Vec<Tet> = tau_names(p)
        .iter()
        .map(|n| Tet::new(n, if n == "s" { S_LABELS } else { W_LABELS }))
        .collect();
    let rows: Vec<String> = if p == 1 {
        [
            "w0'(015) ~ w1(105)",
            "w0'(012) ~ w1(021)",
            "w0'(025) ~ w1(520)",
            "w0'(125) ~ s(dbc)",
            "w1(125) ~ s(cad)",
            "s(abc) ~ s(bda)",
        ]
        .map(String::from)
        .to_vec()
    } else {
        let mut rows = layer_pairings(p);
        rows.push(format!("{}(012) ~ {}(021)", wp(0), w(p)));
        rows.push(format!("{}(025) ~ {}(520)", wp(0), w(p)));
        rows.push(format!("s(cad) ~ {}(125)", w(1)));
        rows.push(format!("s(abc) ~ {}(201)", wp(1)));
        rows.push(format!("s(dbc) ~ {}(125)", wp(p - 1)));
        rows.push(format!("s(bad) ~ {}(201)", w(p - 1)));
        rows
    };
    from_table(tets, &rows)
}

pub fn build_hat_tau(p: usize) -> Result<Triangulation> {
    check_p(p)?;
    let tets: Vec<Tet> = hat_tau_names(p)
        .iter()
        .map(|n| match n.as_str() {
            "t1'" | "b1" => Tet::new(n, ["0", "2", "3", "5"]),
            "m2" | "b2'" => Tet::new(n, ["2", "3", "4", "5"]),
            _ => Tet::new(n, W_LABELS),
        })
        .collect();
    let mut rows: Vec<String> = [
        "t1'(023) ~ m2(523)",
        "t1'(025) ~ w0'(025)",
        "t1'(235) ~ b2'(245)",
        "m2(234) ~ b2'(243)",
        "m2(245) ~ b1(235)",
        "b1(023) ~ b2'(523)",
    ]
    .map(String::from)
    .to_vec();
    rows.push(format!("w0'(012) ~ {}(021)", w(p)));
    rows.push(format!("{}(025) ~ b1(025)", w(p)));
    rows.push(format!("t1'(035) ~ {}(125)", w(1)));
    if p == 1 {
        rows.push("w0'(015) ~ w1(105)".into());
        rows.push("w0'(125) ~ b1(035)".into());
        rows.push("m2(345) ~ b2'(354)".into());
    } else {
        rows.extend(layer_pairings(p));
        rows.push(format!("m2(345) ~ {}(201)", wp(1)));
        rows.push(format!("b1(035) ~ {}(125)", wp(p - 1)));
        rows.push(format!("b2'(345) ~ {}(201)", w(p - 1)));
    }
    from_table(tets, &rows)
}

/// Corner dictionary for the 3-2 move on `build_hat_tau`: the five vertices
/// of the bipyramid around `m2(24)` become `2, a, b, c, d`.
pub fn three_two_names() -> ThreeTwoNames {
    let mut names = ThreeTwoNames::new(S_BAR, "s");
    for (tet, old, new) in [
        ("m2", "3", "a"),
        ("b2'", "4", "a"),
        ("b1", "3", "b"),
        ("b2'", "3", "b"),
        ("m2", "4", "b"),
        ("m2", "5", "c"),
        ("b1", "5", "c"),
        ("b1", "0", "d"),
        ("b2'", "5", "d"),
        ("m2", "2", "2"),
        ("b1", "2", "2"),
        ("b2'", "2", "2"),
    ] {
        names = names.with_label(tet, old, new);
    }
    names
}

fn class_at(
    tri: &Triangulation,
    tet: &str,
    x: &str,
    y: &str,
) -> Result<crate::triangulation::EdgeClass> {
    let t = tri
        .tet_index(tet)
        .ok_or_else(|| Error::Precondition(format!("no tetrahedron named {tet}")))?;
    let rec = &tri.tets()[t];
    let (a, b) = match (rec.corner_of(x), rec.corner_of(y)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Precondition(format!("{tet} has no edge {x}{y}"))),
    };
    let classes = tri.edge_classes()?;
    let k = tri.edge_class_of(&classes, t, a, b).unwrap();
    Ok(classes[k].clone())
}

/// Result of the 3-2 move alone.
pub fn hat_after_three_two(hat: &Triangulation) -> Result<Triangulation> {
    let e = class_at(hat, "m2", "2", "4")?;
    if e.degree() != 3 {
        return Err(Error::Precondition(format!(
            "edge m2(24) has degree {}, expected 3",
            e.degree()
        )));
    }
    pachner_3_2(hat, &e, &three_two_names())
}

/// Applies the 3-2 move at `m2(24)` and the 2-0 move at `t1'(23)`, then puts
/// the tetrahedra in the order used by [`build_tau`].
pub fn simplify_hat_to_tau(hat: &Triangulation, p: usize) -> Result<Triangulation> {
    check_p(p)?;
    let mid = hat_after_three_two(hat)?;
    let e = class_at(&mid, "t1'", "2", "3")?;
    if e.degree() != 2 {
        return Err(Error::Precondition(format!(
            "edge t1'(23) has degree {}, expected 2",
            e.degree()
        )));
    }
    let collapsed = pachner_2_0(&mid, &e)?;
    let order = tau_names(p)
        .iter()
        .map(|n| {
            collapsed
                .tet_index(n)
                .ok_or_else(|| Error::Invalid(format!("missing tetrahedron {n}")))
        })
        .collect::<Result<Vec<_>>>()?;
    collapsed.reordered(&order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for p in 1..6 {
            let t = build_tau(p).unwrap();
            assert_eq!((t.len(), t.gluings().len()), (2 * p + 1, 4 * p + 2));
            let h = build_hat_tau(p).unwrap();
            assert_eq!((h.len(), h.gluings().len()), (2 * p + 4, 4 * p + 8));
        }
    }

    #[test]
    fn rejects_zero() {
        assert!(build_tau(0).is_err());
        assert!(build_hat_tau(0).is_err());
    }

    #[test]
    fn names_in_order() {
        assert_eq!(tau_names(2), ["w0'", "w1", "w2", "w1'", "s"]);
        assert_eq!(
            hat_tau_names(2),
            ["t1'", "w0'", "w1", "w1'", "w2", "m2", "b1", "b2'"]
        );
    }
}
