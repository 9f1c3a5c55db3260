//! Compares the generated edge rows of `build_tau(p)` with the closed-form
//! lists written in R/B/D coordinates.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::angles::{column_permutation, ConstraintSystem};
use crate::exact::{self, q, Q};
use crate::tau::{w, wp};
use crate::veering::{Involution, Role, ROLES};

/// A linear form in role coordinates: `(role, tetrahedron) -> coefficient`.
pub type SymRow = BTreeMap<(Role, String), i64>;

fn sym(terms: &[(i64, Role, String)]) -> SymRow {
    let mut row = SymRow::new();
    for (c, r, t) in terms {
        *row.entry((*r, t.clone())).or_insert(0) += c;
    }
    row.retain(|_, c| *c != 0);
    row
}

pub fn format_row(row: &SymRow) -> String {
    let terms: Vec<String> = row
        .iter()
        .map(|((r, t), c)| {
            if *c == 1 {
                format!("{} {t}", r.symbol())
            } else {
                format!("{c}{} {t}", r.symbol())
            }
        })
        .collect();
    terms.join(" + ")
}

/// Edge rows of `cs` in role coordinates. Slots must be ordered R, B, D.
pub fn symbolic_edge_rows(cs: &ConstraintSystem) -> Vec<SymRow> {
    cs.edge_rows()
        .iter()
        .map(|row| {
            let terms: Vec<(i64, Role, String)> = row
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(col, &c)| (c, ROLES[col % 3], cs.tet_names[col / 3].clone()))
                .collect();
            sym(&terms)
        })
        .collect()
}

use Role::{B, D, R};

/// The expected edge equations (left-hand sides; every right-hand side is 2 pi).
pub fn expected_edge_rows(p: usize) -> Vec<SymRow> {
    let s = || "s".to_string();
    let mut red: Vec<(i64, Role, String)> = (0..p).map(|i| (2, R, wp(i))).collect();
    red.extend((1..=p).map(|i| (2, R, w(i))));
    red.extend([(2, R, s()), (1, D, wp(0)), (1, D, w(p))]);
    let mut rows = vec![sym(&red)];
    rows.push(sym(&[
        (1, B, wp(0)),
        (1, D, w(1)),
        (1, B, s()),
        (1, D, wp(p - 1)),
        (1, B, w(p)),
    ]));
    if p == 1 {
        rows.push(sym(&[
            (1, B, wp(0)),
            (1, D, s()),
            (1, B, s()),
            (1, D, s()),
            (1, B, w(1)),
        ]));
        return rows;
    }
    rows.push(sym(&[
        (1, B, wp(0)),
        (1, D, wp(1)),
        (1, B, s()),
        (1, D, w(p - 1)),
        (1, B, w(p)),
    ]));
    for i in 2..=p.saturating_sub(2) {
        rows.push(sym(&[
            (1, D, w(i - 1)),
            (1, B, w(i)),
            (1, B, wp(i)),
            (1, D, wp(i + 1)),
        ]));
    }
    for i in 1..p {
        rows.push(sym(&[
            (1, D, wp(i - 1)),
            (1, B, w(i)),
            (1, B, wp(i)),
            (1, D, w(i + 1)),
        ]));
    }
    if p == 2 {
        // Both diagonals of s lie on one edge.
        rows.push(sym(&[(2, D, s()), (1, B, w(1)), (1, B, wp(1))]));
    } else {
        rows.push(sym(&[
            (1, D, s()),
            (1, B, wp(1)),
            (1, B, w(1)),
            (1, D, wp(2)),
        ]));
        rows.push(sym(&[
            (1, D, s()),
            (1, B, wp(p - 1)),
            (1, B, w(p - 1)),
            (1, D, w(p - 2)),
        ]));
    }
    rows
}

/// Renames `w_i'` to `w_{p-i}`, merging like terms.
pub fn substitute_symmetric(row: &SymRow, p: usize) -> SymRow {
    let terms: Vec<(i64, Role, String)> = row
        .iter()
        .map(|((r, t), c)| {
            let name = match t.strip_prefix('w').and_then(|x| x.strip_suffix('\'')) {
                Some(i) => w(p - i.parse::<usize>().unwrap()),
                None => t.clone(),
            };
            (*c, *r, name)
        })
        .collect();
    sym(&terms)
}

/// The simplified equations satisfied by symmetric structures.
pub fn expected_symmetric_rows(p: usize) -> BTreeSet<SymRow> {
    let s = || "s".to_string();
    let k = p / 2;
    // `w_0` does not exist; at p = 2 its place is taken by `s`.
    let wq = |i: usize| if i == 0 { s() } else { w(i) };
    let mut red: Vec<(i64, Role, String)> = (1..=p).map(|i| (4, R, w(i))).collect();
    red.extend([(2, R, s()), (2, D, w(p))]);
    let mut rows = BTreeSet::from([sym(&red), sym(&[(2, B, w(p)), (2, D, w(1)), (1, B, s())])]);
    if p == 1 {
        rows.insert(sym(&[(2, B, w(1)), (2, D, s()), (1, B, s())]));
        return rows;
    }
    rows.insert(sym(&[(2, B, w(p)), (2, D, w(p - 1)), (1, B, s())]));
    for i in 2..=k {
        rows.insert(sym(&[
            (1, D, w(i - 1)),
            (1, B, w(i)),
            (1, B, w(p - i)),
            (1, D, w(p - i - 1)),
        ]));
    }
    for i in 1..=k {
        rows.insert(sym(&[
            (1, D, w(p - i + 1)),
            (1, B, w(i)),
            (1, B, w(p - i)),
            (1, D, w(i + 1)),
        ]));
    }
    rows.insert(sym(&[
        (1, D, s()),
        (1, B, w(p - 1)),
        (1, B, w(1)),
        (1, D, wq(p - 2)),
    ]));
    rows
}

/// Differences of diagonal angles that every solution must satisfy.
pub fn diagonal_identities(p: usize) -> Vec<SymRow> {
    let s = || "s".to_string();
    if p == 1 {
        return vec![sym(&[(2, D, s()), (-1, D, wp(0)), (-1, D, w(1))])];
    }
    let diff = |j: usize, sgn: i64| [(sgn, D, w(j)), (-sgn, D, wp(j))];
    let mut out = Vec::new();
    for start in [1, 2] {
        let mut j = start;
        while j + 2 < p {
            out.push(sym(&[diff(j, 1), diff(j + 2, -1)].concat()));
            j += 2;
        }
    }
    if p >= 3 {
        out.push(sym(&[
            diff(p - 2, 1).to_vec(),
            vec![(-1, D, w(p)), (1, D, s())],
        ]
        .concat()));
        out.push(sym(&[
            vec![(1, D, s()), (-1, D, wp(0))],
            diff(2, -1).to_vec(),
        ]
        .concat()));
    }
    let last = sym(&[diff(p - 1, 1), diff(1, -1)].concat());
    if !last.is_empty() {
        out.push(last);
    }
    out
}

/// Equalities of diagonals at symmetric structures.
pub fn symmetric_diagonal_identities(p: usize) -> Vec<SymRow> {
    let mut out = vec![sym(&[(1, D, w(p)), (-1, D, "s".into())])];
    for i in 1..=p / 2 {
        let row = sym(&[(1, D, w(i)), (-1, D, w(p - i))]);
        if !row.is_empty() {
            out.push(row);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub ok: bool,
    pub edge_rows_match: bool,
    pub symmetric_rows_match: bool,
    pub identities_implied: bool,
    pub symmetric_identities_implied: bool,
    pub mismatches: Vec<String>,
}

fn dense(cs: &ConstraintSystem, row: &SymRow) -> Option<Vec<Q>> {
    let mut v = vec![q(0); cs.n_cols()];
    for ((role, tet), c) in row {
        let t = cs.tet_names.iter().position(|n| n == tet)?;
        let j = ROLES.iter().position(|r| r == role)?;
        v[3 * t + j] = q(*c);
    }
    Some(v)
}

fn multiset(rows: &[SymRow]) -> BTreeMap<SymRow, usize> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry(r.clone()).or_insert(0) += 1;
    }
    m
}

pub fn cross_check_tau_equations(p: usize, cs: &ConstraintSystem, inv: &Involution) -> CrossCheck {
    let mut mismatches = Vec::new();
    let got = multiset(&symbolic_edge_rows(cs));
    let want = multiset(&expected_edge_rows(p));
    for (row, &n) in &want {
        let have = got.get(row).copied().unwrap_or(0);
        if have != n {
            mismatches.push(format!(
                "expected edge row {} appears {have} times, not {n}",
                format_row(row)
            ));
        }
    }
    for (row, &n) in &got {
        if !want.contains_key(row) {
            mismatches.push(format!(
                "unexpected edge row {} ({n} times)",
                format_row(row)
            ));
        }
    }
    let edge_rows_match = mismatches.is_empty();

    let sym_got: BTreeSet<SymRow> = got.keys().map(|r| substitute_symmetric(r, p)).collect();
    let sym_want = expected_symmetric_rows(p);
    let before = mismatches.len();
    for row in sym_want.difference(&sym_got) {
        mismatches.push(format!("symmetric row {} is missing", format_row(row)));
    }
    for row in sym_got.difference(&sym_want) {
        mismatches.push(format!("symmetric row {} is unexpected", format_row(row)));
    }
    let symmetric_rows_match = mismatches.len() == before;

    let a = cs.a();
    let b = cs.b();
    let implied =
        |a: &[Vec<Q>], b: &[Q], rows: Vec<SymRow>, what: &str, out: &mut Vec<String>| -> bool {
            let mut ok = true;
            for row in rows {
                let holds = dense(cs, &row).is_some_and(|l| exact::implies(a, b, &l, &q(0)));
                if !holds {
                    out.push(format!("{what} {} = 0 is not implied", format_row(&row)));
                    ok = false;
                }
            }
            ok
        };
    let identities_implied = implied(
        &a,
        &b,
        diagonal_identities(p),
        "diagonal identity",
        &mut mismatches,
    );

    let mut sa = a.clone();
    let mut sb = b.clone();
    match column_permutation(cs, inv) {
        Ok(perm) => {
            for (c, &d) in perm.iter().enumerate() {
                if c != d {
                    let mut row = vec![q(0); cs.n_cols()];
                    row[c] = q(1);
                    row[d] = q(-1);
                    sa.push(row);
                    sb.push(q(0));
                }
            }
        }
        Err(e) => mismatches.push(e.to_string()),
    }
    let symmetric_identities_implied = implied(
        &sa,
        &sb,
        symmetric_diagonal_identities(p),
        "symmetric identity",
        &mut mismatches,
    );

    CrossCheck {
        ok: mismatches.is_empty(),
        edge_rows_match,
        symmetric_rows_match,
        identities_implied,
        symmetric_identities_implied,
        mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::tau_constraints;
    use crate::veering::involution;

    #[test]
    fn renaming_merges_terms() {
        let row = sym(&[(1, B, wp(1)), (1, B, w(1))]);
        assert_eq!(substitute_symmetric(&row, 2), sym(&[(2, B, w(1))]));
    }

    #[test]
    fn degree_five_row_at_three() {
        let rows = expected_edge_rows(3);
        let want = sym(&[
            (1, B, wp(0)),
            (1, D, w(1)),
            (1, B, "s".into()),
            (1, D, wp(2)),
            (1, B, w(3)),
        ]);
        assert!(rows.contains(&want));
    }

    #[test]
    fn small_cases_agree() {
        for p in 1..=4 {
            let (_, cs) = tau_constraints(p).unwrap();
            let c = cross_check_tau_equations(p, &cs, &involution(p).unwrap());
            assert!(c.ok, "p = {p}: {:?}", c.mismatches);
        }
    }
}
