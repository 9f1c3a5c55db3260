use braidtri::notation::{canonical_table, from_table};
use braidtri::Triangulation;

/// Writes `rows` against the tetrahedra of `like`, renaming first.
pub fn golden(like: &Triangulation, rows: &[&str], renames: &[(&str, &str)]) -> Vec<String> {
    let rows: Vec<String> = rows
        .iter()
        .map(|r| {
            let mut r = r.to_string();
            for (old, new) in renames {
                r = r.replace(&format!("{old}("), &format!("{new}("));
            }
            r
        })
        .collect();
    canonical_table(&from_table(like.tets().to_vec(), &rows).unwrap())
}

pub const HAT_1: [&str; 12] = [
    "t1'(023) ~ m2(523)",
    "t1'(025) ~ t2'(025)",
    "t1'(035) ~ m1(125)",
    "t1'(235) ~ b2'(245)",
    "t2'(015) ~ m1(105)",
    "t2'(012) ~ m1(021)",
    "t2'(125) ~ b1(035)",
    "m1(025) ~ b1(025)",
    "m2(345) ~ b2'(354)",
    "m2(234) ~ b2'(243)",
    "m2(245) ~ b1(235)",
    "b1(023) ~ b2'(523)",
];

pub const HAT_3: [&str; 20] = [
    "t2'(015) ~ w1(105)",
    "t2'(125) ~ w1'(025)",
    "w1(025) ~ w2(125)",
    "w1(012) ~ w2'(102)",
    "w1'(015) ~ w2(105)",
    "w1'(125) ~ w2'(025)",
    "w2(025) ~ m1(125)",
    "w2'(015) ~ m1(105)",
    "m1(025) ~ b1(025)",
    "m2(234) ~ b2'(243)",
    "m2(245) ~ b1(235)",
    "t1'(023) ~ m2(523)",
    "t1'(025) ~ t2'(025)",
    "t1'(235) ~ b2'(245)",
    "t2'(012) ~ m1(021)",
    "b1(023) ~ b2'(523)",
    "t1'(035) ~ w1(125)",
    "m2(345) ~ w1'(201)",
    "b1(035) ~ w2'(125)",
    "b2'(345) ~ w2(201)",
];

pub const TAU_1: [&str; 6] = [
    "t2'(015) ~ m1(105)",
    "t2'(012) ~ m1(021)",
    "t2'(025) ~ m1(520)",
    "t2'(125) ~ s(dbc)",
    "m1(125) ~ s(cad)",
    "s(abc) ~ s(bda)",
];

pub const TAU_2: [&str; 10] = [
    "w0'(015) ~ w1(105)",
    "w0'(125) ~ w1'(025)",
    "w1(025) ~ w2(125)",
    "w1'(015) ~ w2(105)",
    "w0'(012) ~ w2(021)",
    "w0'(025) ~ w2(520)",
    "s(cad) ~ w1(125)",
    "s(abc) ~ w1'(201)",
    "s(dbc) ~ w1'(125)",
    "s(bad) ~ w1(201)",
];

pub const TAU_3: [&str; 14] = [
    "t2'(015) ~ w1(105)",
    "t2'(125) ~ w1'(025)",
    "w1(025) ~ w2(125)",
    "w1(012) ~ w2'(102)",
    "w1'(015) ~ w2(105)",
    "w1'(125) ~ w2'(025)",
    "w2(025) ~ m1(125)",
    "w2'(015) ~ m1(105)",
    "t2'(012) ~ m1(021)",
    "t2'(025) ~ m1(520)",
    "s(cad) ~ w1(125)",
    "s(abc) ~ w1'(201)",
    "s(dbc) ~ w2'(125)",
    "s(bad) ~ w2(201)",
];

pub const AFTER_THREE_TWO_1: [&str; 10] = [
    "t1'(023) ~ s̄(c2a)",
    "t1'(025) ~ t2'(025)",
    "t1'(035) ~ m1(125)",
    "t1'(235) ~ s̄(2ad)",
    "t2'(015) ~ m1(105)",
    "t2'(012) ~ m1(021)",
    "t2'(125) ~ s(dbc)",
    "m1(025) ~ s̄(d2c)",
    "s(abc) ~ s(bda)",
    "s̄(acd) ~ s(acd)",
];

/// The general face-pairing schema instantiated at `p >= 2`.
pub fn general_rows(p: usize) -> Vec<String> {
    let w = |i: usize| format!("w{i}");
    let wp = |i: usize| format!("w{i}'");
    let mut rows = Vec::new();
    for i in 0..p {
        rows.push(format!("{}(015) ~ {}(105)", wp(i), w(i + 1)));
    }
    for i in 0..p - 1 {
        rows.push(format!("{}(125) ~ {}(025)", wp(i), wp(i + 1)));
    }
    for i in 1..p {
        rows.push(format!("{}(025) ~ {}(125)", w(i), w(i + 1)));
    }
    for i in 1..p - 1 {
        rows.push(format!("{}(012) ~ {}(102)", w(i), wp(i + 1)));
    }
    rows.push(format!("w0'(012) ~ {}(021)", w(p)));
    rows.push(format!("w0'(025) ~ {}(520)", w(p)));
    rows.push("s(cad) ~ w1(125)".into());
    rows.push("s(abc) ~ w1'(201)".into());
    rows.push(format!("s(dbc) ~ {}(125)", wp(p - 1)));
    rows.push(format!("s(bad) ~ {}(201)", w(p - 1)));
    rows
}

pub fn general_table(like: &Triangulation, p: usize) -> Vec<String> {
    let rows = general_rows(p);
    let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
    golden(like, &refs, &[])
}
