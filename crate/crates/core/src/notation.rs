//! Reading and writing face pairings in label notation, `name(xyz) ~ name(uvw)`,
//! where `xyz` are corner labels listed in matching order.

use crate::error::{Error, Result};
use crate::triangulation::{FacePairing, Tet, Triangulation};

fn side(tets: &[Tet], text: &str) -> Result<(usize, [u8; 3])> {
    let text = text.trim();
    let open = text
        .find('(')
        .ok_or_else(|| Error::Parse(format!("missing '(' in {text:?}")))?;
    if !text.ends_with(')') {
        return Err(Error::Parse(format!("missing ')' in {text:?}")));
    }
    let name = text[..open].trim();
    let tet = tets
        .iter()
        .position(|t| t.name == name)
        .ok_or_else(|| Error::Parse(format!("unknown tetrahedron {name:?}")))?;
    let labels: Vec<char> = text[open + 1..text.len() - 1]
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if labels.len() != 3 {
        return Err(Error::Parse(format!(
            "face {text:?} needs exactly three labels"
        )));
    }
    let mut corners = [0u8; 3];
    for (i, c) in labels.iter().enumerate() {
        corners[i] = tets[tet]
            .corner_of(&c.to_string())
            .ok_or_else(|| Error::Parse(format!("{name} has no corner labelled {c:?}")))?;
    }
    Ok((tet, corners))
}

pub fn parse_pairing(tets: &[Tet], text: &str) -> Result<FacePairing> {
    let (lhs, rhs) = text
        .split_once('~')
        .ok_or_else(|| Error::Parse(format!("missing '~' in {text:?}")))?;
    let (a, ca) = side(tets, lhs)?;
    let (b, cb) = side(tets, rhs)?;
    FacePairing::new(a, ca, b, cb).map_err(|e| Error::Parse(format!("{text:?}: {e}")))
}

/// Builds a triangulation from tetrahedra and a list of pairings in label notation.
pub fn from_table<S: AsRef<str>>(tets: Vec<Tet>, table: &[S]) -> Result<Triangulation> {
    let gluings = table
        .iter()
        .map(|line| parse_pairing(&tets, line.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Triangulation::new(tets, gluings)
}

pub fn face_string(tet: &Tet, corners: &[u8; 3]) -> String {
    let labels: String = corners
        .iter()
        .map(|&c| tet.labels[c as usize].as_str())
        .collect();
    format!("{}({})", tet.name, labels)
}

pub fn format_pairing(tri: &Triangulation, g: &FacePairing) -> String {
    let tets = tri.tets();
    format!(
        "{} ~ {}",
        face_string(&tets[g.from_tet], &g.from_corners),
        face_string(&tets[g.to_tet], &g.to_corners)
    )
}

/// The pairing written from whichever side sorts first, with that side's
/// labels in ascending order. Equal gluings give equal strings.
pub fn canonical_pairing(tri: &Triangulation, g: &FacePairing) -> String {
    let tets = tri.tets();
    let oriented = |g: &FacePairing| {
        let src = &tets[g.from_tet];
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| {
            src.labels[g.from_corners[i] as usize].cmp(&src.labels[g.from_corners[j] as usize])
        });
        let from = idx.map(|i| g.from_corners[i]);
        let to = idx.map(|i| g.to_corners[i]);
        (face_string(src, &from), face_string(&tets[g.to_tet], &to))
    };
    let (a, b) = oriented(g);
    let (c, d) = oriented(&g.reversed());
    if (a.as_str(), b.as_str()) <= (c.as_str(), d.as_str()) {
        format!("{a} ~ {b}")
    } else {
        format!("{c} ~ {d}")
    }
}

/// Sorted canonical strings of every pairing.
pub fn canonical_table(tri: &Triangulation) -> Vec<String> {
    let mut rows: Vec<String> = tri
        .gluings()
        .iter()
        .map(|g| canonical_pairing(tri, g))
        .collect();
    rows.sort();
    rows
}

/// Same tetrahedron names and labels and the same canonical pairing set.
/// Tetrahedron order is ignored.
pub fn same_named_triangulation(a: &Triangulation, b: &Triangulation) -> bool {
    let mut ta: Vec<&Tet> = a.tets().iter().collect();
    let mut tb: Vec<&Tet> = b.tets().iter().collect();
    ta.sort_by(|x, y| x.name.cmp(&y.name));
    tb.sort_by(|x, y| x.name.cmp(&y.name));
    ta == tb && canonical_table(a) == canonical_table(b)
}
