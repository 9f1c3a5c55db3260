//! Taut and veering structures on `build_tau(p)`, and its involution.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::notation::canonical_table;
use crate::tau::{build_tau, w, wp};
use crate::triangulation::{
    edges_of_pair, pair_of_edge, perm_compose, perm_inverse, EdgeClass, FacePairing, Perm, Tet,
    Triangulation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Color {
    Red,
    Blue,
}

/// Role of an opposite-edge pair in a veering tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Role {
    R,
    B,
    D,
}

pub const ROLES: [Role; 3] = [Role::R, Role::B, Role::D];

impl Role {
    pub fn symbol(self) -> &'static str {
        match self {
            Role::R => "R",
            Role::B => "B",
            Role::D => "D",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TautVeeringStructure {
    /// Angle divided by pi on each opposite-edge pair (index as in
    /// [`pair_of_edge`]); a taut structure uses only 0 and 1.
    pub taut: Vec<[u8; 3]>,
    /// One color per edge class, in the order of `Triangulation::edge_classes`.
    pub colors: Vec<Color>,
    /// `upward[t][f]`: the co-orientation points out of tetrahedron `t` through face `f`.
    pub upward: Vec<[bool; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VeeringCheck {
    pub ok: bool,
    pub violations: Vec<String>,
    /// Global orientation sign under which the color pattern holds.
    pub handedness: Option<i8>,
}

/// Cyclic successor of pair `k` as seen from a vertex of a tetrahedron with
/// orientation `sign`.
pub fn next_pair(k: usize, sign: i8) -> usize {
    if sign > 0 {
        (k + 1) % 3
    } else {
        (k + 2) % 3
    }
}

/// Builds the structure: pi on the diagonal pair, red on the class of
/// largest degree (`4p + 4`), and the co-orientation propagated from `w0'`.
pub fn assign_veering(tri: &Triangulation) -> Result<TautVeeringStructure> {
    let classes = tri.edge_classes()?;
    let red = classes
        .iter()
        .enumerate()
        .max_by_key(|(i, c)| (c.degree(), usize::MAX - i))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Invalid("no edges".into()))?;
    let colors: Vec<Color> = (0..classes.len())
        .map(|i| if i == red { Color::Red } else { Color::Blue })
        .collect();
    let mut taut = Vec::with_capacity(tri.len());
    for rec in tri.tets() {
        let d = diagonal_pair(rec)
            .ok_or_else(|| Error::Invalid(format!("{} has no known diagonal", rec.name)))?;
        let mut row = [0u8; 3];
        row[d] = 1;
        taut.push(row);
    }
    let upward = coorient(tri, &taut)?;
    Ok(TautVeeringStructure {
        taut,
        colors,
        upward,
    })
}

/// The diagonal pair of a tetrahedron of `build_tau`, read off its labels:
/// the pair through `02` for `w` tetrahedra and through `ac` for `s`.
pub fn diagonal_pair(tet: &Tet) -> Option<usize> {
    for (x, y) in [("0", "2"), ("a", "c")] {
        if let (Some(a), Some(b)) = (tet.corner_of(x), tet.corner_of(y)) {
            return Some(pair_of_edge(a, b));
        }
    }
    None
}

/// Chooses top faces so that every gluing pairs a top face with a bottom face.
/// The first tetrahedron's top faces are the two containing its diagonal
/// through corner 0.
fn coorient(tri: &Triangulation, taut: &[[u8; 3]]) -> Result<Vec<[bool; 4]>> {
    let table = tri.gluing_table()?;
    let n = tri.len();
    // top[t] = index (0 or 1) in edges_of_pair(d) of the top diagonal.
    let mut top: Vec<Option<usize>> = vec![None; n];
    let faces_up = |t: usize, which: usize| -> [bool; 4] {
        let d = taut[t].iter().position(|&x| x == 1).unwrap();
        let (a, b) = edges_of_pair(d)[which];
        // Face f contains edge ab iff f is not a or b.
        [0u8, 1, 2, 3].map(|f| f != a && f != b)
    };
    for root in 0..n {
        if top[root].is_some() {
            continue;
        }
        top[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            let up = faces_up(t, top[t].unwrap());
            for f in 0..4u8 {
                let (u, perm) = table[t][f as usize];
                let g = perm[f as usize] as usize;
                // Face g of u must point the other way.
                let want = if faces_up(u, 0)[g] != up[f as usize] {
                    0
                } else {
                    1
                };
                match top[u] {
                    None => {
                        top[u] = Some(want);
                        queue.push_back(u);
                    }
                    Some(x) if x != want => {
                        return Err(Error::Invalid(format!(
                            "no consistent co-orientation (conflict at {})",
                            tri.tets()[u].name
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok((0..n).map(|t| faces_up(t, top[t].unwrap())).collect())
}

pub fn check_veering(tri: &Triangulation, s: &TautVeeringStructure) -> VeeringCheck {
    let mut violations = Vec::new();
    let classes = match tri.edge_classes() {
        Ok(c) => c,
        Err(e) => {
            return VeeringCheck {
                ok: false,
                violations: vec![e.to_string()],
                handedness: None,
            };
        }
    };
    if s.taut.len() != tri.len() || s.upward.len() != tri.len() || s.colors.len() != classes.len() {
        return VeeringCheck {
            ok: false,
            violations: vec!["structure dimensions do not match".into()],
            handedness: None,
        };
    }
    let names: Vec<&str> = tri.tets().iter().map(|t| t.name.as_str()).collect();
    for (t, row) in s.taut.iter().enumerate() {
        if row.iter().any(|&x| x > 1) || row.iter().map(|&x| x as u32).sum::<u32>() != 1 {
            violations.push(format!(
                "taut sum: {} has angles {:?} (units of pi)",
                names[t], row
            ));
        }
    }
    for (i, c) in classes.iter().enumerate() {
        let total: u32 = c
            .members
            .iter()
            .map(|m| s.taut[m.tet][m.pair()] as u32)
            .sum();
        if total != 2 {
            violations.push(format!(
                "taut sum: edge class {i} carries {total} pi-angles, expected 2"
            ));
        }
    }
    let color_of = |t: usize, a: u8, b: u8| s.colors[tri.edge_class_of(&classes, t, a, b).unwrap()];
    let sigma = tri.orientation().ok();
    let mut handedness = None;
    match &sigma {
        None => violations.push("triangulation is not orientable".into()),
        Some(sigma) => {
            let mut best: Option<(i8, Vec<String>)> = None;
            for eps in [1i8, -1] {
                let mut bad = Vec::new();
                for t in 0..tri.len() {
                    let Some(d) = s.taut[t].iter().position(|&x| x == 1) else {
                        continue;
                    };
                    let b = next_pair(d, sigma[t] * eps);
                    let r = next_pair(b, sigma[t] * eps);
                    let pair_is = |k: usize, c: Color| {
                        edges_of_pair(k)
                            .iter()
                            .all(|&(x, y)| color_of(t, x, y) == c)
                    };
                    if !pair_is(b, Color::Blue) || !pair_is(r, Color::Red) {
                        bad.push(format!(
                            "color pattern: {} is not pi, blue, red counterclockwise",
                            names[t]
                        ));
                    }
                }
                if best.as_ref().is_none_or(|(_, v)| bad.len() < v.len()) {
                    best = Some((eps, bad));
                }
            }
            let (eps, bad) = best.unwrap();
            if bad.is_empty() {
                handedness = Some(eps);
            }
            violations.extend(bad);
        }
    }
    if let Ok(table) = tri.gluing_table() {
        for (t, up) in s.upward.iter().enumerate() {
            let Some(d) = s.taut[t].iter().position(|&x| x == 1) else {
                continue;
            };
            let ok_shape = edges_of_pair(d)
                .iter()
                .any(|&(a, b)| (0..4u8).all(|f| up[f as usize] == (f != a && f != b)));
            if !ok_shape {
                violations.push(format!(
                    "co-orientation: top faces of {} do not share a diagonal",
                    names[t]
                ));
            }
            for f in 0..4u8 {
                let (u, perm) = table[t][f as usize];
                if s.upward[u][perm[f as usize] as usize] == up[f as usize] {
                    violations.push(format!(
                        "co-orientation: face {}({}) meets a face with the same direction",
                        names[t], f
                    ));
                }
            }
        }
    }
    violations.dedup();
    VeeringCheck {
        ok: violations.is_empty(),
        violations,
        handedness,
    }
}

/// Role of each opposite-edge pair, `roles[t][k]`.
pub fn pair_roles(tri: &Triangulation, s: &TautVeeringStructure) -> Result<Vec<[Role; 3]>> {
    let classes = tri.edge_classes()?;
    let sigma = tri.orientation()?;
    let check = check_veering(tri, s);
    let eps = check
        .handedness
        .ok_or_else(|| Error::Invalid("structure is not veering".into()))?;
    let _ = classes;
    Ok((0..tri.len())
        .map(|t| {
            let d = s.taut[t].iter().position(|&x| x == 1).unwrap();
            let b = next_pair(d, sigma[t] * eps);
            let r = next_pair(b, sigma[t] * eps);
            let mut roles = [Role::D; 3];
            roles[b] = Role::B;
            roles[r] = Role::R;
            roles
        })
        .collect())
}

/// A combinatorial symmetry: tetrahedron `t` goes to `tet_map[t]` with its
/// corners carried by `vertex_maps[t]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Involution {
    pub tet_map: Vec<usize>,
    pub vertex_maps: Vec<Perm>,
}

impl Involution {
    /// Image of opposite-edge pair `k` of tetrahedron `t`.
    pub fn pair_image(&self, t: usize, k: usize) -> usize {
        let (a, b) = edges_of_pair(k)[0];
        let p = &self.vertex_maps[t];
        pair_of_edge(p[a as usize], p[b as usize])
    }

    pub fn is_identity_when_squared(&self) -> bool {
        (0..self.tet_map.len()).all(|t| {
            let u = self.tet_map[t];
            self.tet_map[u] == t
                && perm_compose(&self.vertex_maps[u], &self.vertex_maps[t]) == [0, 1, 2, 3]
        })
    }

    /// Image of every gluing.
    pub fn push_gluings(&self, tri: &Triangulation) -> Result<Triangulation> {
        let gluings = tri
            .gluings()
            .iter()
            .map(|g| {
                let pf = &self.vertex_maps[g.from_tet];
                let pt = &self.vertex_maps[g.to_tet];
                FacePairing::new(
                    self.tet_map[g.from_tet],
                    g.from_corners.map(|c| pf[c as usize]),
                    self.tet_map[g.to_tet],
                    g.to_corners.map(|c| pt[c as usize]),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Triangulation::new(tri.tets().to_vec(), gluings)
    }

    /// True if the pushed gluings are exactly the original ones.
    pub fn preserves(&self, tri: &Triangulation) -> bool {
        self.push_gluings(tri)
            .map(|t| canonical_table(&t) == canonical_table(tri))
            .unwrap_or(false)
    }
}

/// Extends a tetrahedron map to a simplicial map by following gluings from a
/// seed vertex map on tetrahedron `seed`.
pub fn extend_symmetry(
    tri: &Triangulation,
    tet_map: &[usize],
    seed: usize,
    seed_map: Perm,
) -> Option<Involution> {
    let table = tri.gluing_table().ok()?;
    let n = tri.len();
    let mut maps: Vec<Option<Perm>> = vec![None; n];
    maps[seed] = Some(seed_map);
    let mut queue = VecDeque::from([seed]);
    while let Some(a) = queue.pop_front() {
        let phi = maps[a].unwrap();
        for f in 0..4u8 {
            let (b, g) = table[a][f as usize];
            let (c, h) = table[tet_map[a]][phi[f as usize] as usize];
            if c != tet_map[b] {
                return None;
            }
            // phi_b = h . phi_a . g^-1
            let want = perm_compose(&h, &perm_compose(&phi, &perm_inverse(&g)));
            match maps[b] {
                None => {
                    maps[b] = Some(want);
                    queue.push_back(b);
                }
                Some(x) if x != want => return None,
                _ => {}
            }
        }
    }
    let vertex_maps = maps.into_iter().collect::<Option<Vec<_>>>()?;
    Some(Involution {
        tet_map: tet_map.to_vec(),
        vertex_maps,
    })
}

/// Fixes `s` and exchanges `w_i'` with `w_{p-i}`, matching R, B and D pairs.
pub fn involution(p: usize) -> Result<Involution> {
    let tri = build_tau(p)?;
    let veering = assign_veering(&tri)?;
    let roles = pair_roles(&tri, &veering)?;
    let idx = |name: &str| tri.tet_index(name).unwrap();
    let mut tet_map = vec![usize::MAX; tri.len()];
    for i in 0..p {
        let (a, b) = (idx(&wp(i)), idx(&w(p - i)));
        tet_map[a] = b;
        tet_map[b] = a;
    }
    let s = idx("s");
    tet_map[s] = s;
    // Corner maps fixing each opposite-edge pair of s.
    let seeds: [Perm; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
    for seed in seeds {
        let Some(inv) = extend_symmetry(&tri, &tet_map, s, seed) else {
            continue;
        };
        let role_preserving = (0..tri.len())
            .all(|t| (0..3).all(|k| roles[tet_map[t]][inv.pair_image(t, k)] == roles[t][k]));
        if role_preserving && inv.is_identity_when_squared() {
            return Ok(inv);
        }
    }
    Err(Error::Invalid(format!(
        "no role-preserving involution found for p = {p}"
    )))
}

/// Edge classes with their color, for reporting.
pub fn colored_classes<'a>(
    classes: &'a [EdgeClass],
    s: &TautVeeringStructure,
) -> Vec<(&'a EdgeClass, Color)> {
    classes.iter().zip(s.colors.iter().copied()).collect()
}
