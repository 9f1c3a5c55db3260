//! 3-2 and 2-0 moves on closed triangulations.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::triangulation::{EdgeClass, FacePairing, Perm, Tet, Triangulation};

/// Names for the two tetrahedra created by a 3-2 move, and optionally a
/// dictionary `(old tet name, old corner label) -> new label` for their corners.
#[derive(Clone, Debug, Default)]
pub struct ThreeTwoNames {
    /// The tetrahedron containing the first endpoint of the removed edge.
    pub top: String,
    /// The tetrahedron containing the second endpoint.
    pub bottom: String,
    pub labels: BTreeMap<(String, String), String>,
}

impl ThreeTwoNames {
    pub fn new(top: &str, bottom: &str) -> Self {
        ThreeTwoNames {
            top: top.into(),
            bottom: bottom.into(),
            labels: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, tet: &str, old: &str, new: &str) -> Self {
        self.labels.insert((tet.into(), old.into()), new.into());
        self
    }
}

/// Replaces the three tetrahedra around a degree-3 edge by two tetrahedra
/// sharing a face.
pub fn pachner_3_2(
    tri: &Triangulation,
    e: &EdgeClass,
    names: &ThreeTwoNames,
) -> Result<Triangulation> {
    if e.degree() != 3 {
        return Err(Error::Precondition(format!(
            "3-2 move needs an edge of degree 3, got {}",
            e.degree()
        )));
    }
    let table = tri.gluing_table()?;
    // Walk around the edge, recording for each tetrahedron the corner whose
    // opposite face leads to the next tetrahedron (`exit`) and the one whose
    // opposite face was entered through (`enter`).
    let m0 = e.members[0];
    let mut t = [m0.tet; 3];
    let mut exit = [0u8; 3];
    let mut enter = [0u8; 3];
    let mut ab = [(0u8, 0u8); 3];
    let (mut a, mut b) = (m0.a, m0.b);
    exit[0] = (0..4u8).find(|&c| c != a && c != b).unwrap();
    for k in 0..3 {
        ab[k] = (a, b);
        enter[k] = (0..4u8)
            .find(|&c| c != a && c != b && c != exit[k])
            .unwrap();
        let (next, perm) = table[t[k]][exit[k] as usize];
        let entered = perm[exit[k] as usize];
        a = perm[a as usize];
        b = perm[b as usize];
        if k < 2 {
            t[k + 1] = next;
            exit[k + 1] = (0..4u8)
                .find(|&c| c != a && c != b && c != entered)
                .unwrap();
        } else if next != t[0] || (a, b) != (m0.a, m0.b) || entered != enter[0] {
            return Err(Error::Precondition(
                "edge neighbourhood is not a bipyramid".into(),
            ));
        }
    }
    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
        return Err(Error::Precondition(
            "the tetrahedra around the edge are not distinct".into(),
        ));
    }
    // New vertices: 0 = first endpoint, 1 = second endpoint, 2 + k = equatorial
    // vertex shared by exit[k] of t[k] and enter[k-1] of t[k-1].
    let vertex_of = |k: usize, c: u8| -> usize {
        if c == ab[k].0 {
            0
        } else if c == ab[k].1 {
            1
        } else if c == exit[k] {
            2 + k
        } else {
            2 + (k + 1) % 3
        }
    };
    let labels = new_labels(tri, &t, &vertex_of, names)?;
    // Corner order inside each new tetrahedron: by label when a dictionary is
    // given, otherwise endpoint first and then the equator.
    let order = |apex: usize| -> Vec<usize> {
        let mut vs = vec![apex, 2, 3, 4];
        if let Some(l) = &labels {
            vs.sort_by(|x, y| l[*x].cmp(&l[*y]));
        }
        vs
    };
    let top = order(0);
    let bottom = order(1);
    let corner_in =
        |verts: &Vec<usize>, v: usize| verts.iter().position(|&x| x == v).unwrap() as u8;
    let make_tet = |name: &str, verts: &Vec<usize>| {
        let l: [String; 4] = match &labels {
            Some(l) => [0, 1, 2, 3].map(|i| l[verts[i]].clone()),
            None => ["0", "1", "2", "3"].map(String::from),
        };
        Tet {
            name: name.to_string(),
            labels: l,
        }
    };
    let added = vec![make_tet(&names.top, &top), make_tet(&names.bottom, &bottom)];
    // Faces opposite an endpoint are outer faces; the other two are interior.
    let face_image = |tet: usize, corners: [u8; 3]| -> Option<(usize, [u8; 3])> {
        let k = t.iter().position(|&x| x == tet)?;
        let (n, s) = ab[k];
        let side = if !corners.contains(&n) {
            1
        } else if !corners.contains(&s) {
            0
        } else {
            return None;
        };
        let verts = if side == 0 { &top } else { &bottom };
        Some((side, corners.map(|c| corner_in(verts, vertex_of(k, c)))))
    };
    let kept: Vec<usize> = (0..tri.len()).filter(|x| !t.contains(x)).collect();
    let base = kept.len();
    let mut index = vec![usize::MAX; tri.len()];
    for (k, &x) in kept.iter().enumerate() {
        index[x] = k;
    }
    let mut tets: Vec<Tet> = kept.iter().map(|&x| tri.tets()[x].clone()).collect();
    tets.extend(added);
    let mut gluings = Vec::new();
    for g in tri.gluings() {
        let side =
            |tet: usize, corners: [u8; 3]| -> std::result::Result<Option<(usize, [u8; 3])>, ()> {
                if t.contains(&tet) {
                    match face_image(tet, corners) {
                        Some((s, c)) => Ok(Some((base + s, c))),
                        None => Err(()),
                    }
                } else {
                    Ok(Some((index[tet], corners)))
                }
            };
        match (
            side(g.from_tet, g.from_corners),
            side(g.to_tet, g.to_corners),
        ) {
            (Ok(Some((x, cx))), Ok(Some((y, cy)))) => {
                let p = FacePairing::new(x, cx, y, cy)?;
                if p.from() == p.to() {
                    return Err(Error::Precondition(
                        "the move would glue a face to itself".into(),
                    ));
                }
                gluings.push(p);
            }
            (Err(()), Err(())) => {}
            _ => {
                return Err(Error::Precondition(
                    "an outer face is glued to an interior face".into(),
                ))
            }
        }
    }
    let shared_top = [2, 3, 4].map(|v| corner_in(&top, v));
    let shared_bottom = [2, 3, 4].map(|v| corner_in(&bottom, v));
    gluings.push(FacePairing::new(base, shared_top, base + 1, shared_bottom)?);
    let result = Triangulation::new(tets, gluings)?;
    result.gluing_table()?;
    Ok(result)
}

fn new_labels(
    tri: &Triangulation,
    t: &[usize],
    vertex_of: &dyn Fn(usize, u8) -> usize,
    names: &ThreeTwoNames,
) -> Result<Option<Vec<String>>> {
    if names.labels.is_empty() {
        return Ok(None);
    }
    let mut out: Vec<Option<String>> = vec![None; 5];
    for (k, &tet) in t.iter().enumerate() {
        let rec = &tri.tets()[tet];
        for c in 0..4u8 {
            let key = (rec.name.clone(), rec.labels[c as usize].clone());
            let new = names.labels.get(&key).ok_or_else(|| {
                Error::Precondition(format!(
                    "no new label given for corner {} of {}",
                    key.1, key.0
                ))
            })?;
            let v = vertex_of(k, c);
            match &out[v] {
                Some(prev) if prev != new => {
                    return Err(Error::Precondition(format!(
                    "label dictionary is inconsistent: one vertex is called both {prev} and {new}"
                )))
                }
                _ => out[v] = Some(new.clone()),
            }
        }
    }
    let labels: Vec<String> = out.into_iter().map(|l| l.unwrap()).collect();
    for i in 0..5 {
        for j in i + 1..5 {
            if labels[i] == labels[j] && !(i == 0 && j == 1) {
                return Err(Error::Precondition(format!(
                    "two new vertices share the label {}",
                    labels[i]
                )));
            }
        }
    }
    Ok(Some(labels))
}

/// Removes two tetrahedra that meet along both faces of a degree-2 edge and
/// sews their remaining faces together.
pub fn pachner_2_0(tri: &Triangulation, e: &EdgeClass) -> Result<Triangulation> {
    if e.degree() != 2 {
        return Err(Error::Precondition(format!(
            "2-0 move needs an edge of degree 2, got {}",
            e.degree()
        )));
    }
    let table = tri.gluing_table()?;
    let (a_tet, b_tet) = (e.members[0].tet, e.members[1].tet);
    if a_tet == b_tet {
        return Err(Error::Precondition(
            "both edge slots lie in one tetrahedron".into(),
        ));
    }
    let (u, v) = (e.members[0].a, e.members[0].b);
    let others: Vec<u8> = (0..4u8).filter(|&c| c != u && c != v).collect();
    let (w, x) = (others[0], others[1]);
    let (bw, gw) = table[a_tet][w as usize];
    let (bx, gx) = table[a_tet][x as usize];
    if bw != b_tet || bx != b_tet {
        return Err(Error::Precondition(
            "the two tetrahedra are not glued along both faces of the edge".into(),
        ));
    }
    if gw[u as usize] != gx[u as usize] || gw[v as usize] != gx[v as usize] {
        return Err(Error::Precondition("the edge is folded onto itself".into()));
    }
    let mut psi: Perm = [0; 4];
    psi[u as usize] = gw[u as usize];
    psi[v as usize] = gw[v as usize];
    psi[x as usize] = gw[x as usize];
    psi[w as usize] = gx[w as usize];
    let mut check = psi;
    check.sort();
    if check != [0, 1, 2, 3] {
        return Err(Error::Precondition(
            "the two tetrahedra do not stack across the edge".into(),
        ));
    }
    let mut extra = Vec::new();
    for far in [v, u] {
        // Face of A opposite `far`, listed in ascending corner order.
        let mut face: Vec<u8> = (0..4u8).filter(|&c| c != far).collect();
        face.sort();
        let (ma, ha) = table[a_tet][far as usize];
        let (mb, hb) = table[b_tet][psi[far as usize] as usize];
        if [ma, mb].iter().any(|&m| m == a_tet || m == b_tet) {
            return Err(Error::Precondition(
                "an outer face is glued back into the collapsing pair".into(),
            ));
        }
        let ca = [face[0], face[1], face[2]].map(|c| ha[c as usize]);
        let cb = [face[0], face[1], face[2]].map(|c| hb[psi[c as usize] as usize]);
        extra.push((ma, ca, mb, cb));
    }
    let kept: Vec<usize> = (0..tri.len())
        .filter(|&t| t != a_tet && t != b_tet)
        .collect();
    let mut index = vec![usize::MAX; tri.len()];
    for (k, &t) in kept.iter().enumerate() {
        index[t] = k;
    }
    let tets: Vec<Tet> = kept.iter().map(|&t| tri.tets()[t].clone()).collect();
    let mut gluings = Vec::new();
    for g in tri.gluings() {
        let touches = |t: usize| t == a_tet || t == b_tet;
        if !touches(g.from_tet) && !touches(g.to_tet) {
            gluings.push(FacePairing {
                from_tet: index[g.from_tet],
                to_tet: index[g.to_tet],
                ..g.clone()
            });
        }
    }
    for (ma, ca, mb, cb) in extra {
        let p = FacePairing::new(index[ma], ca, index[mb], cb)?;
        if p.from() == p.to() {
            return Err(Error::Precondition(
                "the move would glue a face to itself".into(),
            ));
        }
        gluings.push(p);
    }
    let result = Triangulation::new(tets, gluings)?;
    result.gluing_table()?;
    Ok(result)
}
