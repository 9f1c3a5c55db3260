//! Combinatorial ideal triangulations: tetrahedra with four abstract corners,
//! face pairings, edge classes and cusp links.
//!
//! A face is named by the corner it omits. Pairings keep the ordered corner
//! triples they were written with, so a table entry such as `w0'(015) ~ w1(105)`
//! survives a round trip unchanged.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of the corners `0..4`, stored as its image list.
pub type Perm = [u8; 4];

/// The six edges of a tetrahedron in lexicographic order.
pub const EDGES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index `k` of the opposite-edge pair containing edge `{a, b}`:
/// 0 for {01, 23}, 1 for {02, 13}, 2 for {03, 12}.
pub fn pair_of_edge(a: u8, b: u8) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    match (lo, hi) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        (0, 3) | (1, 2) => 2,
        _ => panic!("not an edge: {a}{b}"),
    }
}

/// The two edges making up opposite-edge pair `k`.
pub fn edges_of_pair(k: usize) -> [(u8, u8); 2] {
    match k {
        0 => [(0, 1), (2, 3)],
        1 => [(0, 2), (1, 3)],
        2 => [(0, 3), (1, 2)],
        _ => panic!("pair index out of range: {k}"),
    }
}

pub fn perm_inverse(p: &Perm) -> Perm {
    let mut inv = [0u8; 4];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u8;
    }
    inv
}

/// `(a ∘ b)(i) = a(b(i))`.
pub fn perm_compose(a: &Perm, b: &Perm) -> Perm {
    [
        a[b[0] as usize],
        a[b[1] as usize],
        a[b[2] as usize],
        a[b[3] as usize],
    ]
}

/// Sign of a permutation of arbitrary small length.
pub fn parity(seq: &[u8]) -> i8 {
    let mut s = 1i8;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                s = -s;
            }
        }
    }
    s
}

fn complement(c: [u8; 3]) -> Option<u8> {
    (0..4u8).find(|x| !c.contains(x))
}

fn distinct_corners(c: &[u8; 3]) -> bool {
    c.iter().all(|&x| x < 4) && c[0] != c[1] && c[0] != c[2] && c[1] != c[2]
}

/// One tetrahedron: a display name and a label per corner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tet {
    pub name: String,
    pub labels: [String; 4],
}

impl Tet {
    pub fn new(name: &str, labels: [&str; 4]) -> Self {
        Tet {
            name: name.to_string(),
            labels: labels.map(|s| s.to_string()),
        }
    }

    /// Default labels are the corner indices themselves.
    pub fn unlabeled(name: &str) -> Self {
        Tet::new(name, ["0", "1", "2", "3"])
    }

    pub fn corner_of(&self, label: &str) -> Option<u8> {
        self.labels.iter().position(|l| l == label).map(|i| i as u8)
    }
}

/// A face `(tet, omitted corner)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceRef {
    pub tet: usize,
    pub face: u8,
}

/// An identification of two faces. `from_corners[i]` is glued to `to_corners[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacePairing {
    pub from_tet: usize,
    pub from_corners: [u8; 3],
    pub to_tet: usize,
    pub to_corners: [u8; 3],
}

impl FacePairing {
    pub fn new(
        from_tet: usize,
        from_corners: [u8; 3],
        to_tet: usize,
        to_corners: [u8; 3],
    ) -> Result<Self> {
        if !distinct_corners(&from_corners) || !distinct_corners(&to_corners) {
            return Err(Error::Invalid(format!(
                "face corners must be three distinct values in 0..4: {from_corners:?} ~ {to_corners:?}"
            )));
        }
        Ok(FacePairing {
            from_tet,
            from_corners,
            to_tet,
            to_corners,
        })
    }

    pub fn from(&self) -> FaceRef {
        FaceRef {
            tet: self.from_tet,
            face: complement(self.from_corners).unwrap(),
        }
    }

    pub fn to(&self) -> FaceRef {
        FaceRef {
            tet: self.to_tet,
            face: complement(self.to_corners).unwrap(),
        }
    }

    /// Full corner permutation from the `from` tetrahedron to the `to` tetrahedron
    /// (the omitted corner goes to the omitted corner).
    pub fn perm(&self) -> Perm {
        let mut p = [0u8; 4];
        for i in 0..3 {
            p[self.from_corners[i] as usize] = self.to_corners[i];
        }
        p[self.from().face as usize] = self.to().face;
        p
    }

    pub fn reversed(&self) -> FacePairing {
        FacePairing {
            from_tet: self.to_tet,
            from_corners: self.to_corners,
            to_tet: self.from_tet,
            to_corners: self.from_corners,
        }
    }
}

/// An edge of a tetrahedron, oriented from corner `a` to corner `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeSlot {
    pub tet: usize,
    pub a: u8,
    pub b: u8,
}

impl EdgeSlot {
    pub fn pair(&self) -> usize {
        pair_of_edge(self.a, self.b)
    }

    fn unordered(&self) -> (usize, u8, u8) {
        (self.tet, self.a.min(self.b), self.a.max(self.b))
    }
}

/// An edge of the triangulated manifold: its tetrahedron edges in the cyclic
/// order met when walking around it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeClass {
    pub members: Vec<EdgeSlot>,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, tet: usize, a: u8, b: u8) -> bool {
        self.members
            .iter()
            .any(|m| m.unordered() == (tet, a.min(b), a.max(b)))
    }
}

/// One connected component of the vertex link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspLink {
    pub component: usize,
    /// `(tet, corner)` for every truncated corner in this component.
    pub triangles: Vec<(usize, u8)>,
    pub vertices: usize,
    pub edges: usize,
    pub euler_characteristic: i64,
}

impl CuspLink {
    pub fn is_torus(&self) -> bool {
        self.euler_characteristic == 0
    }
}

/// Findings of [`Triangulation::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub tets: usize,
    pub pairings: usize,
    pub unglued: Vec<FaceRef>,
    /// Faces named by more than one pairing, or glued to themselves.
    pub non_involutive: Vec<FaceRef>,
    pub corner_map_errors: Vec<String>,
    /// `None` when orientability could not be decided (open or inconsistent data).
    pub orientable: Option<bool>,
    pub closed: bool,
    pub ok: bool,
}

/// Neighbour lookup for a closed triangulation: `table[t][f] = (t', perm)`.
pub type GluingTable = Vec<[(usize, Perm); 4]>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    tets: Vec<Tet>,
    gluings: Vec<FacePairing>,
}

impl Triangulation {
    /// Assembles a triangulation. Indices and corner triples are checked here;
    /// global properties are left to [`Triangulation::validate`].
    pub fn new(tets: Vec<Tet>, gluings: Vec<FacePairing>) -> Result<Self> {
        for (i, g) in gluings.iter().enumerate() {
            if g.from_tet >= tets.len() || g.to_tet >= tets.len() {
                return Err(Error::Invalid(format!(
                    "gluing {i} refers to a missing tetrahedron"
                )));
            }
            if !distinct_corners(&g.from_corners) || !distinct_corners(&g.to_corners) {
                return Err(Error::Invalid(format!(
                    "gluing {i} has a malformed corner triple"
                )));
            }
        }
        Ok(Triangulation { tets, gluings })
    }

    pub fn tets(&self) -> &[Tet] {
        &self.tets
    }

    pub fn gluings(&self) -> &[FacePairing] {
        &self.gluings
    }

    pub fn len(&self) -> usize {
        self.tets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    pub fn tet_index(&self, name: &str) -> Option<usize> {
        self.tets.iter().position(|t| t.name == name)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut uses: BTreeMap<FaceRef, usize> = BTreeMap::new();
        let mut non_involutive = Vec::new();
        for g in &self.gluings {
            let (f, t) = (g.from(), g.to());
            if f == t {
                non_involutive.push(f);
            }
            *uses.entry(f).or_default() += 1;
            *uses.entry(t).or_default() += 1;
        }
        for (face, &count) in &uses {
            if count > 1 && !non_involutive.contains(face) {
                non_involutive.push(*face);
            }
        }
        non_involutive.sort();
        let mut unglued = Vec::new();
        for tet in 0..self.tets.len() {
            for face in 0..4u8 {
                if !uses.contains_key(&FaceRef { tet, face }) {
                    unglued.push(FaceRef { tet, face });
                }
            }
        }
        // Corner maps are bijections by construction; what can still go wrong
        // is an edge identified with itself in reverse.
        let mut corner_map_errors = Vec::new();
        if let Ok(table) = self.gluing_table() {
            let mut seen = vec![[false; 6]; self.tets.len()];
            for tet in 0..self.tets.len() {
                for (e, &(a, b)) in EDGES.iter().enumerate() {
                    if seen[tet][e] {
                        continue;
                    }
                    let (class, reversed) = walk_edge(&table, tet, a, b);
                    for m in &class.members {
                        seen[m.tet][edge_index(m.a, m.b)] = true;
                    }
                    if reversed {
                        corner_map_errors.push(format!(
                            "edge {}({}{}) is identified with itself in reverse",
                            self.tets[tet].name, a, b
                        ));
                    }
                }
            }
        }
        let closed = unglued.is_empty();
        let orientable = if closed && non_involutive.is_empty() {
            Some(self.orientation().is_ok())
        } else {
            None
        };
        let ok = closed
            && non_involutive.is_empty()
            && corner_map_errors.is_empty()
            && orientable == Some(true);
        ValidationReport {
            tets: self.tets.len(),
            pairings: self.gluings.len(),
            unglued,
            non_involutive,
            corner_map_errors,
            orientable,
            closed,
            ok,
        }
    }

    /// Neighbour table; fails unless every face is glued exactly once.
    pub fn gluing_table(&self) -> Result<GluingTable> {
        let mut table: Vec<[Option<(usize, Perm)>; 4]> = vec![[None; 4]; self.tets.len()];
        for g in &self.gluings {
            for pairing in [g.clone(), g.reversed()] {
                let f = pairing.from();
                let slot = &mut table[f.tet][f.face as usize];
                if slot.is_some() || g.from() == g.to() {
                    return Err(Error::Invalid(format!(
                        "face {}({}) is glued more than once",
                        self.tets[f.tet].name, f.face
                    )));
                }
                *slot = Some((pairing.to_tet, pairing.perm()));
            }
        }
        let missing = table.iter().flatten().filter(|s| s.is_none()).count();
        if missing > 0 {
            return Err(Error::NotClosed(missing));
        }
        Ok(table
            .into_iter()
            .map(|row| row.map(|s| s.unwrap()))
            .collect())
    }

    /// A sign per tetrahedron making every gluing orientation-reversing,
    /// with the first tetrahedron positive.
    pub fn orientation(&self) -> Result<Vec<i8>> {
        let table = self.gluing_table()?;
        let mut sigma = vec![0i8; self.tets.len()];
        for root in 0..self.tets.len() {
            if sigma[root] != 0 {
                continue;
            }
            sigma[root] = 1;
            let mut queue = VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                for &(u, perm) in &table[t] {
                    let want = -sigma[t] * parity(&perm);
                    if sigma[u] == 0 {
                        sigma[u] = want;
                        queue.push_back(u);
                    } else if sigma[u] != want {
                        return Err(Error::Invalid("triangulation is not orientable".into()));
                    }
                }
            }
        }
        Ok(sigma)
    }

    /// Edge classes, each listed from its smallest slot in rotation order.
    pub fn edge_classes(&self) -> Result<Vec<EdgeClass>> {
        let table = self.gluing_table()?;
        let mut seen = vec![[false; 6]; self.tets.len()];
        let mut classes = Vec::new();
        for tet in 0..self.tets.len() {
            for (e, &(a, b)) in EDGES.iter().enumerate() {
                if seen[tet][e] {
                    continue;
                }
                let (class, _) = walk_edge(&table, tet, a, b);
                for m in &class.members {
                    seen[m.tet][edge_index(m.a, m.b)] = true;
                }
                classes.push(class);
            }
        }
        Ok(classes)
    }

    pub fn edge_class_of(&self, classes: &[EdgeClass], tet: usize, a: u8, b: u8) -> Option<usize> {
        classes.iter().position(|c| c.contains(tet, a, b))
    }

    /// Connected components of the vertex link, with Euler characteristics.
    pub fn cusp_links(&self) -> Result<Vec<CuspLink>> {
        let table = self.gluing_table()?;
        let n = self.tets.len();
        let mut tri_uf = UnionFind::new(4 * n);
        // Link vertices are edge ends (tet, v, w) with v != w.
        let mut vert_uf = UnionFind::new(16 * n);
        for t in 0..n {
            for f in 0..4u8 {
                let (u, perm) = table[t][f as usize];
                for v in 0..4u8 {
                    if v == f {
                        continue;
                    }
                    tri_uf.union(4 * t + v as usize, 4 * u + perm[v as usize] as usize);
                    for w in 0..4u8 {
                        if w != v && w != f {
                            vert_uf.union(
                                16 * t + 4 * v as usize + w as usize,
                                16 * u + 4 * perm[v as usize] as usize + perm[w as usize] as usize,
                            );
                        }
                    }
                }
            }
        }
        let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut links: Vec<CuspLink> = Vec::new();
        for t in 0..n {
            for v in 0..4u8 {
                let root = tri_uf.find(4 * t + v as usize);
                let next = comp_of_root.len();
                let c = *comp_of_root.entry(root).or_insert(next);
                if c == links.len() {
                    links.push(CuspLink {
                        component: c,
                        triangles: vec![],
                        vertices: 0,
                        edges: 0,
                        euler_characteristic: 0,
                    });
                }
                links[c].triangles.push((t, v));
            }
        }
        for link in &mut links {
            let mut roots = std::collections::BTreeSet::new();
            for &(t, v) in &link.triangles {
                for w in 0..4u8 {
                    if w != v {
                        roots.insert(vert_uf.find(16 * t + 4 * v as usize + w as usize));
                    }
                }
            }
            let f = link.triangles.len();
            link.vertices = roots.len();
            link.edges = 3 * f / 2;
            link.euler_characteristic = link.vertices as i64 - link.edges as i64 + f as i64;
        }
        Ok(links)
    }

    /// Returns a copy whose tetrahedra appear in the order `order`
    /// (`order[k]` is the old index of the new tetrahedron `k`).
    pub fn reordered(&self, order: &[usize]) -> Result<Triangulation> {
        let n = self.tets.len();
        let mut new_index = vec![usize::MAX; n];
        for (k, &old) in order.iter().enumerate() {
            if old >= n || new_index[old] != usize::MAX {
                return Err(Error::Invalid("reordering is not a permutation".into()));
            }
            new_index[old] = k;
        }
        if order.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: order.len(),
            });
        }
        let tets = order.iter().map(|&i| self.tets[i].clone()).collect();
        let gluings = self
            .gluings
            .iter()
            .map(|g| FacePairing {
                from_tet: new_index[g.from_tet],
                to_tet: new_index[g.to_tet],
                ..g.clone()
            })
            .collect();
        Triangulation::new(tets, gluings)
    }

    /// Drops gluing `index`; handy for building broken inputs.
    pub fn without_gluing(&self, index: usize) -> Triangulation {
        let mut gluings = self.gluings.clone();
        gluings.remove(index);
        Triangulation {
            tets: self.tets.clone(),
            gluings,
        }
    }
}

fn edge_index(a: u8, b: u8) -> usize {
    let key = (a.min(b), a.max(b));
    EDGES.iter().position(|&e| e == key).unwrap()
}

/// Rotates around edge `ab` of `tet`, leaving first through the face that
/// omits the smaller of the two remaining corners. The flag reports a slot met
/// with both orientations.
fn walk_edge(table: &GluingTable, tet: usize, a: u8, b: u8) -> (EdgeClass, bool) {
    let others: Vec<u8> = (0..4u8).filter(|&c| c != a && c != b).collect();
    let start = (tet, a, b, others[0]);
    let mut state = start;
    let mut members: Vec<EdgeSlot> = Vec::new();
    let mut reversed = false;
    loop {
        let (t, x, y, exit) = state;
        let slot = EdgeSlot { tet: t, a: x, b: y };
        match members.iter().find(|m| m.unordered() == slot.unordered()) {
            None => members.push(slot),
            Some(m) => reversed |= m.a != slot.a,
        }
        let (u, perm) = table[t][exit as usize];
        let (x2, y2, entered) = (perm[x as usize], perm[y as usize], perm[exit as usize]);
        let next_exit = (0..4u8)
            .find(|&c| c != x2 && c != y2 && c != entered)
            .unwrap();
        state = (u, x2, y2, next_exit);
        if state == start {
            break;
        }
    }
    (EdgeClass { members }, reversed)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TetDoc {
    name: String,
    labels: [String; 4],
}

#[derive(Serialize, Deserialize)]
struct GluingDoc {
    from: [usize; 2],
    to: [usize; 2],
    map: [[u8; 2]; 3],
}

#[derive(Serialize, Deserialize)]
struct TriangulationDoc {
    tets: Vec<TetDoc>,
    gluings: Vec<GluingDoc>,
}

impl Triangulation {
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = TriangulationDoc {
            tets: self
                .tets
                .iter()
                .map(|t| TetDoc {
                    name: t.name.clone(),
                    labels: t.labels.clone(),
                })
                .collect(),
            gluings: self
                .gluings
                .iter()
                .map(|g| {
                    let (f, t) = (g.from(), g.to());
                    GluingDoc {
                        from: [f.tet, f.face as usize],
                        to: [t.tet, t.face as usize],
                        map: [0, 1, 2].map(|i| [g.from_corners[i], g.to_corners[i]]),
                    }
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("document is always serializable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Triangulation> {
        let doc: TriangulationDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = doc.tets.len();
        let tets: Vec<Tet> = doc
            .tets
            .into_iter()
            .map(|t| Tet {
                name: t.name,
                labels: t.labels,
            })
            .collect();
        let mut gluings = Vec::with_capacity(doc.gluings.len());
        for (i, g) in doc.gluings.iter().enumerate() {
            let here = |msg: String| Error::Parse(format!("gluing record {i}: {msg}"));
            if g.from[0] >= n || g.to[0] >= n {
                return Err(here("tetrahedron index out of range".into()));
            }
            if g.from[1] > 3 || g.to[1] > 3 {
                return Err(here("face index out of range".into()));
            }
            let src = g.map.map(|m| m[0]);
            let dst = g.map.map(|m| m[1]);
            for (&s, &d) in src.iter().zip(&dst) {
                if s > 3 || d > 3 {
                    return Err(here("corner index out of range".into()));
                }
                if s == g.from[1] as u8 {
                    return Err(here(format!(
                        "map uses corner {s}, which is opposite the source face"
                    )));
                }
                if d == g.to[1] as u8 {
                    return Err(here(format!(
                        "map sends corner {s} to the opposite corner {d} of the target face"
                    )));
                }
            }
            let pairing =
                FacePairing::new(g.from[0], src, g.to[0], dst).map_err(|e| here(e.to_string()))?;
            gluings.push(pairing);
        }
        Triangulation::new(tets, gluings)
    }
}
