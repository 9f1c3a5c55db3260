//! Shape parameters from angles, edge gluing and cusp completeness
//! residuals, and the final geometricity verdict.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::angles::ConstraintSystem;
use crate::error::{Error, Result};
use crate::exact;
use crate::triangulation::{pair_of_edge, parity, GluingTable, Triangulation};
use crate::veering::next_pair;
use crate::volume::{BoundaryReport, MaxResult};

/// Shape parameters of one tetrahedron, indexed by opposite-edge pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TetShape {
    pub tet: String,
    /// Pair carrying `z`, then `z'`, then `z''`.
    pub order: [usize; 3],
    /// `by_pair[k]` is the parameter on pair `k`.
    pub by_pair: [Complex64; 3],
}

impl TetShape {
    pub fn z(&self) -> Complex64 {
        self.by_pair[self.order[0]]
    }
}

/// Cyclic order `(k, next, next of next)` of the pairs of a tetrahedron
/// with orientation sign `sign`, starting from pair 0.
fn cyclic_order(sign: i8) -> [usize; 3] {
    let b = next_pair(0, sign);
    [0, b, next_pair(b, sign)]
}

/// `z = (sin b / sin c) e^{i a}` for angles `a, b, c` on consecutive pairs.
pub fn shape_from_triple(a: f64, b: f64, c: f64) -> Complex64 {
    Complex64::from_polar(b.sin() / c.sin(), a)
}

pub fn shapes_from_angles(
    tri: &Triangulation,
    cs: &ConstraintSystem,
    theta: &[f64],
) -> Result<Vec<TetShape>> {
    cs.check_dimension(theta)?;
    if let Some(x) = theta.iter().find(|&&x| !(x > 0.0 && x < PI)) {
        return Err(Error::Boundary(format!(
            "angle {x} is not strictly inside (0, pi)"
        )));
    }
    let sigma = tri.orientation()?;
    Ok((0..tri.len())
        .map(|t| {
            let order = cyclic_order(sigma[t]);
            let angle = |k: usize| theta[cs.column(t, k)];
            let z = shape_from_triple(angle(order[0]), angle(order[1]), angle(order[2]));
            let one = Complex64::new(1.0, 0.0);
            let z1 = one / (one - z);
            let z2 = one - one / z;
            let mut by_pair = [z; 3];
            by_pair[order[1]] = z1;
            by_pair[order[2]] = z2;
            TetShape {
                tet: cs.tet_names[t].clone(),
                order,
                by_pair,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeResidual {
    pub degree: usize,
    /// `|prod z - 1|`.
    pub modulus: f64,
    /// `|sum arg z - 2 pi|`.
    pub angle: f64,
}

pub fn edge_gluing_residuals(
    tri: &Triangulation,
    shapes: &[TetShape],
) -> Result<Vec<EdgeResidual>> {
    Ok(tri
        .edge_classes()?
        .iter()
        .map(|class| {
            let (prod, args) =
                class
                    .members
                    .iter()
                    .fold((Complex64::new(1.0, 0.0), 0.0), |(p, a), m| {
                        let z = shapes[m.tet].by_pair[m.pair()];
                        (p * z, a + z.arg())
                    });
            EdgeResidual {
                degree: class.degree(),
                modulus: (prod - 1.0).norm(),
                angle: (args - 2.0 * PI).abs(),
            }
        })
        .collect())
}

/// Passing the corner of cusp triangle `(tet, vertex)` at the end of edge
/// `(vertex, corner)` picks up `sign * log z` of that edge's pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Turn {
    pub tet: usize,
    pub vertex: u8,
    pub corner: u8,
    pub sign: i8,
}

/// One step across a side of the cusp triangulation: from triangle `from`
/// through its side in face `from_side` into triangle `to`, entering
/// through its side in face `to_side`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Crossing {
    from: usize,
    from_side: u8,
    to: usize,
    to_side: u8,
}

impl Crossing {
    fn reversed(self) -> Crossing {
        Crossing {
            from: self.to,
            from_side: self.to_side,
            to: self.from,
            to_side: self.from_side,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspCycles {
    pub cusp: usize,
    /// Two cycles generating the first homology of the torus.
    pub basis: [Vec<Turn>; 2],
    /// The remaining fundamental cycles of the spanning tree.
    pub others: Vec<Vec<Turn>>,
}

/// Cusp triangulation of one link component.
struct CuspGraph {
    triangles: Vec<(usize, u8)>,
    index: BTreeMap<(usize, u8), usize>,
    /// `next[i][side]` is the crossing out of triangle `i` through `side`.
    next: Vec<[Option<Crossing>; 4]>,
    sigma: Vec<i8>,
    table: GluingTable,
}

impl CuspGraph {
    fn new(tri: &Triangulation, triangles: Vec<(usize, u8)>) -> Result<CuspGraph> {
        let table = tri.gluing_table()?;
        let index: BTreeMap<(usize, u8), usize> =
            triangles.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let next = triangles
            .iter()
            .enumerate()
            .map(|(i, &(t, v))| {
                let mut out = [None; 4];
                for side in (0..4u8).filter(|&s| s != v) {
                    let (u, perm) = table[t][side as usize];
                    let to = index[&(u, perm[v as usize])];
                    out[side as usize] = Some(Crossing {
                        from: i,
                        from_side: side,
                        to,
                        to_side: perm[side as usize],
                    });
                }
                out
            })
            .collect();
        Ok(CuspGraph {
            triangles,
            index,
            next,
            sigma: tri.orientation()?,
            table,
        })
    }

    fn crossing(&self, tri: usize, side: u8) -> Crossing {
        self.next[tri][side as usize].expect("a side of the cusp triangle")
    }

    /// Key of the dual edge of a crossing and the direction it is used in.
    fn dual_edge(&self, c: Crossing) -> ((usize, u8), i64) {
        let a = (c.from, c.from_side);
        let b = (c.to, c.to_side);
        if a <= b {
            (a, 1)
        } else {
            (b, -1)
        }
    }

    fn turn(&self, tri: usize, enter: u8, exit: u8) -> Option<Turn> {
        if enter == exit {
            return None;
        }
        let (t, v) = self.triangles[tri];
        let corner = (0..4u8).find(|&c| c != v && c != enter && c != exit)?;
        let sign = self.sigma[t] * parity(&[v, corner, enter, exit]);
        Some(Turn {
            tet: t,
            vertex: v,
            corner,
            sign,
        })
    }

    /// Turns of a closed walk given by its crossings in order.
    fn turns(&self, walk: &[Crossing]) -> Vec<Turn> {
        (0..walk.len())
            .filter_map(|j| {
                let here = walk[j];
                let there = walk[(j + 1) % walk.len()];
                debug_assert_eq!(here.to, there.from);
                self.turn(here.to, here.to_side, there.from_side)
            })
            .collect()
    }

    /// Spanning tree by breadth-first search; `parent[i]` is the crossing
    /// into `i`.
    fn tree(&self) -> Vec<Option<Crossing>> {
        let mut parent = vec![None; self.triangles.len()];
        let mut seen = vec![false; self.triangles.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for c in self.next[i].iter().flatten() {
                if !seen[c.to] {
                    seen[c.to] = true;
                    parent[c.to] = Some(*c);
                    queue.push_back(c.to);
                }
            }
        }
        parent
    }

    fn path_from_root(parent: &[Option<Crossing>], mut i: usize) -> Vec<Crossing> {
        let mut path = Vec::new();
        while let Some(c) = parent[i] {
            path.push(c);
            i = c.from;
        }
        path.reverse();
        path
    }

    /// Closed walks through each non-tree side, with shared prefixes of the
    /// two tree paths removed.
    fn fundamental_cycles(&self) -> Vec<Vec<Crossing>> {
        let parent = self.tree();
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for i in 0..self.triangles.len() {
            for c in self.next[i].iter().flatten() {
                let key = self.dual_edge(*c).0;
                if parent[c.to] == Some(*c)
                    || parent[c.from] == Some(c.reversed())
                    || !seen.insert(key)
                {
                    continue;
                }
                let mut down = Self::path_from_root(&parent, c.from);
                let mut up = Self::path_from_root(&parent, c.to);
                let shared = down.iter().zip(&up).take_while(|(a, b)| a == b).count();
                down.drain(..shared);
                up.drain(..shared);
                let mut walk = down;
                walk.push(*c);
                walk.extend(up.iter().rev().map(|x| x.reversed()));
                out.push(walk);
            }
        }
        out
    }

    /// Dual cycle around every vertex of the cusp triangulation.
    fn vertex_loops(&self) -> Vec<Vec<Crossing>> {
        let mut done = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for start in 0..self.triangles.len() {
            let (_, v) = self.triangles[start];
            for corner in (0..4u8).filter(|&c| c != v) {
                if done.contains(&(start, corner)) {
                    continue;
                }
                let others: Vec<u8> = (0..4u8).filter(|&c| c != v && c != corner).collect();
                let mut walk = Vec::new();
                let (mut tri, mut corner_here, mut exit) = (start, corner, others[1]);
                loop {
                    done.insert((tri, corner_here));
                    let c = self.crossing(tri, exit);
                    walk.push(c);
                    let (t2, _) = self.triangles[c.to];
                    let perm = self.perm(tri, exit);
                    corner_here = perm[corner_here as usize];
                    let v2 = self.triangles[c.to].1;
                    exit = (0..4u8)
                        .find(|&s| s != v2 && s != corner_here && s != c.to_side)
                        .unwrap();
                    tri = self.index[&(t2, v2)];
                    if tri == start && corner_here == corner {
                        break;
                    }
                }
                out.push(walk);
            }
        }
        out
    }

    fn perm(&self, tri: usize, side: u8) -> [u8; 4] {
        self.table[self.triangles[tri].0][side as usize].1
    }

    /// Signed use count of every side of the cusp triangulation.
    fn chain(&self, walk: &[Crossing], keys: &BTreeMap<(usize, u8), usize>) -> Vec<i64> {
        let mut v = vec![0; keys.len()];
        for &c in walk {
            let (key, dir) = self.dual_edge(c);
            v[keys[&key]] += dir;
        }
        v
    }

    /// Two shortest fundamental cycles independent modulo the vertex loops,
    /// and the other fundamental cycles.
    fn homology(&self) -> Result<(Vec<Vec<Crossing>>, Vec<Vec<Crossing>>)> {
        let mut keys = BTreeMap::new();
        for i in 0..self.triangles.len() {
            for c in self.next[i].iter().flatten() {
                let n = keys.len();
                keys.entry(self.dual_edge(*c).0).or_insert(n);
            }
        }
        let mut rows: Vec<Vec<i64>> = self
            .vertex_loops()
            .iter()
            .map(|w| self.chain(w, &keys))
            .collect();
        let mut rank = exact::rank(&exact::int_matrix(&rows));
        let mut cycles = self.fundamental_cycles();
        cycles.sort_by_key(|w| w.len());
        let mut basis = Vec::new();
        let mut others = Vec::new();
        for walk in cycles {
            if basis.len() < 2 {
                rows.push(self.chain(&walk, &keys));
                let r = exact::rank(&exact::int_matrix(&rows));
                if r > rank {
                    rank = r;
                    basis.push(walk);
                    continue;
                }
                rows.pop();
            }
            others.push(walk);
        }
        if basis.len() != 2 {
            return Err(Error::Invalid(format!(
                "cusp homology has rank {} instead of 2",
                basis.len()
            )));
        }
        Ok((basis, others))
    }
}

/// Homology generators of every cusp torus, with the other fundamental
/// cycles of the breadth-first spanning tree.
pub fn cusp_cycles(tri: &Triangulation) -> Result<Vec<CuspCycles>> {
    tri.cusp_links()?
        .into_iter()
        .map(|link| {
            if !link.is_torus() {
                return Err(Error::NotTorus(link.component, link.euler_characteristic));
            }
            let graph = CuspGraph::new(tri, link.triangles.clone())?;
            let (basis, others) = graph.homology()?;
            let [a, b]: [Vec<Crossing>; 2] = basis.try_into().expect("two cycles");
            Ok(CuspCycles {
                cusp: link.component,
                basis: [graph.turns(&a), graph.turns(&b)],
                others: others.iter().map(|w| graph.turns(w)).collect(),
            })
        })
        .collect()
}

/// Log-holonomy of a cycle: the signed sum of `log z` over its turns.
pub fn log_holonomy(cycle: &[Turn], shapes: &[TetShape]) -> Complex64 {
    cycle
        .iter()
        .map(|t| shapes[t.tet].by_pair[pair_of_edge(t.vertex, t.corner)].ln() * f64::from(t.sign))
        .sum()
}

/// Size of a log-holonomy once its imaginary part is reduced into
/// `(-pi, pi]`; loops around cusp vertices contribute multiples of `2 pi i`.
pub fn holonomy_residual(h: Complex64) -> f64 {
    let turns = (h.im / (2.0 * PI)).round();
    Complex64::new(h.re, h.im - 2.0 * PI * turns).norm()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspResidual {
    pub cusp: usize,
    /// Residuals of the two basis cycles.
    pub cycles: [f64; 2],
    pub residual: f64,
}

pub fn completeness_residuals(
    tri: &Triangulation,
    shapes: &[TetShape],
) -> Result<Vec<CuspResidual>> {
    Ok(cusp_cycles(tri)?
        .iter()
        .map(|c| cusp_residual(c, shapes))
        .collect())
}

pub fn cusp_residual(cycles: &CuspCycles, shapes: &[TetShape]) -> CuspResidual {
    let r = cycles
        .basis
        .clone()
        .map(|c| holonomy_residual(log_holonomy(&c, shapes)));
    CuspResidual {
        cusp: cycles.cusp,
        cycles: r,
        residual: r[0].max(r[1]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub edge: f64,
    pub cusp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            edge: 1e-9,
            cusp: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Geometric,
    Degenerate {
        reason: String,
        report: Option<BoundaryReport>,
    },
}

impl Verdict {
    pub fn is_geometric(&self) -> bool {
        matches!(self, Verdict::Geometric)
    }
}

pub fn verdict(
    result: &MaxResult,
    edges: &[EdgeResidual],
    cusps: &[CuspResidual],
    report: &BoundaryReport,
    tol: &Tolerances,
) -> Verdict {
    let degenerate = |reason: String| Verdict::Degenerate {
        reason,
        report: Some(report.clone()),
    };
    if !result.interior {
        return degenerate(report.summary.clone());
    }
    let edge = edges
        .iter()
        .map(|e| e.modulus.max(e.angle))
        .fold(0.0, f64::max);
    if edge > tol.edge {
        return degenerate(format!("edge residual {edge:.3e} above {:.1e}", tol.edge));
    }
    let cusp = cusps.iter().map(|c| c.residual).fold(0.0, f64::max);
    if cusp > tol.cusp {
        return degenerate(format!("cusp residual {cusp:.3e} above {:.1e}", tol.cusp));
    }
    Verdict::Geometric
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_and_square_shapes() {
        let third = PI / 3.0;
        let z = shape_from_triple(third, third, third);
        assert!((z - Complex64::from_polar(1.0, third)).norm() < 1e-15);
        let z = shape_from_triple(PI / 2.0, PI / 4.0, PI / 4.0);
        assert!((z - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn cyclic_orders() {
        assert_eq!(cyclic_order(1), [0, 1, 2]);
        assert_eq!(cyclic_order(-1), [0, 2, 1]);
    }

    #[test]
    fn residual_reduces_whole_turns() {
        assert!(holonomy_residual(Complex64::new(0.0, 2.0 * PI)) < 1e-15);
        assert!((holonomy_residual(Complex64::new(0.3, 0.4)) - 0.5).abs() < 1e-15);
    }
}
