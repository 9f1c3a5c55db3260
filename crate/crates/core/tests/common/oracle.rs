//! Test-only solver for the gluing equations, written against the raw gluing
//! table. It shares nothing with the optimizer: one complex unknown
//! `log z` per tetrahedron, every edge equation, and the holonomy of every
//! fundamental cycle of every cusp link. The overdetermined system is solved
//! in the least-squares sense by Levenberg-Marquardt.

use std::collections::VecDeque;
use std::f64::consts::PI;

use braidtri::triangulation::{parity, Perm, Triangulation};
use braidtri::volume::lobachevsky;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub struct OracleSolution {
    /// `z` on pair 0 of each tetrahedron.
    pub z: Vec<Complex64>,
    /// Dihedral angles per tetrahedron, indexed by opposite-edge pair.
    pub angles: Vec<[f64; 3]>,
    pub residual: f64,
    pub volume: f64,
}

fn pair(a: u8, b: u8) -> usize {
    match (a.min(b), a.max(b)) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        _ => 2,
    }
}

/// A linear form in the unknown logs: `(tet, pair, coefficient)` terms plus
/// the target multiple of `2 pi i`.
struct Equation {
    terms: Vec<(usize, usize, f64)>,
    edge: bool,
}

struct Setup {
    n: usize,
    sigma: Vec<i8>,
    equations: Vec<Equation>,
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let next = p[y];
        p[y] = r;
        y = next;
    }
    r
}

fn setup(tri: &Triangulation) -> Setup {
    let n = tri.len();
    let table: Vec<[(usize, Perm); 4]> = tri.gluing_table().unwrap();

    let mut sigma = vec![0i8; n];
    sigma[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        for &(u, perm) in &table[t] {
            if sigma[u] == 0 {
                sigma[u] = -sigma[t] * parity(&perm);
                queue.push_back(u);
            }
        }
    }

    // Edge slots `(tet, a, b)` with a < b, merged across every face gluing.
    let slot = |t: usize, a: u8, b: u8| 16 * t + 4 * a.min(b) as usize + a.max(b) as usize;
    let mut parent: Vec<usize> = (0..16 * n).collect();
    for t in 0..n {
        for f in 0..4u8 {
            let (u, perm) = table[t][f as usize];
            for a in 0..4u8 {
                for b in a + 1..4 {
                    if a != f && b != f {
                        let x = find(&mut parent, slot(t, a, b));
                        let y = find(&mut parent, slot(u, perm[a as usize], perm[b as usize]));
                        parent[x] = y;
                    }
                }
            }
        }
    }
    let mut equations: Vec<Equation> = Vec::new();
    let mut root_index = std::collections::BTreeMap::new();
    for t in 0..n {
        for a in 0..4u8 {
            for b in a + 1..4 {
                let r = find(&mut parent, slot(t, a, b));
                let k = *root_index.entry(r).or_insert_with(|| {
                    equations.push(Equation {
                        terms: vec![],
                        edge: true,
                    });
                    equations.len() - 1
                });
                equations[k].terms.push((t, pair(a, b), 1.0));
            }
        }
    }

    // Cusp link triangles `(t, v)`; side `f` of triangle (t, v) lies on face f.
    let mut seen = vec![[false; 4]; n];
    for t0 in 0..n {
        for v0 in 0..4u8 {
            if seen[t0][v0 as usize] {
                continue;
            }
            // BFS tree of this component; `via[t][v]` is (parent, side left from parent, side entered).
            let mut via: Vec<[Option<(usize, u8, u8, u8)>; 4]> = vec![[None; 4]; n];
            let mut order = vec![(t0, v0)];
            seen[t0][v0 as usize] = true;
            let mut q = VecDeque::from([(t0, v0)]);
            let mut non_tree = Vec::new();
            while let Some((t, v)) = q.pop_front() {
                for f in 0..4u8 {
                    if f == v {
                        continue;
                    }
                    let (u, perm) = table[t][f as usize];
                    let (w, g) = (perm[v as usize], perm[f as usize]);
                    if !seen[u][w as usize] {
                        seen[u][w as usize] = true;
                        via[u][w as usize] = Some((t, v, f, g));
                        order.push((u, w));
                        q.push_back((u, w));
                    } else if via[t][v as usize] != Some((u, w, g, f))
                        && via[u][w as usize] != Some((t, v, f, g))
                    {
                        non_tree.push((t, v, f, u, w, g));
                    }
                }
            }
            // Path from the root to a triangle, as crossings (from, side out, to, side in).
            let path = |mut t: usize, mut v: u8| {
                let mut steps = Vec::new();
                while let Some((pt, pv, f, g)) = via[t][v as usize] {
                    steps.push(((pt, pv), f, (t, v), g));
                    t = pt;
                    v = pv;
                }
                steps.reverse();
                steps
            };
            for &(t, v, f, u, w, g) in &non_tree {
                // Drop the stretch shared by both tree paths so the cycle never
                // leaves a triangle through the side it entered by.
                let (mut pa, mut pb) = (path(t, v), path(u, w));
                let shared = pa.iter().zip(&pb).take_while(|(x, y)| x == y).count();
                pa.drain(..shared);
                pb.drain(..shared);
                let mut crossings = pa;
                crossings.push(((t, v), f, (u, w), g));
                for ((a, av), out, (b, bv), inn) in pb.into_iter().rev() {
                    crossings.push(((b, bv), inn, (a, av), out));
                }
                // Visit each triangle with its entry and exit sides.
                let m = crossings.len();
                let mut terms = Vec::new();
                for i in 0..m {
                    let (_, _, (tt, vv), enter) = crossings[i];
                    let (_, exit, _, _) = crossings[(i + 1) % m];
                    assert_ne!(enter, exit, "cycle backtracks");
                    let corner = (0..4u8)
                        .find(|&c| c != vv && c != enter && c != exit)
                        .unwrap();
                    let sign = sigma[tt] * parity(&[vv, corner, enter, exit]);
                    terms.push((tt, pair(vv, corner), f64::from(sign)));
                }
                equations.push(Equation { terms, edge: false });
            }
        }
    }
    Setup {
        n,
        sigma,
        equations,
    }
}

/// Logs of the three parameters of a tetrahedron by pair, and their
/// derivatives with respect to `log z`.
fn logs(z: Complex64, sigma: i8) -> ([Complex64; 3], [Complex64; 3]) {
    let one = Complex64::new(1.0, 0.0);
    let (l0, d0) = (z.ln(), one);
    let (l1, d1) = ((one / (one - z)).ln(), z / (one - z));
    let (l2, d2) = ((one - one / z).ln(), one / (z - one));
    if sigma < 0 {
        ([l0, l1, l2], [d0, d1, d2])
    } else {
        ([l0, l2, l1], [d0, d2, d1])
    }
}

/// Multiples of `2 pi i` each equation must reach: one full turn for
/// edges, the nearest whole turn at the start for cusp cycles.
fn initial_targets(s: &Setup, w: &[Complex64]) -> Vec<f64> {
    let zero = vec![0.0; s.equations.len()];
    let (r, _) = evaluate(s, &zero, w);
    r.iter()
        .zip(&s.equations)
        .map(|(x, e)| {
            if e.edge {
                1.0
            } else {
                (x.im / (2.0 * PI)).round()
            }
        })
        .collect()
}

fn evaluate(s: &Setup, targets: &[f64], w: &[Complex64]) -> (Vec<Complex64>, DMatrix<Complex64>) {
    let zs: Vec<_> = w.iter().map(|x| x.exp()).collect();
    let ld: Vec<_> = (0..s.n).map(|t| logs(zs[t], s.sigma[t])).collect();
    let m = s.equations.len();
    let mut r = vec![Complex64::new(0.0, 0.0); m];
    let mut j = DMatrix::zeros(m, s.n);
    for (i, e) in s.equations.iter().enumerate() {
        for &(t, k, c) in &e.terms {
            r[i] += ld[t].0[k] * c;
            j[(i, t)] += ld[t].1[k] * c;
        }
        r[i] -= Complex64::new(0.0, 2.0 * PI * targets[i]);
    }
    (r, j)
}

fn norm(r: &[Complex64]) -> f64 {
    r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn positive(w: &[Complex64]) -> bool {
    w.iter().all(|x| x.im > 1e-9 && x.im < PI - 1e-9)
}

/// Solves starting from the shapes of an angle assignment, given per
/// tetrahedron by opposite-edge pair.
pub fn solve(tri: &Triangulation, start: &[[f64; 3]]) -> OracleSolution {
    let s = setup(tri);
    let mut w: Vec<Complex64> = start
        .iter()
        .zip(&s.sigma)
        .map(|(a, &sg)| {
            let (b, c) = if sg > 0 { (a[2], a[1]) } else { (a[1], a[2]) };
            Complex64::new((b.sin() / c.sin()).ln(), a[0])
        })
        .collect();
    let targets = initial_targets(&s, &w);
    let (mut r, mut jac) = evaluate(&s, &targets, &w);
    let floor = 1e-13 * (r.len() as f64).sqrt();
    let mut mu = 1e-3;
    for _ in 0..500 {
        if norm(&r) < floor {
            break;
        }
        // Levenberg-Marquardt on the real form of the complex system.
        let (m, n) = (r.len(), s.n);
        let mut a = DMatrix::<f64>::zeros(2 * m, 2 * n);
        let mut b = DVector::<f64>::zeros(2 * m);
        for i in 0..m {
            for k in 0..n {
                let x = jac[(i, k)];
                a[(i, k)] = x.re;
                a[(i, n + k)] = -x.im;
                a[(m + i, k)] = x.im;
                a[(m + i, n + k)] = x.re;
            }
            b[i] = -r[i].re;
            b[m + i] = -r[i].im;
        }
        let normal = a.transpose() * &a;
        let rhs = a.transpose() * &b;
        let before = norm(&r);
        loop {
            let damped = &normal + DMatrix::<f64>::identity(2 * n, 2 * n) * mu;
            let step = damped
                .cholesky()
                .expect("damped normal matrix is positive definite")
                .solve(&rhs);
            let trial: Vec<_> = (0..n)
                .map(|k| w[k] + Complex64::new(step[k], step[n + k]))
                .collect();
            if positive(&trial) {
                let (r2, j2) = evaluate(&s, &targets, &trial);
                if norm(&r2) < before {
                    w = trial;
                    r = r2;
                    jac = j2;
                    mu = (mu / 4.0).max(1e-15);
                    break;
                }
            }
            mu *= 4.0;
            if mu > 1e12 {
                assert!(
                    before < 1e-10,
                    "gluing-equation oracle stalled at residual {before:e}"
                );
                break;
            }
        }
        if mu > 1e12 {
            break;
        }
    }
    let angles: Vec<[f64; 3]> = (0..s.n)
        .map(|t| logs(w[t].exp(), s.sigma[t]).0.map(|l| l.im))
        .collect();
    let volume = angles.iter().flatten().map(|&a| lobachevsky(a)).sum();
    OracleSolution {
        z: w.iter().map(|x| x.exp()).collect(),
        angles,
        residual: norm(&r),
        volume,
    }
}
