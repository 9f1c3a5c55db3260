//! The linear angle-structure polytope of a closed triangulation.
//!
//! Column `3t + j` holds the angle of tetrahedron `t` on the opposite-edge
//! pair `slot_pair[t][j]`. Right-hand sides are stored in units of pi.

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, q, to_f64, Matrix, Q};
use crate::lp::{maximize, LpOutcome};
use crate::tau::build_tau;
use crate::triangulation::{edges_of_pair, Triangulation};
use crate::veering::{assign_veering, pair_roles, Involution, ROLES};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintSystem {
    pub tet_names: Vec<String>,
    pub slot_pair: Vec<[usize; 3]>,
    pub slot_labels: Vec<[String; 3]>,
    /// Tetrahedron rows first, then one row per edge class.
    pub rows: Vec<Vec<i64>>,
    pub rhs_pi: Vec<i64>,
    pub n_tet_rows: usize,
}

fn pair_label(k: usize) -> String {
    let [(a, b), (c, d)] = edges_of_pair(k);
    format!("{a}{b}|{c}{d}")
}

/// Constraints with the generic slot order: pairs `01|23`, `02|13`, `03|12`.
pub fn build_constraints(tri: &Triangulation) -> Result<ConstraintSystem> {
    let n = tri.len();
    build_constraints_with(tri, vec![[0, 1, 2]; n], vec![[0, 1, 2].map(pair_label); n])
}

pub fn build_constraints_with(
    tri: &Triangulation,
    slot_pair: Vec<[usize; 3]>,
    slot_labels: Vec<[String; 3]>,
) -> Result<ConstraintSystem> {
    let n = tri.len();
    if slot_pair.len() != n || slot_labels.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: slot_pair.len(),
        });
    }
    let classes = tri.edge_classes()?;
    let mut column = vec![[0usize; 3]; n];
    for (t, pairs) in slot_pair.iter().enumerate() {
        let mut seen = [false; 3];
        for (j, &k) in pairs.iter().enumerate() {
            if k > 2 || seen[k] {
                return Err(Error::Invalid(format!(
                    "slot order of tetrahedron {t} is not a permutation"
                )));
            }
            seen[k] = true;
            column[t][k] = 3 * t + j;
        }
    }
    let mut rows = Vec::with_capacity(n + classes.len());
    let mut rhs_pi = Vec::with_capacity(n + classes.len());
    for t in 0..n {
        let mut row = vec![0i64; 3 * n];
        row[3 * t..3 * t + 3].fill(1);
        rows.push(row);
        rhs_pi.push(1);
    }
    for class in &classes {
        let mut row = vec![0i64; 3 * n];
        for m in &class.members {
            row[column[m.tet][m.pair()]] += 1;
        }
        rows.push(row);
        rhs_pi.push(2);
    }
    Ok(ConstraintSystem {
        tet_names: tri.tets().iter().map(|t| t.name.clone()).collect(),
        slot_pair,
        slot_labels,
        rows,
        rhs_pi,
        n_tet_rows: n,
    })
}

/// `build_tau(p)` with its slots ordered R, B, D by the veering structure.
pub fn tau_constraints(p: usize) -> Result<(Triangulation, ConstraintSystem)> {
    let tri = build_tau(p)?;
    let roles = pair_roles(&tri, &assign_veering(&tri)?)?;
    let slot_pair: Vec<[usize; 3]> = roles
        .iter()
        .map(|r| ROLES.map(|want| r.iter().position(|&x| x == want).unwrap()))
        .collect();
    let labels = vec![ROLES.map(|r| r.symbol().to_string()); tri.len()];
    let cs = build_constraints_with(&tri, slot_pair, labels)?;
    Ok((tri, cs))
}

impl ConstraintSystem {
    pub fn n_cols(&self) -> usize {
        3 * self.tet_names.len()
    }

    pub fn edge_rows(&self) -> &[Vec<i64>] {
        &self.rows[self.n_tet_rows..]
    }

    pub fn column(&self, tet: usize, pair: usize) -> usize {
        3 * tet + self.slot_pair[tet].iter().position(|&k| k == pair).unwrap()
    }

    pub fn column_name(&self, c: usize) -> String {
        format!(
            "{}:{}",
            self.tet_names[c / 3],
            self.slot_labels[c / 3][c % 3]
        )
    }

    pub fn a(&self) -> Matrix {
        exact::int_matrix(&self.rows)
    }

    pub fn b(&self) -> Vec<Q> {
        self.rhs_pi.iter().map(|&x| q(x)).collect()
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.rhs_pi
            .iter()
            .map(|&x| x as f64 * std::f64::consts::PI)
            .collect()
    }

    pub fn rank(&self) -> usize {
        exact::rank(&self.a())
    }

    /// Dimension of the affine solution space of the equalities.
    pub fn solution_dimension(&self) -> usize {
        self.n_cols() - self.rank()
    }

    /// Exact basis of `{v : A v = 0}`.
    pub fn tangent_basis(&self) -> Matrix {
        exact::nullspace(&self.a(), self.n_cols())
    }

    /// Largest absolute equality violation, in radians.
    pub fn residual(&self, theta: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(self.rhs())
            .map(|(r, b)| (r.iter().zip(theta).map(|(&c, x)| c as f64 * x).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_dimension(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_cols() {
            return Err(Error::Dimension {
                expected: self.n_cols(),
                got: theta.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// Multipliers for the rows of the constraint system.
    pub row_weights: Vec<String>,
    /// The combined row `weights^T A`, which is nonnegative.
    pub combined_row: Vec<String>,
    /// `weights^T b` in units of pi; nonpositive (or negative when even the
    /// closed polytope is empty).
    pub combined_rhs_pi: String,
    pub explanation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InteriorPoint {
    pub feasible: bool,
    /// Angles in radians.
    pub theta: Vec<f64>,
    /// Angles divided by pi, exact.
    #[serde(serialize_with = "serialize_q_vec")]
    pub theta_pi: Vec<Q>,
    /// `min(theta_i, pi - theta_i)` over all slots, in radians.
    pub min_slack: f64,
    /// Exact smallest angle over pi.
    #[serde(serialize_with = "serialize_q")]
    pub min_angle_pi: Q,
    /// For a feasible system, weights whose combined row is nonnegative with
    /// entries summing to 1; its right-hand side bounds every structure's
    /// smallest angle and equals `min_angle_pi` at the optimum.
    pub optimality: Option<Certificate>,
    /// For an infeasible system, the reason no positive structure exists.
    pub certificate: Option<Certificate>,
}

fn serialize_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn serialize_q_vec<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn certificate(cs: &ConstraintSystem, weights: &[Q], explanation: &str) -> Certificate {
    let a = cs.a();
    let n = cs.n_cols();
    let combined: Vec<Q> = (0..n)
        .map(|j| weights.iter().zip(&a).map(|(w, r)| w * &r[j]).sum())
        .collect();
    let rhs: Q = weights.iter().zip(cs.b()).map(|(w, b)| w * b).sum();
    Certificate {
        row_weights: weights.iter().map(|w| w.to_string()).collect(),
        combined_row: combined.iter().map(|w| w.to_string()).collect(),
        combined_rhs_pi: rhs.to_string(),
        explanation: explanation.to_string(),
    }
}

/// Result of maximizing the smallest angle over the columns in `support`,
/// with every other column held at zero.
enum MaxMin {
    Optimal {
        theta_pi: Vec<Q>,
        value: Q,
        duals: Vec<Q>,
    },
    Empty {
        farkas: Vec<Q>,
    },
}

/// Writing `theta = y + t` on the support with `y >= 0` and `t` free turns
/// the problem into a standard-form LP.
fn max_min(cs: &ConstraintSystem, support: &[usize]) -> MaxMin {
    let n = cs.n_cols();
    let a = cs.a();
    let b = cs.b();
    let row_sum: Vec<Q> = cs
        .rows
        .iter()
        .map(|r| q(support.iter().map(|&j| r[j]).sum()))
        .collect();
    let lp_a: Matrix = a
        .iter()
        .zip(&row_sum)
        .map(|(r, s)| {
            support
                .iter()
                .map(|&j| r[j].clone())
                .chain([s.clone(), -s.clone()])
                .collect()
        })
        .collect();
    let k = support.len();
    let mut c = vec![q(0); k + 2];
    c[k] = q(1);
    c[k + 1] = q(-1);
    match maximize(&lp_a, &b, &c) {
        LpOutcome::Optimal { x, value, duals } => {
            let mut theta_pi = vec![q(0); n];
            for (i, &j) in support.iter().enumerate() {
                theta_pi[j] = &x[i] + &value;
            }
            MaxMin::Optimal {
                theta_pi,
                value,
                duals,
            }
        }
        LpOutcome::Infeasible { farkas } => MaxMin::Empty { farkas },
        LpOutcome::Unbounded => unreachable!("tetrahedron rows bound every angle"),
    }
}

fn smallest_slack(theta_pi: &[Q]) -> Q {
    theta_pi
        .iter()
        .map(|v| {
            let other = q(1) - v;
            if *v < other {
                v.clone()
            } else {
                other
            }
        })
        .min()
        .unwrap_or_else(|| q(0))
}

/// Maximizes the smallest angle over the polytope.
pub fn find_interior_point(cs: &ConstraintSystem) -> InteriorPoint {
    let empty = |cert| InteriorPoint {
        feasible: false,
        theta: vec![],
        theta_pi: vec![],
        min_slack: 0.0,
        min_angle_pi: q(0),
        optimality: None,
        certificate: Some(cert),
    };
    let all: Vec<usize> = (0..cs.n_cols()).collect();
    match max_min(cs, &all) {
        MaxMin::Optimal { theta_pi, value, duals } => {
            if !value.is_positive() {
                return empty(certificate(
                    cs,
                    &duals,
                    "the combined row has nonnegative coefficients, not all zero, but a nonpositive right-hand side, so some angle must be 0 or less",
                ));
            }
            let pi = std::f64::consts::PI;
            let theta: Vec<f64> = theta_pi.iter().map(|v| to_f64(v) * pi).collect();
            let min_slack = to_f64(&smallest_slack(&theta_pi)) * pi;
            let optimality = certificate(cs, &duals, "no structure has a smallest angle above the combined right-hand side");
            InteriorPoint {
                feasible: true,
                theta,
                theta_pi,
                min_slack,
                min_angle_pi: value,
                optimality: Some(optimality),
                certificate: None,
            }
        }
        MaxMin::Empty { farkas } => empty(certificate(
            cs,
            &farkas,
            "the combined row has nonnegative coefficients but a negative right-hand side, so no nonnegative angles exist",
        )),
    }
}

/// The smallest face of the closed polytope containing every structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Face {
    /// Columns that vanish on the whole closed polytope.
    pub zero_columns: Vec<usize>,
    /// A point whose other columns are all positive, over pi.
    #[serde(serialize_with = "serialize_q_vec")]
    pub point_pi: Vec<Q>,
}

impl Face {
    pub fn point(&self) -> Vec<f64> {
        self.point_pi
            .iter()
            .map(|v| to_f64(v) * std::f64::consts::PI)
            .collect()
    }
}

/// Finds the face by repeatedly maximizing the smallest angle among the
/// columns not yet known to vanish. When the optimum is zero, every column
/// with a positive entry in the dual's combined row is zero throughout the
/// polytope. Returns `None` when the closed polytope is empty.
pub fn support_face(cs: &ConstraintSystem) -> Option<Face> {
    let mut support: Vec<usize> = (0..cs.n_cols()).collect();
    let mut zero_columns = Vec::new();
    loop {
        if support.is_empty() {
            return None;
        }
        match max_min(cs, &support) {
            MaxMin::Empty { .. } => return None,
            MaxMin::Optimal {
                theta_pi,
                value,
                duals,
            } => {
                if value.is_positive() {
                    zero_columns.sort_unstable();
                    return Some(Face {
                        zero_columns,
                        point_pi: theta_pi,
                    });
                }
                let forced: Vec<usize> = support
                    .iter()
                    .copied()
                    .filter(|&j| {
                        cs.rows
                            .iter()
                            .zip(&duals)
                            .map(|(r, u)| u * q(r[j]))
                            .sum::<Q>()
                            .is_positive()
                    })
                    .collect();
                debug_assert!(!forced.is_empty());
                support.retain(|j| !forced.contains(j));
                zero_columns.extend(forced);
            }
        }
    }
}

/// Image of each column under `inv`.
pub fn column_permutation(cs: &ConstraintSystem, inv: &Involution) -> Result<Vec<usize>> {
    let n = cs.tet_names.len();
    if inv.tet_map.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: inv.tet_map.len(),
        });
    }
    let mut perm = vec![0; 3 * n];
    for t in 0..n {
        for j in 0..3 {
            let k = cs.slot_pair[t][j];
            perm[3 * t + j] = cs.column(inv.tet_map[t], inv.pair_image(t, k));
        }
    }
    Ok(perm)
}

/// `(iota theta)` at the image of a slot equals `theta` at the slot.
pub fn apply_involution(
    theta: &[f64],
    cs: &ConstraintSystem,
    inv: &Involution,
) -> Result<Vec<f64>> {
    cs.check_dimension(theta)?;
    let perm = column_permutation(cs, inv)?;
    let mut out = vec![0.0; theta.len()];
    for (c, &x) in theta.iter().enumerate() {
        out[perm[c]] = x;
    }
    Ok(out)
}

pub fn symmetrize(theta: &[f64], cs: &ConstraintSystem, inv: &Involution) -> Result<Vec<f64>> {
    let image = apply_involution(theta, cs, inv)?;
    Ok(theta
        .iter()
        .zip(image)
        .map(|(a, b)| 0.5 * (a + b))
        .collect())
}

/// True if permuting columns by `perm` maps the set of rows (with their
/// right-hand sides) onto itself.
pub fn rows_invariant(cs: &ConstraintSystem, perm: &[usize]) -> bool {
    let key = |rows: Vec<(Vec<i64>, i64)>| {
        let mut rows = rows;
        rows.sort();
        rows
    };
    let original: Vec<(Vec<i64>, i64)> = cs
        .rows
        .iter()
        .cloned()
        .zip(cs.rhs_pi.iter().copied())
        .collect();
    let moved: Vec<(Vec<i64>, i64)> = original
        .iter()
        .map(|(r, b)| {
            let mut out = vec![0; r.len()];
            for (c, &x) in r.iter().enumerate() {
                out[perm[c]] = x;
            }
            (out, *b)
        })
        .collect();
    key(original) == key(moved)
}

/// One line per slot: tetrahedron, slot label, radians, multiple of pi.
pub fn to_csv(cs: &ConstraintSystem, theta: &[f64]) -> Result<String> {
    cs.check_dimension(theta)?;
    let mut out = String::from("tet,slot,radians,over_pi\n");
    for (c, x) in theta.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{:.15},{:.15}\n",
            cs.tet_names[c / 3],
            cs.slot_labels[c / 3][c % 3],
            x,
            x / std::f64::consts::PI
        ));
    }
    Ok(out)
}

/// Checks that `theta` satisfies the equalities to `tol` and every
/// coordinate lies strictly inside `(0, pi)`.
pub fn is_positive_structure(cs: &ConstraintSystem, theta: &[f64], tol: f64) -> bool {
    theta.len() == cs.n_cols()
        && cs.residual(theta) <= tol
        && theta.iter().all(|&x| x > 0.0 && x < std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_one_shape() {
        let (_, cs) = tau_constraints(1).unwrap();
        assert_eq!(cs.n_cols(), 9);
        assert_eq!(cs.rows.len(), 6);
        for c in 0..9 {
            let col: Vec<i64> = cs.rows.iter().map(|r| r[c]).collect();
            assert_eq!(col[..3].iter().sum::<i64>(), 1);
            assert_eq!(col[3..].iter().sum::<i64>(), 2);
        }
    }

    #[test]
    fn tau_one_interior_point() {
        let (_, cs) = tau_constraints(1).unwrap();
        let ip = find_interior_point(&cs);
        assert!(ip.feasible);
        assert!(ip.min_slack > 0.0);
        assert!(cs.residual(&ip.theta) <= 1e-12);
        assert_eq!(exact::mat_vec(&cs.a(), &ip.theta_pi)[0], q(1));
    }

    #[test]
    fn csv_has_one_line_per_slot() {
        let (_, cs) = tau_constraints(2).unwrap();
        let ip = find_interior_point(&cs);
        let csv = to_csv(&cs, &ip.theta).unwrap();
        assert_eq!(csv.lines().count(), 1 + 15);
        assert!(csv.lines().nth(1).unwrap().starts_with("w0',R,"));
    }
}
