//! The Lobachevsky function, the volume functional on angle structures, and
//! its maximization by Newton's method in reduced coordinates.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::angles::{
    find_interior_point, is_positive_structure, support_face, symmetrize, ConstraintSystem,
};
use crate::error::{Error, Result};
use crate::exact::{self, q, to_f64, Matrix, Q};
use crate::par;
use crate::veering::Involution;

const SERIES_TERMS: usize = 40;

/// Coefficients `c_k = |B_2k| / (2 (2k)! k (2k+1))` of the expansion
/// `Cl2(t) = t - t ln|t| + sum_k c_k t^(2k+1)`, valid for `|t| < 2 pi`.
fn clausen_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut bernoulli: Vec<Q> = vec![q(1)];
        for m in 1..=2 * SERIES_TERMS {
            let mut binom = BigInt::one();
            let mut acc = Q::zero();
            for (j, b) in bernoulli.iter().enumerate() {
                acc += Q::from_integer(binom.clone()) * b;
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            bernoulli.push(-acc / Q::from_integer(BigInt::from(m + 1)));
        }
        let mut factorial = BigInt::one();
        (1..=SERIES_TERMS)
            .map(|k| {
                factorial *= BigInt::from((2 * k - 1) * (2 * k));
                let denom = Q::from_integer(&factorial * BigInt::from(2 * k * (2 * k + 1)));
                to_f64(&(bernoulli[2 * k].abs() / denom))
            })
            .collect()
    })
}

/// Clausen's `Cl2` on `[-pi, pi]`.
fn clausen2(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let s = t * t;
    let series = clausen_coefficients()
        .iter()
        .rev()
        .fold(0.0, |acc, c| (acc + c) * s);
    t - t * t.abs().ln() + t * series
}

/// `Λ(x) = -∫_0^x log|2 sin t| dt`, evaluated as `Cl2(2x) / 2` after
/// reducing `x` into `[-pi/2, pi/2]`.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let r = x - PI * (x / PI).round();
    0.5 * clausen2(2.0 * r)
}

/// Sum of `Λ` over all slots, without any feasibility check.
pub fn volume_of(theta: &[f64]) -> f64 {
    theta.iter().map(|&x| lobachevsky(x)).sum()
}

/// Largest allowed equality violation for [`volume`].
pub const EQUALITY_TOL: f64 = 1e-9;

/// Volume of an angle vector in the closed polytope.
pub fn volume(cs: &ConstraintSystem, theta: &[f64]) -> Result<f64> {
    cs.check_dimension(theta)?;
    let residual = cs.residual(theta);
    if residual > EQUALITY_TOL {
        return Err(Error::Infeasible(residual));
    }
    if let Some(x) = theta
        .iter()
        .find(|&&x| !(-EQUALITY_TOL..=PI + EQUALITY_TOL).contains(&x))
    {
        return Err(Error::Domain(format!("angle {x} lies outside [0, pi]")));
    }
    Ok(volume_of(theta))
}

/// Largest entry of `|A v|`.
fn tangent_residual(cs: &ConstraintSystem, v: &[f64]) -> f64 {
    cs.rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(v)
                .map(|(&c, x)| c as f64 * x)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
}

/// Derivative of the volume at `theta` along the tangent direction `v`.
pub fn directional_derivative(cs: &ConstraintSystem, theta: &[f64], v: &[f64]) -> Result<f64> {
    cs.check_dimension(theta)?;
    cs.check_dimension(v)?;
    if let Some(x) = theta.iter().find(|&&x| !(x > 0.0 && x < PI)) {
        return Err(Error::Boundary(format!(
            "angle {x} is not strictly inside (0, pi)"
        )));
    }
    let scale = v.iter().fold(1.0, |m: f64, x| m.max(x.abs()));
    let residual = tangent_residual(cs, v);
    if residual > EQUALITY_TOL * scale {
        return Err(Error::NotTangent(residual));
    }
    Ok(theta
        .iter()
        .zip(v)
        .map(|(&x, &d)| -d * (2.0 * x.sin()).ln())
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxOptions {
    /// Stop once the reduced gradient norm is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// An iterate whose smallest angle drops to this is on the boundary.
    pub boundary_tol: f64,
    /// Closeness to `(0, 0, pi)` for a tetrahedron to count as flat.
    pub flat_tol: f64,
}

impl Default for MaxOptions {
    fn default() -> Self {
        MaxOptions {
            tol: 1e-12,
            max_iter: 200,
            boundary_tol: 1e-10,
            flat_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxResult {
    pub theta: Vec<f64>,
    pub volume: f64,
    pub interior: bool,
    pub min_angle: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub flat_tets: Vec<String>,
    /// Columns that vanish on the whole closed polytope; empty when it has
    /// interior points.
    pub zero_columns: Vec<usize>,
    /// Volume after each accepted step, starting with the initial point.
    pub volume_trace: Vec<f64>,
}

/// Affine slice `base + W t` of the columns in `support`, with `W`
/// orthonormal and spanning the exact nullspace of those columns.
struct Reduced<'a> {
    support: &'a [usize],
    base: Vec<f64>,
    w: DMatrix<f64>,
}

impl Reduced<'_> {
    fn new<'a>(cs: &ConstraintSystem, support: &'a [usize], base: Vec<f64>) -> Reduced<'a> {
        let a = cs.a();
        let sub: Matrix = a
            .iter()
            .map(|r| support.iter().map(|&j| r[j].clone()).collect())
            .collect();
        let null = exact::nullspace(&sub, support.len());
        let w = if null.is_empty() {
            DMatrix::zeros(support.len(), 0)
        } else {
            DMatrix::from_fn(support.len(), null.len(), |i, j| to_f64(&null[j][i]))
                .qr()
                .q()
        };
        Reduced { support, base, w }
    }

    fn point(&self, t: &DVector<f64>) -> Vec<f64> {
        let step = &self.w * t;
        let mut theta = self.base.clone();
        for (i, &c) in self.support.iter().enumerate() {
            theta[c] += step[i];
        }
        theta
    }
}

/// Largest step along `delta` keeping 1% of the distance to the box, capped
/// at 1, and whether the cap was the boundary.
fn step_length(red: &Reduced, sub: &[f64], delta: &DVector<f64>) -> Option<(f64, bool)> {
    let dir = &red.w * delta;
    let room = sub
        .iter()
        .zip(dir.iter())
        .map(|(&x, &s)| {
            if s < 0.0 {
                x / -s
            } else if s > 0.0 {
                (PI - x) / s
            } else {
                f64::INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min);
    let alpha = 0.99 * room;
    (alpha > 0.0).then_some((alpha.min(1.0), alpha < 1.0))
}

/// Accepted reduced coordinates, angles and volume.
type Step = (DVector<f64>, Vec<f64>, f64);

/// Armijo backtracking; rounding-level changes are accepted once the
/// predicted gain is itself at rounding level.
fn backtrack(
    red: &Reduced,
    t: &DVector<f64>,
    delta: &DVector<f64>,
    mut alpha: f64,
    v: f64,
    slope: f64,
    noise: f64,
) -> Option<Step> {
    while alpha >= 1e-30 {
        let cand_t = t + alpha * delta;
        let cand = red.point(&cand_t);
        let cv = volume_of(&cand);
        if cv >= v + 1e-4 * alpha * slope || (alpha * slope <= noise && cv >= v - noise) {
            return Some((cand_t, cand, cv));
        }
        alpha *= 0.5;
    }
    None
}

struct Run {
    theta: Vec<f64>,
    grad_norm: f64,
    iterations: usize,
    trace: Vec<f64>,
}

fn newton(red: &Reduced, opts: &MaxOptions) -> Result<Run> {
    let d = red.w.ncols();
    let mut t = DVector::zeros(d);
    let mut theta = red.base.clone();
    let mut v = volume_of(&theta);
    let mut trace = vec![v];
    let mut iterations = 0;
    loop {
        let sub: Vec<f64> = red.support.iter().map(|&c| theta[c]).collect();
        let g = DVector::from_iterator(sub.len(), sub.iter().map(|&x| -(2.0 * x.sin()).ln()));
        let grad = red.w.tr_mul(&g);
        let grad_norm = grad.norm();
        let smallest = sub.iter().copied().fold(f64::INFINITY, f64::min);
        if grad_norm <= opts.tol || d == 0 || smallest <= opts.boundary_tol {
            return Ok(Run {
                theta,
                grad_norm,
                iterations,
                trace,
            });
        }
        if iterations == opts.max_iter {
            return Err(Error::IterationCap(opts.max_iter));
        }
        let mut scaled = red.w.clone();
        for (i, &x) in sub.iter().enumerate() {
            scaled.row_mut(i).scale_mut(1.0 / x.tan());
        }
        let hessian = red.w.tr_mul(&scaled);
        let newton_step = hessian
            .cholesky()
            .map_or_else(|| grad.clone(), |c| c.solve(&grad));
        let noise = 64.0 * f64::EPSILON * v.abs().max(1.0);
        let mut best = None;
        let mut truncated = false;
        if let Some((alpha, cut)) = step_length(red, &sub, &newton_step) {
            truncated = cut;
            best = backtrack(
                red,
                &t,
                &newton_step,
                alpha,
                v,
                grad.dot(&newton_step),
                noise,
            );
        }
        // Boundary-truncated or rejected Newton steps also try the gradient
        // direction; the better point is kept.
        if truncated || best.is_none() {
            if let Some((alpha, _)) = step_length(red, &sub, &grad) {
                let other = backtrack(red, &t, &grad, alpha, v, grad.dot(&grad), noise);
                if other.as_ref().map(|o| o.2) > best.as_ref().map(|b: &Step| b.2) {
                    best = other;
                }
            }
        }
        let Some((next_t, next_theta, next_v)) = best else {
            return Ok(Run {
                theta,
                grad_norm,
                iterations,
                trace,
            });
        };
        t = next_t;
        theta = next_theta;
        v = next_v;
        trace.push(v);
        iterations += 1;
    }
}

/// Names of tetrahedra whose angles are within `tol` of `(0, 0, pi)` in
/// some order.
pub fn flat_tets(cs: &ConstraintSystem, theta: &[f64], tol: f64) -> Vec<String> {
    cs.tet_names
        .iter()
        .enumerate()
        .filter(|&(t, _)| {
            let mut a = [theta[3 * t], theta[3 * t + 1], theta[3 * t + 2]];
            a.sort_by(f64::total_cmp);
            a[0].abs() <= tol && a[1].abs() <= tol && (a[2] - PI).abs() <= tol
        })
        .map(|(_, n)| n.clone())
        .collect()
}

fn finish(
    cs: &ConstraintSystem,
    run: Run,
    zero_columns: Vec<usize>,
    opts: &MaxOptions,
) -> MaxResult {
    let min_angle = run.theta.iter().copied().fold(f64::INFINITY, f64::min);
    let interior =
        zero_columns.is_empty() && min_angle > opts.boundary_tol && run.grad_norm <= opts.tol;
    MaxResult {
        volume: volume_of(&run.theta),
        flat_tets: flat_tets(cs, &run.theta, opts.flat_tol),
        theta: run.theta,
        interior,
        min_angle,
        grad_norm: run.grad_norm,
        iterations: run.iterations,
        zero_columns,
        volume_trace: run.trace,
    }
}

/// Maximizes the volume starting from the LP's max-slack point, averaged
/// with its image under `inv` when given. If the open polytope is empty the
/// search runs on the face of the closed polytope carrying its relative
/// interior, and the result is reported as not interior.
pub fn maximize(
    cs: &ConstraintSystem,
    inv: Option<&Involution>,
    opts: &MaxOptions,
) -> Result<MaxResult> {
    let ip = find_interior_point(cs);
    if ip.feasible {
        let start = match inv {
            Some(inv) => symmetrize(&ip.theta, cs, inv)?,
            None => ip.theta,
        };
        return maximize_from(cs, &start, opts);
    }
    let face = support_face(cs).ok_or_else(|| {
        Error::EmptyPolytope(ip.certificate.map(|c| c.explanation).unwrap_or_default())
    })?;
    let support: Vec<usize> = (0..cs.n_cols())
        .filter(|c| !face.zero_columns.contains(c))
        .collect();
    let red = Reduced::new(cs, &support, face.point());
    let run = newton(&red, opts)?;
    Ok(finish(cs, run, face.zero_columns, opts))
}

/// Maximizes the volume from a given positive structure.
pub fn maximize_from(cs: &ConstraintSystem, start: &[f64], opts: &MaxOptions) -> Result<MaxResult> {
    cs.check_dimension(start)?;
    if !is_positive_structure(cs, start, EQUALITY_TOL) {
        return Err(Error::Boundary(
            "the starting point is not a positive angle structure".into(),
        ));
    }
    let support: Vec<usize> = (0..cs.n_cols()).collect();
    let red = Reduced::new(cs, &support, start.to_vec());
    let run = newton(&red, opts)?;
    Ok(finish(cs, run, Vec::new(), opts))
}

/// Random positive structures: the LP point moved a random fraction of the
/// way to the boundary along a random tangent direction. Start `i` draws
/// from stream `i` of a ChaCha generator seeded with `seed`.
pub fn random_interior_points(
    cs: &ConstraintSystem,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let ip = find_interior_point(cs);
    if !ip.feasible {
        return Err(Error::EmptyPolytope("no positive angle structure".into()));
    }
    let support: Vec<usize> = (0..cs.n_cols()).collect();
    let red = Reduced::new(cs, &support, ip.theta);
    Ok((0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let c = DVector::from_fn(red.w.ncols(), |_, _| rng.gen_range(-1.0..1.0));
            let dir = &red.w * &c;
            let room = red
                .base
                .iter()
                .zip(dir.iter())
                .map(|(&x, &s)| {
                    if s < 0.0 {
                        x / -s
                    } else if s > 0.0 {
                        (PI - x) / s
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(f64::INFINITY, f64::min);
            let frac: f64 = rng.gen_range(0.05..0.95);
            red.point(&(c * (frac * room).min(1e6)))
        })
        .collect())
}

/// Maximizes from `starts` random interior points, in parallel when enabled.
pub fn multistart(
    cs: &ConstraintSystem,
    starts: usize,
    seed: u64,
    opts: &MaxOptions,
) -> Result<Vec<MaxResult>> {
    let points = random_interior_points(cs, starts, seed)?;
    par::map(&points, |p| maximize_from(cs, p, opts))
        .into_iter()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub interior: bool,
    pub volume: f64,
    pub flat_tets: Vec<String>,
    /// Slots whose angle is within the flatness tolerance of 0.
    pub zero_slots: Vec<String>,
    /// For a boundary maximizer: whether every tetrahedron is flat and the
    /// volume vanishes, as a maximizer on the boundary would force.
    pub cascade: Option<bool>,
    pub summary: String,
}

pub fn boundary_diagnosis(
    cs: &ConstraintSystem,
    result: &MaxResult,
    opts: &MaxOptions,
) -> BoundaryReport {
    let zero_slots: Vec<String> = result
        .theta
        .iter()
        .enumerate()
        .filter(|(_, &x)| x <= opts.flat_tol)
        .map(|(c, _)| cs.column_name(c))
        .collect();
    let cascade = (!result.interior).then(|| {
        result.flat_tets.len() == cs.tet_names.len() && result.volume.abs() <= opts.flat_tol
    });
    let summary = if result.interior {
        "interior, no flat tets".to_string()
    } else {
        format!(
            "boundary: {} flat of {} tets, {} zero slots, volume {:.3e}",
            result.flat_tets.len(),
            cs.tet_names.len(),
            zero_slots.len(),
            result.volume
        )
    };
    BoundaryReport {
        interior: result.interior,
        volume: result.volume,
        flat_tets: result.flat_tets.clone(),
        zero_slots,
        cascade,
        summary,
    }
}
