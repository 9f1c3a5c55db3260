//! Exact two-phase simplex for `max c.x` subject to `A x = b`, `x >= 0`.

use crate::exact::{lower, tiered, Exact, Matrix, TieredFn, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    /// `duals` satisfy `duals^T A >= c` componentwise with equality on the support of `x`.
    Optimal {
        x: Vec<Q>,
        value: Q,
        duals: Vec<Q>,
    },
    /// `y^T A >= 0` and `y^T b < 0`, so no nonnegative solution exists.
    Infeasible {
        farkas: Vec<Q>,
    },
    Unbounded,
}

/// Consecutive degenerate pivots tolerated before switching from Dantzig's
/// rule to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

struct Tableau<T> {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    t: Vec<Vec<T>>,
    basis: Vec<usize>,
    m: usize,
    max_pivots: usize,
}

impl<T: Exact> Tableau<T> {
    fn width(&self) -> usize {
        self.t[0].len()
    }

    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let inv = T::one().div(&self.t[r][c])?;
        let support: Vec<usize> = (0..self.width())
            .filter(|&j| !self.t[r][j].is_zero())
            .collect();
        for &j in &support {
            self.t[r][j] = self.t[r][j].mul(&inv)?;
        }
        for i in 0..=self.m {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for &j in &support {
                let d = f.mul(&self.t[r][j])?;
                self.t[i][j] = self.t[i][j].sub(&d)?;
            }
        }
        self.basis[r] = c;
        Some(())
    }

    /// Maximizes with reduced costs in the objective row (positive entries
    /// improve). Columns `>= allowed` never enter. Stops early once the
    /// objective reaches `ceiling` zero if `zero_ceiling` is set. Returns
    /// `Some(false)` if unbounded, `None` on overflow or pivot exhaustion.
    fn run(&mut self, allowed: usize, zero_ceiling: bool) -> Option<bool> {
        let rhs = self.width() - 1;
        let mut degenerate = 0;
        for _ in 0..self.max_pivots {
            if zero_ceiling && self.t[self.m][rhs].is_zero() {
                return Some(true);
            }
            let obj = &self.t[self.m];
            let entering = if degenerate < DEGENERATE_LIMIT {
                (0..allowed).filter(|&j| obj[j].is_positive()).fold(
                    None,
                    |best: Option<usize>, j| match best {
                        Some(b) if obj[b] >= obj[j] => Some(b),
                        _ => Some(j),
                    },
                )
            } else {
                (0..allowed).find(|&j| obj[j].is_positive())
            };
            let Some(c) = entering else { return Some(true) };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                if !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = self.t[i][rhs].div(&self.t[i][c])?;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return Some(false);
            };
            degenerate = if ratio.is_zero() { degenerate + 1 } else { 0 };
            self.pivot(r, c)?;
        }
        None
    }
}

impl<T: Exact> Tableau<T> {
    /// Replaces the objective row by reduced costs for `cost` (one entry per
    /// column, artificials included) under the current basis.
    fn set_objective(&mut self, cost: &[T]) -> Option<()> {
        let width = self.width();
        let mut obj = vec![T::zero(); width];
        obj[..cost.len()].clone_from_slice(cost);
        for r in 0..self.m {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !self.t[r][j].is_zero() {
                    let d = cb.mul(&self.t[r][j])?;
                    obj[j] = obj[j].sub(&d)?;
                }
            }
        }
        self.t[self.m] = obj;
        Some(())
    }
}

fn initial<T: Exact>(a: &[Vec<T>], b: &[T], n: usize) -> Option<(Tableau<T>, Vec<T>)> {
    let m = a.len();
    let width = n + m + 1;
    let mut sign = vec![T::one(); m];
    let mut t = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![T::zero(); width];
        for j in 0..n {
            row[j] = if flip {
                a[i][j].neg()?
            } else {
                a[i][j].clone()
            };
        }
        row[n + i] = T::one();
        row[width - 1] = if flip { b[i].neg()? } else { b[i].clone() };
        if flip {
            sign[i] = T::one().neg()?;
        }
        t.push(row);
    }
    t.push(vec![T::zero(); width]);
    Some((
        Tableau {
            t,
            basis: (n..n + m).collect(),
            m,
            max_pivots: T::pivot_budget(n + m),
        },
        sign,
    ))
}

fn magnitude<T: Exact>(x: &T) -> T {
    if x.is_negative() {
        x.neg().unwrap_or_else(|| x.clone())
    } else {
        x.clone()
    }
}

/// Row among `rows` with the largest nonzero entry in column `col`.
fn largest<T: Exact>(
    tab: &Tableau<T>,
    rows: impl Iterator<Item = usize>,
    col: usize,
) -> Option<usize> {
    rows.filter(|&r| !tab.t[r][col].is_zero()).max_by(|&x, &y| {
        magnitude(&tab.t[x][col])
            .partial_cmp(&magnitude(&tab.t[y][col]))
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Column before `n` with the largest nonzero entry in row `r`.
fn largest_in_row<T: Exact>(tab: &Tableau<T>, r: usize, n: usize) -> Option<usize> {
    (0..n).filter(|&j| !tab.t[r][j].is_zero()).max_by(|&x, &y| {
        magnitude(&tab.t[r][x])
            .partial_cmp(&magnitude(&tab.t[r][y]))
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Dual simplex: restores nonnegative right-hand sides while keeping the
/// objective row nonpositive. Returns `Some(false)` if some row proves
/// primal infeasibility.
fn dual_simplex<T: Exact>(tab: &mut Tableau<T>, allowed: usize) -> Option<bool> {
    let rhs = tab.width() - 1;
    let m = tab.m;
    loop {
        let Some(r) = (0..m)
            .filter(|&r| tab.t[r][rhs].is_negative())
            .min_by_key(|&r| tab.basis[r])
        else {
            return Some(true);
        };
        let mut best: Option<(usize, T)> = None;
        for j in 0..allowed {
            if !tab.t[r][j].is_negative() {
                continue;
            }
            let ratio = tab.t[m][j].div(&tab.t[r][j])?;
            if best.as_ref().is_none_or(|(_, b)| ratio < *b) {
                best = Some((j, ratio));
            }
        }
        let Some((j, _)) = best else {
            return Some(false);
        };
        tab.pivot(r, j)?;
    }
}

/// Starts from the proposed basis. Returns `Some(None)` when that basis is
/// unusable and a cold start is needed.
fn solve_warm<T: Exact>(
    a: &[Vec<T>],
    b: &[T],
    c: &[T],
    warm: &[usize],
    repair: bool,
) -> Option<Option<Solved>> {
    let m = a.len();
    let n = c.len();
    let (mut tab, sign) = initial(a, b, n)?;
    let rhs = tab.width() - 1;
    let mut used = vec![false; m];
    for &col in warm.iter().filter(|&&c| c < n) {
        if let Some(r) = largest(&tab, (0..m).filter(|&r| !used[r]), col) {
            tab.pivot(r, col)?;
            used[r] = true;
        }
    }
    let mut cost = vec![T::zero(); rhs];
    cost[..n].clone_from_slice(c);
    tab.set_objective(&cost)?;
    if (0..n).any(|j| tab.t[m][j].is_positive()) {
        // Primal repair is only used for floats, where the perturbed rhs
        // keeps the start nondegenerate.
        let clean = (0..m)
            .all(|r| !tab.t[r][rhs].is_negative() && (tab.basis[r] < n || tab.t[r][rhs].is_zero()));
        if !repair || !clean {
            return Some(None);
        }
        if !tab.run(n, false)? {
            return Some(Some(Solved {
                outcome: LpOutcome::Unbounded,
                basis: tab.basis,
            }));
        }
    }
    // Swap leftover artificials for structural columns by the dual ratio
    // test, which keeps every reduced cost nonpositive.
    for r in 0..m {
        if tab.basis[r] < n {
            continue;
        }
        let mut best: Option<(usize, T)> = None;
        for j in (0..n).filter(|&j| tab.t[r][j].is_positive()) {
            let ratio = tab.t[m][j].div(&tab.t[r][j])?;
            if best.as_ref().is_none_or(|(_, b)| ratio > *b) {
                best = Some((j, ratio));
            }
        }
        if best.is_none() {
            for j in (0..n).filter(|&j| tab.t[r][j].is_negative()) {
                let ratio = tab.t[m][j].div(&tab.t[r][j])?;
                if best.as_ref().is_none_or(|(_, b)| ratio < *b) {
                    best = Some((j, ratio));
                }
            }
        }
        match best {
            Some((j, _)) => tab.pivot(r, j)?,
            None if tab.t[r][rhs].is_zero() => {}
            None => return Some(None),
        }
    }
    if !dual_simplex(&mut tab, n)? {
        return Some(None);
    }
    if !tab.run(n, false)? {
        return Some(Some(Solved {
            outcome: LpOutcome::Unbounded,
            basis: tab.basis,
        }));
    }
    Some(Some(optimal(&tab, &sign, n)?))
}

fn optimal<T: Exact>(tab: &Tableau<T>, sign: &[T], n: usize) -> Option<Solved> {
    let m = tab.m;
    let rhs = tab.width() - 1;
    let mut x = vec![T::zero(); n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.t[r][rhs].clone();
        }
    }
    let value = tab.t[m][rhs].neg()?.to_big();
    // Artificial columns have zero cost here, so y_i = -(reduced cost).
    let duals = (0..m)
        .map(|i| Some(tab.t[m][n + i].neg()?.mul(&sign[i])?.to_big()))
        .collect::<Option<Vec<Q>>>()?;
    let outcome = LpOutcome::Optimal {
        x: x.iter().map(T::to_big).collect(),
        value,
        duals,
    };
    Some(Solved {
        outcome,
        basis: tab.basis.clone(),
    })
}

struct Solved {
    outcome: LpOutcome,
    basis: Vec<usize>,
}

/// `None` means overflow (or, for floats, an exhausted pivot budget).
fn solve<T: Exact>(a: &[Vec<T>], b: &[T], c: &[T]) -> Option<Solved> {
    let m = a.len();
    let n = c.len();
    let (mut tab, sign) = initial(a, b, n)?;
    let width = tab.width();
    let rhs = width - 1;
    let mut cost = vec![T::zero(); rhs];
    for x in cost.iter_mut().skip(n) {
        *x = T::one().neg()?;
    }
    tab.set_objective(&cost)?;
    tab.run(rhs, true)?;
    if tab.t[m][rhs].is_positive() {
        // Phase one stopped below zero; its duals separate b from the cone.
        let farkas = (0..m)
            .map(|i| Some(cost[n + i].sub(&tab.t[m][n + i])?.mul(&sign[i])?.to_big()))
            .collect::<Option<Vec<Q>>>()?;
        return Some(Solved {
            outcome: LpOutcome::Infeasible { farkas },
            basis: tab.basis,
        });
    }
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(j) = largest_in_row(&tab, r, n) {
                tab.pivot(r, j)?;
            }
        }
    }
    let mut cost = vec![T::zero(); rhs];
    cost[..n].clone_from_slice(c);
    tab.set_objective(&cost)?;
    if !tab.run(n, false)? {
        return Some(Solved {
            outcome: LpOutcome::Unbounded,
            basis: tab.basis,
        });
    }
    optimal(&tab, &sign, n)
}

/// Floating-point arithmetic with a fixed tolerance, used only to find a
/// starting basis for the exact solve.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
struct Approx(f64);

const APPROX_TOL: f64 = 1e-9;
const PERTURBATION: f64 = 1e-6;

impl Exact for Approx {
    fn zero() -> Self {
        Approx(0.0)
    }
    fn one() -> Self {
        Approx(1.0)
    }
    fn from_big(x: &Q) -> Option<Self> {
        Some(Approx(crate::exact::to_f64(x)))
    }
    fn to_big(&self) -> Q {
        Q::from_float(self.0).unwrap_or_default()
    }
    fn is_zero(&self) -> bool {
        self.0.abs() < APPROX_TOL
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(Approx(self.0 + o.0))
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(Approx(self.0 - o.0))
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(Approx(self.0 * o.0))
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(Approx(self.0 / o.0))
    }
    fn is_negative(&self) -> bool {
        self.0 < -APPROX_TOL
    }
    fn pivot_budget(size: usize) -> usize {
        20 * size
    }
}

/// Perturbed floating-point solves tried before a cold exact start.
const WARM_ATTEMPTS: usize = 4;
const REFACTOR_ROUNDS: usize = 4;

fn float_basis(a: &Matrix, b: &[Q], c: &[Q], attempt: usize) -> Option<Vec<usize>> {
    let fa = lower::<Approx>(a)?;
    let mut fb = lower::<Approx>(&[b.to_vec()])?.pop()?;
    // Shifting b by A d for a small uneven d > 0 keeps the system
    // consistent (the rows may be dependent) while removing the degenerate
    // vertices that stall floating-point pivoting.
    let scale = PERTURBATION * 0.5f64.powi(attempt as i32);
    let prime = [7919, 104_729, 1_299_709, 15_485_863][attempt % 4];
    let d: Vec<f64> = (0..c.len())
        .map(|j| scale * (1.0 + ((j * prime) % 101) as f64 / 101.0))
        .collect();
    for (x, row) in fb.iter_mut().zip(&fa) {
        x.0 += row.iter().zip(&d).map(|(a, d)| a.0 * d).sum::<f64>();
    }
    let fc = lower::<Approx>(&[c.to_vec()])?.pop()?;
    let mut basis = solve(&fa, &fb, &fc)?.basis;
    // Refactor from the original data until the basis settles, which clears
    // error accumulated in the tableau.
    for _ in 0..REFACTOR_ROUNDS {
        let Some(Some(next)) = solve_warm(&fa, &fb, &fc, &basis, true) else {
            break;
        };
        let mut next = next.basis;
        let mut was = basis.clone();
        next.sort_unstable();
        was.sort_unstable();
        if next == was {
            break;
        }
        basis = next;
    }
    Some(basis)
}

/// Solves exactly. Perturbed floating-point passes propose a basis and the
/// exact pass finishes from it with dual simplex steps; rounding can only
/// force the slower cold start.
pub fn maximize(a: &Matrix, b: &[Q], c: &[Q]) -> LpOutcome {
    struct Warm<'a>(&'a Matrix, &'a [Q], &'a [Q], &'a [usize]);
    impl TieredFn<Option<LpOutcome>> for Warm<'_> {
        fn call<T: Exact>(&self) -> Option<Option<LpOutcome>> {
            let a = lower::<T>(self.0)?;
            let b = lower::<T>(&[self.1.to_vec()])?.pop()?;
            let c = lower::<T>(&[self.2.to_vec()])?.pop()?;
            Some(solve_warm(&a, &b, &c, self.3, false)?.map(|s| s.outcome))
        }
    }
    for attempt in 0..WARM_ATTEMPTS {
        if let Some(basis) = float_basis(a, b, c, attempt) {
            if let Some(out) = tiered(Warm(a, b, c, &basis)) {
                return out;
            }
        }
    }
    maximize_cold(a, b, c)
}

/// Exact two-phase solve from the slack basis.
pub fn maximize_cold(a: &Matrix, b: &[Q], c: &[Q]) -> LpOutcome {
    struct Cold<'a>(&'a Matrix, &'a [Q], &'a [Q]);
    impl TieredFn<LpOutcome> for Cold<'_> {
        fn call<T: Exact>(&self) -> Option<LpOutcome> {
            let a = lower::<T>(self.0)?;
            let b = lower::<T>(&[self.1.to_vec()])?.pop()?;
            let c = lower::<T>(&[self.2.to_vec()])?.pop()?;
            solve(&a, &b, &c).map(|s| s.outcome)
        }
    }
    tiered(Cold(a, b, c))
}
