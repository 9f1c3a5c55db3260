//! Exact rational linear algebra.
//!
//! Every routine first runs over `Ratio<i64>`, then `Ratio<i128>`, with
//! checked arithmetic, and repeats the work over `BigRational` only if both
//! overflow.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type Matrix = Vec<Vec<Q>>;

/// Field operations that may fail on overflow.
pub trait Exact: Clone + PartialEq + PartialOrd + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_big(x: &Q) -> Option<Self>;
    fn to_big(&self) -> Q;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn is_negative(&self) -> bool;
    fn is_positive(&self) -> bool {
        !self.is_zero() && !self.is_negative()
    }
    fn neg(&self) -> Option<Self> {
        Self::zero().sub(self)
    }
    /// Pivot limit for an LP with `size` columns; exact arithmetic with
    /// anti-cycling always terminates.
    fn pivot_budget(_size: usize) -> usize {
        usize::MAX
    }
}

pub type Small = Ratio<i64>;
pub type Medium = Ratio<i128>;

macro_rules! checked_ratio {
    ($int:ty) => {
        impl Exact for Ratio<$int> {
            fn zero() -> Self {
                Zero::zero()
            }
            fn one() -> Self {
                One::one()
            }
            fn from_big(x: &Q) -> Option<Self> {
                Some(Ratio::new_raw(
                    x.numer().to_i128()?.try_into().ok()?,
                    x.denom().to_i128()?.try_into().ok()?,
                ))
            }
            fn to_big(&self) -> Q {
                Ratio::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }
            fn is_zero(&self) -> bool {
                Zero::is_zero(self)
            }
            fn add(&self, o: &Self) -> Option<Self> {
                self.checked_add(o)
            }
            fn sub(&self, o: &Self) -> Option<Self> {
                self.checked_sub(o)
            }
            fn mul(&self, o: &Self) -> Option<Self> {
                self.checked_mul(o)
            }
            fn div(&self, o: &Self) -> Option<Self> {
                self.checked_div(o)
            }
            fn is_negative(&self) -> bool {
                Signed::is_negative(self)
            }
        }
    };
}

checked_ratio!(i64);
checked_ratio!(i128);

impl Exact for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_big(x: &Q) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> Q {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            None
        } else {
            Some(self / o)
        }
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn int_matrix(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| q(x)).collect())
        .collect()
}

pub(crate) fn lower<T: Exact>(m: &[Vec<Q>]) -> Option<Vec<Vec<T>>> {
    m.iter()
        .map(|r| r.iter().map(T::from_big).collect())
        .collect()
}

pub(crate) fn raise<T: Exact>(m: &[Vec<T>]) -> Matrix {
    m.iter()
        .map(|r| r.iter().map(T::to_big).collect())
        .collect()
}

/// Row-reduces `m` in place, choosing pivots only among the first `limit`
/// columns. Returns the pivot columns, or `None` on overflow.
pub fn rref_in_place<T: Exact>(m: &mut [Vec<T>], limit: usize) -> Option<Vec<usize>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..limit {
        if r == rows {
            break;
        }
        let Some(found) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, found);
        let inv = T::one().div(&m[r][c])?;
        let support: Vec<usize> = (0..m[r].len()).filter(|&j| !m[r][j].is_zero()).collect();
        for &j in &support {
            m[r][j] = m[r][j].mul(&inv)?;
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for &j in &support {
                let delta = f.mul(&m[r][j])?;
                m[i][j] = m[i][j].sub(&delta)?;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Some(pivots)
}

/// Runs `f` over `i64` rationals, then `i128`, then big rationals, keeping
/// the first run that does not overflow.
pub(crate) fn tiered<R>(f: impl TieredFn<R>) -> R {
    f.call::<Small>()
        .or_else(|| f.call::<Medium>())
        .or_else(|| f.call::<Q>())
        .expect("big rationals do not overflow")
}

pub(crate) trait TieredFn<R> {
    fn call<T: Exact>(&self) -> Option<R>;
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &[Vec<Q>]) -> (Matrix, Vec<usize>) {
    struct Job<'a>(&'a [Vec<Q>]);
    impl TieredFn<(Matrix, Vec<usize>)> for Job<'_> {
        fn call<T: Exact>(&self) -> Option<(Matrix, Vec<usize>)> {
            let cols = self.0.first().map_or(0, |r| r.len());
            let mut m = lower::<T>(self.0)?;
            let p = rref_in_place(&mut m, cols)?;
            Some((raise(&m), p))
        }
    }
    tiered(Job(m))
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    rref(m).1.len()
}

/// Basis of `{x : m x = 0}`, one vector per free column.
pub fn nullspace(m: &[Vec<Q>], cols: usize) -> Matrix {
    if m.is_empty() {
        return (0..cols)
            .map(|j| {
                (0..cols)
                    .map(|i| if i == j { q(1) } else { q(0) })
                    .collect()
            })
            .collect();
    }
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![q(0); cols];
            v[f] = q(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[row][f].clone();
            }
            v
        })
        .collect()
}

/// One solution of `a x = b` with free variables set to zero, or `None` if
/// the system is inconsistent.
pub fn particular_solution(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let cols = a.first().map_or(0, |r| r.len());
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect())
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![q(0); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[row][cols].clone();
    }
    Some(x)
}

/// True if every solution of `a x = b` also satisfies `l x = c`, assuming
/// `a x = b` is consistent.
pub fn implies(a: &[Vec<Q>], b: &[Q], l: &[Q], c: &Q) -> bool {
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect())
        .collect();
    let before = rank(&aug);
    aug.push(l.iter().cloned().chain([c.clone()]).collect());
    rank(&aug) == before
}

pub fn mat_vec(a: &[Vec<Q>], x: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|r| {
            r.iter()
                .zip(x)
                .filter(|(c, _)| !Zero::is_zero(*c))
                .map(|(c, v)| c * v)
                .sum()
        })
        .collect()
}
