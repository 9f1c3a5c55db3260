//! Words in the three-strand braid group, decided through the reduced Burau
//! representation.
//!
//! Burau is faithful on three strands (Birman, *Braids, Links, and Mapping
//! Class Groups*, Thm. 3.15), so two words are equal in `B3` exactly when
//! their matrices agree. Matrices are exact: entries are Laurent
//! polynomials in `t` with big-integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A Laurent polynomial with integer coefficients, keyed by exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent(BTreeMap<i32, BigInt>);

impl Laurent {
    pub fn zero() -> Self {
        Laurent(BTreeMap::new())
    }

    /// `c t^k`.
    pub fn monomial(c: i64, k: i32) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(k, BigInt::from(c));
        }
        Laurent(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, k: i32, c: BigInt) {
        let e = self.0.entry(k).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&k);
        }
    }

    /// `Some((c, k))` when the polynomial is the single term `c t^k`.
    pub fn as_monomial(&self) -> Option<(&BigInt, i32)> {
        match self.0.len() {
            1 => self.0.iter().next().map(|(k, c)| (c, *k)),
            _ => None,
        }
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, o: &Laurent) -> Laurent {
        let mut r = self.clone();
        for (k, c) in &o.0 {
            r.add_term(*k, c.clone());
        }
        r
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent(self.0.iter().map(|(k, c)| (*k, -c)).collect())
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, o: &Laurent) -> Laurent {
        let mut r = Laurent::zero();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                r.add_term(a + b, x * y);
            }
        }
        r
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.0.iter().rev().enumerate() {
            let sign = if c.is_negative() {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let a = c.abs();
            let coeff = if a.is_one() && *k != 0 {
                String::new()
            } else {
                a.to_string()
            };
            match k {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}t")?,
                _ => write!(f, "{coeff}t^{k}")?,
            }
        }
        Ok(())
    }
}

/// A 2×2 matrix over Laurent polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurauMatrix(pub [[Laurent; 2]; 2]);

impl BurauMatrix {
    pub fn identity() -> Self {
        BurauMatrix([
            [Laurent::monomial(1, 0), Laurent::zero()],
            [Laurent::zero(), Laurent::monomial(1, 0)],
        ])
    }

    /// Image of a generator: `1` and `2` for `s1` and `s2`, negative for
    /// inverses.
    ///
    /// `s1 -> [[-t, 1], [0, 1]]` and `s2 -> [[1, 0], [t, -t]]`.
    pub fn generator(g: i8) -> Self {
        let m = Laurent::monomial;
        let rows = match g {
            1 => [[m(-1, 1), m(1, 0)], [m(0, 0), m(1, 0)]],
            -1 => [[m(-1, -1), m(1, -1)], [m(0, 0), m(1, 0)]],
            2 => [[m(1, 0), m(0, 0)], [m(1, 1), m(-1, 1)]],
            -2 => [[m(1, 0), m(0, 0)], [m(1, 0), m(-1, -1)]],
            _ => panic!("not a generator of B3: {g}"),
        };
        BurauMatrix(rows)
    }

    pub fn mul(&self, o: &BurauMatrix) -> BurauMatrix {
        let e = |i: usize, j: usize| &(&self.0[i][0] * &o.0[0][j]) + &(&self.0[i][1] * &o.0[1][j]);
        BurauMatrix([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn trace(&self) -> Laurent {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn det(&self) -> Laurent {
        &(&self.0[0][0] * &self.0[1][1]) + &-&(&self.0[0][1] * &self.0[1][0])
    }
}

impl fmt::Display for BurauMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// A freely reduced word in `s1^±1, s2^±1`, stored as `±1, ±2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct BraidWord {
    letters: Vec<i8>,
}

impl BraidWord {
    pub fn new(letters: impl IntoIterator<Item = i8>) -> Result<Self> {
        let mut w = BraidWord::default();
        for g in letters {
            if !matches!(g, 1 | 2 | -1 | -2) {
                return Err(Error::Parse(format!("not a generator of B3: {g}")));
            }
            w.push(g);
        }
        Ok(w)
    }

    fn push(&mut self, g: i8) {
        if self.letters.last() == Some(&-g) {
            self.letters.pop();
        } else {
            self.letters.push(g);
        }
    }

    pub fn identity() -> Self {
        BraidWord::default()
    }

    pub fn s1() -> Self {
        BraidWord { letters: vec![1] }
    }

    pub fn s2() -> Self {
        BraidWord { letters: vec![2] }
    }

    /// The full twist `(s1 s2)^3`.
    pub fn full_twist() -> Self {
        BraidWord {
            letters: [1, 2].repeat(3),
        }
    }

    pub fn letters(&self) -> &[i8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, o: &BraidWord) -> BraidWord {
        let mut w = self.clone();
        for &g in &o.letters {
            w.push(g);
        }
        w
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            letters: self.letters.iter().rev().map(|g| -g).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> BraidWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(BraidWord::identity(), |acc, _| acc.concat(&base))
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|g| i64::from(g.signum())).sum()
    }

    /// Moves the first `k` letters to the end. The result is conjugate to
    /// `self` by the moved prefix.
    pub fn rotate_left(&self, k: usize) -> BraidWord {
        let k = k % self.len().max(1);
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        BraidWord::new(letters).expect("letters are generators")
    }

    pub fn prefix(&self, k: usize) -> BraidWord {
        BraidWord {
            letters: self.letters[..k].to_vec(),
        }
    }

    /// Parses words like `C^2 s1^5 s2^-1` or `(s1 s2)^5 s1`. `C` is the full
    /// twist; juxtaposition is the product.
    pub fn parse(text: &str) -> Result<BraidWord> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let w = parse_product(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected '{}' in braid word",
                tokens[pos]
            )));
        }
        Ok(w)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut runs: Vec<(i8, i64)> = Vec::new();
        for &g in &self.letters {
            match runs.last_mut() {
                Some((h, n)) if h.abs() == g.abs() => *n += i64::from(g.signum()),
                _ => runs.push((g, i64::from(g.signum()))),
            }
        }
        let parts: Vec<String> = runs
            .iter()
            .map(|&(g, n)| {
                if n == 1 {
                    format!("s{}", g.abs())
                } else {
                    format!("s{}^{n}", g.abs())
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' || c == '.' {
            i += 1;
        } else if matches!(c, '(' | ')' | '^') {
            tokens.push(c.to_string());
            i += 1;
        } else if c == '-' || c.is_ascii_alphanumeric() {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            tokens.push(chars[start..i].iter().collect());
        } else {
            return Err(Error::Parse(format!(
                "unexpected character '{c}' in braid word"
            )));
        }
    }
    Ok(tokens)
}

fn parse_product(tokens: &[String], pos: &mut usize) -> Result<BraidWord> {
    let mut w = BraidWord::identity();
    while *pos < tokens.len() && tokens[*pos] != ")" {
        let atom = match tokens[*pos].as_str() {
            "(" => {
                *pos += 1;
                let inner = parse_product(tokens, pos)?;
                if tokens.get(*pos).map(String::as_str) != Some(")") {
                    return Err(Error::Parse("unbalanced parenthesis in braid word".into()));
                }
                inner
            }
            "C" | "c" => BraidWord::full_twist(),
            "s1" | "S1" | "a" => BraidWord::s1(),
            "s2" | "S2" | "b" => BraidWord::s2(),
            "1" => BraidWord::identity(),
            "A" => BraidWord::s1().inverse(),
            "B" => BraidWord::s2().inverse(),
            other => return Err(Error::Parse(format!("unknown braid letter '{other}'"))),
        };
        *pos += 1;
        let mut exp = 1i64;
        if tokens.get(*pos).map(String::as_str) == Some("^") {
            let e = tokens
                .get(*pos + 1)
                .ok_or_else(|| Error::Parse("missing exponent".into()))?;
            exp = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent '{e}'")))?;
            *pos += 2;
        }
        w = w.concat(&atom.pow(exp));
    }
    Ok(w)
}

pub fn reduced_burau(w: &BraidWord) -> BurauMatrix {
    w.letters.iter().fold(BurauMatrix::identity(), |m, &g| {
        m.mul(&BurauMatrix::generator(g))
    })
}

pub fn equal_in_b3(a: &BraidWord, b: &BraidWord) -> bool {
    a.exponent_sum() == b.exponent_sum() && reduced_burau(a) == reduced_burau(b)
}

/// Trace and determinant of the Burau matrix, which fix its characteristic
/// polynomial `x^2 - tr x + det`.
pub fn char_poly(w: &BraidWord) -> (Laurent, Laurent) {
    let m = reduced_burau(w);
    (m.trace(), m.det())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Equal,
    Conjugate,
}

/// One verified link of a chain of braid words.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepLog {
    pub index: usize,
    pub kind: StepKind,
    pub from: String,
    pub to: String,
    /// For a conjugacy step: the `c` with `c^-1 from c = to` in B3.
    pub conjugator: Option<String>,
    /// Letters moved: a positive count from the front to the back, a
    /// negative count from the back to the front.
    pub rotation: Option<i64>,
    pub exponent_sum: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub p: usize,
    pub ok: bool,
    pub steps: Vec<StepLog>,
    /// First failing step, if any.
    pub failed_step: Option<usize>,
    pub exponent_sums: Vec<i64>,
    /// Whether the two ends share trace and determinant of the Burau matrix.
    pub ends_share_char_poly: bool,
}

impl ChainReport {
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:>4}  {:<4} {:<40} {:<12} {:>4}  ok\n",
            "step", "kind", "word", "conjugator", "exp"
        );
        for s in &self.steps {
            let kind = match s.kind {
                StepKind::Equal => "=",
                StepKind::Conjugate => "~",
            };
            out.push_str(&format!(
                "{:>4}  {:<4} {:<40} {:<12} {:>4}  {}\n",
                s.index,
                kind,
                s.to,
                s.conjugator.as_deref().unwrap_or("-"),
                s.exponent_sum,
                if s.ok { "yes" } else { "NO" }
            ));
        }
        out
    }
}

/// A deliberate corruption for negative controls: the target word of the
/// given step loses its last letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tamper {
    pub step: usize,
}

/// Rotation by `k` letters: positive moves a prefix to the end, negative
/// moves a suffix to the front.
fn rotate(w: &BraidWord, k: i64) -> BraidWord {
    let n = w.len() as i64;
    w.rotate_left(k.rem_euclid(n.max(1)) as usize)
}

/// The `c` with `c^-1 w c = rotate(w, k)` as words.
fn rotation_conjugator(w: &BraidWord, k: i64) -> BraidWord {
    if k >= 0 {
        w.prefix(k as usize)
    } else {
        BraidWord::new(w.letters()[w.len() - k.unsigned_abs() as usize..].to_vec())
            .expect("letters")
            .inverse()
    }
}

/// Smallest rotation, trying `0, 1, -1, 2, -2, ...`, that carries `from`
/// onto a word equal to `to` in B3.
fn conjugating_rotation(from: &BraidWord, to: &BraidWord) -> Option<i64> {
    let n = from.len() as i64;
    (0..=n / 2)
        .flat_map(|k| [k, -k])
        .find(|&k| equal_in_b3(&rotate(from, k), to))
}

fn run_chain(
    p: usize,
    words: Vec<(StepKind, BraidWord, String)>,
    tamper: Option<Tamper>,
) -> ChainReport {
    let mut steps = Vec::new();
    let mut failed_step = None;
    for (i, pair) in words.windows(2).enumerate() {
        let (_, from, from_text) = &pair[0];
        let (kind, to, to_text) = &pair[1];
        let mut to = to.clone();
        if tamper.is_some_and(|t| t.step == i + 1) && !to.is_empty() {
            to = to.prefix(to.len() - 1);
        }
        let (ok, rotation) = match kind {
            StepKind::Equal => (equal_in_b3(from, &to), None),
            StepKind::Conjugate => {
                let r = conjugating_rotation(from, &to);
                (r.is_some(), r)
            }
        };
        if !ok && failed_step.is_none() {
            failed_step = Some(i + 1);
        }
        steps.push(StepLog {
            index: i + 1,
            kind: *kind,
            from: from_text.clone(),
            to: to_text.clone(),
            conjugator: rotation.map(|k| rotation_conjugator(from, k).to_string()),
            rotation,
            exponent_sum: to.exponent_sum(),
            ok,
        });
    }
    let first = &words[0].1;
    let last = &words[words.len() - 1].1;
    let mut exponent_sums: Vec<i64> = vec![first.exponent_sum()];
    exponent_sums.extend(steps.iter().map(|s| s.exponent_sum));
    ChainReport {
        p,
        ok: failed_step.is_none(),
        steps,
        failed_step,
        exponent_sums,
        ends_share_char_poly: char_poly(first) == char_poly(last),
    }
}

fn chain_word(kind: StepKind, text: String) -> (StepKind, BraidWord, String) {
    let w = BraidWord::parse(&text).expect("chain words parse");
    (kind, w, text)
}

/// Replays the conjugacy chain from `C^2 s1^p s2^-1` to the pretzel braid
/// `s1^3 s2 s1^(p+6) s2`. Equalities are checked in B3; each conjugacy is
/// witnessed by a cyclic rotation whose moved prefix is logged.
pub fn verify_pretzel_chain(p: usize) -> ChainReport {
    verify_pretzel_chain_with(p, None)
}

pub fn verify_pretzel_chain_with(p: usize, tamper: Option<Tamper>) -> ChainReport {
    use StepKind::{Conjugate, Equal};
    let words = vec![
        chain_word(Equal, format!("C^2 s1^{p} s2^-1")),
        chain_word(Equal, format!("(s2 s1 s2)(s1 s2 s1) C s1^{p} s2^-1")),
        chain_word(Conjugate, format!("s2 s1 s2 C s1^{}", p + 2)),
        chain_word(Equal, format!("s1 s2 C s1^{}", p + 3)),
        chain_word(Conjugate, format!("s2 (s1 s2 s1)(s1 s2 s1) s1^{}", p + 4)),
        chain_word(Equal, format!("s1 s2 s1 s1 s1 s2 s1^{}", p + 5)),
        chain_word(Conjugate, format!("s1^3 s2 s1^{} s2", p + 6)),
    ];
    run_chain(p, words, tamper)
}

/// Checks `C^2 s1^p s2^-1 = s1^p (s1 s2)^6 s2^-1 = s1^p (s1 s2)^5 s1` and
/// that the last word rotates into `s1^(p+1) (s1 s2)^5`.
pub fn verify_tlink_form(p: usize) -> ChainReport {
    verify_tlink_form_with(p, None)
}

pub fn verify_tlink_form_with(p: usize, tamper: Option<Tamper>) -> ChainReport {
    use StepKind::{Conjugate, Equal};
    let words = vec![
        chain_word(Equal, format!("C^2 s1^{p} s2^-1")),
        chain_word(Equal, format!("s1^{p} (s1 s2)^6 s2^-1")),
        chain_word(Equal, format!("s1^{p} (s1 s2)^5 s1")),
        chain_word(Conjugate, format!("s1^{} (s1 s2)^5", p + 1)),
    ];
    run_chain(p, words, tamper)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BraidWord {
        BraidWord::parse(s).unwrap()
    }

    #[test]
    fn relation_and_centrality() {
        assert!(equal_in_b3(&w("s1 s2 s1"), &w("s2 s1 s2")));
        assert!(equal_in_b3(&w("C s1"), &w("s1 C")));
        assert!(equal_in_b3(&w("C s2^-1"), &w("s2^-1 C")));
        assert!(!equal_in_b3(&w("s1"), &w("s2")));
        assert!(!equal_in_b3(&w("s1 s2"), &w("s2 s1")));
    }

    #[test]
    fn parsing_and_reduction() {
        assert_eq!(w("s1 s1^-1 s2").letters(), &[2]);
        assert_eq!(w("C").len(), 6);
        assert_eq!(w("(s1 s2)^-2").letters(), &[-2, -1, -2, -1]);
        assert_eq!(w("C^2 s1^5 s2^-1").exponent_sum(), 16);
        assert_eq!(w("s1^3 s2 s1^-2").to_string(), "s1^3 s2 s1^-2");
        assert!(BraidWord::parse("s3").is_err());
        assert!(BraidWord::parse("(s1").is_err());
    }

    #[test]
    fn determinant_is_a_unit_monomial() {
        let d = reduced_burau(&w("s1^3 s2^-2 s1 C")).det();
        let (c, _) = d.as_monomial().unwrap();
        assert!(c.abs().is_one());
    }

    #[test]
    fn laurent_display() {
        let p = &Laurent::monomial(-1, 2) + &Laurent::monomial(3, -1);
        assert_eq!(p.to_string(), "-t^2 + 3t^-1");
        assert_eq!((&p + &-&p).to_string(), "0");
    }
}
