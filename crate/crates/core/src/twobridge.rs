//! Layered triangulations of 2-bridge link complements built from a word in
//! `R` and `L`.
//!
//! A word of length `k` gives layers `1..k`, each holding a front tetrahedron
//! `T_i` and a back tetrahedron `T_i'` whose corners carry the puncture labels
//! `0..3`. The letter between two layers fixes how the top of one is glued to
//! the bottom of the next; the first and last letters fix the clasps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::notation::from_table;
use crate::triangulation::{Tet, Triangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Letter {
    R,
    L,
}

impl Letter {
    pub fn symbol(self) -> char {
        match self {
            Letter::R => 'R',
            Letter::L => 'L',
        }
    }

    /// Puncture permutation of the half twist.
    fn twist(self) -> [u8; 4] {
        match self {
            Letter::R => [0, 2, 1, 3],
            Letter::L => [1, 0, 2, 3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistWord {
    pub letters: Vec<Letter>,
}

impl TwistWord {
    /// Accepts plain words (`RRRLLR`) and run lengths (`R3L2R1`); spaces
    /// are ignored and lowercase letters are allowed.
    pub fn parse(text: &str) -> Result<TwistWord> {
        let mut letters = Vec::new();
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut i = 0;
        while i < chars.len() {
            let letter = match chars[i].to_ascii_uppercase() {
                'R' => Letter::R,
                'L' => Letter::L,
                c => {
                    return Err(Error::Parse(format!(
                        "unexpected character {c:?} in twist word {text:?}"
                    )))
                }
            };
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let count = if start == i {
                1
            } else {
                let digits: String = chars[start..i].iter().collect();
                digits
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad run length {digits:?}: {e}")))?
            };
            letters.extend(std::iter::repeat_n(letter, count));
        }
        let word = TwistWord { letters };
        word.check()?;
        Ok(word)
    }

    pub fn new(letters: Vec<Letter>) -> Result<TwistWord> {
        let word = TwistWord { letters };
        word.check()?;
        Ok(word)
    }

    fn check(&self) -> Result<()> {
        if self.letters.len() < 2 {
            return Err(Error::Domain(format!(
                "a twist word needs at least 2 letters, got {}",
                self.letters.len()
            )));
        }
        Ok(())
    }

    pub fn layers(&self) -> usize {
        self.letters.len() - 1
    }

    pub fn reversed(&self) -> TwistWord {
        TwistWord {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }
}

impl std::fmt::Display for TwistWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.letters
            .iter()
            .try_for_each(|l| write!(f, "{}", l.symbol()))
    }
}

fn front(i: usize) -> String {
    format!("T{i}")
}

fn back(i: usize) -> String {
    format!("T{i}'")
}

const TOP_FRONT: [[u8; 3]; 2] = [[0, 1, 3], [1, 2, 3]];
const BOTTOM_FRONT: [[u8; 3]; 2] = [[0, 1, 2], [0, 2, 3]];

fn sorted(f: [u8; 3]) -> [u8; 3] {
    let mut f = f;
    f.sort_unstable();
    f
}

fn face(f: [u8; 3]) -> String {
    f.iter().map(|c| c.to_string()).collect()
}

/// Owner of a face with the given corners: top faces of layer `i` when `top`,
/// bottom faces otherwise.
fn owner(i: usize, f: [u8; 3], top: bool) -> String {
    let in_front = if top {
        TOP_FRONT.contains(&sorted(f))
    } else {
        BOTTOM_FRONT.contains(&sorted(f))
    };
    if in_front {
        front(i)
    } else {
        back(i)
    }
}

/// Clasp identifications of a boundary pillowcase, as pairs of corner triples.
fn clasp(letter: Letter) -> [([u8; 3], [u8; 3]); 2] {
    match letter {
        Letter::R => [([0, 1, 2], [0, 1, 3]), ([0, 2, 3], [1, 2, 3])],
        Letter::L => [([0, 1, 2], [3, 1, 2]), ([0, 2, 3], [0, 1, 3])],
    }
}

/// The face-pairing table in `T(abc) ~ U(def)` notation.
pub fn two_bridge_table(word: &TwistWord) -> Vec<String> {
    let k = word.layers();
    let mut rows = Vec::new();
    for (a, b) in clasp(word.letters[0]) {
        rows.push(format!(
            "{}({}) ~ {}({})",
            owner(1, a, false),
            face(a),
            owner(1, b, false),
            face(b)
        ));
    }
    for i in 1..k {
        let pi = word.letters[i].twist();
        for f in [[0, 1, 3], [1, 2, 3], [0, 2, 3], [0, 1, 2]] {
            let g = f.map(|c| pi[c as usize]);
            rows.push(format!(
                "{}({}) ~ {}({})",
                owner(i, f, true),
                face(f),
                owner(i + 1, g, false),
                face(g)
            ));
        }
    }
    for (a, b) in clasp(word.letters[k]) {
        rows.push(format!(
            "{}({}) ~ {}({})",
            owner(k, a, true),
            face(a),
            owner(k, b, true),
            face(b)
        ));
    }
    rows
}

pub fn build_two_bridge(word: &TwistWord) -> Result<Triangulation> {
    word.check()?;
    let mut tets = Vec::new();
    for i in 1..=word.layers() {
        tets.push(Tet::new(&front(i), ["0", "1", "2", "3"]));
        tets.push(Tet::new(&back(i), ["0", "1", "2", "3"]));
    }
    from_table(tets, &two_bridge_table(word))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoBridgeReport {
    pub word: String,
    pub layers: usize,
    pub tets: usize,
    pub valid: bool,
    /// Sorted edge degrees.
    pub edge_degrees: Vec<usize>,
    pub cusps: usize,
    pub cusp_euler_characteristics: Vec<i64>,
}

pub fn twobridge_report(word: &TwistWord) -> Result<TwoBridgeReport> {
    let tri = build_two_bridge(word)?;
    let report = tri.validate();
    let mut edge_degrees: Vec<usize> = tri.edge_classes()?.iter().map(|c| c.degree()).collect();
    edge_degrees.sort_unstable();
    let links = tri.cusp_links()?;
    Ok(TwoBridgeReport {
        word: word.to_string(),
        layers: word.layers(),
        tets: tri.len(),
        valid: report.ok,
        edge_degrees,
        cusps: links.len(),
        cusp_euler_characteristics: links.iter().map(|l| l.euler_characteristic).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_lengths() {
        let a = TwistWord::parse("R3L2R1").unwrap();
        let b = TwistWord::parse("RRRLLR").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "RRRLLR");
        assert!(TwistWord::parse("R").is_err());
        assert!(TwistWord::parse("RX").is_err());
    }

    #[test]
    fn smallest_word_is_closed() {
        let tri = build_two_bridge(&TwistWord::parse("RR").unwrap()).unwrap();
        assert_eq!(tri.len(), 2);
        assert!(tri.validate().ok);
    }

    #[test]
    fn bottom_clasp_of_an_r_word() {
        let table = two_bridge_table(&TwistWord::parse("RRRLLR").unwrap());
        assert_eq!(table[0], "T1(012) ~ T1'(013)");
        assert_eq!(table[1], "T1(023) ~ T1'(123)");
        assert_eq!(table[2], "T1(013) ~ T2(023)");
    }
}
