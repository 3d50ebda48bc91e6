//! Symbolic addresses of Sierpinski-gasket vertices.
//!
//! A point of `V_m` is written `q_{ω,t} = P_ω(q_t)` with `|ω| = m` and
//! terminal `t ∈ {1,2,3}`. Two identifications glue addresses together:
//!
//! * `P_i(q_i) = q_i`, so `(ω i, i)` and `(ω, i)` name the same point one
//!   level apart; points of `V_{m-1}` are re-addressed at level `m` by
//!   repeating the terminal letter.
//! * `P_i(q_j) = P_j(q_i)`, so every non-boundary point of `V_m` carries
//!   exactly two level-`m` addresses, `τ i j^k . j` and `τ j i^k . i`.
//!
//! The canonical form is the lexicographically smaller of the two.
//!
//! The textual syntax is the word, a dot, then the terminal: `"12.3"` is
//! `P_1 P_2 (q_3)` and `".3"` is `q_3`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const DEFAULT_DEPTH_CAP: usize = 12;

/// Environment variable consulted by [`DepthCap::from_env`].
pub const DEPTH_CAP_ENV: &str = "FIF_DEPTH_CAP";

/// Largest level for which whole-level structures are materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthCap(pub usize);

impl Default for DepthCap {
    fn default() -> Self {
        DepthCap(DEFAULT_DEPTH_CAP)
    }
}

impl DepthCap {
    pub fn from_env() -> Result<Self> {
        match std::env::var(DEPTH_CAP_ENV) {
            Ok(raw) => raw
                .trim()
                .parse::<usize>()
                .map(DepthCap)
                .map_err(|e| Error::Precondition(format!("{DEPTH_CAP_ENV}={raw:?}: {e}"))),
            Err(_) => Ok(DepthCap::default()),
        }
    }

    pub fn check(self, level: usize) -> Result<()> {
        if level > self.0 {
            Err(Error::DepthCap {
                requested: level,
                cap: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// A word over `{1,2,3}` together with a terminal letter.
///
/// The derived order compares the word lexicographically, then the terminal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    word: Vec<u8>,
    terminal: u8,
}

fn check_letter(letter: u8) -> bool {
    (1..=3).contains(&letter)
}

impl Address {
    pub fn new(word: Vec<u8>, terminal: u8) -> Result<Self> {
        if !check_letter(terminal) {
            return Err(Error::InvalidAddress {
                input: format!("{word:?}.{terminal}"),
                reason: format!("terminal {terminal} is not in 1..=3"),
            });
        }
        if let Some(bad) = word.iter().find(|&&l| !check_letter(l)) {
            return Err(Error::InvalidAddress {
                input: format!("{word:?}.{terminal}"),
                reason: format!("letter {bad} is not in 1..=3"),
            });
        }
        Ok(Address { word, terminal })
    }

    pub(crate) fn new_unchecked(word: Vec<u8>, terminal: u8) -> Self {
        debug_assert!(check_letter(terminal) && word.iter().all(|&l| check_letter(l)));
        Address { word, terminal }
    }

    /// The boundary point `q_i` at level 0.
    pub fn corner(i: u8) -> Self {
        assert!(check_letter(i), "corner index {i} is not in 1..=3");
        Address {
            word: Vec::new(),
            terminal: i,
        }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn terminal(&self) -> u8 {
        self.terminal
    }

    /// Word length, i.e. the level this address is written at.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Re-address at level `m >= len()` by padding with the terminal letter.
    pub fn lift(&self, m: usize) -> Address {
        assert!(m >= self.len(), "cannot lift level {} to {m}", self.len());
        let mut word = self.word.clone();
        word.resize(m, self.terminal);
        Address {
            word,
            terminal: self.terminal,
        }
    }

    /// `P_letter` applied to this point.
    pub fn prepend(&self, letter: u8) -> Address {
        assert!(check_letter(letter));
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(letter);
        word.extend_from_slice(&self.word);
        Address {
            word,
            terminal: self.terminal,
        }
    }

    /// The other level-`len()` address of the same point, if any.
    pub fn mirror(&self) -> Option<Address> {
        let t = self.terminal;
        let k = self.word.iter().rposition(|&l| l != t)?;
        let i = self.word[k];
        let mut word = self.word[..k].to_vec();
        word.push(t);
        word.resize(self.word.len(), i);
        Some(Address { word, terminal: i })
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.word {
            write!(f, "{l}")?;
        }
        write!(f, ".{}", self.terminal)
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidAddress {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (word, terminal) = s
            .trim()
            .split_once('.')
            .ok_or_else(|| bad("expected WORD.TERMINAL"))?;
        let letter = |c: char| match c {
            '1'..='3' => Ok(c as u8 - b'0'),
            _ => Err(bad(&format!("`{c}` is not one of 1, 2, 3"))),
        };
        let word = word.chars().map(letter).collect::<Result<Vec<_>>>()?;
        let mut t = terminal.chars();
        let terminal = match (t.next(), t.next()) {
            (Some(c), None) => letter(c)?,
            _ => return Err(bad("terminal must be a single letter")),
        };
        Ok(Address { word, terminal })
    }
}

/// A vertex of `V_m` in canonical form; `level` always equals the word length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalVertex {
    level: usize,
    address: Address,
}

impl CanonicalVertex {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn address(&self) -> &Address {
        &self.address
    }

    /// `Some(i)` when this is the boundary point `q_i`.
    pub fn boundary_index(&self) -> Option<u8> {
        let t = self.address.terminal;
        self.address.word.iter().all(|&l| l == t).then_some(t)
    }

    pub fn is_boundary(&self) -> bool {
        self.boundary_index().is_some()
    }

    /// The same point, re-addressed at a deeper level.
    pub fn lift(&self, m: usize) -> CanonicalVertex {
        canonicalize(&self.address.lift(m))
    }

    /// All level-`m` addresses of this point (one for corners, two otherwise).
    pub fn aliases(&self) -> Vec<Address> {
        let mut out = vec![self.address.clone()];
        out.extend(self.address.mirror());
        out
    }
}

impl fmt::Display for CanonicalVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.address.fmt(f)
    }
}

/// Resolve the gluing identifications at level `a.len()`.
pub fn canonicalize(a: &Address) -> CanonicalVertex {
    let level = a.len();
    let address = match a.mirror() {
        Some(m) if m < *a => m,
        Some(_) => a.clone(),
        None => Address {
            word: vec![a.terminal; level],
            terminal: a.terminal,
        },
    };
    CanonicalVertex { level, address }
}

/// Canonicalize after lifting to level `m`.
pub fn canonicalize_at(a: &Address, m: usize) -> Result<CanonicalVertex> {
    if m < a.len() {
        return Err(Error::Precondition(format!(
            "address {a} has length {} > {m}",
            a.len()
        )));
    }
    Ok(canonicalize(&a.lift(m)))
}

/// The word of the `n`-th cell of level `m` in lexicographic order.
pub(crate) fn cell_word(mut n: usize, m: usize) -> Vec<u8> {
    let mut word = vec![0u8; m];
    for slot in word.iter_mut().rev() {
        *slot = (n % 3) as u8 + 1;
        n /= 3;
    }
    word
}

pub(crate) fn cell_count(m: usize) -> usize {
    3usize.pow(m as u32)
}

/// `(3^{m+1} + 3) / 2`
pub fn vertex_count(m: usize) -> usize {
    (3 * cell_count(m) + 3) / 2
}

/// All canonical vertices of `V_m`, sorted.
pub fn vertices_at_level(m: usize, cap: DepthCap) -> Result<Vec<CanonicalVertex>> {
    cap.check(m)?;
    let mut out = Vec::with_capacity(3 * cell_count(m));
    for n in 0..cell_count(m) {
        let word = cell_word(n, m);
        for t in 1..=3 {
            let v = canonicalize(&Address::new_unchecked(word.clone(), t));
            if v.address.word == word && v.address.terminal == t {
                out.push(v);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// One edge of `Γ_m`: the pair `(P_ω q_i, P_ω q_j)`, `i < j`, of cell `ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub cell: Vec<u8>,
    pub pair: (u8, u8),
    pub endpoints: (CanonicalVertex, CanonicalVertex),
}

pub const PAIRS: [(u8, u8); 3] = [(1, 2), (1, 3), (2, 3)];

/// Edges of `Γ_m`, three per cell, cells in lexicographic order.
pub fn edges_at_level(m: usize, cap: DepthCap) -> Result<Vec<Edge>> {
    cap.check(m)?;
    let mut out = Vec::with_capacity(3 * cell_count(m));
    for n in 0..cell_count(m) {
        let word = cell_word(n, m);
        for (i, j) in PAIRS {
            let a = canonicalize(&Address::new_unchecked(word.clone(), i));
            let b = canonicalize(&Address::new_unchecked(word.clone(), j));
            out.push(Edge {
                cell: word.clone(),
                pair: (i, j),
                endpoints: (a, b),
            });
        }
    }
    Ok(out)
}

/// Level-`m` neighbours of `v`, sorted.
pub fn neighbors(v: &CanonicalVertex, m: usize) -> Result<Vec<CanonicalVertex>> {
    if v.level != m {
        return Err(Error::NotInLevel {
            vertex: v.clone(),
            level: m,
        });
    }
    let mut out = Vec::with_capacity(4);
    for alias in v.aliases() {
        for s in (1..=3).filter(|&s| s != alias.terminal) {
            out.push(canonicalize(&Address::new_unchecked(alias.word.clone(), s)));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Planar triangle whose corners are the fixed points of `P_1, P_2, P_3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    pub corners: [[f64; 2]; 3],
}

impl Default for Triangle {
    fn default() -> Self {
        Triangle {
            corners: [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]],
        }
    }
}

impl Triangle {
    /// Apply the similitudes `P_ω` (ratio 1/2) to the corner `q_t`.
    pub fn embed(&self, a: &Address) -> [f64; 2] {
        let mut p = self.corners[a.terminal as usize - 1];
        for &l in a.word.iter().rev() {
            let c = self.corners[l as usize - 1];
            p = [(p[0] + c[0]) * 0.5, (p[1] + c[1]) * 0.5];
        }
        p
    }

    pub fn min_corner_distance(&self) -> f64 {
        let d = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
        let [p, q, r] = self.corners;
        d(p, q).min(d(p, r)).min(d(q, r))
    }
}

/// Embedding under the default triangle.
pub fn embed(v: &CanonicalVertex) -> [f64; 2] {
    Triangle::default().embed(&v.address)
}
