//! Weyl operators `ω^k X^m Z^n`, generalized Bell state sets and their dense
//! complex realizations.
//!
//! `X = Σ_a |a+1⟩⟨a|` and `Z = Σ_a ω^a |a⟩⟨a|` with `ω = exp(2πi/d)`, so that
//! `ZX = ω XZ`. A product of Weyl operators is kept in the normal form with
//! all X powers to the left; phases are exact exponents of ω.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use nalgebra::Complex;

use crate::zmod::{check_modulus, reduce, same_modulus, Residue};
use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type DenseMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Largest dimension accepted at the JSON boundary.
pub const MAX_DIMENSION: u32 = 64;

/// `exp(2πi k / d)`.
pub fn root_of_unity(k: i64, d: u32) -> C64 {
    let k = reduce(k, d);
    C64::from_polar(1.0, TAU * k as f64 / d as f64)
}

/// `ω^phase X^m Z^n` over Z_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylOp {
    d: u32,
    m: u32,
    n: u32,
    phase: u32,
}

impl WeylOp {
    pub fn new(m: i64, n: i64, phase: i64, d: u32) -> Result<Self> {
        check_modulus(d)?;
        Ok(WeylOp { d, m: reduce(m, d), n: reduce(n, d), phase: reduce(phase, d) })
    }

    /// `X^m Z^n` with trivial phase.
    pub fn gbs(m: i64, n: i64, d: u32) -> Result<Self> {
        WeylOp::new(m, n, 0, d)
    }

    pub fn identity(d: u32) -> Result<Self> {
        WeylOp::new(0, 0, 0, d)
    }

    pub(crate) fn raw(m: u32, n: u32, phase: u32, d: u32) -> Self {
        WeylOp { d, m: m % d, n: n % d, phase: phase % d }
    }

    pub fn modulus(&self) -> u32 {
        self.d
    }

    pub fn m(&self) -> Residue {
        Residue::new(self.m as i64, self.d)
    }

    pub fn n(&self) -> Residue {
        Residue::new(self.n as i64, self.d)
    }

    pub fn phase_exp(&self) -> Residue {
        Residue::new(self.phase as i64, self.d)
    }

    pub fn indices(&self) -> (u32, u32) {
        (self.m, self.n)
    }

    /// `self · other`, using `Z^n X^m = ω^{nm} X^m Z^n`.
    pub fn compose(&self, other: &WeylOp) -> Result<WeylOp> {
        same_modulus(self.d, other.d)?;
        let d = self.d as u64;
        let phase = (self.phase as u64 + other.phase as u64 + self.n as u64 * other.m as u64) % d;
        Ok(WeylOp::raw(self.m + other.m, self.n + other.n, phase as u32, self.d))
    }

    pub fn adjoint(&self) -> WeylOp {
        let d = self.d as i64;
        WeylOp::new(
            -(self.m as i64),
            -(self.n as i64),
            -(self.phase as i64) + (self.n as i64 * self.m as i64) % d,
            self.d,
        )
        .expect("valid modulus")
    }

    pub fn pow(&self, k: u32) -> WeylOp {
        let mut acc = WeylOp::raw(0, 0, 0, self.d);
        for _ in 0..k {
            acc = acc.compose(self).expect("same modulus");
        }
        acc
    }

    /// Dense `d × d` matrix of `ω^phase X^m Z^n`.
    pub fn matrix(&self) -> DenseMatrix {
        let d = self.d as usize;
        let scale = root_of_unity(self.phase as i64, self.d);
        let mut out = DenseMatrix::zeros(d, d);
        for a in 0..d {
            // X^m Z^n |a⟩ = ω^{na} |a+m⟩
            let row = (a + self.m as usize) % d;
            out[(row, a)] = scale * root_of_unity(self.n as i64 * a as i64, self.d);
        }
        out
    }

    /// `ω^phase X^m Z^n |v⟩` without forming the matrix.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.d as usize;
        assert_eq!(v.len(), d, "vector dimension must equal d");
        let scale = root_of_unity(self.phase as i64, self.d);
        let mut out = vec![C64::new(0.0, 0.0); d];
        for (a, x) in v.iter().enumerate() {
            out[(a + self.m as usize) % d] = scale * root_of_unity(self.n as i64 * a as i64, self.d) * x;
        }
        out
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω^{} X^{} Z^{} (d={})", self.phase, self.m, self.n, self.d)
    }
}

/// `⟨W1|W2⟩ = tr(W1† W2) / d`, evaluated exactly: zero unless the index pairs
/// coincide, otherwise the phase `ω^{p2 - p1}`.
pub fn mes_inner(w1: &WeylOp, w2: &WeylOp) -> Result<C64> {
    same_modulus(w1.d, w2.d)?;
    if (w1.m, w1.n) != (w2.m, w2.n) {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(root_of_unity(w2.phase as i64 - w1.phase as i64, w1.d))
}

/// Amplitudes of `|W⟩ = (W ⊗ 1)|1⟩` in the basis `|a⟩_A ⊗ |b⟩_B`, index `a d + b`.
pub fn gbs_state_vector(w: &WeylOp) -> StateVector {
    let d = w.d as usize;
    let mat = w.matrix();
    let norm = (d as f64).sqrt();
    StateVector::from_fn(d * d, |idx, _| mat[(idx / d, idx % d)] / norm)
}

/// A set of generalized Bell states `{|X^{m_i} Z^{n_i}⟩}` in dimension `d`.
///
/// Pairs are reduced, pairwise distinct and kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GbsSetRepr", into = "GbsSetRepr")]
pub struct GbsSet {
    d: u32,
    pairs: Vec<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct GbsSetRepr {
    d: u32,
    states: Vec<[i64; 2]>,
}

impl TryFrom<GbsSetRepr> for GbsSet {
    type Error = Error;
    fn try_from(r: GbsSetRepr) -> Result<Self> {
        GbsSet::new(r.d, r.states.iter().map(|s| (s[0], s[1])))
    }
}

impl From<GbsSet> for GbsSetRepr {
    fn from(s: GbsSet) -> Self {
        GbsSetRepr { d: s.d, states: s.pairs.iter().map(|&(m, n)| [m as i64, n as i64]).collect() }
    }
}

impl GbsSet {
    pub fn new(d: u32, pairs: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        check_modulus(d)?;
        if d > MAX_DIMENSION {
            return Err(Error::domain(format!("dimension {d} exceeds the supported maximum {MAX_DIMENSION}")));
        }
        let pairs: Vec<(u32, u32)> = pairs.into_iter().map(|(m, n)| (reduce(m, d), reduce(n, d))).collect();
        Self::from_reduced(d, pairs)
    }

    pub(crate) fn from_reduced(d: u32, mut pairs: Vec<(u32, u32)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::domain("a GBS set needs at least one state"));
        }
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("duplicate state ({}, {}) in GBS set", w[0].0, w[0].1)));
        }
        Ok(GbsSet { d, pairs })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("GbsSet serializes")
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn ops(&self) -> impl Iterator<Item = WeylOp> + '_ {
        self.pairs.iter().map(move |&(m, n)| WeylOp::raw(m, n, 0, self.d))
    }

    /// Index of a pair in the canonical order.
    pub fn position(&self, m: u32, n: u32) -> Option<usize> {
        self.pairs.binary_search(&(m, n)).ok()
    }
}

impl fmt::Display for GbsSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} {{", self.d)?;
        for (i, (m, n)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({m},{n})")?;
        }
        write!(f, "}}")
    }
}
