//! Residues mod d and the group Sp(d) of 2×2 matrices with unit determinant,
//! acting affinely on Weyl index pairs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Reduce any integer into `[0, d)`.
pub fn reduce(x: i64, d: u32) -> u32 {
    x.rem_euclid(d as i64) as u32
}

pub fn is_prime(d: u32) -> Result<bool> {
    if d < 2 {
        return Err(Error::domain(format!("primality is defined for d >= 2, got {d}")));
    }
    let mut k = 2u32;
    while k.saturating_mul(k) <= d {
        if d.is_multiple_of(k) {
            return Ok(false);
        }
        k += 1;
    }
    Ok(true)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Returns `(g, x, y)` with `a x + b y = g = gcd(a, b)`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

pub(crate) fn check_modulus(d: u32) -> Result<()> {
    if d < 2 {
        Err(Error::domain(format!("dimension must be >= 2, got {d}")))
    } else {
        Ok(())
    }
}

pub(crate) fn same_modulus(a: u32, b: u32) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ModulusMismatch(a, b))
    }
}

/// An element of Z_d, always stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u32,
    modulus: u32,
}

impl Residue {
    /// # Panics
    /// If `d < 2`.
    pub fn new(value: i64, d: u32) -> Self {
        assert!(d >= 2, "modulus must be >= 2");
        Residue { value: reduce(value, d), modulus: d }
    }

    pub fn zero(d: u32) -> Self {
        Residue::new(0, d)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    fn lift(self, other: Residue, v: u64) -> Residue {
        assert_eq!(self.modulus, other.modulus, "mixed-modulus residue arithmetic");
        Residue { value: (v % self.modulus as u64) as u32, modulus: self.modulus }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

// Mixed moduli panic: this arithmetic is only reachable with residues that
// already passed a modulus check at an API boundary.
impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.lift(rhs, self.value as u64 + rhs.value as u64)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.lift(rhs, self.value as u64 + (self.modulus - rhs.value) as u64)
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.lift(rhs, self.value as u64 * rhs.value as u64)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }
}

/// A matrix `[[alpha, beta], [gamma, delta]]` over Z_d with determinant 1.
///
/// Under conjugation by the associated unitary, `X ↦ X^alpha Z^gamma` and
/// `Z ↦ X^beta Z^delta` up to phases, so index pairs transform as
/// `(m, n) ↦ (alpha m + beta n, gamma m + delta n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpMatrixRepr", into = "SpMatrixRepr")]
pub struct SpMatrix {
    d: u32,
    entries: [u32; 4],
}

#[derive(Serialize, Deserialize)]
struct SpMatrixRepr {
    d: u32,
    sp: [[i64; 2]; 2],
}

impl TryFrom<SpMatrixRepr> for SpMatrix {
    type Error = Error;
    fn try_from(r: SpMatrixRepr) -> Result<Self> {
        SpMatrix::new(r.sp[0][0], r.sp[0][1], r.sp[1][0], r.sp[1][1], r.d)
    }
}

impl From<SpMatrix> for SpMatrixRepr {
    fn from(m: SpMatrix) -> Self {
        let [a, b, c, d] = m.entries.map(i64::from);
        SpMatrixRepr { d: m.d, sp: [[a, b], [c, d]] }
    }
}

impl SpMatrix {
    /// Reduces the entries mod `d` and accepts iff the determinant is 1.
    pub fn new(alpha: i64, beta: i64, gamma: i64, delta: i64, d: u32) -> Result<Self> {
        check_modulus(d)?;
        let entries = [alpha, beta, gamma, delta].map(|x| reduce(x, d));
        let [a, b, c, dd] = entries.map(i64::from);
        let det = reduce(a * dd - b * c, d);
        if det != 1 % d {
            return Err(Error::NotSymplectic { det, d });
        }
        Ok(SpMatrix { d, entries })
    }

    pub fn identity(d: u32) -> Result<Self> {
        SpMatrix::new(1, 0, 0, 1, d)
    }

    pub fn modulus(&self) -> u32 {
        self.d
    }

    pub fn alpha(&self) -> Residue {
        Residue::new(self.entries[0] as i64, self.d)
    }

    pub fn beta(&self) -> Residue {
        Residue::new(self.entries[1] as i64, self.d)
    }

    pub fn gamma(&self) -> Residue {
        Residue::new(self.entries[2] as i64, self.d)
    }

    pub fn delta(&self) -> Residue {
        Residue::new(self.entries[3] as i64, self.d)
    }

    /// `[alpha, beta, gamma, delta]` as reduced integers.
    pub fn entries(&self) -> [u32; 4] {
        self.entries
    }

    /// Matrix product `self · other` mod d.
    pub fn compose(&self, other: &SpMatrix) -> Result<SpMatrix> {
        same_modulus(self.d, other.d)?;
        let [a, b, c, d] = self.entries.map(i64::from);
        let [e, f, g, h] = other.entries.map(i64::from);
        SpMatrix::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.d)
    }

    pub fn inverse(&self) -> SpMatrix {
        let [a, b, c, d] = self.entries.map(i64::from);
        SpMatrix::new(d, -b, -c, a, self.d).expect("inverse of a unit-determinant matrix")
    }

    pub(crate) fn apply_raw(&self, m: u32, n: u32) -> (u32, u32) {
        let [a, b, c, dd] = self.entries.map(u64::from);
        let (m, n, d) = (m as u64, n as u64, self.d as u64);
        (((a * m + b * n) % d) as u32, ((c * m + dd * n) % d) as u32)
    }

    /// Every element of Sp(d), in lexicographic order of entries.
    pub fn enumerate(d: u32) -> Result<Vec<SpMatrix>> {
        check_modulus(d)?;
        let mut out = Vec::new();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for dd in 0..d {
                        let det = reduce(a as i64 * dd as i64 - b as i64 * c as i64, d);
                        if det == 1 {
                            out.push(SpMatrix { d, entries: [a, b, c, dd] });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Order of Sp(d) = d^3 ∏_{p | d} (1 - 1/p^2).
    pub fn group_order(d: u32) -> u64 {
        let mut order = (d as u64).pow(3);
        let mut rest = d as u64;
        let mut p = 2u64;
        while rest > 1 {
            if rest.is_multiple_of(p) {
                order = order / (p * p) * (p * p - 1);
                while rest.is_multiple_of(p) {
                    rest /= p;
                }
            }
            p += 1;
        }
        order
    }
}

impl fmt::Display for SpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.d)
    }
}

/// `(m, n) ↦ M (m, n)^T + (mu0, nu0)`: the index-pair law for local unitaries
/// that map every generalized Bell state to another one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineAction {
    pub matrix: SpMatrix,
    shift: (u32, u32),
}

impl AffineAction {
    pub fn new(matrix: SpMatrix, mu0: i64, nu0: i64) -> Self {
        let d = matrix.modulus();
        AffineAction { matrix, shift: (reduce(mu0, d), reduce(nu0, d)) }
    }

    pub fn linear(matrix: SpMatrix) -> Self {
        AffineAction::new(matrix, 0, 0)
    }

    pub fn identity(d: u32) -> Result<Self> {
        Ok(AffineAction::linear(SpMatrix::identity(d)?))
    }

    pub fn modulus(&self) -> u32 {
        self.matrix.modulus()
    }

    pub fn shift(&self) -> (Residue, Residue) {
        let d = self.modulus();
        (Residue::new(self.shift.0 as i64, d), Residue::new(self.shift.1 as i64, d))
    }

    pub fn apply(&self, pair: (Residue, Residue)) -> Result<(Residue, Residue)> {
        let d = self.modulus();
        same_modulus(d, pair.0.modulus())?;
        same_modulus(d, pair.1.modulus())?;
        let (m, n) = self.apply_raw(pair.0.value(), pair.1.value());
        Ok((Residue::new(m as i64, d), Residue::new(n as i64, d)))
    }

    pub(crate) fn apply_raw(&self, m: u32, n: u32) -> (u32, u32) {
        let d = self.modulus();
        let (m, n) = self.matrix.apply_raw(m, n);
        ((m + self.shift.0) % d, (n + self.shift.1) % d)
    }
}
