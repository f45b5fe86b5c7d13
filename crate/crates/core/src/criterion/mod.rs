//! Decision procedures for local distinguishability of GBS sets.
//!
//! A set `{(m_i, n_i)}` is *F type* when the `m_i` are pairwise distinct: both
//! parties then measure in the computational basis and the difference of
//! their outcomes reveals `m_i`. It is *F equivalent* when some local Clifford
//! maps it to an F-type set, which happens iff `m_i α + n_i β` are pairwise
//! distinct mod d for some integers `(α, β)`. F equivalence always gives a
//! one-way LOCC protocol. For prime `d` and exactly `d` states it is also
//! necessary, even for two-way LOCC: a one-way protocol forces a vanishing
//! character sum `Σ_i ω^{n_i m - m_i n}`, and over a prime modulus `d` roots of
//! unity sum to zero only when their exponents are a permutation of `0..d`.

pub mod cyclotomic;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use cyclotomic::{cyclotomic_poly, vanishing_sum_is_zero, CyclotomicInt, IntPoly};

use crate::weyl::GbsSet;
use crate::zmod::{is_prime, reduce};
use crate::{Error, Result};

/// `(α, β)` making `m_i α + n_i β` pairwise distinct mod d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct FWitness {
    pub alpha: u32,
    pub beta: u32,
}

impl From<[u32; 2]> for FWitness {
    fn from([alpha, beta]: [u32; 2]) -> Self {
        FWitness { alpha, beta }
    }
}

impl From<FWitness> for [u32; 2] {
    fn from(w: FWitness) -> Self {
        [w.alpha, w.beta]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Distinguishable,
    Indistinguishable,
    DistinguishableOneWayCertified,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<FWitness>,
    pub detail: String,
}

/// Marker carried in the detail of every verdict outside prime `d` with `ℓ = d`.
pub const SUFFICIENCY_ONLY: &str = "sufficiency only";

pub fn is_f_type(s: &GbsSet) -> bool {
    let mut seen = vec![false; s.dimension() as usize];
    s.pairs().iter().all(|&(m, _)| !std::mem::replace(&mut seen[m as usize], true))
}

fn projections_distinct(s: &GbsSet, alpha: u32, beta: u32, seen: &mut [bool]) -> bool {
    let d = s.dimension() as u64;
    seen.iter_mut().for_each(|x| *x = false);
    s.pairs().iter().all(|&(m, n)| {
        let v = ((m as u64 * alpha as u64 + n as u64 * beta as u64) % d) as usize;
        !std::mem::replace(&mut seen[v], true)
    })
}

/// Lexicographically first `(α, β)` over `Z_d × Z_d` separating the set.
pub fn f_equivalence_witness(s: &GbsSet) -> Option<FWitness> {
    let d = s.dimension();
    if s.len() > d as usize {
        return None;
    }
    let mut seen = vec![false; d as usize];
    (0..d)
        .flat_map(|alpha| (0..d).map(move |beta| (alpha, beta)))
        .find(|&(alpha, beta)| projections_distinct(s, alpha, beta, &mut seen))
        .map(|(alpha, beta)| FWitness { alpha, beta })
}

/// Re-checks a witness from scratch.
pub fn verify_witness(s: &GbsSet, w: FWitness) -> bool {
    let d = s.dimension() as i64;
    let values: HashSet<i64> = s
        .pairs()
        .iter()
        .map(|&(m, n)| (m as i64 * w.alpha as i64 + n as i64 * w.beta as i64).rem_euclid(d))
        .collect();
    values.len() == s.len()
}

/// Exponents `n_i m - m_i n mod d` of the character sum at `(m, n)`.
pub fn kappa_exponents(s: &GbsSet, m: u32, n: u32) -> Vec<u32> {
    let d = s.dimension();
    s.pairs()
        .iter()
        .map(|&(mi, ni)| reduce(ni as i64 * m as i64 - mi as i64 * n as i64, d))
        .collect()
}

/// `d · κ_{mn} = Σ_i ω^{n_i m - m_i n}` as an exact cyclotomic integer.
pub fn kappa(s: &GbsSet, m: u32, n: u32) -> CyclotomicInt {
    CyclotomicInt::from_exponents(s.dimension(), kappa_exponents(s, m, n).into_iter().map(i64::from))
        .expect("valid dimension")
}

/// For prime `d`: whether `Σ_i ω^{ν_i}` vanishes, given exactly `d` exponents.
/// The answer coincides with the exponents being a permutation of `0..d`.
pub fn prime_root_sum_vanishes(exponents: &[i64], d: u32) -> Result<bool> {
    if !is_prime(d)? {
        return Err(Error::domain(format!(
            "the vanishing-sum characterization needs a prime dimension, got d = {d}"
        )));
    }
    if exponents.len() != d as usize {
        return Err(Error::domain(format!("expected {d} exponents, got {}", exponents.len())));
    }
    Ok(CyclotomicInt::from_exponents(d, exponents.iter().copied())?.is_zero())
}

/// All `(m, n)` whose character sum vanishes exactly.
pub fn vanishing_pairs(s: &GbsSet) -> Vec<(u32, u32)> {
    let d = s.dimension();
    let phi = cyclotomic_poly(d as usize).expect("d >= 2");
    (0..d)
        .flat_map(|m| (0..d).map(move |n| (m, n)))
        .filter(|&(m, n)| kappa(s, m, n).reduced_by(&phi).is_zero())
        .collect()
}

/// First `(m, n)` whose character sum vanishes exactly and whose exponents are
/// pairwise distinct. For prime `d`, `ℓ = d`, this exists iff the set is F
/// equivalent, with `(α, β) = (-n, m)` a witness.
pub fn distinct_vanishing_pair(s: &GbsSet) -> Option<(u32, u32)> {
    vanishing_pairs(s).into_iter().find(|&(m, n)| {
        let e = kappa_exponents(s, m, n);
        e.iter().collect::<HashSet<_>>().len() == e.len()
    })
}

/// `{(m_i - m_j, n_i - n_j) : i ≠ j}`.
pub fn difference_pairs(s: &GbsSet) -> HashSet<(u32, u32)> {
    let d = s.dimension() as i64;
    let p = s.pairs();
    let mut out = HashSet::new();
    for (i, a) in p.iter().enumerate() {
        for (j, b) in p.iter().enumerate() {
            if i != j {
                out.insert((
                    (a.0 as i64 - b.0 as i64).rem_euclid(d) as u32,
                    (a.1 as i64 - b.1 as i64).rem_euclid(d) as u32,
                ));
            }
        }
    }
    out
}

/// Indistinguishability detector for `ℓ = d` sets: fires when every `(m, n)`
/// with vanishing character sum `Σ_i ω^{m n_i - n m_i}` is a difference pair.
/// A `true` answer means the set cannot be distinguished by any LOCC protocol.
pub fn yu_oh_indistinguishable(s: &GbsSet) -> Result<bool> {
    let d = s.dimension();
    if s.len() != d as usize {
        return Err(Error::domain(format!(
            "the detector applies to sets of exactly d = {d} states, got {}",
            s.len()
        )));
    }
    let diffs = difference_pairs(s);
    Ok(vanishing_pairs(s).iter().all(|p| diffs.contains(p)))
}

/// Exact dichotomy for prime `d` and `ℓ = d`.
pub fn classify_prime(s: &GbsSet) -> Result<Verdict> {
    let d = s.dimension();
    if !is_prime(d)? || s.len() != d as usize {
        return Err(Error::domain(format!(
            "the exact classifier needs prime d and exactly d states (got d = {d}, {} states); \
             use f_equivalence_witness for the sufficient condition",
            s.len()
        )));
    }
    Ok(match f_equivalence_witness(s) {
        Some(w) => Verdict {
            status: Status::Distinguishable,
            witness: Some(w),
            detail: format!(
                "prime d = {d} with {d} states: F equivalent via (alpha, beta) = ({}, {}), \
                 LOCC distinguishable (one-way suffices)",
                w.alpha, w.beta
            ),
        },
        None => Verdict {
            status: Status::Indistinguishable,
            witness: None,
            detail: format!(
                "prime d = {d} with {d} states: not F equivalent, hence not distinguishable \
                 by LOCC, one-way or two-way"
            ),
        },
    })
}

/// Best available verdict for any set: exact for prime `d` with `ℓ = d`,
/// otherwise the sufficient condition only.
pub fn classify(s: &GbsSet) -> Verdict {
    let d = s.dimension();
    let l = s.len();
    if l == d as usize && is_prime(d).unwrap_or(false) {
        return classify_prime(s).expect("hypotheses checked");
    }
    if l > d as usize {
        return Verdict {
            status: Status::Unknown,
            witness: None,
            detail: format!(
                "{SUFFICIENCY_ONLY}: {l} states exceed d = {d}; more than d maximally entangled \
                 states are never perfectly distinguishable by LOCC"
            ),
        };
    }
    match f_equivalence_witness(s) {
        Some(w) => Verdict {
            status: Status::DistinguishableOneWayCertified,
            witness: Some(w),
            detail: format!(
                "{SUFFICIENCY_ONLY}: F equivalent via (alpha, beta) = ({}, {}), one-way LOCC \
                 distinguishable; necessity is only established for prime d with d states",
                w.alpha, w.beta
            ),
        },
        None => Verdict {
            status: Status::Unknown,
            witness: None,
            detail: format!(
                "{SUFFICIENCY_ONLY}: no F-equivalence witness; local distinguishability is \
                 undecided for d = {d} with {l} states"
            ),
        },
    }
}
