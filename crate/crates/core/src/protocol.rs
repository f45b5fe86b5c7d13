//! Monte-Carlo simulation of the computational-basis protocol for F-type sets.
//!
//! `|X^m Z^n⟩ = Σ_a ω^{na} |a+m⟩|a⟩ / √d`, so measuring both halves in the
//! computational basis yields `(a + m, a)` with `a` uniform; the phase `n`
//! never shows up. Alice and Bob compare outcomes and read off `m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::is_f_type;
use crate::weyl::{GbsSet, WeylOp};
use crate::{Error, Result};

/// Trials per independent RNG stream. Fixed so results do not depend on the
/// number of worker threads.
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub true_index: usize,
    pub alice_outcome: u32,
    pub bob_outcome: u32,
    pub decoded_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub trials: u64,
    pub success_rate: f64,
    /// `confusion[true][decoded]`.
    pub confusion: Vec<Vec<u64>>,
}

/// Joint computational-basis outcome `(a_A, a_B)` for the state `|W⟩`.
pub fn sample_outcomes<R: Rng + ?Sized>(w: &WeylOp, rng: &mut R) -> (u32, u32) {
    let d = w.modulus();
    let bob = rng.random_range(0..d);
    let (m, _) = w.indices();
    ((bob + m) % d, bob)
}

/// `m ↦ index` for an F-type set.
fn decoder(s: &GbsSet) -> Result<Vec<Option<usize>>> {
    if !is_f_type(s) {
        return Err(Error::domain(format!(
            "{s} is not F type: the X exponents must be pairwise distinct"
        )));
    }
    let mut table = vec![None; s.dimension() as usize];
    for (i, &(m, _)) in s.pairs().iter().enumerate() {
        table[m as usize] = Some(i);
    }
    Ok(table)
}

fn trial<R: Rng + ?Sized>(s: &GbsSet, table: &[Option<usize>], rng: &mut R) -> TrialRecord {
    let d = s.dimension();
    let true_index = rng.random_range(0..s.len());
    let (m, n) = s.pairs()[true_index];
    let w = WeylOp::gbs(m as i64, n as i64, d).expect("valid set");
    let (alice_outcome, bob_outcome) = sample_outcomes(&w, rng);
    let diff = (alice_outcome + d - bob_outcome) % d;
    TrialRecord { true_index, alice_outcome, bob_outcome, decoded_index: table[diff as usize] }
}

pub fn run_trial<R: Rng + ?Sized>(s: &GbsSet, rng: &mut R) -> Result<TrialRecord> {
    Ok(trial(s, &decoder(s)?, rng))
}

pub fn simulate_discrimination(s: &GbsSet, trials: u64, seed: u64) -> Result<ProtocolReport> {
    let table = decoder(s)?;
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let l = s.len();
    let chunks = trials.div_ceil(CHUNK);
    let confusion = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(trials - c * CHUNK);
            // the last column counts undecodable outcomes
            let mut local = vec![vec![0u64; l + 1]; l];
            for _ in 0..count {
                let t = trial(s, &table, &mut rng);
                local[t.true_index][t.decoded_index.unwrap_or(l)] += 1;
            }
            local
        })
        .reduce(
            || vec![vec![0u64; l + 1]; l],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );
    let correct: u64 = (0..l).map(|i| confusion[i][i]).sum();
    let lost: u64 = confusion.iter().map(|r| r[l]).sum();
    debug_assert_eq!(lost, 0, "F-type decoding never fails");
    Ok(ProtocolReport {
        trials,
        success_rate: correct as f64 / trials as f64,
        confusion: confusion.into_iter().map(|mut r| {
            r.truncate(l);
            r
        })
        .collect(),
    })
}
