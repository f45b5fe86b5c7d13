//! Classification of every (or a seeded sample of) ℓ-subset of the d² GBSs.
//!
//! Subsets are indexed by their rank in the lexicographic order of
//! combinations of the flattened indices `p = m d + n`, which is also the
//! canonical order of [`GbsSet`]. Rows are written as JSON lines in rank
//! order. A checkpoint file records how far the run got together with the
//! SHA-256 of the rows written so far, so an interrupted run resumes to
//! byte-identical output.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criterion::{
    classify, f_equivalence_witness, is_f_type, verify_witness, yu_oh_indistinguishable, FWitness, Status,
    Verdict,
};
use crate::oracle::{eigenstate_phi, search_phi, verify_ghosh, OracleStatus, SearchConfig};
use crate::weyl::GbsSet;
use crate::zmod::{check_modulus, SpMatrix};
use crate::{Error, Result};

/// Default cap on the number of subsets an exhaustive run may visit.
pub const DEFAULT_CEILING: u64 = 10_000_000;
/// Cap on `|Sp(d)| · d²` for orbit canonicalization.
pub const ORBIT_CEILING: u64 = 2_000_000;
/// Largest dimension the census accepts.
pub const MAX_CENSUS_D: u32 = 8;

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).unwrap_or(u64::MAX)
}

/// The `rank`-th k-combination of `0..n` in lexicographic order.
pub fn unrank_combination(n: u64, k: u64, mut rank: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(k as usize);
    let mut next = 0;
    for slot in 0..k {
        let mut c = next;
        loop {
            let below = binomial(n - c - 1, k - slot - 1);
            if rank < below {
                break;
            }
            rank -= below;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

/// Lexicographic stream of ℓ-subsets, restartable at any rank.
#[derive(Debug, Clone)]
pub struct SubsetIter {
    d: u32,
    n: u64,
    current: Option<Vec<u64>>,
}

impl SubsetIter {
    fn advance(&mut self) {
        let Some(c) = self.current.as_mut() else { return };
        let k = c.len();
        let n = self.n;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if c[i] < n - (k - i) as u64 {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                return;
            }
        }
        self.current = None;
    }
}

impl Iterator for SubsetIter {
    type Item = GbsSet;

    fn next(&mut self) -> Option<GbsSet> {
        let c = self.current.as_ref()?;
        let set = subset_from_indices(self.d, c);
        self.advance();
        Some(set)
    }
}

fn subset_from_indices(d: u32, idx: &[u64]) -> GbsSet {
    let pairs = idx.iter().map(|&p| ((p / d as u64) as u32, (p % d as u64) as u32)).collect();
    GbsSet::from_reduced(d, pairs).expect("combinations are distinct")
}

pub fn subset_at_rank(d: u32, l: usize, rank: u64) -> GbsSet {
    subset_from_indices(d, &unrank_combination((d * d) as u64, l as u64, rank))
}

fn check_shape(d: u32, l: usize) -> Result<u64> {
    check_modulus(d)?;
    let n = (d * d) as usize;
    if l == 0 || l > n {
        return Err(Error::domain(format!("subset size must be in 1..={n}, got {l}")));
    }
    Ok(binomial(n as u64, l as u64))
}

pub fn enumerate_subsets(d: u32, l: usize, ceiling: u64) -> Result<SubsetIter> {
    enumerate_subsets_from(d, l, 0, ceiling)
}

pub fn enumerate_subsets_from(d: u32, l: usize, start_rank: u64, ceiling: u64) -> Result<SubsetIter> {
    let total = check_shape(d, l)?;
    if total > ceiling {
        return Err(Error::domain(format!("C({}, {l}) = {total} subsets exceed the ceiling {ceiling}", d * d)));
    }
    let n = (d * d) as u64;
    let current = (start_rank < total).then(|| unrank_combination(n, l as u64, start_rank));
    Ok(SubsetIter { d, n, current })
}

/// Lexicographically least set in the orbit of `s` under all affine Sp(d)
/// actions.
pub fn orbit_canonical(s: &GbsSet) -> Result<GbsSet> {
    let d = s.dimension();
    let work = SpMatrix::group_order(d) * (d as u64) * (d as u64);
    if work > ORBIT_CEILING {
        return Err(Error::domain(format!("orbit of size {work} exceeds the ceiling {ORBIT_CEILING}")));
    }
    let mut best = s.pairs().to_vec();
    let mut buf = Vec::with_capacity(s.len());
    for m in SpMatrix::enumerate(d)? {
        let linear: Vec<(u32, u32)> = s.pairs().iter().map(|&(a, b)| m.apply_raw(a, b)).collect();
        for mu in 0..d {
            for nu in 0..d {
                buf.clear();
                buf.extend(linear.iter().map(|&(a, b)| ((a + mu) % d, (b + nu) % d)));
                buf.sort_unstable();
                if buf < best {
                    best.clone_from(&buf);
                }
            }
        }
    }
    GbsSet::from_reduced(d, best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CensusMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub restarts: u32,
    pub max_iters: u32,
    pub tol: f64,
    pub seed: u64,
}

impl OracleBudget {
    fn search_config(&self) -> SearchConfig {
        SearchConfig { restarts: self.restarts, max_iters: self.max_iters, tol: self.tol, seed: self.seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusConfig {
    pub d: u32,
    pub l: usize,
    pub mode: CensusMode,
    /// `None` skips all oracle work.
    pub oracle: Option<OracleBudget>,
    /// Final JSONL path; `<out>.partial`, `<out>.ckpt` and `<out>.summary.json`
    /// live next to it.
    pub out: PathBuf,
    pub checkpoint_every: u64,
    pub jobs: usize,
    pub ceiling: u64,
}

impl CensusConfig {
    pub fn new(d: u32, l: usize, mode: CensusMode, out: impl Into<PathBuf>) -> Self {
        CensusConfig {
            d,
            l,
            mode,
            oracle: None,
            out: out.into(),
            checkpoint_every: 4096,
            jobs: 1,
            ceiling: DEFAULT_CEILING,
        }
    }

    fn fingerprint(&self) -> String {
        serde_json::json!({
            "d": self.d,
            "l": self.l,
            "mode": self.mode,
            "oracle": self.oracle,
        })
        .to_string()
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn partial_path(out: &Path) -> PathBuf {
    sibling(out, ".partial")
}

pub fn checkpoint_path(out: &Path) -> PathBuf {
    sibling(out, ".ckpt")
}

pub fn summary_path(out: &Path) -> PathBuf {
    sibling(out, ".summary.json")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub status: OracleStatus,
    pub residual: f64,
    /// `"eigenstate"` for witness-derived states, `"search"` for numerical search.
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub rank: u64,
    pub set: GbsSet,
    pub f_type: bool,
    pub f_equivalent: bool,
    pub witness: Option<FWitness>,
    /// Indistinguishability detector, evaluated only when `ℓ = d`.
    pub yu_oh: Option<bool>,
    pub oracle_status: Option<OracleSummary>,
    /// Criterion-level verdict; numerical certificates live in `oracle_status`.
    pub verdict: Verdict,
}

pub fn classify_row(rank: u64, set: GbsSet, oracle: Option<&OracleBudget>) -> Result<CensusRow> {
    let f_type = is_f_type(&set);
    let witness = f_equivalence_witness(&set);
    let yu_oh = if set.len() == set.dimension() as usize { Some(yu_oh_indistinguishable(&set)?) } else { None };
    let verdict = classify(&set);
    let oracle_status = match (oracle, witness) {
        (None, _) => None,
        (Some(_), Some(w)) => {
            let phi = eigenstate_phi(&set, w)?;
            let check = verify_ghosh(&set, &phi)?;
            let status = if check.ok { OracleStatus::CertifiedOneWay } else { OracleStatus::Inconclusive };
            Some(OracleSummary { status, residual: check.residual, method: "eigenstate".into() })
        }
        (Some(budget), None) => {
            let report = search_phi(&set, &budget.search_config());
            Some(OracleSummary { status: report.status, residual: report.residual, method: "search".into() })
        }
    };
    Ok(CensusRow { rank, set, f_type, f_equivalent: witness.is_some(), witness, yu_oh, oracle_status, verdict })
}

/// Row-level invariants, re-checked from scratch.
pub fn check_row(row: &CensusRow) -> Result<()> {
    let fail = |msg: &str| Err(Error::Numeric(format!("row {}: {msg}", row.rank)));
    if row.f_type != is_f_type(&row.set) {
        return fail("f_type flag disagrees with the set");
    }
    if row.f_type && !verify_witness(&row.set, FWitness { alpha: 1, beta: 0 }) {
        return fail("F-type set without the trivial witness");
    }
    if row.f_type && !row.f_equivalent {
        return fail("F-type set marked not F equivalent");
    }
    if row.f_equivalent != row.witness.is_some() {
        return fail("f_equivalent flag disagrees with the witness");
    }
    if let Some(w) = row.witness {
        if !verify_witness(&row.set, w) {
            return fail("witness does not separate the set");
        }
    }
    let d = row.set.dimension();
    if row.set.len() == d as usize && crate::zmod::is_prime(d)? {
        let expected = if row.f_equivalent { Status::Distinguishable } else { Status::Indistinguishable };
        if row.verdict.status != expected {
            return fail("verdict disagrees with F equivalence at prime d");
        }
    }
    Ok(())
}

pub fn load_rows(path: &Path) -> Result<Vec<CensusRow>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for line in reader.lines() {
        let row: CensusRow = serde_json::from_str(&line?)?;
        check_row(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub d: u32,
    pub l: usize,
    pub mode: CensusMode,
    pub oracle: Option<OracleBudget>,
    pub total: u64,
    pub f_type: u64,
    pub f_equivalent: u64,
    pub no_witness: u64,
    pub verdicts: BTreeMap<String, u64>,
    /// Number of sets where the detector fired (`ℓ = d` only).
    pub yu_oh_fires: Option<u64>,
    pub oracle_certified: u64,
    pub oracle_inconclusive: u64,
    /// Certified by the oracle although no witness exists.
    pub oracle_only_certified: u64,
    pub oracle_only_sets: Vec<GbsSet>,
    /// Distinct orbit classes among the oracle-only sets.
    pub oracle_only_classes: Vec<GbsSet>,
}

impl CensusSummary {
    pub fn from_rows(cfg: &CensusConfig, rows: &[CensusRow]) -> Result<Self> {
        let mut verdicts = BTreeMap::new();
        for r in rows {
            let key = serde_json::to_value(r.verdict.status)?.as_str().unwrap_or_default().to_string();
            *verdicts.entry(key).or_insert(0) += 1;
        }
        let certified = |r: &&CensusRow| {
            r.oracle_status.as_ref().is_some_and(|o| o.status == OracleStatus::CertifiedOneWay)
        };
        let oracle_only_sets: Vec<GbsSet> =
            rows.iter().filter(|r| !r.f_equivalent).filter(certified).map(|r| r.set.clone()).collect();
        let mut oracle_only_classes: Vec<GbsSet> = Vec::new();
        for s in &oracle_only_sets {
            if let Ok(c) = orbit_canonical(s) {
                if !oracle_only_classes.contains(&c) {
                    oracle_only_classes.push(c);
                }
            }
        }
        oracle_only_classes.sort();
        let count = |f: &dyn Fn(&CensusRow) -> bool| rows.iter().filter(|r| f(r)).count() as u64;
        Ok(CensusSummary {
            d: cfg.d,
            l: cfg.l,
            mode: cfg.mode,
            oracle: cfg.oracle,
            total: rows.len() as u64,
            f_type: count(&|r| r.f_type),
            f_equivalent: count(&|r| r.f_equivalent),
            no_witness: count(&|r| r.witness.is_none()),
            verdicts,
            yu_oh_fires: (cfg.l == cfg.d as usize).then(|| count(&|r| r.yu_oh == Some(true))),
            oracle_certified: rows.iter().filter(certified).count() as u64,
            oracle_inconclusive: count(&|r| {
                r.oracle_status.as_ref().is_some_and(|o| o.status == OracleStatus::Inconclusive)
            }),
            oracle_only_certified: oracle_only_sets.len() as u64,
            oracle_only_sets,
            oracle_only_classes,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    next_index: u64,
    bytes: u64,
    sha256: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = sibling(path, ".tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Ranks visited by the run, in output order.
pub fn census_ranks(d: u32, l: usize, mode: &CensusMode, ceiling: u64) -> Result<Vec<u64>> {
    let total = check_shape(d, l)?;
    match *mode {
        CensusMode::Exhaustive => {
            if total > ceiling {
                return Err(Error::domain(format!(
                    "exhaustive census of C({}, {l}) = {total} subsets exceeds the ceiling {ceiling}",
                    d * d
                )));
            }
            Ok((0..total).collect())
        }
        CensusMode::Sample { count, seed } => {
            if count > total {
                return Err(Error::domain(format!("cannot sample {count} of {total} subsets")));
            }
            let total = usize::try_from(total).map_err(|_| Error::domain("population too large to sample"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ranks: Vec<u64> =
                rand::seq::index::sample(&mut rng, total, count as usize).into_iter().map(|r| r as u64).collect();
            ranks.sort_unstable();
            Ok(ranks)
        }
    }
}

/// Resumes from a checkpoint if one matches the config; otherwise starts
/// fresh. Returns the summary once every row is written.
pub fn run_census(cfg: &CensusConfig) -> Result<CensusSummary> {
    run_census_until(cfg, None)?.ok_or_else(|| Error::Numeric("census stopped early".into()))
}

/// As [`run_census`], but stops after at least `stop_after` new rows (at a
/// checkpoint boundary) and returns `None`, leaving the checkpoint in place.
pub fn run_census_until(cfg: &CensusConfig, stop_after: Option<u64>) -> Result<Option<CensusSummary>> {
    if cfg.d > MAX_CENSUS_D {
        return Err(Error::domain(format!("census supports d <= {MAX_CENSUS_D}, got {}", cfg.d)));
    }
    if cfg.checkpoint_every == 0 {
        return Err(Error::domain("checkpoint interval must be positive"));
    }
    let ranks = census_ranks(cfg.d, cfg.l, &cfg.mode, cfg.ceiling)?;
    let partial = partial_path(&cfg.out);
    let ckpt_path = checkpoint_path(&cfg.out);
    let fingerprint = cfg.fingerprint();

    let mut hasher = Sha256::new();
    let mut start = 0u64;
    let mut bytes = 0u64;
    if ckpt_path.exists() {
        let ckpt: Checkpoint = serde_json::from_str(&fs::read_to_string(&ckpt_path)?)?;
        if ckpt.fingerprint != fingerprint {
            return Err(Error::domain(format!(
                "checkpoint {} belongs to a different census configuration",
                ckpt_path.display()
            )));
        }
        let mut prefix = Vec::with_capacity(ckpt.bytes as usize);
        File::open(&partial)?.take(ckpt.bytes).read_to_end(&mut prefix)?;
        hasher.update(&prefix);
        if prefix.len() as u64 != ckpt.bytes || hex(&hasher.clone().finalize()) != ckpt.sha256 {
            return Err(Error::Numeric(format!(
                "partial output {} does not match its checkpoint",
                partial.display()
            )));
        }
        start = ckpt.next_index;
        bytes = ckpt.bytes;
    }
    let file = OpenOptions::new().create(true).write(true).truncate(start == 0).open(&partial)?;
    file.set_len(bytes)?;
    let mut file = OpenOptions::new().append(true).open(&partial)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let mut done_now = 0u64;
    let mut next = start as usize;
    while next < ranks.len() {
        let end = (next + cfg.checkpoint_every as usize).min(ranks.len());
        let lines: Vec<String> = pool.install(|| {
            ranks[next..end]
                .par_iter()
                .map(|&rank| {
                    let set = subset_at_rank(cfg.d, cfg.l, rank);
                    let row = classify_row(rank, set, cfg.oracle.as_ref())?;
                    let mut line = serde_json::to_string(&row)?;
                    line.push('\n');
                    Ok(line)
                })
                .collect::<Result<Vec<String>>>()
        })?;
        for line in &lines {
            file.write_all(line.as_bytes())?;
            hasher.update(line.as_bytes());
            bytes += line.len() as u64;
        }
        file.sync_data()?;
        done_now += (end - next) as u64;
        next = end;
        let ckpt = Checkpoint {
            fingerprint: fingerprint.clone(),
            next_index: next as u64,
            bytes,
            sha256: hex(&hasher.clone().finalize()),
        };
        write_atomic(&ckpt_path, serde_json::to_string(&ckpt)?.as_bytes())?;
        if stop_after.is_some_and(|s| done_now >= s) && next < ranks.len() {
            return Ok(None);
        }
    }
    drop(file);

    fs::rename(&partial, &cfg.out)?;
    let rows = load_rows(&cfg.out)?;
    let summary = CensusSummary::from_rows(cfg, &rows)?;
    write_atomic(&summary_path(&cfg.out), serde_json::to_string_pretty(&summary)?.as_bytes())?;
    fs::remove_file(&ckpt_path)?;
    Ok(Some(summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::transform_set;
    use crate::zmod::AffineAction;
    use rand::Rng;

    #[test]
    fn subset_counts() {
        assert_eq!(enumerate_subsets(2, 2, u64::MAX).unwrap().count(), 6);
        assert_eq!(enumerate_subsets(3, 3, u64::MAX).unwrap().count(), 84);
        assert_eq!(binomial(36, 6), 1_947_792);
        assert!(enumerate_subsets(6, 6, 1_000_000).is_err());
        assert!(enumerate_subsets(3, 0, u64::MAX).is_err());
        assert!(enumerate_subsets(3, 10, u64::MAX).is_err());
    }

    #[test]
    fn stream_is_lexicographic_and_canonical() {
        let all: Vec<GbsSet> = enumerate_subsets(3, 3, u64::MAX).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0].pairs() < w[1].pairs()));
        assert_eq!(all[0].pairs(), &[(0, 0), (0, 1), (0, 2)]);
        assert_eq!(all[83].pairs(), &[(2, 0), (2, 1), (2, 2)]);
    }

    #[test]
    fn unranking_matches_stream() {
        for (d, l) in [(2u32, 2usize), (3, 3), (3, 4), (4, 2)] {
            let all: Vec<GbsSet> = enumerate_subsets(d, l, u64::MAX).unwrap().collect();
            for (rank, s) in all.iter().enumerate() {
                assert_eq!(&subset_at_rank(d, l, rank as u64), s);
                let resumed: Vec<GbsSet> = enumerate_subsets_from(d, l, rank as u64, u64::MAX).unwrap().collect();
                assert_eq!(resumed.as_slice(), &all[rank..]);
            }
        }
    }

    #[test]
    fn orbit_canonical_examples() {
        let ce = GbsSet::new(4, [(0, 0), (0, 2), (2, 0), (2, 2)]).unwrap();
        assert_eq!(orbit_canonical(&ce).unwrap(), ce);
        let classes: std::collections::HashSet<GbsSet> =
            enumerate_subsets(2, 2, u64::MAX).unwrap().map(|s| orbit_canonical(&s).unwrap()).collect();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn orbit_canonical_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [3u32, 4, 5] {
            let group = SpMatrix::enumerate(d).unwrap();
            let subsets: Vec<_> = enumerate_subsets(d, 3, u64::MAX).unwrap().collect();
            for _ in 0..50 {
                let s = &subsets[rng.random_range(0..subsets.len())];
                let act = AffineAction::new(
                    group[rng.random_range(0..group.len())],
                    rng.random_range(0..d as i64),
                    rng.random_range(0..d as i64),
                );
                let t = transform_set(s, &act).unwrap();
                assert_eq!(orbit_canonical(&t).unwrap(), orbit_canonical(s).unwrap());
            }
        }
    }

    #[test]
    fn sampled_ranks_are_distinct_and_reproducible() {
        let mode = CensusMode::Sample { count: 500, seed: 4 };
        let a = census_ranks(6, 6, &mode, DEFAULT_CEILING).unwrap();
        assert_eq!(a, census_ranks(6, 6, &mode, DEFAULT_CEILING).unwrap());
        assert_eq!(a.len(), 500);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(*a.last().unwrap() < binomial(36, 6));
        assert!(census_ranks(2, 2, &CensusMode::Sample { count: 7, seed: 0 }, DEFAULT_CEILING).is_err());
    }

    #[test]
    fn check_row_catches_tampering() {
        let s = GbsSet::new(3, [(0, 0), (0, 1), (0, 2)]).unwrap();
        let row = classify_row(0, s, None).unwrap();
        check_row(&row).unwrap();
        let mut bad = row.clone();
        bad.witness = Some(FWitness { alpha: 1, beta: 0 });
        assert!(check_row(&bad).is_err());
        let mut bad = row.clone();
        bad.f_type = true;
        assert!(check_row(&bad).is_err());
        let mut bad = row;
        bad.verdict.status = Status::Indistinguishable;
        assert!(check_row(&bad).is_err());
    }
}
