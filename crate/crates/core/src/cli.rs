//! Command-line surface. Machine-readable JSON goes to `out`, human-readable
//! summaries to `err`.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::census::{run_census_until, CensusConfig, CensusMode, OracleBudget, DEFAULT_CEILING};
use crate::clifford::{build_unitary, verify_clifford, CliffordUnitary, UnitaryJson};
use crate::criterion::{classify, Verdict};
use crate::oracle::{search_phi, verify_ghosh, OracleReportJson, SearchConfig, CERTIFY_TOL};
use crate::protocol::simulate_discrimination;
use crate::weyl::GbsSet;
use crate::zmod::SpMatrix;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "gbs-locc", version, about = "Local distinguishability of generalized Bell states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a GBS set.
    Check {
        /// Set JSON: a file path, inline JSON, or `-` for stdin.
        input: String,
        /// Also run the numerical one-way search (requires --seed).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Synthesize the unitary realizing a symplectic matrix.
    Unitary {
        #[arg(long)]
        d: u32,
        /// Entries α,β,γ,δ of `[[α,β],[γ,δ]]`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        sp: Vec<i64>,
    },
    /// Simulate the computational-basis protocol on an F-type set.
    Protocol {
        input: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Search for a state certifying one-way distinguishability.
    PhiSearch {
        input: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Re-check JSON emitted by `unitary` or `phi-search`.
    Verify {
        input: String,
        /// The set a `phi-search` report refers to.
        #[arg(long)]
        set: Option<String>,
    },
    /// Classify all or a sample of the ℓ-subsets for one dimension.
    Census(CensusArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 64)]
    pub restarts: u32,
    #[arg(long, default_value_t = 2000)]
    pub iters: u32,
    #[arg(long, default_value_t = CERTIFY_TOL)]
    pub tol: f64,
}

impl BudgetArgs {
    fn search_config(&self, what: &str) -> Result<SearchConfig> {
        let seed = self.seed.ok_or_else(|| Error::domain(format!("{what} needs --seed")))?;
        if self.restarts == 0 || self.iters == 0 || self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::domain("restarts, iters and tol must be positive"));
        }
        Ok(SearchConfig { restarts: self.restarts, max_iters: self.iters, tol: self.tol, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Debug, Clone, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub l: usize,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Sample size (sample mode).
    #[arg(long)]
    pub count: Option<u64>,
    /// Seeds the sample and the oracle search; without it the oracle is off.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub no_oracle: bool,
    #[arg(long, default_value_t = 64)]
    pub restarts: u32,
    #[arg(long, default_value_t = 2000)]
    pub iters: u32,
    #[arg(long, default_value_t = CERTIFY_TOL)]
    pub tol: f64,
    /// Rows file; defaults to `census-d<d>-l<l>.jsonl`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 4096)]
    pub checkpoint_every: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = DEFAULT_CEILING)]
    pub ceiling: u64,
    /// Stop after this many new rows, leaving a checkpoint.
    #[arg(long, hide = true)]
    pub stop_after: Option<u64>,
}

impl CensusArgs {
    pub fn config(&self) -> Result<CensusConfig> {
        let mode = match self.mode {
            ModeArg::Exhaustive => CensusMode::Exhaustive,
            ModeArg::Sample => CensusMode::Sample {
                count: self.count.ok_or_else(|| Error::domain("sample mode needs --count"))?,
                seed: self.seed.ok_or_else(|| Error::domain("sample mode needs --seed"))?,
            },
        };
        let oracle = match (self.seed, self.no_oracle) {
            (Some(seed), false) => {
                if self.restarts == 0 || self.iters == 0 || self.tol.is_nan() || self.tol <= 0.0 {
                    return Err(Error::domain("restarts, iters and tol must be positive"));
                }
                Some(OracleBudget { restarts: self.restarts, max_iters: self.iters, tol: self.tol, seed })
            }
            _ => None,
        };
        let out = self.out.clone().unwrap_or_else(|| format!("census-d{}-l{}.jsonl", self.d, self.l).into());
        Ok(CensusConfig {
            d: self.d,
            l: self.l,
            mode,
            oracle,
            out,
            checkpoint_every: self.checkpoint_every,
            jobs: self.jobs,
            ceiling: self.ceiling,
        })
    }
}

/// Output of `check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutput {
    pub set: GbsSet,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReportJson>,
}

/// Reads a file path, inline JSON (leading `{`), or stdin (`-`).
pub fn read_input(input: &str) -> Result<String> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else if input.trim_start().starts_with('{') {
        Ok(input.to_string())
    } else {
        std::fs::read_to_string(input)
            .map_err(|e| Error::domain(format!("cannot read {input}: {e}")))
    }
}

pub fn read_set(input: &str) -> Result<GbsSet> {
    GbsSet::from_json(&read_input(input)?)
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Check { input, oracle, budget } => {
            let set = read_set(&input)?;
            let search = if oracle { Some(budget.search_config("--oracle")?) } else { None };
            let verdict = classify(&set);
            writeln!(err, "{set}: {:?} ({})", verdict.status, verdict.detail)?;
            let oracle = search.map(|cfg| {
                let report = search_phi(&set, &cfg);
                let _ = writeln!(err, "oracle: {:?}, residual {:.3e}", report.status, report.residual);
                OracleReportJson::from(&report)
            });
            emit(out, &CheckOutput { set, verdict, oracle })
        }
        Command::Unitary { d, sp } => {
            if sp.len() != 4 {
                return Err(Error::domain(format!("--sp takes 4 entries, got {}", sp.len())));
            }
            let m = SpMatrix::new(sp[0], sp[1], sp[2], sp[3], d)?;
            let u = build_unitary(&m)?;
            let check = verify_clifford(&u);
            writeln!(err, "residuals {:.3e} {:.3e}", check.residuals[0], check.residuals[1])?;
            emit(out, &UnitaryJson::from(&u))
        }
        Command::Protocol { input, trials, seed } => {
            let set = read_set(&input)?;
            let report = simulate_discrimination(&set, trials, seed)?;
            writeln!(err, "{set}: success rate {} over {trials} trials", report.success_rate)?;
            emit(out, &report)
        }
        Command::PhiSearch { input, budget } => {
            let set = read_set(&input)?;
            let cfg = budget.search_config("phi-search")?;
            let report = search_phi(&set, &cfg);
            writeln!(err, "{set}: {:?}, residual {:.3e}", report.status, report.residual)?;
            emit(out, &OracleReportJson::from(&report))
        }
        Command::Verify { input, set } => {
            let text = read_input(&input)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            if value.get("re").is_some() {
                let u = CliffordUnitary::try_from(serde_json::from_value::<UnitaryJson>(value)?)?;
                let check = verify_clifford(&u);
                writeln!(err, "unitary: ok = {}", check.ok && check.unitarity < crate::clifford::CLIFFORD_TOL)?;
                emit(out, &check)
            } else {
                let report: OracleReportJson = serde_json::from_value(value)?;
                let set = read_set(set.as_deref().ok_or_else(|| Error::domain("verifying a phi report needs --set"))?)?;
                let phi = report.phi().ok_or_else(|| Error::domain("report carries no state"))?;
                let check = verify_ghosh(&set, &phi)?;
                writeln!(err, "{set}: ok = {}, residual {:.3e}", check.ok, check.residual)?;
                emit(out, &check)
            }
        }
        Command::Census(args) => {
            let cfg = args.config()?;
            match run_census_until(&cfg, args.stop_after)? {
                Some(summary) => {
                    writeln!(
                        err,
                        "{} sets, {} F equivalent, {} oracle-only certified; rows in {}",
                        summary.total,
                        summary.f_equivalent,
                        summary.oracle_only_certified,
                        cfg.out.display()
                    )?;
                    emit(out, &summary)
                }
                None => {
                    writeln!(err, "stopped early; rerun the same command to resume")?;
                    Ok(())
                }
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_domain() {
                2
            } else {
                1
            }
        }
    }
}
