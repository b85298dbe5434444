//! Command-line front end. Every command prints a JSON report; exit code 0
//! means success, 1 a failed verification and 2 a usage or input error.
//!
//! Commands that draw random numbers take `--seed`; without it the seed
//! comes from the `LUCUM_SEED` environment variable, then a fixed default.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{AlgebraElement, MultiIndex};
use crate::battery::{self, BatteryOptions, Check};
use crate::cumulant::{splits_partition, SetPartition};
use crate::error::{Error, Result};
use crate::haar::twirl_estimate;
use crate::invariant::{cumulant_family, InvariantEntry, InvariantIndex, InvariantPlan, Method};
use crate::io::{digest, parse_state_str, state_to_json, ReportDocument};
use crate::mixed::{mixed_hat_i, zhou_m, DensityMatrix};
use crate::states::{generate_state, StateKind};
use crate::transvectant::{covariant_norm, family_covariant, CovariantFamily};

pub const SEED_ENV: &str = "LUCUM_SEED";
/// Splitting invariants at or below this times `(norm^2)^theta` count as zero.
pub const SEPARABILITY_TOLERANCE: f64 = 1e-10;
pub const LIFT_TOLERANCE: f64 = 1e-10;
/// Standard errors allowed between a Monte-Carlo estimate and the closed form.
pub const AGREEMENT_BANDS: f64 = 5.0;

#[derive(Debug, Parser)]
#[command(
    name = "lucum",
    version,
    about = "Local-unitary invariants of multi-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Cumulant,
    #[value(name = "G", alias = "g")]
    G,
    #[value(name = "H", alias = "h")]
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Random,
    Bell,
    Ghz,
    W,
    Separable,
}

impl From<KindArg> for StateKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Random => StateKind::Random,
            KindArg::Bell => StateKind::Bell,
            KindArg::Ghz => StateKind::Ghz,
            KindArg::W => StateKind::W,
            KindArg::Separable => StateKind::Separable,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form invariants, or covariant norms for the G and H families.
    Invariants {
        #[arg(long)]
        state: PathBuf,
        /// Index string, e.g. 110, 1111 (G) or 2220 (H); repeatable.
        #[arg(long)]
        index: Vec<String>,
        #[arg(long, value_enum, default_value = "cumulant")]
        family: FamilyArg,
        /// Every index of the family (the default when no --index is given).
        #[arg(long)]
        all: bool,
    },
    /// Splitting invariants for a partition such as "1,2|3" and a verdict.
    Separability {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        partition: String,
    },
    /// Monte-Carlo twirl estimate compared with the closed form.
    Twirl {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        index: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compares I_index with the mixed-state form on the partial trace.
    Lift {
        #[arg(long)]
        state: PathBuf,
        /// One-based sites to trace out, comma separated; the index must be 0 there.
        #[arg(long)]
        trace_out: String,
        #[arg(long)]
        index: String,
    },
    /// Half the trace norm of the cumulant operator of the kept sites.
    Zhou {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        index: String,
    },
    /// Writes a named or random state file.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(short = 'n', long = "sites")]
        n: usize,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Blocks for separable states, e.g. "1,2|3".
        #[arg(long)]
        partition: Option<String>,
    },
    /// Runs the numbered self-test criteria.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
        /// Samples per Monte-Carlo estimate.
        #[arg(long, default_value_t = battery::DEFAULT_TWIRL_SAMPLES)]
        samples: usize,
        /// Run only these criteria (1 to 13); repeatable.
        #[arg(long)]
        criterion: Vec<u8>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn usage(message: String) -> Self {
        Self {
            code: 2,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandOutput {
                        code: 0,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => CommandOutput::usage(text),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(doc) => {
            let code = if doc.all_passed() { 0 } else { 1 };
            CommandOutput {
                code,
                stdout: doc.to_json(),
                stderr: String::new(),
            }
        }
        Err(e) => CommandOutput::usage(format!("error: {e}\n")),
    }
}

fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("{SEED_ENV}='{text}' is not an unsigned integer"))
        }),
        Err(_) => Ok(battery::DEFAULT_SEED),
    }
}

fn load(path: &Path) -> Result<(AlgebraElement, String)> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Schema(format!("{} is not UTF-8 text", path.display())))?;
    Ok((parse_state_str(&text)?, digest(&bytes)))
}

fn with_input(command: &str, digest: String) -> ReportDocument {
    let mut doc = ReportDocument::new(command);
    doc.input_digest = Some(digest);
    doc
}

fn parse_index(text: &str, n: usize) -> Result<InvariantIndex> {
    let idx: InvariantIndex = text.parse()?;
    if idx.n() != n {
        return Err(Error::InvalidIndex(format!(
            "index {text} has {} sites, the state has {n}",
            idx.n()
        )));
    }
    Ok(idx)
}

fn closed_form_entry(state: &AlgebraElement, idx: &InvariantIndex) -> Result<InvariantEntry> {
    let value = InvariantPlan::new(idx)?.evaluate(state)?;
    Ok(InvariantEntry::new(
        idx.to_string(),
        value,
        idx.degree(),
        Method::ClosedForm,
    ))
}

fn dispatch(command: Command) -> Result<ReportDocument> {
    match command {
        Command::Invariants {
            state,
            index,
            family,
            all,
        } => {
            let (psi, dig) = load(&state)?;
            let mut doc = with_input("invariants", dig);
            let listed = all || index.is_empty();
            match family {
                FamilyArg::Cumulant => {
                    let indices = if listed {
                        cumulant_family(psi.n())?.indices
                    } else {
                        index
                            .iter()
                            .map(|t| parse_index(t, psi.n()))
                            .collect::<Result<_>>()?
                    };
                    for idx in &indices {
                        doc.entries.push(closed_form_entry(&psi, idx)?);
                    }
                }
                FamilyArg::G | FamilyArg::H => {
                    let fam = if family == FamilyArg::G {
                        CovariantFamily::G
                    } else {
                        CovariantFamily::H
                    };
                    let indices = if listed {
                        covariant_indices(fam, psi.n())
                    } else {
                        index
                    };
                    for idx in &indices {
                        let cov = family_covariant(&psi, fam, idx)?;
                        let factors = covariant_factors(fam, idx);
                        doc.entries.push(InvariantEntry::new(
                            idx.clone(),
                            covariant_norm(&cov),
                            2 * factors,
                            Method::Transvectant,
                        ));
                    }
                }
            }
            Ok(doc)
        }
        Command::Separability { state, partition } => {
            let (psi, dig) = load(&state)?;
            let pi: SetPartition = partition.parse()?;
            if pi.ground_size() != psi.n() {
                return Err(Error::InvalidPartition(format!(
                    "'{partition}' does not cover {} sites",
                    psi.n()
                )));
            }
            let mut doc = with_input("separability", dig);
            let norm2 = psi.norm_sqr();
            let mut separable = true;
            for idx in cumulant_family(psi.n())?.indices {
                if !splits_partition(idx.as_multi(), &pi) {
                    continue;
                }
                let entry = closed_form_entry(&psi, &idx)?;
                let bound = SEPARABILITY_TOLERANCE * norm2.powi(idx.theta() as i32);
                separable &= entry.value.abs() <= bound;
                doc.entries
                    .push(entry.with_note(format!("tolerance {bound:e}")));
            }
            doc.verdict = Some(
                if separable {
                    "separable"
                } else {
                    "not separable"
                }
                .to_string(),
            );
            Ok(doc)
        }
        Command::Twirl {
            state,
            index,
            samples,
            seed,
        } => {
            let (psi, dig) = load(&state)?;
            let idx = parse_index(&index, psi.n())?;
            let seed = seed.map_or_else(default_seed, Ok)?;
            let mut doc = with_input("twirl", dig);
            doc.seed = Some(seed);
            let exact = closed_form_entry(&psi, &idx)?;
            let est = twirl_estimate(&psi, &idx, samples, seed)?;
            let band = AGREEMENT_BANDS * est.std_error;
            let diff = (est.mean - exact.value).abs();
            doc.checks.push(
                Check::new(
                    format!("|monte-carlo - closed-form| within {AGREEMENT_BANDS} SE"),
                    diff,
                    band,
                )
                .with_detail(format!("{samples} samples")),
            );
            doc.entries.push(exact);
            doc.entries.push(
                InvariantEntry::new(idx.to_string(), est.mean, idx.degree(), Method::MonteCarlo)
                    .with_std_error(est.std_error),
            );
            Ok(doc)
        }
        Command::Lift {
            state,
            trace_out,
            index,
        } => {
            let (psi, dig) = load(&state)?;
            let idx = parse_index(&index, psi.n())?;
            let traced = parse_sites(&trace_out, psi.n())?;
            if let Some(&s) = traced.iter().find(|&&s| idx.bits()[s] != 0) {
                return Err(Error::InvalidArgument(format!(
                    "index {idx} has a 1 at traced site {}",
                    s + 1
                )));
            }
            let keep: Vec<usize> = (0..psi.n()).filter(|s| !traced.contains(s)).collect();
            let short = InvariantIndex::new(MultiIndex::new(
                keep.iter().map(|&s| idx.bits()[s]).collect(),
                2,
            )?)?;
            let rho = DensityMatrix::from_pure(&psi)?.partial_trace(&keep)?;
            let hat = mixed_hat_i(&rho, &short)?;
            let exact = closed_form_entry(&psi, &idx)?;
            let mut doc = with_input("lift", dig);
            doc.checks.push(
                Check::new(
                    "|I(psi) - hat I(partial trace)|",
                    (hat - exact.value).abs(),
                    LIFT_TOLERANCE,
                )
                .with_detail(format!("traced sites {trace_out}, kept index {short}")),
            );
            doc.entries.push(exact);
            doc.entries.push(
                InvariantEntry::new(short.to_string(), hat, short.degree(), Method::ClosedForm)
                    .with_note(format!(
                        "mixed-state form on the partial trace over sites {trace_out}"
                    )),
            );
            Ok(doc)
        }
        Command::Zhou { state, index } => {
            let (psi, dig) = load(&state)?;
            let idx = parse_index(&index, psi.n())?;
            let mut doc = with_input("zhou", dig);
            doc.entries.push(
                InvariantEntry::new(idx.to_string(), zhou_m(&psi, &idx)?, 0, Method::Zhou)
                    .with_note("half the trace norm of the cumulant operator; not a polynomial"),
            );
            Ok(doc)
        }
        Command::Gen {
            kind,
            n,
            output,
            seed,
            partition,
        } => {
            let seed = seed.map_or_else(default_seed, Ok)?;
            let psi = generate_state(kind.into(), n, seed, partition.as_deref())?;
            let text = state_to_json(&psi);
            std::fs::write(&output, &text).map_err(|e| {
                Error::InvalidArgument(format!("cannot write {}: {e}", output.display()))
            })?;
            let mut doc = ReportDocument::new("gen");
            doc.input_digest = Some(digest(text.as_bytes()));
            doc.seed = Some(seed);
            Ok(doc)
        }
        Command::Selftest {
            seed,
            samples,
            criterion,
        } => {
            let opts = BatteryOptions {
                seed: seed.map_or_else(default_seed, Ok)?,
                twirl_samples: samples,
            };
            let mut doc = ReportDocument::new("selftest");
            doc.seed = Some(opts.seed);
            doc.criteria = if criterion.is_empty() {
                battery::run_all(&opts)?
            } else {
                criterion
                    .iter()
                    .map(|&id| battery::run_criterion(id, &opts))
                    .collect::<Result<_>>()?
            };
            Ok(doc)
        }
    }
}

/// One-based comma-separated sites to zero-based, sorted and deduplicated.
fn parse_sites(text: &str, n: usize) -> Result<Vec<usize>> {
    let mut sites = Vec::new();
    for part in text.split(',') {
        let s: usize = part.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("'{part}' in '{text}' is not a site number"))
        })?;
        if s == 0 || s > n {
            return Err(Error::InvalidArgument(format!("site {s} outside 1..={n}")));
        }
        sites.push(s - 1);
    }
    sites.sort_unstable();
    sites.dedup();
    Ok(sites)
}

/// G: an even number (>= 2) of 1s; H: three or more 2s. Ordered by count, then descending value.
fn covariant_indices(family: CovariantFamily, n: usize) -> Vec<String> {
    let (digit, min) = match family {
        CovariantFamily::G => ('1', 2),
        CovariantFamily::H => ('2', 3),
    };
    let mut masks: Vec<usize> = (0..1usize << n)
        .filter(|m| {
            let ones = m.count_ones() as usize;
            ones >= min && (family == CovariantFamily::H || ones.is_multiple_of(2))
        })
        .collect();
    masks.sort_by(|a, b| a.count_ones().cmp(&b.count_ones()).then(b.cmp(a)));
    masks
        .into_iter()
        .map(|m| {
            (0..n)
                .map(|s| {
                    if m >> (n - 1 - s) & 1 == 1 {
                        digit
                    } else {
                        '0'
                    }
                })
                .collect()
        })
        .collect()
}

/// Number of copies of the fundamental form in the covariant.
fn covariant_factors(family: CovariantFamily, index: &str) -> usize {
    match family {
        CovariantFamily::G => 2,
        CovariantFamily::H => index.chars().filter(|&c| c == '2').count() + 1,
    }
}
