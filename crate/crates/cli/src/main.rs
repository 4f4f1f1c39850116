//! `twistcheck`: runs the verification suites and prints JSON or CSV reports.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
//! usage or I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use twist_core::poisson::{
    builtin_structure, compatibility_check, load_structure, miura_check, superposed_structure, CheckMode,
    PoissonStructure, StructureMutation, StructureTag, Verdict,
};
use twist_core::swapping::LinkingMutation;
use twist_core::verify::{verify_formulas, verify_hill, verify_swapping, FormulasSuite, HillSuite, SwappingSuite};
use twist_core::virasoro::{asymptotic_report, AsymptoticConfig, CentralTerms, ModeTag, TrigProfile};

/// Environment variable holding the worker-thread count.
const WORKERS_ENV: &str = "TWIST_WORKERS";

#[derive(Parser)]
#[command(name = "twistcheck", version, about = "Exact checks for Poisson structures on twisted polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Linking numbers, window identities and the Jacobi identity of the swapping algebra.
    VerifySwapping {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Size of the label set (at most 8).
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(4..=8))]
        labels: i64,
        /// Random triples per family.
        #[arg(long, default_value_t = 200)]
        triples: usize,
        /// Flip the sign of the second term of the linking number.
        #[arg(long)]
        mutate: bool,
    },
    /// Coordinate brackets derived from the swapping algebra against the closed-form tables.
    VerifyFormulas {
        /// Projective dimension plus one: 2 or 3.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        dim: u8,
        #[arg(long, default_value = "7")]
        n: NList,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random polygons per period (dimension 3).
        #[arg(long, default_value_t = 20)]
        polygons: usize,
        /// Flip the sign of the diagonal `{X_k, Y_k}` entry (dimension 3).
        #[arg(long)]
        mutate: bool,
    },
    /// Compatibility of two structures through the mixed Jacobiator and the pencil.
    Compat {
        /// Built-in tag (C2N, S2, V2, C3N) or path to a JSON table; give exactly two.
        #[arg(long, num_args = 1, required = true)]
        structure: Vec<String>,
        #[arg(long, default_value = "5..9")]
        n: NList,
        /// Check every triple instead of one per symmetry orbit.
        #[arg(long)]
        paranoid: bool,
    },
    /// Hill operators against the `B` coordinates of their polygons.
    Hill {
        #[arg(long, default_value = "5,7,9")]
        n: NList,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Residual decay of the scaled Fourier-mode brackets against the Virasoro targets.
    Asymptotics {
        #[arg(long, default_value = "C2N")]
        structure: ModeTag,
        #[arg(long, default_value = "64,128,256,512")]
        grid: NList,
        /// Trigonometric profile, e.g. `cos`, `1 + 0.5*cos2 - sin`.
        #[arg(long, default_value = "cos")]
        profile: TrigProfile,
        /// Mode pairs `p:q`, comma separated.
        #[arg(long, default_value = "1:2,2:3,1:-1,2:-2", value_parser = parse_modes)]
        modes: ModeList,
        #[arg(long, value_enum, default_value_t = Central::Stated)]
        central: Central,
        /// Shift `t2` by +1.
        #[arg(long)]
        mutate: bool,
    },
    /// Pushforward of the `v` bracket under the Miura map.
    Miura {
        #[arg(long, default_value = "5..10")]
        n: NList,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Central {
    Stated,
    LeadingOrder,
    Both,
}

/// Periods given as `7`, `5,7,9` or `5..9` (inclusive).
#[derive(Clone, Debug)]
struct NList(Vec<usize>);

impl std::str::FromStr for NList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad period `{t}`"));
            match part.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                    if a > b {
                        return Err(format!("empty range `{part}`"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(num(part)?),
            }
        }
        Ok(NList(out))
    }
}

#[derive(Clone, Debug)]
struct ModeList(Vec<(i64, i64)>);

fn parse_modes(s: &str) -> Result<ModeList, String> {
    s.split(',')
        .map(|pq| {
            let (p, q) = pq.trim().split_once(':').ok_or_else(|| format!("mode pair `{pq}` is not `p:q`"))?;
            let int = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("bad mode `{t}`"));
            Ok((int(p)?, int(q)?))
        })
        .collect::<Result<_, String>>()
        .map(ModeList)
}

/// A finished run: the JSON document, an optional CSV rendering and the verdict.
struct Outcome {
    report: Value,
    csv: Option<String>,
    passed: bool,
}

enum Failure {
    Usage(String),
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn to_value(v: &impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn resolve(spec: &str, n: usize) -> Result<(PoissonStructure, bool), Failure> {
    match spec.parse::<StructureTag>() {
        Ok(tag) if n < tag.min_period() => superposed_structure(tag, n).map(|s| (s, true)).map_err(usage),
        Ok(tag) => builtin_structure(tag, n).map(|s| (s, false)).map_err(usage),
        Err(_) if Path::new(spec).exists() => load_structure(spec, Some(n)).map(|s| (s, false)).map_err(usage),
        Err(e) => Err(usage(format!("{e}, and no file `{spec}`"))),
    }
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::VerifySwapping { seed, labels, triples, mutate } => {
            let r = verify_swapping(&SwappingSuite {
                seed,
                labels,
                triples,
                mutation: mutate.then_some(LinkingMutation::FlipSecondTerm),
            });
            Ok(Outcome { passed: r.passed(), report: to_value(&r), csv: None })
        }
        Command::VerifyFormulas { dim, n, seed, polygons, mutate } => {
            let mut reports = Vec::new();
            for period in n.0 {
                let cfg = FormulasSuite {
                    n: dim as usize,
                    period,
                    seed,
                    polygons,
                    mutation: mutate.then_some(StructureMutation::FlipXYDiagonal),
                };
                reports.push(verify_formulas(&cfg).map_err(usage)?);
            }
            let passed = reports.iter().all(|r| r.passed());
            Ok(Outcome { passed, report: json!({ "suite": "verify-formulas", "runs": reports }), csv: None })
        }
        Command::Compat { structure, n, paranoid } => {
            let [a, b] = structure.as_slice() else {
                return Err(usage("compat needs exactly two --structure arguments"));
            };
            let mode = if paranoid { CheckMode::Paranoid } else { CheckMode::Reduced };
            let mut runs = Vec::new();
            let mut passed = true;
            for period in n.0 {
                let (sa, xa) = resolve(a, period)?;
                let (sb, xb) = resolve(b, period)?;
                let r = compatibility_check(&sa, &sb, mode).map_err(usage)?;
                passed &= r.verdict == Verdict::Compatible && r.pencil_agrees;
                let mut v = to_value(&r);
                // below the minimal period the tables are superposed, not the listed structures
                v["exploration"] = json!(xa || xb);
                runs.push(v);
            }
            Ok(Outcome { passed, report: json!({ "suite": "compat", "runs": runs }), csv: None })
        }
        Command::Hill { n, seed, count } => {
            if n.0.iter().any(|p| *p < 3) {
                return Err(usage("Hill periods must be at least 3"));
            }
            let r = verify_hill(&HillSuite { seed, count, periods: n.0 });
            Ok(Outcome { passed: r.passed(), report: to_value(&r), csv: None })
        }
        Command::Asymptotics { structure, grid, profile, modes, central, mutate } => {
            let terms = match central {
                Central::Stated => vec![CentralTerms::Stated],
                Central::LeadingOrder => vec![CentralTerms::LeadingOrder],
                Central::Both => vec![CentralTerms::Stated, CentralTerms::LeadingOrder],
            };
            let mut reports = Vec::new();
            for central_terms in terms {
                let cfg = AsymptoticConfig {
                    tag: structure,
                    profile: profile.clone(),
                    modes: modes.0.clone(),
                    grid: grid.0.clone(),
                    central_terms,
                    t2_shift: if mutate { 1.0 } else { 0.0 },
                };
                reports.push(asymptotic_report(&cfg).map_err(usage)?);
            }
            let passed = reports.iter().all(|r| r.passed());
            let csv = reports.iter().enumerate().map(|(i, r)| {
                let body = r.to_csv();
                if i == 0 {
                    body
                } else {
                    body.lines().skip(1).map(|l| format!("{l}\n")).collect()
                }
            });
            Ok(Outcome { passed, report: json!({ "suite": "asymptotics", "runs": reports }), csv: Some(csv.collect()) })
        }
        Command::Miura { n } => {
            let mut runs = Vec::new();
            for period in n.0 {
                if period < 3 {
                    return Err(usage("Miura periods must be at least 3"));
                }
                runs.push(miura_check(period).map_err(usage)?);
            }
            let passed = runs.iter().all(|r| r.holds());
            let first: Vec<Value> =
                runs.iter().filter_map(|r| r.first_failure().map(|p| json!({ "N": r.period, "pair": p }))).collect();
            Ok(Outcome { passed, report: json!({ "suite": "miura", "failures": first, "runs": runs }), csv: None })
        }
    }
}

fn init_workers() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = raw.parse().map_err(|_| usage(format!("{WORKERS_ENV} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(usage)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_workers().and_then(|()| run(cli.command)).and_then(|outcome| {
        let text = match (cli.output.format, &outcome.csv) {
            (Format::Csv, Some(csv)) => csv.clone(),
            (Format::Csv, None) => return Err(usage("CSV output is only available for asymptotics")),
            (Format::Json, _) => {
                let mut doc = outcome.report;
                doc["passed"] = json!(outcome.passed);
                serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
            }
        };
        match &cli.output.out {
            Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("twistcheck: {msg}");
            ExitCode::from(2)
        }
    }
}
