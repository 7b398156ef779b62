use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use cfdim::bridge::{decode, divide, encode_full, Part};
use cfdim::cf::parse_rational;
use cfdim::construction::{self, build_schedule, Schedule};
use cfdim::gale::GaussGale;
use cfdim::measure;
use cfdim::verify::{run_suite, RunConfig, Sizes, SUITES};
use cfdim::{CfWord, DyadicWord, Error, Status};

#[derive(Parser)]
#[command(name = "cfdim", version, about = "Certified continued-fraction measure, encoding and gale checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Seed for randomized corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Children summed explicitly before the fan tail.
    #[arg(long, global = true, default_value_t = 10_000)]
    truncation: u64,
    /// Smoothing levels evaluated before the tail bound.
    #[arg(long, global = true, default_value_t = 64)]
    nmax: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Evaluate fans with more than 10^5 terms term by term.
    #[arg(long, global = true)]
    allow_large: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        /// Record wall time per claim (reports are then not reproducible).
        #[arg(long)]
        timing: bool,
        /// Small corpora, for smoke runs.
        #[arg(long)]
        quick: bool,
        /// Cover schedule, e.g. `s=0.4,K=3`.
        #[arg(long, default_value = "s=2/5,K=3")]
        schedule: String,
    },
    /// The code 𝓔(v) of a continued-fraction word.
    Encode {
        #[arg(long)]
        cf: String,
    },
    /// The word behind a code.
    Decode { bits: String },
    /// The decomposition I(w) of a dyadic interval.
    Divide { bits: String },
    /// Lebesgue measure of a cylinder, exactly; Gauss measure as an enclosure.
    Measure {
        #[arg(long)]
        cf: String,
        /// Print the Gauss measure instead.
        #[arg(long)]
        gauss: bool,
    },
    /// Diagonal walk against a 1/2-gale.
    Walk {
        #[arg(long = "s-gale", default_value = "gauss")]
        s_gale: String,
        #[arg(long, default_value = "s=2/5,K=3")]
        schedule: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Schedule, cover masses and the compiled cover gale.
    Construct {
        #[arg(long, default_value = "s=2/5,K=3")]
        schedule: String,
        /// Capital target exponent `n`: the gale reaches 2^n on the last cover.
        #[arg(long, default_value_t = 0)]
        n: usize,
    },
}

/// `s=0.4,K=3`.
fn parse_schedule(spec: &str) -> Result<(BigRational, usize), Error> {
    let mut s = None;
    let mut k = None;
    for tok in spec.split(',') {
        match tok.split_once('=') {
            Some(("s", v)) => s = Some(parse_rational(v)?),
            Some(("K", v)) | Some(("k", v)) => {
                k = Some(v.trim().parse().map_err(|_| Error::Parse(format!("bad depth {v:?}")))?)
            }
            _ => return Err(Error::Parse(format!("bad schedule token {tok:?}"))),
        }
    }
    match (s, k) {
        (Some(s), Some(k)) => Ok((s, k)),
        _ => Err(Error::Parse(format!("schedule {spec:?} needs s=… and K=…"))),
    }
}

fn schedule_of(spec: &str) -> Result<Schedule, Error> {
    let (s, k) = parse_schedule(spec)?;
    build_schedule(&s, k)
}

fn pretty(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("json")
}

fn part_json(p: &Part) -> serde_json::Value {
    json!({ "part": p.to_string(), "lebesgue": p.lebesgue().to_string() })
}

fn run(cli: Cli) -> Result<(String, bool), Error> {
    let g = &cli.global;
    let prec = g.precision;
    match cli.command {
        Command::Verify { suite, timing, quick, schedule } => {
            if suite != "all" && !SUITES.contains(&suite.as_str()) {
                return Err(Error::UnknownSuite(suite));
            }
            let (schedule_s, schedule_depth) = parse_schedule(&schedule)?;
            let cfg = RunConfig {
                precision: prec,
                truncation: g.truncation,
                nmax: g.nmax,
                seed: g.seed,
                schedule_s,
                schedule_depth,
                walk_depth: schedule_depth.min(3),
                allow_large: g.allow_large,
                timing,
                sizes: if quick { Sizes::quick() } else { Sizes::default() },
            };
            let report = run_suite(&suite, &cfg)?;
            let out = match g.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            Ok((out, report.ok()))
        }
        Command::Encode { cf } => {
            let v = CfWord::parse(&cf)?;
            let e = encode_full(&v);
            Ok((
                match g.format {
                    Format::Json => pretty(json!({
                        "word": v.to_string(),
                        "base": e.base.to_string(),
                        "index": e.index,
                        "code": e.code.to_string(),
                    })),
                    Format::Csv => format!("word,base,index,code\n\"{v}\",{},{},{}\n", e.base, e.index, e.code),
                },
                true,
            ))
        }
        Command::Decode { bits } => {
            let w = DyadicWord::parse(&bits)?;
            let v = decode(&w)?;
            Ok((
                match g.format {
                    Format::Json => pretty(json!({ "code": w.to_string(), "word": v.to_string() })),
                    Format::Csv => format!("code,word\n{w},\"{v}\"\n"),
                },
                true,
            ))
        }
        Command::Divide { bits } => {
            let w = DyadicWord::parse(&bits)?;
            let d = divide(&w);
            Ok((
                match g.format {
                    Format::Json => pretty(json!({
                        "word": w.to_string(),
                        "interval": w.interval().to_string(),
                        "max_rank": d.max_rank(),
                        "parts": d.parts.iter().map(part_json).collect::<Vec<_>>(),
                    })),
                    Format::Csv => {
                        let mut s = String::from("part,lebesgue\n");
                        for p in &d.parts {
                            s.push_str(&format!("\"{p}\",{}\n", p.lebesgue()));
                        }
                        s
                    }
                },
                true,
            ))
        }
        Command::Measure { cf, gauss } => {
            let v = CfWord::parse(&cf)?;
            let out = if gauss { measure::gauss(&v, prec).to_string() } else { v.lebesgue().to_string() };
            Ok((out, true))
        }
        Command::Walk { s_gale, schedule, depth } => {
            if s_gale != "gauss" {
                return Err(Error::Parse(format!("unknown s-gale {s_gale:?}; available: gauss")));
            }
            let sched = schedule_of(&schedule)?;
            let d = GaussGale::new(BigRational::new(BigInt::from(1), BigInt::from(2)))?;
            let walk = construction::diagonal_walk(&d, &sched, depth, prec)?;
            let ok = walk.total.status != Status::Refuted && walk.steps.iter().all(|s| s.decay.status != Status::Refuted);
            Ok((pretty(serde_json::to_value(&walk).expect("json")), ok))
        }
        Command::Construct { schedule, n } => {
            let sched = schedule_of(&schedule)?;
            let masses = (1..=sched.depth())
                .map(|k| construction::level_cover_mass(&sched, k, prec))
                .collect::<Result<Vec<_>, _>>()?;
            let binary = (1..=sched.depth().min(2))
                .map(|k| construction::binary_level_mass(&sched, k, prec))
                .collect::<Result<Vec<_>, _>>()?;
            let ce = construction::counterexample_gale(&sched, n)?;
            let d0 = cfdim::gale::BinGale::capital(&ce.gale, &DyadicWord::empty(), prec);
            let ok = masses.iter().all(|m| m.status != Status::Refuted) && binary.iter().all(|b| b.status != Status::Refuted);
            Ok((
                pretty(json!({
                    "schedule": sched,
                    "cover_masses": masses,
                    "binary_masses": binary,
                    "gale": {
                        "levels": ce.levels,
                        "initial_capital": d0.to_string(),
                    },
                })),
                ok,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, ok)) => {
            println!("{}", out.trim_end());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
