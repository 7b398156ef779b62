//! Verification suites: seeded corpora run through the library's checks,
//! collected into reports with a canonical order.

mod corpus;
mod suites;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::verdict::{Status, Verdict};

pub use corpus::{random_digit, random_dyadic, random_fan, random_interval, random_word, random_word_of_rank, rng_for};

/// Corpus sizes for each suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sizes {
    pub kraaikamp: usize,
    pub measure: usize,
    pub growth_bases: usize,
    pub encoding_rank: usize,
    pub encoding_digit: u64,
    pub encoding_library_rank: usize,
    pub encoding_library_digit: u64,
    pub encoding_random: usize,
    pub divide_len: usize,
    pub gale_nodes: usize,
    pub gale_rank: usize,
    pub bin_len: usize,
    pub kolmogorov: usize,
    pub pipeline: usize,
    pub cover_samples: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes {
            kraaikamp: 10_000,
            measure: 1_000,
            growth_bases: 20,
            encoding_rank: 5,
            encoding_digit: 50,
            encoding_library_rank: 3,
            encoding_library_digit: 20,
            encoding_random: 10_000,
            divide_len: 14,
            gale_nodes: 200,
            gale_rank: 6,
            bin_len: 10,
            kolmogorov: 200,
            pipeline: 500,
            cover_samples: 8,
        }
    }
}

impl Sizes {
    /// Small corpora for smoke runs.
    pub fn quick() -> Self {
        Sizes {
            kraaikamp: 200,
            measure: 50,
            growth_bases: 3,
            encoding_rank: 3,
            encoding_digit: 20,
            encoding_library_rank: 2,
            encoding_library_digit: 10,
            encoding_random: 100,
            divide_len: 8,
            gale_nodes: 10,
            gale_rank: 4,
            bin_len: 5,
            kolmogorov: 10,
            pipeline: 20,
            cover_samples: 2,
        }
    }
}

/// Everything a suite run depends on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub precision: u32,
    pub truncation: u64,
    pub nmax: usize,
    pub seed: u64,
    #[serde(with = "crate::cf::rational_string")]
    pub schedule_s: BigRational,
    pub schedule_depth: usize,
    pub walk_depth: usize,
    pub allow_large: bool,
    /// Record per-claim wall time; off by default so reports are reproducible.
    pub timing: bool,
    pub sizes: Sizes,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: crate::enclosure::DEFAULT_PRECISION,
            truncation: 10_000,
            nmax: crate::gale::DEFAULT_NMAX,
            seed: 0,
            schedule_s: BigRational::new(BigInt::from(2), BigInt::from(5)),
            schedule_depth: 3,
            walk_depth: 3,
            allow_large: false,
            timing: false,
            sizes: Sizes::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.precision > 0 && self.truncation > 0 && self.nmax > 0 && self.schedule_depth > 0;
        if positive {
            Ok(())
        } else {
            Err(Error::Parse("precision, truncation, nmax and schedule depth must be positive".into()))
        }
    }
}

/// One audited statement, possibly over many instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub instances: u64,
    pub proved: u64,
    pub refuted: u64,
    pub indeterminate: u64,
    /// Witness of the first unproved instance, else of the first instance.
    pub lo: String,
    pub hi: String,
    pub precision: u32,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms: Option<u64>,
}

impl Claim {
    pub fn from_verdicts(id: &str, anchor: &str, verdicts: &[Verdict]) -> Claim {
        let count = |s: Status| verdicts.iter().filter(|v| v.status == s).count() as u64;
        let (proved, refuted, indeterminate) = (count(Status::Proved), count(Status::Refuted), count(Status::Indeterminate));
        let status = verdicts.iter().fold(Status::Proved, |acc, v| acc.and(v.status));
        let pick = verdicts.iter().find(|v| v.status == Status::Refuted).or_else(|| verdicts.iter().find(|v| !v.is_proved()));
        let witness = pick.or(verdicts.first());
        let detail = match pick {
            Some(v) if v.status == Status::Indeterminate => format!("{} (stalled at {} bits)", v.claim, v.precision),
            Some(v) => v.claim.clone(),
            None => format!("{} instances", verdicts.len()),
        };
        Claim {
            id: id.into(),
            anchor: anchor.into(),
            status: if verdicts.is_empty() { Status::Indeterminate } else { status },
            instances: verdicts.len() as u64,
            proved,
            refuted,
            indeterminate,
            lo: witness.map(|v| v.lo.clone()).unwrap_or_default(),
            hi: witness.map(|v| v.hi.clone()).unwrap_or_default(),
            precision: witness.map_or(0, |v| v.precision),
            detail,
            ms: None,
        }
    }

    pub fn single(id: &str, anchor: &str, v: Verdict) -> Claim {
        let mut c = Claim::from_verdicts(id, anchor, std::slice::from_ref(&v));
        c.detail = v.claim;
        c
    }

    /// An exactly decided claim with a free-form witness.
    pub fn exact(id: &str, anchor: &str, holds: bool, instances: u64, detail: impl Into<String>) -> Claim {
        let status = Status::from_bool(holds);
        Claim {
            id: id.into(),
            anchor: anchor.into(),
            status,
            instances,
            proved: if holds { instances } else { 0 },
            refuted: if holds { 0 } else { instances.max(1) },
            indeterminate: 0,
            lo: String::new(),
            hi: String::new(),
            precision: 0,
            detail: detail.into(),
            ms: None,
        }
    }
}

/// Claims of one run, sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub precision: u32,
    pub claims: Vec<Claim>,
}

impl Report {
    fn new(suite: &str, cfg: &RunConfig, mut claims: Vec<Claim>) -> Report {
        claims.sort_by(|a, b| a.id.cmp(&b.id));
        Report { suite: suite.into(), seed: cfg.seed, precision: cfg.precision, claims }
    }

    pub fn count(&self, s: Status) -> usize {
        self.claims.iter().filter(|c| c.status == s).count()
    }

    /// No claim refuted.
    pub fn ok(&self) -> bool {
        self.count(Status::Refuted) == 0
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Columns `claim_id, anchor, status, lo, hi, ms`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["claim_id", "anchor", "status", "lo", "hi", "ms"]).expect("in-memory write");
        for c in &self.claims {
            let ms = c.ms.map(|m| m.to_string()).unwrap_or_default();
            w.write_record([&c.id, &c.anchor, &c.status.to_string(), &c.lo, &c.hi, &ms]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Registered suites, in run order.
pub const SUITES: [&str; 8] =
    ["kraaikamp", "measure-bounds", "encoding", "divide", "gales", "smoothing", "pipeline", "counterexample"];

fn suite_claims(name: &str, cfg: &RunConfig) -> Result<Vec<Claim>> {
    Ok(match name {
        "kraaikamp" => suites::kraaikamp(cfg),
        "measure-bounds" => suites::measure_bounds(cfg),
        "encoding" => suites::encoding(cfg),
        "divide" => suites::divide(cfg),
        "gales" => suites::gales(cfg)?,
        "smoothing" => suites::smoothing(cfg)?,
        "pipeline" => suites::pipeline(cfg)?,
        "counterexample" => suites::counterexample(cfg)?,
        other => return Err(Error::UnknownSuite(other.into())),
    })
}

/// Run one suite, or every suite for `"all"`.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<Report> {
    Ok(run_suite_timed(name, cfg)?.0)
}

/// As [`run_suite`], also returning wall time per suite.
pub fn run_suite_timed(name: &str, cfg: &RunConfig) -> Result<(Report, Vec<(String, Duration)>)> {
    cfg.validate()?;
    let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    let mut claims = Vec::new();
    let mut times = Vec::new();
    for n in names {
        let t = Instant::now();
        claims.extend(suite_claims(n, cfg)?);
        times.push((n.to_string(), t.elapsed()));
    }
    Ok((Report::new(name, cfg, claims), times))
}

/// Run `f`, stamping its wall time on the claims when timing is on.
fn timed<F: FnOnce() -> Vec<Claim>>(cfg: &RunConfig, f: F) -> Vec<Claim> {
    let t = Instant::now();
    let mut claims = f();
    if cfg.timing {
        let ms = t.elapsed().as_millis() as u64;
        for c in &mut claims {
            c.ms = Some(ms);
        }
    }
    claims
}
