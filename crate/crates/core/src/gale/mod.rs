//! s-gales over continued-fraction words and over binary words.
//!
//! A continued-fraction gale is represented by its *mass* `d(v) γ^s(v)`
//! rather than its capital: the gale condition says exactly that mass is
//! additive over children, so it behaves like a finite measure on `(0, 1)`.
//! Capital is recovered by dividing out `γ^s`.

mod binary;
mod cf_gales;
mod cover;

pub use binary::{
    cf_to_binary_pipeline, neighbor_sets, NeighborSets, Pipeline, PipelineOutcome, ProportionalGale, Route,
    SmoothedGale, UniformBinGale, DEFAULT_NMAX,
};
pub use cf_gales::{optimal_section, CombinedGale, GaussGale, ModifiedGale, Patch, SetGale};
pub use cover::{Cover, CoverGale, CoverLevel, StructuredLevel};

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bridge::Part;
use crate::cf::{CfWord, Fan};
use crate::dyadic::DyadicWord;
use crate::enclosure::{self, Enclosure};
use crate::error::{Error, Result};
use crate::measure;
use crate::verdict::{self, Verdict};
use crate::RatInterval;

/// A continued-fraction s-gale given by certified oracles.
pub trait CfGale: Send + Sync {
    fn exponent(&self) -> BigRational;

    /// Human-readable construction summary.
    fn descriptor(&self) -> String;

    /// `d(v) γ^s(v)`.
    fn mass(&self, v: &CfWord, prec: u32) -> Enclosure;

    /// `Σ_{y ∈ f} d(y) γ^s(y)`.
    fn fan_mass(&self, f: &Fan, prec: u32) -> Enclosure;

    /// Masses of `[v, 1], …, [v, m]`.
    fn child_masses(&self, v: &CfWord, m: u64, prec: u32) -> Vec<Enclosure> {
        (1..=m).into_par_iter().map(|i| self.mass(&v.child_u64(i), prec)).collect()
    }

    /// `d(v)`.
    fn capital(&self, v: &CfWord, prec: u32) -> Enclosure {
        let wp = prec + 16;
        let g = measure::gauss_power(v, &self.exponent(), wp);
        self.mass(v, wp).div(&g).expect("γ^s > 0").with_precision(prec)
    }

    /// The mass of an arbitrary subinterval of `(0, 1)`, when the gale
    /// can evaluate it without a cylinder decomposition.
    fn interval_mass(&self, _a: &RatInterval, _prec: u32) -> Option<Enclosure> {
        None
    }

    /// An upper bound `K` with `mass(A) <= K γ(A)` for every interval `A`.
    fn density_bound(&self, _prec: u32) -> Option<Enclosure> {
        None
    }
}

pub type SharedCfGale = Arc<dyn CfGale>;

/// Mass of one part of a decomposition.
pub fn part_mass(g: &dyn CfGale, p: &Part, prec: u32) -> Enclosure {
    match p {
        Part::Word(w) => g.mass(w, prec),
        Part::Fan(f) => g.fan_mass(f, prec),
    }
}

/// A binary s-gale given by certified oracles.
pub trait BinGale: Send + Sync {
    fn exponent(&self) -> BigRational;

    fn descriptor(&self) -> String;

    /// `h(w)`.
    fn capital(&self, w: &DyadicWord, prec: u32) -> Enclosure;

    /// `Σ_{|u| = n, w ⊑ u} h(u)` for `n >= |w|`.
    fn subtree_mass(&self, w: &DyadicWord, n: usize, prec: u32) -> Enclosure {
        let s = self.exponent();
        let k = BigRational::from_integer(BigInt::from(n - w.len()));
        enclosure::exp2_rational(&(s * k), prec).mul(&self.capital(w, prec))
    }

    /// `(C, β)` with `h(u) <= C 2^{β |u|}` for every `u`.
    ///
    /// The default follows from the subtree identity at the root:
    /// `h(u) <= Σ_{|x| = |u|} h(x) = 2^{s|u|} h(λ)`.
    fn capital_bound(&self, prec: u32) -> (Enclosure, BigRational) {
        (self.capital(&DyadicWord::empty(), prec), self.exponent())
    }
}

pub type SharedBinGale = Arc<dyn BinGale>;

/// `d(v) γ^s(v) = Σ_{i<=m} d([v,i]) γ^s([v,i]) + fan-mass(Fan(v, m+1, ∞))`.
pub fn check_gale_condition(g: &dyn CfGale, v: &CfWord, m: u64, prec: u32) -> Verdict {
    check_gale_condition_with(g, v, m, prec, verdict::DEFAULT_MAX_DOUBLINGS)
}

/// [`check_gale_condition`] with an explicit escalation budget.
pub fn check_gale_condition_with(g: &dyn CfGale, v: &CfWord, m: u64, prec: u32, max_doublings: u32) -> Verdict {
    verdict::escalate(prec, max_doublings, |p| {
        let wp = p + 16;
        let lhs = g.mass(v, wp);
        let kids = g.child_masses(v, m, wp);
        let rhs = Enclosure::sum(&kids, wp).add(&g.fan_mass(&Fan::infinite(v.clone(), m + 1), wp));
        let lhs = lhs.with_precision(p);
        let rhs = rhs.with_precision(p);
        Verdict::new(format!("gale condition at {v}"), verdict::eq(&lhs, &rhs), &lhs.sub(&rhs))
    })
}

/// Exact check that `parts` tile `C_v`: every part extends `v` and the
/// intervals, sorted, are adjacent and span the cylinder.
pub fn validate_decomposition(v: &CfWord, parts: &[Part]) -> Result<()> {
    if parts.is_empty() {
        return Err(Error::InvalidDecomposition("no parts".into()));
    }
    if let Some(p) = parts.iter().find(|p| !p.extends(v)) {
        return Err(Error::InvalidDecomposition(format!("{p} does not extend {v}")));
    }
    let mut ivs: Vec<RatInterval> = parts.iter().map(Part::interval).collect();
    ivs.sort_by(|a, b| a.lo.cmp(&b.lo));
    let cyl = v.cylinder();
    let mut at = cyl.lo.clone();
    for iv in &ivs {
        if iv.lo != at {
            return Err(Error::InvalidDecomposition(format!("gap or overlap at {at}")));
        }
        at = iv.hi.clone();
    }
    if at != cyl.hi {
        return Err(Error::InvalidDecomposition(format!("parts end at {at}, cylinder at {}", cyl.hi)));
    }
    Ok(())
}

/// `d(v) γ^s(v) = Σ_{y ∈ A} d(y) γ^s(y)` for a decomposition `A` of `C_v`.
pub fn check_kolmogorov_equality(g: &dyn CfGale, v: &CfWord, parts: &[Part], prec: u32) -> Result<Verdict> {
    validate_decomposition(v, parts)?;
    Ok(verdict::escalate(prec, verdict::DEFAULT_MAX_DOUBLINGS, |p| {
        let wp = p + 16;
        let lhs = g.mass(v, wp).with_precision(p);
        let terms: Vec<Enclosure> = parts.iter().map(|x| part_mass(g, x, wp)).collect();
        let rhs = Enclosure::sum(&terms, wp).with_precision(p);
        Verdict::new(
            format!("kolmogorov equality at {v} over {} parts", parts.len()),
            verdict::eq(&lhs, &rhs),
            &lhs.sub(&rhs),
        )
    }))
}

/// `h(w0) + h(w1) = 2^s h(w)`.
pub fn check_bin_gale_condition(h: &dyn BinGale, w: &DyadicWord, prec: u32) -> Verdict {
    verdict::escalate(prec, verdict::DEFAULT_MAX_DOUBLINGS, |p| {
        let wp = p + 16;
        let lhs = h.capital(&w.child(false), wp).add(&h.capital(&w.child(true), wp));
        let rhs = enclosure::exp2_rational(&h.exponent(), wp).mul(&h.capital(w, wp));
        let (lhs, rhs) = (lhs.with_precision(p), rhs.with_precision(p));
        Verdict::new(format!("binary gale condition at {w}"), verdict::eq(&lhs, &rhs), &lhs.sub(&rhs))
    })
}

/// One point of a capital trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub word: String,
    pub lo: String,
    pub hi: String,
}

/// Capital along every prefix of a path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapitalTrace {
    pub construction: String,
    pub s: String,
    pub nodes: Vec<TraceNode>,
    #[serde(skip)]
    pub values: Vec<Enclosure>,
}

fn node(word: String, e: &Enclosure) -> TraceNode {
    TraceNode {
        word,
        lo: e.lo().to_decimal(20, crate::Round::Down),
        hi: e.hi().to_decimal(20, crate::Round::Up),
    }
}

/// Capital of a continued-fraction gale along the prefixes of `path`.
pub fn run_capital_trace(g: &dyn CfGale, path: &CfWord, prec: u32) -> CapitalTrace {
    let values: Vec<Enclosure> = (0..=path.rank()).map(|k| g.capital(&path.prefix(k), prec)).collect();
    CapitalTrace {
        construction: g.descriptor(),
        s: g.exponent().to_string(),
        nodes: (0..=path.rank()).map(|k| node(path.prefix(k).to_string(), &values[k])).collect(),
        values,
    }
}

/// Capital of a binary gale along the prefixes of `path`.
pub fn run_bin_capital_trace(h: &dyn BinGale, path: &DyadicWord, prec: u32) -> CapitalTrace {
    let values: Vec<Enclosure> = (0..=path.len()).map(|k| h.capital(&path.prefix(k), prec)).collect();
    CapitalTrace {
        construction: h.descriptor(),
        s: h.exponent().to_string(),
        nodes: (0..=path.len()).map(|k| node(path.prefix(k).to_string(), &values[k])).collect(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::{divide, split_at};
    use crate::verdict::Status;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Gauss gale whose mass on `[1]` is inflated by 1%.
    struct Corrupt(GaussGale);

    impl CfGale for Corrupt {
        fn exponent(&self) -> BigRational {
            self.0.exponent()
        }
        fn descriptor(&self) -> String {
            "corrupt".into()
        }
        fn mass(&self, v: &CfWord, prec: u32) -> Enclosure {
            let m = self.0.mass(v, prec);
            if *v == CfWord::from_u64s(&[1]) { m.mul_rational(&r(101, 100)) } else { m }
        }
        fn fan_mass(&self, f: &Fan, prec: u32) -> Enclosure {
            self.0.fan_mass(f, prec)
        }
    }

    #[test]
    fn gale_condition_verdicts() {
        let g = GaussGale::new(r(1, 2)).unwrap();
        let lam = CfWord::empty();
        assert_eq!(check_gale_condition(&g, &lam, 10_000, 128).status, Status::Proved);
        let bad = Corrupt(g.clone());
        assert_eq!(check_gale_condition(&bad, &lam, 100, 128).status, Status::Refuted);
        assert_eq!(check_gale_condition_with(&g, &lam, 100, 8, 0).status, Status::Indeterminate);
    }

    #[test]
    fn kolmogorov_on_divide_parts() {
        let g = GaussGale::new(r(2, 5)).unwrap();
        let lam = CfWord::empty();
        let mut parts = divide(&DyadicWord::parse("0").unwrap()).parts;
        parts.extend(divide(&DyadicWord::parse("1").unwrap()).parts);
        assert!(check_kolmogorov_equality(&g, &lam, &parts, 128).unwrap().is_proved());
        let v = CfWord::from_u64s(&[2]);
        assert!(check_kolmogorov_equality(&g, &v, &[Part::Word(v.clone())], 128).unwrap().is_proved());
        let kids = [Part::Fan(Fan::infinite(v.clone(), 1))];
        assert!(check_kolmogorov_equality(&g, &v, &kids, 128).unwrap().is_proved());
    }

    #[test]
    fn invalid_decompositions_rejected() {
        let g = GaussGale::new(r(1, 2)).unwrap();
        let v = CfWord::from_u64s(&[2]);
        let gap = [Part::Fan(Fan::infinite(v.clone(), 2))];
        assert!(matches!(check_kolmogorov_equality(&g, &v, &gap, 64), Err(Error::InvalidDecomposition(_))));
        let foreign = [Part::Word(CfWord::from_u64s(&[3]))];
        assert!(matches!(check_kolmogorov_equality(&g, &v, &foreign, 64), Err(Error::InvalidDecomposition(_))));
        let m = BigRational::new(2.into(), 5.into());
        let pieces = split_at(&Part::Word(v.clone()), &m);
        assert!(check_kolmogorov_equality(&g, &v, &pieces, 64).unwrap().is_proved());
    }

    #[test]
    fn traces() {
        let g = GaussGale::new(r(1, 1)).unwrap();
        let t = run_capital_trace(&g, &CfWord::from_u64s(&[3, 1, 4]), 64);
        assert_eq!(t.nodes.len(), 4);
        assert!(t.values.iter().all(|e| e.contains(&r(1, 1))));
    }
}
