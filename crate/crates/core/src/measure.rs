//! Lebesgue and Gauss measures of cylinders, fans and intervals, plus the
//! executable forms of the standard cylinder measure bounds.
//!
//! Gauss measure is normalized: `γ(I) = log2((1 + hi)/(1 + lo))`, so
//! `γ((0, 1)) = 1` and its density lies between `1/(2 ln 2)` and `1/ln 2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{CfWord, Fan, RatInterval};
use crate::enclosure::{self, Enclosure};
use crate::error::{Error, Result};
use crate::verdict::{self, Status, Verdict};

/// Fans longer than this are only summed when explicitly allowed.
pub const LARGE_FAN_TERMS: u64 = 100_000;

/// Exact Lebesgue and certified Gauss measure of one set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureValue {
    pub lebesgue: String,
    pub gauss: String,
}

pub fn measure_value(v: &CfWord, precision: u32) -> MeasureValue {
    MeasureValue {
        lebesgue: v.lebesgue().to_string(),
        gauss: gauss(v, precision).to_string(),
    }
}

/// `μ(C_v)`, exact.
pub fn lebesgue(v: &CfWord) -> BigRational {
    v.lebesgue()
}

fn one() -> BigRational {
    BigRational::one()
}

/// `γ` of an interval inside `[0, 1]`.
pub fn gauss_interval(x: &RatInterval, precision: u32) -> Enclosure {
    if x.lo == x.hi {
        return Enclosure::zero(precision);
    }
    let ratio = (one() + &x.hi) / (one() + &x.lo);
    enclosure::log2_rational(&ratio, precision).expect("ratio is positive")
}

/// `γ` of the interval between `n1/d1` and `n2/d2` (either order),
/// without normalizing either fraction.
fn gauss_between(n1: &BigInt, d1: &BigInt, n2: &BigInt, d2: &BigInt, precision: u32) -> Enclosure {
    let a = (d2 + n2) * d1;
    let b = (d1 + n1) * d2;
    if a == b {
        return Enclosure::zero(precision);
    }
    let (num, den) = if a > b { (a, b) } else { (b, a) };
    enclosure::log2_ratio(&num, &den, precision)
}

/// `γ(C_v)`.
pub fn gauss(v: &CfWord, precision: u32) -> Enclosure {
    let c = v.convergents();
    if v.is_empty() {
        return Enclosure::one(precision);
    }
    gauss_between(&c.p, &c.q, &(&c.p + &c.p_prev), &(&c.q + &c.q_prev), precision)
}

/// `γ` of the union of a fan.
pub fn gauss_fan(f: &Fan, precision: u32) -> Enclosure {
    let c = f.base().convergents();
    let a = f.from();
    let (n1, d1) = (a * &c.p + &c.p_prev, a * &c.q + &c.q_prev);
    let (n2, d2) = match f.to() {
        Some(b) => (b * &c.p + &c.p + &c.p_prev, b * &c.q + &c.q + &c.q_prev),
        None => (c.p.clone(), c.q.clone()),
    };
    gauss_between(&n1, &d1, &n2, &d2, precision)
}

/// `γ(C_v)^s`.
pub fn gauss_power(v: &CfWord, s: &BigRational, precision: u32) -> Enclosure {
    let g = gauss(v, precision + 8);
    enclosure::pow_enclosure(&g, s).expect("γ is positive").with_precision(precision)
}

/// `μ([v,i])/μ(v)` from the reversal `s_n`: `(s+1)/((s+i)(s+i+1))`;
/// `1/(i(i+1))` at λ.
pub fn lebesgue_ratio(v: &CfWord, i: &BigInt) -> BigRational {
    let i = BigRational::from_integer(i.clone());
    if v.is_empty() {
        return (&i * (&i + one())).recip();
    }
    let s = v.reversal_rational().expect("rank >= 1");
    (&s + one()) / ((&s + &i) * (&s + &i + one()))
}

/// `μ(B)/(2 ln 2) <= γ(B) <= μ(B)/ln 2` for an interval `B ⊆ [0, 1]`.
pub fn check_lebesgue_gauss_bound(x: &RatInterval, precision: u32) -> Verdict {
    verdict::escalate(precision, verdict::DEFAULT_MAX_DOUBLINGS, |p| {
        let g = gauss_interval(x, p);
        let mu = Enclosure::from_rational(&x.length(), p);
        let ln2 = enclosure::ln2(p);
        let upper = mu.div(&ln2).expect("ln 2 > 0");
        let lower = upper.mul_pow2(-1);
        let status = verdict::le(&lower, &g).and(verdict::le(&g, &upper));
        Verdict::new(format!("lebesgue-gauss {x}"), status, &g)
    })
}

/// `Π 1/((a_i+1)(a_i+2)) <= μ(v) <= Π 2/(a_i(a_i+1))`, exactly.
pub fn kraaikamp_product_bounds(v: &CfWord) -> (BigRational, BigRational) {
    let mut lo = one();
    let mut hi = one();
    for a in v.digits() {
        let a = BigRational::from_integer(a.clone());
        lo /= (&a + one()) * (&a + BigRational::from_integer(BigInt::from(2)));
        hi *= BigRational::from_integer(BigInt::from(2)) / (&a * (&a + one()));
    }
    (lo, hi)
}

pub fn check_kraaikamp_product_bounds(v: &CfWord) -> Verdict {
    let (lo, hi) = kraaikamp_product_bounds(v);
    let mu = v.lebesgue();
    Verdict::exact(format!("kraaikamp-products {v}"), lo <= mu && mu <= hi, &mu)
}

/// Exact `μ` of a fan's union and whether it obeys
/// `μ <= (2/a) Π 2/(a_i(a_i+1))`.
pub fn fan_lebesgue_bound(f: &Fan) -> (BigRational, bool) {
    let mu = f.lebesgue();
    let (_, prod) = kraaikamp_product_bounds(f.base());
    let bound = BigRational::new(BigInt::from(2), f.from().clone()) * prod;
    let ok = mu <= bound;
    (mu, ok)
}

pub fn check_fan_lebesgue_bound(f: &Fan) -> Verdict {
    let (mu, ok) = fan_lebesgue_bound(f);
    Verdict::exact(format!("fan-bound {f}"), ok, &mu)
}

/// `Σ_{i=a}^{b} γ^s([v,i])`, summed term by term in ascending `i`.
pub fn gauss_power_sum(f: &Fan, s: &BigRational, precision: u32, allow_large: bool) -> Result<Enclosure> {
    let len = f.len().ok_or(Error::InfiniteFan)?;
    if !allow_large && len > BigInt::from(LARGE_FAN_TERMS) {
        return Err(Error::FanTooLarge(len.to_string()));
    }
    let n = len.to_u64().ok_or_else(|| Error::FanTooLarge(len.to_string()))?;
    let wp = precision + 16;
    let terms: Vec<Enclosure> = (0..n)
        .into_par_iter()
        .map(|j| gauss_power(&f.base().child(&(f.from() + j)), s, wp))
        .collect();
    let mut acc = Enclosure::zero(wp);
    for t in &terms {
        acc = acc.add(t);
    }
    Ok(acc.with_precision(precision))
}

/// The growth constant `0.5 (ln 25 - 1)`.
pub fn growth_constant(precision: u32) -> Enclosure {
    let ln25 = enclosure::ln_rational(&BigRational::from_integer(25.into()), precision + 8).expect("25 > 0");
    ln25.sub(&Enclosure::one(precision + 8)).mul_pow2(-1).with_precision(precision)
}

/// `Σ_{i=a}^{b} γ^s([v,i]) > c γ^s(v)` by term-by-term evaluation.
pub fn check_power_sum_growth(f: &Fan, s: &BigRational, c: &Enclosure, precision: u32, allow_large: bool) -> Result<Verdict> {
    let fan_ok = f.len().is_some();
    if !fan_ok {
        return Err(Error::InfiniteFan);
    }
    let mut err = None;
    let v = verdict::escalate(precision, verdict::DEFAULT_MAX_DOUBLINGS, |p| {
        match gauss_power_sum(f, s, p, allow_large) {
            Ok(sum) => {
                let rhs = c.mul(&gauss_power(f.base(), s, p));
                Verdict::new(format!("power-sum growth {f}"), verdict::lt(&rhs, &sum), &sum)
            }
            Err(e) => {
                err = Some(e);
                Verdict::new("power-sum growth", Status::Refuted, &Enclosure::zero(p))
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Whether the gauss enclosures of two adjacent intervals add up to
/// (an enclosure overlapping) the gauss enclosure of their union.
pub fn gauss_additive(a: &RatInterval, b: &RatInterval, precision: u32) -> Status {
    let (left, right) = if a.hi <= b.lo { (a, b) } else { (b, a) };
    assert!(left.hi == right.lo, "intervals must be adjacent");
    let union = RatInterval::closed(left.lo.clone(), right.hi.clone());
    let sum = gauss_interval(a, precision).add(&gauss_interval(b, precision));
    verdict::eq(&sum, &gauss_interval(&union, precision))
}

/// `μ(v) = Σ_{i=1}^{M} μ([v,i]) + μ(Fan(v, M+1, ∞))`, exactly.
pub fn one_level_additivity(v: &CfWord, m: u64) -> bool {
    let mut total = BigRational::zero();
    for i in 1..=m {
        total += v.child_u64(i).lebesgue();
    }
    total += Fan::infinite(v.clone(), m + 1).lebesgue();
    total == v.lebesgue()
}
