//! The set `𝓕` cut out by a digit schedule, its covers, and the walk along
//! which any 1/2-gale loses capital.
//!
//! Digit `k` of a word in `𝓕_k` ranges over `[a_k, b_k]` with `b_k = 50 a_k`
//! and `a_k` growing fast enough that the s-mass of the natural cover `S_k`
//! is at most `1/k`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bigfloat::BigFloat;
use crate::bridge::{two_dyadic_cover, DyadicPair};
use crate::cf::{fan_interval, CfWord, Fan};
use crate::dyadic::DyadicWord;
use crate::enclosure::{self, Enclosure};
use crate::error::{Error, Result};
use crate::gale::{CapitalTrace, CfGale, Cover, CoverGale, CoverLevel, StructuredLevel, TraceNode};
use crate::measure;
use crate::verdict::{self, Status, Verdict};

/// Candidates examined per walk step before giving up.
pub const WALK_SCAN_LIMIT: u64 = 1 << 16;

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// Least `m` with `m^p >= n`.
fn ceil_root(n: &BigInt, p: u32) -> BigInt {
    let r = n.nth_root(p);
    if r.pow(p) < *n {
        r + 1
    } else {
        r
    }
}

fn exponent_parts(s: &BigRational) -> Result<(u32, u32)> {
    match (s.numer().to_u32(), s.denom().to_u32()) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(Error::ExponentRange(format!("s = {s} has too large a numerator or denominator"))),
    }
}

fn big_strings<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// The digit bounds `a_k`, `b_k` for `k = 1..=K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    #[serde(with = "crate::cf::rational_string")]
    s: BigRational,
    #[serde(serialize_with = "big_strings")]
    a: Vec<BigInt>,
    #[serde(serialize_with = "big_strings")]
    b: Vec<BigInt>,
}

/// `a_1 = 1`, `a_k = ⌈2 (k Π_{i<k} 100 a_i)^{1/s}⌉`, `b_k = 50 a_k`.
///
/// With `s = p/q` the ceiling is the least `m` with `m^p >= 2^p X^q`,
/// so every digit bound is exact.
pub fn build_schedule(s: &BigRational, depth: usize) -> Result<Schedule> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !s.is_positive() || *s >= half {
        return Err(Error::ExponentRange(format!("s = {s} is outside (0, 1/2)")));
    }
    if depth == 0 {
        return Err(Error::ScheduleDepth("a schedule needs at least one level".into()));
    }
    let (p, q) = exponent_parts(s)?;
    let mut a = vec![BigInt::one()];
    let mut prod = BigInt::from(100);
    for k in 2..=depth {
        let x = &prod * BigInt::from(k);
        let n = pow2(p as usize) * x.pow(q);
        let ak = ceil_root(&n, p);
        prod *= &ak * 100;
        a.push(ak);
    }
    let b = a.iter().map(|x| x * 50).collect();
    Ok(Schedule { s: s.clone(), a, b })
}

impl Schedule {
    pub fn s(&self) -> &BigRational {
        &self.s
    }

    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// `a_k`, 1-based.
    pub fn a(&self, k: usize) -> &BigInt {
        &self.a[k - 1]
    }

    /// `b_k`, 1-based.
    pub fn b(&self, k: usize) -> &BigInt {
        &self.b[k - 1]
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.depth() {
            Err(Error::ScheduleDepth(format!("level {k} with schedule depth {}", self.depth())))
        } else {
            Ok(())
        }
    }

    /// `b_k - a_k + 1`.
    pub fn width(&self, k: usize) -> BigInt {
        self.b(k) - self.a(k) + 1
    }

    /// `|𝓕_k| = Π_{i<=k} (b_i - a_i + 1)`.
    pub fn count(&self, k: usize) -> BigInt {
        (1..=k).map(|i| self.width(i)).product()
    }

    /// Whether every digit of `v` lies in its range.
    pub fn admits(&self, v: &CfWord) -> bool {
        v.rank() <= self.depth()
            && v.digits().iter().enumerate().all(|(i, d)| d >= self.a(i + 1) && d <= self.b(i + 1))
    }

    /// `⋃_{i=a_k}^{b_k} [v, i]` for `v` of rank `k - 1`.
    pub fn fan(&self, v: &CfWord) -> Result<Fan> {
        let k = v.rank() + 1;
        self.check_level(k)?;
        Fan::new(v.clone(), self.a(k).clone(), Some(self.b(k).clone()))
    }

    /// The largest member of `S_k`, over `[a_1, …, a_{k-1}]`.
    pub fn largest_member(&self, k: usize) -> Result<Fan> {
        self.check_level(k)?;
        self.fan(&CfWord::new(self.a[..k - 1].to_vec())?)
    }

    /// A uniformly drawn word of `𝓕_k`.
    pub fn sample_word<R: Rng>(&self, rng: &mut R, k: usize) -> Result<CfWord> {
        self.check_level(k)?;
        let digits = (1..=k).map(|i| self.a(i) + random_below(rng, &self.width(i))).collect();
        CfWord::new(digits)
    }
}

fn random_below<R: Rng>(rng: &mut R, n: &BigInt) -> BigInt {
    let bytes = (n.bits() as usize + 64).div_ceil(8);
    let buf: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
    BigInt::from_biguint(Sign::Plus, BigUint::from_bytes_le(&buf)) % n
}

/// `(2/a_k) Π_{i<k} 2/(a_i (a_i + 1))`, an upper bound on `μ(S)` for `S ∈ S_k`.
fn member_measure_bound(sched: &Schedule, k: usize) -> BigRational {
    let mut m = BigRational::new(BigInt::from(2), sched.a(k).clone());
    for i in 1..k {
        let a = sched.a(i);
        m *= BigRational::new(BigInt::from(2), a * (a + 1));
    }
    m
}

/// `|S_k| · (max μ(S))^s`, which majorizes `Σ_{S ∈ S_k} μ^s(S)`.
fn analytic_mass(sched: &Schedule, k: usize, s: &BigRational, prec: u32) -> Enclosure {
    let m = Enclosure::from_rational(&member_measure_bound(sched, k), prec + 16);
    let ms = m.pow(s).expect("measure bound is positive");
    ms.mul(&Enclosure::from_int(sched.count(k - 1), prec + 16)).with_precision(prec)
}

/// Certified s-mass of the cover `S_k`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelCoverMass {
    pub k: usize,
    /// `|S_k|`.
    pub members: String,
    /// `|S_k| (max μ(S))^s <= 1/k`.
    pub analytic: Verdict,
    /// `Σ μ^s(S) <= 1/k` by enumeration.
    pub exact: Option<Verdict>,
    /// Enumerated sum `<=` the analytic bound.
    pub majorization: Option<Verdict>,
    pub status: Status,
    #[serde(skip)]
    pub analytic_value: Enclosure,
    #[serde(skip)]
    pub exact_value: Option<Enclosure>,
}

/// Encloses `Σ_{S ∈ S_k} μ^s(S)` and certifies it is at most `1/k`.
///
/// Levels 1 and 2 are also summed member by member; the enumerated value
/// decides the status whenever it exists.
pub fn level_cover_mass(sched: &Schedule, k: usize, prec: u32) -> Result<LevelCoverMass> {
    sched.check_level(k)?;
    let s = sched.s();
    let budget = Enclosure::from_rational(&BigRational::new(BigInt::one(), BigInt::from(k)), prec);
    let analytic_value = analytic_mass(sched, k, s, prec);
    let analytic = Verdict::new(
        format!("analytic s-mass of S_{k} <= 1/{k}"),
        verdict::le(&analytic_value, &budget),
        &analytic_value,
    );
    let (exact, majorization, exact_value) = if k <= 2 {
        let bases = level_bases(sched, k - 1)?;
        let wp = prec + 16;
        let terms: Vec<Enclosure> = bases
            .par_iter()
            .map(|v| {
                let mu = sched.fan(v).expect("base within schedule").lebesgue();
                Enclosure::from_rational(&mu, wp).pow(s).expect("positive measure")
            })
            .collect();
        let sum = Enclosure::sum(&terms, wp).with_precision(prec);
        let e = Verdict::new(format!("enumerated s-mass of S_{k} <= 1/{k}"), verdict::le(&sum, &budget), &sum);
        let m = Verdict::new(
            format!("enumerated s-mass of S_{k} <= analytic bound"),
            verdict::le(&sum, &analytic_value),
            &analytic_value.sub(&sum),
        );
        (Some(e), Some(m), Some(sum))
    } else {
        (None, None, None)
    };
    let status = exact.as_ref().map_or(analytic.status, |e| e.status);
    Ok(LevelCoverMass {
        k,
        members: sched.count(k - 1).to_string(),
        analytic,
        exact,
        majorization,
        status,
        analytic_value,
        exact_value,
    })
}

/// All words of `𝓕_r`; only sensible for small `r`.
fn level_bases(sched: &Schedule, r: usize) -> Result<Vec<CfWord>> {
    let mut out = vec![CfWord::empty()];
    for i in 1..=r {
        let n = sched.width(i).to_u64().filter(|n| *n <= measure::LARGE_FAN_TERMS);
        let n = n.ok_or_else(|| Error::FanTooLarge(sched.width(i).to_string()))?;
        out = out
            .iter()
            .flat_map(|v| (0..n).map(move |j| v.child(&(sched.a(i) + j))))
            .collect();
    }
    Ok(out)
}

fn pair_of(sched: &Schedule, v: &CfWord) -> DyadicPair {
    two_dyadic_cover(&fan_interval(&sched.fan(v).expect("base within schedule")))
}

/// Drop duplicates and every word with a proper prefix in the set.
fn prune(mut words: Vec<DyadicWord>) -> Vec<DyadicWord> {
    words.sort();
    words.dedup();
    let set: HashSet<DyadicWord> = words.iter().cloned().collect();
    words.retain(|w| (0..w.len()).all(|i| !set.contains(&w.prefix(i))));
    words
}

/// The binary cover `B_k`: both words of the two-dyadic cover of every
/// `S ∈ S_k`, pruned to be prefix-free.
///
/// Levels 1 and 2 are listed; deeper levels are answered by oracles.
pub fn binary_level_cover(sched: &Schedule, k: usize) -> Result<CoverLevel> {
    sched.check_level(k)?;
    if k <= 2 {
        let words = level_bases(sched, k - 1)?
            .iter()
            .flat_map(|v| {
                let p = pair_of(sched, v);
                [p.left, p.right]
            })
            .collect();
        Ok(CoverLevel::Explicit(prune(words)))
    } else {
        Ok(CoverLevel::Structured(Arc::new(ScheduleLevel::new(sched.clone(), k))))
    }
}

/// `Σ_{b ∈ B_k} μ^s(b) <= 2^{1+s}/k`.
pub fn binary_level_mass(sched: &Schedule, k: usize, prec: u32) -> Result<Verdict> {
    let level = binary_level_cover(sched, k)?;
    let s = sched.s().clone();
    let cover = Cover::new(s.clone(), BTreeMap::from([(0, level)]))?;
    let mass = cover.level_mass(0, prec).expect("level 0 present");
    let bound = enclosure::exp2_rational(&(BigRational::one() + &s), prec).mul_rational(&BigRational::new(
        BigInt::one(),
        BigInt::from(k),
    ));
    Ok(Verdict::new(format!("s-mass of B_{k} <= 2^(1+s)/{k}"), verdict::le(&mass, &bound), &mass))
}

/// `B_k` for a level too large to list.
pub struct ScheduleLevel {
    sched: Schedule,
    k: usize,
    max_member: BigRational,
}

impl ScheduleLevel {
    pub fn new(sched: Schedule, k: usize) -> Self {
        let max_member = member_measure_bound(&sched, k);
        ScheduleLevel { sched, k, max_member }
    }

    /// Digits of the children of `v` whose closures hold `x`.
    fn child_digits(v: &CfWord, x: &BigRational) -> Vec<BigInt> {
        let Some(t) = v.convergents().tail_of(x) else { return Vec::new() };
        if !t.is_positive() || t > BigRational::one() {
            return Vec::new();
        }
        let u = t.recip();
        let fl = u.floor().to_integer();
        if u.is_integer() && fl > BigInt::one() {
            vec![&fl - 1, fl]
        } else {
            vec![fl]
        }
    }

    /// Words of `𝓕_{k-1}` whose cylinder closures hold `x`.
    fn locate(&self, x: &BigRational) -> Vec<CfWord> {
        let mut frontier = vec![CfWord::empty()];
        for i in 1..self.k {
            frontier = frontier
                .iter()
                .flat_map(|v| {
                    Self::child_digits(v, x)
                        .into_iter()
                        .filter(|d| d >= self.sched.a(i) && d <= self.sched.b(i))
                        .map(|d| v.child(&d))
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        frontier
    }

    /// Upper bound on the words of `𝓕_{k-1}` under `v` whose cylinder
    /// closures meet `[lo, hi]`.
    fn count_meeting(&self, v: &CfWord, lo: &BigRational, hi: &BigRational) -> BigInt {
        let r = v.rank();
        if r + 1 == self.k {
            return BigInt::one();
        }
        let c = v.cylinder();
        let x = lo.max(&c.lo).clone();
        let y = hi.min(&c.hi).clone();
        if x > y {
            return BigInt::zero();
        }
        let conv = v.convergents();
        let (tx, ty) = (conv.tail_of(&x).expect("inside"), conv.tail_of(&y).expect("inside"));
        let (t1, t2) = if tx <= ty { (tx, ty) } else { (ty, tx) };
        if t2.is_zero() {
            return BigInt::zero();
        }
        let d = r + 1;
        let from = (t2.recip() - BigRational::one()).ceil().to_integer().max(BigInt::one()).max(self.sched.a(d).clone());
        let to = if t1.is_zero() {
            self.sched.b(d).clone()
        } else {
            t1.recip().floor().to_integer().min(self.sched.b(d).clone())
        };
        if from > to {
            return BigInt::zero();
        }
        if d + 1 == self.k {
            return to - from + 1;
        }
        let mut n = self.count_meeting(&v.child(&from), lo, hi);
        if to > from {
            n += self.count_meeting(&v.child(&to), lo, hi);
            let inner: BigInt = &to - &from - 1;
            if inner.is_positive() {
                let rest: BigInt = (d + 1..self.k).map(|i| self.sched.width(i)).product();
                n += inner * rest;
            }
        }
        n
    }

    /// The pruned member of `B_k` whose interval holds `x`.
    pub fn word_for_point(&self, x: &BigRational) -> Option<DyadicWord> {
        let v = self
            .locate(x)
            .into_iter()
            .find(|v| self.sched.fan(v).is_ok_and(|f| fan_interval(&f).contains(x)))?;
        let p = pair_of(&self.sched, &v);
        let w = [p.left, p.right].into_iter().find(|w| w.interval().contains(x))?;
        self.member_prefix_of(&w)
    }
}

impl StructuredLevel for ScheduleLevel {
    fn descriptor(&self) -> String {
        format!("B_{} over {} members of S_{}", self.k, self.sched.count(self.k - 1), self.k)
    }

    /// A member `v ⊑ w` is one word of the pair of some `S` with
    /// `2^{-|v|} < 2 μ(S)`, and `S` meets `[v]` or a neighbouring cell; such
    /// an `S` holds a point of a quarter-cell grid around `[v]`, nudged by
    /// a sixteenth of a cell.
    fn member_prefix_of(&self, w: &DyadicWord) -> Option<DyadicWord> {
        let two_m = &self.max_member * int(2);
        let mut cands: BTreeSet<CfWord> = BTreeSet::new();
        for l in 1..=w.len() {
            let cell = BigRational::new(BigInt::one(), pow2(l));
            if cell >= two_m {
                continue;
            }
            let lo = w.prefix(l).lo();
            let step = &cell / int(4);
            let eps = &cell / int(16);
            for j in -4i64..=8 {
                let g = &lo + &step * int(j);
                for x in [&g - &eps, &g + &eps] {
                    if x.is_positive() && x < BigRational::one() {
                        cands.extend(self.locate(&x));
                    }
                }
            }
        }
        cands
            .iter()
            .flat_map(|v| {
                let p = pair_of(&self.sched, v);
                [p.left, p.right]
            })
            .filter(|u| u.is_prefix_of(w))
            .min_by_key(|u| u.len())
    }

    /// Members strictly below `w` are disjoint subintervals of `[w]`, at
    /// most two per `S` meeting `[w]` widened by half its length, so by
    /// concavity their s-mass is at most `N^{1-s} μ(w)^s`.
    fn mass_below(&self, w: &DyadicWord, s: &BigRational, prec: u32) -> Enclosure {
        let total = self.total_mass(s, prec);
        let half = w.lebesgue() / int(2);
        let lo = (w.lo() - &half).max(BigRational::zero());
        let hi = (w.hi() + &half).min(BigRational::one());
        let n: BigInt = self.count_meeting(&CfWord::empty(), &lo, &hi) * 2;
        if n.is_zero() {
            return Enclosure::zero(prec);
        }
        let e = BigRational::one() - s;
        let local = Enclosure::from_int(n, prec)
            .pow(&e)
            .expect("positive count")
            .mul(&enclosure::exp2_rational(&(-s * int(w.len())), prec));
        let hi = if local.hi() < total.hi() { local.hi().clone() } else { total.hi().clone() };
        Enclosure::new(BigFloat::zero(), hi, prec)
    }

    /// `[0, 2^{1+s} |S_k| (max μ(S))^s]`.
    fn total_mass(&self, s: &BigRational, prec: u32) -> Enclosure {
        let u = analytic_mass(&self.sched, self.k, s, prec);
        let bound = u.mul(&enclosure::exp2_rational(&(BigRational::one() + s), prec));
        Enclosure::new(BigFloat::zero(), bound.hi().clone(), prec)
    }
}

/// `⌈2^{1+s} 4^j⌉`, the schedule level whose cover has s-mass at most `4^{-j}`.
pub fn cover_level_for(s: &BigRational, j: usize) -> Result<usize> {
    let (p, q) = exponent_parts(s)?;
    let n = pow2((p + q) as usize + 2 * j * q as usize);
    ceil_root(&n, q).to_usize().ok_or_else(|| Error::ScheduleDepth(format!("level for j = {j}")))
}

/// The binary s-gale compiled from the covers `B_{k_j}`, `j = 0..=n`.
pub struct Counterexample {
    pub gale: CoverGale,
    /// `(2j, k_j)`: cover index and the schedule level behind it.
    pub levels: Vec<(usize, usize)>,
}

/// `d = Σ_{j<=n} 2^j d_{2j}` where `d_{2j}` bets on `B_{k_j}`.
///
/// Every word of `B_{k_n}` ends with capital at least `2^n`.
pub fn counterexample_gale(sched: &Schedule, n: usize) -> Result<Counterexample> {
    let mut levels = Vec::new();
    let mut map = BTreeMap::new();
    for j in 0..=n {
        let k = cover_level_for(sched.s(), j)?;
        if k > sched.depth() {
            return Err(Error::ScheduleDepth(format!("target 2^{n} needs level {k}, schedule has {}", sched.depth())));
        }
        map.insert(2 * j, binary_level_cover(sched, k)?);
        levels.push((2 * j, k));
    }
    let cover = Cover::new(sched.s().clone(), map)?;
    Ok(Counterexample { gale: CoverGale::new(cover), levels })
}

/// The pruned member of `B_k` whose interval holds `x`, for `x` in a
/// member of `S_k`.
pub fn cover_word_for_point(sched: &Schedule, k: usize, x: &BigRational) -> Result<Option<DyadicWord>> {
    sched.check_level(k)?;
    let level = ScheduleLevel::new(sched.clone(), k);
    if k > 2 {
        return Ok(level.word_for_point(x));
    }
    let CoverLevel::Explicit(words) = binary_level_cover(sched, k)? else { unreachable!() };
    Ok(words.into_iter().find(|w| w.interval().contains(x)))
}

/// Growth constant check for one level.
///
/// Short fans are summed term by term; long ones use
/// `Σ_{i=a}^{b} γ^{1/2}([v,i]) / γ^{1/2}(v) >= ½ Σ_{i=a}^{b} 1/(i+2) >= ½ ln((b+3)/(a+2))`.
pub fn verify_level_growth(sched: &Schedule, v: &CfWord, prec: u32) -> Result<Verdict> {
    verify_level_growth_with(sched, v, &measure::growth_constant(prec), prec)
}

pub fn verify_level_growth_with(sched: &Schedule, v: &CfWord, c: &Enclosure, prec: u32) -> Result<Verdict> {
    let fan = sched.fan(v)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let len = fan.len().expect("finite fan");
    if len <= BigInt::from(measure::LARGE_FAN_TERMS) {
        return measure::check_power_sum_growth(&fan, &half, c, prec, false);
    }
    let k = v.rank() + 1;
    let ratio = BigRational::new(sched.b(k) + 3, sched.a(k) + 2);
    let bound = enclosure::ln_rational(&ratio, prec)?.mul_pow2(-1);
    let status = match verdict::lt(c, &bound) {
        Status::Proved => Status::Proved,
        _ => Status::Indeterminate,
    };
    Ok(Verdict::new(format!("power-sum growth {fan} (harmonic bound)"), status, &bound))
}

/// One step of [`diagonal_walk`].
#[derive(Clone, Debug, Serialize)]
pub struct WalkStep {
    pub rank: usize,
    pub digit: String,
    /// Candidates tried, including the chosen one.
    pub scanned: u64,
    /// `c · d([v,i]) < d(v)`.
    pub decay: Verdict,
}

/// Output of [`diagonal_walk`].
#[derive(Clone, Debug, Serialize)]
pub struct Walk {
    pub word: CfWord,
    pub c: String,
    pub trace: CapitalTrace,
    pub steps: Vec<WalkStep>,
    /// `d(v_n) c^n < d(λ)`.
    pub total: Verdict,
}

/// Extends `λ` by the least digit in `[a_k, b_k]` at which the gale's
/// capital certifiably drops by more than `c = ½(ln 25 - 1)`.
pub fn diagonal_walk(d: &dyn CfGale, sched: &Schedule, depth: usize, prec: u32) -> Result<Walk> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if d.exponent() != half {
        return Err(Error::ExponentMismatch(format!("walk needs a 1/2-gale, got s = {}", d.exponent())));
    }
    if depth > sched.depth() {
        return Err(Error::ScheduleDepth(format!("walk depth {depth} exceeds schedule depth {}", sched.depth())));
    }
    let c = measure::growth_constant(prec);
    let mut v = CfWord::empty();
    let mut cur = d.capital(&v, prec);
    let mut values = vec![cur.clone()];
    let mut steps = Vec::new();
    for k in 1..=depth {
        let a = sched.a(k).clone();
        let span = sched.width(k).to_u64().unwrap_or(u64::MAX).min(WALK_SCAN_LIMIT);
        let mut found = None;
        let mut start = 0u64;
        while start < span && found.is_none() {
            let end = (start + 64).min(span);
            found = (start..end).into_par_iter().find_first(|j| {
                let child = v.child(&(&a + j));
                verdict::lt(&c.mul(&d.capital(&child, prec)), &cur) == Status::Proved
            });
            start = end;
        }
        let j = found.ok_or_else(|| Error::Indeterminate(v.to_string()))?;
        let digit = &a + j;
        let child = v.child(&digit);
        let next = d.capital(&child, prec);
        let lhs = c.mul(&next);
        steps.push(WalkStep {
            rank: k,
            digit: digit.to_string(),
            scanned: j + 1,
            decay: Verdict::new(format!("c d({child}) < d({v})"), verdict::lt(&lhs, &cur), &cur.sub(&lhs)),
        });
        v = child;
        cur = next;
        values.push(cur.clone());
    }
    let mut scaled = cur.clone();
    for _ in 0..depth {
        scaled = scaled.mul(&c);
    }
    let total = Verdict::new(
        format!("d({v}) c^{depth} < d(λ)"),
        verdict::lt(&scaled, &values[0]),
        &values[0].sub(&scaled),
    );
    let nodes = values
        .iter()
        .enumerate()
        .map(|(n, e)| TraceNode {
            word: v.prefix(n).to_string(),
            lo: e.lo().to_decimal(20, crate::Round::Down),
            hi: e.hi().to_decimal(20, crate::Round::Up),
        })
        .collect();
    let trace = CapitalTrace { construction: d.descriptor(), s: d.exponent().to_string(), nodes, values };
    Ok(Walk { word: v, c: c.display(20), trace, steps, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gale::{check_bin_gale_condition, BinGale, GaussGale};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn schedule_examples() {
        let s4 = build_schedule(&r(2, 5), 2).unwrap();
        assert_eq!(s4.a(1), &BigInt::one());
        assert_eq!(s4.a(2), &BigInt::from(1_131_371));
        assert_eq!(s4.b(2), &BigInt::from(56_568_550));
        let s25 = build_schedule(&r(1, 4), 2).unwrap();
        assert_eq!(s25.a(2), &BigInt::from(3_200_000_000u64));
        assert!(build_schedule(&r(1, 2), 2).is_err());
        assert!(build_schedule(&r(2, 5), 0).is_err());
    }

    #[test]
    fn schedule_ceiling_never_undershoots() {
        // a_k^p >= 2^p X^q and (a_k - 1)^p < 2^p X^q
        let sched = build_schedule(&r(2, 5), 4).unwrap();
        let mut x = BigInt::from(100);
        for k in 2..=4 {
            let n = BigInt::from(4) * (&x * BigInt::from(k)).pow(5);
            assert!(sched.a(k).pow(2) >= n);
            assert!((sched.a(k) - BigInt::one()).pow(2) < n);
            assert!(sched.a(k) > sched.a(k - 1));
            x *= sched.a(k) * 100;
        }
    }

    #[test]
    fn cover_level_indices() {
        assert_eq!(cover_level_for(&r(2, 5), 0).unwrap(), 3);
        assert_eq!(cover_level_for(&r(2, 5), 1).unwrap(), 11);
        assert_eq!(cover_level_for(&r(1, 4), 0).unwrap(), 3);
    }

    #[test]
    fn first_cover_mass() {
        let sched = build_schedule(&r(2, 5), 3).unwrap();
        let m = level_cover_mass(&sched, 1, 128).unwrap();
        assert_eq!(m.status, Status::Proved);
        // (50/51)^{2/5}: its fifth power is (50/51)^2
        let e = m.exact_value.unwrap();
        let fifth = e.mul(&e).mul(&e).mul(&e).mul(&e);
        assert!(fifth.contains(&r(2500, 2601)));
        assert!(e.width() < BigFloat::pow2(-100));
        // the majorization chain alone does not reach 1 at k = 1
        assert_ne!(m.analytic.status, Status::Proved);
    }

    #[test]
    fn deeper_cover_masses() {
        let sched = build_schedule(&r(2, 5), 3).unwrap();
        let m2 = level_cover_mass(&sched, 2, 128).unwrap();
        assert_eq!(m2.members, "50");
        assert!(m2.analytic.is_proved());
        assert!(m2.exact.unwrap().is_proved());
        assert!(m2.majorization.unwrap().is_proved());
        let m3 = level_cover_mass(&sched, 3, 128).unwrap();
        assert!(m3.exact.is_none());
        assert_eq!(m3.status, Status::Proved);
    }

    #[test]
    fn binary_covers_are_prefix_free_and_light() {
        let sched = build_schedule(&r(2, 5), 3).unwrap();
        for k in 1..=2 {
            let CoverLevel::Explicit(words) = binary_level_cover(&sched, k).unwrap() else { panic!() };
            for (i, u) in words.iter().enumerate() {
                for (j, v) in words.iter().enumerate() {
                    assert!(i == j || !u.is_prefix_of(v));
                }
            }
            assert!(binary_level_mass(&sched, k, 128).unwrap().is_proved());
        }
        let CoverLevel::Explicit(first) = binary_level_cover(&sched, 1).unwrap() else { panic!() };
        assert_eq!(first, vec![DyadicWord::parse("0").unwrap(), DyadicWord::parse("1").unwrap()]);
        assert!(binary_level_mass(&sched, 3, 128).unwrap().is_proved());
    }

    #[test]
    fn structured_level_agrees_with_listing() {
        // a level-2 oracle checked against the explicit level-2 list
        let sched = build_schedule(&r(2, 5), 2).unwrap();
        let level = ScheduleLevel::new(sched.clone(), 2);
        let CoverLevel::Explicit(words) = binary_level_cover(&sched, 2).unwrap() else { panic!() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for w in words.iter().take(40) {
            assert_eq!(level.member_prefix_of(w).as_ref(), Some(w));
            let ext = w.extend(rng.gen(), 3);
            assert_eq!(level.member_prefix_of(&ext).as_ref(), Some(w));
            assert_eq!(level.member_prefix_of(&w.parent()), None);
        }
        for v in level_bases(&sched, 1).unwrap().iter().take(10) {
            let x = sched.fan(v).unwrap().interval().midpoint();
            let w = level.word_for_point(&x).unwrap();
            assert!(words.contains(&w));
        }
    }

    #[test]
    fn structured_mass_below_encloses_listing() {
        let sched = build_schedule(&r(2, 5), 2).unwrap();
        let level = ScheduleLevel::new(sched.clone(), 2);
        let CoverLevel::Explicit(words) = binary_level_cover(&sched, 2).unwrap() else { panic!() };
        let s = sched.s().clone();
        let cover = Cover::new(s.clone(), BTreeMap::from([(0, CoverLevel::Explicit(words.clone()))])).unwrap();
        for w in ["", "1", "10", "101", "0111"] {
            let w = DyadicWord::parse(if w.is_empty() { "λ" } else { w }).unwrap();
            let exact = cover.level_capital(0, &w, 128).unwrap();
            if level.member_prefix_of(&w).is_some() {
                continue;
            }
            let loose = level.mass_below(&w, &s, 128).mul(&enclosure::exp2_rational(&(&s * int(w.len())), 128));
            assert!(loose.hi() >= exact.lo(), "{w}");
        }
    }

    #[test]
    fn counterexample_at_level_three() {
        let sched = build_schedule(&r(2, 5), 3).unwrap();
        let ce = counterexample_gale(&sched, 0).unwrap();
        assert_eq!(ce.levels, vec![(0, 3)]);
        let d0 = ce.gale.capital(&DyadicWord::empty(), 128);
        assert!(d0.hi_rational() <= BigRational::one());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let v = sched.sample_word(&mut rng, 3).unwrap();
            let x = v.child_u64(2).value();
            let w = cover_word_for_point(&sched, 3, &x).unwrap().expect("covered");
            assert!(w.interval().contains(&x));
            assert!(ce.gale.capital(&w, 128).lo_rational() >= BigRational::one());
        }
        assert!(matches!(counterexample_gale(&sched, 1), Err(Error::ScheduleDepth(_))));
        let short = build_schedule(&r(2, 5), 1).unwrap();
        assert!(matches!(counterexample_gale(&short, 0), Err(Error::ScheduleDepth(_))));
    }

    #[test]
    fn explicit_counterexample_is_a_gale() {
        // s = 2/5 with a level-2 cover: k_0 = 3 is too deep, so build by hand
        let sched = build_schedule(&r(2, 5), 2).unwrap();
        let cover = Cover::new(sched.s().clone(), BTreeMap::from([(0, binary_level_cover(&sched, 2).unwrap())])).unwrap();
        let g = CoverGale::new(cover);
        for w in ["λ", "1", "11", "110", "0", "01"] {
            let w = DyadicWord::parse(w).unwrap();
            assert!(check_bin_gale_condition(&g, &w, 128).is_proved(), "{w}");
        }
    }

    #[test]
    fn level_growth() {
        let sched = build_schedule(&r(2, 5), 3).unwrap();
        let first = verify_level_growth(&sched, &CfWord::empty(), 128).unwrap();
        assert!(first.is_proved());
        assert!(first.lo.parse::<f64>().unwrap() > 1.109);
        let second = verify_level_growth(&sched, &CfWord::from_u64s(&[1]), 128).unwrap();
        assert!(second.is_proved());
        assert!(second.claim.contains("harmonic"));
        let ten = Enclosure::from_int(10, 128);
        let bad = verify_level_growth_with(&sched, &CfWord::empty(), &ten, 128).unwrap();
        assert_eq!(bad.status, Status::Refuted);
    }

    #[test]
    fn walk_against_gauss() {
        let sched = build_schedule(&r(2, 5), 3).unwrap();
        let g = GaussGale::new(r(1, 2)).unwrap();
        let w1 = diagonal_walk(&g, &sched, 1, 128).unwrap();
        assert_eq!(w1.word, CfWord::from_u64s(&[1]));
        assert!((w1.trace.values[1].midpoint_f64() - 0.644).abs() < 1e-3);
        let w3 = diagonal_walk(&g, &sched, 3, 128).unwrap();
        assert_eq!(w3.word.rank(), 3);
        assert!(sched.admits(&w3.word));
        assert!(w3.steps.iter().all(|s| s.decay.is_proved()));
        assert!(w3.total.is_proved());
        let w0 = diagonal_walk(&g, &sched, 0, 128).unwrap();
        assert_eq!(w0.word, CfWord::empty());
        assert_eq!(w0.trace.values.len(), 1);
        assert!(diagonal_walk(&g, &sched, 4, 128).is_err());
        let wrong = GaussGale::new(r(2, 5)).unwrap();
        assert!(diagonal_walk(&wrong, &sched, 1, 128).is_err());
    }
}
