//! Certified real enclosures with exact dyadic endpoints.
//!
//! An [`Enclosure`] `[lo, hi]` is guaranteed to contain the real value it
//! stands for. Every operation rounds its endpoints outward to the working
//! precision, so containment survives arbitrary composition. The
//! transcendental core is a pair of fixed-point series (`atanh` for
//! logarithms, Taylor for `exp`) evaluated twice, once with every
//! truncation rounded down and once rounded up, plus an explicit tail bound.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bigfloat::{BigFloat, Round};
use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// A closed interval of reals with dyadic endpoints.
#[derive(Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigFloat,
    hi: BigFloat,
    precision: u32,
}

impl Enclosure {
    /// An enclosure of `[lo, hi]`. Panics if `lo > hi`.
    pub fn new(lo: BigFloat, hi: BigFloat, precision: u32) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi: {lo:?} > {hi:?}");
        Enclosure { lo, hi, precision }
    }

    pub fn point(x: BigFloat, precision: u32) -> Self {
        Enclosure { lo: x.clone(), hi: x, precision }
    }

    pub fn zero(precision: u32) -> Self {
        Enclosure::point(BigFloat::zero(), precision)
    }

    pub fn one(precision: u32) -> Self {
        Enclosure::point(BigFloat::one(), precision)
    }

    pub fn from_int<T: Into<BigInt>>(n: T, precision: u32) -> Self {
        let x = BigFloat::from_int(n);
        Enclosure::new(x.round(precision, Round::Down), x.round(precision, Round::Up), precision)
    }

    /// Tightest enclosure of a rational at the given precision.
    pub fn from_rational(q: &BigRational, precision: u32) -> Self {
        Enclosure {
            lo: BigFloat::from_rational(q, precision, Round::Down),
            hi: BigFloat::from_rational(q, precision, Round::Up),
            precision,
        }
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }

    pub fn lo_rational(&self) -> BigRational {
        self.lo.to_rational()
    }

    pub fn hi_rational(&self) -> BigRational {
        self.hi.to_rational()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision;
        self
    }

    pub fn width(&self) -> BigFloat {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo.to_rational() <= *x && *x <= self.hi.to_rational()
    }

    pub fn contains_float(&self, x: &BigFloat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `true` when `other` lies inside `self`.
    pub fn encloses(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersection(&self, other: &Enclosure) -> Option<Enclosure> {
        let lo = self.lo.max_with(&other.lo);
        let hi = self.hi.min_with(&other.hi);
        if lo <= hi {
            Some(Enclosure::new(lo, hi, self.precision.max(other.precision)))
        } else {
            None
        }
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(
            self.lo.min_with(&other.lo),
            self.hi.max_with(&other.hi),
            self.precision.max(other.precision),
        )
    }

    /// Certified strict comparison: `Some(Less)` if every point of `self` is
    /// below every point of `other`, `Some(Greater)` for the converse,
    /// `Some(Equal)` only when both are the same exact point.
    pub fn compare(&self, other: &Enclosure) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn certainly_lt(&self, other: &Enclosure) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &Enclosure) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn certainly_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    fn prec_with(&self, other: &Enclosure) -> u32 {
        self.precision.max(other.precision)
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        let p = self.prec_with(other);
        Enclosure {
            lo: self.lo.add_round(&other.lo, p, Round::Down),
            hi: self.hi.add_round(&other.hi, p, Round::Up),
            precision: p,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        let p = self.prec_with(other);
        Enclosure {
            lo: self.lo.sub_round(&other.hi, p, Round::Down),
            hi: self.hi.sub_round(&other.lo, p, Round::Up),
            precision: p,
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure { lo: self.hi.neg(), hi: self.lo.neg(), precision: self.precision }
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let p = self.prec_with(other);
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Enclosure {
                lo: self.lo.mul_round(&other.lo, p, Round::Down),
                hi: self.hi.mul_round(&other.hi, p, Round::Up),
                precision: p,
            };
        }
        let prods = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = prods.iter().min().cloned().unwrap_or_else(BigFloat::zero);
        let hi = prods.iter().max().cloned().unwrap_or_else(BigFloat::zero);
        Enclosure { lo: lo.round(p, Round::Down), hi: hi.round(p, Round::Up), precision: p }
    }

    /// Quotient; errors when the divisor enclosure contains zero.
    pub fn div(&self, other: &Enclosure) -> Result<Enclosure> {
        if other.lo <= BigFloat::zero() && other.hi >= BigFloat::zero() {
            return Err(Error::EnclosureDomain("division by an enclosure containing 0".into()));
        }
        let p = self.prec_with(other);
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = cands
            .iter()
            .map(|(a, b)| a.div_round(b, p, Round::Down))
            .min()
            .unwrap_or_else(BigFloat::zero);
        let hi = cands
            .iter()
            .map(|(a, b)| a.div_round(b, p, Round::Up))
            .max()
            .unwrap_or_else(BigFloat::zero);
        Ok(Enclosure { lo, hi, precision: p })
    }

    pub fn recip(&self) -> Result<Enclosure> {
        Enclosure::one(self.precision).div(self)
    }

    pub fn mul_rational(&self, q: &BigRational) -> Enclosure {
        self.mul(&Enclosure::from_rational(q, self.precision))
    }

    pub fn mul_pow2(&self, k: i64) -> Enclosure {
        Enclosure { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k), precision: self.precision }
    }

    /// Sum of enclosures, accumulated left to right (fixed order).
    pub fn sum<'a, I: IntoIterator<Item = &'a Enclosure>>(items: I, precision: u32) -> Enclosure {
        items.into_iter().fold(Enclosure::zero(precision), |acc, x| acc.add(x))
    }

    /// Clamp the lower endpoint at zero, for quantities known to be
    /// nonnegative whose enclosure dipped below through cancellation.
    pub fn clamp_nonnegative(&self) -> Enclosure {
        let zero = BigFloat::zero();
        let lo = self.lo.max_with(&zero);
        let hi = self.hi.max_with(&zero);
        Enclosure { lo, hi, precision: self.precision }
    }

    pub fn log2(&self) -> Result<Enclosure> {
        log2_enclosure(self)
    }

    pub fn exp2(&self) -> Enclosure {
        exp2_enclosure(self)
    }

    pub fn pow(&self, s: &BigRational) -> Result<Enclosure> {
        pow_enclosure(self, s)
    }

    /// Render as `[lo, hi] @ precision` with outward decimal rounding.
    pub fn display(&self, digits: usize) -> String {
        format!(
            "[{}, {}] @ {}",
            self.lo.to_decimal(digits, Round::Down),
            self.hi.to_decimal(digits, Round::Up),
            self.precision
        )
    }
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(20))
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(20))
    }
}

// ---------------------------------------------------------------------------
// Transcendental kernels
// ---------------------------------------------------------------------------

fn guard_bits(prec: u32) -> u32 {
    prec + 32
}

/// Fixed-point lower and upper bounds of `sum_{j>=0} z^j / (2j+1)` scaled by
/// `2^p`, where `z = num / den` lies in `[0, 1/9]`.
fn atanh_series_fixed(num: &BigInt, den: &BigInt, p: u32, stop_bits: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << p;
    if num.is_zero() {
        return (one.clone(), one);
    }
    let scaled = num << p;
    let (z_lo, r) = scaled.div_rem(den);
    let z_hi = if r.is_zero() { z_lo.clone() } else { &z_lo + 1 };
    let mut t_lo = one.clone();
    let mut t_hi = one.clone();
    let mut s_lo = BigInt::zero();
    let mut s_hi = BigInt::zero();
    let threshold = BigInt::one() << (p.saturating_sub(stop_bits));
    let mut j: u64 = 0;
    loop {
        let d = BigInt::from(2 * j + 1);
        s_lo += t_lo.div_floor(&d);
        s_hi += div_ceil(&t_hi, &d);
        t_lo = (&t_lo * &z_lo) >> p;
        t_hi = shr_ceil(&(&t_hi * &z_hi), p);
        j += 1;
        if t_hi <= threshold || t_hi.is_zero() {
            break;
        }
    }
    // tail: sum_{i>j} z^i/(2i+1) <= t_hi / (1 - z) <= 2 t_hi for z <= 1/2
    s_hi += t_hi * 2;
    (s_lo, s_hi)
}

/// Fixed-point bounds of `exp(x)` scaled by `2^p`, for `0 <= x < 1` given
/// as the fixed-point integer `x_fixed / 2^p`. `dir` picks which bound.
fn exp_series_fixed(x_fixed: &BigInt, p: u32, dir: Round, stop_bits: u32) -> BigInt {
    let one = BigInt::one() << p;
    let mut term = one.clone();
    let mut sum = BigInt::zero();
    let threshold = BigInt::one() << (p.saturating_sub(stop_bits));
    let mut j: u64 = 1;
    loop {
        sum += &term;
        let prod = &term * x_fixed;
        let den = BigInt::from(j) << p;
        term = match dir {
            Round::Down => prod.div_floor(&den),
            Round::Up => div_ceil(&prod, &den),
        };
        j += 1;
        if term <= threshold || term.is_zero() {
            break;
        }
    }
    if dir == Round::Up {
        // tail after the last added term: term * sum_k (x/(j))^k <= 2 term
        sum += term * 2;
    }
    sum
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() { q } else { q + 1 }
}

fn shr_ceil(a: &BigInt, k: u32) -> BigInt {
    let q = a >> k;
    if (&q << k) == *a { q } else { q + 1 }
}

/// Natural logarithm of a positive rational `x` already reduced to
/// `[1/2, 2]`, as an enclosure. Uses `ln x = 2 atanh((x-1)/(x+1))`.
fn ln_reduced(num: &BigInt, den: &BigInt, prec: u32) -> Enclosure {
    let a = num - den;
    if a.is_zero() {
        return Enclosure::zero(prec);
    }
    let b = num + den;
    let p = guard_bits(prec);
    let (s_lo, s_hi) = atanh_series_fixed(&(&a * &a), &(&b * &b), p, prec + 16);
    // ln x = 2 (a/b) * S / 2^p
    let two_a = &a * 2;
    let den_scaled = &b << p;
    let (lo_num, hi_num) = if a.is_positive() {
        (&two_a * &s_lo, &two_a * &s_hi)
    } else {
        (&two_a * &s_hi, &two_a * &s_lo)
    };
    Enclosure::new(
        BigFloat::from_ratio(&lo_num, &den_scaled, prec, Round::Down),
        BigFloat::from_ratio(&hi_num, &den_scaled, prec, Round::Up),
        prec,
    )
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, Enclosure>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Enclosure>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of `ln 2`.
pub fn ln2(prec: u32) -> Enclosure {
    if let Some(v) = ln2_cache().lock().ok().and_then(|m| m.get(&prec).cloned()) {
        return v;
    }
    let v = ln_reduced(&BigInt::from(2), &BigInt::one(), prec);
    if let Ok(mut m) = ln2_cache().lock() {
        m.insert(prec, v.clone());
    }
    v
}

/// Split a positive rational as `x = 2^e * r` with `r` in `[3/4, 3/2)`.
fn reduce_pow2(num: &BigInt, den: &BigInt) -> (i64, BigInt, BigInt) {
    let mut e = num.bits() as i64 - den.bits() as i64;
    let (mut n, mut d) = if e >= 0 {
        (num.clone(), den << (e as u64))
    } else {
        (num << ((-e) as u64), den.clone())
    };
    // now n/d lies in (1/2, 2)
    if &n * 2 >= &d * 3 {
        d <<= 1;
        e += 1;
    } else if &n * 4 < &d * 3 {
        n <<= 1;
        e -= 1;
    }
    (e, n, d)
}

/// Enclosure of `ln q` for a positive rational `q`.
pub fn ln_rational(q: &BigRational, prec: u32) -> Result<Enclosure> {
    if !q.is_positive() {
        return Err(Error::EnclosureDomain(format!("ln of nonpositive value {q}")));
    }
    let wp = prec + 8;
    let (e, n, d) = reduce_pow2(q.numer(), q.denom());
    let r = ln_reduced(&n, &d, wp);
    let out = if e == 0 { r } else { ln2(wp).mul(&Enclosure::from_int(e, wp)).add(&r) };
    Ok(round_to(&out, prec))
}

/// Enclosure of `log2 q` for a positive rational `q`; exact for powers of two.
pub fn log2_rational(q: &BigRational, prec: u32) -> Result<Enclosure> {
    if !q.is_positive() {
        return Err(Error::EnclosureDomain(format!("log2 of nonpositive value {q}")));
    }
    Ok(log2_ratio(q.numer(), q.denom(), prec))
}

/// Enclosure of `log2(num/den)` for positive integers, skipping the gcd
/// normalization a rational would need.
pub fn log2_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Enclosure {
    assert!(num.is_positive() && den.is_positive(), "log2 needs a positive ratio");
    let wp = prec + 8;
    let (e, n, d) = reduce_pow2(num, den);
    if n == d {
        return Enclosure::from_int(e, wp).with_precision(prec);
    }
    // small ratios near 1 need extra fixed-point bits to keep relative accuracy
    let lost = if e == 0 { (&n + &d).bits().saturating_sub((&n - &d).abs().bits()) } else { 0 };
    let p = guard_bits(prec) + lost as u32;
    let (f_lo, f_hi) = log2_reduced_fixed(&n, &d, p);
    let base = BigInt::from(e) << p;
    Enclosure::new(
        BigFloat::from_fixed(&base + f_lo, p).round(prec, Round::Down),
        BigFloat::from_fixed(base + f_hi, p).round(prec, Round::Up),
        prec,
    )
}

fn inv_ln2_cache() -> &'static Mutex<HashMap<u32, (BigInt, BigInt)>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, (BigInt, BigInt)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fixed-point bounds of `1/ln 2` scaled by `2^p`.
fn inv_ln2_fixed(p: u32) -> (BigInt, BigInt) {
    if let Some(v) = inv_ln2_cache().lock().ok().and_then(|m| m.get(&p).cloned()) {
        return v;
    }
    let l = ln2(p + 8);
    let one = BigFloat::one();
    let lo = one.div_round(l.hi(), p + 8, Round::Down).to_fixed(p, Round::Down);
    let hi = one.div_round(l.lo(), p + 8, Round::Up).to_fixed(p, Round::Up);
    if let Ok(mut m) = inv_ln2_cache().lock() {
        m.insert(p, (lo.clone(), hi.clone()));
    }
    (lo, hi)
}

/// Fixed-point bounds (scale `2^p`) of `log2(n/d)` for `n/d` in `[3/4, 3/2)`,
/// via `ln x = 2 atanh(z)` with `z = (n-d)/(n+d)`, all in integers.
fn log2_reduced_fixed(n: &BigInt, d: &BigInt, p: u32) -> (BigInt, BigInt) {
    let a = n - d;
    let b = n + d;
    let neg = a.is_negative();
    let (z_lo, r) = (a.abs() << p).div_rem(&b);
    let z_hi = if r.is_zero() { z_lo.clone() } else { &z_lo + 1 };
    let u_lo = (&z_lo * &z_lo) >> p;
    let u_hi = shr_ceil(&(&z_hi * &z_hi), p);
    // S = sum_j u^j / (2j + 1)
    let one = BigInt::one() << p;
    let (mut t_lo, mut t_hi) = (one.clone(), one);
    let (mut s_lo, mut s_hi) = (BigInt::zero(), BigInt::zero());
    let mut j: u64 = 0;
    while !t_hi.is_zero() && t_hi.bits() > 1 {
        let k = BigInt::from(2 * j + 1);
        s_lo += t_lo.div_floor(&k);
        s_hi += div_ceil(&t_hi, &k);
        t_lo = (&t_lo * &u_lo) >> p;
        t_hi = shr_ceil(&(&t_hi * &u_hi), p);
        j += 1;
    }
    // remaining terms are at most t_hi / (1 - u) <= 2 t_hi since u <= 1/25
    s_hi += &t_hi * 2;
    let (i_lo, i_hi) = inv_ln2_fixed(p);
    let ln_lo = (&z_lo * &s_lo) >> (p - 1);
    let ln_hi = shr_ceil(&(&z_hi * &s_hi), p - 1);
    let lg_lo = (&ln_lo * &i_lo) >> p;
    let lg_hi = shr_ceil(&(&ln_hi * &i_hi), p);
    if neg {
        (-lg_hi, -lg_lo)
    } else {
        (lg_lo, lg_hi)
    }
}

fn round_to(x: &Enclosure, prec: u32) -> Enclosure {
    Enclosure {
        lo: x.lo.round(prec, Round::Down),
        hi: x.hi.round(prec, Round::Up),
        precision: prec,
    }
}

/// Enclosure of `log2 x` over a positive enclosure.
pub fn log2_enclosure(x: &Enclosure) -> Result<Enclosure> {
    if !x.lo.is_positive() {
        return Err(Error::EnclosureDomain("log2 of an enclosure reaching 0".into()));
    }
    let p = x.precision;
    let lo = log2_rational(&x.lo.to_rational(), p)?;
    if x.is_point() {
        return Ok(lo);
    }
    let hi = log2_rational(&x.hi.to_rational(), p)?;
    Ok(Enclosure::new(lo.lo, hi.hi, p))
}

fn clamp_i64(n: &BigInt) -> i64 {
    i64::try_from(n).unwrap_or(if n.is_positive() { i64::MAX / 4 } else { i64::MIN / 4 })
}

/// Directed bound of `2^t` for an exact dyadic `t`.
fn exp2_bound(t: &BigFloat, prec: u32, dir: Round) -> BigFloat {
    if t.is_integer() {
        return BigFloat::pow2(clamp_i64(&t.floor_int()));
    }
    let n = t.floor_int();
    let k = clamp_i64(&n);
    let f = t.sub(&BigFloat::from_int(n));
    let wp = guard_bits(prec);
    let l2 = ln2(wp);
    // u = f * ln2, rounded in `dir`
    let u = match dir {
        Round::Down => f.mul_round(l2.lo(), wp, Round::Down),
        Round::Up => f.mul_round(l2.hi(), wp, Round::Up),
    };
    let u_fixed = u.to_fixed(wp, dir);
    let e = exp_series_fixed(&u_fixed, wp, dir, prec + 16);
    BigFloat::from_fixed(e, wp).mul_pow2(k).round(prec, dir)
}

/// Enclosure of `2^x`.
pub fn exp2_enclosure(x: &Enclosure) -> Enclosure {
    let p = x.precision;
    Enclosure::new(exp2_bound(&x.lo, p, Round::Down), exp2_bound(&x.hi, p, Round::Up), p)
}

/// Enclosure of `2^q` for a rational exponent.
pub fn exp2_rational(q: &BigRational, prec: u32) -> Enclosure {
    if q.is_integer() {
        let k: i64 = q.to_integer().try_into().unwrap_or(0);
        return Enclosure::point(BigFloat::pow2(k), prec);
    }
    exp2_enclosure(&Enclosure::from_rational(q, prec + 8)).with_precision(prec)
}

/// Enclosure of `x^s` for `x >= 0` and rational `s` (computed as
/// `2^(s log2 x)`; `0^s = 0` for `s > 0`, `x^0 = 1`).
pub fn pow_enclosure(x: &Enclosure, s: &BigRational) -> Result<Enclosure> {
    let p = x.precision;
    if x.lo.is_negative() {
        return Err(Error::EnclosureDomain("power of a possibly negative base".into()));
    }
    if s.is_zero() {
        return Ok(Enclosure::one(p));
    }
    if s.is_negative() {
        return pow_enclosure(x, &-s)?.recip();
    }
    if s.is_one() {
        return Ok(x.clone());
    }
    let bound = |v: &BigFloat, dir: Round| -> Result<BigFloat> {
        if v.is_zero() {
            return Ok(BigFloat::zero());
        }
        let wp = p + 16;
        let l = log2_rational(&v.to_rational(), wp)?;
        let sl = Enclosure::from_rational(s, wp).mul(&l);
        let t = match dir {
            Round::Down => sl.lo,
            Round::Up => sl.hi,
        };
        Ok(exp2_bound(&t, p, dir))
    };
    let lo = bound(&x.lo, Round::Down)?;
    let hi = if x.is_point() && s.is_integer() {
        // still compute separately; integer powers are handled by the bounds
        bound(&x.hi, Round::Up)?
    } else {
        bound(&x.hi, Round::Up)?
    };
    Ok(Enclosure::new(lo, hi, p))
}

/// Enclosure of the rational `q` raised to `s`.
pub fn pow_rational(q: &BigRational, s: &BigRational, prec: u32) -> Result<Enclosure> {
    if q.is_one() || s.is_zero() {
        return Ok(Enclosure::one(prec));
    }
    if let Some(x) = BigFloat::from_dyadic_rational(q) {
        if x.mantissa().is_one() && s.is_integer() || x.mantissa().is_one() && !q.is_zero() {
            // q = 2^e: q^s = 2^(e s)
            let e = BigRational::from_integer(BigInt::from(x.exponent()));
            return Ok(exp2_rational(&(e * s), prec));
        }
    }
    let wp = prec + 8;
    let l = log2_rational(q, wp)?;
    let sl = l.mul_rational(s);
    Ok(round_to(&exp2_enclosure(&sl), prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn encloses_f64(e: &Enclosure, x: f64, tol: f64) -> bool {
        e.lo().to_f64() <= x + tol && x - tol <= e.hi().to_f64()
    }

    #[test]
    fn log2_of_power_of_two_is_exact() {
        let e = log2_rational(&q(4, 1), 128).unwrap();
        assert!(e.is_point());
        assert_eq!(e.lo(), &BigFloat::from_int(2));
        let e = log2_rational(&q(1, 8), 64).unwrap();
        assert_eq!(e.lo(), &BigFloat::from_int(-3));
    }

    #[test]
    fn log2_four_thirds() {
        let e = log2_rational(&q(4, 3), 128).unwrap();
        assert!(encloses_f64(&e, (4.0f64 / 3.0).log2(), 1e-15));
        assert!(e.width().to_f64() < 1e-36);
    }

    #[test]
    fn ln2_matches_f64() {
        let e = ln2(200);
        assert!(encloses_f64(&e, std::f64::consts::LN_2, 1e-16));
        assert!(e.width().to_f64() < 1e-58);
    }

    #[test]
    fn pow_of_one_is_one() {
        let one = Enclosure::one(128);
        let r = one.pow(&q(3, 7)).unwrap();
        assert!(r.is_point());
        assert_eq!(r.lo(), &BigFloat::one());
    }

    #[test]
    fn pow_matches_f64() {
        let x = Enclosure::from_rational(&q(50, 51), 128);
        let r = x.pow(&q(2, 5)).unwrap();
        assert!(encloses_f64(&r, (50.0f64 / 51.0).powf(0.4), 1e-15));
        assert!(r.width().to_f64() < 1e-35);
    }

    #[test]
    fn exp2_negative_fraction() {
        let r = exp2_rational(&q(-1, 10), 128);
        assert!(encloses_f64(&r, 2f64.powf(-0.1), 1e-15));
    }

    #[test]
    fn tiny_logs_keep_relative_precision() {
        // log2(1 + 2^-500): relative precision must survive
        let big = BigInt::one() << 500u32;
        let x = BigRational::new(&big + 1, big);
        let e = log2_rational(&x, 128).unwrap();
        let rel = e.width().to_f64() / e.lo().to_f64();
        assert!(rel < 1e-30, "relative width {rel}");
        let approx = e.lo().to_f64() * 2f64.powi(500);
        assert!((approx - 1.0 / std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn division_by_zero_enclosure_errors() {
        let z = Enclosure::new(BigFloat::from_int(-1), BigFloat::one(), 64);
        assert!(Enclosure::one(64).div(&z).is_err());
        assert!(log2_rational(&q(0, 1), 64).is_err());
    }
}
