//! Exact binary floating-point numbers `mantissa * 2^exponent`.
//!
//! Every [`BigFloat`] is an exact dyadic rational. Arithmetic comes in two
//! flavours: exact (`add`, `mul`, ...) and directed-rounded (`*_round`),
//! where the result is rounded to a given number of significant bits toward
//! negative or positive infinity. Enclosure arithmetic is built on the
//! directed variants.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for directed operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// An exact dyadic rational. Canonical form: the mantissa is odd, or the
/// value is zero with exponent 0, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

fn bits(n: &BigInt) -> u64 {
    n.bits()
}

/// `floor(n / 2^k)` or `ceil(n / 2^k)` for any sign of `n`.
fn shr_round(n: &BigInt, k: u64, dir: Round) -> BigInt {
    if k == 0 {
        return n.clone();
    }
    let (q, r) = n.div_mod_floor(&(BigInt::one() << k));
    if dir == Round::Up && !r.is_zero() {
        q + 1
    } else {
        q
    }
}

impl BigFloat {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut out = BigFloat { mant, exp };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero() -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        BigFloat { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        BigFloat::new(n.into(), 0)
    }

    /// `2^k`
    pub fn pow2(k: i64) -> Self {
        BigFloat { mant: BigInt::one(), exp: k }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0
    }

    /// Position of the leading bit: `|x|` lies in `[2^(m-1), 2^m)`.
    pub fn magnitude_bits(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + bits(&self.mant) as i64)
        }
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &other.mant << ((other.exp - e) as u64);
        BigFloat::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        BigFloat::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let b = bits(&self.mant);
        if b <= prec as u64 {
            return self.clone();
        }
        let k = b - prec as u64;
        BigFloat::new(shr_round(&self.mant, k, dir), self.exp + k as i64)
    }

    /// Directed-rounded sum. When the operands are so far apart that the
    /// smaller one only affects bits below the target precision, the exact
    /// sum is never formed.
    pub fn add_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        let ma = self.magnitude_bits().unwrap_or(0);
        let mb = other.magnitude_bits().unwrap_or(0);
        let (big, small, mbig, msmall) = if ma >= mb {
            (self, other, ma, mb)
        } else {
            (other, self, mb, ma)
        };
        let gap = mbig - msmall;
        if gap > prec as i64 + 8 {
            // |small| < 2^(mbig - prec - 8): it only nudges the rounding.
            let anchor = mbig - prec as i64 - 4;
            let big_r = big.round(prec + 2, dir);
            let nudge = match (dir, small.signum()) {
                (Round::Up, 1) => BigFloat::pow2(anchor),
                (Round::Down, -1) => BigFloat::pow2(anchor).neg(),
                _ => BigFloat::zero(),
            };
            // `big_r` already errs in `dir`; a nudge of more than |small| in
            // the same direction keeps the bound valid.
            return big_r.add(&nudge).round(prec, dir);
        }
        self.add(other).round(prec, dir)
    }

    pub fn sub_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.add_round(&other.neg(), prec, dir)
    }

    pub fn mul_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.mul(other).round(prec, dir)
    }

    /// Directed-rounded quotient `self / other`. Panics on division by zero.
    pub fn div_round(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "BigFloat division by zero");
        let q = div_ints_round(&self.mant, &other.mant, prec, dir);
        q.mul_pow2(self.exp - other.exp)
    }

    /// Directed-rounded value of the rational `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, dir: Round) -> Self {
        div_ints_round(num, den, prec, dir)
    }

    pub fn from_rational(q: &BigRational, prec: u32, dir: Round) -> Self {
        div_ints_round(q.numer(), q.denom(), prec, dir)
    }

    /// Exact conversion from a rational whose denominator is a power of two.
    pub fn from_dyadic_rational(q: &BigRational) -> Option<Self> {
        let d = q.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz) != BigInt::one() {
            return None;
        }
        Some(BigFloat::new(q.numer().clone(), -(tz as i64)))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as u64))
        }
    }

    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            shr_round(&self.mant, (-self.exp) as u64, Round::Down)
        }
    }

    /// Fixed-point representation `round(self * 2^p)` as an integer.
    pub fn to_fixed(&self, p: u32, dir: Round) -> BigInt {
        let e = self.exp + p as i64;
        if e >= 0 {
            &self.mant << (e as u64)
        } else {
            shr_round(&self.mant, (-e) as u64, dir)
        }
    }

    pub fn from_fixed(n: BigInt, p: u32) -> Self {
        BigFloat::new(n, -(p as i64))
    }

    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        self.to_rational().cmp(q)
    }

    pub fn min_with(&self, other: &Self) -> Self {
        if self <= other { self.clone() } else { other.clone() }
    }

    pub fn max_with(&self, other: &Self) -> Self {
        if self >= other { self.clone() } else { other.clone() }
    }

    /// Approximate value as f64 (for display and heuristics only).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = bits(&self.mant) as i64;
        let shift = (b - 60).max(0);
        let m = (&self.mant >> (shift as u64)).to_f64().unwrap_or(f64::NAN);
        let e = self.exp + shift;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2000 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// Decimal scientific notation with `digits` significant digits, rounded
    /// in direction `dir` so that the printed value bounds the exact one.
    pub fn to_decimal(&self, digits: usize, dir: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let q = self.to_rational().abs();
        // estimate decimal exponent
        let log10 = (self.magnitude_bits().unwrap_or(0) as f64 - 1.0) * std::f64::consts::LOG10_2;
        let mut e10 = log10.floor() as i64;
        let ten = BigInt::from(10);
        let scale = |e: i64| -> BigRational {
            if e >= 0 {
                BigRational::from_integer(num_traits::pow(ten.clone(), e as usize))
            } else {
                BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
            }
        };
        // normalise so that 1 <= q / 10^e10 < 10
        loop {
            let r = &q / scale(e10);
            if r >= BigRational::from_integer(ten.clone()) {
                e10 += 1;
            } else if r < BigRational::one() {
                e10 -= 1;
            } else {
                break;
            }
        }
        let shift = digits as i64 - 1 - e10;
        let scaled = &q * scale(shift);
        // magnitude rounding direction depends on sign
        let mag_dir = if neg { dir.flip() } else { dir };
        let n = match mag_dir {
            Round::Down => scaled.floor().to_integer(),
            Round::Up => scaled.ceil().to_integer(),
        };
        let mut s = n.to_string();
        let mut exp_out = e10;
        if s.len() > digits {
            // rounding up carried into a new digit (e.g. 9.99 -> 10.0)
            s.truncate(digits);
            exp_out += 1;
        }
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if exp_out != 0 {
            out.push_str(&format!("e{exp_out}"));
        }
        out
    }
}

/// `num / den` rounded to `prec` significant bits.
fn div_ints_round(num: &BigInt, den: &BigInt, prec: u32, dir: Round) -> BigFloat {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return BigFloat::zero();
    }
    let negative = num.is_negative() != den.is_negative();
    let n = num.abs();
    let d = den.abs();
    let mag_dir = if negative { dir.flip() } else { dir };
    let shift = prec as i64 + bits(&d) as i64 - bits(&n) as i64 + 2;
    let (q, r) = if shift >= 0 {
        (&n << (shift as u64)).div_rem(&d)
    } else {
        n.div_rem(&(&d << ((-shift) as u64)))
    };
    let q = if mag_dir == Round::Up && !r.is_zero() { q + 1 } else { q };
    let mag = BigFloat::new(q, -shift).round(prec, mag_dir);
    if negative {
        mag.neg()
    } else {
        mag
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same nonzero sign: compare magnitudes by leading bit first
        let ma = self.magnitude_bits().unwrap_or(0);
        let mb = other.magnitude_bits().unwrap_or(0);
        let mag = if ma != mb {
            ma.cmp(&mb)
        } else {
            let e = self.exp.min(other.exp);
            let a = self.mant.abs() << ((self.exp - e) as u64);
            let b = other.mant.abs() << ((other.exp - e) as u64);
            a.cmp(&b)
        };
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn canonical_equality() {
        assert_eq!(BigFloat::new(4.into(), 0), BigFloat::new(1.into(), 2));
        assert_eq!(BigFloat::new(0.into(), 17), BigFloat::zero());
    }

    #[test]
    fn directed_division_brackets_the_rational() {
        for (n, d) in [(1, 3), (-2, 7), (10, 3), (-1, 1000003)] {
            let lo = BigFloat::from_ratio(&n.into(), &d.into(), 20, Round::Down);
            let hi = BigFloat::from_ratio(&n.into(), &d.into(), 20, Round::Up);
            assert!(lo.to_rational() <= q(n, d));
            assert!(hi.to_rational() >= q(n, d));
            assert!(lo < hi);
            assert!(hi.mantissa().bits() <= 20);
        }
    }

    #[test]
    fn ordering_matches_rationals() {
        let xs = [q(1, 3), q(-5, 2), q(7, 8), q(0, 1), q(1, 1 << 40), q(-1, 1 << 40)];
        for a in &xs {
            for b in &xs {
                let fa = BigFloat::from_rational(a, 80, Round::Down);
                let fb = BigFloat::from_rational(b, 80, Round::Down);
                if a != b {
                    assert_eq!(fa.cmp(&fb), a.cmp(b), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn far_apart_addition_is_still_directed() {
        let big = BigFloat::one();
        let tiny = BigFloat::pow2(-10_000);
        let up = big.add_round(&tiny, 53, Round::Up);
        let down = big.add_round(&tiny, 53, Round::Down);
        assert!(up > BigFloat::one());
        assert!(down <= BigFloat::one());
        let down_neg = big.add_round(&tiny.neg(), 53, Round::Down);
        assert!(down_neg < BigFloat::one());
    }

    #[test]
    fn decimal_rendering_is_outward() {
        let third = BigFloat::from_ratio(&1.into(), &3.into(), 100, Round::Down);
        assert_eq!(third.to_decimal(5, Round::Down), "3.3333e-1");
        assert_eq!(third.to_decimal(5, Round::Up), "3.3334e-1");
        assert_eq!(BigFloat::from_int(2).to_decimal(5, Round::Up), "2");
        assert_eq!(BigFloat::from_int(-2).neg().to_decimal(3, Round::Down), "2");
    }
}
