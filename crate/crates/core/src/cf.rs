//! Continued-fraction words, their convergents, cylinder intervals and fans.
//!
//! A word `[a_1, …, a_n]` stands for the cylinder of reals in `(0, 1)` whose
//! continued-fraction expansion starts with those digits. With the
//! convergent recurrence `p_k = a_k p_{k-1} + p_{k-2}` (same for `q`), the
//! cylinder has endpoints `p_n/q_n` and `(p_n + p_{n-1})/(q_n + q_{n-1})`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The last two convergents of a word: `p/q` and `p_prev/q_prev`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Convergents {
    pub p: BigInt,
    pub q: BigInt,
    pub p_prev: BigInt,
    pub q_prev: BigInt,
}

impl Convergents {
    /// Convergents of the empty word: `(0, 1, 1, 0)`.
    pub fn empty() -> Self {
        Convergents {
            p: BigInt::zero(),
            q: BigInt::one(),
            p_prev: BigInt::one(),
            q_prev: BigInt::zero(),
        }
    }

    /// Convergents after appending digit `a`.
    pub fn push(&self, a: &BigInt) -> Self {
        Convergents {
            p: a * &self.p + &self.p_prev,
            q: a * &self.q + &self.q_prev,
            p_prev: self.p.clone(),
            q_prev: self.q.clone(),
        }
    }

    /// `p q_prev - p_prev q`, always `±1`.
    pub fn determinant(&self) -> BigInt {
        &self.p * &self.q_prev - &self.p_prev * &self.q
    }

    /// The point with tail `t`: `(p + t p_prev)/(q + t q_prev)`.
    pub fn point_at(&self, t: &BigRational) -> BigRational {
        let num = BigRational::from_integer(self.p.clone()) + t * &self.p_prev;
        let den = BigRational::from_integer(self.q.clone()) + t * &self.q_prev;
        num / den
    }

    /// Inverse of [`point_at`](Self::point_at): the tail `t` of `x`.
    /// Returns `None` when `x` is the convergent `p_prev/q_prev` (infinite tail).
    pub fn tail_of(&self, x: &BigRational) -> Option<BigRational> {
        let num = BigRational::from_integer(self.p.clone()) - x * &self.q;
        let den = x * &self.q_prev - BigRational::from_integer(self.p_prev.clone());
        if den.is_zero() {
            None
        } else {
            Some(num / den)
        }
    }
}

/// A finite continued-fraction word with big-integer digits, each `>= 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CfWord {
    digits: Vec<BigInt>,
    conv: Convergents,
}

impl CfWord {
    /// The empty word λ.
    pub fn empty() -> Self {
        CfWord { digits: Vec::new(), conv: Convergents::empty() }
    }

    pub fn new(digits: Vec<BigInt>) -> Result<Self> {
        let mut conv = Convergents::empty();
        for d in &digits {
            if d < &BigInt::one() {
                return Err(Error::InvalidDigit(d.to_string()));
            }
            conv = conv.push(d);
        }
        Ok(CfWord { digits, conv })
    }

    /// Build from small digits. Panics on a zero digit.
    pub fn from_u64s(digits: &[u64]) -> Self {
        CfWord::new(digits.iter().map(|&d| BigInt::from(d)).collect())
            .expect("digits must be at least 1")
    }

    pub fn digits(&self) -> &[BigInt] {
        &self.digits
    }

    pub fn rank(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn convergents(&self) -> &Convergents {
        &self.conv
    }

    pub fn last(&self) -> Option<&BigInt> {
        self.digits.last()
    }

    /// `P(v)`: drop the last digit; `P(λ) = λ`.
    pub fn parent(&self) -> CfWord {
        if self.digits.is_empty() {
            return self.clone();
        }
        self.prefix(self.rank() - 1)
    }

    /// The length-`n` prefix.
    pub fn prefix(&self, n: usize) -> CfWord {
        let mut conv = Convergents::empty();
        for d in &self.digits[..n] {
            conv = conv.push(d);
        }
        CfWord { digits: self.digits[..n].to_vec(), conv }
    }

    /// `[v, i]`. Panics if `i < 1`.
    pub fn child(&self, i: &BigInt) -> CfWord {
        assert!(i >= &BigInt::one(), "continued-fraction digit must be at least 1");
        let mut digits = self.digits.clone();
        digits.push(i.clone());
        CfWord { digits, conv: self.conv.push(i) }
    }

    pub fn child_u64(&self, i: u64) -> CfWord {
        self.child(&BigInt::from(i))
    }

    /// `[v, w]`.
    pub fn concat(&self, other: &CfWord) -> CfWord {
        let mut out = self.clone();
        for d in &other.digits {
            out = out.child(d);
        }
        out
    }

    /// `true` when `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &CfWord) -> bool {
        self.rank() <= other.rank() && self.digits[..] == other.digits[..self.rank()]
    }

    pub fn is_proper_prefix_of(&self, other: &CfWord) -> bool {
        self.rank() < other.rank() && self.is_prefix_of(other)
    }

    /// The rational `[a_1, …, a_n] = p_n/q_n` (0 for λ).
    pub fn value(&self) -> BigRational {
        BigRational::new(self.conv.p.clone(), self.conv.q.clone())
    }

    /// The cylinder `C_v` as a normalized interval.
    ///
    /// The endpoint `p_n/q_n` (whose finite expansion is `v` itself) is
    /// closed, the other endpoint open, so sibling cylinders `[v,i]`,
    /// `[v,i+1]` share exactly one endpoint. λ maps to the open `(0, 1)`.
    pub fn cylinder(&self) -> RatInterval {
        if self.is_empty() {
            return RatInterval::open(BigRational::zero(), BigRational::one());
        }
        let c = &self.conv;
        let a = BigRational::new(c.p.clone(), c.q.clone());
        let b = BigRational::new(&c.p + &c.p_prev, &c.q + &c.q_prev);
        RatInterval::from_endpoints(a, true, b, false)
    }

    /// Exact Lebesgue measure `1/(q_n (q_n + q_{n-1}))`.
    pub fn lebesgue(&self) -> BigRational {
        let c = &self.conv;
        BigRational::new(BigInt::one(), &c.q * (&c.q + &c.q_prev))
    }

    /// `s_n = [a_n, …, a_1]`, evaluated directly from the reversed digits.
    pub fn reversal_rational(&self) -> Result<BigRational> {
        if self.is_empty() {
            return Err(Error::ReversalOfEmpty);
        }
        let mut x = BigRational::zero();
        for d in &self.digits {
            x = (BigRational::from_integer(d.clone()) + x).recip();
        }
        Ok(x)
    }

    /// The next digit of an interior point `x` of `C_v`, if `x` lies in the
    /// interior of a child cylinder; `Err(c)` if `x` is the common endpoint
    /// of children `[v, c-1]` and `[v, c]`.
    pub fn child_digit_of(&self, x: &BigRational) -> std::result::Result<BigInt, BigInt> {
        let t = self.conv.tail_of(x).expect("point must lie in the cylinder");
        let inv = t.recip();
        let fl = inv.floor().to_integer();
        if inv.is_integer() {
            Err(fl)
        } else {
            Ok(fl)
        }
    }

    /// Parse `"2,3"` (or `"λ"`/empty for the empty word).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
        if s.is_empty() || s == "λ" {
            return Ok(CfWord::empty());
        }
        let digits = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                BigInt::from_str(tok).map_err(|_| Error::Parse(format!("bad digit {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        CfWord::new(digits)
    }
}

impl fmt::Display for CfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "λ");
        }
        write!(f, "[")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for CfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CfWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CfWord::parse(s)
    }
}

impl PartialOrd for CfWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex order: rank first, then digits.
impl Ord for CfWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank()).then_with(|| self.digits.cmp(&other.digits))
    }
}

impl Serialize for CfWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CfWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        let digits = strs
            .iter()
            .map(|s| BigInt::from_str(s).map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CfWord::new(digits).map_err(serde::de::Error::custom)
    }
}

/// Continued-fraction digits of a rational in `(0, 1]`, using the
/// expansion whose last digit is at least 2 (except for `1 = [1]`).
pub fn cf_expansion(x: &BigRational) -> Vec<BigInt> {
    assert!(x.is_positive() && x <= &BigRational::one(), "expansion needs x in (0, 1]");
    let mut out = Vec::new();
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    while !n.is_zero() {
        let (a, r) = d.div_rem(&n);
        out.push(a);
        d = n;
        n = r;
    }
    out
}

/// An interval of rationals with endpoint inclusion flags; `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatInterval {
    #[serde(with = "rational_string")]
    pub lo: BigRational,
    #[serde(with = "rational_string")]
    pub hi: BigRational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInterval(format!("{lo} > {hi}")));
        }
        Ok(RatInterval { lo, hi, lo_closed, hi_closed })
    }

    pub fn open(lo: BigRational, hi: BigRational) -> Self {
        RatInterval::new(lo, hi, false, false).expect("lo <= hi")
    }

    pub fn closed(lo: BigRational, hi: BigRational) -> Self {
        RatInterval::new(lo, hi, true, true).expect("lo <= hi")
    }

    /// `[lo, hi)`.
    pub fn half_open(lo: BigRational, hi: BigRational) -> Self {
        RatInterval::new(lo, hi, true, false).expect("lo <= hi")
    }

    /// Interval between `a` and `b` in either order, carrying each
    /// endpoint's inclusion flag along.
    pub fn from_endpoints(a: BigRational, a_closed: bool, b: BigRational, b_closed: bool) -> Self {
        if a <= b {
            RatInterval { lo: a, hi: b, lo_closed: a_closed, hi_closed: b_closed }
        } else {
            RatInterval { lo: b, hi: a, lo_closed: b_closed, hi_closed: a_closed }
        }
    }

    pub fn length(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }

    pub fn interior_contains(&self, x: &BigRational) -> bool {
        x > &self.lo && x < &self.hi
    }

    /// Containment of closures: `cl(other) ⊆ cl(self)`.
    pub fn closure_contains(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closures intersect in a set of positive length.
    pub fn overlaps(&self, other: &RatInterval) -> bool {
        self.lo.clone().max(other.lo.clone()) < self.hi.clone().min(other.hi.clone())
    }

    /// Closed intersection, if it has positive length.
    pub fn intersect(&self, other: &RatInterval) -> Option<RatInterval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo < hi).then(|| RatInterval::closed(lo, hi))
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    /// Parse `"1/3,2/3"` (closed-open by default).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("interval needs two endpoints: {s:?}")));
        }
        let lo = parse_rational(parts[0])?;
        let hi = parse_rational(parts[1])?;
        RatInterval::new(lo, hi, true, false)
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Parse `"p/q"`, an integer, or a finite decimal like `"0.4"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" { BigInt::zero() } else { BigInt::from_str(int).map_err(|_| bad())? };
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f = BigRational::new(BigInt::from_str(frac).map_err(|_| bad())?, scale);
        let base = BigRational::from_integer(int_part.abs());
        let v = base + f;
        return Ok(if neg { -v } else { v });
    }
    Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
}

/// The sibling family `{[v, i] : from <= i <= to}`; `to = None` means ∞.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fan {
    base: CfWord,
    from: BigInt,
    to: Option<BigInt>,
}

impl Fan {
    pub fn new(base: CfWord, from: BigInt, to: Option<BigInt>) -> Result<Self> {
        if from < BigInt::one() {
            return Err(Error::InvalidDigit(from.to_string()));
        }
        if let Some(t) = &to {
            if t < &from {
                return Err(Error::InvalidInterval(format!("fan range {from}..{t} is empty")));
            }
        }
        Ok(Fan { base, from, to })
    }

    pub fn finite(base: CfWord, from: u64, to: u64) -> Self {
        Fan::new(base, BigInt::from(from), Some(BigInt::from(to))).expect("valid fan")
    }

    pub fn infinite(base: CfWord, from: u64) -> Self {
        Fan::new(base, BigInt::from(from), None).expect("valid fan")
    }

    pub fn base(&self) -> &CfWord {
        &self.base
    }

    pub fn from(&self) -> &BigInt {
        &self.from
    }

    pub fn to(&self) -> Option<&BigInt> {
        self.to.as_ref()
    }

    pub fn is_infinite(&self) -> bool {
        self.to.is_none()
    }

    /// Number of member cylinders, `None` when infinite.
    pub fn len(&self) -> Option<BigInt> {
        self.to.as_ref().map(|t| t - &self.from + 1)
    }

    pub fn contains_digit(&self, i: &BigInt) -> bool {
        i >= &self.from && self.to.as_ref().is_none_or(|t| i <= t)
    }

    /// Whether `w` is a member cylinder `[base, i]`.
    pub fn contains_word(&self, w: &CfWord) -> bool {
        w.rank() == self.base.rank() + 1
            && self.base.is_prefix_of(w)
            && self.contains_digit(w.last().expect("rank >= 1"))
    }

    /// Member words for a finite fan (ascending digit).
    pub fn members(&self) -> Result<Vec<CfWord>> {
        let to = self.to.as_ref().ok_or(Error::InfiniteFan)?;
        let n = (to - &self.from).to_u64().unwrap_or(u64::MAX);
        let mut out = Vec::with_capacity(n.saturating_add(1).min(1 << 20) as usize);
        let mut i = self.from.clone();
        while &i <= to {
            out.push(self.base.child(&i));
            i += 1;
        }
        Ok(out)
    }

    /// Union of the member cylinders as one interval.
    ///
    /// Endpoints are the values `[v, from]` (closed) and `[v, to + 1]`
    /// (open), or the limit `[v]` itself (open) for an infinite fan.
    pub fn interval(&self) -> RatInterval {
        let first = self.base.child(&self.from).value();
        let far = match &self.to {
            Some(t) => self.base.child(&(t + 1)).value(),
            None => self.base.value(),
        };
        RatInterval::from_endpoints(first, true, far, false)
    }

    /// Exact Lebesgue measure of the union.
    pub fn lebesgue(&self) -> BigRational {
        self.interval().length()
    }

    /// Sub-fan restricted to digits in `[lo, hi]` (`hi = None` for ∞).
    pub fn restrict(&self, lo: &BigInt, hi: Option<&BigInt>) -> Option<Fan> {
        let from = lo.clone().max(self.from.clone());
        let to = match (hi, &self.to) {
            (None, None) => None,
            (Some(h), None) => Some(h.clone()),
            (None, Some(t)) => Some(t.clone()),
            (Some(h), Some(t)) => Some(h.clone().min(t.clone())),
        };
        if let Some(t) = &to {
            if t < &from {
                return None;
            }
        }
        Some(Fan { base: self.base.clone(), from, to })
    }

    /// A one-member fan, if this is one.
    pub fn as_singleton(&self) -> Option<CfWord> {
        match &self.to {
            Some(t) if t == &self.from => Some(self.base.child(&self.from)),
            _ => None,
        }
    }
}

impl fmt::Display for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.to {
            Some(t) => write!(f, "Fan({}, {}, {})", self.base, self.from, t),
            None => write!(f, "Fan({}, {}, ∞)", self.base, self.from),
        }
    }
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct FanRepr {
    base: CfWord,
    from: String,
    to: Option<String>,
}

impl Serialize for Fan {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FanRepr {
            base: self.base.clone(),
            from: self.from.to_string(),
            to: self.to.as_ref().map(|t| t.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fan {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FanRepr::deserialize(d)?;
        let from = BigInt::from_str(&r.from).map_err(serde::de::Error::custom)?;
        let to = r
            .to
            .map(|t| BigInt::from_str(&t).map_err(serde::de::Error::custom))
            .transpose()?;
        Fan::new(r.base, from, to).map_err(serde::de::Error::custom)
    }
}

/// Union interval of a fan; free-function form of [`Fan::interval`].
pub fn fan_interval(f: &Fan) -> RatInterval {
    f.interval()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn convergents_of_small_words() {
        let c = CfWord::empty().convergents().clone();
        assert_eq!((c.p, c.q, c.p_prev, c.q_prev), (0.into(), 1.into(), 1.into(), 0.into()));
        let c = CfWord::from_u64s(&[2, 3]).convergents().clone();
        assert_eq!(BigRational::new(c.p, c.q), r(3, 7));
        assert_eq!(BigRational::new(c.p_prev, c.q_prev), r(1, 2));
        let c = CfWord::from_u64s(&[1]).convergents().clone();
        assert_eq!((c.p, c.q, c.p_prev, c.q_prev), (1.into(), 1.into(), 0.into(), 1.into()));
    }

    #[test]
    fn cylinders() {
        let c = CfWord::from_u64s(&[1]).cylinder();
        assert_eq!((c.lo, c.hi), (r(1, 2), r(1, 1)));
        let c = CfWord::from_u64s(&[2, 3]).cylinder();
        assert_eq!((c.lo, c.hi), (r(3, 7), r(4, 9)));
        let c = CfWord::empty().cylinder();
        assert_eq!((c.lo.clone(), c.hi.clone()), (r(0, 1), r(1, 1)));
        assert!(!c.lo_closed && !c.hi_closed);
    }

    #[test]
    fn siblings_share_one_endpoint() {
        let v = CfWord::from_u64s(&[3, 1]);
        let a = v.child_u64(4).cylinder();
        let b = v.child_u64(5).cylinder();
        let shared = if a.lo == b.hi { a.lo.clone() } else { a.hi.clone() };
        assert!(a.contains(&shared) ^ b.contains(&shared));
    }

    #[test]
    fn reversal() {
        assert_eq!(CfWord::from_u64s(&[2]).reversal_rational().unwrap(), r(1, 2));
        assert_eq!(CfWord::from_u64s(&[2, 3]).reversal_rational().unwrap(), r(2, 7));
        assert_eq!(CfWord::from_u64s(&[1, 1]).reversal_rational().unwrap(), r(1, 2));
        assert_eq!(CfWord::empty().reversal_rational(), Err(Error::ReversalOfEmpty));
    }

    #[test]
    fn fan_intervals() {
        let f = Fan::infinite(CfWord::empty(), 2);
        let iv = f.interval();
        assert_eq!((iv.lo, iv.hi), (r(0, 1), r(1, 2)));
        let iv = Fan::finite(CfWord::empty(), 1, 50).interval();
        assert_eq!((iv.lo, iv.hi), (r(1, 51), r(1, 1)));
        let single = Fan::finite(CfWord::from_u64s(&[2]), 3, 3);
        assert_eq!(single.interval(), CfWord::from_u64s(&[2, 3]).cylinder());
    }

    #[test]
    fn zero_digit_rejected() {
        assert!(CfWord::new(vec![BigInt::from(2), BigInt::zero()]).is_err());
        assert!(CfWord::parse("1,0").is_err());
    }

    #[test]
    fn parse_and_serde_round_trip() {
        let v = CfWord::parse("[2, 3, 100000000000000000000]").unwrap();
        let js = serde_json::to_string(&v).unwrap();
        assert_eq!(js, r#"["2","3","100000000000000000000"]"#);
        let back: CfWord = serde_json::from_str(&js).unwrap();
        assert_eq!(back, v);
        assert_eq!(CfWord::parse("λ").unwrap(), CfWord::empty());
    }

    #[test]
    fn expansion_inverts_value() {
        for w in [vec![2u64, 3], vec![1, 4, 2], vec![7]] {
            let v = CfWord::from_u64s(&w);
            let back = cf_expansion(&v.value());
            assert_eq!(CfWord::new(back).unwrap().value(), v.value());
        }
        assert_eq!(cf_expansion(&r(1, 4)), vec![BigInt::from(4)]);
    }

    #[test]
    fn child_digit_locates_points() {
        let lam = CfWord::empty();
        assert_eq!(lam.child_digit_of(&r(1, 4)), Err(BigInt::from(4)));
        assert_eq!(lam.child_digit_of(&r(2, 7)), Ok(BigInt::from(3)));
    }

    #[test]
    fn decimal_rationals() {
        assert_eq!(parse_rational("0.4").unwrap(), r(2, 5));
        assert_eq!(parse_rational("3/9").unwrap(), r(1, 3));
        assert!(parse_rational("x").is_err());
    }
}
