//! Three-valued outcomes of certified checks.
//!
//! A claim is *proved* when the enclosures settle it, *refuted* when they
//! settle its negation, and *indeterminate* otherwise. Indeterminate checks
//! are retried at doubled precision a bounded number of times.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bigfloat::{BigFloat, Round};
use crate::enclosure::Enclosure;

/// Relative tolerance (in bits) under which two overlapping enclosures
/// count as a proved equality.
pub const EQ_TOLERANCE_BITS: i64 = 48;

/// Default number of precision doublings on indeterminate results.
pub const DEFAULT_MAX_DOUBLINGS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proved,
    Refuted,
    Indeterminate,
}

impl Status {
    /// Conjunction: refuted dominates, then indeterminate.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Refuted, _) | (_, Status::Refuted) => Status::Refuted,
            (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
            _ => Status::Proved,
        }
    }

    pub fn from_bool(b: bool) -> Status {
        if b { Status::Proved } else { Status::Refuted }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Proved => "proved",
            Status::Refuted => "refuted",
            Status::Indeterminate => "indeterminate",
        })
    }
}

/// A checked claim with the enclosure that decided it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub status: Status,
    pub lo: String,
    pub hi: String,
    pub precision: u32,
}

impl Verdict {
    pub fn new(claim: impl Into<String>, status: Status, witness: &Enclosure) -> Self {
        Verdict {
            claim: claim.into(),
            status,
            lo: witness.lo().to_decimal(20, Round::Down),
            hi: witness.hi().to_decimal(20, Round::Up),
            precision: witness.precision(),
        }
    }

    /// A verdict settled by exact rational arithmetic.
    pub fn exact(claim: impl Into<String>, holds: bool, value: impl fmt::Display) -> Self {
        let v = value.to_string();
        Verdict {
            claim: claim.into(),
            status: Status::from_bool(holds),
            lo: v.clone(),
            hi: v,
            precision: 0,
        }
    }

    pub fn is_proved(&self) -> bool {
        self.status == Status::Proved
    }
}

/// `a <= b`.
pub fn le(a: &Enclosure, b: &Enclosure) -> Status {
    if a.hi() <= b.lo() {
        Status::Proved
    } else if a.lo() > b.hi() {
        Status::Refuted
    } else {
        Status::Indeterminate
    }
}

/// `a < b`.
pub fn lt(a: &Enclosure, b: &Enclosure) -> Status {
    if a.hi() < b.lo() {
        Status::Proved
    } else if a.lo() >= b.hi() {
        Status::Refuted
    } else {
        Status::Indeterminate
    }
}

/// `a = b` up to a relative width of `2^-EQ_TOLERANCE_BITS`.
pub fn eq(a: &Enclosure, b: &Enclosure) -> Status {
    if !a.intersects(b) {
        return Status::Refuted;
    }
    let diff = a.sub(b);
    let width = diff.width();
    if width.is_zero() {
        return Status::Proved;
    }
    let scale = [a.lo(), a.hi(), b.lo(), b.hi()]
        .into_iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigFloat::zero);
    if scale.is_zero() {
        return Status::Indeterminate;
    }
    let tol = scale.mul_pow2(-EQ_TOLERANCE_BITS);
    if width <= tol { Status::Proved } else { Status::Indeterminate }
}

/// Run `check` at `precision`, doubling while the result is indeterminate,
/// at most `max_doublings` times.
pub fn escalate<F>(precision: u32, max_doublings: u32, mut check: F) -> Verdict
where
    F: FnMut(u32) -> Verdict,
{
    let mut p = precision;
    let mut v = check(p);
    for _ in 0..max_doublings {
        if v.status != Status::Indeterminate {
            break;
        }
        p = p.saturating_mul(2);
        v = check(p);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn e(lo: i64, hi: i64) -> Enclosure {
        Enclosure::new(BigFloat::from_int(lo), BigFloat::from_int(hi), 64)
    }

    #[test]
    fn comparisons() {
        assert_eq!(le(&e(0, 1), &e(1, 2)), Status::Proved);
        assert_eq!(lt(&e(0, 1), &e(1, 2)), Status::Indeterminate);
        assert_eq!(le(&e(3, 4), &e(1, 2)), Status::Refuted);
        assert_eq!(eq(&e(0, 1), &e(2, 3)), Status::Refuted);
        assert_eq!(eq(&e(0, 1), &e(0, 1)), Status::Indeterminate);
        let third = Enclosure::from_rational(&BigRational::new(1.into(), 3.into()), 128);
        assert_eq!(eq(&third, &third.clone()), Status::Proved);
    }

    #[test]
    fn escalation_stops_at_cap() {
        let mut calls = vec![];
        let v = escalate(16, 4, |p| {
            calls.push(p);
            Verdict::new("x", Status::Indeterminate, &e(0, 1))
        });
        assert_eq!(calls, vec![16, 32, 64, 128, 256]);
        assert_eq!(v.status, Status::Indeterminate);
    }

    #[test]
    fn conjunction() {
        assert_eq!(Status::Proved.and(Status::Indeterminate), Status::Indeterminate);
        assert_eq!(Status::Indeterminate.and(Status::Refuted), Status::Refuted);
    }
}
