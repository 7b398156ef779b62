//! Conversions between dyadic intervals and continued-fraction cylinders.

mod divide;
mod encoding;
mod small;

pub use divide::{check_refinement, divide, divide_children, split_at, Decomposition, Part, RefinementReport};
pub use encoding::{decode, encode_e, encode_full, preimages_of, Encoding};
pub use small::{check_small_encodings, small_code, SmallEncodingReport};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cf::RatInterval;
use crate::dyadic::DyadicWord;

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

fn scaled(x: &BigRational, k: usize) -> BigRational {
    x * BigRational::from_integer(pow2(k))
}

/// Smallest `k` with `2^-k <= len` (`len > 0`).
fn level_at_most(len: &BigRational) -> usize {
    let mut k = (len.denom().bits() as i64 - len.numer().bits() as i64 - 1).max(0) as usize;
    while BigRational::new(BigInt::one(), pow2(k)) > *len {
        k += 1;
    }
    while k > 0 && BigRational::new(BigInt::one(), pow2(k - 1)) <= *len {
        k -= 1;
    }
    k
}

/// The leftmost of the largest dyadic intervals inside the closure of `x`.
pub fn largest_dyadic_inside(x: &RatInterval) -> DyadicWord {
    assert!(x.lo < x.hi, "interval must be nondegenerate");
    assert!(x.lo >= BigRational::zero() && x.hi <= BigRational::one(), "interval must lie in [0, 1]");
    let mut k = level_at_most(&x.length());
    loop {
        let m = scaled(&x.lo, k).ceil().to_integer();
        let right = BigRational::new(&m + 1, pow2(k));
        if right <= x.hi {
            return DyadicWord::from_index(&m, k);
        }
        k += 1;
    }
}

/// A pair of consecutive equal-length dyadic words covering an interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicPair {
    pub left: DyadicWord,
    pub right: DyadicWord,
    /// `true` when the interval's left end sits in the last cell, so the
    /// pair uses its left neighbour instead of a nonexistent right one.
    pub used_left_neighbor: bool,
}

impl DyadicPair {
    pub fn level(&self) -> usize {
        self.left.len()
    }

    pub fn words(&self) -> [&DyadicWord; 2] {
        [&self.left, &self.right]
    }
}

/// The finest pair of consecutive equal-length dyadic intervals whose
/// union covers the closure of `x`.
pub fn two_dyadic_cover(x: &RatInterval) -> DyadicPair {
    assert!(x.lo < x.hi, "interval must be nondegenerate");
    assert!(x.lo >= BigRational::zero() && x.hi <= BigRational::one(), "interval must lie in [0, 1]");
    let half = x.length() / BigRational::from_integer(BigInt::from(2));
    // a covering pair has 2^-k >= len/2
    let mut k = level_at_most(&half).max(1);
    if BigRational::new(BigInt::one(), pow2(k)) < half {
        k -= 1;
    }
    loop {
        let k1 = k.max(1);
        let m = scaled(&x.lo, k1).floor().to_integer();
        let last = pow2(k1) - 1;
        if m == last {
            return DyadicPair {
                left: DyadicWord::from_index(&(&m - 1), k1),
                right: DyadicWord::from_index(&m, k1),
                used_left_neighbor: true,
            };
        }
        let top = BigRational::new(&m + 2, pow2(k1));
        if top >= x.hi || k1 == 1 {
            return DyadicPair {
                left: DyadicWord::from_index(&m, k1),
                right: DyadicWord::from_index(&(&m + 1), k1),
                used_left_neighbor: false,
            };
        }
        k = k1 - 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn w(s: &str) -> DyadicWord {
        DyadicWord::parse(s).unwrap()
    }

    #[test]
    fn largest_inside_examples() {
        assert_eq!(largest_dyadic_inside(&RatInterval::half_open(r(1, 3), r(2, 3))), w("011"));
        assert_eq!(largest_dyadic_inside(&RatInterval::half_open(r(0, 1), r(1, 1))), DyadicWord::empty());
        assert_eq!(largest_dyadic_inside(&RatInterval::half_open(r(1, 2), r(1, 1))), w("1"));
    }

    #[test]
    fn largest_inside_matches_brute_force() {
        for (a, b, c, d) in [(1, 7, 2, 7), (3, 10, 9, 10), (0, 1, 1, 100), (5, 11, 6, 11)] {
            let x = RatInterval::closed(r(a, b), r(c, d));
            let got = largest_dyadic_inside(&x);
            let mut want = None;
            'outer: for k in 0..20usize {
                for m in 0..(1u64 << k) {
                    let dw = DyadicWord::from_index(&BigInt::from(m), k);
                    if x.lo <= dw.lo() && dw.hi() <= x.hi {
                        want = Some(dw);
                        break 'outer;
                    }
                }
            }
            assert_eq!(Some(got), want);
        }
    }

    #[test]
    fn two_cover_examples() {
        let p = two_dyadic_cover(&RatInterval::half_open(r(1, 3), r(2, 3)));
        assert_eq!((p.left, p.right), (w("01"), w("10")));
        let p = two_dyadic_cover(&RatInterval::closed(r(3, 7), r(4, 9)));
        assert_eq!(p.level(), 6);
        assert!(p.left.lo() <= r(3, 7) && p.right.hi() >= r(4, 9));
        let p = two_dyadic_cover(&RatInterval::half_open(r(0, 1), r(1, 2)));
        assert_eq!((p.left, p.right), (w("00"), w("01")));
    }

    #[test]
    fn two_cover_at_right_edge() {
        for d in [3, 7, 64, 100] {
            let p = two_dyadic_cover(&RatInterval::closed(r(d - 1, d), r(1, 1)));
            assert!(p.right.is_all_ones());
            assert!(p.left.lo() <= r(d - 1, d));
            assert!(!p.used_left_neighbor);
        }
    }

    #[test]
    fn two_cover_is_finest() {
        for (a, b, c, d) in [(1, 7, 2, 7), (3, 10, 9, 10), (1, 51, 1, 1), (5, 11, 6, 11)] {
            let x = RatInterval::closed(r(a, b), r(c, d));
            let p = two_dyadic_cover(&x);
            let k = p.level();
            assert!(p.left.lo() <= x.lo && x.hi <= p.right.hi());
            // no pair one level finer covers
            let k2 = k + 1;
            let covers = (0..(1u64 << k2) - 1).any(|m| {
                r(m as i64, 1 << k2) <= x.lo && x.hi <= r(m as i64 + 2, 1 << k2)
            });
            assert!(!covers, "level {k2} also covers {x}");
        }
    }
}
