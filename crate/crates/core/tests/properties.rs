use cfdim::bridge::{decode, divide, encode_full, largest_dyadic_inside, preimages_of, two_dyadic_cover};
use cfdim::measure::{self, gauss_additive, kraaikamp_product_bounds, lebesgue_ratio};
use cfdim::{CfWord, DyadicWord, RatInterval, Status};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn word() -> impl Strategy<Value = CfWord> {
    prop::collection::vec(1u64..=1_000_000, 0..8).prop_map(|d| CfWord::from_u64s(&d))
}

fn small_word() -> impl Strategy<Value = CfWord> {
    prop::collection::vec(1u64..=60, 0..6).prop_map(|d| CfWord::from_u64s(&d))
}

fn bits(max: usize) -> impl Strategy<Value = DyadicWord> {
    prop::collection::vec(any::<bool>(), 0..=max).prop_map(DyadicWord::from_bits)
}

/// `1/(q (q + q'))` from the denominators alone.
fn length_oracle(v: &CfWord) -> BigRational {
    let (mut q, mut qq) = (BigInt::one(), BigInt::zero());
    for a in v.digits() {
        let next = a * &q + &qq;
        qq = q;
        q = next;
    }
    BigRational::new(BigInt::one(), &q * (&q + &qq))
}

proptest! {
    #[test]
    fn child_ratio_is_exact(v in word(), i in 1u64..=1_000_000) {
        let child = v.child_u64(i);
        prop_assert_eq!(lebesgue_ratio(&v, &BigInt::from(i)) * v.lebesgue(), length_oracle(&child));
    }

    #[test]
    fn products_bracket_the_length(v in word()) {
        let (lo, hi) = kraaikamp_product_bounds(&v);
        let mu = length_oracle(&v);
        prop_assert!(lo <= mu && mu <= hi);
    }

    #[test]
    fn codes_round_trip(v in small_word()) {
        let e = encode_full(&v);
        prop_assert_eq!(e.code.len(), e.base.len() + 2);
        prop_assert_eq!(decode(&e.code).unwrap(), v.clone());
        prop_assert!(preimages_of(&e.base).len() <= 3);
        // the code's cylinder keeps a sixteenth of C_v
        prop_assert!(e.code.lebesgue() * BigRational::from_integer(16.into()) >= v.lebesgue());
    }

    #[test]
    fn dyadic_fits(v in word()) {
        let c = v.cylinder();
        let e = largest_dyadic_inside(&c);
        prop_assert!(c.closure_contains(&e.interval()));
        prop_assert!(e.lebesgue() * BigRational::from_integer(4.into()) >= c.length());
        let p = two_dyadic_cover(&c);
        prop_assert!(p.left.lo() <= c.lo && c.hi <= p.right.hi());
        prop_assert!(p.left.lebesgue() <= c.length() * BigRational::from_integer(2.into()));
    }

    #[test]
    fn divide_tiles(w in bits(12)) {
        let d = divide(&w);
        prop_assert!(d.tiles_interval());
        prop_assert_eq!(d.lebesgue(), w.lebesgue());
    }

    #[test]
    fn gauss_is_additive(v in small_word(), i in 1u64..=40) {
        let a = v.child_u64(i).cylinder();
        let b = v.child_u64(i + 1).cylinder();
        let (a, b) = (RatInterval::closed(a.lo, a.hi), RatInterval::closed(b.lo, b.hi));
        prop_assert_eq!(gauss_additive(&a, &b, 96), Status::Proved);
    }

    #[test]
    fn gauss_sits_between_lebesgue_multiples(v in word()) {
        prop_assert!(measure::check_lebesgue_gauss_bound(&v.cylinder(), 128).is_proved());
    }
}
