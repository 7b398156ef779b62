//! Seeded random corpora.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cf::{CfWord, Fan, RatInterval};
use crate::dyadic::DyadicWord;

/// 64-bit FNV-1a.
fn fnv(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The generator for one labelled corpus; labels keep corpora independent
/// of each other and of the order suites run in.
pub fn rng_for(seed: u64, label: &str) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv(label).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// A digit in `1..=max`, log-uniform over bit lengths so small and huge
/// digits both appear.
pub fn random_digit<R: Rng>(rng: &mut R, max: u64) -> u64 {
    let top = 64 - max.leading_zeros();
    let bits = rng.gen_range(1..=top);
    let lo = 1u64 << (bits - 1);
    let hi = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 }.min(max);
    rng.gen_range(lo..=hi)
}

/// A word of rank `0..=max_rank` with digits in `1..=max_digit`.
pub fn random_word<R: Rng>(rng: &mut R, max_rank: usize, max_digit: u64) -> CfWord {
    let n = rng.gen_range(0..=max_rank);
    let d: Vec<u64> = (0..n).map(|_| random_digit(rng, max_digit)).collect();
    CfWord::from_u64s(&d)
}

/// A word of rank exactly `rank`.
pub fn random_word_of_rank<R: Rng>(rng: &mut R, rank: usize, max_digit: u64) -> CfWord {
    let d: Vec<u64> = (0..rank).map(|_| random_digit(rng, max_digit)).collect();
    CfWord::from_u64s(&d)
}

/// A nondegenerate closed subinterval of `[0, 1]` with endpoints on a
/// random dyadic or decimal grid.
pub fn random_interval<R: Rng>(rng: &mut R) -> RatInterval {
    let den: u64 = match rng.gen_range(0..3) {
        0 => 1 << rng.gen_range(1..=40),
        1 => 10u64.pow(rng.gen_range(1..=12)),
        _ => rng.gen_range(2..=1_000_000),
    };
    let a = rng.gen_range(0..den);
    let b = rng.gen_range(a + 1..=den);
    let q = |n: u64| BigRational::new(BigInt::from(n), BigInt::from(den));
    RatInterval::closed(q(a), q(b))
}

/// A fan below a random base; infinite one time in four.
pub fn random_fan<R: Rng>(rng: &mut R, max_rank: usize, max_digit: u64) -> Fan {
    let base = random_word(rng, max_rank, max_digit);
    let from = random_digit(rng, max_digit);
    if rng.gen_ratio(1, 4) {
        Fan::infinite(base, from)
    } else {
        let to = from + random_digit(rng, max_digit);
        Fan::finite(base, from, to)
    }
}

/// A uniform binary word of length `n`.
pub fn random_dyadic<R: Rng>(rng: &mut R, n: usize) -> DyadicWord {
    DyadicWord::from_bits((0..n).map(|_| rng.gen()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labelled_streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| rng_for(7, "x").gen()).collect();
        assert!(a.iter().all(|x| *x == a[0]));
        let mut r1 = rng_for(7, "x");
        let mut r2 = rng_for(7, "y");
        assert_ne!(r1.gen::<u64>(), r2.gen::<u64>());
    }

    #[test]
    fn generators_stay_in_range() {
        let mut rng = rng_for(0, "ranges");
        for _ in 0..500 {
            let d = random_digit(&mut rng, 1_000_000);
            assert!((1..=1_000_000).contains(&d));
            assert!(random_word(&mut rng, 20, 50).rank() <= 20);
            let x = random_interval(&mut rng);
            assert!(x.lo < x.hi && x.hi <= BigRational::from_integer(1.into()));
        }
        assert_eq!(random_digit(&mut rng, 1), 1);
    }
}
