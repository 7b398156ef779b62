//! The prefix code `v ↦ E(v) · b₁b₂` from cylinders to binary words.
//!
//! `E(v)` is the leftmost largest dyadic interval inside the closure of
//! `C_v`. At most three words share an `E`-image, so two extra bits rank
//! `v` among them (`00`, `01`, `10` by increasing rank).

use num_bigint::BigInt;
use serde::Serialize;

use crate::bridge::largest_dyadic_inside;
use crate::cf::CfWord;
use crate::dyadic::DyadicWord;
use crate::error::{Error, Result};

/// `E(v)`.
pub fn encode_e(v: &CfWord) -> DyadicWord {
    largest_dyadic_inside(&v.cylinder())
}

/// All `v` with `E(v) = b`, in increasing rank.
///
/// Any such `v` has `[b] ⊆ cl(C_v)`, and those cylinders form one chain
/// found by following the midpoint of `[b]` downward.
pub fn preimages_of(b: &DyadicWord) -> Vec<CfWord> {
    let bi = b.interval();
    let mid = bi.midpoint();
    let len_b = b.lebesgue();
    let four = num_rational::BigRational::from_integer(BigInt::from(4));
    let mut out = Vec::new();
    let mut v = CfWord::empty();
    loop {
        if !v.cylinder().closure_contains(&bi) {
            break;
        }
        // E(v) is at least a quarter as long as C_v
        let lv = v.lebesgue();
        if lv <= &len_b * &four && encode_e(&v) == *b {
            out.push(v.clone());
        }
        if lv < len_b {
            break;
        }
        match v.child_digit_of(&mid) {
            Ok(i) => v = v.child(&i),
            Err(_) => break,
        }
    }
    out
}

/// The full code of a cylinder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Encoding {
    pub word: CfWord,
    pub base: DyadicWord,
    /// Rank of `word` among the preimages of `base`, `0..3`.
    pub index: usize,
    pub code: DyadicWord,
}

/// `𝓔(v) = E(v) · b₁b₂`.
pub fn encode_full(v: &CfWord) -> Encoding {
    let base = encode_e(v);
    let pre = preimages_of(&base);
    let index = pre.iter().position(|u| u == v).expect("v is a preimage of E(v)");
    assert!(index < 3, "more than three preimages of {base}");
    let code = base.child(index >= 2).child(index == 1);
    Encoding { word: v.clone(), base, index, code }
}

/// Inverse of [`encode_full`].
pub fn decode(code: &DyadicWord) -> Result<CfWord> {
    let n = code.len();
    if n < 2 {
        return Err(Error::InvalidCode(format!("{code} is shorter than two bits")));
    }
    let bits = code.bits();
    let index = match (bits[n - 2], bits[n - 1]) {
        (false, false) => 0,
        (false, true) => 1,
        (true, false) => 2,
        (true, true) => return Err(Error::InvalidCode(format!("{code} ends in 11"))),
    };
    let base = code.prefix(n - 2);
    let pre = preimages_of(&base);
    pre.into_iter()
        .nth(index)
        .ok_or_else(|| Error::InvalidCode(format!("{base} has no preimage number {index}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> DyadicWord {
        DyadicWord::parse(s).unwrap()
    }

    #[test]
    fn small_codes() {
        let one = CfWord::from_u64s(&[1]);
        assert_eq!(encode_e(&one), w("1"));
        assert_eq!(encode_full(&one).code, w("100"));
        assert_eq!(encode_e(&CfWord::empty()), DyadicWord::empty());
        assert_eq!(decode(&w("100")).unwrap(), one);
    }

    #[test]
    fn round_trip_small_words() {
        for a in 1..=12u64 {
            for b in 1..=12u64 {
                let v = CfWord::from_u64s(&[a, b]);
                let e = encode_full(&v);
                assert_eq!(decode(&e.code).unwrap(), v);
                assert!(preimages_of(&e.base).len() <= 3);
            }
        }
    }

    #[test]
    fn bad_codes_rejected() {
        assert!(matches!(decode(&w("011")), Err(Error::InvalidCode(_))));
        assert!(matches!(decode(&w("1")), Err(Error::InvalidCode(_))));
    }
}
