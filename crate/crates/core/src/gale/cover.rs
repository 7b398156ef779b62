//! Binary s-gales compiled from prefix-free covers.
//!
//! Level `B_n` gives the gale `d_n`: on extensions `w` of a member `v`,
//! `d_n(w) = (μ(w)/μ(v))^{1-s}`; elsewhere `d_n(w) = Σ_{w ⊏ v ∈ B_n} μ^s(v) / μ^s(w)`.
//! The compiled gale is `d = Σ_n 2^n d_{2n}` over the levels present.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::BinGale;
use crate::dyadic::DyadicWord;
use crate::enclosure::{self, Enclosure};
use crate::error::{Error, Result};
use crate::verdict::{self, Status};

/// A cover level too large to list, described by oracles.
pub trait StructuredLevel: Send + Sync {
    fn descriptor(&self) -> String;

    /// The member `v ⊑ w`, if one exists.
    fn member_prefix_of(&self, w: &DyadicWord) -> Option<DyadicWord>;

    /// An enclosure of `Σ_{w ⊏ v ∈ B} μ^s(v)`; may be loose.
    fn mass_below(&self, w: &DyadicWord, s: &BigRational, prec: u32) -> Enclosure;

    /// An enclosure of `Σ_{v ∈ B} μ^s(v)`.
    fn total_mass(&self, s: &BigRational, prec: u32) -> Enclosure;
}

/// One level `B_n` of a cover.
#[derive(Clone)]
pub enum CoverLevel {
    Explicit(Vec<DyadicWord>),
    Structured(Arc<dyn StructuredLevel>),
}

impl std::fmt::Debug for CoverLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoverLevel::Explicit(ws) => write!(f, "Explicit({ws:?})"),
            CoverLevel::Structured(s) => write!(f, "Structured({})", s.descriptor()),
        }
    }
}

fn pow2_neg(s: &BigRational, len: usize, prec: u32) -> Enclosure {
    enclosure::exp2_rational(&(-s * BigRational::from_integer(BigInt::from(len))), prec)
}

struct ExplicitIndex {
    words: Vec<DyadicWord>,
    set: HashSet<DyadicWord>,
}

impl ExplicitIndex {
    fn member_prefix_of(&self, w: &DyadicWord) -> Option<DyadicWord> {
        (0..=w.len()).map(|i| w.prefix(i)).find(|p| self.set.contains(p))
    }

    fn mass_below(&self, w: &DyadicWord, s: &BigRational, prec: u32) -> Enclosure {
        let mut by_len: BTreeMap<usize, u64> = BTreeMap::new();
        for v in self.words.iter().filter(|v| w.is_proper_prefix_of(v)) {
            *by_len.entry(v.len()).or_default() += 1;
        }
        let mut acc = Enclosure::zero(prec);
        for (len, count) in by_len {
            acc = acc.add(&pow2_neg(s, len, prec).mul(&Enclosure::from_int(count, prec)));
        }
        acc
    }
}

enum Level {
    Explicit(ExplicitIndex),
    Structured(Arc<dyn StructuredLevel>),
}

/// Prefix-free levels `B_n` and the exponent `s`.
pub struct Cover {
    s: BigRational,
    levels: BTreeMap<usize, Level>,
}

impl Cover {
    /// Explicit levels must be prefix-free.
    pub fn new(s: BigRational, levels: BTreeMap<usize, CoverLevel>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (n, level) in levels {
            let l = match level {
                CoverLevel::Explicit(mut words) => {
                    words.sort();
                    words.dedup();
                    if words.windows(2).any(|p| p[0].is_prefix_of(&p[1])) {
                        return Err(Error::NotPrefixFree(n.to_string()));
                    }
                    let set = words.iter().cloned().collect();
                    Level::Explicit(ExplicitIndex { words, set })
                }
                CoverLevel::Structured(x) => Level::Structured(x),
            };
            out.insert(n, l);
        }
        Ok(Cover { s, levels: out })
    }

    pub fn exponent(&self) -> &BigRational {
        &self.s
    }

    pub fn level_indices(&self) -> Vec<usize> {
        self.levels.keys().copied().collect()
    }

    /// `Σ_{v ∈ B_n} μ^s(v)`.
    pub fn level_mass(&self, n: usize, prec: u32) -> Option<Enclosure> {
        Some(match self.levels.get(&n)? {
            Level::Explicit(ix) => {
                let mut acc = Enclosure::zero(prec);
                for v in &ix.words {
                    acc = acc.add(&pow2_neg(&self.s, v.len(), prec));
                }
                acc
            }
            Level::Structured(x) => x.total_mass(&self.s, prec),
        })
    }

    /// `Σ_{v ∈ B_n} μ^s(v) < 2^{-n}`.
    pub fn budget(&self, n: usize, prec: u32) -> Option<Status> {
        let m = self.level_mass(n, prec)?;
        let cap = Enclosure::point(crate::BigFloat::pow2(-(n as i64)), prec);
        Some(verdict::lt(&m, &cap))
    }

    /// `d_n(w)`.
    pub fn level_capital(&self, n: usize, w: &DyadicWord, prec: u32) -> Option<Enclosure> {
        let level = self.levels.get(&n)?;
        let member = match level {
            Level::Explicit(ix) => ix.member_prefix_of(w),
            Level::Structured(x) => x.member_prefix_of(w),
        };
        let one = BigRational::one();
        Some(match member {
            Some(v) => {
                let e = (&one - &self.s) * BigRational::from_integer(BigInt::from(v.len()) - BigInt::from(w.len()));
                enclosure::exp2_rational(&e, prec)
            }
            None => {
                let below = match level {
                    Level::Explicit(ix) => ix.mass_below(w, &self.s, prec),
                    Level::Structured(x) => x.mass_below(w, &self.s, prec),
                };
                let scale = enclosure::exp2_rational(&(&self.s * BigRational::from_integer(BigInt::from(w.len()))), prec);
                below.mul(&scale)
            }
        })
    }
}

/// `d = Σ_n 2^n d_{2n}` for a [`Cover`].
pub struct CoverGale {
    cover: Cover,
}

impl CoverGale {
    pub fn new(cover: Cover) -> Self {
        CoverGale { cover }
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    /// `2^n d_{2n}(w)` for one even level `2n`.
    pub fn term(&self, level: usize, w: &DyadicWord, prec: u32) -> Option<Enclosure> {
        if level % 2 != 0 {
            return None;
        }
        Some(self.cover.level_capital(level, w, prec)?.mul_pow2((level / 2) as i64))
    }
}

impl BinGale for CoverGale {
    fn exponent(&self) -> BigRational {
        self.cover.s.clone()
    }

    fn descriptor(&self) -> String {
        let levels: Vec<String> = self.cover.levels.keys().map(|n| n.to_string()).collect();
        format!("cover(s={}; levels {})", self.cover.s, levels.join(","))
    }

    fn capital(&self, w: &DyadicWord, prec: u32) -> Enclosure {
        let mut acc = Enclosure::zero(prec);
        for &n in self.cover.levels.keys() {
            if let Some(t) = self.term(n, w, prec) {
                acc = acc.add(&t);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gale::check_bin_gale_condition;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn w(s: &str) -> DyadicWord {
        DyadicWord::parse(s).unwrap()
    }

    fn explicit(levels: &[(usize, &[&str])]) -> BTreeMap<usize, CoverLevel> {
        levels
            .iter()
            .map(|(n, ws)| (*n, CoverLevel::Explicit(ws.iter().map(|x| w(x)).collect())))
            .collect()
    }

    #[test]
    fn root_cover_is_flat() {
        let g = CoverGale::new(Cover::new(r(1, 1), explicit(&[(0, &["λ"])])).unwrap());
        for x in ["λ", "0", "1101"] {
            assert!(g.capital(&w(x), 64).contains(&r(1, 1)));
        }
    }

    #[test]
    fn covered_word_gets_rewarded() {
        let cover = Cover::new(r(2, 5), explicit(&[(2, &["0000"])])).unwrap();
        // 2^{-1.6} exceeds the level-2 budget of 1/4; the reward does not depend on it
        assert_eq!(cover.budget(2, 128), Some(Status::Refuted));
        let g = CoverGale::new(cover);
        let d = g.capital(&w("0000"), 128);
        assert!(d.contains(&r(2, 1)));
        assert!(g.cover().level_capital(2, &w("0000"), 128).unwrap().contains(&r(1, 1)));
        for x in ["λ", "0", "00", "000", "0000", "00001", "1"] {
            assert!(check_bin_gale_condition(&g, &w(x), 128).is_proved(), "{x}");
        }
    }

    #[test]
    fn prefix_free_required() {
        let bad = Cover::new(r(1, 2), explicit(&[(0, &["01", "011"])]));
        assert!(matches!(bad, Err(Error::NotPrefixFree(_))));
    }

    #[test]
    fn root_capital_below_budget_sum() {
        let cover = Cover::new(r(1, 2), explicit(&[(0, &["000", "11"]), (2, &["0101010101"])])).unwrap();
        let g = CoverGale::new(cover);
        let d0 = g.capital(&DyadicWord::empty(), 128);
        assert!(d0.hi_rational() < r(2, 1));
    }
}
