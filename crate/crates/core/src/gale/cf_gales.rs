//! Concrete continued-fraction gales.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{part_mass, CfGale, SharedCfGale};
use crate::bridge::Part;
use crate::cf::{CfWord, Fan, RatInterval};
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::measure;

fn check_exponent(s: &BigRational) -> Result<()> {
    if s.is_positive() && *s <= BigRational::one() {
        Ok(())
    } else {
        Err(Error::ExponentRange(format!("s = {s} is outside (0, 1]")))
    }
}

/// `d(v) = γ(v)^{1-s}`: the Gauss measure viewed as an s-gale.
#[derive(Clone, Debug)]
pub struct GaussGale {
    s: BigRational,
}

impl GaussGale {
    pub fn new(s: BigRational) -> Result<Self> {
        check_exponent(&s)?;
        Ok(GaussGale { s })
    }
}

impl CfGale for GaussGale {
    fn exponent(&self) -> BigRational {
        self.s.clone()
    }

    fn descriptor(&self) -> String {
        format!("gauss(s={})", self.s)
    }

    fn mass(&self, v: &CfWord, prec: u32) -> Enclosure {
        measure::gauss(v, prec)
    }

    fn fan_mass(&self, f: &Fan, prec: u32) -> Enclosure {
        measure::gauss_fan(f, prec)
    }

    fn capital(&self, v: &CfWord, prec: u32) -> Enclosure {
        let e = BigRational::one() - &self.s;
        measure::gauss_power(v, &e, prec)
    }

    fn interval_mass(&self, a: &RatInterval, prec: u32) -> Option<Enclosure> {
        Some(measure::gauss_interval(a, prec))
    }

    fn density_bound(&self, prec: u32) -> Option<Enclosure> {
        Some(Enclosure::one(prec))
    }
}

/// A re-weighting of the children of one node.
///
/// `groups` partition the child digits `1, 2, …` into words `[p, i]` and
/// fans `Fan(p, a, b)`; each group receives the stated share of the
/// parent's mass, spread over its members in proportion to the base gale.
#[derive(Clone, Debug)]
pub struct Patch {
    pub parent: CfWord,
    pub groups: Vec<(Part, BigRational)>,
}

#[derive(Clone, Debug)]
struct Group {
    from: BigInt,
    to: Option<BigInt>,
    weight: BigRational,
    part: Part,
}

impl Group {
    fn contains(&self, i: &BigInt) -> bool {
        *i >= self.from && self.to.as_ref().is_none_or(|t| i <= t)
    }
}

/// A base gale with finitely many nodes re-weighted by [`Patch`]es.
pub struct ModifiedGale {
    base: SharedCfGale,
    patches: BTreeMap<CfWord, Vec<Group>>,
}

fn violated(p: &CfWord, why: impl std::fmt::Display) -> Error {
    Error::GaleConditionViolated(format!("{p}: {why}"))
}

fn groups_of(patch: &Patch) -> Result<Vec<Group>> {
    let p = &patch.parent;
    let mut groups = Vec::new();
    let mut total = BigRational::zero();
    for (part, w) in &patch.groups {
        if w.is_negative() {
            return Err(violated(p, format!("negative weight {w}")));
        }
        total += w;
        let (from, to) = match part {
            Part::Word(x) if x.parent() == *p && x.rank() == p.rank() + 1 => {
                let i = x.last().expect("rank >= 1").clone();
                (i.clone(), Some(i))
            }
            Part::Fan(f) if f.base() == p => (f.from().clone(), f.to().cloned()),
            other => return Err(violated(p, format!("{other} is not a set of children"))),
        };
        groups.push(Group { from, to, weight: w.clone(), part: part.clone() });
    }
    if total != BigRational::one() {
        return Err(violated(p, format!("weights sum to {total}")));
    }
    groups.sort_by(|a, b| a.from.cmp(&b.from));
    let mut next = Some(BigInt::one());
    for g in &groups {
        match &next {
            Some(n) if *n == g.from => next = g.to.as_ref().map(|t| t + 1),
            _ => return Err(violated(p, "groups do not partition the children")),
        }
    }
    if next.is_some() {
        return Err(violated(p, "groups do not partition the children"));
    }
    Ok(groups)
}

impl ModifiedGale {
    pub fn new(base: SharedCfGale, patches: Vec<Patch>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for patch in &patches {
            let groups = groups_of(patch)?;
            if map.insert(patch.parent.clone(), groups).is_some() {
                return Err(violated(&patch.parent, "patched twice"));
            }
        }
        Ok(ModifiedGale { base, patches: map })
    }

    /// Multipliers `w_G mass(p) / mass(G)` for each group of the patch at `p`.
    fn factors(&self, p: &CfWord, groups: &[Group], prec: u32) -> Vec<Enclosure> {
        let parent = self.base.mass(p, prec);
        groups
            .iter()
            .map(|g| {
                if g.weight.is_zero() {
                    return Enclosure::zero(prec);
                }
                let gm = part_mass(self.base.as_ref(), &g.part, prec);
                parent.div(&gm).expect("base mass is positive").mul_rational(&g.weight)
            })
            .collect()
    }

    /// `mass'(v) / mass_base(v)`, a product over patched proper prefixes.
    fn ratio(&self, v: &CfWord, prec: u32) -> Enclosure {
        let mut r = Enclosure::one(prec);
        for (p, groups) in self.patches.range(..) {
            if !p.is_proper_prefix_of(v) {
                continue;
            }
            let digit = &v.digits()[p.rank()];
            let k = groups.iter().position(|g| g.contains(digit)).expect("groups partition the digits");
            r = r.mul(&self.factors(p, groups, prec)[k]);
        }
        r
    }
}

impl CfGale for ModifiedGale {
    fn exponent(&self) -> BigRational {
        self.base.exponent()
    }

    fn descriptor(&self) -> String {
        let at: Vec<String> = self.patches.keys().map(|p| p.to_string()).collect();
        format!("modified({}; patched at {})", self.base.descriptor(), at.join(" "))
    }

    fn mass(&self, v: &CfWord, prec: u32) -> Enclosure {
        let wp = prec + 8;
        self.ratio(v, wp).mul(&self.base.mass(v, wp)).with_precision(prec)
    }

    fn fan_mass(&self, f: &Fan, prec: u32) -> Enclosure {
        let wp = prec + 8;
        let u = f.base();
        let r = self.ratio(u, wp);
        let Some(groups) = self.patches.get(u) else {
            return r.mul(&self.base.fan_mass(f, wp)).with_precision(prec);
        };
        let factors = self.factors(u, groups, wp);
        let mut acc = Enclosure::zero(wp);
        for (g, fac) in groups.iter().zip(&factors) {
            let Some(piece) = f.restrict(&g.from, g.to.as_ref()) else {
                continue;
            };
            let m = match piece.as_singleton() {
                Some(w) => self.base.mass(&w, wp),
                None => self.base.fan_mass(&piece, wp),
            };
            acc = acc.add(&fac.mul(&m));
        }
        r.mul(&acc).with_precision(prec)
    }

    fn child_masses(&self, v: &CfWord, m: u64, prec: u32) -> Vec<Enclosure> {
        let wp = prec + 8;
        let r = self.ratio(v, wp);
        let patch = self.patches.get(v).map(|groups| (groups, self.factors(v, groups, wp)));
        (1..=m)
            .into_par_iter()
            .map(|i| {
                let mut x = r.mul(&self.base.mass(&v.child_u64(i), wp));
                if let Some((groups, factors)) = &patch {
                    let d = BigInt::from(i);
                    let k = groups.iter().position(|g| g.contains(&d)).expect("partition");
                    x = x.mul(&factors[k]);
                }
                x.with_precision(prec)
            })
            .collect()
    }

    fn density_bound(&self, prec: u32) -> Option<Enclosure> {
        let mut k = self.base.density_bound(prec)?;
        for (p, groups) in &self.patches {
            let best = self
                .factors(p, groups, prec)
                .into_iter()
                .fold(Enclosure::one(prec), |a, b| if a.hi() >= b.hi() { a } else { b });
            k = k.mul(&Enclosure::new(best.hi().clone(), best.hi().clone(), prec));
        }
        Some(k)
    }
}

/// `d(v) γ^s(v) = Σ_{v ⊑ w ∈ G} γ^{s'}(w) + Σ_{w ⊏ v, w ∈ G} γ^{s'}(w) γ(v)/γ(w)`
/// for a finite set `G`.
pub struct SetGale {
    set: Vec<CfWord>,
    s_prime: BigRational,
    s: BigRational,
    cache: Mutex<HashMap<u32, Arc<Vec<(Enclosure, Enclosure)>>>>,
}

impl SetGale {
    pub fn new(set: Vec<CfWord>, s_prime: BigRational, s: BigRational) -> Result<Self> {
        check_exponent(&s)?;
        if !s_prime.is_positive() || s_prime >= s {
            return Err(Error::ExponentRange(format!("need 0 < s' < s, got s' = {s_prime}, s = {s}")));
        }
        let mut set = set;
        set.sort();
        set.dedup();
        Ok(SetGale { set, s_prime, s, cache: Mutex::new(HashMap::new()) })
    }

    pub fn set(&self) -> &[CfWord] {
        &self.set
    }

    /// `(γ^{s'}(w), γ(w))` for each `w ∈ G`.
    fn weights(&self, prec: u32) -> Arc<Vec<(Enclosure, Enclosure)>> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&prec) {
            return v.clone();
        }
        let v: Arc<Vec<_>> = Arc::new(
            self.set
                .iter()
                .map(|w| (measure::gauss_power(w, &self.s_prime, prec), measure::gauss(w, prec)))
                .collect(),
        );
        self.cache.lock().expect("cache lock").insert(prec, v.clone());
        v
    }
}

impl CfGale for SetGale {
    fn exponent(&self) -> BigRational {
        self.s.clone()
    }

    fn descriptor(&self) -> String {
        format!("set(|G|={}, s'={}, s={})", self.set.len(), self.s_prime, self.s)
    }

    fn mass(&self, v: &CfWord, prec: u32) -> Enclosure {
        let wp = prec + 8;
        let ws = self.weights(wp);
        let mut acc = Enclosure::zero(wp);
        let mut gv: Option<Enclosure> = None;
        for (w, (gs, g)) in self.set.iter().zip(ws.iter()) {
            if v.is_prefix_of(w) {
                acc = acc.add(gs);
            } else if w.is_proper_prefix_of(v) {
                let gv = gv.get_or_insert_with(|| measure::gauss(v, wp));
                acc = acc.add(&gs.mul(gv).div(g).expect("γ > 0"));
            }
        }
        acc.with_precision(prec)
    }

    fn fan_mass(&self, f: &Fan, prec: u32) -> Enclosure {
        self.interval_mass(&f.interval(), prec).expect("set gales evaluate intervals")
    }

    fn interval_mass(&self, a: &RatInterval, prec: u32) -> Option<Enclosure> {
        let wp = prec + 8;
        let ws = self.weights(wp);
        let mut acc = Enclosure::zero(wp);
        for (w, (gs, g)) in self.set.iter().zip(ws.iter()) {
            if let Some(x) = a.intersect(&w.cylinder()) {
                let part = measure::gauss_interval(&x, wp);
                acc = acc.add(&gs.mul(&part).div(g).expect("γ > 0"));
            }
        }
        Some(acc.with_precision(prec))
    }

    fn density_bound(&self, prec: u32) -> Option<Enclosure> {
        let ws = self.weights(prec);
        let terms: Vec<Enclosure> = ws.iter().map(|(gs, g)| gs.div(g).expect("γ > 0")).collect();
        Some(Enclosure::sum(&terms, prec))
    }
}

/// A finite weighted sum of gales with a common exponent.
pub struct CombinedGale {
    parts: Vec<(SharedCfGale, BigRational)>,
    s: BigRational,
}

impl CombinedGale {
    pub fn new(parts: Vec<(SharedCfGale, BigRational)>) -> Result<Self> {
        let s = parts
            .first()
            .map(|(g, _)| g.exponent())
            .ok_or_else(|| Error::ExponentRange("empty combination".into()))?;
        let mut total = BigRational::zero();
        for (g, w) in &parts {
            if g.exponent() != s {
                return Err(Error::ExponentMismatch(format!("{} vs {}", g.exponent(), s)));
            }
            if w.is_negative() {
                return Err(Error::WeightOverflow(format!("negative weight {w}")));
            }
            total += w;
        }
        if total > BigRational::one() {
            return Err(Error::WeightOverflow(total.to_string()));
        }
        Ok(CombinedGale { parts, s })
    }

    /// `1 - Σ weights`: the share of an infinite combination left out.
    pub fn unaccounted_weight(&self) -> BigRational {
        BigRational::one() - self.parts.iter().map(|(_, w)| w.clone()).fold(BigRational::zero(), |a, b| a + b)
    }

    fn weighted<F: Fn(&dyn CfGale) -> Enclosure>(&self, prec: u32, f: F) -> Enclosure {
        let mut acc = Enclosure::zero(prec);
        for (g, w) in &self.parts {
            acc = acc.add(&f(g.as_ref()).mul_rational(w));
        }
        acc
    }
}

impl CfGale for CombinedGale {
    fn exponent(&self) -> BigRational {
        self.s.clone()
    }

    fn descriptor(&self) -> String {
        let items: Vec<String> = self.parts.iter().map(|(g, w)| format!("{w}*{}", g.descriptor())).collect();
        format!("combined({})", items.join(" + "))
    }

    fn mass(&self, v: &CfWord, prec: u32) -> Enclosure {
        let wp = prec + 8;
        self.weighted(wp, |g| g.mass(v, wp)).with_precision(prec)
    }

    fn fan_mass(&self, f: &Fan, prec: u32) -> Enclosure {
        let wp = prec + 8;
        self.weighted(wp, |g| g.fan_mass(f, wp)).with_precision(prec)
    }

    fn child_masses(&self, v: &CfWord, m: u64, prec: u32) -> Vec<Enclosure> {
        let wp = prec + 8;
        let mut acc = vec![Enclosure::zero(wp); m as usize];
        for (g, w) in &self.parts {
            for (a, x) in acc.iter_mut().zip(g.child_masses(v, m, wp)) {
                *a = a.add(&x.mul_rational(w));
            }
        }
        acc.into_iter().map(|a| a.with_precision(prec)).collect()
    }

    fn interval_mass(&self, a: &RatInterval, prec: u32) -> Option<Enclosure> {
        let wp = prec + 8;
        let mut acc = Enclosure::zero(wp);
        for (g, w) in &self.parts {
            acc = acc.add(&g.interval_mass(a, wp)?.mul_rational(w));
        }
        Some(acc.with_precision(prec))
    }

    fn density_bound(&self, prec: u32) -> Option<Enclosure> {
        let mut acc = Enclosure::zero(prec);
        for (g, w) in &self.parts {
            acc = acc.add(&g.density_bound(prec)?.mul_rational(w));
        }
        Some(acc)
    }
}

/// The first `sets.len()` terms of `Σ_i 2^{-i} d_{s_i}` with
/// `s_i = s (1 - 2^{-i})`, the `i`-th set gale built on `sets[i-1]`.
pub fn optimal_section(sets: Vec<Vec<CfWord>>, s: BigRational) -> Result<CombinedGale> {
    let mut parts: Vec<(SharedCfGale, BigRational)> = Vec::new();
    for (i, set) in sets.into_iter().enumerate() {
        let w = BigRational::new(BigInt::one(), BigInt::one() << (i + 1));
        let s_i = &s * (BigRational::one() - &w);
        parts.push((Arc::new(SetGale::new(set, s_i, s.clone())?), w));
    }
    CombinedGale::new(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gale::check_gale_condition;
    use crate::verdict::{self, Status};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn gauss(s: BigRational) -> SharedCfGale {
        Arc::new(GaussGale::new(s).unwrap())
    }

    #[test]
    fn gauss_capital() {
        let g = GaussGale::new(r(1, 2)).unwrap();
        let c = g.capital(&CfWord::from_u64s(&[1]), 128);
        // oracle: log2(4/3)^{1/2} via f64
        let want = (4f64 / 3.0).log2().sqrt();
        assert!((c.midpoint_f64() - want).abs() < 1e-12);
        let one = GaussGale::new(r(1, 1)).unwrap();
        assert!(one.capital(&CfWord::from_u64s(&[5, 2]), 64).contains(&r(1, 1)));
    }

    #[test]
    fn modified_rebalance() {
        let lam = CfWord::empty();
        let one = CfWord::from_u64s(&[1]);
        let patch = Patch {
            parent: lam.clone(),
            groups: vec![(Part::Word(one.clone()), r(1, 1)), (Part::Fan(Fan::infinite(lam.clone(), 2)), r(0, 1))],
        };
        let g = ModifiedGale::new(gauss(r(1, 2)), vec![patch]).unwrap();
        // all mass moves to [1]: d([1]) = 1 / γ([1])^{1/2}
        let want = 1.0 / (4f64 / 3.0).log2().sqrt();
        assert!((g.capital(&one, 128).midpoint_f64() - want).abs() < 1e-12);
        assert!(g.mass(&CfWord::from_u64s(&[2]), 64).contains(&r(0, 1)));
        assert_eq!(check_gale_condition(&g, &lam, 200, 128).status, Status::Proved);
        assert_eq!(check_gale_condition(&g, &one, 200, 128).status, Status::Proved);
    }

    #[test]
    fn modified_empty_patch_is_base() {
        let base = gauss(r(2, 5));
        let g = ModifiedGale::new(base.clone(), vec![]).unwrap();
        let v = CfWord::from_u64s(&[4, 1, 7]);
        assert_eq!(verdict::eq(&g.mass(&v, 128), &base.mass(&v, 128)), Status::Proved);
    }

    #[test]
    fn invalid_patches() {
        let lam = CfWord::empty();
        let bad = Patch {
            parent: lam.clone(),
            groups: vec![
                (Part::Word(CfWord::from_u64s(&[1])), r(1, 1)),
                (Part::Fan(Fan::infinite(lam.clone(), 2)), r(1, 2)),
            ],
        };
        assert!(matches!(ModifiedGale::new(gauss(r(1, 2)), vec![bad]), Err(Error::GaleConditionViolated(_))));
        let holes = Patch { parent: lam.clone(), groups: vec![(Part::Fan(Fan::infinite(lam, 2)), r(1, 1))] };
        assert!(matches!(ModifiedGale::new(gauss(r(1, 2)), vec![holes]), Err(Error::GaleConditionViolated(_))));
    }

    #[test]
    fn set_gale_values() {
        let one = CfWord::from_u64s(&[1]);
        let g = SetGale::new(vec![one.clone()], r(2, 5), r(1, 2)).unwrap();
        // d([1]) = γ([1])^{s'-s}
        let want = (4f64 / 3.0).log2().powf(-0.1);
        assert!((g.capital(&one, 128).midpoint_f64() - want).abs() < 1e-12);
        let empty = SetGale::new(vec![], r(2, 5), r(1, 2)).unwrap();
        assert!(empty.capital(&CfWord::from_u64s(&[3]), 64).contains(&r(0, 1)));
        let two = SetGale::new(vec![one.clone(), CfWord::from_u64s(&[2, 3])], r(2, 5), r(1, 2)).unwrap();
        for v in [CfWord::empty(), one, CfWord::from_u64s(&[2])] {
            assert_eq!(check_gale_condition(&two, &v, 500, 128).status, Status::Proved, "{v}");
        }
        assert!(SetGale::new(vec![], r(1, 2), r(1, 2)).is_err());
    }

    #[test]
    fn combination() {
        let a = gauss(r(1, 2));
        let b: SharedCfGale = Arc::new(SetGale::new(vec![CfWord::from_u64s(&[1])], r(1, 4), r(1, 2)).unwrap());
        let c = CombinedGale::new(vec![(a.clone(), r(1, 2)), (b.clone(), r(1, 4))]).unwrap();
        assert_eq!(c.unaccounted_weight(), r(1, 4));
        let v = CfWord::from_u64s(&[1, 3]);
        let want = a.mass(&v, 128).mul_rational(&r(1, 2)).add(&b.mass(&v, 128).mul_rational(&r(1, 4)));
        assert_eq!(verdict::eq(&c.mass(&v, 128), &want), Status::Proved);
        assert_eq!(check_gale_condition(&c, &CfWord::from_u64s(&[1]), 300, 128).status, Status::Proved);
        let single = CombinedGale::new(vec![(a.clone(), r(1, 1))]).unwrap();
        assert_eq!(verdict::eq(&single.mass(&v, 128), &a.mass(&v, 128)), Status::Proved);
        assert!(matches!(CombinedGale::new(vec![(a.clone(), r(3, 4)), (a.clone(), r(1, 2))]), Err(Error::WeightOverflow(_))));
        let other = gauss(r(1, 3));
        assert!(matches!(CombinedGale::new(vec![(a, r(1, 2)), (other, r(1, 2))]), Err(Error::ExponentMismatch(_))));
    }

    #[test]
    fn optimal_section_weights() {
        let sets = vec![vec![CfWord::from_u64s(&[1])], vec![CfWord::from_u64s(&[2])], vec![]];
        let g = optimal_section(sets, r(1, 2)).unwrap();
        assert_eq!(g.unaccounted_weight(), r(1, 8));
        assert_eq!(check_gale_condition(&g, &CfWord::empty(), 300, 128).status, Status::Proved);
    }
}
