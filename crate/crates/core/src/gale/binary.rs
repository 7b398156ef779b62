//! Binary gales derived from continued-fraction gales: the proportional
//! s'-gale `H_d`, its smoothed s-gale `S_h`, and the pipeline joining them.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use super::{part_mass, BinGale, SharedBinGale, SharedCfGale};
use crate::bridge::divide;
use crate::cf::CfWord;
use crate::dyadic::DyadicWord;
use crate::enclosure::{self, Enclosure};
use crate::error::{Error, Result};
use crate::verdict::{self, Verdict};

/// Default number of explicitly evaluated smoothing levels.
pub const DEFAULT_NMAX: usize = 64;

const CACHE_LIMIT: usize = 1 << 20;

/// Memo of `2^q` enclosures.
#[derive(Default)]
struct Pow2Cache(Mutex<HashMap<(BigRational, u32), Enclosure>>);

impl Pow2Cache {
    fn get(&self, q: &BigRational, prec: u32) -> Enclosure {
        let key = (q.clone(), prec);
        if let Some(v) = self.0.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = enclosure::exp2_rational(q, prec);
        let mut m = self.0.lock().expect("cache lock");
        if m.len() > CACHE_LIMIT {
            m.clear();
        }
        m.insert(key, v.clone());
        v
    }
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// How [`ProportionalGale`] totals the mass of `I(w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Route {
    /// Sum the gale's mass over the parts of `divide(w)`.
    Decomposition,
    /// Ask the gale for the mass of `[w]` directly.
    Interval,
}

/// `H_d(w) = Σ_{y ∈ I(w)} d(y) (γ(y)/μ(w))^{s'}`.
pub struct ProportionalGale {
    d: SharedCfGale,
    route: Route,
    pow: Pow2Cache,
    memo: Mutex<HashMap<(DyadicWord, u32), Enclosure>>,
}

impl ProportionalGale {
    /// Uses the interval route when the gale supports it.
    pub fn new(d: SharedCfGale) -> Self {
        let probe = DyadicWord::empty().interval();
        let route = if d.interval_mass(&probe, 16).is_some() { Route::Interval } else { Route::Decomposition };
        ProportionalGale::with_route(d, route)
    }

    pub fn with_route(d: SharedCfGale, route: Route) -> Self {
        ProportionalGale { d, route, pow: Pow2Cache::default(), memo: Mutex::new(HashMap::new()) }
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// `Σ_{y ∈ I(w)} d(y) γ^{s'}(y)`.
    pub fn block_mass(&self, w: &DyadicWord, prec: u32) -> Enclosure {
        if self.route == Route::Interval {
            if let Some(m) = self.d.interval_mass(&w.interval(), prec) {
                return m;
            }
        }
        let parts = divide(w).parts;
        let terms: Vec<Enclosure> = parts.iter().map(|p| part_mass(self.d.as_ref(), p, prec)).collect();
        Enclosure::sum(&terms, prec)
    }
}

impl BinGale for ProportionalGale {
    fn exponent(&self) -> BigRational {
        self.d.exponent()
    }

    fn descriptor(&self) -> String {
        format!("proportional({})", self.d.descriptor())
    }

    fn capital(&self, w: &DyadicWord, prec: u32) -> Enclosure {
        let key = (w.clone(), prec);
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return v.clone();
        }
        let wp = prec + 8;
        let scale = self.pow.get(&(self.exponent() * int(w.len())), wp);
        let v = scale.mul(&self.block_mass(w, wp)).with_precision(prec);
        let mut m = self.memo.lock().expect("memo lock");
        if m.len() > CACHE_LIMIT {
            m.clear();
        }
        m.insert(key, v.clone());
        v
    }

    /// With `mass(A) <= K γ(A) <= K μ(A)/ln 2`: `H_d(u) <= (K/ln 2) 2^{(s'-1)|u|}`.
    fn capital_bound(&self, prec: u32) -> (Enclosure, BigRational) {
        match self.d.density_bound(prec) {
            Some(k) => {
                let c = k.div(&enclosure::ln2(prec)).expect("ln 2 > 0");
                (c, self.exponent() - BigRational::one())
            }
            None => (self.capital(&DyadicWord::empty(), prec), self.exponent()),
        }
    }
}

/// `h(w) = c 2^{(s-1)|w|}`, the gale that bets nothing.
pub struct UniformBinGale {
    s: BigRational,
    c: BigRational,
    pow: Pow2Cache,
}

impl UniformBinGale {
    pub fn new(s: BigRational, c: BigRational) -> Self {
        UniformBinGale { s, c, pow: Pow2Cache::default() }
    }
}

impl BinGale for UniformBinGale {
    fn exponent(&self) -> BigRational {
        self.s.clone()
    }

    fn descriptor(&self) -> String {
        format!("uniform(s={}, c={})", self.s, self.c)
    }

    fn capital(&self, w: &DyadicWord, prec: u32) -> Enclosure {
        let e = (&self.s - BigRational::one()) * int(w.len());
        self.pow.get(&e, prec).mul_rational(&self.c)
    }

    fn capital_bound(&self, prec: u32) -> (Enclosure, BigRational) {
        (Enclosure::from_rational(&self.c, prec), &self.s - BigRational::one())
    }
}

/// The boundary strings of the length-`n` subtree under `w`.
///
/// `H_n(w)` holds the two edge strings `L = w0^m`, `R = w1^m` (unless
/// they are `0^n` or `1^n`) and their outside neighbours `L-1`, `R+1`
/// (where they exist). `F_n(w)` is the rest of the subtree, kept as an
/// index range rather than enumerated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborSets {
    pub w: DyadicWord,
    pub n: usize,
    pub left_edge: DyadicWord,
    pub right_edge: DyadicWord,
    pub left_outer: Option<DyadicWord>,
    pub right_outer: Option<DyadicWord>,
    /// `L = 0^n`, so `L ∈ F_n(w)`.
    pub left_edge_in_f: bool,
    /// `R = 1^n`, so `R ∈ F_n(w)`.
    pub right_edge_in_f: bool,
}

impl NeighborSets {
    /// Members of `H_n(w)` in increasing order.
    pub fn h_set(&self) -> Vec<DyadicWord> {
        let mut out = Vec::new();
        out.extend(self.left_outer.clone());
        if !self.left_edge_in_f {
            out.push(self.left_edge.clone());
        }
        if !self.right_edge_in_f {
            out.push(self.right_edge.clone());
        }
        out.extend(self.right_outer.clone());
        out
    }

    /// Index range `[lo, hi]` of `F_n(w)` at level `n`, `None` if empty.
    pub fn f_range(&self) -> Option<(BigInt, BigInt)> {
        let mut lo = self.left_edge.index();
        let mut hi = self.right_edge.index();
        if !self.left_edge_in_f {
            lo += 1;
        }
        if !self.right_edge_in_f {
            hi -= 1;
        }
        (lo <= hi).then_some((lo, hi))
    }

    pub fn f_contains(&self, u: &DyadicWord) -> bool {
        u.len() == self.n && self.f_range().is_some_and(|(lo, hi)| (lo..=hi).contains(&u.index()))
    }

    pub fn h_contains(&self, u: &DyadicWord) -> bool {
        self.h_set().contains(u)
    }
}

/// `(F_n(w), H_n(w))` for `n > |w|`.
pub fn neighbor_sets(w: &DyadicWord, n: usize) -> Result<NeighborSets> {
    if n <= w.len() {
        return Err(Error::NeighborLevel { n, len: w.len() });
    }
    let m = n - w.len();
    let left_edge = w.extend(false, m);
    let right_edge = w.extend(true, m);
    Ok(NeighborSets {
        w: w.clone(),
        n,
        left_outer: left_edge.prev(),
        right_outer: right_edge.next(),
        left_edge_in_f: w.is_all_zeros(),
        right_edge_in_f: w.is_all_ones(),
        left_edge,
        right_edge,
    })
}

/// `S_h(w) = Σ_n 2^{-sn} h_n(w)` for an s'-gale `h` and `s > s'`.
///
/// For `n > |w|` the subtree identity turns `Σ_{F} h + ½ Σ_{H} h` into
/// `2^{s'(n-|w|)} h(w)` plus half-differences at the two subtree edges;
/// the first part sums in closed form over all `n`. The edge terms are
/// evaluated for `n <= N_max` and bounded beyond it through
/// [`BinGale::capital_bound`].
pub struct SmoothedGale {
    h: SharedBinGale,
    s: BigRational,
    n_max: usize,
    pow: Pow2Cache,
}

impl SmoothedGale {
    pub fn new(h: SharedBinGale, s: BigRational, n_max: usize) -> Result<Self> {
        let sp = h.exponent();
        if s <= sp {
            return Err(Error::SmoothingExponent { s: s.to_string(), s_prime: sp.to_string() });
        }
        Ok(SmoothedGale { h, s, n_max, pow: Pow2Cache::default() })
    }

    pub fn inner(&self) -> &SharedBinGale {
        &self.h
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Edge correction at level `n > |u|`:
    /// `½ c_L (h(L-1) - h(L)) + ½ c_R (h(R+1) - h(R))`.
    fn edge_correction(&self, u: &DyadicWord, n: usize, prec: u32) -> Enclosure {
        let sets = neighbor_sets(u, n).expect("n > |u|");
        let mut acc = Enclosure::zero(prec);
        if let Some(outer) = &sets.left_outer {
            acc = acc.add(&self.h.capital(outer, prec).sub(&self.h.capital(&sets.left_edge, prec)));
        }
        if let Some(outer) = &sets.right_outer {
            acc = acc.add(&self.h.capital(outer, prec).sub(&self.h.capital(&sets.right_edge, prec)));
        }
        acc.mul_pow2(-1)
    }

    /// `h_n(u)` for `n > |u|`.
    pub fn level_capital(&self, u: &DyadicWord, n: usize, prec: u32) -> Enclosure {
        let sp = self.h.exponent();
        let k = u.len();
        let main = self.pow.get(&(&sp * int(n - k)), prec).mul(&self.h.capital(u, prec));
        let inner = main.add(&self.edge_correction(u, n, prec));
        self.pow.get(&(&self.s * int(k)), prec).mul(&inner)
    }

    /// Certified bound on `Σ_{n > N} 2^{s(k-n)} |edge correction|`.
    fn tail_bound(&self, k: usize, big_n: usize, prec: u32) -> Enclosure {
        let (c, beta) = self.h.capital_bound(prec);
        let qe = &beta - &self.s;
        let q = self.pow.get(&qe, prec);
        let first = self.pow.get(&(&qe * int(big_n + 1) + &self.s * int(k)), prec);
        let geom = first.div(&Enclosure::one(prec).sub(&q)).expect("q < 1");
        c.mul(&geom)
    }
}

impl BinGale for SmoothedGale {
    fn exponent(&self) -> BigRational {
        self.s.clone()
    }

    fn descriptor(&self) -> String {
        format!("smoothed(s={}, N_max={}; {})", self.s, self.n_max, self.h.descriptor())
    }

    fn capital(&self, w: &DyadicWord, prec: u32) -> Enclosure {
        let wp = prec + 24;
        let k = w.len();
        let s = &self.s;
        let sp = self.h.exponent();
        let one = BigRational::one();
        // n = 0: h_0(w) = 2^{(s-1)|w|} h(λ)
        let mut acc = self
            .pow
            .get(&((s - &one) * int(k)), wp)
            .mul(&self.h.capital(&DyadicWord::empty(), wp));
        // 1 <= n <= |w|: 2^{-sn} 2^{(s-1)(|w|-n+1)} h_n(w[..n-1])
        for n in 1..=k {
            let e = (s - &one) * int(k - n + 1) - s * int(n);
            let hn = self.level_capital(&w.prefix(n - 1), n, wp);
            acc = acc.add(&self.pow.get(&e, wp).mul(&hn));
        }
        // n > |w|, subtree part: h(w) r/(1 - r) with r = 2^{s'-s}
        let r = self.pow.get(&(&sp - s), wp);
        let geom = r.div(&Enclosure::one(wp).sub(&r)).expect("r < 1");
        acc = acc.add(&self.h.capital(w, wp).mul(&geom));
        // n > |w|, edge corrections
        let big_n = self.n_max.max(k);
        for n in (k + 1)..=big_n {
            let e = s * (int(k) - int(n));
            acc = acc.add(&self.pow.get(&e, wp).mul(&self.edge_correction(w, n, wp)));
        }
        let t = self.tail_bound(k, big_n, wp);
        let tail = Enclosure::new(t.hi().neg(), t.hi().clone(), wp);
        acc.add(&tail).clamp_nonnegative().with_precision(prec)
    }
}

/// Outcome of one pipeline inequality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PipelineOutcome {
    /// `(v, b)` is outside the admissible window.
    Skipped(String),
    Checked(Verdict),
}

/// `h = S_{H_d}` together with the constants of its capital guarantee.
pub struct Pipeline {
    d: SharedCfGale,
    h: SmoothedGale,
    s: BigRational,
}

/// `h = smoothed_gale(proportional_gale(d), s)`.
pub fn cf_to_binary_pipeline(d: SharedCfGale, s: BigRational) -> Result<Pipeline> {
    cf_to_binary_pipeline_with(d, s, DEFAULT_NMAX)
}

pub fn cf_to_binary_pipeline_with(d: SharedCfGale, s: BigRational, n_max: usize) -> Result<Pipeline> {
    let h = SmoothedGale::new(std::sync::Arc::new(ProportionalGale::new(d.clone())), s.clone(), n_max)?;
    Ok(Pipeline { d, h, s })
}

impl Pipeline {
    pub fn gale(&self) -> &SmoothedGale {
        &self.h
    }

    /// `c_1 = (2 ln 2)^{-s}`.
    pub fn c1(&self, prec: u32) -> Enclosure {
        let two_ln2 = enclosure::ln2(prec + 8).mul_pow2(1);
        enclosure::pow_enclosure(&two_ln2, &-self.s.clone()).expect("positive base").with_precision(prec)
    }

    /// `c_2 = 2^{-(2s+1)} c_1`.
    pub fn c2(&self, prec: u32) -> Enclosure {
        let e = -(int(2) * &self.s + BigRational::one());
        enclosure::exp2_rational(&e, prec + 8).mul(&self.c1(prec + 8)).with_precision(prec)
    }

    /// `c_3 = 2^{5(s-1)} c_2`.
    pub fn c3(&self, prec: u32) -> Enclosure {
        let e = int(5) * (&self.s - BigRational::one());
        enclosure::exp2_rational(&e, prec + 8).mul(&self.c2(prec + 8)).with_precision(prec)
    }

    /// `C_b` meets `C_v` and `μ(v)/16 <= μ(b) <= 2 μ(v)`.
    pub fn window_ok(v: &CfWord, b: &DyadicWord) -> bool {
        let (mv, mb) = (v.lebesgue(), b.lebesgue());
        v.cylinder().overlaps(&b.interval()) && &mv / int(16) <= mb && mb <= &mv * int(2)
    }

    /// A random `b` in the window of `v`: a random point of `C_v`, then a
    /// random admissible length.
    pub fn sample_window<R: Rng>(v: &CfWord, rng: &mut R) -> DyadicWord {
        let cyl = v.cylinder();
        let mv = v.lebesgue();
        let levels: Vec<usize> = (0..4096)
            .filter(|&k| {
                let mb = BigRational::new(BigInt::one(), BigInt::one() << k);
                &mv / int(16) <= mb && mb <= &mv * int(2)
            })
            .collect();
        let k = levels[rng.gen_range(0..levels.len())];
        let t = BigRational::new(BigInt::from(rng.gen_range(1u64..(1 << 40))), BigInt::one() << 40);
        let x = &cyl.lo + cyl.length() * t;
        DyadicWord::containing(&x, k)
    }

    /// `h(b) >= c_3 d(v)`, or a skip outside the window.
    pub fn check(&self, v: &CfWord, b: &DyadicWord, prec: u32) -> PipelineOutcome {
        if !Pipeline::window_ok(v, b) {
            return PipelineOutcome::Skipped(format!("({v}, {b}) is outside the window"));
        }
        PipelineOutcome::Checked(verdict::escalate(prec, verdict::DEFAULT_MAX_DOUBLINGS, |p| {
            let lhs = self.c3(p).mul(&self.d.capital(v, p));
            let hb = self.h.capital(b, p);
            Verdict::new(format!("h({b}) >= c3 d({v})"), verdict::le(&lhs, &hb), &hb.sub(&lhs))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gale::{check_bin_gale_condition, GaussGale};
    use crate::verdict::Status;
    use std::sync::Arc;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn w(s: &str) -> DyadicWord {
        DyadicWord::parse(s).unwrap()
    }

    fn brute_h(w: &DyadicWord, n: usize) -> Vec<DyadicWord> {
        DyadicWord::all_of_length(n)
            .into_iter()
            .filter(|u| {
                let inside = |x: &Option<DyadicWord>| x.as_ref().is_some_and(|x| w.is_prefix_of(x));
                let any = w.is_prefix_of(u) || inside(&u.next()) || inside(&u.prev());
                let edge = u.is_all_zeros() || u.is_all_ones();
                let f = if edge { w.is_prefix_of(u) } else { inside(&u.next()) && inside(&u.prev()) };
                any && !f
            })
            .collect()
    }

    #[test]
    fn neighbor_examples() {
        let a = neighbor_sets(&w("0"), 2).unwrap();
        assert_eq!(a.h_set(), vec![w("01"), w("10")]);
        assert!(a.f_contains(&w("00")) && !a.f_contains(&w("01")));
        let b = neighbor_sets(&w("01"), 3).unwrap();
        let mut hs = b.h_set();
        hs.sort();
        assert_eq!(hs, vec![w("001"), w("010"), w("011"), w("100")]);
        assert_eq!(b.f_range(), None);
        let c = neighbor_sets(&DyadicWord::empty(), 2).unwrap();
        assert!(c.f_contains(&w("00")) && c.f_contains(&w("11")));
        assert!(neighbor_sets(&w("01"), 2).is_err());
    }

    #[test]
    fn neighbor_sets_match_enumeration() {
        for k in 0..=3 {
            for x in DyadicWord::all_of_length(k) {
                for n in (k + 1)..=6 {
                    let mut got = neighbor_sets(&x, n).unwrap().h_set();
                    got.sort();
                    assert_eq!(got, brute_h(&x, n), "w = {x}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn proportional_of_gauss() {
        let d: SharedCfGale = Arc::new(GaussGale::new(r(1, 2)).unwrap());
        let h = ProportionalGale::new(d.clone());
        assert!(h.capital(&DyadicWord::empty(), 128).contains(&r(1, 1)));
        // I("1") = {[1]}: H("1") = d([1]) (γ([1]) / (1/2))^{1/2}
        let one = CfWord::from_u64s(&[1]);
        let want = d.capital(&one, 128).mul(&d.mass(&one, 128).mul_pow2(1).pow(&r(1, 2)).unwrap());
        assert_eq!(verdict::eq(&h.capital(&w("1"), 128), &want), Status::Proved);
        let slow = ProportionalGale::with_route(d, Route::Decomposition);
        for x in ["0110", "1", "00000", "1011"] {
            assert_eq!(verdict::eq(&h.capital(&w(x), 128), &slow.capital(&w(x), 128)), Status::Proved);
        }
    }

    #[test]
    fn smoothing_requires_larger_exponent() {
        let h: SharedBinGale = Arc::new(UniformBinGale::new(r(1, 2), r(1, 1)));
        assert!(matches!(SmoothedGale::new(h, r(1, 2), 8), Err(Error::SmoothingExponent { .. })));
    }

    #[test]
    fn smoothed_root_is_geometric() {
        let h: SharedBinGale = Arc::new(UniformBinGale::new(r(2, 5), r(1, 1)));
        let sm = SmoothedGale::new(h, r(1, 2), DEFAULT_NMAX).unwrap();
        let want = 1.0 / (1.0 - 2f64.powf(-0.1));
        assert!((sm.capital(&DyadicWord::empty(), 128).midpoint_f64() - want).abs() < 1e-9);
        let flat: SharedBinGale = Arc::new(UniformBinGale::new(r(1, 1), r(1, 1)));
        let sm = SmoothedGale::new(flat, r(3, 2), DEFAULT_NMAX).unwrap();
        let want = 1.0 / (1.0 - 2f64.powf(-0.5));
        assert!((sm.capital(&DyadicWord::empty(), 128).midpoint_f64() - want).abs() < 1e-9);
    }

    #[test]
    fn smoothed_gale_condition() {
        let d: SharedCfGale = Arc::new(GaussGale::new(r(2, 5)).unwrap());
        let sm = SmoothedGale::new(Arc::new(ProportionalGale::new(d)), r(1, 2), DEFAULT_NMAX).unwrap();
        for k in 0..=4 {
            for x in DyadicWord::all_of_length(k) {
                assert_eq!(check_bin_gale_condition(&sm, &x, 128).status, Status::Proved, "{x}");
            }
        }
    }

    #[test]
    fn pipeline_constants_and_small_case() {
        let d: SharedCfGale = Arc::new(GaussGale::new(r(2, 5)).unwrap());
        let p = cf_to_binary_pipeline(d, r(1, 2)).unwrap();
        let c1 = 1.0 / (2.0 * std::f64::consts::LN_2).sqrt();
        assert!((p.c1(128).midpoint_f64() - c1).abs() < 1e-12);
        assert!((p.c3(128).midpoint_f64() - c1 * 0.25 * 2f64.powf(-2.5)).abs() < 1e-12);
        match p.check(&CfWord::from_u64s(&[1]), &w("1"), 128) {
            PipelineOutcome::Checked(v) => assert!(v.is_proved()),
            other => panic!("{other:?}"),
        }
        assert!(matches!(p.check(&CfWord::from_u64s(&[9]), &w("1"), 128), PipelineOutcome::Skipped(_)));
    }
}
