//! Writing a dyadic interval as a finite union of cylinders and fans.
//!
//! `I(λ) = {λ}`. Passing from `I(w)` to `I(w0)` and `I(w1)` cuts the one
//! part that straddles the midpoint of `w` into its children, recursing
//! into the child that still straddles it. Dyadic midpoints are rational,
//! so the recursion ends at a shared endpoint of two siblings.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cf::{CfWord, Fan, RatInterval};
use crate::dyadic::DyadicWord;

/// A member of a decomposition: one cylinder or a fan of siblings.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Word(CfWord),
    Fan(Fan),
}

impl Part {
    /// Collapse one-member fans to words.
    pub fn normalize(self) -> Part {
        match self {
            Part::Fan(f) => match f.as_singleton() {
                Some(w) => Part::Word(w),
                None => Part::Fan(f),
            },
            w => w,
        }
    }

    pub fn interval(&self) -> RatInterval {
        match self {
            Part::Word(w) => w.cylinder(),
            Part::Fan(f) => f.interval(),
        }
    }

    pub fn lebesgue(&self) -> BigRational {
        match self {
            Part::Word(w) => w.lebesgue(),
            Part::Fan(f) => f.lebesgue(),
        }
    }

    /// Deepest rank of a member word.
    pub fn rank(&self) -> usize {
        match self {
            Part::Word(w) => w.rank(),
            Part::Fan(f) => f.base().rank() + 1,
        }
    }

    /// Whether every member of the part extends `v`.
    pub fn extends(&self, v: &CfWord) -> bool {
        match self {
            Part::Word(w) => v.is_prefix_of(w),
            Part::Fan(f) => v.is_prefix_of(f.base()),
        }
    }

    /// The member of this part that is a prefix of `y`, if any.
    pub fn member_prefix_of(&self, y: &CfWord) -> Option<CfWord> {
        match self {
            Part::Word(u) => u.is_prefix_of(y).then(|| u.clone()),
            Part::Fan(f) => {
                let r = f.base().rank();
                if y.rank() > r && f.base().is_prefix_of(y) && f.contains_digit(&y.digits()[r]) {
                    Some(f.base().child(&y.digits()[r]))
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Part::Word(w) => write!(f, "{w}"),
            Part::Fan(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Debug for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `I(w)`: parts listed left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub word: DyadicWord,
    pub parts: Vec<Part>,
}

impl Decomposition {
    pub fn root() -> Self {
        Decomposition { word: DyadicWord::empty(), parts: vec![Part::Word(CfWord::empty())] }
    }

    pub fn max_rank(&self) -> usize {
        self.parts.iter().map(Part::rank).max().unwrap_or(0)
    }

    /// Exact sum of part lengths.
    pub fn lebesgue(&self) -> BigRational {
        self.parts.iter().map(Part::lebesgue).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Parts are adjacent left to right and span exactly the dyadic interval.
    pub fn tiles_interval(&self) -> bool {
        let Some(first) = self.parts.first() else {
            return false;
        };
        let mut at = first.interval().lo;
        if at != self.word.lo() {
            return false;
        }
        for p in &self.parts {
            let iv = p.interval();
            if iv.lo != at || iv.hi <= iv.lo {
                return false;
            }
            at = iv.hi;
        }
        at == self.word.hi() && self.lebesgue() == self.word.lebesgue()
    }
}

fn push_fan(out: &mut Vec<Part>, base: &CfWord, from: BigInt, to: Option<BigInt>) {
    if from < BigInt::one() {
        return;
    }
    if let Some(t) = &to {
        if *t < from {
            return;
        }
    }
    let f = Fan::new(base.clone(), from, to).expect("nonempty fan");
    out.push(Part::Fan(f).normalize());
}

/// Children of `base` with digits in `from..=to`, cut at the interior point `m`.
fn split_children(base: &CfWord, from: &BigInt, to: Option<&BigInt>, m: &BigRational, out: &mut Vec<Part>) {
    match base.child_digit_of(m) {
        Err(c) => {
            push_fan(out, base, from.clone(), Some(&c - 1));
            push_fan(out, base, c, to.cloned());
        }
        Ok(i) => {
            push_fan(out, base, from.clone(), Some(&i - 1));
            let child = base.child(&i);
            split_children(&child, &BigInt::one(), None, m, out);
            push_fan(out, base, &i + 1, to.cloned());
        }
    }
}

/// Cut `part` at `m`. Parts not straddling `m` come back unchanged.
pub fn split_at(part: &Part, m: &BigRational) -> Vec<Part> {
    let iv = part.interval();
    if !iv.interior_contains(m) {
        return vec![part.clone()];
    }
    let mut out = Vec::new();
    match part {
        Part::Word(u) => split_children(u, &BigInt::one(), None, m, &mut out),
        Part::Fan(f) => split_children(f.base(), f.from(), f.to(), m, &mut out),
    }
    out
}

fn sort_parts(parts: &mut [Part]) {
    parts.sort_by_cached_key(|p| p.interval().lo);
}

/// `(I(w0), I(w1))` from `I(w)`.
pub fn divide_children(d: &Decomposition) -> (Decomposition, Decomposition) {
    let mid = d.word.interval().midpoint();
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for p in &d.parts {
        for q in split_at(p, &mid) {
            if q.interval().hi <= mid {
                left.push(q);
            } else {
                right.push(q);
            }
        }
    }
    sort_parts(&mut left);
    sort_parts(&mut right);
    (
        Decomposition { word: d.word.child(false), parts: left },
        Decomposition { word: d.word.child(true), parts: right },
    )
}

/// `I(w)`.
pub fn divide(w: &DyadicWord) -> Decomposition {
    let mut d = Decomposition::root();
    for &bit in w.bits() {
        let (l, r) = divide_children(&d);
        d = if bit { r } else { l };
    }
    d
}

/// Outcome of checking one refinement step `I(w) → I(w0), I(w1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinementReport {
    pub word: DyadicWord,
    /// The single member of `I(w)` that was cut into children, if any.
    pub subdivided: Option<CfWord>,
    pub max_rank: usize,
    pub tiles: bool,
    pub disjoint: bool,
    pub accounted: bool,
    pub problems: Vec<String>,
}

impl RefinementReport {
    pub fn holds(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Check that `left ∪ right` refines `parent` by cutting at most one member.
pub fn check_refinement(parent: &Decomposition, left: &Decomposition, right: &Decomposition) -> RefinementReport {
    let mut problems = Vec::new();
    let tiles = parent.tiles_interval() && left.tiles_interval() && right.tiles_interval();
    if !tiles {
        problems.push("parts do not tile their dyadic interval".into());
    }
    let mid = parent.word.interval().midpoint();
    let disjoint = left.parts.iter().all(|p| p.interval().hi <= mid)
        && right.parts.iter().all(|p| p.interval().lo >= mid);
    if !disjoint {
        problems.push("halves overlap".into());
    }
    let mut cut: BTreeSet<CfWord> = BTreeSet::new();
    let mut accounted = true;
    for p in left.parts.iter().chain(&right.parts) {
        match origin(parent, p) {
            Some(Origin::Kept) => {}
            Some(Origin::Cut(u)) => {
                cut.insert(u);
            }
            None => {
                accounted = false;
                problems.push(format!("{p} has no ancestor in I({})", parent.word));
            }
        }
    }
    if cut.len() > 1 {
        problems.push(format!("{} members subdivided", cut.len()));
    }
    let max_rank = left.max_rank().max(right.max_rank());
    RefinementReport {
        word: parent.word.clone(),
        subdivided: cut.into_iter().next(),
        max_rank,
        tiles,
        disjoint,
        accounted,
        problems,
    }
}

enum Origin {
    Kept,
    Cut(CfWord),
}

fn origin(parent: &Decomposition, p: &Part) -> Option<Origin> {
    match p {
        Part::Word(x) => parent.parts.iter().find_map(|q| {
            q.member_prefix_of(x).map(|u| if &u == x { Origin::Kept } else { Origin::Cut(u) })
        }),
        Part::Fan(f) => {
            let kept = parent.parts.iter().any(|q| match q {
                Part::Fan(g) => {
                    g.base() == f.base()
                        && g.from() <= f.from()
                        && match (g.to(), f.to()) {
                            (None, _) => true,
                            (Some(_), None) => false,
                            (Some(a), Some(b)) => b <= a,
                        }
                }
                Part::Word(_) => false,
            });
            if kept {
                return Some(Origin::Kept);
            }
            parent.parts.iter().find_map(|q| q.member_prefix_of(f.base()).map(Origin::Cut))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> DyadicWord {
        DyadicWord::parse(s).unwrap()
    }

    #[test]
    fn first_levels() {
        assert_eq!(divide(&w("0")).parts, vec![Part::Fan(Fan::infinite(CfWord::empty(), 2))]);
        assert_eq!(divide(&w("1")).parts, vec![Part::Word(CfWord::from_u64s(&[1]))]);
        assert_eq!(divide(&w("01")).parts, vec![Part::Fan(Fan::finite(CfWord::empty(), 2, 3))]);
        assert_eq!(divide(&DyadicWord::empty()), Decomposition::root());
    }

    #[test]
    fn every_step_refines() {
        let mut frontier = vec![Decomposition::root()];
        for _ in 0..8 {
            let mut next = Vec::new();
            for d in &frontier {
                let (l, r) = divide_children(d);
                let rep = check_refinement(d, &l, &r);
                assert!(rep.holds(), "{}: {:?}", d.word, rep.problems);
                next.push(l);
                next.push(r);
            }
            frontier = next;
        }
    }

    #[test]
    fn cut_member_is_an_ancestor_of_new_words() {
        let d = divide(&w("1"));
        let (l, r) = divide_children(&d);
        let rep = check_refinement(&d, &l, &r);
        let u = rep.subdivided.unwrap();
        assert_eq!(u, CfWord::from_u64s(&[1]));
        assert!(l.parts.iter().chain(&r.parts).all(|p| p.extends(&u)));
    }

    #[test]
    fn split_leaves_distant_parts_alone() {
        let p = Part::Word(CfWord::from_u64s(&[3]));
        let m = BigRational::new(1.into(), 2.into());
        assert_eq!(split_at(&p, &m), vec![p]);
    }
}
