//! Machine-integer encoding checks for words with small digits.
//!
//! Exhausting every word of rank `<= 5` with digits `<= 50` is far beyond
//! big-rational speed, so this module redoes the `E`-code and its preimage
//! chain in `u128` arithmetic over a depth-first walk. The walk keeps the
//! ancestors' codes on a stack, so a word's rank among the preimages of its
//! code is a count, not a search.

use rayon::prelude::*;
use serde::Serialize;

/// Convergents `p/q`, `p'/q'` of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Conv {
    p: u128,
    q: u128,
    pp: u128,
    qq: u128,
}

impl Conv {
    const ROOT: Conv = Conv { p: 0, q: 1, pp: 1, qq: 0 };

    fn child(self, a: u128) -> Conv {
        Conv { p: a * self.p + self.pp, q: a * self.q + self.qq, pp: self.p, qq: self.q }
    }

    /// Closure endpoints as `(num, den)`, ordered.
    fn closure(self) -> ((u128, u128), (u128, u128)) {
        let x = (self.p, self.q);
        let y = (self.p + self.pp, self.q + self.qq);
        if x.0 * y.1 <= y.0 * x.1 {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// `1/μ(C_v) = q (q + q')`.
    fn inv_measure(self) -> u128 {
        self.q * (self.q + self.qq)
    }
}

/// A dyadic interval `[m/2^k, (m+1)/2^k]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Cell {
    m: u128,
    k: u32,
}

fn ceil_div(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

/// The leftmost largest dyadic cell inside the closure of `C_v`.
fn largest_cell(c: Conv) -> Cell {
    let ((ln, ld), (hn, hd)) = c.closure();
    // 2^-k <= μ is necessary; two more halvings always suffice
    let mut k = 128 - (c.inv_measure() - 1).leading_zeros();
    if c.inv_measure() == 1 {
        k = 0;
    }
    loop {
        let m = ceil_div(ln << k, ld);
        if (m + 1) * hd <= hn << k {
            return Cell { m, k };
        }
        k += 1;
    }
}

/// Whether `cell ⊆ cl(C_v)`.
fn closure_holds(c: Conv, cell: Cell) -> bool {
    let ((ln, ld), (hn, hd)) = c.closure();
    ln << cell.k <= cell.m * ld && (cell.m + 1) * hd <= hn << cell.k
}

/// Whether the midpoint `(2m+1)/2^{k+1}` is interior to `C_v`.
fn midpoint_interior(c: Conv, cell: Cell) -> bool {
    let ((ln, ld), (hn, hd)) = c.closure();
    let x = 2 * cell.m + 1;
    let k = cell.k + 1;
    ln << k < x * ld && x * hd < hn << k
}

/// Next digit of the midpoint below `v`, `None` on a child boundary.
fn midpoint_digit(c: Conv, cell: Cell) -> Option<u128> {
    // x = X/D; 1/t = (X q' - p' D)/(p D - X q)
    let x = (2 * cell.m + 1) as i128;
    let d = 1i128 << (cell.k + 1);
    let num = x * c.qq as i128 - c.pp as i128 * d;
    let den = c.p as i128 * d - x * c.q as i128;
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    if den == 0 || num <= 0 || num % den == 0 {
        return None;
    }
    Some((num / den) as u128)
}

/// Summary of an exhaustive pass.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SmallEncodingReport {
    pub max_rank: usize,
    pub max_digit: u64,
    pub words: u64,
    /// Largest number of words sharing one `E`-code.
    pub max_preimages: usize,
    /// Words whose code does not decode back to them.
    pub failures: u64,
    /// Digits of the first failing word.
    pub first_failure: Option<Vec<u64>>,
}

impl SmallEncodingReport {
    fn merge(mut self, other: SmallEncodingReport) -> SmallEncodingReport {
        self.words += other.words;
        self.max_preimages = self.max_preimages.max(other.max_preimages);
        self.failures += other.failures;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        self
    }
}

struct Walker {
    max_rank: usize,
    max_digit: u128,
    digits: Vec<u64>,
    /// Codes of the proper prefixes of the current word.
    stack: Vec<Cell>,
    report: SmallEncodingReport,
}

impl Walker {
    /// Preimages of `cell` strictly below `v`, found by following the midpoint.
    fn preimages_below(c: Conv, cell: Cell) -> usize {
        let mut n = 0;
        let mut u = c;
        while let Some(a) = midpoint_digit(u, cell) {
            u = u.child(a);
            if !closure_holds(u, cell) {
                break;
            }
            // E(u) needs C_u at most four times the cell
            if u.inv_measure() << 2 >= 1u128 << cell.k && largest_cell(u) == cell {
                n += 1;
            }
            if u.inv_measure() > 1u128 << cell.k {
                break;
            }
        }
        n
    }

    fn visit(&mut self, c: Conv) {
        let cell = largest_cell(c);
        let index = self.stack.iter().filter(|e| **e == cell).count();
        let reached = self.stack.is_empty() || midpoint_interior(c, cell);
        let total = index + 1 + Self::preimages_below(c, cell);
        self.report.words += 1;
        self.report.max_preimages = self.report.max_preimages.max(total);
        if index >= 3 || !reached || !closure_holds(c, cell) {
            self.report.failures += 1;
            if self.report.first_failure.is_none() {
                self.report.first_failure = Some(self.digits.clone());
            }
        }
        if self.digits.len() < self.max_rank {
            self.stack.push(cell);
            for a in 1..=self.max_digit {
                self.digits.push(a as u64);
                self.visit(c.child(a));
                self.digits.pop();
            }
            self.stack.pop();
        }
    }
}

/// Checks every word of rank `<= max_rank` with digits `<= max_digit`:
/// its code `E(v)` lies in `cl(C_v)`, `v` is at most the third word of
/// the preimage chain of `E(v)`, and the chain has at most three members.
///
/// The chain of `E(v) = b` runs through the prefixes of `v` (because the
/// midpoint of `[b]` is interior to `C_v`) and continues below `v` along
/// that midpoint, so decoding `E(v)` with `v`'s index recovers `v`.
pub fn check_small_encodings(max_rank: usize, max_digit: u64) -> SmallEncodingReport {
    let base = SmallEncodingReport { max_rank, max_digit, ..Default::default() };
    let root = {
        let mut w = Walker { max_rank: 0, max_digit: 0, digits: vec![], stack: vec![], report: base.clone() };
        w.visit(Conv::ROOT);
        w.report
    };
    if max_rank == 0 {
        return root;
    }
    let root_cell = largest_cell(Conv::ROOT);
    let subtrees = (1..=max_digit as u128)
        .into_par_iter()
        .map(|a| {
            let mut w = Walker {
                max_rank,
                max_digit: max_digit as u128,
                digits: vec![a as u64],
                stack: vec![root_cell],
                report: SmallEncodingReport::default(),
            };
            w.visit(Conv::ROOT.child(a));
            w.report
        })
        .collect::<Vec<_>>();
    subtrees.into_iter().fold(root, SmallEncodingReport::merge)
}

/// `(m, k)` of `E(v)` in machine arithmetic, for cross-checks.
pub fn small_code(digits: &[u64]) -> (u128, u32) {
    let c = digits.iter().fold(Conv::ROOT, |c, &a| c.child(a as u128));
    let cell = largest_cell(c);
    (cell.m, cell.k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::{encode_e, encode_full, preimages_of};
    use crate::cf::CfWord;
    use num_bigint::BigInt;

    #[test]
    fn codes_match_big_arithmetic() {
        for d in [vec![], vec![1], vec![2, 3], vec![1, 1, 1], vec![50, 1, 7, 3, 49], vec![9, 9]] {
            let v = CfWord::from_u64s(&d);
            let e = encode_e(&v);
            let (m, k) = small_code(&d);
            assert_eq!(e.len(), k as usize, "{v}");
            assert_eq!(e.index(), BigInt::from(m), "{v}");
        }
    }

    #[test]
    fn small_exhaustive_pass_agrees_with_library() {
        let r = check_small_encodings(2, 12);
        assert_eq!(r.words, 1 + 12 + 144);
        assert_eq!(r.failures, 0);
        let mut worst = 0;
        for a in 1..=12u64 {
            for b in 1..=12u64 {
                let v = CfWord::from_u64s(&[a, b]);
                worst = worst.max(preimages_of(&encode_full(&v).base).len());
            }
        }
        assert!(r.max_preimages >= worst);
        assert!(r.max_preimages <= 3);
    }
}
