//! Categorical sampling primitives used by every index: Walker's alias
//! method (O(1) draws after O(n) build) and the cumulative-sum method
//! (O(log n) draws, no per-query build, supports range restriction).

use std::collections::VecDeque;
use std::fmt::Debug;
use std::ops::{Add, Div, Sub};

use num_traits::{FromPrimitive, Zero};

use crate::model::{Error, Result};
use crate::rng::RngHandle;

/// Weight scalar for alias construction. `f64` is the runtime choice;
/// exact rationals are plugged in by the test oracles to enumerate
/// sampling distributions without rounding.
pub trait SampleWeight:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
    + FromPrimitive
{
}

impl<T> SampleWeight for T where
    T: Clone
        + Debug
        + PartialOrd
        + Zero
        + Add<Output = T>
        + Sub<Output = T>
        + Div<Output = T>
        + FromPrimitive
{
}

#[derive(Clone, Debug)]
pub struct AliasEntry<W> {
    pub index: usize,
    pub weight: W,
}

/// One capacity-tau cell holding at most two objects.
#[derive(Clone, Debug)]
pub struct AliasCell<W> {
    pub first: AliasEntry<W>,
    pub second: Option<AliasEntry<W>>,
}

#[derive(Clone, Debug)]
pub struct AliasTable<W> {
    tau: W,
    cells: Vec<AliasCell<W>>,
}

impl<W: SampleWeight> AliasTable<W> {
    /// Two-worklist pairing: objects with weight <= tau are seated in
    /// input order, each anchoring one cell; an overweight object tops
    /// up those cells to capacity and re-enters the light worklist once
    /// its residual drops to tau or below. An object whose (residual)
    /// weight equals tau exactly is seated alone.
    pub fn build(weights: &[W]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        let zero = W::zero();
        let mut total = W::zero();
        for w in weights {
            if !(*w > zero) {
                return Err(Error::InvalidWeight(format!("{w:?}")));
            }
            total = total + w.clone();
        }
        let n = weights.len();
        let tau = total / W::from_usize(n).expect("cell count fits the weight type");

        let mut light: VecDeque<(usize, W)> = VecDeque::new();
        let mut heavy: VecDeque<(usize, W)> = VecDeque::new();
        for (i, w) in weights.iter().enumerate() {
            if *w > tau {
                heavy.push_back((i, w.clone()));
            } else {
                light.push_back((i, w.clone()));
            }
        }

        let mut cells = Vec::with_capacity(n);
        while let Some((i, wi)) = light.pop_front() {
            let second = if wi < tau && !heavy.is_empty() {
                let (j, wj) = heavy.pop_front().expect("checked non-empty");
                let fill = tau.clone() - wi.clone();
                let residual = wj - fill.clone();
                if residual > tau {
                    heavy.push_front((j, residual));
                } else {
                    light.push_back((j, residual));
                }
                Some(AliasEntry {
                    index: j,
                    weight: fill,
                })
            } else {
                None
            };
            cells.push(AliasCell {
                first: AliasEntry {
                    index: i,
                    weight: wi,
                },
                second,
            });
        }
        // Float drift can leave nominally heavy residuals; seat them alone.
        while let Some((j, wj)) = heavy.pop_front() {
            cells.push(AliasCell {
                first: AliasEntry {
                    index: j,
                    weight: wj,
                },
                second: None,
            });
        }
        debug_assert_eq!(cells.len(), n);
        Ok(AliasTable { tau, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn tau(&self) -> &W {
        &self.tau
    }

    pub fn cells(&self) -> &[AliasCell<W>] {
        &self.cells
    }

    /// Total weight assigned to each object across all cells. Equals the
    /// input weight vector (exactly, for exact weight types).
    pub fn assigned_weights(&self) -> Vec<W> {
        let mut out = vec![W::zero(); self.cells.len()];
        for cell in &self.cells {
            out[cell.first.index] = out[cell.first.index].clone() + cell.first.weight.clone();
            if let Some(sec) = &cell.second {
                out[sec.index] = out[sec.index].clone() + sec.weight.clone();
            }
        }
        out
    }

    /// Exact per-object sampling probability obtained by enumerating
    /// every (cell, entry) outcome: each cell is picked with mass 1/n
    /// and an entry within it with mass weight/tau.
    pub fn pmf(&self) -> Vec<W> {
        let n = W::from_usize(self.cells.len()).expect("cell count fits the weight type");
        let denom = self.tau.clone();
        let mut out = vec![W::zero(); self.cells.len()];
        for cell in &self.cells {
            let add = |acc: &mut W, w: &W| {
                *acc = acc.clone() + (w.clone() / denom.clone()) / n.clone();
            };
            add(&mut out[cell.first.index], &cell.first.weight);
            if let Some(sec) = &cell.second {
                add(&mut out[sec.index], &sec.weight);
            }
        }
        out
    }
}

impl AliasTable<f64> {
    /// One uniform cell pick, then (for two-entry cells) one uniform
    /// weight in [0, tau) deciding between the entries.
    pub fn sample(&self, rng: &mut RngHandle) -> usize {
        let cell = &self.cells[rng.index_below(self.cells.len() as u64) as usize];
        match &cell.second {
            None => cell.first.index,
            Some(sec) => {
                if rng.real_below(self.tau) < cell.first.weight {
                    cell.first.index
                } else {
                    sec.index
                }
            }
        }
    }
}

pub fn build_alias(weights: &[f64]) -> Result<AliasTable<f64>> {
    AliasTable::build(weights)
}

/// Prefix sums a[j] = w_1 + ... + w_j, 1-based. Compensated summation
/// keeps long float accumulations accurate enough for binary search.
#[derive(Clone, Debug)]
pub struct CumulativeSumArray {
    sums: Vec<f64>,
}

pub fn build_cumsum(weights: &[f64]) -> Result<CumulativeSumArray> {
    if weights.is_empty() {
        return Err(Error::EmptyWeights);
    }
    let mut sums = Vec::with_capacity(weights.len());
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for &w in weights {
        if !(w > 0.0) {
            return Err(Error::InvalidWeight(w.to_string()));
        }
        let y = w - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        sums.push(acc);
    }
    Ok(CumulativeSumArray { sums })
}

impl CumulativeSumArray {
    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// a[j] with a[0] = 0; `j` is 1-based.
    pub fn prefix(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.sums[j - 1]
        }
    }

    pub fn total(&self) -> f64 {
        self.prefix(self.sums.len())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.sums
    }

    /// Weighted draw restricted to positions [lo, hi] (1-based, inclusive).
    pub fn sample_range(&self, lo: usize, hi: usize, rng: &mut RngHandle) -> Result<usize> {
        sample_from_prefix(&self.sums, lo, hi, rng)
    }
}

/// Draws w uniformly from (a[lo-1], a[hi]] and returns the unique k in
/// [lo, hi] with a[k-1] < w <= a[k], so P(k) = w_k / sum of the range.
/// `sums` is a raw 1-based prefix array, shared with the AWIT node arrays.
pub fn sample_from_prefix(
    sums: &[f64],
    lo: usize,
    hi: usize,
    rng: &mut RngHandle,
) -> Result<usize> {
    if lo < 1 || lo > hi || hi > sums.len() {
        return Err(Error::IndexError {
            lo,
            hi,
            len: sums.len(),
        });
    }
    if lo == hi {
        return Ok(lo);
    }
    let base = if lo >= 2 { sums[lo - 2] } else { 0.0 };
    let top = sums[hi - 1];
    let w = base + (top - base) * rng.unit_open_closed();
    let off = sums[lo - 1..hi].partition_point(|&a| a < w);
    Ok((lo + off).min(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn alias_equal_weights_single_entries() {
        let t = build_alias(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(*t.tau(), 2.0);
        for cell in t.cells() {
            assert!(cell.second.is_none());
            assert_eq!(cell.first.weight, 2.0);
        }
    }

    #[test]
    fn alias_one_three_layout() {
        let t = build_alias(&[1.0, 3.0]).unwrap();
        assert_eq!(*t.tau(), 2.0);
        let assigned = t.assigned_weights();
        assert_eq!(assigned, vec![1.0, 3.0]);
        // Object 0's cell carries (0,1) and (1,1); object 1's carries (1,2).
        let c0 = &t.cells()[0];
        assert_eq!(c0.first.index, 0);
        assert_eq!(c0.first.weight, 1.0);
        let sec = c0.second.as_ref().unwrap();
        assert_eq!(sec.index, 1);
        assert_eq!(sec.weight, 1.0);
        let c1 = &t.cells()[1];
        assert_eq!(c1.first.index, 1);
        assert_eq!(c1.first.weight, 2.0);
        assert!(c1.second.is_none());
    }

    #[test]
    fn alias_singleton() {
        let t = build_alias(&[5.0]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(*t.tau(), 5.0);
        let mut rng = RngHandle::new(0);
        for _ in 0..100 {
            assert_eq!(t.sample(&mut rng), 0);
        }
    }

    #[test]
    fn alias_rejects_bad_input() {
        assert!(matches!(
            build_alias(&[]).unwrap_err(),
            Error::EmptyWeights
        ));
        assert!(matches!(
            build_alias(&[1.0, 0.0]).unwrap_err(),
            Error::InvalidWeight(_)
        ));
    }

    #[test]
    fn alias_empirical_three_quarters() {
        let t = build_alias(&[1.0, 3.0]).unwrap();
        let mut rng = RngHandle::new(20240917);
        let draws = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..draws {
            if t.sample(&mut rng) == 1 {
                hits += 1;
            }
        }
        let freq = hits as f64 / draws as f64;
        assert!((freq - 0.75).abs() < 0.005, "freq {freq}");
    }

    #[test]
    fn alias_uniform_chi_square() {
        let t = build_alias(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let mut rng = RngHandle::new(7);
        let draws = 1_000_000u64;
        let mut counts = [0u64; 4];
        for _ in 0..draws {
            counts[t.sample(&mut rng)] += 1;
        }
        let expected = draws as f64 / 4.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 0.999 quantile of chi-square with 3 degrees of freedom.
        assert!(chi2 < 16.266, "chi2 {chi2}");
    }

    #[test]
    fn cumsum_basic() {
        let a = build_cumsum(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.as_slice(), &[1.0, 3.0, 6.0]);
        let b = build_cumsum(&[7.0]).unwrap();
        assert_eq!(b.as_slice(), &[7.0]);
        let c = build_cumsum(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(c.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn cumsum_range_singleton() {
        let a = build_cumsum(&[1.0, 2.0, 3.0]).unwrap();
        let mut rng = RngHandle::new(1);
        for _ in 0..100 {
            assert_eq!(a.sample_range(2, 2, &mut rng).unwrap(), 2);
        }
    }

    #[test]
    fn cumsum_range_rejects_bad_indices() {
        let a = build_cumsum(&[1.0, 2.0, 3.0]).unwrap();
        let mut rng = RngHandle::new(1);
        assert!(matches!(
            a.sample_range(0, 2, &mut rng).unwrap_err(),
            Error::IndexError { .. }
        ));
        assert!(matches!(
            a.sample_range(2, 4, &mut rng).unwrap_err(),
            Error::IndexError { .. }
        ));
        assert!(matches!(
            a.sample_range(3, 2, &mut rng).unwrap_err(),
            Error::IndexError { .. }
        ));
    }

    #[test]
    fn cumsum_range_uniform_tail() {
        let a = build_cumsum(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let mut rng = RngHandle::new(99);
        let draws = 1_000_000u64;
        let mut counts = [0u64; 5];
        for _ in 0..draws {
            counts[a.sample_range(2, 4, &mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[0] + counts[1], 0);
        for k in 2..=4 {
            let freq = counts[k] as f64 / draws as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.005, "k={k} freq={freq}");
        }
    }

    #[test]
    fn cumsum_full_range_matches_unrestricted_pmf() {
        // Restricting to the full range must leave P(k) = w_k / total.
        let weights = [2.0, 5.0, 1.0, 4.0];
        let a = build_cumsum(&weights).unwrap();
        let total: f64 = weights.iter().sum();
        let mut rng = RngHandle::new(3);
        let draws = 400_000u64;
        let mut counts = [0u64; 4];
        for _ in 0..draws {
            counts[a.sample_range(1, 4, &mut rng).unwrap() - 1] += 1;
        }
        for k in 0..4 {
            let freq = counts[k] as f64 / draws as f64;
            assert!((freq - weights[k] / total).abs() < 0.01, "k={k} freq={freq}");
        }
    }

    proptest! {
        #[test]
        fn alias_conserves_weights(ws in proptest::collection::vec(1u32..20, 1..30)) {
            let weights: Vec<f64> = ws.iter().map(|&w| w as f64).collect();
            let t = build_alias(&weights).unwrap();
            prop_assert_eq!(t.len(), weights.len());
            let assigned = t.assigned_weights();
            for (a, w) in assigned.iter().zip(&weights) {
                prop_assert!((a - w).abs() <= 1e-9 * w);
            }
            for cell in t.cells() {
                let sum = cell.first.weight
                    + cell.second.as_ref().map_or(0.0, |s| s.weight);
                prop_assert!((sum - t.tau()).abs() <= 1e-9 * t.tau());
            }
        }

        #[test]
        fn cumsum_invariants(ws in proptest::collection::vec(0.001f64..100.0, 1..200)) {
            let a = build_cumsum(&ws).unwrap();
            let mut prev = 0.0;
            for (j, &w) in ws.iter().enumerate() {
                let cur = a.prefix(j + 1);
                prop_assert!(cur > prev);
                prop_assert!((cur - prev - w).abs() <= 1e-9 * a.total().max(1.0));
                prev = cur;
            }
        }
    }
}
