//! Domain types shared by every index: intervals, queries, datasets,
//! and the overlap / pair-sort primitives they all agree on.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty weight vector")]
    EmptyWeights,
    #[error("weight must be positive, got {0}")]
    InvalidWeight(String),
    #[error("index range [{lo}, {hi}] invalid for length {len}")]
    IndexError { lo: usize, hi: usize, len: usize },
    #[error("duplicate interval id {0}")]
    DuplicateId(u32),
    #[error("no interval with id {0}")]
    NotFound(u32),
    #[error("rejection sampling made no progress after {0} attempts")]
    DegenerateSelectivity(usize),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("dataset has no weight column; a weighted index requires one")]
    MissingWeights,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coordinate of an interval endpoint. A dataset is homogeneously `i64`
/// or `f64`, declared at load time. The total order is used for every
/// sort and binary search so float datasets must not contain NaN;
/// `parse` rejects non-finite values.
pub trait Coord: Copy + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn cmp_total(&self, other: &Self) -> Ordering;
    fn parse(text: &str) -> std::result::Result<Self, String>;
    fn is_valid(&self) -> bool;
    /// Lossy view for reporting only; never used for comparisons.
    fn to_f64(&self) -> f64;
}

impl Coord for i64 {
    fn cmp_total(&self, other: &Self) -> Ordering {
        Ord::cmp(self, other)
    }
    fn parse(text: &str) -> std::result::Result<Self, String> {
        text.trim().parse::<i64>().map_err(|e| e.to_string())
    }
    fn is_valid(&self) -> bool {
        true
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Coord for f64 {
    fn cmp_total(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
    fn parse(text: &str) -> std::result::Result<Self, String> {
        let v = text.trim().parse::<f64>().map_err(|e| e.to_string())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite coordinate {v}"))
        }
    }
    fn is_valid(&self) -> bool {
        self.is_finite()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Closed interval `[l, r]` with a dense id, a positive weight
/// (1.0 when the dataset is unweighted) and a pseudo flag used for
/// bucket padding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<C: Coord> {
    pub l: C,
    pub r: C,
    pub id: u32,
    pub weight: f64,
    pub pseudo: bool,
}

impl<C: Coord> Interval<C> {
    pub fn new(l: C, r: C, id: u32) -> Self {
        Interval {
            l,
            r,
            id,
            weight: 1.0,
            pseudo: false,
        }
    }

    pub fn with_weight(l: C, r: C, id: u32, weight: f64) -> Self {
        Interval {
            l,
            r,
            id,
            weight,
            pseudo: false,
        }
    }
}

/// Query interval; `l == r` encodes a stabbing query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueryInterval<C: Coord> {
    pub l: C,
    pub r: C,
}

impl<C: Coord> QueryInterval<C> {
    pub fn new(l: C, r: C) -> Self {
        QueryInterval { l, r }
    }

    pub fn is_stabbing(&self) -> bool {
        self.l == self.r
    }
}

/// Anything with a closed `[lo, hi]` extent.
pub trait Span<C: Coord> {
    fn lo(&self) -> C;
    fn hi(&self) -> C;
}

impl<C: Coord> Span<C> for Interval<C> {
    fn lo(&self) -> C {
        self.l
    }
    fn hi(&self) -> C {
        self.r
    }
}

impl<C: Coord> Span<C> for QueryInterval<C> {
    fn lo(&self) -> C {
        self.l
    }
    fn hi(&self) -> C {
        self.r
    }
}

/// Closed-endpoint overlap: touching endpoints count.
pub fn overlaps<C: Coord>(a: &impl Span<C>, b: &impl Span<C>) -> bool {
    a.lo() <= b.hi() && b.lo() <= a.hi()
}

/// Total order by (l, r, id); ties on both endpoints fall back to id so
/// construction is fully deterministic.
pub fn pair_cmp_l<C: Coord>(a: &Interval<C>, b: &Interval<C>) -> Ordering {
    a.l.cmp_total(&b.l)
        .then_with(|| a.r.cmp_total(&b.r))
        .then_with(|| a.id.cmp(&b.id))
}

/// Total order by (r, l, id), used for the right-endpoint lists.
pub fn pair_cmp_r<C: Coord>(a: &Interval<C>, b: &Interval<C>) -> Ordering {
    a.r.cmp_total(&b.r)
        .then_with(|| a.l.cmp_total(&b.l))
        .then_with(|| a.id.cmp(&b.id))
}

/// Sorts ascending by l, ties by r, further ties by id.
pub fn pair_sort<C: Coord>(mut intervals: Vec<Interval<C>>) -> Vec<Interval<C>> {
    intervals.sort_unstable_by(pair_cmp_l);
    intervals
}

/// An in-memory dataset. Ids are dense 0..n-1 in input order.
#[derive(Clone, Debug)]
pub struct Dataset<C: Coord> {
    pub intervals: Vec<Interval<C>>,
    pub domain_min: Option<C>,
    pub domain_max: Option<C>,
    pub weighted: bool,
}

impl<C: Coord> Dataset<C> {
    /// Builds a dataset from raw (l, r, weight) triples, assigning ids
    /// in input order and computing the domain bounds.
    pub fn from_spans(spans: Vec<(C, C, f64)>, weighted: bool) -> Result<Self> {
        let mut intervals = Vec::with_capacity(spans.len());
        for (i, (l, r, w)) in spans.into_iter().enumerate() {
            if !l.is_valid() || !r.is_valid() || l > r {
                return Err(Error::InvalidArgument(format!(
                    "interval {i}: invalid endpoints [{l}, {r}]"
                )));
            }
            if !(w > 0.0) {
                return Err(Error::InvalidWeight(w.to_string()));
            }
            intervals.push(Interval::with_weight(l, r, i as u32, w));
        }
        Ok(Self::from_intervals(intervals, weighted))
    }

    pub fn from_intervals(intervals: Vec<Interval<C>>, weighted: bool) -> Self {
        let mut domain_min = None;
        let mut domain_max = None;
        for x in &intervals {
            domain_min = Some(match domain_min {
                None => x.l,
                Some(m) => {
                    if x.l < m {
                        x.l
                    } else {
                        m
                    }
                }
            });
            domain_max = Some(match domain_max {
                None => x.r,
                Some(m) => {
                    if x.r > m {
                        x.r
                    } else {
                        m
                    }
                }
            });
        }
        Dataset {
            intervals,
            domain_min,
            domain_max,
            weighted,
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(l: i64, r: i64, id: u32) -> Interval<i64> {
        Interval::new(l, r, id)
    }

    #[test]
    fn overlap_shared_endpoint() {
        assert!(overlaps(&iv(1, 5, 0), &iv(5, 9, 1)));
    }

    #[test]
    fn overlap_disjoint() {
        assert!(!overlaps(&iv(1, 2, 0), &iv(3, 4, 1)));
    }

    #[test]
    fn overlap_stabbing_point_inside() {
        assert!(overlaps(&iv(3, 3, 0), &iv(1, 5, 1)));
    }

    #[test]
    fn pair_sort_basic() {
        let out = pair_sort(vec![iv(2, 9, 0), iv(1, 4, 1), iv(1, 3, 2)]);
        let key: Vec<(i64, i64)> = out.iter().map(|x| (x.l, x.r)).collect();
        assert_eq!(key, vec![(1, 3), (1, 4), (2, 9)]);
    }

    #[test]
    fn pair_sort_empty() {
        assert!(pair_sort(Vec::<Interval<i64>>::new()).is_empty());
    }

    #[test]
    fn pair_sort_id_tiebreak() {
        let out = pair_sort(vec![iv(1, 3, 7), iv(1, 3, 2)]);
        assert_eq!(out[0].id, 2);
        assert_eq!(out[1].id, 7);
    }

    #[test]
    fn dataset_rejects_inverted() {
        let err = Dataset::from_spans(vec![(5i64, 1, 1.0)], false).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    proptest! {
        #[test]
        fn overlap_symmetric(al in -50i64..50, bl in -50i64..50, alen in 0i64..30, blen in 0i64..30) {
            let a = iv(al, al + alen, 0);
            let b = iv(bl, bl + blen, 1);
            prop_assert_eq!(overlaps(&a, &b), overlaps(&b, &a));
        }

        #[test]
        fn pair_sort_permutation_and_idempotent(raw in proptest::collection::vec((-100i64..100, 0i64..50), 0..40)) {
            let xs: Vec<Interval<i64>> = raw.iter().enumerate()
                .map(|(i, &(l, len))| iv(l, l + len, i as u32)).collect();
            let sorted = pair_sort(xs.clone());
            let mut a: Vec<u32> = xs.iter().map(|x| x.id).collect();
            let mut b: Vec<u32> = sorted.iter().map(|x| x.id).collect();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
            let twice = pair_sort(sorted.clone());
            prop_assert_eq!(twice, sorted);
        }
    }
}
