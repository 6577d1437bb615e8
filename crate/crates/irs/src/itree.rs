//! Edelsbrunner's interval tree: the unaugmented baseline. Supports
//! stabbing queries efficiently, exhaustive range search, and the
//! search-then-sample baseline used for benchmarking.

use crate::model::{Coord, Dataset, Interval, QueryInterval};
use crate::rng::RngHandle;
use crate::treeutil::{lower_median, partition_by_center, sort_ids_by};
use crate::model::{pair_cmp_l, pair_cmp_r};

pub struct ITNode<C: Coord> {
    pub center: C,
    /// Intervals containing `center`, ascending by left endpoint.
    pub by_l: Vec<u32>,
    /// Same intervals, ascending by right endpoint.
    pub by_r: Vec<u32>,
    pub left: Option<Box<ITNode<C>>>,
    pub right: Option<Box<ITNode<C>>>,
}

pub struct ITree<C: Coord> {
    root: Option<Box<ITNode<C>>>,
    items: Vec<Interval<C>>,
    height: usize,
}

fn build_node<C: Coord>(items: &[Interval<C>], ids: Vec<u32>) -> (Option<Box<ITNode<C>>>, usize) {
    if ids.is_empty() {
        return (None, 0);
    }
    let center = lower_median(items, &ids);
    let (left_ids, here, right_ids) = partition_by_center(items, ids, center);
    let mut by_l = here.clone();
    sort_ids_by(items, &mut by_l, pair_cmp_l);
    let mut by_r = here;
    sort_ids_by(items, &mut by_r, pair_cmp_r);
    let (left, hl) = build_node(items, left_ids);
    let (right, hr) = build_node(items, right_ids);
    let node = ITNode {
        center,
        by_l,
        by_r,
        left,
        right,
    };
    (Some(Box::new(node)), 1 + hl.max(hr))
}

impl<C: Coord> ITree<C> {
    pub fn build(data: &Dataset<C>) -> Self {
        let items = data.intervals.clone();
        let ids: Vec<u32> = (0..items.len() as u32).collect();
        let (root, height) = build_node(&items, ids);
        ITree {
            root,
            items,
            height,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// All intervals containing the point `p`.
    pub fn stabbing_query(&self, p: C) -> Vec<Interval<C>> {
        let mut out = Vec::new();
        let mut cursor = self.root.as_deref();
        while let Some(node) = cursor {
            if p < node.center {
                for &id in &node.by_l {
                    if self.items[id as usize].l > p {
                        break;
                    }
                    out.push(self.items[id as usize]);
                }
                cursor = node.left.as_deref();
            } else if p > node.center {
                for &id in node.by_r.iter().rev() {
                    if self.items[id as usize].r < p {
                        break;
                    }
                    out.push(self.items[id as usize]);
                }
                cursor = node.right.as_deref();
            } else {
                for &id in &node.by_l {
                    out.push(self.items[id as usize]);
                }
                break;
            }
        }
        out
    }

    /// Exhaustive traversal of non-prunable subtrees; returns exactly
    /// the intervals overlapping `q`.
    pub fn range_search(&self, q: &QueryInterval<C>) -> Vec<Interval<C>> {
        let mut out = Vec::new();
        if let Some(root) = self.root.as_deref() {
            self.collect_range(root, q, &mut out);
        }
        out
    }

    fn collect_range(&self, node: &ITNode<C>, q: &QueryInterval<C>, out: &mut Vec<Interval<C>>) {
        if q.r < node.center {
            // Node intervals reach at least `center`, so only the left
            // endpoint can disqualify them.
            for &id in &node.by_l {
                if self.items[id as usize].l > q.r {
                    break;
                }
                out.push(self.items[id as usize]);
            }
        } else if q.l > node.center {
            for &id in node.by_r.iter().rev() {
                if self.items[id as usize].r < q.l {
                    break;
                }
                out.push(self.items[id as usize]);
            }
        } else {
            for &id in &node.by_l {
                out.push(self.items[id as usize]);
            }
        }
        if let Some(left) = node.left.as_deref() {
            if q.l < node.center {
                self.collect_range(left, q, out);
            }
        }
        if let Some(right) = node.right.as_deref() {
            if q.r > node.center {
                self.collect_range(right, q, out);
            }
        }
    }

    /// Materializes the full result set, then draws `s` uniform samples
    /// with replacement.
    pub fn search_then_sample(
        &self,
        q: &QueryInterval<C>,
        s: usize,
        rng: &mut RngHandle,
    ) -> Vec<Interval<C>> {
        let hits = self.range_search(q);
        sample_from_hits(&hits, s, rng)
    }
}

pub fn sample_from_hits<C: Coord>(
    hits: &[Interval<C>],
    s: usize,
    rng: &mut RngHandle,
) -> Vec<Interval<C>> {
    if hits.is_empty() || s == 0 {
        return Vec::new();
    }
    (0..s)
        .map(|_| hits[rng.index_below(hits.len() as u64) as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_range;
    use crate::treeutil::ceil_log2;
    use proptest::prelude::*;

    fn dataset(spans: &[(i64, i64)]) -> Dataset<i64> {
        Dataset::from_spans(spans.iter().map(|&(l, r)| (l, r, 1.0)).collect(), false).unwrap()
    }

    fn random_dataset(seed: u64, n: usize, domain: i64) -> Dataset<i64> {
        let mut rng = RngHandle::new(seed);
        let spans: Vec<(i64, i64, f64)> = (0..n)
            .map(|_| {
                let l = rng.index_below(domain as u64) as i64;
                let len = rng.index_below((domain as u64 / 10).max(1)) as i64;
                (l, (l + len).min(domain), 1.0)
            })
            .collect();
        Dataset::from_spans(spans, false).unwrap()
    }

    fn ids(xs: &[Interval<i64>]) -> Vec<u32> {
        let mut v: Vec<u32> = xs.iter().map(|x| x.id).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn empty_tree() {
        let t = ITree::build(&dataset(&[]));
        assert_eq!(t.height(), 0);
        assert!(t.stabbing_query(5).is_empty());
        assert!(t.range_search(&QueryInterval::new(0, 10)).is_empty());
    }

    #[test]
    fn single_interval_node() {
        let t = ITree::build(&dataset(&[(1, 10)]));
        assert_eq!(t.height(), 1);
        let root = t.root.as_deref().unwrap();
        assert_eq!(root.center, 1); // lower median of {1, 10}
        assert_eq!(root.by_l, vec![0]);
        assert_eq!(root.by_r, vec![0]);
    }

    #[test]
    fn height_is_logarithmic() {
        let data = random_dataset(11, 1000, 100_000);
        let t = ITree::build(&data);
        assert!(t.height() <= 2 * ceil_log2(1001), "height {}", t.height());
    }

    #[test]
    fn stabbing_matches_scan() {
        let data = random_dataset(5, 300, 5000);
        let t = ITree::build(&data);
        for p in [0i64, 17, 999, 2500, 4999, 6000] {
            let got = ids(&t.stabbing_query(p));
            let want = ids(&oracle_range(
                &data.intervals,
                &QueryInterval::new(p, p),
            ));
            assert_eq!(got, want, "p={p}");
        }
    }

    #[test]
    fn stabbing_outside_everything() {
        let t = ITree::build(&dataset(&[(10, 20), (30, 40)]));
        assert!(t.stabbing_query(25).is_empty());
        assert!(t.stabbing_query(-5).is_empty());
    }

    #[test]
    fn range_covering_domain_returns_all() {
        let data = random_dataset(6, 200, 1000);
        let t = ITree::build(&data);
        let all = t.range_search(&QueryInterval::new(-10, 2000));
        assert_eq!(all.len(), 200);
    }

    #[test]
    fn search_then_sample_edges() {
        let data = dataset(&[(1, 5)]);
        let t = ITree::build(&data);
        let mut rng = RngHandle::new(0);
        assert!(t
            .search_then_sample(&QueryInterval::new(1, 3), 0, &mut rng)
            .is_empty());
        let s = t.search_then_sample(&QueryInterval::new(2, 3), 3, &mut rng);
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|x| x.id == 0));
        assert!(t
            .search_then_sample(&QueryInterval::new(7, 9), 5, &mut rng)
            .is_empty());
    }

    #[test]
    fn node_partition_is_disjoint() {
        let data = random_dataset(9, 500, 10_000);
        let t = ITree::build(&data);
        let mut seen = vec![false; 500];
        fn walk(node: &ITNode<i64>, seen: &mut [bool]) {
            for &id in &node.by_l {
                assert!(!seen[id as usize], "interval stored twice");
                seen[id as usize] = true;
            }
            if let Some(l) = node.left.as_deref() {
                walk(l, seen);
            }
            if let Some(r) = node.right.as_deref() {
                walk(r, seen);
            }
        }
        walk(t.root.as_deref().unwrap(), &mut seen);
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn sorted_list_property() {
        let data = random_dataset(13, 400, 10_000);
        let t = ITree::build(&data);
        fn walk(t: &ITree<i64>, node: &ITNode<i64>) {
            for w in node.by_l.windows(2) {
                assert!(t.items[w[0] as usize].l <= t.items[w[1] as usize].l);
            }
            for w in node.by_r.windows(2) {
                assert!(t.items[w[0] as usize].r <= t.items[w[1] as usize].r);
            }
            for &id in &node.by_l {
                let x = &t.items[id as usize];
                assert!(x.l <= node.center && node.center <= x.r);
            }
            if let Some(l) = node.left.as_deref() {
                walk(t, l);
            }
            if let Some(r) = node.right.as_deref() {
                walk(t, r);
            }
        }
        walk(&t, t.root.as_deref().unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn range_search_matches_oracle(seed in 0u64..10_000, n in 0usize..120) {
            let data = random_dataset(seed, n, 2000);
            let t = ITree::build(&data);
            let mut rng = RngHandle::new(seed ^ 0xabc);
            for _ in 0..20 {
                let l = rng.index_below(2500) as i64 - 200;
                let len = rng.index_below(800) as i64;
                let q = QueryInterval::new(l, l + len);
                prop_assert_eq!(
                    ids(&t.range_search(&q)),
                    ids(&oracle_range(&data.intervals, &q))
                );
            }
        }
    }
}
