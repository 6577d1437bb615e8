//! Augmented interval tree: every node also stores its entire subtree's
//! intervals in two extra sorted lists, so one binary search per visited
//! node identifies the whole query-overlapping sample space as a small
//! set of contiguous runs ("node records"). Uniform sampling then draws
//! a record through an alias table and an index within the record.

use std::collections::HashSet;

use crate::model::{
    overlaps, pair_cmp_l, pair_cmp_r, Coord, Dataset, Error, Interval, QueryInterval, Result,
};
use crate::rng::RngHandle;
use crate::sampling::build_alias;
use crate::treeutil::{
    ceil_log2, list_remove, lower_median, merge3, merge_into, partition_by_center, sort_ids_by,
};

/// Which node list a record indexes; the discriminant is the record tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ListTag {
    /// Node list sorted by left endpoint.
    ByL = 0,
    /// Node list sorted by right endpoint.
    ByR = 1,
    /// Subtree list sorted by right endpoint.
    AllByR = 2,
    /// Subtree list sorted by left endpoint.
    AllByL = 3,
}

/// Cumulative weight arrays, populated only by the weighted build.
pub(crate) struct NodeWeights {
    pub wl: Vec<f64>,
    pub wr: Vec<f64>,
    pub awl: Vec<f64>,
    pub awr: Vec<f64>,
}

pub(crate) struct AitNode<C: Coord> {
    pub center: C,
    pub by_l: Vec<u32>,
    pub by_r: Vec<u32>,
    /// Every interval of the subtree rooted here, ascending by l.
    pub all_by_l: Vec<u32>,
    /// Same multiset, ascending by r.
    pub all_by_r: Vec<u32>,
    pub weights: Option<Box<NodeWeights>>,
    pub left: Option<Box<AitNode<C>>>,
    pub right: Option<Box<AitNode<C>>>,
}

impl<C: Coord> AitNode<C> {
    pub(crate) fn list(&self, tag: ListTag) -> &[u32] {
        match tag {
            ListTag::ByL => &self.by_l,
            ListTag::ByR => &self.by_r,
            ListTag::AllByR => &self.all_by_r,
            ListTag::AllByL => &self.all_by_l,
        }
    }

    pub(crate) fn cum(&self, tag: ListTag) -> &[f64] {
        let w = self
            .weights
            .as_ref()
            .expect("cumulative arrays are only available on a weighted build");
        match tag {
            ListTag::ByL => &w.wl,
            ListTag::ByR => &w.wr,
            ListTag::AllByR => &w.awr,
            ListTag::AllByL => &w.awl,
        }
    }
}

/// A contiguous run of query-overlapping intervals inside one node list.
/// Indices are 1-based and inclusive on both sides.
pub struct NodeRecord<'a, C: Coord> {
    pub(crate) node: &'a AitNode<C>,
    tag: ListTag,
    lo: usize,
    hi: usize,
}

impl<'a, C: Coord> NodeRecord<'a, C> {
    pub fn tag(&self) -> ListTag {
        self.tag
    }

    /// (idx_l, idx_r), 1-based inclusive.
    pub fn bounds(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    /// Interval id at 1-based position `idx` of the tagged list.
    pub fn id_at(&self, idx: usize) -> u32 {
        debug_assert!(self.lo <= idx && idx <= self.hi);
        self.node.list(self.tag)[idx - 1]
    }

    /// Ids of the whole run, in list order.
    pub fn ids(&self) -> &'a [u32] {
        &self.node.list(self.tag)[self.lo - 1..self.hi]
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TraversalStats {
    pub visited_nodes: usize,
    pub case3_fires: usize,
    pub binary_searches: usize,
}

/// The sample space of one query: disjoint runs plus, while an insertion
/// pool is outstanding, the pooled intervals overlapping the query.
pub struct RecordSet<'a, C: Coord> {
    pub records: Vec<NodeRecord<'a, C>>,
    pub pool_hits: Vec<u32>,
    pub stats: TraversalStats,
}

impl<'a, C: Coord> RecordSet<'a, C> {
    /// Number of intervals covered; equals |q intersect X|.
    pub fn total(&self) -> usize {
        self.records.iter().map(|r| r.len()).sum::<usize>() + self.pool_hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty() && self.pool_hits.is_empty()
    }

    pub fn covered_ids(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.total());
        for rec in &self.records {
            out.extend_from_slice(rec.ids());
        }
        out.extend_from_slice(&self.pool_hits);
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SpaceStats {
    pub nodes: usize,
    /// Sum of |by_l| over all nodes (= number of stored intervals).
    pub node_list_entries: usize,
    /// Sum of |all_by_l| over all nodes.
    pub subtree_list_entries: usize,
    /// Entries across all four lists of every node.
    pub total_entries: usize,
}

pub struct Ait<C: Coord> {
    root: Option<Box<AitNode<C>>>,
    items: Vec<Interval<C>>,
    live: Vec<bool>,
    live_count: usize,
    height: usize,
    pool: Vec<u32>,
}

fn build_node<C: Coord>(items: &[Interval<C>], ids: Vec<u32>) -> (Option<Box<AitNode<C>>>, usize) {
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
    let empty: &[u32] = &[];
    let all_by_l = merge3(
        items,
        &by_l,
        left.as_deref().map_or(empty, |n| &n.all_by_l),
        right.as_deref().map_or(empty, |n| &n.all_by_l),
        pair_cmp_l,
    );
    let all_by_r = merge3(
        items,
        &by_r,
        left.as_deref().map_or(empty, |n| &n.all_by_r),
        right.as_deref().map_or(empty, |n| &n.all_by_r),
        pair_cmp_r,
    );
    let node = AitNode {
        center,
        by_l,
        by_r,
        all_by_l,
        all_by_r,
        weights: None,
        left,
        right,
    };
    (Some(Box::new(node)), 1 + hl.max(hr))
}

fn bulk_insert<C: Coord>(
    slot: &mut Option<Box<AitNode<C>>>,
    items: &[Interval<C>],
    ids: Vec<u32>,
    depth: usize,
    max_new_depth: &mut usize,
) {
    if ids.is_empty() {
        return;
    }
    match slot {
        None => {
            let (node, h) = build_node(items, ids);
            *slot = node;
            *max_new_depth = (*max_new_depth).max(depth + h - 1);
        }
        Some(node) => {
            merge_into(items, &mut node.all_by_l, &ids, pair_cmp_l);
            merge_into(items, &mut node.all_by_r, &ids, pair_cmp_r);
            let (left, here, right) = partition_by_center(items, ids, node.center);
            if !here.is_empty() {
                merge_into(items, &mut node.by_l, &here, pair_cmp_l);
                merge_into(items, &mut node.by_r, &here, pair_cmp_r);
            }
            bulk_insert(&mut node.left, items, left, depth + 1, max_new_depth);
            bulk_insert(&mut node.right, items, right, depth + 1, max_new_depth);
        }
    }
}

fn remove_from<C: Coord>(slot: &mut Option<Box<AitNode<C>>>, items: &[Interval<C>], x: &Interval<C>) {
    let node = slot
        .as_deref_mut()
        .expect("routing invariant: interval must be present in this subtree");
    list_remove(items, &mut node.all_by_l, x, pair_cmp_l);
    list_remove(items, &mut node.all_by_r, x, pair_cmp_r);
    if x.r < node.center {
        remove_from(&mut node.left, items, x);
    } else if x.l > node.center {
        remove_from(&mut node.right, items, x);
    } else {
        list_remove(items, &mut node.by_l, x, pair_cmp_l);
        list_remove(items, &mut node.by_r, x, pair_cmp_r);
    }
    if node.all_by_l.is_empty() {
        *slot = None;
    }
}

impl<C: Coord> Ait<C> {
    pub fn build(data: &Dataset<C>) -> Self {
        Self::build_from_intervals(data.intervals.clone())
            .expect("dataset invariants guarantee unique ids")
    }

    /// Builds from intervals with arbitrary (unique) ids; id slots up to
    /// the maximum id are allocated, gaps stay dead.
    pub fn build_from_intervals(intervals: Vec<Interval<C>>) -> Result<Self> {
        let max_id = intervals.iter().map(|x| x.id).max();
        let slots = max_id.map_or(0, |m| m as usize + 1);
        let mut items: Vec<Interval<C>> = Vec::with_capacity(slots);
        let mut live = vec![false; slots];
        if let Some(first) = intervals.first() {
            items.resize(slots, *first);
        }
        let mut ids = Vec::with_capacity(intervals.len());
        for x in &intervals {
            if live[x.id as usize] {
                return Err(Error::DuplicateId(x.id));
            }
            live[x.id as usize] = true;
            items[x.id as usize] = *x;
            ids.push(x.id);
        }
        let live_count = ids.len();
        let (root, height) = build_node(&items, ids);
        Ok(Ait {
            root,
            items,
            live,
            live_count,
            height,
            pool: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.live_count
    }

    pub fn is_empty(&self) -> bool {
        self.live_count == 0
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn item(&self, id: u32) -> &Interval<C> {
        &self.items[id as usize]
    }

    pub fn contains_id(&self, id: u32) -> bool {
        (id as usize) < self.live.len() && self.live[id as usize]
    }

    pub fn live_intervals(&self) -> impl Iterator<Item = &Interval<C>> {
        self.items
            .iter()
            .enumerate()
            .filter(|(i, _)| self.live[*i])
            .map(|(_, x)| x)
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Option<Box<AitNode<C>>>, &[Interval<C>]) {
        (&mut self.root, &self.items)
    }

    /// One descent from the root. Case 1 (q right of nothing: q.r < c)
    /// takes a prefix of the node's by-l list and goes left; case 2
    /// (c < q.l) takes a suffix of the by-r list and goes right; case 3
    /// (q spans c) takes the whole node list, finalizes both children
    /// through their subtree lists, and stops.
    pub fn query_records(&self, q: &QueryInterval<C>) -> RecordSet<'_, C> {
        let mut records = Vec::new();
        let mut stats = TraversalStats::default();
        let mut cursor = self.root.as_deref();
        while let Some(node) = cursor {
            stats.visited_nodes += 1;
            if q.r < node.center {
                stats.binary_searches += 1;
                let j = node
                    .by_l
                    .partition_point(|&id| self.items[id as usize].l <= q.r);
                if j >= 1 {
                    records.push(NodeRecord {
                        node,
                        tag: ListTag::ByL,
                        lo: 1,
                        hi: j,
                    });
                }
                cursor = node.left.as_deref();
            } else if node.center < q.l {
                stats.binary_searches += 1;
                let k = node
                    .by_r
                    .partition_point(|&id| self.items[id as usize].r < q.l);
                if k < node.by_r.len() {
                    records.push(NodeRecord {
                        node,
                        tag: ListTag::ByR,
                        lo: k + 1,
                        hi: node.by_r.len(),
                    });
                }
                cursor = node.right.as_deref();
            } else {
                stats.case3_fires += 1;
                if !node.by_l.is_empty() {
                    records.push(NodeRecord {
                        node,
                        tag: ListTag::ByL,
                        lo: 1,
                        hi: node.by_l.len(),
                    });
                }
                if let Some(left) = node.left.as_deref() {
                    stats.visited_nodes += 1;
                    stats.binary_searches += 1;
                    let k = left
                        .all_by_r
                        .partition_point(|&id| self.items[id as usize].r < q.l);
                    if k < left.all_by_r.len() {
                        records.push(NodeRecord {
                            node: left,
                            tag: ListTag::AllByR,
                            lo: k + 1,
                            hi: left.all_by_r.len(),
                        });
                    }
                }
                if let Some(right) = node.right.as_deref() {
                    stats.visited_nodes += 1;
                    stats.binary_searches += 1;
                    let j = right
                        .all_by_l
                        .partition_point(|&id| self.items[id as usize].l <= q.r);
                    if j >= 1 {
                        records.push(NodeRecord {
                            node: right,
                            tag: ListTag::AllByL,
                            lo: 1,
                            hi: j,
                        });
                    }
                }
                break;
            }
        }
        let pool_hits = self
            .pool
            .iter()
            .copied()
            .filter(|&id| overlaps(q, &self.items[id as usize]))
            .collect();
        RecordSet {
            records,
            pool_hits,
            stats,
        }
    }

    pub fn range_count(&self, q: &QueryInterval<C>) -> usize {
        self.query_records(q).total()
    }

    /// `s` independent uniform samples (with replacement) from the
    /// intervals overlapping `q`; empty result when none overlap.
    pub fn irs_sample(&self, q: &QueryInterval<C>, s: usize, rng: &mut RngHandle) -> Vec<Interval<C>> {
        let rs = self.query_records(q);
        self.sample_from_records(&rs, s, rng)
    }

    pub fn sample_from_records(
        &self,
        rs: &RecordSet<'_, C>,
        s: usize,
        rng: &mut RngHandle,
    ) -> Vec<Interval<C>> {
        if rs.is_empty() || s == 0 {
            return Vec::new();
        }
        let mut weights: Vec<f64> = rs.records.iter().map(|r| r.len() as f64).collect();
        if !rs.pool_hits.is_empty() {
            weights.push(rs.pool_hits.len() as f64);
        }
        let alias = build_alias(&weights).expect("run lengths are positive");
        // Phased draws: all (record, position) picks first, then the id
        // lookups, then the item copies. The loads within each phase are
        // independent, so the misses overlap instead of serializing.
        let picks: Vec<(usize, usize)> = (0..s)
            .map(|_| {
                let k = alias.sample(rng);
                let pos = if k < rs.records.len() {
                    let (lo, hi) = rs.records[k].bounds();
                    rng.index_in(lo, hi)
                } else {
                    rng.index_below(rs.pool_hits.len() as u64) as usize
                };
                (k, pos)
            })
            .collect();
        let ids: Vec<u32> = picks
            .iter()
            .map(|&(k, pos)| {
                if k < rs.records.len() {
                    rs.records[k].id_at(pos)
                } else {
                    rs.pool_hits[pos]
                }
            })
            .collect();
        ids.iter().map(|&id| self.items[id as usize]).collect()
    }

    fn validate_new(&self, x: &Interval<C>) -> Result<()> {
        if !x.l.is_valid() || !x.r.is_valid() || x.l > x.r {
            return Err(Error::InvalidArgument(format!(
                "invalid endpoints [{}, {}]",
                x.l, x.r
            )));
        }
        if !(x.weight > 0.0) {
            return Err(Error::InvalidWeight(x.weight.to_string()));
        }
        if self.contains_id(x.id) {
            return Err(Error::DuplicateId(x.id));
        }
        Ok(())
    }

    fn register(&mut self, x: Interval<C>) {
        let slot = x.id as usize;
        if slot >= self.items.len() {
            self.items.resize(slot + 1, x);
            self.live.resize(slot + 1, false);
        }
        self.items[slot] = x;
        self.live[slot] = true;
        self.live_count += 1;
    }

    /// Immediate structural insertion: descends like a query with q = x,
    /// updating subtree lists at case-1/2 nodes and all four lists where
    /// x spans the center; missing children are built from x.
    pub fn insert(&mut self, x: Interval<C>) -> Result<()> {
        self.validate_new(&x)?;
        self.register(x);
        let mut new_depth = 0;
        bulk_insert(&mut self.root, &self.items, vec![x.id], 1, &mut new_depth);
        self.height = self.height.max(new_depth);
        self.maybe_rebuild();
        Ok(())
    }

    /// Pool capacity: ceil(log2(n+2)) squared.
    pub fn pool_capacity(&self) -> usize {
        let b = ceil_log2(self.live_count + 2).max(1);
        b * b
    }

    pub fn pool_len(&self) -> usize {
        self.pool.len()
    }

    /// Adds to the insertion pool; flushes automatically at capacity.
    /// Pooled intervals are visible to queries through a linear scan.
    pub fn pool_insert(&mut self, x: Interval<C>) -> Result<()> {
        self.validate_new(&x)?;
        self.register(x);
        self.pool.push(x.id);
        if self.pool.len() >= self.pool_capacity() {
            self.flush_pool();
        }
        Ok(())
    }

    /// Routes every pooled interval into the tree, re-sorting each
    /// touched list once (linear merge), then clears the pool.
    pub fn flush_pool(&mut self) {
        if self.pool.is_empty() {
            return;
        }
        let ids = std::mem::take(&mut self.pool);
        let mut new_depth = 0;
        bulk_insert(&mut self.root, &self.items, ids, 1, &mut new_depth);
        self.height = self.height.max(new_depth);
        self.maybe_rebuild();
    }

    pub fn delete(&mut self, id: u32) -> Result<()> {
        if !self.contains_id(id) {
            return Err(Error::NotFound(id));
        }
        if let Some(pos) = self.pool.iter().position(|&p| p == id) {
            self.pool.swap_remove(pos);
        } else {
            let x = self.items[id as usize];
            remove_from(&mut self.root, &self.items, &x);
        }
        self.live[id as usize] = false;
        self.live_count -= 1;
        Ok(())
    }

    fn maybe_rebuild(&mut self) {
        let limit = 2 * ceil_log2(self.live_count + 1).max(1);
        if self.height > limit {
            self.rebuild();
        }
    }

    /// Full from-scratch rebuild over the live structural intervals;
    /// pooled intervals stay pooled.
    pub fn rebuild(&mut self) {
        let pooled: HashSet<u32> = self.pool.iter().copied().collect();
        let ids: Vec<u32> = (0..self.items.len() as u32)
            .filter(|&id| self.live[id as usize] && !pooled.contains(&id))
            .collect();
        let (root, height) = build_node(&self.items, ids);
        self.root = root;
        self.height = height;
    }

    pub fn space_stats(&self) -> SpaceStats {
        fn walk<C: Coord>(node: &AitNode<C>, s: &mut SpaceStats) {
            s.nodes += 1;
            s.node_list_entries += node.by_l.len();
            s.subtree_list_entries += node.all_by_l.len();
            s.total_entries +=
                node.by_l.len() + node.by_r.len() + node.all_by_l.len() + node.all_by_r.len();
            if let Some(l) = node.left.as_deref() {
                walk(l, s);
            }
            if let Some(r) = node.right.as_deref() {
                walk(r, s);
            }
        }
        let mut s = SpaceStats::default();
        if let Some(root) = self.root.as_deref() {
            walk(root, &mut s);
        }
        s
    }

    #[cfg(test)]
    pub(crate) fn check_structure(&self) {
        fn walk<C: Coord>(t: &Ait<C>, node: &AitNode<C>) -> Vec<u32> {
            assert_eq!(node.by_l.len(), node.by_r.len());
            assert_eq!(node.all_by_l.len(), node.all_by_r.len());
            for &id in &node.by_l {
                let x = &t.items[id as usize];
                assert!(x.l <= node.center && node.center <= x.r);
            }
            for w in node.all_by_l.windows(2) {
                assert_ne!(
                    pair_cmp_l(&t.items[w[0] as usize], &t.items[w[1] as usize]),
                    std::cmp::Ordering::Greater
                );
            }
            for w in node.all_by_r.windows(2) {
                assert_ne!(
                    pair_cmp_r(&t.items[w[0] as usize], &t.items[w[1] as usize]),
                    std::cmp::Ordering::Greater
                );
            }
            let mut sub: Vec<u32> = node.by_l.clone();
            if let Some(l) = node.left.as_deref() {
                for &id in &walk(t, l) {
                    assert!(t.items[id as usize].r < node.center);
                    sub.push(id);
                }
            }
            if let Some(r) = node.right.as_deref() {
                for &id in &walk(t, r) {
                    assert!(t.items[id as usize].l > node.center);
                    sub.push(id);
                }
            }
            let mut a = sub.clone();
            a.sort_unstable();
            let mut b = node.all_by_l.clone();
            b.sort_unstable();
            assert_eq!(a, b, "subtree list must equal node list plus children");
            sub
        }
        if let Some(root) = self.root.as_deref() {
            let all = walk(self, root);
            assert_eq!(all.len() + self.pool.len(), self.live_count);
        } else {
            assert_eq!(self.pool.len(), self.live_count);
        }
    }
}
