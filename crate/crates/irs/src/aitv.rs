//! Space-reduced uniform sampling: the dataset is pair-sorted and cut
//! into buckets of B = ceil(log2(n+2)) consecutive intervals, each
//! bucket summarized by one virtual interval spanning its members. An
//! augmented tree over the n/B virtuals identifies the candidate
//! buckets; sampling draws a covered bucket uniformly, a slot uniformly,
//! and rejects slots that miss the query (or are padding).

use crate::ait::{Ait, RecordSet};
use crate::model::{overlaps, Coord, Dataset, Error, Interval, QueryInterval, Result};
use crate::rng::RngHandle;
use crate::sampling::build_alias;
use crate::treeutil::ceil_log2;

#[derive(Clone, Copy, Debug, Default)]
pub struct SampleStats {
    pub attempts: usize,
    pub accepted: usize,
}

pub struct Aitv<C: Coord> {
    /// Bucket-major member storage; bucket b occupies slots
    /// [b*slot, (b+1)*slot). The tail of the last bucket is padded with
    /// pseudo-flagged copies of its last real interval.
    members: Vec<Interval<C>>,
    slot: usize,
    n_real: usize,
    vtree: Ait<C>,
}

impl<C: Coord> Aitv<C> {
    pub fn build(data: &Dataset<C>) -> Self {
        let n = data.len();
        let slot = ceil_log2(n + 2).max(1);
        let sorted = crate::model::pair_sort(data.intervals.clone());
        let mut members = Vec::with_capacity(n.div_ceil(slot) * slot);
        let mut virtuals = Vec::with_capacity(n.div_ceil(slot));
        for (b, chunk) in sorted.chunks(slot).enumerate() {
            let vl = chunk[0].l; // pair sort: first member has the min l
            let mut vr = chunk[0].r;
            for x in chunk {
                if x.r > vr {
                    vr = x.r;
                }
            }
            members.extend_from_slice(chunk);
            let last = *chunk.last().expect("chunks are non-empty");
            for _ in chunk.len()..slot {
                let mut pad = last;
                pad.pseudo = true;
                members.push(pad);
            }
            virtuals.push(Interval::new(vl, vr, b as u32));
        }
        let vtree = Ait::build_from_intervals(virtuals).expect("bucket ids are unique");
        Aitv {
            members,
            slot,
            n_real: n,
            vtree,
        }
    }

    pub fn len(&self) -> usize {
        self.n_real
    }

    pub fn is_empty(&self) -> bool {
        self.n_real == 0
    }

    /// Slots per bucket.
    pub fn bucket_size(&self) -> usize {
        self.slot
    }

    pub fn bucket_count(&self) -> usize {
        self.members.len() / self.slot
    }

    /// Members of bucket `b`, padding included.
    pub fn bucket(&self, b: usize) -> &[Interval<C>] {
        &self.members[b * self.slot..(b + 1) * self.slot]
    }

    /// Stored entries: member slots plus every list entry of the
    /// virtual tree.
    pub fn total_entries(&self) -> usize {
        self.members.len() + self.vtree.space_stats().total_entries
    }

    pub fn query_virtual_records(&self, q: &QueryInterval<C>) -> RecordSet<'_, C> {
        self.vtree.query_records(q)
    }

    /// Exact overlap count: scans the members of every covered bucket.
    pub fn range_count(&self, q: &QueryInterval<C>) -> usize {
        self.query_virtual_records(q)
            .covered_ids()
            .into_iter()
            .map(|b| {
                self.bucket(b as usize)
                    .iter()
                    .filter(|x| !x.pseudo && overlaps(q, *x))
                    .count()
            })
            .sum()
    }

    pub fn irs_sample(
        &self,
        q: &QueryInterval<C>,
        s: usize,
        rng: &mut RngHandle,
    ) -> Result<Vec<Interval<C>>> {
        self.sample_with_stats(q, s, rng).map(|(out, _)| out)
    }

    /// Rejection sampling over the covered buckets. A run of
    /// 4 * s * bucket_size consecutive rejections aborts: the query's
    /// real selectivity is degenerate relative to its virtual coverage.
    pub fn sample_with_stats(
        &self,
        q: &QueryInterval<C>,
        s: usize,
        rng: &mut RngHandle,
    ) -> Result<(Vec<Interval<C>>, SampleStats)> {
        let rs = self.query_virtual_records(q);
        self.sample_from_virtual_records(&rs, q, s, rng)
    }

    pub fn sample_from_virtual_records(
        &self,
        rs: &RecordSet<'_, C>,
        q: &QueryInterval<C>,
        s: usize,
        rng: &mut RngHandle,
    ) -> Result<(Vec<Interval<C>>, SampleStats)> {
        let mut stats = SampleStats::default();
        if rs.is_empty() || s == 0 {
            return Ok((Vec::new(), stats));
        }
        let weights: Vec<f64> = rs.records.iter().map(|r| r.len() as f64).collect();
        let alias = build_alias(&weights).expect("run lengths are positive");
        let cap = 4 * s * self.slot;
        let mut out = Vec::with_capacity(s);
        let mut consecutive = 0usize;
        while out.len() < s {
            stats.attempts += 1;
            let k = alias.sample(rng);
            let rec = &rs.records[k];
            let (lo, hi) = rec.bounds();
            let b = rec.id_at(rng.index_in(lo, hi)) as usize;
            let x = &self.members[b * self.slot + rng.index_below(self.slot as u64) as usize];
            if !x.pseudo && overlaps(q, x) {
                out.push(*x);
                stats.accepted += 1;
                consecutive = 0;
            } else {
                consecutive += 1;
                if consecutive >= cap {
                    return Err(Error::DegenerateSelectivity(cap));
                }
            }
        }
        Ok((out, stats))
    }

    /// (bucket id, accepted flags per slot) for every covered bucket;
    /// feeds the exact-enumeration oracle.
    pub fn covered_buckets(&self, q: &QueryInterval<C>) -> Vec<(u32, Vec<(u32, bool)>)> {
        self.query_virtual_records(q)
            .covered_ids()
            .into_iter()
            .map(|b| {
                let flags = self
                    .bucket(b as usize)
                    .iter()
                    .map(|x| (x.id, !x.pseudo && overlaps(q, x)))
                    .collect();
                (b, flags)
            })
            .collect()
    }
}
