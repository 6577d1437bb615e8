//! Benchmark harness: builds any of the four indexes, runs a query
//! workload with the candidate-identification and sampling phases timed
//! separately, and reports per-query rows plus an aggregate summary.

use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::ait::Ait;
use crate::aitv::Aitv;
use crate::awit::Awit;
use crate::itree::{sample_from_hits, ITree};
use crate::io::QuerySpec;
use crate::model::{Coord, Dataset, Error, Interval, QueryInterval, Result};
use crate::rng::{RngHandle, RNG_ALGORITHM};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    ITree,
    Ait,
    Aitv,
    Awit,
}

impl IndexKind {
    pub fn name(&self) -> &'static str {
        match self {
            IndexKind::ITree => "itree",
            IndexKind::Ait => "ait",
            IndexKind::Aitv => "aitv",
            IndexKind::Awit => "awit",
        }
    }
}

impl FromStr for IndexKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "itree" => Ok(IndexKind::ITree),
            "ait" => Ok(IndexKind::Ait),
            "aitv" => Ok(IndexKind::Aitv),
            "awit" => Ok(IndexKind::Awit),
            other => Err(format!("unknown index '{other}'")),
        }
    }
}

pub enum BuiltIndex<C: Coord> {
    ITree(ITree<C>),
    Ait(Ait<C>),
    Aitv(Aitv<C>),
    Awit(Awit<C>),
}

impl<C: Coord> BuiltIndex<C> {
    pub fn build(data: &Dataset<C>, kind: IndexKind) -> Result<Self> {
        Ok(match kind {
            IndexKind::ITree => BuiltIndex::ITree(ITree::build(data)),
            IndexKind::Ait => BuiltIndex::Ait(Ait::build(data)),
            IndexKind::Aitv => BuiltIndex::Aitv(Aitv::build(data)),
            IndexKind::Awit => BuiltIndex::Awit(Awit::build(data)?),
        })
    }

    pub fn kind(&self) -> IndexKind {
        match self {
            BuiltIndex::ITree(_) => IndexKind::ITree,
            BuiltIndex::Ait(_) => IndexKind::Ait,
            BuiltIndex::Aitv(_) => IndexKind::Aitv,
            BuiltIndex::Awit(_) => IndexKind::Awit,
        }
    }

    pub fn range_count(&self, q: &QueryInterval<C>) -> usize {
        match self {
            BuiltIndex::ITree(t) => t.range_search(q).len(),
            BuiltIndex::Ait(t) => t.range_count(q),
            BuiltIndex::Aitv(t) => t.range_count(q),
            BuiltIndex::Awit(t) => t.range_count(q),
        }
    }

    pub fn sample(
        &self,
        q: &QueryInterval<C>,
        s: usize,
        rng: &mut RngHandle,
    ) -> Result<Vec<Interval<C>>> {
        match self {
            BuiltIndex::ITree(t) => Ok(t.search_then_sample(q, s, rng)),
            BuiltIndex::Ait(t) => Ok(t.irs_sample(q, s, rng)),
            BuiltIndex::Aitv(t) => t.irs_sample(q, s, rng),
            BuiltIndex::Awit(t) => t.weighted_irs_sample(q, s, rng),
        }
    }

}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QueryRow {
    pub query: usize,
    pub l: f64,
    pub r: f64,
    pub s: usize,
    pub count: usize,
    pub candidate_ns: u64,
    pub sample_ns: u64,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct StatTriple {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl StatTriple {
    pub fn of(values: &[f64]) -> StatTriple {
        if values.is_empty() {
            return StatTriple::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        StatTriple {
            min: v[0],
            median: v[v.len() / 2],
            max: v[v.len() - 1],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchSummary {
    pub index: &'static str,
    pub n: usize,
    pub queries: usize,
    pub s: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub build_ns: u64,
    pub entries: usize,
    pub candidate_ns: StatTriple,
    pub sample_ns: StatTriple,
    pub total_ns: StatTriple,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub summary: BenchSummary,
    pub rows: Vec<QueryRow>,
}

/// Builds the index, runs every query, and times the two phases of each
/// execution separately: identifying the candidate records/result set,
/// then drawing the samples.
pub fn run_bench<C: Coord>(
    data: &Dataset<C>,
    queries: &[QuerySpec<C>],
    kind: IndexKind,
    s_default: usize,
    seed: u64,
) -> Result<BenchReport> {
    let t0 = Instant::now();
    let index = BuiltIndex::build(data, kind)?;
    let build_ns = t0.elapsed().as_nanos() as u64;
    let entries = index_entries(&index, data);

    let mut rng = RngHandle::new(seed);
    let mut rows = Vec::with_capacity(queries.len());
    for (i, spec) in queries.iter().enumerate() {
        let s = spec.s.unwrap_or(s_default);
        let row = run_one(&index, i, &spec.q, s, &mut rng)?;
        rows.push(row);
    }
    let cand: Vec<f64> = rows.iter().map(|r| r.candidate_ns as f64).collect();
    let samp: Vec<f64> = rows.iter().map(|r| r.sample_ns as f64).collect();
    let total: Vec<f64> = rows
        .iter()
        .map(|r| (r.candidate_ns + r.sample_ns) as f64)
        .collect();
    Ok(BenchReport {
        summary: BenchSummary {
            index: kind.name(),
            n: data.len(),
            queries: queries.len(),
            s: s_default,
            seed,
            rng: RNG_ALGORITHM,
            build_ns,
            entries,
            candidate_ns: StatTriple::of(&cand),
            sample_ns: StatTriple::of(&samp),
            total_ns: StatTriple::of(&total),
        },
        rows,
    })
}

fn index_entries<C: Coord>(index: &BuiltIndex<C>, data: &Dataset<C>) -> usize {
    match index {
        BuiltIndex::ITree(t) => 2 * t.len(),
        BuiltIndex::Ait(t) => t.space_stats().total_entries,
        BuiltIndex::Aitv(t) => t.total_entries(),
        // Weight arrays mirror the four id lists entry for entry.
        BuiltIndex::Awit(_) => {
            let plain = Ait::build(data);
            2 * plain.space_stats().total_entries
        }
    }
}

fn run_one<C: Coord>(
    index: &BuiltIndex<C>,
    i: usize,
    q: &QueryInterval<C>,
    s: usize,
    rng: &mut RngHandle,
) -> Result<QueryRow> {
    let (count, candidate_ns, sample_ns) = match index {
        BuiltIndex::ITree(t) => {
            let t1 = Instant::now();
            let hits = t.range_search(q);
            let candidate_ns = t1.elapsed().as_nanos() as u64;
            let t2 = Instant::now();
            let out = sample_from_hits(&hits, s, rng);
            let sample_ns = t2.elapsed().as_nanos() as u64;
            debug_assert!(out.len() == s || hits.is_empty());
            (hits.len(), candidate_ns, sample_ns)
        }
        BuiltIndex::Ait(t) => {
            let t1 = Instant::now();
            let rs = t.query_records(q);
            let candidate_ns = t1.elapsed().as_nanos() as u64;
            let count = rs.total();
            let t2 = Instant::now();
            let _ = t.sample_from_records(&rs, s, rng);
            let sample_ns = t2.elapsed().as_nanos() as u64;
            (count, candidate_ns, sample_ns)
        }
        BuiltIndex::Aitv(t) => {
            let t1 = Instant::now();
            let rs = t.query_virtual_records(q);
            let candidate_ns = t1.elapsed().as_nanos() as u64;
            let t2 = Instant::now();
            let sampled = t.sample_from_virtual_records(&rs, q, s, rng)?;
            let sample_ns = t2.elapsed().as_nanos() as u64;
            drop(sampled);
            (t.range_count(q), candidate_ns, sample_ns)
        }
        BuiltIndex::Awit(t) => {
            let t1 = Instant::now();
            let rs = t.query_records(q);
            let candidate_ns = t1.elapsed().as_nanos() as u64;
            let count = rs.total();
            let t2 = Instant::now();
            t.sample_from_records(&rs, s, rng)?;
            let sample_ns = t2.elapsed().as_nanos() as u64;
            (count, candidate_ns, sample_ns)
        }
    };
    Ok(QueryRow {
        query: i,
        l: q.l.to_f64(),
        r: q.r.to_f64(),
        s,
        count,
        candidate_ns,
        sample_ns,
    })
}

/// Range counting through any index, cross-checkable across indexes.
pub fn run_count<C: Coord>(
    data: &Dataset<C>,
    queries: &[QuerySpec<C>],
    kind: IndexKind,
) -> Result<Vec<usize>> {
    let index = BuiltIndex::build(data, kind)?;
    Ok(queries.iter().map(|spec| index.range_count(&spec.q)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateMode {
    /// Immediate structural insertion per interval.
    InsertEach,
    /// Pooled insertion with periodic batch flushes.
    InsertBatch,
    /// Random deletions.
    Delete,
}

impl FromStr for UpdateMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "insert" => Ok(UpdateMode::InsertEach),
            "insert-batch" => Ok(UpdateMode::InsertBatch),
            "delete" => Ok(UpdateMode::Delete),
            other => Err(format!("unknown update mode '{other}'")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UpdateBenchReport {
    pub mode: &'static str,
    pub n_before: usize,
    pub ops: usize,
    pub total_ns: u64,
    pub ns_per_op: f64,
    /// Post-update query results matched a from-scratch build.
    pub verified: bool,
}

/// Applies `ops` updates against an augmented tree built over `data`,
/// then verifies the result against a fresh build on probe queries.
pub fn run_update_bench(
    data: &Dataset<i64>,
    ops: usize,
    mode: UpdateMode,
    seed: u64,
) -> Result<UpdateBenchReport> {
    if mode == UpdateMode::Delete && ops > data.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot delete {ops} of {} intervals",
            data.len()
        )));
    }
    let mut tree = Ait::build(data);
    let mut rng = RngHandle::new(seed);
    let domain = data.domain_max.unwrap_or(1_000_000).max(1);

    let new_intervals: Vec<Interval<i64>> = (0..ops)
        .map(|i| {
            let l = rng.index_below(domain as u64) as i64;
            let len = rng.index_below((domain as u64 / 20).max(1)) as i64;
            Interval::new(l, l + len, (data.len() + i) as u32)
        })
        .collect();
    let mut delete_ids: Vec<u32> = (0..data.len() as u32).collect();
    for i in (1..delete_ids.len()).rev() {
        delete_ids.swap(i, rng.index_below(i as u64 + 1) as usize);
    }
    delete_ids.truncate(ops);

    let t0 = Instant::now();
    match mode {
        UpdateMode::InsertEach => {
            for &x in &new_intervals {
                tree.insert(x)?;
            }
        }
        UpdateMode::InsertBatch => {
            for &x in &new_intervals {
                tree.pool_insert(x)?;
            }
            tree.flush_pool();
        }
        UpdateMode::Delete => {
            for &id in &delete_ids {
                tree.delete(id)?;
            }
        }
    }
    let total_ns = t0.elapsed().as_nanos() as u64;

    let survivors: Vec<Interval<i64>> = tree.live_intervals().copied().collect();
    let fresh = Ait::build_from_intervals(survivors)?;
    let mut verified = true;
    for _ in 0..50 {
        let l = rng.index_below(domain as u64) as i64;
        let q = QueryInterval::new(l, l + rng.index_below((domain as u64 / 10).max(1)) as i64);
        if tree.range_count(&q) != fresh.range_count(&q) {
            verified = false;
            break;
        }
    }
    Ok(UpdateBenchReport {
        mode: match mode {
            UpdateMode::InsertEach => "insert",
            UpdateMode::InsertBatch => "insert-batch",
            UpdateMode::Delete => "delete",
        },
        n_before: data.len(),
        ops,
        total_ns,
        ns_per_op: total_ns as f64 / ops.max(1) as f64,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_intervals, gen_queries, LengthDist};

    fn setup(n: usize, weighted: bool) -> (Dataset<i64>, Vec<QuerySpec<i64>>) {
        let data = gen_intervals(n, 100_000, LengthDist::Uniform, weighted, 1).unwrap();
        let queries = gen_queries(20, 100_000, 0.08, None, 2).unwrap();
        (data, queries)
    }

    #[test]
    fn all_indexes_agree_on_counts() {
        let (data, queries) = setup(2000, true);
        let a = run_count(&data, &queries, IndexKind::ITree).unwrap();
        let b = run_count(&data, &queries, IndexKind::Ait).unwrap();
        let c = run_count(&data, &queries, IndexKind::Aitv).unwrap();
        let d = run_count(&data, &queries, IndexKind::Awit).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
    }

    #[test]
    fn bench_produces_rows_and_summary() {
        let (data, queries) = setup(1000, false);
        let report = run_bench(&data, &queries, IndexKind::Ait, 16, 5).unwrap();
        assert_eq!(report.rows.len(), 20);
        assert_eq!(report.summary.index, "ait");
        assert_eq!(report.summary.rng, RNG_ALGORITHM);
        assert!(report.summary.entries > 0);
        for row in &report.rows {
            assert_eq!(row.s, 16);
        }
        assert!(report.summary.total_ns.median >= report.summary.candidate_ns.min);
    }

    #[test]
    fn awit_bench_needs_weights() {
        let (data, queries) = setup(100, false);
        assert!(matches!(
            run_bench(&data, &queries, IndexKind::Awit, 4, 0).unwrap_err(),
            Error::MissingWeights
        ));
    }

    #[test]
    fn per_query_s_overrides_default() {
        let (data, mut queries) = setup(500, false);
        queries[0].s = Some(99);
        let report = run_bench(&data, &queries, IndexKind::ITree, 10, 1).unwrap();
        assert_eq!(report.rows[0].s, 99);
        assert_eq!(report.rows[1].s, 10);
    }

    #[test]
    fn update_bench_modes_verify() {
        let data = gen_intervals(3000, 100_000, LengthDist::Uniform, false, 4).unwrap();
        for mode in [UpdateMode::InsertEach, UpdateMode::InsertBatch, UpdateMode::Delete] {
            let report = run_update_bench(&data, 500, mode, 9).unwrap();
            assert_eq!(report.ops, 500);
            assert!(report.verified, "mode {:?}", mode);
        }
    }

    #[test]
    fn update_bench_rejects_overdelete() {
        let data = gen_intervals(10, 1000, LengthDist::Uniform, false, 4).unwrap();
        assert!(run_update_bench(&data, 11, UpdateMode::Delete, 0).is_err());
    }

    #[test]
    fn stat_triple() {
        let t = StatTriple::of(&[3.0, 1.0, 2.0]);
        assert_eq!((t.min, t.median, t.max), (1.0, 2.0, 3.0));
        let e = StatTriple::of(&[]);
        assert_eq!(e.median, 0.0);
    }
}
