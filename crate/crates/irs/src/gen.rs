//! Deterministic synthetic data: interval datasets with several length
//! distributions and query workloads parameterized by extent (query
//! length as a fraction of the domain). Everything derives from one
//! seed, so repeated runs are byte-identical.

use crate::io::QuerySpec;
use crate::model::{Dataset, Error, QueryInterval, Result};
use crate::rng::RngHandle;
use crate::sampling::build_cumsum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthDist {
    /// Length uniform on [0, domain/20].
    Uniform,
    /// Zipf-distributed length rank: mostly short intervals, a heavy
    /// tail up to domain/20.
    Zipf,
    /// Left endpoints concentrate around a handful of cluster centers.
    Clustered,
}

impl std::str::FromStr for LengthDist {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(LengthDist::Uniform),
            "zipf" => Ok(LengthDist::Zipf),
            "clustered" => Ok(LengthDist::Clustered),
            other => Err(format!("unknown distribution '{other}'")),
        }
    }
}

const ZIPF_RANKS: usize = 1000;
const CLUSTERS: usize = 10;

/// Integer-coordinate dataset on [0, domain]. Weighted datasets draw
/// integer weights uniformly from [1, 100].
pub fn gen_intervals(
    n: usize,
    domain: i64,
    dist: LengthDist,
    weighted: bool,
    seed: u64,
) -> Result<Dataset<i64>> {
    if domain < 1 {
        return Err(Error::InvalidArgument(format!(
            "domain must be positive, got {domain}"
        )));
    }
    let mut rng = RngHandle::new(seed);
    let max_len = (domain / 20).max(1);

    // Inverse-transform table for the zipf rank draw.
    let zipf = if dist == LengthDist::Zipf {
        let weights: Vec<f64> = (1..=ZIPF_RANKS).map(|k| 1.0 / k as f64).collect();
        Some(build_cumsum(&weights)?)
    } else {
        None
    };
    let centers: Vec<i64> = (0..CLUSTERS)
        .map(|_| rng.index_below(domain as u64 + 1) as i64)
        .collect();

    let mut spans = Vec::with_capacity(n);
    for _ in 0..n {
        let len = match dist {
            LengthDist::Uniform | LengthDist::Clustered => {
                rng.index_below(max_len as u64 + 1) as i64
            }
            LengthDist::Zipf => {
                let cum = zipf.as_ref().expect("built above");
                let rank = cum.sample_range(1, ZIPF_RANKS, &mut rng)?;
                ((rank as i64) * max_len / ZIPF_RANKS as i64).max(0)
            }
        };
        let l = match dist {
            LengthDist::Clustered => {
                let c = centers[rng.index_below(CLUSTERS as u64) as usize];
                let spread = (domain / 50).max(1);
                (c + rng.index_below(2 * spread as u64 + 1) as i64 - spread)
                    .clamp(0, domain)
            }
            _ => rng.index_below((domain - len).max(1) as u64 + 1) as i64,
        };
        let r = (l + len).min(domain);
        let w = if weighted {
            (1 + rng.index_below(100)) as f64
        } else {
            1.0
        };
        spans.push((l, r, w));
    }
    Dataset::from_spans(spans, weighted)
}

/// `m` queries of fixed extent: r - l = extent * domain, left endpoints
/// uniform over the feasible range. `s` is attached to every query when
/// given.
pub fn gen_queries(
    m: usize,
    domain: i64,
    extent: f64,
    s: Option<usize>,
    seed: u64,
) -> Result<Vec<QuerySpec<i64>>> {
    if domain < 1 {
        return Err(Error::InvalidArgument(format!(
            "domain must be positive, got {domain}"
        )));
    }
    if !(0.0..=1.0).contains(&extent) {
        return Err(Error::InvalidArgument(format!(
            "extent must be in [0, 1], got {extent}"
        )));
    }
    let mut rng = RngHandle::new(seed);
    let span = (extent * domain as f64).round() as i64;
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let l = rng.index_below((domain - span).max(1) as u64 + 1) as i64;
        out.push(QuerySpec {
            q: QueryInterval::new(l, (l + span).min(domain)),
            s,
        });
    }
    Ok(out)
}
