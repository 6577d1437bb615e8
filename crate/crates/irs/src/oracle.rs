//! Ground-truth reference implementations used to validate the indexes:
//! linear-scan range search, exact (rational) enumeration of sampling
//! distributions, and a chi-square goodness-of-fit check for empirical
//! frequencies.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use crate::ait::{Ait, RecordSet};
use crate::model::{overlaps, Coord, Interval, QueryInterval};
use crate::sampling::AliasTable;

/// Linear scan; the definitive answer for any range query.
pub fn oracle_range<C: Coord>(data: &[Interval<C>], q: &QueryInterval<C>) -> Vec<Interval<C>> {
    data.iter()
        .filter(|x| !x.pseudo && overlaps(q, *x))
        .copied()
        .collect()
}

pub fn oracle_count<C: Coord>(data: &[Interval<C>], q: &QueryInterval<C>) -> usize {
    data.iter().filter(|x| !x.pseudo && overlaps(q, *x)).count()
}

/// Target distribution for weighted IRS: P(x) = w(x) / W(q intersect X),
/// computed in exact rationals from the (integer-valued) weights.
pub fn oracle_weighted_pmf<C: Coord>(
    data: &[Interval<C>],
    q: &QueryInterval<C>,
) -> BTreeMap<u32, BigRational> {
    let hits = oracle_range(data, q);
    let total: BigRational = hits.iter().map(|x| exact(x.weight)).sum();
    hits.iter()
        .map(|x| (x.id, exact(x.weight) / total.clone()))
        .collect()
}

/// Exact rational from an f64 that is known to hold an integer-valued
/// (or otherwise exactly representable) quantity.
pub fn exact(v: f64) -> BigRational {
    BigRational::from_f64(v).expect("finite weight")
}

/// Enumerates the uniform sampler's exact distribution over a record
/// set: an alias table over run lengths picks a record, then a uniform
/// position within the run picks the interval. Exact rational
/// arithmetic makes the enumeration free of rounding, so equality with
/// 1/|q intersect X| is checkable literally.
pub fn exact_uniform_pmf<C: Coord>(rs: &RecordSet<'_, C>) -> BTreeMap<u32, BigRational> {
    let mut lens: Vec<BigRational> = rs
        .records
        .iter()
        .map(|r| BigRational::from_integer(BigInt::from(r.len())))
        .collect();
    if !rs.pool_hits.is_empty() {
        lens.push(BigRational::from_integer(BigInt::from(rs.pool_hits.len())));
    }
    let mut out = BTreeMap::new();
    if lens.is_empty() {
        return out;
    }
    let alias = AliasTable::build(&lens).expect("run lengths are positive");
    let rec_pmf = alias.pmf();
    for (k, rec) in rs.records.iter().enumerate() {
        let within = BigRational::from_integer(BigInt::from(rec.len())).recip();
        for &id in rec.ids() {
            let e = out.entry(id).or_insert_with(BigRational::zero);
            *e += rec_pmf[k].clone() * within.clone();
        }
    }
    if !rs.pool_hits.is_empty() {
        let k = rs.records.len();
        let within = BigRational::from_integer(BigInt::from(rs.pool_hits.len())).recip();
        for &id in &rs.pool_hits {
            let e = out.entry(id).or_insert_with(BigRational::zero);
            *e += rec_pmf[k].clone() * within.clone();
        }
    }
    out
}

/// Enumerates the weighted sampler's exact distribution. `records`
/// pairs each record's total weight (the prefix-array difference the
/// sampler actually uses) with its members' effective weights (adjacent
/// prefix differences). All inputs are integer-valued f64s, so the
/// rational conversion is exact.
pub fn exact_weighted_pmf(records: &[(f64, Vec<(u32, f64)>)]) -> BTreeMap<u32, BigRational> {
    let mut out = BTreeMap::new();
    if records.is_empty() {
        return out;
    }
    let weights: Vec<BigRational> = records.iter().map(|(w, _)| exact(*w)).collect();
    let alias = AliasTable::build(&weights).expect("record weights are positive");
    let rec_pmf = alias.pmf();
    for (k, (total, members)) in records.iter().enumerate() {
        let denom = exact(*total);
        for &(id, w) in members {
            let e = out.entry(id).or_insert_with(BigRational::zero);
            *e += rec_pmf[k].clone() * (exact(w) / denom.clone());
        }
    }
    out
}

/// Exact distribution of one accepted draw from the bucket sampler:
/// uniform over virtual records, uniform within a bucket, rejecting
/// pseudo and non-overlapping members; conditioning on acceptance
/// renormalizes over the accepted mass.
pub fn exact_accepted_pmf(bucket_members: &[Vec<(u32, bool)>]) -> BTreeMap<u32, BigRational> {
    // bucket_members[k] lists (id, accepted) for every slot of bucket k,
    // all buckets reachable with equal probability.
    let mut raw: BTreeMap<u32, BigRational> = BTreeMap::new();
    let nb = BigRational::from_integer(BigInt::from(bucket_members.len()));
    for members in bucket_members {
        let slot = BigRational::from_integer(BigInt::from(members.len()));
        for &(id, ok) in members {
            if ok {
                let e = raw.entry(id).or_insert_with(BigRational::zero);
                *e += (nb.clone() * slot.clone()).recip();
            }
        }
    }
    let total: BigRational = raw.values().cloned().sum();
    raw.into_iter().map(|(id, p)| (id, p / total.clone())).collect()
}

/// Observed-vs-expected frequencies for a goodness-of-fit check.
pub struct DistributionReport {
    pub support: Vec<u32>,
    pub expected: Vec<f64>,
    pub observed: Vec<u64>,
    pub draws: u64,
}

impl DistributionReport {
    /// Tallies sampled ids against an expected pmf. Draws outside the
    /// support are a hard error: the sampler produced an impossible value.
    pub fn from_samples(expected: &BTreeMap<u32, f64>, sampled_ids: &[u32]) -> Self {
        let support: Vec<u32> = expected.keys().copied().collect();
        let mut counts: BTreeMap<u32, u64> = support.iter().map(|&id| (id, 0)).collect();
        for &id in sampled_ids {
            *counts
                .get_mut(&id)
                .expect("sampled id must be in the expected support") += 1;
        }
        DistributionReport {
            expected: support.iter().map(|id| expected[id]).collect(),
            observed: support.iter().map(|id| counts[id]).collect(),
            support,
            draws: sampled_ids.len() as u64,
        }
    }

    pub fn chi_square(&self) -> f64 {
        let n = self.draws as f64;
        self.expected
            .iter()
            .zip(&self.observed)
            .map(|(&p, &o)| {
                let e = p * n;
                let d = o as f64 - e;
                d * d / e
            })
            .sum()
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.support.len().saturating_sub(1)
    }

    pub fn p_value(&self) -> f64 {
        chi_square_sf(self.chi_square(), self.degrees_of_freedom() as f64)
    }
}

/// True when the empirical frequencies are consistent with the expected
/// pmf at significance level `alpha`.
pub fn chi_square_test(report: &DistributionReport, alpha: f64) -> bool {
    report.degrees_of_freedom() == 0 || report.p_value() > alpha
}

/// Survival function of the chi-square distribution with `df` degrees
/// of freedom: Q(df/2, x/2), the regularized upper incomplete gamma.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    reg_gamma_upper(df / 2.0, x / 2.0)
}

fn reg_gamma_upper(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_contfrac(a, x)
    }
}

// Lower regularized gamma P(a, x) by power series.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// Upper regularized gamma Q(a, x) by Lentz's continued fraction.
fn gamma_q_contfrac(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

// Lanczos approximation (g = 7, n = 9), accurate to ~1e-13.
fn ln_gamma(z: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if z < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Renders a rational pmf as f64 for chi-square use.
pub fn pmf_to_f64(pmf: &BTreeMap<u32, BigRational>) -> BTreeMap<u32, f64> {
    pmf.iter()
        .map(|(&id, p)| {
            let num = p.numer().to_string().parse::<f64>().unwrap_or(f64::MAX);
            let den = p.denom().to_string().parse::<f64>().unwrap_or(f64::MAX);
            (id, num / den)
        })
        .collect()
}

/// Convenience: checks a rational pmf for uniformity over its support.
pub fn is_exactly_uniform(pmf: &BTreeMap<u32, BigRational>) -> bool {
    if pmf.is_empty() {
        return true;
    }
    let n = BigRational::from_integer(BigInt::from(pmf.len()));
    let want = n.recip();
    pmf.values().all(|p| *p == want)
}

/// Exact pmf of the live uniform sampler for a query, records and pool
/// combined.
pub fn exact_ait_pmf<C: Coord>(ait: &Ait<C>, q: &QueryInterval<C>) -> BTreeMap<u32, BigRational> {
    exact_uniform_pmf(&ait.query_records(q))
}
