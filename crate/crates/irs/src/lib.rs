//! Independent range sampling over interval data.
//!
//! Given a set of closed intervals and a query interval q, an IRS query
//! returns s independent samples from the intervals overlapping q --
//! uniformly, or proportionally to per-interval weights -- without
//! materializing the full result set. The indexes here trade build cost
//! and space for per-sample cost:
//!
//! * [`itree::ITree`] -- plain interval tree; search-then-sample baseline.
//! * [`ait::Ait`] -- augmented interval tree; near-logarithmic uniform
//!   sampling, plus insertions (immediate, pooled, batched) and deletions.
//! * [`aitv::Aitv`] -- bucketed variant with smaller footprint; uniform
//!   sampling by rejection over virtual intervals.
//! * [`awit::Awit`] -- weighted variant; per-node cumulative weight
//!   arrays give weight-proportional sampling, static data only.

pub mod ait;
pub mod aitv;
pub mod awit;
pub mod bench;
pub mod gen;
pub mod io;
pub mod itree;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod sampling;
pub mod treeutil;
