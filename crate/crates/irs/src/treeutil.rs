//! Construction helpers shared by the baseline interval tree and the
//! augmented variants. Node lists store interval ids; all ordering goes
//! through the backing item slice.

use std::cmp::Ordering;

use crate::model::{Coord, Interval};

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Lower median of the multiset of all 2m endpoints: the element at
/// 0-based rank (M-1)/2 of the sorted multiset.
pub fn lower_median<C: Coord>(items: &[Interval<C>], ids: &[u32]) -> C {
    debug_assert!(!ids.is_empty());
    let mut endpoints: Vec<C> = Vec::with_capacity(ids.len() * 2);
    for &id in ids {
        let x = &items[id as usize];
        endpoints.push(x.l);
        endpoints.push(x.r);
    }
    let k = (endpoints.len() - 1) / 2;
    let (_, med, _) = endpoints.select_nth_unstable_by(k, C::cmp_total);
    *med
}

/// Splits ids into (left: r < c, here: l <= c <= r, right: l > c).
pub fn partition_by_center<C: Coord>(
    items: &[Interval<C>],
    ids: Vec<u32>,
    c: C,
) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let mut left = Vec::new();
    let mut here = Vec::new();
    let mut right = Vec::new();
    for id in ids {
        let x = &items[id as usize];
        if x.r < c {
            left.push(id);
        } else if x.l > c {
            right.push(id);
        } else {
            here.push(id);
        }
    }
    (left, here, right)
}

pub fn sort_ids_by<C: Coord>(
    items: &[Interval<C>],
    ids: &mut [u32],
    cmp: fn(&Interval<C>, &Interval<C>) -> Ordering,
) {
    ids.sort_unstable_by(|&a, &b| cmp(&items[a as usize], &items[b as usize]));
}

/// Three-way merge of id lists already sorted under `cmp`.
pub fn merge3<C: Coord>(
    items: &[Interval<C>],
    a: &[u32],
    b: &[u32],
    c: &[u32],
    cmp: fn(&Interval<C>, &Interval<C>) -> Ordering,
) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len() + c.len());
    let (mut i, mut j, mut k) = (0, 0, 0);
    loop {
        let pick = [
            a.get(i).copied(),
            b.get(j).copied(),
            c.get(k).copied(),
        ]
        .into_iter()
        .enumerate()
        .filter_map(|(src, id)| id.map(|id| (src, id)))
        .min_by(|&(_, x), &(_, y)| cmp(&items[x as usize], &items[y as usize]));
        match pick {
            None => break,
            Some((src, id)) => {
                out.push(id);
                match src {
                    0 => i += 1,
                    1 => j += 1,
                    _ => k += 1,
                }
            }
        }
    }
    out
}

/// Merges `add` (any order) into the sorted `list`. A single id is
/// spliced in place; larger batches are sorted and merged linearly.
pub fn merge_into<C: Coord>(
    items: &[Interval<C>],
    list: &mut Vec<u32>,
    add: &[u32],
    cmp: fn(&Interval<C>, &Interval<C>) -> Ordering,
) {
    if add.is_empty() {
        return;
    }
    if add.len() == 1 {
        let id = add[0];
        let pos = list.partition_point(|&e| {
            cmp(&items[e as usize], &items[id as usize]) == Ordering::Less
        });
        list.insert(pos, id);
        return;
    }
    let mut pending = add.to_vec();
    sort_ids_by(items, &mut pending, cmp);
    let mut merged = Vec::with_capacity(list.len() + pending.len());
    let (mut i, mut j) = (0, 0);
    while i < list.len() && j < pending.len() {
        if cmp(&items[list[i] as usize], &items[pending[j] as usize]) != Ordering::Greater {
            merged.push(list[i]);
            i += 1;
        } else {
            merged.push(pending[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&list[i..]);
    merged.extend_from_slice(&pending[j..]);
    *list = merged;
}

/// Removes the id of `x` from a list sorted under a total order `cmp`.
pub fn list_remove<C: Coord>(
    items: &[Interval<C>],
    list: &mut Vec<u32>,
    x: &Interval<C>,
    cmp: fn(&Interval<C>, &Interval<C>) -> Ordering,
) {
    let pos = list
        .binary_search_by(|&e| cmp(&items[e as usize], x))
        .expect("interval must be present in the list it was routed to");
    list.remove(pos);
}
