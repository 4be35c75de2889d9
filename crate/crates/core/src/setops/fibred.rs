//! Product sizes in the lamplighter group when one factor is cube-fibred.
//!
//! Call `B` cube-fibred over an interval `I` when, for every shift `m` that
//! occurs in `B`, the lamp configurations of `B` with shift `m` are exactly the
//! `2^{|I|}` configurations supported in `I`. Then
//! `(n,u)·B_m = {(n+m, w ⊕ v) : supp v ⊆ I}` with `w = u^m`, which is the set
//! of configurations agreeing with `w` off `I`. So `|AB|` is `2^{|I|}` times
//! the number of distinct pairs `(n+m, w restricted to the complement of I)`.

use std::collections::{BTreeMap, HashSet};

use crate::group::GroupElement;

/// Widest interval a fibre may span.
const MAX_SPAN: i64 = 60;

/// The shifts of a cube-fibred set and its interval (`None` when every
/// fibre is `{∅}`).
struct Fibres {
    shifts: Vec<i64>,
    interval: Option<(i64, i64)>,
}

fn fibres(set: &[GroupElement]) -> Option<Fibres> {
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for g in set {
        let GroupElement::Lamp { shift, lamps } = g else { return None };
        *counts.entry(*shift).or_default() += 1;
        if let (Some(&first), Some(&last)) = (lamps.first(), lamps.last()) {
            lo = lo.min(first);
            hi = hi.max(last);
        }
    }
    let interval = (lo <= hi).then_some((lo, hi));
    let width = interval.map_or(0, |(lo, hi)| hi - lo + 1);
    if width > MAX_SPAN {
        return None;
    }
    // Supports lie in the interval and elements are distinct, so a full count
    // means the fibre is the whole cube.
    let full = 1u64 << width;
    counts.values().all(|&c| c == full).then(|| Fibres { shifts: counts.into_keys().collect(), interval })
}

/// `|AB|` for lamplighter sets when `B` is cube-fibred.
pub(super) fn lamplighter_product_len(a: &[GroupElement], b: &[GroupElement]) -> Option<usize> {
    let fib = fibres(b)?;
    let (lo, hi) = fib.interval.unwrap_or((1, 0));
    let mut seen: HashSet<(i64, Vec<i64>)> = HashSet::with_capacity(a.len() * fib.shifts.len());
    for g in a {
        let GroupElement::Lamp { shift, lamps } = g else { return None };
        for &m in &fib.shifts {
            let outside: Vec<i64> = lamps
                .iter()
                .map(|&p| p.checked_sub(m))
                .collect::<Option<Vec<_>>>()?
                .into_iter()
                .filter(|p| !(lo..=hi).contains(p))
                .collect();
            seen.insert((shift.checked_add(m)?, outside));
        }
    }
    seen.len().checked_mul(1usize << (hi - lo + 1).max(0))
}
