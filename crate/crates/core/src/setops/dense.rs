//! Bit-grid product for abelian kinds with small bounding boxes.
//!
//! Cells are laid out torsion-major, then free coordinates in row-major
//! order, so scanning set bits yields elements in canonical order.

use crate::error::Result;
use crate::group::{GroupDescriptor, GroupElement};

const MAX_CELLS: u128 = 1 << 27;
const MAX_TORSION: u64 = 256;

struct Layout {
    moduli: Vec<u64>,
    lo: Vec<i64>,
    strides: Vec<u64>,
    free_cells: u64,
}

pub(super) fn product(
    desc: &GroupDescriptor,
    a: &[GroupElement],
    b: &[GroupElement],
) -> Result<Option<Vec<GroupElement>>> {
    let Some((layout, bits)) = fill(desc, a, b) else { return Ok(None) };
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let bit = word.trailing_zeros() as u64;
            word &= word - 1;
            out.push(decode(desc, &layout, (w as u64) * 64 + bit));
        }
    }
    Ok(Some(out))
}

/// `|AB|` without materializing the elements.
pub(super) fn product_len(desc: &GroupDescriptor, a: &[GroupElement], b: &[GroupElement]) -> Option<usize> {
    let (_, bits) = fill(desc, a, b)?;
    Some(bits.iter().map(|w| w.count_ones() as usize).sum())
}

fn fill(desc: &GroupDescriptor, a: &[GroupElement], b: &[GroupElement]) -> Option<(Layout, Vec<u64>)> {
    let d = desc.free_rank()?;
    let moduli = desc.moduli().to_vec();
    let torsion_cells: u64 = moduli.iter().product();
    if torsion_cells > MAX_TORSION {
        return None;
    }
    let ((lo_a, hi_a), (lo_b, hi_b)) = (bounds(a, d)?, bounds(b, d)?);
    let mut lo = Vec::with_capacity(d);
    let mut extents = Vec::with_capacity(d);
    for j in 0..d {
        let (Some(l), Some(h)) = (lo_a[j].checked_add(lo_b[j]), hi_a[j].checked_add(hi_b[j])) else {
            // Let the generic path report the overflow.
            return None;
        };
        lo.push(l);
        extents.push((i128::from(h) - i128::from(l) + 1) as u128);
    }
    let free_cells_wide = extents.iter().try_fold(1u128, |acc, &e| acc.checked_mul(e));
    let free_cells_wide = free_cells_wide?;
    let total = free_cells_wide * u128::from(torsion_cells);
    let work = (a.len() as u128) * (b.len() as u128);
    if total > MAX_CELLS || total > 16 * work + 4096 {
        return None;
    }

    let mut strides = vec![1u64; d];
    for j in (0..d.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * extents[j + 1] as u64;
    }
    let layout = Layout { moduli, lo, strides, free_cells: free_cells_wide as u64 };

    let encode = |set: &[GroupElement], own_lo: &[i64]| -> Vec<(usize, u64)> {
        set.iter()
            .map(|g| {
                let t = torsion_index(g.torsion_part().unwrap_or(&[]), &layout.moduli);
                let f = g.free_part().unwrap_or(&[]);
                let off = f
                    .iter()
                    .zip(own_lo)
                    .zip(&layout.strides)
                    .map(|((&x, &l), &s)| (x - l) as u64 * s)
                    .sum::<u64>();
                (t, off)
            })
            .collect()
    };
    // Iterate over the smaller side; the larger one becomes a bitmap per torsion class.
    let (outer, inner) = if a.len() <= b.len() {
        (encode(a, &lo_a), encode(b, &lo_b))
    } else {
        (encode(b, &lo_b), encode(a, &lo_a))
    };

    let tc = torsion_cells as usize;
    let add_table: Vec<usize> = (0..tc * tc)
        .map(|k| torsion_sum(k / tc, k % tc, &layout.moduli))
        .collect();

    let mut classes: Vec<Vec<u64>> = vec![Vec::new(); tc];
    for &(t, f) in &inner {
        let words = &mut classes[t];
        let w = (f >> 6) as usize;
        if words.len() <= w {
            words.resize(w + 1, 0);
        }
        words[w] |= 1 << (f & 63);
    }

    let cells = total as usize;
    let mut bits = vec![0u64; cells.div_ceil(64)];
    let mut sorted = outer;
    sorted.sort_unstable();
    let mut i = 0;
    while i < sorted.len() {
        let (ta, start) = sorted[i];
        let mut len = 1;
        while i + len < sorted.len() && sorted[i + len] == (ta, start + len as u64) {
            len += 1;
        }
        for (tb, class) in classes.iter().enumerate().filter(|(_, c)| !c.is_empty()) {
            let block = add_table[ta * tc + tb] as u64 * layout.free_cells;
            or_shifted(&mut bits, &dilate(class, len as u64), block + start);
        }
        i += len;
    }
    Some((layout, bits))
}

/// `dst |= src << shift`, dropping bits past the end of `dst`.
fn or_shifted(dst: &mut [u64], src: &[u64], shift: u64) {
    let (w, r) = ((shift >> 6) as usize, shift & 63);
    for (i, &word) in src.iter().enumerate().filter(|(_, &x)| x != 0) {
        if let Some(slot) = dst.get_mut(w + i) {
            *slot |= word << r;
        }
        if r > 0 {
            if let Some(slot) = dst.get_mut(w + i + 1) {
                *slot |= word >> (64 - r);
            }
        }
    }
}

/// `src | src<<1 | … | src<<(len−1)`, by doubling.
fn dilate(src: &[u64], len: u64) -> Vec<u64> {
    let mut acc = src.to_vec();
    acc.resize(src.len() + (len as usize).div_ceil(64) + 1, 0);
    let mut covered = 1;
    while covered < len {
        let step = covered.min(len - covered);
        let prev = acc.clone();
        or_shifted(&mut acc, &prev, step);
        covered += step;
    }
    acc
}

fn bounds(set: &[GroupElement], d: usize) -> Option<(Vec<i64>, Vec<i64>)> {
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for g in set {
        for (j, &x) in g.free_part()?.iter().enumerate() {
            lo[j] = lo[j].min(x);
            hi[j] = hi[j].max(x);
        }
    }
    Some((lo, hi))
}

fn torsion_index(residues: &[u64], moduli: &[u64]) -> usize {
    residues.iter().zip(moduli).fold(0usize, |acc, (&r, &m)| acc * m as usize + r as usize)
}

fn torsion_digits(mut idx: usize, moduli: &[u64]) -> Vec<u64> {
    let mut out = vec![0; moduli.len()];
    for (slot, &m) in out.iter_mut().zip(moduli).rev() {
        *slot = (idx % m as usize) as u64;
        idx /= m as usize;
    }
    out
}

fn torsion_sum(x: usize, y: usize, moduli: &[u64]) -> usize {
    let (dx, dy) = (torsion_digits(x, moduli), torsion_digits(y, moduli));
    let sum: Vec<u64> = dx.iter().zip(&dy).zip(moduli).map(|((a, b), m)| (a + b) % m).collect();
    torsion_index(&sum, moduli)
}

fn decode(desc: &GroupDescriptor, layout: &Layout, cell: u64) -> GroupElement {
    let t = (cell / layout.free_cells) as usize;
    let mut rest = cell % layout.free_cells;
    let free: Vec<i64> = layout
        .strides
        .iter()
        .zip(&layout.lo)
        .map(|(&s, &l)| {
            let digit = rest / s;
            rest %= s;
            l + digit as i64
        })
        .collect();
    match desc {
        GroupDescriptor::FreeAbelian { .. } => GroupElement::Free(free),
        _ => GroupElement::Mixed { residues: torsion_digits(t, &layout.moduli), free },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn naive(desc: &GroupDescriptor, a: &[GroupElement], b: &[GroupElement]) -> Vec<GroupElement> {
        let set: BTreeSet<_> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| desc.multiply(x, y).unwrap()))
            .collect();
        set.into_iter().collect()
    }

    #[test]
    fn matches_naive_product_with_torsion() {
        let desc = GroupDescriptor::finite_by_free(vec![2, 3], 2).unwrap();
        let pts = |v: &[[i64; 4]]| -> Vec<GroupElement> {
            let mut e: Vec<_> = v.iter().map(|p| desc.abelian_element(p).unwrap()).collect();
            e.sort();
            e.dedup();
            e
        };
        let a = pts(&[[0, 0, 0, 0], [1, 2, -3, 1], [1, 1, 4, -2], [0, 2, 0, 5]]);
        let b = pts(&[[1, 0, 1, 1], [0, 1, -1, 0], [1, 2, 2, 2]]);
        let fast = product(&desc, &a, &b).unwrap().expect("dense path applies");
        assert_eq!(fast, naive(&desc, &a, &b));
    }

    #[test]
    fn matches_naive_product_in_z3() {
        let desc = GroupDescriptor::free_abelian(3).unwrap();
        let mut a: Vec<_> = (0..20)
            .map(|i: i64| GroupElement::Free(vec![i % 3 - 1, (i * 7) % 5, -(i % 4)]))
            .collect();
        a.sort();
        a.dedup();
        let fast = product(&desc, &a, &a).unwrap().unwrap();
        assert_eq!(fast, naive(&desc, &a, &a));
    }

    #[test]
    fn sparse_sets_fall_back() {
        let desc = GroupDescriptor::free_abelian(1).unwrap();
        let a = vec![GroupElement::Free(vec![0]), GroupElement::Free(vec![1_000_000_000])];
        assert!(product(&desc, &a, &a).unwrap().is_none());
    }

    proptest! {
        #[test]
        fn runs_and_torsion_match_naive(
            a in prop::collection::btree_set((0i64..3, -4i64..70, -2i64..3), 1..40),
            b in prop::collection::btree_set((0i64..3, -70i64..4, -3i64..2), 1..40),
        ) {
            let desc = GroupDescriptor::finite_by_free(vec![3], 2).unwrap();
            let to = |s: &BTreeSet<(i64, i64, i64)>| -> Vec<GroupElement> {
                let v: BTreeSet<_> = s.iter().map(|&(t, x, y)| desc.abelian_element(&[t, x, y]).unwrap()).collect();
                v.into_iter().collect()
            };
            let (a, b) = (to(&a), to(&b));
            if let Some(fast) = product(&desc, &a, &b).unwrap() {
                prop_assert_eq!(fast, naive(&desc, &a, &b));
            }
        }
    }
}
