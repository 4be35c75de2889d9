//! Tempel'man sequences in finite-rank abelian groups.
//!
//! Given an enumeration `a_1, a_2, …` of the group, the `n`-th set is
//! `T_n × (box of side k(n)+1 along a basis of the free lattice L_n)`, where
//! `T_n` is the finite subgroup generated by the torsion parts of
//! `a_1..a_n` and `L_n` is spanned by their free parts. `k(n)` is the least
//! value making the set `(1 − 1/n)`-invariant under every `a_i` while
//! containing the previous set, so `|F_n⁻¹F_n| ≤ 2^{d(n)} |F_n|`.

use std::collections::BTreeSet;

use crate::error::{LabError, Result};
use crate::group::{GroupDescriptor, GroupElement, Rank};
use crate::lattice::Lattice;
use crate::setops::FiniteGroupSet;

/// Deterministic enumeration of an abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    /// All torsion elements first, then free parts in shells of growing
    /// max-norm (lexicographic inside a shell), each paired with every
    /// residue vector in lexicographic order.
    Shells,
    /// A fixed prefix; indices past its end reuse the identity.
    Explicit(Vec<GroupElement>),
}

impl Enumeration {
    /// First `count` elements.
    pub fn take(&self, desc: &GroupDescriptor, count: usize) -> Result<Vec<GroupElement>> {
        match self {
            Enumeration::Explicit(list) => {
                for g in list {
                    desc.check(g)?;
                }
                Ok(list
                    .iter()
                    .cloned()
                    .chain(std::iter::repeat(desc.identity()))
                    .take(count)
                    .collect())
            }
            Enumeration::Shells => shells(desc, count),
        }
    }
}

fn shells(desc: &GroupDescriptor, count: usize) -> Result<Vec<GroupElement>> {
    let d = desc.free_rank().ok_or_else(|| LabError::NotAbelian(desc.to_string()))?;
    let moduli = desc.moduli();
    let residues = residue_vectors(moduli);
    let mut out = Vec::with_capacity(count);
    let mut h: i64 = 0;
    while out.len() < count {
        if d == 0 && h > 0 {
            out.resize(count, desc.identity());
            break;
        }
        for free in shell(d, h) {
            for r in &residues {
                if out.len() == count {
                    return Ok(out);
                }
                out.push(element(desc, r, free.clone()));
            }
        }
        h += 1;
    }
    Ok(out)
}

fn residue_vectors(moduli: &[u64]) -> Vec<Vec<u64>> {
    let mut all = vec![Vec::new()];
    for &m in moduli {
        all = all
            .into_iter()
            .flat_map(|v| {
                (0..m).map(move |r| {
                    let mut w = v.clone();
                    w.push(r);
                    w
                })
            })
            .collect();
    }
    all
}

/// Vectors of `Z^d` with max-norm exactly `h`, lexicographically.
fn shell(d: usize, h: i64) -> Vec<Vec<i64>> {
    let mut all = vec![Vec::new()];
    for _ in 0..d {
        all = all
            .into_iter()
            .flat_map(|v| {
                (-h..=h).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    all.into_iter()
        .filter(|v| v.iter().map(|x| x.abs()).max().unwrap_or(0) == h)
        .collect()
}

fn element(desc: &GroupDescriptor, residues: &[u64], free: Vec<i64>) -> GroupElement {
    match desc {
        GroupDescriptor::FreeAbelian { .. } => GroupElement::Free(free),
        _ => GroupElement::Mixed { residues: residues.to_vec(), free },
    }
}

/// One index of the construction.
#[derive(Debug, Clone)]
pub struct TempelmanStep {
    pub n: usize,
    /// The enumerated element `a_n`.
    pub element: GroupElement,
    /// `T_n`, the torsion subgroup generated so far.
    pub torsion: FiniteGroupSet,
    /// `d(n) = rank L_n`.
    pub free_rank: usize,
    /// Hermite-normal-form basis of `L_n`, as group elements with zero torsion.
    pub basis: Vec<GroupElement>,
    /// Box corner in basis coordinates; all zero unless containment of the
    /// previous set forces a shift.
    pub offset: Vec<i64>,
    /// `k(n)`: box coordinates run over `offset_j ..= offset_j + k(n)`.
    pub box_size: u64,
    pub set: FiniteGroupSet,
}

/// Output of [`construct_abelian_tempelman`].
#[derive(Debug, Clone)]
pub struct TempelmanConstruction {
    pub descriptor: GroupDescriptor,
    pub steps: Vec<TempelmanStep>,
}

impl TempelmanConstruction {
    pub fn sets(&self) -> Vec<FiniteGroupSet> {
        self.steps.iter().map(|s| s.set.clone()).collect()
    }

    pub fn enumerated(&self) -> Vec<GroupElement> {
        self.steps.iter().map(|s| s.element.clone()).collect()
    }
}

/// Builds `F_1..F_max` for an abelian group of finite rank.
pub fn construct_abelian_tempelman(
    desc: &GroupDescriptor,
    enumeration: &Enumeration,
    max_index: usize,
) -> Result<TempelmanConstruction> {
    if desc.declared_rank() == Rank::Infinite {
        return Err(LabError::InfiniteRank(desc.to_string()));
    }
    let d = desc.free_rank().ok_or_else(|| LabError::NotAbelian(desc.to_string()))?;
    let elems = enumeration.take(desc, max_index)?;
    let moduli = desc.moduli().to_vec();

    let mut steps: Vec<TempelmanStep> = Vec::with_capacity(max_index);
    let mut torsion: BTreeSet<Vec<u64>> = BTreeSet::from([vec![0; moduli.len()]]);
    let mut free_parts: Vec<Vec<i64>> = Vec::new();
    // Previous box as (basis rows, offset, k).
    let mut prev: Option<(Vec<Vec<i64>>, Vec<i64>, u64)> = None;

    for (idx, a) in elems.iter().enumerate() {
        let n = idx + 1;
        close_torsion(&mut torsion, a.torsion_part().unwrap_or(&[]), &moduli);
        free_parts.push(a.free_part().unwrap_or(&[]).to_vec());
        let lattice = Lattice::span(d, &free_parts)?;
        let r = lattice.rank();
        let basis_rows = lattice.basis().to_vec();

        // Translation amounts of a_1..a_n in basis coordinates.
        let moves: Vec<Vec<u64>> = free_parts
            .iter()
            .map(|f| {
                lattice
                    .coordinates(f)
                    .expect("generator lies in its own span")
                    .iter()
                    .map(|c| c.unsigned_abs())
                    .collect()
            })
            .collect();

        // Range of the previous box in the new coordinates.
        let (mut lo, mut hi) = (vec![0i128; r], vec![0i128; r]);
        if let Some((old_rows, old_offset, old_k)) = &prev {
            let mut corner = vec![0i64; d];
            for (c, row) in old_offset.iter().zip(old_rows) {
                for (x, b) in corner.iter_mut().zip(row) {
                    *x = x.checked_add(c.checked_mul(*b).ok_or(LabError::Overflow("box corner"))?)
                        .ok_or(LabError::Overflow("box corner"))?;
                }
            }
            let base = lattice.coordinates(&corner).expect("lattices are nested");
            for j in 0..r {
                lo[j] = i128::from(base[j]);
                hi[j] = i128::from(base[j]);
            }
            for row in old_rows {
                let m = lattice.coordinates(row).expect("lattices are nested");
                for j in 0..r {
                    let span = i128::from(m[j]) * i128::from(*old_k);
                    if span < 0 {
                        lo[j] += span;
                    } else {
                        hi[j] += span;
                    }
                }
            }
        }
        let shift: Vec<i128> = lo.iter().map(|&l| (-l).max(0)).collect();
        let offset: Vec<i64> = shift
            .iter()
            .map(|&s| i64::try_from(-s).map_err(|_| LabError::Overflow("box offset")))
            .collect::<Result<_>>()?;
        let k_contain = hi
            .iter()
            .zip(&shift)
            .map(|(&h, &s)| h + s)
            .max()
            .unwrap_or(0)
            .max(1);
        let k_contain = u64::try_from(k_contain).map_err(|_| LabError::Overflow("box size"))?;
        let k = minimal_box_size(&moves, n, k_contain)?;

        let torsion_set = torsion_subgroup(desc, &torsion)?;
        let set = build_set(desc, &torsion, &basis_rows, &offset, k)?;
        let basis = basis_rows
            .iter()
            .map(|row| element(desc, &vec![0; moduli.len()], row.clone()))
            .collect();
        steps.push(TempelmanStep {
            n,
            element: a.clone(),
            torsion: torsion_set,
            free_rank: r,
            basis,
            offset: offset.clone(),
            box_size: k,
            set,
        });
        prev = Some((basis_rows, offset, k));
    }
    Ok(TempelmanConstruction { descriptor: desc.clone(), steps })
}

fn close_torsion(group: &mut BTreeSet<Vec<u64>>, generator: &[u64], moduli: &[u64]) {
    if group.contains(generator) {
        return;
    }
    // Multiples of the new generator added to every existing element.
    let mut frontier: Vec<Vec<u64>> = group.iter().cloned().collect();
    while let Some(x) = frontier.pop() {
        let y: Vec<u64> = x.iter().zip(generator).zip(moduli).map(|((a, b), m)| (a + b) % m).collect();
        if group.insert(y.clone()) {
            frontier.push(y);
        }
    }
}

fn torsion_subgroup(desc: &GroupDescriptor, group: &BTreeSet<Vec<u64>>) -> Result<FiniteGroupSet> {
    let d = desc.free_rank().unwrap_or(0);
    FiniteGroupSet::new(desc.clone(), group.iter().map(|r| element(desc, r, vec![0; d])))
}

/// Overlap of the box `[0, k]^r` with its translate by a move with
/// coordinate sizes `m` is `Π (k + 1 − m_j)`; this checks `≥ (1 − 1/n)(k+1)^r`.
fn invariant_enough(moves: &[Vec<u64>], n: usize, k: u64) -> bool {
    let side = u128::from(k) + 1;
    moves.iter().all(|m| {
        let mut overlap: u128 = 1;
        let mut volume: u128 = 1;
        for &mj in m {
            overlap = overlap.saturating_mul(side.saturating_sub(u128::from(mj)));
            volume = volume.saturating_mul(side);
        }
        // overlap / volume ≥ (n − 1) / n
        overlap.saturating_mul(n as u128) >= volume.saturating_mul(n as u128 - 1)
    })
}

fn minimal_box_size(moves: &[Vec<u64>], n: usize, lower: u64) -> Result<u64> {
    if invariant_enough(moves, n, lower) {
        return Ok(lower);
    }
    let mut bad = lower;
    let mut good = lower.max(1);
    loop {
        good = good.checked_mul(2).ok_or(LabError::Overflow("box size"))?;
        if invariant_enough(moves, n, good) {
            break;
        }
        bad = good;
    }
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if invariant_enough(moves, n, mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

fn build_set(
    desc: &GroupDescriptor,
    torsion: &BTreeSet<Vec<u64>>,
    basis: &[Vec<i64>],
    offset: &[i64],
    k: u64,
) -> Result<FiniteGroupSet> {
    let d = desc.free_rank().unwrap_or(0);
    let k = i64::try_from(k).map_err(|_| LabError::Overflow("box size"))?;
    let mut points: Vec<Vec<i64>> = vec![vec![0; d]];
    for (row, &o) in basis.iter().zip(offset) {
        let mut next = Vec::with_capacity(points.len() * (k as usize + 1));
        for p in &points {
            for c in o..=o + k {
                let q = p
                    .iter()
                    .zip(row)
                    .map(|(x, b)| c.checked_mul(*b).and_then(|cb| x.checked_add(cb)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or(LabError::Overflow("box point"))?;
                next.push(q);
            }
        }
        points = next;
    }
    let elems = torsion
        .iter()
        .flat_map(|r| points.iter().map(move |p| element(desc, r, p.clone())));
    FiniteGroupSet::new(desc.clone(), elems)
}
