//! Finite subsets of a group and the arithmetic the inequalities are about:
//! products `AB`, inverses `A⁻¹`, translates, and the overlap ratios
//! `|gF ∩ F| / |F|`.

mod dense;
mod fibred;
mod literal;

pub use literal::{parse_element_literal, parse_set_literal, render_set_literal};

use std::collections::HashSet;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::exact::{ratio, to_f64, Exact};
use crate::group::{GroupDescriptor, GroupElement};

/// Which side a group element acts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A finite, duplicate-free set of canonical elements of one group, iterated
/// in canonical order.
#[derive(Debug)]
pub struct FiniteGroupSet {
    descriptor: GroupDescriptor,
    elements: Vec<GroupElement>,
    index: OnceLock<HashSet<GroupElement>>,
}

impl Clone for FiniteGroupSet {
    fn clone(&self) -> Self {
        Self::from_sorted(self.descriptor.clone(), self.elements.clone())
    }
}

impl PartialEq for FiniteGroupSet {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor && self.elements == other.elements
    }
}

impl Eq for FiniteGroupSet {}

impl FiniteGroupSet {
    /// Builds a set from canonical elements; duplicates are dropped.
    pub fn new(descriptor: GroupDescriptor, elements: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let mut elements: Vec<GroupElement> = elements.into_iter().collect();
        for g in &elements {
            descriptor.check(g)?;
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(Self::from_sorted(descriptor, elements))
    }

    pub fn empty(descriptor: GroupDescriptor) -> Self {
        Self::from_sorted(descriptor, Vec::new())
    }

    pub fn singleton(descriptor: GroupDescriptor, g: GroupElement) -> Result<Self> {
        Self::new(descriptor, [g])
    }

    /// Abelian-kind convenience: each entry is residues followed by free coordinates.
    pub fn from_coords(descriptor: GroupDescriptor, points: &[Vec<i64>]) -> Result<Self> {
        let elems = points
            .iter()
            .map(|p| descriptor.abelian_element(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(descriptor, elems)
    }

    /// `{lo..hi}^d` in `Z^d`.
    pub fn int_box(d: usize, lo: i64, hi: i64) -> Result<Self> {
        let desc = GroupDescriptor::free_abelian(d)?;
        let side = (lo..=hi).collect::<Vec<_>>();
        let mut points = vec![Vec::new()];
        for _ in 0..d {
            points = points
                .into_iter()
                .flat_map(|p| {
                    side.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        Ok(Self::from_sorted(desc, points.into_iter().map(GroupElement::Free).collect()))
    }

    pub(crate) fn from_sorted(descriptor: GroupDescriptor, elements: Vec<GroupElement>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        FiniteGroupSet { descriptor, elements, index: OnceLock::new() }
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elements.iter()
    }

    pub fn into_elements(self) -> Vec<GroupElement> {
        self.elements
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index
            .get_or_init(|| self.elements.iter().cloned().collect())
            .contains(g)
    }

    pub fn is_subset(&self, other: &FiniteGroupSet) -> bool {
        self.descriptor == other.descriptor
            && self.len() <= other.len()
            && self.elements.iter().all(|g| other.contains(g))
    }

    pub fn union(&self, other: &FiniteGroupSet) -> Result<FiniteGroupSet> {
        same_group(&self.descriptor, &other.descriptor)?;
        let mut all = self.elements.clone();
        all.extend(other.elements.iter().cloned());
        all.sort_unstable();
        all.dedup();
        Ok(Self::from_sorted(self.descriptor.clone(), all))
    }

    /// `|self ∩ other|`.
    pub fn intersection_len(&self, other: &FiniteGroupSet) -> usize {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.elements.iter().filter(|g| large.contains(g)).count()
    }
}

impl<'a> IntoIterator for &'a FiniteGroupSet {
    type Item = &'a GroupElement;
    type IntoIter = std::slice::Iter<'a, GroupElement>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

pub(crate) fn same_group(a: &GroupDescriptor, b: &GroupDescriptor) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(LabError::DescriptorMismatch { expected: a.to_string(), found: b.to_string() })
    }
}

/// Work per rayon task in the generic product.
const PRODUCT_CHUNK: usize = 64;

/// `AB = {ab : a ∈ A, b ∈ B}`.
pub fn product(a: &FiniteGroupSet, b: &FiniteGroupSet) -> Result<FiniteGroupSet> {
    same_group(&a.descriptor, &b.descriptor)?;
    let desc = &a.descriptor;
    if a.is_empty() || b.is_empty() {
        return Ok(FiniteGroupSet::empty(desc.clone()));
    }
    if let Some(elements) = dense::product(desc, &a.elements, &b.elements)? {
        return Ok(FiniteGroupSet::from_sorted(desc.clone(), elements));
    }

    let partials: Vec<HashSet<GroupElement>> = a
        .elements
        .par_chunks(PRODUCT_CHUNK)
        .map(|chunk| {
            let mut local = HashSet::with_capacity(chunk.len() * b.len());
            for x in chunk {
                for y in &b.elements {
                    local.insert(desc.multiply_unchecked(x, y)?);
                }
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;
    let mut merged: HashSet<GroupElement> = HashSet::new();
    for part in partials {
        if merged.len() < part.len() {
            let small = std::mem::replace(&mut merged, part);
            merged.extend(small);
        } else {
            merged.extend(part);
        }
    }
    let mut elements: Vec<GroupElement> = merged.into_iter().collect();
    elements.par_sort_unstable();
    Ok(FiniteGroupSet::from_sorted(desc.clone(), elements))
}

/// `|AB|`, computed without building `AB` when the factors allow it.
pub fn product_len(a: &FiniteGroupSet, b: &FiniteGroupSet) -> Result<usize> {
    same_group(&a.descriptor, &b.descriptor)?;
    if a.is_empty() || b.is_empty() {
        return Ok(0);
    }
    let fast = match &a.descriptor {
        GroupDescriptor::Lamplighter => fibred::lamplighter_product_len(&a.elements, &b.elements).or_else(|| {
            // |AB| = |B⁻¹A⁻¹|.
            let (ai, bi) = (inverse_set(a).ok()?, inverse_set(b).ok()?);
            fibred::lamplighter_product_len(&bi.elements, &ai.elements)
        }),
        GroupDescriptor::WreathZZ => None,
        desc => dense::product_len(desc, &a.elements, &b.elements),
    };
    match fast {
        Some(n) => Ok(n),
        None => Ok(product(a, b)?.len()),
    }
}

/// `A⁻¹ = {a⁻¹ : a ∈ A}`.
pub fn inverse_set(a: &FiniteGroupSet) -> Result<FiniteGroupSet> {
    let desc = &a.descriptor;
    let mut elements = a
        .elements
        .iter()
        .map(|g| desc.inverse_unchecked(g))
        .collect::<Result<Vec<_>>>()?;
    elements.sort_unstable();
    Ok(FiniteGroupSet::from_sorted(desc.clone(), elements))
}

/// `gA` (left) or `Ag` (right).
pub fn translate(g: &GroupElement, a: &FiniteGroupSet, side: Side) -> Result<FiniteGroupSet> {
    let desc = &a.descriptor;
    desc.check(g)?;
    let mut elements = a
        .elements
        .iter()
        .map(|x| match side {
            Side::Left => desc.multiply_unchecked(g, x),
            Side::Right => desc.multiply_unchecked(x, g),
        })
        .collect::<Result<Vec<_>>>()?;
    elements.sort_unstable();
    Ok(FiniteGroupSet::from_sorted(desc.clone(), elements))
}

/// `|gF ∩ F|` (left) or `|Fg ∩ F|` (right).
pub fn overlap_count(f: &FiniteGroupSet, g: &GroupElement, side: Side) -> Result<usize> {
    let desc = &f.descriptor;
    desc.check(g)?;
    let mut count = 0;
    for x in &f.elements {
        let y = match side {
            Side::Left => desc.multiply_unchecked(g, x)?,
            Side::Right => desc.multiply_unchecked(x, g)?,
        };
        if f.contains(&y) {
            count += 1;
        }
    }
    Ok(count)
}

/// Per-generator overlap ratios of a set and its defect `δ = 1 − min ratio`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub generators: Vec<GroupElement>,
    pub ratios: Vec<Exact>,
    pub defect: Exact,
}

impl InvarianceReport {
    pub fn ratios_f64(&self) -> Vec<f64> {
        self.ratios.iter().map(to_f64).collect()
    }

    pub fn defect_f64(&self) -> f64 {
        to_f64(&self.defect)
    }

    /// Smallest overlap ratio (1 when there are no generators).
    pub fn min_ratio(&self) -> Exact {
        self.ratios.iter().min().cloned().unwrap_or_else(|| ratio(1, 1))
    }
}

impl Serialize for InvarianceReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            generators: Vec<String>,
            ratios: Vec<f64>,
            defect: f64,
        }
        Repr {
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            ratios: self.ratios_f64(),
            defect: self.defect_f64(),
        }
        .serialize(s)
    }
}

/// Exact invariance of `f` under each of `gens`.
pub fn invariance(f: &FiniteGroupSet, gens: &[GroupElement], side: Side) -> Result<InvarianceReport> {
    if f.is_empty() {
        return Err(LabError::EmptySet);
    }
    let n = f.len() as u128;
    let ratios = gens
        .iter()
        .map(|g| Ok(ratio(overlap_count(f, g, side)? as u128, n)))
        .collect::<Result<Vec<_>>>()?;
    let min = ratios.iter().min().cloned().unwrap_or_else(|| ratio(1, 1));
    Ok(InvarianceReport { generators: gens.to_vec(), ratios, defect: ratio(1, 1) - min })
}

/// `(∪_{i} P_i⁻¹) F`, with the empty union read as `{identity}`.
pub fn union_inverse_product(prefix: &[FiniteGroupSet], f: &FiniteGroupSet) -> Result<FiniteGroupSet> {
    let desc = &f.descriptor;
    if prefix.is_empty() {
        return Ok(f.clone());
    }
    let mut inverses: Vec<GroupElement> = Vec::new();
    for p in prefix {
        same_group(desc, &p.descriptor)?;
        inverses.extend(inverse_set(p)?.into_elements());
    }
    inverses.sort_unstable();
    inverses.dedup();
    product(&FiniteGroupSet::from_sorted(desc.clone(), inverses), f)
}

/// `|(∪_{i} P_i⁻¹) F|`.
pub fn union_inverse_product_len(prefix: &[FiniteGroupSet], f: &FiniteGroupSet) -> Result<usize> {
    if prefix.is_empty() {
        return Ok(f.len());
    }
    let mut inverses: Vec<GroupElement> = Vec::new();
    for p in prefix {
        same_group(&f.descriptor, &p.descriptor)?;
        inverses.extend(inverse_set(p)?.into_elements());
    }
    inverses.sort_unstable();
    inverses.dedup();
    product_len(&FiniteGroupSet::from_sorted(f.descriptor.clone(), inverses), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1(points: impl IntoIterator<Item = i64>) -> FiniteGroupSet {
        let pts: Vec<Vec<i64>> = points.into_iter().map(|x| vec![x]).collect();
        FiniteGroupSet::from_coords(GroupDescriptor::free_abelian(1).unwrap(), &pts).unwrap()
    }

    fn lamp(shift: i64, lamps: &[i64]) -> GroupElement {
        GroupElement::Lamp { shift, lamps: lamps.to_vec() }
    }

    #[test]
    fn interval_sumset() {
        let a = z1(0..10);
        assert_eq!(product(&a, &a).unwrap(), z1(0..19));
    }

    #[test]
    fn simplex_sumset_has_six_elements() {
        let z2 = GroupDescriptor::free_abelian(2).unwrap();
        let s = FiniteGroupSet::from_coords(z2, &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(product(&s, &s).unwrap().len(), 6);
    }

    #[test]
    fn product_with_identity_and_empty() {
        let a = z1([3, 7, -2]);
        let e = z1([0]);
        assert_eq!(product(&a, &e).unwrap(), a);
        let empty = FiniteGroupSet::empty(a.descriptor().clone());
        assert!(product(&a, &empty).unwrap().is_empty());
    }

    #[test]
    fn product_rejects_mismatched_groups() {
        let a = z1([0]);
        let b = FiniteGroupSet::singleton(GroupDescriptor::Lamplighter, lamp(0, &[])).unwrap();
        assert!(matches!(product(&a, &b), Err(LabError::DescriptorMismatch { .. })));
    }

    #[test]
    fn inverse_sets() {
        assert_eq!(inverse_set(&z1([0, 1, 2])).unwrap(), z1([-2, -1, 0]));
        let l = FiniteGroupSet::singleton(GroupDescriptor::Lamplighter, lamp(1, &[0])).unwrap();
        assert_eq!(inverse_set(&l).unwrap().elements(), &[lamp(-1, &[1])]);
        let empty = FiniteGroupSet::empty(GroupDescriptor::Lamplighter);
        assert!(inverse_set(&empty).unwrap().is_empty());
    }

    #[test]
    fn translates() {
        let b = FiniteGroupSet::int_box(2, 0, 2).unwrap();
        let t = translate(&GroupElement::Free(vec![1, 1]), &b, Side::Left).unwrap();
        assert_eq!(t, FiniteGroupSet::int_box(2, 1, 3).unwrap());
        let id = b.descriptor().identity();
        assert_eq!(translate(&id, &b, Side::Right).unwrap(), b);

        let l = FiniteGroupSet::new(GroupDescriptor::Lamplighter, [lamp(0, &[0]), lamp(1, &[])]).unwrap();
        let g = lamp(1, &[0]);
        assert_eq!(translate(&g, &l, Side::Left).unwrap().len(), 2);
        assert_eq!(translate(&g, &l, Side::Right).unwrap().len(), 2);
    }

    #[test]
    fn invariance_of_intervals_and_boxes() {
        let f = z1(0..10);
        let r = invariance(&f, &[GroupElement::Free(vec![1])], Side::Left).unwrap();
        assert_eq!(r.ratios, vec![ratio(9, 10)]);
        assert_eq!(r.defect, ratio(1, 10));
        assert_eq!(r.defect_f64(), 0.1);

        let b = FiniteGroupSet::int_box(2, 0, 9).unwrap();
        let gens = [GroupElement::Free(vec![1, 0]), GroupElement::Free(vec![0, 1])];
        assert_eq!(invariance(&b, &gens, Side::Left).unwrap().defect, ratio(1, 10));

        let id = b.descriptor().identity();
        assert_eq!(invariance(&b, &[id], Side::Right).unwrap().ratios, vec![ratio(1, 1)]);
    }

    #[test]
    fn invariance_of_empty_set_is_an_error() {
        let empty = FiniteGroupSet::empty(GroupDescriptor::free_abelian(1).unwrap());
        assert_eq!(invariance(&empty, &[], Side::Left).unwrap_err(), LabError::EmptySet);
    }

    #[test]
    fn union_inverse_products() {
        let f = z1(0..10);
        assert_eq!(union_inverse_product(&[z1(0..5)], &f).unwrap(), z1(-4..10));
        assert_eq!(union_inverse_product(&[], &f).unwrap(), f);
        let got = union_inverse_product(&[z1(0..2), z1(0..3)], &z1(0..4)).unwrap();
        assert_eq!(got, z1(-2..4));
        assert_eq!(got.len(), 6);
    }

    #[test]
    fn finite_by_free_products_wrap_residues() {
        let g = GroupDescriptor::finite_by_free(vec![3], 1).unwrap();
        let a = FiniteGroupSet::from_coords(g.clone(), &[vec![2, 0], vec![1, 5]]).unwrap();
        let b = FiniteGroupSet::from_coords(g.clone(), &[vec![2, 1]]).unwrap();
        let expect = FiniteGroupSet::from_coords(g, &[vec![1, 1], vec![0, 6]]).unwrap();
        assert_eq!(product(&a, &b).unwrap(), expect);
    }
}
