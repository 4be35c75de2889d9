//! Følner families, Tempel'man and tempered constants, and tempered
//! subsequence extraction.

mod report;
mod tempelman;

pub use report::{nested_box_report, sequence_report, ReportRow, SequenceReport};
pub use tempelman::{construct_abelian_tempelman, Enumeration, TempelmanConstruction, TempelmanStep};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::exact::{ratio, Exact};
use crate::group::{GroupDescriptor, GroupElement};
use crate::setops::{self, parse_element_literal, parse_set_literal, render_set_literal, FiniteGroupSet};

/// Coefficient bound `h(n)` for the wreath-group family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeightRule {
    /// `h(n) = n`.
    #[default]
    Linear,
    /// `h(n) = h` for every `n`; not Følner, but useful for small enumerations.
    Fixed(u64),
}

impl HeightRule {
    pub fn height(&self, n: usize) -> u64 {
        match self {
            HeightRule::Linear => n as u64,
            HeightRule::Fixed(h) => *h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `{0..n}^d`; for finite-by-free groups the whole torsion part times the box.
    Boxes,
    /// `{(k, c) : 0 ≤ k ≤ n, supp c ⊆ [0, n]}`.
    LamplighterStandard,
    /// `{(k, c) : 0 ≤ k ≤ n, supp c ⊆ [0, n], |c_i| ≤ h(n)}`.
    WreathStandard(HeightRule),
    /// The abelian Tempel'man construction along an enumeration.
    AbelianTempelman(Enumeration),
    /// Fixed sets, `F_n = sets[n - 1]`.
    Explicit(Vec<FiniteGroupSet>),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Boxes => "boxes",
            Family::LamplighterStandard | Family::WreathStandard(_) => "standard",
            Family::AbelianTempelman(_) => "tempelman",
            Family::Explicit(_) => "explicit",
        }
    }
}

/// A Følner family in a group, indexed `1..=max_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct FolnerSequenceSpec {
    pub descriptor: GroupDescriptor,
    pub family: Family,
    pub max_index: usize,
}

impl FolnerSequenceSpec {
    pub fn new(descriptor: GroupDescriptor, family: Family, max_index: usize) -> Result<Self> {
        let compatible = match (&family, &descriptor) {
            (Family::Boxes, d) => d.free_rank().is_some_and(|r| r > 0),
            (Family::LamplighterStandard, GroupDescriptor::Lamplighter) => true,
            (Family::WreathStandard(_), GroupDescriptor::WreathZZ) => true,
            (Family::AbelianTempelman(_), d) => d.is_abelian(),
            (Family::Explicit(sets), d) => sets.iter().all(|s| s.descriptor() == d),
            _ => false,
        };
        if !compatible {
            return Err(LabError::IncompatibleFamily {
                family: family.name().to_string(),
                group: descriptor.to_string(),
            });
        }
        if let Family::Explicit(sets) = &family {
            if max_index > sets.len() {
                return Err(LabError::IndexOutOfRange { index: max_index, max: sets.len() });
            }
        }
        if max_index == 0 {
            return Err(LabError::InvalidArgument("max_index must be positive".into()));
        }
        Ok(FolnerSequenceSpec { descriptor, family, max_index })
    }

    /// The standard family for the group: boxes for abelian kinds, the
    /// lamplighter and wreath families otherwise.
    pub fn standard(descriptor: GroupDescriptor, max_index: usize) -> Result<Self> {
        let family = match descriptor {
            GroupDescriptor::Lamplighter => Family::LamplighterStandard,
            GroupDescriptor::WreathZZ => Family::WreathStandard(HeightRule::Linear),
            _ => Family::Boxes,
        };
        Self::new(descriptor, family, max_index)
    }

    /// `F_n`.
    pub fn generate(&self, n: usize) -> Result<FiniteGroupSet> {
        if n > self.max_index {
            return Err(LabError::IndexOutOfRange { index: n, max: self.max_index });
        }
        match &self.family {
            Family::Boxes => abelian_box(&self.descriptor, n),
            Family::LamplighterStandard => lamplighter_standard(n),
            Family::WreathStandard(rule) => wreath_standard(n, rule.height(n)),
            Family::AbelianTempelman(e) => {
                if n == 0 {
                    return Err(LabError::IndexOutOfRange { index: 0, max: self.max_index });
                }
                let c = construct_abelian_tempelman(&self.descriptor, e, n)?;
                Ok(c.steps.into_iter().last().expect("n ≥ 1").set)
            }
            Family::Explicit(sets) => match n.checked_sub(1).and_then(|i| sets.get(i)) {
                Some(s) => Ok(s.clone()),
                None => Err(LabError::IndexOutOfRange { index: n, max: self.max_index }),
            },
        }
    }

    /// `F_1, …, F_max_index`.
    pub fn sequence(&self) -> Result<Vec<FiniteGroupSet>> {
        self.sequence_up_to(self.max_index)
    }

    pub fn sequence_up_to(&self, last: usize) -> Result<Vec<FiniteGroupSet>> {
        if last > self.max_index {
            return Err(LabError::IndexOutOfRange { index: last, max: self.max_index });
        }
        match &self.family {
            Family::AbelianTempelman(e) => {
                Ok(construct_abelian_tempelman(&self.descriptor, e, last)?.sets())
            }
            _ => (1..=last).map(|n| self.generate(n)).collect(),
        }
    }

    pub fn to_record(&self) -> SequenceSpecRecord {
        let mut params = BTreeMap::new();
        match &self.family {
            Family::WreathStandard(HeightRule::Fixed(h)) => {
                params.insert("height".to_string(), serde_json::json!(h));
            }
            Family::AbelianTempelman(Enumeration::Explicit(list)) => {
                let items: Vec<String> = list.iter().map(|g| g.to_string()).collect();
                params.insert("enumeration".to_string(), serde_json::json!(items));
            }
            Family::Explicit(sets) => {
                let rendered: Vec<Vec<String>> = sets
                    .iter()
                    .map(|s| render_set_literal(s).lines().map(str::to_string).collect())
                    .collect();
                params.insert("sets".to_string(), serde_json::json!(rendered));
            }
            _ => {}
        }
        SequenceSpecRecord {
            group: self.descriptor.to_string(),
            family: self.family.name().to_string(),
            params,
            max_index: self.max_index,
        }
    }
}

/// JSON form of a sequence spec: `{group, family, params, max_index}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpecRecord {
    pub group: String,
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    pub max_index: usize,
}

impl SequenceSpecRecord {
    pub fn to_spec(&self) -> Result<FolnerSequenceSpec> {
        let descriptor: GroupDescriptor = self.group.parse()?;
        let bad = |what: &str| LabError::InvalidArgument(format!("params.{what} is malformed"));
        let family = match self.family.to_ascii_lowercase().as_str() {
            "boxes" => Family::Boxes,
            "standard" => match &descriptor {
                GroupDescriptor::Lamplighter => Family::LamplighterStandard,
                GroupDescriptor::WreathZZ => match self.params.get("height") {
                    None => Family::WreathStandard(HeightRule::Linear),
                    Some(v) => Family::WreathStandard(HeightRule::Fixed(v.as_u64().ok_or_else(|| bad("height"))?)),
                },
                _ => Family::Boxes,
            },
            "tempelman" => match self.params.get("enumeration") {
                None => Family::AbelianTempelman(Enumeration::Shells),
                Some(v) => {
                    let items: Vec<String> = serde_json::from_value(v.clone()).map_err(|_| bad("enumeration"))?;
                    let list = items
                        .iter()
                        .map(|s| parse_element_literal(&descriptor, s))
                        .collect::<Result<Vec<_>>>()?;
                    Family::AbelianTempelman(Enumeration::Explicit(list))
                }
            },
            "explicit" => {
                let raw = self.params.get("sets").ok_or_else(|| bad("sets"))?;
                let sets: Vec<Vec<String>> = serde_json::from_value(raw.clone()).map_err(|_| bad("sets"))?;
                let sets = sets
                    .iter()
                    .map(|lines| parse_set_literal(&descriptor, &lines.join("\n")))
                    .collect::<Result<Vec<_>>>()?;
                Family::Explicit(sets)
            }
            other => {
                return Err(LabError::IncompatibleFamily { family: other.to_string(), group: descriptor.to_string() })
            }
        };
        FolnerSequenceSpec::new(descriptor, family, self.max_index)
    }
}

fn abelian_box(desc: &GroupDescriptor, n: usize) -> Result<FiniteGroupSet> {
    let d = desc.free_rank().ok_or_else(|| LabError::NotAbelian(desc.to_string()))?;
    let n = i64::try_from(n).map_err(|_| LabError::Overflow("box side"))?;
    let free = FiniteGroupSet::int_box(d, 0, n)?;
    if let GroupDescriptor::FreeAbelian { .. } = desc {
        return Ok(free);
    }
    let torsion: Vec<Vec<u64>> = desc.moduli().iter().fold(vec![Vec::new()], |acc, &m| {
        acc.into_iter()
            .flat_map(|v| {
                (0..m).map(move |r| {
                    let mut w = v.clone();
                    w.push(r);
                    w
                })
            })
            .collect()
    });
    let elems = torsion.iter().flat_map(|r| {
        free.iter().map(move |g| GroupElement::Mixed {
            residues: r.clone(),
            free: g.free_part().expect("free box").to_vec(),
        })
    });
    FiniteGroupSet::new(desc.clone(), elems)
}

fn lamplighter_standard(n: usize) -> Result<FiniteGroupSet> {
    let width = n + 1;
    if width > 24 {
        return Err(LabError::InvalidArgument(format!("lamplighter set F_{n} is too large to enumerate")));
    }
    let mut elems = Vec::with_capacity(width << width);
    for k in 0..=n as i64 {
        for mask in 0u32..(1 << width) {
            let lamps = (0..width as i64).filter(|&p| mask >> p & 1 == 1).collect();
            elems.push(GroupElement::Lamp { shift: k, lamps });
        }
    }
    FiniteGroupSet::new(GroupDescriptor::Lamplighter, elems)
}

fn wreath_standard(n: usize, height: u64) -> Result<FiniteGroupSet> {
    let h = i64::try_from(height).map_err(|_| LabError::Overflow("height"))?;
    let width = n + 1;
    let per_site = 2 * height as u128 + 1;
    let count = per_site.checked_pow(width as u32).unwrap_or(u128::MAX) * width as u128;
    if count > 1 << 24 {
        return Err(LabError::InvalidArgument(format!("wreath set F_{n} has {count} elements; too large to enumerate")));
    }
    let mut configs: Vec<Vec<(i64, i64)>> = vec![Vec::new()];
    for p in 0..width as i64 {
        configs = configs
            .into_iter()
            .flat_map(|c| {
                (-h..=h).map(move |v| {
                    let mut c = c.clone();
                    if v != 0 {
                        c.push((p, v));
                    }
                    c
                })
            })
            .collect();
    }
    let elems = (0..=n as i64)
        .flat_map(|k| configs.iter().map(move |c| GroupElement::Wreath { shift: k, config: c.clone() }));
    FiniteGroupSet::new(GroupDescriptor::WreathZZ, elems)
}

/// Tempel'man constant `|F⁻¹F| / |F|`.
pub fn tempelman_constant(f: &FiniteGroupSet) -> Result<Exact> {
    if f.is_empty() {
        return Err(LabError::EmptySet);
    }
    let ff = setops::product_len(&setops::inverse_set(f)?, f)?;
    Ok(ratio(ff as u128, f.len() as u128))
}

/// Tempered constants `t_n = |(∪_{i<n} F_i⁻¹) F_n| / |F_n|`, with `t_1 = 1`.
pub fn tempered_constants(seq: &[FiniteGroupSet]) -> Result<Vec<Exact>> {
    let first = seq.first().ok_or(LabError::EmptySet)?;
    let desc = first.descriptor();
    let mut union: Option<FiniteGroupSet> = None;
    let mut out = Vec::with_capacity(seq.len());
    for f in seq {
        setops::same_group(desc, f.descriptor())?;
        if f.is_empty() {
            return Err(LabError::EmptySet);
        }
        let t = match &union {
            None => ratio(1, 1),
            Some(u) => ratio(setops::product_len(u, f)? as u128, f.len() as u128),
        };
        out.push(t);
        let inv = setops::inverse_set(f)?;
        union = Some(match union {
            None => inv,
            Some(u) => u.union(&inv)?,
        });
    }
    Ok(out)
}

/// Indices chosen by [`extract_tempered`] together with the tempered
/// constants of the chosen subsequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub indices: Vec<usize>,
    pub constants: Vec<Exact>,
}

/// Greedy tempered subsequence: `n_1 = 1`, then each next index is the
/// smallest `n > n_j` with `|(∪_{i≤j} F_{n_i}⁻¹) F_n| ≤ C |F_n|`.
///
/// Running past `max_index` yields [`LabError::Exhausted`] with the indices
/// found so far.
pub fn extract_tempered<G>(mut generate: G, max_index: usize, c: f64, count: usize) -> Result<Extraction>
where
    G: FnMut(usize) -> Result<FiniteGroupSet>,
{
    if c.is_nan() || c <= 1.0 {
        return Err(LabError::InvalidArgument(format!("tempered constant must exceed 1, got {c}")));
    }
    if count == 0 {
        return Ok(Extraction { indices: vec![], constants: vec![] });
    }
    if max_index == 0 {
        return Err(LabError::Exhausted { found: vec![], requested: count, max_index });
    }
    let first = generate(1)?;
    let mut union = setops::inverse_set(&first)?;
    let mut indices = vec![1];
    let mut constants = vec![ratio(1, 1)];
    let mut n = 1;
    while indices.len() < count {
        n += 1;
        if n > max_index {
            return Err(LabError::Exhausted { found: indices, requested: count, max_index });
        }
        let f = generate(n)?;
        let size = setops::product_len(&union, &f)?;
        if (size as f64) <= c * f.len() as f64 {
            indices.push(n);
            constants.push(ratio(size as u128, f.len() as u128));
            union = union.union(&setops::inverse_set(&f)?)?;
        }
    }
    Ok(Extraction { indices, constants })
}
