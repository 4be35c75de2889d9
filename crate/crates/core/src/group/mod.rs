//! Concrete groups: free abelian, finite-by-free abelian, the lamplighter
//! group `Z ⋉ ⊕Z/2` and the torsion-free wreath-type group `Z ⋉ ⊕Z`.
//!
//! Elements are plain values in canonical form, so structural equality is
//! group equality. The group law lives on [`GroupDescriptor`], which acts as
//! the context every element is interpreted in.

mod dsl;
mod embedding;

pub use dsl::parse_group_dsl;
pub use embedding::ZdEmbedding;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Abelian rank: the largest `d` with `Z^d` embedded in the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(d) => write!(f, "{d}"),
            Rank::Infinite => f.write_str("infinite"),
        }
    }
}

/// Which concrete group is in play.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupDescriptor {
    /// `Z^d`, `d ≥ 1`.
    FreeAbelian { d: usize },
    /// `Z/m_1 ⊕ … ⊕ Z/m_t ⊕ Z^d` with nonempty `moduli`, each `≥ 2`.
    FiniteByFree { moduli: Vec<u64>, d: usize },
    /// `Z ⋉ ⊕_{i∈Z} Z/2`.
    Lamplighter,
    /// `Z ⋉ ⊕_{i∈Z} Z` with `(n,u)(m,v) = (n+m, u^m + v)`.
    WreathZZ,
}

impl GroupDescriptor {
    pub fn free_abelian(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(LabError::InvalidDescriptor("Z^0 is not a valid group".into()));
        }
        Ok(GroupDescriptor::FreeAbelian { d })
    }

    /// Torsion-by-free abelian group; an empty `moduli` list normalizes to `Z^d`.
    pub fn finite_by_free(moduli: Vec<u64>, d: usize) -> Result<Self> {
        if moduli.is_empty() {
            return Self::free_abelian(d);
        }
        if let Some(m) = moduli.iter().find(|&&m| m < 2) {
            return Err(LabError::InvalidDescriptor(format!("modulus {m} must be at least 2")));
        }
        Ok(GroupDescriptor::FiniteByFree { moduli, d })
    }

    pub fn declared_rank(&self) -> Rank {
        match self {
            GroupDescriptor::FreeAbelian { d } | GroupDescriptor::FiniteByFree { d, .. } => {
                Rank::Finite(*d)
            }
            GroupDescriptor::Lamplighter => Rank::Finite(1),
            GroupDescriptor::WreathZZ => Rank::Infinite,
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(
            self,
            GroupDescriptor::FreeAbelian { .. } | GroupDescriptor::FiniteByFree { .. }
        )
    }

    /// Torsion moduli (empty for non-abelian kinds and for `Z^d`).
    pub fn moduli(&self) -> &[u64] {
        match self {
            GroupDescriptor::FiniteByFree { moduli, .. } => moduli,
            _ => &[],
        }
    }

    /// Free rank of an abelian descriptor.
    pub fn free_rank(&self) -> Option<usize> {
        match self {
            GroupDescriptor::FreeAbelian { d } | GroupDescriptor::FiniteByFree { d, .. } => {
                Some(*d)
            }
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupDescriptor::FreeAbelian { d } => GroupElement::Free(vec![0; *d]),
            GroupDescriptor::FiniteByFree { moduli, d } => GroupElement::Mixed {
                residues: vec![0; moduli.len()],
                free: vec![0; *d],
            },
            GroupDescriptor::Lamplighter => GroupElement::Lamp { shift: 0, lamps: Vec::new() },
            GroupDescriptor::WreathZZ => GroupElement::Wreath { shift: 0, config: Vec::new() },
        }
    }

    /// Checks that `g` is a canonical element of this group.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        let ok = match (self, g) {
            (GroupDescriptor::FreeAbelian { d }, GroupElement::Free(v)) => v.len() == *d,
            (GroupDescriptor::FiniteByFree { moduli, d }, GroupElement::Mixed { residues, free }) => {
                free.len() == *d
                    && residues.len() == moduli.len()
                    && residues.iter().zip(moduli).all(|(r, m)| r < m)
            }
            (GroupDescriptor::Lamplighter, GroupElement::Lamp { lamps, .. }) => {
                lamps.windows(2).all(|w| w[0] < w[1])
            }
            (GroupDescriptor::WreathZZ, GroupElement::Wreath { config, .. }) => {
                config.windows(2).all(|w| w[0].0 < w[1].0) && config.iter().all(|&(_, v)| v != 0)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(LabError::DescriptorMismatch { expected: self.to_string(), found: g.to_string() })
        }
    }

    /// Brings a raw element into canonical form: residues reduced, lamps
    /// toggled (duplicates cancel), configuration entries summed and zeros dropped.
    pub fn canonicalize(&self, g: GroupElement) -> Result<GroupElement> {
        let mismatch = |g: &GroupElement| LabError::DescriptorMismatch {
            expected: self.to_string(),
            found: g.to_string(),
        };
        match (self, g) {
            (GroupDescriptor::FreeAbelian { d }, GroupElement::Free(v)) if v.len() == *d => {
                Ok(GroupElement::Free(v))
            }
            (
                GroupDescriptor::FiniteByFree { moduli, d },
                GroupElement::Mixed { residues, free },
            ) if residues.len() == moduli.len() && free.len() == *d => Ok(GroupElement::Mixed {
                residues: residues.iter().zip(moduli).map(|(r, m)| r % m).collect(),
                free,
            }),
            (GroupDescriptor::Lamplighter, GroupElement::Lamp { shift, mut lamps }) => {
                lamps.sort_unstable();
                let mut out: Vec<i64> = Vec::with_capacity(lamps.len());
                for p in lamps {
                    if out.last() == Some(&p) {
                        out.pop();
                    } else {
                        out.push(p);
                    }
                }
                Ok(GroupElement::Lamp { shift, lamps: out })
            }
            (GroupDescriptor::WreathZZ, GroupElement::Wreath { shift, mut config }) => {
                config.sort_unstable_by_key(|&(p, _)| p);
                let mut out: Vec<(i64, i64)> = Vec::with_capacity(config.len());
                for (p, v) in config {
                    match out.last_mut() {
                        Some(last) if last.0 == p => {
                            last.1 = last.1.checked_add(v).ok_or(LabError::Overflow("configuration value"))?;
                        }
                        _ => out.push((p, v)),
                    }
                }
                out.retain(|&(_, v)| v != 0);
                Ok(GroupElement::Wreath { shift, config: out })
            }
            (_, g) => Err(mismatch(&g)),
        }
    }

    /// Group law. Both operands must be canonical elements of this group.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        self.multiply_unchecked(g, h)
    }

    /// Group law without membership checks; callers guarantee both operands
    /// belong to `self`. Overflow is still reported.
    pub(crate) fn multiply_unchecked(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        match (g, h) {
            (GroupElement::Free(a), GroupElement::Free(b)) => Ok(GroupElement::Free(add_vec(a, b)?)),
            (
                GroupElement::Mixed { residues: ra, free: fa },
                GroupElement::Mixed { residues: rb, free: fb },
            ) => {
                let moduli = self.moduli();
                let residues = ra
                    .iter()
                    .zip(rb)
                    .zip(moduli)
                    .map(|((x, y), m)| (x + y) % m)
                    .collect();
                Ok(GroupElement::Mixed { residues, free: add_vec(fa, fb)? })
            }
            (
                GroupElement::Lamp { shift: n, lamps: u },
                GroupElement::Lamp { shift: m, lamps: v },
            ) => {
                let shift = n.checked_add(*m).ok_or(LabError::Overflow("shift"))?;
                // (u^m)_i = u_{i+m}: every lit position p moves to p - m.
                let moved = shift_positions(u, -i128::from(*m))?;
                Ok(GroupElement::Lamp { shift, lamps: symmetric_difference(&moved, v) })
            }
            (
                GroupElement::Wreath { shift: n, config: u },
                GroupElement::Wreath { shift: m, config: v },
            ) => {
                let shift = n.checked_add(*m).ok_or(LabError::Overflow("shift"))?;
                let moved = shift_config(u, -i128::from(*m), false)?;
                Ok(GroupElement::Wreath { shift, config: add_configs(&moved, v)? })
            }
            _ => Err(LabError::DescriptorMismatch { expected: g.kind_name().into(), found: h.kind_name().into() }),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.inverse_unchecked(g)
    }

    pub(crate) fn inverse_unchecked(&self, g: &GroupElement) -> Result<GroupElement> {
        match g {
            GroupElement::Free(v) => Ok(GroupElement::Free(neg_vec(v)?)),
            GroupElement::Mixed { residues, free } => Ok(GroupElement::Mixed {
                residues: residues
                    .iter()
                    .zip(self.moduli())
                    .map(|(r, m)| (m - r) % m)
                    .collect(),
                free: neg_vec(free)?,
            }),
            // (n,u)^{-1} = (-n, -(u^{-n})); the lit positions move by +n.
            GroupElement::Lamp { shift, lamps } => Ok(GroupElement::Lamp {
                shift: shift.checked_neg().ok_or(LabError::Overflow("shift"))?,
                lamps: shift_positions(lamps, i128::from(*shift))?,
            }),
            GroupElement::Wreath { shift, config } => Ok(GroupElement::Wreath {
                shift: shift.checked_neg().ok_or(LabError::Overflow("shift"))?,
                config: shift_config(config, i128::from(*shift), true)?,
            }),
        }
    }

    /// `g^k` for any integer `k`, by repeated squaring.
    pub fn pow(&self, g: &GroupElement, k: i64) -> Result<GroupElement> {
        self.check(g)?;
        let mut base = if k < 0 { self.inverse_unchecked(g)? } else { g.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply_unchecked(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.multiply_unchecked(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Builds a canonical element from integer coordinates in the abelian
    /// layout: residues first, then free coordinates.
    pub fn abelian_element(&self, coords: &[i64]) -> Result<GroupElement> {
        match self {
            GroupDescriptor::FreeAbelian { d } if coords.len() == *d => {
                Ok(GroupElement::Free(coords.to_vec()))
            }
            GroupDescriptor::FiniteByFree { moduli, d } if coords.len() == moduli.len() + d => {
                let t = moduli.len();
                let residues = coords[..t]
                    .iter()
                    .zip(moduli)
                    .map(|(&c, &m)| c.rem_euclid(m as i64) as u64)
                    .collect();
                Ok(GroupElement::Mixed { residues, free: coords[t..].to_vec() })
            }
            _ => Err(LabError::InvalidArgument(format!(
                "{} coordinates do not describe an element of {self}",
                coords.len()
            ))),
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&dsl::render(self))
    }
}

impl From<GroupDescriptor> for String {
    fn from(d: GroupDescriptor) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for GroupDescriptor {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        parse_group_dsl(&s)
    }
}

impl std::str::FromStr for GroupDescriptor {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        parse_group_dsl(s)
    }
}

/// A group element in canonical form.
///
/// Derived ordering is the canonical order used by finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Free(Vec<i64>),
    Mixed { residues: Vec<u64>, free: Vec<i64> },
    /// `shift` plus the sorted positions of lit lamps.
    Lamp { shift: i64, lamps: Vec<i64> },
    /// `shift` plus a sorted sparse configuration with nonzero values.
    Wreath { shift: i64, config: Vec<(i64, i64)> },
}

impl GroupElement {
    fn kind_name(&self) -> &'static str {
        match self {
            GroupElement::Free(_) => "free-abelian element",
            GroupElement::Mixed { .. } => "finite-by-free element",
            GroupElement::Lamp { .. } => "lamplighter element",
            GroupElement::Wreath { .. } => "wreath element",
        }
    }

    /// Free-part coordinates of an abelian element.
    pub fn free_part(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Free(v) => Some(v),
            GroupElement::Mixed { free, .. } => Some(free),
            _ => None,
        }
    }

    /// Torsion residues of an abelian element (empty for `Z^d`).
    pub fn torsion_part(&self) -> Option<&[u64]> {
        match self {
            GroupElement::Free(_) => Some(&[]),
            GroupElement::Mixed { residues, .. } => Some(residues),
            _ => None,
        }
    }

    /// Shift component of a wreath-type element.
    pub fn shift(&self) -> Option<i64> {
        match self {
            GroupElement::Lamp { shift, .. } | GroupElement::Wreath { shift, .. } => Some(*shift),
            _ => None,
        }
    }
}

/// Set-literal rendering: `1,2` for abelian kinds (residues first),
/// `shift;p1,p2` for the lamplighter and `shift;p1:v1,p2:v2` for the wreath group.
impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Display>(xs: impl Iterator<Item = T>) -> String {
            xs.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            GroupElement::Free(v) => f.write_str(&join(v.iter())),
            GroupElement::Mixed { residues, free } => {
                let all = residues.iter().map(|&r| r as i128).chain(free.iter().map(|&x| x as i128));
                f.write_str(&join(all))
            }
            GroupElement::Lamp { shift, lamps } => write!(f, "{shift};{}", join(lamps.iter())),
            GroupElement::Wreath { shift, config } => {
                write!(f, "{shift};{}", join(config.iter().map(|(p, v)| format!("{p}:{v}"))))
            }
        }
    }
}

fn add_vec(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).ok_or(LabError::Overflow("coordinate")))
        .collect()
}

fn neg_vec(a: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .map(|x| x.checked_neg().ok_or(LabError::Overflow("coordinate")))
        .collect()
}

fn offset(p: i64, by: i128) -> Result<i64> {
    i64::try_from(i128::from(p) + by).map_err(|_| LabError::Overflow("position"))
}

fn shift_positions(ps: &[i64], by: i128) -> Result<Vec<i64>> {
    ps.iter().map(|&p| offset(p, by)).collect()
}

fn shift_config(cfg: &[(i64, i64)], by: i128, negate: bool) -> Result<Vec<(i64, i64)>> {
    cfg.iter()
        .map(|&(p, v)| {
            let v = if negate { v.checked_neg().ok_or(LabError::Overflow("configuration value"))? } else { v };
            Ok((offset(p, by)?, v))
        })
        .collect()
}

fn symmetric_difference(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn add_configs(a: &[(i64, i64)], b: &[(i64, i64)]) -> Result<Vec<(i64, i64)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                let v = a[i].1.checked_add(b[j].1).ok_or(LabError::Overflow("configuration value"))?;
                if v != 0 {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Ok(out)
}
