use super::{GroupDescriptor, GroupElement, Rank};
use crate::error::{LabError, Result};
use crate::lattice::Lattice;

/// Coefficient box searched for relations when an embedding is built.
const RELATION_BOX: i64 = 3;

/// A distinguished copy of `Z^d` inside a group, given by `d` commuting images
/// of the standard generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZdEmbedding {
    descriptor: GroupDescriptor,
    images: Vec<GroupElement>,
}

impl ZdEmbedding {
    /// Validates that `images` commute pairwise and satisfy no nontrivial
    /// relation with coefficients in `[-3, 3]^d`.
    pub fn new(descriptor: GroupDescriptor, images: Vec<GroupElement>) -> Result<Self> {
        if images.is_empty() {
            return Err(LabError::InvalidEmbedding("an embedding needs at least one image".into()));
        }
        for g in &images {
            descriptor.check(g)?;
        }
        for (i, a) in images.iter().enumerate() {
            for b in &images[i + 1..] {
                if descriptor.multiply_unchecked(a, b)? != descriptor.multiply_unchecked(b, a)? {
                    return Err(LabError::InvalidEmbedding(format!("images {a} and {b} do not commute")));
                }
            }
        }
        let emb = ZdEmbedding { descriptor, images };
        emb.check_no_small_relation()?;
        Ok(emb)
    }

    /// The canonical copy of `Z^d`: free unit vectors for abelian kinds, the
    /// shift generator for the lamplighter, and the configuration units at
    /// positions `0..d` for the wreath group.
    pub fn standard(descriptor: &GroupDescriptor, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(LabError::InvalidEmbedding("d must be positive".into()));
        }
        if let Rank::Finite(r) = descriptor.declared_rank() {
            if d > r {
                return Err(LabError::RankExceeded { requested: d, declared: r });
            }
        }
        let images = (0..d)
            .map(|i| match descriptor {
                GroupDescriptor::FreeAbelian { d: n } => {
                    let mut v = vec![0; *n];
                    v[i] = 1;
                    GroupElement::Free(v)
                }
                GroupDescriptor::FiniteByFree { moduli, d: n } => {
                    let mut free = vec![0; *n];
                    free[i] = 1;
                    GroupElement::Mixed { residues: vec![0; moduli.len()], free }
                }
                GroupDescriptor::Lamplighter => GroupElement::Lamp { shift: 1, lamps: vec![] },
                GroupDescriptor::WreathZZ => GroupElement::Wreath { shift: 0, config: vec![(i as i64, 1)] },
            })
            .collect();
        Self::new(descriptor.clone(), images)
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    /// `e_1^{c_1} ⋯ e_d^{c_d}`.
    pub fn element_at(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.dim() {
            return Err(LabError::InvalidArgument(format!(
                "{} coordinates for a rank-{} embedding",
                coords.len(),
                self.dim()
            )));
        }
        let mut acc = self.descriptor.identity();
        for (g, &c) in self.images.iter().zip(coords) {
            if c != 0 {
                acc = self.descriptor.multiply_unchecked(&acc, &self.descriptor.pow(g, c)?)?;
            }
        }
        Ok(acc)
    }

    /// Integer coordinates of `g` in the embedded `Z^d`.
    ///
    /// Returns [`LabError::NotInSubgroup`] when `g` is outside the image.
    pub fn coordinates(&self, g: &GroupElement) -> Result<Vec<i64>> {
        self.descriptor.check(g)?;
        let not_in = || LabError::NotInSubgroup(g.to_string());
        let candidate = match &self.descriptor {
            GroupDescriptor::FreeAbelian { d } | GroupDescriptor::FiniteByFree { d, .. } => {
                let gens: Vec<Vec<i64>> = self
                    .images
                    .iter()
                    .map(|e| e.free_part().expect("abelian image").to_vec())
                    .collect();
                solve_in_basis(*d, &gens, g.free_part().expect("abelian element"))
            }
            GroupDescriptor::Lamplighter | GroupDescriptor::WreathZZ => {
                let shifts: Vec<i64> = self.images.iter().map(|e| e.shift().unwrap_or(0)).collect();
                if shifts.iter().all(|&s| s == 0) {
                    self.solve_zero_shift(g)
                } else if self.dim() == 1 {
                    let s = g.shift().unwrap_or(0);
                    (s % shifts[0] == 0).then(|| vec![s / shifts[0]])
                } else {
                    return Err(LabError::InvalidEmbedding(
                        "no coordinate solver for several images with nonzero shift".into(),
                    ));
                }
            }
        };
        let coords = candidate.ok_or_else(not_in)?;
        // Torsion and non-abelian parts are confirmed by rebuilding the element.
        if &self.element_at(&coords)? == g {
            Ok(coords)
        } else {
            Err(not_in())
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.coordinates(g).is_ok()
    }

    fn solve_zero_shift(&self, g: &GroupElement) -> Option<Vec<i64>> {
        if g.shift() != Some(0) {
            return None;
        }
        let entries = |e: &GroupElement| -> Vec<(i64, i64)> {
            match e {
                GroupElement::Lamp { lamps, .. } => lamps.iter().map(|&p| (p, 1)).collect(),
                GroupElement::Wreath { config, .. } => config.clone(),
                _ => Vec::new(),
            }
        };
        let mut positions: Vec<i64> = self.images.iter().flat_map(entries).map(|(p, _)| p).collect();
        positions.sort_unstable();
        positions.dedup();
        let dense = |e: &GroupElement| -> Option<Vec<i64>> {
            let mut v = vec![0; positions.len()];
            for (p, x) in entries(e) {
                v[positions.binary_search(&p).ok()?] = x;
            }
            Some(v)
        };
        let gens: Vec<Vec<i64>> = self.images.iter().map(dense).collect::<Option<_>>()?;
        solve_in_basis(positions.len(), &gens, &dense(g)?)
    }

    fn check_no_small_relation(&self) -> Result<()> {
        let d = self.dim();
        let mut coeffs = vec![-RELATION_BOX; d];
        let identity = self.descriptor.identity();
        loop {
            if coeffs.iter().any(|&c| c != 0) && self.element_at(&coeffs)? == identity {
                return Err(LabError::InvalidEmbedding(format!("relation with coefficients {coeffs:?}")));
            }
            let mut i = 0;
            loop {
                if i == d {
                    return Ok(());
                }
                if coeffs[i] < RELATION_BOX {
                    coeffs[i] += 1;
                    break;
                }
                coeffs[i] = -RELATION_BOX;
                i += 1;
            }
        }
    }
}

/// Solves `Σ x_j gens[j] = v` over the integers for independent `gens`.
fn solve_in_basis(ambient: usize, gens: &[Vec<i64>], v: &[i64]) -> Option<Vec<i64>> {
    let lattice = Lattice::span(ambient, gens).ok()?;
    if lattice.rank() != gens.len() {
        return None;
    }
    // Work in HNF coordinates, where the system becomes square.
    let target = lattice.coordinates(v)?;
    let gen_coords: Vec<Vec<i64>> = gens.iter().map(|g| lattice.coordinates(g)).collect::<Option<_>>()?;
    solve_square(&gen_coords, &target)
}

/// Solves `x · M = t` for square integer `M` with nonzero determinant,
/// returning `None` when the solution is not integral.
fn solve_square(m: &[Vec<i64>], t: &[i64]) -> Option<Vec<i64>> {
    let n = m.len();
    // Fraction-free Gaussian elimination on the transposed system M^T x = t.
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|r| {
            let mut row: Vec<i128> = (0..n).map(|c| i128::from(m[c][r])).collect();
            row.push(i128::from(t[r]));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let (f, p) = (a[r][col], a[col][col]);
                #[allow(clippy::needless_range_loop)]
                for c in 0..=n {
                    a[r][c] = a[r][c].checked_mul(p)?.checked_sub(a[col][c].checked_mul(f)?)?;
                }
                let g = a[r].iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
                if g > 1 {
                    a[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
    }
    (0..n)
        .map(|r| {
            let (num, den) = (a[r][n], a[r][r]);
            (num % den == 0).then(|| i64::try_from(num / den).ok()).flatten()
        })
        .collect()
}
