//! Exhaustive search over all pairs of nonempty subsets of a small box.
//!
//! Subsets are bitmasks over the cells of `{0..side−1}^d`; sumsets are
//! computed here by shift-or on the `(2·side−1)^d` grid, without going
//! through the general set machinery, so the oracle can cross-check it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::group::GroupDescriptor;
use crate::setops::FiniteGroupSet;

/// Upper bound on the number of ordered subset pairs.
pub const MAX_ORACLE_PAIRS: u128 = 1 << 26;

/// Geometry shared by every pair of one sweep.
#[derive(Debug)]
struct Grid {
    d: usize,
    side: usize,
    cells: usize,
    /// Index of each cell inside the sum grid.
    lift: Vec<u32>,
}

impl Grid {
    fn new(d: usize, side: usize) -> Result<Self> {
        if d == 0 || side == 0 {
            return Err(LabError::InvalidArgument("dimension and side must be positive".into()));
        }
        let cells = u32::try_from(d)
            .ok()
            .and_then(|e| side.checked_pow(e))
            .ok_or(LabError::GuardExceeded { pairs: u128::MAX, limit: MAX_ORACLE_PAIRS })?;
        let pairs = if cells >= 64 { u128::MAX } else { ((1u128 << cells) - 1).pow(2) };
        if pairs > MAX_ORACLE_PAIRS {
            return Err(LabError::GuardExceeded { pairs, limit: MAX_ORACLE_PAIRS });
        }
        let wide = 2 * side - 1;
        let lift = (0..cells)
            .map(|c| {
                let (mut rest, mut idx, mut scale) = (c, 0, 1);
                for _ in 0..d {
                    idx += (rest % side) * scale;
                    rest /= side;
                    scale *= wide;
                }
                idx as u32
            })
            .collect();
        Ok(Grid { d, side, cells, lift })
    }

    fn point(&self, cell: usize) -> Vec<i64> {
        let mut rest = cell;
        (0..self.d)
            .map(|_| {
                let x = rest % self.side;
                rest /= self.side;
                x as i64
            })
            .collect()
    }

    fn lifted(&self, mask: u64) -> u128 {
        bits(mask).fold(0, |acc, c| acc | 1u128 << self.lift[c])
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

/// One ordered pair `(A, B)` of nonempty subsets.
#[derive(Debug)]
pub struct SubsetPair<'g> {
    grid: &'g Grid,
    a_mask: u64,
    b_mask: u64,
    b_lifted: u128,
}

impl SubsetPair<'_> {
    pub fn d(&self) -> usize {
        self.grid.d
    }

    pub fn side(&self) -> usize {
        self.grid.side
    }

    pub fn masks(&self) -> (u64, u64) {
        (self.a_mask, self.b_mask)
    }

    pub fn a_len(&self) -> usize {
        self.a_mask.count_ones() as usize
    }

    pub fn b_len(&self) -> usize {
        self.b_mask.count_ones() as usize
    }

    pub fn a_points(&self) -> Vec<Vec<i64>> {
        bits(self.a_mask).map(|c| self.grid.point(c)).collect()
    }

    pub fn b_points(&self) -> Vec<Vec<i64>> {
        bits(self.b_mask).map(|c| self.grid.point(c)).collect()
    }

    pub fn a_set(&self) -> Result<FiniteGroupSet> {
        FiniteGroupSet::from_coords(GroupDescriptor::free_abelian(self.grid.d)?, &self.a_points())
    }

    pub fn b_set(&self) -> Result<FiniteGroupSet> {
        FiniteGroupSet::from_coords(GroupDescriptor::free_abelian(self.grid.d)?, &self.b_points())
    }

    /// `|A+B|`, computed on the sum grid.
    pub fn sumset_size(&self) -> usize {
        bits(self.a_mask)
            .fold(0u128, |acc, c| acc | self.b_lifted << self.grid.lift[c])
            .count_ones() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleCase {
    /// Position in the sweep order (A major, B minor, masks ascending).
    pub rank: u64,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalEntry {
    pub a_len: usize,
    pub b_len: usize,
    pub min_sumset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub d: usize,
    pub side: usize,
    pub pairs: u64,
    pub failures: u64,
    /// Lowest-rank pair on which the predicate failed.
    pub counterexample: Option<OracleCase>,
    /// Smallest `|A+B|` for each pair of sizes.
    pub extremal: Vec<ExtremalEntry>,
}

impl OracleVerdict {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }

    pub fn min_sumset(&self, a_len: usize, b_len: usize) -> Option<usize> {
        self.extremal.iter().find(|e| (e.a_len, e.b_len) == (a_len, b_len)).map(|e| e.min_sumset)
    }
}

struct Partial {
    failures: u64,
    first: Option<u64>,
    mins: Vec<usize>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.failures += other.failures;
        self.first = match (self.first, other.first) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        for (m, o) in self.mins.iter_mut().zip(other.mins) {
            *m = (*m).min(o);
        }
        self
    }
}

/// Runs `predicate` on every ordered pair of nonempty subsets of
/// `{0..side−1}^d`. The predicate returns `true` when the pair satisfies it.
pub fn brute_force_oracle<P>(d: usize, side: usize, predicate: P) -> Result<OracleVerdict>
where
    P: Fn(&SubsetPair) -> bool + Sync,
{
    let grid = Grid::new(d, side)?;
    let full = (1u64 << grid.cells) - 1;
    let stride = grid.cells + 1;
    let empty = || Partial { failures: 0, first: None, mins: vec![usize::MAX; stride * stride] };
    let partial = (1..=full)
        .into_par_iter()
        .map(|a_mask| {
            let mut part = empty();
            let a_len = a_mask.count_ones() as usize;
            for b_mask in 1..=full {
                let pair = SubsetPair { grid: &grid, a_mask, b_mask, b_lifted: grid.lifted(b_mask) };
                let slot = &mut part.mins[a_len * stride + pair.b_len()];
                *slot = (*slot).min(pair.sumset_size());
                if !predicate(&pair) {
                    part.failures += 1;
                    part.first.get_or_insert((a_mask - 1) * full + (b_mask - 1));
                }
            }
            part
        })
        .reduce(empty, Partial::merge);

    let counterexample = partial.first.map(|rank| {
        let pair = SubsetPair {
            grid: &grid,
            a_mask: rank / full + 1,
            b_mask: rank % full + 1,
            b_lifted: 0,
        };
        OracleCase { rank, a: pair.a_points(), b: pair.b_points() }
    });
    let extremal = (1..stride)
        .flat_map(|a_len| (1..stride).map(move |b_len| (a_len, b_len)))
        .map(|(a_len, b_len)| ExtremalEntry { a_len, b_len, min_sumset: partial.mins[a_len * stride + b_len] })
        .collect();
    Ok(OracleVerdict { d, side, pairs: full * full, failures: partial.failures, counterexample, extremal })
}
