//! Integer lattices in `Z^n` via row-style Hermite normal form.

use crate::error::{LabError, Result};

/// A sublattice of `Z^n` given by a basis in Hermite normal form.
///
/// Rows are in echelon form with strictly increasing pivot columns, positive
/// pivots, and entries above each pivot reduced into `[0, pivot)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    ambient: usize,
    rows: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl Lattice {
    /// The lattice spanned by `generators` (each of length `ambient`).
    pub fn span(ambient: usize, generators: &[Vec<i64>]) -> Result<Self> {
        let mut m: Vec<Vec<i128>> = generators
            .iter()
            .map(|g| {
                if g.len() != ambient {
                    return Err(LabError::InvalidArgument(format!(
                        "generator of length {} in Z^{ambient}",
                        g.len()
                    )));
                }
                Ok(g.iter().map(|&x| i128::from(x)).collect())
            })
            .collect::<Result<_>>()?;

        let mut rank = 0usize;
        let mut pivots = Vec::new();
        for col in 0..ambient {
            // Euclid on column `col` among rows rank.. until one nonzero remains.
            loop {
                let mut best: Option<usize> = None;
                for r in rank..m.len() {
                    if m[r][col] != 0 && best.is_none_or(|b| m[r][col].abs() < m[b][col].abs()) {
                        best = Some(r);
                    }
                }
                let Some(b) = best else { break };
                m.swap(rank, b);
                let mut done = true;
                for r in rank + 1..m.len() {
                    if m[r][col] != 0 {
                        let q = m[r][col] / m[rank][col];
                        let (head, tail) = m.split_at_mut(r);
                        sub_row(&mut tail[0], &head[rank], q)?;
                        if tail[0][col] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if rank < m.len() && m[rank][col] != 0 {
                if m[rank][col] < 0 {
                    for x in m[rank].iter_mut() {
                        *x = -*x;
                    }
                }
                let p = m[rank][col];
                for r in 0..rank {
                    let q = m[r][col].div_euclid(p);
                    if q != 0 {
                        let (head, tail) = m.split_at_mut(rank);
                        sub_row(&mut head[r], &tail[0], q)?;
                    }
                }
                pivots.push(col);
                rank += 1;
            }
        }
        m.truncate(rank);
        let rows = m
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| i64::try_from(x).map_err(|_| LabError::Overflow("lattice basis")))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(Lattice { ambient, rows, pivots })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Integer coordinates of `v` in the basis, or `None` if `v` is outside the lattice.
    pub fn coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        if v.len() != self.ambient {
            return None;
        }
        let mut rest: Vec<i128> = v.iter().map(|&x| i128::from(x)).collect();
        let mut coords = Vec::with_capacity(self.rank());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let piv = i128::from(row[p]);
            if rest[p] % piv != 0 {
                return None;
            }
            let c = rest[p] / piv;
            for (x, &b) in rest.iter_mut().zip(row) {
                *x -= c * i128::from(b);
            }
            coords.push(i64::try_from(c).ok()?);
        }
        rest.iter().all(|&x| x == 0).then_some(coords)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.coordinates(v).is_some()
    }
}

fn sub_row(target: &mut [i128], source: &[i128], q: i128) -> Result<()> {
    for (t, &s) in target.iter_mut().zip(source) {
        *t = q
            .checked_mul(s)
            .and_then(|qs| t.checked_sub(qs))
            .ok_or(LabError::Overflow("hermite normal form"))?;
    }
    Ok(())
}
