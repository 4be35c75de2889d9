use rayon::prelude::*;
use serde::Serialize;

use super::{tempelman_constant, tempered_constants};
use crate::error::{LabError, Result};
use crate::exact::{checked_pow, ratio, to_f64, Exact};
use crate::group::ZdEmbedding;
use crate::setops::{self, FiniteGroupSet, Side};

/// Metrics of one index of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub size: u128,
    /// `c_n = |F_n⁻¹F_n| / |F_n|`.
    pub tempelman: Exact,
    /// `t_n = |(∪_{i<n} F_i⁻¹) F_n| / |F_n|`.
    pub tempered: Exact,
    /// `|F_n| / |F_{n-1}|`; absent for the first row.
    pub growth: Option<Exact>,
    /// Defect against the embedding generators, left multiplication.
    pub defect: Exact,
}

/// Per-index sizes and constants of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceReport {
    pub group: String,
    pub dim: usize,
    pub rows: Vec<ReportRow>,
}

#[derive(Serialize)]
struct RowRecord {
    n: usize,
    size: u128,
    c_n: f64,
    t_n: f64,
    ratio: Option<f64>,
    defect: f64,
}

impl From<&ReportRow> for RowRecord {
    fn from(r: &ReportRow) -> Self {
        RowRecord {
            n: r.n,
            size: r.size,
            c_n: to_f64(&r.tempelman),
            t_n: to_f64(&r.tempered),
            ratio: r.growth.as_ref().map(to_f64),
            defect: to_f64(&r.defect),
        }
    }
}

impl Serialize for SequenceReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            group: &'a str,
            dim: usize,
            rows: Vec<RowRecord>,
        }
        Repr { group: &self.group, dim: self.dim, rows: self.rows.iter().map(RowRecord::from).collect() }.serialize(s)
    }
}

impl SequenceReport {
    /// CSV with columns `n,size,c_n,t_n,ratio,defect`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(RowRecord::from(row)).map_err(|e| LabError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Io(e.to_string()))
    }

    pub fn max_tempelman(&self) -> Option<&Exact> {
        self.rows.iter().map(|r| &r.tempelman).max()
    }

    pub fn max_tempered(&self) -> Option<&Exact> {
        self.rows.iter().map(|r| &r.tempered).max()
    }
}

/// Computes every report field by enumeration.
pub fn sequence_report(seq: &[FiniteGroupSet], embedding: &ZdEmbedding) -> Result<SequenceReport> {
    let first = seq.first().ok_or(LabError::EmptySet)?;
    let desc = first.descriptor();
    setops::same_group(desc, embedding.descriptor())?;
    for f in seq {
        setops::same_group(desc, f.descriptor())?;
    }
    let tempelman: Vec<Exact> = seq.par_iter().map(tempelman_constant).collect::<Result<_>>()?;
    let tempered = tempered_constants(seq)?;
    let defects: Vec<Exact> = seq
        .par_iter()
        .map(|f| Ok(setops::invariance(f, embedding.images(), Side::Left)?.defect))
        .collect::<Result<_>>()?;
    let rows = (0..seq.len())
        .map(|i| ReportRow {
            n: i + 1,
            size: seq[i].len() as u128,
            tempelman: tempelman[i],
            tempered: tempered[i],
            growth: (i > 0).then(|| ratio(seq[i].len() as u128, seq[i - 1].len() as u128)),
            defect: defects[i],
        })
        .collect();
    Ok(SequenceReport { group: desc.to_string(), dim: embedding.dim(), rows })
}

/// Closed-form report for the boxes `{0..L_n}^d` in `Z^d`, measured against
/// the standard generators: `|F| = (L+1)^d`, `|F⁻¹F| = (2L+1)^d`,
/// `|(∪_{i<n} F_i⁻¹) F_n| = (L_n + M_n + 1)^d` with `M_n = max_{i<n} L_i`,
/// and defect `1/(L+1)`.
pub fn nested_box_report(d: usize, sides: &[u64]) -> Result<SequenceReport> {
    let exp = u32::try_from(d).map_err(|_| LabError::Overflow("dimension"))?;
    let pow = |b: u128| checked_pow(b, exp).ok_or(LabError::Overflow("box size"));
    let mut rows = Vec::with_capacity(sides.len());
    let mut prev_max: Option<u128> = None;
    let mut prev_size: Option<u128> = None;
    for (i, &side) in sides.iter().enumerate() {
        let l = u128::from(side);
        let size = pow(l + 1)?;
        let tempered = match prev_max {
            None => ratio(1, 1),
            Some(m) => ratio(pow(l + m + 1)?, size),
        };
        rows.push(ReportRow {
            n: i + 1,
            size,
            tempelman: ratio(pow(2 * l + 1)?, size),
            tempered,
            growth: prev_size.map(|p| ratio(size, p)),
            defect: ratio(1, l + 1),
        });
        prev_max = Some(prev_max.map_or(l, |m| m.max(l)));
        prev_size = Some(size);
    }
    Ok(SequenceReport { group: format!("Z^{d}"), dim: d, rows })
}
