//! Concrete instances of the sumset and product-set inequalities.
//!
//! Every check returns an [`InequalityReport`]: an exact integer left-hand
//! side, a floating-point right-hand side, and a verdict. A right-hand side
//! that is not positive makes the instance vacuous; vacuous instances count
//! as holding but are flagged so they never inflate pass statistics.

mod oracle;

pub use oracle::{brute_force_oracle, OracleCase, OracleVerdict, SubsetPair, MAX_ORACLE_PAIRS};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::exact::{ratio, to_f64, Exact};
use crate::folner::{sequence_report, SequenceReport};
use crate::group::{GroupDescriptor, ZdEmbedding};
use crate::setops::{self, render_set_literal, FiniteGroupSet, Side};

/// Slack applied when comparing the integer LHS with a real RHS.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Statement {
    /// `|A+B| ≥ (1−2d²δ)(|A|^{1/d}+|B|^{1/d})^d` for `(1−δ)`-invariant `A ⊆ Z^d`.
    #[serde(rename = "DBM")]
    Dbm,
    /// Same bound for `|AB|` and `|BA|` with `A` inside an embedded `Z^d`.
    #[serde(rename = "LEM_AB")]
    LemAb,
    /// `|F⁻¹F| ≥ 2^d(1−2d²√δ)(1−d√δ)|F|`.
    #[serde(rename = "LEM_FF")]
    LemFf,
    /// `|F₁⁻¹F₂| ≥ 2^d(1−2d²√δ)(1−d√δ) min(|F₁|,|F₂|)`.
    #[serde(rename = "LEM_F1F2")]
    LemF1f2,
    /// Per-index form of the `2^d` lower bound on Tempel'man constants.
    #[serde(rename = "LOWER_BOUND")]
    LowerBound,
    /// `|F_n| ≥ (2^{d−2}/C)|F_{n−1}|` past the invariance threshold.
    #[serde(rename = "GROWTH")]
    Growth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Vacuous,
    Fails,
}

/// One checked inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub statement: Statement,
    pub lhs: u128,
    pub rhs: f64,
    #[serde(rename = "delta")]
    pub delta_used: f64,
    pub d: usize,
    pub holds: bool,
    pub vacuous: bool,
    pub inputs_digest: String,
}

impl InequalityReport {
    fn new(statement: Statement, lhs: u128, rhs: f64, delta: f64, d: usize, digest: String) -> Self {
        let vacuous = rhs <= 0.0;
        InequalityReport {
            statement,
            lhs,
            rhs,
            delta_used: delta,
            d,
            holds: vacuous || lhs as f64 >= rhs - SLACK,
            vacuous,
            inputs_digest: digest,
        }
    }

    pub fn verdict(&self) -> Verdict {
        match (self.holds, self.vacuous) {
            (_, true) => Verdict::Vacuous,
            (true, false) => Verdict::Holds,
            (false, false) => Verdict::Fails,
        }
    }

    /// `lhs − rhs`.
    pub fn slack(&self) -> f64 {
        self.lhs as f64 - self.rhs
    }
}

/// Content hash of everything a report depends on.
struct InputDigest(Sha256);

impl InputDigest {
    fn new(statement: Statement) -> Self {
        let mut h = Sha256::new();
        h.update(format!("{statement:?}\n"));
        InputDigest(h)
    }

    fn text(mut self, label: &str, value: &str) -> Self {
        self.0.update(format!("{label}={}\n", value.len()));
        self.0.update(value);
        self
    }

    fn set(self, label: &str, s: &FiniteGroupSet) -> Self {
        let desc = s.descriptor().to_string();
        self.text(&format!("{label}.group"), &desc).text(label, &render_set_literal(s))
    }

    fn embedding(self, e: &ZdEmbedding) -> Self {
        let images: Vec<String> = e.images().iter().map(|g| g.to_string()).collect();
        self.text("embedding", &images.join("|"))
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

/// `(1−2d²δ)(a^{1/d} + b^{1/d})^d`.
pub fn sumset_bound(d: usize, delta: f64, a: usize, b: usize) -> f64 {
    // Written as t·(1 + (s/t)^{1/d})^d so that equal sizes give exactly 2^d·a.
    let (s, t) = (a.min(b) as f64, a.max(b) as f64);
    let spread = t * (1.0 + (s / t).powf(1.0 / d as f64)).powi(d as i32);
    (1.0 - 2.0 * (d * d) as f64 * delta) * spread
}

/// The unmodified lattice analogue of Brunn–Minkowski, `(a^{1/d} + b^{1/d})^d`.
pub fn naive_bm_bound(d: usize, a: usize, b: usize) -> f64 {
    sumset_bound(d, 0.0, a, b)
}

/// `2^d(1−2d²√δ)(1−d√δ)`, with the sign forced negative when either factor is
/// negative so that out-of-range δ always yields a vacuous instance.
pub fn product_lemma_coefficient(d: usize, delta: f64) -> f64 {
    let root = delta.sqrt();
    let f1 = 1.0 - 2.0 * (d * d) as f64 * root;
    let f2 = 1.0 - d as f64 * root;
    let raw = 2f64.powi(d as i32) * f1 * f2;
    if f1 < 0.0 || f2 < 0.0 {
        -raw.abs()
    } else {
        raw
    }
}

fn defect(f: &FiniteGroupSet, embedding: &ZdEmbedding) -> Result<Exact> {
    Ok(setops::invariance(f, embedding.images(), Side::Left)?.defect)
}

/// Discrete Brunn–Minkowski for `A, B ⊆ Z^d`, with δ measured from `A`.
pub fn check_discrete_bm(a: &FiniteGroupSet, b: &FiniteGroupSet) -> Result<InequalityReport> {
    let d = match a.descriptor() {
        GroupDescriptor::FreeAbelian { d } => *d,
        other => return Err(LabError::InvalidArgument(format!("discrete Brunn–Minkowski needs Z^d, got {other}"))),
    };
    setops::same_group(a.descriptor(), b.descriptor())?;
    if a.is_empty() || b.is_empty() {
        return Err(LabError::EmptySet);
    }
    let embedding = ZdEmbedding::standard(a.descriptor(), d)?;
    let delta = to_f64(&defect(a, &embedding)?);
    let lhs = setops::product_len(a, b)? as u128;
    let rhs = sumset_bound(d, delta, a.len(), b.len());
    let digest = InputDigest::new(Statement::Dbm).set("A", a).set("B", b).finish();
    Ok(InequalityReport::new(Statement::Dbm, lhs, rhs, delta, d, digest))
}

/// Product bound for `A` inside the embedded `Z^d` and arbitrary `B`.
/// Returns the reports for `AB` and `BA`, in that order.
pub fn check_lemma_abelian_product(
    a: &FiniteGroupSet,
    b: &FiniteGroupSet,
    embedding: &ZdEmbedding,
) -> Result<[InequalityReport; 2]> {
    setops::same_group(a.descriptor(), b.descriptor())?;
    setops::same_group(a.descriptor(), embedding.descriptor())?;
    if a.is_empty() || b.is_empty() {
        return Err(LabError::EmptySet);
    }
    for x in a {
        embedding.coordinates(x)?;
    }
    let d = embedding.dim();
    let delta = to_f64(&defect(a, embedding)?);
    let rhs = sumset_bound(d, delta, a.len(), b.len());
    let digest = InputDigest::new(Statement::LemAb).set("A", a).set("B", b).embedding(embedding).finish();
    let ab = setops::product_len(a, b)? as u128;
    let ba = setops::product_len(b, a)? as u128;
    Ok([
        InequalityReport::new(Statement::LemAb, ab, rhs, delta, d, digest.clone()),
        InequalityReport::new(Statement::LemAb, ba, rhs, delta, d, digest),
    ])
}

/// `|F⁻¹F|` against `2^d(1−2d²√δ)(1−d√δ)|F|`.
pub fn check_lemma_same_size(f: &FiniteGroupSet, embedding: &ZdEmbedding) -> Result<InequalityReport> {
    setops::same_group(f.descriptor(), embedding.descriptor())?;
    if f.is_empty() {
        return Err(LabError::EmptySet);
    }
    let d = embedding.dim();
    let delta = to_f64(&defect(f, embedding)?);
    let lhs = setops::product_len(&setops::inverse_set(f)?, f)? as u128;
    let rhs = product_lemma_coefficient(d, delta) * f.len() as f64;
    let digest = InputDigest::new(Statement::LemFf).set("F", f).embedding(embedding).finish();
    Ok(InequalityReport::new(Statement::LemFf, lhs, rhs, delta, d, digest))
}

/// `|F₁⁻¹F₂|` against `2^d(1−2d²√δ)(1−d√δ) min(|F₁|,|F₂|)`, δ the larger defect.
pub fn check_lemma_diff_size(
    f1: &FiniteGroupSet,
    f2: &FiniteGroupSet,
    embedding: &ZdEmbedding,
) -> Result<InequalityReport> {
    setops::same_group(f1.descriptor(), f2.descriptor())?;
    setops::same_group(f1.descriptor(), embedding.descriptor())?;
    if f1.is_empty() || f2.is_empty() {
        return Err(LabError::EmptySet);
    }
    let d = embedding.dim();
    let delta = to_f64(&defect(f1, embedding)?.max(defect(f2, embedding)?));
    let lhs = setops::product_len(&setops::inverse_set(f1)?, f2)? as u128;
    let rhs = product_lemma_coefficient(d, delta) * f1.len().min(f2.len()) as f64;
    let digest = InputDigest::new(Statement::LemF1f2)
        .set("F1", f1)
        .set("F2", f2)
        .embedding(embedding)
        .finish();
    Ok(InequalityReport::new(Statement::LemF1f2, lhs, rhs, delta, d, digest))
}

/// Per-index lower bound check together with `max_n c_n` versus `2^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundCheck {
    pub reports: Vec<InequalityReport>,
    pub max_constant: f64,
    pub target: f64,
}

impl LowerBoundCheck {
    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(|r| r.holds)
    }
}

/// `c_n ≥ 2^d(1−2d²√δ_n)(1−d√δ_n)` at every index of a sequence, read from its report.
pub fn lower_bound_from_report(report: &SequenceReport) -> Result<LowerBoundCheck> {
    let d = report.dim;
    let mut reports = Vec::with_capacity(report.rows.len());
    for row in &report.rows {
        let delta = to_f64(&row.defect);
        let ff = row.tempelman * ratio(row.size, 1);
        if *ff.denom() != 1 {
            return Err(LabError::InvalidArgument(format!("row {} has a non-integral |F⁻¹F|", row.n)));
        }
        let rhs = product_lemma_coefficient(d, delta) * row.size as f64;
        let digest = InputDigest::new(Statement::LowerBound)
            .text("group", &report.group)
            .text("row", &format!("{}:{}:{}:{}", row.n, row.size, row.tempelman, row.defect))
            .finish();
        reports.push(InequalityReport::new(Statement::LowerBound, *ff.numer(), rhs, delta, d, digest));
    }
    let max_constant = report.max_tempelman().map(to_f64).unwrap_or(0.0);
    Ok(LowerBoundCheck { reports, max_constant, target: 2f64.powi(d as i32) })
}

/// Lower-bound check computed by enumeration.
pub fn check_lower_bound_claim(seq: &[FiniteGroupSet], embedding: &ZdEmbedding) -> Result<LowerBoundCheck> {
    lower_bound_from_report(&sequence_report(seq, embedding)?)
}

/// Outcome of the growth implication along a sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    /// Invariance threshold `1/(16d²)`.
    pub threshold: f64,
    /// First index from which every defect is within the threshold.
    pub first_invariant: Option<usize>,
    pub c: f64,
    pub d: usize,
    /// One report per index past `first_invariant`.
    pub reports: Vec<InequalityReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    NotApplicable,
    Vacuous,
    Holds,
    Fails,
}

impl GrowthCheck {
    /// Whether `d ≤ 2 + log₂ C`, which voids the implication outright.
    pub fn is_vacuous(&self) -> bool {
        (self.d as f64) <= 2.0 + self.c.log2()
    }

    pub fn verdict(&self) -> GrowthVerdict {
        if self.is_vacuous() {
            GrowthVerdict::Vacuous
        } else if self.first_invariant.is_none() {
            GrowthVerdict::NotApplicable
        } else if self.reports.iter().any(|r| !r.holds) {
            GrowthVerdict::Fails
        } else {
            GrowthVerdict::Holds
        }
    }
}

/// Evaluates `|F_n| ≥ (2^{d−2}/C)|F_{n−1}|` for every index past the point
/// where all defects are at most `1/(16d²)`. The instance is vacuous unless
/// `d > 2 + log₂ C`.
pub fn growth_from_report(report: &SequenceReport, c: f64) -> Result<GrowthCheck> {
    let d = report.dim;
    if d == 0 {
        return Err(LabError::InvalidArgument("embedding dimension must be positive".into()));
    }
    if let Some(t) = report.max_tempered() {
        if to_f64(t) > c + SLACK {
            return Err(LabError::InvalidArgument(format!(
                "C = {c} is below the measured tempered constant {}",
                to_f64(t)
            )));
        }
    }
    let threshold = ratio(1, 16 * (d as u128) * (d as u128));
    let first_invariant = report
        .rows
        .iter()
        .rposition(|r| r.defect > threshold)
        .map_or(Some(0), |i| (i + 1 < report.rows.len()).then_some(i + 1))
        .map(|i| report.rows[i].n);
    let vacuous = (d as f64) <= 2.0 + c.log2();
    let factor = 2f64.powi(d as i32 - 2) / c;
    let mut reports = Vec::new();
    if let Some(start) = first_invariant {
        for pair in report.rows.windows(2).filter(|w| w[0].n >= start) {
            let (prev, cur) = (&pair[0], &pair[1]);
            let rhs = factor * prev.size as f64;
            let delta = to_f64(&prev.defect.max(cur.defect));
            let digest = InputDigest::new(Statement::Growth)
                .text("group", &report.group)
                .text("pair", &format!("{}:{}:{}:{}", prev.n, prev.size, cur.n, cur.size))
                .text("C", &c.to_string())
                .finish();
            let mut r = InequalityReport::new(Statement::Growth, cur.size, rhs, delta, d, digest);
            r.vacuous = vacuous;
            r.holds = vacuous || cur.size as f64 >= rhs - SLACK;
            reports.push(r);
        }
    }
    Ok(GrowthCheck { threshold: to_f64(&threshold), first_invariant, c, d, reports })
}

/// Growth implication computed by enumeration.
pub fn check_growth_implication(seq: &[FiniteGroupSet], c: f64, embedding: &ZdEmbedding) -> Result<GrowthCheck> {
    growth_from_report(&sequence_report(seq, embedding)?, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folner::nested_box_report;

    fn z(d: usize) -> GroupDescriptor {
        GroupDescriptor::free_abelian(d).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn dbm_on_boxes() {
        let a = FiniteGroupSet::int_box(2, 0, 9).unwrap();
        let b = FiniteGroupSet::int_box(2, 0, 4).unwrap();
        let r = check_discrete_bm(&a, &b).unwrap();
        // A+B = {0..13}², so 14² points.
        assert_eq!(r.lhs, 196);
        assert!(close(r.delta_used, 0.1));
        assert!(close(r.rhs, 45.0));
        assert_eq!(r.verdict(), Verdict::Holds);
    }

    #[test]
    fn dbm_on_simplex_is_vacuous_while_naive_bound_fails() {
        let s = FiniteGroupSet::from_coords(z(2), &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let r = check_discrete_bm(&s, &s).unwrap();
        assert_eq!(r.lhs, 6);
        assert!(close(r.delta_used, 2.0 / 3.0));
        assert!(r.rhs < 0.0);
        assert_eq!(r.verdict(), Verdict::Vacuous);
        assert!(close(naive_bm_bound(2, 3, 3), 12.0));
    }

    #[test]
    fn dbm_in_one_dimension() {
        let a = FiniteGroupSet::int_box(1, 0, 7).unwrap();
        let b = FiniteGroupSet::from_coords(z(1), &[vec![5]]).unwrap();
        let r = check_discrete_bm(&a, &b).unwrap();
        assert_eq!(r.lhs, 8);
        assert!(close(r.rhs, 6.75));
        assert!(r.holds && !r.vacuous);
    }

    #[test]
    fn dbm_errors() {
        let empty = FiniteGroupSet::empty(z(1));
        let one = FiniteGroupSet::int_box(1, 0, 0).unwrap();
        assert_eq!(check_discrete_bm(&empty, &one).unwrap_err(), LabError::EmptySet);
        let t = GroupDescriptor::finite_by_free(vec![2], 1).unwrap();
        let s = FiniteGroupSet::from_coords(t, &[vec![0, 0]]).unwrap();
        assert!(check_discrete_bm(&s, &s).is_err());
    }

    #[test]
    fn abelian_product_lemma_with_torsion_lifts() {
        let g = GroupDescriptor::finite_by_free(vec![5], 2).unwrap();
        let e = ZdEmbedding::standard(&g, 2).unwrap();
        let boxed: Vec<Vec<i64>> = (0..10).flat_map(|x| (0..10).map(move |y| vec![0, x, y])).collect();
        let a = FiniteGroupSet::from_coords(g.clone(), &boxed).unwrap();
        let b = FiniteGroupSet::from_coords(g.clone(), &(0..5).map(|t| vec![t, 0, 0]).collect::<Vec<_>>()).unwrap();
        let [ab, ba] = check_lemma_abelian_product(&a, &b, &e).unwrap();
        assert_eq!(ab.lhs, 500);
        assert_eq!(ba.lhs, 500);
        let expected = 0.2 * (10.0 + 5f64.sqrt()).powi(2);
        assert!(close(ab.rhs, expected));
        assert!(ab.holds && !ab.vacuous);

        let single = FiniteGroupSet::from_coords(g.clone(), &[vec![3, 1, 1]]).unwrap();
        let [ab, _] = check_lemma_abelian_product(&a, &single, &e).unwrap();
        assert_eq!(ab.lhs, 100);
        assert!(close(ab.rhs, 24.2));

        let point = FiniteGroupSet::from_coords(g.clone(), &[vec![0, 2, 2]]).unwrap();
        let [ab, _] = check_lemma_abelian_product(&point, &b, &e).unwrap();
        assert!(ab.vacuous && ab.holds);

        let outside = FiniteGroupSet::from_coords(g, &[vec![1, 0, 0]]).unwrap();
        assert!(matches!(check_lemma_abelian_product(&outside, &b, &e), Err(LabError::NotInSubgroup(_))));
    }

    #[test]
    fn same_size_lemma_on_a_large_box() {
        let f = FiniteGroupSet::int_box(2, 0, 99).unwrap();
        let r = check_lemma_same_size(&f, &ZdEmbedding::standard(&z(2), 2).unwrap()).unwrap();
        assert_eq!(r.lhs, 199 * 199);
        assert!(close(r.rhs, 6400.0));
        assert_eq!(r.verdict(), Verdict::Holds);
    }

    #[test]
    fn singletons_are_vacuous_in_every_dimension() {
        for d in 1..=4 {
            let f = FiniteGroupSet::int_box(d, 0, 0).unwrap();
            let e = ZdEmbedding::standard(&z(d), d).unwrap();
            let r = check_lemma_same_size(&f, &e).unwrap();
            assert_eq!(r.lhs, 1);
            assert!(r.rhs <= 0.0, "d={d} rhs={}", r.rhs);
            assert_eq!(r.verdict(), Verdict::Vacuous);
        }
    }

    #[test]
    fn diff_size_lemma_examples() {
        let e = ZdEmbedding::standard(&z(2), 2).unwrap();
        let f1 = FiniteGroupSet::int_box(2, 0, 99).unwrap();
        let f2 = FiniteGroupSet::int_box(2, 0, 49).unwrap();
        let r = check_lemma_diff_size(&f1, &f2, &e).unwrap();
        assert!(close(r.delta_used, 0.02));
        assert!(r.rhs < 0.0 && r.vacuous);

        let big = FiniteGroupSet::int_box(2, 0, 399).unwrap();
        let r = check_lemma_diff_size(&big, &big, &e).unwrap();
        assert_eq!(r.lhs, 799 * 799);
        assert!(close(r.rhs, 345_600.0));
        let same = check_lemma_same_size(&big, &e).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds, r.vacuous), (same.lhs, same.rhs, same.holds, same.vacuous));

        let single = FiniteGroupSet::int_box(2, 0, 0).unwrap();
        let r = check_lemma_diff_size(&single, &f2, &e).unwrap();
        assert_eq!(r.lhs, f2.len() as u128);
        assert!(r.rhs <= 0.0 && r.holds);
    }

    #[test]
    fn lower_bound_on_intervals() {
        let sides: Vec<u64> = (1..=200).collect();
        let check = lower_bound_from_report(&nested_box_report(1, &sides).unwrap()).unwrap();
        assert!(check.all_hold());
        assert_eq!(check.target, 2.0);
        assert!(check.max_constant < 2.0 && check.max_constant > 1.99);
    }

    #[test]
    fn growth_guard_paths() {
        // C = 2 keeps d = 5 above 2 + log₂ C, but defects 1/2, 1/9, 1/65
        // never reach 1/400.
        let small = nested_box_report(5, &[1, 8, 64]).unwrap();
        let g = growth_from_report(&small, 2.0).unwrap();
        assert_eq!(g.verdict(), GrowthVerdict::NotApplicable);
        assert!(g.reports.is_empty());

        let constant = nested_box_report(2, &[99; 6]).unwrap();
        let c = to_f64(constant.max_tempered().unwrap());
        let g = growth_from_report(&constant, c).unwrap();
        assert_eq!(g.first_invariant, Some(1));
        assert_eq!(g.verdict(), GrowthVerdict::Vacuous);
        // Vacuity depends on C alone, even before the threshold is reached.
        let g = growth_from_report(&nested_box_report(5, &[3; 4]).unwrap(), 17.0).unwrap();
        assert_eq!((g.first_invariant, g.verdict()), (None, GrowthVerdict::Vacuous));

        assert!(growth_from_report(&constant, 1.5).is_err());
    }

    #[test]
    fn growth_holds_for_geometric_boxes() {
        let sides: Vec<u64> = (0..6).map(|j| 100 * 3u64.pow(j)).collect();
        let report = nested_box_report(5, &sides).unwrap();
        let c = to_f64(report.max_tempered().unwrap());
        let g = growth_from_report(&report, c).unwrap();
        // Defect 1/(L+1) first drops to 1/400 or below at L = 900.
        assert_eq!(g.first_invariant, Some(3));
        assert_eq!(g.verdict(), GrowthVerdict::Holds);
        assert_eq!(g.reports.len(), 3);
    }

    #[test]
    fn reports_serialize_with_documented_keys() {
        let a = FiniteGroupSet::int_box(1, 0, 3).unwrap();
        let r = check_discrete_bm(&a, &a).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["d", "delta", "holds", "inputs_digest", "lhs", "rhs", "statement", "vacuous"]);
        assert_eq!(v["statement"], "DBM");
        assert_eq!(r.inputs_digest, check_discrete_bm(&a, &a).unwrap().inputs_digest);
        let b = FiniteGroupSet::int_box(1, 0, 4).unwrap();
        assert_ne!(r.inputs_digest, check_discrete_bm(&a, &b).unwrap().inputs_digest);
    }
}
