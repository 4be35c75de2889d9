//! Monte-Carlo averages of cylinder functions under Bernoulli shifts of `Z^d`.
//!
//! A sample path is never stored: the symbol at a coordinate is a pure
//! function of `(seed, coordinate)`, so reading it twice, in any order or from
//! any thread, gives the same value.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::folner::FolnerSequenceSpec;
use crate::group::{GroupDescriptor, GroupElement};
use crate::setops::FiniteGroupSet;

pub const DEFAULT_PATHS: usize = 32;

/// Largest window a table can cover.
pub const MAX_WINDOW: usize = 20;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// i.i.d. `{0,1}` symbols on `Z^d` with `P(1) = p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliAction {
    descriptor: GroupDescriptor,
    p: f64,
    seed: u64,
}

impl BernoulliAction {
    pub fn new(descriptor: GroupDescriptor, p: f64, seed: u64) -> Result<Self> {
        if !matches!(descriptor, GroupDescriptor::FreeAbelian { .. }) {
            return Err(LabError::InvalidArgument(format!("Bernoulli shifts are implemented on Z^d only, got {descriptor}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(LabError::InvalidProbability(p));
        }
        Ok(BernoulliAction { descriptor, p, seed })
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.descriptor.free_rank().unwrap_or(0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The `index`-th independent sample path derived from this one's seed.
    pub fn path(&self, index: u64) -> BernoulliAction {
        BernoulliAction { seed: splitmix(self.seed ^ splitmix(index.wrapping_add(1))), ..self.clone() }
    }

    /// `ω_x`.
    pub fn symbol(&self, x: &[i64]) -> bool {
        let h = x.iter().fold(splitmix(self.seed), |h, &c| splitmix(h ^ c as u64));
        ((h >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < self.p
    }
}

/// `φ(ω) = table[Σ_i ω_{w_i} 2^i]` for a finite window `w_0, …, w_{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFunction {
    window: Vec<Vec<i64>>,
    table: Vec<f64>,
}

impl CylinderFunction {
    pub fn new(window: Vec<Vec<i64>>, table: Vec<f64>) -> Result<Self> {
        let Some(first) = window.first() else {
            return Err(LabError::InvalidArgument("cylinder window is empty".into()));
        };
        if window.len() > MAX_WINDOW {
            return Err(LabError::InvalidArgument(format!("window has {} cells, limit {MAX_WINDOW}", window.len())));
        }
        if window.iter().any(|w| w.len() != first.len()) {
            return Err(LabError::InvalidArgument("window coordinates differ in length".into()));
        }
        let mut sorted = window.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != window.len() {
            return Err(LabError::InvalidArgument("window repeats a coordinate".into()));
        }
        if table.len() != 1 << window.len() {
            return Err(LabError::InvalidArgument(format!(
                "table needs {} entries, got {}",
                1usize << window.len(),
                table.len()
            )));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidArgument("table entries must be finite".into()));
        }
        Ok(CylinderFunction { window, table })
    }

    /// `φ(ω) = ω_0`.
    pub fn origin(d: usize) -> Self {
        CylinderFunction { window: vec![vec![0; d]], table: vec![0.0, 1.0] }
    }

    /// `φ ≡ c`.
    pub fn constant(d: usize, c: f64) -> Self {
        CylinderFunction { window: vec![vec![0; d]], table: vec![c, c] }
    }

    /// `φ(ω) = Π_i ω_{w_i}`.
    pub fn product(window: Vec<Vec<i64>>) -> Result<Self> {
        let k = window.len();
        let mut table = vec![0.0; 1 << k.min(MAX_WINDOW + 1)];
        if let Some(last) = table.last_mut() {
            *last = 1.0;
        }
        Self::new(window, table)
    }

    pub fn window(&self) -> &[Vec<i64>] {
        &self.window
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn dim(&self) -> usize {
        self.window[0].len()
    }

    /// Table index of `φ(g·ω)`, where `(g·ω)_x = ω_{x+g}`.
    fn pattern(&self, action: &BernoulliAction, g: &[i64]) -> usize {
        let mut x = vec![0i64; g.len()];
        self.window.iter().enumerate().fold(0, |acc, (i, w)| {
            for ((slot, &a), &b) in x.iter_mut().zip(w).zip(g) {
                *slot = a.wrapping_add(b);
            }
            acc | (action.symbol(&x) as usize) << i
        })
    }

    /// `E φ` under the product measure.
    pub fn expectation(&self, p: f64) -> f64 {
        let k = self.window.len() as i32;
        self.weighted(|pattern| {
            let ones = pattern.count_ones() as i32;
            p.powi(ones) * (1.0 - p).powi(k - ones)
        })
    }

    /// `Σ v · w(v)` over distinct table values `v`, with `w(v)` the total
    /// weight of the patterns mapping to `v`. A value carrying all the weight
    /// comes back exactly.
    fn weighted(&self, weight: impl Fn(usize) -> f64) -> f64 {
        let mut groups: Vec<(f64, f64)> = Vec::new();
        for (pattern, &v) in self.table.iter().enumerate() {
            let w = weight(pattern);
            match groups.iter_mut().find(|(u, _)| *u == v) {
                Some(slot) => slot.1 += w,
                None => groups.push((v, w)),
            }
        }
        if let [(v, _)] = groups[..] {
            return v;
        }
        groups.iter().map(|(v, w)| v * w).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageResult {
    pub size: usize,
    pub average: f64,
    pub target: f64,
    pub deviation: f64,
    /// Number of coordinates read from the sample path.
    pub samples: usize,
}

/// `(1/|F|) Σ_{g∈F} φ(g·ω)` along one sample path.
pub fn average(action: &BernoulliAction, phi: &CylinderFunction, f: &FiniteGroupSet) -> Result<AverageResult> {
    if f.descriptor() != action.descriptor() {
        return Err(LabError::DescriptorMismatch {
            expected: action.descriptor().to_string(),
            found: f.descriptor().to_string(),
        });
    }
    if phi.dim() != action.dim() {
        return Err(LabError::InvalidArgument(format!(
            "window lives in Z^{}, action on Z^{}",
            phi.dim(),
            action.dim()
        )));
    }
    if f.is_empty() {
        return Err(LabError::EmptySet);
    }
    // Counting patterns first keeps the sum independent of iteration order.
    let mut counts = vec![0u64; phi.table.len()];
    for g in f {
        let GroupElement::Free(x) = g else { unreachable!("descriptor checked above") };
        counts[phi.pattern(action, x)] += 1;
    }
    let average = phi.weighted(|pattern| counts[pattern] as f64 / f.len() as f64);
    let target = phi.expectation(action.p);
    Ok(AverageResult {
        size: f.len(),
        average,
        target,
        deviation: average - target,
        samples: f.len() * phi.window.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub size: usize,
    /// Mean of `(average − E φ)²` over the sample paths.
    pub mse: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSweep {
    pub paths: usize,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of `log mse` against `log |F_n|`; absent when some
    /// MSE is zero.
    pub slope: Option<f64>,
}

impl ConvergenceSweep {
    /// CSV with columns `n,size,mse,target`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.points {
            w.serialize(p).map_err(|e| LabError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| LabError::Io(e.to_string()))
    }
}

/// Mean-square deviation from `E φ` over `paths` independent sample paths,
/// for each requested index of the sequence.
pub fn convergence_sweep(
    action: &BernoulliAction,
    phi: &CylinderFunction,
    spec: &FolnerSequenceSpec,
    indices: &[usize],
    paths: usize,
) -> Result<ConvergenceSweep> {
    if indices.len() < 3 {
        return Err(LabError::InsufficientData(format!("need at least 3 indices, got {}", indices.len())));
    }
    if paths == 0 {
        return Err(LabError::InvalidArgument("at least one sample path is required".into()));
    }
    let mut points = Vec::with_capacity(indices.len());
    for &n in indices {
        let f = spec.generate(n)?;
        let deviations: Vec<f64> = (0..paths as u64)
            .into_par_iter()
            .map(|r| Ok(average(&action.path(r), phi, &f)?.deviation))
            .collect::<Result<_>>()?;
        let mse = deviations.iter().map(|x| x * x).sum::<f64>() / paths as f64;
        points.push(SweepPoint { n, size: f.len(), mse, target: phi.expectation(action.p) });
    }
    let slope = if points.iter().all(|p| p.mse > 0.0) {
        let xs: Vec<f64> = points.iter().map(|p| (p.size as f64).ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.mse.ln()).collect();
        least_squares_slope(&xs, &ys)
    } else {
        None
    };
    Ok(ConvergenceSweep { paths, points, slope })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folner::Family;

    fn z(d: usize) -> GroupDescriptor {
        GroupDescriptor::free_abelian(d).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(BernoulliAction::new(z(1), 1.0, 0).unwrap_err(), LabError::InvalidProbability(1.0));
        assert!(BernoulliAction::new(z(1), f64::NAN, 0).is_err());
        assert!(BernoulliAction::new(GroupDescriptor::Lamplighter, 0.5, 0).is_err());
        assert!(CylinderFunction::new(vec![], vec![1.0]).is_err());
        assert!(CylinderFunction::new(vec![vec![0], vec![0]], vec![0.0; 4]).is_err());
        assert!(CylinderFunction::new(vec![vec![0]], vec![0.0; 3]).is_err());
    }

    #[test]
    fn origin_average_on_a_large_box() {
        let action = BernoulliAction::new(z(2), 0.5, 7).unwrap();
        let f = FiniteGroupSet::int_box(2, 0, 200).unwrap();
        let r = average(&action, &CylinderFunction::origin(2), &f).unwrap();
        assert_eq!(r.size, 201 * 201);
        assert!(r.deviation.abs() < 0.01, "{r:?}");
    }

    #[test]
    fn constant_and_singleton_cases() {
        let action = BernoulliAction::new(z(2), 0.3, 1).unwrap();
        let f = FiniteGroupSet::int_box(2, -3, 3).unwrap();
        let r = average(&action, &CylinderFunction::constant(2, 1.0), &f).unwrap();
        assert_eq!(r.average, 1.0);
        let single = FiniteGroupSet::int_box(2, 0, 0).unwrap();
        let r = average(&action, &CylinderFunction::origin(2), &single).unwrap();
        assert!(r.average == 0.0 || r.average == 1.0);
    }

    #[test]
    fn expectation_matches_product_weights() {
        let phi = CylinderFunction::product(vec![vec![0, 0], vec![1, 0]]).unwrap();
        assert!((phi.expectation(0.5) - 0.25).abs() < 1e-15);
        let phi = CylinderFunction::new(vec![vec![0], vec![1]], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p: f64 = 0.2;
        let expected = (1.0 - p) * (1.0 - p) + 2.0 * p * (1.0 - p) + 3.0 * (1.0 - p) * p + 4.0 * p * p;
        assert!((phi.expectation(p) - expected).abs() < 1e-15);
    }

    #[test]
    fn paths_are_deterministic_and_distinct() {
        let a = BernoulliAction::new(z(1), 0.5, 42).unwrap();
        let read = |act: &BernoulliAction| (0..256).map(|i| act.symbol(&[i])).collect::<Vec<_>>();
        assert_eq!(read(&a), read(&a.clone()));
        assert_eq!(read(&a.path(3)), read(&a.path(3)));
        assert_ne!(read(&a.path(3)), read(&a.path(4)));
        assert_ne!(read(&a), read(&a.path(0)));
    }

    #[test]
    fn sweep_requires_three_indices_and_decays() {
        let action = BernoulliAction::new(z(2), 0.5, 42).unwrap();
        let spec = FolnerSequenceSpec::new(z(2), Family::Boxes, 80).unwrap();
        let phi = CylinderFunction::origin(2);
        assert!(matches!(
            convergence_sweep(&action, &phi, &spec, &[10, 20], 8),
            Err(LabError::InsufficientData(_))
        ));
        let sweep = convergence_sweep(&action, &phi, &spec, &[10, 20, 40, 80], DEFAULT_PATHS).unwrap();
        assert!(sweep.slope.unwrap() < -0.5, "{sweep:?}");

        let flat = convergence_sweep(&action, &CylinderFunction::constant(2, 0.7), &spec, &[1, 2, 3], 4).unwrap();
        assert!(flat.points.iter().all(|p| p.mse == 0.0));
        assert_eq!(flat.slope, None);
        assert!(flat.to_csv().unwrap().starts_with("n,size,mse,target\n"));
    }
}
