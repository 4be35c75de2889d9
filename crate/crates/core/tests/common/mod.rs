#![allow(dead_code)]

use folner_lab::setops::FiniteGroupSet;
use folner_lab::{GroupDescriptor, GroupElement};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn kinds() -> Vec<GroupDescriptor> {
    vec![
        GroupDescriptor::free_abelian(3).unwrap(),
        GroupDescriptor::finite_by_free(vec![4, 6], 2).unwrap(),
        GroupDescriptor::finite_by_free(vec![2, 3], 0).unwrap(),
        GroupDescriptor::Lamplighter,
        GroupDescriptor::WreathZZ,
    ]
}

pub fn element(rng: &mut TestRng, desc: &GroupDescriptor) -> GroupElement {
    let raw = match desc {
        GroupDescriptor::FreeAbelian { d } => GroupElement::Free((0..*d).map(|_| rng.gen_range(-20..=20)).collect()),
        GroupDescriptor::FiniteByFree { moduli, d } => GroupElement::Mixed {
            residues: moduli.iter().map(|&m| rng.gen_range(0..m)).collect(),
            free: (0..*d).map(|_| rng.gen_range(-20..=20)).collect(),
        },
        GroupDescriptor::Lamplighter => {
            let k = rng.gen_range(0..5);
            GroupElement::Lamp { shift: rng.gen_range(-6..=6), lamps: (0..k).map(|_| rng.gen_range(-8..=8)).collect() }
        }
        GroupDescriptor::WreathZZ => {
            let k = rng.gen_range(0..5);
            GroupElement::Wreath {
                shift: rng.gen_range(-6..=6),
                config: (0..k).map(|_| (rng.gen_range(-8..=8), rng.gen_range(-3..=3))).collect(),
            }
        }
    };
    desc.canonicalize(raw).unwrap()
}

pub fn set(rng: &mut TestRng, desc: &GroupDescriptor, max_len: usize) -> FiniteGroupSet {
    let len = rng.gen_range(1..=max_len);
    FiniteGroupSet::new(desc.clone(), (0..len).map(|_| element(rng, desc))).unwrap()
}

/// A nonempty subset of `{0..side-1}^2`: either i.i.d. points of a random
/// density, or a random rectangle with a few points removed.
pub fn grid_set(rng: &mut TestRng, side: i64) -> FiniteGroupSet {
    let z2 = GroupDescriptor::free_abelian(2).unwrap();
    let mut pts = Vec::new();
    if rng.gen_bool(0.5) {
        let p: f64 = rng.gen_range(0.02..0.98);
        for x in 0..side {
            for y in 0..side {
                if rng.gen_bool(p) {
                    pts.push(vec![x, y]);
                }
            }
        }
    } else {
        let (x0, y0) = (rng.gen_range(0..side), rng.gen_range(0..side));
        let (x1, y1) = (rng.gen_range(x0..side), rng.gen_range(y0..side));
        for x in x0..=x1 {
            for y in y0..=y1 {
                pts.push(vec![x, y]);
            }
        }
        pts.shuffle(rng);
        let drop = rng.gen_range(0..=pts.len() / 10);
        pts.truncate(pts.len() - drop);
    }
    if pts.is_empty() {
        pts.push(vec![rng.gen_range(0..side), rng.gen_range(0..side)]);
    }
    FiniteGroupSet::from_coords(z2, &pts).unwrap()
}

/// `|A⁻¹B| = |B − A|` for sets in `Z^2`, by marking differences on a grid.
pub fn difference_count(a: &FiniteGroupSet, b: &FiniteGroupSet) -> usize {
    let pts = |s: &FiniteGroupSet| -> Vec<(i64, i64)> {
        s.iter().map(|g| {
            let f = g.free_part().unwrap();
            (f[0], f[1])
        }).collect()
    };
    let (pa, pb) = (pts(a), pts(b));
    let lo_x = pb.iter().map(|p| p.0).min().unwrap() - pa.iter().map(|p| p.0).max().unwrap();
    let lo_y = pb.iter().map(|p| p.1).min().unwrap() - pa.iter().map(|p| p.1).max().unwrap();
    let hi_x = pb.iter().map(|p| p.0).max().unwrap() - pa.iter().map(|p| p.0).min().unwrap();
    let hi_y = pb.iter().map(|p| p.1).max().unwrap() - pa.iter().map(|p| p.1).min().unwrap();
    let w = (hi_y - lo_y + 1) as usize;
    let mut seen = vec![false; (hi_x - lo_x + 1) as usize * w];
    for &(ax, ay) in &pa {
        for &(bx, by) in &pb {
            seen[(bx - ax - lo_x) as usize * w + (by - ay - lo_y) as usize] = true;
        }
    }
    seen.iter().filter(|&&s| s).count()
}
