mod common;

use common::{difference_count, grid_set, rng};
use folner_lab::inequality::{
    check_discrete_bm, check_lemma_abelian_product, check_lemma_diff_size, check_lemma_same_size, Verdict, SLACK,
};
use folner_lab::setops::FiniteGroupSet;
use folner_lab::{GroupDescriptor, ZdEmbedding};
use rand::Rng;

/// Random sets in `{0..4}^3`: i.i.d. points or sub-boxes with holes.
fn cube_set(r: &mut common::TestRng) -> FiniteGroupSet {
    let z3 = GroupDescriptor::free_abelian(3).unwrap();
    let mut pts = Vec::new();
    let boxy = r.gen_bool(0.5);
    let p: f64 = r.gen_range(0.05..0.95);
    let lo: Vec<i64> = (0..3).map(|_| r.gen_range(0..5)).collect();
    let hi: Vec<i64> = lo.iter().map(|&l| r.gen_range(l..5)).collect();
    for x in 0..5 {
        for y in 0..5 {
            for z in 0..5 {
                let inside = [x, y, z].iter().zip(&lo).zip(&hi).all(|((&c, &l), &h)| l <= c && c <= h);
                let keep = if boxy { inside && r.gen_bool(0.95) } else { r.gen_bool(p) };
                if keep {
                    pts.push(vec![x, y, z]);
                }
            }
        }
    }
    if pts.is_empty() {
        pts.push(lo);
    }
    FiniteGroupSet::from_coords(z3, &pts).unwrap()
}

#[test]
fn discrete_bm_on_random_pairs_in_three_dimensions() {
    let mut r = rng(3);
    let (mut holds, mut vacuous) = (0, 0);
    for _ in 0..10_000 {
        let (a, b) = (cube_set(&mut r), cube_set(&mut r));
        let rep = check_discrete_bm(&a, &b).unwrap();
        assert!(rep.holds, "counterexample: {rep:?}");
        match rep.verdict() {
            Verdict::Holds => holds += 1,
            Verdict::Vacuous => vacuous += 1,
            Verdict::Fails => unreachable!(),
        }
    }
    assert_eq!(holds + vacuous, 10_000);
}

#[test]
fn verdict_fields_are_consistent() {
    let mut r = rng(4);
    let e = ZdEmbedding::standard(&GroupDescriptor::free_abelian(2).unwrap(), 2).unwrap();
    for _ in 0..300 {
        let (a, b) = (grid_set(&mut r, 20), grid_set(&mut r, 20));
        let mut reports = vec![check_discrete_bm(&a, &b).unwrap(), check_lemma_same_size(&a, &e).unwrap()];
        reports.push(check_lemma_diff_size(&a, &b, &e).unwrap());
        reports.extend(check_lemma_abelian_product(&a, &b, &e).unwrap());
        for rep in reports {
            assert_eq!(rep.vacuous, rep.rhs <= 0.0);
            assert_eq!(rep.holds, rep.vacuous || rep.lhs as f64 >= rep.rhs - SLACK);
            assert_eq!(rep.d, 2);
        }
    }
}

#[test]
fn diff_size_with_equal_sets_matches_same_size() {
    let mut r = rng(5);
    let e = ZdEmbedding::standard(&GroupDescriptor::free_abelian(2).unwrap(), 2).unwrap();
    for _ in 0..300 {
        let f = grid_set(&mut r, 31);
        let same = check_lemma_same_size(&f, &e).unwrap();
        let diff = check_lemma_diff_size(&f, &f, &e).unwrap();
        assert_eq!((same.lhs, same.rhs.to_bits(), same.delta_used.to_bits()), (diff.lhs, diff.rhs.to_bits(), diff.delta_used.to_bits()));
        assert_eq!(same.verdict(), diff.verdict());
        assert_eq!(same.lhs as usize, difference_count(&f, &f));
    }
}

#[test]
fn reports_are_pure_functions_of_their_inputs() {
    let mut r = rng(6);
    let e = ZdEmbedding::standard(&GroupDescriptor::free_abelian(2).unwrap(), 2).unwrap();
    let pairs: Vec<_> = (0..50).map(|_| (grid_set(&mut r, 15), grid_set(&mut r, 15))).collect();
    let run = || -> Vec<_> { pairs.iter().map(|(a, b)| check_lemma_diff_size(a, b, &e).unwrap()).collect() };
    let first = run();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let second = pool.install(run);
    assert_eq!(first, second);
    let mut digests: Vec<_> = first.iter().map(|r| r.inputs_digest.clone()).collect();
    digests.sort();
    digests.dedup();
    let mut distinct = pairs.clone();
    distinct.sort_by(|x, y| (x.0.elements(), x.1.elements()).cmp(&(y.0.elements(), y.1.elements())));
    distinct.dedup();
    assert_eq!(digests.len(), distinct.len());
}
