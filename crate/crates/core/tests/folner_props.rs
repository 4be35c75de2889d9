mod common;

use folner_lab::exact::{checked_pow, ratio, to_f64};
use folner_lab::folner::{
    construct_abelian_tempelman, extract_tempered, sequence_report, tempelman_constant, tempered_constants,
    Enumeration, Family, FolnerSequenceSpec, HeightRule,
};
use folner_lab::setops::{invariance, FiniteGroupSet, Side};
use folner_lab::{GroupDescriptor, GroupElement, LabError, ZdEmbedding};
use proptest::prelude::*;

fn check_construction(desc: &GroupDescriptor, enumeration: &Enumeration, max: usize) {
    let c = construct_abelian_tempelman(desc, enumeration, max).unwrap();
    let enumerated = c.enumerated();
    let sets = c.sets();
    for (i, step) in c.steps.iter().enumerate() {
        if i > 0 {
            assert!(sets[i - 1].is_subset(&step.set), "F_{} ⊄ F_{}", i, i + 1);
        }
        let defect = invariance(&step.set, &enumerated[..step.n], Side::Left).unwrap().defect;
        assert!(defect <= ratio(1, step.n as u128), "defect {defect} at n = {}", step.n);
        // Oracle: F_n = T_n × box of side k+1 along a lattice basis, so
        // F_n⁻¹F_n = T_n × box of side 2k+1.
        let (k, r) = (u128::from(step.box_size), step.free_rank as u32);
        assert_eq!(step.set.len() as u128, step.torsion.len() as u128 * checked_pow(k + 1, r).unwrap());
        let cn = tempelman_constant(&step.set).unwrap();
        assert_eq!(cn, ratio(checked_pow(2 * k + 1, r).unwrap(), checked_pow(k + 1, r).unwrap()));
        assert!(cn <= ratio(1u128 << r, 1));
    }
    // Increasing with c_n ≤ 2^d, hence tempered with the same constant.
    let bound = ratio(1u128 << c.steps.last().map_or(0, |s| s.free_rank), 1);
    for t in tempered_constants(&sets).unwrap() {
        assert!(t <= bound);
    }
}

#[test]
fn construction_on_mixed_groups() {
    check_construction(&"Z/2xZ/3xZ^2".parse().unwrap(), &Enumeration::Shells, 20);
    check_construction(&"Z^3".parse().unwrap(), &Enumeration::Shells, 12);
    check_construction(&"Z/4xZ^1".parse().unwrap(), &Enumeration::Shells, 15);
    check_construction(&"Z/5xZ/5".parse().unwrap(), &Enumeration::Shells, 30);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn construction_along_random_enumerations(
        moves in prop::collection::vec((0u64..6, -3i64..4, -3i64..4), 1..6)
    ) {
        let desc = GroupDescriptor::finite_by_free(vec![6], 2).unwrap();
        let list: Vec<GroupElement> = moves
            .iter()
            .map(|&(t, x, y)| desc.abelian_element(&[t as i64, x, y]).unwrap())
            .collect();
        check_construction(&desc, &Enumeration::Explicit(list.clone()), list.len());
    }

    #[test]
    fn extraction_satisfies_the_tempered_condition(
        sides in prop::collection::vec(0i64..12, 1..10), c in 1.2f64..4.0
    ) {
        let sets: Vec<FiniteGroupSet> = sides.iter().map(|&s| FiniteGroupSet::int_box(1, -s, s / 2).unwrap()).collect();
        let n = sets.len();
        let found = match extract_tempered(|i| Ok(sets[i - 1].clone()), n, c, n) {
            Ok(e) => e.indices,
            Err(LabError::Exhausted { found, .. }) => found,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert_eq!(found[0], 1);
        prop_assert!(found.windows(2).all(|w| w[0] < w[1]));
        let chosen: Vec<_> = found.iter().map(|&i| sets[i - 1].clone()).collect();
        for t in tempered_constants(&chosen).unwrap() {
            prop_assert!(to_f64(&t) <= c + 1e-12);
        }
    }
}

#[test]
fn tempelman_constant_is_at_least_one() {
    let g: GroupDescriptor = "Z/6xZ^1".parse().unwrap();
    let subgroup = FiniteGroupSet::from_coords(g.clone(), &[vec![0, 0], vec![2, 0], vec![4, 0]]).unwrap();
    assert_eq!(tempelman_constant(&subgroup).unwrap(), ratio(1, 1));
    let single = FiniteGroupSet::from_coords(g.clone(), &[vec![3, 7]]).unwrap();
    assert_eq!(tempelman_constant(&single).unwrap(), ratio(1, 1));
    let not_subgroup = FiniteGroupSet::from_coords(g, &[vec![0, 0], vec![1, 0]]).unwrap();
    assert!(tempelman_constant(&not_subgroup).unwrap() > ratio(1, 1));
}

#[test]
fn standard_families_are_nested_and_folner() {
    // Only the abelian families are left-Følner; the lamplighter-type ones are
    // checked for nestedness alone.
    for (spec, dim) in [
        (FolnerSequenceSpec::new("Z^2".parse().unwrap(), Family::Boxes, 12).unwrap(), 2),
        (FolnerSequenceSpec::new("Z/3xZ^1".parse().unwrap(), Family::Boxes, 12).unwrap(), 1),
        (FolnerSequenceSpec::new(GroupDescriptor::Lamplighter, Family::LamplighterStandard, 7).unwrap(), 1),
        (FolnerSequenceSpec::new(GroupDescriptor::WreathZZ, Family::WreathStandard(HeightRule::Fixed(1)), 5).unwrap(), 1),
    ] {
        let seq = spec.sequence().unwrap();
        assert!(seq.windows(2).all(|w| w[0].is_subset(&w[1])), "{}", spec.descriptor);
        if !spec.descriptor.is_abelian() {
            continue;
        }
        let report = sequence_report(&seq, &ZdEmbedding::standard(&spec.descriptor, dim).unwrap()).unwrap();
        assert!(report.rows.windows(2).all(|w| w[1].defect < w[0].defect), "{}", spec.descriptor);
    }
    let lamp = FolnerSequenceSpec::standard(GroupDescriptor::Lamplighter, 3).unwrap();
    assert_eq!(lamp.generate(1).unwrap().len(), 8);
    assert_eq!(lamp.generate(3).unwrap().len(), 4 * 16);
}

#[test]
fn spec_records_round_trip() {
    let z = GroupDescriptor::free_abelian(1).unwrap();
    let explicit = Family::Explicit(vec![
        FiniteGroupSet::int_box(1, 0, 0).unwrap(),
        FiniteGroupSet::int_box(1, -1, 2).unwrap(),
    ]);
    for spec in [
        FolnerSequenceSpec::new(z.clone(), explicit, 2).unwrap(),
        FolnerSequenceSpec::new(GroupDescriptor::WreathZZ, Family::WreathStandard(HeightRule::Fixed(2)), 4).unwrap(),
        FolnerSequenceSpec::new(
            "Z/2xZ^1".parse().unwrap(),
            Family::AbelianTempelman(Enumeration::Explicit(vec![GroupElement::Mixed { residues: vec![1], free: vec![3] }])),
            1,
        )
        .unwrap(),
    ] {
        let text = serde_json::to_string(&spec.to_record()).unwrap();
        let back: folner_lab::folner::SequenceSpecRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_spec().unwrap(), spec);
    }
}

#[test]
fn lamplighter_tempered_constant_by_hand() {
    let g = GroupDescriptor::Lamplighter;
    let spec = FolnerSequenceSpec::standard(g.clone(), 2).unwrap();
    let (f1, f2) = (spec.generate(1).unwrap(), spec.generate(2).unwrap());
    let mut prod = std::collections::BTreeSet::new();
    for x in f1.iter() {
        let xi = g.inverse(x).unwrap();
        for y in f2.iter() {
            prod.insert(g.multiply(&xi, y).unwrap());
        }
    }
    let t = tempered_constants(&[f1, f2.clone()]).unwrap();
    assert_eq!(t[1], ratio(prod.len() as u128, f2.len() as u128));
    assert_eq!(t[1], ratio(8, 3));
}
