//! The product-set lower bounds |AB|, |F⁻¹F| and |F₁⁻¹F₂| on boxes in Z^2,
//! a torsion example and the lamplighter family.

use folner_lab::folner::FolnerSequenceSpec;
use folner_lab::inequality::{check_lemma_abelian_product, check_lemma_diff_size, check_lemma_same_size};
use folner_lab::setops::FiniteGroupSet;
use folner_lab::{GroupDescriptor, ZdEmbedding};

fn main() -> folner_lab::Result<()> {
    let z2 = GroupDescriptor::free_abelian(2)?;
    let e = ZdEmbedding::standard(&z2, 2)?;
    for side in [9, 49, 99, 399] {
        let f = FiniteGroupSet::int_box(2, 0, side)?;
        let r = check_lemma_same_size(&f, &e)?;
        println!("|F⁻¹F| box {side}: lhs {} rhs {:.1} δ {:.4} {:?}", r.lhs, r.rhs, r.delta_used, r.verdict());
    }
    let r = check_lemma_diff_size(&FiniteGroupSet::int_box(2, 0, 399)?, &FiniteGroupSet::int_box(2, 0, 299)?, &e)?;
    println!("|F₁⁻¹F₂| 400² vs 300²: lhs {} rhs {:.1} {:?}", r.lhs, r.rhs, r.verdict());

    let g = GroupDescriptor::finite_by_free(vec![5], 2)?;
    let eg = ZdEmbedding::standard(&g, 2)?;
    let pts: Vec<Vec<i64>> = (0..10).flat_map(|x| (0..10).map(move |y| vec![0, x, y])).collect();
    let a = FiniteGroupSet::from_coords(g.clone(), &pts)?;
    let b = FiniteGroupSet::from_coords(g, &(0..5).map(|t| vec![t, 0, 0]).collect::<Vec<_>>())?;
    for r in check_lemma_abelian_product(&a, &b, &eg)? {
        println!("Z/5⊕Z²: |AB| = {} ≥ {:.2} {:?}", r.lhs, r.rhs, r.verdict());
    }

    let lamp = FolnerSequenceSpec::standard(GroupDescriptor::Lamplighter, 8)?;
    let shift = ZdEmbedding::standard(&GroupDescriptor::Lamplighter, 1)?;
    for n in 1..=8 {
        let r = check_lemma_same_size(&lamp.generate(n)?, &shift)?;
        println!("lamplighter F_{n}: |F⁻¹F| = {} ≥ {:.1} {:?}", r.lhs, r.rhs, r.verdict());
    }
    Ok(())
}
