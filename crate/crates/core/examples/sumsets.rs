//! Products, inverses and invariance of finite sets; the simplex shows why
//! the lattice version of Brunn–Minkowski needs a correction term.

use folner_lab::inequality::naive_bm_bound;
use folner_lab::setops::{inverse_set, invariance, parse_set_literal, product, FiniteGroupSet, Side};
use folner_lab::{GroupDescriptor, ZdEmbedding};

fn main() -> folner_lab::Result<()> {
    let a = FiniteGroupSet::int_box(2, 0, 9)?;
    let b = FiniteGroupSet::int_box(2, 0, 4)?;
    println!("|A| = {}, |B| = {}, |A+B| = {}", a.len(), b.len(), product(&a, &b)?.len());
    let gens = ZdEmbedding::standard(a.descriptor(), 2)?;
    let inv = invariance(&a, gens.images(), Side::Left)?;
    println!("overlap ratios of A: {:?}, defect {}", inv.ratios_f64(), inv.defect);

    for d in 2..=4 {
        let mut pts = vec![vec![0; d]];
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = 1;
            pts.push(e);
        }
        let s = FiniteGroupSet::from_coords(GroupDescriptor::free_abelian(d)?, &pts)?;
        let sum = product(&s, &s)?.len();
        println!("simplex in Z^{d}: |S+S| = {sum}, naive bound 2^d|S| = {}", naive_bm_bound(d, s.len(), s.len()));
    }

    let lamp = GroupDescriptor::Lamplighter;
    let f = parse_set_literal(&lamp, "0;\n0;0\n1;\n1;0\n")?;
    let ff = product(&inverse_set(&f)?, &f)?;
    println!("lamplighter: |F| = {}, |F⁻¹F| = {}", f.len(), ff.len());
    for g in ff.iter().take(6) {
        println!("  {g}");
    }
    Ok(())
}
