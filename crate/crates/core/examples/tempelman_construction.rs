//! The abelian construction of sets with Tempel'man constant at most 2^d,
//! run on Z/2 ⊕ Z/3 ⊕ Z^2 along the shell enumeration.

use folner_lab::exact::{ratio, to_f64};
use folner_lab::folner::{construct_abelian_tempelman, tempelman_constant, Enumeration};
use folner_lab::parse_group_dsl;
use folner_lab::setops::{invariance, Side};

fn main() -> folner_lab::Result<()> {
    let g = parse_group_dsl("Z/2xZ/3xZ^2")?;
    let c = construct_abelian_tempelman(&g, &Enumeration::Shells, 20)?;
    let enumerated = c.enumerated();
    println!("{:>3} {:>10} {:>3} {:>5} {:>8} {:>9} {:>8}", "n", "a_n", "d", "k", "|F_n|", "c_n", "defect");
    for step in &c.steps {
        let cn = tempelman_constant(&step.set)?;
        let defect = invariance(&step.set, &enumerated[..step.n], Side::Left)?.defect;
        assert!(defect <= ratio(1, step.n as u128));
        println!(
            "{:>3} {:>10} {:>3} {:>5} {:>8} {:>9.5} {:>8.5}",
            step.n,
            step.element.to_string(),
            step.free_rank,
            step.box_size,
            step.set.len(),
            to_f64(&cn),
            to_f64(&defect)
        );
    }
    Ok(())
}
