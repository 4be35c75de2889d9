//! Greedy tempered subsequences of the interval family in Z and of the
//! standard lamplighter family.

use folner_lab::folner::{extract_tempered, tempered_constants, Family, FolnerSequenceSpec};
use folner_lab::exact::to_f64;
use folner_lab::{GroupDescriptor, LabError};

fn run(spec: &FolnerSequenceSpec, c: f64, count: usize) -> folner_lab::Result<()> {
    let found = match extract_tempered(|n| spec.generate(n), spec.max_index, c, count) {
        Ok(e) => e.indices,
        Err(LabError::Exhausted { found, .. }) => found,
        Err(e) => return Err(e),
    };
    let sub: Vec<_> = found.iter().map(|&n| spec.generate(n)).collect::<Result<_, _>>()?;
    let t: Vec<f64> = tempered_constants(&sub)?.iter().map(to_f64).collect();
    println!("{} / {} with C = {c}", spec.descriptor, spec.family.name());
    println!("  indices   {found:?}");
    println!("  constants {t:.4?}");
    Ok(())
}

fn main() -> folner_lab::Result<()> {
    let z = FolnerSequenceSpec::new(GroupDescriptor::free_abelian(1)?, Family::Boxes, 30)?;
    run(&z, 3.0, 30)?;
    let lamp = FolnerSequenceSpec::new(GroupDescriptor::Lamplighter, Family::LamplighterStandard, 12)?;
    run(&lamp, 4.0, 12)?;
    Ok(())
}
