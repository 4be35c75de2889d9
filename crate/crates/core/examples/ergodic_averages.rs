//! Averages of cylinder functions over growing boxes under a Bernoulli shift
//! of Z^2, and the decay of their mean-square error.

use folner_lab::ergodic::{average, convergence_sweep, BernoulliAction, CylinderFunction, DEFAULT_PATHS};
use folner_lab::folner::{Family, FolnerSequenceSpec};
use folner_lab::GroupDescriptor;

fn main() -> folner_lab::Result<()> {
    let z2 = GroupDescriptor::free_abelian(2)?;
    let action = BernoulliAction::new(z2.clone(), 0.5, 42)?;
    let spec = FolnerSequenceSpec::new(z2, Family::Boxes, 160)?;
    for phi in [
        CylinderFunction::origin(2),
        CylinderFunction::product(vec![vec![0, 0], vec![1, 0]])?,
    ] {
        println!("window {:?}, E φ = {}", phi.window(), phi.expectation(action.p()));
        for n in [10, 40, 160] {
            let r = average(&action, &phi, &spec.generate(n)?)?;
            println!("  n = {n:>3}: |F| = {:>6}, average {:.5}, deviation {:+.5}", r.size, r.average, r.deviation);
        }
        let sweep = convergence_sweep(&action, &phi, &spec, &[10, 20, 40, 80, 160], DEFAULT_PATHS)?;
        print!("{}", sweep.to_csv()?);
        println!("  slope {:.3}", sweep.slope.unwrap_or(f64::NAN));
    }
    Ok(())
}
