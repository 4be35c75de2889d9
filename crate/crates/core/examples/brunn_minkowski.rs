//! Exhaustive check of the corrected discrete Brunn–Minkowski inequality on
//! small boxes, plus the extremal sumset sizes the sweep records.

use std::time::Instant;

use folner_lab::inequality::{brute_force_oracle, check_discrete_bm};

fn main() -> folner_lab::Result<()> {
    for (d, side) in [(1, 8), (2, 3)] {
        let start = Instant::now();
        let mut vacuous = std::sync::atomic::AtomicU64::new(0);
        let verdict = brute_force_oracle(d, side, |pair| {
            let (Ok(a), Ok(b)) = (pair.a_set(), pair.b_set()) else { return false };
            match check_discrete_bm(&a, &b) {
                Ok(r) => {
                    if r.vacuous {
                        vacuous.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    }
                    r.holds && r.lhs == pair.sumset_size() as u128
                }
                Err(_) => false,
            }
        })?;
        println!(
            "d={d} side={side}: {} pairs, {} violations, {} vacuous, {:.2?}",
            verdict.pairs,
            verdict.failures,
            vacuous.get_mut(),
            start.elapsed()
        );
        let row: Vec<_> = (1..=side.pow(d as u32)).map(|k| verdict.min_sumset(k, k).unwrap_or(0)).collect();
        println!("  min |A+B| with |A| = |B| = k: {row:?}");
    }
    Ok(())
}
