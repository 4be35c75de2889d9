//! Sets of small tempered constant in Z^5 must grow by a factor 2^{d−2}/C:
//! consecutive boxes are too slow to make the statement bite, a geometric
//! subsequence makes it non-vacuous, and a constant sequence never gets past
//! the vacuous case.

use folner_lab::exact::to_f64;
use folner_lab::folner::nested_box_report;
use folner_lab::inequality::growth_from_report;

fn main() -> folner_lab::Result<()> {
    let runs: [(&str, Vec<u64>); 3] = [
        ("consecutive", (1..=1200).collect()),
        ("geometric", (0..8).map(|j| 400 * 4u64.pow(j)).collect()),
        ("constant", vec![500; 10]),
    ];
    for (label, sides) in runs {
        let report = nested_box_report(5, &sides)?;
        let c = to_f64(report.max_tempered().expect("nonempty"));
        let check = growth_from_report(&report, c)?;
        let worst = check.reports.iter().map(|r| r.slack() / r.rhs.abs().max(1.0)).fold(f64::INFINITY, f64::min);
        println!(
            "{label:>12}: C = {c:.4}, threshold {:.6}, first invariant index {:?}, {} steps, verdict {:?}, min relative slack {worst:.3}",
            check.threshold,
            check.first_invariant,
            check.reports.len(),
            check.verdict()
        );
    }
    Ok(())
}
