//! Reports for the standard families: sizes, Tempel'man and tempered
//! constants, growth ratios and defects.

use folner_lab::folner::{sequence_report, FolnerSequenceSpec};
use folner_lab::{parse_group_dsl, ZdEmbedding};

fn main() -> folner_lab::Result<()> {
    for (dsl, max, dim) in [("Z^2", 12, 2), ("Z/4xZ^1", 12, 1), ("lamplighter", 8, 1), ("wreath-zz", 3, 2)] {
        let g = parse_group_dsl(dsl)?;
        let spec = FolnerSequenceSpec::standard(g.clone(), max)?;
        let report = sequence_report(&spec.sequence()?, &ZdEmbedding::standard(&g, dim)?)?;
        println!("== {g} ({})", spec.family.name());
        print!("{}", report.to_csv()?);
    }
    Ok(())
}
