//! Multiplication, inverses and embedded copies of Z^d in the four group kinds.

use folner_lab::setops::parse_element_literal;
use folner_lab::{parse_group_dsl, ZdEmbedding};

fn main() -> folner_lab::Result<()> {
    for (dsl, x, y) in [
        ("Z^3", "1,2,3", "-1,0,4"),
        ("Z/6xZ^2", "5,1,1", "3,0,-2"),
        ("lamplighter", "1;0", "1;0"),
        ("wreath-zz", "2;0:1", "-1;1:3,4:-2"),
    ] {
        let g = parse_group_dsl(dsl)?;
        let (a, b) = (parse_element_literal(&g, x)?, parse_element_literal(&g, y)?);
        println!("{g}  (rank {:?})", g.declared_rank());
        println!("  {a} · {b} = {}", g.multiply(&a, &b)?);
        println!("  {b} · {a} = {}", g.multiply(&b, &a)?);
        println!("  ({a})⁻¹ = {}", g.inverse(&a)?);
        println!("  ({a})^3 = {}", g.pow(&a, 3)?);
    }

    let wreath = parse_group_dsl("wreath-zz")?;
    let e = ZdEmbedding::standard(&wreath, 4)?;
    let g = e.element_at(&[3, 0, -1, 2])?;
    println!("Z^4 inside wreath-zz: (3,0,-1,2) ↦ {g} ↦ {:?}", e.coordinates(&g)?);
    Ok(())
}
