//! Group-descriptor mini-language.
//!
//! ```text
//! Z^d                      free abelian, d >= 1
//! Z/m1xZ/m2x...[xZ^d]      finite-by-free abelian
//! lamplighter              Z ⋉ ⊕Z/2
//! wreath-zz                Z ⋉ ⊕Z
//! ```
//!
//! Matching is case-insensitive; tokens are separated by `x` with no whitespace.

use super::GroupDescriptor;
use crate::error::{LabError, Result};

pub fn parse_group_dsl(text: &str) -> Result<GroupDescriptor> {
    let lower = text.to_ascii_lowercase();
    match lower.as_str() {
        "lamplighter" => return Ok(GroupDescriptor::Lamplighter),
        "wreath-zz" => return Ok(GroupDescriptor::WreathZZ),
        "" => return Err(err(0, "empty group descriptor")),
        _ => {}
    }

    let mut moduli = Vec::new();
    let mut free: Option<usize> = None;
    let mut pos = 0usize;
    for token in lower.split('x') {
        let start = pos;
        pos += token.len() + 1;
        if free.is_some() {
            return Err(err(start, "Z^d must be the last factor"));
        }
        if let Some(rest) = token.strip_prefix("z/") {
            let m = parse_number(rest, start + 2)?;
            if m < 2 {
                return Err(err(start + 2, "modulus must be at least 2"));
            }
            moduli.push(m);
        } else if let Some(rest) = token.strip_prefix("z^") {
            let d = parse_number(rest, start + 2)?;
            if d == 0 {
                return Err(err(start + 2, "Z^0 is not allowed"));
            }
            free = Some(usize::try_from(d).map_err(|_| err(start + 2, "rank too large"))?);
        } else {
            return Err(err(start, &format!("unexpected token {token:?}")));
        }
    }

    match (moduli.is_empty(), free) {
        (true, Some(d)) => Ok(GroupDescriptor::FreeAbelian { d }),
        (false, d) => Ok(GroupDescriptor::FiniteByFree { moduli, d: d.unwrap_or(0) }),
        (true, None) => Err(err(0, "no factors")),
    }
}

fn parse_number(s: &str, offset: usize) -> Result<u64> {
    if s.is_empty() {
        return Err(err(offset, "expected a decimal integer"));
    }
    if let Some(i) = s.bytes().position(|b| !b.is_ascii_digit()) {
        return Err(err(offset + i, "expected a decimal digit"));
    }
    s.parse().map_err(|_| err(offset, "integer out of range"))
}

fn err(offset: usize, message: &str) -> LabError {
    LabError::Parse { offset, message: message.to_string() }
}

pub(super) fn render(desc: &GroupDescriptor) -> String {
    match desc {
        GroupDescriptor::FreeAbelian { d } => format!("Z^{d}"),
        GroupDescriptor::FiniteByFree { moduli, d } => {
            let mut parts: Vec<String> = moduli.iter().map(|m| format!("Z/{m}")).collect();
            if *d > 0 {
                parts.push(format!("Z^{d}"));
            }
            parts.join("x")
        }
        GroupDescriptor::Lamplighter => "lamplighter".to_string(),
        GroupDescriptor::WreathZZ => "wreath-zz".to_string(),
    }
}
