//! Set literal files: one element per line, `#` starts a comment line.
//!
//! ```text
//! # abelian kinds: residues then free coordinates
//! 0,1,-2
//! # lamplighter: shift;lit positions
//! 3;0,2
//! # wreath-zz: shift;position:value pairs
//! -1;0:4,2:-1
//! ```

use super::FiniteGroupSet;
use crate::error::{LabError, Result};
use crate::group::{GroupDescriptor, GroupElement};

pub fn parse_set_literal(desc: &GroupDescriptor, text: &str) -> Result<FiniteGroupSet> {
    let mut elements = Vec::new();
    let mut offset = 0usize;
    for line in text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let lead = line.len() - line.trim_start().len();
        elements.push(parse_element(desc, trimmed, start + lead)?);
    }
    FiniteGroupSet::new(desc.clone(), elements)
}

pub fn render_set_literal(set: &FiniteGroupSet) -> String {
    let mut out = String::new();
    for g in set {
        out.push_str(&g.to_string());
        out.push('\n');
    }
    out
}

/// Parses a single element written in the set-literal syntax.
pub fn parse_element_literal(desc: &GroupDescriptor, s: &str) -> Result<GroupElement> {
    parse_element(desc, s.trim(), 0)
}

fn parse_element(desc: &GroupDescriptor, s: &str, at: usize) -> Result<GroupElement> {
    match desc {
        GroupDescriptor::FreeAbelian { .. } | GroupDescriptor::FiniteByFree { .. } => {
            let coords = int_list(s, at)?;
            desc.abelian_element(&coords).map_err(|_| parse_err(at, "wrong number of coordinates"))
        }
        GroupDescriptor::Lamplighter => {
            let (shift, rest, rest_at) = split_shift(s, at)?;
            let lamps = int_list(rest, rest_at)?;
            desc.canonicalize(GroupElement::Lamp { shift, lamps })
        }
        GroupDescriptor::WreathZZ => {
            let (shift, rest, rest_at) = split_shift(s, at)?;
            let mut config = Vec::new();
            let mut pos = rest_at;
            if !rest.trim().is_empty() {
                for item in rest.split(',') {
                    let (p, v) = item
                        .split_once(':')
                        .ok_or_else(|| parse_err(pos, "expected position:value"))?;
                    config.push((int(p, pos)?, int(v, pos + p.len() + 1)?));
                    pos += item.len() + 1;
                }
            }
            desc.canonicalize(GroupElement::Wreath { shift, config })
        }
    }
}

fn split_shift(s: &str, at: usize) -> Result<(i64, &str, usize)> {
    let (head, rest) = s.split_once(';').ok_or_else(|| parse_err(at, "expected shift;..."))?;
    Ok((int(head, at)?, rest, at + head.len() + 1))
}

fn int_list(s: &str, at: usize) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut pos = at;
    let mut out = Vec::new();
    for item in s.split(',') {
        out.push(int(item, pos)?);
        pos += item.len() + 1;
    }
    Ok(out)
}

fn int(s: &str, at: usize) -> Result<i64> {
    s.trim().parse().map_err(|_| parse_err(at, &format!("expected an integer, got {s:?}")))
}

fn parse_err(offset: usize, message: &str) -> LabError {
    LabError::Parse { offset, message: message.to_string() }
}
