//! The INC1 text format.
//!
//! ```text
//! INC1
//! field gf <q> poly <modulus>
//! space n <n> form <kind>
//! structure <name>
//! points <count>
//! <index> <row codes> [| <row codes> ...]
//! blocks <count>
//! <index> <sorted point indices>
//! end
//! ```
//!
//! Blocks carry no labels in the file; an imported block is labelled
//! `Fresh(index)`.

use std::fmt::Write as _;
use std::path::Path;

use regra_core::algebra::{FieldCtx, SubspaceBasis, Vector};
use regra_core::metric::FormKind;
use regra_core::projspace::Geometry;
use regra_core::structures::{Block, IncidenceStructure, Label, StructureName};

use crate::error::{Error, Result};

pub fn to_string(geom: &Geometry, s: &IncidenceStructure) -> Result<String> {
    let ctx = geom.ctx();
    let mut out = String::new();
    out.push_str("INC1\n");
    let _ = writeln!(out, "field gf {} poly {}", ctx.order(), ctx.modulus());
    let _ = writeln!(out, "space n {} form {}", geom.n(), geom.kind());
    let _ = writeln!(out, "structure {}", s.name);
    let _ = writeln!(out, "points {}", s.points.len());
    for (i, p) in s.points.iter().enumerate() {
        let Label::Subspace(sub) = p else {
            return Err(Error::Unserializable(p.to_string()));
        };
        let _ = writeln!(out, "{i} {sub}");
    }
    let _ = writeln!(out, "blocks {}", s.blocks.len());
    for (j, b) in s.blocks.iter().enumerate() {
        let _ = write!(out, "{j}");
        for p in &b.points {
            let _ = write!(out, " {p}");
        }
        out.push('\n');
    }
    out.push_str("end\n");
    Ok(out)
}

pub fn export_inc(geom: &Geometry, s: &IncidenceStructure, path: &Path) -> Result<()> {
    std::fs::write(path, to_string(geom, s)?)?;
    Ok(())
}

/// A parsed file: the geometry of its header and the structure.
#[derive(Clone, Debug)]
pub struct Inc {
    pub geom: Geometry,
    pub structure: IncidenceStructure,
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    at: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let (i, l) = self.it.next().ok_or(Error::Parse {
            line: self.at + 1,
            msg: "unexpected end of file".into(),
        })?;
        self.at = i + 1;
        Ok(l)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.at,
            msg: msg.into(),
        }
    }

    /// The words after a fixed prefix.
    fn fields(&mut self, prefix: &str, count: usize) -> Result<Vec<&'a str>> {
        let l = self.next()?;
        let rest = l
            .strip_prefix(prefix)
            .ok_or_else(|| self.err(format!("expected `{prefix}`")))?;
        let w: Vec<&str> = rest.split(' ').collect();
        if w.len() != count {
            return Err(self.err(format!("expected {count} fields after `{prefix}`")));
        }
        Ok(w)
    }

    fn number<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad number `{s}`")))
    }
}

pub fn from_str(text: &str) -> Result<Inc> {
    let mut ls = Lines {
        it: text.lines().enumerate(),
        at: 0,
    };
    if ls.next()? != "INC1" {
        return Err(ls.err("missing INC1 magic"));
    }
    let f = ls.fields("field gf ", 3)?;
    if f[1] != "poly" {
        return Err(ls.err("expected `poly`"));
    }
    let q: u32 = ls.number(f[0])?;
    if !q.is_power_of_two() || q < 2 {
        return Err(ls.err("field order is not a power of two"));
    }
    let ctx = FieldCtx::with_modulus(q.trailing_zeros(), ls.number(f[2])?)?;
    let f = ls.fields("space n ", 3)?;
    if f[1] != "form" {
        return Err(ls.err("expected `form`"));
    }
    let n: usize = ls.number(f[0])?;
    let kind = FormKind::parse(f[2], n).ok_or_else(|| ls.err(format!("unknown form `{}`", f[2])))?;
    let geom = Geometry::new(ctx, n, kind)?;
    let f = ls.fields("structure ", 1)?;
    let name = StructureName::parse(f[0]).ok_or_else(|| ls.err(format!("unknown structure `{}`", f[0])))?;

    let f = ls.fields("points ", 1)?;
    let count: usize = ls.number(f[0])?;
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let l = ls.next()?;
        let (idx, rest) = l.split_once(' ').ok_or_else(|| ls.err("empty point line"))?;
        if ls.number::<usize>(idx)? != i {
            return Err(ls.err("point index out of sequence"));
        }
        let mut rows = Vec::new();
        for r in rest.split(" | ") {
            let codes: Vec<u8> = r.split(' ').map(|c| ls.number(c)).collect::<Result<_>>()?;
            if codes.len() != n || codes.iter().any(|&c| c as usize >= geom.q()) {
                return Err(ls.err("bad coordinates"));
            }
            rows.push(Vector::from_codes(&codes));
        }
        let sub = SubspaceBasis::span(geom.ctx(), n, &rows)?;
        if sub.dim() != rows.len() || !sub.rows().eq(rows.iter().copied()) {
            return Err(ls.err("rows are not in reduced echelon form"));
        }
        let label = Label::Subspace(sub);
        if points.last().is_some_and(|p| *p >= label) {
            return Err(ls.err("points are not in canonical order"));
        }
        points.push(label);
    }

    let f = ls.fields("blocks ", 1)?;
    let count: usize = ls.number(f[0])?;
    let mut blocks = Vec::with_capacity(count);
    for j in 0..count {
        let l = ls.next()?;
        let mut w = l.split(' ');
        if ls.number::<usize>(w.next().unwrap_or(""))? != j {
            return Err(ls.err("block index out of sequence"));
        }
        let pts: Vec<u32> = w.map(|x| ls.number(x)).collect::<Result<_>>()?;
        if pts.windows(2).any(|p| p[0] >= p[1]) || pts.last().is_some_and(|&p| p as usize >= points.len()) {
            return Err(ls.err("block points are not sorted point indices"));
        }
        blocks.push(Block {
            label: Label::Fresh(j as u32),
            points: pts,
        });
    }
    if ls.next()? != "end" {
        return Err(ls.err("expected `end`"));
    }
    if let Some((i, _)) = ls.it.next() {
        ls.at = i + 1;
        return Err(ls.err("trailing data after `end`"));
    }
    Ok(Inc {
        geom,
        structure: IncidenceStructure { name, points, blocks },
    })
}

pub fn import_inc(path: &Path) -> Result<Inc> {
    from_str(&std::fs::read_to_string(path)?)
}

/// Equal point labels and equal block incidences, position by position;
/// what an INC1 file records.
pub fn same_carriers(a: &IncidenceStructure, b: &IncidenceStructure) -> bool {
    a.name == b.name
        && a.points == b.points
        && a.blocks.len() == b.blocks.len()
        && a.blocks.iter().zip(&b.blocks).all(|(x, y)| x.points == y.points)
}
