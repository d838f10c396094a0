//! Incidence structures built from families of regular subspaces.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::SubspaceBasis;
use crate::error::{Error, Result};
use crate::projspace::{pencil_elements, Geometry, PencilSpec};
use crate::regular::{criterion, families, is_regular_fast};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructureName {
    G1,
    B1,
    C1,
    G2,
    B2,
    C2,
    Gk(usize),
    Pk(usize),
    ProjG2,
    /// Affine points and all affine lines.
    Affine,
    /// Image of a structure under `U -> U^perp`.
    Dual(Box<StructureName>),
}

impl fmt::Display for StructureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureName::G1 => f.write_str("G1"),
            StructureName::B1 => f.write_str("B1"),
            StructureName::C1 => f.write_str("C1"),
            StructureName::G2 => f.write_str("G2"),
            StructureName::B2 => f.write_str("B2"),
            StructureName::C2 => f.write_str("C2"),
            StructureName::Gk(k) => write!(f, "G{k}k"),
            StructureName::Pk(k) => write!(f, "P{k}k"),
            StructureName::ProjG2 => f.write_str("ProjG2"),
            StructureName::Affine => f.write_str("Affine"),
            StructureName::Dual(inner) => write!(f, "Dual({inner})"),
        }
    }
}

impl StructureName {
    pub fn parse(s: &str) -> Option<StructureName> {
        Some(match s {
            "G1" => StructureName::G1,
            "B1" => StructureName::B1,
            "C1" => StructureName::C1,
            "G2" => StructureName::G2,
            "B2" => StructureName::B2,
            "C2" => StructureName::C2,
            "ProjG2" => StructureName::ProjG2,
            "Affine" => StructureName::Affine,
            _ => {
                if let Some(inner) = s.strip_prefix("Dual(").and_then(|r| r.strip_suffix(')')) {
                    return StructureName::parse(inner).map(|n| StructureName::Dual(Box::new(n)));
                }
                let (head, tail) = (s.get(..1)?, s.get(1..)?);
                let k: usize = tail.strip_suffix('k')?.parse().ok()?;
                match head {
                    "G" => StructureName::Gk(k),
                    "P" => StructureName::Pk(k),
                    _ => return None,
                }
            }
        })
    }
}

/// A point or block label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Subspace(SubspaceBasis),
    Pencil(PencilSpec),
    /// A point added by a reconstruction, with no subspace behind it yet.
    Fresh(u32),
}

impl Label {
    pub fn subspace(&self) -> Option<&SubspaceBasis> {
        match self {
            Label::Subspace(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Subspace(s) => s.fmt(f),
            Label::Pencil(p) => p.fmt(f),
            Label::Fresh(i) => write!(f, "fresh{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    pub label: Label,
    /// Sorted indices into the point list.
    pub points: Vec<u32>,
}

/// Labeled points and labeled blocks, both in canonical (sorted) order.
/// Equality compares the labeled carriers and ignores the name.
#[derive(Clone, Debug)]
pub struct IncidenceStructure {
    pub name: StructureName,
    pub points: Vec<Label>,
    pub blocks: Vec<Block>,
}

impl PartialEq for IncidenceStructure {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.blocks == other.blocks
    }
}

impl Eq for IncidenceStructure {}

impl IncidenceStructure {
    /// Sort points and blocks into canonical order, remapping indices.
    pub fn from_parts(
        name: StructureName,
        points: Vec<Label>,
        blocks: Vec<(Label, Vec<Label>)>,
    ) -> Result<IncidenceStructure> {
        let mut pts = points;
        pts.sort_unstable();
        pts.dedup();
        let mut out = Vec::with_capacity(blocks.len());
        for (label, members) in blocks {
            let mut idx = Vec::with_capacity(members.len());
            for m in &members {
                let i = pts.binary_search(m).map_err(|_| Error::UnknownLabel(format!("{m}")))?;
                idx.push(i as u32);
            }
            idx.sort_unstable();
            idx.dedup();
            out.push(Block { label, points: idx });
        }
        out.sort_unstable();
        Ok(IncidenceStructure {
            name,
            points: pts,
            blocks: out,
        })
    }

    /// Build from already-sorted labels and index sets; blocks get sorted.
    pub fn from_indexed(name: StructureName, points: Vec<Label>, mut blocks: Vec<Block>) -> IncidenceStructure {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        for b in &mut blocks {
            b.points.sort_unstable();
        }
        blocks.sort_unstable();
        IncidenceStructure { name, points, blocks }
    }

    pub fn point_index(&self, label: &Label) -> Option<u32> {
        self.points.binary_search(label).ok().map(|i| i as u32)
    }

    pub fn block_index(&self, label: &Label) -> Option<u32> {
        self.blocks
            .binary_search_by(|b| b.label.cmp(label))
            .ok()
            .map(|i| i as u32)
    }

    pub fn point_label(&self, i: u32) -> &Label {
        &self.points[i as usize]
    }

    /// For each point, the sorted list of blocks through it.
    pub fn point_blocks(&self) -> Vec<Vec<u32>> {
        let mut pb = alloc::vec![Vec::new(); self.points.len()];
        for (j, b) in self.blocks.iter().enumerate() {
            for &p in &b.points {
                pb[p as usize].push(j as u32);
            }
        }
        pb
    }

    /// Block sizes, if all blocks have the same size.
    pub fn uniform_block_size(&self) -> Option<usize> {
        let first = self.blocks.first()?.points.len();
        self.blocks.iter().all(|b| b.points.len() == first).then_some(first)
    }

    /// Point labels of a block.
    pub fn block_labels(&self, j: usize) -> impl Iterator<Item = &Label> + '_ {
        self.blocks[j].points.iter().map(move |&p| &self.points[p as usize])
    }

    /// Drop the given points and blocks, remapping indices.
    pub fn without(&self, name: StructureName, drop_points: &[u32], drop_blocks: &[u32]) -> IncidenceStructure {
        let mut remap = alloc::vec![u32::MAX; self.points.len()];
        let mut points = Vec::new();
        for (i, l) in self.points.iter().enumerate() {
            if drop_points.binary_search(&(i as u32)).is_err() {
                remap[i] = points.len() as u32;
                points.push(*l);
            }
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(j, _)| drop_blocks.binary_search(&(*j as u32)).is_err())
            .map(|(_, b)| Block {
                label: b.label,
                points: b
                    .points
                    .iter()
                    .map(|&p| remap[p as usize])
                    .filter(|&p| p != u32::MAX)
                    .collect(),
            })
            .collect();
        IncidenceStructure::from_indexed(name, points, blocks)
    }
}

fn subspace_labels(v: &[SubspaceBasis]) -> Vec<Label> {
    v.iter().map(|s| Label::Subspace(*s)).collect()
}

/// Points are `points`, blocks are `blocks`, incidence is containment.
/// Both inputs sorted; point dimension one less than block dimension.
fn containment(
    geom: &Geometry,
    name: StructureName,
    points: &[SubspaceBasis],
    blocks: &[SubspaceBasis],
) -> IncidenceStructure {
    let pl = subspace_labels(points);
    let out: Vec<Block> = blocks
        .iter()
        .map(|b| {
            let subs = if b.dim() == 2 {
                geom.points_of(b)
            } else {
                geom.subspaces_of(b, b.dim() - 1)
            };
            let idx = subs
                .iter()
                .filter_map(|s| points.binary_search(s).ok().map(|i| i as u32))
                .collect();
            Block {
                label: Label::Subspace(*b),
                points: idx,
            }
        })
        .collect();
    IncidenceStructure::from_indexed(name, pl, out)
}

pub fn build(geom: &Geometry, name: StructureName) -> Result<IncidenceStructure> {
    if geom.is_symplectic() {
        return Err(Error::Symplectic);
    }
    let n = geom.n();
    let need = |d: usize| {
        if n < d {
            Err(Error::BadDimension(n))
        } else {
            Ok(())
        }
    };
    Ok(match &name {
        StructureName::G1 => {
            need(2)?;
            let (f1, f2) = (families(geom, 1)?, families(geom, 2)?);
            containment(geom, name, &f1.r_k, &f2.r_k)
        }
        StructureName::B1 => {
            need(2)?;
            let (f1, f2) = (families(geom, 1)?, families(geom, 2)?);
            containment(geom, name, &f1.a_k_circ, &f2.a_k)
        }
        StructureName::C1 => {
            need(2)?;
            let (f1, f2) = (families(geom, 1)?, families(geom, 2)?);
            containment(geom, name, &f1.a_k_circ, &f2.l_r)
        }
        StructureName::G2 | StructureName::B2 | StructureName::C2 => {
            need(4)?;
            let (f2, f3) = (families(geom, 2)?, families(geom, 3)?);
            let pts = match name {
                StructureName::G2 => &f2.r_k,
                StructureName::B2 => &f2.a_k_circ,
                _ => &f2.l_r,
            };
            containment(geom, name.clone(), pts, &f3.r_k)
        }
        StructureName::Gk(k) => {
            let k = *k;
            if k == 0 || k >= n {
                return Err(Error::BadDimension(k));
            }
            let (fk, fk1) = (families(geom, k)?, families(geom, k + 1)?);
            containment(geom, name, &fk.r_k, &fk1.r_k)
        }
        StructureName::Pk(k) => regular_pencils(geom, *k)?,
        StructureName::ProjG2 => {
            need(3)?;
            containment(geom, name, geom.subspaces(2)?, geom.subspaces(3)?)
        }
        StructureName::Affine => {
            need(2)?;
            let pts: Vec<SubspaceBasis> = geom
                .subspaces(1)?
                .iter()
                .filter(|p| geom.is_affine(p))
                .copied()
                .collect();
            let lines: Vec<SubspaceBasis> = geom
                .subspaces(2)?
                .iter()
                .filter(|l| geom.is_affine(l))
                .copied()
                .collect();
            containment(geom, name, &pts, &lines)
        }
        StructureName::Dual(inner) => perp_dual(geom, &build(geom, (**inner).clone())?)?,
    })
}

/// Points `R_k`, blocks the regular pencils `p(H, B)` with `H` in
/// `R_{k-1}`, `B` in `R_{k+1}`.
fn regular_pencils(geom: &Geometry, k: usize) -> Result<IncidenceStructure> {
    let n = geom.n();
    if k == 0 || k >= n {
        return Err(Error::BadDimension(k));
    }
    let points = families(geom, k)?.r_k;
    let hubs: Vec<SubspaceBasis> = if k == 1 {
        alloc::vec![SubspaceBasis::zero(n)]
    } else {
        families(geom, k - 1)?.r_k
    };
    let mut blocks = Vec::new();
    for hub in &hubs {
        for bound in geom.subspaces_containing(hub, k + 1) {
            if !criterion(geom, &bound)? {
                continue;
            }
            let spec = PencilSpec { hub: *hub, bound };
            let members: Vec<u32> = pencil_elements(geom, &spec)?
                .iter()
                .filter(|u| is_regular_fast(geom, u))
                .map(|u| points.binary_search(u).unwrap() as u32)
                .collect();
            blocks.push(Block {
                label: Label::Pencil(spec),
                points: members,
            });
        }
    }
    Ok(IncidenceStructure::from_indexed(
        StructureName::Pk(k),
        subspace_labels(&points),
        blocks,
    ))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Isolated {
    pub points: Vec<u32>,
    pub blocks: Vec<u32>,
}

/// Points on no block and blocks through no point.
pub fn isolated(s: &IncidenceStructure) -> Isolated {
    let mut on = alloc::vec![false; s.points.len()];
    for b in &s.blocks {
        for &p in &b.points {
            on[p as usize] = true;
        }
    }
    Isolated {
        points: (0..s.points.len() as u32).filter(|&i| !on[i as usize]).collect(),
        blocks: (0..s.blocks.len() as u32)
            .filter(|&j| s.blocks[j as usize].points.is_empty())
            .collect(),
    }
}

/// Remove isolated objects.
pub fn strip_isolated(s: &IncidenceStructure, name: StructureName) -> IncidenceStructure {
    let iso = isolated(s);
    s.without(name, &iso.points, &iso.blocks)
}

fn dual_name(name: &StructureName) -> StructureName {
    match name {
        StructureName::Dual(inner) => (**inner).clone(),
        other => StructureName::Dual(Box::new(other.clone())),
    }
}

/// Apply `U -> U^perp` to every label and swap points with blocks.
pub fn perp_dual(geom: &Geometry, s: &IncidenceStructure) -> Result<IncidenceStructure> {
    let perp_label = |l: &Label| -> Result<Label> {
        match l {
            Label::Subspace(u) => Ok(Label::Subspace(geom.perp(u))),
            other => Err(Error::UnknownLabel(format!("{other}"))),
        }
    };
    let new_points_unsorted: Vec<Label> = s.blocks.iter().map(|b| perp_label(&b.label)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..new_points_unsorted.len()).collect();
    order.sort_unstable_by(|&a, &b| new_points_unsorted[a].cmp(&new_points_unsorted[b]));
    let mut rank = alloc::vec![0u32; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as u32;
    }
    let points: Vec<Label> = order.iter().map(|&i| new_points_unsorted[i]).collect();
    let pb = s.point_blocks();
    let blocks = s
        .points
        .iter()
        .zip(&pb)
        .map(|(l, through)| {
            Ok(Block {
                label: perp_label(l)?,
                points: through.iter().map(|&j| rank[j as usize]).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IncidenceStructure::from_indexed(dual_name(&s.name), points, blocks))
}

/// Explicit label tables for points and blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Morphism {
    pub points: BTreeMap<Label, Label>,
    pub blocks: BTreeMap<Label, Label>,
}

impl Morphism {
    pub fn identity(s: &IncidenceStructure) -> Morphism {
        Morphism {
            points: s.points.iter().map(|l| (*l, *l)).collect(),
            blocks: s.blocks.iter().map(|b| (b.label, b.label)).collect(),
        }
    }

    pub fn from_fn(s: &IncidenceStructure, f: impl Fn(&Label) -> Label) -> Morphism {
        Morphism {
            points: s.points.iter().map(|l| (*l, f(l))).collect(),
            blocks: s.blocks.iter().map(|b| (b.label, f(&b.label))).collect(),
        }
    }
}

/// Whether `m` is a bijection on points and on blocks that preserves and
/// reflects incidence.
pub fn morphism_check(s: &IncidenceStructure, t: &IncidenceStructure, m: &Morphism) -> Result<bool> {
    let mut pmap = Vec::with_capacity(s.points.len());
    for l in &s.points {
        let img = m.points.get(l).ok_or(Error::PartialMap)?;
        pmap.push(t.point_index(img));
    }
    let mut bmap = Vec::with_capacity(s.blocks.len());
    for b in &s.blocks {
        let img = m.blocks.get(&b.label).ok_or(Error::PartialMap)?;
        bmap.push(t.block_index(img));
    }
    if s.points.len() != t.points.len() || s.blocks.len() != t.blocks.len() {
        return Ok(false);
    }
    let (Some(pmap), Some(bmap)) = (
        pmap.into_iter().collect::<Option<Vec<u32>>>(),
        bmap.into_iter().collect::<Option<Vec<u32>>>(),
    ) else {
        return Ok(false);
    };
    let injective = |v: &[u32]| {
        let mut w = v.to_vec();
        w.sort_unstable();
        w.windows(2).all(|x| x[0] != x[1])
    };
    if !injective(&pmap) || !injective(&bmap) {
        return Ok(false);
    }
    // same incidence count plus preservation gives reflection
    for (j, b) in s.blocks.iter().enumerate() {
        let target = &t.blocks[bmap[j] as usize].points;
        if target.len() != b.points.len() {
            return Ok(false);
        }
        if !b
            .points
            .iter()
            .all(|&p| target.binary_search(&pmap[p as usize]).is_ok())
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Short human summary, e.g. for the `info` command.
pub fn describe(s: &IncidenceStructure) -> String {
    format!("{}: {} points, {} blocks", s.name, s.points.len(), s.blocks.len())
}
