//! Structures whose points are lines and whose blocks are planes: triangles,
//! the pencil relation, stars, adjacency, and the recovery of the
//! structure of regular points and regular affine lines.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::algebra::SubspaceBasis;
use crate::error::{Error, Result};
use crate::projspace::Geometry;
use crate::structures::{perp_dual, strip_isolated, Block, IncidenceStructure, Label, StructureName};

use super::affine::identify;

/// Incidence helper: blocks per point and the collinearity graph as bitsets.
pub struct LineHost<'a> {
    s: &'a IncidenceStructure,
    point_blocks: Vec<Vec<u32>>,
    nbr: Vec<FixedBitSet>,
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl<'a> LineHost<'a> {
    pub fn new(s: &'a IncidenceStructure) -> LineHost<'a> {
        let np = s.points.len();
        let mut nbr = vec![FixedBitSet::with_capacity(np); np];
        for b in &s.blocks {
            for &x in &b.points {
                for &y in &b.points {
                    if x != y {
                        nbr[x as usize].insert(y as usize);
                    }
                }
            }
        }
        LineHost {
            s,
            point_blocks: s.point_blocks(),
            nbr,
        }
    }

    pub fn structure(&self) -> &IncidenceStructure {
        self.s
    }

    pub fn num_points(&self) -> usize {
        self.s.points.len()
    }

    pub fn index(&self, l: &Label) -> Result<u32> {
        self.s.point_index(l).ok_or_else(|| Error::UnknownLabel(format!("{l}")))
    }

    fn block_has(&self, block: u32, p: u32) -> bool {
        self.s.blocks[block as usize].points.binary_search(&p).is_ok()
    }

    pub fn block_points(&self, block: u32) -> &[u32] {
        &self.s.blocks[block as usize].points
    }

    pub fn common_blocks(&self, a: u32, b: u32) -> Vec<u32> {
        intersect(&self.point_blocks[a as usize], &self.point_blocks[b as usize])
    }

    /// Two distinct points on a common block.
    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        self.nbr[a as usize].contains(b as usize)
    }

    pub fn neighbours(&self, a: u32) -> &FixedBitSet {
        &self.nbr[a as usize]
    }

    /// Sides `[A23, A13, A12]` of a triangle with the given vertices, side
    /// `i` containing the other two vertices and not vertex `i`.
    pub fn triangle(&self, l1: u32, l2: u32, l3: u32) -> Option<[u32; 3]> {
        if l1 == l2 || l2 == l3 || l1 == l3 {
            return None;
        }
        let side = |x: u32, y: u32, off: u32| {
            self.common_blocks(x, y)
                .into_iter()
                .find(|&blk| !self.block_has(blk, off))
        };
        Some([side(l2, l3, l1)?, side(l1, l3, l2)?, side(l1, l2, l3)?])
    }

    /// The relation defined by the pencil formula: some block holds all
    /// three, and some point off that block is collinear with each.
    pub fn collinear(&self, l1: u32, l2: u32, l3: u32) -> bool {
        let common = intersect(&self.common_blocks(l1, l2), &self.point_blocks[l3 as usize]);
        self.collinear_in(l1, l2, l3, &common)
    }

    /// Points adjacent to both `a` and `b`.
    pub fn pair_common(&self, a: u32, b: u32) -> FixedBitSet {
        let mut ab = self.nbr[a as usize].clone();
        ab.intersect_with(&self.nbr[b as usize]);
        ab
    }

    /// The pencil relation for a triple on the block `blk`, given the
    /// common neighbours `ab` of the first two.
    pub fn collinear_on_block(&self, ab: &FixedBitSet, l: u32, blk: u32) -> bool {
        self.off_block_common(ab, l, blk)
    }

    fn off_block_common(&self, ab: &FixedBitSet, l: u32, blk: u32) -> bool {
        let c = self.nbr[l as usize].as_slice();
        for (w, (x, z)) in ab.as_slice().iter().zip(c).enumerate() {
            let mut word = x & z;
            while word != 0 {
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                if !self.block_has(blk, (w * usize::BITS as usize + bit) as u32) {
                    return true;
                }
            }
        }
        false
    }

    fn collinear_in(&self, l1: u32, l2: u32, l3: u32, blocks: &[u32]) -> bool {
        if blocks.is_empty() {
            return false;
        }
        let (a, b, c) = (
            self.nbr[l1 as usize].as_slice(),
            self.nbr[l2 as usize].as_slice(),
            self.nbr[l3 as usize].as_slice(),
        );
        for &blk in blocks {
            for (w, ((x, y), z)) in a.iter().zip(b).zip(c).enumerate() {
                let mut word = x & y & z;
                while word != 0 {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    let l0 = (w * usize::BITS as usize + bit) as u32;
                    if !self.block_has(blk, l0) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Classes of the pencil relation. Each lies on one block and is found
    /// from a pair of its members.
    pub fn pencil_classes(&self) -> Vec<Vec<u32>> {
        let mut out = BTreeSet::new();
        for (bi, b) in self.s.blocks.iter().enumerate() {
            let pts = &b.points;
            let m = pts.len();
            let mut done = vec![false; m * m];
            for i in 0..m {
                for j in i + 1..m {
                    if done[i * m + j] {
                        continue;
                    }
                    let (x, y) = (pts[i], pts[j]);
                    let common = intersect(&self.common_blocks(x, y), &[bi as u32]);
                    let mut class = vec![i, j];
                    for (k, &z) in pts.iter().enumerate() {
                        if k != i && k != j && self.collinear_in(x, y, z, &common) {
                            class.push(k);
                        }
                    }
                    for &u in &class {
                        for &v in &class {
                            done[u * m + v] = true;
                        }
                    }
                    let mut c: Vec<u32> = class.iter().map(|&k| pts[k]).collect();
                    c.sort_unstable();
                    out.insert(c);
                }
            }
        }
        out.into_iter().collect()
    }

    /// `S_delta`, `S_L` and their union with the pencil.
    pub fn star_closure(&self, pencil: &[u32]) -> Result<StarSets> {
        if pencil.is_empty() {
            return Err(Error::EmptyPencil);
        }
        let np = self.num_points();
        let mut in_q = FixedBitSet::with_capacity(np);
        for &l in pencil {
            in_q.insert(l as usize);
        }
        let mut delta = FixedBitSet::with_capacity(np);
        for (i, &l1) in pencil.iter().enumerate() {
            for &l2 in &pencil[i + 1..] {
                let mut cand = self.nbr[l1 as usize].clone();
                cand.intersect_with(&self.nbr[l2 as usize]);
                cand.difference_with(&delta);
                for l in cand.ones() {
                    if self.triangle(l as u32, l1, l2).is_some() {
                        delta.insert(l);
                    }
                }
            }
        }
        let s_delta: Vec<u32> = delta.ones().map(|i| i as u32).collect();
        let mut lset = FixedBitSet::with_capacity(np);
        let mut seen: BTreeMap<u32, Vec<FixedBitSet>> = BTreeMap::new();
        for (i, &a) in s_delta.iter().enumerate() {
            for &b in &s_delta[i + 1..] {
                for blk in self.common_blocks(a, b) {
                    let classes = seen.entry(blk).or_default();
                    if classes.iter().any(|c| c.contains(a as usize) && c.contains(b as usize)) {
                        continue;
                    }
                    let ab = self.pair_common(a, b);
                    let mut class = FixedBitSet::with_capacity(np);
                    for &l in self.block_points(blk) {
                        if self.off_block_common(&ab, l, blk) {
                            class.insert(l as usize);
                        }
                    }
                    lset.union_with(&class);
                    class.insert(a as usize);
                    class.insert(b as usize);
                    classes.push(class);
                }
            }
        }
        let s_l: Vec<u32> = lset.ones().map(|i| i as u32).collect();
        let mut all = in_q;
        all.union_with(&delta);
        all.union_with(&lset);
        Ok(StarSets {
            s_delta,
            s_l,
            s: all.ones().map(|i| i as u32).collect(),
        })
    }

    /// Whether, within `star`, any point nonadjacent to two others forces
    /// those two to be nonadjacent.
    pub fn nonadjacency_closed(&self, star: &[u32]) -> bool {
        for &l in star {
            let far: Vec<u32> = star
                .iter()
                .copied()
                .filter(|&x| x != l && !self.adjacent(l, x))
                .collect();
            for (i, &a) in far.iter().enumerate() {
                for &b in &far[i + 1..] {
                    if self.adjacent(a, b) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Proper when the closure condition fails.
    pub fn point_kind(&self, star: &[u32]) -> PointKind {
        if self.nonadjacency_closed(star) {
            PointKind::Improper
        } else {
            PointKind::Proper
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StarSets {
    pub s_delta: Vec<u32>,
    pub s_l: Vec<u32>,
    pub s: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    Proper,
    Improper,
}

pub fn triangle_rel(x: &IncidenceStructure, l1: &Label, l2: &Label, l3: &Label) -> Result<bool> {
    let h = LineHost::new(x);
    Ok(h.triangle(h.index(l1)?, h.index(l2)?, h.index(l3)?).is_some())
}

pub fn collinear_rel(x: &IncidenceStructure, l1: &Label, l2: &Label, l3: &Label) -> Result<bool> {
    let h = LineHost::new(x);
    Ok(h.collinear(h.index(l1)?, h.index(l2)?, h.index(l3)?))
}

pub fn star_closure(x: &IncidenceStructure, pencil: &[u32]) -> Result<StarSets> {
    LineHost::new(x).star_closure(pencil)
}

pub fn point_kind(x: &IncidenceStructure, pencil: &[u32]) -> Result<PointKind> {
    let h = LineHost::new(x);
    Ok(h.point_kind(&h.star_closure(pencil)?.s))
}

/// The cases in which two concurrent regular lines are predicted not to
/// lie on a common regular plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nonadjacency {
    /// Affine vertex, orthogonal points at infinity.
    OrthogonalDirections,
    /// Vertex and both lines on `H`.
    BothInH,
    /// Vertex on `H`, both lines affine, vertex orthogonal to their span at
    /// infinity.
    VertexOrthogonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adjacency {
    pub adjacent: bool,
    pub vertex: SubspaceBasis,
    pub predicted: Option<Nonadjacency>,
}

/// Adjacency in `x` of two concurrent lines, with the predicted case.
pub fn adjacency(geom: &Geometry, x: &IncidenceStructure, l1: &Label, l2: &Label) -> Result<Adjacency> {
    let h = LineHost::new(x);
    let (i, j) = (h.index(l1)?, h.index(l2)?);
    let (Some(a), Some(b)) = (l1.subspace(), l2.subspace()) else {
        return Err(Error::UnknownLabel(format!("{l1}")));
    };
    let p = geom.meet(a, b);
    if a == b || p.dim() != 1 {
        return Err(Error::NotConcurrent);
    }
    let hh = geom.h();
    let predicted = if geom.is_affine(&p) {
        let (u, v) = (geom.meet(a, hh), geom.meet(b, hh));
        (geom.xi(u.row(0), v.row(0)) == 0).then_some(Nonadjacency::OrthogonalDirections)
    } else if !geom.is_affine(a) && !geom.is_affine(b) {
        Some(Nonadjacency::BothInH)
    } else if geom.is_affine(a) && geom.is_affine(b) {
        let inf = geom.meet(&geom.join(a, b), hh);
        let orth = inf.rows().all(|r| geom.xi(p.row(0), r) == 0);
        orth.then_some(Nonadjacency::VertexOrthogonal)
    } else {
        None
    };
    Ok(Adjacency {
        adjacent: h.adjacent(i, j),
        vertex: p,
        predicted,
    })
}

/// Stars of the pencils of `host`, one per vertex, each found from the
/// first pencil not already inside a found star.
pub fn stars(host: &LineHost) -> Result<Vec<StarSets>> {
    let np = host.num_points();
    let mut found: Vec<StarSets> = Vec::new();
    let mut member: Vec<Vec<u32>> = vec![Vec::new(); np];
    for q in host.pencil_classes() {
        let covered = q.len() >= 2
            && member[q[0] as usize]
                .iter()
                .any(|&id| found[id as usize].s.binary_search(&q[1]).is_ok());
        if covered {
            continue;
        }
        let st = host.star_closure(&q)?;
        for &l in &st.s {
            member[l as usize].push(found.len() as u32);
        }
        found.push(st);
    }
    Ok(found)
}

/// The structure of regular points and regular affine lines recovered from
/// `source`, one of the line structures `B2`, `C2` or `G_{n-2}`. The
/// geometry is used only to name what is recovered.
pub fn rebuild_b1(geom: &Geometry, source: &IncidenceStructure) -> Result<IncidenceStructure> {
    let n = geom.n();
    if n < 4 {
        return Err(Error::BadDimension(n));
    }
    let name = StructureName::B1;
    match &source.name {
        StructureName::Gk(k) if *k + 2 == n => {
            let g1 = perp_dual(geom, source)?;
            return Ok(strip_isolated(&g1, name));
        }
        StructureName::G2 if n == 4 => {
            let g1 = perp_dual(geom, source)?;
            return Ok(strip_isolated(&g1, name));
        }
        StructureName::B2 if n == 4 => {
            let mut d = perp_dual(geom, source)?;
            d.name = name;
            return Ok(d);
        }
        StructureName::B2 | StructureName::C2 => {}
        other => return Err(Error::Malformed(format!("no recovery from {other}"))),
    }
    let host = LineHost::new(source);
    let all = stars(&host)?;
    // in three-space the closure test cannot separate the kinds; in C2 the
    // stars of affine points are the larger ones
    let by_size = n == 4;
    let largest = all.iter().map(|st| st.s.len()).max().unwrap_or(0);
    let proper: Vec<&StarSets> = all
        .iter()
        .filter(|st| {
            if by_size {
                st.s.len() == largest
            } else {
                host.point_kind(&st.s) == PointKind::Proper
            }
        })
        .collect();
    let np_lines = host.num_points();
    let mut point_stars: Vec<Vec<u32>> = vec![Vec::new(); np_lines];
    for (i, st) in proper.iter().enumerate() {
        for &l in &st.s {
            point_stars[l as usize].push(i as u32);
        }
    }
    let mut blocks: Vec<Block> = point_stars
        .iter()
        .enumerate()
        .filter(|(_, ps)| !ps.is_empty())
        .map(|(l, ps)| Block {
            label: *source.point_label(l as u32),
            points: ps.clone(),
        })
        .collect();
    // pairs of points on no host line and on no common block lie on a
    // line through b
    let np = proper.len();
    let mut joined = FixedBitSet::with_capacity(np * np);
    let mark = |pts: &[u32], bits: &mut FixedBitSet| {
        for &x in pts {
            for &y in pts {
                bits.insert(x as usize * np + y as usize);
            }
        }
    };
    for ps in &point_stars {
        mark(ps, &mut joined);
    }
    let mut coplanar = joined.clone();
    for b in &source.blocks {
        let mut pts: Vec<u32> = b
            .points
            .iter()
            .flat_map(|&l| point_stars[l as usize].iter().copied())
            .collect();
        pts.sort_unstable();
        pts.dedup();
        mark(&pts, &mut coplanar);
    }
    let mut assigned = vec![false; np];
    let mut fresh = 0u32;
    for x in 0..np {
        if assigned[x] {
            continue;
        }
        let class: Vec<u32> = (0..np)
            .filter(|&y| y == x || !coplanar.contains(x * np + y))
            .map(|y| y as u32)
            .collect();
        if class.len() > 1 {
            for &y in &class {
                assigned[y as usize] = true;
            }
            blocks.push(Block {
                label: Label::Fresh(fresh),
                points: class,
            });
            fresh += 1;
        }
    }
    let labels: Vec<Label> = proper
        .iter()
        .map(|st| star_vertex(geom, source, &st.s))
        .collect::<Result<_>>()?;
    let members: Vec<(Label, Vec<Label>)> = blocks
        .into_iter()
        .map(|b| (b.label, b.points.iter().map(|&p| labels[p as usize]).collect()))
        .collect();
    let s = IncidenceStructure::from_parts(name.clone(), labels, members)?;
    identify(geom, &s, name)
}

/// The common point of the lines of a star.
fn star_vertex(geom: &Geometry, host: &IncidenceStructure, star: &[u32]) -> Result<Label> {
    let mut acc: Option<SubspaceBasis> = None;
    for &l in star {
        let Label::Subspace(line) = host.point_label(l) else {
            return Err(Error::UnknownLabel(format!("{}", host.point_label(l))));
        };
        acc = Some(match acc {
            None => *line,
            Some(a) => geom.meet(&a, line),
        });
    }
    match acc {
        Some(p) if p.dim() == 1 => Ok(Label::Subspace(p)),
        _ => Err(Error::Malformed("star without a common point".into())),
    }
}
