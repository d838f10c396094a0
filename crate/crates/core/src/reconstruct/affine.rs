//! Recovering the affine space from the point-line structures of regular
//! points and regular affine lines.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::algebra::SubspaceBasis;
use crate::error::{Error, Result};
use crate::projspace::Geometry;
use crate::structures::{Block, IncidenceStructure, Label, StructureName};

const NONE: u32 = u32::MAX;

/// A partial linear space with a join table.
pub struct PointLine<'a> {
    s: &'a IncidenceStructure,
    np: usize,
    point_lines: Vec<Vec<u32>>,
    join: Vec<u32>,
}

/// Three vertices and the three sides, side `i` opposite vertex `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub vertices: [u32; 3],
    pub sides: [u32; 3],
}

impl<'a> PointLine<'a> {
    pub fn new(s: &'a IncidenceStructure) -> PointLine<'a> {
        let np = s.points.len();
        let mut join = vec![NONE; np * np];
        for (j, b) in s.blocks.iter().enumerate() {
            for (i, &x) in b.points.iter().enumerate() {
                for &y in &b.points[i + 1..] {
                    join[x as usize * np + y as usize] = j as u32;
                    join[y as usize * np + x as usize] = j as u32;
                }
            }
        }
        PointLine {
            s,
            np,
            point_lines: s.point_blocks(),
            join,
        }
    }

    pub fn structure(&self) -> &IncidenceStructure {
        self.s
    }

    pub fn num_points(&self) -> usize {
        self.np
    }

    pub fn line_points(&self, j: u32) -> &[u32] {
        &self.s.blocks[j as usize].points
    }

    pub fn lines_through(&self, p: u32) -> &[u32] {
        &self.point_lines[p as usize]
    }

    pub fn join(&self, x: u32, y: u32) -> Option<u32> {
        let j = self.join[x as usize * self.np + y as usize];
        (j != NONE).then_some(j)
    }

    pub fn on(&self, p: u32, line: u32) -> bool {
        self.line_points(line).binary_search(&p).is_ok()
    }

    pub fn line_index(&self, label: &Label) -> Result<u32> {
        self.s
            .block_index(label)
            .ok_or_else(|| Error::UnknownLabel(format!("{label}")))
    }

    /// The formula for parallelism: no common point, and some point off
    /// both lines carries two distinct lines each meeting both.
    pub fn parallel(&self, m1: u32, m2: u32) -> bool {
        if m1 == m2 {
            return false;
        }
        let (p1, p2) = (self.line_points(m1), self.line_points(m2));
        if p1.iter().any(|x| p2.binary_search(x).is_ok()) {
            return false;
        }
        let mut transversals = Vec::new();
        for &x in p1 {
            for &y in p2 {
                if let Some(k) = self.join(x, y) {
                    transversals.push(k);
                }
            }
        }
        transversals.sort_unstable();
        transversals.dedup();
        let mut count = vec![0u8; self.np];
        for &k in &transversals {
            for &p in self.line_points(k) {
                if p1.binary_search(&p).is_ok() || p2.binary_search(&p).is_ok() {
                    continue;
                }
                count[p as usize] += 1;
                if count[p as usize] == 2 {
                    return true;
                }
            }
        }
        false
    }

    /// The triangle with the given vertices, if all three joins exist and
    /// the vertices are not collinear.
    pub fn triangle(&self, a: u32, b: u32, c: u32) -> Option<Triangle> {
        if a == b || b == c || a == c {
            return None;
        }
        let sides = [self.join(b, c)?, self.join(a, c)?, self.join(a, b)?];
        if self.on(a, sides[0]) {
            return None;
        }
        Some(Triangle {
            vertices: [a, b, c],
            sides,
        })
    }

    pub fn triangle_from_labels(&self, vertices: [&Label; 3], sides: [&Label; 3]) -> Result<Triangle> {
        let idx = |l: &Label| self.s.point_index(l).ok_or_else(|| Error::UnknownLabel(format!("{l}")));
        let v = [idx(vertices[0])?, idx(vertices[1])?, idx(vertices[2])?];
        let s = [
            self.line_index(sides[0])?,
            self.line_index(sides[1])?,
            self.line_index(sides[2])?,
        ];
        let t = Triangle { vertices: v, sides: s };
        for i in 0..3 {
            let count = (0..3).filter(|&j| self.on(v[i], s[j])).count();
            if count != 2 || self.on(v[i], s[i]) {
                return Err(Error::NotATriangle);
            }
        }
        Ok(t)
    }

    fn pi_bits(&self, t: &Triangle) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.np);
        let [l1, l2, l3] = t.sides;
        for (u, w) in [(l1, l2), (l2, l3), (l1, l3)] {
            for &a in self.line_points(u) {
                for &b in self.line_points(w) {
                    if a == b {
                        continue;
                    }
                    if let Some(k) = self.join(a, b) {
                        for &x in self.line_points(k) {
                            out.insert(x as usize);
                        }
                    }
                }
            }
        }
        out
    }

    /// Points on a line through two points taken from two different sides.
    pub fn pi(&self, t: &Triangle) -> Vec<u32> {
        self.pi_bits(t).ones().map(|i| i as u32).collect()
    }

    /// The distinct sets `pi(t)` over all triangles, sorted. With
    /// `skip_covered`, a triangle whose vertices already lie in a found
    /// set is not evaluated.
    pub fn pi_family(&self, skip_covered: bool) -> Vec<Vec<u32>> {
        let np = self.np;
        let mut sets: Vec<FixedBitSet> = Vec::new();
        let mut member: Vec<Vec<u32>> = vec![Vec::new(); np];
        let mut seen = alloc::collections::BTreeSet::new();
        for a in 0..np as u32 {
            for b in a + 1..np as u32 {
                let Some(ab) = self.join(a, b) else { continue };
                let mut covered = FixedBitSet::with_capacity(np);
                if skip_covered {
                    for &id in &member[a as usize] {
                        if sets[id as usize].contains(b as usize) {
                            covered.union_with(&sets[id as usize]);
                        }
                    }
                }
                for c in b + 1..np as u32 {
                    if covered.contains(c as usize) || self.on(c, ab) {
                        continue;
                    }
                    let Some(t) = self.triangle(a, b, c) else { continue };
                    let bits = self.pi_bits(&t);
                    let key: Vec<u32> = bits.ones().map(|i| i as u32).collect();
                    if seen.insert(key.clone()) {
                        if skip_covered {
                            covered.union_with(&bits);
                        }
                        for &x in &key {
                            member[x as usize].push(sets.len() as u32);
                        }
                        sets.push(bits);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Classes of the collinearity relation on points joined by no line:
    /// three pairwise unjoined points are related when two distinct
    /// `pi` sets contain all of them. When there is a single `pi` set (the
    /// space is a plane) one suffices.
    pub fn l0_classes(&self, pi_sets: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let np = self.np;
        let need = pi_sets.len().min(2) as u32;
        let bits: Vec<FixedBitSet> = pi_sets
            .iter()
            .map(|s| {
                let mut b = FixedBitSet::with_capacity(np);
                for &x in s {
                    b.insert(x as usize);
                }
                b
            })
            .collect();
        let mut member: Vec<Vec<u32>> = vec![Vec::new(); np];
        for (id, s) in pi_sets.iter().enumerate() {
            for &x in s {
                member[x as usize].push(id as u32);
            }
        }
        let mut done = FixedBitSet::with_capacity(np * np);
        let mut classes = Vec::new();
        let mut count = vec![0u32; np];
        for a in 0..np as u32 {
            for b in a + 1..np as u32 {
                if self.join(a, b).is_some() || done.contains(a as usize * np + b as usize) {
                    continue;
                }
                count.iter_mut().for_each(|c| *c = 0);
                for &id in &member[a as usize] {
                    if bits[id as usize].contains(b as usize) {
                        for x in bits[id as usize].ones() {
                            count[x] += 1;
                        }
                    }
                }
                let mut class = vec![a, b];
                for x in 0..np as u32 {
                    if x != a
                        && x != b
                        && count[x as usize] >= need.max(1)
                        && self.join(x, a).is_none()
                        && self.join(x, b).is_none()
                    {
                        class.push(x);
                    }
                }
                if class.len() < 3 {
                    continue;
                }
                class.sort_unstable();
                for &x in &class {
                    for &y in &class {
                        done.insert(x as usize * np + y as usize);
                    }
                }
                classes.push(class);
            }
        }
        classes.sort_unstable();
        classes.dedup();
        classes
    }

    /// Union of the lines, given ones and `extra`, meeting `pi` in at least
    /// two points.
    pub fn pi_prime(&self, pi: &[u32], extra: &[Vec<u32>]) -> Vec<u32> {
        let meets = |pts: &[u32]| pts.iter().filter(|x| pi.binary_search(x).is_ok()).count() >= 2;
        let mut out: Vec<u32> = self
            .s
            .blocks
            .iter()
            .map(|b| b.points.as_slice())
            .chain(extra.iter().map(|c| c.as_slice()))
            .filter(|pts| meets(pts))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// `parallel` by labels.
pub fn parallel_eq5(b1: &IncidenceStructure, m1: &Label, m2: &Label) -> Result<bool> {
    let pl = PointLine::new(b1);
    Ok(pl.parallel(pl.line_index(m1)?, pl.line_index(m2)?))
}

/// `pi` by labels.
pub fn pi_triangle(b1: &IncidenceStructure, vertices: [&Label; 3], sides: [&Label; 3]) -> Result<Vec<u32>> {
    let pl = PointLine::new(b1);
    let t = pl.triangle_from_labels(vertices, sides)?;
    Ok(pl.pi(&t))
}

pub fn l0_classes(b1: &IncidenceStructure) -> Vec<Vec<u32>> {
    let pl = PointLine::new(b1);
    let pis = pl.pi_family(true);
    pl.l0_classes(&pis)
}

/// Points and lines of the affine space, from the structure of regular
/// points and regular affine lines alone. New lines and the recovered
/// point `b*` carry `Fresh` labels, `b*` being `Fresh(0)`.
pub fn recover_affine(b1: &IncidenceStructure) -> Result<IncidenceStructure> {
    let pl = PointLine::new(b1);
    let q = b1
        .uniform_block_size()
        .ok_or_else(|| Error::Malformed("lines of unequal size".into()))?;
    let pis = pl.pi_family(true);
    let classes = pl.l0_classes(&pis);
    let deficient = classes.iter().any(|c| c.len() + 1 == q);
    let mut points = b1.points.clone();
    let bstar = points.len() as u32;
    if deficient {
        points.push(Label::Fresh(0));
    }
    let mut blocks = b1.blocks.clone();
    for (i, c) in classes.into_iter().enumerate() {
        let mut pts = c;
        if pts.len() + 1 == q {
            pts.push(bstar);
        }
        blocks.push(Block {
            label: Label::Fresh(i as u32),
            points: pts,
        });
    }
    Ok(IncidenceStructure::from_indexed(StructureName::Affine, points, blocks))
}

/// The structure of regular points and all regular affine lines, from the
/// one whose lines avoid `b`: the missing lines are the unjoined classes
/// meeting every `pi` set of size `q^2 - 1` in at most one point.
pub fn b1_from_c1(c1: &IncidenceStructure) -> Result<IncidenceStructure> {
    let pl = PointLine::new(c1);
    let q = c1
        .uniform_block_size()
        .ok_or_else(|| Error::Malformed("lines of unequal size".into()))?;
    let pis = pl.pi_family(true);
    let big: Vec<&Vec<u32>> = pis.iter().filter(|s| s.len() + 1 == q * q).collect();
    let classes = pl.l0_classes(&pis);
    let mut blocks = c1.blocks.clone();
    let mut fresh = 0;
    for c in classes {
        let thin = big
            .iter()
            .all(|s| c.iter().filter(|x| s.binary_search(x).is_ok()).count() <= 1);
        if thin {
            blocks.push(Block {
                label: Label::Fresh(fresh),
                points: c,
            });
            fresh += 1;
        }
    }
    Ok(IncidenceStructure::from_indexed(
        StructureName::B1,
        c1.points.clone(),
        blocks,
    ))
}

/// Replace `Fresh` labels by geometric ones: a fresh point becomes the
/// pole, a fresh block the span of its points.
pub fn identify(geom: &Geometry, s: &IncidenceStructure, name: StructureName) -> Result<IncidenceStructure> {
    let point_sub = |l: &Label| -> Result<Option<SubspaceBasis>> {
        Ok(match l {
            Label::Subspace(p) => Some(*p),
            Label::Fresh(_) => Some(*geom.pole_or_err()?),
            Label::Pencil(_) => None,
        })
    };
    let points: Vec<Label> = s
        .points
        .iter()
        .map(|l| Ok(point_sub(l)?.map_or(*l, Label::Subspace)))
        .collect::<Result<_>>()?;
    let mut blocks = Vec::with_capacity(s.blocks.len());
    for b in &s.blocks {
        let members: Vec<Label> = b.points.iter().map(|&p| points[p as usize]).collect();
        let label = match b.label {
            Label::Fresh(_) => {
                let mut span = SubspaceBasis::zero(geom.n());
                for m in &members {
                    if let Label::Subspace(p) = m {
                        span = geom.join(&span, p);
                    }
                }
                Label::Subspace(span)
            }
            other => other,
        };
        blocks.push((label, members));
    }
    IncidenceStructure::from_parts(name, points, blocks)
}

/// Affine points `a` with the line `a q` outside `a2`, where `q` is on `H`
/// and `a2` is the sorted list of regular affine lines.
pub fn bracket_q(geom: &Geometry, a2: &[SubspaceBasis], q: &SubspaceBasis) -> Result<Vec<SubspaceBasis>> {
    if q.dim() != 1 {
        return Err(Error::BadDimension(q.dim()));
    }
    if geom.is_affine(q) {
        return Err(Error::NotOnHorizon);
    }
    Ok(geom
        .subspaces(1)?
        .iter()
        .filter(|a| geom.is_affine(a) && a2.binary_search(&geom.join(a, q)).is_err())
        .copied()
        .collect())
}
