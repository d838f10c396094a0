//! Ground-truth predictions computed from the geometry itself, used to
//! audit the reconstructions that see only incidence.

use alloc::vec::Vec;

use crate::algebra::SubspaceBasis;
use crate::error::Result;
use crate::projspace::Geometry;
use crate::regular::{families, plane_profile};
use crate::structures::{IncidenceStructure, Label};

fn point_indices(s: &IncidenceStructure, pts: impl IntoIterator<Item = SubspaceBasis>) -> Vec<u32> {
    let mut v: Vec<u32> = pts
        .into_iter()
        .filter_map(|p| s.point_index(&Label::Subspace(p)))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Affine parallelism: distinct lines with the same point at infinity.
pub fn affine_parallel(geom: &Geometry, m1: &SubspaceBasis, m2: &SubspaceBasis) -> bool {
    m1 != m2 && geom.meet(m1, geom.h()) == geom.meet(m2, geom.h())
}

/// `[A]` for every plane with `rdim <= 1`, as point indices of `b1`.
pub fn plane_classes(geom: &Geometry, b1: &IncidenceStructure) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    for a in &families(geom, 3)?.p01 {
        let vertex = plane_profile(geom, a)?.vertex.map(|v| v.subspace());
        let pts = geom
            .points_of(a)
            .into_iter()
            .filter(|p| geom.is_affine(p) && Some(*p) != vertex);
        out.push(point_indices(b1, pts));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Affine nonregular lines.
pub fn nonregular_affine_lines(geom: &Geometry) -> Result<Vec<SubspaceBasis>> {
    let regular = families(geom, 2)?.r_k;
    Ok(geom
        .subspaces(2)?
        .iter()
        .filter(|l| geom.is_affine(l) && regular.binary_search(l).is_err())
        .copied()
        .collect())
}

/// Traces of the nonregular affine lines on the points of `b1`.
pub fn nonregular_traces(geom: &Geometry, b1: &IncidenceStructure) -> Result<Vec<Vec<u32>>> {
    let mut out: Vec<Vec<u32>> = nonregular_affine_lines(geom)?
        .iter()
        .map(|l| point_indices(b1, geom.points_of(l)))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Affine points on `q^perp`.
pub fn perp_affine_points(geom: &Geometry, q: &SubspaceBasis) -> Vec<SubspaceBasis> {
    geom.points_of(&geom.perp(q))
        .into_iter()
        .filter(|p| geom.is_affine(p))
        .collect()
}

/// A planar pencil of host lines: vertex, plane, and member indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilInstance {
    pub vertex: SubspaceBasis,
    pub plane: SubspaceBasis,
    pub members: Vec<u32>,
}

/// Every nonempty pencil `{L in host : p in L, L in A}` with `A` a block of
/// `host` (points are lines, blocks are planes). Sorted by member set.
pub fn host_pencils(geom: &Geometry, host: &IncidenceStructure) -> Vec<PencilInstance> {
    let mut out = Vec::new();
    for block in &host.blocks {
        let Label::Subspace(plane) = block.label else { continue };
        for p in geom.points_of(&plane) {
            let members: Vec<u32> = block
                .points
                .iter()
                .copied()
                .filter(|&i| host.point_label(i).subspace().is_some_and(|l| geom.contains(l, &p)))
                .collect();
            if !members.is_empty() {
                out.push(PencilInstance {
                    vertex: p,
                    plane,
                    members,
                });
            }
        }
    }
    out.sort_unstable_by(|a, b| a.members.cmp(&b.members));
    out
}

/// Host lines through `p`; the star predicted for any pencil with vertex `p`.
pub fn predicted_star(geom: &Geometry, host: &IncidenceStructure, p: &SubspaceBasis) -> Vec<u32> {
    (0..host.points.len() as u32)
        .filter(|&i| host.point_label(i).subspace().is_some_and(|l| geom.contains(l, p)))
        .collect()
}
