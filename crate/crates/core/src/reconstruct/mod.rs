//! Definitional formulas executed over incidence alone.

mod affine;
mod lines;

pub use affine::{
    b1_from_c1, bracket_q, identify, l0_classes, parallel_eq5, pi_triangle, recover_affine, PointLine, Triangle,
};
pub use lines::{
    adjacency, collinear_rel, point_kind, rebuild_b1, star_closure, stars, triangle_rel, Adjacency, LineHost,
    Nonadjacency, PointKind, StarSets,
};
