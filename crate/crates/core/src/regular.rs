//! Regularity: the radical oracle, the dispatching criterion, plane
//! classification, and the families of regular subspaces.

use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{FieldElem, Matrix, SubspaceBasis, Vector, MAX_N};
use crate::error::{Error, Result};
use crate::metric::metric_report;
use crate::projspace::{Geometry, ProjPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularityClass {
    Regular,
    RadPoint(ProjPoint),
    RadLine(SubspaceBasis),
    TotallyIsotropic,
}

pub fn classify(geom: &Geometry, a: &SubspaceBasis) -> RegularityClass {
    let rep = metric_report(geom, a);
    match rep.rdim {
        0 => RegularityClass::Regular,
        d if d == a.dim() => RegularityClass::TotallyIsotropic,
        1 => RegularityClass::RadPoint(ProjPoint::from_subspace(&rep.rad).unwrap()),
        _ => RegularityClass::RadLine(rep.rad),
    }
}

/// Ground truth: `Rad(A)` is empty.
pub fn rad_oracle(geom: &Geometry, a: &SubspaceBasis) -> bool {
    metric_report(geom, a).rdim == 0
}

/// An affine basis row of `a` and a basis of `a meet H` built from the others.
fn split_affine(geom: &Geometry, a: &SubspaceBasis) -> (Vector, [Vector; MAX_N], usize) {
    let ctx = geom.ctx();
    let mut rows = [Vector::zero(geom.n()); MAX_N];
    let Some(ai) = (0..a.dim()).find(|&i| !geom.in_h(a.row(i))) else {
        for (i, r) in a.rows().enumerate() {
            rows[i] = r;
        }
        return (Vector::zero(geom.n()), rows, a.dim());
    };
    let lead = a.row(ai);
    let f = h_value(geom, lead);
    let finv = ctx.inv_u8(f);
    let mut count = 0;
    for (i, r) in a.rows().enumerate() {
        if i != ai {
            let c = ctx.mul_u8(h_value(geom, r), finv);
            rows[count] = r.add(lead.scale(ctx, c));
            count += 1;
        }
    }
    (lead, rows, count)
}

/// The value of the functional cutting out `H`, recovered from `xi(v, v)`.
fn h_value(geom: &Geometry, v: Vector) -> u8 {
    geom.ctx().sqrt_u8(geom.xi(v, v))
}

fn gram(geom: &Geometry, vs: &[Vector]) -> Matrix {
    let mut g = Matrix::zero(vs.len(), vs.len());
    for (i, &x) in vs.iter().enumerate() {
        for (j, &y) in vs.iter().enumerate() {
            g.set(i, j, FieldElem(geom.xi(x, y)));
        }
    }
    g
}

fn gram_rank(geom: &Geometry, vs: &[Vector]) -> usize {
    gram(geom, vs).rank(geom.ctx())
}

/// Regularity via the structural criteria, dispatched on dimension and position
/// relative to `H`. For general affine subspaces the Hrd-point route and the
/// parity route both run and must agree.
pub fn criterion(geom: &Geometry, a: &SubspaceBasis) -> Result<bool> {
    if geom.is_symplectic() {
        return Err(Error::Symplectic);
    }
    let d = a.dim();
    if d == 0 {
        return Ok(true);
    }
    let (lead, inf, m) = split_affine(geom, a);
    let inf = &inf[..m];
    if m == d {
        // inside H: the radical with respect to the symplectic restriction
        return Ok(gram_rank(geom, inf) == d);
    }
    Ok(match d {
        1 => geom.xi(lead, lead) != 0,
        // the line is regular iff it leaves the hyperplane (L^inf)^perp
        2 => geom.xi(inf[0], lead) != 0,
        // the plane is regular iff its horizon line is
        3 => gram_rank(geom, inf) == 2,
        _ => {
            let by_hrd = hrd_is_point(geom, a, inf);
            let by_parity = parity_route(geom, lead, inf, d);
            if by_hrd != by_parity {
                return Err(Error::CriterionDrift(format!("{a}")));
            }
            by_hrd
        }
    })
}

/// `dim(A meet (A^inf)^perp) = dim(A) - rank[xi(a_i, h_j)]`.
fn hrd_is_point(geom: &Geometry, a: &SubspaceBasis, inf: &[Vector]) -> bool {
    let mut cross = Matrix::zero(a.dim(), inf.len().max(1));
    for (i, r) in a.rows().enumerate() {
        for (j, &h) in inf.iter().enumerate() {
            cross.set(i, j, FieldElem(geom.xi(r, h)));
        }
    }
    let rank = if inf.is_empty() { 0 } else { cross.rank(geom.ctx()) };
    a.dim() - rank == 1
}

fn parity_route(geom: &Geometry, lead: Vector, inf: &[Vector], d: usize) -> bool {
    let ctx = geom.ctx();
    let g = gram(geom, inf);
    let rank = g.rank(ctx);
    if d % 2 == 1 {
        return rank == inf.len();
    }
    if rank + 1 != inf.len() {
        return false;
    }
    // Rad(A^inf) is a point p; A \ H must miss p^perp
    let rows: Vec<Vector> = (0..g.nrows()).map(|i| g.row(i)).collect();
    let coeffs = SubspaceBasis::span(ctx, inf.len(), &rows)
        .unwrap()
        .annihilator(ctx)
        .row(0);
    let mut p = Vector::zero(geom.n());
    for (i, &h) in inf.iter().enumerate() {
        p = p.add(h.scale(ctx, coeffs.code(i)));
    }
    geom.xi(p, lead) != 0
}

/// Regularity by Gram rank; equivalent to the oracle, used in inner loops.
pub fn is_regular_fast(geom: &Geometry, a: &SubspaceBasis) -> bool {
    geom.form().gram_rank(geom.ctx(), a) == a.dim()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaneKind {
    AffineRegular,
    AffineRadPoint,
    AffineRadLine,
    InHRadPoint,
    InHRadLine,
    InHTotallyIsotropic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaneProfile {
    pub kind: PlaneKind,
    /// `q(A)` for affine planes with `rdim <= 1`; the radical point for
    /// planes in `H` with `rdim = 1`.
    pub vertex: Option<ProjPoint>,
    pub hrd: Option<SubspaceBasis>,
}

pub fn plane_profile(geom: &Geometry, a: &SubspaceBasis) -> Result<PlaneProfile> {
    if a.dim() != 3 {
        return Err(Error::BadDimension(a.dim()));
    }
    if geom.is_symplectic() {
        return Err(Error::Symplectic);
    }
    let rep = metric_report(geom, a);
    let affine = rep.hrd.is_some();
    let rad_point = || ProjPoint::from_subspace(&rep.rad);
    let (kind, vertex) = match (affine, rep.rdim) {
        (true, 0) => (PlaneKind::AffineRegular, ProjPoint::from_subspace(&rep.hrd.unwrap())),
        (true, 1) => (PlaneKind::AffineRadPoint, rad_point()),
        (true, _) => (PlaneKind::AffineRadLine, None),
        (false, 1) => (PlaneKind::InHRadPoint, rad_point()),
        (false, 2) => (PlaneKind::InHRadLine, None),
        (false, _) => (PlaneKind::InHTotallyIsotropic, None),
    };
    Ok(PlaneProfile {
        kind,
        vertex,
        hrd: rep.hrd,
    })
}

/// The families of regular subspaces relevant at one dimension `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Families {
    pub k: usize,
    pub r_k: Vec<SubspaceBasis>,
    /// Regular and not inside `H`.
    pub a_k: Vec<SubspaceBasis>,
    /// Regular and not through `b`.
    pub a_k_circ: Vec<SubspaceBasis>,
    /// `a_k` meet `a_k_circ`; filled for `k = 2`.
    pub l_r: Vec<SubspaceBasis>,
    /// Totally isotropic lines inside `H`; filled for `k = 2`.
    pub l_star: Vec<SubspaceBasis>,
    /// Affine planes by `rdim`; filled for `k = 3`.
    pub p0: Vec<SubspaceBasis>,
    pub p1: Vec<SubspaceBasis>,
    pub p01: Vec<SubspaceBasis>,
}

/// Criterion verdict for every `k`-subspace, aligned with `geom.subspaces(k)`.
pub fn regular_flags(geom: &Geometry, k: usize) -> Result<Vec<bool>> {
    geom.subspaces(k)?.iter().map(|s| criterion(geom, s)).collect()
}

pub fn families(geom: &Geometry, k: usize) -> Result<Families> {
    if k == 0 || k > geom.n() {
        return Err(Error::BadDimension(k));
    }
    let b = *geom.pole_or_err()?;
    let ctx = geom.ctx();
    let mut fam = Families {
        k,
        ..Families::default()
    };
    for s in geom.subspaces(k)? {
        let regular = criterion(geom, s)?;
        let affine = geom.is_affine(s);
        let through_b = s.contains(ctx, &b);
        if regular {
            fam.r_k.push(*s);
            if affine {
                fam.a_k.push(*s);
            }
            if !through_b {
                fam.a_k_circ.push(*s);
            }
            if k == 2 && affine && !through_b {
                fam.l_r.push(*s);
            }
        }
        if k == 2 && !affine && geom.form().gram_rank(ctx, s) == 0 {
            fam.l_star.push(*s);
        }
        if k == 3 && affine {
            match metric_report(geom, s).rdim {
                0 => fam.p0.push(*s),
                1 => fam.p1.push(*s),
                _ => {}
            }
        }
    }
    if k == 3 {
        fam.p01 = fam.p0.iter().chain(&fam.p1).copied().collect();
        fam.p01.sort_unstable();
    }
    Ok(fam)
}
