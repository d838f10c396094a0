//! The projective space over `V = GF(q)^n` with its metric, subspace
//! enumeration, spans and pencils.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use once_cell::race::OnceBox;

use crate::algebra::{FieldCtx, SubspaceBasis, Vector, MAX_N};
use crate::error::{Error, Result};
use crate::metric::{locus_pole, make_form, BilinearForm, FormKind, LocusPole};

/// A point with its first nonzero coordinate scaled to 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint(Vector);

impl ProjPoint {
    pub fn vector(self) -> Vector {
        self.0
    }

    pub fn subspace(self) -> SubspaceBasis {
        SubspaceBasis::from_rref_rows(self.0.len(), &[self.0.packed()])
    }

    pub fn from_subspace(s: &SubspaceBasis) -> Option<ProjPoint> {
        (s.dim() == 1).then(|| ProjPoint(s.row(0)))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

pub fn normalize_point(ctx: &FieldCtx, v: Vector) -> Result<ProjPoint> {
    v.normalized(ctx).map(ProjPoint)
}

/// Calls `f` on every `k`-subspace of `GF(q)^n`, in pivot-pattern order.
pub fn for_each_subspace(ctx: &FieldCtx, n: usize, k: usize, mut f: impl FnMut(SubspaceBasis)) {
    if k > n {
        return;
    }
    let q = ctx.order() as u64;
    let mut pivots = [0usize; MAX_N];
    for (i, p) in pivots.iter_mut().enumerate().take(k) {
        *p = i;
    }
    loop {
        // free cells: row i, column j > pivots[i], j not a pivot
        let mut cells = [(0usize, 0usize); MAX_N * MAX_N];
        let mut ncells = 0;
        for i in 0..k {
            for j in pivots[i] + 1..n {
                if !pivots[..k].contains(&j) {
                    cells[ncells] = (i, j);
                    ncells += 1;
                }
            }
        }
        let mut digits = [0u8; MAX_N * MAX_N];
        loop {
            let mut rows = [Vector::zero(n); MAX_N];
            for i in 0..k {
                rows[i].set(pivots[i], crate::algebra::FieldElem::ONE);
            }
            for c in 0..ncells {
                let (i, j) = cells[c];
                rows[i].set(j, crate::algebra::FieldElem(digits[c]));
            }
            let mut packed = [0u64; MAX_N];
            for i in 0..k {
                packed[i] = rows[i].packed();
            }
            f(SubspaceBasis::from_rref_rows(n, &packed[..k]));
            // odometer over the free cells
            let mut c = 0;
            while c < ncells {
                digits[c] += 1;
                if (digits[c] as u64) < q {
                    break;
                }
                digits[c] = 0;
                c += 1;
            }
            if c == ncells {
                break;
            }
        }
        // next pivot combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if pivots[i] < n - k + i {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (q as u128).pow((n - i) as u32) - 1;
        den *= (q as u128).pow((i + 1) as u32) - 1;
    }
    (num / den) as u64
}

/// Ambient geometry: field, dimension, form, and the cached locus and pole.
pub struct Geometry {
    ctx: FieldCtx,
    form: BilinearForm,
    h: SubspaceBasis,
    /// Functional whose kernel is `H`; zero in the symplectic case.
    h_functional: Vector,
    pole: Option<SubspaceBasis>,
    cache: [OnceBox<Vec<SubspaceBasis>>; MAX_N + 1],
}

impl Clone for Geometry {
    fn clone(&self) -> Geometry {
        Geometry::from_form(self.ctx.clone(), self.form)
    }
}

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Geometry(q={}, n={}, {})", self.q(), self.n(), self.form.kind())
    }
}

impl PartialEq for Geometry {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.form == other.form
    }
}

impl Geometry {
    pub fn new(ctx: FieldCtx, n: usize, kind: FormKind) -> Result<Geometry> {
        let form = make_form(&ctx, n, kind)?;
        Ok(Geometry::from_form(ctx, form))
    }

    /// Canonical type 1/2/3 geometry over GF(2^k).
    pub fn canonical(k: u32, n: usize, form_type: u8) -> Result<Geometry> {
        let kind = match form_type {
            1 => FormKind::Type1,
            2 => FormKind::Type2,
            3 => FormKind::Type3,
            _ => return Err(Error::WrongCase("form type must be 1, 2 or 3")),
        };
        Geometry::new(FieldCtx::new(k)?, n, kind)
    }

    pub fn from_form(ctx: FieldCtx, form: BilinearForm) -> Geometry {
        let n = form.n();
        let (h, pole) = match locus_pole(&ctx, &form) {
            LocusPole::Pseudo { h, b } => (h, Some(b)),
            LocusPole::Symplectic => (SubspaceBasis::full(n), None),
        };
        let h_functional = match pole {
            Some(_) => h.annihilator(&ctx).row(0),
            None => Vector::zero(n),
        };
        Geometry {
            ctx,
            form,
            h,
            h_functional,
            pole,
            cache: Default::default(),
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn form(&self) -> &BilinearForm {
        &self.form
    }

    pub fn kind(&self) -> &FormKind {
        self.form.kind()
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn q(&self) -> usize {
        self.ctx.order()
    }

    /// The selfconjugate locus; the whole space when symplectic.
    pub fn h(&self) -> &SubspaceBasis {
        &self.h
    }

    /// The pole `b = H^perp`, absent when symplectic.
    pub fn pole(&self) -> Option<&SubspaceBasis> {
        self.pole.as_ref()
    }

    pub fn pole_or_err(&self) -> Result<&SubspaceBasis> {
        self.pole.as_ref().ok_or(Error::Symplectic)
    }

    pub fn is_symplectic(&self) -> bool {
        self.pole.is_none()
    }

    /// Whether `b` lies on `H`; `None` when symplectic.
    pub fn pole_on_h(&self) -> Option<bool> {
        self.pole.map(|b| self.in_h(b.row(0)))
    }

    /// Coefficients of the equation of `H`; zero when symplectic.
    pub fn h_equation(&self) -> Vector {
        self.h_functional
    }

    #[inline]
    pub fn in_h(&self, v: Vector) -> bool {
        self.h_functional.dot(&self.ctx, v) == 0
    }

    /// Subspace not contained in `H`.
    #[inline]
    pub fn is_affine(&self, s: &SubspaceBasis) -> bool {
        s.rows().any(|r| !self.in_h(r))
    }

    #[inline]
    pub fn xi(&self, x: Vector, y: Vector) -> u8 {
        self.form.xi(&self.ctx, x, y)
    }

    pub fn perp(&self, s: &SubspaceBasis) -> SubspaceBasis {
        self.form.perp_unchecked(&self.ctx, s)
    }

    pub fn meet(&self, a: &SubspaceBasis, b: &SubspaceBasis) -> SubspaceBasis {
        a.meet(&self.ctx, b)
    }

    pub fn join(&self, a: &SubspaceBasis, b: &SubspaceBasis) -> SubspaceBasis {
        a.sum(&self.ctx, b)
    }

    pub fn contains(&self, big: &SubspaceBasis, small: &SubspaceBasis) -> bool {
        big.contains(&self.ctx, small)
    }

    pub fn point(&self, v: Vector) -> Result<SubspaceBasis> {
        SubspaceBasis::point(&self.ctx, v)
    }

    pub fn span(&self, vectors: &[Vector]) -> Result<SubspaceBasis> {
        SubspaceBasis::span(&self.ctx, self.n(), vectors)
    }

    /// Sorted `k`-subspaces, materialized once per `k`.
    pub fn subspaces(&self, k: usize) -> Result<&[SubspaceBasis]> {
        if k > self.n() {
            return Err(Error::BadDimension(k));
        }
        Ok(self.cache[k].get_or_init(|| {
            let mut all = Vec::with_capacity(gaussian_binomial(self.q() as u64, self.n(), k) as usize);
            for_each_subspace(&self.ctx, self.n(), k, |s| all.push(s));
            all.sort_unstable();
            Box::new(all)
        }))
    }

    /// Position of `s` in `subspaces(s.dim())`.
    pub fn index_of(&self, s: &SubspaceBasis) -> Option<usize> {
        self.subspaces(s.dim()).ok()?.binary_search(s).ok()
    }

    pub fn count(&self, k: usize) -> u64 {
        gaussian_binomial(self.q() as u64, self.n(), k)
    }

    /// All `j`-subspaces of `s`, sorted.
    pub fn subspaces_of(&self, s: &SubspaceBasis, j: usize) -> Vec<SubspaceBasis> {
        let mut out = Vec::new();
        for_each_subspace(&self.ctx, s.dim(), j, |coeffs| {
            let vs: Vec<Vector> = coeffs
                .rows()
                .map(|c| s.combination(&self.ctx, &c.codes().collect::<Vec<_>>()))
                .collect();
            out.push(self.span(&vs).unwrap());
        });
        out.sort_unstable();
        out
    }

    /// All points of `s`, sorted.
    pub fn points_of(&self, s: &SubspaceBasis) -> Vec<SubspaceBasis> {
        let mut out = Vec::new();
        self.for_each_point_vector(s, |v| out.push(SubspaceBasis::from_rref_rows(self.n(), &[v.packed()])));
        out.sort_unstable();
        out
    }

    /// Normalized representatives of the points of `s`, unsorted.
    pub fn for_each_point_vector(&self, s: &SubspaceBasis, mut f: impl FnMut(Vector)) {
        let d = s.dim();
        let q = self.q();
        // a combination with leading coefficient 1 on row `lead` is
        // already normalized, since rows are in reduced echelon form
        for lead in 0..d {
            let tail = d - lead - 1;
            let total = q.pow(tail as u32);
            for mut idx in 0..total {
                let mut v = s.row(lead);
                for i in lead + 1..d {
                    let c = (idx % q) as u8;
                    idx /= q;
                    if c != 0 {
                        v = v.add(s.row(i).scale(&self.ctx, c));
                    }
                }
                f(v);
            }
        }
    }

    /// All `j`-subspaces containing `s`, sorted.
    pub fn subspaces_containing(&self, s: &SubspaceBasis, j: usize) -> Vec<SubspaceBasis> {
        if j < s.dim() || j > self.n() {
            return Vec::new();
        }
        let ann = s.annihilator(&self.ctx);
        let mut out: Vec<SubspaceBasis> = self
            .subspaces_of(&ann, self.n() - j)
            .iter()
            .map(|t| t.annihilator(&self.ctx))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Least subspace containing all parts, and its intersection with `H`.
pub fn span_horizon(geom: &Geometry, parts: &[SubspaceBasis]) -> Result<(SubspaceBasis, SubspaceBasis)> {
    let first = parts.first().ok_or(Error::BadDimension(0))?;
    let mut span = *first;
    for p in &parts[1..] {
        if p.n() != geom.n() {
            return Err(Error::DimensionMismatch {
                expected: geom.n(),
                got: p.n(),
            });
        }
        span = geom.join(&span, p);
    }
    let horizon = geom.meet(&span, geom.h());
    Ok((span, horizon))
}

/// The flag `hub < bound` with `dim(bound) = dim(hub) + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PencilSpec {
    pub hub: SubspaceBasis,
    pub bound: SubspaceBasis,
}

impl PencilSpec {
    pub fn new(geom: &Geometry, hub: SubspaceBasis, bound: SubspaceBasis) -> Result<PencilSpec> {
        if bound.dim() != hub.dim() + 2 || !geom.contains(&bound, &hub) {
            return Err(Error::BadFlag);
        }
        Ok(PencilSpec { hub, bound })
    }

    /// The `dim(hub) + 1` dimension of the pencil's members.
    pub fn k(&self) -> usize {
        self.hub.dim() + 1
    }
}

impl fmt::Display for PencilSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pencil({} ; {})", self.hub, self.bound)
    }
}

/// All `U` with `hub < U < bound`; exactly `q + 1` of them.
pub fn pencil_elements(geom: &Geometry, spec: &PencilSpec) -> Result<Vec<SubspaceBasis>> {
    let ctx = geom.ctx();
    let (hub, bound) = (&spec.hub, &spec.bound);
    if bound.dim() != hub.dim() + 2 || !bound.contains(ctx, hub) {
        return Err(Error::BadFlag);
    }
    let mut acc = *hub;
    let mut extra = Vec::new();
    for r in bound.rows() {
        if !acc.contains_vec(ctx, r) {
            acc = acc.join_vec(ctx, r);
            extra.push(r);
        }
    }
    let c = geom.span(&extra)?;
    let mut out: Vec<SubspaceBasis> = geom
        .points_of(&c)
        .iter()
        .map(|p| hub.join_vec(ctx, p.point_vector()))
        .collect();
    out.sort_unstable();
    Ok(out)
}
