//! Bilinear forms, the conjugacy they induce, and per-subspace metric data.

use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{FieldCtx, FieldElem, Matrix, SubspaceBasis, Vector};
use crate::error::{Error, Result};
use crate::projspace::Geometry;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// `[1] (+) nabla (+) ... (+) nabla`, n odd.
    Type1,
    /// `nabla' (+) nabla (+) ... (+) nabla`, n even.
    Type2,
    /// `nabla (+) ... (+) nabla`, symplectic, n even.
    Type3,
    /// `[[eps, 0], [0, base]]`: the border coordinate first, then `W`.
    FamilyEps { eps: FieldElem, base: Matrix },
    /// `[[mu, lambda, 0], [lambda, 0, 0], [0, 0, base]]` in coordinates `(omega, e0, Y)`.
    FamilyMuLambda {
        mu: FieldElem,
        lambda: FieldElem,
        base: Matrix,
    },
}

impl FormKind {
    pub fn eps(eps: FieldElem, base: Matrix) -> FormKind {
        FormKind::FamilyEps { eps, base }
    }

    pub fn mu_lambda(mu: FieldElem, lambda: FieldElem, base: Matrix) -> FormKind {
        FormKind::FamilyMuLambda { mu, lambda, base }
    }

    /// The form type number for the canonical kinds.
    pub fn type_number(&self) -> Option<u8> {
        match self {
            FormKind::Type1 => Some(1),
            FormKind::Type2 => Some(2),
            FormKind::Type3 => Some(3),
            _ => None,
        }
    }

    /// Inverse of the `Display` form, for ambient dimension `n`.
    pub fn parse(s: &str, n: usize) -> Option<FormKind> {
        let elem = |t: &str| t.parse::<u8>().ok().map(FieldElem);
        let base = |t: Option<&str>, m: usize| -> Option<Matrix> {
            let Some(t) = t else { return Some(nabla_sum(m)) };
            let rows: Vec<Vec<u8>> = t
                .split('/')
                .map(|r| r.split(',').map(|c| c.parse().ok()).collect::<Option<Vec<u8>>>())
                .collect::<Option<_>>()?;
            if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                return None;
            }
            let refs: Vec<&[u8]> = rows.iter().map(Vec::as_slice).collect();
            Some(Matrix::from_codes(&refs))
        };
        let mut parts = s.split(':');
        Some(match parts.next()? {
            "type1" => FormKind::Type1,
            "type2" => FormKind::Type2,
            "type3" => FormKind::Type3,
            "eps" if n >= 1 => {
                let eps = elem(parts.next()?)?;
                FormKind::eps(eps, base(parts.next(), n - 1)?)
            }
            "mulambda" if n >= 2 => {
                let mu = elem(parts.next()?)?;
                let lambda = elem(parts.next()?)?;
                FormKind::mu_lambda(mu, lambda, base(parts.next(), n - 2)?)
            }
            _ => return None,
        })
        .filter(|_| parts.next().is_none())
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormKind::Type1 => f.write_str("type1"),
            FormKind::Type2 => f.write_str("type2"),
            FormKind::Type3 => f.write_str("type3"),
            FormKind::FamilyEps { eps, base } => {
                write!(f, "eps:{eps}")?;
                if *base != nabla_sum(base.nrows()) {
                    write!(f, ":{}", CompactMatrix(base))?;
                }
                Ok(())
            }
            FormKind::FamilyMuLambda { mu, lambda, base } => {
                write!(f, "mulambda:{mu}:{lambda}")?;
                if *base != nabla_sum(base.nrows()) {
                    write!(f, ":{}", CompactMatrix(base))?;
                }
                Ok(())
            }
        }
    }
}

/// Rows separated by `/`, entries by `,`; no whitespace.
pub struct CompactMatrix<'a>(pub &'a Matrix);

impl fmt::Display for CompactMatrix<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.0.nrows() {
            if i > 0 {
                f.write_str("/")?;
            }
            for j in 0..self.0.ncols() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.0.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// `nabla (+) ... (+) nabla` of size `m` (m even).
pub fn nabla_sum(m: usize) -> Matrix {
    let mut mat = Matrix::zero(m, m);
    for i in (0..m.saturating_sub(1)).step_by(2) {
        mat.set(i, i + 1, FieldElem::ONE);
        mat.set(i + 1, i, FieldElem::ONE);
    }
    mat
}

/// Symmetric, zero diagonal, nonsingular.
pub fn is_symplectic(ctx: &FieldCtx, m: &Matrix) -> bool {
    m.is_symmetric() && (0..m.nrows()).all(|i| m.get(i, i).is_zero()) && m.is_invertible(ctx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    n: usize,
    matrix: Matrix,
    kind: FormKind,
}

pub fn make_form(ctx: &FieldCtx, n: usize, kind: FormKind) -> Result<BilinearForm> {
    if n == 0 || n > crate::algebra::MAX_N {
        return Err(Error::BadDimension(n));
    }
    let matrix = match kind {
        FormKind::Type1 => {
            if n % 2 == 0 {
                return Err(Error::ParityMismatch(n));
            }
            let mut m = Matrix::zero(n, n).with_block(1, &nabla_sum(n - 1));
            m.set(0, 0, FieldElem::ONE);
            m
        }
        FormKind::Type2 => {
            if n % 2 == 1 {
                return Err(Error::ParityMismatch(n));
            }
            let mut m = nabla_sum(n);
            m.set(0, 0, FieldElem::ONE);
            m
        }
        FormKind::Type3 => {
            if n % 2 == 1 {
                return Err(Error::ParityMismatch(n));
            }
            nabla_sum(n)
        }
        FormKind::FamilyEps { eps, base } => {
            if base.nrows() + 1 != n {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    got: base.nrows(),
                });
            }
            if n % 2 == 0 {
                return Err(Error::ParityMismatch(n));
            }
            if !is_symplectic(ctx, &base) {
                return Err(Error::DegenerateBase);
            }
            if eps.is_zero() {
                return Err(Error::ZeroParameter);
            }
            let mut m = Matrix::zero(n, n).with_block(1, &base);
            m.set(0, 0, eps);
            m
        }
        FormKind::FamilyMuLambda { mu, lambda, base } => {
            if n < 2 || base.nrows() + 2 != n {
                return Err(Error::DimensionMismatch {
                    expected: n.saturating_sub(2),
                    got: base.nrows(),
                });
            }
            if n % 2 == 1 {
                return Err(Error::ParityMismatch(n));
            }
            if !is_symplectic(ctx, &base) {
                return Err(Error::DegenerateBase);
            }
            if mu.is_zero() || lambda.is_zero() {
                return Err(Error::ZeroParameter);
            }
            let mut m = Matrix::zero(n, n).with_block(2, &base);
            m.set(0, 0, mu);
            m.set(0, 1, lambda);
            m.set(1, 0, lambda);
            m
        }
    };
    BilinearForm::from_matrix(ctx, matrix, kind)
}

impl BilinearForm {
    pub fn from_matrix(ctx: &FieldCtx, matrix: Matrix, kind: FormKind) -> Result<BilinearForm> {
        if !matrix.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !matrix.is_invertible(ctx) {
            return Err(Error::SingularMatrix);
        }
        Ok(BilinearForm {
            n: matrix.nrows(),
            matrix,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> &FormKind {
        &self.kind
    }

    /// `xi(x, y) = x M y^T`, without length checks.
    #[inline]
    pub fn xi(&self, ctx: &FieldCtx, x: Vector, y: Vector) -> u8 {
        self.matrix.left_mul(ctx, x).dot(ctx, y)
    }

    pub fn eval(&self, ctx: &FieldCtx, x: Vector, y: Vector) -> Result<FieldElem> {
        for v in [x, y] {
            if v.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: v.len(),
                });
            }
        }
        Ok(FieldElem(self.xi(ctx, x, y)))
    }

    /// `S^perp`.
    pub fn perp(&self, ctx: &FieldCtx, s: &SubspaceBasis) -> Result<SubspaceBasis> {
        if s.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: s.n(),
            });
        }
        Ok(self.perp_unchecked(ctx, s))
    }

    pub fn perp_unchecked(&self, ctx: &FieldCtx, s: &SubspaceBasis) -> SubspaceBasis {
        let mut rows = [Vector::zero(self.n); crate::algebra::MAX_N];
        for (i, r) in s.rows().enumerate() {
            rows[i] = self.matrix.left_mul(ctx, r);
        }
        SubspaceBasis::span(ctx, self.n, &rows[..s.dim()])
            .unwrap()
            .annihilator(ctx)
    }

    /// Gram matrix of the basis rows of `s`.
    pub fn gram(&self, ctx: &FieldCtx, s: &SubspaceBasis) -> Matrix {
        let d = s.dim();
        let mut g = Matrix::zero(d, d);
        for i in 0..d {
            let ri = self.matrix.left_mul(ctx, s.row(i));
            for j in 0..d {
                g.set(i, j, FieldElem(ri.dot(ctx, s.row(j))));
            }
        }
        g
    }

    /// `dim(s) - rdim(s)`.
    pub fn gram_rank(&self, ctx: &FieldCtx, s: &SubspaceBasis) -> usize {
        self.gram(ctx, s).rank(ctx)
    }
}

/// The selfconjugate hyperplane and its pole, or the symplectic marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocusPole {
    Pseudo { h: SubspaceBasis, b: SubspaceBasis },
    Symplectic,
}

pub fn locus_pole(ctx: &FieldCtx, form: &BilinearForm) -> LocusPole {
    let n = form.n();
    // xi(v, v) = (sum sqrt(M_ii) v_i)^2 in characteristic 2
    let mut s = Vector::zero(n);
    for i in 0..n {
        s.set(i, FieldElem(ctx.sqrt_u8(form.matrix().get(i, i).0)));
    }
    if s.is_zero() {
        return LocusPole::Symplectic;
    }
    let h = SubspaceBasis::point(ctx, s).unwrap().annihilator(ctx);
    let b = form.perp_unchecked(ctx, &h);
    LocusPole::Pseudo { h, b }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricReport {
    /// `A^inf = A meet H`.
    pub horizon: SubspaceBasis,
    pub rad: SubspaceBasis,
    pub rdim: usize,
    /// `A meet (A^inf)^perp`, absent when `A` lies in `H`.
    pub hrd: Option<SubspaceBasis>,
}

pub fn metric_report(geom: &Geometry, a: &SubspaceBasis) -> MetricReport {
    let ctx = geom.ctx();
    let form = geom.form();
    let horizon = a.meet(ctx, geom.h());
    let rad = a.meet(ctx, &form.perp_unchecked(ctx, a));
    let hrd = if horizon.dim() == a.dim() {
        None
    } else {
        Some(a.meet(ctx, &form.perp_unchecked(ctx, &horizon)))
    };
    MetricReport {
        horizon,
        rdim: rad.dim(),
        rad,
        hrd,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> FieldCtx {
        FieldCtx::new(2).unwrap()
    }

    #[test]
    fn kind_text_round_trip() {
        use alloc::string::ToString;
        let odd = Matrix::from_codes(&[&[0, 2], &[2, 0]]);
        let kinds = [
            (3, FormKind::Type1),
            (4, FormKind::Type2),
            (4, FormKind::Type3),
            (3, FormKind::eps(FieldElem(3), nabla_sum(2))),
            (3, FormKind::eps(FieldElem(1), odd)),
            (4, FormKind::mu_lambda(FieldElem(2), FieldElem(1), nabla_sum(2))),
        ];
        for (n, k) in kinds {
            assert_eq!(FormKind::parse(&k.to_string(), n), Some(k), "{k}");
        }
        assert_eq!(FormKind::parse("eps:1:0,1/1,0:x", 3), None);
        assert_eq!(FormKind::parse("type4", 3), None);
        assert_eq!(FormKind::parse("eps:1:0,1", 3), None);
    }

    #[test]
    fn canonical_matrices() {
        let f = gf4();
        let t1 = make_form(&f, 3, FormKind::Type1).unwrap();
        assert_eq!(*t1.matrix(), Matrix::from_codes(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]));
        let t2 = make_form(&f, 4, FormKind::Type2).unwrap();
        assert_eq!(
            *t2.matrix(),
            Matrix::from_codes(&[&[1, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]])
        );
        assert_eq!(make_form(&f, 4, FormKind::Type1), Err(Error::ParityMismatch(4)));
        let eps = make_form(&f, 3, FormKind::eps(FieldElem::ONE, nabla_sum(2))).unwrap();
        assert_eq!(eps.matrix(), t1.matrix());
    }

    #[test]
    fn family_errors() {
        let f = gf4();
        assert_eq!(
            make_form(&f, 3, FormKind::eps(FieldElem::ZERO, nabla_sum(2))),
            Err(Error::ZeroParameter)
        );
        assert_eq!(
            make_form(&f, 3, FormKind::eps(FieldElem::ONE, Matrix::zero(2, 2))),
            Err(Error::DegenerateBase)
        );
        assert_eq!(
            make_form(&f, 4, FormKind::mu_lambda(FieldElem(2), FieldElem::ZERO, nabla_sum(2))),
            Err(Error::ZeroParameter)
        );
        let ml = make_form(&f, 4, FormKind::mu_lambda(FieldElem(2), FieldElem(3), nabla_sum(2))).unwrap();
        assert_eq!(
            *ml.matrix(),
            Matrix::from_codes(&[&[2, 3, 0, 0], &[3, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]])
        );
    }

    #[test]
    fn evaluation() {
        let f = gf4();
        let t1 = make_form(&f, 3, FormKind::Type1).unwrap();
        let e = |i| Vector::unit(3, i);
        assert_eq!(t1.eval(&f, e(0), e(0)), Ok(FieldElem::ONE));
        assert_eq!(t1.eval(&f, e(1), e(2)), Ok(FieldElem::ONE));
        assert_eq!(t1.eval(&f, e(1), e(1)), Ok(FieldElem::ZERO));
        let t2 = make_form(&f, 4, FormKind::Type2).unwrap();
        let x = Vector::from_codes(&[0, 1, 0, 0]);
        for c in 0..256u32 {
            let y = Vector::from_codes(&[
                (c & 3) as u8,
                (c >> 2 & 3) as u8,
                (c >> 4 & 3) as u8,
                (c >> 6 & 3) as u8,
            ]);
            assert_eq!(t2.eval(&f, x, y).unwrap(), y.get(0));
        }
        assert!(t1.eval(&f, e(0), Vector::unit(4, 0)).is_err());
    }

    #[test]
    fn perp_examples() {
        let f = gf4();
        let t1 = make_form(&f, 3, FormKind::Type1).unwrap();
        assert_eq!(t1.perp(&f, &SubspaceBasis::full(3)).unwrap().dim(), 0);
        let b = SubspaceBasis::point(&f, Vector::unit(3, 0)).unwrap();
        let h = SubspaceBasis::span(&f, 3, &[Vector::unit(3, 1), Vector::unit(3, 2)]).unwrap();
        assert_eq!(t1.perp(&f, &b).unwrap(), h);
        let e1 = SubspaceBasis::point(&f, Vector::unit(3, 1)).unwrap();
        let e01 = SubspaceBasis::span(&f, 3, &[Vector::unit(3, 0), Vector::unit(3, 1)]).unwrap();
        assert_eq!(t1.perp(&f, &e1).unwrap(), e01);
    }

    #[test]
    fn locus_and_pole() {
        let f = gf4();
        for n in [3, 5] {
            let form = make_form(&f, n, FormKind::Type1).unwrap();
            let LocusPole::Pseudo { h, b } = locus_pole(&f, &form) else {
                panic!()
            };
            assert_eq!(b.point_vector(), Vector::unit(n, 0));
            assert!(h.pivots().all(|p| p > 0) && h.dim() == n - 1);
        }
        for n in [2, 4] {
            let form = make_form(&f, n, FormKind::Type2).unwrap();
            let LocusPole::Pseudo { h, b } = locus_pole(&f, &form) else {
                panic!()
            };
            assert_eq!(b.point_vector(), Vector::unit(n, 1));
            assert!(h.contains(&f, &b));
        }
        let sym = make_form(&f, 4, FormKind::Type3).unwrap();
        assert_eq!(locus_pole(&f, &sym), LocusPole::Symplectic);
    }
}
