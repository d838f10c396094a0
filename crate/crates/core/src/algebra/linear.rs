use alloc::vec::Vec;
use core::fmt;

use super::{FieldCtx, FieldElem};
use crate::error::{Error, Result};

/// Largest ambient vector dimension a packed vector can hold.
pub const MAX_N: usize = 8;

#[inline]
fn shift(i: usize) -> u32 {
    (56 - 8 * i) as u32
}

/// A coordinate tuple over GF(2^k), `n <= 8`. Coordinate `i` lives in byte
/// `7 - i` of `packed`, so comparing packed words compares lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    packed: u64,
    len: u8,
}

impl Vector {
    pub fn zero(n: usize) -> Vector {
        assert!(n <= MAX_N, "vector length {n} exceeds {MAX_N}");
        Vector {
            packed: 0,
            len: n as u8,
        }
    }

    pub fn unit(n: usize, i: usize) -> Vector {
        let mut v = Vector::zero(n);
        v.set(i, FieldElem::ONE);
        v
    }

    pub fn from_codes(codes: &[u8]) -> Vector {
        let mut v = Vector::zero(codes.len());
        for (i, &c) in codes.iter().enumerate() {
            v.packed |= (c as u64) << shift(i);
        }
        v
    }

    pub fn from_elems(elems: &[FieldElem]) -> Vector {
        let mut v = Vector::zero(elems.len());
        for (i, &c) in elems.iter().enumerate() {
            v.set(i, c);
        }
        v
    }

    #[inline]
    pub fn from_packed(packed: u64, n: usize) -> Vector {
        Vector { packed, len: n as u8 }
    }

    #[inline]
    pub fn packed(self) -> u64 {
        self.packed
    }

    #[inline]
    pub fn len(self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.packed == 0
    }

    #[inline]
    pub fn code(self, i: usize) -> u8 {
        (self.packed >> shift(i)) as u8
    }

    #[inline]
    pub fn get(self, i: usize) -> FieldElem {
        FieldElem(self.code(i))
    }

    #[inline]
    pub fn set(&mut self, i: usize, c: FieldElem) {
        self.packed = (self.packed & !(0xFFu64 << shift(i))) | ((c.0 as u64) << shift(i));
    }

    pub fn codes(self) -> impl Iterator<Item = u8> {
        (0..self.len()).map(move |i| self.code(i))
    }

    #[inline]
    pub fn add(self, other: Vector) -> Vector {
        Vector {
            packed: self.packed ^ other.packed,
            len: self.len,
        }
    }

    #[inline]
    pub fn scale(self, ctx: &FieldCtx, c: u8) -> Vector {
        match c {
            0 => Vector::zero(self.len()),
            1 => self,
            _ => {
                let row = ctx.mul_row(c);
                let mut packed = 0u64;
                for i in 0..self.len() {
                    packed |= (row[self.code(i) as usize] as u64) << shift(i);
                }
                Vector { packed, len: self.len }
            }
        }
    }

    /// Standard dot product, sum of coordinatewise products.
    #[inline]
    pub fn dot(self, ctx: &FieldCtx, other: Vector) -> u8 {
        let mut acc = 0u8;
        for i in 0..self.len() {
            acc ^= ctx.mul_u8(self.code(i), other.code(i));
        }
        acc
    }

    pub fn first_nonzero(self) -> Option<usize> {
        if self.packed == 0 {
            None
        } else {
            Some(self.packed.leading_zeros() as usize / 8)
        }
    }

    /// Scale so the first nonzero coordinate is 1.
    pub fn normalized(self, ctx: &FieldCtx) -> Result<Vector> {
        let i = self.first_nonzero().ok_or(Error::ZeroVector)?;
        Ok(self.scale(ctx, ctx.inv_u8(self.code(i))))
    }

    /// Apply a field map to every coordinate.
    pub fn map_coords(self, f: impl Fn(u8) -> u8) -> Vector {
        let mut packed = 0u64;
        for i in 0..self.len() {
            packed |= (f(self.code(i)) as u64) << shift(i);
        }
        Vector { packed, len: self.len }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", self.code(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Row-reduce packed rows in place; returns the rank. The first `rank` rows
/// hold the reduced echelon form, pivots strictly increasing.
fn rref_rows(ctx: &FieldCtx, n: usize, rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| (rows[r] >> shift(col)) as u8 != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let lead = (rows[rank] >> shift(col)) as u8;
        let pivot = Vector::from_packed(rows[rank], n).scale(ctx, ctx.inv_u8(lead)).packed();
        rows[rank] = pivot;
        for r in 0..rows.len() {
            if r != rank {
                let c = (rows[r] >> shift(col)) as u8;
                if c != 0 {
                    rows[r] ^= Vector::from_packed(pivot, n).scale(ctx, c).packed();
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// A projective subspace as the reduced row-echelon basis of its vector
/// subspace. Equal subspaces have identical values; the derived order is the
/// canonical order used everywhere.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubspaceBasis {
    n: u8,
    dim: u8,
    rows: [u64; MAX_N],
}

impl SubspaceBasis {
    pub fn zero(n: usize) -> SubspaceBasis {
        assert!(n <= MAX_N);
        SubspaceBasis {
            n: n as u8,
            dim: 0,
            rows: [0; MAX_N],
        }
    }

    pub fn full(n: usize) -> SubspaceBasis {
        let mut s = SubspaceBasis::zero(n);
        for i in 0..n {
            s.rows[i] = Vector::unit(n, i).packed();
        }
        s.dim = n as u8;
        s
    }

    /// Span of the given vectors, which must all have length `n`.
    pub fn span(ctx: &FieldCtx, n: usize, vectors: &[Vector]) -> Result<SubspaceBasis> {
        let mut s = SubspaceBasis::zero(n);
        let mut buf: Vec<u64> = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            buf.push(v.packed());
        }
        let rank = rref_rows(ctx, n, &mut buf);
        s.rows[..rank].copy_from_slice(&buf[..rank]);
        s.dim = rank as u8;
        Ok(s)
    }

    /// The point spanned by a nonzero vector.
    pub fn point(ctx: &FieldCtx, v: Vector) -> Result<SubspaceBasis> {
        let v = v.normalized(ctx)?;
        let mut s = SubspaceBasis::zero(v.len());
        s.rows[0] = v.packed();
        s.dim = 1;
        Ok(s)
    }

    /// Build from rows already in reduced echelon form.
    pub(crate) fn from_rref_rows(n: usize, rows: &[u64]) -> SubspaceBasis {
        let mut s = SubspaceBasis::zero(n);
        s.rows[..rows.len()].copy_from_slice(rows);
        s.dim = rows.len() as u8;
        s
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vector {
        Vector::from_packed(self.rows[i], self.n())
    }

    pub fn rows(&self) -> impl Iterator<Item = Vector> + '_ {
        (0..self.dim()).map(move |i| self.row(i))
    }

    pub fn packed_rows(&self) -> &[u64] {
        &self.rows[..self.dim()]
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows().map(|r| r.first_nonzero().unwrap())
    }

    /// Coordinates of a point, i.e. the single basis row.
    pub fn point_vector(&self) -> Vector {
        debug_assert_eq!(self.dim, 1);
        self.row(0)
    }

    /// Subtract the basis-row components at pivot columns; zero iff `v` lies in the span.
    #[inline]
    pub fn reduce(&self, ctx: &FieldCtx, mut v: Vector) -> Vector {
        for i in 0..self.dim() {
            let r = self.row(i);
            let p = r.first_nonzero().unwrap();
            let c = v.code(p);
            if c != 0 {
                v = v.add(r.scale(ctx, c));
            }
        }
        v
    }

    #[inline]
    pub fn contains_vec(&self, ctx: &FieldCtx, v: Vector) -> bool {
        self.reduce(ctx, v).is_zero()
    }

    pub fn contains(&self, ctx: &FieldCtx, other: &SubspaceBasis) -> bool {
        other.dim() <= self.dim() && other.rows().all(|r| self.contains_vec(ctx, r))
    }

    fn check_n(&self, other: &SubspaceBasis) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n(),
                got: other.n(),
            })
        }
    }

    pub fn sum(&self, ctx: &FieldCtx, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.n, other.n, "ambient dimension mismatch");
        let mut buf = [0u64; 2 * MAX_N];
        let (a, b) = (self.dim(), other.dim());
        buf[..a].copy_from_slice(self.packed_rows());
        buf[a..a + b].copy_from_slice(other.packed_rows());
        let rank = rref_rows(ctx, self.n(), &mut buf[..a + b]);
        SubspaceBasis::from_rref_rows(self.n(), &buf[..rank])
    }

    /// Sum with a single vector.
    pub fn join_vec(&self, ctx: &FieldCtx, v: Vector) -> SubspaceBasis {
        let mut buf = [0u64; MAX_N + 1];
        let a = self.dim();
        buf[..a].copy_from_slice(self.packed_rows());
        buf[a] = v.packed();
        let rank = rref_rows(ctx, self.n(), &mut buf[..a + 1]);
        SubspaceBasis::from_rref_rows(self.n(), &buf[..rank])
    }

    /// All `x` with `r . x = 0` for every basis row `r`.
    pub fn annihilator(&self, ctx: &FieldCtx) -> SubspaceBasis {
        kernel_of_rref(ctx, self.n(), self.packed_rows())
    }

    /// Intersection, as the kernel of the stacked annihilators.
    pub fn meet(&self, ctx: &FieldCtx, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.n, other.n, "ambient dimension mismatch");
        if self.contains(ctx, other) {
            return *other;
        }
        if other.contains(ctx, self) {
            return *self;
        }
        let constraints = self.annihilator(ctx).sum(ctx, &other.annihilator(ctx));
        constraints.annihilator(ctx)
    }

    /// The vector `sum c_i row_i`.
    pub fn combination(&self, ctx: &FieldCtx, coeffs: &[u8]) -> Vector {
        let mut v = Vector::zero(self.n());
        for (i, &c) in coeffs.iter().enumerate() {
            v = v.add(self.row(i).scale(ctx, c));
        }
        v
    }
}

/// Kernel of a matrix whose rows are in reduced echelon form.
fn kernel_of_rref(ctx: &FieldCtx, n: usize, rows: &[u64]) -> SubspaceBasis {
    let pivots: Vec<usize> = rows
        .iter()
        .map(|&r| Vector::from_packed(r, n).first_nonzero().unwrap())
        .collect();
    let mut basis = [0u64; MAX_N];
    let mut count = 0;
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = Vector::unit(n, f);
        for (i, &r) in rows.iter().enumerate() {
            v.set(pivots[i], Vector::from_packed(r, n).get(f));
        }
        basis[count] = v.packed();
        count += 1;
    }
    let rank = rref_rows(ctx, n, &mut basis[..count]);
    SubspaceBasis::from_rref_rows(n, &basis[..rank])
}

impl fmt::Display for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 0 {
            return f.write_str("empty");
        }
        for (i, r) in self.rows().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

pub fn rref(ctx: &FieldCtx, vectors: &[Vector]) -> Result<SubspaceBasis> {
    let n = vectors.first().map_or(0, |v| v.len());
    SubspaceBasis::span(ctx, n, vectors)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeOp {
    Sum,
    Meet,
    /// Whether `S` contains the first basis row of `T`.
    ContainsVec,
    /// Dimension of `S`.
    Dim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeValue {
    Subspace(SubspaceBasis),
    Bool(bool),
    Int(usize),
}

pub fn lattice(ctx: &FieldCtx, s: &SubspaceBasis, t: &SubspaceBasis, op: LatticeOp) -> Result<LatticeValue> {
    s.check_n(t)?;
    Ok(match op {
        LatticeOp::Sum => LatticeValue::Subspace(s.sum(ctx, t)),
        LatticeOp::Meet => LatticeValue::Subspace(s.meet(ctx, t)),
        LatticeOp::ContainsVec => {
            if t.dim() == 0 {
                return Err(Error::ZeroVector);
            }
            LatticeValue::Bool(s.contains_vec(ctx, t.row(0)))
        }
        LatticeOp::Dim => LatticeValue::Int(s.dim()),
    })
}

/// A small dense matrix over GF(2^k), rows packed like vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    nrows: u8,
    ncols: u8,
    rows: [u64; MAX_N],
}

impl Matrix {
    pub fn zero(nrows: usize, ncols: usize) -> Matrix {
        assert!(nrows <= MAX_N && ncols <= MAX_N);
        Matrix {
            nrows: nrows as u8,
            ncols: ncols as u8,
            rows: [0; MAX_N],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.rows[i] = Vector::unit(n, i).packed();
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> Matrix {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zero(rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols);
            m.rows[i] = r.packed();
        }
        m
    }

    pub fn from_codes(rows: &[&[u8]]) -> Matrix {
        let rows: Vec<Vector> = rows.iter().map(|r| Vector::from_codes(r)).collect();
        Matrix::from_rows(&rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows as usize
    }

    pub fn ncols(&self) -> usize {
        self.ncols as usize
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vector {
        Vector::from_packed(self.rows[i], self.ncols())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.row(i).get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, c: FieldElem) {
        let mut r = self.row(i);
        r.set(j, c);
        self.rows[i] = r.packed();
    }

    /// Row vector times matrix: `x M`.
    #[inline]
    pub fn left_mul(&self, ctx: &FieldCtx, x: Vector) -> Vector {
        let mut acc = Vector::zero(self.ncols());
        for i in 0..self.nrows() {
            let c = x.code(i);
            if c != 0 {
                acc = acc.add(self.row(i).scale(ctx, c));
            }
        }
        acc
    }

    /// Matrix times column vector: `M x`.
    pub fn apply(&self, ctx: &FieldCtx, x: Vector) -> Vector {
        let mut out = Vector::zero(self.nrows());
        for i in 0..self.nrows() {
            out.set(i, FieldElem(self.row(i).dot(ctx, x)));
        }
        out
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!(self.ncols, other.nrows);
        let mut m = Matrix::zero(self.nrows(), other.ncols());
        for i in 0..self.nrows() {
            m.rows[i] = other.left_mul(ctx, self.row(i)).packed();
        }
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(self.ncols(), self.nrows());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && *self == self.transpose()
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        let mut buf = self.rows;
        rref_rows(ctx, self.ncols(), &mut buf[..self.nrows()])
    }

    pub fn is_invertible(&self, ctx: &FieldCtx) -> bool {
        self.nrows == self.ncols && self.rank(ctx) == self.nrows()
    }

    pub fn map_entries(&self, f: impl Fn(u8) -> u8 + Copy) -> Matrix {
        let mut m = *self;
        for i in 0..self.nrows() {
            m.rows[i] = self.row(i).map_coords(f).packed();
        }
        m
    }

    /// Place `block` with its top-left corner at `(at, at)`.
    pub fn with_block(mut self, at: usize, block: &Matrix) -> Matrix {
        for i in 0..block.nrows() {
            for j in 0..block.ncols() {
                self.set(at + i, at + j, block.get(i, j));
            }
        }
        self
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> FieldCtx {
        FieldCtx::new(2).unwrap()
    }

    fn v(c: &[u8]) -> Vector {
        Vector::from_codes(c)
    }

    #[test]
    fn rref_examples() {
        let f = gf4();
        let s = rref(&f, &[v(&[2, 2, 0])]).unwrap();
        assert_eq!(s.rows().collect::<Vec<_>>(), [v(&[1, 1, 0])]);
        let s = rref(&f, &[v(&[1, 0, 0]), v(&[1, 1, 0])]).unwrap();
        assert_eq!(s.rows().collect::<Vec<_>>(), [v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let s = rref(&f, &[]).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(
            rref(&f, &[v(&[1, 0]), v(&[1, 0, 0])]).unwrap_err(),
            Error::DimensionMismatch { expected: 2, got: 3 }
        );
    }

    #[test]
    fn lattice_examples() {
        let f = gf4();
        let e = |i| Vector::unit(3, i);
        let s01 = SubspaceBasis::span(&f, 3, &[e(0), e(1)]).unwrap();
        let s12 = SubspaceBasis::span(&f, 3, &[e(1), e(2)]).unwrap();
        let p1 = SubspaceBasis::point(&f, e(1)).unwrap();
        assert_eq!(
            lattice(&f, &s01, &s12, LatticeOp::Meet).unwrap(),
            LatticeValue::Subspace(p1)
        );
        let p0 = SubspaceBasis::point(&f, e(0)).unwrap();
        assert_eq!(p0.sum(&f, &p1).dim(), 2);
        let p = SubspaceBasis::point(&f, v(&[1, 1, 0])).unwrap();
        assert_eq!(
            lattice(&f, &s01, &p, LatticeOp::ContainsVec).unwrap(),
            LatticeValue::Bool(true)
        );
        assert_eq!(
            lattice(&f, &s01, &SubspaceBasis::zero(4), LatticeOp::Dim).unwrap_err(),
            Error::DimensionMismatch { expected: 3, got: 4 }
        );
    }

    #[test]
    fn normalization() {
        let f = gf4();
        assert_eq!(v(&[2, 2, 0]).normalized(&f).unwrap(), v(&[1, 1, 0]));
        assert_eq!(v(&[0, 0, 3]).normalized(&f).unwrap(), v(&[0, 0, 1]));
        assert_eq!(v(&[1, 0, 2]).normalized(&f).unwrap(), v(&[1, 0, 2]));
        assert_eq!(v(&[0, 0, 0]).normalized(&f), Err(Error::ZeroVector));
    }

    #[test]
    fn matrix_rank_and_products() {
        let f = gf4();
        let m = Matrix::from_codes(&[&[1, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        assert!(m.is_symmetric());
        assert!(m.is_invertible(&f));
        assert_eq!(m.mul(&f, &Matrix::identity(4)), m);
        let x = v(&[0, 1, 0, 0]);
        assert_eq!(m.left_mul(&f, x), v(&[1, 0, 0, 0]));
        let singular = Matrix::from_codes(&[&[1, 2], &[2, 3]]);
        // 2*2 = 3 = 1*3, so the rows are proportional
        assert_eq!(singular.rank(&f), 1);
    }
}
