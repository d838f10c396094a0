use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Fixed moduli, indexed by degree. Degree 1 (`x + 1`) exists only so that
/// GF(2) can be constructed and rejected by the witness generators.
pub const MODULI: [(u32, u32); 7] = [
    (1, 0b11),
    (2, 0b111),
    (3, 0b1011),
    (4, 0b1_0011),
    (5, 0b10_0101),
    (6, 0b100_0011),
    (8, 0b1_0001_1011),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(pub u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Frob,
    Sqrt,
}

struct Tables {
    mul: Vec<u8>,
    inv: Vec<u8>,
    sqrt: Vec<u8>,
}

/// GF(2^k) with precomputed multiplication, inverse and square-root tables.
/// Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct FieldCtx {
    k: u32,
    modulus: u32,
    tables: Arc<Tables>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#b}", self.k, self.modulus)
    }
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn is_irreducible(modulus: u32, k: u32) -> bool {
    if poly_degree(modulus) != k as i32 {
        return false;
    }
    // trial division by every polynomial of degree 1..k
    (2u32..(1 << k)).all(|d| poly_rem(modulus, d) != 0)
}

fn clmul_reduce(a: u32, b: u32, modulus: u32, k: u32) -> u32 {
    let mut acc = 0u32;
    for i in 0..k {
        if b >> i & 1 == 1 {
            acc ^= a << i;
        }
    }
    poly_rem(acc, modulus)
}

impl FieldCtx {
    /// The field of order 2^k with the fixed modulus for that degree.
    pub fn new(k: u32) -> Result<FieldCtx> {
        let modulus = MODULI
            .iter()
            .find(|(d, _)| *d == k)
            .map(|(_, m)| *m)
            .ok_or(Error::UnsupportedDegree(k))?;
        FieldCtx::with_modulus(k, modulus)
    }

    pub fn with_modulus(k: u32, modulus: u32) -> Result<FieldCtx> {
        if k == 0 || k > 8 {
            return Err(Error::UnsupportedDegree(k));
        }
        if !is_irreducible(modulus, k) {
            return Err(Error::NotIrreducible { k, modulus });
        }
        let q = 1usize << k;
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in a..q {
                let c = clmul_reduce(a as u32, b as u32, modulus, k) as u8;
                mul[a * q + b] = c;
                mul[b * q + a] = c;
            }
        }
        let mut inv = vec![0u8; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
        }
        let mut sqrt = vec![0u8; q];
        for a in 0..q {
            sqrt[mul[a * q + a] as usize] = a as u8;
        }
        Ok(FieldCtx {
            k,
            modulus,
            tables: Arc::new(Tables { mul, inv, sqrt }),
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of elements, 2^k.
    pub fn order(&self) -> usize {
        1 << self.k
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order()).map(|c| FieldElem(c as u8))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.order()).map(|c| FieldElem(c as u8))
    }

    #[inline]
    pub fn mul_u8(&self, a: u8, b: u8) -> u8 {
        self.tables.mul[((a as usize) << self.k) | b as usize]
    }

    /// Row of the multiplication table for a fixed left factor.
    #[inline]
    pub fn mul_row(&self, a: u8) -> &[u8] {
        let q = self.order();
        &self.tables.mul[a as usize * q..a as usize * q + q]
    }

    #[inline]
    pub fn inv_u8(&self, a: u8) -> u8 {
        self.tables.inv[a as usize]
    }

    #[inline]
    pub fn sqrt_u8(&self, a: u8) -> u8 {
        self.tables.sqrt[a as usize]
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul_u8(a.0, b.0))
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElem(self.inv_u8(a.0)))
    }

    pub fn frob(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    /// a^(2^e).
    pub fn frob_pow(&self, a: FieldElem, e: u32) -> FieldElem {
        (0..e % self.k).fold(a, |x, _| self.frob(x))
    }

    /// Square root, computed as frob applied k-1 times.
    pub fn sqrt(&self, a: FieldElem) -> FieldElem {
        self.frob_pow(a, self.k - 1)
    }

    pub fn check(&self, a: FieldElem) -> Result<()> {
        if (a.0 as usize) < self.order() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.order(),
                got: a.0 as usize,
            })
        }
    }
}

pub fn field_arith(ctx: &FieldCtx, op: FieldOp, a: FieldElem, b: Option<FieldElem>) -> Result<FieldElem> {
    ctx.check(a)?;
    if let Some(b) = b {
        ctx.check(b)?;
    }
    match op {
        FieldOp::Add => Ok(ctx.add(a, b.ok_or(Error::MissingOperand)?)),
        FieldOp::Mul => Ok(ctx.mul(a, b.ok_or(Error::MissingOperand)?)),
        FieldOp::Inv => ctx.inv(a),
        FieldOp::Frob => Ok(ctx.frob(a)),
        FieldOp::Sqrt => Ok(ctx.sqrt(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(k: u32) -> FieldCtx {
        FieldCtx::new(k).unwrap()
    }

    #[test]
    fn small_products() {
        assert_eq!(gf(2).mul(FieldElem(2), FieldElem(2)), FieldElem(3));
        assert_eq!(gf(3).mul(FieldElem(2), FieldElem(4)), FieldElem(3));
        for k in [1, 2, 3, 4, 5, 6, 8] {
            assert_eq!(gf(k).inv(FieldElem::ONE), Ok(FieldElem::ONE));
        }
    }

    #[test]
    fn sqrt_against_squaring_table() {
        let f = gf(2);
        // squares by brute force: find the unique r with r*r = 2
        let r = f.elements().find(|&r| f.mul(r, r) == FieldElem(2)).unwrap();
        assert_eq!(r, FieldElem(3));
        assert_eq!(f.sqrt(FieldElem(2)), r);
        for k in [1, 2, 3, 4, 5, 6, 8] {
            let f = gf(k);
            for a in f.elements() {
                assert_eq!(f.sqrt(f.frob(a)), a);
                assert_eq!(f.sqrt_u8(a.0), f.sqrt(a).0);
                let s = f.sqrt(a);
                assert_eq!(f.mul(s, s), a);
            }
        }
    }

    #[test]
    fn moduli_are_irreducible() {
        for (k, m) in MODULI {
            assert!(is_irreducible(m, k), "degree {k}");
        }
        assert_eq!(
            FieldCtx::with_modulus(2, 0b101).unwrap_err(),
            Error::NotIrreducible { k: 2, modulus: 0b101 }
        );
        assert_eq!(FieldCtx::new(7).unwrap_err(), Error::UnsupportedDegree(7));
    }

    #[test]
    fn inverse_of_zero() {
        let f = gf(3);
        assert_eq!(
            field_arith(&f, FieldOp::Inv, FieldElem::ZERO, None),
            Err(Error::DivisionByZero)
        );
        assert_eq!(
            field_arith(&f, FieldOp::Mul, FieldElem(3), None),
            Err(Error::MissingOperand)
        );
        assert_eq!(
            field_arith(&f, FieldOp::Add, FieldElem(3), Some(FieldElem(5))),
            Ok(FieldElem(6))
        );
    }

    #[test]
    fn field_axioms_gf16() {
        let f = gf(4);
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    let lhs = f.mul(a, f.add(b, c));
                    let rhs = f.add(f.mul(a, b), f.mul(a, c));
                    assert_eq!(lhs, rhs);
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                }
            }
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
            }
        }
    }
}
