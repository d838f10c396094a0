//! Counterexample pairs showing that the polarity is not determined by the
//! regular point-line geometry, and the algebraic conditions describing its
//! automorphisms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::algebra::{FieldCtx, FieldElem, Matrix, SubspaceBasis, Vector};
use crate::error::{Error, Result};
use crate::metric::{nabla_sum, FormKind};
use crate::projspace::Geometry;
use crate::regular::{families, is_regular_fast};
use crate::sample;
use crate::structures::{build, morphism_check, IncidenceStructure, Label, Morphism, StructureName};

/// Two geometries on the same space and locus, with two points conjugate in
/// the first and not in the second.
#[derive(Clone, Debug)]
pub struct WitnessPair {
    pub choice: WitnessChoice,
    pub first: Geometry,
    pub second: Geometry,
    pub a1: SubspaceBasis,
    pub a2: SubspaceBasis,
    pub structures_equal: bool,
    pub conjugacy_differs: bool,
}

impl WitnessPair {
    pub fn is_valid(&self) -> bool {
        self.structures_equal && self.conjugacy_differs
    }
}

/// Parameters of one construction. Vectors are in `W` coordinates
/// (`eps` family) or `Y` coordinates (`mu, lambda` family).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum WitnessChoice {
    Eps {
        h1: Vector,
        h2: Vector,
        eps2: FieldElem,
    },
    MuLambda {
        y1: Vector,
        y2: Vector,
        lambda: FieldElem,
        mu2: FieldElem,
    },
}

/// Every vector of length `m`, in code order.
pub fn all_vectors(ctx: &FieldCtx, m: usize) -> impl Iterator<Item = Vector> + '_ {
    let q = ctx.order() as u64;
    (0..q.pow(m as u32)).map(move |mut idx| {
        let mut v = Vector::zero(m);
        for i in (0..m).rev() {
            v.set(i, FieldElem((idx % q) as u8));
            idx /= q;
        }
        v
    })
}

fn form_value(ctx: &FieldCtx, m: &Matrix, x: Vector, y: Vector) -> FieldElem {
    FieldElem(m.left_mul(ctx, x).dot(ctx, y))
}

fn nonzero_pairs(ctx: &FieldCtx, base: &Matrix) -> Vec<(Vector, Vector, FieldElem)> {
    let m = base.nrows();
    let mut out = Vec::new();
    for x in all_vectors(ctx, m) {
        for y in all_vectors(ctx, m) {
            let v = form_value(ctx, base, x, y);
            if !v.is_zero() {
                out.push((x, y, v));
            }
        }
    }
    out
}

fn check_small(ctx: &FieldCtx) -> Result<()> {
    if ctx.order() < 4 {
        return Err(Error::FieldTooSmall);
    }
    Ok(())
}

/// All admissible choices for the `eps` family, b off `H`.
pub fn eps_choices(ctx: &FieldCtx, n: usize) -> Result<Vec<WitnessChoice>> {
    check_small(ctx)?;
    if n < 3 || n % 2 == 0 {
        return Err(Error::ParityMismatch(n));
    }
    let base = nabla_sum(n - 1);
    let mut out = Vec::new();
    for (h1, h2, eps1) in nonzero_pairs(ctx, &base) {
        for eps2 in ctx.nonzero().filter(|&e| e != eps1) {
            out.push(WitnessChoice::Eps { h1, h2, eps2 });
        }
    }
    Ok(out)
}

/// All admissible choices for the `mu, lambda` family, b on `H`.
pub fn mulambda_choices(ctx: &FieldCtx, n: usize) -> Result<Vec<WitnessChoice>> {
    check_small(ctx)?;
    if n < 4 || n % 2 == 1 {
        return Err(Error::ParityMismatch(n));
    }
    let base = nabla_sum(n - 2);
    let mut out = Vec::new();
    for (y1, y2, mu1) in nonzero_pairs(ctx, &base) {
        for lambda in ctx.nonzero() {
            for mu2 in ctx.nonzero().filter(|&m| m != mu1) {
                out.push(WitnessChoice::MuLambda { y1, y2, lambda, mu2 });
            }
        }
    }
    Ok(out)
}

/// Builds witness pairs, sharing the regular structure of each parameter
/// value across choices.
#[derive(Default)]
pub struct WitnessBuilder {
    cache: BTreeMap<Key, IncidenceStructure>,
    equal: BTreeMap<(Key, Key), bool>,
}

impl WitnessBuilder {
    pub fn new() -> WitnessBuilder {
        WitnessBuilder::default()
    }

    fn structure(&mut self, key: Key, geom: &Geometry) -> Result<()> {
        if let alloc::collections::btree_map::Entry::Vacant(e) = self.cache.entry(key) {
            e.insert(build(geom, StructureName::B1)?);
        }
        Ok(())
    }

    /// Build and compare the structures a choice needs.
    pub fn prepare(&mut self, ctx: &FieldCtx, n: usize, choice: &WitnessChoice) -> Result<()> {
        let p = params(ctx, n, choice)?;
        if self.equal.contains_key(&(p.k1, p.k2)) {
            return Ok(());
        }
        self.structure(p.k1, &p.first)?;
        self.structure(p.k2, &p.second)?;
        let e = self.cache[&p.k1] == self.cache[&p.k2];
        self.equal.insert((p.k1, p.k2), e);
        Ok(())
    }

    pub fn pair(&mut self, ctx: &FieldCtx, n: usize, choice: &WitnessChoice) -> Result<WitnessPair> {
        self.prepare(ctx, n, choice)?;
        self.prepared_pair(ctx, n, choice)
    }

    /// Like [`WitnessBuilder::pair`] for a choice already prepared.
    pub fn prepared_pair(&self, ctx: &FieldCtx, n: usize, choice: &WitnessChoice) -> Result<WitnessPair> {
        let p = params(ctx, n, choice)?;
        let structures_equal = *self
            .equal
            .get(&(p.k1, p.k2))
            .ok_or_else(|| Error::Malformed("witness choice not prepared".into()))?;
        let (v1, v2) = (p.a1.point_vector(), p.a2.point_vector());
        let conjugacy_differs = p.first.xi(v1, v2) == 0 && p.second.xi(v1, v2) != 0;
        Ok(WitnessPair {
            choice: *choice,
            first: p.first,
            second: p.second,
            a1: p.a1,
            a2: p.a2,
            structures_equal,
            conjugacy_differs,
        })
    }
}

type Key = (FieldElem, FieldElem);

struct Params {
    k1: Key,
    k2: Key,
    first: Geometry,
    second: Geometry,
    a1: SubspaceBasis,
    a2: SubspaceBasis,
}

fn params(ctx: &FieldCtx, n: usize, choice: &WitnessChoice) -> Result<Params> {
    check_small(ctx)?;
    Ok(match *choice {
        WitnessChoice::Eps { h1, h2, eps2 } => {
            if n % 2 == 0 || h1.len() + 1 != n || h2.len() + 1 != n {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    got: h1.len(),
                });
            }
            let base = nabla_sum(n - 1);
            let eps1 = form_value(ctx, &base, h1, h2);
            if eps1.is_zero() || eps2.is_zero() || eps2 == eps1 {
                return Err(Error::ZeroParameter);
            }
            let lift = |h: Vector| {
                let mut v = Vector::zero(n);
                v.set(0, FieldElem::ONE);
                for i in 0..n - 1 {
                    v.set(i + 1, h.get(i));
                }
                SubspaceBasis::point(ctx, v)
            };
            Params {
                k1: (eps1, FieldElem::ZERO),
                k2: (eps2, FieldElem::ZERO),
                first: Geometry::new(ctx.clone(), n, FormKind::eps(eps1, base))?,
                second: Geometry::new(ctx.clone(), n, FormKind::eps(eps2, base))?,
                a1: lift(h1)?,
                a2: lift(h2)?,
            }
        }
        WitnessChoice::MuLambda { y1, y2, lambda, mu2 } => {
            if n % 2 == 1 || n < 4 || y1.len() + 2 != n || y2.len() + 2 != n {
                return Err(Error::DimensionMismatch {
                    expected: n.saturating_sub(2),
                    got: y1.len(),
                });
            }
            let base = nabla_sum(n - 2);
            let mu1 = form_value(ctx, &base, y1, y2);
            if mu1.is_zero() || mu2.is_zero() || lambda.is_zero() || mu2 == mu1 {
                return Err(Error::ZeroParameter);
            }
            // coordinates (omega, e0, Y)
            let lift = |y: Vector| {
                let mut v = Vector::zero(n);
                v.set(0, FieldElem::ONE);
                for i in 0..n - 2 {
                    v.set(i + 2, y.get(i));
                }
                SubspaceBasis::point(ctx, v)
            };
            Params {
                k1: (mu1, lambda),
                k2: (mu2, lambda),
                first: Geometry::new(ctx.clone(), n, FormKind::mu_lambda(mu1, lambda, base))?,
                second: Geometry::new(ctx.clone(), n, FormKind::mu_lambda(mu2, lambda, base))?,
                a1: lift(y1)?,
                a2: lift(y2)?,
            }
        }
    })
}

/// The `eps` construction for the choice selected by `seed`.
pub fn eps_witness(ctx: &FieldCtx, n: usize, seed: u64) -> Result<WitnessPair> {
    let choices = eps_choices(ctx, n)?;
    let c = choices[sample::pick(seed, 0, choices.len())];
    WitnessBuilder::new().pair(ctx, n, &c)
}

/// The `mu, lambda` construction for the choice selected by `seed`.
pub fn mulambda_witness(ctx: &FieldCtx, n: usize, seed: u64) -> Result<WitnessPair> {
    let choices = mulambda_choices(ctx, n)?;
    let c = choices[sample::pick(seed, 0, choices.len())];
    WitnessBuilder::new().pair(ctx, n, &c)
}

/// A point chart `[x0, x] = x0 e0 + x` with `x` in `W`, the subspace of `H`.
/// When b is off `H`, `e0` spans b and so b is the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub e0: Vector,
    pub w: SubspaceBasis,
    /// Index `j` with `xi(e0, y) = y_j` for every `y` in `W`, if any.
    pub pi1: Option<usize>,
}

impl Chart {
    pub fn new(geom: &Geometry) -> Result<Chart> {
        let b = *geom.pole_or_err()?;
        let n = geom.n();
        let e0 = if geom.in_h(b.point_vector()) {
            (0..n)
                .map(|i| Vector::unit(n, i))
                .find(|&v| !geom.in_h(v))
                .ok_or(Error::Malformed("H is the whole space".into()))?
        } else {
            b.point_vector()
        };
        let w = *geom.h();
        // xi(e0 + x, y) = xi(e0, y) + xi0(x, y), and xi(e0, .) is linear
        // on W, so the basis decides the projection
        let pi1 = (0..w.dim()).find(|&j| (0..w.dim()).all(|i| geom.xi(e0, w.row(i)) == (i == j) as u8));
        Ok(Chart { e0, w, pi1 })
    }

    pub fn m(&self) -> usize {
        self.w.dim()
    }

    pub fn vector(&self, ctx: &FieldCtx, x0: u8, x: Vector) -> Vector {
        let mut v = self.e0.scale(ctx, x0);
        for (i, r) in self.w.rows().enumerate() {
            v = v.add(r.scale(ctx, x.code(i)));
        }
        v
    }

    pub fn coords(&self, geom: &Geometry, v: Vector) -> (u8, Vector) {
        let ctx = geom.ctx();
        let heq = geom.h_equation();
        let x0 = ctx.mul_u8(heq.dot(ctx, v), ctx.inv_u8(heq.dot(ctx, self.e0)));
        let rest = v.add(self.e0.scale(ctx, x0));
        let mut x = Vector::zero(self.m());
        for (i, p) in self.w.pivots().enumerate() {
            x.set(i, rest.get(p));
        }
        (x0, x)
    }

    /// The restriction of the form to `W`, in chart coordinates.
    pub fn xi0(&self, geom: &Geometry, x: Vector, y: Vector) -> u8 {
        let ctx = geom.ctx();
        geom.xi(self.vector(ctx, 0, x), self.vector(ctx, 0, y))
    }

    pub fn pi1(&self, y: Vector) -> u8 {
        self.pi1.map_or(0, |j| y.code(j))
    }
}

/// `x -> phi(x) + omega` on the affine points of a chart, with
/// `phi(x) = M x^(2^e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SemilinearMap {
    pub matrix: Matrix,
    pub frob: u32,
    pub translation: Option<Vector>,
}

impl SemilinearMap {
    pub fn new(ctx: &FieldCtx, matrix: Matrix, frob: u32, translation: Option<Vector>) -> Result<SemilinearMap> {
        if !matrix.is_invertible(ctx) {
            return Err(Error::SingularMatrix);
        }
        if frob >= ctx.k() {
            return Err(Error::WrongCase("frobenius exponent must be below k"));
        }
        if let Some(w) = translation {
            if w.len() != matrix.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: matrix.nrows(),
                    got: w.len(),
                });
            }
        }
        Ok(SemilinearMap {
            matrix,
            frob,
            translation,
        })
    }

    pub fn identity(m: usize) -> SemilinearMap {
        SemilinearMap {
            matrix: Matrix::identity(m),
            frob: 0,
            translation: None,
        }
    }

    pub fn translation(omega: Vector) -> SemilinearMap {
        SemilinearMap {
            matrix: Matrix::identity(omega.len()),
            frob: 0,
            translation: Some(omega),
        }
    }

    pub fn omega(&self) -> Vector {
        self.translation.unwrap_or(Vector::zero(self.matrix.nrows()))
    }

    /// The linear-semilinear part `phi`.
    pub fn phi(&self, ctx: &FieldCtx, x: Vector) -> Vector {
        let xs = x.map_coords(|c| ctx.frob_pow(FieldElem(c), self.frob).0);
        self.matrix.apply(ctx, xs)
    }

    /// The induced semilinear map of the whole space.
    pub fn lift(&self, geom: &Geometry, chart: &Chart, v: Vector) -> Vector {
        let ctx = geom.ctx();
        let (x0, x) = chart.coords(geom, v);
        let t0 = ctx.frob_pow(FieldElem(x0), self.frob).0;
        let img = self.phi(ctx, x).add(self.omega().scale(ctx, t0));
        chart.vector(ctx, t0, img)
    }

    pub fn image(&self, geom: &Geometry, chart: &Chart, s: &SubspaceBasis) -> Result<SubspaceBasis> {
        let rows: Vec<Vector> = s.rows().map(|r| self.lift(geom, chart, r)).collect();
        geom.span(&rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AutVerdict {
    pub algebraic: bool,
    pub geometric: bool,
}

fn preserves_perp_h(geom: &Geometry, chart: &Chart, f: &SemilinearMap) -> bool {
    let ctx = geom.ctx();
    let pts: Vec<Vector> = geom
        .points_of(geom.h())
        .iter()
        .map(|p| chart.coords(geom, p.point_vector()).1)
        .collect();
    let imgs: Vec<Vector> = pts.iter().map(|&x| f.phi(ctx, x)).collect();
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let before = chart.xi0(geom, pts[i], pts[j]) == 0;
            let after = chart.xi0(geom, imgs[i], imgs[j]) == 0;
            if before != after {
                return false;
            }
        }
    }
    true
}

/// The algebraic condition: for b off `H` the map must fix b and preserve the
/// conjugacy on `H`; for b on `H` it must also satisfy the implication
/// relating the form on `W` to the projection `pi1`.
pub fn aut_algebraic(geom: &Geometry, chart: &Chart, f: &SemilinearMap) -> Result<bool> {
    if f.matrix.nrows() != chart.m() {
        return Err(Error::DimensionMismatch {
            expected: chart.m(),
            got: f.matrix.nrows(),
        });
    }
    if !preserves_perp_h(geom, chart, f) {
        return Ok(false);
    }
    if geom.pole_on_h() == Some(false) {
        return Ok(f.omega().is_zero());
    }
    let ctx = geom.ctx();
    let omega = f.omega();
    let m = chart.m();
    let images: Vec<(Vector, Vector)> = all_vectors(ctx, m).map(|x| (x, f.phi(ctx, x))).collect();
    for &(y, py) in &images {
        let rhs = chart.pi1(py) ^ chart.xi0(geom, omega, py);
        for &(x, px) in &images {
            if chart.xi0(geom, x, y) == chart.pi1(y) && chart.xi0(geom, px, py) != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether the induced point and line maps form an automorphism of `b1`.
pub fn aut_geometric(geom: &Geometry, chart: &Chart, b1: &IncidenceStructure, f: &SemilinearMap) -> Result<bool> {
    let mut points = BTreeMap::new();
    for l in &b1.points {
        points.insert(*l, relabel(geom, chart, f, l)?);
    }
    let mut blocks = BTreeMap::new();
    for b in &b1.blocks {
        blocks.insert(b.label, relabel(geom, chart, f, &b.label)?);
    }
    morphism_check(b1, b1, &Morphism { points, blocks })
}

fn relabel(geom: &Geometry, chart: &Chart, f: &SemilinearMap, l: &Label) -> Result<Label> {
    match l {
        Label::Subspace(s) => Ok(Label::Subspace(f.image(geom, chart, s)?)),
        other => Err(Error::UnknownLabel(alloc::format!("{other}"))),
    }
}

pub fn aut_equivalence(geom: &Geometry, f: &SemilinearMap) -> Result<AutVerdict> {
    let chart = Chart::new(geom)?;
    let b1 = build(geom, StructureName::B1)?;
    Ok(AutVerdict {
        algebraic: aut_algebraic(geom, &chart, f)?,
        geometric: aut_geometric(geom, &chart, &b1, f)?,
    })
}

/// A seeded map for instance `i`. Odd instances preserve the radical of the
/// form on `W` when it has one, so that both verdicts occur.
pub fn random_map(geom: &Geometry, chart: &Chart, seed: u64, i: u64) -> SemilinearMap {
    use rand::Rng;
    let ctx = geom.ctx();
    let m = chart.m();
    let q = ctx.order() as u8;
    let mut rng = sample::rng(seed, i);
    let rad = (0..m)
        .map(|j| Vector::unit(m, j))
        .find(|&e| (0..m).all(|i| chart.xi0(geom, e, Vector::unit(m, i)) == 0));
    loop {
        let mut mat = Matrix::zero(m, m);
        for r in 0..m {
            for c in 0..m {
                mat.set(r, c, FieldElem(rng.random_range(0..q)));
            }
        }
        if let (Some(e), true) = (rad, i % 2 == 1) {
            // the radical direction goes to a multiple of itself
            let j = e.first_nonzero().unwrap_or(0);
            let lam = FieldElem(rng.random_range(1..q));
            for r in 0..m {
                mat.set(r, j, if r == j { lam } else { FieldElem::ZERO });
            }
        }
        let frob = rng.random_range(0..ctx.k());
        let omega = match rng.random_range(0..3u8) {
            0 => None,
            1 => Some(rad.map_or(Vector::zero(m), |e| e.scale(ctx, rng.random_range(0..q)))),
            _ => {
                let mut w = Vector::zero(m);
                for c in 0..m {
                    w.set(c, FieldElem(rng.random_range(0..q)));
                }
                Some(w)
            }
        };
        if let Ok(f) = SemilinearMap::new(ctx, mat, frob, omega) {
            return f;
        }
    }
}

/// Outcome of the elementary description of the regular lines, b off `H`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rep323 {
    pub affine_lines: usize,
    pub starred_lines: usize,
    /// Lines where regularity and the star description disagree.
    pub line_failures: Vec<SubspaceBasis>,
    pub pairs: usize,
    /// Pairs of chart vectors where the form test and the line disagree.
    pub pair_failures: Vec<(Vector, Vector)>,
}

impl Rep323 {
    pub fn passed(&self) -> bool {
        self.line_failures.is_empty() && self.pair_failures.is_empty()
    }
}

pub fn rep_323_check(geom: &Geometry) -> Result<Rep323> {
    if geom.pole_on_h() != Some(false) {
        return Err(Error::WrongCase("b must lie off H"));
    }
    let ctx = geom.ctx();
    let b = *geom.pole_or_err()?;
    let fam = families(geom, 2)?;
    // a polar space of rank one has no lines; its generators are points
    let generators: Vec<SubspaceBasis> = if fam.l_star.is_empty() {
        geom.points_of(geom.h())
    } else {
        fam.l_star.clone()
    };
    let planes: Vec<SubspaceBasis> = generators.iter().map(|l| geom.join(&b, l)).collect();
    let mut out = Rep323::default();
    for line in geom.subspaces(2)? {
        if !geom.is_affine(line) {
            continue;
        }
        out.affine_lines += 1;
        let starred = planes.iter().any(|p| geom.contains(p, line));
        out.starred_lines += starred as usize;
        let in_a2 = fam.a_k.binary_search(line).is_ok();
        if in_a2 == starred {
            out.line_failures.push(*line);
        }
    }
    let chart = Chart::new(geom)?;
    let m = chart.m();
    let vs: Vec<Vector> = all_vectors(ctx, m).collect();
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            out.pairs += 1;
            let line = geom.span(&[chart.vector(ctx, 1, u), chart.vector(ctx, 1, v)])?;
            let nonregular = !is_regular_fast(geom, &line);
            if nonregular != (chart.xi0(geom, u, v) == 0) {
                out.pair_failures.push((u, v));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_too_small() {
        let ctx = FieldCtx::new(1).unwrap();
        assert_eq!(eps_witness(&ctx, 3, 0).unwrap_err(), Error::FieldTooSmall);
        assert_eq!(mulambda_witness(&ctx, 4, 0).unwrap_err(), Error::FieldTooSmall);
    }

    #[test]
    fn chart_round_trip() {
        for t in [1u8, 2] {
            let n = if t == 1 { 3 } else { 4 };
            let g = Geometry::canonical(2, n, t).unwrap();
            let c = Chart::new(&g).unwrap();
            assert_eq!(c.pi1.is_some(), t == 2);
            for v in all_vectors(g.ctx(), n) {
                let (x0, x) = c.coords(&g, v);
                assert_eq!(c.vector(g.ctx(), x0, x), v);
            }
        }
    }
}
