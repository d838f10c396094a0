use proptest::prelude::*;

use regra_core::algebra::{FieldCtx, FieldElem, SubspaceBasis, Vector};
use regra_core::metric::{metric_report, FormKind};
use regra_core::projspace::{pencil_elements, Geometry, PencilSpec};
use regra_core::regular::{criterion, rad_oracle};
use regra_core::structures::StructureName;

fn vectors(q: u8, n: usize, count: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(prop::collection::vec(0..q, n), 1..=count)
        .prop_map(|rows| rows.iter().map(|r| Vector::from_codes(r)).collect())
}

/// `(k, n, form type)` with the type admissible for `n`.
fn grid() -> impl Strategy<Value = (u32, usize, u8)> {
    (2u32..=3, 3usize..=5, any::<bool>()).prop_map(|(k, n, symp)| {
        let t = if n % 2 == 1 {
            1
        } else if symp {
            3
        } else {
            2
        };
        (k, n, t)
    })
}

fn geom_and_rows(count: usize) -> impl Strategy<Value = (Geometry, Vec<Vector>)> {
    grid().prop_flat_map(move |(k, n, t)| {
        let g = Geometry::canonical(k, n, t).unwrap();
        vectors(1 << k, n, count).prop_map(move |v| (g.clone(), v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(k in 1u32..=8, a: u8, b: u8, c: u8) {
        prop_assume!(k != 7);
        let ctx = FieldCtx::new(k).unwrap();
        let m = (ctx.order() - 1) as u8;
        let (a, b, c) = (FieldElem(a & m), FieldElem(b & m), FieldElem(c & m));
        prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
        prop_assert_eq!(ctx.mul(a, ctx.mul(b, c)), ctx.mul(ctx.mul(a, b), c));
        prop_assert_eq!(ctx.sqrt(ctx.frob(a)), a);
        prop_assert_eq!(ctx.frob(ctx.sqrt(a)), a);
        if !a.is_zero() {
            prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), FieldElem(1));
        }
    }

    #[test]
    fn rref_ignores_generating_set((g, rows) in geom_and_rows(4), ops in prop::collection::vec((0usize..4, 0usize..4, 1u8..8), 0..12)) {
        let ctx = g.ctx();
        let base = g.span(&rows).unwrap();
        let mut v = rows.clone();
        for (i, j, c) in ops {
            let (i, j) = (i % v.len(), j % v.len());
            let c = c % g.q() as u8;
            if i != j && c != 0 {
                v[i] = v[i].add(v[j].scale(ctx, c));
            }
        }
        v.reverse();
        prop_assert_eq!(g.span(&v).unwrap(), base);
    }

    #[test]
    fn modular_dimension_law((g, rows) in geom_and_rows(6), split in 0usize..6) {
        let split = split % rows.len();
        let u = g.span(&rows[..split]).unwrap();
        let w = g.span(&rows[split..]).unwrap();
        prop_assert_eq!(g.join(&u, &w).dim() + g.meet(&u, &w).dim(), u.dim() + w.dim());
        prop_assert!(g.contains(&g.join(&u, &w), &u));
        prop_assert!(g.contains(&w, &g.meet(&u, &w)));
    }

    #[test]
    fn polarity_is_an_involution_sharing_radicals((g, rows) in geom_and_rows(4)) {
        let u = g.span(&rows).unwrap();
        let p = g.perp(&u);
        prop_assert_eq!(u.dim() + p.dim(), g.n());
        prop_assert_eq!(g.perp(&p), u);
        prop_assert_eq!(metric_report(&g, &u).rad, metric_report(&g, &p).rad);
    }

    #[test]
    fn criterion_is_the_oracle((g, rows) in geom_and_rows(4)) {
        prop_assume!(!g.is_symplectic());
        let u = g.span(&rows).unwrap();
        prop_assume!(u.dim() >= 1 && u.dim() < g.n());
        prop_assert_eq!(criterion(&g, &u).unwrap(), rad_oracle(&g, &u));
    }

    #[test]
    fn lines_meet_h_in_a_point_or_lie_in_it((g, rows) in geom_and_rows(2)) {
        prop_assume!(!g.is_symplectic());
        let l = g.span(&rows).unwrap();
        prop_assume!(l.dim() == 2);
        let d = g.meet(&l, g.h()).dim();
        prop_assert_eq!(d == 2, !g.is_affine(&l));
        prop_assert!(d >= 1);
    }

    #[test]
    fn pencil_is_the_flag_fiber((g, rows) in geom_and_rows(5)) {
        let bound = g.span(&rows).unwrap();
        prop_assume!(bound.dim() >= 2);
        let hub = g.span(&bound.rows().take(bound.dim() - 2).collect::<Vec<_>>()).unwrap();
        let spec = PencilSpec::new(&g, hub, bound).unwrap();
        let got = pencil_elements(&g, &spec).unwrap();
        let want: Vec<SubspaceBasis> = g
            .subspaces(spec.k())
            .unwrap()
            .iter()
            .filter(|x| g.contains(x, &hub) && g.contains(&bound, x))
            .copied()
            .collect();
        prop_assert_eq!(got.len(), g.q() + 1);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn form_kind_text_round_trip(k in 2u32..=3, m in 1usize..=2, e in 1u8..8, l in 1u8..8, odd: bool) {
        let q = 1u8 << k;
        let (e, l) = (e % q, l % q);
        prop_assume!(e != 0 && l != 0);
        let n = 2 * m + odd as usize;
        let ctx = FieldCtx::new(k).unwrap();
        let kind = if odd {
            FormKind::eps(FieldElem(e), regra_core::metric::nabla_sum(2 * m))
        } else {
            FormKind::mu_lambda(FieldElem(e), FieldElem(l), regra_core::metric::nabla_sum(2 * m - 2))
        };
        let g = Geometry::new(ctx, n, kind).unwrap();
        prop_assert_eq!(FormKind::parse(&g.kind().to_string(), n), Some(kind));
    }

    #[test]
    fn structure_names_round_trip(k in 1usize..6, which in 0usize..13) {
        let name = [
            StructureName::G1,
            StructureName::B1,
            StructureName::C1,
            StructureName::G2,
            StructureName::B2,
            StructureName::C2,
            StructureName::Gk(k),
            StructureName::Pk(k),
            StructureName::ProjG2,
            StructureName::Affine,
            StructureName::Dual(Box::new(StructureName::Gk(k))),
            StructureName::Dual(Box::new(StructureName::B1)),
            StructureName::Dual(Box::new(StructureName::Dual(Box::new(StructureName::C2)))),
        ][which]
            .clone();
        prop_assert_eq!(StructureName::parse(&name.to_string()), Some(name));
    }
}
