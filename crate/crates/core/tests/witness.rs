use regra_core::algebra::{FieldCtx, FieldElem, Vector};
use regra_core::metric::{nabla_sum, FormKind};
use regra_core::projspace::Geometry;
use regra_core::structures::{build, StructureName};
use regra_core::witness::*;
use regra_core::Error;

fn sweep(ctx: &FieldCtx, n: usize, choices: &[WitnessChoice]) -> usize {
    let mut wb = WitnessBuilder::new();
    choices
        .iter()
        .filter(|c| !wb.pair(ctx, n, c).unwrap().is_valid())
        .count()
}

#[test]
fn eps_all_choices_gf4() {
    let ctx = FieldCtx::new(2).unwrap();
    let choices = eps_choices(&ctx, 3).unwrap();
    // 16 x 16 vector pairs, of which those with nonzero form, times two eps2
    assert_eq!(choices.len(), 2 * 15 * 12);
    assert_eq!(sweep(&ctx, 3, &choices), 0);
}

#[test]
fn mulambda_all_choices_gf4() {
    let ctx = FieldCtx::new(2).unwrap();
    let choices = mulambda_choices(&ctx, 4).unwrap();
    assert_eq!(choices.len(), 15 * 12 * 3 * 2);
    assert_eq!(sweep(&ctx, 4, &choices), 0);
}

#[test]
fn seeded_witnesses_gf8() {
    let ctx = FieldCtx::new(3).unwrap();
    for seed in 0..5 {
        let w = eps_witness(&ctx, 3, seed).unwrap();
        assert!(w.is_valid(), "{:?}", w.choice);
        let w = mulambda_witness(&ctx, 4, seed).unwrap();
        assert!(w.is_valid(), "{:?}", w.choice);
    }
    let a = eps_witness(&ctx, 3, 11).unwrap();
    let b = eps_witness(&ctx, 3, 11).unwrap();
    assert_eq!(a.choice, b.choice);
}

#[test]
fn eps_all_choices_gf8_plane() {
    let ctx = FieldCtx::new(3).unwrap();
    let choices = eps_choices(&ctx, 3).unwrap();
    assert_eq!(sweep(&ctx, 3, &choices), 0);
}

#[test]
fn parity_and_size_errors() {
    let ctx = FieldCtx::new(2).unwrap();
    assert_eq!(eps_choices(&ctx, 4).unwrap_err(), Error::ParityMismatch(4));
    assert_eq!(mulambda_choices(&ctx, 5).unwrap_err(), Error::ParityMismatch(5));
    let bad = WitnessChoice::Eps {
        h1: Vector::from_codes(&[1, 0]),
        h2: Vector::from_codes(&[0, 1]),
        eps2: FieldElem(1),
    };
    assert_eq!(
        WitnessBuilder::new().pair(&ctx, 3, &bad).unwrap_err(),
        Error::ZeroParameter
    );
}

#[test]
fn family_forms_nonsingular() {
    for k in [2u32, 3] {
        let ctx = FieldCtx::new(k).unwrap();
        for e in ctx.nonzero() {
            assert!(Geometry::new(ctx.clone(), 3, FormKind::eps(e, nabla_sum(2))).is_ok());
            for l in ctx.nonzero() {
                assert!(Geometry::new(ctx.clone(), 4, FormKind::mu_lambda(e, l, nabla_sum(2))).is_ok());
            }
        }
    }
}

#[test]
fn lambda_fixes_the_structure() {
    // only mu varies inside a pair; across lambda the structures differ
    let ctx = FieldCtx::new(2).unwrap();
    let g = |mu: u8, lambda: u8| {
        Geometry::new(
            ctx.clone(),
            4,
            FormKind::mu_lambda(FieldElem(mu), FieldElem(lambda), nabla_sum(2)),
        )
        .unwrap()
    };
    let s = |g: &Geometry| build(g, StructureName::B1).unwrap();
    assert!(s(&g(1, 1)) == s(&g(2, 1)));
    assert!(s(&g(1, 1)) == s(&g(3, 1)));
    let across = (2..4).filter(|&l| s(&g(1, 1)) != s(&g(1, l))).count();
    println!("structures differing across lambda: {across} of 2");
}

#[test]
fn identity_is_an_automorphism() {
    for (n, t) in [(3usize, 1u8), (4, 2)] {
        let g = Geometry::canonical(2, n, t).unwrap();
        let v = aut_equivalence(&g, &SemilinearMap::identity(n - 1)).unwrap();
        assert_eq!(
            v,
            AutVerdict {
                algebraic: true,
                geometric: true
            }
        );
    }
}

#[test]
fn translations_gf4_space() {
    let g = Geometry::canonical(2, 4, 2).unwrap();
    let chart = Chart::new(&g).unwrap();
    let b1 = build(&g, StructureName::B1).unwrap();
    let b = chart.coords(&g, g.pole().unwrap().point_vector()).1;
    let mut admitted = 0;
    for w in all_vectors(g.ctx(), 3) {
        let f = SemilinearMap::translation(w);
        let alg = aut_algebraic(&g, &chart, &f).unwrap();
        let geo = aut_geometric(&g, &chart, &b1, &f).unwrap();
        let parallel = (0..4).any(|c| b.scale(g.ctx(), c) == w);
        assert_eq!((alg, geo), (parallel, parallel), "{w}");
        admitted += alg as usize;
    }
    assert_eq!(admitted, 4);
}

#[test]
fn random_maps_agree() {
    for (n, t) in [(3usize, 1u8), (4, 2)] {
        let g = Geometry::canonical(2, n, t).unwrap();
        let chart = Chart::new(&g).unwrap();
        let b1 = build(&g, StructureName::B1).unwrap();
        let mut seen = [0usize; 2];
        for i in 0..100 {
            let f = random_map(&g, &chart, 5, i);
            let alg = aut_algebraic(&g, &chart, &f).unwrap();
            let geo = aut_geometric(&g, &chart, &b1, &f).unwrap();
            assert_eq!(alg, geo, "n={n} map {f:?}");
            seen[alg as usize] += 1;
        }
        assert!(seen[0] > 0 && seen[1] > 0, "n={n} {seen:?}");
    }
}

#[test]
fn singular_map_rejected() {
    let ctx = FieldCtx::new(2).unwrap();
    let m = regra_core::algebra::Matrix::zero(2, 2);
    assert_eq!(SemilinearMap::new(&ctx, m, 0, None).unwrap_err(), Error::SingularMatrix);
}

#[test]
fn elementary_description() {
    for k in [2u32, 3] {
        let g = Geometry::canonical(k, 3, 1).unwrap();
        let r = rep_323_check(&g).unwrap();
        assert!(r.passed(), "GF(2^{k}): {r:?}");
        assert!(r.starred_lines > 0 && r.pairs > 0);
    }
    let g = Geometry::canonical(2, 4, 2).unwrap();
    assert!(matches!(rep_323_check(&g), Err(Error::WrongCase(_))));
}
