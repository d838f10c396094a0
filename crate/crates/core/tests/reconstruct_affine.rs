use regra_core::algebra::{SubspaceBasis, Vector};
use regra_core::oracle;
use regra_core::projspace::Geometry;
use regra_core::reconstruct::{b1_from_c1, bracket_q, identify, parallel_eq5, recover_affine, PointLine};
use regra_core::regular::families;
use regra_core::structures::{build, IncidenceStructure, Label, StructureName};
use regra_core::Error;

fn geom(k: u32, n: usize, t: u8) -> Geometry {
    Geometry::canonical(k, n, t).unwrap()
}

fn line_label(s: &IncidenceStructure, j: usize) -> SubspaceBasis {
    *s.blocks[j].label.subspace().unwrap()
}

#[test]
fn parallelism_matches_oracle_gf8_plane() {
    let g = geom(3, 3, 1);
    let b1 = build(&g, StructureName::B1).unwrap();
    let pl = PointLine::new(&b1);
    let nb = b1.blocks.len();
    let mut parallel_pairs = 0;
    for i in 0..nb {
        for j in 0..nb {
            let expect = oracle::affine_parallel(&g, &line_label(&b1, i), &line_label(&b1, j));
            assert_eq!(pl.parallel(i as u32, j as u32), expect, "{i} {j}");
            parallel_pairs += expect as usize;
        }
    }
    assert!(parallel_pairs > 0);
}

#[test]
fn parallel_trivial_cases() {
    let g = geom(3, 3, 1);
    let b1 = build(&g, StructureName::B1).unwrap();
    let m = b1.blocks[0].label;
    assert!(!parallel_eq5(&b1, &m, &m).unwrap());
    let pl = PointLine::new(&b1);
    let p = b1.blocks[0].points[0];
    let through = pl.lines_through(p);
    assert!(!pl.parallel(through[0], through[1]));
    let bogus = Label::Fresh(9);
    assert!(matches!(parallel_eq5(&b1, &m, &bogus), Err(Error::UnknownLabel(_))));
}

#[test]
fn plane_classes_are_the_pi_sets_gf8_plane() {
    let g = geom(3, 3, 1);
    let b1 = build(&g, StructureName::B1).unwrap();
    let pl = PointLine::new(&b1);
    let all = pl.pi_family(false);
    assert_eq!(all, oracle::plane_classes(&g, &b1).unwrap());
    assert_eq!(pl.pi_family(true), all);
    // a single plane: q^2 - 1 affine points remain of a regular one
    assert_eq!(all.len(), 1);
    assert_eq!(all[0].len(), 63);
}

#[test]
fn pi_sets_gf8_space_type2() {
    let g = geom(3, 4, 2);
    let b1 = build(&g, StructureName::B1).unwrap();
    let pl = PointLine::new(&b1);
    let fam = pl.pi_family(true);
    assert_eq!(fam, oracle::plane_classes(&g, &b1).unwrap());
    assert!(fam.iter().all(|s| s.len() == 63 || s.len() == 64));
}

#[test]
fn l0_classes_match_nonregular_lines() {
    for (k, n, t) in [(3, 3, 1), (3, 4, 2)] {
        let g = geom(k, n, t);
        let b1 = build(&g, StructureName::B1).unwrap();
        let pl = PointLine::new(&b1);
        let classes = pl.l0_classes(&pl.pi_family(true));
        assert_eq!(classes, oracle::nonregular_traces(&g, &b1).unwrap(), "{k} {n} {t}");
        let q = g.q();
        let b = *g.pole().unwrap();
        let through_b = oracle::nonregular_affine_lines(&g)
            .unwrap()
            .iter()
            .filter(|l| g.contains(l, &b))
            .count();
        let deficient = classes.iter().filter(|c| c.len() + 1 == q).count();
        assert_eq!(deficient, if g.is_affine(&b) { through_b } else { 0 });
        assert!(classes.iter().all(|c| c.len() == q || c.len() + 1 == q));
    }
}

#[test]
fn recover_affine_equals_affine_space() {
    for (k, n, t) in [(3, 3, 1), (3, 4, 2)] {
        let g = geom(k, n, t);
        let b1 = build(&g, StructureName::B1).unwrap();
        let rec = recover_affine(&b1).unwrap();
        let has_bstar = rec.points.contains(&Label::Fresh(0));
        assert_eq!(has_bstar, g.is_affine(g.pole().unwrap()));
        let named = identify(&g, &rec, StructureName::Affine).unwrap();
        assert!(named == build(&g, StructureName::Affine).unwrap(), "{k} {n} {t}");
    }
}

#[test]
fn c1_route_recovers_b1() {
    for (k, n, t) in [(3, 3, 1), (3, 4, 2)] {
        let g = geom(k, n, t);
        let c1 = build(&g, StructureName::C1).unwrap();
        let b1 = identify(&g, &b1_from_c1(&c1).unwrap(), StructureName::B1).unwrap();
        assert!(b1 == build(&g, StructureName::B1).unwrap(), "{k} {n} {t}");
        let rec = identify(&g, &recover_affine(&b1).unwrap(), StructureName::Affine).unwrap();
        assert!(rec == build(&g, StructureName::Affine).unwrap());
    }
}

#[test]
fn bracket_examples() {
    let g = geom(2, 3, 1);
    let ctx = g.ctx().clone();
    let a2 = families(&g, 2).unwrap().a_k;
    let q = SubspaceBasis::point(&ctx, Vector::from_codes(&[0, 1, 0])).unwrap();
    let got = bracket_q(&g, &a2, &q).unwrap();
    assert_eq!(got, oracle::perp_affine_points(&g, &q));
    assert_eq!(got.len(), 4);
    let bq = g.join(g.pole().unwrap(), &q);
    assert!(got.iter().all(|p| g.contains(&bq, p)));
    let affine = SubspaceBasis::point(&ctx, Vector::from_codes(&[1, 0, 0])).unwrap();
    assert_eq!(bracket_q(&g, &a2, &affine), Err(Error::NotOnHorizon));

    // every point of H: spanning its bracket together with q gives q^perp
    let g = geom(2, 4, 2);
    let a2 = families(&g, 2).unwrap().a_k;
    for q in g.points_of(g.h()) {
        let got = bracket_q(&g, &a2, &q).unwrap();
        assert_eq!(got, oracle::perp_affine_points(&g, &q));
        if got.is_empty() {
            assert_eq!(Some(&q), g.pole());
            continue;
        }
        let mut span = q;
        for p in &got {
            span = g.join(&span, p);
        }
        assert_eq!(span, g.perp(&q));
    }
}
