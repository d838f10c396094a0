use regra_core::oracle;
use regra_core::projspace::Geometry;
use regra_core::reconstruct::{adjacency, rebuild_b1, stars, LineHost, PointKind};
use regra_core::structures::{build, IncidenceStructure, Label, StructureName};
use regra_core::Error;

fn geom(k: u32, n: usize, t: u8) -> Geometry {
    Geometry::canonical(k, n, t).unwrap()
}

fn pencil_sets(g: &Geometry, host: &IncidenceStructure) -> Vec<Vec<u32>> {
    let mut v: Vec<Vec<u32>> = oracle::host_pencils(g, host).into_iter().map(|p| p.members).collect();
    v.dedup();
    v
}

#[test]
fn pencil_relation_classes_are_pencils() {
    let g = geom(3, 4, 2);
    for name in [StructureName::B2, StructureName::C2] {
        let host = build(&g, name.clone()).unwrap();
        let h = LineHost::new(&host);
        let got = h.pencil_classes();
        let want = pencil_sets(&g, &host);
        let extra = got.iter().filter(|c| want.binary_search(c).is_err()).count();
        let missing = want.iter().filter(|c| got.binary_search(c).is_err()).count();
        assert!(
            extra == 0 && missing == 0,
            "{name}: {} vs {}, extra {extra} missing {missing}",
            got.len(),
            want.len()
        );
    }
}

#[test]
fn stars_match_prediction_gf4_space() {
    for t in [2u8] {
        let g = geom(2, 4, t);
        for name in [StructureName::B2, StructureName::C2] {
            let host = build(&g, name.clone()).unwrap();
            let h = LineHost::new(&host);
            let mut fails = 0;
            let pencils = oracle::host_pencils(&g, &host);
            for p in &pencils {
                let st = h.star_closure(&p.members).unwrap();
                if st.s != oracle::predicted_star(&g, &host, &p.vertex) {
                    fails += 1;
                }
                assert_eq!(h.point_kind(&st.s), PointKind::Improper);
            }
            println!("{name}: {} pencils, {fails} star mismatches", pencils.len());
        }
    }
}

#[test]
fn rebuild_at_n4() {
    for (k, t) in [(3u32, 2u8), (2, 2)] {
        let g = geom(k, 4, t);
        let b1 = build(&g, StructureName::B1).unwrap();
        for name in [StructureName::B2, StructureName::C2, StructureName::G2] {
            let src = build(&g, name.clone()).unwrap();
            let got = rebuild_b1(&g, &src).unwrap();
            assert!(
                got == b1,
                "GF(2^{k}) {name}: {} {} vs {} {}",
                got.points.len(),
                got.blocks.len(),
                b1.points.len(),
                b1.blocks.len()
            );
        }
    }
}

#[test]
fn rebuild_star_route_n5() {
    let g = geom(2, 5, 1);
    let b1 = build(&g, StructureName::B1).unwrap();
    for name in [StructureName::B2, StructureName::C2] {
        let src = build(&g, name.clone()).unwrap();
        let got = rebuild_b1(&g, &src).unwrap();
        assert!(got == b1, "{name}");
    }
}

#[test]
fn point_kind_n5() {
    let g = geom(2, 5, 1);
    let host = build(&g, StructureName::B2).unwrap();
    let h = LineHost::new(&host);
    let all = stars(&h).unwrap();
    let mut kinds = [0, 0];
    for st in &all {
        let l0 = host.point_label(st.s[0]).subspace().unwrap();
        let l1 = host.point_label(st.s[1]).subspace().unwrap();
        let p = g.meet(l0, l1);
        let expect = if g.is_affine(&p) {
            PointKind::Proper
        } else {
            PointKind::Improper
        };
        assert_eq!(h.point_kind(&st.s), expect);
        kinds[(expect == PointKind::Proper) as usize] += 1;
    }
    assert_eq!(kinds, [85, 255]);
}

#[test]
fn adjacency_cases_gf4_space() {
    let g = geom(2, 4, 2);
    let host = build(&g, StructureName::B2).unwrap();
    let mut checked = 0;
    for (i, a) in host.points.iter().enumerate() {
        for b in &host.points[i + 1..] {
            match adjacency(&g, &host, a, b) {
                Ok(adj) => {
                    assert_eq!(adj.adjacent, adj.predicted.is_none(), "{a} {b}");
                    checked += 1;
                }
                Err(Error::NotConcurrent) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(checked > 0);
    let l = host.points[0];
    assert_eq!(adjacency(&g, &host, &l, &l), Err(Error::NotConcurrent));
    assert!(matches!(
        adjacency(&g, &host, &l, &Label::Fresh(1)),
        Err(Error::UnknownLabel(_))
    ));
}
