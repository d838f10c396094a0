use regra_core::projspace::Geometry;
use regra_core::verify::*;
use regra_core::Error;

fn geom(k: u32, n: usize, t: u8) -> Geometry {
    Geometry::canonical(k, n, t).unwrap()
}

#[test]
fn registry_listing() {
    let all = list_checks();
    assert!(all.len() >= 30);
    let f21 = all.iter().find(|c| c.id == "F2.1").unwrap();
    assert!(!f21.needs_six_lines);
    assert!(all.iter().find(|c| c.id == "P5.10").unwrap().needs_six_lines);
    assert_eq!(list_checks(), all);
}

#[test]
fn horizon_polar_gf4_plane() {
    let g = geom(2, 3, 1);
    let r = run_check("F2.2", &g, Mode::Exhaustive).unwrap();
    // 16 affine points, 20 affine lines, the plane
    assert_eq!((r.status, r.instances), (Status::Pass, 37));
    assert!(r
        .to_string()
        .starts_with("CHECK F2.2 PASS q=4 n=3 form=type1 mode=exhaustive instances=37 fails=0"));
}

#[test]
fn three_space_closure() {
    let r = run_check("L5.13", &geom(2, 4, 2), Mode::Exhaustive).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(r.instances > 0);
}

#[test]
fn witness_pairs_gf4() {
    let r = run_check("T3.15", &geom(2, 3, 1), Mode::Exhaustive).unwrap();
    assert_eq!((r.status, r.instances), (Status::Pass, 360));
}

#[test]
fn errors_and_skips() {
    let g = geom(2, 3, 1);
    assert!(matches!(
        run_check("X9.9", &g, Mode::Exhaustive),
        Err(Error::UnknownCheck(_))
    ));
    assert!(matches!(Mode::sample(1, 0), Err(Error::Malformed(_))));
    assert!(matches!(
        run_check("L5.13", &g, Mode::Exhaustive),
        Err(Error::InadmissibleGeometry { .. })
    ));
    let ws = Workspace::new(&g);
    let r = run_or_skip(&ws, "L5.13", Mode::Exhaustive, &Serial).unwrap();
    assert_eq!((r.status, r.instances), (Status::Skip, 0));
    let r = run_check("L5.6\u{2013}5.9", &geom(2, 4, 2), Mode::Exhaustive).unwrap();
    assert_eq!(r.id, "L5.6-5.9");
}

#[test]
fn flagged_failures_are_expected_at_q4() {
    let g = geom(2, 4, 2);
    let r = run_check("L5.3/C5.4", &g, Mode::Exhaustive).unwrap();
    assert_eq!(r.status, Status::ExpectedFailQ4);
    assert!(!r.witnesses.is_empty());
    assert!(r
        .to_string()
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("  WITNESS C2 triple "));
    let mut sorted = r.witnesses.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted, r.witnesses);
}

#[test]
fn unflagged_failure_is_a_fail() {
    // nonregular lines through every point at infinity: false for planes
    // with a point radical on H
    let r = run_check("F3.2", &geom(2, 4, 2), Mode::Exhaustive).unwrap();
    assert_eq!((r.status, r.fails()), (Status::Fail, 80));
    assert_eq!(
        run_check("F3.2", &geom(2, 3, 1), Mode::Exhaustive).unwrap().status,
        Status::Pass
    );
}

#[test]
fn sample_mode_reproducible() {
    let g = geom(2, 4, 2);
    let ws = Workspace::new(&g);
    let mode = Mode::sample(7, 300).unwrap();
    for id in ["C3.8", "C3.10", "L5.11", "P3.24", "P5.10"] {
        let a = run_check_in(&ws, id, mode, &Serial).unwrap();
        let b = run_check_in(&ws, id, mode, &Serial).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.status, Status::Pass, "{a}");
        assert!(a.to_string().contains("mode=sample:300:7"));
    }
}

#[test]
fn all_pass_or_expected_gf4_space() {
    let g = geom(2, 4, 2);
    let ws = Workspace::new(&g);
    let reps = run_all(&ws, Mode::Exhaustive, &Serial).unwrap();
    assert_eq!(reps.len(), list_checks().len());
    let bad: Vec<&str> = reps.iter().filter(|r| r.status == Status::Fail).map(|r| r.id).collect();
    assert_eq!(bad, ["F3.2"]);
}

#[test]
fn symplectic_admits_only_duality() {
    let g = geom(2, 4, 3);
    let ws = Workspace::new(&g);
    let reps = run_all(&ws, Mode::Exhaustive, &Serial).unwrap();
    let run: Vec<&str> = reps.iter().filter(|r| r.status != Status::Skip).map(|r| r.id).collect();
    assert_eq!(run, ["R4.1"]);
}
