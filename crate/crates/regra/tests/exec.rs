use regra::exec::Threads;
use regra_core::projspace::Geometry;
use regra_core::verify::{run_check_in, Mode, Serial, Workspace};

#[test]
fn threads_agree_with_serial() {
    let g = Geometry::canonical(2, 4, 2).unwrap();
    let ws = Workspace::new(&g);
    for (id, mode) in [
        ("F2.1", Mode::Exhaustive),
        ("F3.2", Mode::Exhaustive),
        ("C3.8", Mode::sample(11, 300).unwrap()),
        ("L5.3/C5.4", Mode::Exhaustive),
        ("P5.10", Mode::Exhaustive),
    ] {
        let serial = run_check_in(&ws, id, mode, &Serial).unwrap();
        for t in [2, 3, 7] {
            let threaded = run_check_in(&ws, id, mode, &Threads::new(t)).unwrap();
            assert_eq!(threaded.to_string(), serial.to_string(), "{id} on {t} threads");
        }
    }
}

#[test]
fn thread_count_is_positive() {
    assert_eq!(Threads::new(0).threads(), 1);
    assert!(Threads::from_env().threads() >= 1);
}
