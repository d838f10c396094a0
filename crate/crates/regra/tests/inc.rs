use regra::cli::exportable;
use regra::inc::{from_str, import_inc, same_carriers, to_string};
use regra::Error;
use regra_core::algebra::FieldCtx;
use regra_core::projspace::Geometry;
use regra_core::structures::{build, StructureName};
use regra_core::witness::{eps_witness, mulambda_witness};

fn round_trip(g: &Geometry, name: StructureName) {
    let s = build(g, name.clone()).unwrap();
    let text = to_string(g, &s).unwrap();
    let back = from_str(&text).unwrap();
    assert!(same_carriers(&back.structure, &s), "{name}");
    assert_eq!(back.geom.kind(), g.kind());
    assert_eq!(back.geom.ctx().modulus(), g.ctx().modulus());
    assert_eq!(to_string(&back.geom, &back.structure).unwrap(), text, "{name}");
}

#[test]
fn every_structure_round_trips() {
    for (k, n, t) in [(2, 3, 1), (2, 4, 2), (3, 3, 1)] {
        let g = Geometry::canonical(k, n, t).unwrap();
        for name in exportable(&g) {
            round_trip(&g, name);
        }
    }
}

#[test]
fn dual_and_witness_geometries_round_trip() {
    let g = Geometry::canonical(2, 4, 2).unwrap();
    round_trip(&g, StructureName::Dual(Box::new(StructureName::B2)));
    let ctx = FieldCtx::new(2).unwrap();
    for w in [eps_witness(&ctx, 3, 1).unwrap(), mulambda_witness(&ctx, 4, 1).unwrap()] {
        round_trip(&w.first, StructureName::B1);
        round_trip(&w.second, StructureName::B1);
    }
}

#[test]
fn b1_gf4_plane_header_and_counts() {
    let g = Geometry::canonical(2, 3, 1).unwrap();
    let text = to_string(&g, &build(&g, StructureName::B1).unwrap()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[..4],
        ["INC1", "field gf 4 poly 7", "space n 3 form type1", "structure B1"]
    );
    assert!(lines.contains(&"points 15"));
    assert!(lines.contains(&"blocks 15"));
    assert_eq!(lines.last(), Some(&"end"));
    // the 15 affine lines missing b, each with its q = 4 affine points
    let block_at = lines.iter().position(|l| *l == "blocks 15").unwrap();
    assert!(lines[block_at + 1..lines.len() - 1]
        .iter()
        .all(|l| l.split(' ').count() == 5));
    let again = to_string(&g, &build(&g, StructureName::B1).unwrap()).unwrap();
    assert_eq!(text, again);
}

#[test]
fn files_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let g = Geometry::canonical(2, 4, 2).unwrap();
    let s = build(&g, StructureName::C2).unwrap();
    let path = dir.path().join("c2.inc1");
    regra::inc::export_inc(&g, &s, &path).unwrap();
    assert!(same_carriers(&import_inc(&path).unwrap().structure, &s));
    assert!(matches!(import_inc(&dir.path().join("missing")), Err(Error::Io(_))));
}

fn parse_error_line(text: &str) -> usize {
    match from_str(text) {
        Err(Error::Parse { line, .. }) => line,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn malformed_files_are_rejected() {
    let g = Geometry::canonical(2, 3, 1).unwrap();
    let good = to_string(&g, &build(&g, StructureName::B1).unwrap()).unwrap();
    let edit = |from: &str, to: &str| good.replacen(from, to, 1);

    assert_eq!(parse_error_line(&edit("INC1", "INC2")), 1);
    assert_eq!(parse_error_line(&edit("gf 4", "gf 6")), 2);
    assert!(matches!(from_str(&edit("poly 7", "poly 5")), Err(Error::Core(_))));
    assert_eq!(parse_error_line(&edit("form type1", "form type9")), 3);
    assert!(matches!(
        from_str(&edit("form type1", "form type2")),
        Err(Error::Core(_))
    ));
    assert_eq!(parse_error_line(&edit("structure B1", "structure X")), 4);
    assert_eq!(parse_error_line(&edit("points 15", "points 16")), 21);
    assert_eq!(parse_error_line(&edit("\n1 ", "\n2 ")), 7);
    assert_eq!(parse_error_line(&good.replace("end\n", "")), good.lines().count());
    assert_eq!(parse_error_line(&format!("{good}extra\n")), good.lines().count() + 1);
    assert_eq!(parse_error_line(""), 1);

    // rows must be in reduced echelon form and points in canonical order
    let mut lines: Vec<String> = good.lines().map(String::from).collect();
    lines[5] = "0 0 0 2".into();
    assert_eq!(parse_error_line(&(lines.join("\n") + "\n")), 6);
    let mut lines: Vec<String> = good.lines().map(String::from).collect();
    let (a, b) = (
        lines[5].split_once(' ').unwrap().1.to_string(),
        lines[6].split_once(' ').unwrap().1.to_string(),
    );
    lines[5] = format!("0 {b}");
    lines[6] = format!("1 {a}");
    assert_eq!(parse_error_line(&(lines.join("\n") + "\n")), 7);

    // block indices must be sorted and in range
    let mut lines: Vec<String> = good.lines().map(String::from).collect();
    let first_block = lines.iter().position(|l| l == "blocks 15").unwrap() + 1;
    lines[first_block] = "0 3 1".into();
    assert_eq!(parse_error_line(&(lines.join("\n") + "\n")), first_block + 1);
    lines[first_block] = "0 1 15".into();
    assert_eq!(parse_error_line(&(lines.join("\n") + "\n")), first_block + 1);
}
