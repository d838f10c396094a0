//! One line per acceptance criterion: verdict, wall time against its
//! target, and what was counted.

use std::time::{Duration, Instant};

use regra::cli::{exportable, reconstruct};
use regra::exec::Threads;
use regra::inc::{from_str, same_carriers, to_string};
use regra_core::algebra::SubspaceBasis;
use regra_core::metric::metric_report;
use regra_core::projspace::Geometry;
use regra_core::regular::{criterion, families, rad_oracle};
use regra_core::structures::{build, morphism_check, perp_dual, Morphism, StructureName};
use regra_core::verify::{run_check_in, CheckReport, Mode, Status, Workspace};
use regra_core::witness::{all_vectors, aut_algebraic, aut_geometric, Chart, SemilinearMap};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

const GRID: [(u32, usize, u8); 4] = [(2, 3, 1), (2, 4, 2), (3, 3, 1), (3, 4, 2)];

fn geom(k: u32, n: usize, t: u8) -> Geometry {
    Geometry::canonical(k, n, t).unwrap()
}

fn tag(g: &Geometry) -> String {
    format!("GF({}) n={}", g.q(), g.n())
}

fn check(g: &Geometry, id: &str, mode: Mode, allow_expected: bool) -> Result<CheckReport, String> {
    let ws = Workspace::new(g);
    let r = run_check_in(&ws, id, mode, &Threads::from_env()).map_err(|e| format!("{id}: {e}"))?;
    let ok = match r.status {
        Status::Pass => true,
        Status::ExpectedFailQ4 => allow_expected && !r.witnesses.is_empty(),
        _ => false,
    };
    if ok {
        Ok(r)
    } else {
        Err(format!("{id} {} at {}: {} fails", r.status, tag(g), r.fails()))
    }
}

fn summary(r: &CheckReport) -> String {
    format!("{} {} {} {}", r.id, tag_of(r), r.status, r.instances)
}

fn tag_of(r: &CheckReport) -> String {
    format!("GF({}) n={}", r.q, r.n)
}

fn oracle_agreement() -> Outcome {
    let mut total = 0;
    for (k, n, t) in GRID {
        let g = geom(k, n, t);
        for d in 1..=3.min(n) {
            for a in g.subspaces(d).map_err(|e| e.to_string())? {
                if criterion(&g, a).map_err(|e| e.to_string())? != rad_oracle(&g, a) {
                    return Err(format!("criterion differs from the oracle on {a} at {}", tag(&g)));
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} subspaces of dim <= 3 on 4 geometries"))
}

fn isolated_predictions() -> Outcome {
    let mut parts = Vec::new();
    for (k, n, t) in GRID {
        let g = geom(k, n, t);
        parts.push(summary(&check(&g, "F3.1", Mode::Exhaustive, false)?));
        if n >= 4 {
            parts.push(summary(&check(&g, "F3.19", Mode::Exhaustive, false)?));
            parts.push(summary(&check(&g, "F5.5", Mode::Exhaustive, false)?));
        }
    }
    Ok(parts.join(", "))
}

fn parallelism() -> Outcome {
    let t0 = Instant::now();
    let a = check(&geom(3, 3, 1), "C3.8", Mode::Exhaustive, false)?;
    let ta = t0.elapsed();
    let t1 = Instant::now();
    let b = check(&geom(3, 4, 2), "C3.8", Mode::sample(7, 10_000).unwrap(), false)?;
    let tb = t1.elapsed();
    if ta > Duration::from_secs(5) || tb > Duration::from_secs(60) {
        return Err(format!("too slow: {} ms and {} ms", ta.as_millis(), tb.as_millis()));
    }
    Ok(format!(
        "{} pairs exhaustive at GF(8) n=3 ({} ms), {} sampled at GF(8) n=4 ({} ms)",
        a.instances,
        ta.as_millis(),
        b.instances,
        tb.as_millis()
    ))
}

fn affine_pipelines() -> Outcome {
    let mut parts = Vec::new();
    for n in [3, 4] {
        let g = geom(3, n, if n == 3 { 1 } else { 2 });
        let (got, want) = reconstruct(&g, StructureName::B1).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("recovered affine space differs at {}", tag(&g)));
        }
        parts.push(summary(&check(&g, "T3.13", Mode::Exhaustive, false)?));
        parts.push(summary(&check(&g, "T3.20", Mode::Exhaustive, false)?));
    }
    Ok(parts.join(", "))
}

fn witness_pairs() -> Outcome {
    let mut parts = Vec::new();
    for (n, t) in [(3, 1), (4, 2)] {
        parts.push(summary(&check(&geom(2, n, t), "T3.15", Mode::Exhaustive, false)?));
    }
    Ok(format!("all parameter choices: {}", parts.join(", ")))
}

fn stars() -> Outcome {
    let a = check(&geom(2, 4, 2), "P5.10", Mode::Exhaustive, true)?;
    let b = check(&geom(3, 4, 2), "P5.10", Mode::sample(7, 200).unwrap(), false)?;
    Ok(format!(
        "{} (witnesses {}), {} seeded",
        summary(&a),
        a.fails(),
        summary(&b)
    ))
}

fn point_kinds() -> Outcome {
    let a = check(&geom(2, 5, 1), "L5.12", Mode::sample(7, 500).unwrap(), false)?;
    let b = check(&geom(2, 4, 2), "L5.13", Mode::Exhaustive, false)?;
    Ok(format!("{}, {}", summary(&a), summary(&b)))
}

fn rebuilds() -> Outcome {
    let mut parts = Vec::new();
    for (k, n, t) in [(2, 4, 2), (2, 5, 1), (3, 4, 2)] {
        let g = geom(k, n, t);
        for from in [StructureName::B2, StructureName::C2, StructureName::Gk(n - 2)] {
            let (got, want) = reconstruct(&g, from.clone()).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("rebuild from {from} differs at {}", tag(&g)));
            }
            parts.push(format!("{from} {}", tag(&g)));
        }
    }
    Ok(format!("B1 literally equal from {}", parts.join(", ")))
}

fn duality() -> Outcome {
    let g = geom(2, 4, 2);
    let mut count = 0;
    for d in 1..4 {
        let r_d: Vec<SubspaceBasis> = families(&g, d).map_err(|e| e.to_string())?.r_k;
        let mut perps: Vec<SubspaceBasis> = r_d.iter().map(|u| g.perp(u)).collect();
        perps.sort_unstable();
        if perps != families(&g, 4 - d).map_err(|e| e.to_string())?.r_k {
            return Err(format!("polar of R_{d} is not R_{}", 4 - d));
        }
        for u in g.subspaces(d).map_err(|e| e.to_string())? {
            if metric_report(&g, u).rad != metric_report(&g, &g.perp(u)).rad {
                return Err(format!("Rad differs between {u} and its polar"));
            }
            count += 1;
        }
    }
    let r = check(&g, "R4.1", Mode::Exhaustive, false)?;
    let b1 = build(&g, StructureName::B1).map_err(|e| e.to_string())?;
    let b2 = build(&g, StructureName::B2).map_err(|e| e.to_string())?;
    let d = perp_dual(&g, &b1).map_err(|e| e.to_string())?;
    if !morphism_check(&d, &b2, &Morphism::identity(&d)).map_err(|e| e.to_string())? {
        return Err("the polarity is not an isomorphism from B1 onto B2".into());
    }
    Ok(format!(
        "{count} subspaces, R_k polar sets, {}, polar map B1 -> B2",
        summary(&r)
    ))
}

fn automorphisms() -> Outcome {
    let g = geom(2, 4, 2);
    let r = check(&g, "P3.24", Mode::Exhaustive, false)?;
    let l = check(&g, "L3.21", Mode::Exhaustive, false)?;
    let p = check(&geom(2, 3, 1), "P3.22", Mode::Exhaustive, false)?;
    let chart = Chart::new(&g).map_err(|e| e.to_string())?;
    let b1 = build(&g, StructureName::B1).map_err(|e| e.to_string())?;
    let b = chart.coords(&g, g.pole().unwrap().point_vector()).1;
    let mut admitted = 0;
    for w in all_vectors(g.ctx(), chart.m()).filter(|w| !w.is_zero()) {
        let f = SemilinearMap::translation(w);
        let parallel = (1..g.q() as u8).any(|c| b.scale(g.ctx(), c) == w);
        let alg = aut_algebraic(&g, &chart, &f).map_err(|e| e.to_string())?;
        let geo = aut_geometric(&g, &chart, &b1, &f).map_err(|e| e.to_string())?;
        if alg != parallel || geo != parallel {
            return Err(format!(
                "translation by {w}: algebraic {alg}, geometric {geo}, parallel {parallel}"
            ));
        }
        admitted += geo as usize;
    }
    Ok(format!(
        "{}, {}, {}, {admitted} of 63 translations admitted, all along b",
        summary(&r),
        summary(&l),
        summary(&p)
    ))
}

fn determinism() -> Outcome {
    let args = [
        "regra",
        "verify",
        "--check",
        "all",
        "--field",
        "2^3",
        "--dim",
        "4",
        "--form-type",
        "2",
        "--mode",
        "sample:200",
        "--seed",
        "7",
        "--deterministic",
    ];
    let mut reports = Vec::new();
    for _ in 0..2 {
        let mut out = Vec::new();
        regra::cli::run(args, &mut out, &mut std::io::sink());
        reports.push(out);
    }
    if reports[0] != reports[1] {
        return Err("two verify runs differ".into());
    }
    let mut files = 0;
    for (k, n, t) in GRID {
        let g = geom(k, n, t);
        for name in exportable(&g) {
            let s = build(&g, name.clone()).map_err(|e| e.to_string())?;
            let text = to_string(&g, &s).map_err(|e| e.to_string())?;
            let back = from_str(&text).map_err(|e| format!("{name}: {e}"))?;
            if !same_carriers(&back.structure, &s) || to_string(&back.geom, &back.structure).unwrap() != text {
                return Err(format!("{name} does not round-trip at {}", tag(&g)));
            }
            files += 1;
        }
    }
    Ok(format!(
        "two verify reports identical ({} bytes), {files} structures round-trip through INC1",
        reports[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("criterion vs radical oracle", 60, oracle_agreement),
        ("isolated-object predictions", 10, isolated_predictions),
        ("parallelism from incidence", 65, parallelism),
        ("affine space from regular points and lines", 180, affine_pipelines),
        ("witness pairs", 60, witness_pairs),
        ("star closure", 600, stars),
        ("point kinds from nonadjacency", 300, point_kinds),
        ("B1 from the line and hyperplane structures", 600, rebuilds),
        ("polarity and radicals", 60, duality),
        ("automorphism conditions", 300, automorphisms),
        ("determinism and INC1 round trip", 600, determinism),
    ];
    let mut failed = 0;
    for (i, (what, target, f)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let r = f();
        let ms = t0.elapsed().as_millis();
        let in_time = ms <= u128::from(target) * 1000;
        let (verdict, detail) = match &r {
            Ok(d) if in_time => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("over the {target} s target: {d}")),
            Err(e) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("ACCEPT {:>2} {verdict} {what} [{ms} ms / {target} s] {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
