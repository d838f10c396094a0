//! Statements about the incidence structures: isolated objects, the
//! formulas read in them, the reconstruction pipelines, witnesses and
//! automorphisms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use super::{label, unrank_pair, Outcome, Plan, Witness, Workspace};
use crate::algebra::{Matrix, SubspaceBasis, Vector};
use crate::error::{Error, Result};
use crate::oracle::{affine_parallel, host_pencils};
use crate::projspace::Geometry;
use crate::reconstruct::{b1_from_c1, identify, rebuild_b1, recover_affine, PointLine, Triangle};
use crate::regular::{is_regular_fast as reg, plane_profile};
use crate::sample;
use crate::structures::{isolated, IncidenceStructure, Label, StructureName};
use crate::witness::{
    all_vectors, aut_algebraic, aut_geometric, eps_choices, mulambda_choices, random_map, rep_323_check, Chart,
    SemilinearMap, WitnessBuilder,
};

fn lab(l: &Label) -> String {
    match l {
        Label::Subspace(s) => label(s),
        other => other.to_string(),
    }
}

fn tagged(tag: &str, parts: impl IntoIterator<Item = String>) -> Witness {
    let mut v = alloc::vec![tag.to_string()];
    v.extend(parts);
    Witness(v)
}

/// Carrier-level differences between a reconstruction and the target.
fn diff(got: &IncidenceStructure, want: &IncidenceStructure) -> Outcome {
    let pts = |s: &IncidenceStructure| s.points.iter().map(lab).collect::<BTreeSet<String>>();
    let blks = |s: &IncidenceStructure| {
        s.blocks
            .iter()
            .map(|b| {
                let members: Vec<String> = b.points.iter().map(|&p| lab(s.point_label(p))).collect();
                format!("{}:{}", lab(&b.label), members.join(";"))
            })
            .collect::<BTreeSet<String>>()
    };
    let mut bad = Vec::new();
    let (gp, wp) = (pts(got), pts(want));
    bad.extend(gp.difference(&wp).map(|x| tagged("extra-point", [x.clone()])));
    bad.extend(wp.difference(&gp).map(|x| tagged("missing-point", [x.clone()])));
    let (gb, wb) = (blks(got), blks(want));
    bad.extend(gb.difference(&wb).map(|x| tagged("extra-block", [x.clone()])));
    bad.extend(wb.difference(&gb).map(|x| tagged("missing-block", [x.clone()])));
    Outcome::many((want.points.len() + want.blocks.len()) as u64, bad)
}

/// One instance per carrier: isolated exactly when predicted.
fn isolated_plan<'a>(
    s: &'a IncidenceStructure,
    point_pred: impl Fn(&Label) -> bool + Sync + 'a,
    block_pred: impl Fn(&Label) -> bool + Sync + 'a,
) -> Plan<'a> {
    let iso = isolated(s);
    let np = s.points.len();
    Plan::items(np + s.blocks.len(), move |i| {
        Ok(if i < np {
            let l = s.point_label(i as u32);
            let got = iso.points.binary_search(&(i as u32)).is_ok();
            Outcome::verdict(got == point_pred(l), || tagged("point", [lab(l)]))
        } else {
            let j = i - np;
            let l = &s.blocks[j].label;
            let got = iso.blocks.binary_search(&(j as u32)).is_ok();
            Outcome::verdict(got == block_pred(l), || tagged("block", [lab(l)]))
        })
    })
}

pub(super) fn isolated_g1<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b = *g.pole_or_err()?;
    let s = ws.structure(StructureName::G1)?;
    Ok(isolated_plan(
        s,
        move |l| g.is_affine(&b) && l.subspace() == Some(&b),
        move |l| l.subspace().is_some_and(|x| !g.is_affine(x)),
    ))
}

pub(super) fn isolated_g2<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b = *g.pole_or_err()?;
    let s = ws.structure(StructureName::G2)?;
    Ok(isolated_plan(
        s,
        move |l| !g.is_affine(&b) && l.subspace().is_some_and(|x| g.contains(x, &b)),
        |_| false,
    ))
}

pub(super) fn no_pencil_at_b<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b = *g.pole_or_err()?;
    let planes: Vec<SubspaceBasis> = g
        .subspaces_containing(&b, 3)
        .into_iter()
        .filter(|a| g.is_affine(a))
        .collect();
    let host = ws.structure(StructureName::G2)?;
    let pencils = host_pencils(g, host);
    let np = planes.len();
    Ok(Plan::items(np + pencils.len(), move |i| {
        if i < np {
            let a = &planes[i];
            return Ok(Outcome::verdict(!reg(g, a), || tagged("plane", [label(a)])));
        }
        let p = &pencils[i - np];
        let through_b = p
            .members
            .iter()
            .any(|&m| host.point_label(m).subspace().is_some_and(|l| g.contains(l, &b)));
        Ok(Outcome::verdict(!through_b, || {
            tagged("pencil", [label(&p.vertex), label(&p.plane)])
        }))
    }))
}

pub(super) fn parallelism<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b1 = ws.structure(StructureName::B1)?;
    let pl = PointLine::new(b1);
    let nb = b1.blocks.len();
    Ok(Plan::items(nb * nb.saturating_sub(1) / 2, move |t| {
        let (i, j) = unrank_pair(t);
        let (l1, l2) = (&b1.blocks[i].label, &b1.blocks[j].label);
        let (Some(m1), Some(m2)) = (l1.subspace(), l2.subspace()) else {
            return Err(Error::UnknownLabel(lab(l1)));
        };
        let ok = pl.parallel(i as u32, j as u32) == affine_parallel(g, m1, m2);
        Ok(Outcome::verdict(ok, || tagged("lines", [label(m1), label(m2)])))
    }))
}

/// The affine points of `a` other than its vertex `q(A)`.
fn plane_class(g: &Geometry, a: &SubspaceBasis) -> Result<Vec<SubspaceBasis>> {
    let v = plane_profile(g, a)?.vertex.map(|v| v.subspace());
    Ok(g.points_of(a)
        .into_iter()
        .filter(|p| g.is_affine(p) && Some(*p) != v)
        .collect())
}

pub(super) fn covering_triangle<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let p01 = &ws.families(3)?.p01;
    Ok(Plan::items(p01.len(), move |i| {
        let a = &p01[i];
        let xs = plane_class(g, a)?;
        let rl: Vec<(SubspaceBasis, SubspaceBasis)> = g
            .subspaces_of(a, 2)
            .into_iter()
            .filter(|l| g.is_affine(l) && reg(g, l))
            .map(|l| (l, g.meet(&l, g.h())))
            .collect();
        let covers = |sides: [&SubspaceBasis; 3]| {
            xs.iter().all(|x| {
                rl.iter().any(|(k, _)| {
                    if !g.contains(k, x) {
                        return false;
                    }
                    let mut hits: Vec<SubspaceBasis> = sides
                        .iter()
                        .filter(|s| **s != k)
                        .map(|s| g.meet(k, s))
                        .filter(|p| p.dim() == 1 && g.is_affine(p))
                        .collect();
                    hits.sort_unstable();
                    hits.dedup();
                    hits.len() >= 2
                })
            })
        };
        let mut found = false;
        'outer: for x in 0..rl.len() {
            for y in x + 1..rl.len() {
                if rl[x].1 == rl[y].1 {
                    continue;
                }
                let v = g.meet(&rl[x].0, &rl[y].0);
                for z in y + 1..rl.len() {
                    if rl[z].1 == rl[x].1 || rl[z].1 == rl[y].1 || g.contains(&rl[z].0, &v) {
                        continue;
                    }
                    if covers([&rl[x].0, &rl[y].0, &rl[z].0]) {
                        found = true;
                        break 'outer;
                    }
                }
            }
        }
        Ok(Outcome::verdict(found, || tagged("plane", [label(a)])))
    }))
}

pub(super) fn triangle_closure<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b1 = ws.structure(StructureName::B1)?;
    let pl = PointLine::new(b1);
    let mut classes: BTreeMap<SubspaceBasis, Vec<u32>> = BTreeMap::new();
    for a in &ws.families(3)?.p01 {
        let mut idx: Vec<u32> = plane_class(g, a)?
            .into_iter()
            .filter_map(|p| b1.point_index(&Label::Subspace(p)))
            .collect();
        idx.sort_unstable();
        classes.insert(*a, idx);
    }
    let np = b1.points.len();
    let sub = |i: u32| *b1.point_label(i).subspace().expect("points of B1 are subspaces");
    let check = move |pl: &PointLine, classes: &BTreeMap<SubspaceBasis, Vec<u32>>, t: &Triangle| {
        let [a, b, c] = t.vertices;
        let plane = g.join(&g.join(&sub(a), &sub(b)), &sub(c));
        let ok = classes.get(&plane).is_some_and(|want| *want == pl.pi(t));
        Outcome::verdict(ok, || {
            tagged("triangle", [label(&sub(a)), label(&sub(b)), label(&sub(c))])
        })
    };
    let pl2 = PointLine::new(b1);
    let classes2 = classes.clone();
    Ok(Plan::items(np, move |a| {
        let a = a as u32;
        let mut acc = Outcome::vacuous();
        for b in a + 1..np as u32 {
            let Some(ab) = pl.join(a, b) else { continue };
            for c in b + 1..np as u32 {
                if pl.on(c, ab) {
                    continue;
                }
                if let Some(t) = pl.triangle(a, b, c) {
                    acc.absorb(check(&pl, &classes, &t));
                }
            }
        }
        Ok(acc)
    })
    .sampled_by(move |seed, i| {
        let mut rng = sample::rng(seed, i);
        for _ in 0..64 {
            let a = rng.random_range(0..np as u32);
            let ls = pl2.lines_through(a);
            if ls.len() < 2 {
                continue;
            }
            let la = ls[rng.random_range(0..ls.len())];
            let pa = pl2.line_points(la);
            let b = pa[rng.random_range(0..pa.len())];
            let lbs = pl2.lines_through(b);
            let lb = lbs[rng.random_range(0..lbs.len())];
            if lb == la {
                continue;
            }
            let pb = pl2.line_points(lb);
            let c = pb[rng.random_range(0..pb.len())];
            if let Some(t) = pl2.triangle(a, b, c) {
                return Ok(check(&pl2, &classes2, &t));
            }
        }
        Ok(Outcome::vacuous())
    }))
}

pub(super) fn affine_pipeline<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b1 = ws.structure(StructureName::B1)?;
    let want = ws.structure(StructureName::Affine)?;
    Ok(Plan::whole(move || {
        let got = identify(g, &recover_affine(b1)?, StructureName::Affine)?;
        Ok(diff(&got, want))
    }))
}

pub(super) fn c1_pipeline<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let c1 = ws.structure(StructureName::C1)?;
    let want = ws.structure(StructureName::B1)?;
    Ok(Plan::whole(move || {
        let got = identify(g, &b1_from_c1(c1)?, StructureName::B1)?;
        Ok(diff(&got, want))
    }))
}

pub(super) fn dual_route<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let src = ws.structure(StructureName::Gk(g.n() - 2))?;
    let want = ws.structure(StructureName::B1)?;
    Ok(Plan::whole(move || Ok(diff(&rebuild_b1(g, src)?, want))))
}

pub(super) fn line_pipelines<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let srcs = [ws.structure(StructureName::B2)?, ws.structure(StructureName::C2)?];
    let want = ws.structure(StructureName::B1)?;
    Ok(Plan::whole(move || {
        let mut acc = Outcome::vacuous();
        for src in srcs {
            let mut out = diff(&rebuild_b1(g, src)?, want);
            for w in &mut out.witnesses {
                w.0.insert(0, src.name.to_string());
            }
            acc.absorb(out);
        }
        Ok(acc)
    }))
}

pub(super) fn witness_pairs<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let (ctx, n) = (g.ctx(), g.n());
    let choices = if n % 2 == 1 {
        eps_choices(ctx, n)?
    } else {
        mulambda_choices(ctx, n)?
    };
    let mut wb = WitnessBuilder::new();
    for c in &choices {
        wb.prepare(ctx, n, c)?;
    }
    Ok(Plan::items(choices.len(), move |i| {
        let c = &choices[i];
        let w = wb.prepared_pair(ctx, n, c)?;
        Ok(Outcome::verdict(w.is_valid(), || tagged("choice", [format!("{c:?}")])))
    }))
}

/// Canonical label of a map: matrix rows, Frobenius exponent, translation.
fn map_label(f: &SemilinearMap) -> String {
    let mut rows: Vec<String> = Vec::new();
    for i in 0..f.matrix.nrows() {
        let r: Vec<String> = f.matrix.row(i).codes().map(|c| c.to_string()).collect();
        rows.push(r.join(","));
    }
    let w: Vec<String> = f.omega().codes().map(|c| c.to_string()).collect();
    format!("map[{}]e={}w=[{}]", rows.join("|"), f.frob, w.join(","))
}

/// All translations and scalings with every Frobenius power, then seeded
/// maps from seed zero.
fn map_family(g: &Geometry, chart: &Chart) -> Result<Vec<SemilinearMap>> {
    let ctx = g.ctx();
    let m = chart.m();
    let mut out: Vec<SemilinearMap> = all_vectors(ctx, m)
        .filter(|w| !w.is_zero())
        .map(SemilinearMap::translation)
        .collect();
    for a in ctx.nonzero() {
        for e in 0..ctx.k() {
            let mut mat = Matrix::zero(m, m);
            for d in 0..m {
                mat.set(d, d, a);
            }
            out.push(SemilinearMap::new(ctx, mat, e, None)?);
        }
    }
    out.extend((0..SEEDED_MAPS).map(|i| random_map(g, chart, 0, i)));
    Ok(out)
}

const SEEDED_MAPS: u64 = 100;

fn map_plan<'a>(
    ws: &'a Workspace<'a>,
    verdict: fn(&Geometry, &Chart, &IncidenceStructure, &SemilinearMap) -> Result<bool>,
) -> Result<Plan<'a>> {
    let g = ws.geom();
    let chart = Chart::new(g)?;
    let b1 = ws.structure(StructureName::B1)?;
    let maps = map_family(g, &chart)?;
    let chart2 = chart.clone();
    Ok(Plan::items(maps.len(), move |i| {
        let f = &maps[i];
        Ok(Outcome::verdict(verdict(g, &chart, b1, f)?, || {
            tagged("map", [map_label(f)])
        }))
    })
    .sampled_by(move |seed, i| {
        let f = random_map(g, &chart2, seed, i);
        Ok(Outcome::verdict(verdict(g, &chart2, b1, &f)?, || {
            tagged("map", [map_label(&f)])
        }))
    }))
}

pub(super) fn aut_equivalence_check<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    map_plan(ws, |g, chart, b1, f| {
        Ok(aut_algebraic(g, chart, f)? == aut_geometric(g, chart, b1, f)?)
    })
}

/// Whether the induced map preserves orthogonality on `H` and between
/// regular points and points of `H`.
fn preserves_both(g: &Geometry, chart: &Chart, f: &SemilinearMap) -> bool {
    let hp: Vec<(Vector, Vector)> = g
        .points_of(g.h())
        .iter()
        .map(|p| {
            let v = p.point_vector();
            (v, f.lift(g, chart, v))
        })
        .collect();
    let ap: Vec<(Vector, Vector)> = g
        .subspaces(1)
        .unwrap_or(&[])
        .iter()
        .filter(|p| g.is_affine(p))
        .map(|p| {
            let v = p.point_vector();
            (v, f.lift(g, chart, v))
        })
        .collect();
    let same = |(x, fx): &(Vector, Vector), (y, fy): &(Vector, Vector)| (g.xi(*x, *y) == 0) == (g.xi(*fx, *fy) == 0);
    hp.iter().all(|x| hp.iter().all(|y| same(x, y))) && ap.iter().all(|a| hp.iter().all(|q| same(a, q)))
}

pub(super) fn aut_conjugacies<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    map_plan(ws, |g, chart, b1, f| {
        Ok(preserves_both(g, chart, f) == aut_geometric(g, chart, b1, f)?)
    })
}

pub(super) fn elementary_lines<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    Ok(Plan::whole(move || {
        let r = rep_323_check(g)?;
        let mut bad: Vec<Witness> = r.line_failures.iter().map(|l| tagged("line", [label(l)])).collect();
        bad.extend(r.pair_failures.iter().map(|(u, v)| {
            let c = |x: &Vector| x.codes().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
            tagged("pair", [format!("[{}]", c(u)), format!("[{}]", c(v))])
        }));
        Ok(Outcome::many((r.affine_lines + r.pairs) as u64, bad))
    }))
}
