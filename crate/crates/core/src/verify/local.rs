//! Statements about single subspaces and small configurations, checked
//! directly against the form.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{label, Outcome, Plan, Witness, Workspace};
use crate::algebra::SubspaceBasis;
use crate::error::Result;
use crate::metric::metric_report;
use crate::oracle::perp_affine_points;
use crate::projspace::Geometry;
use crate::reconstruct::bracket_q;
use crate::regular::{is_regular_fast as reg, plane_profile, PlaneKind};

fn inf(g: &Geometry, a: &SubspaceBasis) -> SubspaceBasis {
    g.meet(a, g.h())
}

/// Every row of `a` is orthogonal to every row of `b`.
fn orth(g: &Geometry, a: &SubspaceBasis, b: &SubspaceBasis) -> bool {
    a.rows().all(|x| b.rows().all(|y| g.xi(x, y) == 0))
}

fn wit(tag: &str, parts: &[&SubspaceBasis]) -> Witness {
    let mut v: Vec<String> = alloc::vec![tag.to_string()];
    v.extend(parts.iter().map(|s| label(s)));
    Witness(v)
}

fn filtered<'a>(ws: &'a Workspace<'a>, keep: impl Fn(&SubspaceBasis) -> bool) -> Result<Vec<SubspaceBasis>> {
    Ok(ws.all_subspaces()?.iter().filter(|s| keep(s)).copied().collect())
}

fn affine_of_dim(g: &Geometry, k: usize) -> Result<Vec<SubspaceBasis>> {
    Ok(g.subspaces(k)?.iter().filter(|s| g.is_affine(s)).copied().collect())
}

fn affine_lines_of(g: &Geometry, a: &SubspaceBasis) -> Vec<SubspaceBasis> {
    g.subspaces_of(a, 2).into_iter().filter(|l| g.is_affine(l)).collect()
}

fn affine_points_of(g: &Geometry, a: &SubspaceBasis) -> Vec<SubspaceBasis> {
    g.points_of(a).into_iter().filter(|p| g.is_affine(p)).collect()
}

pub(super) fn radical_bound<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let all = ws.all_subspaces()?;
    Ok(Plan::items(all.len(), move |i| {
        let a = &all[i];
        let d = a.dim();
        let below = d >= 2 && g.subspaces_of(a, d - 1).iter().any(|s| reg(g, s));
        let above = below || (d < g.n() && g.subspaces_containing(a, d + 1).iter().any(|s| reg(g, s)));
        if !above {
            return Ok(Outcome::vacuous());
        }
        Ok(Outcome::verdict(metric_report(g, a).rdim <= 1, || {
            wit("subspace", &[a])
        }))
    }))
}

pub(super) fn horizon_polar_meets<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = filtered(ws, |s| g.is_affine(s))?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let ok = metric_report(g, a).hrd.is_some_and(|t| t.dim() >= 1);
        Ok(Outcome::verdict(ok, || wit("subspace", &[a])))
    }))
}

pub(super) fn regularity_equivalences<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = filtered(ws, |s| g.is_affine(s))?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let rep = metric_report(g, a);
        let first = rep.rdim == 0;
        let second = rep.hrd.is_some_and(|t| t.dim() == 1);
        let hor = metric_report(g, &rep.horizon);
        let third = match hor.rdim {
            0 => true,
            1 => !g.contains(&g.perp(&hor.rad), a),
            _ => false,
        };
        Ok(Outcome::verdict(first == second && second == third, || {
            wit("subspace", &[a])
        }))
    }))
}

pub(super) fn trace_parity<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = filtered(ws, |s| g.is_affine(s) && reg(g, s))?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let rep = metric_report(g, a);
        let ok = match rep.hrd {
            Some(t) if t.dim() == 1 => g.is_affine(&t) == (a.dim() % 2 == 1),
            _ => false,
        };
        Ok(Outcome::verdict(ok, || wit("subspace", &[a])))
    }))
}

pub(super) fn horizon_criterion<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = filtered(ws, |s| g.is_affine(s))?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let hor = metric_report(g, &inf(g, a));
        let predicted = if a.dim() % 2 == 1 {
            hor.rdim == 0
        } else {
            hor.rdim == 1 && !g.is_affine(&g.meet(a, &g.perp(&hor.rad)))
        };
        Ok(Outcome::verdict(predicted == reg(g, a), || wit("subspace", &[a])))
    }))
}

pub(super) fn affine_line_rule<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = affine_of_dim(g, 2)?;
    Ok(Plan::items(items.len(), move |i| {
        let l = &items[i];
        let predicted = !g.contains(&g.perp(&inf(g, l)), l);
        Ok(Outcome::verdict(predicted == reg(g, l), || wit("line", &[l])))
    }))
}

pub(super) fn line_through_point_rule<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let lines = affine_of_dim(g, 2)?;
    let q = g.q();
    Ok(Plan::items(lines.len() * q, move |i| {
        let l = &lines[i / q];
        let p = affine_points_of(g, l)[i % q];
        let trace = g.meet(&g.perp(&p), g.h());
        let predicted = g.meet(l, &trace).dim() == 0;
        Ok(Outcome::verdict(predicted == reg(g, l), || wit("point-line", &[&p, l])))
    }))
}

pub(super) fn lines_through_b<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b = *g.pole_or_err()?;
    let items = g.subspaces_containing(&b, 2);
    let on_h = !g.is_affine(&b);
    Ok(Plan::items(items.len(), move |i| {
        let l = &items[i];
        let expected = on_h && g.is_affine(l);
        Ok(Outcome::verdict(reg(g, l) == expected, || wit("line", &[l])))
    }))
}

pub(super) fn affine_plane_rule<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = affine_of_dim(g, 3)?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let rep = metric_report(g, a);
        let first = rep.rdim == 0;
        let second = rep.hrd.is_some_and(|t| t.dim() == 1);
        let third = reg(g, &rep.horizon);
        Ok(Outcome::verdict(first == second && second == third, || {
            wit("plane", &[a])
        }))
    }))
}

pub(super) fn planes_on_h<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = g.subspaces_of(g.h(), 3);
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let rep = metric_report(g, a);
        let lines = g.subspaces_of(a, 2);
        let ok = match rep.rdim {
            1 => lines.iter().all(|l| reg(g, l) != g.contains(l, &rep.rad)),
            2 | 3 => lines.iter().all(|l| !reg(g, l)),
            _ => false,
        };
        Ok(Outcome::verdict(ok, || wit("plane", &[a])))
    }))
}

pub(super) fn nonregular_through_infinity<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = affine_of_dim(g, 3)?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let pts = affine_points_of(g, a);
        let mut bad = Vec::new();
        for q in g.points_of(&inf(g, a)) {
            if !pts.iter().any(|x| !reg(g, &g.join(x, &q))) {
                bad.push(wit("plane-point", &[a, &q]));
            }
        }
        Ok(Outcome::many(1, bad))
    }))
}

/// Nonregular affine lines of the plane `a`, with their points at infinity.
fn nonregular_lines(g: &Geometry, a: &SubspaceBasis) -> Vec<(SubspaceBasis, SubspaceBasis)> {
    affine_lines_of(g, a)
        .into_iter()
        .filter(|l| !reg(g, l))
        .map(|l| (l, inf(g, &l)))
        .collect()
}

pub(super) fn parallel_nonregular<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = affine_of_dim(g, 3)?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let mut dirs: BTreeMap<SubspaceBasis, usize> = BTreeMap::new();
        for (_, d) in nonregular_lines(g, a) {
            *dirs.entry(d).or_default() += 1;
        }
        if !dirs.values().any(|&c| c >= 2) {
            return Ok(Outcome::vacuous());
        }
        Ok(Outcome::verdict(!reg(g, a), || wit("plane", &[a])))
    }))
}

pub(super) fn nonregular_triangle<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = affine_of_dim(g, 3)?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let nl = nonregular_lines(g, a);
        let mut found = false;
        'outer: for (x, (l1, d1)) in nl.iter().enumerate() {
            for (l2, d2) in &nl[x + 1..] {
                if d1 == d2 {
                    continue;
                }
                let v = g.meet(l1, l2);
                for (l3, d3) in &nl {
                    if d3 != d1 && d3 != d2 && !g.contains(l3, &v) {
                        found = true;
                        break 'outer;
                    }
                }
            }
        }
        if !found {
            return Ok(Outcome::vacuous());
        }
        let rep = metric_report(g, a);
        let ok = rep.rad == rep.horizon && affine_lines_of(g, a).iter().all(|l| !reg(g, l));
        Ok(Outcome::verdict(ok, || wit("plane", &[a])))
    }))
}

pub(super) fn plane_cases<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = affine_of_dim(g, 3)?;
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        let rep = metric_report(g, a);
        let m = rep.horizon;
        let lines = affine_lines_of(g, a);
        let hrd = rep.hrd.unwrap_or(*a);
        let ok = if !reg(g, &m) {
            let isotropic = g.form().gram_rank(g.ctx(), &m) == 0;
            let branch = match rep.rdim {
                2 => rep.rad == m && hrd == *a && lines.iter().all(|l| !reg(g, l)),
                1 => g.contains(&m, &rep.rad) && hrd == m && lines.iter().all(|l| reg(g, l) != (inf(g, l) == rep.rad)),
                _ => false,
            };
            isotropic && !reg(g, a) && branch
        } else {
            reg(g, a) && hrd.dim() == 1 && g.is_affine(&hrd) && lines.iter().all(|l| reg(g, l) != g.contains(l, &hrd))
        };
        Ok(Outcome::verdict(ok, || wit("plane", &[a])))
    }))
}

pub(super) fn plane_vertex<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let p01 = &ws.families(3)?.p01;
    Ok(Plan::items(p01.len(), move |i| {
        let a = &p01[i];
        let prof = plane_profile(g, a)?;
        let Some(v) = prof.vertex.map(|v| v.subspace()) else {
            return Ok(Outcome::verdict(false, || wit("plane", &[a])));
        };
        let vertex_side = g.is_affine(&v) == (prof.kind == PlaneKind::AffineRegular);
        let pencil = affine_lines_of(g, a).iter().all(|l| reg(g, l) != g.contains(l, &v));
        Ok(Outcome::verdict(vertex_side && pencil, || wit("plane", &[a])))
    }))
}

pub(super) fn parallel_regular_pair<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let mut by_dir: BTreeMap<SubspaceBasis, Vec<SubspaceBasis>> = BTreeMap::new();
    for l in &ws.families(2)?.a_k {
        by_dir.entry(inf(g, l)).or_default().push(*l);
    }
    let mut pairs = Vec::new();
    for ls in by_dir.values() {
        for (x, m1) in ls.iter().enumerate() {
            for m2 in &ls[x + 1..] {
                pairs.push((*m1, *m2));
            }
        }
    }
    Ok(Plan::items(pairs.len(), move |i| {
        let (m1, m2) = &pairs[i];
        let a = g.join(m1, m2);
        let dir = inf(g, m1);
        let small = metric_report(g, &a).rdim <= 1;
        let cross: Vec<SubspaceBasis> = affine_lines_of(g, &a)
            .into_iter()
            .filter(|k| reg(g, k) && inf(g, k) != dir)
            .collect();
        let mut found = false;
        'outer: for (x, k1) in cross.iter().enumerate() {
            for k2 in &cross[x + 1..] {
                if inf(g, k1) == inf(g, k2) {
                    continue;
                }
                let p = g.meet(k1, k2);
                if !g.contains(m1, &p) && !g.contains(m2, &p) {
                    found = true;
                    break 'outer;
                }
            }
        }
        Ok(Outcome::verdict(small && found, || wit("lines", &[m1, m2])))
    }))
}

/// Pairs of a nonregular affine line and a plane of radical dimension at
/// most one through it.
fn line_plane_pairs(ws: &Workspace<'_>) -> Result<Vec<(SubspaceBasis, SubspaceBasis)>> {
    let g = ws.geom();
    let p01 = &ws.families(3)?.p01;
    let r2 = &ws.families(2)?.r_k;
    let mut out = Vec::new();
    for l in g.subspaces(2)? {
        if !g.is_affine(l) || r2.binary_search(l).is_ok() {
            continue;
        }
        for a in g.subspaces_containing(l, 3) {
            if p01.binary_search(&a).is_ok() {
                out.push((*l, a));
            }
        }
    }
    Ok(out)
}

pub(super) fn nonregular_line_planes<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b = *g.pole_or_err()?;
    let pairs = line_plane_pairs(ws)?;
    Ok(Plan::items(pairs.len(), move |i| {
        let (l, a) = &pairs[i];
        let q = inf(g, l);
        let m = inf(g, a);
        let qp = g.perp(&q);
        let ok = q != b
            && if g.meet(&m, &qp) == q {
                let v = plane_profile(g, a)?.vertex.map(|v| v.subspace());
                match v {
                    Some(v) => {
                        reg(g, &m)
                            && reg(g, a)
                            && g.contains(l, &v)
                            && orth(g, &m, &v)
                            && affine_points_of(g, l).iter().all(|p| (*p != v) == !orth(g, &m, p))
                    }
                    None => false,
                }
            } else {
                g.contains(&qp, &m) && (!orth(g, &m, l) || (g.is_affine(&b) && g.contains(l, &b)))
            };
        Ok(Outcome::verdict(ok, || wit("line-plane", &[l, a])))
    }))
}

pub(super) fn two_plane_classes<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b = *g.pole_or_err()?;
    let pairs = line_plane_pairs(ws)?;
    let mut by_line: BTreeMap<SubspaceBasis, Vec<SubspaceBasis>> = BTreeMap::new();
    for (l, a) in pairs {
        by_line.entry(l).or_default().push(a);
    }
    let items: Vec<(SubspaceBasis, Vec<SubspaceBasis>)> = by_line.into_iter().collect();
    Ok(Plan::items(items.len(), move |i| {
        let (l, planes) = &items[i];
        let vertices: Vec<Option<SubspaceBasis>> = planes
            .iter()
            .map(|a| Ok(plane_profile(g, a)?.vertex.map(|v| v.subspace())))
            .collect::<Result<_>>()?;
        let pts: Vec<SubspaceBasis> = affine_points_of(g, l).into_iter().filter(|p| *p != b).collect();
        let mut tested = 0;
        let mut bad = Vec::new();
        for x in 0..pts.len() {
            for y in x + 1..pts.len() {
                for z in y + 1..pts.len() {
                    tested += 1;
                    let t = [pts[x], pts[y], pts[z]];
                    let classes = vertices.iter().filter(|v| !v.is_some_and(|v| t.contains(&v))).count();
                    if classes < 2 {
                        bad.push(wit("line-points", &[l, &t[0], &t[1], &t[2]]));
                    }
                }
            }
        }
        Ok(Outcome::many(tested, bad))
    }))
}

pub(super) fn bracket_is_polar<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let a2 = &ws.families(2)?.a_k;
    let items = g.points_of(g.h());
    Ok(Plan::items(items.len(), move |i| {
        let q = &items[i];
        let br = bracket_q(g, a2, q)?;
        let mut want = perp_affine_points(g, q);
        want.sort_unstable();
        let span_ok = if br.is_empty() {
            g.perp(q) == *g.h()
        } else {
            br.iter().fold(SubspaceBasis::zero(g.n()), |s, p| g.join(&s, p)) == g.perp(q)
        };
        Ok(Outcome::verdict(br == want && span_ok, || wit("point", &[q])))
    }))
}

/// `x^perp meet H` for points `x` of `H`, read from the brackets.
struct HorizonPerp<'g> {
    g: &'g Geometry,
    perp_h: BTreeMap<SubspaceBasis, SubspaceBasis>,
    brackets: BTreeMap<SubspaceBasis, Vec<SubspaceBasis>>,
}

impl<'g> HorizonPerp<'g> {
    fn new(g: &'g Geometry, a2: &[SubspaceBasis]) -> Result<HorizonPerp<'g>> {
        let mut perp_h = BTreeMap::new();
        let mut brackets = BTreeMap::new();
        for q in g.points_of(g.h()) {
            let br = bracket_q(g, a2, &q)?;
            let span = if br.is_empty() {
                *g.h()
            } else {
                br.iter().fold(SubspaceBasis::zero(g.n()), |s, p| g.join(&s, p))
            };
            perp_h.insert(q, g.meet(&span, g.h()));
            brackets.insert(q, br);
        }
        Ok(HorizonPerp { g, perp_h, brackets })
    }

    /// The radical of `u` inside `H` under the recovered conjugacy.
    fn rad(&self, u: &SubspaceBasis) -> SubspaceBasis {
        let g = self.g;
        let mut acc = *g.h();
        for r in u.rows() {
            let p = g.point(r).expect("basis rows are nonzero");
            acc = g.meet(&acc, &self.perp_h[&p]);
        }
        g.meet(u, &acc)
    }

    fn predict(&self, a: &SubspaceBasis) -> bool {
        let g = self.g;
        if !g.is_affine(a) {
            return self.rad(a).dim() == 0;
        }
        let r = self.rad(&g.meet(a, g.h()));
        if a.dim() % 2 == 1 {
            return r.dim() == 0;
        }
        r.dim() == 1 && !self.brackets[&r].iter().any(|x| g.contains(a, x))
    }
}

pub(super) fn regularity_from_brackets<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let hp = HorizonPerp::new(g, &ws.families(2)?.a_k)?;
    let all = ws.all_subspaces()?;
    Ok(Plan::items(all.len(), move |i| {
        let a = &all[i];
        Ok(Outcome::verdict(hp.predict(a) == reg(g, a), || wit("subspace", &[a])))
    }))
}

pub(super) fn polar_radical<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let all = ws.all_subspaces()?;
    Ok(Plan::items(all.len(), move |i| {
        let u = &all[i];
        let up = g.perp(u);
        let ok = metric_report(g, u).rad == metric_report(g, &up).rad && reg(g, u) == reg(g, &up);
        Ok(Outcome::verdict(ok, || wit("subspace", &[u])))
    }))
}

pub(super) fn no_regular_plane_on_h<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let items = g.subspaces_of(g.h(), 3);
    Ok(Plan::items(items.len(), move |i| {
        let a = &items[i];
        Ok(Outcome::verdict(!reg(g, a), || wit("plane", &[a])))
    }))
}

pub(super) fn coplanar_pencil<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let lines = g.subspaces(2)?;
    let planes = g.subspaces(3)?;
    let np = planes.len();
    Ok(Plan::items(lines.len() * np, move |i| {
        let (l0, a0) = (&lines[i / np], &planes[i % np]);
        let p = g.meet(l0, a0);
        if p.dim() != 1 {
            return Ok(Outcome::vacuous());
        }
        let ok = g
            .subspaces_of(a0, 2)
            .iter()
            .all(|l| (g.join(l, l0).dim() == 3) == g.contains(l, &p));
        Ok(Outcome::verdict(ok, || wit("line-plane", &[l0, a0])))
    }))
}

pub(super) fn regular_plane_pencils<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let b = *g.pole_or_err()?;
    let r3 = &ws.families(3)?.r_k;
    Ok(Plan::items(r3.len(), move |i| {
        let a = &r3[i];
        let Some(v) = plane_profile(g, a)?.vertex.map(|v| v.subspace()) else {
            return Ok(Outcome::verdict(false, || wit("plane", &[a])));
        };
        if !g.is_affine(&v) {
            return Ok(Outcome::verdict(false, || wit("plane", &[a])));
        }
        let m = inf(g, a);
        let lines = g.subspaces_of(a, 2);
        let mut bad = Vec::new();
        let pts = g.points_of(a);
        for p in &pts {
            let pencil: Vec<&SubspaceBasis> = lines.iter().filter(|l| g.contains(l, p)).collect();
            let pv = (*p != v).then(|| g.join(p, &v));
            let circ = |l: &SubspaceBasis| reg(g, l) && !g.contains(l, &b);
            let lr = |l: &SubspaceBasis| circ(l) && g.is_affine(l);
            let ok = pencil.iter().all(|l| {
                let want_circ = pv.is_some_and(|pv| **l != pv);
                let want_lr = want_circ && **l != m;
                circ(l) == want_circ && lr(l) == want_lr
            });
            if !ok {
                bad.push(wit("plane-point", &[a, p]));
            }
        }
        Ok(Outcome::many(pts.len() as u64, bad))
    }))
}
