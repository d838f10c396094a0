//! Pencils, stars and adjacency in the structures of regular lines and
//! planes.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use super::{label, unrank_pair, Outcome, Plan, Witness, Workspace};
use crate::algebra::SubspaceBasis;
use crate::error::{Error, Result};
use crate::oracle::{host_pencils, predicted_star, PencilInstance};
use crate::projspace::Geometry;
use crate::reconstruct::LineHost;
use crate::sample;
use crate::structures::{IncidenceStructure, StructureName};

const HOSTS: [StructureName; 2] = [StructureName::B2, StructureName::C2];

struct Host<'a> {
    s: &'a IncidenceStructure,
    h: LineHost<'a>,
    tag: String,
}

impl<'a> Host<'a> {
    fn line(&self, i: u32) -> Result<&'a SubspaceBasis> {
        let l = self.s.point_label(i);
        l.subspace().ok_or_else(|| Error::UnknownLabel(l.to_string()))
    }

    fn wit(&self, kind: &str, parts: &[&SubspaceBasis]) -> Witness {
        let mut v = alloc::vec![self.tag.clone(), kind.to_string()];
        v.extend(parts.iter().map(|s| label(s)));
        Witness(v)
    }
}

fn hosts<'a>(ws: &'a Workspace<'a>) -> Result<Vec<Host<'a>>> {
    HOSTS
        .iter()
        .map(|n| {
            let s = ws.structure(n.clone())?;
            Ok(Host {
                s,
                h: LineHost::new(s),
                tag: n.to_string(),
            })
        })
        .collect()
}

/// Jobs over `(host, item)` pairs, flattened.
fn flat(counts: &[usize]) -> impl Fn(usize) -> (usize, usize) + Sync + '_ {
    move |mut i| {
        for (h, &c) in counts.iter().enumerate() {
            if i < c {
                return (h, i);
            }
            i -= c;
        }
        unreachable!("job index out of range")
    }
}

fn inf(g: &Geometry, a: &SubspaceBasis) -> SubspaceBasis {
    g.meet(a, g.h())
}

fn orth(g: &Geometry, a: &SubspaceBasis, b: &SubspaceBasis) -> bool {
    a.rows().all(|x| b.rows().all(|y| g.xi(x, y) == 0))
}

pub(super) fn pencil_relation<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let hs = hosts(ws)?;
    let counts: Vec<usize> = hs.iter().map(|h| h.s.blocks.len()).collect();
    let total = counts.iter().sum();
    Ok(Plan::items(total, move |i| {
        let (hi, blk) = flat(&counts)(i);
        let host = &hs[hi];
        let pts = host.h.block_points(blk as u32);
        let mut bad = Vec::new();
        let mut tested = 0;
        for (a, &x) in pts.iter().enumerate() {
            let lx = host.line(x)?;
            for (b, &y) in pts.iter().enumerate().skip(a + 1) {
                let ly = host.line(y)?;
                let meet = g.meet(lx, ly);
                let xy = host.h.pair_common(x, y);
                for &z in &pts[b + 1..] {
                    let lz = host.line(z)?;
                    tested += 1;
                    if host.h.collinear_on_block(&xy, z, blk as u32) != g.contains(lz, &meet) {
                        bad.push(host.wit("triple", &[lx, ly, lz]));
                    }
                }
            }
        }
        Ok(Outcome::many(tested, bad))
    }))
}

/// Per pencil of every host, in a fixed order.
fn pencil_plan<'a>(
    ws: &'a Workspace<'a>,
    hosts_of: &[StructureName],
    check: impl Fn(&Geometry, &Host<'a>, &PencilInstance) -> Result<Outcome> + Sync + 'a,
) -> Result<Plan<'a>> {
    let g = ws.geom();
    let hs: Vec<Host<'a>> = hosts(ws)?
        .into_iter()
        .filter(|h| hosts_of.iter().any(|n| n.to_string() == h.tag))
        .collect();
    let pencils: Vec<Vec<PencilInstance>> = hs.iter().map(|h| host_pencils(g, h.s)).collect();
    let counts: Vec<usize> = pencils.iter().map(Vec::len).collect();
    let total = counts.iter().sum();
    Ok(Plan::items(total, move |i| {
        let (hi, pi) = flat(&counts)(i);
        check(g, &hs[hi], &pencils[hi][pi])
    }))
}

pub(super) fn star_witnesses<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    pencil_plan(ws, &HOSTS, |g, host, p| {
        let st = host.h.star_closure(&p.members)?;
        let star = predicted_star(g, host.s, &p.vertex);
        let w = |tag| host.wit(tag, &[&p.vertex, &p.plane]);
        let inside = |xs: &[u32]| xs.iter().all(|x| star.binary_search(x).is_ok());
        if !inside(&st.s_delta) || !inside(&st.s_l) {
            return Ok(Outcome::verdict(false, || w("outside-star")));
        }
        let m = inf(g, &p.plane);
        let affine_vertex = g.is_affine(&p.vertex);
        let in_delta = |l: u32| st.s_delta.binary_search(&l).is_ok();
        let mut bad = Vec::new();
        let mut tested = 0;
        for &l in star.iter().filter(|l| p.members.binary_search(l).is_err()) {
            let ll = host.line(l)?;
            if !affine_vertex {
                tested += 1;
                if !in_delta(l) {
                    bad.push(host.wit("missing", &[&p.vertex, &p.plane, ll]));
                }
                continue;
            }
            let q = inf(g, ll);
            if g.pole() == Some(&q) {
                continue;
            }
            tested += 1;
            let ok = if !orth(g, &q, &m) {
                in_delta(l)
            } else {
                let good: Vec<u32> = st
                    .s_delta
                    .iter()
                    .copied()
                    .filter(|&x| x != l && host.h.adjacent(l, x))
                    .filter(|&x| host.line(x).is_ok_and(|lx| !orth(g, &inf(g, lx), &m)))
                    .collect();
                good.iter()
                    .enumerate()
                    .any(|(i, &a)| good[i + 1..].iter().any(|&b| host.h.collinear(l, a, b)))
            };
            if !ok {
                bad.push(host.wit("unreached", &[&p.vertex, &p.plane, ll]));
            }
        }
        Ok(Outcome::many(tested, bad))
    })
}

pub(super) fn star_prediction<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    pencil_plan(ws, &HOSTS, |g, host, p| {
        let st = host.h.star_closure(&p.members)?;
        let ok = st.s == predicted_star(g, host.s, &p.vertex);
        Ok(Outcome::verdict(ok, || host.wit("pencil", &[&p.vertex, &p.plane])))
    })
}

pub(super) fn point_kind_test<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    pencil_plan(ws, &HOSTS, |g, host, p| {
        let st = host.h.star_closure(&p.members)?;
        let ok = host.h.nonadjacency_closed(&st.s) == !g.is_affine(&p.vertex);
        Ok(Outcome::verdict(ok, || host.wit("pencil", &[&p.vertex, &p.plane])))
    })
}

pub(super) fn closure_in_three_space<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    pencil_plan(ws, &HOSTS, |_, host, p| {
        let st = host.h.star_closure(&p.members)?;
        Ok(Outcome::verdict(host.h.nonadjacency_closed(&st.s), || {
            host.wit("pencil", &[&p.vertex, &p.plane])
        }))
    })
}

/// Whether two concurrent lines are predicted nonadjacent.
fn predicted_apart(g: &Geometry, a: &SubspaceBasis, b: &SubspaceBasis, p: &SubspaceBasis) -> bool {
    if g.is_affine(p) {
        return orth(g, &inf(g, a), &inf(g, b));
    }
    match (g.is_affine(a), g.is_affine(b)) {
        (false, false) => true,
        (true, true) => orth(g, p, &inf(g, &g.join(a, b))),
        _ => false,
    }
}

fn adjacency_pair(g: &Geometry, host: &Host<'_>, i: u32, j: u32) -> Result<Outcome> {
    let (a, b) = (host.line(i)?, host.line(j)?);
    let p = g.meet(a, b);
    if p.dim() != 1 {
        return Ok(Outcome::vacuous());
    }
    let ok = host.h.adjacent(i, j) != predicted_apart(g, a, b, &p);
    Ok(Outcome::verdict(ok, || host.wit("lines", &[a, b])))
}

pub(super) fn adjacency_cases<'a>(ws: &'a Workspace<'a>) -> Result<Plan<'a>> {
    let g = ws.geom();
    let hs = hosts(ws)?;
    let counts: Vec<usize> = hs
        .iter()
        .map(|h| {
            let n = h.s.points.len();
            n * n.saturating_sub(1) / 2
        })
        .collect();
    let total = counts.iter().sum();
    let hs2 = hosts(ws)?;
    Ok(Plan::items(total, move |t| {
        let (hi, t) = flat(&counts)(t);
        let (i, j) = unrank_pair(t);
        adjacency_pair(g, &hs[hi], i as u32, j as u32)
    })
    .sampled_by(move |seed, i| {
        let mut rng = sample::rng(seed, i);
        let host = &hs2[rng.random_range(0..hs2.len())];
        let np = host.s.points.len() as u32;
        for _ in 0..64 {
            let x = rng.random_range(0..np);
            let pts = g.points_of(host.line(x)?);
            let p = pts[rng.random_range(0..pts.len())];
            let all = g.subspaces(1)?;
            let r = all[rng.random_range(0..all.len())];
            let m = g.join(&p, &r);
            if m.dim() != 2 {
                continue;
            }
            if let Some(y) = host.s.point_index(&crate::structures::Label::Subspace(m)) {
                if y != x {
                    return adjacency_pair(g, host, x, y);
                }
            }
        }
        Ok(Outcome::vacuous())
    }))
}
