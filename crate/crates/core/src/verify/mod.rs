//! The registry of executable checks, one per statement, and the runner
//! that evaluates them exhaustively or on a seeded sample.
//!
//! Sample mode evaluates instance `i` of a run with seed `s` from
//! `sample::mix(s, i)` alone, so reports do not depend on how an
//! [`Executor`] splits the instance range.

mod local;
mod pencils;
mod recon;

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use once_cell::race::OnceBox;

use crate::algebra::SubspaceBasis;
use crate::error::{Error, Result};
use crate::projspace::Geometry;
use crate::regular::{families, Families};
use crate::sample;
use crate::structures::{build, IncidenceStructure, StructureName};

/// A registry entry as listed by [`list_checks`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckInfo {
    pub id: &'static str,
    pub anchor: &'static str,
    /// The statement relies on lines with at least six points; failures at
    /// `q = 4` are reported as expected.
    pub needs_six_lines: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sample { seed: u64, count: usize },
}

impl Mode {
    pub fn sample(seed: u64, count: usize) -> Result<Mode> {
        if count == 0 {
            return Err(Error::Malformed("sample count must be positive".into()));
        }
        Ok(Mode::Sample { seed, count })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => f.write_str("exhaustive"),
            Mode::Sample { seed, count } => write!(f, "sample:{count}:{seed}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    ExpectedFailQ4,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedFailQ4 => "EXPECTED-FAIL-Q4",
            Status::Skip => "SKIP",
        })
    }
}

/// The objects involved in one failure, as canonical labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Witness(pub Vec<String>);

impl Witness {
    pub fn new(parts: impl IntoIterator<Item = String>) -> Witness {
        Witness(parts.into_iter().collect())
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(p)?;
        }
        Ok(())
    }
}

/// Compact label of a subspace: rows in RREF order, codes separated by
/// commas, rows by `|`.
pub fn label(s: &SubspaceBasis) -> String {
    let mut out = String::from("<");
    for (i, r) in s.rows().enumerate() {
        if i > 0 {
            out.push('|');
        }
        for (j, c) in r.codes().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&c.to_string());
        }
    }
    out.push('>');
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub id: &'static str,
    pub q: usize,
    pub n: usize,
    pub form: String,
    pub mode: Mode,
    pub instances: u64,
    /// Sorted and without repeats.
    pub witnesses: Vec<Witness>,
    pub status: Status,
    /// Left at zero by the core; filled in by callers that keep time.
    pub time_ms: u64,
}

impl CheckReport {
    pub fn fails(&self) -> usize {
        self.witnesses.len()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} q={} n={} form={} mode={} instances={} fails={} time_ms={}",
            self.id,
            self.status,
            self.q,
            self.n,
            self.form,
            self.mode,
            self.instances,
            self.fails(),
            self.time_ms
        )?;
        for w in &self.witnesses {
            write!(f, "\n  WITNESS {w}")?;
        }
        Ok(())
    }
}

/// Result of evaluating one job: how many instances it covered and the
/// failures among them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub tested: u64,
    pub witnesses: Vec<Witness>,
}

impl Outcome {
    pub fn pass() -> Outcome {
        Outcome {
            tested: 1,
            witnesses: Vec::new(),
        }
    }

    pub fn vacuous() -> Outcome {
        Outcome::default()
    }

    pub fn verdict(ok: bool, w: impl FnOnce() -> Witness) -> Outcome {
        Outcome {
            tested: 1,
            witnesses: if ok { Vec::new() } else { alloc::vec![w()] },
        }
    }

    pub fn many(tested: u64, witnesses: Vec<Witness>) -> Outcome {
        Outcome { tested, witnesses }
    }

    fn absorb(&mut self, other: Outcome) {
        self.tested += other.tested;
        self.witnesses.extend(other.witnesses);
    }
}

pub type Job<'a> = dyn Fn(usize) -> Result<Outcome> + Sync + 'a;

/// Evaluates jobs `0..jobs`. Implementations may split the range; the
/// merged outcome must not depend on the split, and the error reported is
/// the one of the lowest failing job.
pub trait Executor {
    fn run(&self, jobs: usize, job: &Job<'_>) -> Result<Outcome>;
}

/// Runs a range of jobs in order.
pub fn run_range(range: Range<usize>, job: &Job<'_>) -> Result<Outcome> {
    let mut acc = Outcome::default();
    for j in range {
        acc.absorb(job(j)?);
    }
    Ok(acc)
}

/// Merges per-range outcomes given in range order.
pub fn merge(parts: impl IntoIterator<Item = Result<Outcome>>) -> Result<Outcome> {
    let mut acc = Outcome::default();
    for p in parts {
        acc.absorb(p?);
    }
    Ok(acc)
}

pub struct Serial;

impl Executor for Serial {
    fn run(&self, jobs: usize, job: &Job<'_>) -> Result<Outcome> {
        run_range(0..jobs, job)
    }
}

type Sampler<'a> = dyn Fn(u64, u64) -> Result<Outcome> + Sync + 'a;

/// A check bound to a workspace: `len` indexed jobs, or a single job that
/// sampling does not split, and optionally a direct sampler.
pub(crate) struct Plan<'a> {
    len: usize,
    whole: bool,
    job: Box<Job<'a>>,
    sampler: Option<Box<Sampler<'a>>>,
}

impl<'a> Plan<'a> {
    fn items(len: usize, job: impl Fn(usize) -> Result<Outcome> + Sync + 'a) -> Plan<'a> {
        Plan {
            len,
            whole: false,
            job: Box::new(job),
            sampler: None,
        }
    }

    fn whole(job: impl Fn() -> Result<Outcome> + Sync + 'a) -> Plan<'a> {
        Plan {
            len: 1,
            whole: true,
            job: Box::new(move |_| job()),
            sampler: None,
        }
    }

    fn sampled_by(mut self, s: impl Fn(u64, u64) -> Result<Outcome> + Sync + 'a) -> Plan<'a> {
        self.sampler = Some(Box::new(s));
        self
    }
}

#[derive(Clone, Copy, Debug)]
struct Needs {
    pseudo: bool,
    min_n: usize,
    max_n: usize,
    b_in_h: Option<bool>,
    min_q: usize,
}

const ANY: Needs = Needs {
    pseudo: true,
    min_n: 2,
    max_n: usize::MAX,
    b_in_h: None,
    min_q: 2,
};

impl Needs {
    const fn n_from(self, n: usize) -> Needs {
        Needs { min_n: n, ..self }
    }

    const fn n_only(self, n: usize) -> Needs {
        Needs {
            min_n: n,
            max_n: n,
            ..self
        }
    }

    const fn b_on_h(self, on: bool) -> Needs {
        Needs {
            b_in_h: Some(on),
            ..self
        }
    }

    const fn q_from(self, q: usize) -> Needs {
        Needs { min_q: q, ..self }
    }

    const fn any_form(self) -> Needs {
        Needs { pseudo: false, ..self }
    }

    fn admit(&self, geom: &Geometry) -> core::result::Result<(), &'static str> {
        let n = geom.n();
        if self.pseudo && geom.is_symplectic() {
            return Err("needs a pseudo-polarity");
        }
        if n < self.min_n {
            return Err("dimension too small");
        }
        if n > self.max_n {
            return Err("dimension too large");
        }
        if geom.q() < self.min_q {
            return Err("field too small");
        }
        match (self.b_in_h, geom.pole_on_h()) {
            (Some(true), Some(false)) => Err("needs b on H"),
            (Some(false), Some(true)) => Err("needs b off H"),
            _ => Ok(()),
        }
    }
}

type PlanFn = for<'a> fn(&'a Workspace<'a>) -> Result<Plan<'a>>;

struct Entry {
    info: CheckInfo,
    needs: Needs,
    plan: PlanFn,
}

const fn entry(id: &'static str, anchor: &'static str, six: bool, needs: Needs, plan: PlanFn) -> Entry {
    Entry {
        info: CheckInfo {
            id,
            anchor,
            needs_six_lines: six,
        },
        needs,
        plan,
    }
}

static REGISTRY: [Entry; 45] = [
    entry(
        "F2.1",
        "radical dimension at most one beside a regular (co)hyperplane",
        false,
        ANY,
        local::radical_bound,
    ),
    entry(
        "F2.2",
        "an affine subspace meets the polar of its horizon",
        false,
        ANY,
        local::horizon_polar_meets,
    ),
    entry(
        "P2.3",
        "regular iff the horizon-radical trace is a point iff the horizon test",
        false,
        ANY,
        local::regularity_equivalences,
    ),
    entry(
        "N2.3",
        "parity of dimension decides whether that point is at infinity",
        false,
        ANY,
        local::trace_parity,
    ),
    entry(
        "C2.4",
        "regularity of affine subspaces read off the horizon",
        false,
        ANY,
        local::horizon_criterion,
    ),
    entry(
        "L2.5",
        "an affine line is regular iff off the polar of its point at infinity",
        false,
        ANY,
        local::affine_line_rule,
    ),
    entry(
        "C2.6",
        "a line through a regular point is regular iff it misses that point's polar on H",
        false,
        ANY,
        local::line_through_point_rule,
    ),
    entry(
        "L2.7",
        "regularity of the lines through b",
        false,
        ANY,
        local::lines_through_b,
    ),
    entry(
        "L2.8",
        "affine plane regular iff its trace point is a point iff its horizon line is regular",
        false,
        ANY,
        local::affine_plane_rule,
    ),
    entry(
        "L2.9",
        "nonregular lines of a plane on H form the pencil at its radical",
        false,
        ANY.n_from(4),
        local::planes_on_h,
    ),
    entry(
        "F3.1",
        "isolated objects of the structure of regular points and lines",
        false,
        ANY.n_from(3),
        recon::isolated_g1,
    ),
    entry(
        "F3.2",
        "through each point at infinity of an affine plane passes a nonregular affine line",
        false,
        ANY.n_from(3),
        local::nonregular_through_infinity,
    ),
    entry(
        "F3.3",
        "two parallel nonregular lines make the plane nonregular",
        false,
        ANY.n_from(3),
        local::parallel_nonregular,
    ),
    entry(
        "F3.4",
        "a triangle of nonregular sides forces the horizon radical",
        false,
        ANY.n_from(3),
        local::nonregular_triangle,
    ),
    entry(
        "F3.5",
        "classification of affine planes by their horizon line",
        false,
        ANY.n_from(3),
        local::plane_cases,
    ),
    entry(
        "F3.6",
        "nonregular affine lines of a plane of radical dimension at most one form a pencil",
        false,
        ANY.n_from(3),
        local::plane_vertex,
    ),
    entry(
        "L3.7",
        "two parallel regular lines span a plane of radical dimension at most one with crossing regular lines",
        false,
        ANY.n_from(3),
        local::parallel_regular_pair,
    ),
    entry(
        "C3.8",
        "parallelism of regular lines from incidence",
        false,
        ANY.n_from(3),
        recon::parallelism,
    ),
    entry(
        "L3.9",
        "planes of radical dimension at most one hold a covering triangle with regular sides",
        true,
        ANY.n_from(3),
        recon::covering_triangle,
    ),
    entry(
        "C3.10",
        "the triangle closure gives the plane without its vertex",
        false,
        ANY.n_from(3),
        recon::triangle_closure,
    ),
    entry(
        "L3.11",
        "planes through a nonregular line split by the horizon test at its point at infinity",
        false,
        ANY.n_from(3),
        local::nonregular_line_planes,
    ),
    entry(
        "L3.12",
        "three points of a nonregular line lie in two plane classes",
        true,
        ANY.n_from(4),
        local::two_plane_classes,
    ),
    entry(
        "T3.13",
        "the affine space recovered from regular points and lines",
        false,
        ANY.n_from(3),
        recon::affine_pipeline,
    ),
    entry(
        "L3.14",
        "the bracket of a point at infinity is the affine part of its polar",
        false,
        ANY.n_from(3),
        local::bracket_is_polar,
    ),
    entry(
        "T3.15",
        "witness pairs with equal structures and different conjugacy",
        false,
        ANY.n_from(3).q_from(4),
        recon::witness_pairs,
    ),
    entry(
        "P3.17",
        "regular subspaces determined by the horizon conjugacy and the brackets",
        false,
        ANY.n_from(3),
        local::regularity_from_brackets,
    ),
    entry(
        "F3.19",
        "isolated points of the structure of regular lines and planes",
        false,
        ANY.n_from(4),
        recon::isolated_g2,
    ),
    entry(
        "T3.20",
        "regular points and all regular lines from the lines avoiding b",
        true,
        ANY.n_from(3),
        recon::c1_pipeline,
    ),
    entry(
        "L3.21",
        "automorphisms are the affine maps preserving both conjugacies",
        false,
        ANY.n_from(3),
        recon::aut_conjugacies,
    ),
    entry(
        "P3.22",
        "algebraic automorphism condition, b off H",
        false,
        ANY.n_from(3).b_on_h(false),
        recon::aut_equivalence_check,
    ),
    entry(
        "P3.23",
        "elementary description of the regular lines, b off H",
        false,
        ANY.n_from(3).b_on_h(false),
        recon::elementary_lines,
    ),
    entry(
        "P3.24",
        "algebraic automorphism condition, b on H",
        false,
        ANY.n_from(4).b_on_h(true),
        recon::aut_equivalence_check,
    ),
    entry(
        "R4.1",
        "a subspace and its polar share the radical",
        false,
        ANY.any_form(),
        local::polar_radical,
    ),
    entry(
        "T4.1",
        "regular points and lines from the regular hyperplane structure",
        false,
        ANY.n_from(4),
        recon::dual_route,
    ),
    entry(
        "R5.2",
        "no plane on H is regular",
        false,
        ANY.n_from(4),
        local::no_regular_plane_on_h,
    ),
    entry(
        "F5.1",
        "lines coplanar with a given one inside a plane form the pencil at their meet",
        false,
        ANY.n_from(4),
        local::coplanar_pencil,
    ),
    entry(
        "L5.2",
        "pencils of a regular plane meet the line families as predicted",
        false,
        ANY.n_from(4),
        local::regular_plane_pencils,
    ),
    entry(
        "L5.3/C5.4",
        "the pencil relation holds exactly on concurrent coplanar triples",
        true,
        ANY.n_from(4),
        pencils::pencil_relation,
    ),
    entry(
        "F5.5",
        "no regular plane and no regular pencil through b on H",
        false,
        ANY.n_from(4).b_on_h(true),
        recon::no_pencil_at_b,
    ),
    entry(
        "L5.6-5.9",
        "star membership through triangles and the pencil relation",
        true,
        ANY.n_from(4),
        pencils::star_witnesses,
    ),
    entry(
        "P5.10",
        "star closure of a pencil is the star of its vertex",
        true,
        ANY.n_from(4),
        pencils::star_prediction,
    ),
    entry(
        "L5.11",
        "nonadjacency of concurrent regular lines",
        false,
        ANY.n_from(4),
        pencils::adjacency_cases,
    ),
    entry(
        "L5.12",
        "the nonadjacency closure detects vertices on H",
        false,
        ANY.n_from(5),
        pencils::point_kind_test,
    ),
    entry(
        "L5.13",
        "in three-space the nonadjacency closure always holds",
        false,
        ANY.n_only(4),
        pencils::closure_in_three_space,
    ),
    entry(
        "T5.14",
        "regular points and lines from either line structure",
        false,
        ANY.n_from(4),
        recon::line_pipelines,
    ),
];

pub fn list_checks() -> Vec<CheckInfo> {
    REGISTRY.iter().map(|e| e.info).collect()
}

fn lookup(id: &str) -> Result<&'static Entry> {
    // accept the en dash too
    let id = id.replace('\u{2013}', "-");
    REGISTRY.iter().find(|e| e.info.id == id).ok_or(Error::UnknownCheck(id))
}

const SLOTS: usize = 10;

fn slot(name: &StructureName) -> Option<usize> {
    Some(match name {
        StructureName::G1 => 0,
        StructureName::B1 => 1,
        StructureName::C1 => 2,
        StructureName::G2 => 3,
        StructureName::B2 => 4,
        StructureName::C2 => 5,
        StructureName::Pk(2) => 6,
        StructureName::ProjG2 => 7,
        StructureName::Affine => 8,
        StructureName::Gk(_) => 9,
        _ => return None,
    })
}

/// Data shared by the checks run on one geometry, computed on first use.
pub struct Workspace<'g> {
    geom: &'g Geometry,
    fams: [OnceBox<Families>; 4],
    structures: [OnceBox<IncidenceStructure>; SLOTS],
    all: OnceBox<Vec<SubspaceBasis>>,
}

impl<'g> Workspace<'g> {
    pub fn new(geom: &'g Geometry) -> Workspace<'g> {
        Workspace {
            geom,
            fams: Default::default(),
            structures: Default::default(),
            all: OnceBox::new(),
        }
    }

    pub fn geom(&self) -> &'g Geometry {
        self.geom
    }

    pub fn families(&self, k: usize) -> Result<&Families> {
        let cell = self.fams.get(k).ok_or(Error::BadDimension(k))?;
        cell.get_or_try_init(|| families(self.geom, k).map(Box::new))
    }

    /// `Gk` is cached for `k = n - 2` only.
    pub fn structure(&self, name: StructureName) -> Result<&IncidenceStructure> {
        let Some(i) = slot(&name) else {
            return Err(Error::Malformed(alloc::format!("no cache slot for {name}")));
        };
        if let StructureName::Gk(k) = name {
            if k + 2 != self.geom.n() {
                return Err(Error::BadDimension(k));
            }
        }
        self.structures[i].get_or_try_init(|| build(self.geom, name).map(Box::new))
    }

    /// Every subspace of dimension `1..=n`.
    pub fn all_subspaces(&self) -> Result<&[SubspaceBasis]> {
        let v = self.all.get_or_try_init(|| {
            let mut v = Vec::new();
            for k in 1..=self.geom.n() {
                v.extend_from_slice(self.geom.subspaces(k)?);
            }
            Ok::<_, Error>(Box::new(v))
        })?;
        Ok(v)
    }
}

pub fn run_check(id: &str, geom: &Geometry, mode: Mode) -> Result<CheckReport> {
    run_check_in(&Workspace::new(geom), id, mode, &Serial)
}

pub fn run_check_in(ws: &Workspace<'_>, id: &str, mode: Mode, exec: &dyn Executor) -> Result<CheckReport> {
    let e = lookup(id)?;
    let geom = ws.geom();
    if let Err(reason) = e.needs.admit(geom) {
        return Err(Error::InadmissibleGeometry {
            id: e.info.id.into(),
            reason: reason.into(),
        });
    }
    let plan = (e.plan)(ws)?;
    let outcome = match (mode, plan.whole, &plan.sampler) {
        (Mode::Sample { seed, count }, false, Some(s)) => exec.run(count, &|j| s(seed, j as u64))?,
        (Mode::Sample { seed, count }, false, None) if plan.len > 0 => {
            exec.run(count, &|j| (plan.job)(sample::pick(seed, j as u64, plan.len)))?
        }
        _ => exec.run(plan.len, &*plan.job)?,
    };
    let mut witnesses = outcome.witnesses;
    witnesses.sort_unstable();
    witnesses.dedup();
    let status = if witnesses.is_empty() {
        Status::Pass
    } else if geom.q() == 4 && e.info.needs_six_lines {
        Status::ExpectedFailQ4
    } else {
        Status::Fail
    };
    Ok(report(geom, e.info.id, mode, outcome.tested, witnesses, status))
}

fn report(
    geom: &Geometry,
    id: &'static str,
    mode: Mode,
    instances: u64,
    witnesses: Vec<Witness>,
    status: Status,
) -> CheckReport {
    CheckReport {
        id,
        q: geom.q(),
        n: geom.n(),
        form: geom.kind().to_string(),
        mode,
        instances,
        witnesses,
        status,
        time_ms: 0,
    }
}

/// Every registered check in registry order; inadmissible ones are
/// reported as skipped.
pub fn run_all(ws: &Workspace<'_>, mode: Mode, exec: &dyn Executor) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for e in REGISTRY.iter() {
        out.push(run_or_skip(ws, e.info.id, mode, exec)?);
    }
    Ok(out)
}

/// Like [`run_check_in`], with an inadmissible geometry giving a skip.
pub fn run_or_skip(ws: &Workspace<'_>, id: &str, mode: Mode, exec: &dyn Executor) -> Result<CheckReport> {
    match run_check_in(ws, id, mode, exec) {
        Err(Error::InadmissibleGeometry { .. }) => {
            let e = lookup(id)?;
            Ok(report(ws.geom(), e.info.id, mode, 0, Vec::new(), Status::Skip))
        }
        other => other,
    }
}

/// Unordered pair `t` of `0..`, as `(i, j)` with `j < i`.
fn unrank_pair(t: usize) -> (usize, usize) {
    // largest i with i (i - 1) / 2 <= t
    let mut i = (2 * t).isqrt() + 1;
    while i * (i - 1) / 2 > t {
        i -= 1;
    }
    (i, t - i * (i - 1) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_unranking() {
        let mut t = 0;
        for i in 1..60 {
            for j in 0..i {
                assert_eq!(unrank_pair(t), (i, j));
                t += 1;
            }
        }
    }

    #[test]
    fn registry_ids_unique() {
        let ids: Vec<&str> = REGISTRY.iter().map(|e| e.info.id).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
    }
}
