//! The `regra` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use regra_core::algebra::SubspaceBasis;
use regra_core::projspace::Geometry;
use regra_core::reconstruct::{b1_from_c1, identify, rebuild_b1, recover_affine};
use regra_core::regular::{families, is_regular_fast, regular_flags, Families};
use regra_core::structures::{build, describe, isolated, IncidenceStructure, StructureName};
use regra_core::verify::{list_checks, run_check_in, run_or_skip, CheckReport, Mode, Status, Workspace};
use regra_core::witness::{eps_witness, mulambda_witness};

use crate::error::{Error, Result};
use crate::exec::Threads;
use crate::inc;

#[derive(Parser, Debug)]
#[command(
    name = "regra",
    version,
    about = "Regular subspaces of pseudo-polarities over GF(2^k)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct GeomArgs {
    /// Field as `2^k`.
    #[arg(long, value_parser = parse_field)]
    field: u32,
    /// Vector space dimension n.
    #[arg(long)]
    dim: usize,
    /// 1 (n odd), 2 (n even) or 3 (symplectic, n even).
    #[arg(long = "form-type", value_parser = clap::value_parser!(u8).range(1..=3))]
    form_type: u8,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// The hyperplane H, the pole b and the family sizes.
    Info(GeomArgs),
    /// List the k-subspaces of one family.
    Enumerate {
        #[command(flatten)]
        geom: GeomArgs,
        #[arg(long)]
        k: usize,
        /// all, regular, affine, a-circ, lr, lstar, p0, p1 or p01.
        #[arg(long, default_value = "all")]
        family: String,
    },
    /// Build a structure and summarize it.
    Build {
        #[command(flatten)]
        geom: GeomArgs,
        #[arg(long, value_parser = parse_structure)]
        structure: StructureName,
        /// Write the structure as INC1.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run registered checks.
    Verify {
        #[command(flatten)]
        geom: GeomArgs,
        /// A check id, or `all`.
        #[arg(long, default_value = "all")]
        check: String,
        /// `exhaustive` or `sample:N`.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report time_ms=0 so that reports are byte-identical.
        #[arg(long)]
        deterministic: bool,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a structure from another one and compare with the direct build.
    Reconstruct {
        #[command(flatten)]
        geom: GeomArgs,
        /// B1, C1, B2, C2 or the dual route `G<n-2>k`.
        #[arg(long, value_parser = parse_structure)]
        from: StructureName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A pair of geometries with equal structures and different conjugacy.
    Witness {
        #[arg(long, value_parser = parse_field)]
        field: u32,
        #[arg(long)]
        dim: usize,
        #[arg(long = "form-type")]
        form_type: Option<u8>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one structure, or `all`, as INC1.
    Export {
        #[command(flatten)]
        geom: GeomArgs,
        #[arg(long)]
        structure: String,
        /// A file, or a directory for `all`.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_field(s: &str) -> std::result::Result<u32, String> {
    let k = s.strip_prefix("2^").ok_or("expected 2^k")?;
    k.parse().map_err(|_| format!("bad exponent `{k}`"))
}

fn parse_structure(s: &str) -> std::result::Result<StructureName, String> {
    StructureName::parse(s).ok_or_else(|| format!("unknown structure `{s}`"))
}

fn parse_mode(s: &str, seed: u64) -> Result<Mode> {
    if s == "exhaustive" {
        return Ok(Mode::Exhaustive);
    }
    let n = s
        .strip_prefix("sample:")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Error::Usage(format!("bad mode `{s}`")))?;
    Ok(Mode::sample(seed, n)?)
}

impl GeomArgs {
    fn geometry(&self) -> Result<Geometry> {
        Ok(Geometry::canonical(self.field, self.dim, self.form_type)?)
    }
}

/// Run with `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Cmd::Info(g) => info(&g.geometry()?, out),
        Cmd::Enumerate { geom, k, family } => enumerate(&geom.geometry()?, k, &family, out),
        Cmd::Build {
            geom,
            structure,
            out: path,
        } => {
            let g = geom.geometry()?;
            let s = build(&g, structure)?;
            let iso = isolated(&s);
            writeln!(out, "{}", describe(&s))?;
            writeln!(
                out,
                "isolated: {} points, {} blocks",
                iso.points.len(),
                iso.blocks.len()
            )?;
            if let Some(p) = path {
                inc::export_inc(&g, &s, &p)?;
            }
            Ok(0)
        }
        Cmd::Export {
            geom,
            structure,
            out: path,
        } => {
            let g = geom.geometry()?;
            if structure == "all" {
                std::fs::create_dir_all(&path)?;
                for name in exportable(&g) {
                    let s = build(&g, name.clone())?;
                    inc::export_inc(&g, &s, &path.join(format!("{name}.inc1")))?;
                    writeln!(out, "{}", describe(&s))?;
                }
            } else {
                let name = parse_structure(&structure).map_err(Error::Usage)?;
                inc::export_inc(&g, &build(&g, name)?, &path)?;
            }
            Ok(0)
        }
        Cmd::Verify {
            geom,
            check,
            mode,
            seed,
            deterministic,
            out: path,
        } => {
            let g = geom.geometry()?;
            let mode = parse_mode(&mode, seed)?;
            let text = verify(&g, &check, mode, deterministic)?;
            out.write_all(text.0.as_bytes())?;
            if let Some(p) = path {
                std::fs::write(p, &text.0)?;
            }
            Ok(text.1)
        }
        Cmd::Reconstruct { geom, from, out: path } => {
            let g = geom.geometry()?;
            let (got, want) = reconstruct(&g, from.clone())?;
            let same = got == want;
            writeln!(
                out,
                "reconstruct {from} -> {}: {} (points {}/{}, blocks {}/{})",
                want.name,
                if same { "equal" } else { "differs" },
                got.points.len(),
                want.points.len(),
                got.blocks.len(),
                want.blocks.len()
            )?;
            if let Some(p) = path {
                inc::export_inc(&g, &got, &p)?;
            }
            Ok(if same { 0 } else { 1 })
        }
        Cmd::Witness {
            field,
            dim,
            form_type,
            seed,
            out: dir,
        } => witness(field, dim, form_type, seed, &dir, out),
    }
}

/// Structures buildable on `g`, in a fixed order.
pub fn exportable(g: &Geometry) -> Vec<StructureName> {
    let n = g.n();
    let mut v = vec![StructureName::G1, StructureName::B1, StructureName::C1];
    if n >= 4 {
        v.extend([StructureName::G2, StructureName::B2, StructureName::C2]);
    }
    for k in 1..n.saturating_sub(1) {
        v.push(StructureName::Gk(k));
    }
    for k in 1..n.saturating_sub(1) {
        v.push(StructureName::Pk(k));
    }
    v.extend([StructureName::ProjG2, StructureName::Affine]);
    v
}

fn info(g: &Geometry, out: &mut dyn Write) -> Result<i32> {
    let ctx = g.ctx();
    writeln!(out, "field GF({}) modulus {:#b}", ctx.order(), ctx.modulus())?;
    writeln!(out, "space n={} form {}", g.n(), g.kind())?;
    if g.is_symplectic() {
        writeln!(out, "symplectic: every point is selfconjugate, no pole")?;
        writeln!(out, "{:>3} {:>8}", "k", "R_k")?;
        for k in 1..g.n() {
            let r = g.subspaces(k)?.iter().filter(|s| is_regular_fast(g, s)).count();
            writeln!(out, "{k:>3} {r:>8}")?;
        }
        return Ok(0);
    }
    writeln!(out, "H: [{}] . x = 0", g.h_equation())?;
    let b = g.pole_or_err()?;
    writeln!(out, "b: {b} ({})", if g.is_affine(b) { "off H" } else { "on H" })?;
    writeln!(out, "{:>3} {:>8} {:>8} {:>8}", "k", "R_k", "A_k", "A_k_circ")?;
    let mut extra = String::new();
    for k in 1..g.n() {
        let f: Families = families(g, k)?;
        writeln!(
            out,
            "{k:>3} {:>8} {:>8} {:>8}",
            f.r_k.len(),
            f.a_k.len(),
            f.a_k_circ.len()
        )?;
        if k == 2 {
            let _ = writeln!(extra, "L_r {}  L_star {}", f.l_r.len(), f.l_star.len());
        }
        if k == 3 {
            let _ = writeln!(extra, "P0 {}  P1 {}  P01 {}", f.p0.len(), f.p1.len(), f.p01.len());
        }
    }
    out.write_all(extra.as_bytes())?;
    Ok(0)
}

fn enumerate(g: &Geometry, k: usize, family: &str, out: &mut dyn Write) -> Result<i32> {
    if k == 0 || k > g.n() {
        return Err(Error::Usage(format!("k must be in 1..={}", g.n())));
    }
    let list: Vec<SubspaceBasis> = if family == "all" || (family == "regular" && g.is_symplectic()) {
        g.subspaces(k)?.to_vec()
    } else {
        let f = families(g, k)?;
        match family {
            "regular" => f.r_k,
            "affine" => f.a_k,
            "a-circ" => f.a_k_circ,
            "lr" => f.l_r,
            "lstar" => f.l_star,
            "p0" => f.p0,
            "p1" => f.p1,
            "p01" => f.p01,
            other => return Err(Error::Usage(format!("unknown family `{other}`"))),
        }
    };
    let flags = if g.is_symplectic() {
        None
    } else {
        Some(regular_flags(g, k)?)
    };
    for s in &list {
        let reg = match &flags {
            Some(f) => g.index_of(s).is_some_and(|i| f[i]),
            None => is_regular_fast(g, s),
        };
        writeln!(
            out,
            "{s}\t{}\t{}",
            if reg { "regular" } else { "nonregular" },
            if g.is_affine(s) { "affine" } else { "on-H" }
        )?;
    }
    Ok(0)
}

/// The report text and the exit code.
fn verify(g: &Geometry, check: &str, mode: Mode, deterministic: bool) -> Result<(String, i32)> {
    let ws = Workspace::new(g);
    let exec = Threads::from_env();
    let ids: Vec<&str> = if check == "all" {
        list_checks().into_iter().map(|c| c.id).collect()
    } else {
        vec![check]
    };
    let mut text = String::new();
    let mut code = 0;
    for id in ids {
        let t0 = Instant::now();
        let mut r: CheckReport = if check == "all" {
            run_or_skip(&ws, id, mode, &exec)?
        } else {
            run_check_in(&ws, id, mode, &exec)?
        };
        r.time_ms = if deterministic {
            0
        } else {
            t0.elapsed().as_millis() as u64
        };
        if r.status == Status::Fail {
            code = 1;
        }
        let _ = writeln!(text, "{r}");
    }
    Ok((text, code))
}

/// The reconstruction from `from` and the direct build it should equal.
pub fn reconstruct(g: &Geometry, from: StructureName) -> Result<(IncidenceStructure, IncidenceStructure)> {
    let src = build(g, from.clone())?;
    Ok(match from {
        StructureName::B1 => {
            let got = identify(g, &recover_affine(&src)?, StructureName::Affine)?;
            (got, build(g, StructureName::Affine)?)
        }
        StructureName::C1 => {
            let got = identify(g, &b1_from_c1(&src)?, StructureName::B1)?;
            (got, build(g, StructureName::B1)?)
        }
        _ => (rebuild_b1(g, &src)?, build(g, StructureName::B1)?),
    })
}

fn witness(field: u32, n: usize, form_type: Option<u8>, seed: u64, dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let expect = if n % 2 == 1 { 1 } else { 2 };
    if form_type.is_some_and(|t| t != expect) {
        return Err(Error::Usage(format!("witness pairs at n = {n} use form type {expect}")));
    }
    let ctx = regra_core::algebra::FieldCtx::new(field)?;
    let w = if n % 2 == 1 {
        eps_witness(&ctx, n, seed)?
    } else {
        mulambda_witness(&ctx, n, seed)?
    };
    std::fs::create_dir_all(dir)?;
    for (g, file) in [(&w.first, "first.inc1"), (&w.second, "second.inc1")] {
        inc::export_inc(g, &build(g, StructureName::B1)?, &dir.join(file))?;
    }
    let mut v = String::new();
    let _ = writeln!(v, "choice {:?}", w.choice);
    let _ = writeln!(v, "first {}", w.first.kind());
    let _ = writeln!(v, "second {}", w.second.kind());
    let _ = writeln!(v, "points {} {}", w.a1, w.a2);
    let _ = writeln!(v, "structures_equal {}", w.structures_equal);
    let _ = writeln!(v, "conjugacy_differs {}", w.conjugacy_differs);
    let _ = writeln!(v, "valid {}", w.is_valid());
    std::fs::write(dir.join("verdict.txt"), &v)?;
    out.write_all(v.as_bytes())?;
    Ok(if w.is_valid() { 0 } else { 1 })
}
