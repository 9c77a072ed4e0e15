//! The `nonex` command line: argument parsing, copula selection and
//! key/value output.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;

use crate::axioms::{audit_margins, check_axioms, AxiomConfig};
use crate::bounds::{pointwise_bound, universal_bound};
use crate::copula::{Copula, CopulaTerm};
use crate::error::Error;
use crate::perm::Perm;
use crate::point::UnitPoint;
use crate::rational::{
    format_decimal, format_exact, format_table_cell, parse_lenient, ratio, Rational,
};
use crate::search::{max_difference, mu, sample_manifold};
use crate::shuffle::{build_manifold_structure, BaseCopula, DeltaVector, ShuffleStructure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_BAD_STEP: i32 = 4;
pub const EXIT_UNSUPPORTED_DIM: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "nonex",
    version,
    about = "Exact tools for maximally non-exchangeable copulas"
)]
pub struct Cli {
    /// Worker threads for searches and checks (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a copula at a point.
    Eval {
        #[command(flatten)]
        copula: CopulaArgs,
        #[arg(long)]
        point: String,
    },
    /// Evaluate at a point and at its permutation, and their difference.
    Diff {
        #[command(flatten)]
        copula: CopulaArgs,
        #[arg(long)]
        point: String,
        #[arg(long, default_value = "reverse")]
        perm: String,
    },
    /// Grid search for the maximal difference under one permutation.
    Search {
        #[command(flatten)]
        copula: CopulaArgs,
        #[arg(long, default_value = "reverse")]
        perm: String,
        #[arg(long)]
        step: String,
    },
    /// Normalized maximal difference over all permutations.
    Mu {
        #[command(flatten)]
        copula: CopulaArgs,
        #[arg(long)]
        step: String,
        /// Search all of S_d when d! is at most this, else sample this many.
        #[arg(long, default_value_t = 40320)]
        budget: usize,
        #[arg(long, env = "NONEX_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Check the copula axioms on random samples.
    Verify {
        #[command(flatten)]
        copula: CopulaArgs,
        #[arg(long, default_value_t = 10_000)]
        boxes: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, env = "NONEX_SEED", default_value_t = 0)]
        seed: u64,
        /// Also audit all pairs of (d-k)-margins on a grid with step 1/(d+1).
        #[arg(long)]
        margins: Option<usize>,
    },
    /// List points of the set where the sharp bound is attained.
    Manifold {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, env = "NONEX_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Pointwise upper bounds on the difference at a point.
    Bound {
        #[arg(long)]
        point: String,
        /// Without a permutation only bounds valid for every permutation are used.
        #[arg(long)]
        perm: Option<String>,
    },
    /// Write the two-dimensional difference surface as CSV.
    Surface {
        #[command(flatten)]
        copula: CopulaArgs,
        #[arg(long, default_value = "reverse")]
        perm: String,
        #[arg(long)]
        step: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the validity conditions of a shuffle file.
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Upper Fréchet bound M_d.
    Mdim,
    /// Lower Fréchet bound W_d.
    W,
    Independence,
    Cstar,
    /// The even-dimensional shuffle family; needs --delta.
    Manifold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Base {
    Min,
    Independence,
}

#[derive(Debug, Args)]
pub struct CopulaArgs {
    #[arg(long, value_enum, conflicts_with = "file")]
    pub copula: Option<Family>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Shuffle structure file (JSON).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// δ entries for the manifold family, e.g. 1/20,3/20.
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, value_enum, default_value = "min")]
    pub base: Base,
    /// Evaluate the relabeled copula u ↦ C(u_σ).
    #[arg(long)]
    pub relabel: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => EXIT_PARSE,
            Failure::Lib(e) => match e {
                Error::DimensionMismatch { .. } | Error::DimensionTooSmall(_) => EXIT_DIMENSION,
                Error::InvalidStep { .. } => EXIT_BAD_STEP,
                Error::UnsupportedDimension { .. } => EXIT_UNSUPPORTED_DIM,
                _ => EXIT_PARSE,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs a parsed command, writing results to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    let workers = cli.threads;
    match cli.command {
        Command::Eval { copula, point } => {
            let c = resolve(&copula)?;
            let u = point_for(&c, &point)?;
            let v = c.evaluate(&u)?;
            writeln!(out, "copula: {}", c.label())?;
            writeln!(out, "point: {u}")?;
            writeln!(out, "value: {}", format_exact(&v))?;
            writeln!(out, "decimal: {}", format_decimal(&v, 12))?;
            Ok(EXIT_OK)
        }
        Command::Diff {
            copula,
            point,
            perm,
        } => {
            let c = resolve(&copula)?;
            let u = point_for(&c, &point)?;
            let p = Perm::parse(&perm, c.dim())?;
            let up = p.apply(&u)?;
            let (a, b) = (c.evaluate(&u)?, c.evaluate(&up)?);
            writeln!(out, "point: {u}")?;
            writeln!(out, "permuted_point: {up}")?;
            writeln!(out, "value: {}", format_exact(&a))?;
            writeln!(out, "permuted_value: {}", format_exact(&b))?;
            writeln!(out, "difference: {}", format_exact(&(a - b).abs()))?;
            Ok(EXIT_OK)
        }
        Command::Search { copula, perm, step } => {
            let c = resolve(&copula)?;
            let p = Perm::parse(&perm, c.dim())?;
            let h = parse_step(&step)?;
            let r = max_difference(&c, &p, h, workers)?;
            for (k, v) in r.lines() {
                writeln!(out, "{k}: {v}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Mu {
            copula,
            step,
            budget,
            seed,
        } => {
            let c = resolve(&copula)?;
            let h = parse_step(&step)?;
            let r = mu(&c, h, budget, workers, seed)?;
            writeln!(out, "mu: {}", format_exact(&r.mu))?;
            writeln!(out, "exhaustive: {}", r.exhaustive)?;
            writeln!(out, "permutations_checked: {}", r.permutations_checked)?;
            for (k, v) in r.search.lines() {
                writeln!(out, "{k}: {v}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            copula,
            boxes,
            samples,
            seed,
            margins,
        } => {
            let c = resolve(&copula)?;
            let cfg = AxiomConfig::new(samples, boxes, seed);
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let report = pool.install(|| check_axioms(&c, &cfg));
            writeln!(out, "copula: {}", c.label())?;
            writeln!(out, "seed: {}", report.seed)?;
            for (name, check) in report.checks() {
                writeln!(out, "{name}: {check}")?;
            }
            writeln!(out, "boxes_checked: {}", report.boxes_checked)?;
            writeln!(out, "points_checked: {}", report.points_checked)?;
            let mut ok = report.passed();
            if let Some(k) = margins {
                let h = ratio(1, c.dim() as i128 + 1);
                let audit = pool.install(|| audit_margins(&c, k, h))?;
                writeln!(out, "margin_audit_k: {k}")?;
                writeln!(out, "margin_audit_bound: {}", format_exact(&audit.bound))?;
                writeln!(
                    out,
                    "margin_audit_margin_bound: {}",
                    format_exact(&audit.margin_bound)
                )?;
                writeln!(
                    out,
                    "margin_audit_max_difference: {}",
                    format_exact(&audit.max_difference)
                )?;
                writeln!(
                    out,
                    "margin_audit: {}",
                    if audit.passed() { "pass" } else { "fail" }
                )?;
                ok &= audit.passed();
            }
            writeln!(out, "result: {}", if ok { "pass" } else { "fail" })?;
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Manifold { dim, samples, seed } => {
            for m in sample_manifold(dim, samples, seed)? {
                match m.delta() {
                    Some(delta) => writeln!(out, "point: {} delta: {delta}", m.point())?,
                    None => writeln!(out, "point: {}", m.point())?,
                }
            }
            Ok(EXIT_OK)
        }
        Command::Bound { point, perm } => {
            let u = UnitPoint::parse(&point)?;
            let report = match perm {
                Some(p) => pointwise_bound(&u, &Perm::parse(&p, u.dim())?)?,
                None => universal_bound(&u),
            };
            writeln!(out, "point: {u}")?;
            for (k, v) in report.entries() {
                writeln!(out, "{k}: {}", format_exact(&v))?;
            }
            Ok(EXIT_OK)
        }
        Command::Surface {
            copula,
            perm,
            step,
            out: path,
        } => {
            let c = resolve(&copula)?;
            if c.dim() != 2 {
                return Err(Error::UnsupportedDimension {
                    dim: c.dim(),
                    reason: "surface export is two-dimensional only".into(),
                }
                .into());
            }
            let p = Perm::parse(&perm, 2)?;
            let h = parse_step(&step)?;
            if *h.numer() != 1 {
                return Err(Error::InvalidStep {
                    step,
                    reason: "step must be 1/m".into(),
                }
                .into());
            }
            let text = surface_csv(&c, &p, *h.denom())?;
            match path {
                Some(path) => fs::write(path, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Validate { file } => {
            let s = ShuffleStructure::from_json(&fs::read_to_string(file)?)?;
            let report = s.validate();
            writeln!(out, "dim: {}", s.dim)?;
            writeln!(out, "cells: {}", s.cells.len())?;
            for (name, check) in report.entries() {
                writeln!(out, "{name}: {check}")?;
            }
            let ok = report.passed();
            writeln!(out, "result: {}", if ok { "pass" } else { "fail" })?;
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

fn surface_csv(c: &CopulaTerm, p: &Perm, m: i128) -> crate::Result<String> {
    let mut text = String::from("u1,u2,C(u),C(u_pi),diff\n");
    for i in 0..=m {
        for j in 0..=m {
            let u = UnitPoint::new(vec![ratio(i, m), ratio(j, m)])?;
            let up = p.apply(&u)?;
            let (a, b) = (c.evaluate(&u)?, c.evaluate(&up)?);
            let row =
                [u.coords()[0], u.coords()[1], a, b, (a - b).abs()].map(|x| format_table_cell(&x));
            text.push_str(&row.join(","));
            text.push('\n');
        }
    }
    Ok(text)
}

fn parse_step(s: &str) -> crate::Result<Rational> {
    let h = parse_lenient(s)?;
    if !h.is_positive() || h > Rational::from_integer(1) {
        return Err(Error::InvalidStep {
            step: s.into(),
            reason: "step must lie in (0, 1]".into(),
        });
    }
    Ok(h)
}

fn point_for(c: &CopulaTerm, s: &str) -> crate::Result<UnitPoint> {
    let u = UnitPoint::parse(s)?;
    if u.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            actual: u.dim(),
        });
    }
    Ok(u)
}

/// Builds the copula selected by the arguments.
pub fn resolve(args: &CopulaArgs) -> crate::Result<CopulaTerm> {
    let base = match args.base {
        Base::Min => BaseCopula::Min,
        Base::Independence => BaseCopula::Independence,
    };
    let term = if let Some(path) = &args.file {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let s = ShuffleStructure::from_json(&text)?;
        if let Some(d) = args.dim {
            if d != s.dim {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: s.dim,
                });
            }
        }
        CopulaTerm::shuffle(s.into_validated()?)
    } else {
        let family = args
            .copula
            .or(args.delta.as_ref().map(|_| Family::Manifold))
            .ok_or_else(|| Error::Parse("one of --copula or --file is required".into()))?;
        let d = args
            .dim
            .ok_or_else(|| Error::Parse("--dim is required with --copula".into()))?;
        match family {
            Family::Mdim => CopulaTerm::upper(d)?,
            Family::W => CopulaTerm::lower(d)?,
            Family::Independence => CopulaTerm::independence(d)?,
            Family::Cstar => CopulaTerm::c_star(d)?,
            Family::Manifold => {
                if d % 2 != 0 {
                    return Err(Error::UnsupportedDimension {
                        dim: d,
                        reason: "the manifold family needs an even dimension".into(),
                    });
                }
                let delta = match &args.delta {
                    Some(s) => {
                        let values = s
                            .split(',')
                            .map(parse_lenient)
                            .collect::<crate::Result<Vec<_>>>()?;
                        DeltaVector::new(d, values)?
                    }
                    None => DeltaVector::canonical(d)?,
                };
                CopulaTerm::shuffle(build_manifold_structure(&delta, base)?)
            }
        }
    };
    match &args.relabel {
        Some(p) => {
            let perm = Perm::parse(p, term.dim())?;
            CopulaTerm::permuted(term, perm)
        }
        None => Ok(term),
    }
}
