use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use cr_atlas::complex_core::{herm_form, quadric_residual};
use cr_atlas::covers::{alpha_of_base, count_sheets, sample_total_space, CoverId};
use cr_atlas::hypersurfaces::{sample_point, SurfaceId};
use cr_atlas::report::Envelope;
use cr_atlas::rossi_maps::{classify_q_minus, MapId};
use cr_atlas::verify::run_suite;
use cr_atlas::{Error, FormSignature, Point, Tolerance, SCHEMA};

#[derive(Parser)]
#[command(name = "cr-atlas", version, about = "Evaluate, classify, sample and verify the covering maps")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// RNG seed for sampling and verification.
    #[arg(long, global = true, env = "CR_ATLAS_SEED", default_value_t = 0)]
    seed: u64,
    /// Samples per verification check.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    abs_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Also write the JSON document to FILE.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compact single-line JSON instead of pretty-printed.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply a map pipeline to a point, e.g. eval 'PsiNu∘PhiMinus' '[[0.8,0],[0,0]]'.
    Eval {
        /// Pipeline: stages joined by ∘ or a JSON array, applied right to left.
        pipeline: String,
        /// Point as JSON: [[re,im],[re,im]] for ℂ², three pairs for ℂ³.
        point: String,
    },
    /// Run a verification suite.
    Verify {
        /// equivariance, homomorphism, orbits, regions, frames, decks, auts, levi, sheets or all.
        suite: String,
    },
    /// Count the sheets of a cover over a base point.
    Sheets {
        /// chi, mu, nu or eta.
        family: String,
        /// Sheet index, or inf.
        index: String,
        #[arg(long)]
        alpha: Option<f64>,
        /// Base point as JSON; sampled from the base surface when omitted.
        #[arg(long)]
        base: Option<String>,
        /// A known fiber point as JSON.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Locate a point of Q₋ in the orbit decomposition.
    Classify { point: String },
    /// Draw random points of a surface or of a cover's total space.
    Sample {
        /// Surface family (s3, lens, sigma, sigma_plus, epsilon, omega, delta,
        /// nu, tau, xi, chi, rho, mu, eta), a JSON surface descriptor, or a
        /// cover such as nu(3).
        target: String,
        #[arg(long)]
        alpha: Option<f64>,
        /// Order of the lens space.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
}

enum Outcome {
    Pass(Value),
    Fail(Value),
}

fn parse_point(s: &str) -> Result<Point, Error> {
    serde_json::from_str(s).map_err(|e| Error::Descriptor(format!("bad point '{s}': {e}")))
}

fn parse_pipeline(s: &str) -> Result<MapId, Error> {
    let t = s.trim();
    if t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| Error::Descriptor(format!("bad pipeline '{s}': {e}")))
    } else {
        t.parse()
    }
}

/// The stage applied last.
fn outer(m: &MapId) -> &MapId {
    match m {
        MapId::Composite(v) if !v.is_empty() => outer(&v[0]),
        _ => m,
    }
}

fn residuals(stage: &MapId, p: &Point, tol: &Tolerance) -> Result<Value, Error> {
    let mut r = serde_json::Map::new();
    if let Point::C3(z) = p {
        r.insert("q_plus".into(), json!(quadric_residual(FormSignature::Plus, *z).norm()));
        r.insert("q_minus".into(), json!(quadric_residual(FormSignature::Minus, *z).norm()));
        r.insert("norm_plus".into(), json!(herm_form(FormSignature::Plus, *z, *z).re));
        r.insert("norm_minus".into(), json!(herm_form(FormSignature::Minus, *z, *z).re));
    }
    let surface = match stage {
        MapId::PsiNu => Some((CoverId::NuN(2), "nu")),
        MapId::PsiEta => Some((CoverId::Eta2N(2), "eta")),
        MapId::PsiMu => Some((CoverId::Mu4, "mu")),
        MapId::PhiChi | MapId::PhiChiN(_) => Some((CoverId::ChiInf, "chi")),
        _ => None,
    };
    if let Some((cover, name)) = surface {
        let alpha = alpha_of_base(cover, p)?;
        let s = cover.base(alpha.unwrap_or(0.0))?;
        let m = s.membership(p, tol)?;
        r.insert("surface".into(), json!({"family": name, "alpha": alpha, "membership": m}));
    }
    Ok(Value::Object(r))
}

fn surface_from(target: &str, alpha: Option<f64>, m: Option<u32>) -> Result<SurfaceId, Error> {
    if target.trim_start().starts_with('{') {
        return serde_json::from_str(target).map_err(|e| Error::Descriptor(format!("bad surface '{target}': {e}")));
    }
    let need = || alpha.ok_or_else(|| Error::Descriptor(format!("{target} needs --alpha")));
    let s = match target {
        "s3" => SurfaceId::S3,
        "lens" => SurfaceId::Lens { m: m.ok_or_else(|| Error::Descriptor("lens needs --m".into()))? },
        "sigma" => SurfaceId::Sigma,
        "sigma_plus" => SurfaceId::SigmaPlus,
        "epsilon" => SurfaceId::Epsilon { alpha: need()? },
        "omega" => SurfaceId::Omega,
        "delta" => SurfaceId::Delta,
        "nu" => SurfaceId::Nu { alpha: need()? },
        "tau" => SurfaceId::Tau { alpha: need()? },
        "xi" => SurfaceId::Xi,
        "chi" => SurfaceId::Chi,
        "rho" => SurfaceId::Rho { alpha: need()? },
        "mu" => SurfaceId::Mu { alpha: need()? },
        "eta" => SurfaceId::Eta { alpha: need()? },
        _ => return Err(Error::Descriptor(format!("unknown surface '{target}'"))),
    };
    s.validate()?;
    Ok(s)
}

fn cover_from(family: &str, index: &str) -> Result<CoverId, Error> {
    let c: CoverId = format!("{family}({index})").parse()?;
    c.validate()?;
    Ok(c)
}

fn rng(tol: &Tolerance) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(tol.seed)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

fn run(cmd: &Cmd, tol: &Tolerance) -> Result<Outcome, Error> {
    match cmd {
        Cmd::Eval { pipeline, point } => {
            let map = parse_pipeline(pipeline)?;
            let p = parse_point(point)?;
            let img = map.apply(&p, tol)?;
            Ok(Outcome::Pass(json!({
                "pipeline": map,
                "input": p,
                "output": img,
                "residuals": residuals(outer(&map), &img, tol)?,
            })))
        }
        Cmd::Verify { suite } => {
            let rep = run_suite(suite.parse()?, tol)?;
            let v = to_value(&rep);
            Ok(if rep.passed { Outcome::Pass(v) } else { Outcome::Fail(v) })
        }
        Cmd::Sheets { family, index, alpha, base, witness } => {
            let cover = cover_from(family, index)?;
            let base = match base {
                Some(b) => parse_point(b)?,
                None => {
                    let a = if cover.has_alpha() {
                        alpha.ok_or_else(|| Error::Descriptor(format!("{cover} needs --alpha")))?
                    } else {
                        0.0
                    };
                    sample_point(&cover.base(a)?, &mut rng(tol), tol)?
                }
            };
            let witness = witness.as_deref().map(parse_point).transpose()?;
            Ok(Outcome::Pass(to_value(&count_sheets(cover, &base, witness.as_ref(), tol)?)))
        }
        Cmd::Classify { point } => {
            let z = parse_point(point)?.as_c3()?;
            Ok(Outcome::Pass(to_value(&classify_q_minus(z, tol)?)))
        }
        Cmd::Sample { target, alpha, m, count } => {
            let mut r = rng(tol);
            if target.contains('(') {
                let cover: CoverId = target.parse()?;
                let a = if cover.has_alpha() {
                    alpha.ok_or_else(|| Error::Descriptor(format!("{cover} needs --alpha")))?
                } else {
                    0.0
                };
                let pts = (0..*count)
                    .map(|_| sample_total_space(cover, a, &mut r))
                    .collect::<Result<Vec<_>, _>>()?;
                return Ok(Outcome::Pass(json!({"cover": cover, "alpha": alpha, "points": pts})));
            }
            let s = surface_from(target, *alpha, *m)?;
            let pts = (0..*count)
                .map(|_| {
                    let p = sample_point(&s, &mut r, tol)?;
                    let mem = s.membership(&p, tol)?;
                    Ok(json!({"point": p, "membership": mem}))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Outcome::Pass(json!({"surface": s, "points": pts})))
        }
    }
}

fn name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Eval { .. } => "eval",
        Cmd::Verify { .. } => "verify",
        Cmd::Sheets { .. } => "sheets",
        Cmd::Classify { .. } => "classify",
        Cmd::Sample { .. } => "sample",
    }
}

fn emit(doc: &Value, opts: &Opts) -> std::io::Result<()> {
    let mut s = if opts.json {
        serde_json::to_string(doc)?
    } else {
        serde_json::to_string_pretty(doc)?
    };
    s.push('\n');
    print!("{s}");
    if let Some(path) = &opts.out {
        std::fs::write(path, &s)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = &cli.opts;
    let tol = match Tolerance::new(o.abs_tol, o.rel_tol, o.seed, o.samples) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let command = name(&cli.cmd);
    let (doc, code) = match run(&cli.cmd, &tol) {
        Ok(Outcome::Pass(v)) => (to_value(&Envelope::new(command, &tol, v)), 0),
        Ok(Outcome::Fail(v)) => (to_value(&Envelope::new(command, &tol, v)), 1),
        Err(e) => {
            eprintln!("error: {e}");
            let code = if matches!(e, Error::ContinuationFailed(_)) { 1 } else { 2 };
            (json!({"schema": SCHEMA, "command": command, "seed": tol.seed, "error": e.to_string()}), code)
        }
    };
    if let Err(e) = emit(&doc, o) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
