use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use steklov::boundary_model::{BoundaryComponent, PeriodicFn, SurfaceBoundary};
use steklov::dn_map::{
    steklov_coeffs_closed, steklov_coeffs_via_nf, surface_spectrum_asymptotic, ComponentCoeffs,
};
use steklov::model_oracles::{ab_disk_spectrum, cylinder_spectrum, CylinderModel, DiskFluxModel};
use steklov::progressions::{almost_equal_with, classify_vs_single, cover_report, GenMultiset, UnitRelation};
use steklov::recovery::{
    match_close, recover_multi_with, recover_single_with, MatchSchedule, MultiConfig, RecoverConfig,
};
use steklov::spectrum::fmt_sig;
use steklov::{Error, SpectrumSeq};

const SCHEMAS: &str = "\
File formats:
  boundary JSON   {\"components\": [{\"g11\": F, \"h1\": F, \"w1\": F, \"q\": F}, ...], \"meta\": {...}}
                  F = {\"n_min\": -d, \"re\": [...], \"im\": [...]}: Fourier coefficients f_n for
                  n = n_min..n_min+len-1 of a real function of x ∈ [0, 2π)
  spectrum CSV    header index,value,component; one eigenvalue per row
  multiset JSON   [{\"a\": \"3/2\", \"b\": \"1/4\", \"unit\": \"u\"}, ...]; a > 0, b rational as p, p/q or
                  decimal; unit optional (absent: plain rationals)
  relations JSON  [{\"unit\": \"u\", \"base\": \"1\", \"scale\": \"1/2\", \"shift\": \"0\"}, ...]
                  x_u = scale·x_base, y_u = y_base + shift·x_base; base \"1\" is the rationals

Errors are printed to stderr as one JSON line {\"error\": kind, \"message\": text}.";

#[derive(Parser)]
#[command(name = "steklov", version, about = "Magnetic Steklov asymptotics, inverse recovery and arithmetic-progression decisions", after_help = SCHEMAS)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// write the main output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// boundary JSON → truncated merged spectrum CSV (coefficients with --coeffs)
    Forward {
        boundary: PathBuf,
        /// ladder indices 1..=N on each side
        #[arg(long, default_value_t = 100)]
        nrange: i64,
        /// use the normal-form engine to this depth instead of the closed forms b0..b2
        #[arg(long)]
        depth: Option<usize>,
        /// write the coefficient table as JSON here
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
    /// boundary JSON → b_k table with closed-form and engine columns
    Coeffs {
        boundary: PathBuf,
        #[arg(long, default_value_t = 5)]
        depth: usize,
    },
    /// spectrum CSV → boundary invariants JSON, one line per component label; exit 3 when ambiguous,
    /// degenerate or split-degenerate, 4 on model mismatch
    Recover {
        spectrum: PathBuf,
        /// fit a merge of up to this many components instead of a single one
        #[arg(long)]
        multi: Option<usize>,
        /// relative residual tolerance
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// keep only rows with this component label
        #[arg(long)]
        component: Option<String>,
    },
    /// two multiset JSONs → almost-equality verdict JSON
    Apdecide {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        relations: Option<PathBuf>,
    },
    /// multiset JSON of integer pairs → covering-system report
    Cover { multiset: PathBuf },
    /// families of k2 progressions agreeing a.e. with ℕ ± β
    Classify {
        #[arg(long, default_value_t = 3)]
        k2: usize,
    },
    /// two spectrum CSVs → close-matching report JSON
    Match {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 8)]
        windows: usize,
        #[arg(long, default_value_t = 50)]
        max_head: usize,
    },
    /// model spectra and random boundaries
    #[command(subcommand)]
    Oracle(Oracle),
}

#[derive(Subcommand)]
enum Oracle {
    /// flat cylinder [0, L] × circle with flux beta → spectrum CSV
    Cylinder {
        #[arg(long = "L")]
        l: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 50)]
        kmax: i64,
    },
    /// unit disk with an Aharonov–Bohm flux beta → spectrum CSV
    Abdisk {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 50)]
        kmax: i64,
    },
    /// random trig-polynomial boundary JSON for property runs
    Boundary(RandomBoundary),
}

#[derive(Args)]
struct RandomBoundary {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    components: usize,
    /// Fourier bandwidth of every coefficient function
    #[arg(long, default_value_t = 4)]
    bandwidth: usize,
}

struct Failure {
    err: Error,
    code: u8,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = if matches!(err, Error::ModelMismatch(_)) { 4 } else { 1 };
        Failure { err, code }
    }
}

type Outcome = std::result::Result<(String, u8), Failure>;

fn read(p: &Path) -> Result<String, Error> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn read_spectrum(p: &Path) -> Result<SpectrumSeq<f64>, Error> {
    SpectrumSeq::from_csv_str(&read(p)?)
}

fn read_boundary(p: &Path) -> Result<SurfaceBoundary<f64>, Error> {
    SurfaceBoundary::from_json_str(&read(p)?)
}

/// floats rounded to 12 significant digits
fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            json!(fmt_sig(x).parse::<f64>().unwrap())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        v => v,
    }
}

fn to_text(v: Value) -> String {
    let mut s = serde_json::to_string(&round_numbers(v)).unwrap();
    s.push('\n');
    s
}

fn coeff_json(j: usize, c: &ComponentCoeffs<f64>) -> Value {
    json!({
        "component": j,
        "length": c.length,
        "alpha": c.alpha,
        "p": c.p,
        "b_plus": c.b.iter().map(|b| b.0).collect::<Vec<_>>(),
        "b_minus": c.b.iter().map(|b| b.1).collect::<Vec<_>>(),
        "engine_only_from": c.engine_derived_from,
    })
}

/// mean `c0`, or uniform in [-1, 1) when None
fn random_fn(rng: &mut ChaCha8Rng, bandwidth: usize, c0: Option<f64>, amp: f64) -> PeriodicFn<f64> {
    let c0 = c0.unwrap_or_else(|| rng.random_range(-1.0..1.0));
    let cos: Vec<f64> = (0..bandwidth).map(|_| rng.random_range(-amp..amp)).collect();
    let sin: Vec<f64> = (0..bandwidth).map(|_| rng.random_range(-amp..amp)).collect();
    PeriodicFn::trig(c0, &cos, &sin)
}

fn run(cli: Cli) -> Outcome {
    let done = |s: String| Ok((s, 0));
    match cli.cmd {
        Cmd::Forward { boundary, nrange, depth, coeffs } => {
            let sb = read_boundary(&boundary)?;
            let cs: Vec<ComponentCoeffs<f64>> = sb
                .components
                .iter()
                .map(|c| match depth {
                    Some(d) => steklov_coeffs_via_nf(c, d),
                    None => steklov_coeffs_closed(c),
                })
                .collect::<Result<_, _>>()?;
            let k0 = cs[0].b.len();
            let spec = surface_spectrum_asymptotic(&cs, nrange, k0)?;
            if let Some(p) = coeffs {
                let table: Vec<Value> = cs.iter().enumerate().map(|(j, c)| coeff_json(j, c)).collect();
                fs::write(&p, to_text(json!(table))).map_err(|e| Error::Io(e.to_string()))?;
            }
            done(spec.to_csv_string())
        }
        Cmd::Coeffs { boundary, depth } => {
            let sb = read_boundary(&boundary)?;
            let mut out = String::from("component,k,closed_plus,closed_minus,engine_plus,engine_minus,engine_only\n");
            for (j, c) in sb.components.iter().enumerate() {
                let closed = steklov_coeffs_closed(c)?;
                let engine = steklov_coeffs_via_nf(c, depth)?;
                for (k, e) in engine.b.iter().enumerate() {
                    let (cp, cm) = closed.b.get(k).map_or((String::new(), String::new()), |b| (fmt_sig(b.0), fmt_sig(b.1)));
                    let only = k >= engine.engine_derived_from;
                    out.push_str(&format!("{j},{k},{cp},{cm},{},{},{only}\n", fmt_sig(e.0), fmt_sig(e.1)));
                }
            }
            done(out)
        }
        Cmd::Recover { spectrum, multi, tol, component } => {
            let mut s = read_spectrum(&spectrum)?;
            if let Some(label) = component {
                s = s.component(&label);
            }
            if let Some(m) = multi {
                let e = recover_multi_with(&s, m, &MultiConfig { tol, ..Default::default() })?;
                let code = if e.warnings.is_empty() { 0 } else { 3 };
                return Ok((to_text(e.to_json()), code));
            }
            // labelled input: one ladder per label, one JSON line each
            let mut labels: Vec<String> = Vec::new();
            for e in &s.entries {
                if !labels.contains(&e.component) {
                    labels.push(e.component.clone());
                }
            }
            let cfg = RecoverConfig { tol, ..Default::default() };
            let (mut out, mut code) = (String::new(), 0);
            for label in &labels {
                let part = if labels.len() > 1 { s.component(label) } else { s.clone() };
                let r = recover_single_with(&part, &cfg)?;
                if r.ambiguous || r.degenerate {
                    code = 3;
                }
                let mut v = r.to_json();
                v["component"] = json!(label);
                out.push_str(&to_text(v));
            }
            Ok((out, code))
        }
        Cmd::Apdecide { left, right, relations } => {
            let r1 = GenMultiset::from_json_str(&read(&left)?)?;
            let r2 = GenMultiset::from_json_str(&read(&right)?)?;
            let rels: Vec<UnitRelation> = match relations {
                Some(p) => serde_json::from_str(&read(&p)?).map_err(|e| Error::Parse(e.to_string()))?,
                None => Vec::new(),
            };
            done(to_text(almost_equal_with(&r1, &r2, &rels)?.to_json()))
        }
        Cmd::Cover { multiset } => {
            let r = GenMultiset::from_json_str(&read(&multiset)?)?;
            done(to_text(serde_json::to_value(cover_report(&r)?).unwrap()))
        }
        Cmd::Classify { k2 } => {
            let fams: Vec<Value> = classify_vs_single(k2)?.iter().map(|f| f.to_json()).collect();
            done(to_text(json!(fams)))
        }
        Cmd::Match { x, y, tol, windows, max_head } => {
            let (x, y) = (read_spectrum(&x)?, read_spectrum(&y)?);
            let r = match_close(&x, &y, &MatchSchedule { windows, tol, max_head })?;
            done(to_text(r.to_json()))
        }
        Cmd::Oracle(o) => match o {
            Oracle::Cylinder { l, beta, kmax } => {
                done(cylinder_spectrum(&CylinderModel::new(l, beta)?, kmax).to_csv_string())
            }
            Oracle::Abdisk { beta, kmax } => done(ab_disk_spectrum(&DiskFluxModel::new(beta)?, kmax).to_csv_string()),
            Oracle::Boundary(RandomBoundary { seed, components, bandwidth }) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // g11 = 1 + at most 0.4 in sup norm stays inside [0.5, 2]
                let amp = 0.2 / bandwidth.max(1) as f64;
                let comps = (0..components.max(1))
                    .map(|_| {
                        let g11 = random_fn(&mut rng, bandwidth, Some(1.0), amp);
                        let h1 = random_fn(&mut rng, bandwidth, None, 0.5);
                        let w1 = random_fn(&mut rng, bandwidth, None, 0.5);
                        let q = random_fn(&mut rng, bandwidth, None, 0.5);
                        BoundaryComponent::new(g11, h1, w1, q)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let mut sb = SurfaceBoundary::new(comps)?;
                sb.meta.insert("seed".into(), json!(seed));
                let mut s = sb.to_json_string();
                s.push('\n');
                done(s)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", json!({"error": "usage", "message": first}));
            return ExitCode::from(2);
        }
    };
    let out = cli.out.clone();
    match run(cli) {
        Ok((text, code)) => {
            let written = match &out {
                Some(p) => fs::write(p, &text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(code),
                Err(e) => report(Failure::from(e)),
            }
        }
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    eprintln!("{}", json!({"error": f.err.kind(), "message": f.err.to_string()}));
    ExitCode::from(f.code)
}
