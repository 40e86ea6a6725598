use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use stickel_core::basefield::{enumerate_places, FqConfig, Place};
use stickel_core::coeffrings::{PadicContext, PadicValue, WeilPolynomial};
use stickel_core::extensions::{Extension, ExtensionDescriptor};
use stickel_core::groupalg::Character;
use stickel_core::iwasawa::{char_ideal, twist_char_check, PresentationMatrix, TwistMap};
use stickel_core::lseries::{
    default_t, descent_compat, functional_eq_check, interpolation_check, lambda_twist_identity, p_adic_l,
    stickelberger, theta_plus, theta_series_with, theta_st, AbelianVarietyData, DirichletCharacter, ThetaOptions,
};
use stickel_core::splitting::{decompose_module, fv_unit_check, idempotents, EndoModel, FiniteFModule};
use stickel_core::verify::run_all;
use stickel_core::Error;

#[derive(Parser)]
#[command(name = "stickel", version, about = "Stickelberger series and p-adic L-functions over F_q(t)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON job configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// p-adic precision k (overrides the config).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Degree / T-degree cap N (overrides the config).
    #[arg(long = "degree-cap", global = true)]
    degree_cap: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for the randomized suites (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Artifact path; standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    Places,
    Theta,
    Stickelberger,
    ThetaPlus,
    Plfun,
    CheckInterpolation,
    CheckFunctionalEquation,
    CheckDescent,
    CheckTwistIdentity,
    CharIdeal,
    Split,
    VerifySuite,
}

type Tower = (Arc<FqConfig>, Extension, Vec<Place>, Vec<Place>);

/// Parsed configuration with explicit defaults.
struct Job {
    raw: Value,
    k: u32,
    n: usize,
    seed: u64,
}

enum Outcome {
    Pass(Value),
    Fail(Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("{}", json!({"error": e.to_string()}));
            return ExitCode::from(2);
        }
    }
    let result = load(&cli).and_then(|job| run(cli.command, &job));
    let (artifact, code) = match result {
        Ok(Outcome::Pass(v)) => (v, 0),
        Ok(Outcome::Fail(v)) => (v, 1),
        Err(e) => {
            let pointer = match &e {
                Error::Schema { pointer, .. } => Value::String(pointer.clone()),
                _ => Value::Null,
            };
            eprintln!("{}", json!({"error": e.to_string(), "pointer": pointer}));
            return ExitCode::from(2);
        }
    };
    let text = format!("{}\n", serde_json::to_string_pretty(&artifact).expect("serializable"));
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("{}", json!({"error": format!("cannot write artifact: {e}")}));
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn load(cli: &Cli) -> Result<Job, Error> {
    let raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::schema("", format!("malformed JSON: {e}")))?
        }
        None => json!({}),
    };
    if !raw.is_object() {
        return Err(Error::schema("", "configuration must be an object"));
    }
    let uint = |key: &str, default: u64| -> Result<u64, Error> {
        match raw.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().ok_or_else(|| Error::schema(format!("/{key}"), "expected a non-negative integer")),
        }
    };
    let k = cli.precision.map_or_else(|| uint("k", 16).map(|x| x as u32), Ok)?;
    let n = cli.degree_cap.map_or_else(|| uint("N", 16).map(|x| x as usize), Ok)?;
    let seed = cli.seed.map_or_else(|| uint("seed", 0), Ok)?;
    Ok(Job { raw, k, n, seed })
}

impl Job {
    fn get(&self, key: &str) -> Option<&Value> {
        self.raw.get(key)
    }

    fn require(&self, key: &str) -> Result<&Value, Error> {
        self.get(key).ok_or_else(|| Error::schema(format!("/{key}"), "missing field"))
    }

    fn cfg(&self) -> Result<Arc<FqConfig>, Error> {
        let q = match self.get("q") {
            None => 2,
            Some(v) => v.as_u64().ok_or_else(|| Error::schema("/q", "expected a prime power"))?,
        };
        match self.get("modulus") {
            None => FqConfig::from_q(q).map_err(|e| e.at("/q")),
            Some(m) => {
                let coeffs = m
                    .as_array()
                    .and_then(|a| a.iter().map(Value::as_u64).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| Error::schema("/modulus", "expected F_p coefficients, constant term first"))?;
                let p = stickel_core::basefield::prime_power(q).ok_or_else(|| Error::schema("/q", "not a prime power"))?.0;
                FqConfig::with_modulus(p, coeffs).map_err(|e| e.at("/modulus"))
            }
        }
    }

    fn extension(&self, cfg: &Arc<FqConfig>, key: &str) -> Result<Extension, Error> {
        let d = match self.get(key) {
            None => ExtensionDescriptor::trivial(),
            Some(v) => ExtensionDescriptor::from_json(cfg, v).map_err(|e| e.at(&format!("/{key}")))?,
        };
        Extension::new(cfg, &d).map_err(|e| e.at(&format!("/{key}")))
    }

    fn places(&self, cfg: &FqConfig, key: &str) -> Result<Option<Vec<Place>>, Error> {
        let Some(v) = self.get(key) else { return Ok(None) };
        let arr = v.as_array().ok_or_else(|| Error::schema(format!("/{key}"), "expected an array of places"))?;
        arr.iter()
            .enumerate()
            .map(|(i, x)| {
                let ptr = format!("/{key}/{i}");
                match x.as_str() {
                    Some("inf") | Some("infinity") => Ok(Place::infinity()),
                    Some(s) => Place::finite(cfg, cfg.parse_monic(s).map_err(|e| e.at(&ptr))?).map_err(|e| e.at(&ptr)),
                    None => cfg.place_from_json(x).map_err(|e| e.at(&ptr)),
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// `(ext, S, T)` for the commands built on `theta_st`.
    fn tower(&self) -> Result<Tower, Error> {
        let cfg = self.cfg()?;
        let ext = self.extension(&cfg, "descriptor")?;
        let s = self.places(&cfg, "S")?.unwrap_or_default();
        let t = match self.places(&cfg, "T")? {
            Some(t) => t,
            None => default_t(&ext, &s).map_err(|e| e.at("/S"))?,
        };
        Ok((cfg, ext, s, t))
    }

    fn variety(&self, cfg: &FqConfig) -> Result<AbelianVarietyData, Error> {
        let coeffs = self
            .require("weil")?
            .as_array()
            .and_then(|a| a.iter().map(Value::as_i64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| Error::schema("/weil", "expected integer coefficients, constant term first"))?;
        let h = WeilPolynomial::new(coeffs, cfg.q()).map_err(|e| e.at("/weil"))?;
        let ctx = PadicContext::base(cfg.p(), self.k).map_err(|e| e.at("/k"))?;
        AbelianVarietyData::new(h, &ctx).map_err(|e| e.at("/weil"))
    }

    fn character(&self, ext: &Extension) -> Result<Character, Error> {
        let g = ext.galois_group();
        let v = self.require("character")?;
        let exps = v
            .get("exps")
            .and_then(Value::as_array)
            .and_then(|a| a.iter().map(Value::as_u64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| Error::schema("/character/exps", "expected one exponent per generator"))?;
        let m = match v.get("m") {
            Some(m) => m.as_u64().ok_or_else(|| Error::schema("/character/m", "expected a positive integer"))?,
            None => g.orders().iter().fold(1, |acc, &o| lcm(acc, o)),
        };
        Character::new(g, m, exps).map_err(|e| e.at("/character"))
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

fn verdict(pass: bool, v: Value) -> Outcome {
    if pass {
        Outcome::Pass(v)
    } else {
        Outcome::Fail(v)
    }
}

fn run(cmd: Command, job: &Job) -> Result<Outcome, Error> {
    let (k, n) = (job.k, job.n);
    match cmd {
        Command::Places => {
            let cfg = job.cfg()?;
            let places = enumerate_places(&cfg, n)?;
            let mut counts = vec![0u64; n + 1];
            for v in &places {
                counts[v.degree] += 1;
            }
            Ok(Outcome::Pass(json!({
                "q": cfg.q(),
                "N": n,
                "places": places.iter().map(|v| json!({"place": cfg.place_label(v), "degree": v.degree})).collect::<Vec<_>>(),
                "counts": counts[1..].to_vec(),
            })))
        }
        Command::Theta => {
            let (cfg, ext, s, _) = job.tower()?;
            let opts = ThetaOptions {
                progress: Some(Arc::new(|d, count| eprintln!("degree {d}: {count} places"))),
                ..ThetaOptions::default()
            };
            let th = theta_series_with(&ext, &s, n, &opts)?;
            Ok(Outcome::Pass(json!({"descriptor": ext.descriptor().to_json(&cfg), "S": labels(&cfg, &s), "theta": th.to_json()})))
        }
        Command::Stickelberger => {
            let (cfg, ext, s, t) = job.tower()?;
            let ctx = PadicContext::base(cfg.p(), k).map_err(|e| e.at("/k"))?;
            let st = theta_st(&ext, &s, &t, n)?;
            let th = stickelberger(&ext, &s, &t, n, &ctx)?;
            let coeffs: Vec<Value> = th.coeffs().iter().map(|c| c.base_value().map_or_else(|| c.to_json(), |x| json!(x))).collect();
            Ok(Outcome::Pass(json!({
                "S": labels(&cfg, &s),
                "T": labels(&cfg, &t),
                "k": k,
                "group": ext.galois_group().to_json(),
                "theta": if coeffs.len() == 1 { coeffs[0].clone() } else { Value::Array(coeffs) },
                "theta_ST": st.to_json(),
            })))
        }
        Command::ThetaPlus | Command::Plfun => {
            let (cfg, ext, s, t) = job.tower()?;
            let a = job.variety(&cfg)?;
            let x = if cmd == Command::ThetaPlus { theta_plus(&ext, &s, &t, &a, n)? } else { p_adic_l(&ext, &s, &t, &a, n)? };
            let key = if cmd == Command::ThetaPlus { "theta_plus" } else { "L" };
            Ok(Outcome::Pass(json!({"S": labels(&cfg, &s), "T": labels(&cfg, &t), "variety": a.to_json(), key: x.to_json()})))
        }
        Command::CheckInterpolation => {
            let (cfg, ext, s, t) = job.tower()?;
            let a = job.variety(&cfg)?;
            let omega = job.character(&ext)?;
            let rep = interpolation_check(&ext, &s, &t, &a, &omega, n)?;
            Ok(verdict(rep.pass(), json!({"character": omega.to_json(), "report": rep.to_json(), "pass": rep.pass()})))
        }
        Command::CheckFunctionalEquation => {
            let cfg = job.cfg()?;
            let ext = job.extension(&cfg, "descriptor")?;
            let omega = job.character(&ext)?;
            let chi = DirichletCharacter::from_extension(&ext, &omega)?.primitive()?;
            let rep = functional_eq_check(&chi)?;
            Ok(verdict(rep.pass(), json!({"character": chi.to_json(), "report": rep.to_json(), "pass": rep.pass()})))
        }
        Command::CheckDescent => {
            let (cfg, ext, s, t) = job.tower()?;
            let target = job.extension(&cfg, "target")?;
            let a = job.variety(&cfg)?;
            let rep = descent_compat(&ext, &target, &s, &t, &a, n)?;
            Ok(verdict(rep.pass(), rep.to_json(&target)))
        }
        Command::CheckTwistIdentity => {
            let (cfg, ext, s, t) = job.tower()?;
            let h = match ext.descriptor() {
                ExtensionDescriptor::Tilde { h_order, .. } => *h_order,
                _ => return Err(Error::schema("/descriptor/kind", "check-twist-identity needs a tilde descriptor")),
            };
            let p = cfg.p();
            let mut f = 1;
            while (p.pow(f as u32) - 1) % h != 0 {
                f += 1;
            }
            let ctx = PadicContext::unramified(p, k, f, 0)?;
            let zeta = ctx.root_of_unity(h)?;
            let ints = |key: &str| -> Result<Vec<i64>, Error> {
                match job.get(key) {
                    None => Ok(vec![]),
                    Some(v) => v
                        .as_array()
                        .and_then(|a| a.iter().map(Value::as_i64).collect::<Option<Vec<_>>>())
                        .ok_or_else(|| Error::schema(format!("/{key}"), "expected an array of integers")),
                }
            };
            let lam: Vec<PadicValue> = ints("lambda")?.into_iter().map(|x| PadicValue::from_i64(&ctx, x)).collect();
            let psi_exps = ints("psi")?;
            let psi: Vec<PadicValue> = if psi_exps.is_empty() { vec![zeta.clone()] } else { psi_exps.iter().map(|&e| zeta.pow(e.rem_euclid(h as i64) as u64)).collect() };
            let alpha_inv = match job.get("alpha_inv") {
                Some(v) => {
                    let a = v.get("int").and_then(Value::as_i64).unwrap_or(1);
                    let z = v.get("zeta").and_then(Value::as_i64).unwrap_or(0);
                    PadicValue::from_i64(&ctx, a).mul(&zeta.pow(z.rem_euclid(h as i64) as u64))
                }
                None => lam.first().map_or_else(|| psi[0].clone(), |l| l.mul(&psi[0])),
            };
            let rep = lambda_twist_identity(&ext, &s, &t, &lam, &psi, &alpha_inv, n)?;
            Ok(verdict(rep.pass(), json!({"S": labels(&cfg, &s), "report": rep.to_json(), "pass": rep.pass()})))
        }
        Command::CharIdeal => {
            let m = PresentationMatrix::from_json(job.require("matrix")?).map_err(|e| e.at("/matrix"))?;
            let c = char_ideal(&m)?;
            let mut out = Map::new();
            out.insert("char_ideal".into(), c.to_json());
            let mut pass = true;
            if let Some(tw) = job.get("twist") {
                let map = match (tw.as_str(), tw.get("star").and_then(Value::as_i64)) {
                    (Some("sharp"), _) => TwistMap::Sharp,
                    (_, Some(c)) => TwistMap::Star(c as i128),
                    _ => return Err(Error::schema("/twist", "expected \"sharp\" or {\"star\": c}")),
                };
                let chk = twist_char_check(&m, map)?;
                pass = chk.pass;
                out.insert("twist_check".into(), json!({"lhs": chk.lhs.to_json(), "rhs": chk.rhs.to_json(), "pass": chk.pass}));
            }
            Ok(verdict(pass, Value::Object(out)))
        }
        Command::Split => {
            let mut model = EndoModel::from_json(job.require("model")?).map_err(|e| e.at("/model"))?;
            if job.get("dual").and_then(Value::as_bool).unwrap_or(false) {
                model = model.dual_swap();
            }
            let id = idempotents(&model)?;
            let m_max = job.get("m_max").and_then(Value::as_u64).unwrap_or(20) as u32;
            let fv: Vec<bool> = (1..=m_max).map(|m| fv_unit_check(&model, m)).collect();
            let mut pass = id.routes_agree && fv.iter().all(|&b| b);
            let mut out = json!({
                "model": model.to_json(),
                "e_F": id.e_f.to_json(),
                "e_V": id.e_v.to_json(),
                "iteration_exponent": id.iteration_exponent.to_string(),
                "routes_agree": id.routes_agree,
                "fv_units": fv,
            });
            if let Some(w) = job.get("module") {
                let w = FiniteFModule::from_json(model.p(), w).map_err(|e| e.at("/module"))?;
                let d = decompose_module(&w, &model)?;
                pass &= d.pass();
                out["decomposition"] = d.to_json();
            }
            out["pass"] = json!(pass);
            Ok(verdict(pass, out))
        }
        Command::VerifySuite => {
            let results = run_all(job.seed);
            for r in &results {
                eprintln!("{}", r.line());
            }
            let pass = results.iter().all(|r| r.pass);
            Ok(verdict(pass, json!({"seed": job.seed, "criteria": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(), "pass": pass})))
        }
    }
}

fn labels(cfg: &FqConfig, s: &[Place]) -> Vec<String> {
    s.iter().map(|v| cfg.place_label(v)).collect()
}
