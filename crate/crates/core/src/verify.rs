//! The twelve acceptance properties, shared by the `acceptance` test target
//! and `stickel verify-suite`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::basefield::{irreducible_count, irreducibles_by_degree, FqConfig, Place};
use crate::coeffrings::{PadicContext, PadicValue, WeilPolynomial};
use crate::error::{Error, Result};
use crate::extensions::{Extension, ExtensionDescriptor};
use crate::groupalg::{Character, FinAbGroup, GroupRingElt};
use crate::iwasawa::{twist_char_check, LambdaSeries, PresentationMatrix, TwistMap};
use crate::lseries::{
    default_t, descent_compat, f_t_series, functional_eq_check, interpolation_check, lambda_twist_identity, stickelberger,
    theta_series, theta_st, AbelianVarietyData, DirichletCharacter,
};
use crate::splitting::{decompose_module, fv_unit_check, idempotents, random_model_module, EndoModel, FiniteFModule};

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} ({:.3}s / {}s) {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }

    /// Timing is left out so that the artifact is reproducible.
    pub fn to_json(&self) -> Value {
        json!({"id": self.id, "name": self.name, "pass": self.pass, "detail": self.detail, "budget_s": self.budget.as_secs()})
    }
}

type Check = fn(u64) -> Result<(bool, String)>;

const CRITERIA: [(u32, &str, u64, Check); 12] = [
    (1, "place counts", 1, c1_place_counts),
    (2, "closed-form theta", 1, c2_closed_form),
    (3, "stabilization", 5, c3_stabilization),
    (4, "level compatibility", 5, c4_level_compat),
    (5, "interpolation", 10, c5_interpolation),
    (6, "functional equation", 5, c6_functional_eq),
    (7, "descent projection", 30, c7_descent),
    (8, "twist of characteristic ideals", 10, c8_twisted_char_ideals),
    (9, "lambda/psi twist identity", 5, c9_twist_identity),
    (10, "splitting", 10, c10_splitting),
    (11, "unit criterion", 1, c11_units),
    (12, "nonvanishing", 5, c12_nonvanishing),
];

pub fn criterion_ids() -> Vec<u32> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs one criterion; errors and overruns count as failures.
pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionResult> {
    let &(id, name, budget, check) =
        CRITERIA.iter().find(|c| c.0 == id).ok_or_else(|| Error::InvalidInput(format!("no criterion {id}")))?;
    let budget = Duration::from_secs(budget);
    let start = Instant::now();
    let (ok, detail) = match check(seed) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let (pass, detail) = if ok && elapsed > budget { (false, format!("{detail}; over time budget")) } else { (ok, detail) };
    Ok(CriterionResult { id, name, pass, detail, elapsed, budget })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    criterion_ids().into_iter().map(|id| run_criterion(id, seed).expect("known id")).collect()
}

fn place(cfg: &FqConfig, s: &str) -> Result<Place> {
    Place::finite(cfg, cfg.parse_monic(s)?)
}

fn carlitz(cfg: &Arc<FqConfig>, level: u32) -> Result<Extension> {
    Extension::new(cfg, &ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t")?, level })
}

fn elliptic(k: u32) -> Result<AbelianVarietyData> {
    AbelianVarietyData::new(WeilPolynomial::new(vec![2, -1, 1], 2)?, &PadicContext::base(2, k)?)
}

fn c1_place_counts(_: u64) -> Result<(bool, String)> {
    let mut checked = 0;
    for q in [2u64, 3, 4] {
        let cfg = FqConfig::from_q(q)?;
        let irr = irreducibles_by_degree(&cfg, 10)?;
        for (d, list) in irr.iter().enumerate().skip(1) {
            if list.len() as u64 != irreducible_count(q, d as u64) {
                return Ok((false, format!("q={q} degree {d}: {} enumerated", list.len())));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} (q, degree) pairs")))
}

fn c2_closed_form(_: u64) -> Result<(bool, String)> {
    let cfg = FqConfig::from_q(2)?;
    let e = Extension::new(&cfg, &ExtensionDescriptor::trivial())?;
    let th = theta_series(&e, &[], 17)?;
    for j in 0..=16 {
        if th.coeff(j).coeffs()[0] != 1i128 << j {
            return Ok((false, format!("coefficient of u^{j}")));
        }
    }
    let t = default_t(&e, &[])?;
    for k in 1..=32 {
        let ctx = PadicContext::base(2, k)?;
        let th = stickelberger(&e, &[], &t, 16, &ctx)?;
        if th.coeffs()[0] != PadicValue::from_i64(&ctx, -1) {
            return Ok((false, format!("theta mod 2^{k}")));
        }
    }
    Ok((true, "2^j for j <= 16, theta = -1 for k <= 32".into()))
}

fn c3_stabilization(_: u64) -> Result<(bool, String)> {
    let mut out = Vec::new();
    for (q, level) in [(2u64, 3u32), (3, 2)] {
        let cfg = FqConfig::from_q(q)?;
        let e = carlitz(&cfg, level)?;
        let s = vec![place(&cfg, "t")?];
        let t = default_t(&e, &s)?;
        let st = theta_st(&e, &s, &t, 16)?;
        // recompute the product at the full cap and inspect the tail
        let full = theta_series(&e, &s, 16)?.mul(&f_t_series(&e, &t, 16)?);
        let tail_zero = (st.degree + 1..=full.cap()).all(|j| full.coeff(j).is_zero());
        if !tail_zero {
            return Ok((false, format!("q={q}: nonzero coefficient past degree {}", st.degree)));
        }
        out.push(format!("q={q}: D={}", st.degree));
    }
    Ok((true, out.join(", ")))
}

fn c4_level_compat(_: u64) -> Result<(bool, String)> {
    let cfg = FqConfig::from_q(2)?;
    let s = vec![place(&cfg, "t")?];
    let exts = (1..=3).map(|m| carlitz(&cfg, m)).collect::<Result<Vec<_>>>()?;
    let th = exts.iter().map(|e| theta_series(e, &s, 13)).collect::<Result<Vec<_>>>()?;
    for (hi, lo) in [(2usize, 1usize), (1, 0), (2, 0)] {
        let pi = exts[hi].quotient_map(&exts[lo])?;
        if th[hi].project_level(&pi)? != th[lo] {
            return Ok((false, format!("level {} -> {}", hi + 1, lo + 1)));
        }
    }
    Ok((true, "levels 3 -> 2 -> 1, 13 coefficients".into()))
}

fn c5_interpolation(_: u64) -> Result<(bool, String)> {
    let cfg = FqConfig::from_q(2)?;
    let e = carlitz(&cfg, 3)?;
    let s = vec![place(&cfg, "t")?];
    let t = default_t(&e, &s)?;
    // two extra digits absorb the non-unit denominators
    let a = elliptic(14)?;
    let mut notes = Vec::new();
    for ex in [2u64, 1, 3] {
        let omega = Character::new(e.galois_group(), 4, vec![ex])?;
        let rep = interpolation_check(&e, &s, &t, &a, &omega, 16)?;
        if !rep.pass() {
            return Ok((false, format!("omega exponent {ex}: {}", rep.to_json())));
        }
        let prec = rep.comparisons.iter().map(|c| c.precision).min().unwrap_or(0);
        if prec < 12 {
            return Ok((false, format!("omega exponent {ex}: only 2^{prec} of precision")));
        }
        notes.push(format!("order {} ok (min precision 2^{prec})", omega.order()));
    }
    Ok((true, notes.join(", ")))
}

fn c6_functional_eq(_: u64) -> Result<(bool, String)> {
    let mut n = 0;
    for (q, level, m) in [(2u64, 3u32, 4u64), (3, 2, 3)] {
        let cfg = FqConfig::from_q(q)?;
        let e = carlitz(&cfg, level)?;
        for ex in 1..m {
            let omega = Character::new(e.galois_group(), m, vec![ex])?;
            let chi = DirichletCharacter::from_extension(&e, &omega)?.primitive()?;
            let rep = functional_eq_check(&chi)?;
            if !rep.pass() {
                return Ok((false, format!("q={q} exponent {ex}: {}", rep.to_json())));
            }
            n += 1;
        }
    }
    Ok((true, format!("{n} primitive characters")))
}

fn c7_descent(_: u64) -> Result<(bool, String)> {
    let cfg = FqConfig::from_q(2)?;
    let car = ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t")?, level: 3 };
    let prod = ExtensionDescriptor::Product { left: Box::new(car.clone()), right: Box::new(ExtensionDescriptor::Constant { n: 2 }) };
    let m = Extension::new(&cfg, &prod)?;
    let mp = Extension::new(&cfg, &car)?;
    let s = vec![place(&cfg, "t")?];
    let t = default_t(&m, &s)?;
    let rep = descent_compat(&m, &mp, &s, &t, &elliptic(10)?, 16)?;
    let ok = rep.projection_ok && rep.vartheta_ok == Some(true);
    Ok((ok, format!("projection {}, vartheta {:?}", rep.projection_ok, rep.vartheta_ok)))
}

fn random_series<G: Rng>(rng: &mut G, p: u64, k: u32, n: usize) -> Result<LambdaSeries> {
    let m = (p as i128).pow(k);
    let len = rng.gen_range(1..=4);
    let c: Vec<i128> = (0..len).map(|_| rng.gen_range(0..m)).collect();
    LambdaSeries::new(p, k, n, &c)
}

fn c8_twisted_char_ideals(seed: u64) -> Result<(bool, String)> {
    let (p, k, n) = (3u64, 8u32, 20usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resampled = 0;
    for alpha in [TwistMap::Sharp, TwistMap::Star(1 + p as i128)] {
        let mut done = 0;
        while done < 200 {
            let rows = (0..2)
                .map(|_| (0..2).map(|_| random_series(&mut rng, p, k, n)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let pm = PresentationMatrix::new(rows)?;
            match twist_char_check(&pm, alpha) {
                Ok(c) if c.pass => done += 1,
                Ok(c) => return Ok((false, format!("{:?}: {} vs {}", alpha, c.lhs.to_json(), c.rhs.to_json()))),
                Err(Error::ZeroInput) | Err(Error::PrecisionExhausted(_)) => resampled += 1,
                Err(e) => return Err(e),
            }
            if resampled > 1000 {
                return Ok((false, "too many resamples".into()));
            }
        }
    }
    Ok((true, format!("400 presentations, {resampled} resampled")))
}

fn c9_twist_identity(_: u64) -> Result<(bool, String)> {
    let mut names = Vec::new();
    // constant base, H = Z/3, p = 2
    {
        let cfg = FqConfig::from_q(2)?;
        let d = ExtensionDescriptor::Tilde { base: Box::new(ExtensionDescriptor::Constant { n: 2 }), h_order: 3, h_step: 1 };
        let e = Extension::new(&cfg, &d)?;
        let ctx = PadicContext::unramified(2, 6, 2, 0)?;
        let lam = vec![PadicValue::from_i64(&ctx, 17)];
        let psi = vec![ctx.root_of_unity(3)?];
        let alpha_inv = lam[0].mul(&psi[0]);
        let t = default_t(&e, &[])?;
        let rep = lambda_twist_identity(&e, &[], &t, &lam, &psi, &alpha_inv, 6)?;
        if !rep.pass() {
            return Ok((false, format!("Tilde(Constant(2), Z/3): {}", rep.to_json())));
        }
        names.push("Constant(2) x Z/3");
    }
    // Carlitz base over F_2, H = Z/3
    {
        let cfg = FqConfig::from_q(2)?;
        let base = ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t")?, level: 3 };
        let d = ExtensionDescriptor::Tilde { base: Box::new(base), h_order: 3, h_step: 1 };
        let e = Extension::new(&cfg, &d)?;
        let ctx = PadicContext::unramified(2, 6, 2, 0)?;
        let lam = vec![PadicValue::one(&ctx)];
        let psi = vec![ctx.root_of_unity(3)?];
        let s = vec![place(&cfg, "t")?];
        let t = default_t(&e, &s)?;
        let rep = lambda_twist_identity(&e, &s, &t, &lam, &psi, &psi[0], 8)?;
        if !rep.pass() {
            return Ok((false, format!("Tilde(Carlitz(t,3), Z/3): {}", rep.to_json())));
        }
        names.push("Carlitz(t,3) x Z/3");
    }
    // Carlitz base over F_3, H = Z/2
    {
        let cfg = FqConfig::from_q(3)?;
        let base = ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t")?, level: 2 };
        let d = ExtensionDescriptor::Tilde { base: Box::new(base), h_order: 2, h_step: 1 };
        let e = Extension::new(&cfg, &d)?;
        let ctx = PadicContext::base(3, 6)?;
        let lam = vec![PadicValue::one(&ctx)];
        let psi = vec![PadicValue::from_i64(&ctx, -1)];
        let s = vec![place(&cfg, "t")?];
        let t = default_t(&e, &s)?;
        let rep = lambda_twist_identity(&e, &s, &t, &lam, &psi, &psi[0], 8)?;
        if !rep.pass() {
            return Ok((false, format!("Tilde(Carlitz(t,2), Z/2): {}", rep.to_json())));
        }
        names.push("Carlitz(t,2) x Z/2");
    }
    Ok((true, names.join(", ")))
}

fn c10_splitting(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for (a, q) in [(2i64, 5u64), (1, 2)] {
        for k in 1..=4 {
            let model = EndoModel::new(vec![a], q, k)?;
            for mm in [model.clone(), model.dual_swap()] {
                if !idempotents(&mm)?.routes_agree {
                    return Ok((false, format!("idempotent routes differ for a={a}, q={q}, k={k}")));
                }
            }
            if let Some(m) = (1..=20).find(|&m| !fv_unit_check(&model, m)) {
                return Ok((false, format!("F^{m} + V^{m} not a unit for a={a}, q={q}")));
            }
        }
        let model = EndoModel::new(vec![a], q, 3)?;
        for i in 0..100 {
            let w = random_model_module(&model, &mut rng)?;
            let d = decompose_module(&w, &model)?;
            if !d.pass() {
                return Ok((false, format!("module {i} for a={a}: {}", w.to_json())));
            }
        }
        // the image of e_F in R/q^n R is F^n(R/q^n R)
        let (p, e) = crate::basefield::prime_power(q).unwrap();
        for n in 1..=3u32 {
            let m = EndoModel::new(vec![a], q, n * e)?;
            let w = FiniteFModule::new(p, vec![e * n, e * n], vec![vec![0, -(q as i128)], vec![1, a as i128]])?;
            let d = decompose_module(&w, &m)?;
            if !d.pass() || d.stabilized_at > n {
                return Ok((false, format!("R/q^{n}R for a={a}")));
            }
        }
    }
    Ok((true, "2 models, 200 random modules".into()))
}

fn one_minus(g: &Arc<FinAbGroup>, alpha: &PadicValue, e: u64) -> GroupRingElt<PadicValue> {
    let one = GroupRingElt::one(g, alpha);
    one.sub(&GroupRingElt::basis(g, &[e], alpha.clone()))
}

fn c11_units(_: u64) -> Result<(bool, String)> {
    for (order, k) in [(5u64, 6u32), (25, 4)] {
        let ctx = PadicContext::base(5, k)?;
        let g = FinAbGroup::gamma(vec![order])?;
        let alpha = PadicValue::from_i64(&ctx, 12);
        for e in [1, order - 1] {
            let x = one_minus(&g, &alpha, e);
            let y = x.try_invert()?;
            if x.mul(&y) != GroupRingElt::one(&g, &alpha) {
                return Ok((false, format!("bad inverse over Z/5^{k}[Z/{order}]")));
            }
        }
    }
    let bad = [(2u64, 8u32, 4u64, 11i64), (5, 6, 5, 6)];
    for (p, k, order, a) in bad {
        let ctx = PadicContext::base(p, k)?;
        let g = FinAbGroup::gamma(vec![order])?;
        let alpha = PadicValue::from_i64(&ctx, a);
        for e in [1, order - 1] {
            match one_minus(&g, &alpha, e).try_invert() {
                Err(Error::NotUnit) => {}
                _ => return Ok((false, format!("alpha = {a} over Z/{p}^{k}[Z/{order}] should not be a unit"))),
            }
        }
    }
    Ok((true, "alpha = 12 (p = 5) inverts; alpha = 1 mod p gives NotUnit".into()))
}

fn c12_nonvanishing(_: u64) -> Result<(bool, String)> {
    for q in [2u64, 3] {
        let cfg = FqConfig::from_q(q)?;
        let ctx = PadicContext::base(cfg.p(), 8)?;
        for n in 0..=3 {
            let e = Extension::new(&cfg, &ExtensionDescriptor::Constant { n })?;
            let t = default_t(&e, &[])?;
            let th = stickelberger(&e, &[], &t, 16, &ctx)?;
            if th.is_zero() {
                return Ok((false, format!("theta = 0 for q={q}, n={n}")));
            }
        }
    }
    Ok((true, "q in {2, 3}, n <= 3".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria() {
        for id in [1, 2, 11] {
            let r = run_criterion(id, 0).unwrap();
            assert!(r.pass, "{}", r.line());
        }
        assert!(run_criterion(13, 0).is_err());
    }
}
