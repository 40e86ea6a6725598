use std::sync::Arc;

use serde_json::{json, Value};

use super::oracle::{dirichlet_l, gauss_sum, omega_b, one_minus, DirichletCharacter, Frac, RationalFunction};
use super::theta::{theta_st_with, ThetaOptions, ThetaST};
use crate::basefield::Place;
use crate::coeffrings::{embed_cyclo, unit_roots, CycloInt, PadicContext, PadicValue, WeilPolynomial};
use crate::error::{Error, Result};
use crate::extensions::Extension;
use crate::groupalg::{Character, GroupRingElt};

/// A constant ordinary abelian variety through its Weil polynomial and the
/// Hensel-lifted unit roots of Frobenius.
#[derive(Clone, Debug)]
pub struct AbelianVarietyData {
    pub h: WeilPolynomial,
    pub g: usize,
    pub alphas: Vec<PadicValue>,
    pub ctx: Arc<PadicContext>,
}

impl AbelianVarietyData {
    /// Unit roots of `h` in (an unramified extension of) `ctx`.
    pub fn new(h: WeilPolynomial, ctx: &Arc<PadicContext>) -> Result<Self> {
        let (ctx, alphas) = unit_roots(&h, ctx)?;
        Ok(AbelianVarietyData { g: h.g(), h, alphas, ctx })
    }

    pub fn alpha_inverses(&self) -> Result<Vec<PadicValue>> {
        self.alphas.iter().map(PadicValue::inverse).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "weil": self.h.to_json(),
            "g": self.g,
            "ordinary": true,
            "alphas": self.alphas.iter().map(PadicValue::to_json).collect::<Vec<_>>(),
            "ctx": self.ctx.to_json(),
        })
    }
}

fn check_q(ext: &Extension, a: &AbelianVarietyData) -> Result<()> {
    if ext.cfg().q() != a.h.q() {
        return Err(Error::InvalidInput(format!("Weil polynomial is for q = {}, base field has q = {}", a.h.q(), ext.cfg().q())));
    }
    Ok(())
}

/// `prod_i sharp(Theta_{S,T}(a_i^{-1}) / f_T(a_i^{-1}))`, checked to have
/// coefficients in the base ring.
pub fn theta_plus_from(st: &ThetaST, a: &AbelianVarietyData) -> Result<GroupRingElt<PadicValue>> {
    let mut acc = GroupRingElt::one(st.series.group(), &PadicValue::one(&a.ctx));
    for x in a.alpha_inverses()? {
        acc = acc.mul(&st.eval_theta(&x)?.sharp());
    }
    if acc.coeffs().iter().any(|c| c.base_value().is_none()) {
        return Err(Error::NotGaloisStable);
    }
    Ok(acc)
}

pub fn theta_plus(
    ext: &Extension,
    s: &[Place],
    t: &[Place],
    a: &AbelianVarietyData,
    n: usize,
) -> Result<GroupRingElt<PadicValue>> {
    check_q(ext, a)?;
    let st = theta_st_with(ext, s, t, n, &ThetaOptions::default())?;
    theta_plus_from(&st, a)
}

/// `L = theta^+ sharp(theta^+)`.
pub fn p_adic_l(
    ext: &Extension,
    s: &[Place],
    t: &[Place],
    a: &AbelianVarietyData,
    n: usize,
) -> Result<GroupRingElt<PadicValue>> {
    let tp = theta_plus(ext, s, t, a, n)?;
    Ok(tp.mul(&tp.sharp()))
}

/// A context holding the unit roots of `a` and the values of `omega`.
pub fn context_for(a: &AbelianVarietyData, omega: &Character) -> Result<Arc<PadicContext>> {
    let p = a.ctx.p();
    let mut m = omega.m();
    let mut level = 0;
    while m.is_multiple_of(p) {
        m /= p;
        level += 1;
    }
    let mut f = a.ctx.unram_degree();
    if m > 1 {
        let mut need = 1;
        let mut x = p % m;
        while x != 1 {
            x = x * p % m;
            need += 1;
        }
        f = f / crate::groupalg::gcd(f as u64, need) as usize * need as usize;
    }
    let level = level.max(a.ctx.cyclo_level());
    if f == a.ctx.unram_degree() && level == a.ctx.cyclo_level() {
        return Ok(a.ctx.clone());
    }
    PadicContext::unramified(p, a.ctx.k(), f, level)
}

/// Re-expresses `a` in a larger context.
pub fn rebase(a: &AbelianVarietyData, ctx: &Arc<PadicContext>) -> Result<AbelianVarietyData> {
    AbelianVarietyData::new(a.h.clone(), ctx)
}

/// Interpolation factors of one character.
#[derive(Clone, Debug)]
pub struct InterpFactors {
    pub conductor_degree: usize,
    pub ramified: Vec<Place>,
    /// `tau(omega^{-1})`, the finite Gauss sum of the inverse character.
    pub tau: CycloInt,
    pub omega_b: CycloInt,
    pub xi: Frac,
    pub nabla: Frac,
    /// `(q^{g/2} prod alpha_i^{-1})^{d - 2}`, when the exponent of `q` is
    /// integral.
    pub power: Option<Frac>,
}

impl InterpFactors {
    pub fn to_json(&self) -> Value {
        json!({
            "conductor_degree": self.conductor_degree,
            "tau": self.tau.to_json(),
            "omega_b": self.omega_b.to_json(),
            "Xi": self.xi.to_json(),
            "nabla": self.nabla.to_json(),
            "power_factor": self.power.as_ref().map(Frac::to_json),
            "sqrt_needed": self.power.is_none(),
        })
    }
}

/// `1 - zeta^e x^d` in the p-adic context.
fn one_minus_at(zeta: &CycloInt, x: &PadicValue, d: usize) -> Result<PadicValue> {
    let c = embed_cyclo(zeta, x.ctx())?;
    Ok(PadicValue::one(x.ctx()).sub(&c.mul(&x.pow(d as u64))))
}

fn zeta(chi: &DirichletCharacter, e: u64) -> CycloInt {
    CycloInt::zeta_pow(chi.ring(), e as i64)
}

/// Computes the factors with the unit roots already in `a.ctx`, which must
/// also contain the values of `omega`.
fn factors(
    ext: &Extension,
    s: &[Place],
    a: &AbelianVarietyData,
    omega: &Character,
) -> Result<(InterpFactors, DirichletCharacter)> {
    let ctx = &a.ctx;
    let chi_full = DirichletCharacter::from_extension(ext, omega)?;
    let chi = chi_full.primitive()?;
    let d = chi.modulus_degree();
    let q = ext.cfg().q() as i128;
    let inv_alphas = a.alpha_inverses()?;
    let ramified: Vec<Place> = chi.primes().iter().map(|f| Place::finite(ext.cfg(), f.clone())).collect::<Result<_>>()?;
    let tau = gauss_sum(&chi.inverse());
    let ob = omega_b(&chi, d);
    let one = Frac::int(PadicValue::one(ctx));
    let mut xi = one.clone();
    for v in s.iter().filter(|v| !ramified.contains(v)) {
        let e = chi.place_value(v).ok_or_else(|| Error::InvalidInput("place divides the conductor".into()))?;
        let (w, w_inv) = (zeta(&chi, e), zeta(&chi, (chi.m() - e) % chi.m()));
        for x in &inv_alphas {
            xi = xi.mul(&Frac::int(one_minus_at(&w, x, v.degree)?.mul(&one_minus_at(&w_inv, x, v.degree)?)));
        }
    }
    let mut nabla = one.clone();
    if s.is_empty() {
        let (w, w_inv) = (zeta(&chi, chi.eps()), zeta(&chi, (chi.m() - chi.eps()) % chi.m()));
        for x in &inv_alphas {
            nabla = nabla.mul(&Frac::int(one_minus_at(&w, x, 1)?.mul(&one_minus_at(&w_inv, x, 1)?)));
        }
    }
    let e = a.g as i64 * (d as i64 - 2);
    let power = (e % 2 == 0).then(|| {
        let prod_inv = inv_alphas.iter().fold(PadicValue::one(ctx), |acc, x| acc.mul(x));
        let v = Frac::int(prod_inv.pow((d as i64 - 2).unsigned_abs()).scale(q.pow((e / 2).unsigned_abs() as u32)));
        if d >= 2 { v } else { v.inv() }
    });
    Ok((InterpFactors { conductor_degree: d, ramified, tau, omega_b: ob, xi, nabla, power }, chi_full))
}

/// Interpolation factors of `omega`; `SqrtNeeded` when `g (d - 2)` is odd.
pub fn interp_factors(ext: &Extension, s: &[Place], a: &AbelianVarietyData, omega: &Character) -> Result<InterpFactors> {
    let ctx = context_for(a, omega)?;
    let a = rebase(a, &ctx)?;
    let (f, _) = factors(ext, s, &a, omega)?;
    if f.power.is_none() {
        return Err(Error::SqrtNeeded);
    }
    Ok(f)
}

/// `L*_S(omega, u) = omega(nabla_S) L_fin(omega, u) prod_{v in S, v not | F}
/// (1 - omega(v) u^{deg v}) / (1 - omega(inf) u)^{[inf not in S]}`.
pub fn l_star(chi_full: &DirichletCharacter, s: &[Place]) -> Result<RationalFunction> {
    let eps = zeta(chi_full, chi_full.eps());
    let mut r = dirichlet_l(chi_full, false)?;
    for v in s {
        if v.is_infinity() || chi_full.primes().contains(v.poly().unwrap()) {
            continue;
        }
        let e = chi_full.place_value(v).ok_or_else(|| Error::InvalidInput("place divides the modulus".into()))?;
        r = r.mul_poly(&one_minus(zeta(chi_full, e), v.degree));
    }
    if s.is_empty() {
        r = r.mul_poly(&one_minus(eps.clone(), 1));
    }
    if !s.contains(&Place::infinity()) {
        r = r.div_poly(&one_minus(eps, 1));
    }
    Ok(r)
}

/// One comparison line of an interpolation report.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub name: String,
    pub lhs: Frac,
    pub rhs: Frac,
    pub pass: bool,
    pub precision: i64,
}

impl Comparison {
    fn new(name: &str, lhs: Frac, rhs: Frac) -> Self {
        let (pass, precision) = lhs.compare(&rhs);
        Comparison { name: name.into(), lhs, rhs, pass, precision }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "effective_precision": self.precision,
            "pass": self.pass,
        })
    }
}

#[derive(Clone, Debug)]
pub struct InterpolationReport {
    pub stabilization_degree: usize,
    pub series_agreement: bool,
    pub comparisons: Vec<Comparison>,
    pub factors: InterpFactors,
}

impl InterpolationReport {
    pub fn pass(&self) -> bool {
        self.series_agreement && self.comparisons.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "stabilization_degree": self.stabilization_degree,
            "series_agreement": self.series_agreement,
            "comparisons": self.comparisons.iter().map(Comparison::to_json).collect::<Vec<_>>(),
            "factors": self.factors.to_json(),
            "pass": self.pass(),
        })
    }
}

/// Three comparisons per character: (a) `omega(Theta(alpha_i^{-1}))` against
/// the oracle `L*_S(omega, alpha_i^{-1})`, for each `i`; (b) `omega(L)`
/// against `prod_i L*_S(omega, alpha_i^{-1}) L*_S(omega^{-1}, alpha_i^{-1})`;
/// (c) `omega(L)` against
/// `C^g (prod alpha_i^{-1})^{d-2} nabla Xi prod_i L(omega, alpha_i^{-1}) L(omega, alpha_i/q)`
/// with `C = omega(b)^{-1} tau(omega^{-1}) / q`. Also compares the series
/// `omega(Theta_S)(u)` with the oracle expansion up to the cap.
pub fn interpolation_check(
    ext: &Extension,
    s: &[Place],
    t: &[Place],
    a: &AbelianVarietyData,
    omega: &Character,
    n: usize,
) -> Result<InterpolationReport> {
    check_q(ext, a)?;
    let ctx = context_for(a, omega)?;
    let a = rebase(a, &ctx)?;
    let st = match theta_st_with(ext, s, t, n, &ThetaOptions::default()) {
        Ok(st) => st,
        Err(Error::NoStabilization(cap)) => {
            return Err(Error::PrecisionExhausted(format!("Theta_ST has not stabilized below N = {cap}")))
        }
        Err(e) => return Err(e),
    };
    let (factors, chi_full) = factors(ext, s, &a, omega)?;
    let chi_inv = chi_full.inverse();
    let q = ext.cfg().q() as i128;
    let zt = omega.padic_table(&ctx)?;
    let lstar = l_star(&chi_full, s)?;
    let lstar_inv = l_star(&chi_inv, s)?;

    // series agreement, exact in Z[zeta_m]
    let theta = super::theta::theta_series(ext, s, n)?;
    let ring = chi_full.ring().clone();
    let table = omega.cyclo_table();
    let series: Vec<CycloInt> =
        theta.coeffs().iter().map(|x| x.to_cyclo(&ring).eval_char(omega, &table)).collect::<Result<_>>()?;
    let series_agreement = series == lstar.expand(n);

    let one = PadicValue::one(&ctx);
    let mut comparisons = Vec::new();
    let mut prod_b = Frac::int(one.clone());
    let mut prod_c = Frac::int(one.clone());
    let l_prim = dirichlet_l(&chi_full.primitive()?, true)?;
    let qv = PadicValue::from_i128(&ctx, q);
    for (i, (alpha, x)) in a.alphas.iter().zip(a.alpha_inverses()?).enumerate() {
        let th = st.eval_theta(&x)?.eval_char(omega, &zt)?;
        let rhs = lstar.eval_frac(&x, &one)?;
        comparisons.push(Comparison::new(&format!("theta_at_alpha_inverse[{i}]"), Frac::int(th), rhs.clone()));
        prod_b = prod_b.mul(&rhs).mul(&lstar_inv.eval_frac(&x, &one)?);
        prod_c = prod_c.mul(&l_prim.eval_frac(&x, &one)?).mul(&l_prim.eval_frac(alpha, &qv)?);
    }
    let l = p_adic_l_from(&st, &a)?;
    let l_val = Frac::int(l.eval_char(omega, &zt)?);
    comparisons.push(Comparison::new("L_against_oracle_pairs", l_val.clone(), prod_b));

    let big = factors.tau.ring().clone();
    let ob_inv = factors.omega_b.conj().lift_to(&big)?;
    let c_num = ob_inv.mul(&factors.tau);
    let c_num = match c_num.as_int() {
        Some(n) => PadicValue::from_i128(&ctx, n),
        None => embed_cyclo(&c_num, &ctx)?,
    };
    let c = Frac::new(c_num, qv.clone());
    let d = factors.conductor_degree as i64;
    let prod_inv = a.alpha_inverses()?.iter().fold(one.clone(), |acc, x| acc.mul(x));
    let pa = Frac::int(prod_inv).pow((d - 2).unsigned_abs());
    let pa = if d >= 2 { pa } else { pa.inv() };
    let rhs_c = c.pow(a.g as u64).mul(&pa).mul(&factors.nabla).mul(&factors.xi).mul(&prod_c);
    comparisons.push(Comparison::new("L_against_interpolation_formula", l_val, rhs_c));

    if let Some(c) = comparisons.iter().find(|c| c.precision <= 0) {
        return Err(Error::PrecisionExhausted(format!("{} loses all {} digits to denominators", c.name, ctx.k())));
    }
    Ok(InterpolationReport { stabilization_degree: st.degree, series_agreement, comparisons, factors })
}

fn p_adic_l_from(st: &ThetaST, a: &AbelianVarietyData) -> Result<GroupRingElt<PadicValue>> {
    let tp = theta_plus_from(st, a)?;
    Ok(tp.mul(&tp.sharp()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::FqConfig;
    use crate::extensions::ExtensionDescriptor;
    use crate::lseries::default_t;

    fn elliptic(k: u32) -> AbelianVarietyData {
        let h = WeilPolynomial::new(vec![2, -1, 1], 2).unwrap();
        AbelianVarietyData::new(h, &PadicContext::base(2, k).unwrap()).unwrap()
    }

    #[test]
    fn trivial_tower_theta_plus() {
        let cfg = FqConfig::from_q(2).unwrap();
        let e = Extension::new(&cfg, &ExtensionDescriptor::trivial()).unwrap();
        let a = elliptic(4);
        assert_eq!(a.alphas[0].base_value(), Some(11));
        let t = default_t(&e, &[]).unwrap();
        let tp = theta_plus(&e, &[], &t, &a, 8).unwrap();
        assert_eq!(tp.coeffs()[0].base_value(), Some(3));
        let l = p_adic_l(&e, &[], &t, &a, 8).unwrap();
        assert_eq!(l.coeffs()[0].base_value(), Some(9));
        let omega = Character::trivial(e.galois_group());
        assert!(matches!(interpolation_check(&e, &[], &t, &a, &omega, 8), Err(Error::PrecisionExhausted(_))));
        let rep = interpolation_check(&e, &[], &t, &elliptic(16), &omega, 8).unwrap();
        assert!(rep.pass(), "{}", rep.to_json());
        let f = interp_factors(&e, &[], &a, &omega).unwrap();
        assert_eq!(f.tau.as_int(), Some(1));
    }

    #[test]
    fn carlitz_characters_interpolate() {
        let cfg = FqConfig::from_q(2).unwrap();
        let d = ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t").unwrap(), level: 3 };
        let e = Extension::new(&cfg, &d).unwrap();
        let s = vec![Place::finite(&cfg, cfg.parse_monic("t").unwrap()).unwrap()];
        let t = default_t(&e, &s).unwrap();
        let a = elliptic(12);
        for ex in 0..4 {
            let omega = Character::new(e.galois_group(), 4, vec![ex]).unwrap();
            let rep = interpolation_check(&e, &s, &t, &a, &omega, 16).unwrap();
            assert!(rep.pass(), "{}", rep.to_json());
        }
        let omega = Character::new(e.galois_group(), 4, vec![1]).unwrap();
        assert_eq!(interp_factors(&e, &s, &a, &omega).unwrap_err(), Error::SqrtNeeded);
        assert!(matches!(interpolation_check(&e, &s, &t, &a, &omega, 1), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn galois_stability_with_nonrational_roots() {
        // x^2 + x + 2: unit root generates the unramified quadratic extension
        let h = WeilPolynomial::new(vec![2, 1, 1], 2).unwrap();
        let a = AbelianVarietyData::new(h, &PadicContext::base(2, 8).unwrap()).unwrap();
        let cfg = FqConfig::from_q(2).unwrap();
        let e = Extension::new(&cfg, &ExtensionDescriptor::Constant { n: 2 }).unwrap();
        let t = default_t(&e, &[]).unwrap();
        let tp = theta_plus(&e, &[], &t, &a, 8).unwrap();
        assert!(tp.coeffs().iter().all(|c| c.base_value().is_some()));
    }
}
