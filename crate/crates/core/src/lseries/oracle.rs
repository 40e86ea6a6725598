use std::sync::Arc;

use serde_json::{json, Value};

use crate::basefield::{irreducibles_by_degree, FqConfig, MonicPoly, Place, Poly};
use crate::coeffrings::{embed_cyclo, CycloInt, CycloRing, PadicContext, PadicValue};
use crate::error::{Error, Result};
use crate::extensions::Extension;
use crate::groupalg::Character;

/// A character of `(F_q[t]/F)^x` twisted by `eps^{deg}`; values are
/// exponents of `zeta_m`.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    cfg: Arc<FqConfig>,
    modulus: Poly,
    primes: Vec<MonicPoly>,
    ring: Arc<CycloRing>,
    values: Vec<Option<u64>>,
    eps: u64,
}

fn prime_factors(cfg: &FqConfig, f: &Poly) -> Result<Vec<MonicPoly>> {
    let d = f.degree().ok_or_else(|| Error::InvalidInput("zero modulus".into()))?;
    if d == 0 {
        return Ok(vec![]);
    }
    let irr = irreducibles_by_degree(cfg, d)?;
    Ok(irr.into_iter().flatten().filter(|g| cfg.poly_rem(f, g.as_poly()).is_zero()).collect())
}

impl DirichletCharacter {
    /// `values[i]` is the exponent at the residue with index `i` (all
    /// polynomials of degree below `deg F`), `None` on non-units.
    pub fn new(cfg: &Arc<FqConfig>, modulus: Poly, m: u64, values: Vec<Option<u64>>, eps: u64) -> Result<Self> {
        let d = modulus.degree().ok_or_else(|| Error::InvalidInput("zero modulus".into()))?;
        if values.len() as u64 != cfg.q().pow(d as u32) {
            return Err(Error::InvalidInput("value table does not match the modulus".into()));
        }
        if m == 0 || values.iter().flatten().any(|&e| e >= m) || eps >= m {
            return Err(Error::InvalidInput("exponent out of range".into()));
        }
        let primes = prime_factors(cfg, &modulus)?;
        Ok(DirichletCharacter { cfg: cfg.clone(), modulus, primes, ring: CycloRing::new(m), values, eps })
    }

    /// The character `omega` of a multiplicative tower, read as a Dirichlet
    /// character modulo the tower's modulus.
    pub fn from_extension(ext: &Extension, omega: &Character) -> Result<Self> {
        let modulus = ext
            .multiplicative_modulus()
            .ok_or_else(|| Error::Unsupported("the oracle needs a multiplicative tower".into()))?;
        let cfg = ext.cfg();
        let d = modulus.degree().unwrap_or(0);
        let values = (0..cfg.q().pow(d as u32))
            .map(|i| ext.residue_class(&cfg.poly_from_index(d, i)).map(|c| omega.exponent(&c)))
            .collect();
        let eps = omega.exponent(&ext.degree_class(1));
        Self::new(cfg, modulus, omega.m(), values, eps)
    }

    pub fn cfg(&self) -> &Arc<FqConfig> {
        &self.cfg
    }
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }
    pub fn modulus_degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }
    pub fn primes(&self) -> &[MonicPoly] {
        &self.primes
    }
    pub fn ring(&self) -> &Arc<CycloRing> {
        &self.ring
    }
    pub fn m(&self) -> u64 {
        self.ring.order()
    }
    pub fn eps(&self) -> u64 {
        self.eps
    }

    /// Exponent of the residue part at `a`, `None` if `a` is not a unit.
    pub fn residue_value(&self, a: &Poly) -> Option<u64> {
        let r = self.cfg.poly_rem(a, &self.modulus);
        self.values[self.cfg.poly_index(&r) as usize]
    }

    /// Exponent of the full twisted character at a monic `a`.
    pub fn value(&self, a: &Poly) -> Option<u64> {
        let d = a.degree()? as u64;
        self.residue_value(a).map(|e| (e + self.eps * d) % self.m())
    }

    /// Exponent at a place outside the modulus; infinity gets `eps`.
    pub fn place_value(&self, v: &Place) -> Option<u64> {
        match v.poly() {
            None => Some(self.eps),
            Some(f) => self.value(f.as_poly()),
        }
    }

    pub fn is_residue_trivial(&self) -> bool {
        self.values.iter().flatten().all(|&e| e == 0)
    }

    pub fn inverse(&self) -> Self {
        let m = self.m();
        let mut out = self.clone();
        out.values = self.values.iter().map(|v| v.map(|e| (m - e) % m)).collect();
        out.eps = (m - self.eps) % m;
        out
    }

    /// Whether every unit `r = 1 mod g` has trivial residue value.
    fn trivial_mod(&self, g: &Poly) -> bool {
        let d = self.modulus_degree();
        (0..self.values.len() as u64).all(|i| {
            let r = self.cfg.poly_from_index(d, i);
            let r1 = self.cfg.poly_sub(&r, &Poly::one());
            !self.cfg.poly_rem(&r1, g).is_zero() || self.values[i as usize].is_none_or(|e| e == 0)
        })
    }

    /// The conductor: least divisor of the modulus through which the
    /// residue part factors.
    pub fn conductor(&self) -> Poly {
        let cfg = &self.cfg;
        let mut cond = self.modulus.clone();
        for f in &self.primes {
            loop {
                let (quo, rem) = cfg.poly_divrem(&cond, f.as_poly());
                if !rem.is_zero() || !self.trivial_mod(&quo) {
                    break;
                }
                cond = quo;
            }
        }
        cond
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The same character read modulo its conductor.
    pub fn primitive(&self) -> Result<Self> {
        let cond = self.conductor();
        let d = self.modulus_degree();
        let dc = cond.degree().unwrap_or(0);
        let mut vals = vec![None; self.cfg.q().pow(dc as u32) as usize];
        for i in 0..self.values.len() as u64 {
            if let Some(e) = self.values[i as usize] {
                let r = self.cfg.poly_rem(&self.cfg.poly_from_index(d, i), &cond);
                vals[self.cfg.poly_index(&r) as usize] = Some(e);
            }
        }
        Self::new(&self.cfg, cond, self.m(), vals, self.eps)
    }

    fn zeta(&self, e: u64) -> CycloInt {
        CycloInt::zeta_pow(&self.ring, e as i64)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "modulus": self.cfg.poly_to_string(&self.modulus),
            "m": self.m(),
            "eps": self.eps,
            "values": self.values,
        })
    }
}

/// Quotient of polynomials with constant term one in the denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Vec<CycloInt>,
    pub den: Vec<CycloInt>,
}

pub(crate) fn cpoly_mul(a: &[CycloInt], b: &[CycloInt]) -> Vec<CycloInt> {
    let z = CycloInt::zero(a[0].ring());
    let mut out = vec![z; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn trim(mut v: Vec<CycloInt>) -> Vec<CycloInt> {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
    v
}

/// `1 - c u^d`.
pub(crate) fn one_minus(c: CycloInt, d: usize) -> Vec<CycloInt> {
    let ring = c.ring().clone();
    let mut v = vec![CycloInt::zero(&ring); d + 1];
    v[0] = CycloInt::one(&ring);
    v[d] = v[d].sub(&c);
    v
}

impl RationalFunction {
    pub fn polynomial(num: Vec<CycloInt>) -> Self {
        let one = CycloInt::one(num[0].ring());
        RationalFunction { num, den: vec![one] }
    }

    pub fn mul_poly(&self, p: &[CycloInt]) -> Self {
        RationalFunction { num: trim(cpoly_mul(&self.num, p)), den: self.den.clone() }
    }

    pub fn div_poly(&self, p: &[CycloInt]) -> Self {
        RationalFunction { num: self.num.clone(), den: trim(cpoly_mul(&self.den, p)) }
    }

    pub fn scale(&self, c: &CycloInt) -> Self {
        RationalFunction { num: self.num.iter().map(|x| x.mul(c)).collect(), den: self.den.clone() }
    }

    /// Power series expansion up to `u^n`.
    pub fn expand(&self, n: usize) -> Vec<CycloInt> {
        let ring = self.num[0].ring().clone();
        assert_eq!(self.den[0], CycloInt::one(&ring), "denominator must have constant term 1");
        let mut out = vec![CycloInt::zero(&ring); n + 1];
        for j in 0..=n {
            let mut acc = self.num.get(j).cloned().unwrap_or_else(|| CycloInt::zero(&ring));
            for i in 1..=j.min(self.den.len() - 1) {
                acc = acc.sub(&self.den[i].mul(&out[j - i]));
            }
            out[j] = acc;
        }
        out
    }

    /// Value at `u = a / b` as a fraction in the p-adic context.
    pub fn eval_frac(&self, a: &PadicValue, b: &PadicValue) -> Result<Frac> {
        let (n1, d1) = eval_poly_frac(&self.num, a, b)?;
        let (n2, d2) = eval_poly_frac(&self.den, a, b)?;
        Ok(Frac::new(n1.mul(&d2), n2.mul(&d1)))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "num": self.num.iter().map(CycloInt::to_json).collect::<Vec<_>>(),
            "den": self.den.iter().map(CycloInt::to_json).collect::<Vec<_>>(),
        })
    }
}

/// `(sum c_j a^j b^{n-j}, b^n)`, the value of a degree-`n` polynomial at `a/b`.
fn eval_poly_frac(c: &[CycloInt], a: &PadicValue, b: &PadicValue) -> Result<(PadicValue, PadicValue)> {
    let ctx = a.ctx();
    let n = c.len() - 1;
    let mut acc = PadicValue::zero(ctx);
    for (j, x) in c.iter().enumerate() {
        if !x.is_zero() {
            let term = embed_cyclo(x, ctx)?.mul(&a.pow(j as u64)).mul(&b.pow((n - j) as u64));
            acc = acc.add(&term);
        }
    }
    Ok((acc, b.pow(n as u64)))
}

/// A p-adic fraction `num / den`, compared by cross-multiplication.
#[derive(Clone, Debug)]
pub struct Frac {
    pub num: PadicValue,
    pub den: PadicValue,
}

impl Frac {
    pub fn new(num: PadicValue, den: PadicValue) -> Self {
        Frac { num, den }
    }
    pub fn int(x: PadicValue) -> Self {
        let one = PadicValue::one(x.ctx());
        Frac { num: x, den: one }
    }
    pub fn mul(&self, o: &Frac) -> Frac {
        Frac { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }
    pub fn pow(&self, e: u64) -> Frac {
        Frac { num: self.num.pow(e), den: self.den.pow(e) }
    }
    pub fn inv(&self) -> Frac {
        Frac { num: self.den.clone(), den: self.num.clone() }
    }

    /// Precision (in powers of p) to which equality is meaningful:
    /// `k` minus the denominators' valuations.
    pub fn compare(&self, o: &Frac) -> (bool, i64) {
        let k = self.num.ctx().k() as i64;
        let prec = k - self.den.coord_valuation() as i64 - o.den.coord_valuation() as i64;
        (self.num.mul(&o.den) == o.num.mul(&self.den), prec)
    }

    /// The value when the denominator is a unit.
    pub fn value(&self) -> Option<PadicValue> {
        Some(self.num.mul(&self.den.inverse().ok()?))
    }

    pub fn to_json(&self) -> Value {
        match self.value() {
            Some(v) => json!({"value": v.to_json()}),
            None => json!({"num": self.num.to_json(), "den": self.den.to_json()}),
        }
    }
}

/// `sum_{a monic, (a, F) = 1} chi(a) u^{deg a}`, summed degree by degree up
/// to `deg F`, where the sums vanish; optionally divided by the Euler
/// factor `1 - chi(inf) u` at infinity.
pub fn dirichlet_l_direct(chi: &DirichletCharacter, include_infinity: bool) -> Result<Vec<CycloInt>> {
    if chi.is_residue_trivial() {
        return Err(Error::NotPrimitive);
    }
    let cfg = &chi.cfg;
    let d = chi.modulus_degree();
    let ring = chi.ring.clone();
    let mut c = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let mut counts = vec![0i128; chi.m() as usize];
        for idx in 0..cfg.q().pow(j as u32) {
            if let Some(e) = chi.value(cfg.monic_from_index(j, idx).as_poly()) {
                counts[e as usize] += 1;
            }
        }
        let mut acc = CycloInt::zero(&ring);
        for (e, &n) in counts.iter().enumerate() {
            if n != 0 {
                acc = acc.add(&chi.zeta(e as u64).scale(n));
            }
        }
        c.push(acc);
    }
    if !c[d].is_zero() {
        return Err(Error::InvalidInput("character sum does not vanish at the modulus degree".into()));
    }
    let mut c = trim(c);
    if include_infinity {
        c = divide_one_minus(&c, &chi.zeta(chi.eps))
            .ok_or_else(|| Error::Unsupported("L-function has no trivial zero at infinity".into()))?;
    }
    Ok(c)
}

/// Exact quotient by `1 - e u`, or `None` if it does not divide.
fn divide_one_minus(p: &[CycloInt], e: &CycloInt) -> Option<Vec<CycloInt>> {
    let n = p.len() - 1;
    if n == 0 {
        return None;
    }
    let mut q: Vec<CycloInt> = Vec::with_capacity(n);
    for j in 0..n {
        let prev = if j == 0 { CycloInt::zero(e.ring()) } else { e.mul(&q[j - 1]) };
        q.push(p[j].add(&prev));
    }
    (p[n].add(&e.mul(&q[n - 1])).is_zero()).then_some(q)
}

/// The finite-place L-function as a rational function: the direct sum for
/// residue-nontrivial characters, the closed form
/// `prod_{f | F} (1 - (eps u)^{deg f}) / (1 - q eps u)` otherwise.
pub fn dirichlet_l(chi: &DirichletCharacter, include_infinity: bool) -> Result<RationalFunction> {
    let ring = chi.ring.clone();
    let eps = chi.zeta(chi.eps);
    if !chi.is_residue_trivial() {
        return Ok(RationalFunction::polynomial(dirichlet_l_direct(chi, include_infinity)?));
    }
    let mut r = RationalFunction::polynomial(vec![CycloInt::one(&ring)]);
    for f in &chi.primes {
        let d = f.degree();
        r = r.mul_poly(&one_minus(eps.pow(d as u64), d));
    }
    r = r.div_poly(&one_minus(eps.scale(chi.cfg.q() as i128), 1));
    if include_infinity {
        r = r.div_poly(&one_minus(eps, 1));
    }
    Ok(r)
}

/// `sum_{a mod F, a unit} chi(a) zeta_p^{Tr(a_{D-1})}` with `a_{D-1}` the
/// coefficient of `t^{deg F - 1}` (the `t^{-1}` coefficient of `a/F` at
/// infinity); `1` for residue-trivial characters. Values lie in
/// `Z[zeta_{lcm(m, p)}]`.
pub fn gauss_sum(chi: &DirichletCharacter) -> CycloInt {
    let cfg = &chi.cfg;
    let p = cfg.p();
    let m = chi.m();
    let big = m / crate::groupalg::gcd(m, p) * p;
    let ring = CycloRing::new(big);
    if chi.is_residue_trivial() {
        return CycloInt::one(&ring);
    }
    let d = chi.modulus_degree();
    let mut acc = CycloInt::zero(&ring);
    for i in 0..chi.values.len() as u64 {
        if let Some(e) = chi.values[i as usize] {
            let a = cfg.poly_from_index(d, i);
            let tr = cfg.trace(a.coeff(d - 1));
            let exp = e * (big / m) + tr * (big / p);
            acc = acc.add(&CycloInt::zeta_pow(&ring, exp as i64));
        }
    }
    acc
}

/// Report of the functional-equation check for a primitive character.
#[derive(Clone, Debug)]
pub struct FunctionalEqReport {
    pub conductor_degree: usize,
    pub l: Vec<CycloInt>,
    pub l_inverse: Vec<CycloInt>,
    pub tau: CycloInt,
    pub tau_inverse: CycloInt,
    pub chi_minus_one: CycloInt,
    pub omega_b: CycloInt,
    pub degree_ok: bool,
    pub norm_ok: bool,
    pub reversal_ok: bool,
}

impl FunctionalEqReport {
    pub fn pass(&self) -> bool {
        self.degree_ok && self.norm_ok && self.reversal_ok
    }

    pub fn to_json(&self) -> Value {
        let js = |v: &[CycloInt]| v.iter().map(CycloInt::to_json).collect::<Vec<_>>();
        json!({
            "conductor_degree": self.conductor_degree,
            "L": js(&self.l),
            "L_inverse": js(&self.l_inverse),
            "tau": self.tau.to_json(),
            "tau_inverse": self.tau_inverse.to_json(),
            "chi_minus_one": self.chi_minus_one.to_json(),
            "omega_b": self.omega_b.to_json(),
            "degree_ok": self.degree_ok,
            "norm_ok": self.norm_ok,
            "reversal_ok": self.reversal_ok,
            "pass": self.pass(),
        })
    }
}

/// `omega(b) = eps^{d - 2}`, the character at the divisor of a differential
/// on the projective line (only its degree `-2` and the conductor enter).
pub fn omega_b(chi: &DirichletCharacter, conductor_degree: usize) -> CycloInt {
    CycloInt::zeta_pow(&chi.ring, chi.eps as i64 * (conductor_degree as i64 - 2))
}

/// Checks, for a primitive nontrivial `chi` of conductor degree `d`:
/// `deg L(chi) = d - 2`, `tau(chi) tau(chi^{-1}) = chi(-1) q^d`, and
/// `q^{n+1} L(chi^{-1})_i = omega(b)^{-1} tau(chi^{-1}) q^i L(chi)_{n-i}`,
/// i.e. `L(chi^{-1}, u) = C u^{d-2} L(chi, 1/(qu))` with
/// `C = omega(b)^{-1} tau(chi^{-1}) / q`.
pub fn functional_eq_check(chi: &DirichletCharacter) -> Result<FunctionalEqReport> {
    if chi.is_residue_trivial() || !chi.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let q = chi.cfg.q() as i128;
    let d = chi.modulus_degree();
    let inv = chi.inverse();
    let l = dirichlet_l_direct(chi, true)?;
    let l_inv = dirichlet_l_direct(&inv, true)?;
    let tau = gauss_sum(chi);
    let tau_inv = gauss_sum(&inv);
    let big = tau.ring().clone();
    let minus_one = Poly::new(vec![chi.cfg.neg(1)]);
    let chi_m1 = CycloInt::zeta_pow(&chi.ring, chi.residue_value(&minus_one).unwrap_or(0) as i64);
    let qd = q.pow(d as u32);
    let norm_ok = tau.mul(&tau_inv) == chi_m1.lift_to(&big)?.scale(qd);
    let n = l.len() - 1;
    let degree_ok = d >= 2 && n == d - 2 && l_inv.len() == l.len();
    let ob = omega_b(chi, d);
    let c = CycloInt::zeta_pow(&chi.ring, -(chi.eps as i64) * (d as i64 - 2)).lift_to(&big)?.mul(&tau_inv);
    let reversal_ok = degree_ok
        && (0..=n).all(|i| {
            let lhs = l_inv[i].lift_to(&big).unwrap().scale(q.pow(n as u32 + 1));
            let rhs = c.mul(&l[n - i].lift_to(&big).unwrap()).scale(q.pow(i as u32));
            lhs == rhs
        });
    Ok(FunctionalEqReport {
        conductor_degree: d,
        l,
        l_inverse: l_inv,
        tau,
        tau_inverse: tau_inv,
        chi_minus_one: chi_m1,
        omega_b: ob,
        degree_ok,
        norm_ok,
        reversal_ok,
    })
}

/// Embeds a whole polynomial.
pub fn embed_poly(c: &[CycloInt], ctx: &Arc<PadicContext>) -> Result<Vec<PadicValue>> {
    c.iter().map(|x| embed_cyclo(x, ctx)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::ExtensionDescriptor;
    use crate::groupalg::Character;

    fn carlitz(q: u64, f: &str, level: u32) -> Extension {
        let cfg = FqConfig::from_q(q).unwrap();
        let d = ExtensionDescriptor::Carlitz { f: cfg.parse_monic(f).unwrap(), level };
        Extension::new(&cfg, &d).unwrap()
    }

    #[test]
    fn order_four_character_mod_t_cubed() {
        let e = carlitz(2, "t", 3);
        let omega = Character::new(e.galois_group(), 4, vec![1]).unwrap();
        let chi = DirichletCharacter::from_extension(&e, &omega).unwrap();
        let ring = chi.ring().clone();
        let z = CycloInt::zeta_pow(&ring, 1);
        let one = CycloInt::one(&ring);
        let fin = dirichlet_l_direct(&chi, false).unwrap();
        assert_eq!(fin, vec![one.clone(), z.clone(), one.add(&z).neg()]);
        let full = dirichlet_l_direct(&chi, true).unwrap();
        assert_eq!(full, vec![one.clone(), one.add(&z)]);
        assert!(chi.is_primitive());
        let rep = functional_eq_check(&chi).unwrap();
        assert!(rep.pass(), "{}", rep.to_json());
        let big = rep.tau.ring().clone();
        assert_eq!(rep.tau, CycloInt::from_int(&big, 2).add(&CycloInt::zeta_pow(&big, 1).scale(2)));
    }

    #[test]
    fn order_two_character_has_smaller_conductor() {
        let e = carlitz(2, "t", 3);
        let omega = Character::new(e.galois_group(), 4, vec![2]).unwrap();
        let chi = DirichletCharacter::from_extension(&e, &omega).unwrap();
        assert!(!chi.is_primitive());
        assert_eq!(functional_eq_check(&chi).unwrap_err(), Error::NotPrimitive);
        let prim = chi.primitive().unwrap();
        assert_eq!(prim.modulus_degree(), 2);
        let l = dirichlet_l_direct(&prim, true).unwrap();
        assert_eq!(l.len(), 1);
        assert!(functional_eq_check(&prim).unwrap().pass());
    }

    #[test]
    fn ternary_character_mod_t_squared() {
        let e = carlitz(3, "t", 2);
        let omega = Character::new(e.galois_group(), 3, vec![1]).unwrap();
        let chi = DirichletCharacter::from_extension(&e, &omega).unwrap();
        let rep = functional_eq_check(&chi).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.tau.as_int(), Some(3));
        assert_eq!(rep.l.len(), 1);
    }

    #[test]
    fn trivial_character_is_rejected_but_has_closed_form() {
        let e = carlitz(2, "t", 3);
        let chi = DirichletCharacter::from_extension(&e, &Character::trivial(e.galois_group())).unwrap();
        assert_eq!(dirichlet_l_direct(&chi, false).unwrap_err(), Error::NotPrimitive);
        let r = dirichlet_l(&chi, false).unwrap();
        // (1 - u) / (1 - 2u): 1, 1, 2, 4, ...
        let ex = r.expand(4);
        assert_eq!(ex.iter().map(|x| x.as_int().unwrap()).collect::<Vec<_>>(), vec![1, 1, 2, 4, 8]);
        assert_eq!(gauss_sum(&chi).as_int(), Some(1));
    }

    #[test]
    fn twisted_character_functional_equation() {
        let cfg = FqConfig::from_q(2).unwrap();
        let d = ExtensionDescriptor::Product {
            left: Box::new(ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t").unwrap(), level: 3 }),
            right: Box::new(ExtensionDescriptor::Constant { n: 2 }),
        };
        let e = Extension::new(&cfg, &d).unwrap();
        let omega = Character::new(e.galois_group(), 4, vec![1, 1]).unwrap();
        let chi = DirichletCharacter::from_extension(&e, &omega).unwrap();
        assert_eq!(chi.eps(), 1);
        assert!(functional_eq_check(&chi).unwrap().pass());
    }
}
