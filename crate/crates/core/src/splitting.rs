//! Frobenius/Verschiebung splitting of `R = prod_j (Z/p^k)[x]/(x^2 - a_j x + q)`
//! and of finite modules annihilated by the model polynomial.

use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use crate::basefield::prime_power;
use crate::error::{Error, Result};
use crate::intlat::hnf;
use crate::linalg::{addmod, invert_regular, invmod, mulmod, submod, FiniteAlgebra};

/// Product of elliptic factors `x^2 - a_j x + q` over `Z/p^k`, with `F` the
/// class of `x` (or of `a_j - x` on dual factors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoModel {
    p: u64,
    k: u32,
    q: u64,
    m: u64,
    a: Vec<i64>,
    dual: Vec<bool>,
}

impl EndoModel {
    pub fn new(a: Vec<i64>, q: u64, k: u32) -> Result<Arc<Self>> {
        let (p, _) = prime_power(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        if a.is_empty() {
            return Err(Error::InvalidInput("model needs at least one factor".into()));
        }
        if a.iter().any(|&x| x.rem_euclid(p as i64) == 0) {
            return Err(Error::NotOrdinary);
        }
        let m = p.checked_pow(k).filter(|&m| m < 1 << 62).ok_or(Error::PrecisionTooLarge)?;
        let dual = vec![false; a.len()];
        Ok(Arc::new(EndoModel { p, k, q, m, a, dual }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn traces(&self) -> &[i64] {
        &self.a
    }

    fn a_mod(&self, j: usize) -> u64 {
        self.a[j].rem_euclid(self.m as i64) as u64
    }

    /// Model of the dual variety: `F` and `V` exchanged on every factor.
    pub fn dual_swap(&self) -> Arc<Self> {
        let mut out = self.clone();
        out.dual = self.dual.iter().map(|d| !d).collect();
        Arc::new(out)
    }

    /// Unit root `alpha_j` and non-unit root `beta_j = q / alpha_j` of each
    /// factor, by Newton iteration from `alpha = a mod p`.
    pub fn roots(&self) -> Vec<(u64, u64)> {
        let m = self.m;
        let q = self.q % m;
        (0..self.a.len())
            .map(|j| {
                let a = self.a_mod(j);
                let mut x = a;
                for _ in 0..=self.k {
                    let fx = addmod(submod(mulmod(x, x, m), mulmod(a, x, m), m), q, m);
                    let d = submod(addmod(x, x, m), a, m);
                    x = submod(x, mulmod(fx, invmod(d, m).expect("derivative is a unit"), m), m);
                }
                (x, mulmod(q, invmod(x, m).unwrap(), m))
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "factors": self.a.iter().zip(&self.dual).map(|(a, d)| json!({"a": a, "q": self.q, "dual": d})).collect::<Vec<_>>(),
            "p": self.p,
            "k": self.k,
        })
    }

    pub fn from_json(v: &Value) -> Result<Arc<Self>> {
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| Error::schema("/k", "expected a non-negative integer"))? as u32;
        let fs = v.get("factors").and_then(Value::as_array).ok_or_else(|| Error::schema("/factors", "expected an array"))?;
        let mut a = Vec::new();
        let mut q = None;
        for (i, f) in fs.iter().enumerate() {
            a.push(f.get("a").and_then(Value::as_i64).ok_or_else(|| Error::schema(format!("/factors/{i}/a"), "expected an integer"))?);
            let qi = f.get("q").and_then(Value::as_u64).ok_or_else(|| Error::schema(format!("/factors/{i}/q"), "expected an integer"))?;
            if q.is_some_and(|q0| q0 != qi) {
                return Err(Error::schema(format!("/factors/{i}/q"), "all factors must share q"));
            }
            q = Some(qi);
        }
        let model = Self::new(a, q.ok_or_else(|| Error::schema("/factors", "empty"))?, k).map_err(|e| e.at(""))?;
        if let Some(p) = v.get("p").and_then(Value::as_u64) {
            if p != model.p {
                return Err(Error::schema("/p", "p does not match q"));
            }
        }
        Ok(model)
    }
}

/// Element `(c0 + c1 x)_j` of the model ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoElt {
    model: Arc<EndoModel>,
    c: Vec<[u64; 2]>,
}

impl EndoElt {
    pub fn from_parts(model: &Arc<EndoModel>, c: Vec<[i128; 2]>) -> Result<Self> {
        if c.len() != model.a.len() {
            return Err(Error::InvalidInput("wrong number of factors".into()));
        }
        let m = model.m as i128;
        let c = c.into_iter().map(|[x, y]| [x.rem_euclid(m) as u64, y.rem_euclid(m) as u64]).collect();
        Ok(EndoElt { model: model.clone(), c })
    }

    pub fn scalar(model: &Arc<EndoModel>, s: i128) -> Self {
        Self::from_parts(model, vec![[s, 0]; model.a.len()]).unwrap()
    }

    pub fn one(model: &Arc<EndoModel>) -> Self {
        Self::scalar(model, 1)
    }

    /// Frobenius.
    pub fn frobenius(model: &Arc<EndoModel>) -> Self {
        let c = (0..model.a.len())
            .map(|j| if model.dual[j] { [model.a[j] as i128, -1] } else { [0, 1] })
            .collect();
        Self::from_parts(model, c).unwrap()
    }

    /// Verschiebung, `q / F` on each factor.
    pub fn verschiebung(model: &Arc<EndoModel>) -> Self {
        let c = (0..model.a.len())
            .map(|j| if model.dual[j] { [0, 1] } else { [model.a[j] as i128, -1] })
            .collect();
        Self::from_parts(model, c).unwrap()
    }

    pub fn parts(&self) -> &[[u64; 2]] {
        &self.c
    }

    pub fn add(&self, o: &Self) -> Self {
        let m = self.model.m;
        let c = self.c.iter().zip(&o.c).map(|(x, y)| [addmod(x[0], y[0], m), addmod(x[1], y[1], m)]).collect();
        EndoElt { model: self.model.clone(), c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let m = self.model.m;
        let c = self.c.iter().zip(&o.c).map(|(x, y)| [submod(x[0], y[0], m), submod(x[1], y[1], m)]).collect();
        EndoElt { model: self.model.clone(), c }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let md = &self.model;
        let m = md.m;
        let q = md.q % m;
        let c = self
            .c
            .iter()
            .zip(&o.c)
            .enumerate()
            .map(|(j, (x, y))| {
                // x^2 = a x - q
                let a = md.a_mod(j);
                let x2 = mulmod(x[1], y[1], m);
                let c0 = submod(mulmod(x[0], y[0], m), mulmod(x2, q, m), m);
                let c1 = addmod(addmod(mulmod(x[0], y[1], m), mulmod(x[1], y[0], m), m), mulmod(x2, a, m), m);
                [c0, c1]
            })
            .collect();
        EndoElt { model: md.clone(), c }
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut acc = Self::one(&self.model);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    pub fn try_invert(&self) -> Result<Self> {
        invert_regular(self)
    }

    /// Values at the unit root and at the non-unit root of each factor.
    pub fn eval_roots(&self) -> Vec<(u64, u64)> {
        let m = self.model.m;
        self.c
            .iter()
            .zip(self.model.roots())
            .map(|(x, (al, be))| (addmod(x[0], mulmod(x[1], al, m), m), addmod(x[0], mulmod(x[1], be, m), m)))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!(self.c)
    }
}

impl FiniteAlgebra for EndoElt {
    fn dim(&self) -> usize {
        2 * self.c.len()
    }
    fn coord_vec(&self) -> Vec<u64> {
        self.c.iter().flatten().copied().collect()
    }
    fn with_coords(&self, c: Vec<u64>) -> Self {
        EndoElt { model: self.model.clone(), c: c.chunks(2).map(|x| [x[0], x[1]]).collect() }
    }
    fn alg_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn alg_one(&self) -> Self {
        Self::one(&self.model)
    }
    fn prime(&self) -> u64 {
        self.model.p
    }
    fn precision(&self) -> u32 {
        self.model.k
    }
}

#[derive(Clone, Debug)]
pub struct Idempotents {
    pub e_f: EndoElt,
    pub e_v: EndoElt,
    /// Exponent `phi(p^k) j!` at which the iteration route stabilized.
    pub iteration_exponent: u128,
    pub routes_agree: bool,
}

/// `e_F`, `e_V` by CRT from the Hensel roots, cross-checked against the
/// limit of `F^{phi(p^k) j!}`.
pub fn idempotents(model: &Arc<EndoModel>) -> Result<Idempotents> {
    let m = model.m;
    let roots = model.roots();
    let f = EndoElt::frobenius(model);
    let mut parts = Vec::with_capacity(roots.len());
    for (j, &(al, be)) in roots.iter().enumerate() {
        // F is a unit at the root r1 and topologically nilpotent at r2
        let (r1, r2) = if model.dual[j] { (be, al) } else { (al, be) };
        let d = invmod(submod(r1, r2, m), m).ok_or(Error::NotOrdinary)?;
        parts.push([(m - mulmod(r2, d, m)) as i128 % m as i128, d as i128]);
    }
    let e_f = EndoElt::from_parts(model, parts)?;
    let e_v = EndoElt::one(model).sub(&e_f);

    let phi = (model.m / model.p * (model.p - 1)) as u128;
    let mut exp = phi;
    let mut prev = f.pow(exp);
    let mut j = 2u128;
    loop {
        let next_exp = exp.checked_mul(j).ok_or_else(|| Error::PrecisionExhausted("iteration exponent overflow".into()))?;
        let next = f.pow(next_exp);
        if next == prev {
            break;
        }
        (exp, prev) = (next_exp, next);
        j += 1;
    }
    let routes_agree = prev == e_f && e_f.mul(&e_f) == e_f && e_f.mul(&e_v) == EndoElt::scalar(model, 0);
    Ok(Idempotents { e_f, e_v, iteration_exponent: exp, routes_agree })
}

/// Whether `F^m + V^m` is a unit.
pub fn fv_unit_check(model: &Arc<EndoModel>, m: u32) -> bool {
    let f = EndoElt::frobenius(model).pow(m as u128);
    let v = EndoElt::verschiebung(model).pow(m as u128);
    f.add(&v).try_invert().is_ok()
}

/// `Z/p^{e_1} x ... x Z/p^{e_r}` with `F` acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteFModule {
    p: u64,
    exps: Vec<u32>,
    f: Vec<Vec<i128>>,
}

impl FiniteFModule {
    pub fn new(p: u64, exps: Vec<u32>, f: Vec<Vec<i128>>) -> Result<Self> {
        let r = exps.len();
        if f.len() != r || f.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidInput("F must be a square matrix of the module's rank".into()));
        }
        if exps.iter().any(|&e| e > 20) {
            return Err(Error::TooLarge("cyclic factor too large".into()));
        }
        let ord = |e: u32| (p as i128).pow(e);
        let f: Vec<Vec<i128>> =
            f.iter().enumerate().map(|(i, row)| row.iter().map(|&x| x.rem_euclid(ord(exps[i]))).collect()).collect();
        // column j must be killed by p^{e_j}
        for j in 0..r {
            for i in 0..r {
                if (f[i][j] * ord(exps[j])) % ord(exps[i]) != 0 {
                    return Err(Error::InvalidInput(format!("F is not well defined on factor {j}")));
                }
            }
        }
        Ok(FiniteFModule { p, exps, f })
    }

    /// Parses `{"orders": [p^e, ...], "F": [[...]]}`.
    pub fn from_json(p: u64, v: &Value) -> Result<Self> {
        let orders = v.get("orders").and_then(Value::as_array).ok_or_else(|| Error::schema("/orders", "expected an array"))?;
        let mut exps = Vec::new();
        for (i, o) in orders.iter().enumerate() {
            let mut n = o.as_u64().ok_or_else(|| Error::schema(format!("/orders/{i}"), "expected an integer"))?;
            let mut e = 0;
            while n > 1 && n % p == 0 {
                n /= p;
                e += 1;
            }
            if n != 1 {
                return Err(Error::schema(format!("/orders/{i}"), "order must be a power of p"));
            }
            exps.push(e);
        }
        let rows = v.get("F").and_then(Value::as_array).ok_or_else(|| Error::schema("/F", "expected a matrix"))?;
        let f = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.as_array()
                    .ok_or_else(|| Error::schema(format!("/F/{i}"), "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(j, x)| x.as_i64().map(i128::from).ok_or_else(|| Error::schema(format!("/F/{i}/{j}"), "expected an integer")))
                    .collect()
            })
            .collect::<Result<Vec<Vec<i128>>>>()?;
        Self::new(p, exps, f).map_err(|e| e.at("/F"))
    }

    pub fn to_json(&self) -> Value {
        json!({"orders": self.exps.iter().map(|&e| self.p.pow(e)).collect::<Vec<_>>(), "F": self.f.iter().map(|r| r.iter().map(|x| *x as i64).collect::<Vec<_>>()).collect::<Vec<_>>()})
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    /// `log_p |W|`.
    pub fn length(&self) -> u32 {
        self.exps.iter().sum()
    }

    fn ord(&self, i: usize) -> i128 {
        (self.p as i128).pow(self.exps[i])
    }

    fn mat_mul(&self, a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| (0..r).map(|l| a[i][l] * b[l][j]).sum::<i128>().rem_euclid(self.ord(i))).collect())
            .collect()
    }

    fn identity(&self) -> Vec<Vec<i128>> {
        let r = self.rank();
        (0..r).map(|i| (0..r).map(|j| i128::from(i == j)).collect()).collect()
    }

    fn mat_pow(&self, mut e: u32) -> Vec<Vec<i128>> {
        let mut acc = self.identity();
        let mut b = self.f.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mat_mul(&acc, &b);
            }
            b = self.mat_mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// `sum_i c_i F^i` as a matrix.
    fn poly_at_f(&self, c: &[i128]) -> Vec<Vec<i128>> {
        let r = self.rank();
        let mut acc = vec![vec![0i128; r]; r];
        for &ci in c.iter().rev() {
            acc = self.mat_mul(&acc, &self.f);
            for (i, row) in acc.iter_mut().enumerate() {
                row[i] = (row[i] + ci).rem_euclid(self.ord(i));
            }
        }
        acc
    }

    /// The subgroup generated by the columns of `mat`, as the HNF of its
    /// preimage lattice in `Z^r`.
    fn image(&self, mat: &[Vec<i128>]) -> Subgroup {
        let r = self.rank();
        let mut rows: Vec<Vec<i128>> = (0..r).map(|j| (0..r).map(|i| mat[i][j]).collect()).collect();
        for i in 0..r {
            let mut v = vec![0i128; r];
            v[i] = self.ord(i);
            rows.push(v);
        }
        Subgroup { hnf: hnf(&rows), full: self.exps.clone(), p: self.p }
    }
}

/// Subgroup of a finite module, canonical through the HNF of its lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    hnf: Vec<Vec<i128>>,
    full: Vec<u32>,
    p: u64,
}

impl Subgroup {
    /// `log_p` of the order.
    pub fn length(&self) -> u32 {
        let det: i128 = (0..self.hnf.len()).map(|i| self.hnf[i][i]).product();
        let total: u32 = self.full.iter().sum();
        let mut d = det;
        let mut v = 0;
        while d > 1 && d % self.p as i128 == 0 {
            d /= self.p as i128;
            v += 1;
        }
        total - v
    }

    pub fn to_json(&self) -> Value {
        json!({"hnf": self.hnf.iter().map(|r| r.iter().map(|x| *x as i64).collect::<Vec<_>>()).collect::<Vec<_>>(), "log_order": self.length()})
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub fw: Subgroup,
    pub vw: Subgroup,
    pub stable_image: Subgroup,
    pub stabilized_at: u32,
    pub routes_agree: bool,
    pub direct_sum: bool,
    pub f_nilpotent_on_vw: bool,
}

impl Decomposition {
    pub fn pass(&self) -> bool {
        self.routes_agree && self.direct_sum && self.f_nilpotent_on_vw
    }

    pub fn to_json(&self) -> Value {
        json!({
            "FW": self.fw.to_json(),
            "VW": self.vw.to_json(),
            "stable_image": self.stable_image.to_json(),
            "stabilized_at": self.stabilized_at,
            "routes_agree": self.routes_agree,
            "direct_sum": self.direct_sum,
            "F_nilpotent_on_VW": self.f_nilpotent_on_vw,
            "pass": self.pass(),
        })
    }
}

fn zpoly_mul(a: &[i128], b: &[i128], m: i128) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y).rem_euclid(m);
        }
    }
    out
}

/// `a mod u` for monic `u`.
fn zpoly_rem(a: &[i128], u: &[i128], m: i128) -> Vec<i128> {
    let mut a = a.to_vec();
    let du = u.len() - 1;
    while a.len() > du {
        let c = a.pop().unwrap();
        let off = a.len() - du;
        for i in 0..du {
            a[off + i] = (a[off + i] - c * u[i]).rem_euclid(m);
        }
    }
    a.resize(du, 0);
    a
}

/// `(Z/p^K)[x]/(u)` for monic `u`, to invert `N mod U`.
#[derive(Clone)]
struct Quot {
    u: Vec<i128>,
    p: u64,
    k: u32,
    c: Vec<i128>,
}

impl FiniteAlgebra for Quot {
    fn dim(&self) -> usize {
        self.u.len() - 1
    }
    fn coord_vec(&self) -> Vec<u64> {
        self.c.iter().map(|&x| x as u64).collect()
    }
    fn with_coords(&self, c: Vec<u64>) -> Self {
        Quot { c: c.into_iter().map(|x| x as i128).collect(), ..self.clone() }
    }
    fn alg_mul(&self, o: &Self) -> Self {
        let m = (self.p as i128).pow(self.k);
        let c = zpoly_rem(&zpoly_mul(&self.c, &o.c, m), &self.u, m);
        Quot { c, ..self.clone() }
    }
    fn alg_one(&self) -> Self {
        let mut c = vec![0i128; self.dim()];
        c[0] = 1;
        Quot { c, ..self.clone() }
    }
    fn prime(&self) -> u64 {
        self.p
    }
    fn precision(&self) -> u32 {
        self.k
    }
}

/// The polynomial `E(x) = N (N^{-1} mod U)` with `h = U N`, `U` carrying
/// the unit roots; `E(F)` projects onto the part where `F` is invertible.
fn projector(model: &EndoModel, k: u32) -> Result<Vec<i128>> {
    let sub = EndoModel::new(model.a.clone(), model.q, k)?;
    let m = (sub.p as i128).pow(k);
    let mut u = vec![1i128];
    let mut n = vec![1i128];
    for (al, be) in sub.roots() {
        u = zpoly_mul(&u, &[-(al as i128), 1], m);
        n = zpoly_mul(&n, &[-(be as i128), 1], m);
    }
    let nq = Quot { u: u.clone(), p: sub.p, k, c: zpoly_rem(&n, &u, m) };
    let inv = invert_regular(&nq).map_err(|_| Error::NotOrdinary)?;
    Ok(zpoly_mul(&n, &inv.c, m))
}

/// `FW` as the stable image of `F`, checked against `E(F) W`; `VW` as
/// `(1 - E)(F) W`.
pub fn decompose_module(w: &FiniteFModule, model: &EndoModel) -> Result<Decomposition> {
    if w.p != model.p {
        return Err(Error::ContextMismatch);
    }
    let r = w.rank();
    let len = w.length();
    if r == 0 || len == 0 {
        let empty = Subgroup { hnf: vec![], full: w.exps.clone(), p: w.p };
        let empty = if r == 0 { empty } else { w.image(&vec![vec![0; r]; r]) };
        return Ok(Decomposition {
            fw: empty.clone(),
            vw: empty.clone(),
            stable_image: empty,
            stabilized_at: 0,
            routes_agree: true,
            direct_sum: true,
            f_nilpotent_on_vw: true,
        });
    }
    let kmax = *w.exps.iter().max().unwrap();
    // h(F) = 0
    let mut h = vec![1i128];
    let mq = (w.p as i128).pow(kmax);
    for &a in &model.a {
        h = zpoly_mul(&h, &[model.q as i128, -(a as i128), 1], mq);
    }
    if w.poly_at_f(&h).iter().flatten().any(|&x| x != 0) {
        return Err(Error::NotModelModule);
    }
    // stable image
    let mut prev = w.image(&w.identity());
    let mut stabilized_at = 0;
    for j in 1..=len + 1 {
        let img = w.image(&w.mat_pow(j));
        if img == prev {
            stabilized_at = j - 1;
            break;
        }
        prev = img;
    }
    let stable = prev;
    let e = projector(model, kmax)?;
    let e_mat = w.poly_at_f(&e);
    let mut one_minus: Vec<i128> = e.iter().map(|x| -x).collect();
    one_minus[0] += 1;
    let v_mat = w.poly_at_f(&one_minus);
    let fw = w.image(&e_mat);
    let vw = w.image(&v_mat);
    let direct_sum = fw.length() + vw.length() == len && {
        let mut rows = fw.hnf.clone();
        rows.extend(vw.hnf.iter().cloned());
        w.image(&w.identity()) == Subgroup { hnf: hnf(&rows), full: w.exps.clone(), p: w.p }
    };
    let fl = w.mat_mul(&w.mat_pow(len), &v_mat);
    let f_nilpotent_on_vw = fl.iter().flatten().all(|&x| x == 0);
    Ok(Decomposition { routes_agree: fw == stable, fw, vw, stable_image: stable, stabilized_at, direct_sum, f_nilpotent_on_vw })
}

/// A random direct sum of the pieces `R/p^e` (companion of one model
/// factor), `R/(p^e, x - alpha)` and `R/(p^e, x - beta)`, of rank at most 3
/// and exponents at most 3.
pub fn random_model_module<G: Rng>(model: &EndoModel, rng: &mut G) -> Result<FiniteFModule> {
    let p = model.p;
    let mut exps = Vec::new();
    let mut blocks: Vec<Vec<Vec<i128>>> = Vec::new();
    let target_rank = rng.gen_range(1..=3);
    while exps.len() < target_rank {
        let e = rng.gen_range(1..=3u32);
        let sub = EndoModel::new(model.a.clone(), model.q, e)?;
        let j = rng.gen_range(0..model.a.len());
        let (al, be) = sub.roots()[j];
        match rng.gen_range(0..3) {
            0 if exps.len() + 2 <= target_rank => {
                exps.extend([e, e]);
                blocks.push(vec![vec![0, -(model.q as i128)], vec![1, model.a[j] as i128]]);
            }
            1 => {
                exps.push(e);
                blocks.push(vec![vec![al as i128]]);
            }
            _ => {
                exps.push(e);
                blocks.push(vec![vec![be as i128]]);
            }
        }
    }
    let r = exps.len();
    let mut f = vec![vec![0i128; r]; r];
    let mut off = 0;
    for b in &blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                f[off + i][off + j] = x;
            }
        }
        off += b.len();
    }
    FiniteFModule::new(p, exps, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn idempotent_example() {
        let m = EndoModel::new(vec![2], 5, 2).unwrap();
        assert_eq!(m.roots(), vec![(12, 15)]);
        let id = idempotents(&m).unwrap();
        assert_eq!(id.e_f.parts(), &[[5, 8]]);
        assert!(id.routes_agree);
        assert_eq!(id.e_f.eval_roots(), vec![(1, 0)]);
        assert_eq!(EndoModel::new(vec![0], 5, 2).unwrap_err(), Error::NotOrdinary);
    }

    #[test]
    fn dual_swap_exchanges_idempotents() {
        let m = EndoModel::new(vec![1, -1], 2, 6).unwrap();
        let d = m.dual_swap();
        assert_eq!(*d.dual_swap(), *m);
        let (a, b) = (idempotents(&m).unwrap(), idempotents(&d).unwrap());
        assert_eq!(a.e_v.parts(), b.e_f.parts());
        assert!(b.routes_agree);
        assert_eq!(EndoElt::verschiebung(&d).parts(), EndoElt::frobenius(&m).parts());
        let fv = EndoElt::frobenius(&m).mul(&EndoElt::verschiebung(&m));
        assert_eq!(fv, EndoElt::scalar(&m, 2));
    }

    #[test]
    fn fv_units() {
        let m = EndoModel::new(vec![2], 5, 3).unwrap();
        assert!((1..=20).all(|j| fv_unit_check(&m, j)));
        let f2v2 = EndoElt::frobenius(&m).pow(2).add(&EndoElt::verschiebung(&m).pow(2));
        assert_eq!(f2v2, EndoElt::scalar(&m, -6));
    }

    #[test]
    fn diagonal_module() {
        let m = EndoModel::new(vec![2], 5, 2).unwrap();
        let (al, be) = m.roots()[0];
        let w = FiniteFModule::new(5, vec![2, 2], vec![vec![al as i128, 0], vec![0, be as i128]]).unwrap();
        let d = decompose_module(&w, &m).unwrap();
        assert!(d.pass());
        assert_eq!(d.fw.length(), 2);
        let bad = FiniteFModule::new(5, vec![1], vec![vec![1]]).unwrap();
        assert_eq!(decompose_module(&bad, &m).unwrap_err(), Error::NotModelModule);
        let zero = FiniteFModule::new(5, vec![], vec![]).unwrap();
        assert!(decompose_module(&zero, &m).unwrap().pass());
    }

    #[test]
    fn random_modules_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (a, q) in [(2, 5), (1, 2)] {
            let m = EndoModel::new(vec![a], q, 3).unwrap();
            for _ in 0..30 {
                let w = random_model_module(&m, &mut rng).unwrap();
                let d = decompose_module(&w, &m).unwrap();
                assert!(d.pass(), "{} {}", w.to_json(), d.to_json());
            }
        }
    }

    #[test]
    fn image_of_e_f_is_f_to_the_n() {
        for (a, q) in [(2i64, 5u64), (1, 2)] {
            for n in 1..=3u32 {
                let m = EndoModel::new(vec![a], q, n).unwrap();
                let (p, e) = prime_power(q).unwrap();
                let w = FiniteFModule::new(p, vec![e * n, e * n], vec![vec![0, -(q as i128)], vec![1, a as i128]]).unwrap();
                let d = decompose_module(&w, &m).unwrap();
                assert_eq!(w.image(&w.mat_pow(n)), d.fw);
            }
        }
    }
}
