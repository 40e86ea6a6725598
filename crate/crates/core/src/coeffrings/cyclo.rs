use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use super::padic::{PadicContext, PadicValue};
use crate::error::{Error, Result};

/// Integer coefficients of the cyclotomic polynomial `Phi_m`, lowest first.
pub fn cyclotomic_poly(m: u64) -> Vec<i128> {
    // x^m - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![0i128; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = exact_div(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn exact_div(a: &[i128], b: &[i128]) -> Vec<i128> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i128; a.len() - db];
    for top in (db..a.len()).rev() {
        let c = r[top]; // b is monic
        q[top - db] = c;
        for i in 0..=db {
            r[top - db + i] -= c * b[i];
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// `Z[zeta_m]` with its power basis.
#[derive(PartialEq, Eq)]
pub struct CycloRing {
    m: u64,
    phi: Vec<i128>,
}

impl fmt::Debug for CycloRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[zeta_{}]", self.m)
    }
}

impl CycloRing {
    pub fn new(m: u64) -> Arc<Self> {
        assert!(m >= 1);
        Arc::new(CycloRing { m, phi: cyclotomic_poly(m) })
    }
    pub fn order(&self) -> u64 {
        self.m
    }
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }
}

/// An exact element of `Z[zeta_m]`.
#[derive(Clone)]
pub struct CycloInt {
    ring: Arc<CycloRing>,
    c: Vec<i128>,
}

impl fmt::Debug for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@zeta_{}", self.c, self.ring.m)
    }
}

impl PartialEq for CycloInt {
    fn eq(&self, o: &Self) -> bool {
        self.ring.m == o.ring.m && self.c == o.c
    }
}
impl Eq for CycloInt {}

impl CycloInt {
    pub fn zero(ring: &Arc<CycloRing>) -> Self {
        CycloInt { ring: ring.clone(), c: vec![0; ring.degree()] }
    }

    pub fn from_int(ring: &Arc<CycloRing>, n: i128) -> Self {
        let mut v = Self::zero(ring);
        v.c[0] = n;
        v
    }

    pub fn one(ring: &Arc<CycloRing>) -> Self {
        Self::from_int(ring, 1)
    }

    /// `zeta_m^e` for any integer `e`.
    pub fn zeta_pow(ring: &Arc<CycloRing>, e: i64) -> Self {
        let m = ring.m as i64;
        let e = e.rem_euclid(m) as usize;
        let mut raw = vec![0i128; e + 1];
        raw[e] = 1;
        Self::reduce(ring, raw)
    }

    pub fn from_coords(ring: &Arc<CycloRing>, coords: Vec<i128>) -> Result<Self> {
        if coords.len() > ring.degree() {
            return Err(Error::InvalidInput(format!(
                "Z[zeta_{}] has {} coordinates",
                ring.m,
                ring.degree()
            )));
        }
        Ok(Self::reduce(ring, coords))
    }

    fn reduce(ring: &Arc<CycloRing>, mut raw: Vec<i128>) -> Self {
        let d = ring.degree();
        for top in (d..raw.len()).rev() {
            let c = raw[top];
            if c == 0 {
                continue;
            }
            for i in 0..=d {
                raw[top - d + i] -= c * ring.phi[i];
            }
        }
        raw.resize(d, 0);
        CycloInt { ring: ring.clone(), c: raw }
    }

    pub fn ring(&self) -> &Arc<CycloRing> {
        &self.ring
    }
    pub fn order(&self) -> u64 {
        self.ring.m
    }
    pub fn coords(&self) -> &[i128] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// `Some(n)` for rational integers.
    pub fn as_int(&self) -> Option<i128> {
        self.c[1..].iter().all(|&x| x == 0).then_some(self.c[0])
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.ring.m, o.ring.m, "mixing cyclotomic rings");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        CycloInt { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        CycloInt { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        CycloInt { ring: self.ring.clone(), c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, n: i128) -> Self {
        CycloInt { ring: self.ring.clone(), c: self.c.iter().map(|a| a * n).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let d = self.ring.degree();
        let mut raw = vec![0i128; 2 * d - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                raw[i + j] += a * b;
            }
        }
        Self::reduce(&self.ring, raw)
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut r = Self::one(&self.ring);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Exact division by a rational integer, `None` if some coordinate is
    /// not divisible.
    pub fn div_int(&self, n: i128) -> Option<Self> {
        if n == 0 || self.c.iter().any(|&x| x % n != 0) {
            return None;
        }
        Some(CycloInt { ring: self.ring.clone(), c: self.c.iter().map(|&x| x / n).collect() })
    }

    /// Image in `Z[zeta_M]` for a multiple `M` of `m`.
    pub fn lift_to(&self, target: &Arc<CycloRing>) -> Result<Self> {
        if !target.m.is_multiple_of(self.ring.m) {
            return Err(Error::LevelMismatch(target.m));
        }
        let step = (target.m / self.ring.m) as usize;
        let mut raw = vec![0i128; step * self.c.len().max(1)];
        for (i, &a) in self.c.iter().enumerate() {
            raw[i * step] = a;
        }
        Ok(Self::reduce(target, raw))
    }

    /// The Galois conjugate `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        let m = self.ring.m as usize;
        let mut raw = vec![0i128; m];
        for (i, &a) in self.c.iter().enumerate() {
            raw[(m - i) % m] += a;
        }
        Self::reduce(&self.ring, raw)
    }

    /// Root-of-unity test: returns `e` with `self = zeta_m^e`, or `-zeta_m^e`
    /// reported as `(e, -1)`.
    pub fn as_signed_root_of_unity(&self) -> Option<(u64, i8)> {
        for e in 0..self.ring.m {
            let z = Self::zeta_pow(&self.ring, e as i64);
            if z == *self {
                return Some((e, 1));
            }
            if z.neg() == *self {
                return Some((e, -1));
            }
        }
        None
    }

    pub fn to_json(&self) -> Value {
        let coords: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
        json!({"m": self.ring.m, "coords": coords})
    }
}

/// Ring homomorphism `Z[zeta_m] -> ctx` sending `zeta_m` to the distinguished
/// primitive `m`-th root of unity of the context.
pub fn embed_cyclo(x: &CycloInt, ctx: &Arc<PadicContext>) -> Result<PadicValue> {
    let zeta = ctx.root_of_unity(x.order())?;
    let mut acc = PadicValue::zero(ctx);
    let mut power = PadicValue::one(ctx);
    for &c in x.coords() {
        if c != 0 {
            acc = acc.add(&power.scale(c));
        }
        power = power.mul(&zeta);
    }
    Ok(acc)
}

/// Embedding of a whole table of `zeta_m` powers, for repeated evaluation.
pub fn embed_powers(m: u64, ctx: &Arc<PadicContext>) -> Result<Vec<PadicValue>> {
    let zeta = ctx.root_of_unity(m)?;
    let mut out = Vec::with_capacity(m as usize);
    let mut acc = PadicValue::one(ctx);
    for _ in 0..m {
        out.push(acc.clone());
        acc = acc.mul(&zeta);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(9).len() - 1, euler_phi(9) as usize);
    }

    #[test]
    fn gaussian_integer_norm() {
        let r = CycloRing::new(4);
        let one = CycloInt::one(&r);
        let i = CycloInt::zeta_pow(&r, 1);
        assert_eq!(one.add(&i).mul(&one.sub(&i)).as_int(), Some(2));
        assert_eq!(i.pow(2).as_int(), Some(-1));
        assert_eq!(i.conj(), CycloInt::zeta_pow(&r, 3));
    }

    #[test]
    fn lifting_between_levels() {
        let r3 = CycloRing::new(3);
        let r6 = CycloRing::new(6);
        let w = CycloInt::zeta_pow(&r3, 1);
        let w6 = w.lift_to(&r6).unwrap();
        assert_eq!(w6, CycloInt::zeta_pow(&r6, 2));
        assert_eq!(w6.pow(3).as_int(), Some(1));
    }

    #[test]
    fn embedding_respects_ring_structure() {
        let ctx = PadicContext::new(2, 12, vec![0, 1], 2).unwrap();
        let r = CycloRing::new(4);
        assert_eq!(embed_cyclo(&CycloInt::one(&r), &ctx).unwrap(), PadicValue::one(&ctx));
        let z = embed_cyclo(&CycloInt::zeta_pow(&r, 1), &ctx).unwrap();
        assert_eq!(z.pow(4), PadicValue::one(&ctx));
        assert_eq!(z.pow(2), PadicValue::from_i64(&ctx, -1));
        let a = CycloInt::from_coords(&r, vec![1, 1]).unwrap();
        let b = CycloInt::from_coords(&r, vec![1, -1]).unwrap();
        let prod = embed_cyclo(&a, &ctx).unwrap().mul(&embed_cyclo(&b, &ctx).unwrap());
        assert_eq!(prod, PadicValue::from_i64(&ctx, 2));
        let small = PadicContext::base(2, 4).unwrap();
        assert_eq!(embed_cyclo(&a, &small), Err(Error::LevelMismatch(4)));
    }
}
