use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::basefield::{fp_poly, is_prime};
use crate::error::{Error, Result};
use crate::linalg::{addmod, invert_regular, mulmod, submod, val_p, FiniteAlgebra};

/// The ring `(Z/p^k)[x]/(U(x))[y]/(Phi_{p^n}(y))`: an unramified extension of
/// degree `f = deg U` of `Z/p^k`, optionally with a `p^n`-th root of unity.
///
/// Coordinates are indexed `i + f*j` for the monomial `x^i y^j`.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicContext {
    p: u64,
    k: u32,
    modulus: u64,
    unram: Vec<u64>,
    cyclo_level: u32,
    cyclo: Vec<u64>,
}

impl fmt::Debug for PadicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}[x]/{:?}", self.p, self.k, self.unram)?;
        if self.cyclo_level > 0 {
            write!(f, "[zeta_{}^{}]", self.p, self.cyclo_level)?;
        }
        Ok(())
    }
}

impl PadicContext {
    pub fn new(p: u64, k: u32, unram_modulus: Vec<u64>, cyclo_level: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidInput("precision k must be at least 1".into()));
        }
        let modulus = p
            .checked_pow(k)
            .filter(|&m| m < (1u64 << 62))
            .ok_or(Error::PrecisionTooLarge)?;
        let f = unram_modulus.len().saturating_sub(1);
        if f == 0 || unram_modulus[f] != 1 || unram_modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput("unramified modulus must be monic over F_p".into()));
        }
        if !fp_poly::is_irreducible(&unram_modulus, p) {
            return Err(Error::ReducibleModulus(p));
        }
        // Phi_{p^n}(y) = sum_{i<p} y^{i p^{n-1}}
        // level 0 stores y - 1, so y is identified with 1
        let cyclo = if cyclo_level == 0 {
            vec![modulus - 1, 1]
        } else {
            let step = p.pow(cyclo_level - 1) as usize;
            let mut c = vec![0u64; step * (p as usize - 1) + 1];
            for i in 0..p as usize {
                c[i * step] = 1;
            }
            c
        };
        Ok(Arc::new(PadicContext { p, k, modulus, unram: unram_modulus, cyclo_level, cyclo }))
    }

    /// Z/p^k itself.
    pub fn base(p: u64, k: u32) -> Result<Arc<Self>> {
        Self::new(p, k, vec![0, 1], 0)
    }

    /// Unramified layer of degree `f` with the lexicographically least
    /// irreducible modulus.
    pub fn unramified(p: u64, k: u32, f: usize, cyclo_level: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if f == 0 {
            return Err(Error::InvalidInput("degree must be positive".into()));
        }
        let m = if f == 1 { vec![0, 1] } else { fp_poly::least_irreducible(f, p) };
        Self::new(p, k, m, cyclo_level)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    /// `p^k`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn unram_degree(&self) -> usize {
        self.unram.len() - 1
    }
    pub fn unram_modulus(&self) -> &[u64] {
        &self.unram
    }
    pub fn cyclo_level(&self) -> u32 {
        self.cyclo_level
    }
    fn cyclo_degree(&self) -> usize {
        self.cyclo.len() - 1
    }
    pub fn dim(&self) -> usize {
        self.unram_degree() * self.cyclo_degree()
    }

    /// Same ring at a different precision.
    pub fn with_precision(&self, k: u32) -> Result<Arc<Self>> {
        Self::new(self.p, k, self.unram.clone(), self.cyclo_level)
    }

    pub fn to_json(&self) -> Value {
        json!({"p": self.p, "k": self.k, "unram": self.unram, "cyclo_level": self.cyclo_level})
    }
}

/// An element of a [`PadicContext`] ring.
#[derive(Clone)]
pub struct PadicValue {
    ctx: Arc<PadicContext>,
    c: Vec<u64>,
}

impl fmt::Debug for PadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(b) = self.base_value() {
            write!(f, "{b} mod {}^{}", self.ctx.p, self.ctx.k)
        } else {
            write!(f, "{:?} mod {}^{}", self.c, self.ctx.p, self.ctx.k)
        }
    }
}

impl PartialEq for PadicValue {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx) && self.c == other.c
    }
}
impl Eq for PadicValue {}

impl PadicValue {
    pub fn zero(ctx: &Arc<PadicContext>) -> Self {
        PadicValue { ctx: ctx.clone(), c: vec![0; ctx.dim()] }
    }

    pub fn one(ctx: &Arc<PadicContext>) -> Self {
        Self::from_i64(ctx, 1)
    }

    pub fn from_i64(ctx: &Arc<PadicContext>, n: i64) -> Self {
        Self::from_i128(ctx, n as i128)
    }

    pub fn from_i128(ctx: &Arc<PadicContext>, n: i128) -> Self {
        let mut v = Self::zero(ctx);
        v.c[0] = n.rem_euclid(ctx.modulus as i128) as u64;
        v
    }

    /// Coordinates are reduced mod p^k; length must equal the ring dimension.
    pub fn from_coords(ctx: &Arc<PadicContext>, coords: Vec<u64>) -> Result<Self> {
        if coords.len() != ctx.dim() {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                ctx.dim(),
                coords.len()
            )));
        }
        let m = ctx.modulus;
        Ok(PadicValue { ctx: ctx.clone(), c: coords.into_iter().map(|x| x % m).collect() })
    }

    /// The generator of the unramified layer (class of `x`).
    pub fn unram_gen(ctx: &Arc<PadicContext>) -> Self {
        let mut v = Self::zero(ctx);
        if ctx.unram_degree() > 1 {
            v.c[1] = 1;
        } else {
            // x = -U_0 when U = x + U_0
            v.c[0] = (ctx.modulus - ctx.unram[0] % ctx.modulus) % ctx.modulus;
        }
        v
    }

    /// The distinguished primitive `p^n`-th root of unity (class of `y`).
    pub fn cyclo_gen(ctx: &Arc<PadicContext>) -> Self {
        if ctx.cyclo_level == 0 {
            return Self::one(ctx);
        }
        let mut v = Self::zero(ctx);
        v.c[ctx.unram_degree()] = 1;
        v
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn coords(&self) -> &[u64] {
        &self.c
    }

    /// `Some(n)` when the value lies in Z/p^k.
    pub fn base_value(&self) -> Option<u64> {
        self.c[1..].iter().all(|&x| x == 0).then_some(self.c[0])
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    fn check(&self, o: &Self) {
        assert!(
            Arc::ptr_eq(&self.ctx, &o.ctx) || self.ctx == o.ctx,
            "mixing p-adic values from different contexts"
        );
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let m = self.ctx.modulus;
        let c = self.c.iter().zip(&o.c).map(|(a, b)| addmod(*a, *b, m)).collect();
        PadicValue { ctx: self.ctx.clone(), c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        let m = self.ctx.modulus;
        let c = self.c.iter().zip(&o.c).map(|(a, b)| submod(*a, *b, m)).collect();
        PadicValue { ctx: self.ctx.clone(), c }
    }

    pub fn neg(&self) -> Self {
        let m = self.ctx.modulus;
        PadicValue { ctx: self.ctx.clone(), c: self.c.iter().map(|a| submod(0, *a, m)).collect() }
    }

    pub fn scale(&self, n: i128) -> Self {
        let m = self.ctx.modulus;
        let s = n.rem_euclid(m as i128) as u64;
        PadicValue { ctx: self.ctx.clone(), c: self.c.iter().map(|a| mulmod(*a, s, m)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let ctx = &self.ctx;
        let (f, e, m) = (ctx.unram_degree(), ctx.cyclo_degree(), ctx.modulus);
        if f == 1 && e == 1 {
            return PadicValue { ctx: ctx.clone(), c: vec![mulmod(self.c[0], o.c[0], m)] };
        }
        // full product in x (degree < 2f-1) and y (degree < 2e-1)
        let (fx, ey) = (2 * f - 1, 2 * e - 1);
        let mut acc = vec![0u128; fx * ey];
        let mm = m as u128;
        for j1 in 0..e {
            for i1 in 0..f {
                let a = self.c[i1 + f * j1];
                if a == 0 {
                    continue;
                }
                for j2 in 0..e {
                    for i2 in 0..f {
                        let b = o.c[i2 + f * j2];
                        if b == 0 {
                            continue;
                        }
                        let slot = &mut acc[(i1 + i2) + fx * (j1 + j2)];
                        *slot = (*slot + a as u128 * b as u128) % mm;
                    }
                }
            }
        }
        let mut acc: Vec<u64> = acc.into_iter().map(|x| x as u64).collect();
        // reduce y mod Phi (monic)
        for j in (e..ey).rev() {
            for i in 0..fx {
                let t = acc[i + fx * j];
                if t == 0 {
                    continue;
                }
                acc[i + fx * j] = 0;
                for (d, &cd) in ctx.cyclo[..e].iter().enumerate() {
                    if cd != 0 {
                        let slot = &mut acc[i + fx * (j - e + d)];
                        *slot = submod(*slot, mulmod(t, cd, m), m);
                    }
                }
            }
        }
        // reduce x mod U (monic)
        let mut out = vec![0u64; f * e];
        for j in 0..e {
            let row = &mut acc[fx * j..fx * (j + 1)];
            for i in (f..fx).rev() {
                let t = row[i];
                if t == 0 {
                    continue;
                }
                row[i] = 0;
                for (d, &ud) in ctx.unram[..f].iter().enumerate() {
                    if ud != 0 {
                        row[i - f + d] = submod(row[i - f + d], mulmod(t, ud, m), m);
                    }
                }
            }
            out[f * j..f * (j + 1)].copy_from_slice(&row[..f]);
        }
        PadicValue { ctx: ctx.clone(), c: out }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = Self::one(&self.ctx);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    /// `self^e` for signed `e`; negative exponents need a unit.
    pub fn pow_signed(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    /// Image in the residue field `F_p[x]/(U)` (substituting `y = 1`).
    pub fn residue(&self) -> Vec<u64> {
        let (f, e, p) = (self.ctx.unram_degree(), self.ctx.cyclo_degree(), self.ctx.p);
        (0..f).map(|i| (0..e).map(|j| self.c[i + f * j] % p).sum::<u64>() % p).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.residue().iter().any(|&x| x != 0)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit);
        }
        if self.ctx.dim() == 1 {
            let inv = crate::linalg::invmod(self.c[0], self.ctx.modulus).ok_or(Error::NotUnit)?;
            return Ok(PadicValue { ctx: self.ctx.clone(), c: vec![inv] });
        }
        invert_regular(self)
    }

    /// Least p-adic valuation among the coordinates (a lower bound for the
    /// valuation of the element measured in powers of p).
    pub fn coord_valuation(&self) -> u32 {
        let (p, k) = (self.ctx.p, self.ctx.k);
        self.c.iter().map(|&x| val_p(x, p, k)).min().unwrap_or(k)
    }

    /// Reduction to a context with the same tower at lower precision.
    pub fn reduce_to(&self, ctx: &Arc<PadicContext>) -> Result<Self> {
        if ctx.p != self.ctx.p
            || ctx.unram != self.ctx.unram
            || ctx.cyclo_level != self.ctx.cyclo_level
            || ctx.k > self.ctx.k
        {
            return Err(Error::ContextMismatch);
        }
        let m = ctx.modulus;
        Ok(PadicValue { ctx: ctx.clone(), c: self.c.iter().map(|x| x % m).collect() })
    }

    /// Divides by `p^e` when every coordinate is divisible by it; the result
    /// lives at precision `k - e`.
    pub fn div_p_pow(&self, e: u32) -> Result<Self> {
        if e == 0 {
            return Ok(self.clone());
        }
        if e >= self.ctx.k || self.coord_valuation() < e {
            return Err(Error::NotUnit);
        }
        let ctx = self.ctx.with_precision(self.ctx.k - e)?;
        let d = self.ctx.p.pow(e);
        Ok(PadicValue { c: self.c.iter().map(|x| x / d).collect(), ctx })
    }

    pub fn to_json(&self) -> Value {
        let coords: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
        json!({"ctx": self.ctx.to_json(), "coords": coords})
    }
}

impl FiniteAlgebra for PadicValue {
    fn dim(&self) -> usize {
        self.ctx.dim()
    }
    fn coord_vec(&self) -> Vec<u64> {
        self.c.clone()
    }
    fn with_coords(&self, c: Vec<u64>) -> Self {
        PadicValue { ctx: self.ctx.clone(), c }
    }
    fn alg_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn alg_one(&self) -> Self {
        PadicValue::one(&self.ctx)
    }
    fn prime(&self) -> u64 {
        self.ctx.p
    }
    fn precision(&self) -> u32 {
        self.ctx.k
    }
}

/// Multiplicative order of a residue-field element, given as coordinates
/// over F_p in a `k = 1` context.
fn residue_order(x: &PadicValue, bound: u64) -> Option<u64> {
    let one = PadicValue::one(&x.ctx);
    let mut acc = x.clone();
    for n in 1..=bound {
        if acc == one {
            return Some(n);
        }
        acc = acc.mul(x);
    }
    None
}

impl PadicContext {
    /// Size of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.unram_degree() as u32)
    }

    /// The distinguished primitive `m`-th root of unity.
    ///
    /// The p-power part is a power of the cyclotomic generator. The part of
    /// order prime to p is the Teichmüller lift of the residue-field element
    /// of that order with the least index, indices read as base-p numbers in
    /// the unramified coordinates.
    pub fn root_of_unity(self: &Arc<Self>, m: u64) -> Result<PadicValue> {
        if m == 0 {
            return Err(Error::InvalidInput("root of unity of order 0".into()));
        }
        let p = self.p;
        let (mut pp, mut e) = (1u64, 0u32);
        let mut mp = m;
        while mp.is_multiple_of(p) {
            mp /= p;
            pp *= p;
            e += 1;
        }
        if e > self.cyclo_level {
            return Err(Error::LevelMismatch(m));
        }
        let big = self.residue_size();
        if !(big - 1).is_multiple_of(mp) {
            return Err(Error::LevelMismatch(m));
        }
        let zeta_p = if e == 0 {
            PadicValue::one(self)
        } else {
            PadicValue::cyclo_gen(self).pow(p.pow(self.cyclo_level - e))
        };
        let zeta_m = if mp == 1 {
            PadicValue::one(self)
        } else {
            self.teichmuller_root(mp)?
        };
        if e == 0 {
            return Ok(zeta_m);
        }
        if mp == 1 {
            return Ok(zeta_p);
        }
        // zeta_m = zeta_pp^a * zeta_mp^b with a*mp + b*pp = 1
        let a = crate::linalg::invmod(mp % pp, pp).unwrap();
        let b = crate::linalg::invmod(pp % mp, mp).unwrap();
        Ok(zeta_p.pow(a).mul(&zeta_m.pow(b)))
    }

    fn teichmuller_root(self: &Arc<Self>, order: u64) -> Result<PadicValue> {
        let f = self.unram_degree();
        let res_ctx = PadicContext::new(self.p, 1, self.unram.clone(), 0)?;
        let big = self.residue_size();
        for idx in 1..big {
            let mut coords = Vec::with_capacity(f);
            let mut t = idx;
            for _ in 0..f {
                coords.push(t % self.p);
                t /= self.p;
            }
            let r = PadicValue::from_coords(&res_ctx, coords.clone())?;
            if residue_order(&r, order) == Some(order) {
                let mut full = vec![0u64; self.dim()];
                full[..f].copy_from_slice(&coords);
                let mut z = PadicValue { ctx: self.clone(), c: full };
                for _ in 0..self.k {
                    z = z.pow(big);
                }
                return Ok(z);
            }
        }
        Err(Error::LevelMismatch(order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_ring_arithmetic() {
        let ctx = PadicContext::base(2, 4).unwrap();
        let a = PadicValue::from_i64(&ctx, 11);
        assert_eq!(a.inverse().unwrap().base_value(), Some(3));
        assert_eq!(PadicValue::from_i64(&ctx, -1).base_value(), Some(15));
        assert_eq!(PadicValue::from_i64(&ctx, 6).inverse(), Err(Error::NotUnit));
    }

    #[test]
    fn zeta4_relations() {
        let ctx = PadicContext::new(2, 10, vec![0, 1], 2).unwrap();
        let z = PadicValue::cyclo_gen(&ctx);
        assert_eq!(z.pow(4), PadicValue::one(&ctx));
        assert_eq!(z.pow(2), PadicValue::from_i64(&ctx, -1));
        let one = PadicValue::one(&ctx);
        assert_eq!(one.add(&z).mul(&one.sub(&z)), PadicValue::from_i64(&ctx, 2));
        // 1 - zeta is not a unit, 1 + 2 zeta is
        assert!(!one.sub(&z).is_unit());
        let u = one.add(&z.scale(2));
        assert_eq!(u.mul(&u.inverse().unwrap()), one);
    }

    #[test]
    fn teichmuller_cube_root_over_z2() {
        let ctx = PadicContext::unramified(2, 8, 2, 0).unwrap();
        let w = ctx.root_of_unity(3).unwrap();
        let one = PadicValue::one(&ctx);
        assert_eq!(w.pow(3), one);
        assert_ne!(w, one);
        // 1 + w + w^2 = 0
        assert!(one.add(&w).add(&w.mul(&w)).is_zero());
    }

    #[test]
    fn mixed_order_root() {
        let ctx = PadicContext::unramified(2, 6, 2, 2).unwrap();
        let z = ctx.root_of_unity(12).unwrap();
        let one = PadicValue::one(&ctx);
        assert_eq!(z.pow(12), one);
        assert_ne!(z.pow(6), one);
        assert_ne!(z.pow(4), one);
        assert!(ctx.root_of_unity(5).is_err());
        assert!(ctx.root_of_unity(8).is_err());
    }

    #[test]
    fn unramified_inverse_via_regular_representation() {
        let ctx = PadicContext::unramified(3, 5, 2, 1).unwrap();
        let x = PadicValue::from_coords(&ctx, vec![1, 2, 4, 7]).unwrap();
        if x.is_unit() {
            assert_eq!(x.mul(&x.inverse().unwrap()), PadicValue::one(&ctx));
        }
        let y = PadicValue::from_coords(&ctx, vec![1, 0, 1, 0]).unwrap();
        assert_eq!(PadicValue::from_coords(&ctx, vec![2, 0, 1, 0]).unwrap().inverse(), Err(Error::NotUnit));
        assert_eq!(y.mul(&y.inverse().unwrap()), PadicValue::one(&ctx));
    }
}
