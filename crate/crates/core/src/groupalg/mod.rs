//! Group rings of finite abelian groups and truncated power series over them.

mod series;

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::coeffrings::{embed_powers, CycloInt, CycloRing, PadicContext, PadicValue};
use crate::error::{Error, Result};
use crate::linalg::{invert_regular, FiniteAlgebra};

pub use series::GroupSeries;

/// Coefficient rings a group ring can be built over.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, n: i128) -> Self;
    fn radd(&self, o: &Self) -> Self;
    fn rsub(&self, o: &Self) -> Self;
    fn rmul(&self, o: &Self) -> Self;
    fn rneg(&self) -> Self;
    fn ris_zero(&self) -> bool;
    /// Inverse when the value is a unit the ring can invert.
    fn rinv(&self) -> Option<Self>;
    fn rjson(&self) -> Value;
}

impl Coeff for i128 {
    fn zero_like(&self) -> Self {
        0
    }
    fn one_like(&self) -> Self {
        1
    }
    fn int_like(&self, n: i128) -> Self {
        n
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn ris_zero(&self) -> bool {
        *self == 0
    }
    fn rinv(&self) -> Option<Self> {
        (self.abs() == 1).then_some(*self)
    }
    fn rjson(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl Coeff for CycloInt {
    fn zero_like(&self) -> Self {
        CycloInt::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        CycloInt::one(self.ring())
    }
    fn int_like(&self, n: i128) -> Self {
        CycloInt::from_int(self.ring(), n)
    }
    fn radd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn rsub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn rmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn ris_zero(&self) -> bool {
        self.is_zero()
    }
    fn rinv(&self) -> Option<Self> {
        // only signed roots of unity are inverted exactly
        let (e, s) = self.as_signed_root_of_unity()?;
        let z = CycloInt::zeta_pow(self.ring(), -(e as i64));
        Some(if s < 0 { z.neg() } else { z })
    }
    fn rjson(&self) -> Value {
        self.to_json()
    }
}

impl Coeff for PadicValue {
    fn zero_like(&self) -> Self {
        PadicValue::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        PadicValue::one(self.ctx())
    }
    fn int_like(&self, n: i128) -> Self {
        PadicValue::from_i128(self.ctx(), n)
    }
    fn radd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn rsub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn rmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn ris_zero(&self) -> bool {
        self.is_zero()
    }
    fn rinv(&self) -> Option<Self> {
        self.inverse().ok()
    }
    fn rjson(&self) -> Value {
        self.to_json()
    }
}

/// `Z/c_1 x ... x Z/c_r`; the first `h_split` factors form the Gamma-part,
/// the rest the H-part of order prime to p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinAbGroup {
    orders: Vec<u64>,
    h_split: usize,
    strides: Vec<usize>,
    order: usize,
}

/// Group elements are exponent vectors.
pub type GrpElt = Vec<u64>;

/// Bound on group orders handled with dense arrays.
pub const MAX_GROUP_ORDER: usize = 1 << 16;

impl FinAbGroup {
    pub fn new(orders: Vec<u64>, h_split: usize) -> Result<Arc<Self>> {
        if orders.contains(&0) {
            return Err(Error::InvalidInput("cyclic orders must be positive".into()));
        }
        if h_split > orders.len() {
            return Err(Error::InvalidInput("h_split exceeds the number of factors".into()));
        }
        let mut strides = Vec::with_capacity(orders.len());
        let mut order: usize = 1;
        for &c in &orders {
            strides.push(order);
            order = order
                .checked_mul(c as usize)
                .filter(|&o| o <= MAX_GROUP_ORDER)
                .ok_or_else(|| Error::TooLarge(format!("group of order above {MAX_GROUP_ORDER}")))?;
        }
        Ok(Arc::new(FinAbGroup { orders, h_split, strides, order }))
    }

    /// A group with no H-part.
    pub fn gamma(orders: Vec<u64>) -> Result<Arc<Self>> {
        let r = orders.len();
        Self::new(orders, r)
    }

    pub fn trivial() -> Arc<Self> {
        Self::new(vec![], 0).unwrap()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }
    pub fn h_split(&self) -> usize {
        self.h_split
    }
    pub fn rank(&self) -> usize {
        self.orders.len()
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn h_orders(&self) -> &[u64] {
        &self.orders[self.h_split..]
    }

    /// The Gamma-part as a group of its own.
    pub fn gamma_part(&self) -> Arc<Self> {
        Self::gamma(self.orders[..self.h_split].to_vec()).unwrap()
    }

    pub fn identity(&self) -> GrpElt {
        vec![0; self.rank()]
    }

    pub fn generator(&self, i: usize) -> GrpElt {
        let mut e = self.identity();
        if self.orders[i] > 1 {
            e[i] = 1;
        }
        e
    }

    /// Mixed-radix index, first component least significant.
    pub fn index(&self, e: &[u64]) -> usize {
        e.iter().zip(&self.strides).zip(&self.orders).map(|((&x, &s), &c)| (x % c) as usize * s).sum()
    }

    pub fn element(&self, mut idx: usize) -> GrpElt {
        self.orders
            .iter()
            .map(|&c| {
                let d = idx % c as usize;
                idx /= c as usize;
                d as u64
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = GrpElt> + '_ {
        (0..self.order).map(|i| self.element(i))
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> GrpElt {
        a.iter().zip(b).zip(&self.orders).map(|((&x, &y), &c)| (x + y) % c).collect()
    }

    pub fn neg(&self, a: &[u64]) -> GrpElt {
        a.iter().zip(&self.orders).map(|(&x, &c)| (c - x % c) % c).collect()
    }

    pub fn scale(&self, a: &[u64], n: i64) -> GrpElt {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &c)| ((x as i128 * n as i128).rem_euclid(c as i128)) as u64)
            .collect()
    }

    pub fn reduce(&self, a: &[i128]) -> GrpElt {
        a.iter().zip(&self.orders).map(|(&x, &c)| x.rem_euclid(c as i128) as u64).collect()
    }

    /// Index of the inverse of each element, by index.
    fn neg_table(&self) -> Vec<usize> {
        (0..self.order).map(|i| self.index(&self.neg(&self.element(i)))).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({"orders": self.orders, "h_split": self.h_split})
    }

    pub fn from_json(v: &Value) -> Result<Arc<Self>> {
        let orders = v
            .get("orders")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("group needs \"orders\"".into()))?
            .iter()
            .map(|x| x.as_u64().ok_or_else(|| Error::InvalidInput("orders must be integers".into())))
            .collect::<Result<Vec<u64>>>()?;
        let h = v.get("h_split").and_then(Value::as_u64).map_or(orders.len(), |h| h as usize);
        Self::new(orders, h)
    }
}

/// A character `G -> mu_m` given by exponents on the generators:
/// `omega(g_i) = zeta_m^{exps[i]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    m: u64,
    exps: Vec<u64>,
}

impl Character {
    pub fn new(group: &FinAbGroup, m: u64, exps: Vec<u64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("character values need m >= 1".into()));
        }
        if exps.len() != group.rank() {
            return Err(Error::NotHomomorphism(format!(
                "{} exponents for a group of rank {}",
                exps.len(),
                group.rank()
            )));
        }
        for (i, (&a, &c)) in exps.iter().zip(group.orders()).enumerate() {
            if !(a as u128 * c as u128).is_multiple_of(m as u128) {
                return Err(Error::NotHomomorphism(format!("generator {i} of order {c} sent to zeta_{m}^{a}")));
            }
        }
        Ok(Character { m, exps: exps.into_iter().map(|a| a % m).collect() })
    }

    pub fn trivial(group: &FinAbGroup) -> Self {
        Character { m: 1, exps: vec![0; group.rank()] }
    }

    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    /// `e` with `omega(x) = zeta_m^e`.
    pub fn exponent(&self, x: &[u64]) -> u64 {
        (x.iter().zip(&self.exps).map(|(&a, &b)| a as u128 * b as u128).sum::<u128>() % self.m as u128) as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&a| a == 0)
    }

    /// Exact order of the character.
    pub fn order(&self) -> u64 {
        let mut o = 1u64;
        for &a in &self.exps {
            let oa = self.m / gcd(a, self.m);
            o = o / gcd(o, oa) * oa;
        }
        o
    }

    pub fn inverse(&self) -> Self {
        Character { m: self.m, exps: self.exps.iter().map(|&a| (self.m - a) % self.m).collect() }
    }

    /// The same character with values read in `mu_{m'}` for a multiple `m'`.
    pub fn with_modulus(&self, m2: u64) -> Result<Self> {
        if !m2.is_multiple_of(self.m) {
            return Err(Error::LevelMismatch(m2));
        }
        let s = m2 / self.m;
        Ok(Character { m: m2, exps: self.exps.iter().map(|&a| a * s).collect() })
    }

    /// Restrictions to the first `k` factors and to the rest.
    pub fn split_at(&self, k: usize) -> (Character, Character) {
        let (a, b) = self.exps.split_at(k);
        (Character { m: self.m, exps: a.to_vec() }, Character { m: self.m, exps: b.to_vec() })
    }

    /// `omega o pi` as a character of the source of `pi`.
    pub fn pullback(&self, pi: &Surjection) -> Self {
        let exps = (0..pi.source.rank()).map(|i| self.exponent(&pi.images[i])).collect();
        Character { m: self.m, exps }
    }

    /// The table `zeta_m^j` in Z[zeta_m].
    pub fn cyclo_table(&self) -> Vec<CycloInt> {
        let ring = CycloRing::new(self.m);
        (0..self.m).map(|j| CycloInt::zeta_pow(&ring, j as i64)).collect()
    }

    /// The table `zeta_m^j` in a p-adic context.
    pub fn padic_table(&self, ctx: &Arc<PadicContext>) -> Result<Vec<PadicValue>> {
        embed_powers(self.m, ctx)
    }

    pub fn to_json(&self) -> Value {
        json!({"m": self.m, "exps": self.exps})
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A surjective homomorphism between recorded groups, given by the images
/// of the source generators.
#[derive(Clone, Debug)]
pub struct Surjection {
    source: Arc<FinAbGroup>,
    target: Arc<FinAbGroup>,
    images: Vec<GrpElt>,
    index_map: Vec<usize>,
}

impl Surjection {
    pub fn new(source: Arc<FinAbGroup>, target: Arc<FinAbGroup>, images: Vec<GrpElt>) -> Result<Self> {
        if images.len() != source.rank() || images.iter().any(|x| x.len() != target.rank()) {
            return Err(Error::BadSurjection("image list has the wrong shape".into()));
        }
        let images: Vec<GrpElt> = images.iter().map(|x| target.reduce(&x.iter().map(|&a| a as i128).collect::<Vec<_>>())).collect();
        for (i, (img, &c)) in images.iter().zip(source.orders()).enumerate() {
            if target.scale(img, c as i64) != target.identity() {
                return Err(Error::BadSurjection(format!("generator {i} has order {c} but its image does not")));
            }
        }
        let index_map: Vec<usize> = source
            .elements()
            .map(|e| {
                let mut acc = target.identity();
                for (i, &x) in e.iter().enumerate() {
                    acc = target.add(&acc, &target.scale(&images[i], x as i64));
                }
                target.index(&acc)
            })
            .collect();
        let mut hit = vec![false; target.order()];
        for &j in &index_map {
            hit[j] = true;
        }
        if hit.iter().any(|&h| !h) {
            return Err(Error::BadSurjection("map is not onto".into()));
        }
        Ok(Surjection { source, target, images, index_map })
    }

    pub fn identity(g: &Arc<FinAbGroup>) -> Self {
        let images = (0..g.rank()).map(|i| g.generator(i)).collect();
        Self::new(g.clone(), g.clone(), images).unwrap()
    }

    pub fn source(&self) -> &Arc<FinAbGroup> {
        &self.source
    }
    pub fn target(&self) -> &Arc<FinAbGroup> {
        &self.target
    }
    pub fn images(&self) -> &[GrpElt] {
        &self.images
    }

    pub fn apply(&self, e: &[u64]) -> GrpElt {
        self.target.element(self.index_map[self.source.index(e)])
    }

    pub fn compose(&self, next: &Surjection) -> Result<Surjection> {
        let imgs = self.images.iter().map(|x| next.apply(x)).collect();
        Surjection::new(self.source.clone(), next.target.clone(), imgs)
    }
}

/// An element of the group ring `R[G]`, stored densely by group index.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRingElt<R> {
    group: Arc<FinAbGroup>,
    c: Vec<R>,
}

fn check_hom_values<R: Coeff>(orders: &[u64], vals: &[R]) -> Result<()> {
    if vals.len() != orders.len() {
        return Err(Error::NotHomomorphism("one value per generator is required".into()));
    }
    for (i, (v, &c)) in vals.iter().zip(orders).enumerate() {
        if v.rinv().is_none() {
            return Err(Error::NotUnitValue);
        }
        let mut acc = v.one_like();
        for _ in 0..c {
            acc = acc.rmul(v);
        }
        if acc != v.one_like() {
            return Err(Error::NotHomomorphism(format!("value at generator {i} has order not dividing {c}")));
        }
    }
    Ok(())
}

/// `prod_i vals[i]^{e_i}` for all elements of a group, by index.
fn hom_table<R: Coeff>(group: &FinAbGroup, vals: &[R], one: &R) -> Vec<R> {
    let mut table = vec![one.clone(); group.order()];
    for idx in 1..group.order() {
        // peel off the lowest nonzero digit
        let e = group.element(idx);
        let i = e.iter().position(|&x| x != 0).unwrap();
        let prev = idx - group.strides[i];
        table[idx] = table[prev].rmul(&vals[i]);
    }
    table
}

impl<R: Coeff> GroupRingElt<R> {
    pub fn zero(group: &Arc<FinAbGroup>, template: &R) -> Self {
        GroupRingElt { group: group.clone(), c: vec![template.zero_like(); group.order()] }
    }

    pub fn one(group: &Arc<FinAbGroup>, template: &R) -> Self {
        Self::basis(group, &group.identity(), template.one_like())
    }

    /// `coeff * [e]`.
    pub fn basis(group: &Arc<FinAbGroup>, e: &[u64], coeff: R) -> Self {
        let mut x = Self::zero(group, &coeff);
        x.c[group.index(e)] = coeff;
        x
    }

    pub fn from_coeffs(group: &Arc<FinAbGroup>, c: Vec<R>) -> Result<Self> {
        if c.len() != group.order() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for a group of order {}",
                c.len(),
                group.order()
            )));
        }
        Ok(GroupRingElt { group: group.clone(), c })
    }

    pub fn group(&self) -> &Arc<FinAbGroup> {
        &self.group
    }
    pub fn coeffs(&self) -> &[R] {
        &self.c
    }
    pub fn coeff(&self, e: &[u64]) -> &R {
        &self.c[self.group.index(e)]
    }
    pub(crate) fn template(&self) -> &R {
        &self.c[0]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Coeff::ris_zero)
    }

    fn same_group(&self, o: &Self) {
        assert_eq!(self.group.orders, o.group.orders, "group ring elements over different groups");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_group(o);
        GroupRingElt { group: self.group.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a.radd(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same_group(o);
        GroupRingElt { group: self.group.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a.rsub(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        GroupRingElt { group: self.group.clone(), c: self.c.iter().map(Coeff::rneg).collect() }
    }

    pub fn scale(&self, s: &R) -> Self {
        GroupRingElt { group: self.group.clone(), c: self.c.iter().map(|a| a.rmul(s)).collect() }
    }

    /// Convolution.
    pub fn mul(&self, o: &Self) -> Self {
        self.same_group(o);
        let g = &self.group;
        let n = g.order();
        let digits: Vec<GrpElt> = g.elements().collect();
        let mut out = vec![self.template().zero_like(); n];
        for i in 0..n {
            if self.c[i].ris_zero() {
                continue;
            }
            for j in 0..n {
                if o.c[j].ris_zero() {
                    continue;
                }
                let idx = g.index(&g.add(&digits[i], &digits[j]));
                out[idx] = out[idx].radd(&self.c[i].rmul(&o.c[j]));
            }
        }
        GroupRingElt { group: g.clone(), c: out }
    }

    /// Sum of the coefficients.
    pub fn augmentation(&self) -> R {
        self.c.iter().fold(self.template().zero_like(), |a, b| a.radd(b))
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> GroupRingElt<S> {
        GroupRingElt { group: self.group.clone(), c: self.c.iter().map(f).collect() }
    }

    /// `gamma -> gamma^{-1}`.
    pub fn sharp(&self) -> Self {
        let neg = self.group.neg_table();
        let mut out = self.c.clone();
        for (i, &j) in neg.iter().enumerate() {
            out[j] = self.c[i].clone();
        }
        GroupRingElt { group: self.group.clone(), c: out }
    }

    /// The linear extension of `gamma -> phi(gamma)^{-1} gamma`, with `phi`
    /// given by its values on the generators.
    pub fn twist_star(&self, phi: &[R]) -> Result<Self> {
        check_hom_values(self.group.orders(), phi)?;
        let inv: Vec<R> = phi.iter().map(|v| v.rinv().unwrap()).collect();
        let table = hom_table(&self.group, &inv, &self.template().one_like());
        Ok(GroupRingElt {
            group: self.group.clone(),
            c: self.c.iter().zip(&table).map(|(a, t)| a.rmul(t)).collect(),
        })
    }

    /// `(h, g) -> psi(h) g`, collapsing the H-part; `psi` is given on the
    /// H-generators.
    pub fn h_project(&self, psi: &[R]) -> Result<Self> {
        let g = &self.group;
        check_hom_values(g.h_orders(), psi)?;
        let h_group = FinAbGroup::gamma(g.h_orders().to_vec())?;
        let table = hom_table(&h_group, psi, &self.template().one_like());
        let target = g.gamma_part();
        let r = g.h_split;
        let mut out = vec![self.template().zero_like(); target.order()];
        for (idx, a) in self.c.iter().enumerate() {
            if a.ris_zero() {
                continue;
            }
            let e = g.element(idx);
            let t = target.index(&e[..r]);
            let h = h_group.index(&e[r..]);
            out[t] = out[t].radd(&a.rmul(&table[h]));
        }
        Ok(GroupRingElt { group: target, c: out })
    }

    /// `sum_gamma x_gamma omega(gamma)`, with `zeta_table[j] = zeta_m^j`.
    pub fn eval_char(&self, omega: &Character, zeta_table: &[R]) -> Result<R> {
        if zeta_table.len() as u64 != omega.m() {
            return Err(Error::LevelMismatch(omega.m()));
        }
        let g = &self.group;
        let mut acc = self.template().zero_like();
        for (idx, a) in self.c.iter().enumerate() {
            if !a.ris_zero() {
                acc = acc.radd(&a.rmul(&zeta_table[omega.exponent(&g.element(idx)) as usize]));
            }
        }
        Ok(acc)
    }

    /// Pushforward along a surjection.
    pub fn project_level(&self, pi: &Surjection) -> Result<Self> {
        if pi.source.orders != self.group.orders {
            return Err(Error::BadSurjection("source group does not match".into()));
        }
        let mut out = vec![self.template().zero_like(); pi.target.order()];
        for (idx, a) in self.c.iter().enumerate() {
            let t = pi.index_map[idx];
            out[t] = out[t].radd(a);
        }
        Ok(GroupRingElt { group: pi.target.clone(), c: out })
    }

    pub fn to_json(&self) -> Value {
        json!({"group": self.group.to_json(), "coeffs": self.c.iter().map(Coeff::rjson).collect::<Vec<_>>()})
    }
}

impl GroupRingElt<i128> {
    /// Exact integer element from small coefficients.
    pub fn from_ints(group: &Arc<FinAbGroup>, c: Vec<i128>) -> Result<Self> {
        Self::from_coeffs(group, c)
    }

    pub fn to_padic(&self, ctx: &Arc<PadicContext>) -> GroupRingElt<PadicValue> {
        self.map(|&a| PadicValue::from_i128(ctx, a))
    }

    pub fn to_cyclo(&self, ring: &Arc<CycloRing>) -> GroupRingElt<CycloInt> {
        self.map(|&a| CycloInt::from_int(ring, a))
    }
}

impl FiniteAlgebra for GroupRingElt<PadicValue> {
    fn dim(&self) -> usize {
        self.c.len() * self.template().ctx().dim()
    }
    fn coord_vec(&self) -> Vec<u64> {
        self.c.iter().flat_map(|a| a.coords().to_vec()).collect()
    }
    fn with_coords(&self, coords: Vec<u64>) -> Self {
        let ctx = self.template().ctx();
        let d = ctx.dim();
        let c = coords.chunks(d).map(|ch| PadicValue::from_coords(ctx, ch.to_vec()).unwrap()).collect();
        GroupRingElt { group: self.group.clone(), c }
    }
    fn alg_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn alg_one(&self) -> Self {
        Self::one(&self.group, self.template())
    }
    fn prime(&self) -> u64 {
        self.template().ctx().p()
    }
    fn precision(&self) -> u32 {
        self.template().ctx().k()
    }
}

impl GroupRingElt<PadicValue> {
    /// Inverse in `(Z/p^k ...)[G]`; `NotUnit` iff the reduction mod p is
    /// not invertible.
    pub fn try_invert(&self) -> Result<Self> {
        invert_regular(self)
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        self.template().ctx()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> Arc<FinAbGroup> {
        FinAbGroup::gamma(vec![4]).unwrap()
    }

    #[test]
    fn sharp_negates_indices() {
        let x = GroupRingElt::from_ints(&z4(), vec![10, 11, 12, 13]).unwrap();
        assert_eq!(x.sharp().coeffs(), &[10, 13, 12, 11]);
        assert_eq!(x.sharp().sharp(), x);
    }

    #[test]
    fn convolution_in_z4() {
        let g = z4();
        let gen = GroupRingElt::basis(&g, &[1], 1i128);
        let mut acc = GroupRingElt::one(&g, &0i128);
        for _ in 0..4 {
            acc = acc.mul(&gen);
        }
        assert_eq!(acc, GroupRingElt::one(&g, &0i128));
    }

    #[test]
    fn twist_by_frobenius_value() {
        let ctx = PadicContext::base(2, 4).unwrap();
        let g = FinAbGroup::gamma(vec![2]).unwrap();
        let alpha = PadicValue::from_i64(&ctx, 15); // order 2 mod 16
        let fr = GroupRingElt::basis(&g, &[1], PadicValue::one(&ctx));
        let phi = vec![alpha.inverse().unwrap()];
        let tw = fr.twist_star(&phi).unwrap();
        assert_eq!(tw, GroupRingElt::basis(&g, &[1], alpha.clone()));
        let back = tw.twist_star(&[alpha]).unwrap();
        assert_eq!(back, fr);
        let bad = fr.twist_star(&[PadicValue::from_i64(&ctx, 2)]);
        assert_eq!(bad, Err(Error::NotUnitValue));
    }

    #[test]
    fn h_projection_collapses_fibres() {
        let g = FinAbGroup::new(vec![2, 3], 1).unwrap();
        let x = GroupRingElt::from_ints(&g, (1..=6).collect()).unwrap();
        let y = x.h_project(&[1i128]).unwrap();
        assert_eq!(y.group().orders(), &[2]);
        assert_eq!(y.coeffs(), &[1 + 3 + 5, 2 + 4 + 6]);

        let ring = CycloRing::new(3);
        let w = CycloInt::zeta_pow(&ring, 1);
        let h = GroupRingElt::basis(&g, &[0, 1], CycloInt::one(&ring));
        let img = h.h_project(std::slice::from_ref(&w)).unwrap();
        assert_eq!(img, GroupRingElt::basis(&g.gamma_part(), &[0], w));
    }

    #[test]
    fn characters_and_projection() {
        let g = z4();
        let chi = Character::new(&g, 4, vec![1]).unwrap();
        let gen = GroupRingElt::basis(&g, &[1], 1i128).to_cyclo(&CycloRing::new(4));
        let v = gen.eval_char(&chi, &chi.cyclo_table()).unwrap();
        assert_eq!(v, CycloInt::zeta_pow(&CycloRing::new(4), 1));
        assert!(Character::new(&g, 4, vec![3]).unwrap().inverse().exps() == [1]);
        assert!(matches!(Character::new(&g, 3, vec![1]), Err(Error::NotHomomorphism(_))));

        let z2 = FinAbGroup::gamma(vec![2]).unwrap();
        let pi = Surjection::new(g.clone(), z2.clone(), vec![vec![1]]).unwrap();
        let x = GroupRingElt::basis(&g, &[1], 1i128);
        assert_eq!(x.project_level(&pi).unwrap(), GroupRingElt::basis(&z2, &[1], 1));
        assert!(Surjection::new(z2.clone(), g.clone(), vec![vec![2]]).is_err());
        assert!(Surjection::new(g.clone(), g.clone(), vec![vec![2]]).is_err());
    }

    #[test]
    fn inversion_in_group_ring() {
        let ctx = PadicContext::base(5, 6).unwrap();
        let g = FinAbGroup::gamma(vec![5]).unwrap();
        let alpha = PadicValue::from_i64(&ctx, 12);
        let one = GroupRingElt::one(&g, &alpha);
        let x = one.sub(&GroupRingElt::basis(&g, &[1], alpha));
        let y = x.try_invert().unwrap();
        assert_eq!(x.mul(&y), one);
        // every 2-adic unit is 1 mod 2, so 1 - 11 Fr is never invertible
        let ctx2 = PadicContext::base(2, 8).unwrap();
        let g2 = FinAbGroup::gamma(vec![2]).unwrap();
        let one2 = GroupRingElt::one(&g2, &PadicValue::one(&ctx2));
        let bad = one2.sub(&GroupRingElt::basis(&g2, &[1], PadicValue::from_i64(&ctx2, 11)));
        assert_eq!(bad.try_invert().unwrap_err(), Error::NotUnit);
        let three = GroupRingElt::basis(&g, &[0], PadicValue::from_i64(&PadicContext::base(5, 3).unwrap(), 3));
        let inv = three.try_invert().unwrap();
        assert_eq!(inv.coeff(&[0]).base_value(), Some(42));
    }
}
