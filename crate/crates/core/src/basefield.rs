//! Arithmetic of F_q and F_q[t], and the places of F_q(t).
//!
//! An element of F_q = F_p[x]/(modulus) is stored as the integer
//! `c_0 + c_1 p + ... + c_{a-1} p^{a-1}` of its coordinates, and all field
//! operations go through precomputed tables.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Largest field size for which operation tables are built.
pub const MAX_Q: u64 = 256;

/// Index of an element of F_q.
pub type Fq = u32;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, a)` with `q = p^a`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let (mut r, mut a) = (q, 0);
    while r % p == 0 {
        r /= p;
        a += 1;
    }
    (r == 1).then_some((p, a))
}

/// Dense polynomials over F_p with coefficients in `[0, p)`, lowest first.
pub(crate) mod fp_poly {
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = super::inv_mod_prime(m[dm], p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] * lead_inv % p;
            if c != 0 {
                for i in 0..=dm {
                    let j = top - dm + i;
                    r[j] = (r[j] + p - c * m[i] % p) % p;
                }
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// All monic polynomials of degree `d`, in index order.
    pub fn monics(d: usize, p: u64) -> impl Iterator<Item = Vec<u64>> {
        let count = p.pow(d as u32);
        (0..count).map(move |mut idx| {
            let mut v = Vec::with_capacity(d + 1);
            for _ in 0..d {
                v.push(idx % p);
                idx /= p;
            }
            v.push(1);
            v
        })
    }

    /// Trial factorization: no monic factor of degree `1..=deg/2`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let d = f.len() - 1;
        if d == 0 {
            return false;
        }
        for e in 1..=d / 2 {
            for g in monics(e, p) {
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Lexicographically least monic irreducible of degree `d`
    /// (constant coefficient compared first).
    pub fn least_irreducible(d: usize, p: u64) -> Vec<u64> {
        let mut best: Option<Vec<u64>> = None;
        for f in monics(d, p) {
            if is_irreducible(&f, p) {
                let better = match &best {
                    None => true,
                    Some(b) => f < *b,
                };
                if better {
                    best = Some(f);
                }
            }
        }
        best.expect("irreducible polynomials exist in every degree")
    }
}

pub(crate) fn inv_mod_prime(x: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = x % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// The finite field F_q = F_p[x]/(modulus) with operation tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FqConfig {
    p: u64,
    a: u32,
    q: u64,
    modulus: Vec<u64>,
    add: Vec<Fq>,
    mul: Vec<Fq>,
    neg: Vec<Fq>,
    inv: Vec<Fq>,
    trace: Vec<u64>,
}

impl fmt::Debug for FqConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FqConfig")
            .field("p", &self.p)
            .field("a", &self.a)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl FqConfig {
    /// F_{p^a} with the lexicographically least irreducible modulus.
    pub fn new(p: u64, a: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if a == 0 {
            return Err(Error::InvalidInput("field degree must be positive".into()));
        }
        let q = p.checked_pow(a).filter(|&q| q <= MAX_Q);
        if q.is_none() {
            return Err(Error::TooLarge(format!("q = {p}^{a} exceeds {MAX_Q}")));
        }
        let modulus = fp_poly::least_irreducible(a as usize, p);
        Self::with_modulus(p, modulus)
    }

    pub fn from_q(q: u64) -> Result<Arc<Self>> {
        let (p, a) = prime_power(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        Self::new(p, a)
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let a = modulus.len().saturating_sub(1) as u32;
        if a == 0 || modulus[a as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput("modulus must be monic over F_p".into()));
        }
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus(p));
        }
        let q = p
            .checked_pow(a)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::TooLarge(format!("q = {p}^{a} exceeds {MAX_Q}")))?;
        let qs = q as usize;
        let coords = |x: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(a as usize);
            let mut x = x;
            for _ in 0..a {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let index = |v: &[u64]| -> u64 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for x in 0..q {
            let cx = coords(x);
            for y in 0..q {
                let cy = coords(y);
                let s: Vec<u64> = cx.iter().zip(&cy).map(|(u, v)| (u + v) % p).collect();
                add[(x * q + y) as usize] = index(&s) as Fq;
                let mut prod = fp_poly::rem(&fp_poly::mul(&cx, &cy, p), &modulus, p);
                prod.resize(a as usize, 0);
                mul[(x * q + y) as usize] = index(&prod) as Fq;
            }
        }
        let mut neg = vec![0; qs];
        let mut inv = vec![0; qs];
        for x in 0..q {
            for y in 0..q {
                if add[(x * q + y) as usize] == 0 {
                    neg[x as usize] = y as Fq;
                }
                if x != 0 && mul[(x * q + y) as usize] == 1 {
                    inv[x as usize] = y as Fq;
                }
            }
        }
        let mut cfg = FqConfig { p, a, q, modulus, add, mul, neg, inv, trace: vec![0; qs] };
        for x in 0..q as Fq {
            let mut t = x;
            let mut acc = x;
            for _ in 1..a {
                t = cfg.pow(t, p);
                acc = cfg.add(acc, t);
            }
            debug_assert!((acc as u64) < p);
            cfg.trace[x as usize] = acc as u64;
        }
        Ok(Arc::new(cfg))
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn a(&self) -> u32 {
        self.a
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, x: Fq, y: Fq) -> Fq {
        self.add[(x as u64 * self.q + y as u64) as usize]
    }
    #[inline]
    pub fn sub(&self, x: Fq, y: Fq) -> Fq {
        self.add(x, self.neg[y as usize])
    }
    #[inline]
    pub fn mul(&self, x: Fq, y: Fq) -> Fq {
        self.mul[(x as u64 * self.q + y as u64) as usize]
    }
    #[inline]
    pub fn neg(&self, x: Fq) -> Fq {
        self.neg[x as usize]
    }
    /// Panics on zero.
    #[inline]
    pub fn inv(&self, x: Fq) -> Fq {
        assert!(x != 0, "inverse of zero in F_q");
        self.inv[x as usize]
    }
    pub fn pow(&self, x: Fq, mut e: u64) -> Fq {
        let (mut r, mut b) = (1, x);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }
    /// Absolute trace F_q -> F_p.
    pub fn trace(&self, x: Fq) -> u64 {
        self.trace[x as usize]
    }

    /// Coordinates over F_p of a field element.
    pub fn coords(&self, x: Fq) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.a as usize);
        let mut x = x as u64;
        for _ in 0..self.a {
            v.push(x % self.p);
            x /= self.p;
        }
        v
    }

    pub fn from_coords(&self, v: &[u64]) -> Result<Fq> {
        if v.len() != self.a as usize || v.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidInput(format!("bad F_q coordinates {v:?}")));
        }
        Ok(v.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as Fq)
    }

    // ---- polynomials over F_q ----

    pub fn poly_add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        let c = (0..n).map(|i| self.add(a.coeff(i), b.coeff(i))).collect();
        Poly::new(c)
    }

    pub fn poly_sub(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        let c = (0..n).map(|i| self.sub(a.coeff(i), b.coeff(i))).collect();
        Poly::new(c)
    }

    pub fn poly_mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        Poly::new(out)
    }

    pub fn poly_divrem(&self, a: &Poly, m: &Poly) -> (Poly, Poly) {
        assert!(!m.is_zero(), "division by the zero polynomial");
        let dm = m.degree().unwrap();
        let lead_inv = self.inv(m.0[dm]);
        let mut r = a.0.clone();
        if r.len() <= dm {
            return (Poly::zero(), a.clone());
        }
        let mut quot = vec![0; r.len() - dm];
        for top in (dm..r.len()).rev() {
            let c = self.mul(r[top], lead_inv);
            if c == 0 {
                continue;
            }
            quot[top - dm] = c;
            for i in 0..=dm {
                let j = top - dm + i;
                r[j] = self.sub(r[j], self.mul(c, m.0[i]));
            }
        }
        r.truncate(dm);
        (Poly::new(quot), Poly::new(r))
    }

    pub fn poly_rem(&self, a: &Poly, m: &Poly) -> Poly {
        self.poly_divrem(a, m).1
    }

    pub fn poly_mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.poly_rem(&self.poly_mul(a, b), m)
    }

    pub fn poly_gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.poly_rem(&x, &y);
            x = y;
            y = r;
        }
        self.make_monic(&x)
    }

    pub fn make_monic(&self, a: &Poly) -> Poly {
        match a.0.last() {
            None => Poly::zero(),
            Some(&l) => {
                let li = self.inv(l);
                Poly::new(a.0.iter().map(|&c| self.mul(c, li)).collect())
            }
        }
    }

    pub fn poly_pow(&self, a: &Poly, e: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..e {
            r = self.poly_mul(&r, a);
        }
        r
    }

    /// Monic polynomial with the given base-q index of its lower coefficients.
    pub fn monic_from_index(&self, degree: usize, mut idx: u64) -> MonicPoly {
        let mut c = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            c.push((idx % self.q) as Fq);
            idx /= self.q;
        }
        c.push(1);
        MonicPoly(Poly(c))
    }

    /// Polynomial of degree `< len` with the given base-q index.
    pub fn poly_from_index(&self, len: usize, mut idx: u64) -> Poly {
        let mut c = Vec::with_capacity(len);
        for _ in 0..len {
            c.push((idx % self.q) as Fq);
            idx /= self.q;
        }
        Poly::new(c)
    }

    pub fn poly_index(&self, a: &Poly) -> u64 {
        a.0.iter().rev().fold(0u64, |acc, &c| acc * self.q + c as u64)
    }

    /// Irreducibility by trial division by all monic polynomials of degree
    /// at most half the degree. Independent of the sieve used for enumeration.
    pub fn is_irreducible_bruteforce(&self, f: &MonicPoly) -> bool {
        let d = f.degree();
        if d == 0 {
            return false;
        }
        for e in 1..=d / 2 {
            for idx in 0..self.q.pow(e as u32) {
                let g = self.monic_from_index(e, idx);
                if self.poly_rem(f.as_poly(), g.as_poly()).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    // ---- serialization ----

    fn elt_string(&self, c: Fq) -> String {
        if self.a == 1 {
            c.to_string()
        } else {
            let v: Vec<String> = self.coords(c).iter().map(|x| x.to_string()).collect();
            format!("[{}]", v.join(","))
        }
    }

    /// `"c0+c1*t+...+t^d"`, zero terms omitted, unit coefficients implicit.
    pub fn poly_to_string(&self, a: &Poly) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{i}"),
            };
            terms.push(match (i, c) {
                (0, _) => self.elt_string(c),
                (_, 1) => mono,
                _ => format!("{}*{}", self.elt_string(c), mono),
            });
        }
        terms.join("+")
    }

    pub fn parse_poly(&self, s: &str) -> Result<Poly> {
        let bad = || Error::InvalidInput(format!("cannot parse polynomial {s:?}"));
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(Poly::zero());
        }
        let mut coeffs: Vec<Fq> = Vec::new();
        // split on '+' outside brackets
        let mut terms = Vec::new();
        let (mut depth, mut start) = (0, 0);
        for (i, ch) in s.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => depth -= 1,
                '+' if depth == 0 => {
                    terms.push(&s[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        for term in terms {
            if term.is_empty() {
                return Err(bad());
            }
            let (coef, mono) = match term.find('t') {
                None => (term, ""),
                Some(pos) => {
                    let c = term[..pos].strip_suffix('*').unwrap_or(&term[..pos]);
                    (c, &term[pos..])
                }
            };
            let exp: usize = match mono {
                "" => 0,
                "t" => 1,
                m => m.strip_prefix("t^").and_then(|e| e.parse().ok()).ok_or_else(bad)?,
            };
            let c: Fq = if coef.is_empty() {
                1
            } else if let Some(inner) = coef.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
                let v: std::result::Result<Vec<u64>, _> = inner.split(',').map(|x| x.parse()).collect();
                self.from_coords(&v.map_err(|_| bad())?)?
            } else {
                let v: u64 = coef.parse().map_err(|_| bad())?;
                if self.a != 1 || v >= self.p {
                    return Err(bad());
                }
                v as Fq
            };
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, 0);
            }
            coeffs[exp] = self.add(coeffs[exp], c);
        }
        Ok(Poly::new(coeffs))
    }

    pub fn parse_monic(&self, s: &str) -> Result<MonicPoly> {
        MonicPoly::new(self.parse_poly(s)?)
    }

    pub fn place_to_json(&self, v: &Place) -> Value {
        match &v.kind {
            PlaceKind::Infinity => json!({"kind": "infinity"}),
            PlaceKind::Finite(f) => json!({"kind": "finite", "poly": self.poly_to_string(f.as_poly())}),
        }
    }

    pub fn place_from_json(&self, v: &Value) -> Result<Place> {
        let kind = v.get("kind").and_then(Value::as_str);
        match kind {
            Some("infinity") => Ok(Place::infinity()),
            Some("finite") => {
                let s = v
                    .get("poly")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::InvalidInput("finite place needs \"poly\"".into()))?;
                Place::finite(self, self.parse_monic(s)?)
            }
            _ => Err(Error::InvalidInput("place kind must be \"finite\" or \"infinity\"".into())),
        }
    }

    /// Readable label used in reports and error messages.
    pub fn place_label(&self, v: &Place) -> String {
        match &v.kind {
            PlaceKind::Infinity => "inf".into(),
            PlaceKind::Finite(f) => self.poly_to_string(f.as_poly()),
        }
    }
}

/// Trimmed polynomial over F_q, lowest coefficient first. Zero is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly(Vec<Fq>);

impl Poly {
    pub fn new(mut c: Vec<Fq>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly(c)
    }
    pub fn zero() -> Self {
        Poly(Vec::new())
    }
    pub fn one() -> Self {
        Poly(vec![1])
    }
    /// The polynomial `t`.
    pub fn t() -> Self {
        Poly(vec![0, 1])
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }
    pub fn coeff(&self, i: usize) -> Fq {
        self.0.get(i).copied().unwrap_or(0)
    }
    pub fn coeffs(&self) -> &[Fq] {
        &self.0
    }
}

/// A monic polynomial over F_q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicPoly(Poly);

impl MonicPoly {
    pub fn new(p: Poly) -> Result<Self> {
        if p.0.last() != Some(&1) {
            return Err(Error::InvalidInput("polynomial is not monic".into()));
        }
        Ok(MonicPoly(p))
    }
    pub fn one() -> Self {
        MonicPoly(Poly::one())
    }
    pub fn degree(&self) -> usize {
        self.0.degree().unwrap()
    }
    pub fn as_poly(&self) -> &Poly {
        &self.0
    }
    pub fn into_poly(self) -> Poly {
        self.0
    }
}

impl PartialOrd for MonicPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficient lists compared from the constant term up.
impl Ord for MonicPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0 .0.cmp(&other.0 .0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    Finite(MonicPoly),
    Infinity,
}

/// A closed point of the projective line over F_q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Place {
    pub kind: PlaceKind,
    pub degree: usize,
}

impl Place {
    pub fn infinity() -> Self {
        Place { kind: PlaceKind::Infinity, degree: 1 }
    }

    /// Checks irreducibility.
    pub fn finite(cfg: &FqConfig, f: MonicPoly) -> Result<Self> {
        if !cfg.is_irreducible_bruteforce(&f) {
            return Err(Error::InvalidInput(format!(
                "{} is not irreducible",
                cfg.poly_to_string(f.as_poly())
            )));
        }
        Ok(Self::finite_unchecked(f))
    }

    pub(crate) fn finite_unchecked(f: MonicPoly) -> Self {
        let degree = f.degree();
        Place { kind: PlaceKind::Finite(f), degree }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.kind, PlaceKind::Infinity)
    }

    pub fn poly(&self) -> Option<&MonicPoly> {
        match &self.kind {
            PlaceKind::Finite(f) => Some(f),
            PlaceKind::Infinity => None,
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| match (&self.kind, &other.kind) {
            (PlaceKind::Infinity, PlaceKind::Infinity) => Ordering::Equal,
            (PlaceKind::Infinity, _) => Ordering::Less,
            (_, PlaceKind::Infinity) => Ordering::Greater,
            (PlaceKind::Finite(a), PlaceKind::Finite(b)) => a.cmp(b),
        })
    }
}

/// Upper bound on `q^n` for the sieve.
const SIEVE_LIMIT: u64 = 1 << 26;

/// Monic irreducible polynomials of each degree `1..=n`, sorted.
///
/// Degree `n` is sieved by marking every product `g*h` with `g` irreducible of
/// degree at most `n/2` and `h` any monic of the complementary degree.
pub fn irreducibles_by_degree(cfg: &FqConfig, n: usize) -> Result<Vec<Vec<MonicPoly>>> {
    let q = cfg.q();
    let mut by_deg: Vec<Vec<MonicPoly>> = vec![Vec::new(); n + 1];
    for d in 1..=n {
        let size = q
            .checked_pow(d as u32)
            .filter(|&s| s <= SIEVE_LIMIT)
            .ok_or_else(|| Error::TooLarge(format!("sieve of size {q}^{d}")))?;
        let mut reducible = vec![false; size as usize];
        for e in 1..=d / 2 {
            let hdeg = d - e;
            for g in &by_deg[e] {
                for hidx in 0..q.pow(hdeg as u32) {
                    let h = cfg.monic_from_index(hdeg, hidx);
                    let prod = cfg.poly_mul(g.as_poly(), h.as_poly());
                    let lower = Poly::new(prod.coeffs()[..d].to_vec());
                    reducible[cfg.poly_index(&lower) as usize] = true;
                }
            }
        }
        let mut list: Vec<MonicPoly> = (0..size)
            .filter(|&i| !reducible[i as usize])
            .map(|i| cfg.monic_from_index(d, i))
            .collect();
        list.sort();
        by_deg[d] = list;
    }
    Ok(by_deg)
}

/// All places of degree at most `n`, ordered by degree, infinity first among
/// degree one, then by coefficient list from the constant term up.
pub fn enumerate_places(cfg: &FqConfig, n: usize) -> Result<Vec<Place>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let irr = irreducibles_by_degree(cfg, n)?;
    let mut out = vec![Place::infinity()];
    for list in irr.into_iter().skip(1) {
        out.extend(list.into_iter().map(Place::finite_unchecked));
    }
    Ok(out)
}

pub fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducibles of degree `n` over F_q (necklace formula).
pub fn irreducible_count(q: u64, n: u64) -> u64 {
    let mut total: i128 = 0;
    for d in 1..=n {
        if n.is_multiple_of(d) {
            total += mobius(d) as i128 * (q as i128).pow((n / d) as u32);
        }
    }
    (total / n as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_places_to_degree_two() {
        let cfg = FqConfig::new(2, 1).unwrap();
        let places = enumerate_places(&cfg, 2).unwrap();
        let labels: Vec<String> = places.iter().map(|v| cfg.place_label(v)).collect();
        assert_eq!(labels, ["inf", "t", "1+t", "1+t+t^2"]);
    }

    #[test]
    fn degree_four_count_over_f2() {
        let cfg = FqConfig::new(2, 1).unwrap();
        let places = enumerate_places(&cfg, 4).unwrap();
        assert_eq!(places.iter().filter(|v| v.degree == 4).count(), 3);
        assert_eq!(irreducible_count(2, 4), 3);
    }

    #[test]
    fn degree_zero_cap_is_empty() {
        let cfg = FqConfig::new(3, 1).unwrap();
        assert!(enumerate_places(&cfg, 0).unwrap().is_empty());
    }

    #[test]
    fn sieve_agrees_with_trial_division() {
        for (p, a) in [(2, 1), (3, 1), (2, 2)] {
            let cfg = FqConfig::new(p, a).unwrap();
            let irr = irreducibles_by_degree(&cfg, 5).unwrap();
            for d in 1..=5 {
                let brute: Vec<MonicPoly> = (0..cfg.q().pow(d as u32))
                    .map(|i| cfg.monic_from_index(d, i))
                    .filter(|f| cfg.is_irreducible_bruteforce(f))
                    .collect();
                let mut brute = brute;
                brute.sort();
                assert_eq!(irr[d], brute, "q={} d={d}", cfg.q());
            }
        }
    }

    #[test]
    fn unique_factorization_into_places() {
        let cfg = FqConfig::new(3, 1).unwrap();
        let places = enumerate_places(&cfg, 4).unwrap();
        let finite: Vec<&MonicPoly> = places.iter().filter_map(Place::poly).collect();
        for d in 1..=4usize {
            for idx in 0..cfg.q().pow(d as u32) {
                let mut f = cfg.monic_from_index(d, idx).into_poly();
                let mut deg_sum = 0;
                for g in &finite {
                    loop {
                        let (quo, rem) = cfg.poly_divrem(&f, g.as_poly());
                        if !rem.is_zero() {
                            break;
                        }
                        f = quo;
                        deg_sum += g.degree();
                    }
                }
                assert_eq!(f, Poly::one());
                assert_eq!(deg_sum, d);
            }
        }
    }

    #[test]
    fn f4_default_modulus_and_tables() {
        let cfg = FqConfig::new(2, 2).unwrap();
        assert_eq!(cfg.modulus(), &[1, 1, 1]);
        for x in 1..4 {
            assert_eq!(cfg.mul(x, cfg.inv(x)), 1);
        }
        // Frobenius fixes exactly F_2
        let fixed: Vec<Fq> = (0..4).filter(|&x| cfg.pow(x, 2) == x).collect();
        assert_eq!(fixed, [0, 1]);
        assert!(FqConfig::with_modulus(2, vec![1, 0, 1]).is_err());
    }

    #[test]
    fn poly_string_round_trip() {
        let cfg = FqConfig::new(2, 2).unwrap();
        let p = Poly::new(vec![2, 0, 1, 3]);
        let s = cfg.poly_to_string(&p);
        assert_eq!(s, "[0,1]+t^2+[1,1]*t^3");
        assert_eq!(cfg.parse_poly(&s).unwrap(), p);
        let cfg3 = FqConfig::new(3, 1).unwrap();
        assert_eq!(cfg3.parse_poly("2+2*t+t^2").unwrap(), Poly::new(vec![2, 2, 1]));
        assert!(cfg3.parse_poly("3+t").is_err());
    }

    #[test]
    fn place_json_round_trip() {
        let cfg = FqConfig::new(2, 1).unwrap();
        for v in enumerate_places(&cfg, 3).unwrap() {
            let j = cfg.place_to_json(&v);
            assert_eq!(cfg.place_from_json(&j).unwrap(), v);
        }
    }
}
