//! Z_p[[T]] truncated at `(p^k, T^N)`: Weierstrass preparation,
//! determinants of presentations, twists, and coprimality witnesses.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{det_mod_pk, invmod, mulmod, val_p};

/// `sum_{j < N} c_j T^j` with coefficients in `Z/p^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSeries {
    p: u64,
    k: u32,
    m: u64,
    c: Vec<u64>,
}

fn pk(p: u64, k: u32) -> Result<u64> {
    p.checked_pow(k).filter(|&m| m < (1 << 62)).ok_or(Error::PrecisionTooLarge)
}

impl LambdaSeries {
    pub fn new(p: u64, k: u32, n: usize, coeffs: &[i128]) -> Result<Self> {
        if !crate::basefield::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || n == 0 {
            return Err(Error::InvalidInput("caps must be positive".into()));
        }
        let m = pk(p, k)?;
        let mut c = vec![0u64; n];
        for (dst, &x) in c.iter_mut().zip(coeffs) {
            *dst = x.rem_euclid(m as i128) as u64;
        }
        Ok(LambdaSeries { p, k, m, c })
    }

    pub fn zero(p: u64, k: u32, n: usize) -> Result<Self> {
        Self::new(p, k, n, &[])
    }

    pub fn one(p: u64, k: u32, n: usize) -> Result<Self> {
        Self::new(p, k, n, &[1])
    }

    /// `T` itself.
    pub fn t(p: u64, k: u32, n: usize) -> Result<Self> {
        Self::new(p, k, n, &[0, 1])
    }

    fn like(&self, c: Vec<u64>) -> Self {
        LambdaSeries { p: self.p, k: self.k, m: self.m, c }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn n(&self) -> usize {
        self.c.len()
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.p != o.p || self.k != o.k || self.c.len() != o.c.len() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    /// Same series at smaller caps.
    pub fn reduce(&self, k: u32, n: usize) -> Result<Self> {
        let k = k.min(self.k);
        let m = pk(self.p, k)?;
        let c = self.c.iter().take(n).map(|&x| x % m).collect();
        Ok(LambdaSeries { p: self.p, k, m, c })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.like(self.c.iter().zip(&o.c).map(|(&a, &b)| (a + b) % self.m).collect()))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.like(self.c.iter().zip(&o.c).map(|(&a, &b)| (a + self.m - b) % self.m).collect()))
    }

    pub fn neg(&self) -> Self {
        self.like(self.c.iter().map(|&a| (self.m - a) % self.m).collect())
    }

    pub fn scale(&self, s: i128) -> Self {
        let s = s.rem_euclid(self.m as i128) as u64;
        self.like(self.c.iter().map(|&a| mulmod(a, s, self.m)).collect())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.like(mul_trunc(&self.c, &o.c, self.c.len(), self.m)))
    }

    pub fn is_unit(&self) -> bool {
        !self.c[0].is_multiple_of(self.p)
    }

    pub fn inverse(&self) -> Result<Self> {
        inv_series(&self.c, self.c.len(), self.m).map(|c| self.like(c)).ok_or(Error::NotUnit)
    }

    /// `f(S)` for a series `S` without constant term mod p; the output has
    /// `n_out` coefficients.
    fn compose(&self, s: &[u64], n_out: usize) -> Self {
        let mut acc = vec![0u64; n_out];
        for &a in self.c.iter().rev() {
            acc = mul_trunc(&acc, s, n_out, self.m);
            acc[0] = (acc[0] + a) % self.m;
        }
        self.like(acc)
    }

    /// `T -> (1 + T)^{-1} - 1`.
    pub fn sharp(&self) -> Self {
        let n = self.c.len();
        let s: Vec<u64> = (0..n).map(|j| if j == 0 { 0 } else if j % 2 == 1 { self.m - 1 } else { 1 }).collect();
        self.compose(&s, n)
    }

    /// Output T-cap of `twist_star` by `c`: `N - ceil(k / v_p(c - 1))`.
    pub fn twist_cap(&self, c: i128) -> Result<usize> {
        let v = val_p((c - 1).rem_euclid(self.m as i128) as u64, self.p, self.k);
        if v == 0 {
            return Err(Error::InvalidInput("twist value must be 1 mod p".into()));
        }
        let loss = (self.k as usize).div_ceil(v as usize);
        self.c.len().checked_sub(loss).filter(|&n| n > 0).ok_or_else(|| Error::PrecisionExhausted("T-cap too small for the twist".into()))
    }

    /// `T -> c^{-1} (1 + T) - 1`, the action of `gamma -> c^{-1} gamma`.
    pub fn twist_star(&self, c: i128) -> Result<Self> {
        let n_out = self.twist_cap(c)?;
        let ci = invmod(c.rem_euclid(self.m as i128) as u64, self.m).ok_or(Error::NotUnit)?;
        let s = vec![(ci + self.m - 1) % self.m, ci];
        Ok(self.compose(&s, n_out))
    }

    pub fn to_json(&self) -> Value {
        json!({"p": self.p, "k": self.k, "N": self.c.len(), "coeffs": self.c})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |key: &str| v.get(key).and_then(Value::as_u64).ok_or_else(|| Error::schema(format!("/{key}"), "expected a non-negative integer"));
        let (p, k, n) = (get("p")?, get("k")? as u32, get("N")? as usize);
        let arr = v.get("coeffs").and_then(Value::as_array).ok_or_else(|| Error::schema("/coeffs", "expected an array"))?;
        let c = arr
            .iter()
            .enumerate()
            .map(|(i, x)| x.as_i64().map(i128::from).ok_or_else(|| Error::schema(format!("/coeffs/{i}"), "expected an integer")))
            .collect::<Result<Vec<_>>>()?;
        if c.len() > n {
            return Err(Error::schema("/coeffs", "more coefficients than N"));
        }
        Self::new(p, k, n, &c)
    }
}

fn mul_trunc(a: &[u64], b: &[u64], n: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            if y != 0 {
                out[i + j] = (out[i + j] + mulmod(x, y, m)) % m;
            }
        }
    }
    out
}

fn inv_series(a: &[u64], n: usize, m: u64) -> Option<Vec<u64>> {
    let c0 = invmod(*a.first()? % m, m)?;
    let mut out = vec![0u64; n];
    out[0] = c0;
    for j in 1..n {
        let mut s = 0u64;
        for i in 1..=j.min(a.len() - 1) {
            s = (s + mulmod(a[i], out[j - i], m)) % m;
        }
        out[j] = mulmod((m - s) % m, c0, m);
    }
    Some(out)
}

/// `f = p^mu * P(T) * U(T)` with `P` distinguished of degree `lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weierstrass {
    pub mu: u32,
    /// Coefficients of `P` from the constant term, mod `p^{k - mu}`; the
    /// last one is 1.
    pub distinguished: Vec<u64>,
    /// The unit, at caps `(k - mu, N)`.
    pub unit: LambdaSeries,
}

impl Weierstrass {
    pub fn lambda(&self) -> usize {
        self.distinguished.len() - 1
    }

    /// `p^mu P` as a series at the original caps.
    pub fn normalized(&self, k: u32, n: usize) -> Result<LambdaSeries> {
        let p = self.unit.p;
        let pm = (p as i128).pow(self.mu);
        let c: Vec<i128> = self.distinguished.iter().map(|&x| x as i128 * pm).collect();
        if c.len() > n {
            return Err(Error::PrecisionExhausted("distinguished degree exceeds the T-cap".into()));
        }
        LambdaSeries::new(p, k, n, &c)
    }

    pub fn to_json(&self) -> Value {
        json!({"mu": self.mu, "lambda": self.lambda(), "distinguished": self.distinguished, "unit": self.unit.to_json()})
    }
}

/// Weierstrass preparation of the polynomial representative of `f`.
pub fn weierstrass(f: &LambdaSeries) -> Result<Weierstrass> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = f.p;
    let mu = f.c.iter().filter(|&&x| x != 0).map(|&x| val_p(x, p, f.k)).min().unwrap();
    if mu >= f.k {
        return Err(Error::MuAmbiguous);
    }
    let k1 = f.k - mu;
    let m1 = pk(p, k1)?;
    let pmu = p.pow(mu);
    let g: Vec<u64> = f.c.iter().map(|&x| (x / pmu) % m1).collect();
    let lambda = g.iter().position(|&x| x % p != 0).ok_or(Error::LambdaAmbiguous)?;
    let n = f.c.len();
    // working cap: dropped terms lose at least one power of p per lambda
    // steps down in degree
    let work = n.max(lambda * (k1 as usize + 1)) + lambda + 1;
    let mut gw = g.clone();
    gw.resize(work, 0);
    let a: Vec<u64> = gw[..lambda].to_vec();
    let b: Vec<u64> = gw[lambda..].to_vec();
    let bw = work - lambda;
    let b_inv = inv_series(&b, bw, m1).ok_or(Error::NotUnit)?;
    // -A * B^{-1}
    let neg_ab: Vec<u64> = mul_trunc(&a, &b_inv, bw, m1).into_iter().map(|x| (m1 - x) % m1).collect();
    // remainder of T^lambda modulo g
    let mut r = vec![0u64; lambda];
    let mut high = vec![0u64; bw];
    high[0] = 1;
    for _ in 0..=(k1 as usize + work) {
        if high.iter().all(|&x| x == 0) {
            break;
        }
        let cur = mul_trunc(&high, &neg_ab, bw, m1);
        let mut next = vec![0u64; bw];
        for (j, &x) in cur.iter().enumerate() {
            if j < lambda {
                r[j] = (r[j] + x) % m1;
            } else if j - lambda < bw {
                next[j - lambda] = x;
            }
        }
        high = next;
    }
    let mut dist: Vec<u64> = r.iter().map(|&x| (m1 - x) % m1).collect();
    dist.push(1);
    // U from P U = g by contraction: U_j = g_{j+lambda} - sum_{i<lambda} P_i U_{j+lambda-i}
    let uw = n + lambda * (k1 as usize + 1) + 1;
    let mut u = vec![0u64; uw];
    for _ in 0..=k1 {
        let mut nu = vec![0u64; uw];
        for j in 0..uw {
            let mut s = gw.get(j + lambda).copied().unwrap_or(0) % m1;
            for (i, &pi) in dist.iter().enumerate().take(lambda) {
                if let Some(&x) = u.get(j + lambda - i) {
                    s = (s + m1 - mulmod(pi, x, m1)) % m1;
                }
            }
            nu[j] = s;
        }
        u = nu;
    }
    u.truncate(n);
    let unit = LambdaSeries { p, k: k1, m: m1, c: u };
    Ok(Weierstrass { mu, distinguished: dist, unit })
}

/// Square matrix of series with shared caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationMatrix {
    pub rows: Vec<Vec<LambdaSeries>>,
}

impl PresentationMatrix {
    pub fn new(rows: Vec<Vec<LambdaSeries>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("presentation must be square and non-empty".into()));
        }
        let first = &rows[0][0];
        for x in rows.iter().flatten() {
            first.check(x)?;
        }
        Ok(PresentationMatrix { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn map(&self, f: impl Fn(&LambdaSeries) -> Result<LambdaSeries>) -> Result<Self> {
        let rows = self.rows.iter().map(|r| r.iter().map(&f).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let n = self.size();
        let zero = self.rows[0][0].like(vec![0; self.rows[0][0].n()]);
        let mut rows = vec![vec![zero; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for l in 0..n {
                    *cell = cell.add(&self.rows[i][l].mul(&o.rows[l][j])?)?;
                }
            }
        }
        Self::new(rows)
    }

    /// Laplace expansion along the first row.
    pub fn det(&self) -> Result<LambdaSeries> {
        det_rec(&self.rows)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.rows.iter().map(|r| Value::Array(r.iter().map(LambdaSeries::to_json).collect())).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::schema("", "expected an array of rows"))?;
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.as_array()
                    .ok_or_else(|| Error::schema(format!("/{i}"), "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(j, x)| LambdaSeries::from_json(x).map_err(|e| e.at(&format!("/{i}/{j}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }
}

fn det_rec(m: &[Vec<LambdaSeries>]) -> Result<LambdaSeries> {
    let n = m.len();
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = m[0][0].like(vec![0; m[0][0].n()]);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<LambdaSeries>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = m[0][j].mul(&det_rec(&minor)?)?;
        acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}

/// Normalized characteristic series, or `Zero` for the non-torsion case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharIdeal {
    Zero,
    Generator { normalized: LambdaSeries, mu: u32, lambda: usize },
}

impl CharIdeal {
    pub fn to_json(&self) -> Value {
        match self {
            CharIdeal::Zero => json!({"zero": true}),
            CharIdeal::Generator { normalized, mu, lambda } => {
                json!({"zero": false, "mu": mu, "lambda": lambda, "series": normalized.to_json()})
            }
        }
    }
}

/// `det P` normalized to `p^mu * distinguished`.
pub fn char_ideal(p: &PresentationMatrix) -> Result<CharIdeal> {
    let d = p.det()?;
    if d.is_zero() {
        return Ok(CharIdeal::Zero);
    }
    normalize(&d)
}

pub fn normalize(d: &LambdaSeries) -> Result<CharIdeal> {
    let w = weierstrass(d)?;
    Ok(CharIdeal::Generator { normalized: w.normalized(d.k, d.n())?, mu: w.mu, lambda: w.lambda() })
}

/// A ring automorphism of the Iwasawa algebra realized on series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwistMap {
    Sharp,
    /// `gamma -> c^{-1} gamma` for a value `c = 1 mod p`.
    Star(i128),
}

impl TwistMap {
    pub fn apply(&self, f: &LambdaSeries) -> Result<LambdaSeries> {
        match *self {
            TwistMap::Sharp => Ok(f.sharp()),
            TwistMap::Star(c) => f.twist_star(c),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TwistCheck {
    pub lhs: CharIdeal,
    pub rhs: CharIdeal,
    pub pass: bool,
}

/// Compares `normalize(det(alpha(P)))` with `normalize(alpha(det P))`.
pub fn twist_char_check(p: &PresentationMatrix, alpha: TwistMap) -> Result<TwistCheck> {
    let lhs_det = p.map(|x| alpha.apply(x))?.det()?;
    let rhs_det = alpha.apply(&p.det()?)?;
    let norm = |d: &LambdaSeries| if d.is_zero() { Ok(CharIdeal::Zero) } else { normalize(d) };
    let lhs = norm(&lhs_det)?;
    let rhs = norm(&rhs_det)?;
    let pass = lhs == rhs;
    Ok(TwistCheck { lhs, rhs, pass })
}

/// Whether `(f1, f2)` generate an ideal of height two: not both divisible
/// by `p`, and distinguished parts with nonzero resultant.
pub fn pseudo_null_witness(f1: &LambdaSeries, f2: &LambdaSeries) -> Result<bool> {
    let w1 = weierstrass(f1)?;
    let w2 = weierstrass(f2)?;
    if w1.mu > 0 && w2.mu > 0 {
        return Ok(false);
    }
    let k = f1.k.min(f2.k) - w1.mu.max(w2.mu);
    Ok(resultant(&w1.distinguished, &w2.distinguished, f1.p, k) != 0)
}

/// Resultant of two monic polynomials mod `p^k` via the Sylvester matrix.
pub fn resultant(a: &[u64], b: &[u64], p: u64, k: u32) -> u64 {
    let (da, db) = (a.len() - 1, b.len() - 1);
    if da == 0 || db == 0 {
        return 1;
    }
    let m = p.pow(k);
    let n = da + db;
    let mut rows = Vec::with_capacity(n);
    for i in 0..db {
        let mut r = vec![0u64; n];
        for (j, &x) in a.iter().rev().enumerate() {
            r[i + j] = x % m;
        }
        rows.push(r);
    }
    for i in 0..da {
        let mut r = vec![0u64; n];
        for (j, &x) in b.iter().rev().enumerate() {
            r[i + j] = x % m;
        }
        rows.push(r);
    }
    det_mod_pk(rows, p, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: u64, k: u32, n: usize, c: &[i128]) -> LambdaSeries {
        LambdaSeries::new(p, k, n, c).unwrap()
    }

    #[test]
    fn weierstrass_examples() {
        let f = s(3, 8, 12, &[3, 0, 1]);
        let w = weierstrass(&f).unwrap();
        assert_eq!((w.mu, w.distinguished.clone()), (0, vec![3, 0, 1]));
        assert_eq!(w.unit, s(3, 8, 12, &[1]));
        // (1 + T)(T - 3)
        let f = s(3, 8, 12, &[-3, -2, 1]);
        let w = weierstrass(&f).unwrap();
        assert_eq!(w.distinguished, vec![3u64.pow(8) - 3, 1]);
        assert_eq!(w.unit, s(3, 8, 12, &[1, 1]));
        let f = s(3, 8, 12, &[3, 3]);
        let w = weierstrass(&f).unwrap();
        assert_eq!((w.mu, w.distinguished.clone()), (1, vec![1]));
        assert_eq!(w.unit, s(3, 7, 12, &[1, 1]));
        assert_eq!(weierstrass(&s(3, 8, 4, &[])).unwrap_err(), Error::ZeroInput);
    }

    #[test]
    fn weierstrass_round_trip_on_a_dense_series() {
        let f = s(2, 10, 16, &[6, 4, 10, 3, 5, 8, 1, 2, 7]);
        let w = weierstrass(&f).unwrap();
        let back = w.normalized(10, 16).unwrap().reduce(10, 16).unwrap();
        let unit = LambdaSeries::new(2, 10, 16, &w.unit.c.iter().map(|&x| x as i128).collect::<Vec<_>>()).unwrap();
        // p^mu P U agrees with f mod p^k
        let prod = back.mul(&unit).unwrap();
        assert_eq!(prod, f);
    }

    #[test]
    fn twists_are_ring_maps() {
        let f = s(3, 8, 20, &[1, 4, 7, 2]);
        let g = s(3, 8, 20, &[5, 3, 0, 1, 9]);
        for a in [TwistMap::Sharp, TwistMap::Star(4)] {
            let fg = a.apply(&f.mul(&g).unwrap()).unwrap();
            assert_eq!(fg, a.apply(&f).unwrap().mul(&a.apply(&g).unwrap()).unwrap());
        }
        assert_eq!(f.sharp().sharp(), f);
        assert_eq!(f.twist_star(4).unwrap().n(), 12);
        assert!(f.twist_star(2).is_err());
    }

    #[test]
    fn char_ideal_and_twists() {
        let (p, k, n) = (3, 8, 20);
        let a = s(p, k, n, &[-3, 1]);
        let b = s(p, k, n, &[3, 0, 1]);
        let z = LambdaSeries::zero(p, k, n).unwrap();
        let m = PresentationMatrix::new(vec![vec![a.clone(), z.clone()], vec![z.clone(), b.clone()]]).unwrap();
        let c = char_ideal(&m).unwrap();
        assert_eq!(c, normalize(&a.mul(&b).unwrap()).unwrap());
        for t in [TwistMap::Sharp, TwistMap::Star(4)] {
            assert!(twist_char_check(&m, t).unwrap().pass);
        }
        let zero_row = PresentationMatrix::new(vec![vec![z.clone(), z.clone()], vec![a.clone(), b.clone()]]).unwrap();
        assert_eq!(char_ideal(&zero_row).unwrap(), CharIdeal::Zero);
        let one = LambdaSeries::one(p, k, n).unwrap();
        let u = PresentationMatrix::new(vec![vec![one.clone(), b.clone()], vec![z.clone(), one.clone()]]).unwrap();
        assert_eq!(char_ideal(&u.mul(&m).unwrap().mul(&u).unwrap()).unwrap(), c);
    }

    #[test]
    fn pseudo_null_examples() {
        let (p, k, n) = (3, 8, 10);
        let t = LambdaSeries::t(p, k, n).unwrap();
        assert!(pseudo_null_witness(&t, &s(p, k, n, &[3])).unwrap());
        assert!(pseudo_null_witness(&t, &s(p, k, n, &[3, 1])).unwrap());
        assert!(!pseudo_null_witness(&s(p, k, n, &[0, 0, 1]), &t).unwrap());
        assert!(!pseudo_null_witness(&s(p, k, n, &[3]), &s(p, k, n, &[0, 3])).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let f = s(3, 4, 5, &[1, 2, 3]);
        assert_eq!(LambdaSeries::from_json(&f.to_json()).unwrap(), f);
        let bad = serde_json::json!({"p": 3, "k": 4, "N": 5, "coeffs": [1, "x"]});
        assert_eq!(LambdaSeries::from_json(&bad).unwrap_err(), Error::schema("/coeffs/1", "expected an integer"));
    }
}
