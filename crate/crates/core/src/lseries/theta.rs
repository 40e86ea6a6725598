use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::basefield::{enumerate_places, irreducibles_by_degree, Place};
use crate::coeffrings::{PadicContext, PadicValue};
use crate::error::{Error, Result};
use crate::extensions::Extension;
use crate::groupalg::{FinAbGroup, GroupRingElt, GroupSeries};

/// Trailing zero coefficients required before a product is declared a
/// polynomial.
pub const STABILIZATION_GUARD: usize = 2;

/// How the Euler product over places is expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaStrategy {
    /// Multiply the geometric series of every place of degree at most `N`.
    EulerProduct,
    /// Sum Frobenius classes over monic polynomials, grouping residues
    /// modulo the conductor; needs a multiplicative tower whose finite
    /// ramification set is exactly the primes of its modulus.
    MonicSum,
    /// `MonicSum` when applicable, otherwise `EulerProduct`.
    Auto,
}

/// Progress callback: `(degree, places processed at that degree)`.
pub type Progress = Arc<dyn Fn(usize, usize) + Send + Sync>;

#[derive(Clone)]
pub struct ThetaOptions {
    pub strategy: ThetaStrategy,
    pub progress: Option<Progress>,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions { strategy: ThetaStrategy::Auto, progress: None }
    }
}

/// Dense integer coefficients `a[j][g]` of a truncated series over Z[G].
type Dense = Vec<Vec<i128>>;

fn dense_one(n: usize, order: usize) -> Dense {
    let mut a = vec![vec![0i128; order]; n + 1];
    a[0][0] = 1;
    a
}

/// Index-level group addition table.
fn add_table(g: &FinAbGroup) -> Vec<Vec<usize>> {
    let els: Vec<_> = g.elements().collect();
    els.iter().map(|a| els.iter().map(|b| g.index(&g.add(a, b))).collect()).collect()
}

/// `a <- a * (1 - [f] u^d)^{-1}`, i.e. `a_j += [f] a_{j-d}` in increasing `j`.
fn apply_geometric(a: &mut Dense, d: usize, f: usize, table: &[Vec<usize>]) {
    for j in d..a.len() {
        let (lo, hi) = a.split_at_mut(j);
        let src = &lo[j - d];
        let dst = &mut hi[0];
        for (g, &c) in src.iter().enumerate() {
            if c != 0 {
                dst[table[g][f]] += c;
            }
        }
    }
}

/// `a <- a * (1 - c [f] u^d)`.
fn apply_linear(a: &mut Dense, d: usize, c: i128, f: usize, table: &[Vec<usize>]) {
    for j in (d..a.len()).rev() {
        let (lo, hi) = a.split_at_mut(j);
        let src = &lo[j - d];
        let dst = &mut hi[0];
        for (g, &x) in src.iter().enumerate() {
            if x != 0 {
                dst[table[g][f]] -= c * x;
            }
        }
    }
}

fn dense_mul(a: &Dense, b: &Dense, table: &[Vec<usize>]) -> Dense {
    let n = a.len() - 1;
    let order = a[0].len();
    let mut out = vec![vec![0i128; order]; n + 1];
    for i in 0..=n {
        for j in 0..=n - i {
            for (x, &ca) in a[i].iter().enumerate() {
                if ca == 0 {
                    continue;
                }
                for (y, &cb) in b[j].iter().enumerate() {
                    if cb != 0 {
                        out[i + j][table[x][y]] += ca * cb;
                    }
                }
            }
        }
    }
    out
}

fn to_series(group: &Arc<FinAbGroup>, a: Dense) -> GroupSeries<i128> {
    let n = a.len() - 1;
    let c = a.into_iter().map(|row| GroupRingElt::from_ints(group, row).unwrap()).collect();
    GroupSeries::from_coeffs(group, n, c).unwrap()
}

fn check_s(ext: &Extension, s: &[Place]) -> Result<()> {
    for v in ext.ramification() {
        if !s.contains(v) {
            return Err(Error::InvalidInput(format!(
                "S must contain the ramified place {}",
                ext.cfg().place_label(v)
            )));
        }
    }
    Ok(())
}

fn monic_sum_applies(ext: &Extension, s: &[Place]) -> bool {
    let Some(modulus) = ext.multiplicative_modulus() else { return false };
    let cfg = ext.cfg();
    let finite: Vec<&Place> = s.iter().filter(|v| !v.is_infinity()).collect();
    // every prime of the modulus is in S, and every finite place of S divides it
    let divides = |v: &Place| cfg.poly_rem(&modulus, v.poly().unwrap().as_poly()).is_zero();
    let ram_ok = ext.ramification().iter().all(|v| s.contains(v));
    ram_ok && finite.iter().all(|v| divides(v)) && finite.len() == ext.ramification().len()
}

/// `Theta_{M,S}(u) = nabla_S(u) prod_{v not in S} (1 - [v] u^{deg v})^{-1}`
/// truncated at `u^n`, with exact integer coefficients.
pub fn theta_series(ext: &Extension, s: &[Place], n: usize) -> Result<GroupSeries<i128>> {
    theta_series_with(ext, s, n, &ThetaOptions::default())
}

pub fn theta_series_with(ext: &Extension, s: &[Place], n: usize, opts: &ThetaOptions) -> Result<GroupSeries<i128>> {
    check_s(ext, s)?;
    let use_monic = match opts.strategy {
        ThetaStrategy::EulerProduct => false,
        ThetaStrategy::MonicSum => {
            if !monic_sum_applies(ext, s) {
                return Err(Error::Unsupported("monic sums need a multiplicative tower with S = primes of the modulus".into()));
            }
            true
        }
        ThetaStrategy::Auto => monic_sum_applies(ext, s),
    };
    let group = ext.galois_group().clone();
    let table = add_table(&group);
    let mut a = if use_monic { monic_sum(ext, s, n, &table, opts)? } else { euler_product(ext, s, n, &table, opts)? };
    if s.is_empty() {
        let fr = group.index(&ext.constant_frobenius());
        apply_linear(&mut a, 1, 1, fr, &table);
    }
    Ok(to_series(&group, a))
}

fn euler_product(ext: &Extension, s: &[Place], n: usize, table: &[Vec<usize>], opts: &ThetaOptions) -> Result<Dense> {
    let group = ext.galois_group();
    let order = group.order();
    let places: Vec<Place> = enumerate_places(ext.cfg(), n)?.into_iter().filter(|v| !s.contains(v)).collect();
    let frobs: Vec<(usize, usize)> = places
        .iter()
        .map(|v| Ok((v.degree, group.index(&ext.frobenius(v)?))))
        .collect::<Result<_>>()?;
    if let Some(cb) = &opts.progress {
        for d in 1..=n {
            cb(d, places.iter().filter(|v| v.degree == d).count());
        }
    }
    let chunk = (frobs.len() / rayon::current_num_threads().max(1)).max(64);
    let partials: Vec<Dense> = frobs
        .par_chunks(chunk)
        .map(|part| {
            let mut a = dense_one(n, order);
            for &(d, f) in part {
                apply_geometric(&mut a, d, f, table);
            }
            a
        })
        .collect();
    Ok(partials.into_iter().reduce(|x, y| dense_mul(&x, &y, table)).unwrap_or_else(|| dense_one(n, order)))
}

fn monic_sum(ext: &Extension, s: &[Place], n: usize, table: &[Vec<usize>], opts: &ThetaOptions) -> Result<Dense> {
    let cfg = ext.cfg();
    let group = ext.galois_group();
    let order = group.order();
    let q = cfg.q() as i128;
    let modulus = ext.multiplicative_modulus().expect("checked");
    let dm = modulus.degree().unwrap_or(0);
    let mut a = vec![vec![0i128; order]; n + 1];
    // low degrees: every monic of degree j < deg F individually
    for (j, row) in a.iter_mut().enumerate().take(dm.min(n + 1)) {
        let shift = group.index(&ext.degree_class(j));
        let count = cfg.q().pow(j as u32);
        for idx in 0..count {
            let mono = cfg.monic_from_index(j, idx);
            if let Some(c) = ext.residue_class(mono.as_poly()) {
                row[table[group.index(&c)][shift]] += 1;
            }
        }
        if let Some(cb) = &opts.progress {
            cb(j, count as usize);
        }
    }
    if n >= dm {
        // degrees j >= deg F: each residue class occurs q^{j - deg F} times
        let mut dist = vec![0i128; order];
        for idx in 0..cfg.q().pow(dm as u32) {
            let r = cfg.poly_from_index(dm, idx);
            if let Some(c) = ext.residue_class(&r) {
                dist[group.index(&c)] += 1;
            }
        }
        for (j, row) in a.iter_mut().enumerate().skip(dm) {
            let shift = group.index(&ext.degree_class(j));
            let mult = q.checked_pow((j - dm) as u32).ok_or_else(|| Error::TooLarge("coefficient overflow".into()))?;
            for (g, &c) in dist.iter().enumerate() {
                if c != 0 {
                    row[table[g][shift]] += mult * c;
                }
            }
        }
    }
    let inf = Place::infinity();
    if !s.contains(&inf) {
        let f = group.index(&ext.frobenius(&inf)?);
        apply_geometric(&mut a, 1, f, table);
    }
    Ok(a)
}

/// `Theta_{S,T} = Theta_S * f_T` with `f_T = prod_{v in T} (1 - q_v [v] u^{deg v})`,
/// together with its degree.
#[derive(Clone, Debug)]
pub struct ThetaST {
    pub series: GroupSeries<i128>,
    pub f_t: GroupSeries<i128>,
    pub t: Vec<Place>,
    pub degree: usize,
}

impl ThetaST {
    pub fn to_json(&self) -> Value {
        json!({"series": self.series.to_json(), "f_T": self.f_t.to_json(), "stabilization_degree": self.degree})
    }

    /// `Theta_{S,T}(x) / f_T(x)` in the group ring over `x`'s context; the
    /// denominator is a unit when `q_v x^{deg v}` is not, which holds for
    /// integral `x`.
    pub fn eval_theta(&self, x: &PadicValue) -> Result<GroupRingElt<PadicValue>> {
        let ctx = x.ctx();
        let num = self.series.map(|&c| PadicValue::from_i128(ctx, c)).eval_at(x);
        let den = self.f_t.map(|&c| PadicValue::from_i128(ctx, c)).eval_at(x);
        Ok(num.mul(&den.try_invert()?))
    }
}

/// `f_T(u)` as a series over Z[G].
pub fn f_t_series(ext: &Extension, t: &[Place], n: usize) -> Result<GroupSeries<i128>> {
    let group = ext.galois_group();
    let table = add_table(group);
    let mut a = dense_one(n, group.order());
    let q = ext.cfg().q() as i128;
    for v in t {
        let f = group.index(&ext.frobenius(v)?);
        apply_linear(&mut a, v.degree, q.pow(v.degree as u32), f, &table);
    }
    Ok(to_series(group, a))
}

pub fn theta_st(ext: &Extension, s: &[Place], t: &[Place], n: usize) -> Result<ThetaST> {
    theta_st_with(ext, s, t, n, &ThetaOptions::default())
}

pub fn theta_st_with(ext: &Extension, s: &[Place], t: &[Place], n: usize, opts: &ThetaOptions) -> Result<ThetaST> {
    if t.is_empty() {
        return Err(Error::EmptyT);
    }
    if t.iter().any(|v| s.contains(v)) {
        return Err(Error::SetsOverlap);
    }
    let theta = theta_series_with(ext, s, n, opts)?;
    let f_t = f_t_series(ext, t, n)?;
    let series = theta.mul(&f_t);
    let degree = series.degree().unwrap_or(0);
    if n < degree + STABILIZATION_GUARD {
        return Err(Error::NoStabilization(n));
    }
    let series = series.truncate(degree);
    let f_deg = f_t.degree().unwrap_or(0);
    let f_t = f_t.truncate(f_deg);
    Ok(ThetaST { series, f_t, t: t.to_vec(), degree })
}

/// The default auxiliary set: the least degree-one finite place outside S.
pub fn default_t(ext: &Extension, s: &[Place]) -> Result<Vec<Place>> {
    let irr = irreducibles_by_degree(ext.cfg(), 2)?;
    irr[1..]
        .iter()
        .flatten()
        .map(|f| Place::finite(ext.cfg(), f.clone()).unwrap())
        .find(|v| !s.contains(v))
        .map(|v| vec![v])
        .ok_or_else(|| Error::InvalidInput("no auxiliary place available".into()))
}

/// The Stickelberger element `Theta_{S,T}(1) f_T(1)^{-1}` in `(Z/p^k)[G]`.
pub fn stickelberger(ext: &Extension, s: &[Place], t: &[Place], n: usize, ctx: &Arc<PadicContext>) -> Result<GroupRingElt<PadicValue>> {
    let st = theta_st(ext, s, t, n)?;
    st.eval_theta(&PadicValue::one(ctx))
}

/// Exact integer group-ring polynomial `sum_j c_j u^j` evaluated at `u = 1`.
pub fn eval_at_one(x: &GroupSeries<i128>) -> GroupRingElt<i128> {
    x.eval_at(&1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::FqConfig;
    use crate::extensions::ExtensionDescriptor;

    fn ext(q: u64, d: ExtensionDescriptor) -> Extension {
        Extension::new(&FqConfig::from_q(q).unwrap(), &d).unwrap()
    }

    #[test]
    fn trivial_tower_closed_form() {
        let e = ext(2, ExtensionDescriptor::trivial());
        let th = theta_series(&e, &[], 16).unwrap();
        for j in 0..=16 {
            assert_eq!(th.coeff(j).coeffs()[0], 1i128 << j);
        }
        let cfg = e.cfg().clone();
        let t = vec![Place::finite(&cfg, cfg.parse_monic("t").unwrap()).unwrap()];
        let st = theta_st(&e, &[], &t, 8).unwrap();
        assert_eq!(st.degree, 0);
        let ctx = PadicContext::base(2, 8).unwrap();
        let th = stickelberger(&e, &[], &t, 8, &ctx).unwrap();
        assert_eq!(th.coeffs()[0].base_value(), Some(255));
    }

    #[test]
    fn constant_layer_first_coefficient() {
        let e = ext(2, ExtensionDescriptor::Constant { n: 1 });
        let th = theta_series(&e, &[], 3).unwrap();
        assert_eq!(th.coeff(1).coeffs(), &[0, 2]);
    }

    #[test]
    fn strategies_agree() {
        let cfg = FqConfig::from_q(2).unwrap();
        let d = ExtensionDescriptor::Product {
            left: Box::new(ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t").unwrap(), level: 3 }),
            right: Box::new(ExtensionDescriptor::Constant { n: 1 }),
        };
        let e = Extension::new(&cfg, &d).unwrap();
        let tp = Place::finite(&cfg, cfg.parse_monic("t").unwrap()).unwrap();
        for s in [vec![tp.clone()], vec![Place::infinity(), tp.clone()]] {
            let a = theta_series_with(&e, &s, 9, &ThetaOptions { strategy: ThetaStrategy::EulerProduct, progress: None }).unwrap();
            let b = theta_series_with(&e, &s, 9, &ThetaOptions { strategy: ThetaStrategy::MonicSum, progress: None }).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn overlap_and_empty_t() {
        let cfg = FqConfig::from_q(2).unwrap();
        let e = Extension::new(&cfg, &ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t").unwrap(), level: 3 }).unwrap();
        let tp = Place::finite(&cfg, cfg.parse_monic("t").unwrap()).unwrap();
        assert_eq!(theta_st(&e, std::slice::from_ref(&tp), std::slice::from_ref(&tp), 8).unwrap_err(), Error::SetsOverlap);
        assert_eq!(theta_st(&e, std::slice::from_ref(&tp), &[], 8).unwrap_err(), Error::EmptyT);
        let t1 = default_t(&e, std::slice::from_ref(&tp)).unwrap();
        assert_eq!(theta_st(&e, &[tp], &t1, 1).unwrap_err(), Error::NoStabilization(1));
    }
}
