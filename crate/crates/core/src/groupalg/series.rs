use std::sync::Arc;

use serde_json::{json, Value};

use super::{Character, Coeff, FinAbGroup, GroupRingElt, Surjection};
use crate::error::{Error, Result};

/// `sum_{j <= cap} x_j u^j` with group-ring coefficients; coefficients up to
/// `cap` are exact, nothing beyond is represented.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSeries<R> {
    group: Arc<FinAbGroup>,
    cap: usize,
    c: Vec<GroupRingElt<R>>,
}

impl<R: Coeff> GroupSeries<R> {
    pub fn zero(group: &Arc<FinAbGroup>, cap: usize, template: &R) -> Self {
        GroupSeries { group: group.clone(), cap, c: vec![GroupRingElt::zero(group, template); cap + 1] }
    }

    pub fn one(group: &Arc<FinAbGroup>, cap: usize, template: &R) -> Self {
        let mut s = Self::zero(group, cap, template);
        s.c[0] = GroupRingElt::one(group, template);
        s
    }

    pub fn from_coeffs(group: &Arc<FinAbGroup>, cap: usize, mut c: Vec<GroupRingElt<R>>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidInput("series needs at least one coefficient".into()));
        }
        if c.iter().any(|x| x.group().orders() != group.orders()) {
            return Err(Error::InvalidInput("coefficients over different groups".into()));
        }
        let z = GroupRingElt::zero(group, c[0].template());
        c.resize(cap + 1, z);
        Ok(GroupSeries { group: group.clone(), cap, c })
    }

    pub fn group(&self) -> &Arc<FinAbGroup> {
        &self.group
    }
    pub fn cap(&self) -> usize {
        self.cap
    }
    pub fn coeffs(&self) -> &[GroupRingElt<R>] {
        &self.c
    }
    pub fn coeff(&self, j: usize) -> &GroupRingElt<R> {
        &self.c[j]
    }

    /// Same series with a smaller cap.
    pub fn truncate(&self, cap: usize) -> Self {
        let cap = cap.min(self.cap);
        GroupSeries { group: self.group.clone(), cap, c: self.c[..=cap].to_vec() }
    }

    /// Highest index with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        (0..=self.cap).rev().find(|&j| !self.c[j].is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        let c = (0..=cap).map(|j| self.c[j].add(&o.c[j])).collect();
        GroupSeries { group: self.group.clone(), cap, c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        let c = (0..=cap).map(|j| self.c[j].sub(&o.c[j])).collect();
        GroupSeries { group: self.group.clone(), cap, c }
    }

    /// Product truncated at the smaller cap.
    pub fn mul(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        let t = self.c[0].template();
        let mut c = vec![GroupRingElt::zero(&self.group, t); cap + 1];
        for i in 0..=cap {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..=cap - i {
                if !o.c[j].is_zero() {
                    c[i + j] = c[i + j].add(&self.c[i].mul(&o.c[j]));
                }
            }
        }
        GroupSeries { group: self.group.clone(), cap, c }
    }

    fn map_coeffs(&self, f: impl Fn(&GroupRingElt<R>) -> Result<GroupRingElt<R>>) -> Result<Self> {
        let c = self.c.iter().map(f).collect::<Result<Vec<_>>>()?;
        let group = c[0].group().clone();
        Ok(GroupSeries { group, cap: self.cap, c })
    }

    pub fn sharp(&self) -> Self {
        self.map_coeffs(|x| Ok(x.sharp())).unwrap()
    }

    pub fn twist_star(&self, phi: &[R]) -> Result<Self> {
        self.map_coeffs(|x| x.twist_star(phi))
    }

    pub fn h_project(&self, psi: &[R]) -> Result<Self> {
        self.map_coeffs(|x| x.h_project(psi))
    }

    pub fn project_level(&self, pi: &Surjection) -> Result<Self> {
        self.map_coeffs(|x| x.project_level(pi))
    }

    /// Coefficientwise character values, a polynomial in `u`.
    pub fn eval_char(&self, omega: &Character, zeta_table: &[R]) -> Result<Vec<R>> {
        self.c.iter().map(|x| x.eval_char(omega, zeta_table)).collect()
    }

    /// `sum_j x_j u^j` at a scalar `u`.
    pub fn eval_at(&self, u: &R) -> GroupRingElt<R> {
        let mut acc = GroupRingElt::zero(&self.group, u);
        for x in self.c.iter().rev() {
            acc = acc.scale(u).add(x);
        }
        acc
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S + Copy) -> GroupSeries<S> {
        GroupSeries { group: self.group.clone(), cap: self.cap, c: self.c.iter().map(|x| x.map(f)).collect() }
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> =
            self.c.iter().map(|x| Value::Array(x.coeffs().iter().map(Coeff::rjson).collect())).collect();
        json!({"group": self.group.to_json(), "cap": self.cap, "coeffs": coeffs})
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_inverts_one_minus_gu() {
        let g = FinAbGroup::gamma(vec![3]).unwrap();
        let cap = 7;
        let mut a = GroupSeries::one(&g, cap, &0i128);
        a.c[1] = GroupRingElt::basis(&g, &[1], -1);
        let mut b = GroupSeries::zero(&g, cap, &0i128);
        for j in 0..=cap {
            b.c[j] = GroupRingElt::basis(&g, &[j as u64], 1);
        }
        assert_eq!(a.mul(&b), GroupSeries::one(&g, cap, &0));
        assert_eq!(a.degree(), Some(1));
        assert_eq!(b.truncate(3).cap(), 3);
        let at_one = b.eval_at(&1);
        assert_eq!(at_one.coeffs(), &[3, 3, 2]);
    }
}
