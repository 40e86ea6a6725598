//! Concrete abelian towers over F_q(t) at a finite level: constant
//! extensions, p-parts of Carlitz cyclotomic extensions, products, synthetic
//! Frobenius tables, and a variant with an extra constant H-part.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::basefield::{FqConfig, MonicPoly, Place, Poly};
use crate::error::{Error, Result};
use crate::groupalg::{Character, FinAbGroup, GrpElt, Surjection};
use crate::intlat::{hnf, snf, vec_mat};

/// Largest residue ring `F_q[t]/f^m` that is enumerated.
pub const CARLITZ_LIMIT: u64 = 1 << 16;

/// Serializable tower data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionDescriptor {
    /// The layer of degree `p^n` of the constant Z_p-extension.
    Constant { n: u32 },
    /// The p-part of the Carlitz extension of conductor `f^level`.
    Carlitz { f: MonicPoly, level: u32 },
    Product { left: Box<ExtensionDescriptor>, right: Box<ExtensionDescriptor> },
    /// Synthetic Frobenius data; `map` must cover every place used.
    Table { s: Vec<Place>, map: Vec<(Place, GrpElt)>, orders: Vec<u64>, h_split: usize },
    /// `base` times a constant extension of order `h_order` prime to p, whose
    /// Frobenius at `v` is `h_step * deg v`.
    Tilde { base: Box<ExtensionDescriptor>, h_order: u64, h_step: u64 },
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::schema(format!("/{key}"), "missing field"))
}

fn get_u64(v: &Value, key: &str) -> Result<u64> {
    get(v, key)?.as_u64().ok_or_else(|| Error::schema(format!("/{key}"), "expected a non-negative integer"))
}

fn elt_from_json(v: &Value) -> Result<GrpElt> {
    v.as_array()
        .ok_or_else(|| Error::schema("", "group element must be an array"))?
        .iter()
        .enumerate()
        .map(|(i, x)| x.as_u64().ok_or_else(|| Error::schema(format!("/{i}"), "expected an integer")))
        .collect()
}

impl ExtensionDescriptor {
    /// The trivial extension K/K.
    pub fn trivial() -> Self {
        ExtensionDescriptor::Constant { n: 0 }
    }

    /// Parses the JSON schema; errors carry JSON pointers relative to `v`.
    pub fn from_json(cfg: &FqConfig, v: &Value) -> Result<Self> {
        let kind = get(v, "kind")?.as_str().ok_or_else(|| Error::schema("/kind", "expected a string"))?;
        match kind {
            "constant" => Ok(ExtensionDescriptor::Constant { n: get_u64(v, "n")? as u32 }),
            "carlitz" => {
                let f = get(v, "f")?.as_str().ok_or_else(|| Error::schema("/f", "expected a polynomial string"))?;
                let f = cfg.parse_monic(f).map_err(|e| e.at("/f"))?;
                let level = get_u64(v, "level")? as u32;
                Ok(ExtensionDescriptor::Carlitz { f, level })
            }
            "product" => Ok(ExtensionDescriptor::Product {
                left: Box::new(Self::from_json(cfg, get(v, "left")?).map_err(|e| e.at("/left"))?),
                right: Box::new(Self::from_json(cfg, get(v, "right")?).map_err(|e| e.at("/right"))?),
            }),
            "table" => {
                let s = get(v, "S")?
                    .as_array()
                    .ok_or_else(|| Error::schema("/S", "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| cfg.place_from_json(x).map_err(|e| e.at(&format!("/S/{i}"))))
                    .collect::<Result<Vec<_>>>()?;
                let orders = elt_from_json(get(v, "orders")?).map_err(|e| e.at("/orders"))?;
                let h_split = v.get("h_split").and_then(Value::as_u64).map_or(orders.len(), |h| h as usize);
                let map = get(v, "map")?
                    .as_array()
                    .ok_or_else(|| Error::schema("/map", "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(i, pair)| {
                        let ptr = format!("/map/{i}");
                        let arr = pair
                            .as_array()
                            .filter(|a| a.len() == 2)
                            .ok_or_else(|| Error::schema(ptr.clone(), "expected [place, element]"))?;
                        let place = cfg.place_from_json(&arr[0]).map_err(|e| e.at(&format!("{ptr}/0")))?;
                        let elt = elt_from_json(&arr[1]).map_err(|e| e.at(&format!("{ptr}/1")))?;
                        Ok((place, elt))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ExtensionDescriptor::Table { s, map, orders, h_split })
            }
            "tilde" => Ok(ExtensionDescriptor::Tilde {
                base: Box::new(Self::from_json(cfg, get(v, "base")?).map_err(|e| e.at("/base"))?),
                h_order: get_u64(v, "h_order")?,
                h_step: v.get("h_step").and_then(Value::as_u64).unwrap_or(1),
            }),
            other => Err(Error::schema("/kind", format!("unknown descriptor kind {other:?}"))),
        }
    }

    pub fn to_json(&self, cfg: &FqConfig) -> Value {
        match self {
            ExtensionDescriptor::Constant { n } => json!({"kind": "constant", "n": n}),
            ExtensionDescriptor::Carlitz { f, level } => {
                json!({"kind": "carlitz", "f": cfg.poly_to_string(f.as_poly()), "level": level})
            }
            ExtensionDescriptor::Product { left, right } => {
                json!({"kind": "product", "left": left.to_json(cfg), "right": right.to_json(cfg)})
            }
            ExtensionDescriptor::Table { s, map, orders, h_split } => json!({
                "kind": "table",
                "S": s.iter().map(|v| cfg.place_to_json(v)).collect::<Vec<_>>(),
                "map": map.iter().map(|(v, e)| json!([cfg.place_to_json(v), e])).collect::<Vec<_>>(),
                "orders": orders,
                "h_split": h_split,
            }),
            ExtensionDescriptor::Tilde { base, h_order, h_step } => {
                json!({"kind": "tilde", "base": base.to_json(cfg), "h_order": h_order, "h_step": h_step})
            }
        }
    }
}

/// Unit-group data of `F_q[t]/f^m` restricted to its p-Sylow subgroup.
#[derive(Debug)]
struct CarlitzData {
    f: MonicPoly,
    level: u32,
    modulus: Poly,
    /// Group index of the p-part of each residue, `u32::MAX` for non-units.
    class: Vec<u32>,
    /// Representatives of the cyclic generators.
    gens: Vec<Poly>,
    /// Every element of `1 + f A / f^m` with its discrete logarithm.
    u1: Vec<(Poly, GrpElt)>,
}

#[derive(Debug)]
enum Node {
    Constant,
    Carlitz(CarlitzData),
    Product(Box<Extension>, Box<Extension>),
    Table(BTreeMap<Place, GrpElt>),
    Tilde { base: Box<Extension>, h_order: u64, h_step: u64 },
}

/// A descriptor resolved against a base field: Galois group, ramification
/// set and a Frobenius rule.
#[derive(Debug)]
pub struct Extension {
    cfg: Arc<FqConfig>,
    desc: ExtensionDescriptor,
    group: Arc<FinAbGroup>,
    s: Vec<Place>,
    node: Node,
}

impl Extension {
    pub fn new(cfg: &Arc<FqConfig>, desc: &ExtensionDescriptor) -> Result<Self> {
        let p = cfg.p();
        let (group, s, node) = match desc {
            ExtensionDescriptor::Constant { n } => {
                let order = p
                    .checked_pow(*n)
                    .filter(|&o| o <= crate::groupalg::MAX_GROUP_ORDER as u64)
                    .ok_or_else(|| Error::TooLarge(format!("constant layer p^{n}")))?;
                let orders = if *n == 0 { vec![] } else { vec![order] };
                (FinAbGroup::gamma(orders)?, vec![], Node::Constant)
            }
            ExtensionDescriptor::Carlitz { f, level } => {
                if *level == 0 {
                    return Err(Error::InvalidInput("Carlitz level must be at least 1".into()));
                }
                let place = Place::finite(cfg, f.clone())?;
                let data = carlitz_data(cfg, f, *level)?;
                let orders = data.orders.clone();
                (FinAbGroup::gamma(orders)?, vec![place], Node::Carlitz(data.data))
            }
            ExtensionDescriptor::Product { left, right } => {
                let l = Extension::new(cfg, left)?;
                let r = Extension::new(cfg, right)?;
                if l.group.h_split() != l.group.rank() || r.group.h_split() != r.group.rank() {
                    return Err(Error::Unsupported("products of towers with an H-part".into()));
                }
                let mut orders = l.group.orders().to_vec();
                orders.extend_from_slice(r.group.orders());
                let mut s: Vec<Place> = l.s.iter().chain(&r.s).cloned().collect();
                s.sort();
                s.dedup();
                (FinAbGroup::gamma(orders)?, s, Node::Product(Box::new(l), Box::new(r)))
            }
            ExtensionDescriptor::Table { s, map, orders, h_split } => {
                let group = FinAbGroup::new(orders.clone(), *h_split)?;
                for (i, &c) in orders[..*h_split].iter().enumerate() {
                    if !is_power_of(c, p) {
                        return Err(Error::InvalidInput(format!("Gamma-part factor {i} has order {c}, not a power of {p}")));
                    }
                }
                for &c in &orders[*h_split..] {
                    if c % p == 0 {
                        return Err(Error::InvalidInput(format!("H-part factor of order {c} is not prime to {p}")));
                    }
                }
                let mut s = s.clone();
                s.sort();
                s.dedup();
                let mut table = BTreeMap::new();
                for (v, e) in map {
                    if s.contains(v) {
                        return Err(Error::PlaceInS(cfg.place_label(v)));
                    }
                    if e.len() != group.rank() {
                        return Err(Error::InvalidInput("table element has the wrong rank".into()));
                    }
                    let red = group.reduce(&e.iter().map(|&x| x as i128).collect::<Vec<_>>());
                    table.insert(v.clone(), red);
                }
                (group, s, Node::Table(table))
            }
            ExtensionDescriptor::Tilde { base, h_order, h_step } => {
                let b = Extension::new(cfg, base)?;
                if b.group.h_split() != b.group.rank() {
                    return Err(Error::Unsupported("nested H-parts".into()));
                }
                if *h_order == 0 || h_order % p == 0 {
                    return Err(Error::InvalidInput(format!("H order {h_order} must be positive and prime to {p}")));
                }
                let mut orders = b.group.orders().to_vec();
                let r = orders.len();
                orders.push(*h_order);
                let s = b.s.clone();
                let node = Node::Tilde { base: Box::new(b), h_order: *h_order, h_step: h_step % h_order };
                (FinAbGroup::new(orders, r)?, s, node)
            }
        };
        Ok(Extension { cfg: cfg.clone(), desc: desc.clone(), group, s, node })
    }

    pub fn cfg(&self) -> &Arc<FqConfig> {
        &self.cfg
    }
    pub fn descriptor(&self) -> &ExtensionDescriptor {
        &self.desc
    }
    pub fn galois_group(&self) -> &Arc<FinAbGroup> {
        &self.group
    }
    /// Declared ramification set, sorted.
    pub fn ramification(&self) -> &[Place] {
        &self.s
    }

    /// Representatives in `F_q[t]` of the cyclic generators of a Carlitz
    /// group.
    pub fn carlitz_generators(&self) -> Option<&[Poly]> {
        match &self.node {
            Node::Carlitz(d) => Some(&d.gens),
            _ => None,
        }
    }

    /// Arithmetic Frobenius at a place outside the ramification set.
    pub fn frobenius(&self, v: &Place) -> Result<GrpElt> {
        if self.s.contains(v) {
            return Err(Error::PlaceInS(self.cfg.place_label(v)));
        }
        match &self.node {
            Node::Constant => Ok(self.group.reduce(&[v.degree as i128][..self.group.rank()])),
            Node::Carlitz(d) => match v.poly() {
                None => Ok(self.group.identity()),
                Some(f) => self.carlitz_class(d, f.as_poly()),
            },
            Node::Product(l, r) => {
                let mut e = l.frobenius(v)?;
                e.extend(r.frobenius(v)?);
                Ok(e)
            }
            Node::Table(map) => map.get(v).cloned().ok_or_else(|| Error::TableMiss(self.cfg.place_label(v))),
            Node::Tilde { base, h_order, h_step } => {
                let mut e = base.frobenius(v)?;
                e.push(h_step * (v.degree as u64 % h_order) % h_order);
                Ok(e)
            }
        }
    }

    fn carlitz_class(&self, d: &CarlitzData, a: &Poly) -> Result<GrpElt> {
        let r = self.cfg.poly_rem(a, &d.modulus);
        let c = d.class[self.cfg.poly_index(&r) as usize];
        if c == u32::MAX {
            return Err(Error::PlaceInS(self.cfg.poly_to_string(a)));
        }
        Ok(self.group.element(c as usize))
    }

    /// Product of the Carlitz moduli, or `None` when the Frobenius rule is
    /// not induced by a character of `(F_q[t]/F)^x` times the degree.
    pub fn multiplicative_modulus(&self) -> Option<Poly> {
        match &self.node {
            Node::Constant => Some(Poly::one()),
            Node::Carlitz(d) => Some(d.modulus.clone()),
            Node::Product(l, r) => {
                let a = l.multiplicative_modulus()?;
                let b = r.multiplicative_modulus()?;
                let g = self.cfg.poly_gcd(&a, &b);
                (g.degree() == Some(0)).then(|| self.cfg.poly_mul(&a, &b))
            }
            Node::Table(_) => None,
            Node::Tilde { base, .. } => base.multiplicative_modulus(),
        }
    }

    /// For multiplicative towers: the part of the Frobenius class of a monic
    /// `a` that depends on `a` modulo the modulus; `None` if `a` is not
    /// coprime to it.
    pub fn residue_class(&self, a: &Poly) -> Option<GrpElt> {
        match &self.node {
            Node::Constant => Some(self.group.identity()),
            Node::Carlitz(d) => self.carlitz_class(d, a).ok(),
            Node::Product(l, r) => {
                let mut e = l.residue_class(a)?;
                e.extend(r.residue_class(a)?);
                Some(e)
            }
            Node::Table(_) => None,
            Node::Tilde { base, .. } => {
                let mut e = base.residue_class(a)?;
                e.push(0);
                Some(e)
            }
        }
    }

    /// For multiplicative towers: the part of the Frobenius class of a monic
    /// of degree `d` that depends only on `d`.
    pub fn degree_class(&self, d: usize) -> GrpElt {
        match &self.node {
            Node::Constant => self.group.reduce(&[d as i128][..self.group.rank()]),
            Node::Carlitz(_) | Node::Table(_) => self.group.identity(),
            Node::Product(l, r) => {
                let mut e = l.degree_class(d);
                e.extend(r.degree_class(d));
                e
            }
            Node::Tilde { base, h_order, h_step } => {
                let mut e = base.degree_class(d);
                e.push(h_step * (d as u64 % h_order) % h_order);
                e
            }
        }
    }

    /// The Frobenius of the constant extension, `[deg v = 1]`, when the
    /// tower contains a constant part; used for the `S = {}` correction.
    pub fn constant_frobenius(&self) -> GrpElt {
        self.degree_class(1)
    }

    /// Ramification locus and conductor degree of a character of the
    /// Galois group.
    pub fn character_data(&self, omega: &Character) -> Result<(Vec<Place>, u64)> {
        if omega.exps().len() != self.group.rank() {
            return Err(Error::NotHomomorphism("character rank does not match the group".into()));
        }
        if omega.is_trivial() {
            return Ok((vec![], 0));
        }
        match &self.node {
            Node::Constant => Ok((vec![], 0)),
            Node::Carlitz(d) => {
                let fdeg = d.f.degree() as u64;
                for m in 1..=d.level {
                    let fm = self.cfg.poly_pow(d.f.as_poly(), m);
                    let trivial_here = d.u1.iter().all(|(x, log)| {
                        let x1 = self.cfg.poly_sub(x, &Poly::one());
                        !self.cfg.poly_rem(&x1, &fm).is_zero() || omega.exponent(log) == 0
                    });
                    if trivial_here {
                        return Ok((self.s.clone(), fdeg * m as u64));
                    }
                }
                unreachable!("omega is trivial on 1 + f^level")
            }
            Node::Product(l, r) => {
                let k = l.group.rank();
                let (a, b) = omega.split_at(k);
                let (sl, dl) = l.character_data(&a)?;
                let (sr, dr) = r.character_data(&b)?;
                let mut s: Vec<Place> = sl.into_iter().chain(sr).collect();
                s.sort();
                s.dedup();
                Ok((s, dl + dr))
            }
            Node::Table(_) => Ok((self.s.clone(), self.s.iter().map(|v| v.degree as u64).sum())),
            Node::Tilde { base, .. } => {
                let (a, _) = omega.split_at(base.group.rank());
                base.character_data(&a)
            }
        }
    }

    /// The natural quotient map onto a sub-tower: lower Carlitz level or
    /// constant layer, a factor of a product, or the base of a tilde tower.
    pub fn quotient_map(&self, target: &Extension) -> Result<Surjection> {
        let src = self.group.clone();
        let tgt = target.group.clone();
        if self.desc == target.desc {
            return Ok(Surjection::identity(&src));
        }
        let bad = || Error::BadSurjection("target is not a recognized quotient".into());
        match (&self.node, &target.node) {
            (Node::Constant, Node::Constant) => {
                if tgt.order() > src.order() {
                    return Err(bad());
                }
                let imgs = (0..src.rank()).map(|_| tgt.reduce(&[1][..tgt.rank()])).collect();
                Surjection::new(src, tgt, imgs)
            }
            (Node::Carlitz(a), Node::Carlitz(b)) => {
                if a.f != b.f || b.level > a.level {
                    return Err(bad());
                }
                let imgs = a.gens.iter().map(|g| target.carlitz_class(b, g)).collect::<Result<Vec<_>>>()?;
                Surjection::new(src, tgt, imgs)
            }
            (Node::Product(l, r), Node::Product(tl, tr)) => {
                if let (Ok(pl), Ok(pr)) = (l.quotient_map(tl), r.quotient_map(tr)) {
                    let mut imgs = Vec::new();
                    for img in pl.images() {
                        let mut e = img.clone();
                        e.extend(tr.group.identity());
                        imgs.push(e);
                    }
                    for img in pr.images() {
                        let mut e = tl.group.identity();
                        e.extend(img.iter().copied());
                        imgs.push(e);
                    }
                    return Surjection::new(src, tgt, imgs);
                }
                self.factor_quotient(l, r, target)
            }
            (Node::Product(l, r), _) => self.factor_quotient(l, r, target),
            (Node::Tilde { base, .. }, _) => {
                let pb = base.quotient_map(target)?;
                let mut imgs: Vec<GrpElt> = pb.images().to_vec();
                imgs.push(tgt.identity());
                Surjection::new(src, tgt, imgs)
            }
            _ => Err(bad()),
        }
    }

    fn factor_quotient(&self, l: &Extension, r: &Extension, target: &Extension) -> Result<Surjection> {
        let src = self.group.clone();
        let tgt = target.group.clone();
        if let Ok(pl) = l.quotient_map(target) {
            let mut imgs: Vec<GrpElt> = pl.images().to_vec();
            imgs.extend((0..r.group.rank()).map(|_| tgt.identity()));
            return Surjection::new(src, tgt, imgs);
        }
        let pr = r.quotient_map(target)?;
        let mut imgs: Vec<GrpElt> = (0..l.group.rank()).map(|_| tgt.identity()).collect();
        imgs.extend(pr.images().iter().cloned());
        Surjection::new(src, tgt, imgs)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "descriptor": self.desc.to_json(&self.cfg),
            "group": self.group.to_json(),
            "S": self.s.iter().map(|v| self.cfg.place_to_json(v)).collect::<Vec<_>>(),
        })
    }
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n > 1 && n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

struct CarlitzBuild {
    data: CarlitzData,
    orders: Vec<u64>,
}

/// Enumerates `1 + f A / f^m`, chooses generators greedily in index order,
/// reads off relations from the Cayley graph and diagonalizes them.
fn carlitz_data(cfg: &FqConfig, f: &MonicPoly, level: u32) -> Result<CarlitzBuild> {
    let q = cfg.q();
    let fdeg = f.degree();
    let n = fdeg * level as usize;
    let size = q
        .checked_pow(n as u32)
        .filter(|&s| s <= CARLITZ_LIMIT)
        .ok_or_else(|| Error::TooLarge(format!("F_{q}[t]/f^{level} with deg f = {fdeg}")))?;
    let modulus = cfg.poly_pow(f.as_poly(), level);
    let u1_order = q.pow((n - fdeg) as u32);
    let mul = |a: &Poly, b: &Poly| cfg.poly_mulmod(a, b, &modulus);
    let idx = |a: &Poly| cfg.poly_index(a);

    let u1_polys: Vec<Poly> = (0..u1_order)
        .map(|i| {
            let s = cfg.poly_from_index(n - fdeg, i);
            cfg.poly_add(&Poly::one(), &cfg.poly_mul(f.as_poly(), &s))
        })
        .collect();
    let mut sorted = u1_polys.clone();
    sorted.sort_by_key(|a| idx(a));

    // greedy generators and breadth-first span
    let mut gens: Vec<Poly> = Vec::new();
    let mut span: HashMap<u64, Vec<i128>> = HashMap::new();
    span.insert(idx(&Poly::one()), vec![]);
    for cand in &sorted {
        if span.contains_key(&idx(cand)) {
            continue;
        }
        gens.push(cand.clone());
        let r = gens.len();
        span.clear();
        let mut queue = VecDeque::new();
        span.insert(idx(&Poly::one()), vec![0; r]);
        queue.push_back((Poly::one(), vec![0i128; r]));
        while let Some((x, v)) = queue.pop_front() {
            for (i, g) in gens.iter().enumerate() {
                let y = mul(&x, g);
                if let std::collections::hash_map::Entry::Vacant(e) = span.entry(idx(&y)) {
                    let mut w = v.clone();
                    w[i] += 1;
                    e.insert(w.clone());
                    queue.push_back((y, w));
                }
            }
        }
        if span.len() as u64 == u1_order {
            break;
        }
    }
    let r = gens.len();

    let (orders, v_mat, vi_mat, keep) = if r == 0 {
        (vec![], vec![], vec![], vec![])
    } else {
        let mut lattice: Vec<Vec<i128>> = Vec::new();
        let mut batch: Vec<Vec<i128>> = Vec::new();
        for x in &u1_polys {
            let vx = &span[&idx(x)];
            for (i, g) in gens.iter().enumerate() {
                let vy = &span[&idx(&mul(x, g))];
                let rel: Vec<i128> = (0..r).map(|j| vx[j] + i128::from(i == j) - vy[j]).collect();
                if rel.iter().any(|&c| c != 0) {
                    batch.push(rel);
                }
                if batch.len() >= 64 {
                    batch.append(&mut lattice);
                    lattice = hnf(&batch);
                    batch.clear();
                }
            }
        }
        batch.append(&mut lattice);
        let lattice = hnf(&batch);
        if lattice.len() != r {
            return Err(Error::InvalidInput("relation lattice is not of full rank".into()));
        }
        let (d, v, vi) = snf(&lattice);
        let keep: Vec<usize> = (0..r).filter(|&j| d[j] > 1).collect();
        (keep.iter().map(|&j| d[j] as u64).collect::<Vec<u64>>(), v, vi, keep)
    };
    let group = FinAbGroup::gamma(orders.clone())?;

    let pow_mod = |a: &Poly, mut e: i128| {
        e = e.rem_euclid(u1_order as i128);
        let mut acc = Poly::one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(&acc, &b);
            }
            b = mul(&b, &b);
            e >>= 1;
        }
        acc
    };
    let new_gens: Vec<Poly> = keep
        .iter()
        .map(|&j| {
            gens.iter().enumerate().fold(Poly::one(), |acc, (i, g)| mul(&acc, &pow_mod(g, vi_mat[j][i])))
        })
        .collect();

    let log_of = |vx: &[i128]| -> GrpElt {
        let w = vec_mat(vx, &v_mat);
        keep.iter().zip(&orders).map(|(&j, &o)| w[j].rem_euclid(o as i128) as u64).collect()
    };
    let mut log_table: HashMap<u64, u32> = HashMap::new();
    let mut u1 = Vec::with_capacity(u1_polys.len());
    for x in &u1_polys {
        let lg = if r == 0 { vec![] } else { log_of(&span[&idx(x)]) };
        log_table.insert(idx(x), group.index(&lg) as u32);
        u1.push((x.clone(), lg));
    }

    // projection onto the p-part: x -> x^{(q^d - 1) c} with c (q^d - 1) = 1 mod |U1|
    let qd1 = q.pow(fdeg as u32) - 1;
    let c = if u1_order == 1 { 0 } else { crate::linalg::invmod(qd1 % u1_order, u1_order).unwrap() };
    let e = qd1 as i128 * c as i128;
    let mut class = vec![u32::MAX; size as usize];
    for (i, slot) in class.iter_mut().enumerate() {
        let a = cfg.poly_from_index(n, i as u64);
        if cfg.poly_rem(&a, f.as_poly()).is_zero() {
            continue;
        }
        let proj = if u1_order == 1 { Poly::one() } else { pow_mod_full(cfg, &a, e, &modulus) };
        *slot = log_table[&idx(&proj)];
    }
    Ok(CarlitzBuild { data: CarlitzData { f: f.clone(), level, modulus, class, gens: new_gens, u1 }, orders })
}

fn pow_mod_full(cfg: &FqConfig, a: &Poly, mut e: i128, m: &Poly) -> Poly {
    let mut acc = Poly::one();
    let mut b = cfg.poly_rem(a, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = cfg.poly_mulmod(&acc, &b, m);
        }
        b = cfg.poly_mulmod(&b, &b, m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::enumerate_places;

    fn carlitz(cfg: &Arc<FqConfig>, f: &str, level: u32) -> Extension {
        let d = ExtensionDescriptor::Carlitz { f: cfg.parse_monic(f).unwrap(), level };
        Extension::new(cfg, &d).unwrap()
    }

    #[test]
    fn carlitz_t_cubed_over_f2() {
        let cfg = FqConfig::from_q(2).unwrap();
        let ext = carlitz(&cfg, "t", 3);
        assert_eq!(ext.galois_group().orders(), &[4]);
        assert_eq!(ext.carlitz_generators().unwrap()[0], cfg.parse_poly("1+t").unwrap());
        let v = Place::finite(&cfg, cfg.parse_monic("1+t").unwrap()).unwrap();
        assert_eq!(ext.frobenius(&v).unwrap(), vec![1]);
        assert_eq!(ext.frobenius(&Place::infinity()).unwrap(), vec![0]);
        let t = Place::finite(&cfg, cfg.parse_monic("t").unwrap()).unwrap();
        assert!(matches!(ext.frobenius(&t), Err(Error::PlaceInS(_))));
    }

    #[test]
    fn carlitz_unit_group_sizes() {
        let cfg = FqConfig::from_q(2).unwrap();
        assert_eq!(carlitz(&cfg, "1+t+t^2", 1).galois_group().order(), 1);
        let cfg3 = FqConfig::from_q(3).unwrap();
        assert_eq!(carlitz(&cfg3, "t", 2).galois_group().orders(), &[3]);
        // (F_2[t]/t^4)^x has p-part of order 8, Z/2 x Z/4
        assert_eq!(carlitz(&cfg, "t", 4).galois_group().orders(), &[2, 4]);
    }

    #[test]
    fn constant_layer() {
        let cfg = FqConfig::from_q(3).unwrap();
        let ext = Extension::new(&cfg, &ExtensionDescriptor::Constant { n: 2 }).unwrap();
        assert_eq!(ext.galois_group().orders(), &[9]);
        for v in enumerate_places(&cfg, 3).unwrap() {
            assert_eq!(ext.frobenius(&v).unwrap(), vec![v.degree as u64]);
        }
    }

    #[test]
    fn conductor_degrees() {
        let cfg = FqConfig::from_q(2).unwrap();
        let ext = carlitz(&cfg, "t", 3);
        let g = ext.galois_group();
        let chi4 = Character::new(g, 4, vec![1]).unwrap();
        let chi2 = Character::new(g, 4, vec![2]).unwrap();
        let (s, d) = ext.character_data(&chi4).unwrap();
        assert_eq!((s.len(), d), (1, 3));
        assert_eq!(ext.character_data(&chi2).unwrap().1, 2);
        assert_eq!(ext.character_data(&Character::trivial(g)).unwrap(), (vec![], 0));
    }

    #[test]
    fn level_projection_matches_frobenius() {
        let cfg = FqConfig::from_q(2).unwrap();
        let hi = carlitz(&cfg, "t", 4);
        let lo = carlitz(&cfg, "t", 2);
        let pi = hi.quotient_map(&lo).unwrap();
        for v in enumerate_places(&cfg, 6).unwrap() {
            if v.poly().is_some_and(|f| f.as_poly() == &Poly::t()) {
                continue;
            }
            assert_eq!(pi.apply(&hi.frobenius(&v).unwrap()), lo.frobenius(&v).unwrap());
        }
    }

    #[test]
    fn descriptor_json_round_trip_and_pointers() {
        let cfg = FqConfig::from_q(2).unwrap();
        let v: Value = serde_json::from_str(
            r#"{"kind":"product","left":{"kind":"carlitz","f":"t","level":3},"right":{"kind":"constant","n":2}}"#,
        )
        .unwrap();
        let d = ExtensionDescriptor::from_json(&cfg, &v).unwrap();
        assert_eq!(d.to_json(&cfg), v);
        let ext = Extension::new(&cfg, &d).unwrap();
        assert_eq!(ext.galois_group().orders(), &[4, 4]);
        let bad: Value = serde_json::from_str(r#"{"kind":"product","left":{"kind":"bogus"},"right":{}}"#).unwrap();
        match ExtensionDescriptor::from_json(&cfg, &bad) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/left/kind"),
            other => panic!("{other:?}"),
        }
    }
}
