use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stickel_core::basefield::{FqConfig, Place};
use stickel_core::coeffrings::{PadicContext, PadicValue};
use stickel_core::extensions::{Extension, ExtensionDescriptor};
use stickel_core::groupalg::Character;
use stickel_core::iwasawa::{char_ideal, weierstrass, LambdaSeries, PresentationMatrix, TwistMap};
use stickel_core::lseries::{
    dirichlet_l, dirichlet_l_direct, theta_series, theta_series_with, theta_st, DirichletCharacter, ThetaOptions,
    ThetaStrategy,
};
use stickel_core::splitting::{decompose_module, idempotents, random_model_module, EndoElt, EndoModel};
use stickel_core::Error;

fn place(cfg: &FqConfig, s: &str) -> Place {
    Place::finite(cfg, cfg.parse_monic(s).unwrap()).unwrap()
}

/// (q, descriptor, S) fixtures small enough for property runs.
fn tower(idx: usize) -> (Arc<FqConfig>, Extension, Vec<Place>) {
    let q = if idx.is_multiple_of(2) { 2 } else { 3 };
    let cfg = FqConfig::from_q(q).unwrap();
    let t = cfg.parse_monic("t").unwrap();
    let (d, s) = match idx {
        0 | 1 => (ExtensionDescriptor::Carlitz { f: t, level: 2 }, vec![place(&cfg, "t")]),
        2 => (ExtensionDescriptor::Carlitz { f: t, level: 3 }, vec![place(&cfg, "t")]),
        3 | 4 => (ExtensionDescriptor::Constant { n: 1 }, vec![]),
        _ => (
            ExtensionDescriptor::Product {
                left: Box::new(ExtensionDescriptor::Carlitz { f: t, level: 2 }),
                right: Box::new(ExtensionDescriptor::Constant { n: 1 }),
            },
            vec![place(&cfg, "t")],
        ),
    };
    let e = Extension::new(&cfg, &d).unwrap();
    (cfg, e, s)
}

fn lam(p: u64, k: u32, n: usize, c: &[i128]) -> LambdaSeries {
    LambdaSeries::new(p, k, n, c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn truncation_is_exact(idx in 0usize..6, n1 in 2usize..8, extra in 1usize..6) {
        let (_, e, s) = tower(idx);
        let small = theta_series(&e, &s, n1).unwrap();
        let big = theta_series(&e, &s, n1 + extra).unwrap();
        prop_assert_eq!(big.truncate(small.cap()), small);
    }

    #[test]
    fn strategies_agree(idx in 0usize..6, n in 2usize..10) {
        let (_, e, s) = tower(idx);
        let euler = ThetaOptions { strategy: ThetaStrategy::EulerProduct, progress: None };
        let auto = theta_series_with(&e, &s, n, &ThetaOptions::default()).unwrap();
        prop_assert_eq!(theta_series_with(&e, &s, n, &euler).unwrap(), auto);
    }

    #[test]
    fn evaluated_theta_is_independent_of_t(idx in prop_oneof![Just(0usize), Just(2), Just(5)], x in 0i64..1 << 20) {
        let (cfg, e, s) = tower(idx);
        let (t1, t2) = if cfg.q() == 2 { ("t+1", "t^2+t+1") } else { ("t+1", "t+2") };
        let ctx = PadicContext::base(cfg.p(), 8).unwrap();
        let x = PadicValue::from_i64(&ctx, x);
        let a = theta_st(&e, &s, &[place(&cfg, t1)], 16).unwrap().eval_theta(&x).unwrap();
        let b = theta_st(&e, &s, &[place(&cfg, t2)], 16).unwrap().eval_theta(&x).unwrap();
        let c = theta_st(&e, &s, &[place(&cfg, t1), place(&cfg, t2)], 16).unwrap().eval_theta(&x).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
    }

    #[test]
    fn oracle_closed_form_matches_summation(idx in 0usize..3, ex in 0u64..4, inf in any::<bool>()) {
        let (_, e, _) = tower(idx);
        let m = e.galois_group().orders()[0];
        let omega = Character::new(e.galois_group(), m, vec![ex % m]).unwrap();
        let chi = DirichletCharacter::from_extension(&e, &omega).unwrap();
        match dirichlet_l_direct(&chi, inf) {
            Err(Error::NotPrimitive) => prop_assert!(chi.is_residue_trivial()),
            Ok(direct) => {
                let closed = dirichlet_l(&chi, inf).unwrap().expand(direct.len() + 3);
                prop_assert_eq!(&closed[..direct.len()], &direct[..]);
                prop_assert!(closed[direct.len()..].iter().all(|c| c.is_zero()));
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn level_projection_commutes_with_theta(n in 2usize..10) {
        let cfg = FqConfig::from_q(2).unwrap();
        let s = vec![place(&cfg, "t")];
        let hi = Extension::new(&cfg, &ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t").unwrap(), level: 3 }).unwrap();
        let lo = Extension::new(&cfg, &ExtensionDescriptor::Carlitz { f: cfg.parse_monic("t").unwrap(), level: 2 }).unwrap();
        let pi = hi.quotient_map(&lo).unwrap();
        prop_assert_eq!(theta_series(&hi, &s, n).unwrap().project_level(&pi).unwrap(), theta_series(&lo, &s, n).unwrap());
    }

    #[test]
    fn sharp_is_an_involution(c in prop::collection::vec(-1000i128..1000, 1..8)) {
        let f = lam(3, 8, 20, &c);
        prop_assert_eq!(f.sharp().sharp(), f.clone());
        let (_, e, s) = tower(2);
        let th = theta_series(&e, &s, 6).unwrap();
        prop_assert_eq!(th.sharp().sharp(), th);
    }

    #[test]
    fn weierstrass_round_trip(c in prop::collection::vec(0i128..1 << 20, 1..10)) {
        let f = lam(2, 10, 16, &c);
        prop_assume!(!f.is_zero());
        let w = weierstrass(&f).unwrap();
        let back = w.normalized(10, 16).unwrap();
        let unit: Vec<i128> = w.unit.coeffs().iter().map(|&x| x as i128).collect();
        prop_assert_eq!(back.mul(&lam(2, 10, 16, &unit)).unwrap(), f);
        prop_assert_eq!(*w.distinguished.last().unwrap(), 1);
    }

    #[test]
    fn twists_are_ring_maps(a in prop::collection::vec(-500i128..500, 1..6), b in prop::collection::vec(-500i128..500, 1..6)) {
        let (f, g) = (lam(3, 8, 20, &a), lam(3, 8, 20, &b));
        for t in [TwistMap::Sharp, TwistMap::Star(4), TwistMap::Star(10)] {
            let lhs = t.apply(&f.mul(&g).unwrap()).unwrap();
            prop_assert_eq!(lhs, t.apply(&f).unwrap().mul(&t.apply(&g).unwrap()).unwrap());
        }
    }

    #[test]
    fn char_ideal_is_unimodular_invariant(
        entries in prop::collection::vec(prop::collection::vec(-100i128..100, 1..4), 4),
        off in prop::collection::vec(-100i128..100, 1..4),
    ) {
        let (p, k, n) = (3, 8, 20);
        let e: Vec<LambdaSeries> = entries.iter().map(|c| lam(p, k, n, c)).collect();
        let m = PresentationMatrix::new(vec![vec![e[0].clone(), e[1].clone()], vec![e[2].clone(), e[3].clone()]]).unwrap();
        let (one, zero, x) = (lam(p, k, n, &[1]), lam(p, k, n, &[0]), lam(p, k, n, &off));
        let u = PresentationMatrix::new(vec![vec![one.clone(), x.clone()], vec![zero.clone(), one.clone()]]).unwrap();
        let l = PresentationMatrix::new(vec![vec![one.clone(), zero], vec![x, one]]).unwrap();
        let moved = l.mul(&m).unwrap().mul(&u).unwrap();
        match (char_ideal(&m), char_ideal(&moved)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => return Err(TestCaseError::fail(format!("{a:?} vs {b:?}"))),
        }
    }

    #[test]
    fn idempotent_routes_agree(a in 1i64..60, qi in 0usize..6, k in 1u32..6) {
        let q = [2u64, 3, 4, 5, 7, 9][qi];
        let model = EndoModel::new(vec![a], q, k);
        prop_assume!(model.is_ok());
        let model = model.unwrap();
        let id = idempotents(&model).unwrap();
        prop_assert!(id.routes_agree);
        prop_assert_eq!(id.e_f.add(&id.e_v), EndoElt::one(&model));
        let dual = model.dual_swap();
        prop_assert_eq!(idempotents(&dual).unwrap().e_f, EndoElt::from_parts(&dual, id.e_v.parts().iter().map(|c| [c[0] as i128, c[1] as i128]).collect()).unwrap());
        prop_assert_eq!(&*dual.dual_swap(), &*model);
    }

    #[test]
    fn random_modules_decompose(seed in any::<u64>(), which in 0usize..2) {
        let (a, q) = [(2i64, 5u64), (1, 2)][which];
        let model = EndoModel::new(vec![a], q, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_model_module(&model, &mut rng).unwrap();
        let d = decompose_module(&w, &model).unwrap();
        prop_assert!(d.pass());
        prop_assert_eq!(d.fw.length() + d.vw.length(), w.length());
    }
}
