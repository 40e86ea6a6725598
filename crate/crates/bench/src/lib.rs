//! Fixtures shared by the criterion benches.

use stickel_core::basefield::{FqConfig, Place};
use stickel_core::extensions::{Extension, ExtensionDescriptor};

/// `Carlitz(t, level)` over `F_q` with `S = {t}`.
pub fn carlitz_tower(q: u64, level: u32) -> (Extension, Vec<Place>) {
    let cfg = FqConfig::from_q(q).expect("prime power");
    let t = cfg.parse_monic("t").expect("valid polynomial");
    let e = Extension::new(&cfg, &ExtensionDescriptor::Carlitz { f: t.clone(), level }).expect("valid tower");
    let s = vec![Place::finite(&cfg, t).expect("irreducible")];
    (e, s)
}
