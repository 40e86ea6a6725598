//! Coefficient rings: truncated p-adic rings, exact cyclotomic integers and
//! Weil polynomials with their unit roots.

mod cyclo;
mod padic;
mod weil;

pub use cyclo::{cyclotomic_poly, embed_cyclo, embed_powers, euler_phi, CycloInt, CycloRing};
pub use padic::{PadicContext, PadicValue};
pub use weil::{newton_ordinary, newton_slopes, unit_roots, WeilPolynomial};
