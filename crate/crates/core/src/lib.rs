//! Exact Stickelberger series, p-adic L-functions and Iwasawa-algebra
//! tools for abelian extensions of `F_q(t)`.

#![allow(clippy::needless_range_loop)]

pub mod basefield;
pub mod coeffrings;
pub mod error;
pub mod extensions;
pub mod groupalg;
pub mod intlat;
pub mod iwasawa;
pub mod linalg;
pub mod lseries;
pub mod splitting;
pub mod verify;

pub use error::{Error, Result};

pub use basefield::{FqConfig, Place};
pub use coeffrings::{CycloInt, PadicContext, PadicValue, WeilPolynomial};
pub use extensions::{Extension, ExtensionDescriptor};
pub use groupalg::{Character, FinAbGroup, GroupRingElt, GroupSeries};
pub use iwasawa::{LambdaSeries, PresentationMatrix};
pub use splitting::{EndoModel, FiniteFModule};
