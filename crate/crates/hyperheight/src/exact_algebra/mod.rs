//! Exact arithmetic: rationals, dense polynomials over ℚ and 𝔽_p, resultants,
//! integer and p-adic factorization, valuations.

mod ecm;
pub mod factor;
pub mod linalg;
pub mod modp;
pub mod padic;
pub mod poly;

pub use factor::{factor_integer, valuation, IntegerFactorization, DEFAULT_FACTOR_BUDGET};
pub use modp::{factor_mod_p, FpPoly};
pub use padic::{padic_factor, PAdicFactorization, PadicFactor};
pub use poly::{resultant, UniPoly};
pub use rug::{Integer, Rational};
