//! Exact arithmetic for the dynamics of univariate polynomials over Q.
//!
//! Provides, for a polynomial map of degree at least 2 with rational
//! coefficients:
//!
//! - places of Q, p-adic valuations, and exact absolute values
//!   ([`arith`]);
//! - a census of places of bad reduction together with the normalized
//!   radius of the filled Julia set at each finite place, computed
//!   exactly from Newton polygons of a displacement resultant
//!   ([`reduction`]);
//! - the digit-sum exponent calculus and the associated sharp
//!   inequalities, checked by exact integer-power comparison
//!   ([`exponents`]);
//! - explicit upper bounds for the number of rational preperiodic
//!   points, exact where the model is exact and interval-certified
//!   otherwise ([`bound`]);
//! - provably complete enumeration of rational preperiodic points via
//!   per-place escape radii ([`preperiodic`]);
//! - pairwise-product (transfinite-diameter style) inequality checks on
//!   concrete point sets ([`capacity`]).
//!
//! All rational computation is exact (`BigRational`). Real-valued
//! quantities are handled as rational enclosures with outward rounding
//! ([`interval`]); no floating point enters any decision.

pub mod arith;
pub mod bound;
pub mod capacity;
pub mod error;
pub mod exponents;
pub mod interval;
pub mod poly;
pub mod preperiodic;
pub mod reduction;

pub use arith::{abs_at, factor, padic_valuation, verify_product_formula};
pub use arith::{AbsValue, LogAbs, Place, Prime, Rat, Valuation};
pub use error::{Error, Result};
pub use interval::{Interval, DEFAULT_PRECISION_BITS};
pub use poly::{Poly, Polynomial};
