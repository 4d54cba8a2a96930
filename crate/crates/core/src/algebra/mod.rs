//! Polynomial and power-series arithmetic over a [`Field`](crate::field::Field).

pub mod gcd;
pub mod poly;
pub mod resultant;
pub mod series;
pub mod ypoly;

pub use gcd::{common_factor_at_origin, gcd};
pub use poly::{bracket, Mono, Poly, RingOp, Var};
pub use resultant::{intersection_via_resultant, resultant_y, UPoly};
pub use series::UniSeries;
pub use ypoly::{y_poly_divide, YPoly};
