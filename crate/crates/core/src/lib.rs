//! Exact arithmetic for adelic arithmetic divisors on the projective line
//! over Q: heights, intersection numbers, volumes and Zariski decompositions.

pub mod adelic;
pub mod arch_green;
pub mod error;
pub mod exactmath;
pub mod fiber;
pub mod green_place;
pub mod okounkov;
pub mod spec_io;
pub mod vertical_zariski;

pub use error::{AdelicError, Result};
pub use exactmath::{LogNumber, PLFunction, QMatrix, QVector, Rational};
pub use adelic::{global_intersection, AdelicDivisor, PrincipalData};
pub use arch_green::RadialGreen;
pub use fiber::FiberModel;
pub use green_place::{GreenData, HPoint, Horizontal};
pub use okounkov::ConcaveTransform;
