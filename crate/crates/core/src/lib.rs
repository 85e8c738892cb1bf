//! Rotated logical states for the n-qubit bit-flip chain: Pauli and rotation
//! algebra, rotated stabilizer generators, effective-distance scaling laws,
//! scaling-law fitting and Monte-Carlo simulation of noisy rotated circuits.

// `!(x >= lo)` style checks are used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// `as_str`, `Display` and `FromStr` for a fieldless enum with fixed tags.
macro_rules! tag_enum {
    ($ty:ty, $( $variant:path => $text:literal ),+ $(,)?) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $( $variant => $text ),+ }
            }
        }

        impl ::std::fmt::Display for $ty {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl ::std::str::FromStr for $ty {
            type Err = $crate::error::Error;

            fn from_str(s: &str) -> $crate::error::Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $( $text => Ok($variant), )+
                    other => Err($crate::error::Error::InvalidParameter {
                        name: stringify!($ty),
                        reason: format!("unknown tag `{other}`"),
                    }),
                }
            }
        }
    };
}

pub mod error;
pub mod fitting;
pub mod logical;
pub mod noise;
pub mod pauli;
pub mod rotation;
pub mod scaling;
pub mod series_io;
pub mod state;

pub use error::{Error, Result};
pub use fitting::{FitResult, FreeSet};
pub use logical::{CodeParams, EncodingMode, LogicalAmplitudes};
pub use pauli::{ComplexMatrix, Pauli, PauliString, PauliSum, Phase};
pub use rotation::{Axis, Convention, RotationAxis, RotationParams};
pub use scaling::{DataSeries, NoiseModel, Parity, Regime, ScalingParams};
pub use state::StateVector;
