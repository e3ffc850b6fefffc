use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{to_f64s, Error, Result};
use crate::numeric::Real;

macro_rules! point_type {
    ($(#[$doc:meta])* $name:ident, $what:literal) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name<R>(Vec<R>);

        impl<R: Real> $name<R> {
            /// Panics on non-finite coordinates; use `try_new` for input validation.
            pub fn new(coords: Vec<R>) -> Self {
                Self::try_new(coords).expect(concat!("finite ", $what))
            }

            pub fn try_new(coords: Vec<R>) -> Result<Self> {
                if coords.iter().all(|c| c.is_finite()) {
                    Ok(Self(coords))
                } else {
                    Err(Error::InvalidInput(format!(
                        concat!($what, " has non-finite coordinates: {:?}"),
                        to_f64s(&coords)
                    )))
                }
            }

            pub fn scalar(x: R) -> Self {
                Self::new(vec![x])
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &[R] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<R> {
                self.0
            }

            pub fn to_f64(&self) -> Vec<f64> {
                to_f64s(&self.0)
            }
        }

        impl<R> Deref for $name<R> {
            type Target = [R];
            fn deref(&self) -> &[R] {
                &self.0
            }
        }

        impl<R: Real> From<Vec<R>> for $name<R> {
            fn from(v: Vec<R>) -> Self {
                Self::new(v)
            }
        }

        impl<R: Real, const N: usize> From<[R; N]> for $name<R> {
            fn from(v: [R; N]) -> Self {
                Self::new(v.to_vec())
            }
        }
    };
}

point_type!(
    /// A point in natural-parameter space.
    NaturalPoint,
    "natural point"
);
point_type!(
    /// A point in mean-parameter (sufficient statistic) space.
    MeanPoint,
    "mean point"
);
