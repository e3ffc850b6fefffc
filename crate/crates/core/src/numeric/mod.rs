//! Scalar abstraction and shared numerical kernels.
//!
//! Everything in the crate is written against [`Real`], which is satisfied by
//! `f32` and `f64`. Tolerances that would be meaningless in single precision
//! are floored at a small multiple of the type's machine epsilon via
//! [`floor_tol`].

pub mod extrapolate;
pub mod linalg;
pub mod optimize;
pub mod quadrature;

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the toolkit.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `R`.
#[inline]
pub fn lit<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count into `R`.
#[inline]
pub fn count<R: Real>(n: usize) -> R {
    R::from_usize(n).expect("count representable in scalar type")
}

/// Raises a requested tolerance to at least `64 * epsilon` of `R`.
#[inline]
pub fn floor_tol<R: Real>(requested: f64) -> R {
    let floor = R::epsilon() * lit(64.0);
    let req = lit::<R>(requested);
    if req < floor {
        floor
    } else {
        req
    }
}

/// `log(sum(exp(x_i)))` with max subtraction. Empty input gives `-inf`.
pub fn log_sum_exp<R: Real>(xs: &[R]) -> R {
    let max = xs.iter().copied().fold(R::neg_infinity(), R::max);
    if max == R::neg_infinity() {
        return max;
    }
    if max == R::infinity() {
        return max;
    }
    let s: R = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// `log(sum(w_i * exp(x_i)))` for strictly positive weights given as logs.
pub fn log_sum_exp_weighted<R: Real>(xs: &[R], log_w: &[R]) -> R {
    debug_assert_eq!(xs.len(), log_w.len());
    let max = xs
        .iter()
        .zip(log_w)
        .map(|(&x, &lw)| x + lw)
        .fold(R::neg_infinity(), R::max);
    if !max.is_finite() {
        return max;
    }
    let s: R = xs
        .iter()
        .zip(log_w)
        .map(|(&x, &lw)| (x + lw - max).exp())
        .sum();
    max + s.ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
pub struct LogAccumulator<R> {
    max: R,
    scaled: R,
}

impl<R: Real> Default for LogAccumulator<R> {
    fn default() -> Self {
        Self {
            max: R::neg_infinity(),
            scaled: R::zero(),
        }
    }
}

impl<R: Real> LogAccumulator<R> {
    pub fn push(&mut self, log_term: R) {
        if log_term == R::neg_infinity() {
            return;
        }
        if log_term <= self.max {
            self.scaled += (log_term - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - log_term).exp() + R::one();
            self.max = log_term;
        }
    }

    pub fn value(&self) -> R {
        if self.max == R::neg_infinity() {
            self.max
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Dot product of two equal-length slices.
#[inline]
pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm<R: Real>(a: &[R]) -> R {
    dot(a, a).sqrt()
}

/// Maximum absolute component.
#[inline]
pub fn norm_inf<R: Real>(a: &[R]) -> R {
    a.iter().fold(R::zero(), |m, &x| m.max(x.abs()))
}

/// Relative difference `|a - b| / max(1, |a|, |b|)`.
#[inline]
pub fn rel_diff<R: Real>(a: R, b: R) -> R {
    if a == b {
        return R::zero();
    }
    (a - b).abs() / R::one().max(a.abs()).max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let xs = [0.1_f64, -2.0, 3.5];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_survives_large_arguments() {
        let xs = [700.0_f64, 700.0];
        assert!((log_sum_exp(&xs) - (700.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn accumulator_agrees_with_batch() {
        let xs = [-1.0_f64, 5.0, 2.0, f64::NEG_INFINITY, 4.0];
        let mut acc = LogAccumulator::default();
        for &x in &xs {
            acc.push(x);
        }
        assert!((acc.value() - log_sum_exp(&xs)).abs() < 1e-14);
    }

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(floor_tol::<f64>(1e-9), 1e-9);
        assert!(floor_tol::<f32>(1e-9) > 1e-6);
    }
}
