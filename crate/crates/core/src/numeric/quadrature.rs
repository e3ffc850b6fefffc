//! Globally adaptive 15-point Gauss–Kronrod quadrature on finite intervals.
//!
//! The error estimate follows the QUADPACK `qk15` heuristic. Intervals are
//! bisected largest-error first until the summed estimate meets
//! `max(abs_tol, rel_tol * |result|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{floor_tol, lit, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and work limit for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadPolicy<R> {
    pub rel_tol: R,
    pub abs_tol: R,
    pub max_subdivisions: usize,
}

impl<R: Real> Default for QuadPolicy<R> {
    fn default() -> Self {
        Self {
            rel_tol: floor_tol(1e-9),
            abs_tol: R::zero(),
            max_subdivisions: 4000,
        }
    }
}

impl<R: Real> QuadPolicy<R> {
    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = floor_tol(tol);
        self
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = lit(tol);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<R> {
    pub value: R,
    pub error: R,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("adaptive quadrature stopped at {value:e} with error estimate {error:e}")]
    ToleranceNotReached { value: f64, error: f64 },
    #[error("integrand returned a non-finite value at x = {x:e}")]
    NonFinite { x: f64 },
}

struct Segment<R> {
    a: R,
    b: R,
    value: R,
    error: R,
    splittable: bool,
}

impl<R: Real> PartialEq for Segment<R> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<R: Real> Eq for Segment<R> {}
impl<R: Real> PartialOrd for Segment<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<R: Real> Ord for Segment<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        // unsplittable segments sink to the bottom of the heap
        self.splittable.cmp(&other.splittable).then(
            self.error
                .partial_cmp(&other.error)
                .unwrap_or(Ordering::Equal),
        )
    }
}

fn gauss_kronrod<R: Real, F: FnMut(R) -> R>(f: &mut F, a: R, b: R) -> Result<(R, R), QuadError> {
    let half = lit::<R>(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let mut eval = |x: R| -> Result<R, QuadError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite {
                x: x.to_f64().unwrap_or(f64::NAN),
            })
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * lit(WGK[7]);
    let mut res_g = fc * lit(WG[3]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [R::zero(); 7];
    let mut fv2 = [R::zero(); 7];
    for j in 0..7 {
        let dx = half_len * lit(XGK[j]);
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let w = lit::<R>(WGK[j]);
        res_k += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += lit::<R>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = lit::<R>(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc += lit::<R>(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half_len;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != R::zero() && err != R::zero() {
        let ratio = (lit::<R>(200.0) * err / res_asc).powf(lit(1.5));
        err = res_asc * ratio.min(R::one());
    }
    let roundoff = R::epsilon() * lit(50.0) * res_abs;
    if res_abs > R::min_positive_value() / (R::epsilon() * lit(50.0)) {
        err = err.max(roundoff);
    }
    Ok((value, err))
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<R: Real, F: FnMut(R) -> R>(
    f: F,
    a: R,
    b: R,
    policy: &QuadPolicy<R>,
) -> Result<QuadResult<R>, QuadError> {
    integrate_with_breaks(f, &[a, b], policy)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the adaptive
/// partition with the given (sorted) breakpoints.
pub fn integrate_with_breaks<R: Real, F: FnMut(R) -> R>(
    mut f: F,
    points: &[R],
    policy: &QuadPolicy<R>,
) -> Result<QuadResult<R>, QuadError> {
    assert!(points.len() >= 2, "need at least two integration limits");
    let mut heap = BinaryHeap::new();
    let mut total = R::zero();
    let mut total_err = R::zero();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (value, error) = gauss_kronrod(&mut f, a, b)?;
        evaluations += 15;
        total += value;
        total_err += error;
        heap.push(Segment {
            a,
            b,
            value,
            error,
            splittable: true,
        });
    }
    let half = lit::<R>(0.5);
    let mut subdivisions = 0usize;
    loop {
        let target = policy.abs_tol.max(policy.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        let Some(seg) = heap.pop() else { break };
        if !seg.splittable {
            heap.push(seg);
            break;
        }
        if subdivisions >= policy.max_subdivisions {
            return Err(QuadError::ToleranceNotReached {
                value: total.to_f64().unwrap_or(f64::NAN),
                error: total_err.to_f64().unwrap_or(f64::NAN),
            });
        }
        subdivisions += 1;
        let mid = half * (seg.a + seg.b);
        let width = (seg.b - seg.a).abs();
        let scale = seg.a.abs().max(seg.b.abs()).max(R::min_positive_value());
        if width <= scale * R::epsilon() * lit(1000.0) {
            heap.push(Segment {
                splittable: false,
                ..seg
            });
            continue;
        }
        let (v1, e1) = gauss_kronrod(&mut f, seg.a, mid)?;
        let (v2, e2) = gauss_kronrod(&mut f, mid, seg.b)?;
        evaluations += 30;
        total = total - seg.value + v1 + v2;
        total_err = total_err - seg.error + e1 + e2;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
            splittable: true,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
            splittable: true,
        });
    }
    // re-sum to shed drift from the incremental updates
    let value: R = heap.iter().map(|s| s.value).sum();
    let error: R = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(
            |x: f64| x.powi(5) - 2.0 * x,
            0.0,
            2.0,
            &QuadPolicy::default(),
        )
        .unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_peak_far_from_origin() {
        let f = |x: f64| (-(x - 50.0).powi(2) / 0.02).exp();
        let r = integrate_with_breaks(f, &[0.0, 50.0, 100.0], &QuadPolicy::default()).unwrap();
        let exact = (0.02 * std::f64::consts::PI).sqrt();
        assert!((r.value - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn cauchy_kernel_over_wide_range() {
        let r = integrate(
            |x: f64| 1.0 / (1.0 + x * x),
            -1e3,
            1e3,
            &QuadPolicy::default(),
        )
        .unwrap();
        let exact = 2.0 * 1e3_f64.atan();
        assert!((r.value - exact).abs() / exact < 1e-9);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|x: f64| 1.0 / x, -1.0, 1.0, &QuadPolicy::default()).unwrap_err();
        assert!(matches!(err, QuadError::NonFinite { .. }));
    }

    #[test]
    fn exhausted_budget_is_an_error() {
        let policy = QuadPolicy {
            max_subdivisions: 3,
            ..QuadPolicy::default()
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &policy).unwrap_err();
        assert!(matches!(err, QuadError::ToleranceNotReached { .. }));
    }
}
