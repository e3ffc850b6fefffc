//! Generating measures whose Laplace transform reduces to a one-dimensional
//! integral `kappa(theta) = log \int exp(h(x; theta)) dx`.
//!
//! The integrand's log is supplied by a [`ReducedIntegrand`]; this module
//! owns the windowing and quadrature. Integration is carried out in the log
//! domain: the integrand is shifted by its peak before exponentiation.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::numeric::linalg::Matrix;
use crate::numeric::optimize::brent_minimize;
use crate::numeric::quadrature::{integrate, integrate_with_breaks, QuadPolicy};
use crate::numeric::{count, lit, Real};

use super::domain::{DomainSpec, Region};

/// Log-integrand of a reduced cumulant together with its parameter
/// derivatives.
pub trait ReducedIntegrand<R: Real>: Debug + Send + Sync {
    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn domain(&self) -> DomainSpec<R>;
    /// `h(x; theta)`, including the log of any weight function.
    fn log_integrand(&self, x: R, theta: &[R]) -> R;
    /// `grad_theta h(x; theta)`.
    fn theta_gradient(&self, x: R, theta: &[R]) -> Vec<R>;
    /// `hess_theta h(x; theta)`.
    fn theta_hessian(&self, x: R, theta: &[R]) -> Matrix<R>;
    /// Center and width of the dominant Gaussian factor at an interior
    /// `theta`, or `None` when the integral diverges.
    fn envelope(&self, theta: &[R]) -> Option<(R, R)>;
}

/// The strip measure: a density on `R^2` whose cumulant is finite on the
/// open strip `|theta_2| < 1` and at the two isolated boundary points
/// `(0, +-1)`, where it is discontinuous.
///
/// After integrating out the second coordinate,
/// `kappa(theta) = log \int exp(theta_1 x - x^2 + theta_2^2 (1 + x^2)) / (1 + x^2) dx`.
#[derive(Clone, Copy, Debug, Default)]
pub struct StripMeasure;

impl<R: Real> ReducedIntegrand<R> for StripMeasure {
    fn name(&self) -> &'static str {
        "strip-measure"
    }

    fn dim(&self) -> usize {
        2
    }

    fn domain(&self) -> DomainSpec<R> {
        DomainSpec {
            interior: Region::open_slab(2, 1, -R::one(), R::one()),
            boundary_points: vec![vec![R::zero(), R::one()], vec![R::zero(), -R::one()]],
            mean_domain: Region::All,
        }
    }

    fn log_integrand(&self, x: R, theta: &[R]) -> R {
        // (1 - t2)(1 + t2) keeps the x^2 coefficient accurate as t2 -> 1
        let a = (R::one() - theta[1]) * (R::one() + theta[1]);
        theta[0] * x - a * x * x + theta[1] * theta[1] - (R::one() + x * x).ln()
    }

    fn theta_gradient(&self, x: R, theta: &[R]) -> Vec<R> {
        vec![x, lit::<R>(2.0) * theta[1] * (R::one() + x * x)]
    }

    fn theta_hessian(&self, x: R, _theta: &[R]) -> Matrix<R> {
        let mut h = Matrix::zeros(2, 2);
        h[(1, 1)] = lit::<R>(2.0) * (R::one() + x * x);
        h
    }

    fn envelope(&self, theta: &[R]) -> Option<(R, R)> {
        let a = (R::one() - theta[1]) * (R::one() + theta[1]);
        if !(a > R::zero()) {
            return None;
        }
        let two = lit::<R>(2.0);
        Some((theta[0] / (two * a), R::one() / (two * a).sqrt()))
    }
}

/// Window, breakpoints and peak used to integrate at one `theta`.
struct Window<R> {
    breaks: Vec<R>,
    peak: R,
}

/// Log-normalizer and first two moments of the tilted reduced law.
#[derive(Clone, Debug)]
pub struct ReducedMoments<R> {
    pub cumulant: R,
    pub mean: Vec<R>,
    pub covariance: Option<Matrix<R>>,
}

fn build_window<R: Real, I: ReducedIntegrand<R> + ?Sized>(
    integrand: &I,
    theta: &[R],
    center: R,
    width: R,
) -> Window<R> {
    let twelve = lit::<R>(12.0);
    let li = |x: R| integrand.log_integrand(x, theta);
    // the envelope center locates the Gaussian factor; the weight can shift
    // the true maximizer, so polish it with a bracketed search
    let polish = brent_minimize(
        |x| -li(x),
        center - lit::<R>(4.0) * width,
        center + lit::<R>(4.0) * width,
        lit(1e-10),
        200,
    );
    let mut peak = -polish.value;
    let mut lo = (center - twelve * width).min(-twelve);
    let mut hi = (center + twelve * width).max(twelve);
    let scan = 256;
    for i in 0..=scan {
        let x = lo + (hi - lo) * count::<R>(i) / count::<R>(scan);
        peak = peak.max(li(x));
    }
    let drop = lit::<R>(80.0);
    for _ in 0..60 {
        if li(lo) < peak - drop {
            break;
        }
        lo = lo - (hi - lo);
    }
    for _ in 0..60 {
        if li(hi) < peak - drop {
            break;
        }
        hi = hi + (hi - lo);
    }
    let mut breaks = vec![
        lo,
        hi,
        polish.x,
        center - width,
        center,
        center + width,
        R::zero(),
    ];
    breaks.retain(|&b| b >= lo && b <= hi);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    Window { breaks, peak }
}

/// Evaluates the cumulant (and optionally moments) of a reduced family.
pub fn reduced_moments<R: Real, I: ReducedIntegrand<R> + ?Sized>(
    integrand: &I,
    theta: &[R],
    policy: &QuadPolicy<R>,
    order: usize,
) -> Result<ReducedMoments<R>> {
    let domain = integrand.domain();
    if !domain.is_interior(theta) {
        if domain.boundary_index(theta).is_some() {
            if order > 0 {
                return Err(Error::OutsideDomain {
                    point: crate::error::to_f64s(theta),
                });
            }
            return Ok(ReducedMoments {
                cumulant: boundary_cumulant(integrand, theta, policy)?,
                mean: vec![],
                covariance: None,
            });
        }
        return Ok(ReducedMoments {
            cumulant: R::infinity(),
            mean: vec![],
            covariance: None,
        });
    }
    let Some((center, width)) = integrand.envelope(theta) else {
        return Ok(ReducedMoments {
            cumulant: R::infinity(),
            mean: vec![],
            covariance: None,
        });
    };
    let win = build_window(integrand, theta, center, width);
    let peak = win.peak;
    let weight = |x: R| (integrand.log_integrand(x, theta) - peak).exp();
    let z = integrate_with_breaks(weight, &win.breaks, policy)?.value;
    let cumulant = peak + z.ln();
    if order == 0 {
        return Ok(ReducedMoments {
            cumulant,
            mean: vec![],
            covariance: None,
        });
    }
    let d = integrand.dim();
    let lo = win.breaks[0];
    let hi = *win.breaks.last().unwrap();
    let mut g_scale = R::zero();
    for i in 0..=64 {
        let x = lo + (hi - lo) * count::<R>(i) / lit(64.0);
        for g in integrand.theta_gradient(x, theta) {
            g_scale = g_scale.max(g.abs());
        }
    }
    let moment_policy = QuadPolicy {
        abs_tol: policy.rel_tol * lit(1e-3) * z * g_scale.max(R::one()),
        ..*policy
    };
    let mut mean = vec![R::zero(); d];
    for (i, m) in mean.iter_mut().enumerate() {
        let f = |x: R| integrand.theta_gradient(x, theta)[i] * weight(x);
        *m = integrate_with_breaks(f, &win.breaks, &moment_policy)?.value / z;
    }
    if order == 1 {
        return Ok(ReducedMoments {
            cumulant,
            mean,
            covariance: None,
        });
    }
    let cov_policy = QuadPolicy {
        abs_tol: moment_policy.abs_tol * g_scale.max(R::one()),
        ..*policy
    };
    let mut cov = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let f = |x: R| {
                let g = integrand.theta_gradient(x, theta);
                let h = integrand.theta_hessian(x, theta);
                ((g[i] - mean[i]) * (g[j] - mean[j]) + h[(i, j)]) * weight(x)
            };
            let v = integrate_with_breaks(f, &win.breaks, &cov_policy)?.value / z;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(ReducedMoments {
        cumulant,
        mean,
        covariance: Some(cov),
    })
}

/// Cumulant at a listed boundary point, integrated over the whole line via
/// `x = tan(u)`.
fn boundary_cumulant<R: Real, I: ReducedIntegrand<R> + ?Sized>(
    integrand: &I,
    theta: &[R],
    policy: &QuadPolicy<R>,
) -> Result<R> {
    let half_pi = R::FRAC_PI_2();
    let f = |u: R| {
        let c = u.cos();
        if c <= R::zero() {
            return R::zero();
        }
        let x = u.tan();
        (integrand.log_integrand(x, theta) - lit::<R>(2.0) * c.ln()).exp()
    };
    let shrink = R::one() - R::epsilon() * lit(16.0);
    let r = integrate(f, -half_pi * shrink, half_pi * shrink, policy)?;
    Ok(r.value.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kappa(theta: [f64; 2]) -> f64 {
        reduced_moments(&StripMeasure, &theta, &QuadPolicy::default(), 0)
            .unwrap()
            .cumulant
    }

    /// Two-dimensional quadrature of the original strip density, used as an
    /// oracle for the x2-reduction.
    fn kappa_2d(theta: [f64; 2]) -> f64 {
        let p = QuadPolicy::<f64>::default().with_rel_tol(1e-11);
        let outer = |x1: f64| {
            let q = 1.0 + x1 * x1;
            let sd = (2.0 * q).sqrt();
            let inner = |x2: f64| {
                (theta[0] * x1 + theta[1] * x2 - x1 * x1 - x2 * x2 / (4.0 * q)).exp()
                    / (2.0 * std::f64::consts::PI.sqrt() * q.powf(1.5))
            };
            let c = 2.0 * theta[1] * q;
            integrate(inner, c - 40.0 * sd, c + 40.0 * sd, &p)
                .unwrap()
                .value
        };
        integrate(outer, -30.0, 30.0, &p).unwrap().value.ln()
    }

    #[test]
    fn reduction_matches_two_dimensional_quadrature() {
        for theta in [[0.0, 0.0], [0.7, 0.3], [-1.5, -0.6]] {
            let a = kappa(theta);
            let b = kappa_2d(theta);
            assert!((a - b).abs() < 1e-8, "{theta:?}: {a} vs {b}");
        }
    }

    #[test]
    fn boundary_point_value() {
        let k = kappa([0.0, 1.0]);
        assert!((k - (1.0 + std::f64::consts::PI.ln())).abs() < 1e-10);
        let k2 = kappa([0.0, -1.0]);
        assert!((k2 - (1.0 + std::f64::consts::PI.ln())).abs() < 1e-10);
    }

    #[test]
    fn outside_strip_is_infinite() {
        assert!(kappa([0.0, 1.5]).is_infinite());
        assert!(kappa([0.2, 1.0]).is_infinite());
    }

    #[test]
    fn boundary_moments_are_undefined() {
        let r = reduced_moments(&StripMeasure, &[0.0_f64, 1.0], &QuadPolicy::default(), 1);
        assert!(matches!(r, Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn grows_along_the_boundary_curve() {
        let along = |z: f64| kappa([z, (1.0 - z * z * z).sqrt()]);
        let (a, b, c) = (along(0.05), along(0.02), along(0.01));
        assert!(a < b && b < c);
        assert!(c > 10.0);
    }
}
