//! Density of `-X - 1` for `X` Landau-distributed, which generates the dual
//! of the Poisson family.
//!
//! The density is the oscillatory integral
//!
//! ```text
//! f(y) = c \int_0^inf exp(a v) cos(v log v - v (1 + y)) dv
//! ```
//!
//! with `c = 1/pi` and `a = -pi/2` for the standard Landau law. The phase
//! `v log v - v (1 + y)` has a single stationary point at `v* = e^y`; the
//! integral is split at the zeros of the cosine on both monotone branches of
//! the phase. Segments before the stationary point are summed directly and
//! the alternating tail after it goes through Euler's transformation.

use crate::error::{Error, Result};
use crate::numeric::optimize::brent_root;
use crate::numeric::quadrature::{integrate, integrate_with_breaks, QuadPolicy};
use crate::numeric::{lit, Real};

/// Kernel constants and stopping rules for [`landau_density`].
#[derive(Clone, Copy, Debug)]
pub struct LandauPolicy<R> {
    /// Multiplier `c` in front of the integral.
    pub prefactor: R,
    /// Exponential rate `a` in `exp(a v)`.
    pub damping: R,
    /// Absolute tolerance on the accelerated tail.
    pub abs_tol: R,
    /// Work limit on the number of tail segments.
    pub max_terms: usize,
    /// Quadrature used inside each segment.
    pub segment: QuadPolicy<R>,
}

impl<R: Real> Default for LandauPolicy<R> {
    fn default() -> Self {
        Self {
            prefactor: R::FRAC_1_PI(),
            damping: -R::FRAC_PI_2(),
            abs_tol: lit(1e-6),
            max_terms: 200_000,
            segment: QuadPolicy::default().with_rel_tol(1e-10),
        }
    }
}

impl<R: Real> LandauPolicy<R> {
    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = lit(tol);
        self
    }

    /// Kernel constants `c = pi/4`, `a = +pi/4` as sometimes printed for
    /// this density. The integrand then grows without bound and evaluation
    /// reports [`Error::OscillatoryDivergence`].
    pub fn growing_kernel() -> Self {
        Self {
            prefactor: R::FRAC_PI_4(),
            damping: R::FRAC_PI_4(),
            ..Self::default()
        }
    }

    fn is_standard(&self) -> bool {
        let tol = lit::<R>(1e-15);
        (self.prefactor - R::FRAC_1_PI()).abs() <= tol
            && (self.damping + R::FRAC_PI_2()).abs() <= tol
    }
}

/// Euler's transformation for alternating series, fed one signed term at a
/// time.
#[derive(Debug, Default)]
struct EulerSum<R> {
    work: Vec<R>,
    sum: R,
    nterm: usize,
}

impl<R: Real> EulerSum<R> {
    fn push(&mut self, term: R) -> R {
        let half = lit::<R>(0.5);
        if self.work.is_empty() {
            self.work.push(term);
            self.nterm = 1;
            self.sum = half * term;
            return self.sum;
        }
        let mut tmp = self.work[0];
        self.work[0] = term;
        for j in 0..(self.nterm - 1) {
            let dum = self.work[j + 1];
            self.work[j + 1] = half * (self.work[j] + tmp);
            tmp = dum;
        }
        let next = half * (self.work[self.nterm - 1] + tmp);
        if self.work.len() <= self.nterm {
            self.work.push(next);
        } else {
            self.work[self.nterm] = next;
        }
        if next.abs() <= self.work[self.nterm - 1].abs() {
            self.sum += half * next;
            self.nterm += 1;
        } else {
            self.sum += next;
        }
        self.sum
    }
}

fn phase<R: Real>(v: R, y: R) -> R {
    if v <= R::zero() {
        R::zero()
    } else {
        v * v.ln() - v * (R::one() + y)
    }
}

/// Evaluates the density at `y`.
pub fn landau_density<R: Real>(y: R, policy: &LandauPolicy<R>) -> Result<R> {
    if !y.is_finite() {
        return Err(Error::InvalidInput("landau density at non-finite y".into()));
    }
    let pi = R::PI();
    let half = lit::<R>(0.5);
    let integrand = |v: R| {
        if v <= R::zero() {
            return R::one();
        }
        (policy.damping * v).exp() * phase(v, y).cos()
    };
    let segment =
        |a: R, b: R| -> Result<R> { Ok(integrate(integrand, a, b, &policy.segment)?.value) };
    let x_tol = lit::<R>(1e-13);

    // beyond v_cut the kernel is below machine precision
    let v_cut = if policy.damping < R::zero() {
        (R::epsilon() * lit(1e-3)).ln() / policy.damping
    } else {
        R::infinity()
    };
    let v_star = y.exp();

    let mut head = R::zero();
    let mut left = R::zero();

    // decreasing branch: phase runs from 0 down to -e^y
    let dec_end = v_star.min(v_cut);
    let phase_floor = phase(dec_end, y);
    let mut k = 0usize;
    loop {
        let level = -(count_f::<R>(k) + half) * pi;
        if level <= phase_floor {
            break;
        }
        let root = brent_root(|v| phase(v, y) - level, left, dec_end, x_tol, 200)
            .ok_or_else(|| Error::OscillatoryDivergence("lost a phase zero".into()))?;
        head += segment(left, root)?;
        left = root;
        k += 1;
        if k > policy.max_terms {
            return Err(Error::OscillatoryDivergence(
                "too many segments before the stationary point".into(),
            ));
        }
    }
    if dec_end >= v_cut {
        head += segment(left, v_cut)?;
        return Ok(policy.prefactor * head);
    }

    // increasing branch: first level above the minimum of the phase
    let phase_min = phase(v_star, y);
    let mut m = ((phase_min / pi) - half).ceil();
    let mut level = (m + half) * pi;
    if level <= phase_min {
        m += R::one();
        level = (m + half) * pi;
    }
    let mut tail = EulerSum::default();
    let mut estimate = R::zero();
    let mut settled = 0usize;
    let mut growing = 0usize;
    let mut last_abs = R::infinity();
    let mut first = true;
    let mut terms = 0usize;
    loop {
        let start = left.max(v_star);
        let slope = (start.ln() - y).max(lit(1e-3));
        let mut step = (level - phase(start, y)).max(R::zero()) / slope + lit(1e-12);
        let mut hi = start + step;
        let mut guard = 0;
        while phase(hi, y) < level {
            step *= lit(2.0);
            hi = start + step;
            guard += 1;
            if guard > 200 {
                return Err(Error::OscillatoryDivergence(
                    "phase zero not bracketed".into(),
                ));
            }
        }
        let root = brent_root(|v| phase(v, y) - level, start, hi, x_tol, 200)
            .ok_or_else(|| Error::OscillatoryDivergence("lost a phase zero".into()))?;
        let capped = root.min(v_cut);
        let term = segment(left, capped)?;
        left = capped;
        if first {
            // the segment spanning the stationary point is not part of the
            // alternating tail
            head += term;
            first = false;
        } else {
            let prev = estimate;
            estimate = tail.push(term);
            terms += 1;
            if term.abs() > last_abs {
                growing += 1;
            } else {
                growing = 0;
            }
            last_abs = term.abs();
            if growing >= 64 {
                return Err(Error::OscillatoryDivergence(format!(
                    "segment integrals keep growing (|term| = {:e} after {terms} terms)",
                    term.abs().to_f64().unwrap_or(f64::NAN)
                )));
            }
            if (estimate - prev).abs() * policy.prefactor.abs() <= policy.abs_tol * lit(1e-2) {
                settled += 1;
            } else {
                settled = 0;
            }
            if settled >= 3 && terms >= 8 {
                break;
            }
        }
        if left >= v_cut {
            break;
        }
        if terms >= policy.max_terms {
            return Err(Error::OscillatoryDivergence(format!(
                "partial sums not Cauchy after {terms} terms"
            )));
        }
        level += pi;
    }
    Ok(policy.prefactor * (head + estimate))
}

fn count_f<R: Real>(k: usize) -> R {
    R::from_usize(k).unwrap()
}

/// Standard Landau density evaluated through the non-oscillatory Laplace
/// representation `p(x) = (1/pi) \int_0^inf t^{-t} e^{-x t} sin(pi t) dt`,
/// well conditioned for `x >= 0`. Returns the density of `y = -x - 1`.
pub fn landau_density_laplace<R: Real>(y: R) -> Result<R> {
    let x = -y - R::one();
    if x < R::zero() {
        return Err(Error::InvalidInput(
            "Laplace representation is only used for y <= -1".into(),
        ));
    }
    let pi = R::PI();
    let f = |t: R| {
        if t <= R::zero() {
            return R::zero();
        }
        (-t * t.ln() - x * t).exp() * (pi * t).sin()
    };
    let upper = lit::<R>(80.0) / (x + R::one()) + lit(12.0);
    let p = QuadPolicy::default()
        .with_rel_tol(1e-11)
        .with_abs_tol(1e-15);
    let r = integrate_with_breaks(f, &[R::zero(), R::one(), upper], &p)?;
    Ok(r.value / pi)
}

/// Mass of `(-inf, -l]` under the standard density, via
/// `(1/pi) \int_0^inf t^{-t} sin(pi t) / t * e^{-(l - 1) t} dt`.
fn lower_tail_mass<R: Real>(l: R) -> Result<R> {
    let a = l - R::one();
    let pi = R::PI();
    let f = |t: R| {
        if t <= R::zero() {
            return pi;
        }
        (-t * t.ln() - a * t).exp() * (pi * t).sin() / t
    };
    let upper = lit::<R>(80.0) / a.max(R::one()) + lit(12.0);
    let p = QuadPolicy::default()
        .with_rel_tol(1e-11)
        .with_abs_tol(1e-16);
    let r = integrate_with_breaks(f, &[R::zero(), R::one(), upper], &p)?;
    Ok(r.value / pi)
}

/// Measured total mass of the density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LandauNormalization<R> {
    pub measured: R,
    /// Integral over `[lower, upper]` of the oscillatory evaluator.
    pub body: R,
    /// Mass below `lower`.
    pub tail: R,
    pub lower: R,
    pub upper: R,
}

fn upper_limit<R: Real>(mu: R) -> R {
    // f(y) ~ exp(-e^y), so e^y = 60 + 20 mu leaves a negligible remainder
    (lit::<R>(60.0) + lit::<R>(20.0) * mu).ln()
}

/// Integrates the density over the real line.
///
/// The bulk `[lower, upper]` uses [`landau_density`] under adaptive
/// quadrature. The heavy `1/y^2` left tail is added in closed integral form
/// for the standard kernel, or from the `1/y^2` asymptote otherwise.
pub fn landau_normalization<R: Real>(
    lower: R,
    policy: &LandauPolicy<R>,
) -> Result<LandauNormalization<R>> {
    let upper = upper_limit(R::zero());
    let mut err = None;
    let f = |y: R| match landau_density(y, policy) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            R::zero()
        }
    };
    let breaks = body_breaks(lower, upper);
    let qp = QuadPolicy::default().with_rel_tol(1e-8).with_abs_tol(1e-10);
    let body = integrate_with_breaks(f, &breaks, &qp);
    if let Some(e) = err {
        return Err(e);
    }
    let body = body?.value;
    let tail = if policy.is_standard() {
        lower_tail_mass(-lower)?
    } else {
        let edge = landau_density(lower, policy)?;
        edge * (-lower)
    };
    Ok(LandauNormalization {
        measured: body + tail,
        body,
        tail,
        lower,
        upper,
    })
}

fn body_breaks<R: Real>(lower: R, upper: R) -> Vec<R> {
    let mut b: Vec<R> = [-40.0, -10.0, -3.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|&v| lit::<R>(v))
        .filter(|&v| v > lower && v < upper)
        .collect();
    b.insert(0, lower);
    b.push(upper);
    b
}

/// `log \int e^{mu y} f(y) dy` computed numerically from the density.
///
/// The dual family's generating measure is `e * f(y) dy`, so its cumulant is
/// this value plus one.
pub fn landau_log_mgf<R: Real>(mu: R, policy: &LandauPolicy<R>) -> Result<R> {
    if mu < R::zero() {
        return Ok(R::infinity());
    }
    if mu == R::zero() {
        return Ok(landau_normalization(lit(-200.0), policy)?.measured.ln());
    }
    let lower = -(lit::<R>(45.0) / mu + lit(10.0));
    let upper = upper_limit(mu);
    let mut err = None;
    let f = |y: R| match landau_density(y, policy) {
        Ok(v) => (mu * y).exp() * v,
        Err(e) => {
            err.get_or_insert(e);
            R::zero()
        }
    };
    let qp = QuadPolicy::default().with_rel_tol(1e-9).with_abs_tol(1e-13);
    let r = integrate_with_breaks(f, &body_breaks(lower, upper), &qp);
    if let Some(e) = err {
        return Err(e);
    }
    Ok(r?.value.ln())
}

/// Numeric cumulant of the dual family, `1 + log \int e^{mu y} f(y) dy`.
pub fn landau_dual_numeric_cumulant<R: Real>(mu: R, policy: &LandauPolicy<R>) -> Result<R> {
    Ok(R::one() + landau_log_mgf(mu, policy)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> LandauPolicy<f64> {
        LandauPolicy::default().with_abs_tol(1e-10)
    }

    #[test]
    fn euler_sums_alternating_harmonic() {
        let mut e = EulerSum::default();
        let mut s = 0.0;
        for k in 1..=30 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            s = e.push(sign / k as f64);
        }
        assert!((s - 2f64.ln()).abs() < 1e-9, "{s}");
    }

    #[test]
    fn agrees_with_laplace_representation() {
        for y in [-1.0, -1.5, -3.0, -8.0, -25.0] {
            let a = landau_density(y, &tight()).unwrap();
            let b = landau_density_laplace(y).unwrap();
            assert!((a - b).abs() < 1e-9, "y={y}: {a} vs {b}");
        }
    }

    #[test]
    fn mode_region_values() {
        // Landau density peaks near x = -0.2228 with height ~0.1806
        let y = -1.0 + 0.2228;
        let v = landau_density(y, &tight()).unwrap();
        assert!((v - 0.1806).abs() < 5e-4, "{v}");
    }

    #[test]
    fn nonnegative_on_grid() {
        let p = LandauPolicy::default();
        let mut y = -10.0;
        while y <= 50.0 {
            let v = landau_density(y, &p).unwrap();
            assert!(v >= -1e-6, "f({y}) = {v}");
            y += 0.5;
        }
    }

    #[test]
    fn growing_kernel_diverges() {
        let err = landau_density(0.0, &LandauPolicy::<f64>::growing_kernel()).unwrap_err();
        assert!(matches!(err, Error::OscillatoryDivergence(_)));
    }

    #[test]
    fn tail_mass_matches_asymptote() {
        // P(X > x) ~ 1/x + (log x - 1 + gamma)/x^2
        let l = 400.0_f64;
        let x = l - 1.0;
        let approx = 1.0 / x + (x.ln() - 1.0 + 0.577_215_664_901_532_9) / (x * x);
        let exact = lower_tail_mass(l).unwrap();
        assert!((exact - approx).abs() < 1e-6, "{exact} vs {approx}");
    }
}
