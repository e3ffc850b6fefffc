//! Rate functions: Kullback-Leibler divergence within a family, the
//! posterior rate, the Cramer rate of the sample mean, the contraction rate
//! of the constrained MLE, and the identities relating them.

use crate::error::{to_f64s, Error, Result};
use crate::family::GeneratingFamily;
use crate::legendre::{conjugate, conjugate_constrained, ConstraintSet};
use crate::models::{limiting_mle, CurveMap, CurvedModel, Interval, ModelEvent, ModelKind, Prior};
use crate::numeric::optimize::brent_minimize;
use crate::numeric::{count, dot, lit, Real};

/// What a [`RateTable`] tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateKind {
    Posterior,
    Mle,
    Cramer,
}

impl RateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RateKind::Posterior => "posterior",
            RateKind::Mle => "mle",
            RateKind::Cramer => "cramer",
        }
    }
}

/// Rate values on a grid of model coordinates.
#[derive(Clone, Debug)]
pub struct RateTable<R> {
    pub kind: RateKind,
    pub coordinates: Vec<R>,
    pub rates: Vec<R>,
    /// Excess-of-divergence form of a posterior rate, when `theta_0` exists.
    pub divergence_form: Option<Vec<R>>,
    pub theta_nu: Option<Vec<R>>,
    pub theta_0: Option<Vec<R>>,
}

/// `D(P_theta0 || P_theta) = (theta0 - theta) . grad kappa(theta0) - kappa(theta0) + kappa(theta)`.
pub fn kl_divergence<R: Real>(
    family: &GeneratingFamily<R>,
    theta0: &[R],
    theta: &[R],
) -> Result<R> {
    let m0 = family.mean_map(theta0)?;
    let k0 = family.cumulant(theta0)?;
    let k = family.cumulant(theta)?;
    if k.is_infinite() {
        return Ok(R::infinity());
    }
    let diff: Vec<R> = theta0.iter().zip(theta).map(|(&a, &b)| a - b).collect();
    let d = dot(&diff, &m0) - k0 + k;
    if d.is_nan() {
        return Err(Error::NotANumber("kl divergence"));
    }
    Ok(d)
}

/// Posterior rate `I(z) = l(theta_nu; mu0) - l(eta(z); mu0)` on a grid.
///
/// When `mu0` has a natural parameter `theta_0`, the excess-of-divergence
/// form `D(theta_0 || eta(z)) - D(theta_0 || theta_nu)` is tabulated too and
/// must agree with the direct form within `1e-10`.
pub fn posterior_rate<R: Real>(prior: &Prior<R>, mu0: &[R], grid: &[R]) -> Result<RateTable<R>> {
    let model = prior.model();
    let family = model.family();
    let lm = limiting_mle(prior, mu0)?;
    let theta_nu = lm.theta_nu().map(|t| t.to_vec());
    let l_nu = lm.value();
    let theta_0 = conjugate(family, mu0)
        .ok()
        .and_then(|r| r.argmax.map(|a| a.into_inner()));
    let mut rates = Vec::with_capacity(grid.len());
    let mut divergence = theta_0.as_ref().map(|_| Vec::with_capacity(grid.len()));
    let d_nu = match (&theta_0, &theta_nu) {
        (Some(t0), Some(tn)) => Some(kl_divergence(family, t0, tn)?),
        _ => None,
    };
    for &z in grid {
        let l = model.log_likelihood(z, mu0)?;
        let direct = if l == R::neg_infinity() {
            R::infinity()
        } else {
            l_nu - l
        };
        rates.push(direct);
        if let (Some(div), Some(t0), Some(dn)) = (divergence.as_mut(), &theta_0, d_nu) {
            let form = kl_divergence(family, t0, &model.eta(z))? - dn;
            let scale = R::one().max(direct.abs());
            if direct.is_finite() && (form - direct).abs() > lit::<R>(1e-10) * scale {
                return Err(Error::FormMismatch {
                    direct: direct.to_f64().unwrap_or(f64::NAN),
                    divergence: form.to_f64().unwrap_or(f64::NAN),
                });
            }
            div.push(form);
        }
    }
    Ok(RateTable {
        kind: RateKind::Posterior,
        coordinates: grid.to_vec(),
        rates,
        divergence_form: divergence,
        theta_nu,
        theta_0,
    })
}

/// `inf { I(z) : z in closure(A) }` over the support, with its location.
/// This is the limit of the decay rates of `pi_n(A)` when `A` is the
/// closure of its interior.
pub fn posterior_rate_infimum<R: Real>(
    prior: &Prior<R>,
    mu0: &[R],
    event: &ModelEvent<R>,
) -> Result<(R, R)> {
    let model = prior.model();
    let lm = limiting_mle(prior, mu0)?;
    let l_nu = lm.value();
    let rate = |z: R| -> R {
        match model.log_likelihood(z, mu0) {
            Ok(l) if l.is_finite() => l_nu - l,
            _ => R::infinity(),
        }
    };
    let mut best = (R::nan(), R::infinity());
    for support in prior.effective_support() {
        for piece in event.closure().intersect_interval(&support.closure()) {
            let (lo, hi) = (piece.lo, piece.hi);
            for end in [lo, hi] {
                if end.is_finite() && model.coords().contains(end) && rate(end) < best.1 {
                    best = (end, rate(end));
                }
            }
            if piece.is_point() || !piece.is_bounded() {
                continue;
            }
            let m = brent_minimize(rate, lo, hi, lit::<R>(1e-12) * (R::one() + hi - lo), 300);
            if m.value < best.1 {
                best = (m.x, m.value);
            }
        }
    }
    Ok(best)
}

/// Cramer rate `iota(t) = kappa*(t) - l(theta0; t)` of the sample mean.
pub fn cramer_rate<R: Real>(family: &GeneratingFamily<R>, theta0: &[R], t: &[R]) -> Result<R> {
    if !family.domain().is_interior(theta0) {
        return Err(Error::OutsideDomain {
            point: to_f64s(theta0),
        });
    }
    let c = conjugate(family, t)?;
    Ok(c.value - family.log_likelihood(theta0, t)?)
}

/// Cramer rates along the curve `t = grad kappa(eta(z))`.
pub fn cramer_table<R: Real>(
    model: &CurvedModel<R>,
    theta0: &[R],
    grid: &[R],
) -> Result<RateTable<R>> {
    let family = model.family();
    let rates = grid
        .iter()
        .map(|&z| {
            let t = family.mean_map(&model.eta(z))?;
            cramer_rate(family, theta0, &t)
        })
        .collect::<Result<Vec<R>>>()?;
    Ok(RateTable {
        kind: RateKind::Cramer,
        coordinates: grid.to_vec(),
        rates,
        divergence_form: None,
        theta_nu: None,
        theta_0: Some(theta0.to_vec()),
    })
}

/// How the contraction infimum over a constant-MLE surface is found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionMethod {
    /// `D(P_eta(z) || P_theta0)`, exact for affine models.
    Pythagoras,
    /// Bracketed minimization along the registered surface, polished by
    /// its stationarity equation where one is known.
    LineMinimize,
    /// Exhaustive scan of the registered surface.
    Brute,
}

/// A constant-MLE surface `{t : phi(t) = z}` that is a line segment in mean
/// space: `t = point + x * direction` for `x` in `window`.
#[derive(Clone, Debug)]
pub struct MleLine<R> {
    pub point: Vec<R>,
    pub direction: Vec<R>,
    pub window: (R, R),
}

/// The constant-MLE surface of a curved model at coordinate `z`, when one
/// is registered.
pub fn constant_mle_line<R: Real>(model: &CurvedModel<R>, z: R) -> Result<MleLine<R>> {
    match model.map() {
        CurveMap::GaussMeanEqSd => {
            if !(z > R::zero()) {
                return Err(Error::InvalidInput(format!("coordinate {z} outside M")));
            }
            // y = 1/z^2 + x/z, parametrized by x
            let point = vec![R::zero(), R::one() / (z * z)];
            let direction = vec![R::one(), R::one() / z];
            let window = mean_window(model.family(), &point, &direction, R::one() / z)?;
            Ok(MleLine {
                point,
                direction,
                window,
            })
        }
        _ => Err(Error::UnsupportedModel(format!(
            "no constant-MLE surface registered for {}",
            model.name()
        ))),
    }
}

/// Open interval of `x` with `point + x * direction` in the mean domain,
/// found by bisection outward from an interior `x0`.
fn mean_window<R: Real>(
    family: &GeneratingFamily<R>,
    point: &[R],
    direction: &[R],
    x0: R,
) -> Result<(R, R)> {
    let at = |x: R| -> Vec<R> {
        point
            .iter()
            .zip(direction)
            .map(|(&p, &d)| p + x * d)
            .collect()
    };
    if !family.mean_contains(&at(x0)) {
        return Err(Error::MeanOutsideDomain {
            point: to_f64s(&at(x0)),
        });
    }
    let edge = |sign: R| -> R {
        let mut inside = x0;
        let mut step = R::one();
        let mut outside = None;
        for _ in 0..200 {
            let x = x0 + sign * step;
            if family.mean_contains(&at(x)) {
                inside = x;
                step *= lit(2.0);
            } else {
                outside = Some(x);
                break;
            }
        }
        let Some(mut out) = outside else {
            return sign * R::infinity();
        };
        for _ in 0..200 {
            let mid = (inside + out) * lit(0.5);
            if mid == inside || mid == out {
                break;
            }
            if family.mean_contains(&at(mid)) {
                inside = mid;
            } else {
                out = mid;
            }
        }
        inside
    };
    Ok((edge(-R::one()), edge(R::one())))
}

/// Stationary points of `iota` along the constant-MLE line of the
/// Gaussian mean-equals-deviation model, from the quadratic in `u = z x`:
/// `2A u^2 - 2(A - z^2) u - (2A + z^2) = 0` with `A = z theta0_1 + theta0_2`.
/// Returns the `x` values inside the window, ascending.
pub fn gauss_line_stationary_points<R: Real>(theta0: &[R], z: R) -> Vec<R> {
    let two = lit::<R>(2.0);
    let a = z * theta0[0] + theta0[1];
    let qa = two * a;
    let qb = -two * (a - z * z);
    let qc = -(two * a + z * z);
    let mut us = Vec::new();
    if qa == R::zero() {
        if qb != R::zero() {
            us.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - lit::<R>(4.0) * qa * qc;
        if disc >= R::zero() {
            // cancellation-free roots
            let q = -(qb + qb.signum() * disc.sqrt()) / two;
            if q != R::zero() {
                us.push(q / qa);
                us.push(qc / q);
            } else {
                us.push(R::zero());
            }
        }
    }
    let sqrt5 = lit::<R>(5.0).sqrt();
    let (lo, hi) = ((R::one() - sqrt5) / two, (R::one() + sqrt5) / two);
    let mut xs: Vec<R> = us
        .into_iter()
        .filter(|&u| u > lo && u < hi)
        .map(|u| u / z)
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs
}

/// Minimizer of `iota` on a constant-MLE surface.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionResult<R> {
    pub value: R,
    /// Mean point attaining the infimum, when located.
    pub argmin: Option<Vec<R>>,
    /// Line coordinate of the minimizer for registered lines.
    pub line_coordinate: Option<R>,
}

/// Contraction rate `I~(z) = inf { iota(t) : phi(t) = z }`.
pub fn contraction_rate<R: Real>(
    model: &CurvedModel<R>,
    theta0: &[R],
    z: R,
    method: ContractionMethod,
) -> Result<R> {
    Ok(contraction_detail(model, theta0, z, method)?.value)
}

pub fn contraction_detail<R: Real>(
    model: &CurvedModel<R>,
    theta0: &[R],
    z: R,
    method: ContractionMethod,
) -> Result<ContractionResult<R>> {
    let family = model.family();
    if !family.domain().is_interior(theta0) {
        return Err(Error::OutsideDomain {
            point: to_f64s(theta0),
        });
    }
    if !model.coords().contains(z) {
        return Err(Error::InvalidInput(format!("coordinate {z} outside M")));
    }
    if model.kind() == ModelKind::Affine {
        let theta = model.eta(z);
        let value = kl_divergence(family, &theta, theta0)?;
        return Ok(ContractionResult {
            value,
            argmin: Some(family.mean_map(&theta)?.into_inner()),
            line_coordinate: None,
        });
    }
    if method == ContractionMethod::Pythagoras {
        return Err(Error::UnsupportedModel(format!(
            "the Pythagorean decomposition needs an affine model, {} is curved",
            model.name()
        )));
    }
    let line = constant_mle_line(model, z)?;
    let at = |x: R| -> Vec<R> {
        line.point
            .iter()
            .zip(&line.direction)
            .map(|(&p, &d)| p + x * d)
            .collect()
    };
    let iota = |x: R| -> Result<R> { cramer_rate(family, theta0, &at(x)) };
    let (lo, hi) = line.window;
    let width = hi - lo;
    let (x, value) = match method {
        ContractionMethod::Brute => {
            let n = 20_000;
            let mut best = (R::nan(), R::infinity());
            for i in 1..n {
                let x = lo + width * count::<R>(i) / count::<R>(n);
                let v = iota(x)?;
                if v < best.1 {
                    best = (x, v);
                }
            }
            best
        }
        _ => {
            let starts = 16;
            let margin = width * lit(1e-9);
            let probe: Vec<R> = (0..starts)
                .map(|i| {
                    lo + margin
                        + (width - margin * lit(2.0)) * count::<R>(i) / count::<R>(starts - 1)
                })
                .collect();
            let vals = probe.iter().map(|&x| iota(x)).collect::<Result<Vec<R>>>()?;
            let mut best = (R::nan(), R::infinity());
            for i in 0..starts {
                let left = i == 0 || vals[i] <= vals[i - 1];
                let right = i == starts - 1 || vals[i] <= vals[i + 1];
                if !(left && right) {
                    continue;
                }
                let a = probe[i.saturating_sub(1)];
                let b = probe[(i + 1).min(starts - 1)];
                let mut err = None;
                let m = brent_minimize(
                    |x| match iota(x) {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            R::infinity()
                        }
                    },
                    a,
                    b,
                    lit::<R>(1e-12) * (R::one() + width),
                    300,
                );
                if let Some(e) = err {
                    return Err(e);
                }
                if m.value < best.1 {
                    best = (m.x, m.value);
                }
            }
            if matches!(model.map(), CurveMap::GaussMeanEqSd) {
                // polish with the closest root of the stationarity quadratic
                let tol = lit::<R>(1e-4) * (R::one() + best.0.abs());
                for xr in gauss_line_stationary_points(theta0, z) {
                    if (xr - best.0).abs() <= tol {
                        let v = iota(xr)?;
                        if v <= best.1 + lit::<R>(1e-12) {
                            best = (xr, v);
                        }
                    }
                }
            }
            best
        }
    };
    Ok(ContractionResult {
        value,
        argmin: Some(at(x)),
        line_coordinate: Some(x),
    })
}

/// Infimum of the contraction rate of an affine model over an event,
/// attained where `D(P_eta(z) || P_theta0)` is smallest.
pub fn contraction_infimum<R: Real>(
    model: &CurvedModel<R>,
    theta0: &[R],
    event: &ModelEvent<R>,
) -> Result<(R, R)> {
    if model.kind() != ModelKind::Affine {
        return Err(Error::UnsupportedModel(format!(
            "contraction infimum over events is implemented for affine models, not {}",
            model.name()
        )));
    }
    let family = model.family();
    let d = |z: R| kl_divergence(family, &model.eta(z), theta0);
    let mut best = (R::nan(), R::infinity());
    for piece in event.intersect_interval(model.coords()) {
        let closure = piece.closure();
        let lo = if closure.lo.is_finite() {
            closure.lo
        } else {
            lit(-50.0)
        };
        let hi = if closure.hi.is_finite() {
            closure.hi
        } else {
            lit(50.0)
        };
        let iv = Interval::closed(lo, hi);
        for end in [iv.lo, iv.hi] {
            let v = d(end)?;
            if v < best.1 {
                best = (end, v);
            }
        }
        let m = brent_minimize(|z| d(z).unwrap_or(R::infinity()), lo, hi, lit(1e-12), 300);
        if m.value < best.1 {
            best = (m.x, m.value);
        }
    }
    Ok(best)
}

/// `D(theta0 || theta) - D(theta0 || theta_nu) - D(theta_nu || theta)` with
/// `theta_nu` the maximizer of `l(.; mu0)` over `set`.
pub fn pythagorean_residual<R: Real>(
    family: &GeneratingFamily<R>,
    set: &ConstraintSet<R>,
    theta0: &[R],
    theta: &[R],
    mu0: &[R],
) -> Result<R> {
    let nu = conjugate_constrained(family, set, mu0)?;
    let theta_nu = nu.require_argmax()?;
    Ok(kl_divergence(family, theta0, theta)?
        - kl_divergence(family, theta0, theta_nu)?
        - kl_divergence(family, theta_nu, theta)?)
}

/// A family and a family whose cumulant is the conjugate of the first.
#[derive(Clone, Debug)]
pub struct DualPair<R: Real> {
    pub primal: GeneratingFamily<R>,
    pub dual: GeneratingFamily<R>,
}

impl<R: Real> DualPair<R> {
    /// Poisson family and the Landau-type dual `kappa(mu) = mu log mu - mu + 1`.
    pub fn poisson_landau() -> Result<Self> {
        Ok(Self {
            primal: GeneratingFamily::builtin("poisson")?,
            dual: GeneratingFamily::builtin("landau-dual")?,
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            primal: self.dual.clone(),
            dual: self.primal.clone(),
        }
    }

    /// Largest deviation on `grid` of the conjugate of the dual cumulant from
    /// the primal cumulant, and of its maximizer from the primal mean.
    pub fn biconjugate_gap(&self, grid: &[Vec<R>]) -> Result<R> {
        let mut worst = R::zero();
        for theta in grid {
            let c = conjugate(&self.dual, theta)?;
            let k = self.primal.cumulant(theta)?;
            let m = self.primal.mean_map(theta)?;
            let a = c.require_argmax()?;
            worst = worst.max((c.value - k).abs());
            for (&x, &y) in a.iter().zip(m.iter()) {
                worst = worst.max((x - y).abs());
            }
        }
        Ok(worst)
    }
}

/// `|D(P_theta0 || P_theta) - D(Q_mu || Q_mu0)|` with `mu = grad kappa(theta)`,
/// the dual divergence computed from the dual cumulant.
pub fn dual_rate_gap<R: Real>(pair: &DualPair<R>, theta0: &[R], theta: &[R]) -> Result<R> {
    let primal = kl_divergence(&pair.primal, theta0, theta)?;
    let mu = pair.primal.mean_map(theta)?;
    let mu0 = pair.primal.mean_map(theta0)?;
    let dual = kl_divergence(&pair.dual, &mu, &mu0)?;
    Ok((primal - dual).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(name: &str) -> GeneratingFamily<f64> {
        GeneratingFamily::builtin(name).unwrap()
    }

    #[test]
    fn kl_examples() {
        let p = fam("poisson");
        let l2 = 2f64.ln();
        assert_eq!(kl_divergence(&p, &[l2], &[l2]).unwrap(), 0.0);
        assert!((kl_divergence(&p, &[l2], &[0.0]).unwrap() - (2.0 * l2 - 1.0)).abs() < 1e-15);
        let g = fam("gauss-parabola");
        assert!(kl_divergence(&g, &[0.0, -0.5], &[0.0, 0.5])
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn cramer_examples() {
        let p = fam("poisson");
        assert!((cramer_rate(&p, &[0.0], &[2.0]).unwrap() - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12);
        assert!(cramer_rate(&p, &[0.3], &[0.3f64.exp()]).unwrap().abs() < 1e-14);
        let hw = fam("hardy-weinberg-saturated");
        assert!(
            (cramer_rate(&hw, &[0.0, 0.0], &[0.3, 0.2]).unwrap() - 0.010067756775).abs() < 1e-11
        );
    }

    #[test]
    fn posterior_rate_examples() {
        let m = CurvedModel::<f64>::builtin("hw-line").unwrap();
        let p = Prior::uniform(m.clone(), vec![Interval::closed(-3.0, 3.0)]).unwrap();
        let nu = (11.0f64 / 9.0).ln();
        let table = posterior_rate(&p, &[0.3, 0.2], &[0.0, nu, 1.0]).unwrap();
        assert!((table.rates[0] - 0.0100168).abs() < 1e-7);
        assert!(table.rates[1].abs() < 1e-15);
        let div = table.divergence_form.unwrap();
        assert!((div[0] - table.rates[0]).abs() < 1e-12);
        let mis = Prior::uniform(m, vec![Interval::closed(0.5, 3.0)]).unwrap();
        let t = posterior_rate(&mis, &[0.3, 0.2], &[1.0]).unwrap();
        // 2 log cosh(1/2) - 2 log cosh(1/4) - 0.05
        let closed = 2.0 * (0.5f64.cosh().ln() - 0.25f64.cosh().ln()) - 0.05;
        assert!((t.rates[0] - closed).abs() < 1e-14);
        assert!((t.rates[0] - 0.128276).abs() < 1e-3);
    }

    #[test]
    fn affine_contraction_is_divergence() {
        let m = CurvedModel::<f64>::builtin("hw-line").unwrap();
        for z in [-1.0, 0.0, 0.7] {
            let c = contraction_rate(&m, &[0.0, 0.0], z, ContractionMethod::LineMinimize).unwrap();
            let d = kl_divergence(m.family(), &m.eta(z), &[0.0, 0.0]).unwrap();
            assert!((c - d).abs() < 1e-14);
        }
        assert!(
            contraction_rate(&m, &[0.0, 0.0], 0.0, ContractionMethod::Pythagoras)
                .unwrap()
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn gauss_contraction_below_divergence() {
        let m = CurvedModel::<f64>::builtin("gauss-mean-eq-sd").unwrap();
        let theta0 = m.eta(1.0);
        let r = contraction_detail(&m, &theta0, 2.0, ContractionMethod::LineMinimize).unwrap();
        let d = kl_divergence(m.family(), &m.eta(2.0), &theta0).unwrap();
        assert!(r.value < d - 1e-4, "{} vs {d}", r.value);
        let brute = contraction_rate(&m, &theta0, 2.0, ContractionMethod::Brute).unwrap();
        assert!((brute - r.value).abs() < 1e-6);
        let at_truth =
            contraction_detail(&m, &theta0, 1.0, ContractionMethod::LineMinimize).unwrap();
        assert!(at_truth.value.abs() < 1e-12);
        assert!((at_truth.line_coordinate.unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(
            contraction_rate(&m, &theta0, 2.0, ContractionMethod::Pythagoras),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn quadratic_root_at_identity_point() {
        for z in [0.5f64, 1.0, 3.0] {
            let theta0: [f64; 2] = [z, -0.5 * z * z];
            let xs = gauss_line_stationary_points(&theta0, z);
            assert!(
                xs.iter().any(|&x| (x - 1.0 / z).abs() < 1e-12),
                "{z}: {xs:?}"
            );
        }
    }

    #[test]
    fn strip_contraction_is_unsupported() {
        let m = CurvedModel::<f64>::builtin("strip-curve").unwrap();
        let r = contraction_rate(&m, &[0.5, 0.5], 0.5, ContractionMethod::LineMinimize);
        assert!(matches!(r, Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn pythagoras_on_the_line() {
        let hw = fam("hardy-weinberg-saturated");
        let m = CurvedModel::<f64>::builtin("hw-line").unwrap();
        let set = ConstraintSet::from_affine_model(&m).unwrap();
        let theta0 = [1.2f64.ln(), 0.8f64.ln()];
        for z in [-2.0, 0.0, 0.2, 1.5] {
            let r = pythagorean_residual(&hw, &set, &theta0, &m.eta(z), &[0.3, 0.2]).unwrap();
            assert!(r.abs() < 1e-12, "{z}: {r}");
        }
    }

    #[test]
    fn poisson_duality() {
        let pair = DualPair::<f64>::poisson_landau().unwrap();
        let l2 = 2f64.ln();
        assert!(dual_rate_gap(&pair, &[l2], &[0.0]).unwrap() < 1e-12);
        assert_eq!(dual_rate_gap(&pair, &[0.3], &[0.3]).unwrap(), 0.0);
        let swapped = pair.swapped();
        assert!(dual_rate_gap(&swapped, &[2.0], &[0.5]).unwrap() < 1e-12);
        let grid: Vec<Vec<f64>> = (-8..=8).map(|i| vec![i as f64 * 0.25]).collect();
        assert!(pair.biconjugate_gap(&grid).unwrap() < 1e-8);
    }

    #[test]
    fn contraction_infimum_at_event_endpoint() {
        let m = CurvedModel::<f64>::builtin("hw-line").unwrap();
        let (z, v) = contraction_infimum(
            &m,
            &[0.0, 0.0],
            &ModelEvent::single(Interval::at_least(0.5)),
        )
        .unwrap();
        assert_eq!(z, 0.5);
        assert!((v - kl_divergence(m.family(), &m.eta(0.5), &[0.0, 0.0]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn infimum_sits_at_the_nearest_endpoint() {
        let m = CurvedModel::<f64>::builtin("hw-line").unwrap();
        let p = Prior::uniform(m.clone(), vec![Interval::closed(-3.0, 3.0)]).unwrap();
        let e = ModelEvent::single(Interval::at_least(0.5));
        let (z, v) = posterior_rate_infimum(&p, &[0.3, 0.2], &e).unwrap();
        assert_eq!(z, 0.5);
        let t = posterior_rate(&p, &[0.3, 0.2], &[0.5]).unwrap();
        assert_eq!(v, t.rates[0]);
        let around = ModelEvent::single(Interval::closed(-1.0, 1.0));
        assert!(
            posterior_rate_infimum(&p, &[0.3, 0.2], &around)
                .unwrap()
                .1
                .abs()
                < 1e-15
        );
    }
}
