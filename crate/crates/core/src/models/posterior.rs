//! Posterior masses `pi_n(A | xbar)`, their exponential decay rates, and the
//! limiting maximizer `theta_nu` together with numeric checks of the
//! continuity conditions at boundary points of the domain.

use crate::error::{to_f64s, Error, Result};
use crate::legendre::{conjugate_constrained, ConstraintSet, LegendreResult};
use crate::numeric::extrapolate::{fit_inverse_n, InverseNFit};
use crate::numeric::optimize::brent_minimize;
use crate::numeric::quadrature::{integrate_with_breaks, QuadPolicy};
use crate::numeric::{count, lit, Real};

use super::{Interval, ModelEvent, Prior};

/// Posterior probability of an event, kept in log form as well.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PosteriorMass<R> {
    pub mass: R,
    pub log_mass: R,
}

/// Likelihood-weighted integral over one interval, in logs relative to
/// `n * shift`.
fn log_piece_integral<R: Real>(
    prior: &Prior<R>,
    xbar: &[R],
    n: R,
    piece: &Interval<R>,
    peak_hint: Option<(R, R)>,
    shift: R,
) -> Result<R> {
    let model = prior.model();
    let f = |z: R| model.log_likelihood(z, xbar);
    if piece.is_point() {
        return Ok(R::neg_infinity());
    }
    let (lo, hi) = (piece.lo, piece.hi);

    // peak of the likelihood on this piece
    let (p, lp) = match peak_hint {
        Some((z, v)) if piece.contains(z) => (z, v),
        _ => {
            let mut err = None;
            let m = brent_minimize(
                |z| match f(z) {
                    Ok(v) => -v,
                    Err(e) => {
                        err.get_or_insert(e);
                        R::infinity()
                    }
                },
                lo,
                hi,
                lit::<R>(1e-12) * (R::one() + (hi - lo).abs()),
                300,
            );
            if let Some(e) = err {
                return Err(e);
            }
            let mut best = (m.x, -m.value);
            for end in [piece.nudge_inside(lo), piece.nudge_inside(hi)] {
                let v = f(end)?;
                if v > best.1 {
                    best = (end, v);
                }
            }
            best
        }
    };
    if lp == R::neg_infinity() {
        return Ok(R::neg_infinity());
    }

    // width of the likelihood spike around the peak
    let span = hi - lo;
    let h = lit::<R>(1e-4) * (R::one() + p.abs()).min(span);
    let fp = f((p + h).min(hi))?;
    let fm = f((p - h).max(lo))?;
    let mut width = span;
    let curv = -(fp - lp * lit(2.0) + fm) / (h * h);
    if curv > R::zero() && curv.is_finite() {
        width = width.min(R::one() / (n * curv).sqrt());
    }
    let slope = ((fp - fm) / (h * lit(2.0))).abs();
    if slope > R::zero() && slope.is_finite() {
        width = width.min(R::one() / (n * slope));
    }
    let mut breaks = vec![lo, hi, p];
    for k in [1.0, 4.0, 16.0, 64.0, 256.0] {
        breaks.push(p - width * lit(k));
        breaks.push(p + width * lit(k));
    }
    breaks.retain(|&b| b >= lo && b <= hi);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    let mut err = None;
    let integrand = |z: R| {
        let d = prior.density(piece.nudge_inside(z));
        if d == R::zero() {
            return R::zero();
        }
        match f(z) {
            Ok(v) if v == R::neg_infinity() => R::zero(),
            Ok(v) => (n * (v - lp)).exp() * d,
            Err(e) => {
                err.get_or_insert(e);
                R::zero()
            }
        }
    };
    let policy = QuadPolicy::default().with_rel_tol(1e-10);
    let r = integrate_with_breaks(integrand, &breaks, &policy);
    if let Some(e) = err {
        return Err(e);
    }
    let value = r?.value;
    if !(value > R::zero()) {
        return Ok(R::neg_infinity());
    }
    Ok(n * (lp - shift) + value.ln())
}

fn log_add<R: Real>(a: R, b: R) -> R {
    if a == R::neg_infinity() {
        return b;
    }
    if b == R::neg_infinity() {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Computes `pi_n(A | xbar)` by quadrature of the Bayes formula.
///
/// Both integrals are evaluated relative to the maximal likelihood over
/// the support, and each piece of `A` relative to its own maximum, so
/// posterior masses far below the smallest positive float still yield a
/// finite `log_mass`.
pub fn posterior_mass<R: Real>(
    prior: &Prior<R>,
    xbar: &[R],
    n: usize,
    event: &ModelEvent<R>,
) -> Result<PosteriorMass<R>> {
    let model = prior.model();
    let family = model.family();
    family.require_mean(xbar)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let support = prior.effective_support();
    let set = ConstraintSet::curve_on(model.clone(), &support)?;
    let mle = conjugate_constrained(family, &set, xbar)?;
    let lmax = mle.value;
    if !lmax.is_finite() {
        return Err(Error::DegeneratePosterior(format!(
            "likelihood is -inf on the support at xbar = {:?}",
            to_f64s(xbar)
        )));
    }
    let hint = mle.coordinate.map(|z| (z, lmax));
    let nn = count::<R>(n);
    let mut log_den = R::neg_infinity();
    for piece in &support {
        log_den = log_add(
            log_den,
            log_piece_integral(prior, xbar, nn, piece, hint, lmax)?,
        );
    }
    if !log_den.is_finite() {
        return Err(Error::DegeneratePosterior(format!(
            "posterior normalizer underflows at n = {n}"
        )));
    }
    let mut log_num = R::neg_infinity();
    for piece in &support {
        for part in event.intersect_interval(piece) {
            log_num = log_add(
                log_num,
                log_piece_integral(prior, xbar, nn, &part, hint, lmax)?,
            );
        }
    }
    let log_mass = (log_num - log_den).min(R::zero());
    Ok(PosteriorMass {
        mass: log_mass.exp(),
        log_mass,
    })
}

/// Per-`n` decay rates and their extrapolated limit.
#[derive(Clone, Debug)]
pub struct DecayEstimate<R> {
    pub schedule: Vec<usize>,
    /// `-(1/n) log pi_n(A | xbar_n)`; `+inf` when the mass is zero.
    pub rates: Vec<R>,
    pub fit: InverseNFit<R>,
}

impl<R: Real> DecayEstimate<R> {
    pub fn limit(&self) -> R {
        self.fit.limit
    }
}

/// Decay rates of `pi_n(A | xbar_n)` along `schedule`, with the limit
/// extrapolated by fitting `r_n = r + c / n` on the last half.
pub fn decay_rate_estimate<R: Real>(
    prior: &Prior<R>,
    sequence: impl Fn(usize) -> Vec<R>,
    event: &ModelEvent<R>,
    schedule: &[usize],
) -> Result<DecayEstimate<R>> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "schedule must be nonempty and increasing".into(),
        ));
    }
    let rates = schedule
        .iter()
        .map(|&n| {
            let m = posterior_mass(prior, &sequence(n), n, event)?;
            Ok(-m.log_mass / count::<R>(n))
        })
        .collect::<Result<Vec<R>>>()?;
    let fit = fit_inverse_n(schedule, &rates);
    Ok(DecayEstimate {
        schedule: schedule.to_vec(),
        rates,
        fit,
    })
}

/// One sequence `z_l -> z_b` used to probe continuity of `kappa` at a
/// boundary point.
#[derive(Clone, Debug)]
pub struct SequenceTrace<R> {
    pub coordinates: Vec<R>,
    /// `|kappa(eta(z_l)) - kappa(eta(z_b))|`.
    pub deviations: Vec<R>,
    pub converges: bool,
}

/// A model coordinate whose image is a boundary point of the domain.
#[derive(Clone, Debug)]
pub struct BoundaryCandidate<R> {
    pub coordinate: R,
    pub theta: Vec<R>,
    pub kappa: R,
    /// Whether the point belongs to `T = eta(M)` intersected with the
    /// support, so that condition (C) applies to it.
    pub in_model: bool,
    pub sequences: Vec<SequenceTrace<R>>,
    pub continuity_point: bool,
}

/// Numeric verdict on the two continuity conditions.
#[derive(Clone, Debug)]
pub struct ContinuityReport<R> {
    pub candidates: Vec<BoundaryCandidate<R>>,
    /// `theta_nu` interior, or a continuity point on the support.
    pub condition_b: bool,
    /// Every boundary point of the domain inside `T` is a continuity point.
    pub condition_c: bool,
}

/// Limiting posterior mode `theta_nu` and the continuity report.
#[derive(Clone, Debug)]
pub struct LimitingMle<R> {
    pub result: LegendreResult<R>,
    /// `theta_nu` lies on the boundary of the domain.
    pub boundary_flag: bool,
    pub continuity: ContinuityReport<R>,
}

impl<R: Real> LimitingMle<R> {
    pub fn theta_nu(&self) -> Option<&[R]> {
        self.result.argmax.as_deref()
    }

    pub fn coordinate(&self) -> Option<R> {
        self.result.coordinate
    }

    pub fn value(&self) -> R {
        self.result.value
    }
}

const SEQUENCE_STARTS: [f64; 8] = [0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05];
const SEQUENCE_RATIOS: [f64; 8] = [0.5, 0.6, 0.7, 0.55, 0.65, 0.75, 0.8, 0.45];

fn probe_continuity<R: Real>(
    prior: &Prior<R>,
    z_b: R,
    inward: R,
    length: R,
    kappa_b: R,
) -> Result<Vec<SequenceTrace<R>>> {
    let model = prior.model();
    let family = model.family();
    let floor = lit::<R>(1e-3) * length;
    let mut traces = Vec::with_capacity(SEQUENCE_STARTS.len());
    for (&a, &rho) in SEQUENCE_STARTS.iter().zip(&SEQUENCE_RATIOS) {
        let mut coordinates = Vec::new();
        let mut deviations = Vec::new();
        let mut offset = lit::<R>(a) * length;
        while offset >= floor {
            let z = z_b + inward * offset;
            let k = family.cumulant(&model.eta(z))?;
            coordinates.push(z);
            deviations.push((k - kappa_b).abs());
            offset *= lit(rho);
        }
        let m = deviations.len();
        let first = deviations[0];
        let last = deviations[m - 1];
        let tail_monotone = deviations[m / 2..].windows(2).all(|w| w[1] <= w[0]);
        let tiny = lit::<R>(1e-6) * (R::one() + kappa_b.abs());
        let converges = last <= tiny || (tail_monotone && last <= first * lit(0.5));
        traces.push(SequenceTrace {
            coordinates,
            deviations,
            converges,
        });
    }
    Ok(traces)
}

/// `theta_nu`, the maximizer of `l(.; mu0)` over the support, with checks
/// of the continuity conditions at boundary points of the domain.
pub fn limiting_mle<R: Real>(prior: &Prior<R>, mu0: &[R]) -> Result<LimitingMle<R>> {
    let model = prior.model();
    let family = model.family();
    family.require_mean(mu0)?;
    let support = prior.effective_support();
    let set = ConstraintSet::curve_on(model.clone(), &support)?;
    let result = conjugate_constrained(family, &set, mu0)?;
    let domain = family.domain();
    let boundary_flag = result
        .argmax
        .as_ref()
        .is_some_and(|a| !domain.is_interior(a));

    let mut candidates = Vec::new();
    for piece in prior.support() {
        for (end, inward) in [(piece.lo, R::one()), (piece.hi, -R::one())] {
            let theta = model.eta(end);
            if domain.boundary_index(&theta).is_none() {
                continue;
            }
            let kappa = family.cumulant(&theta)?;
            let in_model = model.coords().contains(end);
            let sequences = probe_continuity(prior, end, inward, piece.length(), kappa)?;
            let continuity_point = sequences.iter().all(|s| s.converges);
            candidates.push(BoundaryCandidate {
                coordinate: end,
                theta,
                kappa,
                in_model,
                sequences,
                continuity_point,
            });
        }
    }
    let condition_c = candidates
        .iter()
        .filter(|c| c.in_model)
        .all(|c| c.continuity_point);
    let condition_b = match result.coordinate {
        Some(z) if boundary_flag => candidates
            .iter()
            .any(|c| c.coordinate == z && c.continuity_point),
        Some(_) => true,
        None => false,
    };
    Ok(LimitingMle {
        result,
        boundary_flag,
        continuity: ContinuityReport {
            candidates,
            condition_b,
            condition_c,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::CurvedModel;

    fn hw_prior(lo: f64, hi: f64) -> Prior<f64> {
        Prior::uniform(
            CurvedModel::builtin("hw-line").unwrap(),
            vec![Interval::closed(lo, hi)],
        )
        .unwrap()
    }

    fn simpson_oracle(
        prior: &Prior<f64>,
        xbar: &[f64],
        n: f64,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    ) -> f64 {
        // composite Simpson at step 1e-5 over [a, b] (event) and [c, d] (support)
        let m = prior.model();
        let lmax = m.log_likelihood((11.0f64 / 9.0).ln(), xbar).unwrap();
        let simpson = |lo: f64, hi: f64| {
            let k = (((hi - lo) / 1e-5).round() as usize) & !1;
            let h = (hi - lo) / k as f64;
            let g = |z: f64| (n * (m.log_likelihood(z, xbar).unwrap() - lmax)).exp();
            let mut s = g(lo) + g(hi);
            for i in 1..k {
                s += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        simpson(a, b) / simpson(c, d)
    }

    #[test]
    fn whole_support_has_mass_one() {
        let p = hw_prior(-3.0, 3.0);
        let m = posterior_mass(&p, &[0.3, 0.2], 100, &ModelEvent::everything()).unwrap();
        assert!((m.mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_data_splits_evenly() {
        let p = hw_prior(-3.0, 3.0);
        let e = ModelEvent::single(Interval::greater_than(0.0));
        let m = posterior_mass(&p, &[0.3, 0.3], 100, &e).unwrap();
        assert!((m.mass - 0.5).abs() < 1e-9, "{}", m.mass);
    }

    #[test]
    fn matches_simpson_oracle() {
        let p = hw_prior(-3.0, 3.0);
        let e = ModelEvent::single(Interval::at_least(0.5));
        let m = posterior_mass(&p, &[0.3, 0.2], 100, &e).unwrap();
        let o = simpson_oracle(&p, &[0.3, 0.2], 100.0, 0.5, 3.0, -3.0, 3.0);
        assert!(((m.mass - o) / o).abs() < 1e-6, "{} vs {o}", m.mass);
    }

    #[test]
    fn additivity() {
        let p = hw_prior(-3.0, 3.0);
        let e = ModelEvent::new(vec![Interval::closed(-0.4, 0.1), Interval::at_least(0.9)]);
        for n in [10, 1000] {
            let a = posterior_mass(&p, &[0.3, 0.2], n, &e).unwrap().mass;
            let b = posterior_mass(&p, &[0.3, 0.2], n, &e.complement())
                .unwrap()
                .mass;
            assert!((a + b - 1.0).abs() < 1e-9, "n={n}: {a} + {b}");
        }
    }

    #[test]
    fn event_off_support_has_infinite_rate() {
        let p = hw_prior(-3.0, 3.0);
        let e = ModelEvent::single(Interval::at_least(5.0));
        let d = decay_rate_estimate(&p, |_| vec![0.3, 0.2], &e, &[10, 20, 40]).unwrap();
        assert!(d.rates.iter().all(|r| r.is_infinite()));
        assert!(d.limit().is_infinite());
    }

    #[test]
    fn event_around_mode_has_zero_rate() {
        let p = hw_prior(-3.0, 3.0);
        let e = ModelEvent::single(Interval::open(0.1, 0.3));
        let d =
            decay_rate_estimate(&p, |_| vec![0.3, 0.2], &e, &[64, 128, 256, 512, 1024]).unwrap();
        assert!(d.limit().abs() < 5e-3, "{}", d.limit());
    }

    #[test]
    fn limiting_mle_examples() {
        let lm = limiting_mle(&hw_prior(-3.0, 3.0), &[0.3, 0.2]).unwrap();
        let th = lm.theta_nu().unwrap();
        assert!((th[0] - (11.0f64 / 9.0).ln()).abs() < 1e-12 && (th[1] + th[0]).abs() < 1e-15);
        assert!(!lm.boundary_flag && lm.continuity.condition_b && lm.continuity.condition_c);
        let lm = limiting_mle(&hw_prior(0.5, 3.0), &[0.3, 0.2]).unwrap();
        assert_eq!(lm.coordinate(), Some(0.5));
    }
}
