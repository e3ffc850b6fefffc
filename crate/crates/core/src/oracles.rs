//! Brute-force validators: exact trinomial enumeration of the Hardy-Weinberg
//! MLE tail and exhaustive minimization along the constant-MLE lines of the
//! Gaussian mean-equals-deviation model. Nothing here calls the solvers it
//! is meant to check.

use crate::error::{Error, Result};
use crate::models::{DecayEstimate, ModelEvent};
use crate::numeric::extrapolate::fit_inverse_n;
use crate::numeric::{count, lit, log_sum_exp, Real};

/// Largest sample size [`multinomial_mle_tail`] enumerates.
pub const ENUMERATION_CAP: usize = 2000;

/// Sampling law of `n` draws over the outcomes `0, e1, e2` and an event on
/// the constrained MLE coordinate.
#[derive(Clone, Debug)]
pub struct TrinomialSpec<R: Real> {
    pub n: usize,
    pub probabilities: [R; 3],
    pub event: ModelEvent<R>,
}

impl<R: Real> TrinomialSpec<R> {
    pub fn new(n: usize, probabilities: [R; 3], event: ModelEvent<R>) -> Result<Self> {
        let sum = probabilities[0] + probabilities[1] + probabilities[2];
        if probabilities.iter().any(|&p| !(p > R::zero())) || (sum - R::one()).abs() > lit(1e-12) {
            return Err(Error::InvalidInput(format!(
                "outcome probabilities must be positive and sum to 1, got {:?}",
                probabilities.map(|p| p.to_f64().unwrap_or(f64::NAN))
            )));
        }
        Ok(Self {
            n,
            probabilities,
            event,
        })
    }

    /// Probabilities at natural parameter `theta0` of the saturated
    /// Hardy-Weinberg family, whose base weights are `(1/2, 1/4, 1/4)`.
    pub fn hardy_weinberg(n: usize, theta0: [R; 2], event: ModelEvent<R>) -> Result<Self> {
        let w = [lit::<R>(2.0), theta0[0].exp(), theta0[1].exp()];
        let total = w[0] + w[1] + w[2];
        Self::new(n, w.map(|x| x / total), event)
    }
}

/// Exact probability that the constrained MLE falls in the event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleTail<R> {
    pub probability: R,
    pub log_probability: R,
    /// `-(1/n) log probability`.
    pub rate: R,
    pub outcomes: usize,
    /// Probability of all enumerated outcomes; 1 up to rounding.
    pub total_probability: R,
}

/// Hardy-Weinberg MLE on the line `theta = (z, -z)` from the sample mean:
/// `log(1 + x - y) - log(1 - x + y)`, infinite when `|x - y| = 1`.
pub fn hw_line_mle<R: Real>(x: R, y: R) -> R {
    let d = x - y;
    (R::one() + d).ln() - (R::one() - d).ln()
}

/// Whether the event contains the extended MLE value `z`; `+inf` (`-inf`)
/// belongs to the event when it contains a half-line to the right (left).
fn event_contains<R: Real>(event: &ModelEvent<R>, z: R) -> bool {
    if z.is_finite() {
        return event.contains(z);
    }
    let ivs = event.intervals();
    if z > R::zero() {
        ivs.last().is_some_and(|iv| iv.hi == R::infinity())
    } else {
        ivs.first().is_some_and(|iv| iv.lo == R::neg_infinity())
    }
}

/// Enumerates all count vectors `(n0, n1, n2)` and sums the exact
/// probabilities of those whose MLE lies in the event.
pub fn multinomial_mle_tail<R: Real>(spec: &TrinomialSpec<R>) -> Result<MleTail<R>> {
    let n = spec.n;
    if n > ENUMERATION_CAP {
        return Err(Error::TooLarge {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be positive".into()));
    }
    let mut log_fact = Vec::with_capacity(n + 1);
    log_fact.push(R::zero());
    for k in 1..=n {
        log_fact.push(log_fact[k - 1] + count::<R>(k).ln());
    }
    let lp = spec.probabilities.map(|p| p.ln());
    let nn = count::<R>(n);
    let mut hits = Vec::new();
    let mut all = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for n1 in 0..=n {
        for n2 in 0..=(n - n1) {
            let n0 = n - n1 - n2;
            let lw = log_fact[n] - log_fact[n0] - log_fact[n1] - log_fact[n2]
                + count::<R>(n0) * lp[0]
                + count::<R>(n1) * lp[1]
                + count::<R>(n2) * lp[2];
            all.push(lw);
            let z = hw_line_mle(count::<R>(n1) / nn, count::<R>(n2) / nn);
            if event_contains(&spec.event, z) {
                hits.push(lw);
            }
        }
    }
    let log_probability = log_sum_exp(&hits);
    Ok(MleTail {
        probability: log_probability.exp(),
        log_probability,
        rate: -log_probability / nn,
        outcomes: all.len(),
        total_probability: log_sum_exp(&all).exp(),
    })
}

/// Exact MLE tail rates along `schedule` and their `r + c/n` extrapolation.
pub fn multinomial_decay<R: Real>(
    theta0: [R; 2],
    event: &ModelEvent<R>,
    schedule: &[usize],
) -> Result<DecayEstimate<R>> {
    let rates = schedule
        .iter()
        .map(|&n| {
            let spec = TrinomialSpec::hardy_weinberg(n, theta0, event.clone())?;
            Ok(multinomial_mle_tail(&spec)?.rate)
        })
        .collect::<Result<Vec<R>>>()?;
    Ok(DecayEstimate {
        schedule: schedule.to_vec(),
        fit: fit_inverse_n(schedule, &rates),
        rates,
    })
}

/// Resolution of [`curved_line_min_oracle`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineGrid {
    /// The window is cut into this many equal cells; interior nodes are
    /// scanned. Doubling it nests the old grid in the new one.
    pub cells: usize,
    /// Rounds of zooming into the best cell after the scan.
    pub zoom_levels: usize,
}

impl Default for LineGrid {
    fn default() -> Self {
        Self {
            cells: 20_000,
            zoom_levels: 12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineMin<R> {
    pub value: R,
    /// Position `x` on the line `y = 1/z^2 + x/z`.
    pub x: R,
}

fn gauss_cumulant<R: Real>(t1: R, t2: R) -> R {
    -t1 * t1 / (lit::<R>(4.0) * t2)
        - lit::<R>(0.5) * (-t2).ln()
        - lit::<R>(0.5) * (lit::<R>(4.0) * R::PI()).ln()
}

/// `kappa*(x, y) = log(2 pi / s) / 2 - 1/2` with `s = y - x^2`.
fn gauss_conjugate<R: Real>(x: R, y: R) -> R {
    let s = y - x * x;
    if !(s > R::zero()) {
        return R::infinity();
    }
    lit::<R>(0.5) * (lit::<R>(2.0) * R::PI() / s).ln() - lit::<R>(0.5)
}

/// Exhaustive minimization of `iota(t) = kappa*(t) - l(eta(a); t)` over the
/// constant-MLE line of coordinate `z` in the Gaussian mean-equals-deviation
/// model with true coordinate `a`.
pub fn curved_line_min_oracle<R: Real>(a: R, z: R, grid: LineGrid) -> Result<LineMin<R>> {
    if !(a > R::zero() && z > R::zero()) {
        return Err(Error::InvalidInput("coordinates must be positive".into()));
    }
    if grid.cells < 2 {
        return Err(Error::InvalidInput("grid needs at least two cells".into()));
    }
    let (t01, t02) = (a, -a * a / lit(2.0));
    let k0 = gauss_cumulant(t01, t02);
    let iota = |x: R| -> R {
        let y = R::one() / (z * z) + x / z;
        gauss_conjugate(x, y) - (t01 * x + t02 * y - k0)
    };
    let sqrt5 = lit::<R>(5.0).sqrt();
    let two = lit::<R>(2.0);
    let mut lo = (R::one() - sqrt5) / (two * z);
    let mut hi = (R::one() + sqrt5) / (two * z);
    let mut cells = grid.cells;
    let mut best = LineMin {
        value: R::infinity(),
        x: R::nan(),
    };
    for level in 0..=grid.zoom_levels {
        let h = (hi - lo) / count::<R>(cells);
        let mut best_i = 0;
        for i in 1..cells {
            let x = lo + h * count::<R>(i);
            let v = iota(x);
            if v < best.value {
                best = LineMin { value: v, x };
                best_i = i;
            }
        }
        if level == grid.zoom_levels {
            break;
        }
        // zoom on the two cells around the best node found so far
        let centre = if best_i > 0 {
            lo + h * count::<R>(best_i)
        } else {
            best.x
        };
        lo = centre - h;
        hi = centre + h;
        cells = 64;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Interval;

    fn everything() -> ModelEvent<f64> {
        ModelEvent::everything()
    }

    #[test]
    fn single_draw_probabilities() {
        let s = TrinomialSpec::hardy_weinberg(1, [0.0, 0.0], everything()).unwrap();
        assert_eq!(s.probabilities, [0.5, 0.25, 0.25]);
    }

    #[test]
    fn two_draws_at_mle_zero() {
        let e = ModelEvent::single(Interval::closed(0.0f64, 0.0));
        let s = TrinomialSpec::hardy_weinberg(2, [0.0, 0.0], e).unwrap();
        let t = multinomial_mle_tail(&s).unwrap();
        // (2,0,0) with 1/4 and (0,1,1) with 2 * 1/16
        assert!((t.probability - 0.375).abs() < 1e-15);
        assert_eq!(t.outcomes, 6);
    }

    #[test]
    fn outcome_count_and_total() {
        for n in [1usize, 7, 150] {
            let s = TrinomialSpec::hardy_weinberg(n, [0.3, -0.2], everything()).unwrap();
            let t = multinomial_mle_tail(&s).unwrap();
            assert_eq!(t.outcomes, (n + 1) * (n + 2) / 2);
            assert!((t.total_probability - 1.0).abs() < 1e-12);
            // infinite MLE values belong to the whole line
            assert!((t.probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let s =
            TrinomialSpec::hardy_weinberg(ENUMERATION_CAP + 1, [0.0, 0.0], everything()).unwrap();
        assert!(matches!(
            multinomial_mle_tail(&s),
            Err(Error::TooLarge { n: 2001, cap: 2000 })
        ));
    }

    #[test]
    fn bad_probabilities_rejected() {
        assert!(TrinomialSpec::new(3, [0.5, 0.5, 0.0], everything()).is_err());
        assert!(TrinomialSpec::new(3, [0.5, 0.3, 0.3], everything()).is_err());
    }

    #[test]
    fn conjugate_formula_is_fenchel_dual() {
        // kappa*(grad kappa(theta)) + kappa(theta) = theta . grad kappa(theta)
        for (t1, t2) in [(0.5f64, -0.3), (-1.0, -2.0), (2.0, -0.125)] {
            let x = -t1 / (2.0 * t2);
            let y = x * x - 1.0 / (2.0 * t2);
            let lhs = gauss_conjugate(x, y) + gauss_cumulant(t1, t2);
            assert!((lhs - (t1 * x + t2 * y)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_point_at_the_truth() {
        for a in [0.5f64, 1.0, 2.5] {
            let m = curved_line_min_oracle(a, a, LineGrid::default()).unwrap();
            assert!(m.value.abs() < 1e-12, "{a}: {}", m.value);
            assert!((m.x - 1.0 / a).abs() < 1e-6);
        }
    }

    #[test]
    fn refinement_is_monotone() {
        let mut prev = f64::INFINITY;
        for cells in [500, 1000, 2000, 4000, 8000] {
            let m = curved_line_min_oracle(
                1.0,
                2.0,
                LineGrid {
                    cells,
                    zoom_levels: 0,
                },
            )
            .unwrap();
            assert!(m.value <= prev);
            prev = m.value;
        }
        let fine = curved_line_min_oracle(1.0, 2.0, LineGrid::default()).unwrap();
        assert!((prev - fine.value).abs() < 1e-6);
    }
}
