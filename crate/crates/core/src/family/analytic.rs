//! Closed-form cumulant functions.

use crate::numeric::linalg::Matrix;
use crate::numeric::{lit, log_sum_exp, Real};

use super::domain::{DomainSpec, HalfSpace, Region};

/// Built-in families whose cumulant function, gradient and Hessian are
/// available in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Analytic {
    /// Three outcomes `0, e1, e2` with weights `1/2, 1/4, 1/4`.
    HardyWeinbergSaturated,
    /// Image of `N(mu, sigma^2)` under `x -> (x, x^2)`.
    GaussParabola,
    /// Poisson law with mean one.
    Poisson,
    /// Standard normal, `kappa = theta^2 / 2`.
    GaussMean,
    /// Dual of the Poisson family, `kappa = mu log mu - mu + 1`.
    LandauDual,
}

impl Analytic {
    pub fn name(self) -> &'static str {
        match self {
            Analytic::HardyWeinbergSaturated => "hardy-weinberg-saturated",
            Analytic::GaussParabola => "gauss-parabola",
            Analytic::Poisson => "poisson",
            Analytic::GaussMean => "gauss-mean",
            Analytic::LandauDual => "landau-dual",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Analytic::HardyWeinbergSaturated | Analytic::GaussParabola => 2,
            _ => 1,
        }
    }

    pub fn domain<R: Real>(self) -> DomainSpec<R> {
        match self {
            Analytic::HardyWeinbergSaturated => DomainSpec {
                interior: Region::All,
                boundary_points: vec![],
                mean_domain: Region::HalfSpaces(vec![
                    HalfSpace::new(vec![-R::one(), R::zero()], R::zero()),
                    HalfSpace::new(vec![R::zero(), -R::one()], R::zero()),
                    HalfSpace::new(vec![R::one(), R::one()], R::one()),
                ]),
            },
            Analytic::GaussParabola => DomainSpec {
                interior: Region::HalfSpaces(vec![HalfSpace::new(
                    vec![R::zero(), R::one()],
                    R::zero(),
                )]),
                boundary_points: vec![],
                mean_domain: Region::AboveParabola,
            },
            Analytic::Poisson => DomainSpec {
                interior: Region::All,
                boundary_points: vec![],
                mean_domain: Region::lower_bound(1, 0, R::zero()),
            },
            Analytic::GaussMean => DomainSpec::everywhere(),
            Analytic::LandauDual => DomainSpec {
                interior: Region::lower_bound(1, 0, R::zero()),
                boundary_points: vec![vec![R::zero()]],
                mean_domain: Region::All,
            },
        }
    }

    pub fn reference_point<R: Real>(self) -> Vec<R> {
        match self {
            Analytic::GaussParabola => vec![R::zero(), lit(-0.5)],
            Analytic::LandauDual => vec![R::one()],
            other => vec![R::zero(); other.dim()],
        }
    }

    /// Cumulant value; `+inf` off the domain.
    pub fn cumulant<R: Real>(self, t: &[R]) -> R {
        let two = lit::<R>(2.0);
        match self {
            Analytic::HardyWeinbergSaturated => {
                log_sum_exp(&[two.ln(), t[0], t[1]]) - two * two.ln()
            }
            Analytic::GaussParabola => {
                let (t1, t2) = (t[0], t[1]);
                if !(t2 < R::zero()) {
                    return R::infinity();
                }
                -lit::<R>(0.5) * (two * two.ln() + R::PI().ln() + (-t2).ln() + t1 * t1 / (two * t2))
            }
            Analytic::Poisson => t[0].exp_m1(),
            Analytic::GaussMean => t[0] * t[0] / two,
            Analytic::LandauDual => {
                let m = t[0];
                if m < R::zero() {
                    R::infinity()
                } else if m == R::zero() {
                    R::one()
                } else {
                    m * m.ln() - m + R::one()
                }
            }
        }
    }

    /// Gradient on the interior of the domain.
    pub fn gradient<R: Real>(self, t: &[R]) -> Vec<R> {
        let two = lit::<R>(2.0);
        match self {
            Analytic::HardyWeinbergSaturated => {
                let s = log_sum_exp(&[two.ln(), t[0], t[1]]);
                vec![(t[0] - s).exp(), (t[1] - s).exp()]
            }
            Analytic::GaussParabola => {
                let (t1, t2) = (t[0], t[1]);
                vec![
                    -t1 / (two * t2),
                    t1 * t1 / (lit::<R>(4.0) * t2 * t2) - R::one() / (two * t2),
                ]
            }
            Analytic::Poisson => vec![t[0].exp()],
            Analytic::GaussMean => vec![t[0]],
            Analytic::LandauDual => vec![t[0].ln()],
        }
    }

    pub fn hessian<R: Real>(self, t: &[R]) -> Matrix<R> {
        let two = lit::<R>(2.0);
        match self {
            Analytic::HardyWeinbergSaturated => {
                let p = self.gradient(t);
                Matrix::from_rows(&[
                    vec![p[0] * (R::one() - p[0]), -p[0] * p[1]],
                    vec![-p[0] * p[1], p[1] * (R::one() - p[1])],
                ])
            }
            Analytic::GaussParabola => {
                let (t1, t2) = (t[0], t[1]);
                let h11 = -R::one() / (two * t2);
                let h12 = t1 / (two * t2 * t2);
                let h22 = -t1 * t1 / (two * t2 * t2 * t2) + R::one() / (two * t2 * t2);
                Matrix::from_rows(&[vec![h11, h12], vec![h12, h22]])
            }
            Analytic::Poisson => Matrix::from_rows(&[vec![t[0].exp()]]),
            Analytic::GaussMean => Matrix::identity(1),
            Analytic::LandauDual => Matrix::from_rows(&[vec![R::one() / t[0]]]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardy_weinberg_closed_form() {
        let k = Analytic::HardyWeinbergSaturated.cumulant(&[2f64.ln(), 2f64.ln()]);
        assert!((k - (6f64.ln() - 4f64.ln())).abs() < 1e-15);
        assert_eq!(
            Analytic::HardyWeinbergSaturated.cumulant(&[0.0_f64, 0.0]),
            0.0
        );
    }

    #[test]
    fn gauss_parabola_gradient_is_standard_normal_moments() {
        let g = Analytic::GaussParabola.gradient(&[0.0_f64, -0.5]);
        assert_eq!(g, vec![0.0, 1.0]);
        assert!(Analytic::GaussParabola
            .cumulant(&[0.0_f64, 0.0])
            .is_infinite());
    }

    #[test]
    fn landau_dual_boundary_value() {
        assert_eq!(Analytic::LandauDual.cumulant(&[0.0_f64]), 1.0);
        assert!(Analytic::LandauDual.cumulant(&[-1e-3_f64]).is_infinite());
        assert!(Analytic::LandauDual.cumulant(&[1.0_f64]).abs() < 1e-15);
    }
}
