//! Generating measures and their cumulant machinery.
//!
//! A [`GeneratingFamily`] bundles a measure with the evaluators for
//! `kappa`, its gradient (the mean map) and Hessian, and a description of
//! the essential domain. Three payloads are supported: finitely many atoms,
//! closed forms, and measures whose Laplace transform reduces to a 1-D
//! integral.

pub mod analytic;
pub mod discrete;
pub mod domain;
pub mod landau;
pub mod point;
pub mod reduced;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{to_f64s, Error, Result};
use crate::numeric::linalg::Matrix;
use crate::numeric::quadrature::QuadPolicy;
use crate::numeric::{dot, lit, Real};

pub use analytic::Analytic;
pub use discrete::DiscreteMeasure;
pub use domain::{DomainSpec, HalfSpace, Region};
pub use point::{MeanPoint, NaturalPoint};
pub use reduced::{ReducedIntegrand, StripMeasure};

/// Names accepted by [`GeneratingFamily::builtin`].
pub const BUILTIN_FAMILIES: [&str; 6] = [
    "hardy-weinberg-saturated",
    "gauss-parabola",
    "poisson",
    "gauss-mean",
    "landau-dual",
    "strip-measure",
];

/// Payload of a generating family.
#[derive(Clone, Debug)]
pub enum FamilyKind<R: Real> {
    Discrete(DiscreteMeasure<R>),
    Analytic(Analytic),
    Quadrature1D {
        integrand: Arc<dyn ReducedIntegrand<R>>,
        policy: QuadPolicy<R>,
    },
}

/// A generating measure together with its cumulant function.
#[derive(Clone, Debug)]
pub struct GeneratingFamily<R: Real> {
    name: String,
    dim: usize,
    domain: DomainSpec<R>,
    kind: FamilyKind<R>,
}

/// JSON form of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilyDescriptor {
    Discrete { atoms: Vec<AtomDescriptor> },
    Builtin { name: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomDescriptor {
    pub x: Vec<f64>,
    pub w: f64,
}

impl<R: Real> GeneratingFamily<R> {
    pub fn builtin(name: &str) -> Result<Self> {
        let analytic = match name {
            "hardy-weinberg-saturated" => Analytic::HardyWeinbergSaturated,
            "gauss-parabola" => Analytic::GaussParabola,
            "poisson" => Analytic::Poisson,
            "gauss-mean" => Analytic::GaussMean,
            "landau-dual" => Analytic::LandauDual,
            "strip-measure" => {
                return Ok(Self::quadrature(
                    Arc::new(StripMeasure),
                    QuadPolicy::default(),
                ))
            }
            other => return Err(Error::UnknownBuiltin(other.to_string())),
        };
        Ok(Self::analytic(analytic))
    }

    pub fn analytic(a: Analytic) -> Self {
        Self {
            name: a.name().to_string(),
            dim: a.dim(),
            domain: a.domain(),
            kind: FamilyKind::Analytic(a),
        }
    }

    pub fn quadrature(integrand: Arc<dyn ReducedIntegrand<R>>, policy: QuadPolicy<R>) -> Self {
        Self {
            name: integrand.name().to_string(),
            dim: integrand.dim(),
            domain: integrand.domain(),
            kind: FamilyKind::Quadrature1D { integrand, policy },
        }
    }

    /// Family generated by weighted atoms. The mean domain is the interior
    /// of the atoms' convex hull.
    pub fn discrete(name: impl Into<String>, atoms: Vec<(Vec<R>, R)>) -> Result<Self> {
        let measure = DiscreteMeasure::new(atoms)?;
        let domain = DomainSpec {
            interior: Region::All,
            boundary_points: Vec::new(),
            mean_domain: measure.hull_interior()?,
        };
        Ok(Self {
            name: name.into(),
            dim: measure.dim(),
            domain,
            kind: FamilyKind::Discrete(measure),
        })
    }

    pub fn from_descriptor(desc: &FamilyDescriptor) -> Result<Self> {
        match desc {
            FamilyDescriptor::Builtin { name } => Self::builtin(name),
            FamilyDescriptor::Discrete { atoms } => {
                let atoms = atoms
                    .iter()
                    .map(|a| (a.x.iter().map(|&v| lit(v)).collect(), lit(a.w)))
                    .collect();
                Self::discrete("discrete", atoms)
            }
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::from_descriptor(&serde_json::from_str(json)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &DomainSpec<R> {
        &self.domain
    }

    pub fn kind(&self) -> &FamilyKind<R> {
        &self.kind
    }

    /// A point of `int(dom kappa)` used to start solvers.
    pub fn reference_point(&self) -> Vec<R> {
        match &self.kind {
            FamilyKind::Analytic(a) => a.reference_point(),
            _ => vec![R::zero(); self.dim],
        }
    }

    fn check(&self, theta: &[R]) -> Result<()> {
        if theta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: theta.len(),
            });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite natural parameter {:?}",
                to_f64s(theta)
            )));
        }
        Ok(())
    }

    fn outside(theta: &[R]) -> Error {
        Error::OutsideDomain {
            point: to_f64s(theta),
        }
    }

    /// `kappa(theta)`, `+inf` off the domain.
    pub fn cumulant(&self, theta: &[R]) -> Result<R> {
        self.check(theta)?;
        match &self.kind {
            FamilyKind::Discrete(m) => Ok(m.cumulant(theta)),
            FamilyKind::Analytic(a) => {
                if self.domain.contains(theta) {
                    Ok(a.cumulant(theta))
                } else {
                    Ok(R::infinity())
                }
            }
            FamilyKind::Quadrature1D { integrand, policy } => {
                Ok(reduced::reduced_moments(integrand.as_ref(), theta, policy, 0)?.cumulant)
            }
        }
    }

    /// `grad kappa(theta)` on the interior of the domain.
    pub fn mean_map(&self, theta: &[R]) -> Result<MeanPoint<R>> {
        self.check(theta)?;
        if !self.domain.is_interior(theta) {
            return Err(Self::outside(theta));
        }
        let g = match &self.kind {
            FamilyKind::Discrete(m) => m.mean(theta),
            FamilyKind::Analytic(a) => a.gradient(theta),
            FamilyKind::Quadrature1D { integrand, policy } => {
                reduced::reduced_moments(integrand.as_ref(), theta, policy, 1)?.mean
            }
        };
        MeanPoint::try_new(g).map_err(|_| Self::outside(theta))
    }

    /// `hess kappa(theta)` on the interior of the domain.
    pub fn hessian(&self, theta: &[R]) -> Result<Matrix<R>> {
        self.check(theta)?;
        if !self.domain.is_interior(theta) {
            return Err(Self::outside(theta));
        }
        match &self.kind {
            FamilyKind::Discrete(m) => Ok(m.covariance(theta)),
            FamilyKind::Analytic(a) => Ok(a.hessian(theta)),
            FamilyKind::Quadrature1D { integrand, policy } => {
                reduced::reduced_moments(integrand.as_ref(), theta, policy, 2)?
                    .covariance
                    .ok_or_else(|| Self::outside(theta))
            }
        }
    }

    /// `l(theta; t) = theta . t - kappa(theta)`, `-inf` off the domain.
    pub fn log_likelihood(&self, theta: &[R], t: &[R]) -> Result<R> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.len(),
            });
        }
        let k = self.cumulant(theta)?;
        if k.is_infinite() {
            return Ok(R::neg_infinity());
        }
        Ok(dot(theta, t) - k)
    }

    /// Whether `t` lies in the interior of the convex support.
    pub fn mean_contains(&self, t: &[R]) -> bool {
        t.len() == self.dim && self.domain.mean_contains(t)
    }

    pub(crate) fn require_mean(&self, t: &[R]) -> Result<()> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.len(),
            });
        }
        if self.domain.mean_contains(t) {
            Ok(())
        } else {
            Err(Error::MeanOutsideDomain { point: to_f64s(t) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(name: &str) -> GeneratingFamily<f64> {
        GeneratingFamily::builtin(name).unwrap()
    }

    #[test]
    fn cumulant_examples() {
        let hw = fam("hardy-weinberg-saturated");
        assert_eq!(hw.cumulant(&[0.0, 0.0]).unwrap(), 0.0);
        let l2 = 2f64.ln();
        assert!((hw.cumulant(&[l2, l2]).unwrap() - 0.405465108108).abs() < 1e-11);
        let strip = fam("strip-measure");
        assert!((strip.cumulant(&[0.0, 1.0]).unwrap() - 2.144729885849).abs() < 1e-9);
        assert!(strip.cumulant(&[0.0, 1.5]).unwrap().is_infinite());
    }

    #[test]
    fn mean_map_examples() {
        assert_eq!(fam("poisson").mean_map(&[0.0]).unwrap().coords(), &[1.0]);
        let m = fam("hardy-weinberg-saturated")
            .mean_map(&[1.2f64.ln(), 0.8f64.ln()])
            .unwrap();
        assert!((m[0] - 0.3).abs() < 1e-15 && (m[1] - 0.2).abs() < 1e-15);
        let g = fam("gauss-parabola").mean_map(&[0.0, -0.5]).unwrap();
        assert_eq!(g.coords(), &[0.0, 1.0]);
        assert!(matches!(
            fam("strip-measure").mean_map(&[0.0, 1.0]),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn hessian_examples() {
        assert_eq!(fam("gauss-mean").hessian(&[0.7]).unwrap()[(0, 0)], 1.0);
        assert!((fam("poisson").hessian(&[2f64.ln()]).unwrap()[(0, 0)] - 2.0).abs() < 1e-15);
        let h = fam("hardy-weinberg-saturated")
            .hessian(&[0.0, 0.0])
            .unwrap();
        assert_eq!(
            h.to_rows(),
            vec![vec![0.1875, -0.0625], vec![-0.0625, 0.1875]]
        );
    }

    #[test]
    fn log_likelihood_examples() {
        let hw = fam("hardy-weinberg-saturated");
        assert_eq!(hw.log_likelihood(&[0.0, 0.0], &[0.4, 0.1]).unwrap(), 0.0);
        let v = hw
            .log_likelihood(&[1.2f64.ln(), 0.8f64.ln()], &[0.3, 0.2])
            .unwrap();
        assert!((v - (0.3 * 1.2f64.ln() + 0.2 * 0.8f64.ln())).abs() < 1e-15);
        assert!((v - 0.010067).abs() < 1e-6);
        let strip = fam("strip-measure");
        assert_eq!(
            strip.log_likelihood(&[0.0, 1.5], &[1.0, 1.0]).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn descriptor_round_trip() {
        let json = r#"{"kind":"discrete","atoms":[{"x":[0,0],"w":0.5},{"x":[1,0],"w":0.25},{"x":[0,1],"w":0.25}]}"#;
        let desc: FamilyDescriptor = serde_json::from_str(json).unwrap();
        let f = GeneratingFamily::<f64>::from_descriptor(&desc).unwrap();
        let hw = fam("hardy-weinberg-saturated");
        for theta in [[0.3, -0.4], [2.0, 1.0]] {
            let a = f.cumulant(&theta).unwrap();
            let b = hw.cumulant(&theta).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        assert!(f.mean_contains(&[0.3, 0.2]));
        assert!(!f.mean_contains(&[0.6, 0.5]));
        let back = serde_json::to_string(&desc).unwrap();
        assert_eq!(
            serde_json::from_str::<FamilyDescriptor>(&back).unwrap(),
            desc
        );
        let b =
            GeneratingFamily::<f64>::from_json(r#"{"kind":"builtin","name":"poisson"}"#).unwrap();
        assert_eq!(b.name(), "poisson");
        assert!(matches!(
            GeneratingFamily::<f64>::builtin("nope"),
            Err(Error::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn strip_mean_matches_finite_differences() {
        let strip = fam("strip-measure");
        let theta = [0.4, 0.5];
        let m = strip.mean_map(&theta).unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let mut a = theta;
            let mut b = theta;
            a[i] += h;
            b[i] -= h;
            let fd = (strip.cumulant(&a).unwrap() - strip.cumulant(&b).unwrap()) / (2.0 * h);
            assert!(
                (fd - m[i]).abs() < 1e-6 * m[i].abs().max(1.0),
                "{i}: {fd} vs {}",
                m[i]
            );
        }
        assert!(strip.hessian(&theta).unwrap().is_positive_definite());
    }
}
