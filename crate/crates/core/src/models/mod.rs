//! Curved submodels, priors on model coordinates, and posterior
//! computations for deterministic data sequences.

pub mod interval;
pub mod posterior;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{to_f64s, Error, Result};
use crate::family::GeneratingFamily;
use crate::numeric::quadrature::{integrate, QuadPolicy};
use crate::numeric::{count, lit, Real};

pub use interval::{Endpoint, EventDescriptor, Interval, ModelEvent};
pub use posterior::{
    decay_rate_estimate, limiting_mle, posterior_mass, ContinuityReport, DecayEstimate,
    LimitingMle, PosteriorMass,
};

/// Names accepted by [`CurvedModel::builtin`].
pub const BUILTIN_MODELS: [&str; 4] =
    ["hw-line", "gauss-mean-eq-sd", "strip-curve", "poisson-line"];

/// Parameter map `eta: M -> dom(kappa)`.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveMap<R> {
    /// `eta(z) = (z, -z)`.
    HwLine,
    /// `eta(z) = (z, -z^2 / 2)`: Gaussian laws whose mean equals the
    /// standard deviation.
    GaussMeanEqSd,
    /// `eta(z) = (z, sqrt(1 - z^3))`.
    StripCurve,
    /// `eta(z) = z`.
    PoissonLine,
    /// `eta(z) = base + z * direction`.
    Line { base: Vec<R>, direction: Vec<R> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Affine,
    Curve,
}

/// A one-parameter subfamily `T = eta(M)`.
#[derive(Clone, Debug)]
pub struct CurvedModel<R: Real> {
    name: String,
    family: GeneratingFamily<R>,
    map: CurveMap<R>,
    coords: Interval<R>,
}

impl<R: Real> CurvedModel<R> {
    pub fn builtin(name: &str) -> Result<Self> {
        let (family, map, coords) = match name {
            "hw-line" => (
                "hardy-weinberg-saturated",
                CurveMap::HwLine,
                Interval::real_line(),
            ),
            "gauss-mean-eq-sd" => (
                "gauss-parabola",
                CurveMap::GaussMeanEqSd,
                Interval::greater_than(R::zero()),
            ),
            "strip-curve" => (
                "strip-measure",
                CurveMap::StripCurve,
                Interval::left_open(R::zero(), R::one()),
            ),
            "poisson-line" => ("poisson", CurveMap::PoissonLine, Interval::real_line()),
            other => return Err(Error::UnknownBuiltin(other.to_string())),
        };
        Ok(Self {
            name: name.to_string(),
            family: GeneratingFamily::builtin(family)?,
            map,
            coords,
        })
    }

    /// Affine model `base + z * direction` with `z` ranging over `coords`.
    pub fn line(
        name: impl Into<String>,
        family: GeneratingFamily<R>,
        base: Vec<R>,
        direction: Vec<R>,
        coords: Interval<R>,
    ) -> Result<Self> {
        let d = family.dim();
        if base.len() != d || direction.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if base.len() != d {
                    base.len()
                } else {
                    direction.len()
                },
            });
        }
        if direction.iter().all(|v| *v == R::zero()) {
            return Err(Error::InvalidModel("zero direction".into()));
        }
        let model = Self {
            name: name.into(),
            family,
            map: CurveMap::Line { base, direction },
            coords,
        };
        model.check_invariants()?;
        Ok(model)
    }

    /// Same map with a different coordinate set `M`, validated against the
    /// domain of the family.
    pub fn with_coords(&self, coords: Interval<R>) -> Result<Self> {
        let model = Self {
            coords,
            ..self.clone()
        };
        model.check_invariants()?;
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &GeneratingFamily<R> {
        &self.family
    }

    pub fn map(&self) -> &CurveMap<R> {
        &self.map
    }

    pub fn coords(&self) -> &Interval<R> {
        &self.coords
    }

    pub fn kind(&self) -> ModelKind {
        match self.map {
            CurveMap::HwLine | CurveMap::PoissonLine | CurveMap::Line { .. } => ModelKind::Affine,
            _ => ModelKind::Curve,
        }
    }

    /// Base point and direction of an affine model.
    pub fn affine_parts(&self) -> Option<(Vec<R>, Vec<R>)> {
        match &self.map {
            CurveMap::HwLine => Some((vec![R::zero(); 2], vec![R::one(), -R::one()])),
            CurveMap::PoissonLine => Some((vec![R::zero()], vec![R::one()])),
            CurveMap::Line { base, direction } => Some((base.clone(), direction.clone())),
            _ => None,
        }
    }

    pub fn eta(&self, z: R) -> Vec<R> {
        let half = lit::<R>(0.5);
        match &self.map {
            CurveMap::HwLine => vec![z, -z],
            CurveMap::GaussMeanEqSd => vec![z, -half * z * z],
            CurveMap::StripCurve => vec![z, (R::one() - z * z * z).max(R::zero()).sqrt()],
            CurveMap::PoissonLine => vec![z],
            CurveMap::Line { base, direction } => base
                .iter()
                .zip(direction)
                .map(|(&b, &v)| b + z * v)
                .collect(),
        }
    }

    pub fn jacobian(&self, z: R) -> Vec<R> {
        match &self.map {
            CurveMap::HwLine => vec![R::one(), -R::one()],
            CurveMap::GaussMeanEqSd => vec![R::one(), -z],
            CurveMap::StripCurve => {
                let s = (R::one() - z * z * z).max(R::zero()).sqrt();
                vec![R::one(), -lit::<R>(1.5) * z * z / s]
            }
            CurveMap::PoissonLine => vec![R::one()],
            CurveMap::Line { direction, .. } => direction.clone(),
        }
    }

    /// `l(eta(z); t)`.
    pub fn log_likelihood(&self, z: R, t: &[R]) -> Result<R> {
        self.family.log_likelihood(&self.eta(z), t)
    }

    /// Derivative of `z -> l(eta(z); t)` at an interior point of the domain.
    pub fn score(&self, z: R, t: &[R]) -> Result<R> {
        let theta = self.eta(z);
        let m = self.family.mean_map(&theta)?;
        let j = self.jacobian(z);
        Ok(j.iter()
            .zip(t.iter().zip(m.iter()))
            .map(|(&ji, (&ti, &mi))| ji * (ti - mi))
            .sum())
    }

    /// Probe points of `M` used by the invariant checks.
    fn probe_grid(&self) -> Vec<R> {
        let lo = if self.coords.lo.is_finite() {
            self.coords.lo
        } else {
            lit(-20.0)
        };
        let hi = if self.coords.hi.is_finite() {
            self.coords.hi
        } else {
            lit(20.0)
        };
        let n = 128;
        (0..=n)
            .map(|i| lo + (hi - lo) * count::<R>(i) / count::<R>(n))
            .filter(|&z| self.coords.contains(z))
            .collect()
    }

    /// Checks on a grid that `eta(M)` lies in the domain, the Jacobian does
    /// not vanish inside `M`, and `eta` is injective.
    pub fn check_invariants(&self) -> Result<()> {
        let grid = self.probe_grid();
        let domain = self.family.domain();
        let mut images = Vec::with_capacity(grid.len());
        for &z in &grid {
            let theta = self.eta(z);
            if !domain.contains(&theta) {
                return Err(Error::InvalidModel(format!(
                    "eta({z}) = {:?} lies outside the domain",
                    to_f64s(&theta)
                )));
            }
            let interior = self.coords.interior().is_some_and(|i| i.contains(z));
            if interior && self.jacobian(z).iter().all(|v| *v == R::zero()) {
                return Err(Error::InvalidModel(format!("Jacobian vanishes at {z}")));
            }
            images.push(theta);
        }
        for i in 0..images.len() {
            for j in (i + 1)..images.len() {
                if images[i] == images[j] {
                    return Err(Error::InvalidModel(format!(
                        "eta is not injective: eta({}) = eta({})",
                        grid[i], grid[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Density of a prior with respect to Lebesgue measure on model
/// coordinates.
#[derive(Clone)]
pub enum PriorDensity<R> {
    Uniform,
    Custom(Arc<dyn Fn(R) -> R + Send + Sync>),
}

impl<R> std::fmt::Debug for PriorDensity<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PriorDensity::Uniform => f.write_str("Uniform"),
            PriorDensity::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// An atomless prior on the model coordinate.
#[derive(Clone, Debug)]
pub struct Prior<R: Real> {
    model: CurvedModel<R>,
    support: Vec<Interval<R>>,
    density: PriorDensity<R>,
    uniform_height: R,
}

impl<R: Real> Prior<R> {
    /// Uniform prior on the union of the closed `support` intervals.
    pub fn uniform(model: CurvedModel<R>, support: Vec<Interval<R>>) -> Result<Self> {
        let support = Self::normalize_support(&model, support)?;
        let total: R = support.iter().map(|iv| iv.length()).sum();
        if !(total > R::zero()) || !total.is_finite() {
            return Err(Error::InvalidPrior(
                "uniform prior needs bounded support of positive length".into(),
            ));
        }
        Ok(Self {
            model,
            support,
            density: PriorDensity::Uniform,
            uniform_height: R::one() / total,
        })
    }

    /// Prior with a user density; the density must integrate to one over the
    /// support to within `1e-9`.
    pub fn with_density(
        model: CurvedModel<R>,
        support: Vec<Interval<R>>,
        density: Arc<dyn Fn(R) -> R + Send + Sync>,
    ) -> Result<Self> {
        let support = Self::normalize_support(&model, support)?;
        let policy = QuadPolicy::default().with_rel_tol(1e-11);
        let mut total = R::zero();
        for iv in &support {
            let mut bad = false;
            let r = integrate(
                |z| {
                    let v = density(z);
                    if !(v >= R::zero()) {
                        bad = true;
                    }
                    v
                },
                iv.lo,
                iv.hi,
                &policy,
            )?;
            if bad {
                return Err(Error::InvalidPrior("density is negative or NaN".into()));
            }
            total += r.value;
        }
        if (total - R::one()).abs() > lit(1e-9) {
            return Err(Error::InvalidPrior(format!(
                "density integrates to {total}, not 1"
            )));
        }
        Ok(Self {
            model,
            support,
            density: PriorDensity::Custom(density),
            uniform_height: R::zero(),
        })
    }

    fn normalize_support(
        model: &CurvedModel<R>,
        support: Vec<Interval<R>>,
    ) -> Result<Vec<Interval<R>>> {
        if support.is_empty() {
            return Err(Error::InvalidPrior("empty support".into()));
        }
        let closure = model.coords().closure();
        let mut out = Vec::new();
        for iv in support {
            if !iv.is_bounded() {
                return Err(Error::InvalidPrior(format!("unbounded support piece {iv}")));
            }
            let c = iv.closure();
            if !(closure.contains(c.lo) && closure.contains(c.hi)) {
                return Err(Error::InvalidPrior(format!(
                    "support {c} is not inside the closure of M = {}",
                    model.coords()
                )));
            }
            if c.is_point() {
                return Err(Error::InvalidPrior("support piece has zero length".into()));
            }
            out.push(c);
        }
        let merged = ModelEvent::new(out);
        Ok(merged.intervals().to_vec())
    }

    pub fn from_descriptor(model: CurvedModel<R>, desc: &PriorDescriptor) -> Result<Self> {
        match desc.kind.as_str() {
            "uniform" => Prior::uniform(model, desc.support.to_intervals()?),
            other => Err(Error::InvalidPrior(format!("unknown prior kind `{other}`"))),
        }
    }

    pub fn model(&self) -> &CurvedModel<R> {
        &self.model
    }

    /// Topological support `S(nu)` as closed intervals.
    pub fn support(&self) -> &[Interval<R>] {
        &self.support
    }

    /// Support pieces intersected with `M`; the set over which the
    /// likelihood is maximized and the posterior integrated.
    pub fn effective_support(&self) -> Vec<Interval<R>> {
        self.support
            .iter()
            .filter_map(|iv| iv.intersect(self.model.coords()))
            .collect()
    }

    pub fn density(&self, z: R) -> R {
        if !self.support.iter().any(|iv| iv.contains(z)) {
            return R::zero();
        }
        match &self.density {
            PriorDensity::Uniform => self.uniform_height,
            PriorDensity::Custom(f) => f(z),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.density, PriorDensity::Uniform)
    }
}

/// JSON form of a prior: `{"kind":"uniform","support":[-3,3]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorDescriptor {
    pub kind: String,
    pub support: SupportDescriptor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SupportDescriptor {
    Single([Endpoint; 2]),
    Many(Vec<[Endpoint; 2]>),
}

impl SupportDescriptor {
    pub fn to_intervals<R: Real>(&self) -> Result<Vec<Interval<R>>> {
        let pairs: Vec<&[Endpoint; 2]> = match self {
            SupportDescriptor::Single(p) => vec![p],
            SupportDescriptor::Many(ps) => ps.iter().collect(),
        };
        pairs
            .into_iter()
            .map(|[a, b]| Interval::new(lit(a.value()?), lit(b.value()?), true, true))
            .collect()
    }
}

/// Posterior experiment descriptor:
/// `{"model":"hw-line","prior":{..},"mu0":[..],"event":{..},"schedule":[..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDescriptor {
    pub model: String,
    pub prior: PriorDescriptor,
    pub mu0: Vec<f64>,
    pub event: EventDescriptor,
    pub schedule: Vec<usize>,
}

/// Parsed form of an [`ExperimentDescriptor`].
#[derive(Clone, Debug)]
pub struct Experiment<R: Real> {
    pub prior: Prior<R>,
    pub mu0: Vec<R>,
    pub event: ModelEvent<R>,
    pub schedule: Vec<usize>,
}

impl ExperimentDescriptor {
    pub fn build<R: Real>(&self) -> Result<Experiment<R>> {
        let model = CurvedModel::builtin(&self.model)?;
        let prior = Prior::from_descriptor(model, &self.prior)?;
        let mu0: Vec<R> = self.mu0.iter().map(|&v| lit(v)).collect();
        prior.model().family().require_mean(&mu0)?;
        if self.schedule.is_empty() || self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "schedule must be nonempty and increasing".into(),
            ));
        }
        Ok(Experiment {
            prior,
            mu0,
            event: self.event.to_event()?,
            schedule: self.schedule.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_satisfy_invariants() {
        for name in BUILTIN_MODELS {
            CurvedModel::<f64>::builtin(name)
                .unwrap()
                .check_invariants()
                .unwrap();
        }
    }

    #[test]
    fn strip_closure_is_in_domain() {
        let m = CurvedModel::<f64>::builtin("strip-curve").unwrap();
        let closed = m.with_coords(Interval::closed(0.0, 1.0)).unwrap();
        assert_eq!(closed.eta(0.0), vec![0.0, 1.0]);
        assert!(m.with_coords(Interval::closed(-0.5, 1.0)).is_err());
    }

    #[test]
    fn gauss_curve_means_lie_on_twice_the_parabola() {
        let m = CurvedModel::<f64>::builtin("gauss-mean-eq-sd").unwrap();
        for z in [0.3, 1.0, 2.5] {
            let t = m.family().mean_map(&m.eta(z)).unwrap();
            assert!((t[1] - 2.0 * t[0] * t[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn score_matches_finite_difference() {
        let m = CurvedModel::<f64>::builtin("gauss-mean-eq-sd").unwrap();
        let t = [1.0, 3.0];
        let z = 0.7;
        let h = 1e-6;
        let fd = (m.log_likelihood(z + h, &t).unwrap() - m.log_likelihood(z - h, &t).unwrap())
            / (2.0 * h);
        assert!((fd - m.score(z, &t).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn uniform_prior_and_descriptor() {
        let d: ExperimentDescriptor = serde_json::from_str(
            r#"{"model":"hw-line","prior":{"kind":"uniform","support":[-3,3]},"mu0":[0.3,0.2],"event":{"intervals":[[0.5,"inf"]]},"schedule":[64,128,256,512,1024,2048,4096]}"#,
        )
        .unwrap();
        let e = d.build::<f64>().unwrap();
        assert!((e.prior.density(0.0) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(e.prior.density(3.5), 0.0);
        let back: ExperimentDescriptor =
            serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn custom_density_must_normalize() {
        let m = CurvedModel::<f64>::builtin("hw-line").unwrap();
        let ok = Prior::with_density(
            m.clone(),
            vec![Interval::closed(0.0, 1.0)],
            Arc::new(|z| 2.0 * z),
        );
        assert!(ok.is_ok());
        let bad = Prior::with_density(m, vec![Interval::closed(0.0, 1.0)], Arc::new(|z| z));
        assert!(matches!(bad, Err(Error::InvalidPrior(_))));
    }
}
