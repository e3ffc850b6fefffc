//! Registered scenarios: descriptors for the four worked examples and the
//! pipelines that turn them into rate tables.

pub mod table;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::landau::{landau_dual_numeric_cumulant, landau_normalization, LandauPolicy};
use crate::family::GeneratingFamily;
use crate::legendre::ConstraintSet;
use crate::models::{
    decay_rate_estimate, limiting_mle, CurvedModel, EventDescriptor, Interval, ModelEvent, Prior,
    PriorDescriptor,
};
use crate::oracles::{curved_line_min_oracle, multinomial_decay, LineGrid};
use crate::rates::{
    contraction_detail, contraction_infimum, gauss_line_stationary_points, kl_divergence,
    posterior_rate, posterior_rate_infimum, pythagorean_residual, ContractionMethod, DualPair,
};

pub use table::{format_sig, Cell, Table};

/// Names accepted by [`Scenario::builtin`].
pub const SCENARIOS: [&str; 4] = [
    "hardy-weinberg",
    "gauss-mean-eq-sd",
    "strip-boundary",
    "poisson-landau",
];

/// Output encoding of [`run_scenario`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidInput(format!("unknown format `{other}`"))),
        }
    }
}

/// Everything a scenario pipeline reads. Serializes to JSON losslessly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub family: String,
    pub model: String,
    pub priors: Vec<PriorDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
    pub events: Vec<EventDescriptor>,
    pub schedules: Vec<Vec<usize>>,
    /// Model coordinates at which rates are tabulated.
    pub grid: Vec<f64>,
    pub outputs: Vec<String>,
}

fn support(lo: f64, hi: f64) -> PriorDescriptor {
    serde_json::from_value(serde_json::json!({"kind": "uniform", "support": [lo, hi]}))
        .expect("static prior descriptor")
}

fn half_line(lo: f64) -> EventDescriptor {
    ModelEvent::single(Interval::at_least(lo)).to_descriptor()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| (lo * (m - i as f64) + hi * i as f64) / m)
        .collect()
}

impl Scenario {
    pub fn builtin(name: &str) -> Result<Self> {
        let doubling: Vec<usize> = (0..7).map(|k| 64 << k).collect();
        let hundreds: Vec<usize> = (1..=16).map(|k| 100 * k).collect();
        let s = match name {
            "hardy-weinberg" => Scenario {
                name: name.into(),
                family: "hardy-weinberg-saturated".into(),
                model: "hw-line".into(),
                priors: vec![support(-3.0, 3.0), support(0.5, 3.0)],
                mu0: Some(vec![0.3, 0.2]),
                theta0: Some(vec![0.0, 0.0]),
                events: vec![half_line(0.5), half_line(1.0)],
                schedules: vec![doubling, hundreds],
                grid: linspace(-3.0, 3.0, 121),
                outputs: ["posterior_rate", "decay_rates", "pythagoras", "mle_oracle"]
                    .map(String::from)
                    .to_vec(),
            },
            "gauss-mean-eq-sd" => Scenario {
                name: name.into(),
                family: "gauss-parabola".into(),
                model: "gauss-mean-eq-sd".into(),
                priors: vec![support(0.05, 10.0)],
                mu0: Some(vec![1.0, 3.0]),
                theta0: Some(vec![1.0, -0.5]),
                events: vec![],
                schedules: vec![],
                grid: vec![0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0],
                outputs: ["contraction", "pythagoras"].map(String::from).to_vec(),
            },
            "strip-boundary" => Scenario {
                name: name.into(),
                family: "strip-measure".into(),
                model: "strip-curve".into(),
                priors: vec![support(0.0, 1.0)],
                mu0: None,
                theta0: Some(vec![0.5, (1.0f64 - 0.125).sqrt()]),
                events: vec![],
                schedules: vec![],
                grid: vec![0.5, 0.2, 0.1, 0.05, 0.02, 0.01],
                outputs: ["curve_cumulant", "continuity", "continuity_sequences"]
                    .map(String::from)
                    .to_vec(),
            },
            "poisson-landau" => Scenario {
                name: name.into(),
                family: "poisson".into(),
                model: "poisson-line".into(),
                priors: vec![],
                mu0: None,
                theta0: None,
                events: vec![],
                schedules: vec![],
                grid: linspace(-2.0, 2.0, 10),
                outputs: ["dual_gap", "landau_cumulant", "landau_normalization"]
                    .map(String::from)
                    .to_vec(),
            },
            other => return Err(Error::UnknownScenario(other.to_string())),
        };
        Ok(s)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Computes every output table.
    pub fn tables(&self) -> Result<Vec<Table>> {
        match self.name.as_str() {
            "hardy-weinberg" => hardy_weinberg(self),
            "gauss-mean-eq-sd" => gauss_mean_eq_sd(self),
            "strip-boundary" => strip_boundary(self),
            "poisson-landau" => poisson_landau(self),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }

    fn mu0(&self) -> Result<&[f64]> {
        self.mu0
            .as_deref()
            .ok_or_else(|| Error::InvalidInput(format!("scenario {} has no mu0", self.name)))
    }

    fn theta0(&self) -> Result<&[f64]> {
        self.theta0
            .as_deref()
            .ok_or_else(|| Error::InvalidInput(format!("scenario {} has no theta0", self.name)))
    }

    fn prior(&self, i: usize) -> Result<Prior<f64>> {
        let desc = self.priors.get(i).ok_or_else(|| {
            Error::InvalidInput(format!("scenario {} lacks prior {i}", self.name))
        })?;
        Prior::from_descriptor(CurvedModel::builtin(&self.model)?, desc)
    }

    fn event(&self, i: usize) -> Result<ModelEvent<f64>> {
        self.events
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("scenario {} lacks event {i}", self.name)))?
            .to_event()
    }

    fn schedule(&self, i: usize) -> Result<&[usize]> {
        self.schedules.get(i).map(Vec::as_slice).ok_or_else(|| {
            Error::InvalidInput(format!("scenario {} lacks schedule {i}", self.name))
        })
    }
}

/// Files written by [`run_scenario`].
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub tables: Vec<Table>,
}

/// Runs a registered scenario and writes one file per table into `dir`.
pub fn run_scenario(name: &str, dir: &Path, format: Format) -> Result<RunSummary> {
    let scenario = Scenario::builtin(name)?;
    run_descriptor(&scenario, dir, format)
}

pub fn run_descriptor(scenario: &Scenario, dir: &Path, format: Format) -> Result<RunSummary> {
    let tables = scenario.tables()?;
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(tables.len());
    for t in &tables {
        let path = dir.join(format!("{}.{}", t.name, format.extension()));
        let body = match format {
            Format::Csv => t.to_csv()?,
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&t.to_json())?;
                s.push('\n');
                s
            }
        };
        std::fs::write(&path, body)?;
        files.push(path);
    }
    Ok(RunSummary { files, tables })
}

fn interval_label(p: &PriorDescriptor) -> String {
    match p.support.to_intervals::<f64>() {
        Ok(ivs) => ivs
            .iter()
            .map(|iv| iv.to_string())
            .collect::<Vec<_>>()
            .join(" u "),
        Err(_) => "?".into(),
    }
}

fn hardy_weinberg(s: &Scenario) -> Result<Vec<Table>> {
    let mu0 = s.mu0()?;
    let prior = s.prior(0)?;
    let model = prior.model().clone();

    let rates = posterior_rate(&prior, mu0, &s.grid)?;
    let mut posterior = Table::new("posterior_rate", &["coordinate", "rate", "divergence_form"]);
    let div = rates.divergence_form.clone().unwrap_or_default();
    for (i, (&z, &r)) in rates.coordinates.iter().zip(&rates.rates).enumerate() {
        posterior.push(vec![
            z.into(),
            r.into(),
            div.get(i).copied().unwrap_or(f64::NAN).into(),
        ]);
    }
    posterior.meta_text("kind", rates.kind.as_str());
    if let Some(t) = &rates.theta_nu {
        posterior.meta_nums("theta_nu", t);
    }
    if let Some(t) = &rates.theta_0 {
        posterior.meta_nums("theta_0", t);
    }

    let mut decay = Table::new(
        "decay_rates",
        &["prior", "n", "rate", "extrapolated", "target"],
    );
    let schedule = s.schedule(0)?;
    for i in 0..s.priors.len().min(s.events.len()) {
        let p = s.prior(i)?;
        let event = s.event(i)?;
        let est = decay_rate_estimate(&p, |_| mu0.to_vec(), &event, schedule)?;
        let (_, target) = posterior_rate_infimum(&p, mu0, &event)?;
        let label = interval_label(&s.priors[i]);
        for (&n, &r) in est.schedule.iter().zip(&est.rates) {
            decay.push(vec![
                label.clone().into(),
                n.into(),
                r.into(),
                est.limit().into(),
                target.into(),
            ]);
        }
    }

    // theta_0 with grad kappa(theta_0) = mu0 in the saturated family
    let family = model.family();
    let theta_mu0 = [
        (mu0[0] / (1.0 - mu0[0] - mu0[1]) * 2.0).ln(),
        (mu0[1] / (1.0 - mu0[0] - mu0[1]) * 2.0).ln(),
    ];
    let set = ConstraintSet::from_affine_model(&model)?;
    let mut pyth = Table::new("pythagoras", &["coordinate", "residual"]);
    let mut worst: f64 = 0.0;
    for z in linspace(-2.45, 2.45, 50) {
        let r = pythagorean_residual(family, &set, &theta_mu0, &model.eta(z), mu0)?;
        worst = worst.max(r.abs());
        pyth.push(vec![z.into(), r.into()]);
    }
    pyth.meta_num("max_abs_residual", worst);

    let theta0 = s.theta0()?;
    let event = s.event(0)?;
    let oracle = multinomial_decay([theta0[0], theta0[1]], &event, s.schedule(1)?)?;
    let (_, inf) = contraction_infimum(&model, theta0, &event)?;
    let mut mle = Table::new(
        "mle_oracle",
        &["n", "exact_rate", "extrapolated", "contraction_infimum"],
    );
    for (&n, &r) in oracle.schedule.iter().zip(&oracle.rates) {
        mle.push(vec![n.into(), r.into(), oracle.limit().into(), inf.into()]);
    }
    Ok(vec![posterior, decay, pyth, mle])
}

fn gauss_mean_eq_sd(s: &Scenario) -> Result<Vec<Table>> {
    let model = CurvedModel::<f64>::builtin(&s.model)?;
    let theta0 = s.theta0()?;
    let a = theta0[0];
    let mut contraction = Table::new(
        "contraction",
        &[
            "coordinate",
            "contraction_rate",
            "divergence",
            "gap",
            "argmin_x",
            "oracle_rate",
            "oracle_x",
            "quadratic_root_x",
        ],
    );
    for &z in &s.grid {
        let c = contraction_detail(&model, theta0, z, ContractionMethod::LineMinimize)?;
        let d = kl_divergence(model.family(), &model.eta(z), theta0)?;
        let o = curved_line_min_oracle(a, z, LineGrid::default())?;
        let x = c.line_coordinate.unwrap_or(f64::NAN);
        let root = gauss_line_stationary_points(theta0, z)
            .into_iter()
            .min_by(|p, q| (p - x).abs().total_cmp(&(q - x).abs()))
            .unwrap_or(f64::NAN);
        contraction.push(vec![
            z.into(),
            c.value.into(),
            d.into(),
            (d - c.value).into(),
            x.into(),
            o.value.into(),
            o.x.into(),
            root.into(),
        ]);
    }
    contraction.meta_nums("theta_0", theta0);

    // curved analog of the Pythagorean decomposition
    let mu0 = s.mu0()?;
    let sv = mu0[1] - mu0[0] * mu0[0];
    let theta_mu0 = [mu0[0] / sv, -0.5 / sv];
    let prior = s.prior(0)?;
    let set = ConstraintSet::curve_on(model.clone(), &prior.effective_support())?;
    let mut pyth = Table::new("pythagoras", &["coordinate", "residual"]);
    let mut worst: f64 = 0.0;
    for z in linspace(0.1, 5.0, 50) {
        let r = pythagorean_residual(model.family(), &set, &theta_mu0, &model.eta(z), mu0)?;
        worst = worst.max(r.abs());
        pyth.push(vec![z.into(), r.into()]);
    }
    pyth.meta_num("max_abs_residual", worst);
    pyth.meta_nums("mu0", mu0);
    Ok(vec![contraction, pyth])
}

fn strip_boundary(s: &Scenario) -> Result<Vec<Table>> {
    let model = CurvedModel::<f64>::builtin(&s.model)?;
    let family = model.family();
    let mut curve = Table::new(
        "curve_cumulant",
        &["coordinate", "theta1", "theta2", "cumulant"],
    );
    for &z in &s.grid {
        let th = model.eta(z);
        curve.push(vec![
            z.into(),
            th[0].into(),
            th[1].into(),
            family.cumulant(&th)?.into(),
        ]);
    }
    let edge = model.eta(0.0);
    curve.push(vec![
        0.0.into(),
        edge[0].into(),
        edge[1].into(),
        family.cumulant(&edge)?.into(),
    ]);

    // mu0 is the mean at theta0 on the curve, so the likelihood peaks inside
    let mu0 = family.mean_map(s.theta0()?)?.into_inner();
    let desc = s
        .priors
        .first()
        .ok_or_else(|| Error::InvalidInput("strip prior".into()))?;
    let mut continuity = Table::new(
        "continuity",
        &[
            "model_coordinates",
            "theta_nu_coordinate",
            "boundary_flag",
            "condition_b",
            "condition_c",
        ],
    );
    let mut sequences = Table::new(
        "continuity_sequences",
        &[
            "model_coordinates",
            "sequence",
            "coordinate",
            "cumulant_deviation",
        ],
    );
    let variants = [
        model.clone(),
        model.with_coords(Interval::closed(0.0, 1.0))?,
    ];
    for m in variants {
        let label = m.coords().to_string();
        let prior = Prior::from_descriptor(m, desc)?;
        let lm = limiting_mle(&prior, &mu0)?;
        continuity.push(vec![
            label.clone().into(),
            lm.coordinate().unwrap_or(f64::NAN).into(),
            lm.boundary_flag.into(),
            lm.continuity.condition_b.into(),
            lm.continuity.condition_c.into(),
        ]);
        for c in &lm.continuity.candidates {
            for (k, seq) in c.sequences.iter().enumerate() {
                for (&z, &d) in seq.coordinates.iter().zip(&seq.deviations) {
                    sequences.push(vec![label.clone().into(), k.into(), z.into(), d.into()]);
                }
            }
        }
    }
    continuity.meta_nums("mu0", &mu0);
    Ok(vec![curve, continuity, sequences])
}

fn poisson_landau(s: &Scenario) -> Result<Vec<Table>> {
    let pair = DualPair::<f64>::poisson_landau()?;
    let mut gap = Table::new(
        "dual_gap",
        &[
            "theta0",
            "theta",
            "primal_divergence",
            "dual_divergence",
            "closed_form",
            "gap",
        ],
    );
    let mut worst: f64 = 0.0;
    for &t0 in &s.grid {
        for &t in &s.grid {
            let primal = kl_divergence(&pair.primal, &[t0], &[t])?;
            let (mu, mu0) = (t.exp(), t0.exp());
            let dual = kl_divergence(&pair.dual, &[mu], &[mu0])?;
            let closed = mu0 * (mu0 / mu).ln() + mu - mu0;
            let g = (primal - dual).abs();
            worst = worst.max(g);
            gap.push(vec![
                t0.into(),
                t.into(),
                primal.into(),
                dual.into(),
                closed.into(),
                g.into(),
            ]);
        }
    }
    gap.meta_num("max_gap", worst);

    let policy = LandauPolicy::default();
    let dual = GeneratingFamily::<f64>::builtin("landau-dual")?;
    let mut cumulant = Table::new(
        "landau_cumulant",
        &["mu", "numeric", "closed_form", "abs_error"],
    );
    for mu in [0.5, 1.0, 1.5, 2.0] {
        let numeric = landau_dual_numeric_cumulant(mu, &policy)?;
        let closed = dual.cumulant(&[mu])?;
        cumulant.push(vec![
            mu.into(),
            numeric.into(),
            closed.into(),
            (numeric - closed).abs().into(),
        ]);
    }
    let norm = landau_normalization(-60.0, &policy)?;
    let mut normalization = Table::new(
        "landau_normalization",
        &["lower", "upper", "body", "tail", "measured"],
    );
    normalization.push(vec![
        norm.lower.into(),
        norm.upper.into(),
        norm.body.into(),
        norm.tail.into(),
        norm.measured.into(),
    ]);
    Ok(vec![gap, cumulant, normalization])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        for name in SCENARIOS {
            let s = Scenario::builtin(name).unwrap();
            assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s, "{name}");
        }
    }

    #[test]
    fn descriptors_reference_builtins() {
        for name in SCENARIOS {
            let s = Scenario::builtin(name).unwrap();
            GeneratingFamily::<f64>::builtin(&s.family).unwrap();
            let m = CurvedModel::<f64>::builtin(&s.model).unwrap();
            assert_eq!(m.family().name(), s.family);
        }
    }

    #[test]
    fn unknown_scenario() {
        assert!(matches!(
            Scenario::builtin("nope"),
            Err(Error::UnknownScenario(_))
        ));
    }
}
