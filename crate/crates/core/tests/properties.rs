//! Property tests over random natural parameters, mean points and events.
//!
//! The runner is seeded from `EXPLDP_SEED` so failures replay exactly.

use expldp_core::models::{EventDescriptor, Interval};
use expldp_core::rates::{self, ContractionMethod, DualPair};
use expldp_core::verify::seed_from_env;
use expldp_core::{conjugate, Event, Family, Model, ModelPrior};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const CASES: u32 = 64;

fn runner() -> TestRunner {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&seed_from_env().to_le_bytes());
    TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
    )
}

/// Families with closed-form cumulants, paired with a strategy for interior
/// natural parameters.
fn family_and_theta() -> impl Strategy<Value = (&'static str, Vec<f64>)> {
    prop_oneof![
        (-2.0..2.0f64).prop_map(|a| ("poisson", vec![a])),
        (-2.0..2.0f64).prop_map(|a| ("gauss-mean", vec![a])),
        (0.2..4.0f64).prop_map(|a| ("landau-dual", vec![a])),
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| ("hardy-weinberg-saturated", vec![a, b])),
        (-2.0..2.0f64, -2.0..-0.25f64).prop_map(|(a, b)| ("gauss-parabola", vec![a, b])),
    ]
}

fn family(name: &str) -> Family {
    Family::builtin(name).unwrap()
}

fn mean(f: &Family, theta: &[f64]) -> Vec<f64> {
    f.mean_map(theta).unwrap().into_inner()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn fenchel_young_inequality_and_equality() {
    runner()
        .run(&family_and_theta(), |(name, a)| {
            let f = family(name);
            let t = mean(&f, &a);
            let c = conjugate(&f, &t).unwrap();
            let ka = f.cumulant(&a).unwrap();
            prop_assert!(
                close(ka + c.value, dot(&a, &t), 1e-8),
                "equality at the mean of {a:?}"
            );
            Ok(())
        })
        .unwrap();
    // Inequality against an unrelated parameter of the same family.
    runner()
        .run(&(family_and_theta(), any::<u64>()), |((name, a), salt)| {
            let f = family(name);
            let b: Vec<f64> = a
                .iter()
                .map(|x| x * 0.5 + ((salt % 7) as f64 - 3.0) * 0.05)
                .collect();
            prop_assume!(f.domain().is_interior(&b));
            let t = mean(&f, &b);
            let c = conjugate(&f, &t).unwrap();
            prop_assert!(f.cumulant(&a).unwrap() + c.value >= dot(&a, &t) - 1e-9);
            Ok(())
        })
        .unwrap();
}

#[test]
fn cumulant_is_convex() {
    let s = family_and_theta().prop_flat_map(|(name, a)| {
        let d = a.len();
        (
            Just(name),
            Just(a),
            proptest::collection::vec(-0.5..0.5f64, d),
            0.0..1.0f64,
        )
    });
    runner()
        .run(&s, |(name, a, step, lambda)| {
            let f = family(name);
            let b: Vec<f64> = a.iter().zip(&step).map(|(x, s)| x + s).collect();
            prop_assume!(f.domain().is_interior(&b));
            let mid: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                .collect();
            let lhs = f.cumulant(&mid).unwrap();
            let rhs = lambda * f.cumulant(&a).unwrap() + (1.0 - lambda) * f.cumulant(&b).unwrap();
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()));
            Ok(())
        })
        .unwrap();
}

#[test]
fn mean_map_matches_finite_differences() {
    runner()
        .run(&family_and_theta(), |(name, a)| {
            let f = family(name);
            let g = mean(&f, &a);
            let h = 1e-5;
            for i in 0..a.len() {
                let mut up = a.clone();
                let mut down = a.clone();
                up[i] += h;
                down[i] -= h;
                let fd = (f.cumulant(&up).unwrap() - f.cumulant(&down).unwrap()) / (2.0 * h);
                prop_assert!(
                    close(fd, g[i], 1e-6),
                    "{name} coordinate {i}: fd {fd}, mean {}",
                    g[i]
                );
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn conjugate_argmax_inverts_mean_map() {
    runner()
        .run(&family_and_theta(), |(name, a)| {
            let f = family(name);
            let c = conjugate(&f, &mean(&f, &a)).unwrap();
            let arg = c.argmax.expect("attained in the interior");
            for (x, y) in arg.iter().zip(&a) {
                prop_assert!((x - y).abs() < 1e-6, "{name}: {x} vs {y}");
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn divergence_is_nonnegative_and_vanishes_on_the_diagonal() {
    let s = family_and_theta()
        .prop_flat_map(|(name, a)| (Just(name), Just(a.clone()), family_theta_like(name)));
    runner()
        .run(&s, |(name, a, b)| {
            let f = family(name);
            prop_assert!(rates::kl_divergence(&f, &a, &b).unwrap() >= -1e-12);
            prop_assert!(rates::kl_divergence(&f, &a, &a).unwrap().abs() < 1e-12);
            Ok(())
        })
        .unwrap();
}

fn family_theta_like(name: &'static str) -> BoxedStrategy<Vec<f64>> {
    family_and_theta()
        .prop_filter("same family", move |(n, _)| *n == name)
        .prop_map(|(_, t)| t)
        .boxed()
}

#[test]
fn cramer_rate_is_the_reversed_divergence() {
    let s = family_and_theta()
        .prop_flat_map(|(name, a)| (Just(name), Just(a.clone()), family_theta_like(name)));
    runner()
        .run(&s, |(name, theta0, theta)| {
            let f = family(name);
            let iota = rates::cramer_rate(&f, &theta0, &mean(&f, &theta)).unwrap();
            let d = rates::kl_divergence(&f, &theta, &theta0).unwrap();
            prop_assert!(close(iota, d, 1e-8), "{name}: iota {iota}, D {d}");
            Ok(())
        })
        .unwrap();
}

#[test]
fn posterior_rate_is_an_excess_divergence() {
    let prior = ModelPrior::uniform(
        Model::builtin("hw-line").unwrap(),
        vec![Interval::closed(-3.0, 3.0)],
    )
    .unwrap();
    let s = (-1.5..1.5f64, -1.5..1.5f64, -3.0..3.0f64);
    runner()
        .run(&s, |(a, b, z)| {
            let f = prior.model().family();
            let theta0 = vec![a, b];
            let mu0 = mean(f, &theta0);
            let table = rates::posterior_rate(&prior, &mu0, &[z]).unwrap();
            let nu = table.theta_nu.clone().expect("interior MLE");
            let eta = prior.model().eta(z);
            let excess = rates::kl_divergence(f, &theta0, &eta).unwrap()
                - rates::kl_divergence(f, &theta0, &nu).unwrap();
            prop_assert!(table.rates[0] >= -1e-12);
            prop_assert!(
                (table.rates[0] - excess).abs() < 1e-9,
                "I {} vs excess {excess}",
                table.rates[0]
            );
            Ok(())
        })
        .unwrap();
}

#[test]
fn contraction_rate_is_dominated_by_the_divergence_on_the_curve() {
    let model = Model::builtin("gauss-mean-eq-sd").unwrap();
    let s = (-1.5..1.5f64, -2.0..-0.25f64, 0.3..2.5f64);
    runner()
        .run(&s, |(a, b, z)| {
            let f = model.family();
            let theta0 = vec![a, b];
            let eta = model.eta(z);
            let contraction =
                rates::contraction_rate(&model, &theta0, z, ContractionMethod::LineMinimize)
                    .unwrap();
            let on_curve = rates::kl_divergence(f, &eta, &theta0).unwrap();
            prop_assert!(contraction >= -1e-12);
            prop_assert!(
                contraction <= on_curve + 1e-9,
                "contraction {contraction} > {on_curve}"
            );
            Ok(())
        })
        .unwrap();
}

#[test]
fn affine_contraction_equals_the_divergence() {
    let model = Model::builtin("hw-line").unwrap();
    let s = (-1.5..1.5f64, -1.5..1.5f64, -3.0..3.0f64);
    runner()
        .run(&s, |(a, b, z)| {
            let theta0 = vec![a, b];
            let f = model.family();
            let c =
                rates::contraction_rate(&model, &theta0, z, ContractionMethod::Pythagoras).unwrap();
            let brute =
                rates::contraction_rate(&model, &theta0, z, ContractionMethod::LineMinimize)
                    .unwrap();
            let projected = rates::cramer_rate(f, &theta0, &mean(f, &model.eta(z))).unwrap();
            prop_assert!(c >= -1e-12 && c <= projected + 1e-9);
            prop_assert!(close(c, brute, 1e-9));
            Ok(())
        })
        .unwrap();
}

#[test]
fn dual_divergences_agree_in_both_directions() {
    let pair = DualPair::<f64>::poisson_landau().unwrap();
    let swapped = pair.swapped();
    runner()
        .run(
            &(-2.0..2.0f64, -2.0..2.0f64, 0.2..4.0f64, 0.2..4.0f64),
            |(a, b, m, n)| {
                prop_assert!(rates::dual_rate_gap(&pair, &[a], &[b]).unwrap() < 1e-10);
                prop_assert!(rates::dual_rate_gap(&swapped, &[m], &[n]).unwrap() < 1e-10);
                Ok(())
            },
        )
        .unwrap();
}

fn event() -> impl Strategy<Value = Event> {
    proptest::collection::vec(
        (-5.0..5.0f64, 0.0..3.0f64, any::<bool>(), any::<bool>()),
        0..4,
    )
    .prop_map(|pieces| {
        Event::new(
            pieces
                .into_iter()
                .filter_map(|(lo, len, lc, hc)| Interval::new(lo, lo + len, lc, hc).ok())
                .collect(),
        )
    })
}

#[test]
fn complement_partitions_the_line() {
    runner()
        .run(
            &(event(), proptest::collection::vec(-7.0..7.0f64, 16)),
            |(e, probes)| {
                let c = e.complement();
                let endpoints = e.intervals().iter().flat_map(|iv| [iv.lo, iv.hi]);
                for z in probes.into_iter().chain(endpoints) {
                    prop_assert!(e.contains(z) != c.contains(z), "z = {z} in {e:?} / {c:?}");
                }
                prop_assert_eq!(c.complement(), e);
                Ok(())
            },
        )
        .unwrap();
}

#[test]
fn closed_event_descriptor_round_trips() {
    runner()
        .run(&event(), |e| {
            let closed = e.closure();
            let json = serde_json::to_string(&closed.to_descriptor()).unwrap();
            let back: EventDescriptor = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back.to_event::<f64>().unwrap(), closed);
            Ok(())
        })
        .unwrap();
}
