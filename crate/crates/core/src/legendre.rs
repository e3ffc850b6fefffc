//! Numerical convex conjugation.
//!
//! `kappa*(t) = sup_theta { theta . t - kappa(theta) }` is computed by damped
//! Newton ascent on the log-likelihood, over the whole space or an affine
//! slice of it. Constraint sets given by a curved model are searched by
//! multistart bracketing on the model coordinate.

use serde_json::json;

use crate::error::{to_f64s, Error, Result};
use crate::family::{FamilyKind, GeneratingFamily, MeanPoint, NaturalPoint};
use crate::models::{CurvedModel, Interval};
use crate::numeric::linalg::Matrix;
use crate::numeric::optimize::{brent_minimize, brent_root};
use crate::numeric::{count, dot, floor_tol, lit, norm, Real};

/// Stopping rules for the Newton solvers.
#[derive(Clone, Copy, Debug)]
pub struct NewtonPolicy<R> {
    /// Converged when the gradient norm of the objective is at most this.
    pub grad_tol: R,
    pub max_iter: usize,
}

impl<R: Real> NewtonPolicy<R> {
    /// Default rules for a family. Quadrature-backed families carry
    /// integration error of about `1e-9` relative in the gradient, so their
    /// gradient tolerance is looser.
    pub fn for_family(family: &GeneratingFamily<R>) -> Self {
        let tol = match family.kind() {
            FamilyKind::Quadrature1D { .. } => floor_tol(1e-7),
            _ => floor_tol(1e-10),
        };
        Self {
            grad_tol: tol,
            max_iter: 200,
        }
    }
}

/// Outcome of a (constrained) conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct LegendreResult<R> {
    pub t: MeanPoint<R>,
    /// `kappa*(t)` or `kappa*_B(t)`; the supremum when it is not attained.
    pub value: R,
    /// Maximizer; `None` when the supremum is not attained in the set.
    pub argmax: Option<NaturalPoint<R>>,
    /// Model coordinate of the maximizer for curve constraints.
    pub coordinate: Option<R>,
    pub converged: bool,
    pub iterations: usize,
    /// Set when another local maximizer reaches the same value.
    pub multiplicity_flag: bool,
}

impl<R: Real> LegendreResult<R> {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "value": self.value.to_f64(),
            "argmax": self.argmax.as_ref().map(|a| a.to_f64()),
            "converged": self.converged,
            "iterations": self.iterations,
            "multiplicity_flag": self.multiplicity_flag,
        })
    }

    /// The maximizer, or an error naming the unattained supremum.
    pub fn require_argmax(&self) -> Result<&NaturalPoint<R>> {
        self.argmax.as_ref().ok_or(Error::NoConvergence {
            iterations: self.iterations,
            gradient_norm: f64::NAN,
        })
    }
}

/// Set `B` over which the likelihood is maximized.
#[derive(Clone, Debug)]
pub enum ConstraintSet<R: Real> {
    Full,
    /// `{base + sum_i s_i v_i}` intersected with the domain.
    Affine {
        base: Vec<R>,
        directions: Vec<Vec<R>>,
    },
    /// `eta(z)` for `z` in the union of `pieces` (each inside `M`).
    Curve {
        model: Box<CurvedModel<R>>,
        pieces: Vec<Interval<R>>,
    },
}

impl<R: Real> ConstraintSet<R> {
    pub fn affine(base: Vec<R>, directions: Vec<Vec<R>>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidConstraint("no directions".into()));
        }
        if directions.iter().any(|v| v.len() != base.len()) {
            return Err(Error::InvalidConstraint(
                "direction dimension mismatch".into(),
            ));
        }
        let m = Matrix::from_rows(&directions);
        if m.rank(lit(1e-12)) != directions.len() {
            return Err(Error::InvalidConstraint(
                "directions are linearly dependent".into(),
            ));
        }
        Ok(ConstraintSet::Affine { base, directions })
    }

    /// The whole curve `eta(M)`.
    pub fn curve(model: CurvedModel<R>) -> Self {
        let pieces = vec![*model.coords()];
        ConstraintSet::Curve {
            model: Box::new(model),
            pieces,
        }
    }

    /// `eta(M cap pieces)`.
    pub fn curve_on(model: CurvedModel<R>, pieces: &[Interval<R>]) -> Result<Self> {
        let m = *model.coords();
        let pieces: Vec<_> = pieces.iter().filter_map(|p| p.intersect(&m)).collect();
        if pieces.is_empty() {
            return Err(Error::InvalidConstraint("curve pieces miss M".into()));
        }
        Ok(ConstraintSet::Curve {
            model: Box::new(model),
            pieces,
        })
    }

    /// Affine span of an affine model.
    pub fn from_affine_model(model: &CurvedModel<R>) -> Result<Self> {
        let (base, dir) = model
            .affine_parts()
            .ok_or_else(|| Error::InvalidConstraint(format!("{} is not affine", model.name())))?;
        Self::affine(base, vec![dir])
    }
}

fn point_from<R: Real>(base: &[R], dirs: &[Vec<R>], s: &[R]) -> Vec<R> {
    let mut out = base.to_vec();
    for (v, &si) in dirs.iter().zip(s) {
        for (o, &vi) in out.iter_mut().zip(v) {
            *o += si * vi;
        }
    }
    out
}

struct NewtonOutcome<R> {
    theta: Vec<R>,
    value: R,
    iterations: usize,
}

/// Damped Newton ascent of `s -> l(base + D s; t)`.
fn newton_affine<R: Real>(
    family: &GeneratingFamily<R>,
    base: &[R],
    dirs: &[Vec<R>],
    start: Vec<R>,
    t: &[R],
    policy: &NewtonPolicy<R>,
) -> Result<NewtonOutcome<R>> {
    let k = dirs.len();
    let objective = |s: &[R]| -> Result<R> { family.log_likelihood(&point_from(base, dirs, s), t) };
    let reduced_gradient = |theta: &[R]| -> Result<Vec<R>> {
        let m = family.mean_map(theta)?;
        let g: Vec<R> = t.iter().zip(m.iter()).map(|(&a, &b)| a - b).collect();
        Ok(dirs.iter().map(|v| dot(v, &g)).collect())
    };
    let mut s = start;
    let mut theta = point_from(base, dirs, &s);
    let mut f = objective(&s)?;
    if !f.is_finite() {
        return Err(Error::OutsideDomain {
            point: to_f64s(&theta),
        });
    }
    let mut g = reduced_gradient(&theta)?;
    let mut gnorm = norm(&g);
    let mut polishing = false;
    for it in 0..policy.max_iter {
        if gnorm <= policy.grad_tol {
            if polishing {
                return Ok(NewtonOutcome {
                    theta,
                    value: f,
                    iterations: it,
                });
            }
            // one more full step brings the quadratic phase to rounding level
            polishing = true;
        }
        let h = family.hessian(&theta)?;
        let mut hr = Matrix::zeros(k, k);
        for i in 0..k {
            let hv = h.mul_vec(&dirs[i]);
            for j in 0..k {
                hr[(j, i)] = dot(&dirs[j], &hv);
            }
        }
        let step = hr.solve_spd(&g).unwrap_or_else(|| g.clone());
        let mut alpha = R::one();
        let mut accepted = None;
        // the polishing gain is below the objective's rounding, so a line
        // search would only accept noise
        for _ in 0..if polishing { 0 } else { 60 } {
            let cand: Vec<R> = s.iter().zip(&step).map(|(&a, &d)| a + alpha * d).collect();
            let fc = objective(&cand)?;
            let interior = family.domain().is_interior(&point_from(base, dirs, &cand));
            if interior && fc.is_finite() && fc > f {
                accepted = Some((cand, fc));
                break;
            }
            alpha *= lit(0.5);
        }
        if accepted.is_none() {
            // objective flat to rounding: take the full step if it reduces
            // the gradient
            let cand: Vec<R> = s.iter().zip(&step).map(|(&a, &d)| a + d).collect();
            let fc = objective(&cand)?;
            let slack = lit::<R>(64.0) * R::epsilon() * (R::one() + f.abs());
            let interior = family.domain().is_interior(&point_from(base, dirs, &cand));
            if interior && fc.is_finite() && fc >= f - slack {
                let th = point_from(base, dirs, &cand);
                let gc = reduced_gradient(&th)?;
                if norm(&gc) < gnorm {
                    accepted = Some((cand, fc));
                }
            }
        }
        let Some((cand, fc)) = accepted else {
            if polishing {
                return Ok(NewtonOutcome {
                    theta,
                    value: f,
                    iterations: it,
                });
            }
            return Err(Error::NoConvergence {
                iterations: it,
                gradient_norm: gnorm.to_f64().unwrap_or(f64::NAN),
            });
        };
        s = cand;
        f = fc;
        theta = point_from(base, dirs, &s);
        g = reduced_gradient(&theta)?;
        gnorm = norm(&g);
    }
    if gnorm <= policy.grad_tol {
        return Ok(NewtonOutcome {
            theta,
            value: f,
            iterations: policy.max_iter,
        });
    }
    Err(Error::NoConvergence {
        iterations: policy.max_iter,
        gradient_norm: gnorm.to_f64().unwrap_or(f64::NAN),
    })
}

/// `kappa*(t)` and `grad kappa*(t)`.
pub fn conjugate<R: Real>(family: &GeneratingFamily<R>, t: &[R]) -> Result<LegendreResult<R>> {
    conjugate_with(family, t, &NewtonPolicy::for_family(family))
}

pub fn conjugate_with<R: Real>(
    family: &GeneratingFamily<R>,
    t: &[R],
    policy: &NewtonPolicy<R>,
) -> Result<LegendreResult<R>> {
    family.require_mean(t)?;
    let d = family.dim();
    let dirs: Vec<Vec<R>> = (0..d)
        .map(|i| {
            let mut e = vec![R::zero(); d];
            e[i] = R::one();
            e
        })
        .collect();
    let zero = vec![R::zero(); d];
    let out = newton_affine(family, &zero, &dirs, family.reference_point(), t, policy)?;
    Ok(LegendreResult {
        t: MeanPoint::new(t.to_vec()),
        value: out.value,
        argmax: Some(NaturalPoint::new(out.theta)),
        coordinate: None,
        converged: true,
        iterations: out.iterations,
        multiplicity_flag: false,
    })
}

/// `kappa*_B(t) = sup_{theta in B} l(theta; t)`.
pub fn conjugate_constrained<R: Real>(
    family: &GeneratingFamily<R>,
    set: &ConstraintSet<R>,
    t: &[R],
) -> Result<LegendreResult<R>> {
    family.require_mean(t)?;
    match set {
        ConstraintSet::Full => conjugate(family, t),
        ConstraintSet::Affine { base, directions } => conjugate_affine(
            family,
            base,
            directions,
            t,
            &NewtonPolicy::for_family(family),
        ),
        ConstraintSet::Curve { model, pieces } => {
            if model.family().name() != family.name() {
                return Err(Error::InvalidConstraint(format!(
                    "curve {} belongs to family {}, not {}",
                    model.name(),
                    model.family().name(),
                    family.name()
                )));
            }
            maximize_on_curve(model, pieces, t)
        }
    }
}

fn conjugate_affine<R: Real>(
    family: &GeneratingFamily<R>,
    base: &[R],
    dirs: &[Vec<R>],
    t: &[R],
    policy: &NewtonPolicy<R>,
) -> Result<LegendreResult<R>> {
    let k = dirs.len();
    let mut start = vec![R::zero(); k];
    if !family.domain().is_interior(base) {
        // least-squares projection of the reference point onto the slice
        let r = family.reference_point();
        let diff: Vec<R> = r.iter().zip(base).map(|(&a, &b)| a - b).collect();
        let mut gram = Matrix::zeros(k, k);
        let mut rhs = vec![R::zero(); k];
        for i in 0..k {
            rhs[i] = dot(&dirs[i], &diff);
            for j in 0..k {
                gram[(i, j)] = dot(&dirs[i], &dirs[j]);
            }
        }
        start = gram
            .solve_spd(&rhs)
            .ok_or_else(|| Error::InvalidConstraint("degenerate directions".into()))?;
        if !family.domain().is_interior(&point_from(base, dirs, &start)) {
            return Err(Error::InvalidConstraint(
                "no interior starting point on the affine set".into(),
            ));
        }
    }
    let out = newton_affine(family, base, dirs, start, t, policy)?;
    Ok(LegendreResult {
        t: MeanPoint::new(t.to_vec()),
        value: out.value,
        argmax: Some(NaturalPoint::new(out.theta)),
        coordinate: None,
        converged: true,
        iterations: out.iterations,
        multiplicity_flag: false,
    })
}

#[derive(Clone, Copy, Debug)]
struct Candidate<R> {
    z: R,
    value: R,
    attained: bool,
    /// Closed endpoint, or interior point with a bracketed score root.
    certified: bool,
}

const MULTISTARTS: usize = 16;

fn maximize_on_curve<R: Real>(
    model: &CurvedModel<R>,
    pieces: &[Interval<R>],
    t: &[R],
) -> Result<LegendreResult<R>> {
    let mut evals = 0usize;
    let mut candidates: Vec<Candidate<R>> = Vec::new();
    for piece in pieces {
        search_piece(model, piece, t, &mut evals, &mut candidates)?;
    }
    if candidates.is_empty() {
        return Err(Error::InvalidConstraint("empty curve constraint".into()));
    }
    // total order on (value desc, coordinate asc)
    candidates.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.z.partial_cmp(&b.z).unwrap_or(std::cmp::Ordering::Equal))
    });
    let top = candidates[0].value;
    let vtol = lit::<R>(1e-9) * (R::one() + top.abs());
    let mut tied: Vec<Candidate<R>> = candidates
        .iter()
        .copied()
        .filter(|c| top - c.value <= vtol)
        .collect();
    tied.sort_by(|a, b| a.z.partial_cmp(&b.z).unwrap());
    let first = tied[0];
    let ztol = |z: R| lit::<R>(1e-6) * (R::one() + z.abs());
    let multiplicity = tied.iter().any(|c| (c.z - first.z).abs() > ztol(first.z));
    let best = tied
        .iter()
        .copied()
        .filter(|c| (c.z - first.z).abs() <= ztol(first.z))
        .max_by(|a, b| a.value.partial_cmp(&b.value).unwrap())
        .unwrap();
    let value = best.value;
    if !best.attained {
        return Ok(LegendreResult {
            t: MeanPoint::new(t.to_vec()),
            value,
            argmax: None,
            coordinate: None,
            converged: false,
            iterations: evals,
            multiplicity_flag: multiplicity,
        });
    }
    Ok(LegendreResult {
        t: MeanPoint::new(t.to_vec()),
        value,
        argmax: Some(NaturalPoint::new(model.eta(best.z))),
        coordinate: Some(best.z),
        converged: best.certified,
        iterations: evals,
        multiplicity_flag: multiplicity,
    })
}

fn search_piece<R: Real>(
    model: &CurvedModel<R>,
    piece: &Interval<R>,
    t: &[R],
    evals: &mut usize,
    out: &mut Vec<Candidate<R>>,
) -> Result<()> {
    let f = |z: R| -> Result<R> { model.log_likelihood(z, t) };
    // closed finite endpoints are candidates with exact values, which also
    // covers maximizers on the boundary of the domain
    for (end, closed) in [(piece.lo, piece.lo_closed), (piece.hi, piece.hi_closed)] {
        if closed {
            let v = f(end)?;
            *evals += 1;
            if v > R::neg_infinity() {
                out.push(Candidate {
                    z: end,
                    value: v,
                    attained: true,
                    certified: true,
                });
            }
        }
    }
    if piece.is_point() {
        return Ok(());
    }

    // probe window, expanded geometrically along infinite sides
    let (mut a, mut b) = match (piece.lo.is_finite(), piece.hi.is_finite()) {
        (true, true) => (piece.lo, piece.hi),
        (true, false) => (piece.lo, piece.lo + R::one()),
        (false, true) => (piece.hi - R::one(), piece.hi),
        (false, false) => (-R::one(), R::one()),
    };
    let (zs, fs) = loop {
        let zs: Vec<R> = (0..MULTISTARTS)
            .map(|i| piece.nudge_inside(a + (b - a) * count::<R>(i) / count::<R>(MULTISTARTS - 1)))
            .collect();
        let fs = zs.iter().map(|&z| f(z)).collect::<Result<Vec<R>>>()?;
        *evals += zs.len();
        let imax = argmax_first(&fs);
        let at_open_hi = imax == MULTISTARTS - 1 && !piece.hi.is_finite();
        let at_open_lo = imax == 0 && !piece.lo.is_finite();
        if !(at_open_hi || at_open_lo) || (b - a) > lit(1e12) {
            if at_open_hi || at_open_lo {
                // still increasing at the edge of a huge window
                let z = if at_open_hi { zs[imax] } else { zs[0] };
                out.push(Candidate {
                    z,
                    value: fs[imax],
                    attained: false,
                    certified: false,
                });
                return Ok(());
            }
            break (zs, fs);
        }
        let w = b - a;
        if at_open_hi {
            b += w;
        }
        if at_open_lo {
            a -= w;
        }
    };

    let n = zs.len();
    let scale = (b - a).abs().max(R::one());
    for i in 0..n {
        let left_ok = i == 0 || fs[i] >= fs[i - 1];
        let right_ok = i == n - 1 || fs[i] >= fs[i + 1];
        if !(left_ok && right_ok) || fs[i] == R::neg_infinity() {
            continue;
        }
        let lo = if i == 0 { zs[0] } else { zs[i - 1] };
        let hi = if i == n - 1 { zs[n - 1] } else { zs[i + 1] };
        let mut inner_err = None;
        let m = brent_minimize(
            |z| match model.log_likelihood(z, t) {
                Ok(v) => -v,
                Err(e) => {
                    inner_err.get_or_insert(e);
                    R::infinity()
                }
            },
            lo,
            hi,
            lit::<R>(1e-12) * scale,
            300,
        );
        if let Some(e) = inner_err {
            return Err(e);
        }
        *evals += m.iterations;
        let mut z = m.x;
        let mut v = -m.value;
        let near = |e: R| (z - e).abs() <= lit::<R>(1e-8) * scale;
        let touches_lo = i == 0 && near(zs[0]);
        let touches_hi = i == n - 1 && near(zs[n - 1]);
        if touches_lo || touches_hi {
            let open_side = (touches_lo && !piece.lo_closed) || (touches_hi && !piece.hi_closed);
            if open_side {
                out.push(Candidate {
                    z,
                    value: v,
                    attained: false,
                    certified: false,
                });
            }
            // closed ends are already candidates
            continue;
        }
        let mut certified = false;
        if let Some(zp) = polish_stationary(model, z, lo, hi, t, evals) {
            let vp = f(zp)?;
            *evals += 1;
            // near the maximum the objective is flat to rounding
            if vp >= v - lit::<R>(64.0) * R::epsilon() * (R::one() + v.abs()) {
                z = zp;
                v = vp;
                certified = true;
            }
        }
        out.push(Candidate {
            z,
            value: v,
            attained: true,
            certified,
        });
    }
    Ok(())
}

fn argmax_first<R: Real>(fs: &[R]) -> usize {
    let mut best = 0;
    for (i, &v) in fs.iter().enumerate() {
        if v > fs[best] {
            best = i;
        }
    }
    best
}

/// Root of the score near `z`, bracketed inside `[lo, hi]`.
fn polish_stationary<R: Real>(
    model: &CurvedModel<R>,
    z: R,
    lo: R,
    hi: R,
    t: &[R],
    evals: &mut usize,
) -> Option<R> {
    let score = |x: R| model.score(x, t).ok();
    let mut delta = lit::<R>(1e-7) * (R::one() + z.abs());
    for _ in 0..40 {
        let a = (z - delta).max(lo);
        let b = (z + delta).min(hi);
        let (sa, sb) = (score(a)?, score(b)?);
        *evals += 2;
        if sa == R::zero() {
            return Some(a);
        }
        if sb == R::zero() {
            return Some(b);
        }
        if sa > R::zero() && sb < R::zero() {
            let mut failed = false;
            let r = brent_root(
                |x| match model.score(x, t) {
                    Ok(v) => v,
                    Err(_) => {
                        failed = true;
                        R::zero()
                    }
                },
                a,
                b,
                R::epsilon() * lit(4.0) * (R::one() + z.abs()),
                200,
            );
            return if failed { None } else { r };
        }
        if a == lo && b == hi {
            return None;
        }
        delta *= lit(4.0);
    }
    None
}

/// Rectangular grid in the coordinates of a constraint set: `theta` for
/// the full set, affine coordinates `s`, or the model coordinate `z`.
#[derive(Clone, Debug)]
pub struct GridSpec<R> {
    pub lo: Vec<R>,
    pub hi: Vec<R>,
    /// Final grid step.
    pub step: R,
}

impl<R: Real> GridSpec<R> {
    pub fn new(lo: Vec<R>, hi: Vec<R>, step: R) -> Self {
        Self { lo, hi, step }
    }

    pub fn single(point: Vec<R>) -> Self {
        Self {
            lo: point.clone(),
            hi: point,
            step: R::one(),
        }
    }
}

/// Exhaustive maximization of `l(.; t)` over a grid on `B`.
///
/// Grids with more than about four million points are scanned at a coarser
/// step first, then refined in boxes of two coarse steps around the best
/// point until the requested step is reached. Returns the best value and
/// the natural parameter attaining it.
pub fn conjugate_grid_oracle<R: Real>(
    family: &GeneratingFamily<R>,
    set: &ConstraintSet<R>,
    t: &[R],
    grid: &GridSpec<R>,
) -> (R, Vec<R>) {
    let to_theta = |c: &[R]| -> Vec<R> {
        match set {
            ConstraintSet::Full => c.to_vec(),
            ConstraintSet::Affine { base, directions } => point_from(base, directions, c),
            ConstraintSet::Curve { model, .. } => model.eta(c[0]),
        }
    };
    let admissible = |c: &[R]| -> bool {
        match set {
            ConstraintSet::Curve { pieces, .. } => pieces.iter().any(|p| p.contains(c[0])),
            _ => true,
        }
    };
    let objective = |c: &[R]| -> R {
        if !admissible(c) {
            return R::neg_infinity();
        }
        family
            .log_likelihood(&to_theta(c), t)
            .unwrap_or(R::neg_infinity())
    };
    let k = grid.lo.len();
    let budget = 4_000_000f64;
    let per_dim = budget.powf(1.0 / k as f64).floor().max(2.0);
    let mut lo = grid.lo.clone();
    let mut hi = grid.hi.clone();
    let mut best: Option<(R, Vec<R>)> = None;
    loop {
        let widest = lo
            .iter()
            .zip(&hi)
            .map(|(&a, &b)| (b - a).to_f64().unwrap())
            .fold(0.0, f64::max);
        let fine = widest / grid.step.to_f64().unwrap() <= per_dim;
        let step = if fine {
            grid.step
        } else {
            lit(widest / (per_dim / 2.0).floor())
        };
        let (v, arg) = scan(&lo, &hi, step, &objective);
        let improved = match &best {
            Some((bv, _)) => v > *bv,
            None => true,
        };
        if improved {
            best = Some((v, arg.clone()));
        }
        if fine {
            break;
        }
        let centre = best.as_ref().unwrap().1.clone();
        for i in 0..k {
            lo[i] = (centre[i] - step * lit(2.0)).max(grid.lo[i]);
            hi[i] = (centre[i] + step * lit(2.0)).min(grid.hi[i]);
        }
    }
    let (v, c) = best.unwrap();
    (v, to_theta(&c))
}

fn scan<R: Real, F: Fn(&[R]) -> R>(lo: &[R], hi: &[R], step: R, f: &F) -> (R, Vec<R>) {
    let k = lo.len();
    let counts: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| ((b - a) / step).floor().to_usize().unwrap_or(0) + 1)
        .collect();
    let mut idx = vec![0usize; k];
    let mut point = lo.to_vec();
    let mut best_v = R::neg_infinity();
    let mut best_x = lo.to_vec();
    loop {
        for i in 0..k {
            point[i] = lo[i] + step * count::<R>(idx[i]);
        }
        let v = f(&point);
        if v > best_v {
            best_v = v;
            best_x.clone_from(&point);
        }
        let mut d = 0;
        loop {
            if d == k {
                return (best_v, best_x);
            }
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}
