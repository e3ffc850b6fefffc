//! Finitely supported generating measures.

use crate::error::{Error, Result};
use crate::numeric::linalg::Matrix;
use crate::numeric::{dot, lit, log_sum_exp_weighted, Real};

use super::domain::{HalfSpace, Region};

/// Enumeration budget for hull facets (number of candidate atom subsets).
const FACET_BUDGET: u128 = 500_000;

/// Weighted atoms `sum_i w_i delta_{x_i}` in `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<R> {
    points: Vec<Vec<R>>,
    log_weights: Vec<R>,
    weights: Vec<R>,
}

impl<R: Real> DiscreteMeasure<R> {
    /// Builds the measure, merging repeated atoms. Rejects non-positive
    /// weights and atom sets that do not affinely span `R^d`.
    pub fn new(atoms: Vec<(Vec<R>, R)>) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|(x, _)| x.len())
            .ok_or_else(|| Error::InvalidFamily("no atoms".into()))?;
        if dim == 0 || dim > 8 {
            return Err(Error::InvalidFamily(format!(
                "dimension {dim} outside supported range 1..=8"
            )));
        }
        let mut points: Vec<Vec<R>> = Vec::new();
        let mut weights: Vec<R> = Vec::new();
        for (x, w) in atoms {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.len(),
                });
            }
            if x.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidFamily(
                    "atom with non-finite coordinate".into(),
                ));
            }
            if !(w > R::zero()) || !w.is_finite() {
                return Err(Error::InvalidFamily(format!(
                    "atom weight must be strictly positive, got {w}"
                )));
            }
            match points.iter().position(|p| *p == x) {
                Some(i) => weights[i] += w,
                None => {
                    points.push(x);
                    weights.push(w);
                }
            }
        }
        let measure = Self {
            log_weights: weights.iter().map(|w| w.ln()).collect(),
            points,
            weights,
        };
        if measure.affine_rank() != dim {
            return Err(Error::InvalidFamily(
                "atoms are concentrated on a proper affine subspace".into(),
            ));
        }
        Ok(measure)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<R>] {
        &self.points
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    /// Rank of the centered atom matrix.
    pub fn affine_rank(&self) -> usize {
        let base = &self.points[0];
        let rows: Vec<Vec<R>> = self.points[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(&a, &b)| a - b).collect())
            .collect();
        if rows.is_empty() {
            return 0;
        }
        Matrix::from_rows(&rows).rank(lit(1e-10))
    }

    fn exponents(&self, theta: &[R]) -> Vec<R> {
        self.points.iter().map(|x| dot(theta, x)).collect()
    }

    pub fn cumulant(&self, theta: &[R]) -> R {
        log_sum_exp_weighted(&self.exponents(theta), &self.log_weights)
    }

    /// Tilted probabilities `P_theta({x_i})`.
    pub fn probabilities(&self, theta: &[R]) -> Vec<R> {
        let e = self.exponents(theta);
        let k = log_sum_exp_weighted(&e, &self.log_weights);
        e.iter()
            .zip(&self.log_weights)
            .map(|(&ei, &lw)| (ei + lw - k).exp())
            .collect()
    }

    pub fn mean(&self, theta: &[R]) -> Vec<R> {
        let p = self.probabilities(theta);
        let mut m = vec![R::zero(); self.dim()];
        for (pi, x) in p.iter().zip(&self.points) {
            for (mj, &xj) in m.iter_mut().zip(x) {
                *mj += *pi * xj;
            }
        }
        m
    }

    pub fn covariance(&self, theta: &[R]) -> Matrix<R> {
        let p = self.probabilities(theta);
        let m = self.mean(theta);
        let d = self.dim();
        let mut h = Matrix::zeros(d, d);
        for (pi, x) in p.iter().zip(&self.points) {
            for i in 0..d {
                let ci = x[i] - m[i];
                for j in 0..=i {
                    h[(i, j)] += *pi * ci * (x[j] - m[j]);
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                h[(j, i)] = h[(i, j)];
            }
        }
        h
    }

    /// Open half-space description of the interior of the convex hull.
    pub fn hull_interior(&self) -> Result<Region<R>> {
        let d = self.dim();
        let n = self.points.len();
        if binomial(n, d) > FACET_BUDGET {
            return Err(Error::InvalidFamily(format!(
                "{n} atoms in dimension {d} exceed the facet enumeration budget"
            )));
        }
        let tol = lit::<R>(1e-10);
        let mut facets: Vec<HalfSpace<R>> = Vec::new();
        let mut subset: Vec<usize> = (0..d).collect();
        loop {
            if let Some(normal) = self.facet_normal(&subset) {
                let x0 = &self.points[subset[0]];
                let b = dot(&normal, x0);
                let scale = normal.iter().fold(R::zero(), |m, v| m.max(v.abs()));
                let sides: Vec<R> = self.points.iter().map(|x| dot(&normal, x) - b).collect();
                let all_le = sides.iter().all(|&s| s <= tol * scale);
                let all_ge = sides.iter().all(|&s| s >= -tol * scale);
                let candidate = match (all_le, all_ge) {
                    (true, false) => Some(HalfSpace::new(normal, b)),
                    (false, true) => Some(HalfSpace::new(normal.iter().map(|&v| -v).collect(), -b)),
                    _ => None,
                };
                if let Some(h) = candidate {
                    let dup = facets.iter().any(|f| same_halfspace(f, &h));
                    if !dup {
                        facets.push(h);
                    }
                }
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
        Ok(Region::HalfSpaces(facets))
    }

    fn facet_normal(&self, subset: &[usize]) -> Option<Vec<R>> {
        let d = self.dim();
        if d == 1 {
            return Some(vec![R::one()]);
        }
        let x0 = &self.points[subset[0]];
        let rows: Vec<Vec<R>> = subset[1..]
            .iter()
            .map(|&i| {
                self.points[i]
                    .iter()
                    .zip(x0)
                    .map(|(&a, &b)| a - b)
                    .collect()
            })
            .collect();
        null_vector(&rows, d)
    }
}

fn same_halfspace<R: Real>(a: &HalfSpace<R>, b: &HalfSpace<R>) -> bool {
    let na = a.normal.iter().fold(R::zero(), |m, v| m.max(v.abs()));
    let nb = b.normal.iter().fold(R::zero(), |m, v| m.max(v.abs()));
    let tol = lit::<R>(1e-9);
    a.normal
        .iter()
        .zip(&b.normal)
        .all(|(&u, &v)| (u / na - v / nb).abs() <= tol)
        && (a.offset / na - b.offset / nb).abs() <= tol
}

/// Unit null vector of a `(d-1) x d` matrix of full row rank.
fn null_vector<R: Real>(rows: &[Vec<R>], d: usize) -> Option<Vec<R>> {
    let mut a = rows.to_vec();
    let m = a.len();
    let scale = a.iter().flatten().fold(R::zero(), |s, v| s.max(v.abs()));
    if scale == R::zero() {
        return None;
    }
    let thresh = scale * lit(1e-10);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..d {
        if r == m {
            break;
        }
        let p = (r..m).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c].abs() <= thresh {
            continue;
        }
        a.swap(r, p);
        let pv = a[r][c];
        for v in a[r].iter_mut() {
            *v /= pv;
        }
        for i in 0..m {
            if i != r {
                let f = a[i][c];
                if f != R::zero() {
                    let pivot_row = a[r].clone();
                    for (x, &t) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= f * t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() != d - 1 {
        return None;
    }
    let free = (0..d).find(|c| !pivots.contains(c))?;
    let mut v = vec![R::zero(); d];
    v[free] = R::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -a[row][free];
    }
    let nrm = crate::numeric::norm(&v);
    Some(v.into_iter().map(|x| x / nrm).collect())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in (i + 1)..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hw_atoms() -> DiscreteMeasure<f64> {
        DiscreteMeasure::new(vec![
            (vec![0.0, 0.0], 0.5),
            (vec![1.0, 0.0], 0.25),
            (vec![0.0, 1.0], 0.25),
        ])
        .unwrap()
    }

    #[test]
    fn collinear_atoms_rejected() {
        let err = DiscreteMeasure::new(vec![
            (vec![0.0_f64, 0.0], 1.0),
            (vec![1.0, 1.0], 1.0),
            (vec![2.0, 2.0], 1.0),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::InvalidFamily(_)));
    }

    #[test]
    fn nonpositive_weight_rejected() {
        assert!(DiscreteMeasure::new(vec![(vec![0.0_f64], 1.0), (vec![1.0], 0.0)]).is_err());
        assert!(DiscreteMeasure::new(vec![(vec![0.0_f64], 1.0), (vec![1.0], -2.0)]).is_err());
    }

    #[test]
    fn duplicate_atoms_merge() {
        let m = DiscreteMeasure::new(vec![
            (vec![0.0_f64], 1.0),
            (vec![1.0], 0.5),
            (vec![1.0], 0.5),
        ])
        .unwrap();
        assert_eq!(m.points().len(), 2);
        assert_eq!(m.weights()[1], 1.0);
    }

    #[test]
    fn hull_of_triangle() {
        let region = hw_atoms().hull_interior().unwrap();
        let Region::HalfSpaces(h) = &region else {
            panic!("expected half-spaces")
        };
        assert_eq!(h.len(), 3);
        assert!(region.contains(&[0.3, 0.2]));
        assert!(!region.contains(&[0.6, 0.4]));
        assert!(!region.contains(&[0.0, 0.5]));
        assert!(!region.contains(&[-0.1, 0.5]));
    }

    #[test]
    fn hull_in_one_dimension() {
        let m = DiscreteMeasure::new(vec![
            (vec![-1.0_f64], 1.0),
            (vec![0.5], 1.0),
            (vec![3.0], 1.0),
        ])
        .unwrap();
        let r = m.hull_interior().unwrap();
        assert!(r.contains(&[2.9]));
        assert!(!r.contains(&[3.0]));
        assert!(!r.contains(&[-1.5]));
    }

    #[test]
    fn hull_of_cube_corners() {
        let mut atoms = Vec::new();
        for i in 0..8u32 {
            let x = vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64];
            atoms.push((x, 1.0));
        }
        let m = DiscreteMeasure::new(atoms).unwrap();
        let r = m.hull_interior().unwrap();
        let Region::HalfSpaces(h) = &r else { panic!() };
        assert_eq!(h.len(), 6);
        assert!(r.contains(&[0.5, 0.5, 0.5]));
        assert!(!r.contains(&[0.5, 0.5, 1.0]));
    }

    #[test]
    fn exp_cumulant_is_weighted_sum() {
        let m = hw_atoms();
        let theta = [0.7, -1.2];
        let direct: f64 = m
            .points()
            .iter()
            .zip(m.weights())
            .map(|(x, w)| w * (theta[0] * x[0] + theta[1] * x[1]).exp())
            .sum();
        let k = m.cumulant(&theta);
        assert!((k.exp() - direct).abs() / direct < 1e-12);
    }
}
