use crate::numeric::{dot, lit, Real};

/// Open half-space `{x : normal . x < offset}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace<R> {
    pub normal: Vec<R>,
    pub offset: R,
}

impl<R: Real> HalfSpace<R> {
    pub fn new(normal: Vec<R>, offset: R) -> Self {
        Self { normal, offset }
    }

    /// Signed slack `offset - normal . x`, positive strictly inside.
    pub fn slack(&self, x: &[R]) -> R {
        self.offset - dot(&self.normal, x)
    }
}

/// Open region used for domain interiors and mean domains.
#[derive(Clone, Debug, PartialEq)]
pub enum Region<R> {
    All,
    /// Intersection of open half-spaces.
    HalfSpaces(Vec<HalfSpace<R>>),
    /// `{(x, y) : y > x^2}`.
    AboveParabola,
}

impl<R: Real> Region<R> {
    pub fn contains(&self, x: &[R]) -> bool {
        if x.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self {
            Region::All => true,
            Region::HalfSpaces(hs) => hs.iter().all(|h| h.slack(x) > R::zero()),
            Region::AboveParabola => x.len() == 2 && x[1] > x[0] * x[0],
        }
    }

    /// Open box `lo < x_i < hi` on one axis of a `dim`-dimensional space.
    pub fn open_slab(dim: usize, axis: usize, lo: R, hi: R) -> Self {
        let mut up = vec![R::zero(); dim];
        up[axis] = R::one();
        let mut down = vec![R::zero(); dim];
        down[axis] = -R::one();
        Region::HalfSpaces(vec![HalfSpace::new(up, hi), HalfSpace::new(down, -lo)])
    }

    /// Open half-line/half-space `x_axis > lo`.
    pub fn lower_bound(dim: usize, axis: usize, lo: R) -> Self {
        let mut down = vec![R::zero(); dim];
        down[axis] = -R::one();
        Region::HalfSpaces(vec![HalfSpace::new(down, -lo)])
    }
}

/// Essential domain of a cumulant function and the interior of the convex
/// support of its generating measure.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec<R> {
    /// Interior of the essential domain.
    pub interior: Region<R>,
    /// Points of the domain that lie on its boundary (finite cumulant).
    pub boundary_points: Vec<Vec<R>>,
    /// Interior of the convex hull of the support.
    pub mean_domain: Region<R>,
}

impl<R: Real> DomainSpec<R> {
    pub fn everywhere() -> Self {
        Self {
            interior: Region::All,
            boundary_points: Vec::new(),
            mean_domain: Region::All,
        }
    }

    pub fn is_interior(&self, theta: &[R]) -> bool {
        self.interior.contains(theta)
    }

    /// Index of the listed boundary point equal to `theta`, if any.
    pub fn boundary_index(&self, theta: &[R]) -> Option<usize> {
        let tol = lit::<R>(1e-14);
        self.boundary_points.iter().position(|b| {
            b.len() == theta.len() && b.iter().zip(theta).all(|(&u, &v)| (u - v).abs() <= tol)
        })
    }

    pub fn contains(&self, theta: &[R]) -> bool {
        self.is_interior(theta) || self.boundary_index(theta).is_some()
    }

    pub fn mean_contains(&self, t: &[R]) -> bool {
        self.mean_domain.contains(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slab_is_open() {
        let r = Region::open_slab(2, 1, -1.0_f64, 1.0);
        assert!(r.contains(&[100.0, 0.99]));
        assert!(!r.contains(&[0.0, 1.0]));
        assert!(!r.contains(&[0.0, -1.0]));
    }

    #[test]
    fn boundary_points_count_as_domain() {
        let d = DomainSpec {
            interior: Region::open_slab(2, 1, -1.0_f64, 1.0),
            boundary_points: vec![vec![0.0, 1.0], vec![0.0, -1.0]],
            mean_domain: Region::All,
        };
        assert!(d.contains(&[0.0, 1.0]));
        assert!(!d.contains(&[0.1, 1.0]));
        assert_eq!(d.boundary_index(&[0.0, -1.0]), Some(1));
    }

    #[test]
    fn parabola_region() {
        let r: Region<f64> = Region::AboveParabola;
        assert!(r.contains(&[1.0, 1.5]));
        assert!(!r.contains(&[1.0, 1.0]));
    }
}
