//! Extrapolation of finite-n decay rates to their `n -> inf` limit.

use super::{count, Real};

/// Fitted model `r_n = limit + slope / n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseNFit<R> {
    pub limit: R,
    pub slope: R,
    /// Number of trailing schedule points used in the fit.
    pub points_used: usize,
}

/// Least-squares fit of `r_n = limit + slope / n` on the last half of the
/// schedule (at least two points). Any infinite rate in the window makes the
/// limit infinite.
pub fn fit_inverse_n<R: Real>(ns: &[usize], rates: &[R]) -> InverseNFit<R> {
    assert_eq!(ns.len(), rates.len());
    assert!(!ns.is_empty(), "empty schedule");
    let len = ns.len();
    let used = if len < 2 { len } else { (len / 2).max(2) };
    let start = len - used;
    let window = &rates[start..];
    if window.iter().any(|r| r.is_infinite()) {
        return InverseNFit {
            limit: R::infinity(),
            slope: R::zero(),
            points_used: used,
        };
    }
    if used == 1 {
        return InverseNFit {
            limit: window[0],
            slope: R::zero(),
            points_used: 1,
        };
    }
    let us: Vec<R> = ns[start..]
        .iter()
        .map(|&n| R::one() / count::<R>(n))
        .collect();
    let m = count::<R>(used);
    let mean_u = us.iter().copied().sum::<R>() / m;
    let mean_r = window.iter().copied().sum::<R>() / m;
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    for (&u, &r) in us.iter().zip(window) {
        sxx += (u - mean_u) * (u - mean_u);
        sxy += (u - mean_u) * (r - mean_r);
    }
    let slope = if sxx > R::zero() {
        sxy / sxx
    } else {
        R::zero()
    };
    InverseNFit {
        limit: mean_r - slope * mean_u,
        slope,
        points_used: used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_inverse_n_model() {
        let ns = [64, 128, 256, 512, 1024, 2048, 4096];
        let rates: Vec<f64> = ns.iter().map(|&n| 0.25 + 3.0 / n as f64).collect();
        let fit = fit_inverse_n(&ns, &rates);
        assert_eq!(fit.points_used, 3);
        assert!((fit.limit - 0.25).abs() < 1e-12);
        assert!((fit.slope - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infinite_rates_propagate() {
        let fit = fit_inverse_n(&[10, 20], &[f64::INFINITY, f64::INFINITY]);
        assert!(fit.limit.is_infinite());
    }
}
