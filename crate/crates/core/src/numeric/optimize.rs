//! One-dimensional minimization and root bracketing.

use super::{lit, Real};

/// Result of a bracketed scalar minimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMin<R> {
    pub x: R,
    pub value: R,
    pub iterations: usize,
}

/// Brent's method (golden section with parabolic steps) on `[a, b]`.
///
/// `f` may return `+inf` where undefined; such points are treated as
/// uphill. Terminates when the bracket shrinks below `x_tol` (relative to
/// `|x|`, absolute floor `x_tol`).
pub fn brent_minimize<R: Real, F: FnMut(R) -> R>(
    mut f: F,
    a: R,
    b: R,
    x_tol: R,
    max_iter: usize,
) -> ScalarMin<R> {
    let golden = lit::<R>(0.381_966_011_250_105_1);
    let half = lit::<R>(0.5);
    let two = lit::<R>(2.0);
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut x = a + golden * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d = R::zero();
    let mut e = R::zero();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let xm = half * (a + b);
        let tol1 = x_tol * x.abs() + x_tol;
        let tol2 = two * tol1;
        if (x - xm).abs() <= tol2 - half * (b - a) {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 && fx.is_finite() && fw.is_finite() && fv.is_finite() {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = two * (q - r);
            if q > R::zero() {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            if p.abs() < (half * q * e_old).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x >= xm { a - x } else { b - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > R::zero() {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        let fu_cmp = if fu.is_nan() { R::infinity() } else { fu };
        if fu_cmp <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu_cmp;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu_cmp <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu_cmp;
            } else if fu_cmp <= fv || v == x || v == w {
                v = u;
                fv = fu_cmp;
            }
        }
    }
    ScalarMin {
        x,
        value: fx,
        iterations,
    }
}

/// Brent's root finder on a sign-changing bracket `[a, b]`.
///
/// Returns `None` when `f(a)` and `f(b)` have the same strict sign.
pub fn brent_root<R: Real, F: FnMut(R) -> R>(
    mut f: F,
    a: R,
    b: R,
    x_tol: R,
    max_iter: usize,
) -> Option<R> {
    let half = lit::<R>(0.5);
    let two = lit::<R>(2.0);
    let three = lit::<R>(3.0);
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == R::zero() {
        return Some(a);
    }
    if fb == R::zero() {
        return Some(b);
    }
    if (fa > R::zero()) == (fb > R::zero()) {
        return None;
    }
    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if (fb > R::zero()) == (fc > R::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * R::epsilon() * b.abs() + half * x_tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == R::zero() {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = R::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - R::one()));
                q = (qq - R::one()) * (r - R::one()) * (s - R::one());
            }
            if p > R::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else if xm > R::zero() {
            b + tol1
        } else {
            b - tol1
        };
        fb = f(b);
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_parabola_minimum() {
        let m = brent_minimize(|x: f64| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-12, 200);
        assert!((m.x - 1.3).abs() < 1e-8);
        assert!((m.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn brent_tolerates_infinite_walls() {
        let f = |x: f64| if x <= 0.0 { f64::INFINITY } else { x - x.ln() };
        let m = brent_minimize(f, -1.0, 4.0, 1e-12, 200);
        assert!((m.x - 1.0).abs() < 1e-7);
    }

    #[test]
    fn root_of_cosine() {
        let r = brent_root(|x: f64| x.cos(), 0.0, 3.0, 1e-15, 100).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!(brent_root(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }
}
