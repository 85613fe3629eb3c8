//! One-dimensional root finding and minimization.

use crate::error::Error;

/// Find a root of `f` on the bracket [lo, hi].
///
/// Bisection with secant acceleration (Brent-style safeguarding): the secant
/// step is taken whenever it lands inside the current bracket, otherwise the
/// interval is bisected. `f(lo)` and `f(hi)` must differ in sign.
pub fn find_root(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, Error> {
    assert!(tol > 0.0, "tolerance must be positive");
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            flo: fa,
            fhi: fb,
        });
    }
    for _ in 0..200 {
        // secant candidate from the bracket endpoints
        let mut x = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        if !x.is_finite() || x <= a.min(b) || x >= a.max(b) {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a).abs() <= tol {
            return Ok(0.5 * (a + b));
        }
        // force a bisection when the secant endpoints stagnate
        if (b - a).abs() > 0.5 * (hi - lo).abs() {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section minimization of `f` on [a, b] to an abscissa tolerance.
///
/// Returns `(x_min, f_min)`.
pub fn golden_section_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a) > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
