//! Cubic spline interpolation with natural or clamped endpoint conditions.

/// Endpoint condition for one end of a cubic spline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Second derivative zero at the endpoint.
    Natural,
    /// First derivative fixed at the given slope.
    Clamped(f64),
}

/// An interpolating cubic spline on a fixed knot grid.
///
/// Stored as knot values plus the second derivatives obtained from the
/// standard tridiagonal system, so evaluation reproduces the data exactly at
/// the knots and the curve is C2 in between.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>, // second derivatives at the knots
}

impl CubicSpline {
    pub fn new(xs: &[f64], ys: &[f64], left: Boundary, right: Boundary) -> Self {
        assert!(xs.len() >= 2, "need at least two knots");
        assert_eq!(xs.len(), ys.len(), "knot/value length mismatch");
        assert!(
            xs.windows(2).all(|p| p[0] < p[1]),
            "knots must be strictly increasing"
        );
        let n = xs.len();
        // tridiagonal system for the second derivatives
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        match left {
            Boundary::Natural => {
                diag[0] = 1.0;
                sup[0] = 0.0;
                rhs[0] = 0.0;
            }
            Boundary::Clamped(slope) => {
                let h = xs[1] - xs[0];
                diag[0] = h / 3.0;
                sup[0] = h / 6.0;
                rhs[0] = (ys[1] - ys[0]) / h - slope;
            }
        }
        match right {
            Boundary::Natural => {
                diag[n - 1] = 1.0;
                sub[n - 1] = 0.0;
                rhs[n - 1] = 0.0;
            }
            Boundary::Clamped(slope) => {
                let h = xs[n - 1] - xs[n - 2];
                sub[n - 1] = h / 6.0;
                diag[n - 1] = h / 3.0;
                rhs[n - 1] = slope - (ys[n - 1] - ys[n - 2]) / h;
            }
        }
        // Thomas algorithm
        let mut m = vec![0.0; n];
        let mut cp = vec![0.0; n];
        cp[0] = sup[0] / diag[0];
        rhs[0] /= diag[0];
        for i in 1..n {
            let denom = diag[i] - sub[i] * cp[i - 1];
            cp[i] = sup[i] / denom;
            rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
        }
        m[n - 1] = rhs[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = rhs[i] - cp[i] * m[i + 1];
        }
        CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        }
    }

    /// Domain covered by the knots.
    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Evaluate at `x`, which must lie inside the knot range (clamped to the
    /// boundary segments for round-off stragglers).
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        // binary search for the segment
        let i = match self
            .xs
            .binary_search_by(|k| k.partial_cmp(&x).expect("finite knots"))
        {
            Ok(j) => return self.ys[j],
            Err(0) => 0,
            Err(j) if j >= n => n - 2,
            Err(j) => j - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// First derivative at `x`.
    pub fn deriv(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self
            .xs
            .binary_search_by(|k| k.partial_cmp(&x).expect("finite knots"))
        {
            Ok(j) => j.min(n - 2),
            Err(0) => 0,
            Err(j) if j >= n => n - 2,
            Err(j) => j - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }
}
