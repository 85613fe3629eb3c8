//! Gauss-Legendre quadrature rules.

use crate::error::Error;

/// Nodes and weights for integration over a closed interval.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: (f64, f64),
}

impl QuadratureRule {
    /// Apply the rule to `f`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on the reference interval [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
///
/// Nodes come out in ascending order and exactly antisymmetric.
pub fn legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "need at least 2 nodes, got {n}");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th root (descending)
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and its derivative by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[m - 1] = 0.0;
    }
    // roots were found in descending order; flip to ascending
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Gauss-Legendre rule with `n` nodes on [a, b]; exact for polynomials of
/// degree <= 2n - 1.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> QuadratureRule {
    assert!(a < b, "gauss_legendre needs a < b, got [{a}, {b}]");
    let (xs, ws) = legendre_reference(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    QuadratureRule {
        nodes: xs.iter().map(|&x| mid + half * x).collect(),
        weights: ws.iter().map(|&w| half * w).collect(),
        domain: (a, b),
    }
}

/// Composite Gauss-Legendre: `n` nodes on every panel `[breaks[i], breaks[i+1]]`.
pub fn composite_gauss_legendre(n: usize, breaks: &[f64]) -> Result<QuadratureRule, Error> {
    if breaks.len() < 2 {
        return Err(Error::invalid("breaks", "need at least two breakpoints"));
    }
    let (xs, ws) = legendre_reference(n);
    let mut nodes = Vec::with_capacity(n * (breaks.len() - 1));
    let mut weights = Vec::with_capacity(n * (breaks.len() - 1));
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(a < b) {
            return Err(Error::invalid("breaks", "breakpoints must increase"));
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        nodes.extend(xs.iter().map(|&x| mid + half * x));
        weights.extend(ws.iter().map(|&w| half * w));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: (breaks[0], *breaks.last().unwrap()),
    })
}
