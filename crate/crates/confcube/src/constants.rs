//! The three critical constants: the full-model studentized-maximum-modulus
//! constant `d`, the reduced-model constant `d_tilde`, and the preliminary
//! t-test threshold `q`.

use crate::stats::quad::{composite_gauss_legendre, gauss_legendre};
use crate::stats::special::reg_beta;
use crate::stats::{find_root, normal_cdf, normal_quantile, Dof, ScaledChi};

/// Constants for a given confidence level and error degrees of freedom.
///
/// `d` solves P(max_i |Z_i| / W <= d) = 1 - alpha with four independent
/// standard normals; `d_tilde` is the analogue for the four correlated
/// contrasts of three normals that arise when the interaction is pinned at
/// zero (scale estimator then has one extra degree of freedom); `q` is the
/// two-sided t threshold of the preliminary test.
#[derive(Debug, Clone, Copy)]
pub struct CriticalConstants {
    pub d: f64,
    pub d_tilde: f64,
    pub q: f64,
    pub alpha: f64,
    pub nu: Dof,
}

impl CriticalConstants {
    /// Compute all three constants. `nu` is the full-model error degrees of
    /// freedom; the preliminary test level defaults to `alpha` unless given.
    pub fn compute(alpha: f64, nu: Dof, test_level: Option<f64>) -> Self {
        let dist = ScaledChi::new(nu);
        let level = test_level.unwrap_or(alpha);
        CriticalConstants {
            d: compute_d(alpha, dist),
            d_tilde: compute_d_tilde(alpha, ScaledChi::new(nu.plus_one())),
            q: compute_q(level, dist),
            alpha,
            nu,
        }
    }
}

const W_QUAD_NODES: usize = 80;

/// Probability that four independent |N(0,1)| all fall below `d * W`.
pub fn smm_probability(d: f64, dist: ScaledChi) -> f64 {
    let inner = |w: f64| {
        let p = 2.0 * normal_cdf(d * w) - 1.0;
        if p <= 0.0 {
            0.0
        } else {
            p.powi(4)
        }
    };
    if dist.is_infinite() {
        return inner(1.0);
    }
    dist.weighted_nodes(W_QUAD_NODES)
        .iter()
        .map(|&(w, om)| om * inner(w))
        .sum()
}

/// Full-model constant: the root of `smm_probability(d, dist) = 1 - alpha`.
pub fn compute_d(alpha: f64, dist: ScaledChi) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0,1)");
    if dist.is_infinite() {
        // (2 Phi(d) - 1)^4 = 1 - alpha solved in closed form
        return normal_quantile((1.0 + (1.0 - alpha).powf(0.25)) / 2.0);
    }
    let target = 1.0 - alpha;
    let mut hi = 4.0;
    while smm_probability(hi, dist) < target {
        hi *= 2.0;
    }
    find_root(|d| smm_probability(d, dist) - target, 1e-8, hi, 1e-9)
        .expect("smm probability brackets the root by construction")
}

/// P(max of the four reduced-model contrasts' absolute values <= a).
///
/// The contrasts are (z1 +- z2 +- z3)/sqrt(3); for fixed (z2, z3) the
/// constraint set in z1 is the symmetric interval
/// [|z2| + |z3| - a sqrt(3), a sqrt(3) - |z2| - |z3|], so the innermost
/// dimension reduces to a closed-form normal interval probability, leaving a
/// two-dimensional numerical integral over the positive quadrant.
pub fn max_contrast_probability(a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let at = 3.0_f64.sqrt() * a;
    let zmax = 8.5_f64;
    let outer_hi = at.min(zmax);
    let breaks = unit_panels(0.0, outer_hi, 1.0);
    let outer = match composite_gauss_legendre(16, &breaks) {
        Ok(r) => r,
        Err(_) => return 0.0,
    };
    let phi = crate::stats::normal_pdf;
    let mut total = 0.0;
    for (&z2, &w2) in outer.nodes.iter().zip(&outer.weights) {
        let inner_hi = (at - z2).min(zmax);
        if inner_hi <= 0.0 {
            continue;
        }
        let inner_breaks = unit_panels(0.0, inner_hi, 1.0);
        let inner = composite_gauss_legendre(16, &inner_breaks)
            .expect("inner panels are increasing by construction");
        let iv: f64 = inner
            .nodes
            .iter()
            .zip(&inner.weights)
            .map(|(&z3, &w3)| {
                let p = 2.0 * normal_cdf(at - z2 - z3) - 1.0;
                w3 * p.max(0.0) * phi(z3)
            })
            .sum();
        total += w2 * phi(z2) * iv;
    }
    (4.0 * total).min(1.0)
}

/// Equal panels of width at most `max_width` spanning [lo, hi].
fn unit_panels(lo: f64, hi: f64, max_width: f64) -> Vec<f64> {
    let n = (((hi - lo) / max_width).ceil() as usize).max(1);
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

/// Reduced-model constant: root of the averaged contrast probability.
///
/// `dist_reduced` is the distribution of the reduced-model scale estimator,
/// i.e. one more degree of freedom than the full model.
pub fn compute_d_tilde(alpha: f64, dist_reduced: ScaledChi) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0,1)");
    let target = 1.0 - alpha;
    let prob = |d: f64| -> f64 {
        if dist_reduced.is_infinite() {
            max_contrast_probability(d)
        } else {
            dist_reduced
                .weighted_nodes(W_QUAD_NODES)
                .iter()
                .map(|&(w, om)| om * max_contrast_probability(d * w))
                .sum()
        }
    };
    let mut hi = 4.0;
    while prob(hi) < target {
        hi *= 2.0;
    }
    find_root(|d| prob(d) - target, 1e-8, hi, 1e-9)
        .expect("contrast probability brackets the root by construction")
}

/// CDF of Student's t with `nu` degrees of freedom, via the regularized
/// incomplete beta function.
pub fn t_cdf(x: f64, nu: u32) -> f64 {
    let nu = nu as f64;
    let ib = reg_beta(nu / 2.0, 0.5, nu / (nu + x * x));
    if x >= 0.0 {
        1.0 - ib / 2.0
    } else {
        ib / 2.0
    }
}

/// Two-sided t threshold: the 1 - level/2 quantile of t_nu (normal limit for
/// infinite degrees of freedom).
pub fn compute_q(level: f64, dist: ScaledChi) -> f64 {
    assert!(level > 0.0 && level < 1.0, "test level must be in (0,1)");
    let p = 1.0 - level / 2.0;
    match dist.nu() {
        Dof::Infinite => normal_quantile(p),
        Dof::Finite(nu) => {
            let mut hi = 4.0;
            while t_cdf(hi, nu) < p {
                hi *= 2.0;
            }
            find_root(|x| t_cdf(x, nu) - p, 0.0, hi, 1e-10)
                .expect("t cdf brackets the root by construction")
        }
    }
}
