//! Coverage probability, scaled expected volume, and the optimization
//! criterion of a cube family, all by nested Gauss-Legendre quadrature.
//!
//! The coverage identity integrates the difference between the family's
//! conditional box probability `k` and the standard cube's `k_dag`, so the
//! standard family evaluates to exactly `1 - alpha` and round-off stays
//! controlled near the constraint boundary.

use crate::cube::ModelConfig;
use crate::error::Error;
use crate::stats::{legendre_reference, normal_interval, normal_pdf};
use crate::tuning::{BsFunctions, TuningSpec};
use rayon::prelude::*;
use std::path::Path;

const SQRT_2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Conditional probability factor of Theorem-style coverage: the product of
/// the two normal interval probabilities for T1 - T2 and T1 + T2 given
/// (t3, h, w). Reference implementation straight from the defining formula;
/// the quadrature engine uses an algebraically reduced form that is tested
/// against this one.
pub fn k_factor(t3: f64, h: f64, w: f64, gamma: f64, fns: &BsFunctions) -> f64 {
    let (l, u) = fns.lower_upper(h, w);
    k_from_bounds(t3, h, gamma, l, u)
}

/// Same factor for explicit interval endpoints (l, u).
pub fn k_from_bounds(t3: f64, h: f64, gamma: f64, l: f64, u: f64) -> f64 {
    let l1 = 2.0 * l + t3 - h + gamma;
    let u1 = 2.0 * u + t3 - h + gamma;
    let l2 = -2.0 * u + t3 + h - gamma;
    let u2 = -2.0 * l + t3 + h - gamma;
    let lt1 = l1.max(-u1);
    let ut1 = u1.min(-l1);
    let lt2 = l2.max(-u2);
    let ut2 = u2.min(-l2);
    if lt1 > ut1 || lt2 > ut2 {
        return 0.0;
    }
    normal_interval(lt1 * SQRT_2_INV, ut1 * SQRT_2_INV)
        * normal_interval(lt2 * SQRT_2_INV, ut2 * SQRT_2_INV)
}

/// Quadrature layout parameters.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSettings {
    /// Nodes on the scale axis (ignored for a point-mass scale).
    pub w_nodes: usize,
    /// Nodes per panel on the x axis.
    pub x_nodes: usize,
    /// Maximum x panel width; knot panels wider than this get split.
    pub x_max_panel: f64,
    /// Nodes per panel on the inner t3 axis.
    pub t3_nodes: usize,
    /// Maximum t3 panel width.
    pub t3_max_panel: f64,
    /// Truncation of the t3 axis; the standard normal density is below
    /// 1e-14 outside +-8.
    pub t3_cut: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            w_nodes: 40,
            x_nodes: 12,
            x_max_panel: 1.6,
            t3_nodes: 12,
            t3_max_panel: 2.5,
            t3_cut: 8.0,
        }
    }
}

/// Precomputed quadrature layout for one family shape (knot set and cutoff)
/// and one model configuration. Candidate (b, s) values can vary freely on
/// this layout, which lets an optimizer cache everything that does not
/// depend on them.
#[derive(Debug, Clone)]
pub struct CoverageEngine {
    alpha: f64,
    d: f64,
    ew4: f64,
    /// (w, Gauss weight times density); the single pair (1, 1) for a point
    /// mass.
    w_nodes: Vec<(f64, f64)>,
    /// Nodes spanning (-cutoff, cutoff) for the coverage integrand.
    x_all: Vec<(f64, f64)>,
    /// Nodes spanning (0, cutoff) for the volume integrands.
    x_pos: Vec<(f64, f64)>,
    /// Reference Gauss-Legendre rule reused for every t3 panel.
    t_ref: (Vec<f64>, Vec<f64>),
    settings: QuadratureSettings,
}

/// Per-gamma cache: combined outer weights and the standard family's inner
/// integral at every (w, x) pair, both independent of the candidate.
#[derive(Debug, Clone)]
pub struct GammaCache {
    pub gamma: f64,
    /// weight[j * nx + i] = xi_i * phi(w_j x_i - gamma) * wfac_j * w_j
    weights: Vec<f64>,
    /// kdag[j * nx + i] = inner t3 integral for the standard family
    kdag: Vec<f64>,
}

impl CoverageEngine {
    /// Build the layout for a family and configuration.
    pub fn for_fns(fns: &BsFunctions, config: &ModelConfig) -> Self {
        Self::with_settings(fns, config, QuadratureSettings::default())
    }

    pub fn with_settings(
        fns: &BsFunctions,
        config: &ModelConfig,
        settings: QuadratureSettings,
    ) -> Self {
        let dist = config.w_dist();
        let w_nodes = dist.weighted_nodes(settings.w_nodes);
        let breaks = positive_breaks(&fns.breakpoints(), settings.x_max_panel);
        let (xr, wr) = legendre_reference(settings.x_nodes);
        let mut x_pos = Vec::new();
        for pair in breaks.windows(2) {
            let mid = 0.5 * (pair[0] + pair[1]);
            let half = 0.5 * (pair[1] - pair[0]);
            for (&xi, &om) in xr.iter().zip(&wr) {
                x_pos.push((mid + half * xi, half * om));
            }
        }
        let mut x_all: Vec<(f64, f64)> = x_pos.iter().map(|&(x, om)| (-x, om)).collect();
        x_all.reverse();
        x_all.extend(x_pos.iter().copied());
        CoverageEngine {
            alpha: config.alpha(),
            d: fns.d(),
            ew4: dist.moment_w4(),
            w_nodes,
            x_all,
            x_pos,
            t_ref: legendre_reference(settings.t3_nodes),
            settings,
        }
    }

    /// Inner t3 integral of k(t3) phi(t3) for raw interval offsets (a, b):
    /// the interval for T1 - T2 is [a + t3, b + t3] intersected with its
    /// reflection, and the T1 + T2 interval is the t3-mirror image, so the
    /// integrand g(t) g(-t) phi(t) is even and supported on
    /// [-(min(b, -a)), min(b, -a)] with interior kinks only at
    /// +-(a + b)/2. Panels aligned to those points keep every piece smooth.
    fn k_integral(&self, a: f64, b: f64) -> f64 {
        let upper = b.min(-a).min(self.settings.t3_cut);
        if upper <= 0.0 {
            return 0.0;
        }
        let tbar = (0.5 * (a + b).abs()).min(upper);
        let g = |t: f64| -> f64 {
            let lo = (a + t).max(-b - t);
            let hi = (b + t).min(-a - t);
            normal_interval(lo * SQRT_2_INV, hi * SQRT_2_INV)
        };
        let (tn, tw) = (&self.t_ref.0, &self.t_ref.1);
        let mut acc = 0.0;
        let mut segment = |lo: f64, hi: f64| {
            if hi - lo < 1e-14 {
                return;
            }
            let nsub = ((hi - lo) / self.settings.t3_max_panel).ceil() as usize;
            let step = (hi - lo) / nsub.max(1) as f64;
            for s in 0..nsub.max(1) {
                let a0 = lo + step * s as f64;
                let mid = a0 + 0.5 * step;
                let half = 0.5 * step;
                for (&xi, &om) in tn.iter().zip(tw) {
                    let t = mid + half * xi;
                    acc += half * om * normal_pdf(t) * g(t) * g(-t);
                }
            }
        };
        segment(0.0, tbar);
        segment(tbar, upper);
        2.0 * acc
    }

    /// Raw interval offsets for the standard family.
    #[inline]
    fn ab_standard(&self, x: f64, w: f64, gamma: f64) -> (f64, f64) {
        (
            w * (-2.0 * self.d - x) + gamma,
            w * (2.0 * self.d - x) + gamma,
        )
    }

    /// Build the candidate-independent cache for one gamma.
    pub fn gamma_cache(&self, gamma: f64) -> GammaCache {
        let nx = self.x_all.len();
        let mut weights = Vec::with_capacity(self.w_nodes.len() * nx);
        let mut kdag = Vec::with_capacity(self.w_nodes.len() * nx);
        for &(w, wfac) in &self.w_nodes {
            for &(x, xi) in &self.x_all {
                weights.push(xi * normal_pdf(w * x - gamma) * wfac * w);
                let (a, b) = self.ab_standard(x, w, gamma);
                kdag.push(self.k_integral(a, b));
            }
        }
        GammaCache {
            gamma,
            weights,
            kdag,
        }
    }

    /// Coverage probability using a prebuilt cache for its gamma.
    pub fn coverage_cached(&self, fns: &BsFunctions, cache: &GammaCache) -> f64 {
        let gamma = cache.gamma;
        let nx = self.x_all.len();
        // candidate values on the x grid
        let bs: Vec<(f64, f64)> = self
            .x_all
            .iter()
            .map(|&(x, _)| (fns.eval_b(x), fns.eval_s(x.abs())))
            .collect();
        let mut acc = 0.0;
        for (j, &(w, _)) in self.w_nodes.iter().enumerate() {
            let row = j * nx;
            for (i, &(x, _)) in self.x_all.iter().enumerate() {
                let weight = cache.weights[row + i];
                if weight < 1e-18 {
                    continue;
                }
                let (bv, sv) = bs[i];
                let a = w * (2.0 * (bv - sv) - x) + gamma;
                let b = w * (2.0 * (bv + sv) - x) + gamma;
                let k = self.k_integral(a, b);
                acc += weight * (k - cache.kdag[row + i]);
            }
        }
        1.0 - self.alpha + acc
    }

    /// Coverage probability c(gamma; b, s).
    pub fn coverage(&self, fns: &BsFunctions, gamma: f64) -> f64 {
        assert!(gamma >= 0.0, "gamma must be nonnegative (coverage is even)");
        if self.x_all.is_empty() {
            return 1.0 - self.alpha;
        }
        self.coverage_cached(fns, &self.gamma_cache(gamma))
    }

    /// Scaled expected volume e(gamma; s).
    pub fn sev(&self, fns: &BsFunctions, gamma: f64) -> f64 {
        assert!(gamma >= 0.0, "gamma must be nonnegative (volume is even)");
        let d4 = self.d.powi(4);
        let mut acc = 0.0;
        for &(w, wfac) in &self.w_nodes {
            let w5 = w.powi(5) * wfac;
            let mut inner = 0.0;
            for &(x, xi) in &self.x_pos {
                let s4 = fns.eval_s(x).powi(4) - d4;
                inner += xi * s4 * (normal_pdf(w * x - gamma) + normal_pdf(w * x + gamma));
            }
            acc += w5 * inner;
        }
        1.0 + acc / (d4 * self.ew4)
    }

    /// The weighted-average volume criterion for weight nu(x) = lambda x + H(x).
    pub fn criterion(&self, fns: &BsFunctions, lambda: f64) -> f64 {
        assert!(
            !matches!(fns, BsFunctions::Naive(_)),
            "criterion is defined for the spline and standard families"
        );
        let d4 = self.d.powi(4);
        let mut acc = 0.0;
        for &(w, wfac) in &self.w_nodes {
            let w5 = w.powi(5) * wfac;
            let mut inner = 0.0;
            for &(x, xi) in &self.x_pos {
                let s4 = fns.eval_s(x).powi(4) - d4;
                inner += xi * s4 * (lambda + normal_pdf(w * x));
            }
            acc += w5 * inner;
        }
        2.0 * acc / (d4 * self.ew4)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Breakpoints on [0, cutoff]: the family's own break locations with wide
/// gaps split so no panel exceeds `max_width`.
fn positive_breaks(raw: &[f64], max_width: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if raw.len() < 2 {
        return out;
    }
    for pair in raw.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let nsub = (((b - a) / max_width).ceil() as usize).max(1);
        for s in 0..nsub {
            out.push(a + (b - a) * s as f64 / nsub as f64);
        }
    }
    out.push(*raw.last().unwrap());
    out
}

/// A tabulated performance point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformancePoint {
    pub gamma: f64,
    pub coverage: f64,
    pub sev: f64,
    pub sqrt_sev: f64,
}

/// Coverage and volume tabulated on an increasing gamma grid.
#[derive(Debug, Clone)]
pub struct PerformanceCurve {
    pub points: Vec<PerformancePoint>,
}

impl PerformanceCurve {
    /// Write as CSV with header `gamma,coverage,sqrt_sev` at full precision.
    pub fn write_csv(&self, path: &Path) -> Result<(), Error> {
        let mut out = String::from("gamma,coverage,sqrt_sev\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.gamma, p.coverage, p.sqrt_sev));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "gamma,coverage,sqrt_sev" => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `gamma,coverage,sqrt_sev`, found `{}`",
                    other.unwrap_or("")
                )))
            }
        }
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 fields", i + 2)));
            }
            let parse = |f: &str, name: &str| -> Result<f64, Error> {
                f.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad {name}: `{f}`", i + 2)))
            };
            let gamma = parse(fields[0], "gamma")?;
            let coverage = parse(fields[1], "coverage")?;
            let sqrt_sev = parse(fields[2], "sqrt_sev")?;
            points.push(PerformancePoint {
                gamma,
                coverage,
                sev: sqrt_sev * sqrt_sev,
                sqrt_sev,
            });
        }
        Ok(PerformanceCurve { points })
    }
}

/// Coverage probability c(gamma; b, s) for one gamma.
pub fn coverage(gamma: f64, fns: &BsFunctions, config: &ModelConfig) -> f64 {
    CoverageEngine::for_fns(fns, config).coverage(fns, gamma)
}

/// Scaled expected volume e(gamma; s) for one gamma.
pub fn scaled_expected_volume(gamma: f64, fns: &BsFunctions, config: &ModelConfig) -> f64 {
    CoverageEngine::for_fns(fns, config).sev(fns, gamma)
}

/// The optimization criterion: the nu-weighted average of e(gamma; s) - 1
/// reduced to a double integral.
pub fn criterion(fns: &BsFunctions, spec: &TuningSpec, config: &ModelConfig) -> f64 {
    CoverageEngine::for_fns(fns, config).criterion(fns, spec.lambda())
}

/// Tabulate coverage and scaled expected volume at gamma = 0, step, ...,
/// gamma_max.
pub fn performance_curve(
    fns: &BsFunctions,
    config: &ModelConfig,
    gamma_max: f64,
    step: f64,
) -> Result<PerformanceCurve, Error> {
    if !(gamma_max > 0.0) {
        return Err(Error::invalid("gamma_max", "must be positive"));
    }
    if !(step > 0.0) {
        return Err(Error::invalid("step", "must be positive"));
    }
    let engine = CoverageEngine::for_fns(fns, config);
    let n = (gamma_max / step).floor() as usize;
    let gammas: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    let points: Vec<PerformancePoint> = gammas
        .par_iter()
        .map(|&gamma| {
            let cov = engine.coverage(fns, gamma);
            let sev = engine.sev(fns, gamma);
            PerformancePoint {
                gamma,
                coverage: cov,
                sev,
                sqrt_sev: sev.sqrt(),
            }
        })
        .collect();
    Ok(PerformanceCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::CriticalConstants;
    use crate::cube::SigmaMode;
    use crate::stats::{normal_cdf, Dof};
    use approx::assert_abs_diff_eq;

    fn config_c2() -> ModelConfig {
        ModelConfig::new(2, 0.05, SigmaMode::Internal).unwrap()
    }

    fn config_inf() -> ModelConfig {
        ModelConfig::new(1, 0.05, SigmaMode::External(Dof::Infinite)).unwrap()
    }

    fn naive_c2() -> BsFunctions {
        let k = CriticalConstants::compute(0.05, Dof::Finite(4), None);
        BsFunctions::naive(k.q, k.d, k.d_tilde, Dof::Finite(4))
    }

    fn sample_spline(d: f64, r: f64) -> BsFunctions {
        let spec = TuningSpec::uniform(r, 0.08, 7).unwrap();
        BsFunctions::spline(
            spec,
            vec![0.35 * d, 0.3 * d, 0.2 * d, 0.1 * d, 0.03 * d],
            vec![
                0.92 * d,
                0.95 * d,
                1.05 * d,
                1.06 * d,
                1.03 * d,
                1.01 * d,
            ],
            d,
        )
        .unwrap()
    }

    #[test]
    fn k_factor_zero_when_intervals_empty() {
        let fns = BsFunctions::standard(2.4909);
        // push t3 far beyond the admissible band
        let v = k_factor(100.0, 0.3, 1.0, 0.0, &fns);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn k_factor_standard_symmetric_case() {
        // with h = gamma and t3 = 0 both boxes are symmetric:
        // k = (2 Phi(sqrt(2) d w) - 1)^2
        let d = 1.3;
        let fns = BsFunctions::standard(d);
        for &(h, w) in &[(0.0, 1.0), (0.7, 0.8), (-1.1, 1.7)] {
            let gamma = h;
            let k = k_from_bounds(0.0, h, gamma, -d * w, d * w);
            let expected = (2.0 * normal_cdf(2.0_f64.sqrt() * d * w) - 1.0).powi(2);
            assert_abs_diff_eq!(k, expected, epsilon = 1e-14);
            let _ = &fns;
        }
    }

    #[test]
    fn k_factor_standard_general_t3() {
        // hand-derived: at t3 = h - gamma the first box is symmetric and the
        // second shrinks by 2|h - gamma|
        let d = 1.1;
        let (h, w, gamma) = (0.9, 1.2, 0.4);
        let k = k_from_bounds(h - gamma, h, gamma, -d * w, d * w);
        let f1 = 2.0 * normal_cdf(2.0_f64.sqrt() * d * w) - 1.0;
        let half2 = 2.0 * d * w - 2.0 * (h - gamma).abs();
        let f2 = (2.0 * normal_cdf(half2 * SQRT_2_INV) - 1.0).max(0.0);
        assert_abs_diff_eq!(k, f1 * f2, epsilon = 1e-14);
    }

    #[test]
    fn k_matches_standard_dagger_for_standard_fns() {
        let d = 2.4909;
        let fns = BsFunctions::standard(d);
        let mut state = 7u64;
        let mut unif = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64) / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let t3 = -6.0 + 12.0 * unif();
            let h = -5.0 + 10.0 * unif();
            let w = 0.1 + 3.0 * unif();
            let gamma = 8.0 * unif();
            let via_fns = k_factor(t3, h, w, gamma, &fns);
            let direct = k_from_bounds(t3, h, gamma, -d * w, d * w);
            assert_eq!(via_fns, direct);
        }
    }

    #[test]
    fn engine_inner_integral_matches_k_factor() {
        // the reduced (a, b) form must agree with the definitional k at the
        // quadrature nodes: compare the inner integrals by brute force
        let fns = sample_spline(4.003, 8.0);
        let config = config_c2();
        let engine = CoverageEngine::for_fns(&fns, &config);
        let rule = crate::stats::gauss_legendre(400, -8.0, 8.0);
        for &(x, w, gamma) in &[(0.5, 1.0, 0.0), (1.9, 0.6, 1.5), (6.5, 1.4, 3.0), (0.02, 2.1, 7.0)] {
            let h = w * x;
            let brute = rule.integrate(|t3| k_factor(t3, h, w, gamma, &fns) * normal_pdf(t3));
            let (bv, sv) = (fns.eval_b(x), fns.eval_s(x.abs()));
            let a = w * (2.0 * (bv - sv) - x) + gamma;
            let b = w * (2.0 * (bv + sv) - x) + gamma;
            let fast = engine.k_integral(a, b);
            assert_abs_diff_eq!(fast, brute, epsilon = 2e-9);
        }
    }

    #[test]
    fn standard_family_identities() {
        // integrand vanishes identically: coverage = 1 - alpha, volume = 1
        let d = 2.4909;
        let fns = BsFunctions::standard(d);
        for config in [config_c2(), config_inf()] {
            let engine = CoverageEngine::for_fns(&fns, &config);
            for i in 0..50 {
                let gamma = 0.23 * i as f64;
                assert_abs_diff_eq!(engine.coverage(&fns, gamma), 0.95, epsilon = 1e-12);
                assert_abs_diff_eq!(engine.sev(&fns, gamma), 1.0, epsilon = 1e-14);
            }
            assert_eq!(engine.criterion(&fns, 0.08), 0.0);
        }
    }

    #[test]
    fn spline_standard_equivalent_identities() {
        // a spline with b = 0, s = d has zero integrand up to spline solve
        // round-off
        let d = 4.003041707160898;
        let spec = TuningSpec::uniform(8.0, 0.08, 7).unwrap();
        let fns = BsFunctions::standard_equivalent_spline(spec, d).unwrap();
        let engine = CoverageEngine::for_fns(&fns, &config_c2());
        for &gamma in &[0.0, 1.0, 3.7, 9.0] {
            assert_abs_diff_eq!(engine.coverage(&fns, gamma), 0.95, epsilon = 1e-9);
            assert_abs_diff_eq!(engine.sev(&fns, gamma), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coverage_cached_equals_uncached() {
        let fns = sample_spline(4.003, 8.0);
        let config = config_c2();
        let engine = CoverageEngine::for_fns(&fns, &config);
        for &gamma in &[0.0, 2.0, 5.5] {
            let cache = engine.gamma_cache(gamma);
            assert_eq!(
                engine.coverage(&fns, gamma),
                engine.coverage_cached(&fns, &cache)
            );
        }
    }

    #[test]
    fn sev_under_one_when_s_below_d() {
        let d = 2.4909;
        let spec = TuningSpec::uniform(6.0, 0.08, 7).unwrap();
        let fns = BsFunctions::spline(
            spec.clone(),
            vec![0.0; 5],
            vec![0.9 * d; 6],
            d,
        )
        .unwrap();
        let engine = CoverageEngine::for_fns(&fns, &config_inf());
        assert!(engine.sev(&fns, 0.0) < 1.0);
        // everywhere-below-d gives a negative criterion
        assert!(engine.criterion(&fns, 0.08) < 0.0);
    }

    #[test]
    fn naive_tail_returns_to_nominal() {
        // for the test-based family the strip is only (-q, q), so gamma at
        // q + 10 leaves the nonstandard region with negligible mass
        let fns = naive_c2();
        let config = config_c2();
        let engine = CoverageEngine::for_fns(&fns, &config);
        let gamma = fns.cutoff() + 10.0;
        assert_abs_diff_eq!(engine.coverage(&fns, gamma), 0.95, epsilon = 2e-5);
        assert_abs_diff_eq!(engine.sev(&fns, gamma), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn infinite_dof_tail_is_exact() {
        let d = 2.4909;
        let fns = sample_spline(d, 6.0);
        let engine = CoverageEngine::for_fns(&fns, &config_inf());
        let gamma = 16.0;
        assert_abs_diff_eq!(engine.coverage(&fns, gamma), 0.95, epsilon = 2e-5);
        assert_abs_diff_eq!(engine.sev(&fns, gamma), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn curve_shapes_and_csv_round_trip() {
        let d = 2.4909;
        let fns = BsFunctions::standard(d);
        let config = config_inf();
        let curve = performance_curve(&fns, &config, 3.0, 0.5).unwrap();
        assert_eq!(curve.points.len(), 7);
        assert!(curve
            .points
            .windows(2)
            .all(|p| p[0].gamma < p[1].gamma));
        for p in &curve.points {
            assert_abs_diff_eq!(p.coverage, 0.95, epsilon = 1e-12);
            assert_abs_diff_eq!(p.sqrt_sev, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.sqrt_sev * p.sqrt_sev, p.sev, epsilon = 1e-12);
        }
        let dir = std::env::temp_dir().join("confcube-test-curve");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("curve.csv");
        curve.write_csv(&path).unwrap();
        let back = PerformanceCurve::read_csv(&path).unwrap();
        assert_eq!(curve.points.len(), back.points.len());
        for (a, b) in curve.points.iter().zip(&back.points) {
            assert_eq!(a.gamma, b.gamma);
            assert_eq!(a.coverage, b.coverage);
            assert_eq!(a.sqrt_sev, b.sqrt_sev);
        }
        assert!(performance_curve(&fns, &config, -1.0, 0.5).is_err());
        assert!(performance_curve(&fns, &config, 3.0, 0.0).is_err());
    }

    #[test]
    fn criterion_matches_gamma_grid_reconstruction() {
        // independent route: criterion = lambda * 2 int_0^inf (e - 1) dgamma
        // + (e(0) - 1), with the gamma integral done on its own grid
        let d = 2.4909;
        let fns = sample_spline(d, 6.0);
        let config = config_inf();
        let engine = CoverageEngine::for_fns(&fns, &config);
        let lambda = 0.08;
        let direct = engine.criterion(&fns, lambda);
        let gamma_hi = 6.0 + 9.0;
        let rule = crate::stats::gauss_legendre(240, 0.0, gamma_hi);
        let integral = rule.integrate(|g| engine.sev(&fns, g) - 1.0);
        let reconstructed = lambda * 2.0 * integral + (engine.sev(&fns, 0.0) - 1.0);
        assert_abs_diff_eq!(direct, reconstructed, epsilon = 1e-4);
    }
}
