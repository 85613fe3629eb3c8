//! Independent Monte Carlo verification of coverage and scaled expected
//! volume, built directly from the defining probability rather than the
//! quadrature identities.
//!
//! Replication batches carry seeds derived from (seed, batch index) and are
//! merged in batch order, so the estimate is reproducible and independent of
//! how many worker threads ran the batches.

use crate::cube::ModelConfig;
use crate::stats::{normal_quantile, Dof};
use crate::tuning::BsFunctions;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_reps: u64,
    pub seed: u64,
}

const BATCH: u64 = 1 << 16;

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&batch.to_le_bytes());
    key[16..24].copy_from_slice(b"confcube");
    ChaCha8Rng::from_seed(key)
}

/// Uniform deviate strictly inside (0, 1) with 53-bit resolution.
#[inline]
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal deviate by inversion, for cross-implementation
/// reproducibility of seeded estimates.
#[inline]
fn draw_normal(rng: &mut ChaCha8Rng) -> f64 {
    normal_quantile(open_unit(rng))
}

/// Scale deviate W = sqrt(chi^2_nu / nu) as a sum of squared normals.
#[inline]
fn draw_w(rng: &mut ChaCha8Rng, nu: Dof) -> f64 {
    match nu {
        Dof::Infinite => 1.0,
        Dof::Finite(n) => {
            let mut q = 0.0;
            for _ in 0..n {
                let z = draw_normal(rng);
                q += z * z;
            }
            (q / n as f64).sqrt()
        }
    }
}

fn run_batches(n: u64, seed: u64, one: impl Fn(&mut ChaCha8Rng) -> f64 + Send + Sync) -> McEstimate {
    let n_batches = n.div_ceil(BATCH);
    let partials: Vec<(f64, f64, u64)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let count = BATCH.min(n - b * BATCH);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                let v = one(&mut rng);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq, count)
        })
        .collect();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut count = 0u64;
    for (s, s2, c) in partials {
        sum += s;
        sumsq += s2;
        count += c;
    }
    let nf = count as f64;
    let mean = sum / nf;
    let var = ((sumsq - sum * sum / nf) / (nf - 1.0)).max(0.0);
    McEstimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        n_reps: count,
        seed,
    }
}

/// Monte Carlo coverage estimate: the fraction of draws where all four
/// standardized cell-mean errors land inside the data-dependent intervals.
pub fn mc_coverage(
    gamma: f64,
    fns: &BsFunctions,
    config: &ModelConfig,
    n: u64,
    seed: u64,
) -> McEstimate {
    assert!(n >= 10_000, "use at least 1e4 replications");
    let nu = config.nu();
    run_batches(n, seed, move |rng| {
        let t1 = draw_normal(rng);
        let t2 = draw_normal(rng);
        let t3 = draw_normal(rng);
        let h = gamma + draw_normal(rng);
        let w = draw_w(rng, nu);
        let (l, u) = fns.lower_upper(h, w);
        let g1 = (t1 - t2 - t3 + h - gamma) / 2.0;
        let g2 = (t1 + t2 - t3 - h + gamma) / 2.0;
        let g3 = (t1 - t2 + t3 - h + gamma) / 2.0;
        let g4 = (t1 + t2 + t3 + h - gamma) / 2.0;
        let inside = l <= g1
            && g1 <= u
            && l <= -g2
            && -g2 <= u
            && l <= -g3
            && -g3 <= u
            && l <= g4
            && g4 <= u;
        if inside {
            1.0
        } else {
            0.0
        }
    })
}

/// Monte Carlo scaled-expected-volume estimate: the sample mean of
/// W^4 s^4(|H|/W) / (d^4 E(W^4)).
pub fn mc_sev(gamma: f64, fns: &BsFunctions, config: &ModelConfig, n: u64, seed: u64) -> McEstimate {
    assert!(n >= 10_000, "use at least 1e4 replications");
    let nu = config.nu();
    let denom = fns.d().powi(4) * config.w_dist().moment_w4();
    run_batches(n, seed, move |rng| {
        let h = gamma + draw_normal(rng);
        let w = draw_w(rng, nu);
        let s = fns.eval_s((h / w).abs());
        w.powi(4) * s.powi(4) / denom
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::CriticalConstants;
    use crate::cube::SigmaMode;
    use approx::assert_abs_diff_eq;

    fn config_c2() -> ModelConfig {
        ModelConfig::new(2, 0.05, SigmaMode::Internal).unwrap()
    }

    fn config_inf() -> ModelConfig {
        ModelConfig::new(1, 0.05, SigmaMode::External(Dof::Infinite)).unwrap()
    }

    #[test]
    fn standard_coverage_is_nominal() {
        let k = CriticalConstants::compute(0.05, Dof::Finite(4), None);
        let fns = BsFunctions::standard(k.d);
        let est = mc_coverage(0.0, &fns, &config_c2(), 1_000_000, 42);
        assert!(
            (est.value - 0.95).abs() <= 3.5 * est.std_error,
            "coverage {} +- {}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn seeded_estimates_are_reproducible() {
        let fns = BsFunctions::standard(2.4909);
        let a = mc_coverage(1.0, &fns, &config_inf(), 200_000, 7);
        let b = mc_coverage(1.0, &fns, &config_inf(), 200_000, 7);
        assert_eq!(a, b);
        let c = mc_coverage(1.0, &fns, &config_inf(), 200_000, 8);
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn thread_count_does_not_change_estimates() {
        let fns = BsFunctions::standard(2.4909);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| mc_coverage(0.5, &fns, &config_inf(), 300_000, 11))
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn evenness_in_gamma() {
        let k = CriticalConstants::compute(0.05, Dof::Finite(4), None);
        let fns = BsFunctions::naive(k.q, k.d, k.d_tilde, Dof::Finite(4));
        let plus = mc_coverage(2.0, &fns, &config_c2(), 400_000, 3);
        let minus = mc_coverage(-2.0, &fns, &config_c2(), 400_000, 4);
        let combined = (plus.std_error.powi(2) + minus.std_error.powi(2)).sqrt();
        assert!(
            (plus.value - minus.value).abs() <= 3.5 * combined,
            "{} vs {}",
            plus.value,
            minus.value
        );
    }

    #[test]
    fn standard_sev_is_one() {
        // point-mass scale: the integrand is constant, so the spread is zero
        let fns = BsFunctions::standard(2.4909);
        let est = mc_sev(0.7, &fns, &config_inf(), 50_000, 5);
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
        // finite degrees of freedom: unit mean, nonzero spread
        let est = mc_sev(0.7, &fns, &config_c2(), 400_000, 5);
        assert!(est.std_error > 0.0);
        assert!((est.value - 1.0).abs() <= 3.5 * est.std_error);
    }

    #[test]
    fn sev_returns_to_one_far_out() {
        let spec = crate::tuning::TuningSpec::uniform(6.0, 0.08, 7).unwrap();
        let d = 2.4909;
        let fns = BsFunctions::spline(
            spec,
            vec![0.5, 0.4, 0.3, 0.2, 0.1],
            vec![0.9 * d, 0.95 * d, 1.02 * d, 1.05 * d, 1.01 * d, 1.0 * d],
            d,
        )
        .unwrap();
        let est = mc_sev(16.0, &fns, &config_inf(), 200_000, 9);
        assert!(
            (est.value - 1.0).abs() <= 3.5 * est.std_error.max(1e-12),
            "sev {} +- {}",
            est.value,
            est.std_error
        );
    }
}
