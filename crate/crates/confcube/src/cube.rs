//! Least-squares fitting of 2x2 factorial data and construction of the
//! standard, test-based, and optimized confidence cubes.

use crate::constants::CriticalConstants;
use crate::error::Error;
use crate::stats::{Dof, ScaledChi};
use crate::tuning::BsFunctions;
use std::path::Path;

/// How the error scale is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaMode {
    /// Residual mean square from the replicates; needs more than one
    /// replicate per cell and carries 4c - 4 degrees of freedom.
    Internal,
    /// Scale estimate supplied from outside the experiment with the given
    /// degrees of freedom (possibly infinite).
    External(Dof),
}

/// Design parameters of the experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    c: u32,
    alpha: f64,
    sigma_mode: SigmaMode,
}

impl ModelConfig {
    pub fn new(c: u32, alpha: f64, sigma_mode: SigmaMode) -> Result<Self, Error> {
        if c < 1 {
            return Err(Error::invalid("replicates", "need at least one replicate"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("alpha", "must lie strictly between 0 and 1"));
        }
        if sigma_mode == SigmaMode::Internal && c < 2 {
            return Err(Error::invalid(
                "replicates",
                "internal scale estimation needs at least 2 replicates (no residual degrees of freedom otherwise)",
            ));
        }
        Ok(ModelConfig {
            c,
            alpha,
            sigma_mode,
        })
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma_mode(&self) -> SigmaMode {
        self.sigma_mode
    }

    /// Error degrees of freedom: 4c - 4 internally, the supplied value
    /// externally.
    pub fn nu(&self) -> Dof {
        match self.sigma_mode {
            SigmaMode::Internal => Dof::Finite(4 * self.c - 4),
            SigmaMode::External(m) => m,
        }
    }

    /// Distribution of W = sigma_hat / sigma.
    pub fn w_dist(&self) -> ScaledChi {
        ScaledChi::new(self.nu())
    }

    /// Variance factor of each cell-mean estimator: v_11 = 1/c.
    pub fn v11(&self) -> f64 {
        1.0 / self.c as f64
    }

    /// Variance factor of the interaction estimator: v_55 = 1/(4c).
    pub fn v55(&self) -> f64 {
        1.0 / (4.0 * self.c as f64)
    }
}

/// Observed responses, one list per cell in the order
/// (low,low), (high,low), (low,high), (high,high).
#[derive(Debug, Clone)]
pub struct FactorialDataset {
    cells: [Vec<f64>; 4],
    external_sigma_hat: Option<f64>,
}

/// Cell index from coded levels in {-1, +1}.
fn cell_index(x1: i8, x2: i8) -> Option<usize> {
    match (x1, x2) {
        (-1, -1) => Some(0),
        (1, -1) => Some(1),
        (-1, 1) => Some(2),
        (1, 1) => Some(3),
        _ => None,
    }
}

pub const CELL_LABELS: [&str; 4] = ["theta00", "theta10", "theta01", "theta11"];

impl FactorialDataset {
    pub fn new(cells: [Vec<f64>; 4], external_sigma_hat: Option<f64>) -> Result<Self, Error> {
        let c = cells[0].len();
        if c == 0 || cells.iter().any(|v| v.len() != c) {
            let counts: Vec<String> = cells
                .iter()
                .zip(CELL_LABELS)
                .map(|(v, l)| format!("{l}: {}", v.len()))
                .collect();
            return Err(Error::Data(format!(
                "cells must hold the same positive number of observations ({})",
                counts.join(", ")
            )));
        }
        if let Some(s) = external_sigma_hat {
            if !(s >= 0.0) {
                return Err(Error::invalid("sigma", "external scale must be nonnegative"));
            }
        }
        Ok(FactorialDataset {
            cells,
            external_sigma_hat,
        })
    }

    /// Parse a CSV with header `x1,x2,y`; coded levels must be -1 or 1.
    pub fn from_csv(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((_, l)) => break l,
                None => return Err(Error::Parse("empty dataset file".into())),
            }
        };
        let norm: String = header.split(',').map(|f| f.trim()).collect::<Vec<_>>().join(",");
        if !norm.eq_ignore_ascii_case("x1,x2,y") {
            return Err(Error::Parse(format!(
                "expected header `x1,x2,y`, found `{header}`"
            )));
        }
        let mut cells: [Vec<f64>; 4] = Default::default();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(|f| f.trim()).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected 3 fields, found {}",
                    idx + 1,
                    fields.len()
                )));
            }
            let parse_level = |f: &str, name: &str| -> Result<i8, Error> {
                match f {
                    "-1" => Ok(-1),
                    "1" | "+1" => Ok(1),
                    other => Err(Error::Parse(format!(
                        "line {}: field {name} must be -1 or 1, found `{other}`",
                        idx + 1
                    ))),
                }
            };
            let x1 = parse_level(fields[0], "x1")?;
            let x2 = parse_level(fields[1], "x2")?;
            let y: f64 = fields[2].parse().map_err(|_| {
                Error::Parse(format!("line {}: field y is not a number: `{}`", idx + 1, fields[2]))
            })?;
            let i = cell_index(x1, x2).expect("levels validated above");
            cells[i].push(y);
        }
        FactorialDataset::new(cells, None)
    }

    pub fn read_csv(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(&text)
    }

    pub fn with_external_sigma(mut self, sigma_hat: f64) -> Result<Self, Error> {
        if !(sigma_hat >= 0.0) {
            return Err(Error::invalid("sigma", "external scale must be nonnegative"));
        }
        self.external_sigma_hat = Some(sigma_hat);
        Ok(self)
    }

    pub fn replicates(&self) -> u32 {
        self.cells[0].len() as u32
    }

    pub fn cells(&self) -> &[Vec<f64>; 4] {
        &self.cells
    }
}

/// Least-squares estimates and derived statistics.
#[derive(Debug, Clone)]
pub struct Estimates {
    /// (beta0, beta1, beta2, beta12)
    pub beta_hat: [f64; 4],
    /// Cell means in the order (theta00, theta10, theta01, theta11).
    pub theta_hat: [f64; 4],
    pub sigma_hat: f64,
    /// Pooled scale estimate under the zero-interaction restriction.
    pub sigma_tilde: f64,
    /// beta12_hat / (sigma_hat sqrt(v55)); the preliminary-test statistic.
    pub t_stat: f64,
}

/// Fit the saturated model by the orthogonal-design contrasts.
pub fn fit(data: &FactorialDataset, config: &ModelConfig) -> Result<Estimates, Error> {
    if data.replicates() != config.c() {
        return Err(Error::Data(format!(
            "dataset has {} replicates per cell but the configuration says {}",
            data.replicates(),
            config.c()
        )));
    }
    match config.sigma_mode() {
        SigmaMode::External(_) if data.external_sigma_hat.is_none() => {
            return Err(Error::invalid(
                "sigma",
                "external mode requires an external scale estimate",
            ));
        }
        SigmaMode::Internal if data.external_sigma_hat.is_some() => {
            return Err(Error::invalid(
                "sigma",
                "internal mode must not carry an external scale estimate",
            ));
        }
        _ => {}
    }
    let means: Vec<f64> = data
        .cells
        .iter()
        .map(|v| v.iter().sum::<f64>() / v.len() as f64)
        .collect();
    let (m00, m10, m01, m11) = (means[0], means[1], means[2], means[3]);
    // contrast coefficients +-1/4 on the cell means
    let beta0 = (m00 + m10 + m01 + m11) / 4.0;
    let beta1 = (-m00 + m10 - m01 + m11) / 4.0;
    let beta2 = (-m00 - m10 + m01 + m11) / 4.0;
    let beta12 = (m00 - m10 - m01 + m11) / 4.0;
    let theta_hat = [m00, m10, m01, m11];

    let c = config.c() as f64;
    let sigma_hat = match config.sigma_mode() {
        SigmaMode::Internal => {
            let rss: f64 = data
                .cells
                .iter()
                .zip(&means)
                .map(|(v, &m)| v.iter().map(|y| (y - m) * (y - m)).sum::<f64>())
                .sum();
            (rss / (4.0 * c - 4.0)).sqrt()
        }
        SigmaMode::External(_) => data.external_sigma_hat.expect("checked above"),
    };

    let v55 = config.v55();
    let t_stat = if sigma_hat > 0.0 {
        beta12 / (sigma_hat * v55.sqrt())
    } else if beta12 == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(beta12)
    };

    // pooled update of the scale when the interaction is pinned at zero
    let m_dof = match config.sigma_mode() {
        SigmaMode::Internal => Dof::Finite(4 * config.c() - 4),
        SigmaMode::External(m) => m,
    };
    let sigma_tilde = match m_dof {
        Dof::Finite(n) => {
            let nf = n as f64;
            (((nf * sigma_hat * sigma_hat) + beta12 * beta12 / v55) / (nf + 1.0)).sqrt()
        }
        Dof::Infinite => sigma_hat,
    };

    Ok(Estimates {
        beta_hat: [beta0, beta1, beta2, beta12],
        theta_hat,
        sigma_hat,
        sigma_tilde,
        t_stat,
    })
}

/// Which construction produced a cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeKind {
    Standard,
    Naive,
    New,
}

impl std::fmt::Display for CubeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CubeKind::Standard => "standard",
            CubeKind::Naive => "naive",
            CubeKind::New => "new",
        };
        write!(f, "{s}")
    }
}

/// Four equal-half-width intervals and their volume relative to the
/// standard cube.
#[derive(Debug, Clone)]
pub struct CubeResult {
    pub kind: CubeKind,
    /// (center, half_width) in the order (theta00, theta10, theta01, theta11).
    pub intervals: [(f64, f64); 4],
    pub volume: f64,
    pub volume_ratio_vs_standard: f64,
}

impl CubeResult {
    pub fn half_width(&self) -> f64 {
        self.intervals[0].1
    }

    fn from_centers(kind: CubeKind, centers: [f64; 4], half: f64, std_half: f64) -> Self {
        let volume = (2.0 * half).powi(4);
        let std_volume = (2.0 * std_half).powi(4);
        CubeResult {
            kind,
            intervals: [
                (centers[0], half),
                (centers[1], half),
                (centers[2], half),
                (centers[3], half),
            ],
            volume,
            volume_ratio_vs_standard: if std_volume > 0.0 {
                volume / std_volume
            } else {
                1.0
            },
        }
    }
}

/// The standard simultaneous cube: centers at the cell means, half-width
/// d sqrt(v11) sigma_hat.
pub fn standard_cube(
    est: &Estimates,
    constants: &CriticalConstants,
    config: &ModelConfig,
) -> CubeResult {
    let half = constants.d * config.v11().sqrt() * est.sigma_hat;
    CubeResult::from_centers(CubeKind::Standard, est.theta_hat, half, half)
}

/// The cube of the family (b, s): centers shifted by -+ sqrt(v11) sigma_hat
/// b(t) with sign pattern (-, +, +, -), common half-width
/// sqrt(v11) sigma_hat s(|t|).
pub fn general_cube(est: &Estimates, fns: &BsFunctions, config: &ModelConfig) -> CubeResult {
    let scale = config.v11().sqrt() * est.sigma_hat;
    let t = est.t_stat;
    let shift = scale * fns.eval_b(t);
    let half = scale * fns.eval_s(t.abs());
    let centers = [
        est.theta_hat[0] - shift,
        est.theta_hat[1] + shift,
        est.theta_hat[2] + shift,
        est.theta_hat[3] - shift,
    ];
    let std_half = fns.d() * scale;
    let kind = match fns {
        BsFunctions::Standard { .. } => CubeKind::Standard,
        BsFunctions::Naive(_) => CubeKind::Naive,
        BsFunctions::Spline(_) => CubeKind::New,
    };
    CubeResult::from_centers(kind, centers, half, std_half)
}

/// The cube obtained after the preliminary t-test of zero interaction.
pub fn naive_cube(
    est: &Estimates,
    constants: &CriticalConstants,
    config: &ModelConfig,
) -> CubeResult {
    let fns = BsFunctions::naive(constants.q, constants.d, constants.d_tilde, config.nu());
    general_cube(est, &fns, config)
}
