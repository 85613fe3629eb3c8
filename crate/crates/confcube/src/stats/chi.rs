//! The scale-estimator distribution: W = sigma_hat / sigma, distributed as
//! sqrt(Q/nu) with Q ~ chi^2_nu, plus the degenerate point mass at 1 that
//! stands in for an infinite-precision external scale estimate.

use super::quad::gauss_legendre;
use super::root::find_root;
use super::special::{ln_gamma, reg_gamma_lower};
use crate::error::Error;
use serde::{Deserialize, Serialize};

/// Degrees of freedom: a positive integer or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dof {
    Finite(u32),
    Infinite,
}

impl Dof {
    pub fn is_infinite(self) -> bool {
        matches!(self, Dof::Infinite)
    }

    /// Degrees of freedom increased by one (reduced-model scale estimator).
    pub fn plus_one(self) -> Dof {
        match self {
            Dof::Finite(n) => Dof::Finite(n + 1),
            Dof::Infinite => Dof::Infinite,
        }
    }
}

impl std::fmt::Display for Dof {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dof::Finite(n) => write!(f, "{n}"),
            Dof::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Dof {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinite") {
            return Ok(Dof::Infinite);
        }
        let n: u32 = t
            .parse()
            .map_err(|_| Error::invalid("degrees of freedom", format!("expected a positive integer or 'inf', got '{s}'")))?;
        if n == 0 {
            return Err(Error::invalid("degrees of freedom", "must be at least 1"));
        }
        Ok(Dof::Finite(n))
    }
}

impl Serialize for Dof {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Dof::Finite(n) => s.serialize_u32(*n),
            Dof::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Dof {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => {
                if n == 0 || n > u32::MAX as u64 {
                    Err(D::Error::custom("degrees of freedom out of range"))
                } else {
                    Ok(Dof::Finite(n as u32))
                }
            }
            Raw::Str(s) => s.parse().map_err(D::Error::custom),
        }
    }
}

/// Distribution of W = sigma_hat / sigma.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledChi {
    nu: Dof,
}

impl ScaledChi {
    pub fn new(nu: Dof) -> Self {
        ScaledChi { nu }
    }

    pub fn finite(nu: u32) -> Self {
        assert!(nu >= 1, "degrees of freedom must be at least 1");
        ScaledChi {
            nu: Dof::Finite(nu),
        }
    }

    pub fn infinite() -> Self {
        ScaledChi { nu: Dof::Infinite }
    }

    pub fn nu(&self) -> Dof {
        self.nu
    }

    pub fn is_infinite(&self) -> bool {
        self.nu.is_infinite()
    }

    /// Density of W at w > 0. Callers must branch to the point-mass case
    /// themselves: this panics for infinite degrees of freedom.
    pub fn pdf(&self, w: f64) -> f64 {
        let nu = match self.nu {
            Dof::Finite(n) => n as f64,
            Dof::Infinite => panic!("pdf undefined for a point mass; branch on is_infinite()"),
        };
        if w <= 0.0 {
            return 0.0;
        }
        let ln = (1.0 - nu / 2.0) * std::f64::consts::LN_2 + (nu / 2.0) * nu.ln()
            - ln_gamma(nu / 2.0)
            + (nu - 1.0) * w.ln()
            - nu * w * w / 2.0;
        ln.exp()
    }

    /// P(W <= w), via the regularized incomplete gamma.
    pub fn cdf(&self, w: f64) -> f64 {
        match self.nu {
            Dof::Finite(n) => {
                if w <= 0.0 {
                    0.0
                } else {
                    let nu = n as f64;
                    reg_gamma_lower(nu / 2.0, nu * w * w / 2.0)
                }
            }
            Dof::Infinite => {
                if w < 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Quantile of W by root-finding on the CDF.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1), got {p}");
        match self.nu {
            Dof::Infinite => 1.0,
            Dof::Finite(n) => {
                let nu = n as f64;
                // bracket from the mean +- a generous multiple of the sd of Q
                let mut hi = ((nu + 40.0 * (2.0 * nu).sqrt() + 200.0) / nu).sqrt();
                while self.cdf(hi) < p {
                    hi *= 2.0;
                }
                find_root(|w| self.cdf(w) - p, 1e-150, hi, 1e-12)
                    .expect("chi quantile bracket is valid by construction")
            }
        }
    }

    /// E(W^4) = (nu + 2)/nu, or 1 for the point mass.
    pub fn moment_w4(&self) -> f64 {
        match self.nu {
            Dof::Finite(n) => (n as f64 + 2.0) / n as f64,
            Dof::Infinite => 1.0,
        }
    }

    /// Integration domain [w_lo, w_hi] that carries all but 2e-10 of the mass.
    pub fn truncated_domain(&self) -> (f64, f64) {
        match self.nu {
            Dof::Infinite => (1.0, 1.0),
            Dof::Finite(_) => (self.quantile(1e-10), self.quantile(1.0 - 1e-10)),
        }
    }

    /// Nodes and weights (weight includes the density factor) for
    /// integrating g(w) f_W(w) dw over the truncated domain. For the point
    /// mass this is the single pair (1, 1).
    pub fn weighted_nodes(&self, n: usize) -> Vec<(f64, f64)> {
        match self.nu {
            Dof::Infinite => vec![(1.0, 1.0)],
            Dof::Finite(_) => {
                let (lo, hi) = self.truncated_domain();
                let rule = gauss_legendre(n, lo, hi);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&w, &om)| (w, om * self.pdf(w)))
                    .collect()
            }
        }
    }
}
