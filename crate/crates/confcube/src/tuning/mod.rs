//! The function pair (b, s) that defines a cube family: `b` shifts the four
//! interval centers as an odd function of the standardized interaction
//! estimate, `s` scales the common half-width. Three forms exist: the
//! optimized cubic-spline form, the discontinuous piecewise form implied by a
//! preliminary t-test (kept only as a baseline), and the standard form
//! b = 0, s = d.

pub mod spline;

use crate::error::Error;
use crate::stats::Dof;
use serde::{Deserialize, Serialize};
use spline::{Boundary, CubicSpline};

/// Optimization hyperparameters: cutoff `r`, Lebesgue weight `lambda`, and
/// the knot grid `0 = x_1 < ... < x_m = r`.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningSpec {
    r: f64,
    lambda: f64,
    knots: Vec<f64>,
}

impl TuningSpec {
    pub fn new(r: f64, lambda: f64, knots: Vec<f64>) -> Result<Self, Error> {
        if !(r > 0.0) {
            return Err(Error::invalid("r", "cutoff must be positive"));
        }
        if !(lambda >= 0.0) {
            return Err(Error::invalid("lambda", "weight must be nonnegative"));
        }
        if knots.len() < 3 {
            return Err(Error::invalid("knots", "need at least three knots"));
        }
        if knots[0] != 0.0 {
            return Err(Error::invalid("knots", "first knot must be 0"));
        }
        if *knots.last().unwrap() != r {
            return Err(Error::invalid("knots", format!("last knot must equal r = {r}")));
        }
        if !knots.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::invalid("knots", "knots must be strictly increasing"));
        }
        Ok(TuningSpec { r, lambda, knots })
    }

    /// Evenly spaced knots 0, r/(m-1), ..., r.
    pub fn uniform(r: f64, lambda: f64, m: usize) -> Result<Self, Error> {
        if m < 3 {
            return Err(Error::invalid("knots", "need at least three knots"));
        }
        let knots = (0..m).map(|i| r * i as f64 / (m - 1) as f64).collect();
        TuningSpec::new(r, lambda, knots)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of knots m.
    pub fn m(&self) -> usize {
        self.knots.len()
    }

    /// Dimension of the free parameter vector: b at x_2..x_{m-1} and s at
    /// x_1..x_{m-1}.
    pub fn free_dim(&self) -> usize {
        2 * self.m() - 3
    }
}

/// Spline-form functions: b interpolates (0, b_2, ..., b_{m-1}, 0) as an odd
/// clamped spline, s interpolates (s_1, ..., s_{m-1}, d) as a natural spline.
#[derive(Debug, Clone)]
pub struct SplineFns {
    spec: TuningSpec,
    b_values: Vec<f64>,
    s_values: Vec<f64>,
    d: f64,
    b_spline: CubicSpline,
    s_spline: CubicSpline,
}

impl SplineFns {
    pub fn spec(&self) -> &TuningSpec {
        &self.spec
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b_values
    }

    pub fn s_values(&self) -> &[f64] {
        &self.s_values
    }
}

/// Piecewise form implied by a preliminary t-test at threshold `q`.
#[derive(Debug, Clone)]
pub struct NaiveFns {
    pub q: f64,
    pub d: f64,
    pub d_tilde: f64,
    pub nu: Dof,
}

impl NaiveFns {
    /// Half-width multiplier on the accepted branch. The branch formula has
    /// the scale factor sqrt((nu + x^2)/(nu + 1)), which tends to 1 as nu
    /// grows.
    fn s_accepted(&self, x: f64) -> f64 {
        let scale = match self.nu {
            Dof::Finite(n) => {
                let nu = n as f64;
                ((nu + x * x) / (nu + 1.0)).sqrt()
            }
            Dof::Infinite => 1.0,
        };
        self.d_tilde * (3.0_f64.sqrt() / 2.0) * scale
    }
}

/// A cube family: the three supported forms behind one evaluation surface.
#[derive(Debug, Clone)]
pub enum BsFunctions {
    Spline(SplineFns),
    Naive(NaiveFns),
    Standard { d: f64 },
}

impl BsFunctions {
    /// Build the spline form. `b_values` hold b at the interior knots
    /// x_2..x_{m-1}; `s_values` hold s at x_1..x_{m-1}; s(x_m) = d.
    pub fn spline(
        spec: TuningSpec,
        b_values: Vec<f64>,
        s_values: Vec<f64>,
        d: f64,
    ) -> Result<Self, Error> {
        let m = spec.m();
        if b_values.len() != m - 2 {
            return Err(Error::invalid(
                "b_values",
                format!("expected {} values (interior knots), got {}", m - 2, b_values.len()),
            ));
        }
        if s_values.len() != m - 1 {
            return Err(Error::invalid(
                "s_values",
                format!("expected {} values, got {}", m - 1, s_values.len()),
            ));
        }
        if !(d > 0.0) {
            return Err(Error::invalid("d", "critical constant must be positive"));
        }
        if s_values.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::invalid("s_values", "half-width values must be positive"));
        }
        // b over [0, r]: odd symmetry through the origin makes a natural
        // condition at 0 equivalent to clamping the full symmetric spline,
        // and the right end is clamped flat so b joins 0 smoothly at r
        let mut b_full = Vec::with_capacity(m);
        b_full.push(0.0);
        b_full.extend_from_slice(&b_values);
        b_full.push(0.0);
        let b_spline = CubicSpline::new(spec.knots(), &b_full, Boundary::Natural, Boundary::Clamped(0.0));
        let mut s_full = Vec::with_capacity(m);
        s_full.extend_from_slice(&s_values);
        s_full.push(d);
        let s_spline = CubicSpline::new(spec.knots(), &s_full, Boundary::Natural, Boundary::Natural);
        Ok(BsFunctions::Spline(SplineFns {
            spec,
            b_values,
            s_values,
            d,
            b_spline,
            s_spline,
        }))
    }

    pub fn naive(q: f64, d: f64, d_tilde: f64, nu: Dof) -> Self {
        BsFunctions::Naive(NaiveFns { q, d, d_tilde, nu })
    }

    pub fn standard(d: f64) -> Self {
        BsFunctions::Standard { d }
    }

    /// The spline form that coincides with the standard cube: b = 0, s = d.
    pub fn standard_equivalent_spline(spec: TuningSpec, d: f64) -> Result<Self, Error> {
        let m = spec.m();
        BsFunctions::spline(spec, vec![0.0; m - 2], vec![d; m - 1], d)
    }

    /// Center-shift function; odd, zero beyond the cutoff.
    pub fn eval_b(&self, x: f64) -> f64 {
        match self {
            BsFunctions::Standard { .. } => 0.0,
            BsFunctions::Naive(n) => {
                if x.abs() <= n.q {
                    x / 2.0
                } else {
                    0.0
                }
            }
            BsFunctions::Spline(s) => {
                let ax = x.abs();
                if ax >= s.spec.r {
                    0.0
                } else {
                    let v = s.b_spline.eval(ax);
                    if x < 0.0 {
                        -v
                    } else {
                        v
                    }
                }
            }
        }
    }

    /// Half-width multiplier; defined for x >= 0, equal to `d` beyond the
    /// cutoff. Panics on negative input.
    pub fn eval_s(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "eval_s domain error: x = {x} is negative");
        match self {
            BsFunctions::Standard { d } => *d,
            BsFunctions::Naive(n) => {
                if x > n.q {
                    n.d
                } else {
                    n.s_accepted(x)
                }
            }
            BsFunctions::Spline(s) => {
                if x >= s.spec.r {
                    s.d
                } else {
                    s.s_spline.eval(x)
                }
            }
        }
    }

    /// Interval endpoints (l(h, w), u(h, w)) in standardized units.
    pub fn lower_upper(&self, h: f64, w: f64) -> (f64, f64) {
        assert!(w > 0.0, "scale w must be positive, got {w}");
        let x = h / w;
        let b = self.eval_b(x);
        let s = self.eval_s(x.abs());
        ((b - s) * w, (b + s) * w)
    }

    /// The critical constant d (the value of s at and beyond the cutoff).
    pub fn d(&self) -> f64 {
        match self {
            BsFunctions::Standard { d } => *d,
            BsFunctions::Naive(n) => n.d,
            BsFunctions::Spline(s) => s.d,
        }
    }

    /// Radius beyond which the family coincides with the standard cube:
    /// r for splines, q for the test-based form, 0 for the standard form.
    pub fn cutoff(&self) -> f64 {
        match self {
            BsFunctions::Standard { .. } => 0.0,
            BsFunctions::Naive(n) => n.q,
            BsFunctions::Spline(s) => s.spec.r,
        }
    }

    /// Breakpoints on [0, cutoff] where b or s may lose smoothness (knots,
    /// or the test threshold). Empty for the standard form.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            BsFunctions::Standard { .. } => Vec::new(),
            BsFunctions::Naive(n) => vec![0.0, n.q],
            BsFunctions::Spline(s) => s.spec.knots().to_vec(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BsFunctions::Spline(_) => "SPLINE",
            BsFunctions::Naive(_) => "NAIVE",
            BsFunctions::Standard { .. } => "STANDARD",
        }
    }
}

/// Flat on-disk record for a cube family: the artifact written by `optimize`
/// and consumed by `evaluate` and `cube`. Fields irrelevant to a kind are
/// omitted; optional metadata records how an optimized record was produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BsRecord {
    pub kind: String,
    pub alpha: f64,
    pub nu: Dof,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_values: Option<Vec<f64>>,
    pub d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_coverage: Option<f64>,
}

impl BsRecord {
    pub fn from_fns(fns: &BsFunctions, alpha: f64, nu: Dof) -> Self {
        let mut rec = BsRecord {
            kind: fns.kind_name().to_string(),
            alpha,
            nu,
            r: None,
            lambda: None,
            knots: None,
            b_values: None,
            s_values: None,
            d: fns.d(),
            d_tilde: None,
            q: None,
            seed: None,
            budget: None,
            converged: None,
            criterion: None,
            min_coverage: None,
        };
        match fns {
            BsFunctions::Spline(s) => {
                rec.r = Some(s.spec.r());
                rec.lambda = Some(s.spec.lambda());
                rec.knots = Some(s.spec.knots().to_vec());
                rec.b_values = Some(s.b_values.clone());
                rec.s_values = Some(s.s_values.clone());
            }
            BsFunctions::Naive(n) => {
                rec.d_tilde = Some(n.d_tilde);
                rec.q = Some(n.q);
            }
            BsFunctions::Standard { .. } => {}
        }
        rec
    }

    pub fn to_fns(&self) -> Result<BsFunctions, Error> {
        let need = |opt: Option<&f64>, field: &str| -> Result<f64, Error> {
            opt.copied()
                .ok_or_else(|| Error::Parse(format!("missing field `{field}` for kind {}", self.kind)))
        };
        match self.kind.as_str() {
            "STANDARD" => Ok(BsFunctions::standard(self.d)),
            "NAIVE" => {
                let q = need(self.q.as_ref(), "q")?;
                let d_tilde = need(self.d_tilde.as_ref(), "d_tilde")?;
                Ok(BsFunctions::naive(q, self.d, d_tilde, self.nu))
            }
            "SPLINE" => {
                let r = need(self.r.as_ref(), "r")?;
                let lambda = need(self.lambda.as_ref(), "lambda")?;
                let knots = self
                    .knots
                    .clone()
                    .ok_or_else(|| Error::Parse("missing field `knots` for kind SPLINE".into()))?;
                let b_values = self
                    .b_values
                    .clone()
                    .ok_or_else(|| Error::Parse("missing field `b_values` for kind SPLINE".into()))?;
                let s_values = self
                    .s_values
                    .clone()
                    .ok_or_else(|| Error::Parse("missing field `s_values` for kind SPLINE".into()))?;
                let spec = TuningSpec::new(r, lambda, knots)
                    .map_err(|e| Error::Parse(format!("invalid spline record: {e}")))?;
                BsFunctions::spline(spec, b_values, s_values, self.d)
                    .map_err(|e| Error::Parse(format!("invalid spline record: {e}")))
            }
            other => Err(Error::Parse(format!(
                "unknown kind `{other}` (expected SPLINE, NAIVE, or STANDARD)"
            ))),
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), Error> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sample_spline() -> BsFunctions {
        let spec = TuningSpec::uniform(8.0, 0.08, 7).unwrap();
        let d = 4.0030417;
        BsFunctions::spline(
            spec,
            vec![0.9, 1.1, 0.7, 0.3, 0.1],
            vec![3.6, 3.7, 4.1, 4.2, 4.1, 4.05],
            d,
        )
        .unwrap()
    }

    #[test]
    fn tuning_spec_validation() {
        assert!(TuningSpec::new(8.0, 0.08, vec![0.0, 4.0, 8.0]).is_ok());
        assert!(TuningSpec::new(8.0, 0.08, vec![0.0, 8.0]).is_err());
        assert!(TuningSpec::new(8.0, 0.08, vec![0.1, 4.0, 8.0]).is_err());
        assert!(TuningSpec::new(8.0, 0.08, vec![0.0, 4.0, 7.0]).is_err());
        assert!(TuningSpec::new(8.0, 0.08, vec![0.0, 5.0, 4.0, 8.0]).is_err());
        assert!(TuningSpec::new(8.0, -0.1, vec![0.0, 4.0, 8.0]).is_err());
        let u = TuningSpec::uniform(8.0, 0.08, 7).unwrap();
        assert_eq!(u.knots().len(), 7);
        assert_abs_diff_eq!(u.knots()[1], 8.0 / 6.0, epsilon = 1e-15);
        assert_eq!(u.free_dim(), 11);
    }

    #[test]
    fn standard_b_is_zero_and_s_is_d() {
        let f = BsFunctions::standard(2.5);
        for &x in &[-3.0, 0.0, 1.7, 100.0] {
            assert_eq!(f.eval_b(x), 0.0);
        }
        assert_eq!(f.eval_s(3.0), 2.5);
        assert_eq!(f.eval_s(0.0), 2.5);
    }

    #[test]
    fn naive_b_follows_halved_identity_inside_threshold() {
        let f = BsFunctions::naive(2.776, 4.0030417, 3.5265553, Dof::Finite(4));
        assert_abs_diff_eq!(f.eval_b(1.0), 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(f.eval_b(-1.0), -0.5, epsilon = 0.0);
        assert_eq!(f.eval_b(2.8), 0.0);
        // the threshold itself belongs to the accepted branch
        assert_abs_diff_eq!(f.eval_b(2.776), 1.388, epsilon = 1e-12);
    }

    #[test]
    fn naive_s_discontinuity_at_threshold() {
        let (q, d, dt) = (2.7764451051977987, 4.003041707160898, 3.5265553312914344);
        let f = BsFunctions::naive(q, d, dt, Dof::Finite(4));
        let expected_low = dt * (3.0_f64.sqrt() / 2.0) * ((4.0 + q * q) / 5.0).sqrt();
        assert_abs_diff_eq!(f.eval_s(q), expected_low, epsilon = 1e-12);
        assert_eq!(f.eval_s(q + 1e-12), d);
        assert!((f.eval_s(q) - d).abs() > 0.5, "jump is genuine");
        // infinite-dof variant drops the x-dependent scale factor
        let fi = BsFunctions::naive(1.96, 2.4909, 2.4685, Dof::Infinite);
        assert_abs_diff_eq!(fi.eval_s(0.3), 2.4685 * 3.0_f64.sqrt() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spline_with_zero_b_data_is_zero() {
        let spec = TuningSpec::uniform(8.0, 0.08, 7).unwrap();
        let f = BsFunctions::spline(spec, vec![0.0; 5], vec![4.0; 6], 4.0).unwrap();
        let mut x = -9.0;
        while x < 9.0 {
            assert_abs_diff_eq!(f.eval_b(x), 0.0, epsilon = 0.0);
            assert_abs_diff_eq!(f.eval_s(x.abs()), 4.0, epsilon = 1e-12);
            x += 0.173;
        }
    }

    #[test]
    fn spline_reproduces_knot_values() {
        let f = sample_spline();
        let (spec, b_vals, s_vals) = match &f {
            BsFunctions::Spline(s) => (s.spec.clone(), s.b_values.clone(), s.s_values.clone()),
            _ => unreachable!(),
        };
        for (i, &k) in spec.knots().iter().enumerate() {
            let expected_b = if i == 0 || i == spec.m() - 1 {
                0.0
            } else {
                b_vals[i - 1]
            };
            assert_abs_diff_eq!(f.eval_b(k), expected_b, epsilon = 1e-12);
            let expected_s = if i == spec.m() - 1 { f.d() } else { s_vals[i] };
            assert_abs_diff_eq!(f.eval_s(k), expected_s, epsilon = 1e-12);
        }
    }

    #[test]
    fn oddness_is_exact() {
        let f = sample_spline();
        let mut x = 0.0123;
        for _ in 0..1000 {
            x = (x * 1.019 + 0.0137) % 9.0;
            let lhs = f.eval_b(x);
            let rhs = -f.eval_b(-x);
            assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0));
        }
        assert_eq!(f.eval_b(0.0), 0.0);
    }

    #[test]
    fn restriction_beyond_cutoff() {
        let f = sample_spline();
        let r = f.cutoff();
        for &x in &[r, 1.5 * r, 10.0 * r] {
            assert_eq!(f.eval_b(x), 0.0);
            assert_eq!(f.eval_b(-x), 0.0);
            assert_eq!(f.eval_s(x), f.d());
        }
    }

    #[test]
    fn clamped_end_slope_of_b() {
        let f = sample_spline();
        let r = f.cutoff();
        let h = 1e-5;
        // one-sided interior derivative at r (b is 0 outside)
        let deriv = (f.eval_b(r - h) - f.eval_b(r - 2.0 * h)) / h;
        assert_abs_diff_eq!(deriv, 0.0, epsilon = 1e-4);
        let exact = match &f {
            BsFunctions::Spline(s) => s.b_spline.deriv(r),
            _ => unreachable!(),
        };
        assert_abs_diff_eq!(exact, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn continuity_near_knots() {
        let f = sample_spline();
        let knots: Vec<f64> = match &f {
            BsFunctions::Spline(s) => s.spec.knots().to_vec(),
            _ => unreachable!(),
        };
        for &k in &knots {
            for sign in [-1.0, 1.0] {
                let a = k + sign * 1e-11;
                let b_jump = (f.eval_b(a) - f.eval_b(k)).abs();
                assert!(b_jump <= 1e-10, "b jump {b_jump} near knot {k}");
                if k >= 0.0 && a >= 0.0 {
                    let s_jump = (f.eval_s(a) - f.eval_s(k)).abs();
                    assert!(s_jump <= 1e-10, "s jump {s_jump} near knot {k}");
                }
            }
        }
    }

    #[test]
    fn lower_upper_shapes() {
        let d = 2.4909;
        let std = BsFunctions::standard(d);
        let (l, u) = std.lower_upper(0.37, 1.3);
        assert_abs_diff_eq!(l, -d * 1.3, epsilon = 1e-12);
        assert_abs_diff_eq!(u, d * 1.3, epsilon = 1e-12);

        let f = sample_spline();
        let (l0, u0) = f.lower_upper(0.0, 0.9);
        assert_abs_diff_eq!(l0, -u0, epsilon = 1e-12);
        // knot interpolation property carried through l and u
        let w = 0.8;
        let xj = 8.0 / 6.0;
        let (l, u) = f.lower_upper(w * xj, w);
        let (bj, sj) = (f.eval_b(xj), f.eval_s(xj));
        assert_abs_diff_eq!(l, (bj - sj) * w, epsilon = 1e-12);
        assert_abs_diff_eq!(u, (bj + sj) * w, epsilon = 1e-12);
    }

    #[test]
    #[should_panic(expected = "domain error")]
    fn eval_s_rejects_negative() {
        sample_spline().eval_s(-0.1);
    }

    #[test]
    fn record_round_trip_spline() {
        let f = sample_spline();
        let rec = BsRecord::from_fns(&f, 0.05, Dof::Finite(4));
        let json = serde_json::to_string(&rec).unwrap();
        let back: BsRecord = serde_json::from_str(&json).unwrap();
        let g = back.to_fns().unwrap();
        let mut x = -9.0;
        while x < 9.0 {
            assert_eq!(f.eval_b(x), g.eval_b(x));
            assert_eq!(f.eval_s(x.abs()), g.eval_s(x.abs()));
            x += 0.31;
        }
    }

    #[test]
    fn record_missing_field_names_offender() {
        let rec = BsRecord {
            kind: "SPLINE".into(),
            alpha: 0.05,
            nu: Dof::Finite(4),
            r: Some(8.0),
            lambda: Some(0.08),
            knots: None,
            b_values: None,
            s_values: None,
            d: 4.0,
            d_tilde: None,
            q: None,
            seed: None,
            budget: None,
            converged: None,
            criterion: None,
            min_coverage: None,
        };
        let err = rec.to_fns().unwrap_err().to_string();
        assert!(err.contains("knots"), "error was: {err}");
        let mut bad = rec.clone();
        bad.kind = "CUBIC".into();
        assert!(bad.to_fns().unwrap_err().to_string().contains("CUBIC"));
    }

    proptest! {
        #[test]
        fn oddness_property(x in -12.0f64..12.0) {
            let f = sample_spline();
            prop_assert!((f.eval_b(x) + f.eval_b(-x)).abs() <= 1e-14);
        }

        #[test]
        fn lower_below_upper(h in -10.0f64..10.0, w in 0.05f64..3.0) {
            let f = sample_spline();
            let (l, u) = f.lower_upper(h, w);
            prop_assert!(l < u);
        }
    }
}
