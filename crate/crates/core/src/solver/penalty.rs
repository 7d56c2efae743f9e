//! LASSO, SCAD and MCP penalties and their univariate thresholding rules.

use std::fmt;
use std::str::FromStr;

use super::{Coefficients, SolverError};

pub const DEFAULT_SCAD_A: f64 = 3.7;
pub const DEFAULT_MCP_GAMMA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyKind {
    Lasso,
    Scad,
    Mcp,
}

impl PenaltyKind {
    pub const ALL: [PenaltyKind; 3] = [PenaltyKind::Lasso, PenaltyKind::Scad, PenaltyKind::Mcp];

    pub fn name(self) -> &'static str {
        match self {
            PenaltyKind::Lasso => "LASSO",
            PenaltyKind::Scad => "SCAD",
            PenaltyKind::Mcp => "MCP",
        }
    }
}

impl fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PenaltyKind {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lasso" => Ok(PenaltyKind::Lasso),
            "scad" => Ok(PenaltyKind::Scad),
            "mcp" => Ok(PenaltyKind::Mcp),
            _ => Err(SolverError::InvalidPenalty(format!("unknown penalty '{s}' (expected lasso, scad or mcp)"))),
        }
    }
}

/// Penalty family with its shape parameters. `a` is used only by SCAD and
/// `gamma` only by MCP.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    pub a: f64,
    pub gamma: f64,
}

impl PenaltySpec {
    /// The family with default shapes `a = 3.7`, `gamma = 3`.
    pub fn new(kind: PenaltyKind) -> Self {
        PenaltySpec { kind, a: DEFAULT_SCAD_A, gamma: DEFAULT_MCP_GAMMA }
    }

    pub fn lasso() -> Self {
        Self::new(PenaltyKind::Lasso)
    }

    pub fn scad(a: f64) -> Result<Self, SolverError> {
        PenaltySpec { a, ..Self::new(PenaltyKind::Scad) }.validated()
    }

    pub fn mcp(gamma: f64) -> Result<Self, SolverError> {
        PenaltySpec { gamma, ..Self::new(PenaltyKind::Mcp) }.validated()
    }

    pub fn validated(self) -> Result<Self, SolverError> {
        match self.kind {
            PenaltyKind::Scad if !(self.a > 2.0 && self.a.is_finite()) => {
                Err(SolverError::InvalidPenalty(format!("SCAD requires a > 2, got {}", self.a)))
            }
            PenaltyKind::Mcp if !(self.gamma > 0.0 && self.gamma.is_finite()) => {
                Err(SolverError::InvalidPenalty(format!("MCP requires gamma > 0, got {}", self.gamma)))
            }
            _ => Ok(self),
        }
    }

    /// Penalty of a single coefficient.
    pub fn value_at(&self, theta: f64, lambda: f64) -> f64 {
        let t = theta.abs();
        match self.kind {
            PenaltyKind::Lasso => lambda * t,
            PenaltyKind::Scad => {
                let a = self.a;
                if t <= lambda {
                    lambda * t
                } else if t <= a * lambda {
                    -(t * t - 2.0 * a * lambda * t + lambda * lambda) / (2.0 * (a - 1.0))
                } else {
                    (a + 1.0) * lambda * lambda / 2.0
                }
            }
            PenaltyKind::Mcp => {
                let g = self.gamma;
                if t <= g * lambda {
                    lambda * t - t * t / (2.0 * g)
                } else {
                    g * lambda * lambda / 2.0
                }
            }
        }
    }

    /// Pieces `(lo, hi, quad, lin, constant)` with `P(t) = quad t^2 + lin t + constant`
    /// on `[lo, hi]`, `t >= 0`.
    fn pieces(&self, lambda: f64) -> Vec<(f64, f64, f64, f64, f64)> {
        match self.kind {
            PenaltyKind::Lasso => vec![(0.0, f64::INFINITY, 0.0, lambda, 0.0)],
            PenaltyKind::Scad => {
                let a = self.a;
                let am1 = a - 1.0;
                vec![
                    (0.0, lambda, 0.0, lambda, 0.0),
                    (lambda, a * lambda, -0.5 / am1, a * lambda / am1, -lambda * lambda / (2.0 * am1)),
                    (a * lambda, f64::INFINITY, 0.0, 0.0, (a + 1.0) * lambda * lambda / 2.0),
                ]
            }
            PenaltyKind::Mcp => {
                let g = self.gamma;
                vec![
                    (0.0, g * lambda, -0.5 / g, lambda, 0.0),
                    (g * lambda, f64::INFINITY, 0.0, 0.0, g * lambda * lambda / 2.0),
                ]
            }
        }
    }
}

/// Penalty summed over the slopes; the intercept is never penalized.
pub fn penalty_value(coefs: &Coefficients, spec: &PenaltySpec, lambda: f64) -> f64 {
    coefs.slopes().iter().map(|&t| spec.value_at(t, lambda)).sum()
}

/// Soft-thresholding operator `sign(z) (|z| - lambda)_+`.
#[inline]
pub fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

/// Minimizer of `0.5 (theta - z)^2 + P_lambda(theta)`.
///
/// Uses the closed-form LASSO/SCAD/MCP rules when the univariate problem is
/// convex (`a > 2`, `gamma > 1`); for `gamma <= 1` the global minimizer is
/// found among the piecewise candidates.
pub fn scalar_update(z: f64, lambda: f64, spec: &PenaltySpec) -> f64 {
    match spec.kind {
        PenaltyKind::Lasso => soft_threshold(z, lambda),
        PenaltyKind::Scad => {
            let a = spec.a;
            let t = z.abs();
            if t <= 2.0 * lambda {
                soft_threshold(z, lambda)
            } else if t <= a * lambda {
                soft_threshold(z, a * lambda / (a - 1.0)) / (1.0 - 1.0 / (a - 1.0))
            } else {
                z
            }
        }
        PenaltyKind::Mcp if spec.gamma > 1.0 => {
            if z.abs() <= spec.gamma * lambda {
                soft_threshold(z, lambda) / (1.0 - 1.0 / spec.gamma)
            } else {
                z
            }
        }
        PenaltyKind::Mcp => scalar_update_weighted(z, lambda, 1.0, spec),
    }
}

/// Minimizer of `0.5 v (theta - z)^2 + P_lambda(theta)` for curvature `v > 0`.
///
/// Each quadratic piece of the penalty is minimized in closed form and the
/// best candidate wins; ties go to the smaller magnitude.
pub fn scalar_update_weighted(z: f64, lambda: f64, v: f64, spec: &PenaltySpec) -> f64 {
    let s = z.abs();
    let objective = |t: f64| 0.5 * v * (t - s) * (t - s) + spec.value_at(t, lambda);
    let mut best_t = 0.0;
    let mut best_val = objective(0.0);
    for (lo, hi, quad, lin, _) in spec.pieces(lambda) {
        if hi <= lo {
            continue;
        }
        let curvature = 0.5 * v + quad;
        let mut candidates = [lo, hi, f64::NAN];
        if curvature > 0.0 {
            candidates[2] = ((v * s - lin) / (2.0 * curvature)).clamp(lo, hi);
        }
        for t in candidates {
            if !t.is_finite() {
                continue;
            }
            let val = objective(t);
            if val < best_val || (val == best_val && t < best_t) {
                best_val = val;
                best_t = t;
            }
        }
    }
    if best_t == 0.0 {
        0.0
    } else {
        best_t.copysign(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn scad() -> PenaltySpec {
        PenaltySpec::new(PenaltyKind::Scad)
    }
    fn mcp() -> PenaltySpec {
        PenaltySpec::new(PenaltyKind::Mcp)
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("MCP".parse::<PenaltyKind>().unwrap(), PenaltyKind::Mcp);
        assert_eq!("lasso".parse::<PenaltyKind>().unwrap(), PenaltyKind::Lasso);
        assert!("ridge".parse::<PenaltyKind>().is_err());
    }

    #[test]
    fn shape_validation() {
        assert!(PenaltySpec::scad(2.0).is_err());
        assert!(PenaltySpec::scad(2.01).is_ok());
        assert!(PenaltySpec::mcp(0.0).is_err());
        assert!(PenaltySpec::mcp(0.5).is_ok());
    }

    #[test]
    fn penalty_values() {
        let zero = Coefficients::new(DVector::from_vec(vec![7.0, 0.0, 0.0]));
        for spec in [PenaltySpec::lasso(), scad(), mcp()] {
            assert_eq!(penalty_value(&zero, &spec, 1.3), 0.0);
        }
        let five = Coefficients::new(DVector::from_vec(vec![100.0, 5.0]));
        assert!((penalty_value(&five, &scad(), 1.0) - 2.35).abs() < 1e-12);
        let one = Coefficients::new(DVector::from_vec(vec![-3.0, 1.0]));
        assert!((penalty_value(&one, &mcp(), 1.0) - (1.0 - 1.0 / 6.0)).abs() < 1e-12);
        let lasso = Coefficients::new(DVector::from_vec(vec![9.0, 1.0, -2.0]));
        assert!((penalty_value(&lasso, &PenaltySpec::lasso(), 0.5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn scad_is_continuous_at_knots() {
        let spec = scad();
        for &lambda in &[0.3, 1.0, 2.5] {
            for knot in [lambda, spec.a * lambda] {
                let lo = spec.value_at(knot * (1.0 - 1e-12), lambda);
                let hi = spec.value_at(knot * (1.0 + 1e-12), lambda);
                assert!((lo - hi).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mcp_matches_integral_form() {
        // lambda * ∫_0^|t| (1 - u/(gamma lambda))_+ du by midpoint rule
        let spec = mcp();
        for &(t, lambda) in &[(1.0, 1.0), (0.4, 0.2), (5.0, 1.0), (2.9, 1.0)] {
            let steps = 200_000;
            let h: f64 = t / steps as f64;
            let integral: f64 = (0..steps)
                .map(|k| {
                    let u = (k as f64 + 0.5) * h;
                    (1.0 - u / (spec.gamma * lambda)).max(0.0)
                })
                .sum::<f64>()
                * h
                * lambda;
            assert!((spec.value_at(t, lambda) - integral).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn scalar_update_examples() {
        assert!((scalar_update(3.0, 1.0, &PenaltySpec::lasso()) - 2.0).abs() < 1e-15);
        assert!((scalar_update(2.0, 1.0, &mcp()) - 1.5).abs() < 1e-15);
        for spec in [PenaltySpec::lasso(), scad(), mcp()] {
            assert_eq!(scalar_update(0.0, 0.7, &spec), 0.0);
        }
        // beyond the concave region SCAD and MCP are unbiased
        assert_eq!(scalar_update(10.0, 1.0, &scad()), 10.0);
        assert_eq!(scalar_update(-10.0, 1.0, &mcp()), -10.0);
    }

    #[test]
    fn closed_form_matches_piecewise_search() {
        for spec in [PenaltySpec::lasso(), scad(), mcp()] {
            for i in -120..=120 {
                let z = i as f64 * 0.05;
                for &lambda in &[0.0, 0.3, 1.0, 2.0] {
                    let a = scalar_update(z, lambda, &spec);
                    let b = scalar_update_weighted(z, lambda, 1.0, &spec);
                    assert!((a - b).abs() < 1e-12, "{:?} z={z} lambda={lambda}: {a} vs {b}", spec.kind);
                }
            }
        }
    }

    #[test]
    fn nonconvex_mcp_is_hard_threshold_like() {
        let spec = PenaltySpec::mcp(0.5).unwrap();
        // gamma < 1: either 0 or z
        for i in -60..=60 {
            let z = i as f64 * 0.1;
            let t = scalar_update(z, 1.0, &spec);
            assert!(t == 0.0 || (t - z).abs() < 1e-12, "z={z} -> {t}");
        }
    }
}
