use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Slack used when comparing constraint sums against their bounds.
const BOUND_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Equality,
    Inequality,
}

/// `lower <= sum_k coeffs[k] * x_k <= upper`, componentwise over `kappa` rows.
///
/// Equality constraints store `lower == upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    kind: ConstraintKind,
    coeffs: Vec<Vec<f64>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearConstraint {
    /// `coeffs[k]` is the column for variable `x_k`; every column has `kappa` entries.
    pub fn new(kind: ConstraintKind, coeffs: Vec<Vec<f64>>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let kappa = upper.len();
        if kappa == 0 || coeffs.is_empty() {
            return Err(Error::InvalidInstance("constraint needs at least one row and one variable".into()));
        }
        if coeffs.len() > 63 {
            return Err(Error::InvalidInstance("constraint has more than 63 variables".into()));
        }
        if lower.len() != kappa || coeffs.iter().any(|c| c.len() != kappa) {
            return Err(Error::InvalidInstance("constraint rows have inconsistent length".into()));
        }
        let all = coeffs.iter().flatten().chain(&lower).chain(&upper);
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("constraint values must be finite".into()));
        }
        if kind == ConstraintKind::Equality && lower != upper {
            return Err(Error::InvalidInstance("equality constraint needs lower == upper".into()));
        }
        Ok(Self { kind, coeffs, lower, upper })
    }

    pub fn equality(coeffs: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        Self::new(ConstraintKind::Equality, coeffs, rhs.clone(), rhs)
    }

    pub fn inequality(coeffs: Vec<Vec<f64>>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::new(ConstraintKind::Inequality, coeffs, lower, upper)
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn kappa(&self) -> usize {
        self.upper.len()
    }

    /// Number of binary variables.
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &[f64] {
        &self.coeffs[k]
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `f(x) = sum_k c_k x_k`.
    pub fn evaluate(&self, x: BitString) -> Vec<f64> {
        let mut f = vec![0.0; self.kappa()];
        for k in x.ones().take_while(|&k| k < self.n()) {
            f.iter_mut().zip(&self.coeffs[k]).for_each(|(a, c)| *a += c);
        }
        f
    }

    pub fn is_satisfied(&self, x: BitString) -> bool {
        self.evaluate(x)
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(f, (a, b))| *f >= a - BOUND_EPS && *f <= b + BOUND_EPS)
    }
}
