//! Transmit covariance matrices: Hermitian, PSD, trace-bounded.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg;
use crate::{C64, CMatrix, CVector};

/// Max tolerated deviation from Hermitian symmetry.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything more
/// negative is rejected rather than masked.
pub const PSD_TOL: f64 = 1e-10;
/// Slack allowed on the trace budget.
pub const TRACE_TOL: f64 = 1e-8;

/// A validated transmit covariance: Hermitian PSD (after clamping
/// round-off-level negative eigenvalues) with `tr(S) <= power_budget`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitCovariance {
    matrix: CMatrix,
    power_budget: f64,
}

impl TransmitCovariance {
    /// Validate and clamp an arbitrary matrix.
    pub fn new(matrix: CMatrix, power_budget: f64) -> Result<Self> {
        if !linalg::is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                context: "TransmitCovariance",
                expected: "square matrix".into(),
                got: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let eig = linalg::hermitian_eigen(&matrix, HERMITIAN_TOL)?;
        let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
        }
        let clamped: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
        Self::from_eigenbasis(&eig.vectors, &clamped, power_budget)
    }

    /// Build `V diag(powers) V^H` from an orthonormal basis and per-mode
    /// powers. Powers within `-PSD_TOL` of zero are clamped.
    pub fn from_eigenbasis(vectors: &CMatrix, powers: &[f64], power_budget: f64) -> Result<Self> {
        if vectors.ncols() != powers.len() {
            return Err(Error::DimensionMismatch {
                context: "from_eigenbasis",
                expected: format!("{} powers", vectors.ncols()),
                got: format!("{}", powers.len()),
            });
        }
        let mut min_power = 0.0f64;
        let clamped: Vec<f64> = powers
            .iter()
            .map(|&p| {
                min_power = min_power.min(p);
                p.max(0.0)
            })
            .collect();
        if min_power < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_power,
            });
        }
        let diag = CMatrix::from_diagonal(&DVector::from_iterator(
            clamped.len(),
            clamped.iter().map(|&p| C64::new(p, 0.0)),
        ));
        let matrix = linalg::hermitian_part(&(vectors * diag * vectors.adjoint()));
        Self::checked(matrix, power_budget)
    }

    /// Rank-one covariance `p * v v^H`.
    pub fn rank_one(v: &CVector, p: f64, power_budget: f64) -> Result<Self> {
        if p < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: p });
        }
        let p = p.max(0.0);
        let matrix = linalg::hermitian_part(&((v * v.adjoint()).map(|z| z * p)));
        Self::checked(matrix, power_budget)
    }

    /// All-zero covariance.
    pub fn zero(dim: usize, power_budget: f64) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
            power_budget,
        }
    }

    fn checked(matrix: CMatrix, power_budget: f64) -> Result<Self> {
        if power_budget < 0.0 || !power_budget.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power budget must be finite and nonnegative, got {power_budget}"
            )));
        }
        let trace = linalg::trace_re(&matrix);
        if trace > power_budget + TRACE_TOL {
            return Err(Error::PowerBudgetExceeded {
                trace,
                budget: power_budget,
            });
        }
        Ok(Self {
            matrix,
            power_budget,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    pub fn power_budget(&self) -> f64 {
        self.power_budget
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cmatrix_from_diagonal;

    #[test]
    fn accepts_psd_within_budget() {
        let s = TransmitCovariance::new(cmatrix_from_diagonal(&[0.6, 0.4]), 1.0).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clamps_roundoff_negative_eigenvalue() {
        let s = TransmitCovariance::new(cmatrix_from_diagonal(&[1.0, -5e-11]), 1.0).unwrap();
        let eig = linalg::hermitian_eigen(s.matrix(), 1e-12).unwrap();
        assert!(eig.eigenvalues.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn rejects_clearly_indefinite() {
        let err = TransmitCovariance::new(cmatrix_from_diagonal(&[1.0, -1e-3]), 1.0).unwrap_err();
        assert!(matches!(err, Error::NotPositiveSemidefinite { .. }));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = cmatrix_from_diagonal(&[1.0, 1.0]);
        m[(0, 1)] = C64::new(0.0, 1e-6);
        assert!(matches!(
            TransmitCovariance::new(m, 4.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_trace_over_budget() {
        let err = TransmitCovariance::new(cmatrix_from_diagonal(&[1.0, 1.0]), 1.0).unwrap_err();
        assert!(matches!(err, Error::PowerBudgetExceeded { .. }));
    }

    #[test]
    fn rank_one_matches_outer_product() {
        let v = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)])
            / C64::new(2f64.sqrt(), 0.0);
        let s = TransmitCovariance::rank_one(&v, 2.0, 2.0).unwrap();
        assert!((s.trace() - 2.0).abs() < 1e-12);
        assert!((s.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }
}
