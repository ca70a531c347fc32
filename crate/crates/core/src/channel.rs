//! Channel pairs and receiver noise splits.

use crate::error::{Error, Result};
use crate::linalg::{self, Svd};
use crate::{CMatrix, CVector};

/// The pair of MIMO channels seen from the transmitter: `H` to the
/// information decoder (`N_ID x M`) and `G` to the energy harvester
/// (`N_EH x M`). Both SVDs are computed once at construction and cached.
///
/// In the co-located configuration both receivers share one antenna array,
/// so `G = H` by construction.
#[derive(Debug, Clone)]
pub struct ChannelPair {
    h: CMatrix,
    g: CMatrix,
    colocated: bool,
    h_svd: Svd,
    g_svd: Svd,
}

impl ChannelPair {
    /// Separated receivers: arbitrary `H` and `G` over the same `M`
    /// transmit antennas.
    pub fn separated(h: CMatrix, g: CMatrix) -> Result<Self> {
        if h.ncols() == 0 || h.nrows() == 0 || g.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "channel dimensions must be positive".into(),
            ));
        }
        if h.ncols() != g.ncols() {
            return Err(Error::DimensionMismatch {
                context: "ChannelPair",
                expected: format!("{} transmit antennas", h.ncols()),
                got: format!("{}", g.ncols()),
            });
        }
        let h_svd = linalg::svd(&h)?;
        let g_svd = linalg::svd(&g)?;
        Ok(Self {
            h,
            g,
            colocated: false,
            h_svd,
            g_svd,
        })
    }

    /// Co-located receivers: one array, `G = H`.
    pub fn colocated(h: CMatrix) -> Result<Self> {
        if h.ncols() == 0 || h.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "channel dimensions must be positive".into(),
            ));
        }
        let h_svd = linalg::svd(&h)?;
        let g_svd = h_svd.clone();
        Ok(Self {
            g: h.clone(),
            h,
            colocated: true,
            h_svd,
            g_svd,
        })
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn g(&self) -> &CMatrix {
        &self.g
    }

    pub fn is_colocated(&self) -> bool {
        self.colocated
    }

    /// Number of transmit antennas `M`.
    pub fn tx_count(&self) -> usize {
        self.h.ncols()
    }

    pub fn h_svd(&self) -> &Svd {
        &self.h_svd
    }

    pub fn g_svd(&self) -> &Svd {
        &self.g_svd
    }

    /// Eigenvalues of `H^H H` (squared singular values), non-increasing.
    pub fn h_gains(&self) -> Vec<f64> {
        self.h_svd
            .singular_values
            .iter()
            .map(|s| s * s)
            .collect()
    }

    /// Eigenvalues of `G^H G`, non-increasing.
    pub fn g_gains(&self) -> Vec<f64> {
        self.g_svd
            .singular_values
            .iter()
            .map(|s| s * s)
            .collect()
    }

    /// Largest eigenvalue of `G^H G`.
    pub fn g1(&self) -> f64 {
        self.g_svd.sigma_max().powi(2)
    }

    /// Largest eigenvalue of `H^H H`.
    pub fn h1(&self) -> f64 {
        self.h_svd.sigma_max().powi(2)
    }

    /// Top right-singular vector of `G` (the energy beamforming direction).
    pub fn energy_beam(&self) -> CVector {
        self.g_svd.v.column(0).into_owned()
    }
}

/// Split of the unit receiver noise power between the antenna (RF-band)
/// and processing (baseband) stages: `sigma_a_sq + sigma_p_sq = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSplit {
    sigma_a_sq: f64,
    sigma_p_sq: f64,
}

impl NoiseSplit {
    pub fn new(sigma_a_sq: f64, sigma_p_sq: f64) -> Result<Self> {
        let in_range = |x: f64| (0.0..=1.0).contains(&x);
        if !in_range(sigma_a_sq) || !in_range(sigma_p_sq) {
            return Err(Error::InvalidParameter(format!(
                "noise powers must lie in [0,1]: got ({sigma_a_sq}, {sigma_p_sq})"
            )));
        }
        if (sigma_a_sq + sigma_p_sq - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "noise powers must sum to 1: got {sigma_a_sq} + {sigma_p_sq}"
            )));
        }
        Ok(Self {
            sigma_a_sq,
            sigma_p_sq,
        })
    }

    pub fn sigma_a_sq(&self) -> f64 {
        self.sigma_a_sq
    }

    pub fn sigma_p_sq(&self) -> f64 {
        self.sigma_p_sq
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cmatrix_from_diagonal, complex_gaussian_matrix, frobenius_norm};

    #[test]
    fn colocated_shares_matrix_and_svd() {
        let h = complex_gaussian_matrix(2, 2, 1.0, 11);
        let pair = ChannelPair::colocated(h.clone()).unwrap();
        assert_eq!(pair.h(), pair.g());
        assert!(pair.is_colocated());
        assert_eq!(pair.h_gains(), pair.g_gains());
    }

    #[test]
    fn cached_svd_reconstructs_channel() {
        let h = complex_gaussian_matrix(3, 4, 1.0, 2);
        let g = complex_gaussian_matrix(2, 4, 1.0, 3);
        let pair = ChannelPair::separated(h.clone(), g.clone()).unwrap();
        let err_h = frobenius_norm(&(pair.h_svd().reconstruct() - &h));
        let err_g = frobenius_norm(&(pair.g_svd().reconstruct() - &g));
        assert!(err_h <= 1e-10 * frobenius_norm(&h));
        assert!(err_g <= 1e-10 * frobenius_norm(&g));
    }

    #[test]
    fn gains_are_non_increasing() {
        let pair = ChannelPair::separated(
            complex_gaussian_matrix(4, 4, 1.0, 8),
            complex_gaussian_matrix(4, 4, 1.0, 9),
        )
        .unwrap();
        for gains in [pair.h_gains(), pair.g_gains()] {
            for w in gains.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn rejects_mismatched_tx_counts() {
        let err = ChannelPair::separated(
            cmatrix_from_diagonal(&[1.0, 1.0]),
            complex_gaussian_matrix(2, 3, 1.0, 1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn noise_split_validates_sum() {
        assert!(NoiseSplit::new(0.3, 0.7).is_ok());
        assert!(NoiseSplit::new(0.3, 0.6).is_err());
        assert!(NoiseSplit::new(-0.1, 1.1).is_err());
    }
}
