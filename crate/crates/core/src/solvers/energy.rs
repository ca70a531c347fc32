//! Energy beamforming: the harvested-power maximizer.

use crate::channel::ChannelPair;
use crate::covariance::TransmitCovariance;
use crate::error::{Error, Result};
use crate::{C64, CVector};

/// Rank-one covariance along the top right-singular vector of `G`.
#[derive(Debug, Clone)]
pub struct EnergyBeamforming {
    pub covariance: TransmitCovariance,
    /// Maximum harvested power `g1 * P` at unit conversion efficiency.
    pub q_max: f64,
    /// Unit beamforming vector.
    pub beam: CVector,
    /// Set when `G = 0`: the beam direction is then arbitrary and
    /// `q_max = 0`.
    pub zero_channel: bool,
}

/// Maximize `tr(G S G^H)` subject to `tr(S) <= power`: put all power on the
/// strongest eigenmode of `G^H G`.
pub fn energy_beamforming(channels: &ChannelPair, power: f64) -> Result<EnergyBeamforming> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "transmit power must be positive, got {power}"
        )));
    }
    let g1 = channels.g1();
    let zero_channel = g1 <= 0.0;
    let mut beam = channels.energy_beam();
    let norm = beam.norm();
    if norm < 1e-12 {
        beam = CVector::zeros(channels.tx_count());
        beam[0] = C64::new(1.0, 0.0);
    } else if (norm - 1.0).abs() > 1e-12 {
        beam /= C64::new(norm, 0.0);
    }
    let covariance = TransmitCovariance::rank_one(&beam, power, power)?;
    Ok(EnergyBeamforming {
        covariance,
        q_max: g1 * power,
        beam,
        zero_channel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cmatrix_from_diagonal, complex_gaussian_matrix, hermitian_eigen};
    use crate::metrics::harvested_power;
    use crate::CMatrix;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_dominant_direction() {
        let pair = ChannelPair::colocated(cmatrix_from_diagonal(&[2.0, 1.0])).unwrap();
        let sol = energy_beamforming(&pair, 1.0).unwrap();
        assert_relative_eq!(sol.q_max, 4.0, epsilon = 1e-12);
        assert_relative_eq!(sol.covariance.matrix()[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.covariance.matrix()[(1, 1)].re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn scalar_channel() {
        let pair = ChannelPair::colocated(cmatrix_from_diagonal(&[3.0])).unwrap();
        let sol = energy_beamforming(&pair, 2.0).unwrap();
        assert_relative_eq!(sol.q_max, 18.0, epsilon = 1e-12);
        assert_relative_eq!(sol.covariance.trace(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn q_max_matches_independent_eigendecomposition() {
        let g = complex_gaussian_matrix(4, 4, 1.0, 17);
        let pair = ChannelPair::separated(complex_gaussian_matrix(4, 4, 1.0, 18), g.clone())
            .unwrap();
        let sol = energy_beamforming(&pair, 1.0).unwrap();
        let gram = g.adjoint() * &g;
        let eig = hermitian_eigen(&gram, 1e-9).unwrap();
        assert_relative_eq!(sol.q_max, eig.eigenvalues[0], epsilon = 1e-9);
        // The harvested power of the returned covariance achieves q_max.
        let q = harvested_power(&g, &sol.covariance, 1.0).unwrap();
        assert_relative_eq!(q, sol.q_max, epsilon = 1e-9);
    }

    #[test]
    fn zero_channel_is_flagged_with_unit_beam() {
        let pair = ChannelPair::separated(
            cmatrix_from_diagonal(&[1.0, 1.0]),
            CMatrix::zeros(2, 2),
        )
        .unwrap();
        let sol = energy_beamforming(&pair, 5.0).unwrap();
        assert!(sol.zero_channel);
        assert_eq!(sol.q_max, 0.0);
        assert_relative_eq!(sol.beam.norm(), 1.0, epsilon = 1e-12);
    }
}
