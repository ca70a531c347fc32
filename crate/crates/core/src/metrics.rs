//! The two figures of merit: information rate and harvested power.

use crate::covariance::TransmitCovariance;
use crate::error::{Error, Result};
use crate::linalg;
use crate::{C64, CMatrix};

/// Convert a natural-log rate to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

fn check_conforming(context: &'static str, channel: &CMatrix, cov: &TransmitCovariance) -> Result<()> {
    if channel.ncols() != cov.dim() {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{}x{} covariance", channel.ncols(), channel.ncols()),
            got: format!("{}x{}", cov.dim(), cov.dim()),
        });
    }
    Ok(())
}

/// Information rate `log2 det(I + H S H^H)` in bits per channel use.
///
/// `I + H S H^H` is Hermitian positive definite for any PSD `S`, so the
/// determinant is evaluated through a Cholesky factorization; an
/// eigenvalue fallback covers the rare case where round-off defeats it.
pub fn mutual_information(channel: &CMatrix, cov: &TransmitCovariance) -> Result<f64> {
    check_conforming("mutual_information", channel, cov)?;
    if !linalg::is_finite(channel) {
        return Err(Error::NonFinite);
    }
    let n = channel.nrows();
    let mut m = channel * cov.matrix() * channel.adjoint();
    m = linalg::hermitian_part(&m);
    for i in 0..n {
        m[(i, i)] += C64::new(1.0, 0.0);
    }
    let log2_det = match m.clone().cholesky() {
        Some(chol) => {
            let l = chol.l();
            2.0 * (0..n).map(|i| l[(i, i)].re.log2()).sum::<f64>()
        }
        None => {
            let eig = linalg::hermitian_eigen(&m, 1e-8)?;
            eig.eigenvalues.iter().map(|&v| v.max(1e-300).log2()).sum()
        }
    };
    Ok(log2_det.max(0.0))
}

/// Harvested power `zeta * tr(G S G^H)`.
pub fn harvested_power(channel: &CMatrix, cov: &TransmitCovariance, zeta: f64) -> Result<f64> {
    check_conforming("harvested_power", channel, cov)?;
    if !linalg::is_finite(channel) {
        return Err(Error::NonFinite);
    }
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "conversion efficiency must lie in (0, 1], got {zeta}"
        )));
    }
    let q = linalg::trace_re(&(channel * cov.matrix() * channel.adjoint()));
    Ok((zeta * q).max(0.0))
}
