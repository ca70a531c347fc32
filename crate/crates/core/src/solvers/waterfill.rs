//! Water-filling power allocation and the unconstrained rate maximizer.

use crate::channel::ChannelPair;
use crate::covariance::TransmitCovariance;
use crate::error::{Error, Result};

/// Water-filling allocation over a set of eigenmode gains.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillAllocation {
    /// Per-mode powers, aligned with the gains passed in (non-increasing).
    pub powers: Vec<f64>,
    /// Common water level `nu`; powers are `max(nu - 1/h_i, 0)`.
    pub water_level: f64,
    /// Achieved rate `sum log2(1 + h_i p_i)`, bits per channel use.
    pub rate: f64,
}

/// Exact water-filling over `gains` (non-increasing, >= 0) at `budget`.
///
/// Channels are activated greedily from the strongest; for an active set of
/// size `k` the level is `nu = (budget + sum_{i<k} 1/h_i) / k`, and `k` is
/// grown while the weakest active channel still gets positive power. No
/// bisection, so the result is deterministic to the last bit.
pub fn water_fill(gains: &[f64], budget: f64) -> WaterfillAllocation {
    debug_assert!(gains.windows(2).all(|w| w[0] >= w[1]));
    let positive: Vec<f64> = gains.iter().copied().take_while(|&h| h > 0.0).collect();
    let mut powers = vec![0.0; gains.len()];
    if positive.is_empty() || budget <= 0.0 {
        return WaterfillAllocation {
            powers,
            water_level: positive.first().map_or(0.0, |&h| 1.0 / h),
            rate: 0.0,
        };
    }
    let mut inv_sum = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for (k, &h) in positive.iter().enumerate() {
        let candidate_inv_sum = inv_sum + 1.0 / h;
        let candidate_level = (budget + candidate_inv_sum) / (k + 1) as f64;
        if candidate_level > 1.0 / h {
            inv_sum = candidate_inv_sum;
            level = candidate_level;
            active = k + 1;
        } else {
            break;
        }
    }
    let mut rate = 0.0;
    for i in 0..active {
        let p = (level - 1.0 / positive[i]).max(0.0);
        powers[i] = p;
        rate += (1.0 + positive[i] * p).log2();
    }
    WaterfillAllocation {
        powers,
        water_level: level,
        rate,
    }
}

/// Rate-optimal transmission: eigenmodes of `H` with water-filled powers.
#[derive(Debug, Clone)]
pub struct RateMaximization {
    pub covariance: TransmitCovariance,
    pub allocation: WaterfillAllocation,
    /// Set when `H = 0`, in which case the covariance is zero and the rate
    /// is zero rather than an error.
    pub zero_channel: bool,
}

/// Maximize `log2 det(I + H S H^H)` subject to `tr(S) <= power`.
pub fn maximize_rate(channels: &ChannelPair, power: f64) -> Result<RateMaximization> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "transmit power must be positive, got {power}"
        )));
    }
    let gains = channels.h_gains();
    if channels.h1() <= 0.0 {
        return Ok(RateMaximization {
            covariance: TransmitCovariance::zero(channels.tx_count(), power),
            allocation: WaterfillAllocation {
                powers: vec![0.0; gains.len()],
                water_level: 0.0,
                rate: 0.0,
            },
            zero_channel: true,
        });
    }
    let allocation = water_fill(&gains, power);
    let basis = channels.h_svd().v.clone();
    let covariance = TransmitCovariance::from_eigenbasis(&basis, &allocation.powers, power)?;
    Ok(RateMaximization {
        covariance,
        allocation,
        zero_channel: false,
    })
}
