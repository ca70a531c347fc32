//! Seeded Rayleigh-fading channel draws.

use swipt_core::linalg::complex_gaussian_matrix;
use swipt_core::CMatrix;

/// Draw an `n x m` channel (n receive antennas, m transmit antennas) with
/// i.i.d. circularly symmetric complex Gaussian entries of per-element
/// variance `variance` (real and imaginary parts each
/// `N(0, variance/2)`).
///
/// The generator is fixed — a ChaCha8 stream keyed by `seed`, filled
/// row-major through Box-Muller — so a seed identifies one matrix across
/// platforms and versions.
pub fn generate_rayleigh_channel(m: usize, n: usize, variance: f64, seed: u64) -> CMatrix {
    complex_gaussian_matrix(n, m, variance, seed)
}
