//! Complex linear-algebra primitives with deterministic conventions.
//!
//! Thin wrappers over nalgebra's complex SVD and Hermitian eigensolver that
//! pin down everything nalgebra leaves unspecified: factors are sorted by
//! non-increasing singular value / eigenvalue, and every right-singular
//! vector (or eigenvector) is rotated so its first nonzero component is real
//! and positive. Identical inputs therefore produce bitwise-identical
//! factorizations, which the CSV-emitting layers rely on.
//!
//! Also hosts the seeded complex Gaussian sampler shared by channel
//! generation and the randomized oracles. The algorithm is fixed: a
//! ChaCha8 stream keyed by the seed, mapped through Box-Muller, filling the
//! matrix row-major with the real part drawn before the imaginary part.

use nalgebra::DVector;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::{C64, CMatrix, CVector};

/// Relative Frobenius reconstruction error allowed for a factorization.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Singular value decomposition `A = U diag(sigma) V^H` with the
/// deterministic ordering and phase convention applied.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    /// Singular values, non-increasing.
    pub singular_values: DVector<f64>,
    pub v: CMatrix,
}

/// Hermitian eigendecomposition `A = V diag(lambda) V^H`, eigenvalues
/// non-increasing.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, non-increasing.
    pub eigenvalues: DVector<f64>,
    pub vectors: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let sigma = CMatrix::from_diagonal(&self.singular_values.map(|s| C64::new(s, 0.0)));
        &self.u * sigma * self.v.adjoint()
    }

    /// Largest singular value (0 for an empty factorization).
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.get(0).copied().unwrap_or(0.0)
    }
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let lambda = CMatrix::from_diagonal(&self.eigenvalues.map(|s| C64::new(s, 0.0)));
        &self.vectors * lambda * self.vectors.adjoint()
    }
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Max absolute deviation from Hermitian symmetry, `max |A - A^H|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Rotate each column of `v` so its first nonzero component is real
/// positive; the same unit phase is applied to the matching column of `u`
/// (if present) so products of the form `U Sigma V^H` are preserved.
fn apply_phase_convention(u: Option<&mut CMatrix>, v: &mut CMatrix) {
    let mut phases = Vec::with_capacity(v.ncols());
    for j in 0..v.ncols() {
        let col = v.column(j);
        let max_mod = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = col.iter().find(|z| z.norm() > 1e-12 * max_mod.max(1e-300));
        let phase = match pivot {
            Some(z) if z.norm() > 0.0 => z.conj() / z.norm(),
            _ => C64::new(1.0, 0.0),
        };
        phases.push(phase);
        for i in 0..v.nrows() {
            v[(i, j)] *= phase;
        }
    }
    if let Some(u) = u {
        for (j, phase) in phases.iter().enumerate() {
            if j >= u.ncols() {
                break;
            }
            for i in 0..u.nrows() {
                u[(i, j)] *= *phase;
            }
        }
    }
}

/// Sort (values, paired columns) by non-increasing value. Stable, so tied
/// values keep their relative order and the output stays deterministic.
fn sort_descending(values: &mut DVector<f64>, mats: &mut [&mut CMatrix]) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    let sorted = DVector::from_iterator(n, order.iter().map(|&i| values[i]));
    *values = sorted;
    for m in mats.iter_mut() {
        let cols: Vec<CVector> = order.iter().map(|&i| m.column(i).into_owned()).collect();
        for (j, col) in cols.into_iter().enumerate() {
            m.set_column(j, &col);
        }
    }
}

/// Thin SVD with non-increasing singular values and the deterministic phase
/// convention. Returns an error on non-finite input or if the factors fail
/// to reproduce the matrix to within [`RECONSTRUCTION_TOL`] relative
/// Frobenius error.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let decomposition = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::InvalidParameter("SVD did not converge".into()))?;
    let mut u = decomposition.u.expect("u requested");
    let mut v = decomposition.v_t.expect("v_t requested").adjoint();
    let mut sigma = decomposition.singular_values;
    sort_descending(&mut sigma, &mut [&mut u, &mut v]);
    apply_phase_convention(Some(&mut u), &mut v);
    let out = Svd {
        u,
        singular_values: sigma,
        v,
    };
    let norm = frobenius_norm(m);
    let err = frobenius_norm(&(out.reconstruct() - m));
    if err > RECONSTRUCTION_TOL * norm.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "SVD reconstruction error {err:.3e} exceeds tolerance"
        )));
    }
    Ok(out)
}

/// Hermitian eigendecomposition with non-increasing eigenvalues and the
/// deterministic phase convention. The input is symmetrized first; a
/// deviation from Hermitian symmetry larger than `herm_tol` is an error.
pub fn hermitian_eigen(m: &CMatrix, herm_tol: f64) -> Result<HermitianEigen> {
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            context: "hermitian_eigen",
            expected: "square matrix".into(),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let deviation = hermitian_deviation(m);
    if deviation > herm_tol {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = hermitian_part(m).symmetric_eigen();
    let mut vectors = sym.eigenvectors;
    let mut eigenvalues = sym.eigenvalues;
    sort_descending(&mut eigenvalues, &mut [&mut vectors]);
    apply_phase_convention(None, &mut vectors);
    Ok(HermitianEigen {
        eigenvalues,
        vectors,
    })
}

/// Deterministic complex Gaussian matrix: `rows x cols`, entries i.i.d.
/// circularly symmetric with per-entry variance `variance` (real and
/// imaginary parts each `N(0, variance/2)`).
///
/// The generator is fixed so that a seed identifies a matrix across
/// platforms: ChaCha8 keyed with `seed`, entries drawn row-major, each
/// entry consuming one Box-Muller pair (cosine branch -> real part, sine
/// branch -> imaginary part).
pub fn complex_gaussian_matrix(rows: usize, cols: usize, variance: f64, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = variance.sqrt();
    let entries: Vec<C64> = (0..rows * cols)
        .map(|_| standard_complex_gaussian(&mut rng) * scale)
        .collect();
    CMatrix::from_row_slice(rows, cols, &entries)
}

/// One circularly symmetric complex Gaussian with unit variance
/// (`re, im ~ N(0, 1/2)`), from two 53-bit uniforms via Box-Muller.
pub fn standard_complex_gaussian<R: RngCore>(rng: &mut R) -> C64 {
    let u1 = 1.0 - uniform_53(rng); // in (0, 1]; keeps ln() finite
    let u2 = uniform_53(rng);
    let r = (-2.0 * u1.ln()).sqrt() / 2f64.sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * theta.cos(), r * theta.sin())
}

fn uniform_53<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Seeded RNG for the randomized oracles; same stream family as
/// [`complex_gaussian_matrix`].
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random complex unit vector.
pub fn random_unit_vector<R: RngCore>(dim: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| standard_complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / C64::new(norm, 0.0);
        }
    }
}

/// Build a complex matrix from real entries (row-major rows).
pub fn cmatrix_from_real_rows(rows: &[Vec<f64>]) -> CMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j], 0.0))
}

/// Real diagonal complex matrix.
pub fn cmatrix_from_diagonal(diag: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        diag.len(),
        diag.iter().map(|&d| C64::new(d, 0.0)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn svd_of_diagonal_matrix_sorts_and_normalizes() {
        let m = cmatrix_from_diagonal(&[1.0, 3.0]);
        let f = svd(&m).unwrap();
        assert_relative_eq!(f.singular_values[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(f.singular_values[1], 1.0, epsilon = 1e-12);
        // v1 corresponds to the larger singular value: second basis vector,
        // rotated so its first nonzero component is +1.
        assert_relative_eq!(f.v[(1, 0)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(f.v[(1, 0)].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn svd_of_zero_matrix_is_all_zero() {
        let m = CMatrix::zeros(3, 2);
        let f = svd(&m).unwrap();
        assert!(f.singular_values.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn svd_reconstructs_seeded_complex_matrix() {
        let m = complex_gaussian_matrix(3, 2, 1.0, 42);
        let f = svd(&m).unwrap();
        let err = frobenius_norm(&(f.reconstruct() - &m));
        assert!(err <= 1e-10 * frobenius_norm(&m));
    }

    #[test]
    fn svd_is_bitwise_deterministic() {
        let m = complex_gaussian_matrix(4, 4, 2.0, 7);
        let a = svd(&m).unwrap();
        let b = svd(&m).unwrap();
        assert_eq!(a.u, b.u);
        assert_eq!(a.v, b.v);
        assert_eq!(a.singular_values, b.singular_values);
    }

    #[test]
    fn hermitian_eigen_matches_svd_squares() {
        let m = complex_gaussian_matrix(3, 3, 1.0, 5);
        let gram = m.adjoint() * &m;
        let eig = hermitian_eigen(&gram, 1e-10).unwrap();
        let f = svd(&m).unwrap();
        for i in 0..3 {
            assert_relative_eq!(
                eig.eigenvalues[i],
                f.singular_values[i].powi(2),
                epsilon = 1e-9
            );
        }
        let err = frobenius_norm(&(eig.reconstruct() - &gram));
        assert!(err <= 1e-10 * frobenius_norm(&gram));
    }

    #[test]
    fn hermitian_eigen_rejects_non_hermitian() {
        let mut m = cmatrix_from_diagonal(&[1.0, 2.0]);
        m[(0, 1)] = C64::new(5.0, 0.0);
        assert!(matches!(
            hermitian_eigen(&m, 1e-12),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn svd_rejects_non_finite() {
        let mut m = cmatrix_from_diagonal(&[1.0, 2.0]);
        m[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(svd(&m), Err(Error::NonFinite)));
    }

    #[test]
    fn gaussian_matrix_is_seed_deterministic_and_seed_sensitive() {
        let a = complex_gaussian_matrix(4, 3, 1.5, 99);
        let b = complex_gaussian_matrix(4, 3, 1.5, 99);
        let c = complex_gaussian_matrix(4, 3, 1.5, 100);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_second_moment_matches_variance() {
        let v = 2.5;
        let m = complex_gaussian_matrix(200, 200, v, 3);
        let second_moment = m.iter().map(|z| z.norm_sqr()).sum::<f64>() / (200.0 * 200.0);
        assert!(
            (second_moment - v).abs() < 0.02 * v,
            "second moment {second_moment} vs variance {v}"
        );
    }
}
