//! Dense complex linear algebra helpers shared by the state and analysis
//! modules. Everything here operates on small matrices (dimension 2 to 16),
//! so simplicity and numerical robustness win over scalability.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest absolute entry of `U^dagger U - I`.
pub fn unitary_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let residual = u.adjoint() * u - identity(n);
    residual.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && unitary_deviation(u) <= tol
}

/// Largest absolute entry of `M - M^dagger`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let residual = m - m.adjoint();
    residual.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian part `(M + M^dagger) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix. Returns real eigenvalues and a
/// unitary matrix whose columns are the corresponding eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(m);
    vals.into_iter().fold(f64::INFINITY, f64::min)
}

/// Apply `f` to the eigenvalues of a Hermitian matrix and recompose.
fn eigen_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let diag = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(f(vals[i]), 0.0)
        } else {
            ZERO
        }
    });
    &vecs * diag * vecs.adjoint()
}

/// Square root of a positive semidefinite Hermitian matrix. Eigenvalues that
/// dip slightly negative from round-off are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    eigen_map(m, |x| x.max(0.0).sqrt())
}

/// Project a Hermitian matrix onto the density-matrix set: clamp negative
/// eigenvalues to zero and renormalize the trace to one.
pub fn psd_project(m: &CMatrix) -> CMatrix {
    let clamped = eigen_map(m, |x| x.max(0.0));
    let tr = clamped.trace().re;
    if tr > 0.0 {
        clamped / Complex64::new(tr, 0.0)
    } else {
        // Degenerate input (all weight clamped away): fall back to the
        // maximally mixed state rather than divide by zero.
        let n = m.nrows();
        identity(n) / Complex64::new(n as f64, 0.0)
    }
}

/// Haar-like random unitary from the QR decomposition of a complex Gaussian
/// matrix. Used by randomized test batteries.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    g.qr().q()
}

/// Random density matrix `G G^dagger / tr(G G^dagger)`.
pub fn random_density<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    m / Complex64::new(tr, 0.0)
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; avoids pulling a distribution type into this module.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
