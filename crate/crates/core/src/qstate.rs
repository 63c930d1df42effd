//! Two-photon states on path-encoded modes.
//!
//! Each photon occupies one of four single-mode waveguides. The mode index
//! merges two binary degrees of freedom: the spatial-mode qubit (which of two
//! input waveguide pairs) and the polarization qubit (H or V before the 2D
//! grating coupler maps polarization to path). The packing is
//!
//! ```text
//! mode = 2 * spatial + polarization      0 = 0H, 1 = 0V, 2 = 1H, 3 = 1V
//! ```
//!
//! Joint two-photon objects use signal-major ordering: the basis index of
//! `|signal, idler>` is `signal * idler_dim + idler`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Tolerance for state-vector normalization.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance for Hermiticity and unit-trace checks on density matrices.
pub const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues above this (negative) floor still count as positive
/// semidefinite, absorbing round-off from channel compositions.
pub const PSD_FLOOR: f64 = -1e-8;
/// Unitarity tolerance for operators applied to states.
pub const UNITARY_TOL: f64 = 1e-10;

/// The two qubit degrees of freedom carried by each photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeOfFreedom {
    Spatial,
    Polarization,
}

/// One of the four path modes of a single photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex(u8);

impl ModeIndex {
    pub fn new(index: u8) -> Result<Self> {
        if index < 4 {
            Ok(ModeIndex(index))
        } else {
            Err(Error::OutOfRange {
                name: "mode index",
                value: index as f64,
                constraint: "0..=3",
            })
        }
    }

    pub fn from_bits(spatial: u8, polarization: u8) -> Self {
        ModeIndex(2 * (spatial & 1) + (polarization & 1))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn spatial_bit(self) -> u8 {
        self.0 >> 1
    }

    pub fn polarization_bit(self) -> u8 {
        self.0 & 1
    }

    /// Human-readable label, e.g. mode 2 -> "1H".
    pub fn label(self) -> &'static str {
        ["0H", "0V", "1H", "1V"][self.index()]
    }
}

/// The four maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// Report label. Polarization Bell pairs are written with capital Phi/Psi,
    /// spatial ones in lowercase, matching the usual hyperentanglement
    /// notation.
    pub fn label(self, dof: DegreeOfFreedom) -> &'static str {
        match dof {
            DegreeOfFreedom::Polarization => match self {
                BellKind::PhiPlus => "Phi+",
                BellKind::PhiMinus => "Phi-",
                BellKind::PsiPlus => "Psi+",
                BellKind::PsiMinus => "Psi-",
            },
            DegreeOfFreedom::Spatial => match self {
                BellKind::PhiPlus => "phi+",
                BellKind::PhiMinus => "phi-",
                BellKind::PsiPlus => "psi+",
                BellKind::PsiMinus => "psi-",
            },
        }
    }
}

/// Pure two-photon state with `signal_dim * idler_dim` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amplitudes: CVector,
    signal_dim: usize,
    idler_dim: usize,
}

impl JointState {
    /// Build a normalized state. Fails if the amplitude count does not match
    /// the photon dimensions or the norm deviates from one beyond [`NORM_TOL`].
    pub fn new(amplitudes: CVector, signal_dim: usize, idler_dim: usize) -> Result<Self> {
        if amplitudes.len() != signal_dim * idler_dim {
            return Err(Error::DimensionMismatch {
                expected: signal_dim * idler_dim,
                found: amplitudes.len(),
            });
        }
        let deviation = (amplitudes.norm() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(JointState {
            amplitudes,
            signal_dim,
            idler_dim,
        })
    }

    /// Build a possibly sub-normalized state, the residue of a projective
    /// post-selection. Only the dimension is checked.
    pub fn unnormalized(amplitudes: CVector, signal_dim: usize, idler_dim: usize) -> Result<Self> {
        if amplitudes.len() != signal_dim * idler_dim {
            return Err(Error::DimensionMismatch {
                expected: signal_dim * idler_dim,
                found: amplitudes.len(),
            });
        }
        Ok(JointState {
            amplitudes,
            signal_dim,
            idler_dim,
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, signal: usize, idler: usize) -> Complex64 {
        self.amplitudes[signal * self.idler_dim + idler]
    }

    pub fn signal_dim(&self) -> usize {
        self.signal_dim
    }

    pub fn idler_dim(&self) -> usize {
        self.idler_dim
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Squared overlap with another state of the same shape.
    pub fn overlap(&self, other: &JointState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes).norm_sqr())
    }

    /// Apply per-photon unitaries `U_signal (x) U_idler`.
    pub fn apply_unitary(&self, u_signal: &CMatrix, u_idler: &CMatrix) -> Result<JointState> {
        check_photon_unitaries(u_signal, u_idler, self.signal_dim, self.idler_dim)?;
        let u = linalg::kron(u_signal, u_idler);
        Ok(JointState {
            amplitudes: &u * &self.amplitudes,
            signal_dim: self.signal_dim,
            idler_dim: self.idler_dim,
        })
    }

    pub fn to_density(&self) -> JointDensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        JointDensityMatrix {
            matrix: m,
            signal_dim: self.signal_dim,
            idler_dim: self.idler_dim,
        }
    }
}

/// Mixed two-photon state. Validated Hermitian, unit trace, and positive
/// semidefinite (up to [`PSD_FLOOR`]) on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensityMatrix {
    matrix: CMatrix,
    signal_dim: usize,
    idler_dim: usize,
}

impl JointDensityMatrix {
    pub fn new(matrix: CMatrix, signal_dim: usize, idler_dim: usize) -> Result<Self> {
        let dim = signal_dim * idler_dim;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let herm = linalg::hermitian_deviation(&matrix);
        if herm > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let trace_dev = (matrix.trace().re - 1.0).abs();
        if trace_dev > DENSITY_TOL {
            return Err(Error::TraceNotOne {
                deviation: trace_dev,
            });
        }
        let min_eig = linalg::min_eigenvalue(&matrix);
        if min_eig < PSD_FLOOR {
            return Err(Error::NotPositive {
                eigenvalue: min_eig,
            });
        }
        Ok(JointDensityMatrix {
            matrix,
            signal_dim,
            idler_dim,
        })
    }

    /// Wrap a matrix that is trusted to be a density matrix by construction
    /// (convex mixtures of validated states, unitary conjugations, ...).
    pub(crate) fn trusted(matrix: CMatrix, signal_dim: usize, idler_dim: usize) -> Self {
        debug_assert_eq!(matrix.nrows(), signal_dim * idler_dim);
        JointDensityMatrix {
            matrix,
            signal_dim,
            idler_dim,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn signal_dim(&self) -> usize {
        self.signal_dim
    }

    pub fn idler_dim(&self) -> usize {
        self.idler_dim
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Conjugate by per-photon unitaries.
    pub fn apply_unitary(&self, u_signal: &CMatrix, u_idler: &CMatrix) -> Result<Self> {
        check_photon_unitaries(u_signal, u_idler, self.signal_dim, self.idler_dim)?;
        let u = linalg::kron(u_signal, u_idler);
        Ok(JointDensityMatrix {
            matrix: &u * &self.matrix * u.adjoint(),
            signal_dim: self.signal_dim,
            idler_dim: self.idler_dim,
        })
    }

    /// Reduce a four-mode pair state to one degree-of-freedom qubit pair,
    /// tracing out the other degree of freedom on both photons.
    pub fn partial_trace(&self, keep: DegreeOfFreedom) -> Result<JointDensityMatrix> {
        if self.signal_dim != 4 || self.idler_dim != 4 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                found: self.dim(),
            });
        }
        let mut out = CMatrix::zeros(4, 4);
        // Row of the 16-dim matrix for signal mode (ss, sp), idler (is, ip).
        let mode = |s: u8, p: u8| (2 * s + p) as usize;
        for kept_s in 0..2u8 {
            for kept_i in 0..2u8 {
                for kept_s2 in 0..2u8 {
                    for kept_i2 in 0..2u8 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for tr_s in 0..2u8 {
                            for tr_i in 0..2u8 {
                                let (row, col) = match keep {
                                    DegreeOfFreedom::Polarization => (
                                        4 * mode(tr_s, kept_s) + mode(tr_i, kept_i),
                                        4 * mode(tr_s, kept_s2) + mode(tr_i, kept_i2),
                                    ),
                                    DegreeOfFreedom::Spatial => (
                                        4 * mode(kept_s, tr_s) + mode(kept_i, tr_i),
                                        4 * mode(kept_s2, tr_s) + mode(kept_i2, tr_i),
                                    ),
                                };
                                acc += self.matrix[(row, col)];
                            }
                        }
                        out[(
                            (2 * kept_s + kept_i) as usize,
                            (2 * kept_s2 + kept_i2) as usize,
                        )] = acc;
                    }
                }
            }
        }
        Ok(JointDensityMatrix::trusted(out, 2, 2))
    }
}

fn check_photon_unitaries(
    u_signal: &CMatrix,
    u_idler: &CMatrix,
    signal_dim: usize,
    idler_dim: usize,
) -> Result<()> {
    if u_signal.nrows() != signal_dim || u_signal.ncols() != signal_dim {
        return Err(Error::DimensionMismatch {
            expected: signal_dim,
            found: u_signal.nrows(),
        });
    }
    if u_idler.nrows() != idler_dim || u_idler.ncols() != idler_dim {
        return Err(Error::DimensionMismatch {
            expected: idler_dim,
            found: u_idler.nrows(),
        });
    }
    for u in [u_signal, u_idler] {
        let dev = linalg::unitary_deviation(u);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
    }
    Ok(())
}

/// Two-qubit Bell ket in the computational basis `|00>, |01>, |10>, |11>`.
pub fn bell_ket(kind: BellKind) -> CVector {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut v = CVector::zeros(4);
    match kind {
        BellKind::PhiPlus => {
            v[0] = s;
            v[3] = s;
        }
        BellKind::PhiMinus => {
            v[0] = s;
            v[3] = -s;
        }
        BellKind::PsiPlus => {
            v[1] = s;
            v[2] = s;
        }
        BellKind::PsiMinus => {
            v[1] = s;
            v[2] = -s;
        }
    }
    v
}

/// Bell state as a two-photon qubit-pair state (one qubit per photon).
pub fn bell_state(kind: BellKind) -> JointState {
    JointState {
        amplitudes: bell_ket(kind),
        signal_dim: 2,
        idler_dim: 2,
    }
}

/// Bell projector `|B><B|` as a 4x4 matrix.
pub fn bell_projector(kind: BellKind) -> CMatrix {
    let v = bell_ket(kind);
    &v * v.adjoint()
}

/// The hyperentangled pair delivered by the source after both 2D grating
/// couplers: `(|00> + |11> + |22> + |33>) / 2` in mode indices, which equals
/// `phi+ (spatial) (x) Phi+ (polarization)` under the mode packing.
pub fn hyper_state() -> JointState {
    let half = Complex64::new(0.5, 0.0);
    let mut v = CVector::zeros(16);
    for k in 0..4 {
        v[4 * k + k] = half;
    }
    JointState {
        amplitudes: v,
        signal_dim: 4,
        idler_dim: 4,
    }
}

/// Assemble a four-mode pair state from independent spatial-pair and
/// polarization-pair states. Inverse direction of [`JointDensityMatrix::partial_trace`]
/// for product states: `partial_trace(compose, keep) == factor`.
pub fn compose_dof_pair(
    spatial_pair: &JointDensityMatrix,
    polarization_pair: &JointDensityMatrix,
) -> Result<JointDensityMatrix> {
    for part in [spatial_pair, polarization_pair] {
        if part.signal_dim != 2 || part.idler_dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: part.dim(),
            });
        }
    }
    let mut out = CMatrix::zeros(16, 16);
    let mode = |s: u8, p: u8| (2 * s + p) as usize;
    for ss in 0..2u8 {
        for is in 0..2u8 {
            for sp in 0..2u8 {
                for ip in 0..2u8 {
                    for ss2 in 0..2u8 {
                        for is2 in 0..2u8 {
                            for sp2 in 0..2u8 {
                                for ip2 in 0..2u8 {
                                    let row = 4 * mode(ss, sp) + mode(is, ip);
                                    let col = 4 * mode(ss2, sp2) + mode(is2, ip2);
                                    out[(row, col)] = spatial_pair.matrix
                                        [((2 * ss + is) as usize, (2 * ss2 + is2) as usize)]
                                        * polarization_pair.matrix
                                            [((2 * sp + ip) as usize, (2 * sp2 + ip2) as usize)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(JointDensityMatrix::trusted(out, 4, 4))
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` between density
/// matrices of equal dimension. Symmetric in its arguments; equals
/// `<psi|rho|psi>` when one argument is pure.
pub fn fidelity(rho: &JointDensityMatrix, sigma: &JointDensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let s = linalg::psd_sqrt(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let (vals, _) = linalg::hermitian_eigen(&linalg::hermitize(&inner));
    let root_sum: f64 = vals.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).min(1.0))
}

/// Fidelity of a qubit-pair density matrix against a Bell state.
pub fn fidelity_to_bell(rho: &JointDensityMatrix, kind: BellKind) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let v = bell_ket(kind);
    Ok((v.adjoint() * rho.matrix() * &v)[(0, 0)].re)
}

// Serialization of density matrices as {dim, re, im} with row-major nested
// arrays, so reports stay readable without a binary decoder.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for JointDensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let mut re = vec![vec![0.0; n]; n];
        let mut im = vec![vec![0.0; n]; n];
        for r in 0..n {
            for c in 0..n {
                re[r][c] = self.matrix[(r, c)].re;
                im[r][c] = self.matrix[(r, c)].im;
            }
        }
        MatrixJson { dim: n, re, im }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JointDensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        let n = raw.dim;
        let photon_dim = match n {
            4 => 2,
            16 => 4,
            _ => {
                return Err(D::Error::custom(format!(
                    "unsupported density matrix dimension {n}, expected 4 or 16"
                )))
            }
        };
        if raw.re.len() != n || raw.im.len() != n {
            return Err(D::Error::custom("row count does not match dim"));
        }
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            if raw.re[r].len() != n || raw.im[r].len() != n {
                return Err(D::Error::custom("column count does not match dim"));
            }
            for c in 0..n {
                m[(r, c)] = Complex64::new(raw.re[r][c], raw.im[r][c]);
            }
        }
        JointDensityMatrix::new(m, photon_dim, photon_dim).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mode_packing_matches_coupler_table() {
        let labels: Vec<&str> = (0..4)
            .map(|k| ModeIndex::new(k).unwrap().label())
            .collect();
        assert_eq!(labels, ["0H", "0V", "1H", "1V"]);
        for s in 0..2 {
            for p in 0..2 {
                let m = ModeIndex::from_bits(s, p);
                assert_eq!(m.spatial_bit(), s);
                assert_eq!(m.polarization_bit(), p);
            }
        }
        assert!(ModeIndex::new(4).is_err());
    }

    #[test]
    fn bell_states_are_orthonormal() {
        for a in BellKind::ALL {
            for b in BellKind::ALL {
                let overlap = bell_state(a).overlap(&bell_state(b)).unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(overlap, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hyper_state_factorizes_into_bell_pair_product() {
        let rho = hyper_state().to_density();
        let pol = rho.partial_trace(DegreeOfFreedom::Polarization).unwrap();
        let spa = rho.partial_trace(DegreeOfFreedom::Spatial).unwrap();
        for reduced in [&pol, &spa] {
            assert_abs_diff_eq!(
                fidelity_to_bell(reduced, BellKind::PhiPlus).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
        // Product of its reduced states reassembles the full state.
        let back = compose_dof_pair(&spa, &pol).unwrap();
        let err = (back.matrix() - rho.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn polarization_flip_on_idler_gives_psi_plus_pattern() {
        // Swapping H and V in both spatial slots of the idler turns the
        // delivered state into phi+ (x) Psi+: 1/2 (|01> + |10> + |23> + |32|).
        let mut x_pol = CMatrix::zeros(4, 4);
        for (from, to) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            x_pol[(to, from)] = Complex64::new(1.0, 0.0);
        }
        let flipped = hyper_state()
            .apply_unitary(&linalg::identity(4), &x_pol)
            .unwrap();
        for (s, i) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            assert_abs_diff_eq!(flipped.amplitude(s, i).re, 0.5, epsilon = 1e-12);
        }
        let pol = flipped
            .to_density()
            .partial_trace(DegreeOfFreedom::Polarization)
            .unwrap();
        assert_abs_diff_eq!(
            fidelity_to_bell(&pol, BellKind::PsiPlus).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let spa = flipped
            .to_density()
            .partial_trace(DegreeOfFreedom::Spatial)
            .unwrap();
        assert_abs_diff_eq!(
            fidelity_to_bell(&spa, BellKind::PhiPlus).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let v = CVector::from_vec(vec![Complex64::new(1.0, 0.0); 4]);
        assert!(matches!(
            JointState::new(v.clone(), 2, 2),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            JointState::new(v, 4, 4),
            Err(Error::DimensionMismatch { .. })
        ));
        let m = CMatrix::identity(4, 4);
        assert!(matches!(
            JointDensityMatrix::new(m, 2, 2),
            Err(Error::TraceNotOne { .. })
        ));
        let mut neg = CMatrix::zeros(4, 4);
        neg[(0, 0)] = Complex64::new(1.5, 0.0);
        neg[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(matches!(
            JointDensityMatrix::new(neg, 2, 2),
            Err(Error::NotPositive { .. })
        ));
        let mut skew = CMatrix::identity(4, 4) * Complex64::new(0.25, 0.0);
        skew[(0, 1)] = Complex64::new(0.0, 0.3);
        assert!(matches!(
            JointDensityMatrix::new(skew, 2, 2),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn apply_unitary_rejects_non_unitary() {
        let mut not_u = CMatrix::identity(4, 4);
        not_u[(0, 0)] = Complex64::new(2.0, 0.0);
        let err = hyper_state().apply_unitary(&not_u, &linalg::identity(4));
        assert!(matches!(err, Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let a = JointDensityMatrix::new(linalg::random_density(4, &mut rng), 2, 2).unwrap();
            let b = JointDensityMatrix::new(linalg::random_density(4, &mut rng), 2, 2).unwrap();
            let fab = fidelity(&a, &b).unwrap();
            let fba = fidelity(&b, &a).unwrap();
            assert_abs_diff_eq!(fab, fba, epsilon = 1e-9);
            assert!((0.0..=1.0).contains(&fab));
            assert_abs_diff_eq!(fidelity(&a, &a).unwrap(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn fidelity_against_pure_state_reduces_to_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let rho = JointDensityMatrix::new(linalg::random_density(4, &mut rng), 2, 2).unwrap();
            let target = bell_state(BellKind::PhiPlus).to_density();
            let uhlmann = fidelity(&rho, &target).unwrap();
            let direct = fidelity_to_bell(&rho, BellKind::PhiPlus).unwrap();
            // Matrix square roots amplify round-off near zero eigenvalues
            // (error ~ sqrt(machine epsilon)), so the two routes agree to
            // about 1e-7 rather than machine precision.
            assert_abs_diff_eq!(uhlmann, direct, epsilon = 1e-7);
        }
    }

    #[test]
    fn density_matrix_json_round_trip() {
        let rho = hyper_state().to_density();
        let text = serde_json::to_string(&rho).unwrap();
        assert!(text.contains("\"dim\":16"));
        let back: JointDensityMatrix = serde_json::from_str(&text).unwrap();
        let err = (back.matrix() - rho.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert_eq!(back.signal_dim(), 4);
    }

    #[test]
    fn density_matrix_json_rejects_invalid() {
        // Valid shape, but trace is two.
        let text = r#"{"dim":4,"re":[[1,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,0]],
                       "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
        assert!(serde_json::from_str::<JointDensityMatrix>(text).is_err());
    }
}
