//! State reconstruction and Bell-inequality analysis for the collected qubit
//! pair.
//!
//! Tomography follows the linear-inversion recipe: sixteen separable
//! projective settings, reconstruction
//! `rho = sum_nu M_nu n_nu / (n_1 + n_2 + n_3 + n_4)`, where the first four
//! settings partition unity and fix the normalization. The dual matrices
//! `M_nu` are not hard-coded; they are computed from the projector set by
//! solving the 16x16 linear system, so any tomographically complete set of
//! product projectors works.
//!
//! All analyzer angles in this module are in degrees; the perpendicular
//! setting of an angle is the angle plus 90 degrees.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::qstate::{fidelity, JointDensityMatrix};

/// Labeled coincidence counts, one entry per measurement setting.
///
/// Counts are stored as floats so that analytic (infinite-statistics) tables
/// can be expressed exactly; simulated tables hold integer values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoincidenceTable {
    pub entries: Vec<CoincidenceEntry>,
    /// Wall-clock integration time per setting, seconds. Absent for
    /// analytic tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoincidenceEntry {
    pub basis_label: String,
    pub count: f64,
}

impl CoincidenceTable {
    pub fn new(labels: &[String], counts: &[f64]) -> Result<Self> {
        if labels.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: counts.len(),
            });
        }
        Ok(CoincidenceTable {
            entries: labels
                .iter()
                .zip(counts)
                .map(|(basis_label, &count)| CoincidenceEntry {
                    basis_label: basis_label.clone(),
                    count,
                })
                .collect(),
            integration_time: None,
        })
    }

    pub fn counts(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.count).collect()
    }
}

/// Single-qubit analyzer kets used to assemble product projectors.
fn single_qubit_ket(label: char) -> Result<CVector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (top, bottom) = match label {
        'H' => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        'V' => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        'D' => (Complex64::new(s, 0.0), Complex64::new(s, 0.0)),
        'A' => (Complex64::new(s, 0.0), Complex64::new(-s, 0.0)),
        'R' => (Complex64::new(s, 0.0), Complex64::new(0.0, -s)),
        'L' => (Complex64::new(s, 0.0), Complex64::new(0.0, s)),
        other => {
            return Err(Error::OutOfRange {
                name: "analyzer label",
                value: other as u32 as f64,
                constraint: "one of H V D A R L",
            })
        }
    };
    Ok(CVector::from_vec(vec![top, bottom]))
}

/// The sixteen standard settings: four computational combinations that
/// partition unity, then twelve superposition settings.
const STANDARD_LABELS: [&str; 16] = [
    "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL",
];

/// A tomographically complete set of sixteen product projectors together
/// with its dual frame.
#[derive(Debug, Clone)]
pub struct TomographyBasisSet {
    labels: Vec<String>,
    kets: Vec<CVector>,
    duals: Vec<CMatrix>,
}

impl TomographyBasisSet {
    /// The standard sixteen-setting series. The first four settings
    /// (`HH, HV, VV, VH`) sum to the identity, providing the normalization.
    pub fn standard() -> Self {
        let labels: Vec<String> = STANDARD_LABELS.iter().map(|s| s.to_string()).collect();
        let kets = labels
            .iter()
            .map(|l| {
                let mut chars = l.chars();
                let a = single_qubit_ket(chars.next().expect("two-char label"))
                    .expect("known label");
                let b = single_qubit_ket(chars.next().expect("two-char label"))
                    .expect("known label");
                a.kronecker(&b)
            })
            .collect();
        Self::from_kets(labels, kets).expect("standard set is tomographically complete")
    }

    /// Build a set from arbitrary normalized projector kets. Fails with
    /// [`Error::SingularBasis`] when the projectors do not span the space of
    /// 4x4 Hermitian matrices.
    pub fn from_kets(labels: Vec<String>, kets: Vec<CVector>) -> Result<Self> {
        if labels.len() != 16 || kets.len() != 16 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                found: labels.len().min(kets.len()),
            });
        }
        for ket in &kets {
            if ket.len() != 4 {
                return Err(Error::DimensionMismatch {
                    expected: 4,
                    found: ket.len(),
                });
            }
            if (ket.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized {
                    deviation: (ket.norm() - 1.0).abs(),
                });
            }
        }
        // tr(P rho) = sum_{r,c} P[r,c] rho[c,r]; flatten rho as
        // vec[4c + r] = rho[c,r] and collect the sixteen traces into a
        // linear map A vec(rho) = p.
        let mut a = DMatrix::<Complex64>::zeros(16, 16);
        for (nu, ket) in kets.iter().enumerate() {
            let projector = ket * ket.adjoint();
            for r in 0..4 {
                for c in 0..4 {
                    a[(nu, 4 * c + r)] = projector[(r, c)];
                }
            }
        }
        let inv = a.try_inverse().ok_or(Error::SingularBasis)?;
        let duals = (0..16)
            .map(|nu| {
                let mut m = CMatrix::zeros(4, 4);
                for r in 0..4 {
                    for c in 0..4 {
                        m[(r, c)] = inv[(4 * r + c, nu)];
                    }
                }
                m
            })
            .collect();
        Ok(TomographyBasisSet {
            labels,
            kets,
            duals,
        })
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ket(&self, nu: usize) -> &CVector {
        &self.kets[nu]
    }

    pub fn projector(&self, nu: usize) -> CMatrix {
        &self.kets[nu] * self.kets[nu].adjoint()
    }

    /// Ideal detection probabilities `tr(P_nu rho)` for a qubit-pair state.
    pub fn probabilities(&self, rho: &JointDensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: rho.dim(),
            });
        }
        Ok(self
            .kets
            .iter()
            .map(|ket| (ket.adjoint() * rho.matrix() * ket)[(0, 0)].re.max(0.0))
            .collect())
    }

    /// Expected counts for a total of `pairs` detected pairs.
    pub fn expected_counts(&self, rho: &JointDensityMatrix, pairs: f64) -> Result<CoincidenceTable> {
        let probs = self.probabilities(rho)?;
        let counts: Vec<f64> = probs.iter().map(|p| p * pairs).collect();
        CoincidenceTable::new(&self.labels, &counts)
    }
}

/// Reconstruct a qubit-pair density matrix from sixteen coincidence counts by
/// linear inversion, then project onto the physical set (clamp negative
/// eigenvalues, renormalize the trace).
pub fn qst_reconstruct(
    table: &CoincidenceTable,
    basis: &TomographyBasisSet,
) -> Result<JointDensityMatrix> {
    let counts = table.counts();
    if counts.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: counts.len(),
        });
    }
    for &n in &counts {
        if !n.is_finite() || n < 0.0 {
            return Err(Error::OutOfRange {
                name: "coincidence count",
                value: n,
                constraint: "finite and >= 0",
            });
        }
    }
    let normalization: f64 = counts[..4].iter().sum();
    if normalization <= 0.0 {
        return Err(Error::ZeroNormalization);
    }
    let mut estimate = CMatrix::zeros(4, 4);
    for (nu, &n) in counts.iter().enumerate() {
        estimate += &basis.duals[nu] * Complex64::new(n / normalization, 0.0);
    }
    let physical = linalg::psd_project(&linalg::hermitize(&estimate));
    Ok(JointDensityMatrix::trusted(physical, 2, 2))
}

/// The +1/-1 linear-analyzer observable at angle `x` (degrees):
/// `|x><x| - |x_perp><x_perp| = cos(2x) Z + sin(2x) X`.
pub fn analyzer_observable(x: f64) -> CMatrix {
    let c = (2.0 * x.to_radians()).cos();
    let s = (2.0 * x.to_radians()).sin();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-c, 0.0),
        ],
    )
}

/// Analyzer ket at angle `x` (degrees): `cos(x)|0> + sin(x)|1>`.
pub fn analyzer_ket(x: f64) -> CVector {
    CVector::from_vec(vec![
        Complex64::new(x.to_radians().cos(), 0.0),
        Complex64::new(x.to_radians().sin(), 0.0),
    ])
}

/// Correlation `E(a, b) = tr(rho sigma(a) (x) sigma(b))` of a qubit pair
/// under linear analyzers at angles `a` and `b` (degrees).
pub fn correlation_e(rho: &JointDensityMatrix, a: f64, b: f64) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let observable = linalg::kron(&analyzer_observable(a), &analyzer_observable(b));
    Ok((rho.matrix() * observable).trace().re)
}

/// The four analyzer angles of the Bell test (degrees). The perpendicular
/// setting of any angle is the angle plus 90 degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    /// The canonical choice maximizing S for Phi+: `a = 0, a' = 45,
    /// b = 22.5, b' = 67.5` (degrees).
    pub fn reference() -> Self {
        ChshSettings {
            a: 0.0,
            a_prime: 45.0,
            b: 22.5,
            b_prime: 67.5,
        }
    }
}

/// `S = E(a,b) - E(a,b') + E(a',b) + E(a',b')`.
pub fn chsh_s(rho: &JointDensityMatrix, settings: &ChshSettings) -> Result<f64> {
    let e = chsh_correlations(rho, settings)?;
    Ok(e[0] - e[1] + e[2] + e[3])
}

/// The four correlations entering S, ordered `(a,b), (a,b'), (a',b), (a',b')`.
pub fn chsh_correlations(rho: &JointDensityMatrix, settings: &ChshSettings) -> Result<[f64; 4]> {
    Ok([
        correlation_e(rho, settings.a, settings.b)?,
        correlation_e(rho, settings.a, settings.b_prime)?,
        correlation_e(rho, settings.a_prime, settings.b)?,
        correlation_e(rho, settings.a_prime, settings.b_prime)?,
    ])
}

/// Coincidence counts of one correlation measurement: the analyzer pair at
/// `(a, b)` plus the three combinations with either analyzer rotated to its
/// perpendicular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationCounts {
    pub parallel: f64,
    pub signal_perp: f64,
    pub idler_perp: f64,
    pub both_perp: f64,
}

impl CorrelationCounts {
    pub fn total(&self) -> f64 {
        self.parallel + self.signal_perp + self.idler_perp + self.both_perp
    }
}

/// `E = (n(a,b) - n(a_perp,b) - n(a,b_perp) + n(a_perp,b_perp)) / total`.
pub fn correlation_e_from_counts(counts: &CorrelationCounts) -> Result<f64> {
    let total = counts.total();
    if total <= 0.0 {
        return Err(Error::ZeroDenominator {
            context: "correlation count total",
        });
    }
    Ok((counts.parallel - counts.signal_perp - counts.idler_perp + counts.both_perp) / total)
}

/// S from four correlation measurements ordered `(a,b), (a,b'), (a',b),
/// (a',b')`.
pub fn chsh_s_from_counts(measurements: &[CorrelationCounts; 4]) -> Result<f64> {
    let e: Vec<f64> = measurements
        .iter()
        .map(correlation_e_from_counts)
        .collect::<Result<_>>()?;
    Ok(e[0] - e[1] + e[2] + e[3])
}

/// Ideal coincidence counts for one correlation measurement at total pair
/// number `pairs`.
pub fn expected_correlation_counts(
    rho: &JointDensityMatrix,
    a: f64,
    b: f64,
    pairs: f64,
) -> Result<CorrelationCounts> {
    let prob = |x: f64, y: f64| -> Result<f64> {
        let ket = linalg::kron(
            &CMatrix::from_column_slice(2, 1, analyzer_ket(x).as_slice()),
            &CMatrix::from_column_slice(2, 1, analyzer_ket(y).as_slice()),
        );
        Ok((ket.adjoint() * rho.matrix() * ket)[(0, 0)].re.max(0.0))
    };
    Ok(CorrelationCounts {
        parallel: prob(a, b)? * pairs,
        signal_perp: prob(a + 90.0, b)? * pairs,
        idler_perp: prob(a, b + 90.0)? * pairs,
        both_perp: prob(a + 90.0, b + 90.0)? * pairs,
    })
}

/// Bell-test summary in report form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "E_values")]
    pub e_values: [f64; 4],
    pub angles: ChshSettings,
}

impl ChshReport {
    pub fn from_state(rho: &JointDensityMatrix, settings: &ChshSettings) -> Result<Self> {
        let e_values = chsh_correlations(rho, settings)?;
        Ok(ChshReport {
            s: e_values[0] - e_values[1] + e_values[2] + e_values[3],
            e_values,
            angles: *settings,
        })
    }
}

/// Fidelity estimate with a Poisson-bootstrap error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub mean: f64,
    pub std_dev: f64,
    pub resamples: usize,
}

/// Reconstruct from `table`, then repeat on Poisson-resampled count vectors
/// to estimate the statistical error of the fidelity against `target`.
pub fn fidelity_with_error(
    table: &CoincidenceTable,
    basis: &TomographyBasisSet,
    target: &JointDensityMatrix,
    resamples: usize,
    seed: u64,
) -> Result<FidelityEstimate> {
    if resamples < 100 {
        return Err(Error::OutOfRange {
            name: "resamples",
            value: resamples as f64,
            constraint: ">= 100",
        });
    }
    let counts = table.counts();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let resampled: Vec<f64> = counts
            .iter()
            .map(|&n| {
                if n > 0.0 {
                    Poisson::new(n).expect("positive rate").sample(&mut rng)
                } else {
                    0.0
                }
            })
            .collect();
        let resampled_table = CoincidenceTable::new(basis.labels(), &resampled)?;
        let rho = qst_reconstruct(&resampled_table, basis)?;
        values.push(fidelity(&rho, target)?);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    Ok(FidelityEstimate {
        mean,
        std_dev: var.sqrt(),
        resamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::werner_state;
    use crate::qstate::{bell_state, BellKind};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SQRT2X2: f64 = 2.0 * std::f64::consts::SQRT_2;

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn first_four_settings_partition_unity() {
        let basis = TomographyBasisSet::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let rho = JointDensityMatrix::new(linalg::random_density(4, &mut rng), 2, 2).unwrap();
            let probs = basis.probabilities(&rho).unwrap();
            let head: f64 = probs[..4].iter().sum();
            assert_abs_diff_eq!(head, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn dual_frame_reconstructs_exactly() {
        let basis = TomographyBasisSet::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let rho = JointDensityMatrix::new(linalg::random_density(4, &mut rng), 2, 2).unwrap();
            // Arbitrary overall scale: counts = probabilities x 12345.
            let table = basis.expected_counts(&rho, 12345.0).unwrap();
            let back = qst_reconstruct(&table, &basis).unwrap();
            assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-9);
        }
    }

    #[test]
    fn reconstruction_output_is_physical_under_noise() {
        let basis = TomographyBasisSet::standard();
        let rho = bell_state(BellKind::PhiPlus).to_density();
        let mut table = basis.expected_counts(&rho, 500.0).unwrap();
        // Perturb counts like shot noise would.
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for e in &mut table.entries {
            let jitter: f64 = rand::Rng::gen_range(&mut rng, -20.0..20.0);
            e.count = (e.count + jitter).max(0.0);
        }
        let rho_hat = qst_reconstruct(&table, &basis).unwrap();
        assert_abs_diff_eq!(rho_hat.trace(), 1.0, epsilon = 1e-10);
        assert!(linalg::min_eigenvalue(rho_hat.matrix()) > -1e-12);
    }

    #[test]
    fn reconstruction_errors() {
        let basis = TomographyBasisSet::standard();
        let zeros = CoincidenceTable::new(
            basis.labels(),
            &[0.0; 16],
        )
        .unwrap();
        assert!(matches!(
            qst_reconstruct(&zeros, &basis),
            Err(Error::ZeroNormalization)
        ));
        let negative = CoincidenceTable::new(basis.labels(), &[-1.0; 16]).unwrap();
        assert!(qst_reconstruct(&negative, &basis).is_err());
        let short = CoincidenceTable::new(&basis.labels()[..4], &[1.0; 4]).unwrap();
        assert!(matches!(
            qst_reconstruct(&short, &basis),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn degenerate_projector_set_is_rejected() {
        let labels: Vec<String> = (0..16).map(|k| format!("b{k}")).collect();
        let kets: Vec<CVector> = (0..16)
            .map(|_| {
                CVector::from_vec(vec![
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                ])
            })
            .collect();
        assert!(matches!(
            TomographyBasisSet::from_kets(labels, kets),
            Err(Error::SingularBasis)
        ));
    }

    #[test]
    fn phi_plus_correlations_follow_cos_two_delta() {
        let rho = bell_state(BellKind::PhiPlus).to_density();
        for (a, b) in [(0.0, 0.0), (17.0, 5.5), (68.8, -22.9), (12.0, 12.0)] {
            assert_abs_diff_eq!(
                correlation_e(&rho, a, b).unwrap(),
                (2.0 * (a - b)).to_radians().cos(),
                epsilon = 1e-12
            );
        }
        // Unbiased setting: 45 degrees apart.
        assert_abs_diff_eq!(correlation_e(&rho, 0.0, 45.0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn werner_correlation_at_reference_angles() {
        // E = (4F - 1)/3 * cos(2(a - b)); at F = 0.8, a = 0, b = 22.5 deg.
        let w = werner_state(0.8).unwrap();
        assert_abs_diff_eq!(
            correlation_e(&w, 0.0, 22.5).unwrap(),
            0.5185449728701349,
            epsilon = 1e-12
        );
    }

    #[test]
    fn chsh_landmarks() {
        let settings = ChshSettings::reference();
        let phi = bell_state(BellKind::PhiPlus).to_density();
        assert_abs_diff_eq!(chsh_s(&phi, &settings).unwrap(), SQRT2X2, epsilon = 1e-12);
        let mixed =
            JointDensityMatrix::new(linalg::identity(4) * Complex64::new(0.25, 0.0), 2, 2).unwrap();
        assert_abs_diff_eq!(chsh_s(&mixed, &settings).unwrap(), 0.0, epsilon = 1e-12);
        // Werner states interpolate linearly: S = 2 sqrt(2) (4F - 1) / 3.
        for f in [0.25, 0.5, 0.8, 1.0] {
            let w = werner_state(f).unwrap();
            assert_abs_diff_eq!(
                chsh_s(&w, &settings).unwrap(),
                SQRT2X2 * (4.0 * f - 1.0) / 3.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn count_based_e_matches_density_based() {
        let settings = ChshSettings::reference();
        let w = werner_state(0.83).unwrap();
        let mut measurements = Vec::new();
        for (a, b) in [
            (settings.a, settings.b),
            (settings.a, settings.b_prime),
            (settings.a_prime, settings.b),
            (settings.a_prime, settings.b_prime),
        ] {
            let counts = expected_correlation_counts(&w, a, b, 1e6).unwrap();
            assert_abs_diff_eq!(
                correlation_e_from_counts(&counts).unwrap(),
                correlation_e(&w, a, b).unwrap(),
                epsilon = 1e-10
            );
            measurements.push(counts);
        }
        let grid: [CorrelationCounts; 4] = measurements.try_into().unwrap();
        assert_abs_diff_eq!(
            chsh_s_from_counts(&grid).unwrap(),
            chsh_s(&w, &settings).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn count_based_e_rejects_empty() {
        let empty = CorrelationCounts {
            parallel: 0.0,
            signal_perp: 0.0,
            idler_perp: 0.0,
            both_perp: 0.0,
        };
        assert!(correlation_e_from_counts(&empty).is_err());
    }

    #[test]
    fn bootstrap_error_shrinks_with_counts() {
        let basis = TomographyBasisSet::standard();
        let rho = werner_state(0.9).unwrap();
        let target = bell_state(BellKind::PhiPlus).to_density();
        let small = basis.expected_counts(&rho, 1e4).unwrap();
        let large = basis.expected_counts(&rho, 1e6).unwrap();
        let est_small = fidelity_with_error(&small, &basis, &target, 120, 7).unwrap();
        let est_large = fidelity_with_error(&large, &basis, &target, 120, 7).unwrap();
        assert_abs_diff_eq!(est_small.mean, 0.9, epsilon = 0.02);
        assert_abs_diff_eq!(est_large.mean, 0.9, epsilon = 0.002);
        assert!(est_small.std_dev > 0.0 && est_small.std_dev < 0.02);
        let ratio = est_small.std_dev / est_large.std_dev;
        // 100x the counts should shrink the error by about 10x.
        assert!(
            (3.0..30.0).contains(&ratio),
            "std ratio {ratio}, small {} large {}",
            est_small.std_dev,
            est_large.std_dev
        );
    }

    #[test]
    fn bootstrap_error_vanishes_for_huge_counts() {
        let basis = TomographyBasisSet::standard();
        let rho = bell_state(BellKind::PhiPlus).to_density();
        let target = rho.clone();
        let table = basis.expected_counts(&rho, 1e8).unwrap();
        let est = fidelity_with_error(&table, &basis, &target, 100, 11).unwrap();
        assert!(est.mean > 0.999);
        assert!(est.std_dev < 1e-3);
    }

    #[test]
    fn bootstrap_rejects_too_few_resamples() {
        let basis = TomographyBasisSet::standard();
        let rho = bell_state(BellKind::PhiPlus).to_density();
        let table = basis.expected_counts(&rho, 100.0).unwrap();
        assert!(fidelity_with_error(&table, &basis, &rho, 99, 1).is_err());
    }
}
