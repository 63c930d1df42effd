//! Reconfigurable four-mode interferometer circuits.
//!
//! Each photon chip routes its four path modes through a mesh of
//! Mach-Zehnder interferometers (MZIs), waveguide crossings, and phase
//! shifters. This module builds the 4x4 unitaries for the settings used in
//! the experiment and compiles element lists into matrices.
//!
//! MZI convention: `U(theta, psi) = P(theta) C P(psi) C` with the symmetric
//! coupler `C = [[1, i], [i, 1]] / sqrt(2)` and `P(x) = diag(e^{ix}, 1)`
//! placing phases on the first (upper) listed port. The internal phase `psi`
//! selects the routing: `psi = pi` is the bar state, `psi = 0` the cross
//! state, `psi = pi/2` a balanced splitter. Global phases are left as the
//! convention produces them; they drop out of every density-matrix observable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::ModeIndex;

/// Outer and internal phase of one MZI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSetting {
    pub theta: f64,
    pub psi: f64,
}

impl PhaseSetting {
    pub fn bar() -> Self {
        PhaseSetting {
            theta: 0.0,
            psi: std::f64::consts::PI,
        }
    }

    pub fn cross() -> Self {
        PhaseSetting {
            theta: 0.0,
            psi: 0.0,
        }
    }

    pub fn balanced() -> Self {
        PhaseSetting {
            theta: 0.0,
            psi: std::f64::consts::FRAC_PI_2,
        }
    }
}

/// 2x2 MZI unitary for the given phase setting.
pub fn mzi_unitary(setting: PhaseSetting) -> CMatrix {
    let c = coupler();
    let internal = phase_2x2(setting.psi);
    let outer = phase_2x2(setting.theta);
    outer * &c * internal * &c
}

fn coupler() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, s),
            Complex64::new(s, 0.0),
        ],
    )
}

fn phase_2x2(x: f64) -> CMatrix {
    let mut m = CMatrix::identity(2, 2);
    m[(0, 0)] = Complex64::from_polar(1.0, x);
    m
}

/// How the 2D grating coupler spreads a dual-polarization input over the four
/// path modes: entry `k` gives `(spatial waveguide pair, polarization)` of
/// mode `k`.
pub fn gc_relabel_map() -> [(u8, char); 4] {
    let mut table = [(0u8, 'H'); 4];
    for (k, slot) in table.iter_mut().enumerate() {
        let mode = ModeIndex::new(k as u8).expect("k < 4");
        *slot = (
            mode.spatial_bit(),
            if mode.polarization_bit() == 0 { 'H' } else { 'V' },
        );
    }
    table
}

/// Mode permutation applied on both chips for the purification setting:
/// `0 -> 1, 1 -> 3, 2 -> 2, 3 -> 0`.
pub fn purification_permutation() -> CMatrix {
    permutation_matrix(&[1, 3, 2, 0])
}

/// Matrix with `out[map[j], j] = 1`: column `j` routes input mode `j` to
/// output mode `map[j]`.
pub fn permutation_matrix(map: &[usize; 4]) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (from, &to) in map.iter().enumerate() {
        m[(to, from)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Two levels of mode-pair Hadamards: first on pairs (0,1) and (2,3), then on
/// (0,2) and (1,3). Equals the tensor product of one Hadamard per
/// degree-of-freedom qubit, converts phase-flip errors into bit-flip errors,
/// and is its own inverse.
pub fn hadamard_layer() -> CMatrix {
    let h = 0.5;
    CMatrix::from_row_slice(
        4,
        4,
        &[
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(h, 0.0),
        ],
    )
}

/// Element of a four-mode circuit description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    /// MZI across two ports; uses `theta` and `psi`.
    Mzi,
    /// Ideal waveguide crossing (exact mode swap); phases ignored.
    Crossing,
    /// Single-port phase shifter; uses `theta`.
    Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitElement {
    pub kind: ElementKind,
    pub ports: Vec<usize>,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub psi: f64,
}

impl CircuitElement {
    pub fn mzi(a: usize, b: usize, setting: PhaseSetting) -> Self {
        CircuitElement {
            kind: ElementKind::Mzi,
            ports: vec![a, b],
            theta: setting.theta,
            psi: setting.psi,
        }
    }

    pub fn crossing(a: usize, b: usize) -> Self {
        CircuitElement {
            kind: ElementKind::Crossing,
            ports: vec![a, b],
            theta: 0.0,
            psi: 0.0,
        }
    }

    pub fn phase(port: usize, theta: f64) -> Self {
        CircuitElement {
            kind: ElementKind::Phase,
            ports: vec![port],
            theta,
            psi: 0.0,
        }
    }
}

/// Named list of circuit elements, applied first-to-last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedCircuit {
    pub name: String,
    pub elements: Vec<CircuitElement>,
}

pub const CIRCUIT_MODES: usize = 4;

/// Fold a circuit description into its 4x4 unitary.
pub fn compile(circuit: &NamedCircuit) -> Result<CMatrix> {
    let mut u = linalg::identity(CIRCUIT_MODES);
    for element in &circuit.elements {
        let step = element_unitary(element)?;
        u = step * u;
    }
    Ok(u)
}

fn element_unitary(element: &CircuitElement) -> Result<CMatrix> {
    let expect_ports = match element.kind {
        ElementKind::Mzi | ElementKind::Crossing => 2,
        ElementKind::Phase => 1,
    };
    if element.ports.len() != expect_ports {
        return Err(Error::DimensionMismatch {
            expected: expect_ports,
            found: element.ports.len(),
        });
    }
    for &p in &element.ports {
        if p >= CIRCUIT_MODES {
            return Err(Error::PortOutOfRange {
                port: p,
                modes: CIRCUIT_MODES,
            });
        }
    }
    match element.kind {
        ElementKind::Mzi => {
            let (a, b) = (element.ports[0], element.ports[1]);
            if a == b {
                return Err(Error::PortOutOfRange {
                    port: b,
                    modes: CIRCUIT_MODES,
                });
            }
            let block = mzi_unitary(PhaseSetting {
                theta: element.theta,
                psi: element.psi,
            });
            Ok(embed_two_port(&block, a, b))
        }
        ElementKind::Crossing => {
            let (a, b) = (element.ports[0], element.ports[1]);
            if a == b {
                return Err(Error::PortOutOfRange {
                    port: b,
                    modes: CIRCUIT_MODES,
                });
            }
            let mut m = linalg::identity(CIRCUIT_MODES);
            m[(a, a)] = linalg::ZERO;
            m[(b, b)] = linalg::ZERO;
            m[(a, b)] = linalg::ONE;
            m[(b, a)] = linalg::ONE;
            Ok(m)
        }
        ElementKind::Phase => {
            let mut m = linalg::identity(CIRCUIT_MODES);
            m[(element.ports[0], element.ports[0])] = Complex64::from_polar(1.0, element.theta);
            Ok(m)
        }
    }
}

fn embed_two_port(block: &CMatrix, a: usize, b: usize) -> CMatrix {
    let mut m = linalg::identity(CIRCUIT_MODES);
    m[(a, a)] = block[(0, 0)];
    m[(a, b)] = block[(0, 1)];
    m[(b, a)] = block[(1, 0)];
    m[(b, b)] = block[(1, 1)];
    m
}

/// Crossing network realizing [`purification_permutation`].
pub fn purification_circuit() -> NamedCircuit {
    NamedCircuit {
        name: "purification".to_string(),
        elements: vec![
            CircuitElement::crossing(0, 1),
            CircuitElement::crossing(0, 3),
        ],
    }
}

/// MZI realization of [`hadamard_layer`]. Balanced MZIs produce a Hadamard up
/// to a `3 pi / 4` global phase per level, which the trailing phase shifters
/// remove so the compiled matrix matches the layer exactly.
pub fn hadamard_conversion_circuit() -> NamedCircuit {
    let mut elements = Vec::new();
    for level in [[(0, 1), (2, 3)], [(0, 2), (1, 3)]] {
        for (a, b) in level {
            elements.push(CircuitElement::mzi(a, b, PhaseSetting::balanced()));
        }
        for port in 0..CIRCUIT_MODES {
            elements.push(CircuitElement::phase(
                port,
                -3.0 * std::f64::consts::FRAC_PI_4,
            ));
        }
    }
    NamedCircuit {
        name: "hadamard_conversion".to_string(),
        elements,
    }
}

/// Identity routing used for distribution-only runs.
pub fn distribution_circuit() -> NamedCircuit {
    NamedCircuit {
        name: "distribution".to_string(),
        elements: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn mzi_is_unitary_for_arbitrary_phases() {
        for theta in [0.0, 0.7, 2.4, -1.1] {
            for psi in [0.0, 0.3, 1.57, 3.2, 5.0] {
                let u = mzi_unitary(PhaseSetting { theta, psi });
                assert!(linalg::is_unitary(&u, 1e-12), "theta={theta} psi={psi}");
            }
        }
    }

    #[test]
    fn mzi_bar_cross_balanced_moduli() {
        let bar = mzi_unitary(PhaseSetting::bar());
        assert_abs_diff_eq!(bar[(0, 0)].norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bar[(1, 0)].norm(), 0.0, epsilon = 1e-12);

        let cross = mzi_unitary(PhaseSetting::cross());
        assert_abs_diff_eq!(cross[(0, 0)].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cross[(1, 0)].norm(), 1.0, epsilon = 1e-12);

        let balanced = mzi_unitary(PhaseSetting::balanced());
        for entry in balanced.iter() {
            assert_abs_diff_eq!(entry.norm_sqr(), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn relabel_map_interleaves_polarization() {
        assert_eq!(gc_relabel_map(), [(0, 'H'), (0, 'V'), (1, 'H'), (1, 'V')]);
    }

    #[test]
    fn purification_permutation_routes_and_inverts() {
        let p = purification_permutation();
        for (from, to) in [(0usize, 1usize), (1, 3), (2, 2), (3, 0)] {
            assert_abs_diff_eq!(p[(to, from)].re, 1.0, epsilon = 1e-15);
        }
        assert!(linalg::is_unitary(&p, 1e-15));
        // Order three: the cycle (0 1 3) closes after three applications.
        let p3 = &p * &p * &p;
        assert!(max_abs_diff(&p3, &linalg::identity(4)) < 1e-15);
    }

    #[test]
    fn hadamard_layer_is_an_involution() {
        let h = hadamard_layer();
        assert!(linalg::is_unitary(&h, 1e-12));
        assert!(max_abs_diff(&(&h * &h), &linalg::identity(4)) < 1e-12);
    }

    #[test]
    fn hadamard_layer_spreads_mode_zero_evenly() {
        let h = hadamard_layer();
        for row in 0..4 {
            assert_abs_diff_eq!(h[(row, 0)].re, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn compiled_purification_matches_permutation() {
        let compiled = compile(&purification_circuit()).unwrap();
        assert!(max_abs_diff(&compiled, &purification_permutation()) < 1e-12);
    }

    #[test]
    fn compiled_hadamard_matches_layer() {
        let compiled = compile(&hadamard_conversion_circuit()).unwrap();
        assert!(max_abs_diff(&compiled, &hadamard_layer()) < 1e-12);
    }

    #[test]
    fn compile_rejects_bad_ports() {
        let bad = NamedCircuit {
            name: "bad".into(),
            elements: vec![CircuitElement::crossing(0, 4)],
        };
        assert!(matches!(
            compile(&bad),
            Err(Error::PortOutOfRange { port: 4, .. })
        ));
        let dup = NamedCircuit {
            name: "dup".into(),
            elements: vec![CircuitElement::mzi(1, 1, PhaseSetting::bar())],
        };
        assert!(compile(&dup).is_err());
    }

    #[test]
    fn named_circuit_json_round_trip() {
        let circuit = hadamard_conversion_circuit();
        let text = serde_json::to_string(&circuit).unwrap();
        let back: NamedCircuit = serde_json::from_str(&text).unwrap();
        assert_eq!(back, circuit);
        // Unknown element fields are rejected.
        let bad = r#"{"name":"x","elements":[{"kind":"mzi","ports":[0,1],"gamma":1.0}]}"#;
        assert!(serde_json::from_str::<NamedCircuit>(bad).is_err());
    }
}
