//! Entanglement purification by mode permutation and coincidence
//! post-selection.
//!
//! Both chips route their four modes through the permutation
//! `0 -> 1, 1 -> 3, 2 -> 2, 3 -> 0` and photons are collected from one
//! waveguide pair per chip. A coincidence survives only when the spatial and
//! polarization Bell components agree in type (`phi (x) Phi` or
//! `psi (x) Psi`), which sacrifices the spatial qubit to flag errors on the
//! polarization qubit. Phase-flip noise is handled by conjugating with a
//! Hadamard layer on both photons first, which maps phase flips onto bit
//! flips.

use serde::{Deserialize, Serialize};

use crate::circuit::{hadamard_layer, purification_permutation};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::{
    bell_state, compose_dof_pair, fidelity_to_bell, BellKind, DegreeOfFreedom, JointDensityMatrix,
};

/// Which waveguide pair is collected on both chips after the permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollectionPair {
    /// Waveguides 0 and 1.
    FirstPair,
    /// Waveguides 2 and 3; collected in parallel by a second detector pair.
    SecondPair,
}

impl CollectionPair {
    fn modes(self) -> [usize; 2] {
        match self {
            CollectionPair::FirstPair => [0, 1],
            CollectionPair::SecondPair => [2, 3],
        }
    }
}

/// Success probabilities below this threshold count as no coincidence and
/// produce no post-selected state.
pub const SUCCESS_FLOOR: f64 = 1e-12;

/// Result of the purification step.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationOutcome {
    /// Post-selected qubit-pair state; `None` when the coincidence
    /// probability is below [`SUCCESS_FLOOR`].
    pub post_state: Option<JointDensityMatrix>,
    /// Probability that both photons arrive in the collected pair.
    pub success_probability: f64,
}

impl PurificationOutcome {
    /// Fidelity of the post-selected state against a Bell state, or zero
    /// when there is no coincidence.
    pub fn fidelity_to(&self, kind: BellKind) -> Result<f64> {
        match &self.post_state {
            Some(rho) => fidelity_to_bell(rho, kind),
            None => Ok(0.0),
        }
    }
}

/// Run the purification circuit on a four-mode pair state and post-select on
/// both photons arriving in the collected waveguide pair. The surviving pair
/// of modes is relabeled `{first, second} -> {0, 1}` so the output is an
/// ordinary qubit-pair state.
pub fn purify(rho: &JointDensityMatrix, pair: CollectionPair) -> Result<PurificationOutcome> {
    if rho.signal_dim() != 4 || rho.idler_dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: rho.dim(),
        });
    }
    let p = purification_permutation();
    let routed = rho.apply_unitary(&p, &p)?;
    let collected = collected_pair_block(&routed, pair)?;
    let success = collected.trace().re.max(0.0);
    if success < SUCCESS_FLOOR {
        return Ok(PurificationOutcome {
            post_state: None,
            success_probability: success,
        });
    }
    let normalized = collected / num_complex::Complex64::new(success, 0.0);
    Ok(PurificationOutcome {
        post_state: Some(JointDensityMatrix::trusted(normalized, 2, 2)),
        success_probability: success,
    })
}

/// Project a four-mode pair state onto both photons sitting in the collected
/// waveguide pair and return the unnormalized polarization-pair block. Its
/// trace is the coincidence probability of that detector pair.
pub fn collected_pair_block(rho: &JointDensityMatrix, pair: CollectionPair) -> Result<CMatrix> {
    if rho.signal_dim() != 4 || rho.idler_dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: rho.dim(),
        });
    }
    let modes = pair.modes();
    let mut collected = CMatrix::zeros(4, 4);
    for s in 0..2 {
        for i in 0..2 {
            for s2 in 0..2 {
                for i2 in 0..2 {
                    collected[(2 * s + i, 2 * s2 + i2)] = rho.matrix()
                        [(4 * modes[s] + modes[i], 4 * modes[s2] + modes[i2])];
                }
            }
        }
    }
    Ok(collected)
}

/// Purification preceded by the Hadamard layer on both photons, converting
/// phase-flip errors into bit-flip errors that the coincidence filter can
/// reject.
pub fn purify_pf(rho: &JointDensityMatrix, pair: CollectionPair) -> Result<PurificationOutcome> {
    let h = hadamard_layer();
    let converted = rho.apply_unitary(&h, &h)?;
    purify(&converted, pair)
}

/// Post-selected fidelity when two pairs of polarization fidelities `f1`,
/// `f2` carry independent bit-flip errors:
/// `f1 f2 / (f1 f2 + (1 - f1)(1 - f2))`.
pub fn theoretical_fidelity_bf(f1: f64, f2: f64) -> Result<f64> {
    for (name, f) in [("f1", f1), ("f2", f2)] {
        if !(0.0..=1.0).contains(&f) || !f.is_finite() {
            return Err(Error::OutOfRange {
                name: if name == "f1" {
                    "input fidelity f1"
                } else {
                    "input fidelity f2"
                },
                value: f,
                constraint: "0 <= f <= 1",
            });
        }
    }
    let denom = f1 * f2 + (1.0 - f1) * (1.0 - f2);
    if denom <= 0.0 {
        return Err(Error::ZeroDenominator {
            context: "bit-flip post-selection probability",
        });
    }
    Ok(f1 * f2 / denom)
}

/// Post-selected fidelity for Werner-state inputs of fidelity `f` on both
/// degrees of freedom:
/// `(f^2 + (1-f)^2/9) / (f^2 + 2/3 f (1-f) + 5/9 (1-f)^2)`.
pub fn theoretical_fidelity_werner(f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) || !f.is_finite() {
        return Err(Error::OutOfRange {
            name: "werner fidelity",
            value: f,
            constraint: "0 <= f <= 1",
        });
    }
    let g = 1.0 - f;
    let num = f * f + g * g / 9.0;
    let denom = f * f + 2.0 / 3.0 * f * g + 5.0 / 9.0 * g * g;
    if denom <= 0.0 {
        return Err(Error::ZeroDenominator {
            context: "werner post-selection probability",
        });
    }
    Ok(num / denom)
}

/// One row of the coincidence syndrome table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyndromeRow {
    /// Spatial Bell component of the input product state.
    pub spatial: BellKind,
    /// Polarization Bell component of the input product state.
    pub polar: BellKind,
    /// Preparation probability of this component under Werner weights.
    pub probability: f64,
    /// Whether the component yields a coincidence in the collected pair.
    pub coincidence: bool,
    /// Post-selected Bell state when a coincidence occurs.
    pub post_label: Option<BellKind>,
}

/// Enumerate all sixteen spatial x polarization Bell products with Werner
/// weights of fidelity `f` on both degrees of freedom, pushing each product
/// through the actual purification pipeline. Row order is spatial-major.
pub fn syndrome_table(f: f64) -> Result<Vec<SyndromeRow>> {
    if !(0.0..=1.0).contains(&f) || !f.is_finite() {
        return Err(Error::OutOfRange {
            name: "werner fidelity",
            value: f,
            constraint: "0 <= f <= 1",
        });
    }
    let weight = |kind: BellKind| {
        if kind == BellKind::PhiPlus {
            f
        } else {
            (1.0 - f) / 3.0
        }
    };
    let mut rows = Vec::with_capacity(16);
    for spatial in BellKind::ALL {
        for polar in BellKind::ALL {
            let product = compose_dof_pair(
                &bell_state(spatial).to_density(),
                &bell_state(polar).to_density(),
            )?;
            let outcome = purify(&product, CollectionPair::FirstPair)?;
            let post_label = match &outcome.post_state {
                None => None,
                Some(rho) => BellKind::ALL
                    .into_iter()
                    .find(|&kind| fidelity_to_bell(rho, kind).is_ok_and(|f| f > 1.0 - 1e-9)),
            };
            rows.push(SyndromeRow {
                spatial,
                polar,
                probability: weight(spatial) * weight(polar),
                coincidence: outcome.success_probability >= SUCCESS_FLOOR,
                post_label,
            });
        }
    }
    Ok(rows)
}

/// Accumulate a syndrome table into the post-selected fidelity: weight on
/// coincidence rows whose post state is Phi+ over all coincidence weight.
pub fn accumulate_syndrome_fidelity(rows: &[SyndromeRow]) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for row in rows {
        if row.coincidence {
            den += row.probability;
            if row.post_label == Some(BellKind::PhiPlus) {
                num += row.probability;
            }
        }
    }
    if den <= 0.0 {
        return Err(Error::ZeroDenominator {
            context: "syndrome coincidence weight",
        });
    }
    Ok(num / den)
}

/// Convenience pipeline: collected-pair fidelity and success probability of a
/// four-mode pair state before and after purification, reading the
/// polarization qubit before and the post-selected pair after.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurifyComparison {
    pub fidelity_before: f64,
    pub fidelity_after: f64,
    pub success_probability: f64,
}

pub fn compare_before_after(
    rho: &JointDensityMatrix,
    use_hadamard_conversion: bool,
) -> Result<PurifyComparison> {
    let pol = rho.partial_trace(DegreeOfFreedom::Polarization)?;
    let fidelity_before = fidelity_to_bell(&pol, BellKind::PhiPlus)?;
    let outcome = if use_hadamard_conversion {
        purify_pf(rho, CollectionPair::FirstPair)?
    } else {
        purify(rho, CollectionPair::FirstPair)?
    };
    Ok(PurifyComparison {
        fidelity_before,
        fidelity_after: outcome.fidelity_to(BellKind::PhiPlus)?,
        success_probability: outcome.success_probability,
    })
}
