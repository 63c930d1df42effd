//! Time-distributed error channels and reference mixed states.
//!
//! Between distribution and purification the idler photon picks up, with
//! probability `p` per degree of freedom, either a bit flip (mode swap within
//! the degree of freedom) or a phase flip (sign on one basis branch). The
//! errors on the two degrees of freedom are independent, so a channel is a
//! four-branch convex mixture with weights `(1-p)^2, p(1-p), p(1-p), p^2`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{bell_projector, compose_dof_pair, BellKind, JointDensityMatrix};

/// Deterministic error applied to one photon's four modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    /// No error.
    None,
    /// Bit flip of the polarization qubit: swap modes (0,1) and (2,3).
    BfPol,
    /// Bit flip of the spatial qubit: swap modes (0,2) and (1,3).
    BfSpa,
    /// Bit flips on both degrees of freedom: swap modes (0,3) and (1,2).
    BfBoth,
    /// Phase flip of the polarization qubit: sign on modes 1 and 3.
    PfPol,
    /// Phase flip of the spatial qubit: sign on modes 2 and 3.
    PfSpa,
    /// Phase flips on both degrees of freedom.
    PfBoth,
}

impl BranchKind {
    /// 4x4 unitary realizing this error on one photon.
    pub fn unitary(self) -> CMatrix {
        let perm = |map: &[usize; 4]| crate::circuit::permutation_matrix(map);
        let signs = |d: [f64; 4]| {
            let mut m = CMatrix::zeros(4, 4);
            for (k, &s) in d.iter().enumerate() {
                m[(k, k)] = Complex64::new(s, 0.0);
            }
            m
        };
        match self {
            BranchKind::None => linalg::identity(4),
            BranchKind::BfPol => perm(&[1, 0, 3, 2]),
            BranchKind::BfSpa => perm(&[2, 3, 0, 1]),
            BranchKind::BfBoth => perm(&[3, 2, 1, 0]),
            BranchKind::PfPol => signs([1.0, -1.0, 1.0, -1.0]),
            BranchKind::PfSpa => signs([1.0, 1.0, -1.0, -1.0]),
            BranchKind::PfBoth => signs([1.0, -1.0, -1.0, 1.0]),
        }
    }
}

/// One weighted branch of a channel. The error acts on the idler; an optional
/// error can act on the signal photon in the same branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelBranch {
    pub p: f64,
    pub kind: BranchKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_kind: Option<BranchKind>,
}

/// Convex mixture of deterministic error branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannelMix")]
pub struct ChannelMix {
    branches: Vec<ChannelBranch>,
}

// Deserialization detour so JSON input passes the same probability checks as
// programmatic construction.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannelMix {
    branches: Vec<ChannelBranch>,
}

impl TryFrom<RawChannelMix> for ChannelMix {
    type Error = Error;

    fn try_from(raw: RawChannelMix) -> Result<Self> {
        ChannelMix::new(raw.branches)
    }
}

/// Tolerance on the branch probability sum.
const PROB_SUM_TOL: f64 = 1e-12;

impl ChannelMix {
    pub fn new(branches: Vec<ChannelBranch>) -> Result<Self> {
        for b in &branches {
            if !(0.0..=1.0).contains(&b.p) || !b.p.is_finite() {
                return Err(Error::OutOfRange {
                    name: "branch probability",
                    value: b.p,
                    constraint: "0 <= p <= 1",
                });
            }
        }
        let sum: f64 = branches.iter().map(|b| b.p).sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::ProbabilitySum { sum });
        }
        Ok(ChannelMix { branches })
    }

    pub fn branches(&self) -> &[ChannelBranch] {
        &self.branches
    }

    /// Sample a branch index proportional to the branch probabilities, for
    /// per-pulse Monte-Carlo runs.
    pub fn sample_branch<R: Rng>(&self, rng: &mut R) -> usize {
        let draw: f64 = rng.gen();
        let mut acc = 0.0;
        for (k, b) in self.branches.iter().enumerate() {
            acc += b.p;
            if draw < acc {
                return k;
            }
        }
        self.branches.len() - 1
    }
}

fn two_dof_mix(p: f64, single: [BranchKind; 2], both: BranchKind) -> Result<ChannelMix> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::OutOfRange {
            name: "flip probability",
            value: p,
            constraint: "0 <= p <= 1",
        });
    }
    let branch = |prob, kind| ChannelBranch {
        p: prob,
        kind,
        signal_kind: None,
    };
    ChannelMix::new(vec![
        branch((1.0 - p) * (1.0 - p), BranchKind::None),
        branch(p * (1.0 - p), single[0]),
        branch(p * (1.0 - p), single[1]),
        branch(p * p, both),
    ])
}

/// Bit-flip channel with independent flip probability `p` per degree of
/// freedom, applied to the idler.
pub fn bf_channel_mix(p: f64) -> Result<ChannelMix> {
    two_dof_mix(p, [BranchKind::BfPol, BranchKind::BfSpa], BranchKind::BfBoth)
}

/// Phase-flip channel with independent flip probability `p` per degree of
/// freedom, applied to the idler.
pub fn pf_channel_mix(p: f64) -> Result<ChannelMix> {
    two_dof_mix(p, [BranchKind::PfPol, BranchKind::PfSpa], BranchKind::PfBoth)
}

/// Push a four-mode pair state through the channel:
/// `rho -> sum_k p_k (U_sig,k (x) U_idl,k) rho (...)^dagger`.
pub fn apply_channel_mix(rho: &JointDensityMatrix, mix: &ChannelMix) -> Result<JointDensityMatrix> {
    if rho.signal_dim() != 4 || rho.idler_dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: rho.dim(),
        });
    }
    let mut out = CMatrix::zeros(16, 16);
    for b in &mix.branches {
        let u_signal = b.signal_kind.unwrap_or(BranchKind::None).unitary();
        let conjugated = rho.apply_unitary(&u_signal, &b.kind.unitary())?;
        out += conjugated.matrix() * Complex64::new(b.p, 0.0);
    }
    Ok(JointDensityMatrix::trusted(out, 4, 4))
}

/// Werner state of one qubit pair: weight `f` on Phi+ and `(1-f)/3` on each
/// of the other three Bell projectors.
pub fn werner_state(f: f64) -> Result<JointDensityMatrix> {
    if !(0.0..=1.0).contains(&f) || !f.is_finite() {
        return Err(Error::OutOfRange {
            name: "werner fidelity",
            value: f,
            constraint: "0 <= f <= 1",
        });
    }
    let mut m = bell_projector(BellKind::PhiPlus) * Complex64::new(f, 0.0);
    for kind in [BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus] {
        m += bell_projector(kind) * Complex64::new((1.0 - f) / 3.0, 0.0);
    }
    Ok(JointDensityMatrix::trusted(m, 2, 2))
}

/// Four-mode pair state whose spatial and polarization qubit pairs are
/// independent Werner states. `hyper_werner_state(1, 1)` is the ideal
/// delivered state; lower fidelities model the residual imperfections of the
/// distribution link and serve as the calibrated baseline channel.
pub fn hyper_werner_state(f_spatial: f64, f_polarization: f64) -> Result<JointDensityMatrix> {
    compose_dof_pair(&werner_state(f_spatial)?, &werner_state(f_polarization)?)
}
