//! Classification of three-mode Gaussian states through the negativity of
//! single-mode partial transposes.
//!
//! For 1×M mode cuts of Gaussian states the npt condition is both sufficient
//! and necessary, so counting which single-mode partial transposes are
//! unphysical sorts a three-mode state into: fully inseparable (all three
//! npt), one-mode biseparable (two npt), two-mode biseparable (one npt), or
//! ppt across every cut. The last bucket deliberately merges two classes —
//! telling bound-entangled three-mode biseparable states apart from fully
//! separable ones needs machinery beyond the npt criterion, and this module
//! does not pretend otherwise.

use serde_json::json;

use crate::gaussian::{CovarianceMatrix, VACUUM_VARIANCE};
use crate::Error;

/// Default one-sided tolerance: a partial-transpose eigenvalue within `tol`
/// of 1/4 counts as ppt, never over-claiming entanglement from round-off.
pub const DEFAULT_NPT_TOL: f64 = 1e-9;

/// Outcome labels of the tripartite classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TripartiteClassLabel {
    /// All three single-mode cuts are npt.
    FullyInseparable,
    /// Exactly one mode (`separable_mode`) is ppt against the rest.
    OneModeBiseparable { separable_mode: usize },
    /// Exactly two modes are ppt against the rest.
    TwoModeBiseparable { separable_modes: (usize, usize) },
    /// Every single-mode cut is ppt; fully separable and three-mode
    /// biseparable states are indistinguishable here.
    PptAllCuts,
}

impl TripartiteClassLabel {
    pub fn as_str(&self) -> String {
        match self {
            TripartiteClassLabel::FullyInseparable => "Class1_FullyInseparable".into(),
            TripartiteClassLabel::OneModeBiseparable { separable_mode } => {
                format!("Class2_OneModeBiseparable({separable_mode})")
            }
            TripartiteClassLabel::TwoModeBiseparable {
                separable_modes: (k, m),
            } => {
                format!("Class3_TwoModeBiseparable({k},{m})")
            }
            TripartiteClassLabel::PptAllCuts => "Class4or5_PPTAllCuts".into(),
        }
    }
}

/// Full classification record: the label plus the per-mode evidence.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteClass {
    pub label: TripartiteClassLabel,
    pub npt_flags: [bool; 3],
    pub min_pt_symplectic_eigenvalues: [f64; 3],
    pub tolerance: f64,
}

impl TripartiteClass {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "class": self.label.as_str(),
            "npt": self.npt_flags,
            "min_pt_eigs": self.min_pt_symplectic_eigenvalues,
            "tolerance": self.tolerance,
        })
    }
}

/// Partial-transpose check of one mode against the rest: returns whether the
/// cut is npt and the minimum symplectic eigenvalue of Γ_j V Γ_j.
///
/// The flag is `eig < 1/4 − tol`. Classification of unphysical input is
/// meaningless, so such matrices are rejected.
pub fn npt_single_mode(v: &CovarianceMatrix, mode: usize, tol: f64) -> Result<(bool, f64), Error> {
    if !v.is_physical(tol) {
        let min = v.min_symplectic_eigenvalue().unwrap_or(f64::NAN);
        return Err(Error::Unphysical {
            min_symplectic_eigenvalue: min,
        });
    }
    let pt = v.partial_transpose(&[mode])?;
    let min = pt.min_symplectic_eigenvalue()?;
    Ok((min < VACUUM_VARIANCE - tol, min))
}

/// Classify a physical three-mode state by its npt pattern.
pub fn classify_tripartite(v: &CovarianceMatrix, tol: f64) -> Result<TripartiteClass, Error> {
    if v.n_modes() != 3 {
        return Err(Error::NotThreeModes {
            n_modes: v.n_modes(),
        });
    }
    let mut npt_flags = [false; 3];
    let mut min_eigs = [0.0; 3];
    for j in 1..=3 {
        let (npt, eig) = npt_single_mode(v, j, tol)?;
        npt_flags[j - 1] = npt;
        min_eigs[j - 1] = eig;
    }
    let ppt_modes: Vec<usize> = (1..=3).filter(|&j| !npt_flags[j - 1]).collect();
    let label = match ppt_modes.as_slice() {
        [] => TripartiteClassLabel::FullyInseparable,
        [k] => TripartiteClassLabel::OneModeBiseparable { separable_mode: *k },
        [k, m] => TripartiteClassLabel::TwoModeBiseparable {
            separable_modes: (*k, *m),
        },
        _ => TripartiteClassLabel::PptAllCuts,
    };
    Ok(TripartiteClass {
        label,
        npt_flags,
        min_pt_symplectic_eigenvalues: min_eigs,
        tolerance: tol,
    })
}
