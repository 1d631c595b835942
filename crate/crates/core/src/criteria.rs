//! Variance-based separability criteria for multimode states.
//!
//! A linear pair û = Σ h_j x_j, v̂ = Σ g_j p_j obeys, for every state that is
//! separable across a partition of the modes into blocks,
//!
//! ```text
//! Var(û) + Var(v̂) ≥ (1/2) Σ_blocks | Σ_{j ∈ block} h_j g_j |.
//! ```
//!
//! Measuring a total variance below a partition's bound therefore excludes
//! every decomposition separable across that partition. A state is certified
//! genuinely multipartite entangled once every bipartition is excluded;
//! finer partitions only raise the bound (triangle inequality), so
//! bipartitions are the only ones that need checking. The verdict refers to
//! decompositions with one fixed partition across the mixture — the
//! definition the bound is derived for.
//!
//! Bounds and thresholds here are exact arithmetic on coefficients; all
//! statistical slack lives in [`homodyne`](crate::homodyne).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::json;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::gaussian::{p_index, x_index, CovarianceMatrix};
use crate::partition::{bipartition_count, bipartition_masks, ModePartition};
use crate::Error;

/// Certification enumerates all 2^{N−1} − 1 bipartitions; above this mode
/// count it refuses instead of silently taking forever.
pub const MAX_CERTIFY_MODES: usize = 20;

/// Coefficients of a quadrature pair û = Σ h_j x_j, v̂ = Σ g_j p_j.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadCombination {
    h: Vec<f64>,
    g: Vec<f64>,
}

impl QuadCombination {
    /// Coefficient vectors must have equal nonzero length, finite entries,
    /// and at least one nonzero coefficient between them.
    pub fn new(h: Vec<f64>, g: Vec<f64>) -> Result<Self, Error> {
        if h.len() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: h.len(),
                found: g.len(),
            });
        }
        if h.is_empty() {
            return Err(Error::InvalidCombination(
                "empty coefficient vectors".into(),
            ));
        }
        if h.iter().chain(&g).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCombination(
                "coefficients must be finite".into(),
            ));
        }
        if h.iter().chain(&g).all(|&v| v == 0.0) {
            return Err(Error::InvalidCombination(
                "all coefficients are zero".into(),
            ));
        }
        Ok(QuadCombination { h, g })
    }

    pub fn n_modes(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// Per-mode products h_j·g_j; block sums of these set every bound.
    fn products(&self) -> Vec<f64> {
        self.h.iter().zip(&self.g).map(|(a, b)| a * b).collect()
    }
}

/// Var(û) + Var(v̂) on the state V: h̃ᵀVh̃ + g̃ᵀVg̃ with h placed in the
/// x slots and g in the p slots.
pub fn total_variance(v: &CovarianceMatrix, c: &QuadCombination) -> Result<f64, Error> {
    if v.n_modes() != c.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: v.n_modes(),
            found: c.n_modes(),
        });
    }
    let dim = v.dim();
    let mut hx = vec![0.0; dim];
    let mut gp = vec![0.0; dim];
    for m in 1..=c.n_modes() {
        hx[x_index(m)] = c.h[m - 1];
        gp[p_index(m)] = c.g[m - 1];
    }
    Ok(v.matrix().quadratic_form(&hx) + v.matrix().quadratic_form(&gp))
}

/// Separability bound of the combination against a partition:
/// (1/2) Σ_blocks |Σ_{j ∈ block} h_j g_j|.
///
/// # Panics
///
/// Panics if the partition does not cover the combination's modes.
pub fn partition_bound(c: &QuadCombination, p: &ModePartition) -> f64 {
    assert_eq!(
        p.n_modes(),
        c.n_modes(),
        "partition must cover the combination's mode set"
    );
    let products = c.products();
    0.5 * p
        .blocks()
        .iter()
        .map(|block| block.iter().map(|&m| products[m - 1]).sum::<f64>().abs())
        .sum::<f64>()
}

/// Same bound for a bipartition encoded as a bitmask (bit m−1 ⇔ mode m in
/// the first block). `total` is the sum of all products.
#[inline]
fn bound_for_mask(products: &[f64], total: f64, mask: u64) -> f64 {
    let mut first = 0.0;
    for (j, &p) in products.iter().enumerate() {
        if mask & (1 << j) != 0 {
            first += p;
        }
    }
    0.5 * (first.abs() + (total - first).abs())
}

/// Minimum of [`partition_bound`] over all bipartitions. A total variance
/// below this value excludes every decomposition separable across a fixed
/// bipartition.
pub fn genuine_threshold(c: &QuadCombination) -> Result<f64, Error> {
    let n = c.n_modes();
    if n < 2 {
        return Err(Error::InvalidCombination(
            "a single-mode combination has no bipartitions".into(),
        ));
    }
    if n > MAX_CERTIFY_MODES {
        return Err(Error::TooManyModes {
            n_modes: n,
            max: MAX_CERTIFY_MODES,
        });
    }
    let products = c.products();
    let total: f64 = products.iter().sum();
    Ok(bipartition_masks(n)
        .map(|mask| bound_for_mask(&products, total, mask))
        .fold(f64::INFINITY, f64::min))
}

/// Bound for the fully separable (all-singletons) partition,
/// Σ_j |h_j g_j| / 2 — the largest bound any partition can have.
pub fn fully_separable_bound(c: &QuadCombination) -> f64 {
    0.5 * c.products().iter().map(|p| p.abs()).sum::<f64>()
}

/// Σ_j h_j g_j. The commutator is [û, v̂] = (i/2) times this value, so a
/// zero coefficient permits simultaneous eigenstates and unbounded
/// violations.
pub fn commutator_coefficient(c: &QuadCombination) -> f64 {
    c.products().iter().sum()
}

/// The N−1 canonical conditions read out by a GHZ analyzer: condition k
/// pairs modes (k, k+1) with û = x_k − x_{k+1} and
/// v̂ = p_k + p_{k+1} + Σ_{j∉{k,k+1}} gains_j p_j.
///
/// Every bipartition that splits the pair (k, k+1) bounds condition k by
/// exactly 1, independent of the gains.
pub fn ghz_condition_set(n_modes: usize, gains: &[f64]) -> Result<Vec<QuadCombination>, Error> {
    if n_modes < 3 {
        return Err(Error::InvalidCombination(format!(
            "the canonical condition set needs at least 3 modes, got {n_modes}"
        )));
    }
    if gains.len() != n_modes {
        return Err(Error::DimensionMismatch {
            expected: n_modes,
            found: gains.len(),
        });
    }
    (1..n_modes)
        .map(|k| {
            let mut h = vec![0.0; n_modes];
            let mut g = gains.to_vec();
            h[k - 1] = 1.0;
            h[k] = -1.0;
            g[k - 1] = 1.0;
            g[k] = 1.0;
            QuadCombination::new(h, g)
        })
        .collect()
}

/// The gain minimizing the canonical-condition variance on the GHZ family:
/// (e^{+2r2} − e^{−2r1}) / (e^{+2r2} + (N−2)/2 · e^{−2r1}).
pub fn optimal_gain(n_modes: usize, r1: f64, r2: f64) -> f64 {
    debug_assert!(n_modes >= 3);
    let e2p = (2.0 * r2).exp();
    let e1m = (-2.0 * r1).exp();
    (e2p - e1m) / (e2p + 0.5 * (n_modes - 2) as f64 * e1m)
}

/// The variance-minimizing uniform gain for the condition pairing modes
/// (k, k+1), read off the state itself: the normal equation
/// g* = −Cov(p_k + p_{k+1}, S) / Var(S) with S = Σ_{j∉{k,k+1}} p_j.
///
/// On GHZ-family states this coincides with [`optimal_gain`].
pub fn optimal_gain_for_state(v: &CovarianceMatrix, k: usize) -> Result<f64, Error> {
    let n = v.n_modes();
    if n < 3 {
        return Err(Error::InvalidCombination(
            "gain optimization needs at least 3 modes".into(),
        ));
    }
    if k == 0 || k + 1 > n {
        return Err(Error::ModeOutOfRange {
            mode: k + 1,
            n_modes: n,
        });
    }
    let others: Vec<usize> = (1..=n).filter(|&m| m != k && m != k + 1).collect();
    let mut cov_pair_rest = 0.0;
    let mut var_rest = 0.0;
    for &a in &others {
        cov_pair_rest += v.entry(p_index(k), p_index(a)) + v.entry(p_index(k + 1), p_index(a));
        for &b in &others {
            var_rest += v.entry(p_index(a), p_index(b));
        }
    }
    Ok(-cov_pair_rest / var_rest)
}

/// Closed-form total variance of each canonical condition on the GHZ family:
///
/// ```text
/// e^{−2r2}/2 + [2+(N−2)g]²/(4N) · e^{−2r1} + (g−1)²(N−2)/(2N) · e^{+2r2}
/// ```
///
/// Agrees with [`total_variance`] on the analytic family matrix.
pub fn ghz_condition_variance(n_modes: usize, r1: f64, r2: f64, gain: f64) -> f64 {
    debug_assert!(n_modes >= 3);
    let n = n_modes as f64;
    let e1m = (-2.0 * r1).exp();
    let e2p = (2.0 * r2).exp();
    let e2m = (-2.0 * r2).exp();
    let lead = 2.0 + (n - 2.0) * gain;
    0.5 * e2m
        + lead * lead / (4.0 * n) * e1m
        + (gain - 1.0) * (gain - 1.0) * (n - 2.0) / (2.0 * n) * e2p
}

/// One condition evaluated against every bipartition of the state's modes.
#[derive(Clone, Debug)]
pub struct CriterionVerdict {
    pub total_variance: f64,
    pub bounds: BTreeMap<ModePartition, f64>,
    pub violated: BTreeSet<ModePartition>,
    pub commutator_coefficient: f64,
}

impl CriterionVerdict {
    /// True iff this condition alone excludes every bipartition.
    pub fn is_genuine(&self) -> bool {
        !self.bounds.is_empty() && self.violated.len() == self.bounds.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "total_variance": self.total_variance,
            "bounds": self.bounds.iter().map(|(p, b)| json!({
                "partition": p.to_string(),
                "bound": b,
                "excluded": self.violated.contains(p),
            })).collect::<Vec<_>>(),
            "genuine": self.is_genuine(),
        })
    }
}

/// Evaluate a single condition: total variance, the bound of every
/// bipartition, and which of them the condition excludes (strictly below
/// the bound; exact arithmetic, no slack).
pub fn evaluate_condition(
    v: &CovarianceMatrix,
    c: &QuadCombination,
) -> Result<CriterionVerdict, Error> {
    let n = v.n_modes();
    if n > MAX_CERTIFY_MODES {
        return Err(Error::TooManyModes {
            n_modes: n,
            max: MAX_CERTIFY_MODES,
        });
    }
    if n < 2 {
        return Err(Error::InvalidCombination(
            "certification needs at least 2 modes".into(),
        ));
    }
    let tv = total_variance(v, c)?;
    let products = c.products();
    let total: f64 = products.iter().sum();
    let mut bounds = BTreeMap::new();
    let mut violated = BTreeSet::new();
    for mask in bipartition_masks(n) {
        let p = ModePartition::from_mask(n, mask);
        let bound = bound_for_mask(&products, total, mask);
        if tv < bound {
            violated.insert(p.clone());
        }
        bounds.insert(p, bound);
    }
    Ok(CriterionVerdict {
        total_variance: tv,
        bounds,
        violated,
        commutator_coefficient: commutator_coefficient(c),
    })
}

/// Joint certification threshold of a condition set: the minimum over
/// bipartitions of the best (largest) bound any condition holds against it.
/// For a single condition this is [`genuine_threshold`]; for the canonical
/// GHZ set it is exactly 1.
pub fn set_genuine_threshold(conditions: &[QuadCombination]) -> Result<f64, Error> {
    if conditions.is_empty() {
        return Err(Error::EmptyConditions);
    }
    let n = conditions[0].n_modes();
    for c in conditions {
        if c.n_modes() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.n_modes(),
            });
        }
    }
    if n < 2 {
        return Err(Error::InvalidCombination(
            "certification needs at least 2 modes".into(),
        ));
    }
    if n > MAX_CERTIFY_MODES {
        return Err(Error::TooManyModes {
            n_modes: n,
            max: MAX_CERTIFY_MODES,
        });
    }
    let products: Vec<Vec<f64>> = conditions.iter().map(|c| c.products()).collect();
    let totals: Vec<f64> = products.iter().map(|p| p.iter().sum()).collect();
    Ok(bipartition_masks(n)
        .map(|mask| {
            products
                .iter()
                .zip(&totals)
                .map(|(p, &t)| bound_for_mask(p, t, mask))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min))
}

/// Outcome of exact certification against a condition set.
#[derive(Clone, Debug)]
pub struct CertificationReport {
    pub n_modes: usize,
    /// Total variance of each input condition, in order.
    pub total_variances: Vec<f64>,
    pub excluded: Vec<ModePartition>,
    pub surviving: Vec<ModePartition>,
    pub genuine: bool,
}

impl CertificationReport {
    pub fn to_json(&self, conditions: &[QuadCombination]) -> serde_json::Value {
        json!({
            "n_modes": self.n_modes,
            "conditions": conditions.iter().zip(&self.total_variances).map(|(c, tv)| json!({
                "h": c.h(),
                "g": c.g(),
                "total_variance": tv,
            })).collect::<Vec<_>>(),
            "excluded": self.excluded.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "surviving": self.surviving.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "genuine": self.genuine,
        })
    }
}

/// Certify genuine multipartite entanglement: a bipartition is excluded iff
/// some condition's total variance lies strictly below that bipartition's
/// bound; the verdict is positive iff every bipartition is excluded.
///
/// Refuses more than [`MAX_CERTIFY_MODES`] modes. Bipartitions are checked
/// independently (in parallel with the `parallel` feature) and reported in
/// canonical order.
pub fn certify_genuine(
    v: &CovarianceMatrix,
    conditions: &[QuadCombination],
) -> Result<CertificationReport, Error> {
    if conditions.is_empty() {
        return Err(Error::EmptyConditions);
    }
    let n = v.n_modes();
    if n > MAX_CERTIFY_MODES {
        return Err(Error::TooManyModes {
            n_modes: n,
            max: MAX_CERTIFY_MODES,
        });
    }
    if n < 2 {
        return Err(Error::InvalidCombination(
            "certification needs at least 2 modes".into(),
        ));
    }
    let total_variances: Vec<f64> = conditions
        .iter()
        .map(|c| total_variance(v, c))
        .collect::<Result<_, _>>()?;
    let products: Vec<Vec<f64>> = conditions.iter().map(|c| c.products()).collect();
    let totals: Vec<f64> = products.iter().map(|p| p.iter().sum()).collect();

    let is_excluded = |mask: u64| {
        total_variances
            .iter()
            .zip(&products)
            .zip(&totals)
            .any(|((&tv, p), &t)| tv < bound_for_mask(p, t, mask))
    };

    let masks: Vec<u64> = bipartition_masks(n).collect();
    #[cfg(feature = "parallel")]
    let flags: Vec<bool> = masks.par_iter().map(|&m| is_excluded(m)).collect();
    #[cfg(not(feature = "parallel"))]
    let flags: Vec<bool> = masks.iter().map(|&m| is_excluded(m)).collect();

    let mut excluded = Vec::new();
    let mut surviving = Vec::new();
    for (&mask, &flag) in masks.iter().zip(&flags) {
        let p = ModePartition::from_mask(n, mask);
        if flag {
            excluded.push(p);
        } else {
            surviving.push(p);
        }
    }
    debug_assert_eq!(excluded.len() + surviving.len(), bipartition_count(n));
    let genuine = surviving.is_empty();
    Ok(CertificationReport {
        n_modes: n,
        total_variances,
        excluded,
        surviving,
        genuine,
    })
}
