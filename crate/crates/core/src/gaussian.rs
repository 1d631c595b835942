//! Covariance-matrix representation of zero-mean multimode Gaussian states.
//!
//! A state of N optical modes is described by the 2N×2N real symmetric matrix
//! of symmetrized second moments of the quadrature vector
//! (x₁, p₁, x₂, p₂, …, x_N, p_N). Units are fixed to ħ = 1/2, so the vacuum
//! variance of every quadrature is 1/4 and the commutation relations read
//! [x_l, p_k] = i δ_lk / 2. Physicality is the uncertainty statement
//! V − (i/4)Λ ⪰ 0, equivalently: every symplectic eigenvalue of V is ≥ 1/4.
//!
//! Mode indices are 1-based throughout the public API, matching the file
//! formats and partition notation ("1,2|3") used by the rest of the crate.

use serde::{Deserialize, Serialize};

use crate::linalg::{symmetric_eigensystem, Mat};
use crate::Error;

/// Quadrature variance of the vacuum in ħ = 1/2 units.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Default absolute tolerance on the minimum symplectic eigenvalue when
/// testing physicality. Well above Jacobi round-off, far below any physical
/// squeezing scale.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Per-entry tolerance on S Λ Sᵀ = Λ when constructing a transform from a
/// raw matrix.
pub const SYMPLECTIC_CONSTRUCTION_TOL: f64 = 1e-12;

/// Looser per-entry tolerance re-checked every time a transform is applied.
pub const SYMPLECTIC_APPLY_TOL: f64 = 1e-9;

/// Exact value token of the `ordering` field in the JSON serialization.
pub const ORDERING_TOKEN: &str = "x1p1...";

/// Exact value of the `hbar_convention` field in the JSON serialization.
pub const HBAR_CONVENTION: f64 = 0.5;

/// Row/column of the x quadrature of `mode` (1-based) in interleaved
/// ordering.
#[inline]
pub fn x_index(mode: usize) -> usize {
    2 * (mode - 1)
}

/// Row/column of the p quadrature of `mode` (1-based).
#[inline]
pub fn p_index(mode: usize) -> usize {
    2 * mode - 1
}

/// Which quadrature a squeezer acts on: the squeezed one ends up below
/// vacuum variance.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum QuadratureAxis {
    X,
    P,
}

/// The symplectic form Λ: block diagonal with J = [[0, 1], [−1, 0]] per
/// mode. Encodes the commutation relations [ξ_k, ξ_l] = (i/2) Λ_kl.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    n_modes: usize,
    mat: Mat,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        assert!(n_modes >= 1, "need at least one mode");
        let mut mat = Mat::zeros(2 * n_modes);
        for m in 1..=n_modes {
            mat[(x_index(m), p_index(m))] = 1.0;
            mat[(p_index(m), x_index(m))] = -1.0;
        }
        SymplecticForm { n_modes, mat }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }
}

/// A linear phase-space transformation S with S Λ Sᵀ = Λ; covariance
/// matrices transform as V → S V Sᵀ. Built from squeezers, beam splitters,
/// and mode swaps, or checked at construction when given raw entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticTransform {
    n_modes: usize,
    mat: Mat,
}

impl SymplecticTransform {
    pub fn identity(n_modes: usize) -> Self {
        SymplecticTransform {
            n_modes,
            mat: Mat::identity(2 * n_modes),
        }
    }

    /// Single-mode squeezer on `mode`. For `QuadratureAxis::X` the x
    /// variance scales by e^{−2r} and p by e^{+2r}; `P` swaps the roles.
    pub fn squeezer(
        n_modes: usize,
        mode: usize,
        r: f64,
        axis: QuadratureAxis,
    ) -> Result<Self, Error> {
        check_mode(mode, n_modes)?;
        let (fx, fp) = match axis {
            QuadratureAxis::X => ((-r).exp(), r.exp()),
            QuadratureAxis::P => (r.exp(), (-r).exp()),
        };
        let mut mat = Mat::identity(2 * n_modes);
        mat[(x_index(mode), x_index(mode))] = fx;
        mat[(p_index(mode), p_index(mode))] = fp;
        Ok(SymplecticTransform { n_modes, mat })
    }

    /// Phase-free beam splitter between `mode_a` and `mode_b`, acting
    /// identically on the x and p planes:
    ///
    /// ```text
    /// x_a → cosθ·x_a + sinθ·x_b
    /// x_b → sinθ·x_a − cosθ·x_b
    /// ```
    ///
    /// θ = π/4 is the balanced (50:50) splitter.
    pub fn beam_splitter(
        n_modes: usize,
        mode_a: usize,
        mode_b: usize,
        theta: f64,
    ) -> Result<Self, Error> {
        check_mode(mode_a, n_modes)?;
        check_mode(mode_b, n_modes)?;
        assert_ne!(mode_a, mode_b, "beam splitter needs two distinct modes");
        let (c, s) = (theta.cos(), theta.sin());
        let mut mat = Mat::identity(2 * n_modes);
        for (ia, ib) in [
            (x_index(mode_a), x_index(mode_b)),
            (p_index(mode_a), p_index(mode_b)),
        ] {
            mat[(ia, ia)] = c;
            mat[(ia, ib)] = s;
            mat[(ib, ia)] = s;
            mat[(ib, ib)] = -c;
        }
        Ok(SymplecticTransform { n_modes, mat })
    }

    /// Permutation exchanging modes `a` and `b` (both quadratures).
    pub fn mode_swap(n_modes: usize, a: usize, b: usize) -> Result<Self, Error> {
        check_mode(a, n_modes)?;
        check_mode(b, n_modes)?;
        let mut mat = Mat::identity(2 * n_modes);
        for (ia, ib) in [(x_index(a), x_index(b)), (p_index(a), p_index(b))] {
            mat[(ia, ia)] = 0.0;
            mat[(ib, ib)] = 0.0;
            mat[(ia, ib)] = 1.0;
            mat[(ib, ia)] = 1.0;
        }
        Ok(SymplecticTransform { n_modes, mat })
    }

    /// Build from raw row-major entries, verifying S Λ Sᵀ = Λ to within
    /// [`SYMPLECTIC_CONSTRUCTION_TOL`] per entry.
    pub fn from_matrix(n_modes: usize, entries: &[f64]) -> Result<Self, Error> {
        let dim = 2 * n_modes;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mat = Mat::from_row_slice(dim, entries);
        let dev = symplectic_deviation(&mat, n_modes);
        if dev > SYMPLECTIC_CONSTRUCTION_TOL {
            return Err(Error::NonSymplectic { max_deviation: dev });
        }
        Ok(SymplecticTransform { n_modes, mat })
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Result<Self, Error> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                found: other.n_modes,
            });
        }
        Ok(SymplecticTransform {
            n_modes: self.n_modes,
            mat: self.mat.mul(&other.mat),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }
}

fn check_mode(mode: usize, n_modes: usize) -> Result<(), Error> {
    if mode == 0 || mode > n_modes {
        return Err(Error::ModeOutOfRange { mode, n_modes });
    }
    Ok(())
}

/// Max-norm of S Λ Sᵀ − Λ.
fn symplectic_deviation(s: &Mat, n_modes: usize) -> f64 {
    let lambda = SymplecticForm::new(n_modes);
    s.mul(lambda.matrix())
        .mul(&s.transpose())
        .max_diff(lambda.matrix())
}

/// Second-moment correlation matrix of a zero-mean N-mode Gaussian state.
///
/// Entries are indexed in interleaved quadrature order
/// (x₁, p₁, …, x_N, p_N) and the matrix is symmetric exactly: every
/// constructor symmetrizes. The vacuum is diag(1/4, …, 1/4).
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    mat: Mat,
}

#[derive(Serialize, Deserialize)]
struct CovarianceFile {
    n_modes: usize,
    ordering: String,
    hbar_convention: f64,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    /// The N-mode vacuum, diag(1/4, …, 1/4).
    pub fn vacuum(n_modes: usize) -> Self {
        assert!(n_modes >= 1, "need at least one mode");
        let mut mat = Mat::zeros(2 * n_modes);
        for i in 0..2 * n_modes {
            mat[(i, i)] = VACUUM_VARIANCE;
        }
        CovarianceMatrix { n_modes, mat }
    }

    /// Build from row-major entries of length 4N²; the input is symmetrized.
    pub fn from_entries(n_modes: usize, entries: &[f64]) -> Result<Self, Error> {
        if n_modes == 0 {
            return Err(Error::InvalidFormat("n_modes must be positive".into()));
        }
        let dim = 2 * n_modes;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidFormat(format!("non-finite entry {bad}")));
        }
        let mut mat = Mat::from_row_slice(dim, entries);
        mat.symmetrize();
        Ok(CovarianceMatrix { n_modes, mat })
    }

    pub(crate) fn from_mat(n_modes: usize, mut mat: Mat) -> Self {
        debug_assert_eq!(mat.dim(), 2 * n_modes);
        mat.symmetrize();
        CovarianceMatrix { n_modes, mat }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Matrix dimension 2N.
    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    /// Raw entry, 0-based quadrature indices (see [`x_index`]/[`p_index`]).
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.mat[(row, col)]
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    /// Symplectic eigenvalues ν₁ ≤ … ≤ ν_N, where ±iν_k are the eigenvalues
    /// of ΛV.
    ///
    /// Computed entirely with the symmetric eigensolver: V = Q D Qᵀ gives
    /// V^{1/2}, and K = −V^{1/2} Λ V Λ V^{1/2} is symmetric positive
    /// semidefinite with each ν_k² appearing twice in its spectrum. Fails if
    /// V is not positive definite, identifying the offending ordinary
    /// eigenvalue.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>, Error> {
        let (values, vectors) = symmetric_eigensystem(&self.mat)?;
        if let Some((index, &eigenvalue)) = values.iter().enumerate().find(|(_, &v)| v <= 0.0) {
            return Err(Error::NotPositiveDefinite { index, eigenvalue });
        }
        let dim = self.dim();
        let sqrt_d = Mat::from_fn(dim, |i, j| if i == j { values[i].sqrt() } else { 0.0 });
        let sqrt_v = vectors.mul(&sqrt_d).mul(&vectors.transpose());
        let lambda = SymplecticForm::new(self.n_modes);
        let k = {
            let lvl = lambda.matrix().mul(&self.mat).mul(lambda.matrix());
            let mut k = sqrt_v.mul(&lvl).mul(&sqrt_v);
            for i in 0..dim * dim {
                // K = −V^{1/2} Λ V Λ V^{1/2}
                let (r, c) = (i / dim, i % dim);
                k[(r, c)] = -k[(r, c)];
            }
            k.symmetrize();
            k
        };
        let (k_values, _) = symmetric_eigensystem(&k)?;
        // Spectrum of K is {ν₁², ν₁², ν₂², ν₂², …}; average each adjacent
        // pair (equal up to round-off) after taking square roots.
        let roots: Vec<f64> = k_values.iter().map(|&v| v.max(0.0).sqrt()).collect();
        Ok(roots
            .chunks(2)
            .map(|pair| 0.5 * (pair[0] + pair[1]))
            .collect())
    }

    /// Smallest symplectic eigenvalue.
    pub fn min_symplectic_eigenvalue(&self) -> Result<f64, Error> {
        Ok(self.symplectic_eigenvalues()?[0])
    }

    /// True iff V is positive definite and its minimum symplectic eigenvalue
    /// is ≥ 1/4 − tol. Malformed positivity yields `false`, not an error.
    pub fn is_physical(&self, tol: f64) -> bool {
        match self.symplectic_eigenvalues() {
            Ok(nu) => nu[0] >= VACUUM_VARIANCE - tol,
            Err(_) => false,
        }
    }

    /// Partial transposition: sign change of the momentum variables of the
    /// listed modes, V → Γ V Γ. Applying it twice returns the input exactly.
    pub fn partial_transpose(&self, modes: &[usize]) -> Result<Self, Error> {
        let mut flip = vec![false; self.n_modes + 1];
        for &m in modes {
            check_mode(m, self.n_modes)?;
            flip[m] = true;
        }
        let mut gamma = vec![1.0; self.dim()];
        for m in 1..=self.n_modes {
            if flip[m] {
                gamma[p_index(m)] = -1.0;
            }
        }
        let dim = self.dim();
        let mat = Mat::from_fn(dim, |i, j| gamma[i] * gamma[j] * self.mat[(i, j)]);
        Ok(CovarianceMatrix {
            n_modes: self.n_modes,
            mat,
        })
    }

    /// V → S V Sᵀ, re-symmetrized. The transform's symplectic invariant is
    /// re-verified to within [`SYMPLECTIC_APPLY_TOL`].
    pub fn apply_symplectic(&self, s: &SymplecticTransform) -> Result<Self, Error> {
        if s.n_modes() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                found: s.n_modes(),
            });
        }
        let dev = symplectic_deviation(s.matrix(), self.n_modes);
        if dev > SYMPLECTIC_APPLY_TOL {
            return Err(Error::NonSymplectic { max_deviation: dev });
        }
        let mut mat = s.matrix().mul(&self.mat).mul(&s.matrix().transpose());
        mat.symmetrize();
        Ok(CovarianceMatrix {
            n_modes: self.n_modes,
            mat,
        })
    }

    /// Block-diagonal composition with another state; mode counts add.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.n_modes + other.n_modes;
        let da = self.dim();
        let mat = Mat::from_fn(2 * n, |i, j| {
            if i < da && j < da {
                self.mat[(i, j)]
            } else if i >= da && j >= da {
                other.mat[(i - da, j - da)]
            } else {
                0.0
            }
        });
        CovarianceMatrix { n_modes: n, mat }
    }

    /// Serialize to the interchange JSON document.
    pub fn to_json(&self) -> String {
        let file = CovarianceFile {
            n_modes: self.n_modes,
            ordering: ORDERING_TOKEN.to_string(),
            hbar_convention: HBAR_CONVENTION,
            entries: self.mat.as_slice().to_vec(),
        };
        serde_json::to_string_pretty(&file).expect("covariance serialization cannot fail")
    }

    /// Parse the interchange JSON document, rejecting files whose `ordering`
    /// or `hbar_convention` fields mismatch this crate's conventions.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let file: CovarianceFile = serde_json::from_str(text)?;
        if file.ordering != ORDERING_TOKEN {
            return Err(Error::InvalidFormat(format!(
                "unsupported quadrature ordering {:?}, expected {ORDERING_TOKEN:?}",
                file.ordering
            )));
        }
        if file.hbar_convention != HBAR_CONVENTION {
            return Err(Error::InvalidFormat(format!(
                "unsupported hbar convention {}, expected {HBAR_CONVENTION}",
                file.hbar_convention
            )));
        }
        CovarianceMatrix::from_entries(file.n_modes, &file.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{squeezed_vacuum, two_mode_squeezed};

    /// Brute-force oracle: symplectic eigenvalues as |imaginary parts| of the
    /// complex eigenvalues of ΛV, via nalgebra's general eigensolver.
    /// Independent of the Jacobi-based production path.
    pub(crate) fn brute_force_symplectic_eigenvalues(v: &CovarianceMatrix) -> Vec<f64> {
        let dim = v.dim();
        let lambda = SymplecticForm::new(v.n_modes());
        let lv = lambda.matrix().mul(v.matrix());
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, lv.as_slice());
        let eigs = m.complex_eigenvalues();
        let mut nu: Vec<f64> = eigs.iter().map(|z| z.im.abs()).collect();
        nu.sort_by(f64::total_cmp);
        // ±iν pairs: keep one of each
        nu.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
    }

    #[test]
    fn symplectic_form_squares_to_minus_identity() {
        for n in 1..=8 {
            let lambda = SymplecticForm::new(n);
            let sq = lambda.matrix().mul(lambda.matrix());
            let minus_id = Mat::from_fn(2 * n, |i, j| if i == j { -1.0 } else { 0.0 });
            assert_eq!(sq, minus_id, "Λ² must equal −I exactly for N={n}");
            let mut neg_t = lambda.matrix().transpose();
            for i in 0..2 * n {
                for j in 0..2 * n {
                    neg_t[(i, j)] = -neg_t[(i, j)];
                }
            }
            assert_eq!(&neg_t, lambda.matrix(), "Λᵀ must equal −Λ exactly");
        }
    }

    #[test]
    fn vacuum_symplectic_eigenvalues() {
        let nu = CovarianceMatrix::vacuum(1)
            .symplectic_eigenvalues()
            .unwrap();
        assert_eq!(nu.len(), 1);
        assert!((nu[0] - 0.25).abs() < 1e-14);
        let nu3 = CovarianceMatrix::vacuum(3)
            .symplectic_eigenvalues()
            .unwrap();
        for v in nu3 {
            assert!((v - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn below_vacuum_diagonal_is_unphysical() {
        let v = CovarianceMatrix::from_entries(1, &[0.1, 0.0, 0.0, 0.1]).unwrap();
        let nu = v.symplectic_eigenvalues().unwrap();
        assert!((nu[0] - 0.1).abs() < 1e-14);
        assert!(!v.is_physical(PHYSICALITY_TOL));
        let w = CovarianceMatrix::from_entries(1, &[0.125, 0.0, 0.0, 0.125]).unwrap();
        assert!(!w.is_physical(PHYSICALITY_TOL));
        assert!(CovarianceMatrix::vacuum(4).is_physical(PHYSICALITY_TOL));
    }

    #[test]
    fn two_mode_squeezed_is_pure_vs_oracle() {
        for r in [0.3, 1.0] {
            let v = two_mode_squeezed(r);
            let nu = v.symplectic_eigenvalues().unwrap();
            for x in &nu {
                assert!(
                    (x - 0.25).abs() < 1e-8,
                    "pure state must have ν = 1/4, got {x}"
                );
            }
            let oracle = brute_force_symplectic_eigenvalues(&v);
            for (a, b) in nu.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8, "Jacobi path {a} vs oracle {b}");
            }
        }
    }

    #[test]
    fn non_positive_definite_is_rejected() {
        let v = CovarianceMatrix::from_entries(1, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        match v.symplectic_eigenvalues() {
            Err(Error::NotPositiveDefinite {
                index: 0,
                eigenvalue,
            }) => {
                assert!((eigenvalue + 1.0).abs() < 1e-14);
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn partial_transpose_examples() {
        let v = two_mode_squeezed(0.7);
        assert_eq!(v.partial_transpose(&[]).unwrap(), v);

        let vac = CovarianceMatrix::vacuum(1);
        let pt = vac.partial_transpose(&[1]).unwrap();
        assert_eq!(pt, vac);
        assert!(pt.is_physical(PHYSICALITY_TOL));

        let r = 1.0;
        let pt = two_mode_squeezed(r).partial_transpose(&[2]).unwrap();
        let min = pt.min_symplectic_eigenvalue().unwrap();
        let expected = (-2.0 * r).exp() / 4.0;
        assert!(
            (min - expected).abs() < 1e-10,
            "min PT eigenvalue {min} vs {expected}"
        );
        let oracle = brute_force_symplectic_eigenvalues(&pt);
        assert!((oracle[0] - expected).abs() < 1e-10);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let v = two_mode_squeezed(0.9).direct_sum(&squeezed_vacuum(0.4, QuadratureAxis::X));
        for modes in [vec![1], vec![2], vec![1, 3], vec![2, 2]] {
            let twice = v
                .partial_transpose(&modes)
                .unwrap()
                .partial_transpose(&modes)
                .unwrap();
            assert_eq!(twice, v, "PT twice must return the input exactly");
        }
        assert!(matches!(
            v.partial_transpose(&[4]),
            Err(Error::ModeOutOfRange {
                mode: 4,
                n_modes: 3
            })
        ));
    }

    #[test]
    fn apply_symplectic_examples() {
        let v = two_mode_squeezed(0.5);
        let id = SymplecticTransform::identity(2);
        assert_eq!(v.apply_symplectic(&id).unwrap(), v);

        let r = 0.8;
        let s = SymplecticTransform::squeezer(1, 1, r, QuadratureAxis::X).unwrap();
        let out = CovarianceMatrix::vacuum(1).apply_symplectic(&s).unwrap();
        assert!((out.entry(0, 0) - (-2.0 * r).exp() / 4.0).abs() < 1e-15);
        assert!((out.entry(1, 1) - (2.0 * r).exp() / 4.0).abs() < 1e-15);

        // equal squeezing passes through a balanced splitter
        let pair = squeezed_vacuum(0.6, QuadratureAxis::P)
            .direct_sum(&squeezed_vacuum(0.6, QuadratureAxis::P));
        let bs = SymplecticTransform::beam_splitter(2, 1, 2, std::f64::consts::FRAC_PI_4).unwrap();
        let out = pair.apply_symplectic(&bs).unwrap();
        assert!(out.matrix().max_diff(pair.matrix()) < 1e-15);
    }

    #[test]
    fn apply_rejects_non_symplectic() {
        let mut entries = vec![0.0; 16];
        for i in 0..4 {
            entries[i * 4 + i] = 2.0;
        }
        assert!(matches!(
            SymplecticTransform::from_matrix(2, &entries),
            Err(Error::NonSymplectic { .. })
        ));
    }

    #[test]
    fn direct_sum_spectra_union() {
        let va = squeezed_vacuum(0.3, QuadratureAxis::X);
        let vb = two_mode_squeezed(0.8);
        let sum = va.direct_sum(&vb);
        assert_eq!(sum.n_modes(), 3);
        let mut expected = va.symplectic_eigenvalues().unwrap();
        expected.extend(vb.symplectic_eigenvalues().unwrap());
        expected.sort_by(f64::total_cmp);
        let got = sum.symplectic_eigenvalues().unwrap();
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }

        let two_vac = CovarianceMatrix::vacuum(1).direct_sum(&CovarianceMatrix::vacuum(1));
        assert_eq!(two_vac, CovarianceMatrix::vacuum(2));
    }

    #[test]
    fn symplectic_conjugation_preserves_spectrum() {
        let mut v = squeezed_vacuum(0.5, QuadratureAxis::P)
            .direct_sum(&squeezed_vacuum(0.2, QuadratureAxis::X))
            .direct_sum(&CovarianceMatrix::vacuum(1));
        let before = v.symplectic_eigenvalues().unwrap();
        let steps: [SymplecticTransform; 4] = [
            SymplecticTransform::beam_splitter(3, 1, 2, 0.4).unwrap(),
            SymplecticTransform::squeezer(3, 3, 0.7, QuadratureAxis::X).unwrap(),
            SymplecticTransform::beam_splitter(3, 2, 3, 1.1).unwrap(),
            SymplecticTransform::mode_swap(3, 1, 3).unwrap(),
        ];
        for s in &steps {
            v = v.apply_symplectic(s).unwrap();
        }
        let after = v.symplectic_eigenvalues().unwrap();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-8, "spectrum changed: {a} vs {b}");
        }
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let v = two_mode_squeezed(1.3);
        let text = v.to_json();
        let back = CovarianceMatrix::from_json(&text).unwrap();
        assert_eq!(back, v);

        let bad_ordering = text.replace("x1p1...", "p1x1...");
        assert!(matches!(
            CovarianceMatrix::from_json(&bad_ordering),
            Err(Error::InvalidFormat(_))
        ));
        let bad_hbar = text.replace("\"hbar_convention\": 0.5", "\"hbar_convention\": 1.0");
        assert!(matches!(
            CovarianceMatrix::from_json(&bad_hbar),
            Err(Error::InvalidFormat(_))
        ));
    }

    #[test]
    fn compose_matches_sequential_application() {
        let v = two_mode_squeezed(0.4);
        let a = SymplecticTransform::beam_splitter(2, 1, 2, 0.3).unwrap();
        let b = SymplecticTransform::squeezer(2, 1, 0.5, QuadratureAxis::P).unwrap();
        let combined = b.compose(&a).unwrap();
        let seq = v
            .apply_symplectic(&a)
            .unwrap()
            .apply_symplectic(&b)
            .unwrap();
        let joint = v.apply_symplectic(&combined).unwrap();
        assert!(seq.matrix().max_diff(joint.matrix()) < 1e-12);
    }
}
