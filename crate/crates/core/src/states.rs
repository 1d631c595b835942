//! Constructors for the state families the witnesses are evaluated on:
//! squeezed vacua, two-mode squeezed (EPR) states, and the N-mode GHZ-type
//! family produced by feeding one p-squeezed and N−1 x-squeezed vacua into a
//! cascade of N−1 phase-free beam splitters.
//!
//! The GHZ family comes in two constructions that must agree entrywise: the
//! closed-form correlation matrix (four parameters a, b, c, d) and the
//! explicit beam-splitter network. The network test pins the splitter phase
//! convention.

use crate::gaussian::{p_index, x_index, CovarianceMatrix, QuadratureAxis, SymplecticTransform};
use crate::linalg::Mat;
use crate::Error;

/// Parameters of the GHZ-type family: mode 1 is squeezed in p by `r1`,
/// modes 2..N are squeezed in x by a common `r2`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GhzFamilyParams {
    n_modes: usize,
    r1: f64,
    r2: f64,
}

impl GhzFamilyParams {
    pub fn new(n_modes: usize, r1: f64, r2: f64) -> Result<Self, Error> {
        if n_modes < 2 {
            return Err(Error::InvalidParams(format!(
                "GHZ family needs at least 2 modes, got {n_modes}"
            )));
        }
        if !r1.is_finite() || !r2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "squeezing must be finite, got r1={r1}, r2={r2}"
            )));
        }
        Ok(GhzFamilyParams { n_modes, r1, r2 })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }
}

/// The four numbers determining a GHZ-family correlation matrix, before the
/// global 1/4: x diagonal `a`, p diagonal `b`, x off-diagonal `c`, p
/// off-diagonal `d`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GhzCorrelationEntries {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Single-mode squeezed vacuum. The `axis` quadrature ends up with variance
/// e^{−2r}/4, its conjugate with e^{+2r}/4.
pub fn squeezed_vacuum(r: f64, axis: QuadratureAxis) -> CovarianceMatrix {
    let (vx, vp) = match axis {
        QuadratureAxis::X => ((-2.0 * r).exp() / 4.0, (2.0 * r).exp() / 4.0),
        QuadratureAxis::P => ((2.0 * r).exp() / 4.0, (-2.0 * r).exp() / 4.0),
    };
    CovarianceMatrix::from_entries(1, &[vx, 0.0, 0.0, vp]).expect("2x2 diagonal is always valid")
}

/// Two-mode squeezed (EPR) state: diagonal blocks cosh 2r · I/4, off-diagonal
/// block diag(sinh 2r, −sinh 2r)/4. The N = 2 member of the GHZ family with
/// r1 = r2 = r.
pub fn two_mode_squeezed(r: f64) -> CovarianceMatrix {
    let params = GhzFamilyParams::new(2, r, r).expect("two modes, finite r");
    ghz_family_analytic(&params)
}

/// The a, b, c, d entries of the family correlation matrix:
///
/// ```text
/// a = e^{+2r1}/N + (N−1) e^{−2r2}/N      (x diagonal)
/// b = e^{−2r1}/N + (N−1) e^{+2r2}/N      (p diagonal)
/// c = (e^{+2r1} − e^{−2r2})/N            (x off-diagonal)
/// d = (e^{−2r1} − e^{+2r2})/N            (p off-diagonal)
/// ```
pub fn ghz_correlation_entries(params: &GhzFamilyParams) -> GhzCorrelationEntries {
    let n = params.n_modes() as f64;
    let e1p = (2.0 * params.r1()).exp();
    let e1m = (-2.0 * params.r1()).exp();
    let e2p = (2.0 * params.r2()).exp();
    let e2m = (-2.0 * params.r2()).exp();
    GhzCorrelationEntries {
        a: (e1p + (n - 1.0) * e2m) / n,
        b: (e1m + (n - 1.0) * e2p) / n,
        c: (e1p - e2m) / n,
        d: (e1m - e2p) / n,
    }
}

/// GHZ-family state from the closed-form correlation matrix. Totally
/// symmetric under mode interchange; no x–p cross correlations.
pub fn ghz_family_analytic(params: &GhzFamilyParams) -> CovarianceMatrix {
    let entries = ghz_correlation_entries(params);
    let n = params.n_modes();
    let mut mat = Mat::zeros(2 * n);
    for i in 1..=n {
        mat[(x_index(i), x_index(i))] = entries.a / 4.0;
        mat[(p_index(i), p_index(i))] = entries.b / 4.0;
        for j in 1..=n {
            if i != j {
                mat[(x_index(i), x_index(j))] = entries.c / 4.0;
                mat[(p_index(i), p_index(j))] = entries.d / 4.0;
            }
        }
    }
    CovarianceMatrix::from_mat(n, mat)
}

/// GHZ-family state from the explicit optical network: squeezed vacua
/// through the N-splitter, i.e. beam splitters B_{k,k+1}(θ_k) with
/// cos θ_k = 1/√(N−k+1) for k = 1..N−1. Agrees with
/// [`ghz_family_analytic`] entrywise to better than 1e−10.
pub fn ghz_family_network(params: &GhzFamilyParams) -> CovarianceMatrix {
    let n = params.n_modes();
    let mut v = squeezed_vacuum(params.r1(), QuadratureAxis::P);
    for _ in 1..n {
        v = v.direct_sum(&squeezed_vacuum(params.r2(), QuadratureAxis::X));
    }
    for k in 1..n {
        let theta = (1.0 / ((n - k + 1) as f64).sqrt()).acos();
        let bs = SymplecticTransform::beam_splitter(n, k, k + 1, theta)
            .expect("modes k, k+1 are in range");
        v = v
            .apply_symplectic(&bs)
            .expect("beam splitters are symplectic by construction");
    }
    v
}

/// The squeezing r1 that makes the family state unbiased (all diagonal
/// entries equal, minimum energy at a given degree of entanglement):
/// sinh 2r1 = (N−1) sinh 2r2, i.e.
/// r1 = ½ ln[√(1 + (N−1)² sinh² 2r2) + (N−1) sinh 2r2], which is asinh in
/// disguise and has no singularity at r2 = 0.
pub fn unbiased_r1(n_modes: usize, r2: f64) -> f64 {
    debug_assert!(n_modes >= 2, "family needs at least two modes");
    0.5 * (((n_modes - 1) as f64) * (2.0 * r2).sinh()).asinh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::PHYSICALITY_TOL;

    #[test]
    fn squeezed_vacuum_entries() {
        assert_eq!(
            squeezed_vacuum(0.0, QuadratureAxis::X),
            CovarianceMatrix::vacuum(1)
        );
        let v = squeezed_vacuum(0.5, QuadratureAxis::X);
        assert!((v.entry(0, 0) - (-1.0f64).exp() / 4.0).abs() < 1e-16);
        assert!((v.entry(1, 1) - 1.0f64.exp() / 4.0).abs() < 1e-16);
        let w = squeezed_vacuum(0.5, QuadratureAxis::P);
        assert!((w.entry(0, 0) - 1.0f64.exp() / 4.0).abs() < 1e-16);
    }

    #[test]
    fn squeezed_vacuum_is_pure() {
        for r in [0.0, 0.2, 1.0, 3.0] {
            for axis in [QuadratureAxis::X, QuadratureAxis::P] {
                let nu = squeezed_vacuum(r, axis).symplectic_eigenvalues().unwrap();
                assert!((nu[0] - 0.25).abs() < 1e-8, "r={r}: ν={}", nu[0]);
            }
        }
    }

    #[test]
    fn correlation_entries_satisfy_purity_consistency() {
        // a·b = [1 + (N−1)² + 2(N−1)cosh(2r1+2r2)]/N² ≥ 1 for pure members
        for n in [2usize, 3, 5, 30] {
            for (r1, r2) in [(0.0, 0.0), (0.5, 0.5), (1.3, 0.2), (0.0, 2.0)] {
                let e = ghz_correlation_entries(&GhzFamilyParams::new(n, r1, r2).unwrap());
                assert!(e.a > 0.0 && e.b > 0.0, "N={n}");
                assert!(e.a * e.b >= 1.0 - 1e-12, "N={n} r1={r1} r2={r2}: a*b = {}", e.a * e.b);
            }
        }
    }

    #[test]
    fn two_mode_squeezed_standard_form() {
        assert_eq!(two_mode_squeezed(0.0), CovarianceMatrix::vacuum(2));
        let r = 1.0;
        let v = two_mode_squeezed(r);
        let ch = (2.0 * r).cosh() / 4.0;
        let sh = (2.0 * r).sinh() / 4.0;
        assert!((v.entry(0, 0) - ch).abs() < 1e-14 * ch);
        assert!((v.entry(1, 1) - ch).abs() < 1e-14 * ch);
        assert!((v.entry(0, 2) - sh).abs() < 1e-14 * sh);
        assert!((v.entry(1, 3) + sh).abs() < 1e-14 * sh);
        assert_eq!(v.entry(0, 1), 0.0);
        assert_eq!(v.entry(0, 3), 0.0);
    }

    #[test]
    fn two_mode_squeezed_is_npt_across_the_cut() {
        for r in [0.2, 0.7, 1.5] {
            let pt = two_mode_squeezed(r).partial_transpose(&[1]).unwrap();
            let min = pt.min_symplectic_eigenvalue().unwrap();
            assert!((min - (-2.0 * r).exp() / 4.0).abs() < 1e-10);
            assert!(min < 0.25 - PHYSICALITY_TOL);
        }
    }

    #[test]
    fn family_reduces_to_two_mode_squeezed_at_n2() {
        for r in [0.0, 0.4, 1.2] {
            let params = GhzFamilyParams::new(2, r, r).unwrap();
            assert_eq!(ghz_family_analytic(&params), two_mode_squeezed(r));
        }
    }

    #[test]
    fn family_at_zero_squeezing_is_vacuum() {
        for n in [2, 3, 5] {
            let params = GhzFamilyParams::new(n, 0.0, 0.0).unwrap();
            assert_eq!(ghz_family_analytic(&params), CovarianceMatrix::vacuum(n));
            let net = ghz_family_network(&params);
            assert!(net.matrix().max_diff(CovarianceMatrix::vacuum(n).matrix()) < 1e-15);
        }
    }

    #[test]
    fn family_states_are_physical_and_pure() {
        for n in [2, 3, 5, 8] {
            for (r1, r2) in [(0.5, 0.5), (1.0, 0.3), (0.0, 1.0)] {
                let params = GhzFamilyParams::new(n, r1, r2).unwrap();
                let v = ghz_family_analytic(&params);
                assert!(v.is_physical(PHYSICALITY_TOL), "N={n} r1={r1} r2={r2}");
                for nu in v.symplectic_eigenvalues().unwrap() {
                    assert!((nu - 0.25).abs() < 1e-8, "N={n}: ν={nu}");
                }
            }
        }
    }

    #[test]
    fn network_matches_analytic() {
        for n in [2, 3, 4, 5] {
            for (r1, r2) in [(0.5, 0.5), (1.0, 0.3), (0.0, 0.8)] {
                let params = GhzFamilyParams::new(n, r1, r2).unwrap();
                let diff = ghz_family_network(&params)
                    .matrix()
                    .max_diff(ghz_family_analytic(&params).matrix());
                assert!(diff < 1e-10, "N={n} r1={r1} r2={r2}: diff={diff:e}");
            }
        }
    }

    #[test]
    fn family_is_totally_symmetric() {
        let params = GhzFamilyParams::new(4, 0.9, 0.35).unwrap();
        let v = ghz_family_analytic(&params);
        for (a, b) in [(1, 2), (1, 4), (2, 3)] {
            let swap = SymplecticTransform::mode_swap(4, a, b).unwrap();
            let swapped = v.apply_symplectic(&swap).unwrap();
            assert_eq!(
                swapped, v,
                "swap {a}<->{b} must leave the state invariant exactly"
            );
        }
    }

    #[test]
    fn family_has_no_xp_cross_terms() {
        let params = GhzFamilyParams::new(3, 0.7, 0.2).unwrap();
        for v in [ghz_family_analytic(&params), ghz_family_network(&params)] {
            for i in 1..=3 {
                for j in 1..=3 {
                    assert_eq!(
                        v.entry(x_index(i), p_index(j)),
                        0.0,
                        "x{i}-p{j} must vanish"
                    );
                }
            }
        }
    }

    #[test]
    fn unbiased_relation() {
        assert_eq!(unbiased_r1(5, 0.0), 0.0);
        for r2 in [0.1, 0.9, 2.5] {
            assert!(
                (unbiased_r1(2, r2) - r2).abs() < 1e-12,
                "N=2 must give r1=r2"
            );
        }
        // large squeezing: e^{2r1} ≈ (N−1) e^{2r2}
        let (n, r2) = (10, 3.0);
        let r1 = unbiased_r1(n, r2);
        let ratio = (2.0 * r1).exp() / (2.0 * r2).exp();
        assert!((ratio - 9.0).abs() / 9.0 < 0.02, "ratio {ratio}");
    }

    #[test]
    fn unbiased_states_have_equal_diagonals() {
        for n in [3, 5, 8] {
            let r2 = 0.4;
            let params = GhzFamilyParams::new(n, unbiased_r1(n, r2), r2).unwrap();
            let entries = ghz_correlation_entries(&params);
            assert!(
                (entries.a - entries.b).abs() < 1e-10,
                "N={n}: a={} b={}",
                entries.a,
                entries.b
            );
            let v = ghz_family_network(&params);
            let first = v.entry(0, 0);
            for i in 0..v.dim() {
                assert!((v.entry(i, i) - first).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn params_are_validated() {
        assert!(GhzFamilyParams::new(1, 0.0, 0.0).is_err());
        assert!(GhzFamilyParams::new(3, f64::NAN, 0.0).is_err());
        assert!(GhzFamilyParams::new(3, 0.0, f64::INFINITY).is_err());
    }
}
