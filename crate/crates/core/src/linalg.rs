//! Small dense linear-algebra kernel: a square row-major matrix type, a
//! Cholesky factorization, and a cyclic Jacobi eigensolver for symmetric
//! matrices.
//!
//! Everything in the crate runs on matrices of size 2N×2N for N optical
//! modes, so N stays small (tens at most) and a plain `Vec<f64>` store with
//! O(n³) algorithms is the right tool. No BLAS, no sparsity, no panics on
//! numerical failure — fallible operations return [`Error`](crate::Error).

use std::ops::{Index, IndexMut};

use crate::Error;

/// Off-diagonal convergence threshold for the Jacobi sweep, relative to the
/// max-norm of the input matrix.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Maximum number of full Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// A square matrix of `f64`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    /// `n`×`n` zero matrix.
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// `n`×`n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from a function of (row, col).
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from a row-major slice of length `n*n`.
    pub fn from_row_slice(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        Mat {
            n,
            data: entries.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in Mat::mul");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let row = rhs.row(k);
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    out_row[j] += a * row[j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, x.len(), "dimension mismatch in Mat::mul_vec");
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// xᵀ M x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(self.n, x.len(), "dimension mismatch in quadratic_form");
        let mut acc = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = self.row(i);
            let mut s = 0.0;
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0.0 {
                    s += row[j] * xj;
                }
            }
            acc += xi * s;
        }
        acc
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Max-norm of `self − rhs`.
    pub fn max_diff(&self, rhs: &Mat) -> f64 {
        assert_eq!(self.n, rhs.n, "dimension mismatch in max_diff");
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(0.0, |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Replace the matrix with (M + Mᵀ)/2. Afterwards M[i][j] == M[j][i]
    /// holds exactly.
    pub fn symmetrize(&mut self) {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    /// M + t·I.
    pub fn add_scaled_identity(&self, t: f64) -> Mat {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] += t;
        }
        out
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric
/// matrix, by cyclic Jacobi rotations.
///
/// Only the upper triangle of `m` is read. Rotations continue until every
/// off-diagonal magnitude drops below [`JACOBI_OFF_DIAGONAL_TOL`] times the
/// max-norm of the input; the k-th column of the returned matrix is the
/// eigenvector of the k-th eigenvalue, so `Q D Qᵀ` reconstructs the input.
pub fn symmetric_eigensystem(m: &Mat) -> Result<(Vec<f64>, Mat), Error> {
    let n = m.dim();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0)));
    }
    // Work on a symmetrized copy so both triangles agree with the upper one.
    let mut a = Mat::from_fn(n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] });
    let mut q = Mat::identity(n);
    let tol = JACOBI_OFF_DIAGONAL_TOL * m.max_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut max_off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                max_off = max_off.max(a[(p, r)].abs());
            }
        }
        if max_off <= tol {
            return Ok(sorted_eigensystem(a, q));
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apr = a[(p, r)];
                if apr.abs() <= tol {
                    continue;
                }
                // Rotation angle annihilating a[p][r].
                let theta = 0.5 * (a[(r, r)] - a[(p, p)]) / apr;
                let t = {
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apr;
                a[(p, p)] -= h;
                a[(r, r)] += h;
                a[(p, r)] = 0.0;
                a[(r, p)] = 0.0;
                for k in 0..n {
                    if k == p || k == r {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    let new_p = akp - s * (akr + tau * akp);
                    let new_r = akr + s * (akp - tau * akr);
                    a[(k, p)] = new_p;
                    a[(p, k)] = new_p;
                    a[(k, r)] = new_r;
                    a[(r, k)] = new_r;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = qkp - s * (qkr + tau * qkp);
                    q[(k, r)] = qkr + s * (qkp - tau * qkr);
                }
            }
        }
    }
    Err(Error::JacobiNoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

fn sorted_eigensystem(a: Mat, q: Mat) -> (Vec<f64>, Mat) {
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)]).collect();
    let vectors = Mat::from_fn(n, |i, j| q[(i, order[j])]);
    (values, vectors)
}

/// Lower-triangular Cholesky factor L with L·Lᵀ = M.
///
/// Only the lower triangle of `m` is read. Fails with
/// [`Error::CholeskyFailure`] on a non-positive pivot.
pub fn cholesky(m: &Mat) -> Result<Mat, Error> {
    let n = m.dim();
    let mut l = Mat::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::CholeskyFailure { pivot: i });
                }
                l[(i, i)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Ok(l)
}
