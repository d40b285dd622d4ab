//! Dense Hermitian linear algebra: a small complex matrix type, a cyclic
//! Jacobi eigensolver, spectral calculus (powers, range projections) and the
//! operator and trace norms.
//!
//! Everything here is a pure function of its inputs. Matrices are stored
//! row-major and are expected to stay small (dim up to a few dozen).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for eigen-reconstruction and positivity checks.
pub const EIG_RELATIVE_TOL: f64 = 1e-10;
/// Relative tolerance for the Hermitian symmetry check.
pub const HERMITIAN_RELATIVE_TOL: f64 = 1e-12;
/// Eigenvalues below `RANK_RELATIVE_TOL * lambda_max` are treated as kernel.
pub const RANK_RELATIVE_TOL: f64 = 1e-8;

const JACOBI_STOP: f64 = 1e-14;

/// `tau_eig = 1e-10 * max(1, scale)`.
pub fn tau_eig(scale: f64) -> f64 {
    EIG_RELATIVE_TOL * scale.max(1.0)
}

/// `tau_rank = 1e-8 * lambda_max`.
pub fn tau_rank(lambda_max: f64) -> f64 {
    RANK_RELATIVE_TOL * lambda_max.max(0.0)
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diag(&vec![1.0; dim])
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows, rejecting ragged input and non-finite entries.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (j, z) in row.into_iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data.push(z);
            }
        }
        Ok(Self { dim, data })
    }

    /// Real matrix from rows (convenience for tests and examples).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// Outer product `v v*`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |m_ij - conj(m_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Symmetry tolerance `tau_herm = 1e-12 * max(1, ||m||_max)`.
    pub fn hermitian_tolerance(&self) -> f64 {
        HERMITIAN_RELATIVE_TOL * self.max_abs().max(1.0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= self.hermitian_tolerance()
    }

    /// `(m + m*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_dim(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_dim(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_dim(rhs);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    if z.im == 0.0 {
                        format!("{:.6}", z.re)
                    } else {
                        format!("{:.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Eigenvalues (ascending) and a unitary matrix whose columns are the
/// matching eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `U diag(f(lambda)) U*`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &wk) in w.iter().enumerate() {
            if wk == 0.0 {
                continue;
            }
            for i in 0..n {
                let uik = u[(i, k)] * wk;
                for j in 0..n {
                    out[(i, j)] += uik * u[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| l)
    }

    /// Positivity tolerance `tau_eig` for the decomposed matrix.
    pub fn positivity_tolerance(&self) -> f64 {
        let op = self.lambda_min().abs().max(self.lambda_max().abs());
        tau_eig(op)
    }

    /// Rejects spectra below `-tau_eig`; returns eigenvalues with the
    /// round-off negatives clamped to zero.
    pub fn clamped_nonnegative(&self) -> Result<Vec<f64>> {
        let tol = self.positivity_tolerance();
        if self.lambda_min() < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: self.lambda_min(),
            });
        }
        Ok(self.eigenvalues.iter().map(|&l| l.max(0.0)).collect())
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps with
/// complex unitary plane rotations.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies
/// the classical real rotation that annihilates it. Sweeps stop once the
/// off-diagonal Frobenius norm falls below `1e-14 * ||m||_F`; the budget is
/// `30 * dim^2` sweeps.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let defect = m.hermitian_defect();
    let tolerance = m.hermitian_tolerance();
    if defect > tolerance {
        return Err(Error::NotHermitian { defect, tolerance });
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let stop = JACOBI_STOP * a.frobenius_norm();
    let budget = 30 * n * n;
    let mut sweeps = 0;

    while off_diagonal_norm(&a) > stop {
        if sweeps >= budget {
            return Err(Error::NoConvergence {
                routine: "hermitian_eig",
                budget,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase_conj = (apq / r).conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p, q) plane.
                let j_pp = Complex64::new(c, 0.0);
                let j_pq = Complex64::new(s, 0.0);
                let j_qp = phase_conj * (-s);
                let j_qq = phase_conj * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(app - t * r, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep the order in which Jacobi left them
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `a^alpha` for positive semidefinite `a`, with the kernel threshold taken
/// from `a` itself.
pub fn matrix_power(a: &ComplexMatrix, alpha: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let rank_tol = tau_rank(eig.lambda_max());
    power_from_decomposition(&eig, alpha, rank_tol)
}

/// `U diag(lambda^alpha) U*` with an externally supplied kernel threshold.
/// Non-positive exponents require every eigenvalue to exceed `rank_tol`.
pub fn power_from_decomposition(
    eig: &SpectralDecomposition,
    alpha: f64,
    rank_tol: f64,
) -> Result<ComplexMatrix> {
    let lambdas = eig.clamped_nonnegative()?;
    if alpha <= 0.0 && eig.dim() > 0 && eig.lambda_min() <= rank_tol {
        return Err(Error::SingularPower {
            alpha,
            lambda_min: eig.lambda_min(),
        });
    }
    if alpha == 1.0 {
        return Ok(eig.apply(|l| l.max(0.0)));
    }
    let clamped = SpectralDecomposition {
        eigenvalues: lambdas,
        eigenvectors: eig.eigenvectors.clone(),
    };
    Ok(clamped.apply(|l| if l == 0.0 { 0.0 } else { l.powf(alpha) }))
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.dim() == 0 {
        return 0.0;
    }
    if m.is_hermitian() {
        if let Ok(eig) = hermitian_eig(m) {
            return eig.lambda_min().abs().max(eig.lambda_max().abs());
        }
    }
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Schatten-1 norm: the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_hermitian() {
        if let Ok(eig) = hermitian_eig(m) {
            return eig.eigenvalues.iter().map(|l| l.abs()).sum();
        }
    }
    singular_values(m).into_iter().sum()
}

/// Singular values via the eigenvalues of `m* m`.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let gram = &m.adjoint() * m;
    let gram = gram.hermitian_part();
    match hermitian_eig(&gram) {
        Ok(eig) => eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect(),
        // the Gram matrix is Hermitian by construction; Jacobi does not stall on it
        Err(e) => unreachable!("Gram matrix eigensolve failed: {e}"),
    }
}

/// How to compute the range projection of a positive matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RangeMethod {
    /// Sum of eigenprojections for eigenvalues above the rank tolerance.
    Spectral,
    /// `a (eps 1 + a)^{-1}` for a fixed `eps > 0`.
    Limit { epsilon: f64 },
}

pub fn range_projection(a: &ComplexMatrix, method: RangeMethod) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    eig.clamped_nonnegative()?;
    match method {
        RangeMethod::Spectral => {
            let rank_tol = tau_rank(eig.lambda_max());
            Ok(eig.apply(|l| if l > rank_tol { 1.0 } else { 0.0 }))
        }
        RangeMethod::Limit { epsilon } => resolvent_projection(a, epsilon),
    }
}

/// `(eps 1 + a)^{-1} a`, solved directly by Gaussian elimination. This equals
/// `a (eps 1 + a)^{-1}` since the factors commute.
pub(crate) fn resolvent_projection(a: &ComplexMatrix, epsilon: f64) -> Result<ComplexMatrix> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::BadSpec(format!("limit epsilon must be > 0, got {epsilon}")));
    }
    let n = a.dim();
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] += epsilon;
    }
    let x = solve(shifted, a.clone())?;
    Ok(x.hermitian_part())
}

/// Solves `lhs * X = rhs` with partial pivoting.
fn solve(mut lhs: ComplexMatrix, mut rhs: ComplexMatrix) -> Result<ComplexMatrix> {
    let n = lhs.dim();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lhs[(i, col)].norm().total_cmp(&lhs[(j, col)].norm()))
            .unwrap_or(col);
        if lhs[(pivot, col)].norm() == 0.0 {
            return Err(Error::SingularPower {
                alpha: -1.0,
                lambda_min: 0.0,
            });
        }
        if pivot != col {
            for j in 0..n {
                lhs.data.swap(pivot * n + j, col * n + j);
                rhs.data.swap(pivot * n + j, col * n + j);
            }
        }
        let d = lhs[(col, col)];
        for row in col + 1..n {
            let factor = lhs[(row, col)] / d;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = lhs[(col, j)];
                lhs[(row, j)] -= factor * v;
            }
            for j in 0..n {
                let v = rhs[(col, j)];
                rhs[(row, j)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let d = lhs[(col, col)];
        for j in 0..n {
            let mut acc = rhs[(col, j)];
            for k in col + 1..n {
                acc -= lhs[(col, k)] * rhs[(k, j)];
            }
            rhs[(col, j)] = acc / d;
        }
    }
    Ok(rhs)
}
