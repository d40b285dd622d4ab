//! Log-barrier path following for
//!
//! ```text
//! minimize  2 tr(a G)   subject to  G >= 0,  G + F >= 0
//! ```
//!
//! one block at a time. Each block is rotated into the eigenbasis of `a`,
//! where `a` is diagonal. Directions in the numerical kernel of `a` cost
//! nothing, so the barrier problem is solved on the range and the kernel
//! part of `G` is filled in afterwards with the smallest multiple of the
//! identity that keeps `G + F >= 0`.
//!
//! The numerical kernel is what the eigensolver cannot tell apart from
//! zero, eigenvalues at most [`KERNEL_CUTOFF`] times the largest one. The
//! returned value is evaluated in the eigenbasis with those eigenvalues
//! taken as exactly zero, so a large kernel fill does not leak round-off
//! into it.
//!
//! On the range, `phi_t(G) = 2t tr(a G) - log det G - log det (G + F)` is
//! minimized by damped Newton steps for an increasing sequence of `t`.
//! A centered point for `t` is within `2n / t` of the optimum, which gives
//! the stopping rule.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{hermitian_eig, ComplexMatrix};

use super::VariationalOptions;

/// Relative eigenvalue resolution of the Jacobi eigensolver.
pub const KERNEL_CUTOFF: f64 = 1e-14;
const CENTERING_DECREMENT: f64 = 1e-10;
const ROUNDOFF_DECREMENT: f64 = 1e-6;
const MU_SHRINK: f64 = 0.2;
const ARMIJO: f64 = 0.25;
const MIN_STEP: f64 = 1e-12;

/// Returns the `G` blocks, the cost `f(a) + 2 tr(a G)` and the number of
/// Newton steps taken.
pub(super) fn solve(
    a_blocks: &[ComplexMatrix],
    f_blocks: &[ComplexMatrix],
    opts: &VariationalOptions,
) -> Result<(Vec<ComplexMatrix>, f64, usize)> {
    let decompositions = a_blocks
        .iter()
        .map(|ak| hermitian_eig(ak))
        .collect::<Result<Vec<_>>>()?;
    let lambda_max = decompositions
        .iter()
        .map(|e| e.lambda_max())
        .fold(0.0, f64::max);
    let cutoff = KERNEL_CUTOFF * lambda_max;
    let range_total: usize = decompositions
        .iter()
        .map(|e| e.eigenvalues.iter().filter(|&&l| l > cutoff).count())
        .sum();

    let mut steps = 0;
    let mut cost = 0.0;
    let mut out = Vec::with_capacity(a_blocks.len());
    for (eig, fk) in decompositions.iter().zip(f_blocks) {
        let u = &eig.eigenvectors;
        let f_rot = &(&u.adjoint() * fk) * u;
        let range: Vec<usize> = (0..eig.dim()).filter(|&i| eig.eigenvalues[i] > cutoff).collect();
        let kernel: Vec<usize> = (0..eig.dim()).filter(|&i| eig.eigenvalues[i] <= cutoff).collect();

        let f11 = submatrix(&f_rot, &range, &range);
        let lambdas: Vec<f64> = range.iter().map(|&i| eig.eigenvalues[i]).collect();
        let share = opts.tol * range.len() as f64 / range_total.max(1) as f64;
        let budget = opts.max_iterations.saturating_sub(steps);
        let (mut g11, value, used) = solve_range(&lambdas, &f11, share, budget)?;
        steps += used;
        if !kernel.is_empty() && !range.is_empty() {
            // Pushing G11 into the interior keeps the kernel completion of
            // order |F12|^2 / delta instead of |F12|^2 / mu; it costs
            // 2 delta tr(a11), an eighth of this block's budget.
            let trace: f64 = lambdas.iter().sum();
            let delta = share * value.max(1.0) / (16.0 * trace);
            g11 = &g11 + &ComplexMatrix::identity(range.len()).scale(delta);
        }

        let g_rot = lift(&f_rot, &g11, &range, &kernel);
        cost += range
            .iter()
            .map(|&i| eig.eigenvalues[i] * (f_rot[(i, i)].re + 2.0 * g_rot[(i, i)].re))
            .sum::<f64>();
        out.push((&(u * &g_rot) * &u.adjoint()).hermitian_part());
    }
    Ok((out, cost, steps))
}

/// Barrier solve on the range of `a = diag(lambdas)`, all `lambdas > 0`.
/// `share` is this block's part of the absolute gap budget, measured
/// against `max(1, value)`. Returns `G11`, a lower bound on the block's
/// optimal value, and the Newton steps taken.
fn solve_range(
    lambdas: &[f64],
    f: &ComplexMatrix,
    share: f64,
    budget: usize,
) -> Result<(ComplexMatrix, f64, usize)> {
    let n = lambdas.len();
    if n == 0 {
        return Ok((ComplexMatrix::zeros(0), 0.0, 0));
    }
    // F11 = 0 still needs a strictly interior G11 for the kernel completion
    let f_scale = match f.max_abs() * n as f64 {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let a_scale = lambdas.iter().copied().fold(0.0, f64::max);
    let a_hat: Vec<f64> = lambdas.iter().map(|l| l / a_scale).collect();
    let f_hat = f.scale(1.0 / f_scale);
    // ||f_hat||_op <= 1, so 2I and 2I + f_hat are both >= I
    let mut g = ComplexMatrix::identity(n).scale(2.0);
    let mut mu = 1.0;
    let mut steps = 0;
    loop {
        steps += center(&a_hat, &f_hat, &mut g, mu, budget.saturating_sub(steps))?;
        let primal = (0..n).map(|i| (f_hat[(i, i)].re + 2.0 * g[(i, i)].re) * a_hat[i]).sum::<f64>()
            * f_scale
            * a_scale;
        let gap = 2.0 * n as f64 * mu * f_scale * a_scale;
        let lower = (primal - gap).max(0.0);
        if gap <= share * lower.max(1.0) / 4.0 {
            return Ok((g.scale(f_scale), lower, steps));
        }
        mu *= MU_SHRINK;
    }
}

/// Damped Newton on `phi_t` with `t = 1 / mu`, from a strictly feasible `g`.
fn center(a: &[f64], f: &ComplexMatrix, g: &mut ComplexMatrix, mu: f64, budget: usize) -> Result<usize> {
    let n = a.len();
    let t = 1.0 / mu;
    let mut steps = 0;
    let mut previous = f64::INFINITY;
    let mut g_chol = cholesky(g).expect("iterate is strictly feasible");
    let mut s_chol = cholesky(&(&*g + f)).expect("iterate is strictly feasible");
    loop {
        let g_inv = inverse_from_cholesky(&g_chol);
        let s_inv = inverse_from_cholesky(&s_chol);
        let mut grad = (&g_inv + &s_inv).scale(-1.0);
        for i in 0..n {
            grad[(i, i)] += 2.0 * t * a[i];
        }
        let gvec = coords(&grad);
        let hess = hessian(&g_inv, &s_inv);
        let dir = match solve_spd(&hess, &gvec) {
            Some(d) => d,
            None => break,
        };
        let decrement: f64 = gvec.iter().zip(&dir).map(|(x, y)| x * y).sum();
        // inside the quadratic region the decrement collapses every step;
        // when it stops doing so, round-off has taken over
        let stalled = decrement <= ROUNDOFF_DECREMENT && decrement >= 0.5 * previous;
        if decrement <= CENTERING_DECREMENT || stalled {
            break;
        }
        previous = decrement;
        if steps >= budget {
            return Err(Error::NoConvergence {
                routine: "r_variational (barrier)",
                budget: steps,
            });
        }
        steps += 1;
        let delta = from_coords(&dir.iter().map(|x| -x).collect::<Vec<_>>(), n);
        let linear = 2.0 * t * (0..n).map(|i| a[i] * delta[(i, i)].re).sum::<f64>();
        let (logdet_g, logdet_s) = (logdet(&g_chol), logdet(&s_chol));
        let mut step = 1.0;
        let accepted = loop {
            let trial = &*g + &delta.scale(step);
            if let (Some(gc), Some(sc)) = (cholesky(&trial), cholesky(&(&trial + f))) {
                let change = step * linear - (logdet(&gc) - logdet_g) - (logdet(&sc) - logdet_s);
                if change <= -ARMIJO * step * decrement {
                    break Some((trial, gc, sc));
                }
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((trial, gc, sc)) => {
                *g = trial;
                g_chol = gc;
                s_chol = sc;
            }
            // round-off floor: no descent left to find
            None => break,
        }
    }
    Ok(steps)
}

/// Kernel completion: with `G11 + F11 > 0` on the range, `G = G11 ⊕ cI`
/// satisfies `G + F >= 0` once `c I + F22 >= F21 (G11 + F11)^{-1} F12`.
fn lift(f: &ComplexMatrix, g11: &ComplexMatrix, range: &[usize], kernel: &[usize]) -> ComplexMatrix {
    let n = f.dim();
    let mut g = ComplexMatrix::zeros(n);
    for (p, &i) in range.iter().enumerate() {
        for (q, &j) in range.iter().enumerate() {
            g[(i, j)] = g11[(p, q)];
        }
    }
    if kernel.is_empty() {
        return g;
    }
    let s_inv = if range.is_empty() {
        ComplexMatrix::zeros(0)
    } else {
        let s11 = &submatrix(f, range, range) + g11;
        match cholesky(&s11) {
            Some(l) => inverse_from_cholesky(&l),
            None => hermitian_eig(&s11.hermitian_part())
                .expect("hermitian")
                .apply(|l| if l > 0.0 { 1.0 / l } else { 0.0 }),
        }
    };
    let need = ComplexMatrix::from_fn(kernel.len(), |p, q| {
        let mut acc = -f[(kernel[p], kernel[q])];
        for (x, &i) in range.iter().enumerate() {
            for (y, &j) in range.iter().enumerate() {
                acc += f[(kernel[p], i)] * s_inv[(x, y)] * f[(j, kernel[q])];
            }
        }
        acc
    });
    let top = hermitian_eig(&need.hermitian_part()).map(|e| e.lambda_max()).unwrap_or(0.0);
    let c = top.max(0.0) * (1.0 + 1e-9) + 1e-12 * f.max_abs();
    for &k in kernel {
        g[(k, k)] = Complex64::new(c, 0.0);
    }
    g
}

fn submatrix(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), |p, q| m[(rows[p], cols[q])])
}

/// Lower-triangular `L` with `m = L L*`, or `None` unless `m > 0`.
fn cholesky(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.dim();
    let mut l = ComplexMatrix::zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Some(l)
}

fn logdet(l: &ComplexMatrix) -> f64 {
    (0..l.dim()).map(|i| 2.0 * l[(i, i)].re.ln()).sum()
}

fn inverse_from_cholesky(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.dim();
    let mut w = ComplexMatrix::zeros(n);
    // columns of L^{-1} by forward substitution
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            for k in c..i {
                s -= l[(i, k)] * w[(k, c)];
            }
            w[(i, c)] = s / l[(i, i)];
        }
    }
    (&w.adjoint() * &w).hermitian_part()
}

/// Coordinates in the orthonormal basis `E_ii`, `(E_ij + E_ji)/√2`,
/// `i(E_ij - E_ji)/√2` (`i < j`) of the Hermitian matrices under
/// `<x, y> = Re tr(x y)`.
fn coords(x: &ComplexMatrix) -> Vec<f64> {
    let n = x.dim();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        v.push(x[(i, i)].re);
    }
    for i in 0..n {
        for j in i + 1..n {
            v.push(std::f64::consts::SQRT_2 * x[(i, j)].re);
            v.push(std::f64::consts::SQRT_2 * x[(i, j)].im);
        }
    }
    v
}

fn from_coords(v: &[f64], n: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(n);
    for i in 0..n {
        x[(i, i)] = Complex64::new(v[i], 0.0);
    }
    let mut p = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = Complex64::new(v[p], v[p + 1]) / std::f64::consts::SQRT_2;
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
            p += 2;
        }
    }
    x
}

/// Matrix of `X -> A X A + B X B` in the basis of [`coords`].
fn hessian(a: &ComplexMatrix, b: &ComplexMatrix) -> Vec<Vec<f64>> {
    let n = a.dim();
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        basis.push((i, i, Complex64::new(1.0, 0.0)));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            basis.push((i, j, Complex64::new(h, 0.0)));
            basis.push((i, j, Complex64::new(0.0, h)));
        }
    }
    let mut cols = Vec::with_capacity(basis.len());
    for &(p, q, u) in &basis {
        let mut m = ComplexMatrix::zeros(n);
        for w in [a, b] {
            for r in 0..n {
                for s in 0..n {
                    m[(r, s)] += if p == q {
                        w[(r, p)] * w[(p, s)]
                    } else {
                        u * w[(r, p)] * w[(q, s)] + u.conj() * w[(r, q)] * w[(p, s)]
                    };
                }
            }
        }
        cols.push(coords(&m));
    }
    cols
}

/// Solves `H d = g` for symmetric positive definite `H`, after a diagonal
/// rescaling to unit diagonal.
fn solve_spd(h: &[Vec<f64>], g: &[f64]) -> Option<Vec<f64>> {
    let m = g.len();
    let scale: Vec<f64> = (0..m).map(|i| 1.0 / h[i][i].sqrt()).collect();
    if scale.iter().any(|s| !s.is_finite()) {
        return None;
    }
    let mut l = vec![vec![0.0; m]; m];
    for j in 0..m {
        let mut d: f64 = 1.0;
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) {
            return None;
        }
        let ljj = d.sqrt();
        l[j][j] = ljj;
        for i in j + 1..m {
            let hij = 0.5 * (h[i][j] + h[j][i]) * scale[i] * scale[j];
            let mut s = hij;
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / ljj;
        }
    }
    let mut y: Vec<f64> = (0..m).map(|i| g[i] * scale[i]).collect();
    for i in 0..m {
        for k in 0..i {
            y[i] -= l[i][k] * y[k];
        }
        y[i] /= l[i][i];
    }
    for i in (0..m).rev() {
        for k in i + 1..m {
            y[i] -= l[k][i] * y[k];
        }
        y[i] /= l[i][i];
    }
    Some(y.iter().zip(&scale).map(|(y, s)| y * s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_are_isometric() {
        let x = ComplexMatrix::from_fn(3, |i, j| {
            if i == j {
                Complex64::new(i as f64 + 1.0, 0.0)
            } else if i < j {
                Complex64::new(0.5, j as f64 - i as f64)
            } else {
                Complex64::new(0.5, j as f64 - i as f64)
            }
        });
        let v = coords(&x);
        let norm2: f64 = v.iter().map(|c| c * c).sum();
        assert!((norm2 - x.frobenius_norm().powi(2)).abs() < 1e-12);
        assert!((&from_coords(&v, 3) - &x).max_abs() < 1e-15);
    }

    #[test]
    fn cholesky_inverse_and_logdet() {
        let m = ComplexMatrix::from_real_rows(&[&[4.0, 1.0], &[1.0, 3.0]]).unwrap();
        let l = cholesky(&m).unwrap();
        assert!((logdet(&l) - 11f64.ln()).abs() < 1e-14);
        let err = (&(&m * &inverse_from_cholesky(&l)) - &ComplexMatrix::identity(2)).max_abs();
        assert!(err < 1e-14);
        assert!(cholesky(&ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap()).is_none());
    }

    #[test]
    fn hessian_matches_operator() {
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 0.5], &[0.5, 1.0]]).unwrap();
        let b = ComplexMatrix::identity(2);
        let h = hessian(&a, &b);
        let x = from_coords(&[0.3, -1.0, 0.7, 0.2], 2);
        let expected = coords(&(&(&(&a * &x) * &a) + &x));
        for (i, e) in expected.iter().enumerate() {
            let got: f64 = (0..4).map(|q| h[q][i] * coords(&x)[q]).sum();
            assert!((got - e).abs() < 1e-13);
        }
    }
}
