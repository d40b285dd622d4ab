//! Direct minimization of `f1(a) + f2(a)` over decompositions `f = f1 - f2`.
//!
//! Writing `G = F2` removes the equality constraint: `F1 = F + G`, and the
//! problem becomes
//!
//! ```text
//! minimize  f(a) + 2 tr(a G)   subject to  G >= 0,  G >= -F
//! ```
//!
//! The default [`Solver::Barrier`] follows the central path of a log-barrier
//! formulation with Newton steps and stops on a duality-gap bound. The
//! alternative [`Solver::ProjectedGradient`] takes steps
//! `G <- P(G - t * 2a)` with `t = 1 / (2 ||a||)` from the Jordan part `F-`,
//! where `P` projects onto the intersection of the two shifted PSD cones by
//! Dykstra's alternating projections.

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::functionals::HermitianFunctional;
use crate::spectral::{hermitian_eig, ComplexMatrix};

mod barrier;

const DYKSTRA_MAX_CYCLES: usize = 2_000;
const DYKSTRA_RELATIVE_STOP: f64 = 1e-13;

/// Algorithm used by [`r_variational_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Solver {
    /// Log-barrier path following with Newton steps. The final duality gap
    /// bounds the distance to the infimum.
    #[default]
    Barrier,
    /// Projected gradient with Dykstra projections. Simple, but slow and
    /// prone to early stops on singular or ill-conditioned `a`.
    ProjectedGradient,
}

#[derive(Clone, Debug)]
pub struct VariationalOptions {
    /// Target accuracy, relative to `max(1, value)`.
    pub tol: f64,
    pub solver: Solver,
    /// Budget on Newton steps (barrier) or gradient steps.
    pub max_iterations: usize,
    /// Projected gradient only: consecutive below-threshold decreases
    /// required to stop.
    pub patience: usize,
}

impl VariationalOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            solver: Solver::Barrier,
            max_iterations: 50_000,
            patience: 10,
        }
    }
}

/// A feasible decomposition `f = f1 - f2` and its cost `f1(a) + f2(a)`.
#[derive(Clone, Debug)]
pub struct DecompositionSolution {
    /// `f1(a) + f2(a)`. The barrier solver evaluates it in the eigenbasis
    /// of `a`, counting eigenvalues below its kernel cutoff as zero.
    pub value: f64,
    pub f1: HermitianFunctional,
    pub f2: HermitianFunctional,
    pub iterations: usize,
    /// `|| F - F1 + F2 ||_F`.
    pub residual: f64,
}

pub fn r_variational(a: &Element, f: &HermitianFunctional, tol: f64) -> Result<DecompositionSolution> {
    r_variational_with(a, f, &VariationalOptions::with_tol(tol))
}

pub fn r_variational_with(
    a: &Element,
    f: &HermitianFunctional,
    opts: &VariationalOptions,
) -> Result<DecompositionSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::BadSpec(format!("tolerance must be > 0, got {}", opts.tol)));
    }
    f.structure().ensure_same(a.structure())?;
    let (_, lambda_max) = a.spectral_bounds()?;
    let a_blocks = a.blocks();
    let f_blocks = f.rep();

    let (_, minus) = f.jordan_decompose();
    let (g, value, iterations) = if lambda_max == 0.0 || f.norm() == 0.0 {
        // every feasible pair costs f(a) + 2 tr(a G) = 0 or f is zero
        let g = minus.rep().to_vec();
        let value = pair_cost(a, f, &g)?;
        (g, value, 0)
    } else {
        match opts.solver {
            Solver::Barrier => barrier::solve(a_blocks, f_blocks, opts)?,
            Solver::ProjectedGradient => {
                let (mut g, iterations) =
                    projected_gradient(a_blocks, f_blocks, minus.rep().to_vec(), lambda_max, opts)?;
                // G >= 0 and G >= -F can be violated at round-off level;
                // shift by the worst violation so the pair is feasible.
                for (gk, fk) in g.iter_mut().zip(f_blocks) {
                    let low_g = min_eigenvalue(gk);
                    let low_f1 = min_eigenvalue(&(&*gk + fk));
                    let shift = (-low_g).max(-low_f1).max(0.0);
                    if shift > 0.0 {
                        *gk = &*gk + &ComplexMatrix::identity(gk.dim()).scale(shift);
                    }
                }
                let value = pair_cost(a, f, &g)?;
                (g, value, iterations)
            }
        }
    };

    let structure = f.structure().clone();
    let f2 = HermitianFunctional::new(structure, g)?;
    let f1 = f.add(&f2)?;
    let residual = f
        .rep()
        .iter()
        .zip(f1.rep())
        .zip(f2.rep())
        .map(|((fk, f1k), f2k)| (&(fk - f1k) + f2k).frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(DecompositionSolution {
        value,
        f1,
        f2,
        iterations,
        residual,
    })
}

/// `f(a) + 2 tr(a G)` in the original basis.
fn pair_cost(a: &Element, f: &HermitianFunctional, g: &[ComplexMatrix]) -> Result<f64> {
    let twice: f64 = a.blocks().iter().zip(g).map(|(ak, gk)| 2.0 * trace_pair(ak, gk)).sum();
    Ok(f.pair(a)? + twice)
}

/// Projected gradient with step `1 / (2 ||a||)`, stopping after `patience`
/// consecutive iterations whose objective decrease is below
/// `tol * max(1, value)`.
fn projected_gradient(
    a_blocks: &[ComplexMatrix],
    f_blocks: &[ComplexMatrix],
    mut g: Vec<ComplexMatrix>,
    lambda_max: f64,
    opts: &VariationalOptions,
) -> Result<(Vec<ComplexMatrix>, usize)> {
    let step = 1.0 / (2.0 * lambda_max);
    let objective = |g: &[ComplexMatrix]| -> f64 {
        let mut v = 0.0;
        for ((ak, fk), gk) in a_blocks.iter().zip(f_blocks).zip(g) {
            v += trace_pair(fk, ak) + 2.0 * trace_pair(gk, ak);
        }
        v
    };
    let mut value = objective(&g);
    let mut stalled = 0;
    let mut iterations = 0;
    while stalled < opts.patience {
        if iterations >= opts.max_iterations {
            return Err(Error::NoConvergence {
                routine: "r_variational (projected gradient)",
                budget: opts.max_iterations,
            });
        }
        iterations += 1;
        for ((gk, ak), fk) in g.iter_mut().zip(a_blocks).zip(f_blocks) {
            let moved = &*gk - &ak.scale(2.0 * step);
            *gk = project_feasible(&moved, fk);
        }
        let next = objective(&g);
        if value - next < opts.tol * next.abs().max(1.0) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        value = next;
    }
    Ok((g, iterations))
}

/// `Re tr(x y)` for Hermitian `x`, `y`.
fn trace_pair(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let n = x.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = x[(i, j)] * y[(j, i)];
            acc += p.re;
        }
    }
    acc
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eig(&m.hermitian_part())
        .map(|e| e.lambda_min())
        .unwrap_or(0.0)
}

/// Nearest PSD matrix in Frobenius norm: eigenvalues clipped at zero.
fn psd_part(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eig(&m.hermitian_part()).expect("hermitian part has a decomposition");
    eig.apply(|l| l.max(0.0))
}

/// Projection onto `{G >= 0} ∩ {G >= -F}` by Dykstra's algorithm.
fn project_feasible(x0: &ComplexMatrix, f: &ComplexMatrix) -> ComplexMatrix {
    let n = x0.dim();
    let scale = (x0.frobenius_norm() + f.frobenius_norm()).max(1.0);
    let mut x = x0.clone();
    let mut p = ComplexMatrix::zeros(n);
    let mut q = ComplexMatrix::zeros(n);
    let mut prev_y: Option<ComplexMatrix> = None;
    for _ in 0..DYKSTRA_MAX_CYCLES {
        let xp = &x + &p;
        let y = psd_part(&xp);
        p = &xp - &y;
        let yq = &y + &q;
        let next = &psd_part(&(&yq + f)) - f;
        q = &yq - &next;
        let settled = prev_y.as_ref().is_some_and(|py| {
            (&next - &x).frobenius_norm() + (&y - py).frobenius_norm() + (&next - &y).frobenius_norm()
                <= DYKSTRA_RELATIVE_STOP * scale
        });
        x = next;
        prev_y = Some(y);
        if settled {
            break;
        }
    }
    x
}
