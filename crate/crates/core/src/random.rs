//! Seeded random generators: Haar-like unitaries, positive elements with a
//! prescribed spectrum, and Gaussian Hermitian functionals.
//!
//! Every generator draws from a `ChaCha8Rng`, so output is identical across
//! platforms for the same seed. Per-trial streams come from
//! [`trial_seed`], which lets checkers run trials in any order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockStructure, Element};
use crate::error::{Error, Result};
use crate::functionals::HermitianFunctional;
use crate::spectral::ComplexMatrix;

pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `(seed, stream, trial)`.
pub fn trial_seed(seed: u64, stream: u64, trial: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93)
        ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> TrialRng {
    rng_from_seed(trial_seed(seed, stream, trial))
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Unitary from the Gram-Schmidt QR of a complex Gaussian matrix, with the
/// phases of `R`'s diagonal absorbed so the result is Haar distributed.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|j| g.column(j)).collect();
    for j in 0..dim {
        for _ in 0..2 {
            // two passes of modified Gram-Schmidt for orthogonality to round-off
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[k];
                let proj: Complex64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
                for (x, qi) in rest[0].iter_mut().zip(q) {
                    *x -= proj * qi;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// GUE-style Hermitian matrix `(G + G*)/2`.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    (&g + &g.adjoint()).scale(0.5)
}

/// Gaussian Hermitian functional normalized to dual norm one.
pub fn random_functional(structure: &BlockStructure, rng: &mut impl Rng) -> HermitianFunctional {
    loop {
        let rep = structure.dims().iter().map(|&d| random_hermitian(d, rng)).collect();
        let f = HermitianFunctional::new(structure.clone(), rep)
            .expect("generated blocks are Hermitian");
        let norm = f.norm();
        if norm > 0.0 {
            return f.scale(1.0 / norm);
        }
    }
}

/// Eigenvalue distribution for [`generate_positive`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSpec {
    /// Independent uniform eigenvalues in `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Exactly these eigenvalues, assigned to blocks in order.
    Fixed(Vec<f64>),
    /// Uniform eigenvalues in `[0.5, 2]`, with the first
    /// `rank_deficiency` of them set to zero.
    WithKernel { rank_deficiency: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub block_dims: Vec<usize>,
    pub spectrum: SpectrumSpec,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(block_dims: Vec<usize>, spectrum: SpectrumSpec, seed: u64) -> Self {
        Self {
            block_dims,
            spectrum,
            seed,
        }
    }

    fn validate(&self) -> Result<BlockStructure> {
        let structure = BlockStructure::new(self.block_dims.clone())?;
        let total = structure.matrix_dim();
        match &self.spectrum {
            SpectrumSpec::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo >= 0.0 && lo <= hi) {
                    return Err(Error::BadSpec(format!("uniform spectrum needs 0 <= lo <= hi, got [{lo}, {hi}]")));
                }
            }
            SpectrumSpec::Fixed(values) => {
                if values.len() != total {
                    return Err(Error::BadSpec(format!(
                        "fixed spectrum needs {total} eigenvalues, got {}",
                        values.len()
                    )));
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::BadSpec("fixed eigenvalues must be finite and >= 0".into()));
                }
            }
            SpectrumSpec::WithKernel { rank_deficiency } => {
                if *rank_deficiency >= total {
                    return Err(Error::BadSpec(format!(
                        "rank deficiency {rank_deficiency} must be below total dimension {total}"
                    )));
                }
            }
        }
        Ok(structure)
    }
}

/// Positive element `U_k diag(spectrum_k) U_k*` per block, with Haar-like
/// unitaries. Deterministic per seed.
pub fn generate_positive(spec: &GeneratorSpec) -> Result<Element> {
    let structure = spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let total = structure.matrix_dim();
    let eigenvalues: Vec<f64> = match &spec.spectrum {
        SpectrumSpec::Uniform { lo, hi } => {
            let dist = Uniform::new_inclusive(*lo, *hi).expect("validated range");
            (0..total).map(|_| rng.sample(dist)).collect()
        }
        SpectrumSpec::Fixed(values) => values.clone(),
        SpectrumSpec::WithKernel { rank_deficiency } => {
            let dist = Uniform::new_inclusive(0.5, 2.0).expect("static range");
            (0..total)
                .map(|i| {
                    let v: f64 = rng.sample(dist);
                    if i < *rank_deficiency {
                        0.0
                    } else {
                        v
                    }
                })
                .collect()
        }
    };
    let mut offset = 0;
    let mut blocks = Vec::with_capacity(structure.num_blocks());
    for &d in structure.dims() {
        let u = random_unitary(d, &mut rng);
        let lambdas = &eigenvalues[offset..offset + d];
        offset += d;
        let scaled = ComplexMatrix::from_fn(d, |i, j| u[(i, j)] * lambdas[j]);
        blocks.push((&scaled * &u.adjoint()).hermitian_part());
    }
    Element::new(structure, blocks)
}
