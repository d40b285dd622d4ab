//! The finite-dimensional C*-algebra `M_{n_1} (+) ... (+) M_{n_k}` and its
//! elements.
//!
//! Elements are immutable block tuples. Spectral data (per-block
//! eigendecompositions) is computed lazily on first use and cached; the cache
//! is a `OnceLock`, so concurrent readers see one consistent value.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    self, hermitian_eig, power_from_decomposition, tau_eig, tau_rank, ComplexMatrix,
    RangeMethod, SpectralDecomposition,
};

/// Block sizes of the algebra. Never empty, every size at least one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockStructure {
    dims: Vec<usize>,
}

impl BlockStructure {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::BadStructure("at least one block is required".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::BadStructure(format!("block {pos} has dimension 0")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    /// Sum of block sizes: the size of the underlying matrix.
    pub fn matrix_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `sum n_k^2`, the complex dimension of the algebra.
    pub fn algebra_dim(&self) -> usize {
        self.dims.iter().map(|d| d * d).sum()
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::StructureMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            })
        }
    }
}

impl fmt::Display for BlockStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Debug)]
enum Spectrum {
    Decomposed(Vec<SpectralDecomposition>),
    NotHermitian { defect: f64, tolerance: f64 },
    NoConvergence { budget: usize },
}

/// A block-diagonal element of the algebra.
#[derive(Clone)]
pub struct Element {
    structure: BlockStructure,
    blocks: Vec<ComplexMatrix>,
    spectrum: OnceLock<Spectrum>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.structure == other.structure && self.blocks == other.blocks
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element")
            .field("structure", &self.structure)
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl Element {
    pub fn new(structure: BlockStructure, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != structure.num_blocks() {
            return Err(Error::DimensionMismatch {
                expected: structure.num_blocks(),
                found: blocks.len(),
            });
        }
        for (b, &d) in blocks.iter().zip(structure.dims()) {
            if b.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: b.dim(),
                });
            }
        }
        Ok(Self::from_parts(structure, blocks))
    }

    /// Infers the structure from the block sizes.
    pub fn from_blocks(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let structure = BlockStructure::new(blocks.iter().map(|b| b.dim()).collect())?;
        Ok(Self::from_parts(structure, blocks))
    }

    /// Single-block diagonal element `diag(values)`.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_blocks(vec![ComplexMatrix::from_real_diag(values)])
    }

    /// Block-diagonal element with real diagonal blocks.
    pub fn block_diagonal(blocks: &[&[f64]]) -> Result<Self> {
        Self::from_blocks(blocks.iter().map(|d| ComplexMatrix::from_real_diag(d)).collect())
    }

    fn from_parts(structure: BlockStructure, blocks: Vec<ComplexMatrix>) -> Self {
        Self {
            structure,
            blocks,
            spectrum: OnceLock::new(),
        }
    }

    /// The unit of the algebra.
    pub fn identity(structure: &BlockStructure) -> Self {
        let blocks = structure.dims().iter().map(|&d| ComplexMatrix::identity(d)).collect();
        Self::from_parts(structure.clone(), blocks)
    }

    pub fn zero(structure: &BlockStructure) -> Self {
        let blocks = structure.dims().iter().map(|&d| ComplexMatrix::zeros(d)).collect();
        Self::from_parts(structure.clone(), blocks)
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &ComplexMatrix {
        &self.blocks[k]
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        self.structure.ensure_same(&other.structure)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Self::from_parts(self.structure.clone(), blocks))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn map_blocks(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self::from_parts(self.structure.clone(), self.blocks.iter().map(f).collect())
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_blocks(|b| b.scale(s))
    }

    /// C*-norm: the largest operator norm over the blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral::operator_norm).fold(0.0, f64::max)
    }

    fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| {
            let mut out = Vec::with_capacity(self.blocks.len());
            for b in &self.blocks {
                match hermitian_eig(b) {
                    Ok(eig) => out.push(eig),
                    Err(Error::NotHermitian { defect, tolerance }) => {
                        return Spectrum::NotHermitian { defect, tolerance }
                    }
                    Err(Error::NoConvergence { budget, .. }) => {
                        return Spectrum::NoConvergence { budget }
                    }
                    Err(e) => unreachable!("unexpected eigensolver error: {e}"),
                }
            }
            Spectrum::Decomposed(out)
        })
    }

    /// Per-block eigendecompositions, computed once.
    pub fn decompositions(&self) -> Result<&[SpectralDecomposition]> {
        match self.spectrum() {
            Spectrum::Decomposed(d) => Ok(d),
            Spectrum::NotHermitian { defect, tolerance } => Err(Error::NotHermitian {
                defect: *defect,
                tolerance: *tolerance,
            }),
            Spectrum::NoConvergence { budget } => Err(Error::NoConvergence {
                routine: "hermitian_eig",
                budget: *budget,
            }),
        }
    }

    /// Decompositions, failing with `NotPositive` unless every block is
    /// positive semidefinite within its `tau_eig`.
    pub fn positive_decompositions(&self) -> Result<&[SpectralDecomposition]> {
        let decs = self.decompositions()?;
        for d in decs {
            d.clamped_nonnegative()?;
        }
        Ok(decs)
    }

    pub fn is_hermitian(&self) -> bool {
        self.decompositions().is_ok()
    }

    pub fn is_positive(&self) -> bool {
        self.positive_decompositions().is_ok()
    }

    pub fn is_invertible(&self) -> bool {
        match self.spectral_bounds() {
            Ok((lo, hi)) => lo > tau_rank(hi),
            Err(_) => false,
        }
    }

    /// `p = p* = p^2` blockwise within `tau_eig`.
    pub fn is_projection(&self) -> bool {
        self.is_hermitian()
            && self.blocks.iter().all(|p| {
                let defect = (&(p * p) - p).frobenius_norm();
                defect <= tau_eig(spectral::operator_norm(p))
            })
    }

    /// Global `(lambda_min, lambda_max)` over all blocks of a positive
    /// element, with round-off negatives clamped to zero.
    pub fn spectral_bounds(&self) -> Result<(f64, f64)> {
        let decs = self.positive_decompositions()?;
        let lo = decs.iter().map(|d| d.lambda_min()).fold(f64::INFINITY, f64::min);
        let hi = decs.iter().map(|d| d.lambda_max()).fold(f64::NEG_INFINITY, f64::max);
        Ok((lo.max(0.0), hi.max(0.0)))
    }

    /// Kernel threshold `tau_rank = 1e-8 * lambda_max(a)`, global over blocks
    /// so that rescaling the element never changes its range projection.
    pub fn rank_tolerance(&self) -> Result<f64> {
        Ok(tau_rank(self.spectral_bounds()?.1))
    }

    /// Blockwise `a^alpha` for positive `a`. Non-positive exponents require
    /// an invertible element.
    pub fn power(&self, alpha: f64) -> Result<Self> {
        let decs = self.positive_decompositions()?;
        let rank_tol = self.rank_tolerance()?;
        if alpha <= 0.0 {
            let (lo, _) = self.spectral_bounds()?;
            if lo <= rank_tol {
                return Err(Error::SingularPower {
                    alpha,
                    lambda_min: lo,
                });
            }
        }
        let blocks = decs
            .iter()
            .map(|d| power_from_decomposition(d, alpha, rank_tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(self.structure.clone(), blocks))
    }

    /// Range projection `rp(a)`; see [`RangeMethod`].
    pub fn range_projection(&self, method: RangeMethod) -> Result<Self> {
        let decs = self.positive_decompositions()?;
        let rank_tol = self.rank_tolerance()?;
        let blocks = match method {
            RangeMethod::Spectral => decs
                .iter()
                .map(|d| d.apply(|l| if l > rank_tol { 1.0 } else { 0.0 }))
                .collect(),
            RangeMethod::Limit { epsilon } => self
                .blocks
                .iter()
                .map(|b| spectral::resolvent_projection(b, epsilon))
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(Self::from_parts(self.structure.clone(), blocks))
    }

    /// Locates the global eigenvalue chosen by `pick` among all blocks:
    /// returns `(block, index within block, eigenvalue)`.
    pub(crate) fn locate_eigenvalue(
        &self,
        pick: impl Fn(f64, f64) -> bool,
    ) -> Result<(usize, usize, f64)> {
        let decs = self.positive_decompositions()?;
        let mut best: Option<(usize, usize, f64)> = None;
        for (k, d) in decs.iter().enumerate() {
            for (i, &l) in d.eigenvalues.iter().enumerate() {
                let l = l.max(0.0);
                if best.map_or(true, |(_, _, b)| pick(l, b)) {
                    best = Some((k, i, l));
                }
            }
        }
        best.ok_or_else(|| Error::BadStructure("element has no eigenvalues".into()))
    }

    pub fn to_json_string(&self) -> String {
        let file = ElementFile {
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    let n = b.dim();
                    let re = (0..n).map(|i| (0..n).map(|j| b[(i, j)].re).collect()).collect();
                    let has_im = b.entries().iter().any(|z| z.im != 0.0);
                    let im = has_im
                        .then(|| (0..n).map(|i| (0..n).map(|j| b[(i, j)].im).collect()).collect());
                    BlockFile { dim: n, re, im }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("element serialization cannot fail")
    }

    /// Parses `{"blocks": [{"dim": n, "re": [[...]], "im": [[...]]}]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ElementFile = serde_json::from_str(text)?;
        file.into_element()
    }
}

/// On-disk element/functional representation.
#[derive(Debug, Serialize, Deserialize)]
pub struct ElementFile {
    pub blocks: Vec<BlockFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BlockFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl ElementFile {
    pub fn into_element(self) -> Result<Element> {
        let blocks = self
            .blocks
            .into_iter()
            .map(BlockFile::into_matrix)
            .collect::<Result<Vec<_>>>()?;
        Element::from_blocks(blocks)
    }
}

impl BlockFile {
    fn into_matrix(self) -> Result<ComplexMatrix> {
        let n = self.dim;
        let check = |rows: &Vec<Vec<f64>>| -> Result<()> {
            if rows.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: rows.len(),
                });
            }
            if let Some(bad) = rows.iter().find(|r| r.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: bad.len(),
                });
            }
            Ok(())
        };
        check(&self.re)?;
        if let Some(im) = &self.im {
            check(im)?;
        }
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
                        Complex64::new(self.re[i][j], im)
                    })
                    .collect()
            })
            .collect();
        ComplexMatrix::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &Element, b: &Element) -> f64 {
        a.blocks()
            .iter()
            .zip(b.blocks())
            .map(|(x, y)| (x - y).max_abs())
            .fold(0.0, f64::max)
    }

    fn dense(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn structure_validation() {
        assert!(BlockStructure::new(vec![]).is_err());
        assert!(BlockStructure::new(vec![2, 0]).is_err());
        let s = BlockStructure::new(vec![1, 2]).unwrap();
        assert_eq!(s.algebra_dim(), 5);
        assert_eq!(s.matrix_dim(), 3);
        assert_eq!(s.to_string(), "(1,2)");
    }

    #[test]
    fn identity_blocks() {
        let s = BlockStructure::new(vec![1, 2]).unwrap();
        let one = Element::identity(&s);
        assert_eq!(one.block(0), &ComplexMatrix::identity(1));
        assert_eq!(one.block(1), &ComplexMatrix::identity(2));
        let x = Element::from_blocks(vec![
            dense(&[&[3.0]]),
            dense(&[&[1.0, 2.0], &[-4.0, 0.5]]),
        ])
        .unwrap();
        assert_eq!(one.mul(&x).unwrap(), x);
        assert_eq!(x.mul(&one).unwrap(), x);
    }

    #[test]
    fn arithmetic() {
        let a = Element::diagonal(&[4.0, 1.0]).unwrap();
        let p = Element::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(a.mul(&p).unwrap(), Element::diagonal(&[4.0, 0.0]).unwrap());
        let zero = a.add(&a.scale(-1.0)).unwrap();
        assert_eq!(zero, Element::zero(a.structure()));

        let x = Element::from_blocks(vec![dense(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 3.0], &[1.0, 0.0, 1.0]])])
            .unwrap();
        let y = Element::from_blocks(vec![ComplexMatrix::from_fn(3, |i, j| {
            Complex64::new(i as f64 - j as f64, (i * j) as f64)
        })])
        .unwrap();
        let lhs = x.mul(&y).unwrap().adjoint();
        let rhs = y.adjoint().mul(&x.adjoint()).unwrap();
        assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn mismatched_structures() {
        let a = Element::diagonal(&[1.0, 2.0]).unwrap();
        let b = Element::block_diagonal(&[&[1.0], &[2.0]]).unwrap();
        assert!(matches!(a.add(&b), Err(Error::StructureMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(Error::StructureMismatch { .. })));
    }

    #[test]
    fn element_powers() {
        let a = Element::diagonal(&[4.0, 1.0]).unwrap();
        assert_eq!(a.power(0.5).unwrap(), Element::diagonal(&[2.0, 1.0]).unwrap());

        let b = Element::block_diagonal(&[&[9.0], &[1.0, 4.0]]).unwrap();
        assert_eq!(
            b.power(0.5).unwrap(),
            Element::block_diagonal(&[&[3.0], &[1.0, 2.0]]).unwrap()
        );

        let c = Element::from_blocks(vec![dense(&[&[2.0, 1.0], &[1.0, 3.0]]), dense(&[&[0.7]])]).unwrap();
        let back = c.power(-1.0).unwrap().mul(&c).unwrap();
        assert!(max_diff(&back, &Element::identity(c.structure())) < 1e-9);
    }

    #[test]
    fn singular_negative_power_fails() {
        let a = Element::block_diagonal(&[&[0.0], &[1.0, 2.0]]).unwrap();
        assert!(matches!(a.power(-0.5), Err(Error::SingularPower { .. })));
        assert!(a.power(0.5).is_ok());
    }

    #[test]
    fn bounds_and_predicates() {
        let a = Element::diagonal(&[4.0, 1.0]).unwrap();
        assert_eq!(a.spectral_bounds().unwrap(), (1.0, 4.0));
        assert!(a.is_invertible());

        let b = Element::block_diagonal(&[&[0.5], &[2.0, 3.0]]).unwrap();
        assert_eq!(b.spectral_bounds().unwrap(), (0.5, 3.0));

        let s = Element::diagonal(&[2.0, 0.0]).unwrap();
        assert_eq!(s.spectral_bounds().unwrap(), (0.0, 2.0));
        assert!(s.is_positive());
        assert!(!s.is_invertible());

        let indefinite = Element::diagonal(&[1.0, -1.0]).unwrap();
        assert!(indefinite.is_hermitian());
        assert!(!indefinite.is_positive());
        assert!(matches!(indefinite.spectral_bounds(), Err(Error::NotPositive { .. })));

        let skew = Element::from_blocks(vec![dense(&[&[0.0, 1.0], &[-1.0, 0.0]])]).unwrap();
        assert!(!skew.is_hermitian());
        assert!(!skew.is_positive());
        assert!(!skew.is_projection());
    }

    #[test]
    fn rank_tolerance_is_scale_free() {
        let a = Element::diagonal(&[1.0, 1e-9]).unwrap();
        assert!(!a.is_invertible());
        assert!(!a.scale(1e6).is_invertible());
        let p = a.range_projection(RangeMethod::Spectral).unwrap();
        let q = a.scale(1e6).range_projection(RangeMethod::Spectral).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn range_projection_is_projection() {
        let a = Element::from_blocks(vec![dense(&[&[1.0, 1.0], &[1.0, 1.0]]), dense(&[&[0.0]])]).unwrap();
        let p = a.range_projection(RangeMethod::Spectral).unwrap();
        assert!(p.is_projection());
        assert!(!a.is_projection());
        assert!(Element::zero(a.structure()).range_projection(RangeMethod::Spectral).unwrap().is_projection());
    }

    #[test]
    fn sandwich_bounds() {
        let a = Element::from_blocks(vec![dense(&[&[2.0, 1.0], &[1.0, 3.0]]), dense(&[&[0.7]])]).unwrap();
        let (lo, hi) = a.spectral_bounds().unwrap();
        let one = Element::identity(a.structure());
        assert!(a.sub(&one.scale(lo)).unwrap().is_positive());
        assert!(one.scale(hi).sub(&a).unwrap().is_positive());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"blocks": [{"dim": 2, "re": [[4, 0], [0, 1]]},
                                 {"dim": 1, "re": [[2]], "im": [[0]]}]}"#;
        let a = Element::from_json_str(text).unwrap();
        assert_eq!(a, Element::block_diagonal(&[&[4.0, 1.0], &[2.0]]).unwrap());
        let again = Element::from_json_str(&a.to_json_string()).unwrap();
        assert_eq!(a, again);

        let complex = Element::from_blocks(vec![ComplexMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(0.0, -2.0), Complex64::new(5.0, 0.0)],
        ])
        .unwrap()])
        .unwrap();
        assert_eq!(Element::from_json_str(&complex.to_json_string()).unwrap(), complex);
    }

    #[test]
    fn json_rejects_bad_shapes() {
        let ragged = r#"{"blocks": [{"dim": 2, "re": [[1, 0], [0]]}]}"#;
        assert!(matches!(Element::from_json_str(ragged), Err(Error::DimensionMismatch { .. })));
        let wrong_dim = r#"{"blocks": [{"dim": 3, "re": [[1, 0], [0, 1]]}]}"#;
        assert!(Element::from_json_str(wrong_dim).is_err());
        let empty = r#"{"blocks": []}"#;
        assert!(matches!(Element::from_json_str(empty), Err(Error::BadStructure(_))));
        let broken = "{\"blocks\": [\n  {\"dim\": 1, \"re\": [[1]]\n";
        let err = Element::from_json_str(broken).unwrap_err();
        assert!(err.to_string().contains("line"));
    }

    #[test]
    fn cache_is_shared_across_threads() {
        let a = Element::from_blocks(vec![dense(&[&[2.0, 1.0], &[1.0, 3.0]])]).unwrap();
        let results: Vec<(f64, f64)> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4).map(|_| s.spawn(|| a.spectral_bounds().unwrap())).collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }
}
