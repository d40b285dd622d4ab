//! Hermitian functionals on the algebra, represented through the trace
//! pairing `f(x) = sum_k tr(F_k x_k)` with Hermitian blocks `F_k`.
//!
//! Under this identification the dual norm is the trace norm of `F`, and
//! positivity of `f` is positive semidefiniteness of `F`.

use num_complex::Complex64;

use crate::algebra::{BlockStructure, Element};
use crate::error::{Error, Result};
use crate::spectral::{hermitian_eig, trace_norm, ComplexMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianFunctional {
    structure: BlockStructure,
    rep: Vec<ComplexMatrix>,
}

impl HermitianFunctional {
    /// Checks each block against `tau_herm` and stores its Hermitian part.
    pub fn new(structure: BlockStructure, rep: Vec<ComplexMatrix>) -> Result<Self> {
        let as_element = Element::new(structure, rep)?;
        Self::from_element(&as_element)
    }

    /// Reads the blocks of `x` as a trace-pairing representation.
    pub fn from_element(x: &Element) -> Result<Self> {
        for b in x.blocks() {
            let defect = b.hermitian_defect();
            let tolerance = b.hermitian_tolerance();
            if defect > tolerance {
                return Err(Error::NotHermitian { defect, tolerance });
            }
        }
        Ok(Self {
            structure: x.structure().clone(),
            rep: x.blocks().iter().map(|b| b.hermitian_part()).collect(),
        })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_element(&Element::diagonal(values)?)
    }

    pub fn zero(structure: &BlockStructure) -> Self {
        Self {
            structure: structure.clone(),
            rep: structure.dims().iter().map(|&d| ComplexMatrix::zeros(d)).collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_element(&Element::from_json_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        self.to_element().to_json_string()
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn rep(&self) -> &[ComplexMatrix] {
        &self.rep
    }

    /// The representing matrices as an algebra element.
    pub fn to_element(&self) -> Element {
        Element::new(self.structure.clone(), self.rep.clone())
            .expect("functional blocks always match their structure")
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            structure: self.structure.clone(),
            rep: self.rep.iter().map(|b| b.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.structure.ensure_same(&other.structure)?;
        Ok(Self {
            structure: self.structure.clone(),
            rep: self.rep.iter().zip(&other.rep).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Blocks PSD within `tau_eig`.
    pub fn is_positive(&self) -> bool {
        self.to_element().is_positive()
    }

    /// `f(x)` for Hermitian `x`; see [`pair_complex`] for general `x`.
    pub fn pair(&self, x: &Element) -> Result<f64> {
        Ok(self.pair_complex(x)?.re)
    }

    /// `sum_k tr(F_k x_k)` without dropping the imaginary part, which is
    /// nonzero only for non-Hermitian `x`.
    pub fn pair_complex(&self, x: &Element) -> Result<Complex64> {
        self.structure.ensure_same(x.structure())?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (f, b) in self.rep.iter().zip(x.blocks()) {
            let n = f.dim();
            for i in 0..n {
                for j in 0..n {
                    acc += f[(i, j)] * b[(j, i)];
                }
            }
        }
        Ok(acc)
    }

    /// Dual norm `||f|| = sum_k ||F_k||_1`.
    pub fn norm(&self) -> f64 {
        self.rep.iter().map(trace_norm).sum()
    }

    /// Jordan decomposition `f = f+ - f-` into positive functionals with
    /// orthogonal supports, from the eigenspaces of each block.
    pub fn jordan_decompose(&self) -> (Self, Self) {
        let mut plus = Vec::with_capacity(self.rep.len());
        let mut minus = Vec::with_capacity(self.rep.len());
        for f in &self.rep {
            let eig = hermitian_eig(f).expect("functional blocks are Hermitian");
            plus.push(eig.apply(|l| l.max(0.0)).hermitian_part());
            minus.push(eig.apply(|l| (-l).max(0.0)).hermitian_part());
        }
        let wrap = |rep| Self {
            structure: self.structure.clone(),
            rep,
        };
        (wrap(plus), wrap(minus))
    }

    /// `F_k -> g_k* F_k g_k` blockwise: the functional `x -> f(g x g*)`.
    pub fn compress(&self, g: &Element) -> Result<Self> {
        self.structure.ensure_same(g.structure())?;
        let rep = self
            .rep
            .iter()
            .zip(g.blocks())
            .map(|(f, g)| (&(&g.adjoint() * f) * g).hermitian_part())
            .collect();
        Ok(Self {
            structure: self.structure.clone(),
            rep,
        })
    }

    /// Vector state `x -> <v, x_k v>` on block `block`.
    pub fn rank_one(structure: &BlockStructure, block: usize, v: &[Complex64]) -> Result<Self> {
        if block >= structure.num_blocks() {
            return Err(Error::IndexOutOfRange {
                index: block,
                blocks: structure.num_blocks(),
            });
        }
        let dim = structure.dims()[block];
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitVector { norm });
        }
        let mut f = Self::zero(structure);
        f.rep[block] = ComplexMatrix::outer(v);
        Ok(f)
    }
}

/// Dual norm of `f`.
pub fn functional_norm(f: &HermitianFunctional) -> f64 {
    f.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn single(rows: &[&[f64]]) -> HermitianFunctional {
        HermitianFunctional::from_element(&Element::from_blocks(vec![dense(rows)]).unwrap()).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let f = HermitianFunctional::diagonal(&[1.0, -1.0]).unwrap();
        assert_eq!(f.pair(&Element::diagonal(&[4.0, 1.0]).unwrap()).unwrap(), 3.0);
        assert_eq!(f.pair(&Element::zero(f.structure())).unwrap(), 0.0);

        let half = HermitianFunctional::diagonal(&[0.5, 0.5]).unwrap();
        let x = Element::from_blocks(vec![dense(&[&[0.0, 1.0], &[1.0, 0.0]])]).unwrap();
        assert_eq!(half.pair(&x).unwrap(), 0.0);
    }

    #[test]
    fn pairing_reports_imaginary_part_for_non_hermitian() {
        let f = single(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let x = Element::from_blocks(vec![ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap()])
        .unwrap();
        let z = f.pair_complex(&x).unwrap();
        assert_eq!(z, c(0.0, 1.0));
        assert_eq!(f.pair(&x).unwrap(), 0.0);
    }

    #[test]
    fn pairing_structure_mismatch() {
        let f = HermitianFunctional::diagonal(&[1.0, -1.0]).unwrap();
        let x = Element::block_diagonal(&[&[1.0], &[1.0]]).unwrap();
        assert!(matches!(f.pair(&x), Err(Error::StructureMismatch { .. })));
    }

    #[test]
    fn rejects_non_hermitian_rep() {
        let x = Element::from_blocks(vec![dense(&[&[0.0, 1.0], &[0.0, 0.0]])]).unwrap();
        assert!(matches!(
            HermitianFunctional::from_element(&x),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(HermitianFunctional::diagonal(&[1.0, -1.0]).unwrap().norm(), 2.0);
        assert_eq!(HermitianFunctional::diagonal(&[0.0, 0.0]).unwrap().norm(), 0.0);
    }

    #[test]
    fn jordan_examples() {
        let f = HermitianFunctional::diagonal(&[1.0, -1.0]).unwrap();
        let (p, m) = f.jordan_decompose();
        assert_eq!(p, HermitianFunctional::diagonal(&[1.0, 0.0]).unwrap());
        assert_eq!(m, HermitianFunctional::diagonal(&[0.0, 1.0]).unwrap());

        let pos = single(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let (p, m) = pos.jordan_decompose();
        assert!((&p.rep()[0] - &pos.rep()[0]).max_abs() < 1e-14);
        assert!(m.rep()[0].max_abs() < 1e-14);
    }

    #[test]
    fn jordan_parts_are_orthogonal() {
        let f = HermitianFunctional::from_element(
            &Element::from_blocks(vec![
                dense(&[&[1.0, 2.0, 0.5], &[2.0, -1.0, 0.0], &[0.5, 0.0, 0.3]]),
                dense(&[&[-2.0]]),
            ])
            .unwrap(),
        )
        .unwrap();
        let (p, m) = f.jordan_decompose();
        let one = Element::identity(f.structure());
        assert!(p.is_positive() && m.is_positive());
        assert!((p.pair(&one).unwrap() + m.pair(&one).unwrap() - f.norm()).abs() < 1e-10);
        for (a, b) in p.rep().iter().zip(m.rep()) {
            assert!((a * b).max_abs() < 1e-12);
        }
        let diff = p.sub(&m).unwrap();
        for (a, b) in diff.rep().iter().zip(f.rep()) {
            assert!((a - b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn compress_examples() {
        let f = HermitianFunctional::diagonal(&[1.0, -1.0]).unwrap();
        let g = Element::diagonal(&[2.0, 1.0]).unwrap();
        assert_eq!(f.compress(&g).unwrap(), HermitianFunctional::diagonal(&[4.0, -1.0]).unwrap());
        assert_eq!(f.compress(&Element::identity(f.structure())).unwrap(), f);

        let ones = single(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let corner = Element::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(ones.compress(&corner).unwrap(), HermitianFunctional::diagonal(&[1.0, 0.0]).unwrap());
    }

    #[test]
    fn compress_composes() {
        let f = single(&[&[1.0, 2.0], &[2.0, -3.0]]);
        let g = Element::from_blocks(vec![dense(&[&[1.0, 2.0], &[0.0, 1.0]])]).unwrap();
        let h = Element::from_blocks(vec![ComplexMatrix::from_rows(vec![
            vec![c(0.0, 1.0), c(1.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap()])
        .unwrap();
        let twice = f.compress(&g).unwrap().compress(&h).unwrap();
        let once = f.compress(&g.mul(&h).unwrap()).unwrap();
        assert!((&twice.rep()[0] - &once.rep()[0]).max_abs() < 1e-10);
    }

    #[test]
    fn rank_one_examples() {
        let s = BlockStructure::new(vec![2]).unwrap();
        let e2 = [c(0.0, 0.0), c(1.0, 0.0)];
        let f = HermitianFunctional::rank_one(&s, 0, &e2).unwrap();
        assert_eq!(f, HermitianFunctional::diagonal(&[0.0, 1.0]).unwrap());
        assert_eq!(f.norm(), 1.0);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = HermitianFunctional::rank_one(&s, 0, &[c(h, 0.0), c(h, 0.0)]).unwrap();
        assert!((&f.rep()[0] - &dense(&[&[0.5, 0.5], &[0.5, 0.5]])).max_abs() < 1e-15);

        let a = Element::from_blocks(vec![dense(&[&[2.0, 1.0], &[1.0, 3.0]])]).unwrap();
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let f = HermitianFunctional::rank_one(&s, 0, &v).unwrap();
        // <v, a v> by hand
        let av = [c(1.2, 0.8), c(0.6, 2.4)];
        let inner: Complex64 = v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
        assert!((f.pair(&a).unwrap() - inner.re).abs() < 1e-14);
    }

    #[test]
    fn rank_one_errors() {
        let s = BlockStructure::new(vec![2, 1]).unwrap();
        assert!(matches!(
            HermitianFunctional::rank_one(&s, 2, &[c(1.0, 0.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            HermitianFunctional::rank_one(&s, 0, &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotUnitVector { .. })
        ));
    }
}
