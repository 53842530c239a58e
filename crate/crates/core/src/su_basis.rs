//! Generalized Gell-Mann matrices.
//!
//! Ordering: the symmetric pair matrices `|j><k| + |k><j|` for `j < k` in
//! lexicographic order, then the antisymmetric ones `-i|j><k| + i|k><j|` in
//! the same order, then the `d - 1` diagonal matrices. For `d = 2` this is
//! `(σx, σy, σz)`; for `d = 3` the diagonal block ends with `λ8`.

use num_complex::Complex64;

use crate::error::{contract, Result};
use crate::numerics::ComplexMatrix;

/// The `d² - 1` traceless Hermitian generators of SU(d), normalized to
/// `Tr(λi λj) = 2 δij`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    dim: usize,
    generators: Vec<ComplexMatrix>,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&ComplexMatrix> {
        self.generators.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexMatrix> {
        self.generators.iter()
    }

    pub fn as_slice(&self) -> &[ComplexMatrix] {
        &self.generators
    }
}

impl<'a> IntoIterator for &'a GeneratorSet {
    type Item = &'a ComplexMatrix;
    type IntoIter = std::slice::Iter<'a, ComplexMatrix>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

pub fn gell_mann_generators(d: usize) -> Result<GeneratorSet> {
    if d < 2 {
        return contract(format!("SU(d) generators need d >= 2, got {d}"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut generators = Vec::with_capacity(d * d - 1);

    for j in 0..d {
        for k in j + 1..d {
            let mut g = ComplexMatrix::from_element(d, d, zero);
            g[(j, k)] = one;
            g[(k, j)] = one;
            generators.push(g);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut g = ComplexMatrix::from_element(d, d, zero);
            g[(j, k)] = -i;
            g[(k, j)] = i;
            generators.push(g);
        }
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut g = ComplexMatrix::from_element(d, d, zero);
        for j in 0..l {
            g[(j, j)] = Complex64::new(scale, 0.0);
        }
        g[(l, l)] = Complex64::new(-scale * l as f64, 0.0);
        generators.push(g);
    }

    Ok(GeneratorSet { dim: d, generators })
}
