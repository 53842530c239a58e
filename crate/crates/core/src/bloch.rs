//! Bloch coefficients of bipartite states and the bordered correlation
//! tensor of multipartite states.
//!
//! All expectation values `Tr(ρ O1 ⊗ ... ⊗ ON)` are computed by contracting
//! one subsystem at a time: for an operator `O` on the first factor,
//! `M_O[r, c] = Σ_{a,b} ρ[(a,r),(b,c)] O[b,a]` satisfies
//! `Tr(ρ (O ⊗ X)) = Tr(M_O X)`, so the remaining factors recurse on `M_O`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{contract, Error, Result};
use crate::numerics::{identity, kron, ComplexMatrix, RealMatrix};
use crate::states::DensityMatrix;
use crate::su_basis::gell_mann_generators;

/// Largest imaginary residue tolerated on a Bloch coefficient.
pub const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BlochDecomposition {
    pub d1: usize,
    pub d2: usize,
    /// Local Bloch vector of the first subsystem, length `d1² - 1`.
    pub r: DVector<f64>,
    /// Local Bloch vector of the second subsystem, length `d2² - 1`.
    pub s: DVector<f64>,
    /// Correlation matrix, `(d1² - 1) × (d2² - 1)`.
    pub t: RealMatrix,
}

impl BlochDecomposition {
    /// Rebuilds `ρ = (I⊗I + Σ r_i λ_i⊗I + Σ s_j I⊗λ_j + Σ t_ij λ_i⊗λ_j) / (d1 d2)`.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let g1 = gell_mann_generators(self.d1)?;
        let g2 = gell_mann_generators(self.d2)?;
        let (i1, i2) = (identity(self.d1), identity(self.d2));
        let re = |v: f64| Complex64::new(v, 0.0);

        let mut local1 = ComplexMatrix::zeros(self.d1, self.d1);
        for (ri, li) in self.r.iter().zip(&g1) {
            local1 += li * re(*ri);
        }
        let mut local2 = ComplexMatrix::zeros(self.d2, self.d2);
        for (sj, lj) in self.s.iter().zip(&g2) {
            local2 += lj * re(*sj);
        }
        let mut acc = kron(&i1, &i2) + kron(&local1, &i2) + kron(&i1, &local2);
        for (i, li) in g1.iter().enumerate() {
            // Σ_j t_ij λ_j, then one Kronecker product per row of T
            let mut row = ComplexMatrix::zeros(self.d2, self.d2);
            for (j, lj) in g2.iter().enumerate() {
                row += lj * re(self.t[(i, j)]);
            }
            acc += kron(li, &row);
        }
        Ok(acc / re((self.d1 * self.d2) as f64))
    }
}

/// Contracts the first tensor factor (dimension `d`) of `mat` with each operator.
fn contract_first(mat: &ComplexMatrix, d: usize, ops: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let rest = mat.nrows() / d;
    ops.iter()
        .map(|op| {
            ComplexMatrix::from_fn(rest, rest, |r, c| {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..d {
                    for b in 0..d {
                        let o = op[(b, a)];
                        if o.re != 0.0 || o.im != 0.0 {
                            acc += mat[(a * rest + r, b * rest + c)] * o;
                        }
                    }
                }
                acc
            })
        })
        .collect()
}

/// `Tr(ρ ⊗_k ops[k][i_k])` for every multi-index, first subsystem slowest.
fn expectation_table(rho: &ComplexMatrix, dims: &[usize], ops: &[Vec<ComplexMatrix>]) -> Vec<Complex64> {
    let Some((&d, rest_dims)) = dims.split_first() else {
        return vec![rho[(0, 0)]];
    };
    contract_first(rho, d, &ops[0])
        .iter()
        .flat_map(|reduced| expectation_table(reduced, rest_dims, &ops[1..]))
        .collect()
}

fn real_coefficient(z: Complex64, scale: f64) -> Result<f64> {
    let value = z * scale;
    if value.im.abs() > IMAG_TOL {
        return Err(Error::Numerical(format!(
            "Bloch coefficient has imaginary residue {:e}; input is not Hermitian",
            value.im
        )));
    }
    Ok(value.re)
}

/// `[I_d, λ_1, ..., λ_{d²-1}]`.
fn identity_then_generators(d: usize) -> Result<Vec<ComplexMatrix>> {
    let mut ops = vec![identity(d)];
    ops.extend(gell_mann_generators(d)?.iter().cloned());
    Ok(ops)
}

pub fn bipartite_decomposition(rho: &DensityMatrix) -> Result<BlochDecomposition> {
    let [d1, d2] = rho.dims()[..] else {
        return contract(format!("bipartite decomposition needs two subsystems, got dims {:?}", rho.dims()));
    };
    let ops = [identity_then_generators(d1)?, identity_then_generators(d2)?];
    let table = expectation_table(rho.matrix(), &[d1, d2], &ops);
    let cols = d2 * d2;
    let at = |i: usize, j: usize| table[i * cols + j];

    let n1 = d1 * d1 - 1;
    let n2 = d2 * d2 - 1;
    let mut r = DVector::zeros(n1);
    for i in 0..n1 {
        r[i] = real_coefficient(at(i + 1, 0), d1 as f64 / 2.0)?;
    }
    let mut s = DVector::zeros(n2);
    for j in 0..n2 {
        s[j] = real_coefficient(at(0, j + 1), d2 as f64 / 2.0)?;
    }
    let mut t = RealMatrix::zeros(n1, n2);
    let scale = (d1 * d2) as f64 / 4.0;
    for i in 0..n1 {
        for j in 0..n2 {
            t[(i, j)] = real_coefficient(at(i + 1, j + 1), scale)?;
        }
    }
    Ok(BlochDecomposition { d1, d2, r, s, t })
}

/// Operator for (0-based) index `k` of a mode bordered by `m` identity slots:
/// `(2α/d) I_d` for `k < m`, otherwise the generator `λ_{k-m}`.
pub fn delta_operator(d: usize, k: usize, m: usize, alpha: f64) -> Result<ComplexMatrix> {
    let size = d * d + m - 1;
    if k >= size {
        return contract(format!("index {k} out of range for mode of size {size}"));
    }
    if k < m {
        Ok(identity(d) * Complex64::new(2.0 * alpha / d as f64, 0.0))
    } else {
        let gens = gell_mann_generators(d)?;
        Ok(gens.get(k - m).expect("index checked above").clone())
    }
}

/// Real N-way tensor with entries
/// `w[k1..kN] = (d1···dN / 2^N) Tr(ρ δ_{k1} ⊗ ... ⊗ δ_{kN})`, where each mode
/// has `m` border slots followed by the `d² - 1` generators.
///
/// Stored flat with mode 0 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor {
    dims: Vec<usize>,
    m: usize,
    alphas: Vec<f64>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<f64>,
}

impl CorrelationTensor {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn border(&self) -> usize {
        self.m
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    /// Entry at a 0-based multi-index.
    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }
}

pub fn generalized_tensor(rho: &DensityMatrix, m: usize, alphas: &[f64]) -> Result<CorrelationTensor> {
    let dims = rho.dims().to_vec();
    if alphas.len() != dims.len() {
        return contract(format!("{} alphas given for {} subsystems", alphas.len(), dims.len()));
    }
    if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return contract(format!("alphas must be finite and nonnegative, got {a}"));
    }

    // One border operator per mode is enough: the m border slots are identical.
    let compact_ops = dims
        .iter()
        .zip(alphas)
        .map(|(&d, &alpha)| identity_then_generators(d).map(|mut ops| {
            ops[0] *= Complex64::new(2.0 * alpha / d as f64, 0.0);
            ops
        }))
        .collect::<Result<Vec<_>>>()?;
    let table = expectation_table(rho.matrix(), &dims, &compact_ops);
    let prefactor = dims.iter().product::<usize>() as f64 / 2f64.powi(dims.len() as i32);

    let compact_shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let shape: Vec<usize> = dims.iter().map(|d| d * d + m - 1).collect();
    let mut strides = Vec::with_capacity(shape.len());
    let mut stride = 1;
    for &n in &shape {
        strides.push(stride);
        stride *= n;
    }
    let total = stride;

    let mut data = vec![0.0; total];
    let mut index = vec![0usize; shape.len()];
    for slot in data.iter_mut() {
        // compact row-major offset, first mode slowest
        let mut compact = 0;
        for (mode, &k) in index.iter().enumerate() {
            let c = if k < m { 0 } else { k - m + 1 };
            compact = compact * compact_shape[mode] + c;
        }
        *slot = real_coefficient(table[compact], prefactor)?;
        // advance mode 0 fastest
        for (mode, k) in index.iter_mut().enumerate() {
            *k += 1;
            if *k < shape[mode] {
                break;
            }
            *k = 0;
        }
    }

    Ok(CorrelationTensor { dims, m, alphas: alphas.to_vec(), shape, strides, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::trace_of_product;
    use crate::states::{bell_pair, density_from_pure, maximally_mixed, random_separable};
    use approx::assert_abs_diff_eq;

    #[test]
    fn maximally_mixed_has_no_bloch_data() {
        let dec = bipartite_decomposition(&maximally_mixed(&[2, 3]).unwrap()).unwrap();
        assert!(dec.r.iter().chain(dec.s.iter()).chain(dec.t.iter()).all(|v| v.abs() < 1e-15));
        assert_eq!(dec.t.shape(), (3, 8));
    }

    #[test]
    fn bell_correlation_matrix() {
        let rho = density_from_pure(&bell_pair());
        let dec = bipartite_decomposition(&rho).unwrap();
        assert!(dec.r.iter().chain(dec.s.iter()).all(|v| v.abs() < 1e-15));
        // oracle: Tr(ρ σi⊗σj) by explicit Kronecker products
        let g = gell_mann_generators(2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let direct = trace_of_product(rho.matrix(), &kron(g.get(i).unwrap(), g.get(j).unwrap()));
                assert_abs_diff_eq!(dec.t[(i, j)], direct.re, epsilon = 1e-14);
            }
        }
        let want = [1.0, -1.0, 1.0];
        for (i, &diag) in want.iter().enumerate() {
            for j in 0..3 {
                let w = if i == j { diag } else { 0.0 };
                assert_abs_diff_eq!(dec.t[(i, j)], w, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn product_state_correlations_factorize() {
        let rho = random_separable(&[3, 2], 1, 17).unwrap();
        let dec = bipartite_decomposition(&rho).unwrap();
        for i in 0..8 {
            for j in 0..3 {
                assert_abs_diff_eq!(dec.t[(i, j)], dec.r[i] * dec.s[j], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn reconstruction_matches_input() {
        for (seed, dims) in [(1, [2, 2]), (2, [2, 3]), (3, [3, 3]), (4, [2, 4])] {
            let rho = random_separable(&dims, 3, seed).unwrap();
            let back = bipartite_decomposition(&rho).unwrap().reconstruct().unwrap();
            assert!((back - rho.matrix()).iter().all(|z| z.norm() < 1e-10));
        }
    }

    #[test]
    fn rejects_non_bipartite() {
        assert!(bipartite_decomposition(&maximally_mixed(&[2, 2, 2]).unwrap()).is_err());
    }

    #[test]
    fn delta_operator_examples() {
        assert_eq!(delta_operator(2, 0, 1, 1.0).unwrap(), identity(2));
        let g2 = gell_mann_generators(2).unwrap();
        assert_eq!(&delta_operator(2, 1, 1, 1.0).unwrap(), g2.get(0).unwrap());
        let g3 = gell_mann_generators(3).unwrap();
        assert_eq!(&delta_operator(3, 7, 0, 0.0).unwrap(), g3.get(7).unwrap());
        assert!(delta_operator(2, 4, 1, 1.0).is_err());
        assert!(delta_operator(2, 3, 0, 1.0).is_err());
    }

    #[test]
    fn tensor_of_maximally_mixed_is_border_only() {
        let alphas = [0.3, 1.2, 0.7];
        let w = generalized_tensor(&maximally_mixed(&[2, 3, 2]).unwrap(), 1, &alphas).unwrap();
        assert_eq!(w.shape(), &[4, 9, 4]);
        let product: f64 = alphas.iter().product();
        for a in 0..4 {
            for b in 0..9 {
                for c in 0..4 {
                    let want = if a == 0 && b == 0 && c == 0 { product } else { 0.0 };
                    assert_abs_diff_eq!(w.get(&[a, b, c]), want, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn tensor_entries_match_direct_traces() {
        let rho = random_separable(&[2, 2, 2], 3, 4).unwrap();
        let (m, alphas) = (2, [0.4, 0.9, 1.3]);
        let w = generalized_tensor(&rho, m, &alphas).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    let op = kron(
                        &kron(&delta_operator(2, a, m, alphas[0]).unwrap(), &delta_operator(2, b, m, alphas[1]).unwrap()),
                        &delta_operator(2, c, m, alphas[2]).unwrap(),
                    );
                    let direct = trace_of_product(rho.matrix(), &op).re;
                    assert_abs_diff_eq!(w.get(&[a, b, c]), direct, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn unbordered_bipartite_tensor_is_t() {
        let rho = random_separable(&[2, 3], 4, 21).unwrap();
        let dec = bipartite_decomposition(&rho).unwrap();
        let w = generalized_tensor(&rho, 0, &[0.0, 0.0]).unwrap();
        for i in 0..3 {
            for j in 0..8 {
                assert_abs_diff_eq!(w.get(&[i, j]), dec.t[(i, j)], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn mode_zero_is_fastest_in_storage() {
        let w = generalized_tensor(&maximally_mixed(&[2, 2]).unwrap(), 1, &[1.0, 1.0]).unwrap();
        assert_eq!(w.offset(&[1, 0]), 1);
        assert_eq!(w.offset(&[0, 1]), 4);
    }

    #[test]
    fn tensor_rejects_bad_alphas() {
        let rho = maximally_mixed(&[2, 2]).unwrap();
        assert!(generalized_tensor(&rho, 1, &[1.0]).is_err());
        assert!(generalized_tensor(&rho, 1, &[1.0, -0.5]).is_err());
    }
}
