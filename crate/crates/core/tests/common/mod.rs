#![allow(dead_code)]

use blochsep::states::{mix, random_pure, DensityMatrix};
use blochsep::{Complex64, ComplexMatrix, RealMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Ginibre-distributed full-rank state.
pub fn random_mixed(dims: &[usize], seed: u64) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let mut rng = rng(seed);
    let g = gaussian_complex(d, d, &mut rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    DensityMatrix::new(dims.to_vec(), rho / tr).unwrap()
}

/// Random pure state blended with Ginibre noise; entangled for a good share of seeds.
pub fn random_state(dims: &[usize], seed: u64) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let mut r = rng(seed ^ 0x5eed);
    let psi = random_pure(d, &mut r);
    let pure = DensityMatrix::new(dims.to_vec(), &psi * psi.adjoint()).unwrap();
    let x: f64 = r.random_range(0.0..1.0);
    mix(x, &pure, &random_mixed(dims, seed)).unwrap()
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn permute_rows(m: &RealMatrix, perm: &[usize]) -> RealMatrix {
    RealMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(perm[i], j)])
}

pub fn permute_cols(m: &RealMatrix, perm: &[usize]) -> RealMatrix {
    RealMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, perm[j])])
}
