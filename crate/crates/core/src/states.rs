//! Density matrices, the named test states, and the PPT/CCNR transforms.
//!
//! Composite bases are ordered lexicographically with the first subsystem
//! slowest (standard Kronecker order).

use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::numerics::{
    hermitian_eigenvalues, hermiticity_deviation, identity, is_finite_complex, kron, trace, ComplexMatrix,
    HERMITIAN_TOL,
};

pub const TRACE_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = -1e-9;
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` against `dims` and the density-matrix invariants.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let report = validate_matrix(&dims, &matrix);
        if !report.passed {
            return Err(Error::InvalidState(report));
        }
        Ok(Self { dims, matrix })
    }

    // Constructors whose output is valid by construction skip the eigensolver.
    fn from_parts(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.iter().product::<usize>());
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_matrix(&self.dims, &self.matrix)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&StateFile::from(self))?)
    }

    /// Parses the JSON state format and rejects states that fail validation.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        let (dims, matrix) = file.into_parts()?;
        Self::new(dims, matrix)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let (dims, matrix) = StateFile::read(path)?.into_parts()?;
        Self::new(dims, matrix)
    }
}

/// On-disk form: `{"dims": [...], "matrix": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Shape-checks the payload without validating it as a state.
    pub fn into_parts(self) -> Result<(Vec<usize>, ComplexMatrix)> {
        let n = self.matrix.len();
        if let Some(bad) = self.matrix.iter().position(|row| row.len() != n) {
            return contract(format!("row {bad} of a {n}-row matrix has {} entries", self.matrix[bad].len()));
        }
        let entries = self.matrix.iter().flatten().map(|&[re, im]| Complex64::new(re, im));
        let matrix = ComplexMatrix::from_row_iterator(n, n, entries);
        Ok((self.dims, matrix))
    }
}

impl From<&DensityMatrix> for StateFile {
    fn from(rho: &DensityMatrix) -> Self {
        let m = &rho.matrix;
        let matrix = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self { dims: rho.dims.clone(), matrix }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
    /// Set when the input is malformed before any numerics can run.
    pub problem: Option<String>,
}

impl ValidationReport {
    fn malformed(problem: String) -> Self {
        Self {
            hermiticity_deviation: f64::NAN,
            trace_deviation: f64::NAN,
            min_eigenvalue: f64::NAN,
            passed: false,
            problem: Some(problem),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(problem) = &self.problem {
            return write!(f, "{problem}");
        }
        write!(
            f,
            "{} (hermiticity deviation {:e}, trace deviation {:e}, min eigenvalue {:e})",
            if self.passed { "valid" } else { "invalid" },
            self.hermiticity_deviation,
            self.trace_deviation,
            self.min_eigenvalue
        )
    }
}

pub fn validate_matrix(dims: &[usize], matrix: &ComplexMatrix) -> ValidationReport {
    if dims.is_empty() || dims.iter().any(|&d| d < 1) {
        return ValidationReport::malformed(format!("bad subsystem dimensions {dims:?}"));
    }
    let total: usize = dims.iter().product();
    if matrix.nrows() != total || matrix.ncols() != total {
        return ValidationReport::malformed(format!(
            "matrix is {}x{} but dims {dims:?} need {total}x{total}",
            matrix.nrows(),
            matrix.ncols()
        ));
    }
    if !is_finite_complex(matrix) {
        return ValidationReport::malformed("matrix has non-finite entries".into());
    }
    let herm = hermiticity_deviation(matrix);
    let tr = trace(matrix);
    let trace_deviation = (tr - Complex64::new(1.0, 0.0)).norm();
    let hermitian_part = (matrix + matrix.adjoint()).scale(0.5);
    let min_eigenvalue = match hermitian_eigenvalues(&hermitian_part) {
        Ok(ev) => ev.first().copied().unwrap_or(f64::NAN),
        Err(e) => return ValidationReport::malformed(e.to_string()),
    };
    ValidationReport {
        hermiticity_deviation: herm,
        trace_deviation,
        min_eigenvalue,
        passed: herm <= HERMITIAN_TOL && trace_deviation <= TRACE_TOL && min_eigenvalue >= PSD_TOL,
        problem: None,
    }
}

/// Normalized state vector over a composite system.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: DVector<Complex64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || amplitudes.len() != total {
            return contract(format!("{} amplitudes do not fit dims {dims:?}", amplitudes.len()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return contract(format!("state vector has norm {norm}, expected 1"));
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }
}

pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let v = &psi.amplitudes;
    DensityMatrix::from_parts(psi.dims.clone(), v * v.adjoint())
}

pub fn maximally_mixed(dims: &[usize]) -> Result<DensityMatrix> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return contract(format!("maximally mixed state needs every dim >= 2, got {dims:?}"));
    }
    let total: usize = dims.iter().product();
    Ok(DensityMatrix::from_parts(dims.to_vec(), identity(total) / Complex64::new(total as f64, 0.0)))
}

/// `x·a + (1 - x)·b`.
pub fn mix(x: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&x) {
        return contract(format!("mixing weight {x} outside [0, 1]"));
    }
    if a.dims != b.dims {
        return contract(format!("cannot mix states with dims {:?} and {:?}", a.dims, b.dims));
    }
    let m = a.matrix.zip_map(&b.matrix, |p, q| p * x + q * (1.0 - x));
    Ok(DensityMatrix::from_parts(a.dims.clone(), m))
}

/// `(|00> + |11>)/√2`.
pub fn bell_pair() -> PureState {
    bell_pair_embedded(2).expect("qubit Bell pair")
}

/// `(|00> + |11>)/√2` in `C² ⊗ C^d`, occupying the first two levels of the second factor.
pub fn bell_pair_embedded(second_dim: usize) -> Result<PureState> {
    if second_dim < 2 {
        return contract(format!("embedding needs a second factor of dim >= 2, got {second_dim}"));
    }
    let mut amps = DVector::from_element(2 * second_dim, Complex64::new(0.0, 0.0));
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = h;
    amps[second_dim + 1] = h;
    PureState::new(vec![2, second_dim], amps)
}

/// The 2⊗4 bound entangled family, `0 < b < 1`.
pub fn horodecki_2x4(b: f64) -> Result<DensityMatrix> {
    if !(b > 0.0 && b < 1.0) {
        return contract(format!("horodecki parameter b = {b} outside (0, 1)"));
    }
    let mut m = nalgebra::DMatrix::<f64>::zeros(8, 8);
    for i in 0..8 {
        m[(i, i)] = b;
    }
    for (i, j) in [(0, 5), (1, 6), (2, 7)] {
        m[(i, j)] = b;
        m[(j, i)] = b;
    }
    let corner = 0.5 * (1.0 + b);
    let off = 0.5 * (1.0 - b * b).sqrt();
    m[(4, 4)] = corner;
    m[(7, 7)] = corner;
    m[(4, 7)] = off;
    m[(7, 4)] = off;
    let m = m / (7.0 * b + 1.0);
    Ok(DensityMatrix::from_parts(vec![2, 4], m.map(|v| Complex64::new(v, 0.0))))
}

/// `(|000> + ε|110> + |111>)/√(2 + ε²)`.
pub fn ghz_perturbed(epsilon: f64) -> PureState {
    let gamma = (2.0 + epsilon * epsilon).sqrt();
    let mut amps = DVector::from_element(8, Complex64::new(0.0, 0.0));
    amps[0b000] = Complex64::new(1.0 / gamma, 0.0);
    amps[0b110] = Complex64::new(epsilon / gamma, 0.0);
    amps[0b111] = Complex64::new(1.0 / gamma, 0.0);
    PureState { dims: vec![2, 2, 2], amplitudes: amps }
}

/// Haar-random pure state on `C^d`.
pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// `Σ p_i ⊗_j |ψ_ij><ψ_ij|` with Haar-random local pure states and flat-Dirichlet weights.
pub fn random_separable(dims: &[usize], k_terms: usize, seed: u64) -> Result<DensityMatrix> {
    if k_terms == 0 {
        return contract("random separable state needs at least one term");
    }
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return contract(format!("bad subsystem dimensions {dims:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..k_terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total_weight: f64 = raw.iter().sum();
    let dim: usize = dims.iter().product();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for w in raw {
        let mut term = identity(1);
        for &d in dims {
            let psi = random_pure(d, &mut rng);
            term = kron(&term, &(&psi * psi.adjoint()));
        }
        acc += term * Complex64::new(w / total_weight, 0.0);
    }
    Ok(DensityMatrix::from_parts(dims.to_vec(), acc))
}

pub fn validate(rho: &DensityMatrix) -> ValidationReport {
    rho.validate()
}

/// Transposes the tensor factor `subsystem` (0-based), leaving the others alone.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    let n = rho.num_subsystems();
    if subsystem >= n {
        return contract(format!("subsystem {subsystem} out of range for {n} subsystems"));
    }
    let before: usize = rho.dims[..subsystem].iter().product();
    let d = rho.dims[subsystem];
    let after: usize = rho.dims[subsystem + 1..].iter().product();
    let split = |idx: usize| (idx / (d * after), (idx / after) % d, idx % after);
    let join = |a: usize, k: usize, c: usize| (a * d + k) * after + c;
    let dim = rho.dim();
    debug_assert_eq!(dim, before * d * after);
    let src = &rho.matrix;
    Ok(ComplexMatrix::from_fn(dim, dim, |row, col| {
        let (a, i, c) = split(row);
        let (a2, j, c2) = split(col);
        src[(join(a, j, c), join(a2, i, c2))]
    }))
}

/// Realignment `R[(i,j),(k,l)] = <i|<k| ρ |j>|l>`, shape `d1² × d2²`.
pub fn realign(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let [d1, d2] = rho.dims[..] else {
        return contract(format!("realignment needs exactly two subsystems, got dims {:?}", rho.dims));
    };
    let src = &rho.matrix;
    Ok(ComplexMatrix::from_fn(d1 * d1, d2 * d2, |row, col| {
        let (i, j) = (row / d1, row % d1);
        let (k, l) = (col / d2, col % d2);
        src[(i * d2 + k, j * d2 + l)]
    }))
}
