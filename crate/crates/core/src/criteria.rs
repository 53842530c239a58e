//! Separability checks.
//!
//! Every check produces a [`CriterionReport`] holding the criterion value
//! (a trace norm, or the negated smallest partial-transpose eigenvalue for
//! PPT), the bound a separable state must respect, and the margin between
//! them. A margin above [`DETECTION_TOL`] certifies entanglement.
//!
//! Subsystem and mode indices are 0-based throughout this module.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bloch::{bipartite_decomposition, generalized_tensor, BlochDecomposition, CorrelationTensor};
use crate::error::{contract, Error, Result};
use crate::numerics::{complex_trace_norm, hermitian_eigenvalues, trace_norm, RealMatrix};
use crate::states::{partial_transpose, realign, DensityMatrix};

/// Absolute margin a value must exceed its bound by to count as a detection.
pub const DETECTION_TOL: f64 = 1e-9;

/// Tolerance on `α√(d1(d1-1)) = β√(d2(d2-1))`.
pub const PROPOSITION1_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionId {
    /// Bordered correlation matrix, free `(α, β, m)`.
    Thm1,
    /// Bordered correlation tensor, free `(m, α_1..α_N)` and partition.
    Thm2,
    /// Bare correlation matrix: `thm1` with `α = β = 0`, `m = 0`.
    Vb,
    /// `thm1` with `α = β = m = 1`.
    Lb,
    /// Bare correlation tensor over every bipartition of the modes.
    Vm,
    /// Bare correlation tensor over single-mode matricizations only.
    Hm,
    /// `thm2` with all `α = 1`, `m = 1`.
    Lm,
    Ppt,
    Ccnr,
}

impl CriterionId {
    pub const ALL: [CriterionId; 9] = [
        CriterionId::Thm1,
        CriterionId::Thm2,
        CriterionId::Vb,
        CriterionId::Lb,
        CriterionId::Vm,
        CriterionId::Hm,
        CriterionId::Lm,
        CriterionId::Ppt,
        CriterionId::Ccnr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionId::Thm1 => "thm1",
            CriterionId::Thm2 => "thm2",
            CriterionId::Vb => "vb",
            CriterionId::Lb => "lb",
            CriterionId::Vm => "vm",
            CriterionId::Hm => "hm",
            CriterionId::Lm => "lm",
            CriterionId::Ppt => "ppt",
            CriterionId::Ccnr => "ccnr",
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Contract(format!("unknown criterion {s:?}")))
    }
}

/// Criterion identity plus whichever parameters it uses.
///
/// Multipartite presets leave `alphas` unset; they are filled in from the
/// number of subsystems when the check runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionParams {
    pub criterion: CriterionId,
    #[serde(default)]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    /// Modes in `A` for a single-partition multipartite check; `None` means
    /// take the best partition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    /// Transposed subsystem for PPT.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsystem: Option<usize>,
}

impl CriterionParams {
    fn bare(criterion: CriterionId) -> Self {
        Self { criterion, m: 0, alpha: None, beta: None, alphas: None, partition: None, subsystem: None }
    }

    pub fn thm1(alpha: f64, beta: f64, m: usize) -> Self {
        Self { alpha: Some(alpha), beta: Some(beta), m, ..Self::bare(CriterionId::Thm1) }
    }

    /// Best partition.
    pub fn thm2(m: usize, alphas: Vec<f64>) -> Self {
        Self { m, alphas: Some(alphas), ..Self::bare(CriterionId::Thm2) }
    }

    pub fn thm2_at(m: usize, alphas: Vec<f64>, partition: Vec<usize>) -> Self {
        Self { partition: Some(partition), ..Self::thm2(m, alphas) }
    }

    pub fn vb() -> Self {
        Self { alpha: Some(0.0), beta: Some(0.0), ..Self::bare(CriterionId::Vb) }
    }

    pub fn lb() -> Self {
        Self { alpha: Some(1.0), beta: Some(1.0), m: 1, ..Self::bare(CriterionId::Lb) }
    }

    pub fn vm() -> Self {
        Self::bare(CriterionId::Vm)
    }

    pub fn hm() -> Self {
        Self::bare(CriterionId::Hm)
    }

    pub fn lm() -> Self {
        Self { m: 1, ..Self::bare(CriterionId::Lm) }
    }

    pub fn ppt(subsystem: usize) -> Self {
        Self { subsystem: Some(subsystem), ..Self::bare(CriterionId::Ppt) }
    }

    pub fn ccnr() -> Self {
        Self::bare(CriterionId::Ccnr)
    }

    pub fn with_partition(mut self, partition: Vec<usize>) -> Self {
        self.partition = Some(partition);
        self
    }

    /// Preset parameters for `id`, with `thm1`/`thm2` defaults of zero weights and no border.
    pub fn preset(id: CriterionId) -> Self {
        match id {
            CriterionId::Thm1 => Self::thm1(0.0, 0.0, 0),
            CriterionId::Thm2 => Self::bare(CriterionId::Thm2),
            CriterionId::Vb => Self::vb(),
            CriterionId::Lb => Self::lb(),
            CriterionId::Vm => Self::vm(),
            CriterionId::Hm => Self::hm(),
            CriterionId::Lm => Self::lm(),
            CriterionId::Ppt => Self::ppt(1),
            CriterionId::Ccnr => Self::ccnr(),
        }
    }

    /// Multipartite weights for `n` subsystems.
    fn resolved_alphas(&self, n: usize) -> Result<Vec<f64>> {
        let alphas = match (self.criterion, &self.alphas) {
            (CriterionId::Vm | CriterionId::Hm, _) => vec![0.0; n],
            (CriterionId::Lm, _) => vec![1.0; n],
            (_, Some(a)) => a.clone(),
            (_, None) => vec![0.0; n],
        };
        if alphas.len() != n {
            return contract(format!("{} alphas given for {n} subsystems", alphas.len()));
        }
        Ok(alphas)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub params: CriterionParams,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub detected: bool,
}

impl CriterionReport {
    pub fn new(params: CriterionParams, value: f64, bound: f64) -> Self {
        let margin = value - bound;
        Self { params, value, bound, margin, detected: margin > DETECTION_TOL }
    }
}

/// Serialized shape of a report. Numbers carry 12 significant digits;
/// `partition` and `subsystem` are 1-based here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub criterion: CriterionId,
    pub params: ParamsJson,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub detected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsystem: Option<usize>,
}

/// Rounds to 12 significant digits.
pub fn round_sig12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

impl From<&CriterionParams> for ParamsJson {
    fn from(p: &CriterionParams) -> Self {
        Self {
            m: p.m,
            alpha: p.alpha,
            beta: p.beta,
            alphas: p.alphas.clone(),
            partition: p.partition.as_ref().map(|modes| modes.iter().map(|k| k + 1).collect()),
            subsystem: p.subsystem.map(|k| k + 1),
        }
    }
}

/// Writes params in the report shape: `criterion` plus the 1-based [`ParamsJson`] fields.
pub fn serialize_params<S: serde::Serializer>(p: &CriterionParams, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Tagged {
        criterion: CriterionId,
        #[serde(flatten)]
        params: ParamsJson,
    }
    Tagged { criterion: p.criterion, params: p.into() }.serialize(serializer)
}

impl From<&CriterionReport> for ReportJson {
    fn from(r: &CriterionReport) -> Self {
        let p = &r.params;
        Self {
            criterion: p.criterion,
            params: p.into(),
            value: round_sig12(r.value),
            bound: round_sig12(r.bound),
            margin: round_sig12(r.margin),
            detected: r.detected,
        }
    }
}

impl TryFrom<ReportJson> for CriterionReport {
    type Error = Error;

    fn try_from(j: ReportJson) -> Result<Self> {
        let zero_based = |k: usize| {
            k.checked_sub(1).ok_or_else(|| Error::Contract("report indices are 1-based".into()))
        };
        let p = j.params;
        let partition = match p.partition {
            Some(modes) => Some(modes.into_iter().map(zero_based).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        Ok(Self {
            params: CriterionParams {
                criterion: j.criterion,
                m: p.m,
                alpha: p.alpha,
                beta: p.beta,
                alphas: p.alphas,
                partition,
                subsystem: p.subsystem.map(zero_based).transpose()?,
            },
            value: j.value,
            bound: j.bound,
            margin: j.margin,
            detected: j.detected,
        })
    }
}

impl Serialize for CriterionReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CriterionReport {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = ReportJson::deserialize(deserializer)?;
        CriterionReport::try_from(json).map_err(serde::de::Error::custom)
    }
}

fn check_weight(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        contract(format!("{name} must be finite and nonnegative, got {v}"))
    }
}

/// `m` copies of `x` as columns.
fn repeat_columns(x: &DVector<f64>, m: usize) -> RealMatrix {
    RealMatrix::from_fn(x.len(), m, |i, _| x[i])
}

/// `[[αβ E_{m×m}, β ω_m(s)ᵀ], [α ω_m(r), T]]`; `m = 0` gives `T`.
pub fn build_s_matrix(dec: &BlochDecomposition, alpha: f64, beta: f64, m: usize) -> RealMatrix {
    let (n1, n2) = dec.t.shape();
    let mut s = RealMatrix::zeros(m + n1, m + n2);
    s.view_mut((0, 0), (m, m)).fill(alpha * beta);
    s.view_mut((0, m), (m, n2)).copy_from(&(repeat_columns(&dec.s, m).transpose() * beta));
    s.view_mut((m, 0), (n1, m)).copy_from(&(repeat_columns(&dec.r, m) * alpha));
    s.view_mut((m, m), (n1, n2)).copy_from(&dec.t);
    s
}

/// `½ √((2mβ² + d1² - d1)(2mα² + d2² - d2))`.
pub fn theorem1_bound(d1: usize, d2: usize, alpha: f64, beta: f64, m: usize) -> f64 {
    let (d1, d2, m) = (d1 as f64, d2 as f64, m as f64);
    0.5 * ((2.0 * m * beta * beta + d1 * d1 - d1) * (2.0 * m * alpha * alpha + d2 * d2 - d2)).sqrt()
}

fn bipartite_report(rho: &DensityMatrix, params: CriterionParams) -> Result<CriterionReport> {
    let alpha = params.alpha.unwrap_or(0.0);
    let beta = params.beta.unwrap_or(0.0);
    check_weight("alpha", alpha)?;
    check_weight("beta", beta)?;
    let dec = bipartite_decomposition(rho)?;
    let value = trace_norm(&build_s_matrix(&dec, alpha, beta, params.m))?;
    let bound = theorem1_bound(dec.d1, dec.d2, alpha, beta, params.m);
    Ok(CriterionReport::new(params, value, bound))
}

pub fn theorem1_check(rho: &DensityMatrix, alpha: f64, beta: f64, m: usize) -> Result<CriterionReport> {
    bipartite_report(rho, CriterionParams::thm1(alpha, beta, m))
}

pub fn proposition1_condition(alpha: f64, beta: f64, d1: usize, d2: usize) -> bool {
    let lhs = alpha * ((d1 * (d1 - 1)) as f64).sqrt();
    let rhs = beta * ((d2 * (d2 - 1)) as f64).sqrt();
    (lhs - rhs).abs() <= PROPOSITION1_TOL
}

fn check_partition(order: usize, modes: &[usize]) -> Result<()> {
    if modes.is_empty() || modes.len() >= order {
        return contract(format!("partition {modes:?} must be a nonempty proper subset of {order} modes"));
    }
    if let Some(&bad) = modes.iter().find(|&&k| k >= order) {
        return contract(format!("mode {bad} out of range for {order} modes"));
    }
    if modes.windows(2).any(|w| w[0] >= w[1]) {
        return contract(format!("partition {modes:?} must be strictly ascending"));
    }
    Ok(())
}

/// `A|Ā` matricization: rows run over the modes in `modes` and columns over
/// the rest, both in ascending mode order with the leftmost mode slowest.
pub fn matricize(w: &CorrelationTensor, modes: &[usize]) -> Result<RealMatrix> {
    let order = w.order();
    check_partition(order, modes)?;
    let shape = w.shape();
    let rest: Vec<usize> = (0..order).filter(|k| !modes.contains(k)).collect();
    let rows: usize = modes.iter().map(|&k| shape[k]).product();
    let cols: usize = rest.iter().map(|&k| shape[k]).product();

    let mut index = vec![0usize; order];
    let mut out = RealMatrix::zeros(rows, cols);
    for row in 0..rows {
        unravel(row, modes, shape, &mut index);
        for col in 0..cols {
            unravel(col, &rest, shape, &mut index);
            out[(row, col)] = w.get(&index);
        }
    }
    Ok(out)
}

/// Writes the digits of `flat` (last listed mode fastest) into `index`.
fn unravel(mut flat: usize, modes: &[usize], shape: &[usize], index: &mut [usize]) {
    for &k in modes.iter().rev() {
        index[k] = flat % shape[k];
        flat /= shape[k];
    }
}

/// `Π_k √((2mα_k² + d_k² - d_k)/2)`.
pub fn theorem2_bound(dims: &[usize], m: usize, alphas: &[f64]) -> f64 {
    dims.iter()
        .zip(alphas)
        .map(|(&d, &a)| {
            let d = d as f64;
            ((2.0 * m as f64 * a * a + d * d - d) / 2.0).sqrt()
        })
        .product()
}

/// One representative of every bipartition `{A, Ā}`: the smaller side, and
/// on ties the side holding mode 0. Sorted by size, then lexicographically.
pub fn canonical_partitions(order: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << order) - 1)
        .map(|mask| (0..order).filter(|&k| mask & (1 << k) != 0).collect::<Vec<_>>())
        .filter(|a| 2 * a.len() < order || (2 * a.len() == order && a[0] == 0))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Single-mode matricizations, deduplicated under complement.
pub fn single_mode_partitions(order: usize) -> Vec<Vec<usize>> {
    let n = if order == 2 { 1 } else { order };
    (0..n).map(|k| vec![k]).collect()
}

fn multipartite_value(w: &CorrelationTensor, modes: &[usize]) -> Result<f64> {
    trace_norm(&matricize(w, modes)?)
}

fn multipartite_report(rho: &DensityMatrix, params: CriterionParams) -> Result<CriterionReport> {
    let n = rho.num_subsystems();
    if n < 2 {
        return contract("multipartite criteria need at least two subsystems");
    }
    let alphas = params.resolved_alphas(n)?;
    for &a in &alphas {
        check_weight("alpha", a)?;
    }
    let w = generalized_tensor(rho, params.m, &alphas)?;
    let bound = theorem2_bound(rho.dims(), params.m, &alphas);
    let mut params = params;
    params.alphas = Some(alphas);

    if let Some(modes) = &params.partition {
        let value = multipartite_value(&w, modes)?;
        return Ok(CriterionReport::new(params, value, bound));
    }
    let candidates = match params.criterion {
        CriterionId::Hm => single_mode_partitions(n),
        _ => canonical_partitions(n),
    };
    let mut best: Option<(Vec<usize>, f64)> = None;
    for modes in candidates {
        let value = multipartite_value(&w, &modes)?;
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((modes, value));
        }
    }
    let (modes, value) = best.expect("at least one partition for n >= 2");
    params.partition = Some(modes);
    Ok(CriterionReport::new(params, value, bound))
}

/// Multipartite check at the single partition `modes` (0-based, ascending).
pub fn theorem2_check(rho: &DensityMatrix, m: usize, alphas: &[f64], modes: &[usize]) -> Result<CriterionReport> {
    multipartite_report(rho, CriterionParams::thm2_at(m, alphas.to_vec(), modes.to_vec()))
}

/// Multipartite check maximized over all bipartitions; the report records the
/// winning partition.
pub fn theorem2_best(rho: &DensityMatrix, m: usize, alphas: &[f64]) -> Result<CriterionReport> {
    multipartite_report(rho, CriterionParams::thm2(m, alphas.to_vec()))
}

/// Value is the negated smallest eigenvalue of the partial transpose; bound 0.
pub fn ppt_check(rho: &DensityMatrix, subsystem: usize) -> Result<CriterionReport> {
    let pt = partial_transpose(rho, subsystem)?;
    let min = hermitian_eigenvalues(&pt)?.first().copied().unwrap_or(0.0);
    Ok(CriterionReport::new(CriterionParams::ppt(subsystem), -min, 0.0))
}

/// Value is the trace norm of the realigned matrix; bound 1.
pub fn ccnr_check(rho: &DensityMatrix) -> Result<CriterionReport> {
    let value = complex_trace_norm(&realign(rho)?)?;
    Ok(CriterionReport::new(CriterionParams::ccnr(), value, 1.0))
}

/// Runs the criterion named in `params`.
pub fn evaluate(rho: &DensityMatrix, params: &CriterionParams) -> Result<CriterionReport> {
    match params.criterion {
        CriterionId::Thm1 | CriterionId::Vb | CriterionId::Lb => {
            let params = match params.criterion {
                CriterionId::Vb => CriterionParams::vb(),
                CriterionId::Lb => CriterionParams::lb(),
                _ => params.clone(),
            };
            bipartite_report(rho, params)
        }
        CriterionId::Thm2 | CriterionId::Vm | CriterionId::Hm | CriterionId::Lm => {
            let mut pinned = match params.criterion {
                CriterionId::Vm => CriterionParams::vm(),
                CriterionId::Hm => CriterionParams::hm(),
                CriterionId::Lm => CriterionParams::lm(),
                _ => params.clone(),
            };
            pinned.partition.clone_from(&params.partition);
            multipartite_report(rho, pinned)
        }
        CriterionId::Ppt => ppt_check(rho, params.subsystem.unwrap_or(1)),
        CriterionId::Ccnr => ccnr_check(rho),
    }
}
