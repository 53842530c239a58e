//! Detection thresholds over one-parameter state families.
//!
//! A family mixes an entangled state with a background state,
//! `ρ(x) = x·ρ_ent + (1 - x)·ρ_bg`. The threshold of a criterion is the
//! smallest `x` at which it reports detection. The search scans a uniform
//! grid for the first detecting point and bisects the bracket below it; the
//! margin is never assumed monotone, so extra sign changes on the grid are
//! flagged rather than ignored.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{evaluate, CriterionParams};
use crate::error::{contract, Result};
use crate::states::{
    bell_pair_embedded, density_from_pure, ghz_perturbed, horodecki_2x4, maximally_mixed, mix, DensityMatrix,
};

pub const DEFAULT_SCAN_POINTS: usize = 200;
pub const DEFAULT_TOL_X: f64 = 1e-5;

/// Perturbation strengths of the three-qubit table.
pub const TABLE1_EPSILONS: [f64; 4] = [0.0, 1e-5, 1e-1, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateFamily {
    /// `(1 - x) I_8/8 + x |φ_ε><φ_ε|` with `|φ_ε> ∝ |000> + ε|110> + |111>`.
    GhzNoise { epsilon: f64 },
    /// `x |ξ><ξ| + (1 - x) ρ_b` in `C² ⊗ C⁴`, with `ρ_b` the bound entangled
    /// 2⊗4 state and `|ξ>` the Bell vector on the first two levels.
    BoundEntangledBell { b: f64 },
}

impl StateFamily {
    pub fn name(&self) -> &'static str {
        match self {
            StateFamily::GhzNoise { .. } => "ghz",
            StateFamily::BoundEntangledBell { .. } => "horodecki",
        }
    }

    /// Name and value of the fixed side parameter.
    pub fn side_parameter(&self) -> (&'static str, f64) {
        match *self {
            StateFamily::GhzNoise { epsilon } => ("epsilon", epsilon),
            StateFamily::BoundEntangledBell { b } => ("b", b),
        }
    }

    /// `(entangled, background)`.
    pub fn endpoints(&self) -> Result<(DensityMatrix, DensityMatrix)> {
        match *self {
            StateFamily::GhzNoise { epsilon } => {
                Ok((density_from_pure(&ghz_perturbed(epsilon)), maximally_mixed(&[2, 2, 2])?))
            }
            StateFamily::BoundEntangledBell { b } => {
                Ok((density_from_pure(&bell_pair_embedded(4)?), horodecki_2x4(b)?))
            }
        }
    }

    pub fn at(&self, x: f64) -> Result<DensityMatrix> {
        let (ent, bg) = self.endpoints()?;
        mix(x, &ent, &bg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSearch {
    pub scan_points: usize,
    pub tol_x: f64,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        Self { scan_points: DEFAULT_SCAN_POINTS, tol_x: DEFAULT_TOL_X }
    }
}

impl ThresholdSearch {
    pub fn with_tol(tol_x: f64) -> Self {
        Self { tol_x, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub family: StateFamily,
    #[serde(serialize_with = "crate::criteria::serialize_params")]
    pub params: CriterionParams,
    /// Midpoint of the final bracket; `None` if no scanned point detects.
    pub x_star: Option<f64>,
    /// Half-width of the final bracket.
    pub bracket: f64,
    /// Largest scanned/bisected `x` known not to detect (`None` if `x = 0` detects).
    pub undetected_at: Option<f64>,
    /// Smallest `x` known to detect.
    pub detected_at: Option<f64>,
    /// More than one detection/non-detection switch on the scan grid.
    pub multi_crossing: bool,
}

impl ThresholdResult {
    pub fn never_detects(&self) -> bool {
        self.x_star.is_none()
    }

    /// Threshold with non-detection mapped to `+inf`, for ordering comparisons.
    pub fn x_or_inf(&self) -> f64 {
        self.x_star.unwrap_or(f64::INFINITY)
    }

    pub fn label(&self) -> &'static str {
        self.params.criterion.name()
    }
}

fn uniform_grid(points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points).map(|i| i as f64 / last).collect()
}

/// Margins on a uniform grid of `grid` points over `[0, 1]`.
pub fn margin_curve(family: &StateFamily, params: &CriterionParams, grid: usize) -> Result<Vec<(f64, f64)>> {
    if grid < 2 {
        return contract(format!("margin curve needs at least 2 grid points, got {grid}"));
    }
    let (ent, bg) = family.endpoints()?;
    uniform_grid(grid)
        .into_iter()
        .map(|x| Ok((x, evaluate(&mix(x, &ent, &bg)?, params)?.margin)))
        .collect()
}

pub fn detection_threshold(
    family: &StateFamily,
    params: &CriterionParams,
    search: ThresholdSearch,
) -> Result<ThresholdResult> {
    if search.tol_x.is_nan() || search.tol_x <= 0.0 {
        return contract(format!("tol_x must be positive, got {}", search.tol_x));
    }
    if search.scan_points < 2 {
        return contract(format!("scan needs at least 2 points, got {}", search.scan_points));
    }
    let (ent, bg) = family.endpoints()?;
    let detects = |x: f64| -> Result<bool> { Ok(evaluate(&mix(x, &ent, &bg)?, params)?.detected) };

    let grid = uniform_grid(search.scan_points);
    let flags = grid.iter().map(|&x| detects(x)).collect::<Result<Vec<bool>>>()?;
    let crossings = flags.windows(2).filter(|w| w[0] != w[1]).count();
    let mut result = ThresholdResult {
        family: *family,
        params: params.clone(),
        x_star: None,
        bracket: 0.0,
        undetected_at: None,
        detected_at: None,
        multi_crossing: crossings > 1,
    };

    let Some(first) = flags.iter().position(|&f| f) else {
        result.undetected_at = grid.last().copied();
        return Ok(result);
    };
    if first == 0 {
        result.x_star = Some(0.0);
        result.detected_at = Some(0.0);
        return Ok(result);
    }

    let (mut lo, mut hi) = (grid[first - 1], grid[first]);
    while hi - lo > search.tol_x {
        let mid = 0.5 * (lo + hi);
        if detects(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    result.x_star = Some(0.5 * (lo + hi));
    result.bracket = 0.5 * (hi - lo);
    result.undetected_at = Some(lo);
    result.detected_at = Some(hi);
    Ok(result)
}

/// The twelve thresholds of the three-qubit table, row-major over
/// [`TABLE1_EPSILONS`] with columns `vm`, `lm`, `thm2(m = 1, α = 0.1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub cells: Vec<ThresholdResult>,
}

impl Table1 {
    pub const COLUMNS: [&'static str; 3] = ["vm", "lm", "thm2"];

    pub fn cell(&self, row: usize, col: usize) -> &ThresholdResult {
        &self.cells[row * Self::COLUMNS.len() + col]
    }

    pub fn rows(&self) -> usize {
        self.cells.len() / Self::COLUMNS.len()
    }
}

pub fn table1_params() -> [CriterionParams; 3] {
    [CriterionParams::vm(), CriterionParams::lm(), CriterionParams::thm2(1, vec![0.1; 3])]
}

pub fn table1_reproduce(search: ThresholdSearch) -> Result<Table1> {
    let jobs: Vec<(StateFamily, CriterionParams)> = TABLE1_EPSILONS
        .iter()
        .flat_map(|&epsilon| table1_params().map(|p| (StateFamily::GhzNoise { epsilon }, p)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|(family, params)| detection_threshold(family, params, search))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1 { cells })
}

/// `α = √(2/(d1(d1-1)))`, `β = √(2/(d2(d2-1)))`.
pub fn unit_border_weights(d1: usize, d2: usize) -> (f64, f64) {
    let w = |d: usize| (2.0 / (d * (d - 1)) as f64).sqrt();
    (w(d1), w(d2))
}

pub fn bipartite_example_params() -> [CriterionParams; 3] {
    let (alpha, beta) = unit_border_weights(2, 4);
    [CriterionParams::thm1(alpha, beta, 1), CriterionParams::vb(), CriterionParams::lb()]
}

/// Thresholds of `thm1` (unit border weights, `m = 1`), `vb` and `lb` on the
/// Bell/bound-entangled mixture at side parameter `b`.
pub fn bipartite_example_thresholds(b: f64, search: ThresholdSearch) -> Result<[ThresholdResult; 3]> {
    let family = StateFamily::BoundEntangledBell { b };
    let [p0, p1, p2] = bipartite_example_params();
    Ok([
        detection_threshold(&family, &p0, search)?,
        detection_threshold(&family, &p1, search)?,
        detection_threshold(&family, &p2, search)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteScanRow {
    pub b: f64,
    /// `thm1`, `vb`, `lb` in that order.
    pub thresholds: [ThresholdResult; 3],
}

impl BipartiteScanRow {
    /// `thm1 ≤ vb` and `thm1 ≤ lb`, with `slack` absorbing bracket width.
    pub fn ordering_holds(&self, slack: f64) -> bool {
        let [t, vb, lb] = &self.thresholds;
        t.x_or_inf() <= vb.x_or_inf() + slack && t.x_or_inf() <= lb.x_or_inf() + slack
    }

    /// Largest absolute deviation from a reference triple.
    pub fn deviation_from(&self, reference: [f64; 3]) -> f64 {
        self.thresholds
            .iter()
            .zip(reference)
            .map(|(t, r)| (t.x_or_inf() - r).abs())
            .fold(0.0, f64::max)
    }
}

/// Thresholds reported for `thm1`, `vb`, `lb` on the Bell/bound-entangled
/// family. The side parameter `b` behind them was not stated.
pub const REPORTED_BIPARTITE_THRESHOLDS: [f64; 3] = [0.2235, 0.2293, 0.2841];

/// `b = 0.05, 0.06, ..., 0.95`.
pub fn default_b_grid() -> Vec<f64> {
    (5..=95).map(|k| k as f64 / 100.0).collect()
}

pub fn bipartite_b_scan(bs: &[f64], search: ThresholdSearch) -> Result<Vec<BipartiteScanRow>> {
    bs.par_iter()
        .map(|&b| Ok(BipartiteScanRow { b, thresholds: bipartite_example_thresholds(b, search)? }))
        .collect()
}

/// Row whose thresholds come closest (max-abs) to `reference`.
pub fn closest_row(rows: &[BipartiteScanRow], reference: [f64; 3]) -> Option<&BipartiteScanRow> {
    rows.iter().min_by(|a, b| a.deviation_from(reference).total_cmp(&b.deviation_from(reference)))
}

fn fmt_threshold(t: &ThresholdResult) -> String {
    match t.x_star {
        Some(x) => format!("{x:.4} <= x <= 1"),
        None => "never".to_string(),
    }
}

/// Aligned text rendering of threshold results grouped by side parameter.
pub fn render_text(results: &[ThresholdResult]) -> String {
    let mut out = String::new();
    let Some(first) = results.first() else {
        return out;
    };
    let (param, _) = first.family.side_parameter();
    let mut labels: Vec<&str> = Vec::new();
    for r in results {
        if !labels.contains(&r.label()) {
            labels.push(r.label());
        }
    }
    let _ = write!(out, "{param:<10}");
    for l in &labels {
        let _ = write!(out, " | {l:<17}");
    }
    out.push('\n');
    let mut sides: Vec<f64> = Vec::new();
    for r in results {
        let v = r.family.side_parameter().1;
        if !sides.iter().any(|s| s.to_bits() == v.to_bits()) {
            sides.push(v);
        }
    }
    for side in sides {
        let _ = write!(out, "{side:<10}");
        for l in &labels {
            let cell = results
                .iter()
                .find(|r| r.family.side_parameter().1.to_bits() == side.to_bits() && r.label() == *l)
                .map(fmt_threshold)
                .unwrap_or_default();
            let _ = write!(out, " | {cell:<17}");
        }
        out.push('\n');
    }
    let flagged: Vec<&ThresholdResult> = results.iter().filter(|r| r.multi_crossing).collect();
    for r in flagged {
        let _ = writeln!(out, "warning: {} at {}={} crosses its bound more than once", r.label(), param, r.family.side_parameter().1);
    }
    out
}

/// CSV with columns `<side parameter>,criterion,x_star,bracket`; empty `x_star` means never detects.
pub fn render_csv(results: &[ThresholdResult]) -> String {
    let param = results.first().map_or("epsilon", |r| r.family.side_parameter().0);
    let mut out = format!("{param},criterion,x_star,bracket\n");
    for r in results {
        let x = r.x_star.map(|x| format!("{x}")).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", r.family.side_parameter().1, r.label(), x, r.bracket);
    }
    out
}
