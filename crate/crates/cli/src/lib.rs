//! Command-line front-end for `blochsep`.
//!
//! Exit status: 0 on success, 2 on usage errors (bad flags, bad state
//! sources, parameters a criterion cannot accept), 1 on invalid states,
//! I/O failures and numerical failures.

pub mod source;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

use blochsep::bloch::bipartite_decomposition;
use blochsep::criteria::{evaluate, CriterionId, CriterionParams, CriterionReport};
use blochsep::detect::{
    bipartite_b_scan, closest_row, default_b_grid, detection_threshold, render_csv, render_text, table1_reproduce,
    BipartiteScanRow, StateFamily, ThresholdResult, ThresholdSearch, DEFAULT_SCAN_POINTS, DEFAULT_TOL_X,
    REPORTED_BIPARTITE_THRESHOLDS,
};
use blochsep::states::{validate_matrix, StateFile, ValidationReport};
use blochsep::Error;

use source::Source;

#[derive(Debug, Parser)]
#[command(name = "blochsep", version, about = "Bloch-representation separability criteria")]
pub struct Cli {
    /// Seed for randomized state sources.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the bipartite Bloch decomposition (r, s, T).
    Decompose {
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate one criterion on a state.
    Check {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        criterion: CriterionArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Find the detection threshold of a criterion on a state family.
    Threshold {
        /// `ghz:EPS` or `horodecki:B`.
        #[arg(long)]
        family: String,
        #[command(flatten)]
        criterion: CriterionArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Thresholds of the perturbed-GHZ table (vm, lm, thm2 with m=1, alpha=0.1).
    Table1 {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Thresholds of thm1/vb/lb on the Bell + bound-entangled mixture.
    BipartiteExample {
        /// Single side parameter; omit to scan b = 0.05..0.95.
        #[arg(long)]
        b: Option<f64>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a state against the density-matrix invariants.
    Validate {
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct CriterionArgs {
    #[arg(long, value_parser = parse_criterion)]
    criterion: CriterionId,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Comma-separated per-subsystem weights for thm2.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Border width.
    #[arg(short = 'm', default_value_t = 0)]
    m: usize,
    /// Modes on the row side of the matricization, 1-based, comma-separated.
    #[arg(long, value_delimiter = ',')]
    partition: Option<Vec<usize>>,
    /// Transposed subsystem for ppt, 1-based.
    #[arg(long, default_value_t = 2)]
    subsystem: usize,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Coarse scan points before bisection.
    #[arg(long, default_value_t = DEFAULT_SCAN_POINTS)]
    grid: usize,
    #[arg(long = "tol-x", default_value_t = DEFAULT_TOL_X)]
    tol_x: f64,
}

impl From<&SearchArgs> for ThresholdSearch {
    fn from(a: &SearchArgs) -> Self {
        ThresholdSearch { scan_points: a.grid, tol_x: a.tol_x }
    }
}

fn parse_criterion(s: &str) -> Result<CriterionId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl CriterionArgs {
    fn to_params(&self) -> blochsep::Result<CriterionParams> {
        let partition = match &self.partition {
            None => None,
            Some(modes) => {
                if modes.contains(&0) {
                    return Err(Error::Contract("partition modes are 1-based".into()));
                }
                let mut zero_based: Vec<usize> = modes.iter().map(|k| k - 1).collect();
                zero_based.sort_unstable();
                zero_based.dedup();
                Some(zero_based)
            }
        };
        let mut params = match self.criterion {
            CriterionId::Thm1 => CriterionParams::thm1(self.alpha.unwrap_or(0.0), self.beta.unwrap_or(0.0), self.m),
            CriterionId::Thm2 => CriterionParams { alphas: self.alphas.clone(), m: self.m, ..CriterionParams::preset(CriterionId::Thm2) },
            CriterionId::Ppt => {
                if self.subsystem == 0 {
                    return Err(Error::Contract("subsystem is 1-based".into()));
                }
                CriterionParams::ppt(self.subsystem - 1)
            }
            other => CriterionParams::preset(other),
        };
        if partition.is_some() {
            params.partition = partition;
        }
        Ok(params)
    }
}

fn parse_family(text: &str) -> blochsep::Result<StateFamily> {
    let bad = || Error::Contract(format!("unknown family {text:?}; expected ghz:EPS or horodecki:B"));
    let (name, value) = text.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.parse().map_err(|_| bad())?;
    match name {
        "ghz" => Ok(StateFamily::GhzNoise { epsilon: value }),
        "horodecki" => Ok(StateFamily::BoundEntangledBell { b: value }),
        _ => Err(bad()),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Contract(_) => 2,
        _ => 1,
    }
}

fn fmt_partition(modes: &[usize]) -> String {
    let labels: Vec<String> = modes.iter().map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", labels.join(","))
}

fn report_text(r: &CriterionReport) -> String {
    let p = &r.params;
    let mut params = vec![format!("m={}", p.m)];
    if let Some(a) = p.alpha {
        params.push(format!("alpha={a}"));
    }
    if let Some(b) = p.beta {
        params.push(format!("beta={b}"));
    }
    if let Some(a) = &p.alphas {
        let list: Vec<String> = a.iter().map(|v| v.to_string()).collect();
        params.push(format!("alphas={}", list.join(",")));
    }
    if let Some(modes) = &p.partition {
        params.push(format!("partition={}", fmt_partition(modes)));
    }
    if let Some(k) = p.subsystem {
        params.push(format!("subsystem={}", k + 1));
    }
    format!(
        "criterion: {}\nparams: {}\nvalue: {:.12}\nbound: {:.12}\nmargin: {:.12}\ndetected: {}\n",
        p.criterion,
        params.join(" "),
        r.value,
        r.bound,
        r.margin,
        r.detected
    )
}

fn validation_text(r: &ValidationReport) -> String {
    if let Some(problem) = &r.problem {
        return format!("valid: false\nproblem: {problem}\n");
    }
    format!(
        "valid: {}\nhermiticity_deviation: {:e}\ntrace_deviation: {:e}\nmin_eigenvalue: {:.12e}\n",
        r.passed, r.hermiticity_deviation, r.trace_deviation, r.min_eigenvalue
    )
}

fn scan_text(rows: &[BipartiteScanRow], slack: f64) -> String {
    let mut out = String::from("b      | thm1     | vb       | lb       | ordering\n");
    for row in rows {
        let cell = |t: &ThresholdResult| t.x_star.map_or("never   ".to_string(), |x| format!("{x:.6}"));
        let [t, vb, lb] = &row.thresholds;
        out.push_str(&format!(
            "{:<6} | {} | {} | {} | {}\n",
            row.b,
            cell(t),
            cell(vb),
            cell(lb),
            if row.ordering_holds(slack) { "ok" } else { "VIOLATED" }
        ));
    }
    let all_ok = rows.iter().all(|r| r.ordering_holds(slack));
    out.push_str(&format!("ordering thm1 <= vb, thm1 <= lb on every b: {all_ok}\n"));
    if let Some(best) = closest_row(rows, REPORTED_BIPARTITE_THRESHOLDS) {
        let dev = best.deviation_from(REPORTED_BIPARTITE_THRESHOLDS);
        out.push_str(&format!(
            "closest b to reported ({}, {}, {}): b={} max deviation {:.2e} ({})\n",
            REPORTED_BIPARTITE_THRESHOLDS[0],
            REPORTED_BIPARTITE_THRESHOLDS[1],
            REPORTED_BIPARTITE_THRESHOLDS[2],
            best.b,
            dev,
            if dev <= 2e-3 { "match within 2e-3" } else { "no match within 2e-3" }
        ));
    }
    out
}

fn json<T: serde::Serialize>(value: &T) -> blochsep::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn execute(cli: &Cli, out: &mut dyn Write) -> blochsep::Result<i32> {
    let text = match &cli.command {
        Command::Decompose { state, format } => {
            let rho = Source::parse(state)?.build(cli.seed)?;
            let dec = bipartite_decomposition(&rho)?;
            let rows: Vec<Vec<f64>> = dec.t.row_iter().map(|r| r.iter().copied().collect()).collect();
            match format {
                Format::Json => json(&serde_json::json!({
                    "dims": [dec.d1, dec.d2],
                    "r": dec.r.as_slice(),
                    "s": dec.s.as_slice(),
                    "t": rows,
                }))?,
                _ => {
                    let fmt_vec = |v: &[f64]| v.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(" ");
                    let mut s = format!("dims: {} {}\nr: {}\ns: {}\nT:\n", dec.d1, dec.d2, fmt_vec(dec.r.as_slice()), fmt_vec(dec.s.as_slice()));
                    for row in &rows {
                        s.push_str(&fmt_vec(row));
                        s.push('\n');
                    }
                    s
                }
            }
        }
        Command::Check { state, criterion, format } => {
            let rho = Source::parse(state)?.build(cli.seed)?;
            let report = evaluate(&rho, &criterion.to_params()?)?;
            match format {
                Format::Json => json(&report)?,
                _ => report_text(&report),
            }
        }
        Command::Threshold { family, criterion, search, format } => {
            let family = parse_family(family)?;
            let result = detection_threshold(&family, &criterion.to_params()?, search.into())?;
            match format {
                Format::Json => json(&result)?,
                Format::Csv => render_csv(std::slice::from_ref(&result)),
                Format::Text => render_text(std::slice::from_ref(&result)),
            }
        }
        Command::Table1 { search, format } => {
            let table = table1_reproduce(search.into())?;
            match format {
                Format::Json => json(&table)?,
                Format::Csv => render_csv(&table.cells),
                Format::Text => render_text(&table.cells),
            }
        }
        Command::BipartiteExample { b, search, format } => {
            let bs = match b {
                Some(b) => vec![*b],
                None => default_b_grid(),
            };
            let rows = bipartite_b_scan(&bs, search.into())?;
            match format {
                Format::Json => json(&rows)?,
                Format::Csv => {
                    let flat: Vec<ThresholdResult> = rows.iter().flat_map(|r| r.thresholds.clone()).collect();
                    render_csv(&flat)
                }
                Format::Text => scan_text(&rows, search.tol_x),
            }
        }
        Command::Validate { state, format } => {
            let source = Source::parse(state)?;
            let report = match &source {
                Source::File(path) => {
                    let (dims, matrix) = StateFile::read(path)?.into_parts()?;
                    validate_matrix(&dims, &matrix)
                }
                other => other.build(cli.seed)?.validate(),
            };
            let text = match format {
                Format::Json => json(&report)?,
                _ => validation_text(&report),
            };
            write_out(out, &text)?;
            return Ok(if report.passed { 0 } else { 1 });
        }
    };
    write_out(out, &text)?;
    Ok(0)
}

fn write_out(out: &mut dyn Write, text: &str) -> blochsep::Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|source| Error::Io { path: "<stdout>".into(), source })
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            if let Error::InvalidState(report) = &e {
                let _ = err.write_all(validation_text(report).as_bytes());
            }
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
