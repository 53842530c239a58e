//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::time::Instant;

use blochsep::bloch::bipartite_decomposition;
use blochsep::criteria::{
    build_s_matrix, ccnr_check, evaluate, ppt_check, proposition1_condition, theorem1_check, theorem2_best,
    theorem2_check, CriterionParams, CriterionReport, DETECTION_TOL,
};
use blochsep::detect::{
    bipartite_b_scan, closest_row, default_b_grid, table1_reproduce, ThresholdSearch, REPORTED_BIPARTITE_THRESHOLDS,
    TABLE1_EPSILONS,
};
use blochsep::numerics::trace_norm;
use blochsep::states::{
    bell_pair, density_from_pure, horodecki_2x4, maximally_mixed, random_separable, DensityMatrix,
};
use common::{max_abs_diff, random_state, rng};
use rand::Rng;
use rayon::prelude::*;

const TABLE1_REPORTED: [[f64; 3]; 4] = [
    [0.3536, 0.4118, 0.3307],
    [0.3536, 0.4118, 0.3307],
    [0.3424, 0.4118, 0.3281],
    [0.3274, 0.4256, 0.3243],
];

const WEIGHTS: [f64; 3] = [0.0, 0.5, 1.0];
const BORDERS: [usize; 3] = [0, 1, 3];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn table1() -> Outcome {
    let start = Instant::now();
    let table = table1_reproduce(ThresholdSearch::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    let mut missing = 0;
    for (row, reported) in TABLE1_REPORTED.iter().enumerate() {
        for (col, &want) in reported.iter().enumerate() {
            match table.cell(row, col).x_star {
                Some(x) => worst = worst.max((x - want).abs()),
                None => missing += 1,
            }
        }
    }
    outcome(
        missing == 0 && worst <= 5e-4 && elapsed < 60.0,
        format!(
            "12 cells over eps {:?}, max deviation {worst:.2e} (tol 5e-4), {missing} undetected, {elapsed:.2}s",
            TABLE1_EPSILONS
        ),
    )
}

fn bipartite_example() -> Outcome {
    let search = ThresholdSearch::default();
    let rows = bipartite_b_scan(&default_b_grid(), search).unwrap();
    let slack = 2.0 * search.tol_x;
    let violations: Vec<f64> = rows.iter().filter(|r| !r.ordering_holds(slack)).map(|r| r.b).collect();
    let best = closest_row(&rows, REPORTED_BIPARTITE_THRESHOLDS).unwrap();
    let dev = best.deviation_from(REPORTED_BIPARTITE_THRESHOLDS);
    let [t, vb, lb] = &best.thresholds;
    outcome(
        violations.is_empty(),
        format!(
            "ordering held on {}/{} b values; closest b={} gives ({:.4}, {:.4}, {:.4}), deviation {dev:.2e}: {}",
            rows.len() - violations.len(),
            rows.len(),
            best.b,
            t.x_or_inf(),
            vb.x_or_inf(),
            lb.x_or_inf(),
            if dev <= 2e-3 { "triple matched within 2e-3" } else { "triple not matched within 2e-3" }
        ),
    )
}

fn soundness_reports(rho: &DensityMatrix) -> Vec<CriterionReport> {
    let n = rho.num_subsystems();
    let mut out = Vec::new();
    for m in BORDERS {
        if n == 2 {
            for alpha in WEIGHTS {
                for beta in WEIGHTS {
                    out.push(theorem1_check(rho, alpha, beta, m).unwrap());
                }
            }
        }
        let mut grid = vec![vec![]];
        for _ in 0..n {
            grid = grid
                .into_iter()
                .flat_map(|prefix: Vec<f64>| {
                    WEIGHTS.iter().map(move |&w| {
                        let mut next = prefix.clone();
                        next.push(w);
                        next
                    })
                })
                .collect();
        }
        for alphas in grid {
            out.push(theorem2_best(rho, m, &alphas).unwrap());
        }
    }
    let mut presets = vec![CriterionParams::vm(), CriterionParams::hm(), CriterionParams::lm()];
    if n == 2 {
        presets.extend([CriterionParams::vb(), CriterionParams::lb(), CriterionParams::ccnr()]);
    }
    presets.extend((0..n).map(CriterionParams::ppt));
    out.extend(presets.iter().map(|p| evaluate(rho, p).unwrap()));
    out
}

fn soundness() -> Outcome {
    let suites: [(&[usize], u64); 4] = [(&[2, 2], 1000), (&[2, 4], 1000), (&[3, 3], 1000), (&[2, 2, 2], 500)];
    let mut checks = 0usize;
    let mut detections = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (dims, count) in suites {
        let results: Vec<(usize, f64, Option<String>)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let seed = 10_000 * dims.len() as u64 + 1_000 * dims[1] as u64 + i;
                let terms = 1 + rng(seed).random_range(0..8);
                let rho = random_separable(dims, terms, seed).unwrap();
                let reports = soundness_reports(&rho);
                let worst = reports.iter().map(|r| r.margin).fold(f64::NEG_INFINITY, f64::max);
                let hit = reports
                    .iter()
                    .find(|r| r.detected || r.margin > DETECTION_TOL)
                    .map(|r| format!("{dims:?} seed {seed}: {} margin {:e}", r.params.criterion, r.margin));
                (reports.len(), worst, hit)
            })
            .collect();
        for (n, w, hit) in results {
            checks += n;
            worst = worst.max(w);
            detections.extend(hit);
        }
    }
    let mut detail = format!("3500 separable states, {checks} checks, max margin {worst:.3e}, {} detections", detections.len());
    if let Some(first) = detections.first() {
        detail.push_str(&format!(" (first: {first})"));
    }
    outcome(detections.is_empty(), detail)
}

fn proposition1() -> Outcome {
    let mut monotone_failures = 0;
    let mut growth_failures = 0;
    let mut detections = 0;
    for dims in [[2usize, 2], [2, 4]] {
        let (d1, d2) = (dims[0] as f64, dims[1] as f64);
        for i in 0..200u64 {
            let seed = 77_000 + 1_000 * dims[1] as u64 + i;
            let rho = random_state(&dims, seed);
            let alpha: f64 = rng(seed).random_range(0.05..2.0);
            let beta = alpha * (d1 * (d1 - 1.0)).sqrt() / (d2 * (d2 - 1.0)).sqrt();
            assert!(proposition1_condition(alpha, beta, dims[0], dims[1]));
            let dec = bipartite_decomposition(&rho).unwrap();
            let norms: Vec<f64> = (0..=5).map(|m| trace_norm(&build_s_matrix(&dec, alpha, beta, m)).unwrap()).collect();
            for m in 0..5 {
                if norms[m + 1] < alpha * beta + norms[m] - 1e-9 {
                    growth_failures += 1;
                }
                let lo = theorem1_check(&rho, alpha, beta, m).unwrap();
                if lo.detected {
                    detections += 1;
                    if !theorem1_check(&rho, alpha, beta, m + 1).unwrap().detected {
                        monotone_failures += 1;
                    }
                }
            }
        }
    }
    outcome(
        monotone_failures == 0 && growth_failures == 0 && detections > 0,
        format!(
            "400 states x m=0..4: {detections} detections, {monotone_failures} lost at m+1, {growth_failures} border-growth violations"
        ),
    )
}

fn analytic_fixtures() -> Outcome {
    let bell = density_from_pure(&bell_pair());
    let vb = evaluate(&bell, &CriterionParams::vb()).unwrap();
    let ccnr = ccnr_check(&bell).unwrap();
    let ppt = ppt_check(&bell, 1).unwrap();
    let mut errors = vec![(vb.value - 3.0).abs(), (vb.bound - 1.0).abs(), (ccnr.value - 2.0).abs(), (ppt.value - 0.5).abs()];
    let mut r = rng(5);
    for dims in [[2usize, 2], [2, 4], [3, 3], [4, 2]] {
        let dec = bipartite_decomposition(&maximally_mixed(&dims).unwrap()).unwrap();
        for _ in 0..10 {
            let (alpha, beta, m) = (r.random_range(0.0..3.0), r.random_range(0.0..3.0), r.random_range(0..6usize));
            let norm = trace_norm(&build_s_matrix(&dec, alpha, beta, m)).unwrap();
            errors.push((norm - m as f64 * alpha * beta).abs());
        }
    }
    let worst = errors.iter().copied().fold(0.0, f64::max);
    outcome(
        worst <= 1e-10 && vb.detected,
        format!(
            "bell vb {:.12} vs {:.12}, ccnr {:.12}, ppt {:.12}; maximally mixed ||S|| = m*alpha*beta; max error {worst:.1e}",
            vb.value, vb.bound, ccnr.value, ppt.value
        ),
    )
}

fn round_trip() -> Outcome {
    let dims_cycle: [&[usize]; 5] = [&[2, 2], &[2, 3], &[3, 2], &[2, 4], &[3, 3]];
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let rho = random_state(dims_cycle[i as usize % 5], 123_000 + i);
        let rebuilt = bipartite_decomposition(&rho).unwrap().reconstruct().unwrap();
        worst = worst.max(max_abs_diff(&rebuilt, rho.matrix()));
    }
    let dir = tempfile::tempdir().unwrap();
    let mut file_worst = 0.0f64;
    for i in 0..20u64 {
        let rho = random_state(dims_cycle[i as usize % 5], 456_000 + i);
        let path = dir.path().join("state.json");
        rho.save(&path).unwrap();
        let back = DensityMatrix::load(&path).unwrap();
        file_worst = file_worst.max(max_abs_diff(back.matrix(), rho.matrix()));
    }
    outcome(
        worst <= 1e-10 && file_worst <= 1e-15,
        format!("reconstruction max error {worst:.1e} over 100 states; file round-trip max error {file_worst:.1e}"),
    )
}

fn consistency() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let seed = 900_000 + i;
        let rho = random_state(&[2, 4], seed);
        let mut r = rng(seed);
        let (alpha, beta, m) = (r.random_range(0.0..2.0), r.random_range(0.0..2.0), r.random_range(0..5usize));
        let t1 = theorem1_check(&rho, alpha, beta, m).unwrap();
        let t2 = theorem2_check(&rho, m, &[beta, alpha], &[0]).unwrap();
        worst = worst.max((t1.value - t2.value).abs()).max((t1.bound - t2.bound).abs());
    }
    outcome(worst <= 1e-10, format!("100 (2,4) states, max |thm1 - thm2 at A={{1}}| {worst:.1e}"))
}

fn bound_entanglement() -> Outcome {
    let mut worst = f64::INFINITY;
    for b in default_b_grid() {
        let rho = horodecki_2x4(b).unwrap();
        for k in 0..2 {
            worst = worst.min(-ppt_check(&rho, k).unwrap().value);
        }
    }
    outcome(worst >= -1e-10, format!("91 b values, both sides: min partial-transpose eigenvalue {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("table 1 thresholds", table1),
        ("bipartite example ordering", bipartite_example),
        ("soundness on separable states", soundness),
        ("monotone detection in m", proposition1),
        ("analytic fixtures", analytic_fixtures),
        ("round trips", round_trip),
        ("bipartite/multipartite consistency", consistency),
        ("bound entangled family is PPT", bound_entanglement),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        if !result.passed {
            failures += 1;
        }
        println!(
            "criterion {} [{}] {name}: {} ({:.1}s)",
            i + 1,
            if result.passed { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
