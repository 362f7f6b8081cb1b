use rayon::prelude::*;

use super::grids::{NOTE_ALPHA_ENTRY, NOTE_CONSTANT_BOUND, NOTE_THETA_COUNT};
use super::output::{Cell, Dataset};
use super::{SweepKind, SweepSpec};
use crate::bench::{run_experiment, BenchConfig, BenchRow, SIGMA_MULTIPLIER};
use crate::entropy::{three_obs_report, two_obs_report};
use crate::error::{Error, Result};
use crate::majorization::{
    compare_curves, lorenz_curve, three_obs_bound_curve, three_obs_probabilities, ANALYTIC_TOL,
};
use crate::qubit::{make_state, SpectrumPair};

pub const MAJORIZATION_HEADER: [&str; 7] = [
    "lambda1",
    "alpha",
    "k",
    "candidate_partial_sum",
    "bound_partial_sum",
    "slack",
    "source",
];

pub const MAJORIZATION_BENCH_HEADER: [&str; 9] = [
    "lambda1",
    "alpha",
    "k",
    "candidate_partial_sum",
    "bound_partial_sum",
    "slack",
    "source",
    "stddev",
    "outlier_flag",
];

pub const ENTROPY2_HEADER: [&str; 7] =
    ["lambda1", "alpha", "theta", "lhs", "b20", "b21", "tighter"];

pub const ENTROPY3_HEADER: [&str; 9] = [
    "lambda1",
    "alpha",
    "e_lhs",
    "b13",
    "b14",
    "b15",
    "b17",
    "tightest",
    "b14_anomaly_flag",
];

pub const BENCH_HEADER: [&str; 17] = [
    "lambda1",
    "alpha",
    "s0",
    "s1",
    "s2",
    "s3",
    "pz_plus",
    "px_plus",
    "py_plus",
    "pz_stddev",
    "px_stddev",
    "py_stddev",
    "fidelity",
    "min_slack",
    "holds",
    "outlier_flag",
    "projected_flag",
];

fn expect_kind(spec: &SweepSpec, kind: SweepKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::InvalidSpec(format!(
            "expected a {kind:?} spec, got {:?}",
            spec.kind
        )));
    }
    spec.validate()
}

/// Analytic Lorenz points against the bound for every (λ₁, α), followed per
/// grid point by simulated-bench points when `spec.bench` is set.
pub fn sweep_majorization(spec: &SweepSpec) -> Result<Dataset> {
    expect_kind(spec, SweepKind::Majorization3)?;
    let grid = spec.state_grid();
    let header: &[&'static str] = if spec.bench.is_some() {
        &MAJORIZATION_BENCH_HEADER
    } else {
        &MAJORIZATION_HEADER
    };
    let mut data = Dataset::new(header, spec.to_json(), spec.seed);
    let bench_rows = match &spec.bench {
        Some(cfg) => Some(run_experiment(
            &grid,
            &BenchConfig {
                seed: spec.seed,
                ..cfg.clone()
            },
        )?),
        None => None,
    };
    let mut violations = 0usize;
    for (index, &(lambda1, alpha)) in grid.iter().enumerate() {
        let rho = make_state(lambda1, alpha)?;
        let bound = three_obs_bound_curve(&SpectrumPair::from_weight(lambda1)?);
        let candidate = lorenz_curve(three_obs_probabilities(&rho).components())?;
        let report = compare_curves(&bound, &candidate, |_| spec.tol);
        if !report.holds {
            violations += 1;
        }
        for k in 0..bound.len() {
            let mut row = vec![
                Cell::Num(lambda1),
                Cell::Num(alpha),
                Cell::from(k + 1),
                Cell::Num(candidate.partial_sums[k]),
                Cell::Num(bound.partial_sums[k]),
                Cell::Num(report.slack_per_k[k]),
                Cell::from("analytic"),
            ];
            if bench_rows.is_some() {
                row.extend([Cell::Num(0.0), Cell::Bool(false)]);
            }
            data.push(row);
        }
        if let Some(rows) = &bench_rows {
            push_bench_lorenz(&mut data, &rows[index]);
        }
    }
    if violations > 0 {
        data.notes.push(format!(
            "{violations} analytic grid points violate the bound"
        ));
    }
    if let Some(rows) = &bench_rows {
        let outliers = rows.iter().filter(|r| r.outlier()).count();
        data.notes.push(format!(
            "bench rows: {outliers} of {} grid points exceed the bound by more than {SIGMA_MULTIPLIER} sigma",
            rows.len()
        ));
    }
    Ok(data)
}

fn push_bench_lorenz(data: &mut Dataset, row: &BenchRow) {
    for k in 0..row.lorenz.len() {
        let slack = row.report.slack_per_k[k];
        let sigma = row.lorenz_sigma[k];
        let outlier = slack < -(SIGMA_MULTIPLIER * sigma + ANALYTIC_TOL);
        data.push(vec![
            Cell::Num(row.lambda1),
            Cell::Num(row.alpha),
            Cell::from(k + 1),
            Cell::Num(row.lorenz[k]),
            Cell::Num(row.bound[k]),
            Cell::Num(slack),
            Cell::from("bench"),
            Cell::Num(sigma),
            Cell::Bool(outlier),
        ]);
    }
}

/// Two-observable entropy sum with the overlap and majorization bounds over
/// the product grid λ₁ × α × θ.
pub fn sweep_entropy_two(spec: &SweepSpec) -> Result<Dataset> {
    expect_kind(spec, SweepKind::Entropy2)?;
    let points: Vec<(f64, f64, f64)> = spec
        .state_grid()
        .into_iter()
        .flat_map(|(l, a)| spec.theta_list.iter().map(move |&t| (l, a, t)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(lambda1, alpha, theta)| {
            let report = two_obs_report(&make_state(lambda1, alpha)?, theta)?;
            Ok(vec![
                Cell::Num(lambda1),
                Cell::Num(alpha),
                Cell::Num(theta),
                Cell::Num(report.lhs),
                Cell::Num(report.overlap),
                Cell::Num(report.majorization),
                Cell::from(report.tighter().as_str()),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut data = Dataset::new(&ENTROPY2_HEADER, spec.to_json(), spec.seed);
    data.rows = rows;
    if spec.theta_list.len() == super::grids::THETA_GRID.len() {
        data.notes.push(NOTE_THETA_COUNT.to_owned());
    }
    Ok(data)
}

/// Three-observable entropy sum with the four lower bounds over λ₁ × α.
pub fn sweep_entropy_three(spec: &SweepSpec) -> Result<Dataset> {
    expect_kind(spec, SweepKind::Entropy3)?;
    let mut data = Dataset::new(&ENTROPY3_HEADER, spec.to_json(), spec.seed);
    let mut anomaly = false;
    for (lambda1, alpha) in spec.state_grid() {
        let r = three_obs_report(&make_state(lambda1, alpha)?);
        anomaly |= r.constant.anomaly;
        data.push(vec![
            Cell::Num(lambda1),
            Cell::Num(alpha),
            Cell::Num(r.e_lhs),
            Cell::Num(r.scaled_entropy),
            Cell::Num(r.constant.value),
            Cell::Num(r.doubled_entropy),
            Cell::Num(r.majorization),
            Cell::from(r.tightest.as_str()),
            Cell::Bool(r.constant.anomaly),
        ]);
    }
    data.notes.push(NOTE_ALPHA_ENTRY.to_owned());
    if anomaly {
        data.notes.push(NOTE_CONSTANT_BOUND.to_owned());
    }
    Ok(data)
}

/// One row per simulated grid point: reconstructed Stokes vector, measured
/// probabilities with error bars, fidelity and the bound check.
pub fn bench_dataset(spec: &SweepSpec) -> Result<Dataset> {
    expect_kind(spec, SweepKind::Bench)?;
    let cfg = BenchConfig {
        seed: spec.seed,
        ..spec.bench.clone().unwrap_or_default()
    };
    let rows = run_experiment(&spec.state_grid(), &cfg)?;
    let mut data = Dataset::new(&BENCH_HEADER, spec.to_json(), spec.seed);
    for row in &rows {
        let s = row.estimate.stokes;
        let p = row.estimate.probabilities();
        let e = row.estimate.prob_errors();
        data.push(vec![
            Cell::Num(row.lambda1),
            Cell::Num(row.alpha),
            Cell::Num(s.s0),
            Cell::Num(s.s1),
            Cell::Num(s.s2),
            Cell::Num(s.s3),
            Cell::Num(p[0].p_plus),
            Cell::Num(p[1].p_plus),
            Cell::Num(p[2].p_plus),
            Cell::Num(e[0]),
            Cell::Num(e[1]),
            Cell::Num(e[2]),
            Cell::Num(row.fidelity),
            Cell::Num(row.report.min_slack()),
            Cell::Bool(row.report.holds),
            Cell::Bool(row.outlier()),
            Cell::Bool(row.estimate.projected),
        ]);
    }
    let projected = rows.iter().filter(|r| r.estimate.projected).count();
    if projected > 0 {
        data.notes.push(format!(
            "{projected} reconstructions lay outside the Poincare sphere and were rescaled onto it"
        ));
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::grids::{ALPHA_GRID, LAMBDA1_GRID, THREE_OBS_ALPHA_GRID};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(x) => *x,
            other => panic!("not a number: {other:?}"),
        }
    }

    #[test]
    fn majorization_rows_are_dominated() {
        let spec = SweepSpec::new(SweepKind::Majorization3, vec![0.3], ALPHA_GRID.to_vec());
        let d = sweep_majorization(&spec).unwrap();
        assert_eq!(d.rows.len(), 6 * 6);
        assert!(d.rows.iter().all(|r| num(&r[5]) >= -1e-9));
        assert!(d.notes.is_empty());
    }

    #[test]
    fn pure_horizontal_state_curve() {
        let spec = SweepSpec::new(SweepKind::Majorization3, vec![0.0], vec![0.0]);
        let d = sweep_majorization(&spec).unwrap();
        let cand: Vec<f64> = d.rows.iter().map(|r| num(&r[3])).collect();
        for (c, e) in cand.iter().zip([1.0, 1.5, 2.0, 2.5, 3.0, 3.0]) {
            assert!((c - e).abs() < 1e-12);
        }
        assert_eq!(num(&d.rows[0][4]), 1.0);
    }

    #[test]
    fn maximally_mixed_saturates() {
        let spec = SweepSpec::new(SweepKind::Majorization3, vec![0.5], ALPHA_GRID.to_vec());
        let d = sweep_majorization(&spec).unwrap();
        assert!(d.rows.iter().all(|r| num(&r[5]).abs() < 1e-12));
    }

    #[test]
    fn bench_rows_follow_each_grid_point() {
        let mut spec = SweepSpec::new(SweepKind::Majorization3, vec![0.3], vec![0.0, PI / 6.0]);
        spec.bench = Some(BenchConfig::default());
        let d = sweep_majorization(&spec).unwrap();
        assert_eq!(d.header.len(), 9);
        let sources: Vec<&Cell> = d.rows.iter().map(|r| &r[6]).collect();
        assert_eq!(sources[0], &Cell::from("analytic"));
        assert_eq!(sources[6], &Cell::from("bench"));
        assert_eq!(sources[12], &Cell::from("analytic"));
        assert_eq!(d.rows.len(), 24);
    }

    #[test]
    fn two_observable_crossover() {
        let mut spec = SweepSpec::new(SweepKind::Entropy2, LAMBDA1_GRID.to_vec(), vec![0.0]);
        spec.theta_list = vec![FRAC_PI_2];
        let d = sweep_entropy_two(&spec).unwrap();
        for r in &d.rows[..4] {
            assert!(num(&r[4]) > num(&r[5]));
            assert_eq!(r[6], Cell::from("b20"));
        }
        spec.theta_list = vec![PI / 12.0];
        let d = sweep_entropy_two(&spec).unwrap();
        for r in &d.rows[..4] {
            assert!(num(&r[5]) > num(&r[4]));
            assert_eq!(r[6], Cell::from("b21"));
        }
        let last = d.rows.last().unwrap();
        assert!((num(&last[3]) - 2.0).abs() < 1e-12);
        assert!((num(&last[5]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn three_observable_tightest_is_majorization() {
        let spec = SweepSpec::new(
            SweepKind::Entropy3,
            LAMBDA1_GRID.to_vec(),
            THREE_OBS_ALPHA_GRID.to_vec(),
        );
        let d = sweep_entropy_three(&spec).unwrap();
        assert_eq!(d.rows.len(), 20);
        assert!(d.rows.iter().all(|r| r[7] == Cell::from("b17")));
        assert!(d.rows.iter().all(|r| r[8] == Cell::Bool(true)));
        assert_eq!(d.notes.len(), 2);
    }

    #[test]
    fn bench_dataset_noiseless_matches_target() {
        let mut spec = SweepSpec::new(SweepKind::Bench, vec![0.2], vec![PI / 3.0]);
        spec.bench = Some(BenchConfig {
            noise_rel: 0.0,
            repeats: 1,
            ..BenchConfig::default()
        });
        let d = bench_dataset(&spec).unwrap();
        assert!((num(&d.rows[0][12]) - 1.0).abs() < 1e-10);
        assert_eq!(d.rows[0][14], Cell::Bool(true));
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let spec = SweepSpec::new(SweepKind::Entropy3, vec![0.3], vec![0.0]);
        assert!(matches!(
            sweep_majorization(&spec),
            Err(Error::InvalidSpec(_))
        ));
    }
}
