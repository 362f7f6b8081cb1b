use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Distribution, UnitBall, UnitSphere};
use rayon::prelude::*;
use serde_json::json;

use super::output::{Cell, Dataset};
use crate::bench::substream;
use crate::entropy::{
    constant_bound, doubled_entropy_bound, entropy_sum_three, overlap_bound,
    pair_majorization_bound, scaled_entropy_bound, triple_majorization_bound, ConstantBoundVector,
};
use crate::majorization::{
    bound_three_obs, bound_two_obs, direct_sum, majorizes, mixed_bound, three_obs_probabilities,
    ANALYTIC_TOL,
};
use crate::qubit::{
    measure_probs, observable_x, robertson_check, shannon_entropy, DensityMatrix, Observable,
};

pub const VERIFY_HEADER: [&str; 4] = ["relation", "checked", "violations", "worst_slack"];

const RELATIONS: [&str; 11] = [
    "majorization3",
    "majorization2",
    "b13",
    "b14",
    "b15",
    "b17",
    "b20",
    "b21",
    "schur3",
    "schur2",
    "robertson",
];

/// Violation count and smallest slack of one relation.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationStats {
    pub name: &'static str,
    /// Samples on which the relation was evaluated.
    pub checked: usize,
    pub violations: usize,
    /// Smallest observed margin; negative values are violations.
    pub worst_slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub relations: Vec<RelationStats>,
}

impl VerifyReport {
    pub fn total_violations(&self) -> usize {
        self.relations.iter().map(|r| r.violations).sum()
    }

    pub fn relation(&self, name: &str) -> Option<&RelationStats> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn to_dataset(&self) -> Dataset {
        let spec = json!({
            "kind": "verify",
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
        });
        let mut d = Dataset::new(&VERIFY_HEADER, spec, self.seed);
        for r in &self.relations {
            d.push(vec![
                Cell::from(r.name),
                Cell::from(r.checked),
                Cell::from(r.violations),
                Cell::Num(r.worst_slack),
            ]);
        }
        d.notes
            .push("states drawn uniformly from the Bloch ball".to_owned());
        d
    }
}

/// A Bloch vector drawn uniformly from the unit ball.
pub fn sample_bloch_ball<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    UnitBall.sample(rng)
}

#[derive(Clone, Copy)]
struct Outcome {
    slack: f64,
    violated: bool,
}

type Tally = Vec<(usize, usize, f64)>;

fn empty_tally() -> Tally {
    vec![(0, 0, f64::INFINITY); RELATIONS.len()]
}

fn merge(mut a: Tally, b: Tally) -> Tally {
    for (x, y) in a.iter_mut().zip(b) {
        x.0 += y.0;
        x.1 += y.1;
        x.2 = x.2.min(y.2);
    }
    a
}

fn inequality(lhs: f64, rhs: f64, tol: f64) -> Option<Outcome> {
    let slack = lhs - rhs;
    Some(Outcome {
        slack,
        violated: slack < -tol,
    })
}

fn check_sample(seed: u64, index: usize, tol: f64) -> [Option<Outcome>; RELATIONS.len()] {
    let mut rng = substream(seed, index as u64);
    let r = sample_bloch_ball(&mut rng);
    let theta = FRAC_PI_2 * (1.0 - rng.random::<f64>());
    let a: [f64; 3] = UnitSphere.sample(&mut rng);
    let b: [f64; 3] = UnitSphere.sample(&mut rng);
    let rho = DensityMatrix::from_bloch(r).expect("sample lies in the unit ball");
    let spectrum = rho.spectrum();

    let bound3 = mixed_bound(&bound_three_obs(), &spectrum);
    let cand3 = three_obs_probabilities(&rho);
    let maj3 = majorizes(bound3.components(), cand3.components(), tol).expect("equal lengths");

    let x = observable_x(theta).expect("theta in (0, pi/2]").observable;
    let bound2 = mixed_bound(
        &bound_two_obs(theta).expect("theta in (0, pi/2]"),
        &spectrum,
    );
    let cand2 = direct_sum(&[
        measure_probs(&rho, &Observable::sigma_z()),
        measure_probs(&rho, &x),
    ]);
    let maj2 = majorizes(bound2.components(), cand2.components(), tol).expect("equal lengths");

    let e3 = entropy_sum_three(&rho);
    let e2 = shannon_entropy(cand2.components()).expect("probabilities");
    let h_bound3 = shannon_entropy(bound3.components()).expect("non-negative");
    let h_bound2 = shannon_entropy(bound2.components()).expect("non-negative");
    let schur = |holds: bool, lhs: f64, rhs: f64| {
        if holds {
            inequality(lhs, rhs, tol)
        } else {
            None
        }
    };

    let robertson = Observable::new(a[0], a[1], a[2])
        .and_then(|oa| Ok((oa, Observable::new(b[0], b[1], b[2])?)))
        .map(|(oa, ob)| robertson_check(&rho, &oa, &ob))
        .ok();

    [
        Some(Outcome {
            slack: maj3.min_slack(),
            violated: !maj3.holds,
        }),
        Some(Outcome {
            slack: maj2.min_slack(),
            violated: !maj2.holds,
        }),
        inequality(e3, scaled_entropy_bound(&rho), tol),
        inequality(
            e3,
            constant_bound(&ConstantBoundVector::reference()).value,
            tol,
        ),
        inequality(e3, doubled_entropy_bound(&rho), tol),
        inequality(e3, triple_majorization_bound(&rho), tol),
        overlap_bound(&rho, theta)
            .ok()
            .and_then(|v| inequality(e2, v, tol)),
        pair_majorization_bound(&rho, theta)
            .ok()
            .and_then(|v| inequality(e2, v, tol)),
        schur(maj3.holds, e3, h_bound3),
        schur(maj2.holds, e2, h_bound2),
        robertson.and_then(|t| inequality(t.lhs, t.rhs, tol)),
    ]
}

/// Checks every relation on `samples` random states at tolerance 1e−9.
pub fn verify_random(samples: usize, seed: u64) -> VerifyReport {
    verify_random_with_tol(samples, seed, ANALYTIC_TOL)
}

/// Checks every relation on `samples` states drawn uniformly from the Bloch
/// ball. Sample `i` uses substream `i` of `seed`; the aggregate does not
/// depend on thread scheduling.
pub fn verify_random_with_tol(samples: usize, seed: u64, tol: f64) -> VerifyReport {
    let tally = (0..samples)
        .into_par_iter()
        .fold(empty_tally, |mut acc, i| {
            for (slot, outcome) in acc.iter_mut().zip(check_sample(seed, i, tol)) {
                if let Some(o) = outcome {
                    slot.0 += 1;
                    slot.1 += usize::from(o.violated);
                    slot.2 = slot.2.min(o.slack);
                }
            }
            acc
        })
        .reduce(empty_tally, merge);
    VerifyReport {
        samples,
        seed,
        tol,
        relations: RELATIONS
            .iter()
            .zip(tally)
            .map(
                |(&name, (checked, violations, worst_slack))| RelationStats {
                    name,
                    checked,
                    violations,
                    worst_slack,
                },
            )
            .collect(),
    }
}
