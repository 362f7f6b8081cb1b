use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde_json::json;

use super::output::{Cell, Dataset};
use crate::error::{out_of_domain, Error, Result};
use crate::majorization::{lorenz_curve, three_obs_bound_curve, three_obs_probabilities};
use crate::qubit::{DensityMatrix, SpectrumPair};

pub const TIGHTNESS_HEADER: [&str; 7] = [
    "lambda1",
    "k",
    "bound_partial_sum",
    "achieved_supremum",
    "gap",
    "argmax_param1",
    "argmax_param2",
];

const MIN_IMPROVEMENT: f64 = 1e-10;
const MIN_STEP: f64 = 1e-10;
const MAX_STEPS: usize = 100_000;

/// Largest k-th Lorenz partial sum found over states of a fixed spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessResult {
    pub lambda1: f64,
    /// 1-based.
    pub k: usize,
    pub bound_partial_sum: f64,
    pub achieved_supremum: f64,
    /// `bound_partial_sum − achieved_supremum`.
    pub gap: f64,
    /// Polar angle of the maximizing Bloch direction.
    pub polar: f64,
    /// Azimuth of the maximizing Bloch direction, in [0, 2π).
    pub azimuth: f64,
}

struct Objective {
    radius: f64,
}

impl Objective {
    fn curve(&self, polar: f64, azimuth: f64) -> Vec<f64> {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        let r = self.radius;
        let rho = DensityMatrix::from_bloch([r * sp * ca, r * sp * sa, r * cp])
            .expect("radius at most 1");
        lorenz_curve(three_obs_probabilities(&rho).components())
            .expect("probabilities are non-negative")
            .partial_sums
    }

    fn value(&self, k: usize, polar: f64, azimuth: f64) -> f64 {
        self.curve(polar, azimuth)[k]
    }
}

fn normalize(polar: f64, azimuth: f64) -> (f64, f64) {
    let mut p = polar.rem_euclid(TAU);
    let mut a = azimuth;
    if p > PI {
        p = TAU - p;
        a += PI;
    }
    (p, a.rem_euclid(TAU))
}

/// Compass search from `start`: take the best of the four axis moves while
/// it gains at least 1e−10, otherwise halve the step.
fn refine(f: &Objective, k: usize, start: (f64, f64), step: f64) -> (f64, f64, f64) {
    let (mut p, mut a) = start;
    let mut best = f.value(k, p, a);
    let mut h = step;
    for _ in 0..MAX_STEPS {
        if h < MIN_STEP {
            break;
        }
        let moves = [(p + h, a), (p - h, a), (p, a + h), (p, a - h)];
        let (value, (np, na)) = moves
            .iter()
            .map(|&(mp, ma)| (f.value(k, mp, ma), (mp, ma)))
            .fold((f64::NEG_INFINITY, (p, a)), |acc, m| {
                if m.0 > acc.0 {
                    m
                } else {
                    acc
                }
            });
        if value - best >= MIN_IMPROVEMENT {
            best = value;
            (p, a) = normalize(np, na);
        } else {
            h *= 0.5;
        }
    }
    let (p, a) = normalize(p, a);
    (best, p, a)
}

/// Maximizes each Lorenz partial sum of the three-observable probability
/// vector over all states with spectrum (λ₁, 1 − λ₁).
///
/// A polar × azimuth grid with `resolution` polar steps seeds a compass search
/// per k.
pub fn tightness_scan(lambda1: f64, resolution: usize) -> Result<Vec<TightnessResult>> {
    if !(0.0..=0.5).contains(&lambda1) {
        return out_of_domain("lambda1", lambda1, "[0, 0.5]");
    }
    if resolution == 0 {
        return Err(Error::InvalidSpec("resolution must be at least 1".into()));
    }
    let bound = three_obs_bound_curve(&SpectrumPair::from_weight(lambda1)?);
    let n = bound.len();
    let f = Objective {
        radius: 1.0 - 2.0 * lambda1,
    };
    let step = PI / resolution as f64;

    // Per-row maxima, folded in row order so ties resolve to the first point.
    let row_best: Vec<Vec<(f64, f64, f64)>> = (0..=resolution)
        .into_par_iter()
        .map(|i| {
            let p = i as f64 * step;
            let mut best = vec![(f64::NEG_INFINITY, 0.0, 0.0); n];
            for j in 0..2 * resolution {
                let a = j as f64 * step;
                for (slot, v) in best.iter_mut().zip(f.curve(p, a)) {
                    if v > slot.0 {
                        *slot = (v, p, a);
                    }
                }
            }
            best
        })
        .collect();
    let mut seeds = vec![(f64::NEG_INFINITY, 0.0, 0.0); n];
    for row in row_best {
        for (slot, cand) in seeds.iter_mut().zip(row) {
            if cand.0 > slot.0 {
                *slot = cand;
            }
        }
    }

    Ok(seeds
        .par_iter()
        .enumerate()
        .map(|(k, &(_, p, a))| {
            let (achieved, polar, azimuth) = refine(&f, k, (p, a), step);
            TightnessResult {
                lambda1,
                k: k + 1,
                bound_partial_sum: bound.partial_sums[k],
                achieved_supremum: achieved,
                gap: bound.partial_sums[k] - achieved,
                polar,
                azimuth,
            }
        })
        .collect())
}

pub fn tightness_dataset(lambda1_list: &[f64], resolution: usize) -> Result<Dataset> {
    let spec = json!({
        "kind": "tightness",
        "lambda1_list": lambda1_list,
        "resolution": resolution,
    });
    let mut d = Dataset::new(&TIGHTNESS_HEADER, spec, 0);
    for &l in lambda1_list {
        for t in tightness_scan(l, resolution)? {
            d.push(vec![
                Cell::Num(t.lambda1),
                Cell::from(t.k),
                Cell::Num(t.bound_partial_sum),
                Cell::Num(t.achieved_supremum),
                Cell::Num(t.gap),
                Cell::Num(t.polar),
                Cell::Num(t.azimuth),
            ]);
        }
    }
    d.notes.push(
        "argmax_param1 is the polar angle and argmax_param2 the azimuth of the Bloch direction"
            .to_owned(),
    );
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_states_reach_the_bound() {
        let res = tightness_scan(0.0, 64).unwrap();
        assert_eq!(res.len(), 6);
        assert!(res[0].gap.abs() <= 1e-6);
        assert!((res[0].achieved_supremum - 1.0).abs() <= 1e-6);
        assert!((res[1].achieved_supremum - (1.0 + 0.5f64.sqrt())).abs() <= 1e-4);
        for t in &res {
            assert!(t.gap >= -1e-6, "{t:?}");
            assert!(t.gap <= 1e-6, "{t:?}");
        }
        for w in res.windows(2) {
            assert!(w[1].achieved_supremum >= w[0].achieved_supremum);
        }
    }

    #[test]
    fn maximally_mixed_gap_is_exactly_zero() {
        for t in tightness_scan(0.5, 8).unwrap() {
            assert_eq!(t.gap, 0.0);
        }
    }

    #[test]
    fn mixed_states_stay_below_the_bound() {
        for t in tightness_scan(0.3, 32).unwrap() {
            assert!(t.gap >= -1e-6 && t.gap <= 1e-6, "{t:?}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(tightness_scan(0.7, 8).is_err());
        assert!(tightness_scan(0.2, 0).is_err());
    }
}
