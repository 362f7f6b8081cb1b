//! Direct sums, Lorenz curves and the majorization order.
//!
//! `p ≺ q` when every partial sum of the k largest components of `p` is at
//! most the corresponding partial sum of `q`, with equal totals. The bound
//! vectors here are the optimal right-hand sides for the qubit observable
//! pairs {Z, X(θ)} and triples {σx, σy, σz}.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::qubit::{measure_probs, DensityMatrix, Observable, ProbPair, SpectrumPair};

/// Default tolerance for majorization checks on analytic probability vectors.
pub const ANALYTIC_TOL: f64 = 1e-9;

/// Concatenated outcome distributions of N dichotomic measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbCatVec(Vec<f64>);

impl ProbCatVec {
    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Number of measurements contributing to the vector.
    pub fn observables(&self) -> usize {
        self.0.len() / 2
    }
}

/// p₁ ⊕ p₂ ⊕ … in the given order.
pub fn direct_sum(pairs: &[ProbPair]) -> ProbCatVec {
    ProbCatVec(pairs.iter().flat_map(ProbPair::as_array).collect())
}

/// Right-hand side of a direct-sum majorization relation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundVec(Vec<f64>);

impl BoundVec {
    /// Checks non-negativity and that the components sum to half the length.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        check_nonnegative(&components)?;
        let n = components.len() as f64 / 2.0;
        let total: f64 = components.iter().sum();
        if !components.len().is_multiple_of(2) || (total - n).abs() > ANALYTIC_TOL {
            return Err(Error::Unphysical(format!(
                "bound vector of length {} sums to {total}",
                components.len()
            )));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Cumulative sums of the k largest components, k = 1..n.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzCurve {
    pub partial_sums: Vec<f64>,
}

impl LorenzCurve {
    pub fn len(&self) -> usize {
        self.partial_sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_sums.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationReport {
    pub holds: bool,
    /// Bound partial sum minus candidate partial sum, k = 1..n.
    pub slack_per_k: Vec<f64>,
    /// 1-based index of the first failing partial sum.
    pub first_violation_k: Option<usize>,
}

impl MajorizationReport {
    pub fn min_slack(&self) -> f64 {
        self.slack_per_k
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_nonnegative(v: &[f64]) -> Result<()> {
    for (index, &value) in v.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeComponent { index, value });
        }
    }
    Ok(())
}

/// Stable descending sort: ties keep their original order.
pub fn sort_descending(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    out
}

pub fn lorenz_curve(v: &[f64]) -> Result<LorenzCurve> {
    check_nonnegative(v)?;
    let partial_sums = sort_descending(v)
        .into_iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    Ok(LorenzCurve { partial_sums })
}

/// Tests `candidate ≺ bound`.
///
/// A mismatch of totals beyond `tol` is reported as a violation at k = n.
pub fn majorizes(bound: &[f64], candidate: &[f64], tol: f64) -> Result<MajorizationReport> {
    if bound.len() != candidate.len() {
        return Err(Error::LengthMismatch {
            left: bound.len(),
            right: candidate.len(),
        });
    }
    let upper = lorenz_curve(bound)?;
    let lower = lorenz_curve(candidate)?;
    Ok(compare_curves(&upper, &lower, |_| tol))
}

/// Slack and verdict from two Lorenz curves of equal length, with a
/// per-k tolerance.
pub fn compare_curves(
    bound: &LorenzCurve,
    candidate: &LorenzCurve,
    tol_at: impl Fn(usize) -> f64,
) -> MajorizationReport {
    let slack_per_k: Vec<f64> = bound
        .partial_sums
        .iter()
        .zip(&candidate.partial_sums)
        .map(|(b, c)| b - c)
        .collect();
    let n = slack_per_k.len();
    let mut first_violation_k = slack_per_k
        .iter()
        .enumerate()
        .position(|(i, &s)| s < -tol_at(i))
        .map(|i| i + 1);
    if first_violation_k.is_none() && n > 0 && slack_per_k[n - 1].abs() > tol_at(n - 1) {
        first_violation_k = Some(n);
    }
    MajorizationReport {
        holds: first_violation_k.is_none(),
        slack_per_k,
        first_violation_k,
    }
}

/// Bound vector for the pair {Z, X(θ)}: (1, cos θ/2, 2 sin² θ/4, 0).
pub fn bound_two_obs(theta: f64) -> Result<BoundVec> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return crate::error::out_of_domain("theta", theta, "(0, π/2]");
    }
    let q = (theta / 4.0).sin();
    Ok(BoundVec(vec![1.0, (theta / 2.0).cos(), 2.0 * q * q, 0.0]))
}

/// Bound vector for {σx, σy, σz}:
/// (1, √2/2, (1+√3−√2)/2, (1−√3+√2)/2, (2−√2)/2, 0).
///
/// Mirror components are formed as `1 − a` so that s↑ + s↓ is exactly the
/// all-ones vector in floating point.
pub fn bound_three_obs() -> BoundVec {
    let half_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let third = 0.5 * (1.0 + 3f64.sqrt() - 2f64.sqrt());
    BoundVec(vec![
        1.0,
        half_sqrt2,
        third,
        1.0 - third,
        1.0 - half_sqrt2,
        0.0,
    ])
}

/// λ₁·s↑ + λ₂·s↓ for a spectrum with λ₁ ≤ λ₂. `s` is taken as stored, in
/// descending order.
pub fn mixed_bound(s: &BoundVec, spectrum: &SpectrumPair) -> BoundVec {
    let desc = s.components();
    let n = desc.len();
    BoundVec(
        (0..n)
            .map(|k| spectrum.lambda1 * desc[n - 1 - k] + spectrum.lambda2 * desc[k])
            .collect(),
    )
}

/// Outcome distributions of σz, σx, σy concatenated in that order, i.e.
/// (S0±S1, S0±S2, S0∓S3)/2S0.
pub fn three_obs_probabilities(rho: &DensityMatrix) -> ProbCatVec {
    direct_sum(&[
        measure_probs(rho, &Observable::sigma_z()),
        measure_probs(rho, &Observable::sigma_x()),
        measure_probs(rho, &Observable::sigma_y()),
    ])
}

/// Lorenz curve of the spectrum-dependent three-observable bound.
pub fn three_obs_bound_curve(spectrum: &SpectrumPair) -> LorenzCurve {
    lorenz_curve(mixed_bound(&bound_three_obs(), spectrum).components())
        .expect("bound components are non-negative")
}

pub fn check_three_obs(rho: &DensityMatrix, tol: f64) -> MajorizationReport {
    let bound = mixed_bound(&bound_three_obs(), &rho.spectrum());
    majorizes(
        bound.components(),
        three_obs_probabilities(rho).components(),
        tol,
    )
    .expect("probability and bound vectors have matching lengths")
}
