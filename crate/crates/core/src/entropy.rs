//! Entropic uncertainty quantities and the competing lower bounds.
//!
//! Report fields carry the column labels used in emitted datasets
//! (`b13`, `b14`, `b15`, `b17` for three observables, `b20`, `b21` for the
//! pair {Z, X(θ)}).

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::majorization::{bound_three_obs, bound_two_obs, mixed_bound};
use crate::qubit::{
    dot, measure_probs, observable_x, plogp, shannon_entropy, DensityMatrix, Observable,
};

/// Tolerance used to decide ties between bounds in reports.
pub const TIE_TOL: f64 = 1e-12;

/// Maximum squared overlap c = maxᵢⱼ |⟨aᵢ|bⱼ⟩|² between eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapConst(pub f64);

/// For qubit observables with Bloch directions a and b the eigenvector
/// overlaps are (1 ± a·b)/2, so c = (1 + |a·b|)/2.
pub fn max_overlap(a: &Observable, b: &Observable) -> Result<OverlapConst> {
    let cos = dot(&a.direction(), &b.direction()).abs().min(1.0);
    if 1.0 - cos <= 1e-12 {
        return Err(Error::DegeneratePair);
    }
    Ok(OverlapConst(0.5 * (1.0 + cos)))
}

/// H(p⃗x) + H(p⃗y) + H(p⃗z).
pub fn entropy_sum_three(rho: &DensityMatrix) -> f64 {
    [
        Observable::sigma_x(),
        Observable::sigma_y(),
        Observable::sigma_z(),
    ]
    .iter()
    .map(|o| pair_entropy(rho, o))
    .sum()
}

fn pair_entropy(rho: &DensityMatrix, o: &Observable) -> f64 {
    let p = measure_probs(rho, o);
    -(plogp(p.p_plus) + plogp(p.p_minus))
}

fn spectrum_entropy(rho: &DensityMatrix) -> f64 {
    crate::qubit::von_neumann_entropy(rho)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2 {
        Ok(())
    } else {
        crate::error::out_of_domain("theta", theta, "(0, π/2]")
    }
}

/// Overlap bound with mixedness term: log₂(1/c) + H(λ⃗) for {Z, X(θ)}.
pub fn overlap_bound(rho: &DensityMatrix, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let x = observable_x(theta)?.observable;
    let c = max_overlap(&Observable::sigma_z(), &x)?;
    Ok(-c.0.log2() + spectrum_entropy(rho))
}

/// H(λ₁s↑ + λ₂s↓) for the {Z, X(θ)} bound vector.
pub fn pair_majorization_bound(rho: &DensityMatrix, theta: f64) -> Result<f64> {
    let s = bound_two_obs(theta)?;
    shannon_entropy(mixed_bound(&s, &rho.spectrum()).components())
}

/// (3/2)·S(ρ) + 3/2.
pub fn scaled_entropy_bound(rho: &DensityMatrix) -> f64 {
    1.5 * spectrum_entropy(rho) - 0.5 * (1.0f64 / 8.0).log2()
}

/// 2·H(λ⃗) + 1.
pub fn doubled_entropy_bound(rho: &DensityMatrix) -> f64 {
    2.0 * spectrum_entropy(rho) - (0.5f64).log2()
}

/// H(λ₁s↑ + λ₂s↓) for the {σx, σy, σz} bound vector.
pub fn triple_majorization_bound(rho: &DensityMatrix) -> f64 {
    shannon_entropy(mixed_bound(&bound_three_obs(), &rho.spectrum()).components())
        .expect("mixed bound components are non-negative")
}

/// The state-independent vector l entering the constant bound −Σ lᵢ log₂ lᵢ.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantBoundVector(pub Vec<f64>);

impl ConstantBoundVector {
    /// The reference vector
    /// {1, √2/2, (1+√5−√2)/2, (1+√10−√5)/2, (1+√17−√10)/2, (1−√17)/2}.
    /// Its last component is negative.
    pub fn reference() -> Self {
        let r = f64::sqrt;
        Self(vec![
            1.0,
            r(2.0) / 2.0,
            (1.0 + r(5.0) - r(2.0)) / 2.0,
            (1.0 + r(10.0) - r(5.0)) / 2.0,
            (1.0 + r(17.0) - r(10.0)) / 2.0,
            (1.0 - r(17.0)) / 2.0,
        ])
    }
}

impl Default for ConstantBoundVector {
    fn default() -> Self {
        Self::reference()
    }
}

/// Value of the constant bound, with `anomaly` set when any component was
/// non-positive and therefore skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantBound {
    pub value: f64,
    pub anomaly: bool,
}

/// −Σ lᵢ log₂ lᵢ over the strictly positive components of `l`.
pub fn constant_bound(l: &ConstantBoundVector) -> ConstantBound {
    let mut anomaly = false;
    let mut value = 0.0;
    for &x in &l.0 {
        if x > 0.0 {
            value -= plogp(x);
        } else if x < 0.0 || !x.is_finite() {
            anomaly = true;
        }
    }
    ConstantBound { value, anomaly }
}

/// Which lower bound on the three-observable entropy sum is largest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundLabel {
    #[serde(rename = "b13")]
    ScaledEntropy,
    #[serde(rename = "b14")]
    Constant,
    #[serde(rename = "b15")]
    DoubledEntropy,
    #[serde(rename = "b17")]
    Majorization,
}

impl BoundLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ScaledEntropy => "b13",
            Self::Constant => "b14",
            Self::DoubledEntropy => "b15",
            Self::Majorization => "b17",
        }
    }
}

impl fmt::Display for BoundLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeObsReport {
    /// H(p⃗x) + H(p⃗y) + H(p⃗z).
    pub e_lhs: f64,
    pub scaled_entropy: f64,
    pub constant: ConstantBound,
    pub doubled_entropy: f64,
    pub majorization: f64,
    pub tightest: BoundLabel,
}

impl ThreeObsReport {
    pub fn max_bound(&self) -> f64 {
        self.scaled_entropy
            .max(self.constant.value)
            .max(self.doubled_entropy)
            .max(self.majorization)
    }
}

pub fn three_obs_report(rho: &DensityMatrix) -> ThreeObsReport {
    three_obs_report_with(rho, &ConstantBoundVector::reference())
}

/// Same as [`three_obs_report`] with a caller-supplied constant-bound vector.
pub fn three_obs_report_with(rho: &DensityMatrix, l: &ConstantBoundVector) -> ThreeObsReport {
    let scaled_entropy = scaled_entropy_bound(rho);
    let constant = constant_bound(l);
    let doubled_entropy = doubled_entropy_bound(rho);
    let majorization = triple_majorization_bound(rho);
    let best = scaled_entropy
        .max(constant.value)
        .max(doubled_entropy)
        .max(majorization);
    // Ties go to the majorization bound, then in label order.
    let tightest = [
        (majorization, BoundLabel::Majorization),
        (scaled_entropy, BoundLabel::ScaledEntropy),
        (constant.value, BoundLabel::Constant),
        (doubled_entropy, BoundLabel::DoubledEntropy),
    ]
    .into_iter()
    .find(|(v, _)| *v >= best - TIE_TOL)
    .map(|(_, label)| label)
    .expect("the maximum is attained");
    ThreeObsReport {
        e_lhs: entropy_sum_three(rho),
        scaled_entropy,
        constant,
        doubled_entropy,
        majorization,
        tightest,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoObsReport {
    pub theta: f64,
    /// H(p⃗θ) + H(p⃗z).
    pub lhs: f64,
    pub overlap: f64,
    pub majorization: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairTighter {
    #[serde(rename = "b20")]
    Overlap,
    #[serde(rename = "b21")]
    Majorization,
    #[serde(rename = "tie")]
    Tie,
}

impl PairTighter {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Overlap => "b20",
            Self::Majorization => "b21",
            Self::Tie => "tie",
        }
    }
}

impl TwoObsReport {
    pub fn tighter(&self) -> PairTighter {
        let d = self.majorization - self.overlap;
        if d.abs() <= TIE_TOL {
            PairTighter::Tie
        } else if d > 0.0 {
            PairTighter::Majorization
        } else {
            PairTighter::Overlap
        }
    }
}

pub fn two_obs_report(rho: &DensityMatrix, theta: f64) -> Result<TwoObsReport> {
    check_theta(theta)?;
    let x = observable_x(theta)?.observable;
    Ok(TwoObsReport {
        theta,
        lhs: pair_entropy(rho, &x) + pair_entropy(rho, &Observable::sigma_z()),
        overlap: overlap_bound(rho, theta)?,
        majorization: pair_majorization_bound(rho, theta)?,
    })
}
