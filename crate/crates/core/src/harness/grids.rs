//! Reference parameter grids.

use std::f64::consts::PI;

/// Mixing weights of the prepared state series.
pub const LAMBDA1_GRID: [f64; 5] = [0.0, 0.2, 0.3, 0.4, 0.5];

/// Rotation angles of the prepared state series.
pub const ALPHA_GRID: [f64; 6] = [
    0.0,
    PI / 12.0,
    PI / 6.0,
    PI / 4.0,
    PI / 3.0,
    5.0 * PI / 12.0,
];

/// Angles of the rotated observable, in multiples of π/24.
pub const THETA_GRID: [f64; 12] = [
    PI / 24.0,
    PI / 12.0,
    PI / 8.0,
    PI / 6.0,
    5.0 * PI / 24.0,
    PI / 4.0,
    7.0 * PI / 24.0,
    PI / 3.0,
    3.0 * PI / 8.0,
    5.0 * PI / 12.0,
    11.0 * PI / 24.0,
    PI / 2.0,
];

/// State angles of the three-observable panels.
pub const THREE_OBS_ALPHA_GRID: [f64; 4] = [PI / 6.0, PI / 4.0, PI / 3.0, 5.0 * PI / 12.0];

/// A product grid of λ₁ × α × θ.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub lambda1: Vec<f64>,
    pub alpha: Vec<f64>,
    pub theta: Vec<f64>,
}

/// The four two-observable panel families: θ at fixed α, α at fixed θ,
/// θ sweep at fixed α, θ sweep at fixed λ₁.
pub fn two_obs_families() -> Vec<Family> {
    vec![
        Family {
            lambda1: LAMBDA1_GRID.to_vec(),
            alpha: vec![0.0],
            theta: vec![PI / 12.0, PI / 4.0, 5.0 * PI / 12.0, PI / 2.0],
        },
        Family {
            lambda1: LAMBDA1_GRID.to_vec(),
            alpha: vec![PI / 12.0, PI / 6.0, PI / 4.0, 5.0 * PI / 12.0],
            theta: vec![PI / 3.0],
        },
        Family {
            lambda1: vec![0.0, 0.2, 0.3, 0.5],
            alpha: vec![PI / 6.0],
            theta: THETA_GRID.to_vec(),
        },
        Family {
            lambda1: vec![0.3],
            alpha: vec![0.0, PI / 12.0, PI / 4.0, 5.0 * PI / 12.0],
            theta: THETA_GRID.to_vec(),
        },
    ]
}

pub const NOTE_THETA_COUNT: &str =
    "two-observable grid: the reference list counts eleven observable pairs but names twelve theta values; all twelve are swept";
pub const NOTE_ALPHA_ENTRY: &str =
    "three-observable grid: one reference panel reads alpha = 5pi/4; 5pi/12 is swept to match the state series";
pub const NOTE_CONSTANT_BOUND: &str =
    "b14: the reference constant vector has a negative last component; the entropy is taken over its positive components and the row is flagged";

/// Parses an angle such as `0.5`, `pi`, `pi/12`, `5pi/12`, `5*pi/12` or `-pi/4`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim().to_ascii_lowercase();
    if let Ok(x) = t.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let (numer, denom) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (t.as_str(), 1.0),
    };
    let (sign, numer) = match numer.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, numer),
    };
    let coeff = numer
        .strip_suffix("pi")?
        .trim()
        .trim_end_matches('*')
        .trim();
    let coeff = if coeff.is_empty() {
        1.0
    } else {
        coeff.parse::<f64>().ok()?
    };
    let x = sign * coeff * PI / denom;
    (x.is_finite() && denom != 0.0).then_some(x)
}

/// Parses a comma-separated list of angles.
pub fn parse_angle_list(text: &str) -> Option<Vec<f64>> {
    text.split(',').map(parse_angle).collect()
}
