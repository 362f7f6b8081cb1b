//! Virtual polarization bench.
//!
//! Two linearly polarized beams of different wavelengths are prepared in
//! orthogonal states |ψ⟩ and |ψ⊥⟩ by half-wave plates, pass a compensating
//! retarder and are combined on a beam splitter. Because the wavelengths
//! differ, intensities add without an interference term and the combined
//! beam is the mixture (I₁|ψ⟩⟨ψ| + I₂|ψ⊥⟩⟨ψ⊥|)/(I₁ + I₂). The polarimeter
//! projects onto H, V, +, −, R and L with multiplicative Gaussian intensity
//! noise; Stokes parameters and the density matrix are reconstructed from the
//! mean intensities.
//!
//! Only the linear projectors are needed for S1 and S2, but S3 (and with it
//! the σy distribution) requires the circular pair as well, so all six are
//! simulated.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::Path;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_domain, Error, Result};
use crate::majorization::{
    compare_curves, lorenz_curve, three_obs_bound_curve, MajorizationReport,
};
use crate::qubit::{
    fidelity, make_state, measure_probs, DensityMatrix, Observable, ProbPair, SpectrumPair,
    StokesVector, STATE_TOL,
};

pub type JonesMatrix = Matrix2<Complex64>;
pub type JonesVector = Vector2<Complex64>;

/// Multiple of the propagated standard deviation allowed as slack when
/// checking majorization on simulated data.
pub const SIGMA_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveplateKind {
    Half,
    Quarter,
}

impl WaveplateKind {
    pub fn retardance(&self) -> f64 {
        match self {
            Self::Half => PI,
            Self::Quarter => FRAC_PI_2,
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Linear retarder with fast axis at `axis_angle` and phase delay `retardance`,
/// R(θ)·diag(e^{−iδ/2}, e^{iδ/2})·R(−θ).
pub fn retarder(axis_angle: f64, retardance: f64) -> JonesMatrix {
    let (s, co) = axis_angle.sin_cos();
    let rot = Matrix2::new(c(co), c(-s), c(s), c(co));
    let half = Complex64::new(0.0, 0.5 * retardance);
    let core = Matrix2::new((-half).exp(), c(0.0), c(0.0), half.exp());
    rot * core * rot.transpose()
}

/// Half- or quarter-wave plate with an additive retardance error.
pub fn retarder_jones(kind: WaveplateKind, axis_angle: f64, retardance_err: f64) -> JonesMatrix {
    retarder(axis_angle, kind.retardance() + retardance_err)
}

/// A beam: intensity and normalized Jones vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamState {
    pub intensity: f64,
    pub jones: JonesVector,
}

impl BeamState {
    pub fn new(intensity: f64, jones: JonesVector) -> Result<Self> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return out_of_domain("intensity", intensity, "[0, ∞)");
        }
        let norm = jones.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Unphysical("zero Jones vector".into()));
        }
        Ok(Self {
            intensity,
            jones: jones / c(norm),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    /// Preparation angle α of |ψ⟩ = cos α|H⟩ + sin α|V⟩, radians.
    pub alpha: f64,
    /// Intensity of the beam prepared in |ψ⟩.
    pub i1: f64,
    /// Intensity of the beam prepared in |ψ⊥⟩.
    pub i2: f64,
    /// One-sigma relative intensity fluctuation.
    pub noise_rel: f64,
    pub retardance_err_hwp: f64,
    pub retardance_err_qwp: f64,
    /// Samples per projector.
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            i1: 0.5,
            i2: 0.5,
            noise_rel: 0.01,
            retardance_err_hwp: 0.0,
            retardance_err_qwp: 0.0,
            repeats: 100,
            seed: 0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.alpha,
            self.i1,
            self.i2,
            self.noise_rel,
            self.retardance_err_hwp,
            self.retardance_err_qwp,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Config("non-finite value".into()));
        }
        if self.i1 < 0.0 || self.i2 < 0.0 || !(self.i1 + self.i2 > 0.0) {
            return Err(Error::Config(format!(
                "intensities must be non-negative with a positive total (i1 = {}, i2 = {})",
                self.i1, self.i2
            )));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.noise_rel < 0.0 {
            return Err(Error::Config(format!("noise_rel = {} < 0", self.noise_rel)));
        }
        Ok(())
    }

    /// Parses flat `key = value` text. Missing keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// λ₁ = I₁/(I₁ + I₂).
    pub fn lambda1(&self) -> f64 {
        self.i1 / (self.i1 + self.i2)
    }

    /// The state this configuration is meant to prepare.
    pub fn target_state(&self) -> Result<DensityMatrix> {
        make_state(self.lambda1(), self.alpha)
    }
}

/// Polarimeter projectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projector {
    H,
    V,
    Plus,
    Minus,
    R,
    L,
}

impl Projector {
    pub const ALL: [Projector; 6] = [
        Projector::H,
        Projector::V,
        Projector::Plus,
        Projector::Minus,
        Projector::R,
        Projector::L,
    ];

    /// |R/L⟩ = (|H⟩ ∓ i|V⟩)/√2.
    pub fn ket(&self) -> JonesVector {
        let r = FRAC_1_SQRT_2;
        match self {
            Self::H => Vector2::new(c(1.0), c(0.0)),
            Self::V => Vector2::new(c(0.0), c(1.0)),
            Self::Plus => Vector2::new(c(r), c(r)),
            Self::Minus => Vector2::new(c(r), c(-r)),
            Self::R => Vector2::new(c(r), Complex64::new(0.0, -r)),
            Self::L => Vector2::new(c(r), Complex64::new(0.0, r)),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::H => "H",
            Self::V => "V",
            Self::Plus => "+",
            Self::Minus => "-",
            Self::R => "R",
            Self::L => "L",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Beam 1 in |ψ⟩ and beam 2 in |ψ⊥⟩, each made from |H⟩ by a half-wave
/// plate at α/2 (resp. α/2 + π/4). The compensating quarter-wave plate is
/// taken to cancel the beam splitter exactly, leaving only its retardance
/// offset about the horizontal axis.
pub fn prepare_beams(cfg: &BenchConfig) -> Result<(BeamState, BeamState)> {
    cfg.validate()?;
    let h = Projector::H.ket();
    let compensator = retarder(0.0, cfg.retardance_err_qwp);
    let hwp1 = retarder_jones(WaveplateKind::Half, 0.5 * cfg.alpha, cfg.retardance_err_hwp);
    let hwp2 = retarder_jones(
        WaveplateKind::Half,
        0.5 * cfg.alpha + FRAC_PI_4,
        cfg.retardance_err_hwp,
    );
    Ok((
        BeamState::new(cfg.i1, compensator * hwp1 * h)?,
        BeamState::new(cfg.i2, compensator * hwp2 * h)?,
    ))
}

/// Incoherent sum of two beams, normalized; returns the state and total intensity.
pub fn combine_effective_state(b1: &BeamState, b2: &BeamState) -> Result<(DensityMatrix, f64)> {
    let total = b1.intensity + b2.intensity;
    if !(total > 0.0) {
        return Err(Error::ZeroIntensity);
    }
    let m = (b1.jones * b1.jones.adjoint()) * c(b1.intensity)
        + (b2.jones * b2.jones.adjoint()) * c(b2.intensity);
    let rho = DensityMatrix::from_matrix(&(m / c(total)))?;
    Ok((rho, total))
}

/// I = Σᵢ Iᵢ|⟨x|ψᵢ⟩|², without noise.
pub fn noiseless_intensity(beams: &(BeamState, BeamState), projector: Projector) -> f64 {
    let x = projector.ket();
    [&beams.0, &beams.1]
        .iter()
        .map(|b| b.intensity * x.dotc(&b.jones).norm_sqr())
        .sum()
}

/// One noisy detector reading: the noiseless value times (1 + g),
/// g ~ N(0, noise_rel²), clamped at zero.
pub fn projected_intensity<R: Rng + ?Sized>(
    beams: &(BeamState, BeamState),
    projector: Projector,
    noise_rel: f64,
    rng: &mut R,
) -> f64 {
    let ideal = noiseless_intensity(beams, projector);
    if noise_rel == 0.0 {
        return ideal;
    }
    let g: f64 = Normal::new(0.0, noise_rel)
        .expect("noise_rel is finite and non-negative")
        .sample(rng);
    (ideal * (1.0 + g)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    pub projector: Projector,
    pub mean_intensity: f64,
    /// Sample standard deviation of the individual readings.
    pub std_intensity: f64,
}

/// Outcome of one simulated tomography run.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEstimate {
    pub stokes: StokesVector,
    pub rho: DensityMatrix,
    pub records: Vec<MeasurementRecord>,
    /// Set when the raw Stokes vector lay outside the Poincaré sphere and was
    /// rescaled onto it.
    pub projected: bool,
    repeats: usize,
}

/// Probability blocks of σz, σx, σy as (projector a, projector b, sign of the
/// first component), i.e. P = ½ + sign·(I_a − I_b)/2S0 then its complement.
const BLOCKS: [(Projector, Projector, f64); 3] = [
    (Projector::H, Projector::V, 1.0),
    (Projector::Plus, Projector::Minus, 1.0),
    (Projector::R, Projector::L, -1.0),
];

impl StateEstimate {
    fn means(&self) -> [f64; 6] {
        let mut m = [0.0; 6];
        for r in &self.records {
            m[r.projector.index()] = r.mean_intensity;
        }
        m
    }

    /// Standard errors of the six mean intensities.
    fn standard_errors(&self) -> [f64; 6] {
        let mut s = [0.0; 6];
        let n = (self.repeats as f64).sqrt();
        for r in &self.records {
            s[r.projector.index()] = r.std_intensity / n;
        }
        s
    }

    /// Distributions of σz, σx and σy from the reconstructed state.
    pub fn probabilities(&self) -> [ProbPair; 3] {
        [
            measure_probs(&self.rho, &Observable::sigma_z()),
            measure_probs(&self.rho, &Observable::sigma_x()),
            measure_probs(&self.rho, &Observable::sigma_y()),
        ]
    }

    /// The six concatenated probabilities in σz, σx, σy order.
    pub fn prob_vector(&self) -> Vec<f64> {
        self.probabilities()
            .iter()
            .flat_map(ProbPair::as_array)
            .collect()
    }

    /// Gradients of each of the six probabilities with respect to the six
    /// mean intensities.
    fn gradients(&self) -> [[f64; 6]; 6] {
        let m = self.means();
        let s0 = m[Projector::H.index()] + m[Projector::V.index()];
        let mut g = [[0.0; 6]; 6];
        if !(s0 > 0.0) {
            return g;
        }
        for (block, (a, b, sign)) in BLOCKS.iter().enumerate() {
            let d = m[a.index()] - m[b.index()];
            let mut first = [0.0; 6];
            first[a.index()] += sign / (2.0 * s0);
            first[b.index()] -= sign / (2.0 * s0);
            let ds0 = -sign * d / (2.0 * s0 * s0);
            first[Projector::H.index()] += ds0;
            first[Projector::V.index()] += ds0;
            g[2 * block] = first;
            g[2 * block + 1] = first.map(|x| -x);
        }
        g
    }

    fn sigma_of(&self, grad: &[f64; 6]) -> f64 {
        grad.iter()
            .zip(self.standard_errors())
            .map(|(g, s)| (g * s).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// One-sigma error bar of p₊ (equal to that of p₋) for σz, σx, σy.
    pub fn prob_errors(&self) -> [f64; 3] {
        let g = self.gradients();
        [0, 2, 4].map(|i| self.sigma_of(&g[i]))
    }

    /// Lorenz points of the probability vector with one-sigma error bars.
    pub fn lorenz_with_errors(&self) -> (Vec<f64>, Vec<f64>) {
        let p = self.prob_vector();
        let g = self.gradients();
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&i, &j| p[j].partial_cmp(&p[i]).unwrap_or(std::cmp::Ordering::Equal));
        let mut sums = Vec::with_capacity(6);
        let mut sigmas = Vec::with_capacity(6);
        let mut acc = 0.0;
        let mut grad = [0.0; 6];
        for &i in &order {
            acc += p[i];
            for (gk, gi) in grad.iter_mut().zip(&g[i]) {
                *gk += gi;
            }
            sums.push(acc);
            sigmas.push(self.sigma_of(&grad));
        }
        (sums, sigmas)
    }
}

fn sample_stats(samples: &[f64]) -> (f64, f64) {
    // Shifted by the first sample so that constant data gives exact results.
    let n = samples.len() as f64;
    let shift = samples[0];
    let offset = samples.iter().map(|x| x - shift).sum::<f64>() / n;
    if samples.len() < 2 {
        return (shift, 0.0);
    }
    let var = samples
        .iter()
        .map(|x| (x - shift - offset).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (shift + offset, var.sqrt())
}

/// Seeded generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs the tomography with the generator seeded from `cfg.seed`.
pub fn estimate_state(cfg: &BenchConfig) -> Result<StateEstimate> {
    estimate_state_with(cfg, &mut substream(cfg.seed, 0))
}

pub fn estimate_state_with<R: Rng + ?Sized>(
    cfg: &BenchConfig,
    rng: &mut R,
) -> Result<StateEstimate> {
    let beams = prepare_beams(cfg)?;
    let mut samples = vec![0.0; cfg.repeats];
    let records: Vec<MeasurementRecord> = Projector::ALL
        .iter()
        .map(|&projector| {
            for s in samples.iter_mut() {
                *s = projected_intensity(&beams, projector, cfg.noise_rel, rng);
            }
            let (mean_intensity, std_intensity) = sample_stats(&samples);
            MeasurementRecord {
                projector,
                mean_intensity,
                std_intensity,
            }
        })
        .collect();
    let m = |p: Projector| records[p.index()].mean_intensity;
    let s0 = m(Projector::H) + m(Projector::V);
    if !(s0 > 0.0) {
        return Err(Error::ZeroIntensity);
    }
    let raw = StokesVector {
        s0,
        s1: m(Projector::H) - m(Projector::V),
        s2: m(Projector::Plus) - m(Projector::Minus),
        s3: m(Projector::R) - m(Projector::L),
    };
    let (stokes, moved) = raw.project_physical();
    // Rounding alone can put a pure state a hair outside the sphere.
    let projected = moved && raw.degree_of_polarization() > 1.0 + STATE_TOL;
    let stokes = StokesVector::new(stokes.s0, stokes.s1, stokes.s2, stokes.s3)?;
    Ok(StateEstimate {
        rho: stokes.to_density()?,
        stokes,
        records,
        projected,
        repeats: cfg.repeats,
    })
}

/// One grid point of a simulated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub lambda1: f64,
    pub alpha: f64,
    pub estimate: StateEstimate,
    pub target: DensityMatrix,
    pub fidelity: f64,
    /// Lorenz points of the measured probability vector.
    pub lorenz: Vec<f64>,
    pub lorenz_sigma: Vec<f64>,
    /// Lorenz points of the bound for the nominal spectrum (λ₁, 1 − λ₁).
    pub bound: Vec<f64>,
    /// Majorization check with per-k tolerance 3σ + 1e−9.
    pub report: MajorizationReport,
}

impl BenchRow {
    /// Set when the measured curve exceeds the bound by more than the
    /// statistical tolerance.
    pub fn outlier(&self) -> bool {
        !self.report.holds
    }
}

/// Simulates every (λ₁, α) grid point with the noise settings of `template`.
///
/// The total intensity of `template` is split as (λ₁, 1 − λ₁). Row `i` uses
/// substream `i` of `template.seed`, so rows do not depend on scheduling.
pub fn run_experiment(grid: &[(f64, f64)], template: &BenchConfig) -> Result<Vec<BenchRow>> {
    template.validate()?;
    let total = template.i1 + template.i2;
    grid.par_iter()
        .enumerate()
        .map(|(index, &(lambda1, alpha))| {
            if !(0.0..=1.0).contains(&lambda1) {
                return out_of_domain("lambda1", lambda1, "[0, 1]");
            }
            let cfg = BenchConfig {
                alpha,
                i1: lambda1 * total,
                i2: (1.0 - lambda1) * total,
                ..template.clone()
            };
            let estimate = estimate_state_with(&cfg, &mut substream(template.seed, index as u64))?;
            let target = make_state(lambda1, alpha)?;
            let (lorenz, lorenz_sigma) = estimate.lorenz_with_errors();
            let bound = three_obs_bound_curve(&SpectrumPair::from_weight(lambda1)?);
            let candidate = lorenz_curve(&estimate.prob_vector())?;
            let report = compare_curves(&bound, &candidate, |k| {
                SIGMA_MULTIPLIER * lorenz_sigma[k] + crate::majorization::ANALYTIC_TOL
            });
            Ok(BenchRow {
                lambda1,
                alpha,
                fidelity: fidelity(&estimate.rho, &target),
                target,
                lorenz,
                lorenz_sigma,
                bound: bound.partial_sums,
                report,
                estimate,
            })
        })
        .collect()
}
