//! Qubit states, Stokes parameters and dichotomic observables.
//!
//! States are stored in the |H⟩/|V⟩ polarization basis. The Pauli operators
//! are identified with the polarization operators as σz = |H⟩⟨H| − |V⟩⟨V|,
//! σx = |H⟩⟨V| + |V⟩⟨H| and σy = −(i|H⟩⟨V| − i|V⟩⟨H|), so the Bloch vector of
//! a state is (S2, −S3, S1)/S0 in terms of its Stokes parameters.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{out_of_domain, Error, Result};

/// Absolute tolerance used for trace, positivity and normalization checks.
pub const STATE_TOL: f64 = 1e-12;

/// A 2×2 Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    a_hh: f64,
    a_vv: f64,
    a_hv: Complex64,
}

impl DensityMatrix {
    /// Builds a state from its H-diagonal, V-diagonal and ⟨H|ρ|V⟩ elements.
    pub fn new(a_hh: f64, a_vv: f64, a_hv: Complex64) -> Result<Self> {
        if !(a_hh.is_finite() && a_vv.is_finite() && a_hv.re.is_finite() && a_hv.im.is_finite()) {
            return Err(Error::Unphysical("non-finite matrix element".into()));
        }
        if (a_hh + a_vv - 1.0).abs() > STATE_TOL {
            return Err(Error::Unphysical(format!("trace is {}", a_hh + a_vv)));
        }
        if a_hh < -STATE_TOL || a_vv < -STATE_TOL {
            return Err(Error::Unphysical(format!(
                "negative diagonal ({a_hh}, {a_vv})"
            )));
        }
        let (a_hh, a_vv) = (a_hh.max(0.0), a_vv.max(0.0));
        if a_hv.norm_sqr() > a_hh * a_vv + STATE_TOL {
            return Err(Error::Unphysical(format!(
                "|ρ_HV|² = {} exceeds ρ_HH·ρ_VV = {}",
                a_hv.norm_sqr(),
                a_hh * a_vv
            )));
        }
        Ok(Self { a_hh, a_vv, a_hv })
    }

    pub fn diag(a_hh: f64, a_vv: f64) -> Result<Self> {
        Self::new(a_hh, a_vv, Complex64::new(0.0, 0.0))
    }

    pub fn maximally_mixed() -> Self {
        Self {
            a_hh: 0.5,
            a_vv: 0.5,
            a_hv: Complex64::new(0.0, 0.0),
        }
    }

    /// State with Bloch vector `r = (⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`, |r| ≤ 1.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let [x, y, z] = r;
        let len2 = x * x + y * y + z * z;
        if !len2.is_finite() || len2 > 1.0 + STATE_TOL {
            return Err(Error::Unphysical(format!(
                "Bloch vector length² {len2} > 1"
            )));
        }
        Self::new(
            0.5 * (1.0 + z),
            0.5 * (1.0 - z),
            Complex64::new(0.5 * x, -0.5 * y),
        )
    }

    /// Pure state |ψ⟩⟨ψ| for a (not necessarily normalized) ket in the H/V basis.
    pub fn from_ket(h: Complex64, v: Complex64) -> Result<Self> {
        let norm2 = h.norm_sqr() + v.norm_sqr();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::Unphysical("zero ket".into()));
        }
        Self::new(
            h.norm_sqr() / norm2,
            v.norm_sqr() / norm2,
            h * v.conj() / norm2,
        )
    }

    /// Validates an arbitrary 2×2 complex matrix, including Hermiticity.
    pub fn from_matrix(m: &Matrix2<Complex64>) -> Result<Self> {
        let herm = (m[(0, 1)] - m[(1, 0)].conj()).norm() + m[(0, 0)].im.abs() + m[(1, 1)].im.abs();
        if herm > STATE_TOL {
            return Err(Error::Unphysical(format!("not Hermitian (defect {herm})")));
        }
        Self::new(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)])
    }

    pub fn a_hh(&self) -> f64 {
        self.a_hh
    }

    pub fn a_vv(&self) -> f64 {
        self.a_vv
    }

    pub fn a_hv(&self) -> Complex64 {
        self.a_hv
    }

    pub fn to_matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(self.a_hh, 0.0),
            self.a_hv,
            self.a_hv.conj(),
            Complex64::new(self.a_vv, 0.0),
        )
    }

    /// Expectation values (⟨σx⟩, ⟨σy⟩, ⟨σz⟩).
    pub fn bloch(&self) -> [f64; 3] {
        [
            2.0 * self.a_hv.re,
            -2.0 * self.a_hv.im,
            self.a_hh - self.a_vv,
        ]
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        self.a_hh * self.a_hh + self.a_vv * self.a_vv + 2.0 * self.a_hv.norm_sqr()
    }

    /// Stokes vector with overall scale `scale` (the detector/intensity constant).
    pub fn to_stokes(&self, scale: f64) -> Result<StokesVector> {
        if !(scale > 0.0) || !scale.is_finite() {
            return out_of_domain("scale", scale, "(0, ∞)");
        }
        Ok(StokesVector {
            s0: scale * (self.a_hh + self.a_vv),
            s1: scale * (self.a_hh - self.a_vv),
            s2: scale * 2.0 * self.a_hv.re,
            s3: scale * 2.0 * self.a_hv.im,
        })
    }

    /// Eigenvalues in closed form, smallest first.
    pub fn spectrum(&self) -> SpectrumPair {
        if self.a_hv.norm_sqr() == 0.0 {
            return SpectrumPair {
                lambda1: self.a_hh.min(self.a_vv),
                lambda2: self.a_hh.max(self.a_vv),
            };
        }
        let mean = 0.5 * (self.a_hh + self.a_vv);
        let half_gap = (0.5 * (self.a_hh - self.a_vv)).hypot(self.a_hv.norm());
        let lo = (mean - half_gap).clamp(0.0, 1.0);
        let hi = (mean + half_gap).clamp(0.0, 1.0);
        SpectrumPair {
            lambda1: lo,
            lambda2: hi,
        }
    }
}

/// The mixture λ₁|ψ⟩⟨ψ| + (1 − λ₁)|ψ⊥⟩⟨ψ⊥| with |ψ⟩ = cos α|H⟩ + sin α|V⟩
/// and |ψ⊥⟩ = −sin α|H⟩ + cos α|V⟩.
pub fn make_state(lambda1: f64, alpha: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&lambda1) {
        return out_of_domain("lambda1", lambda1, "[0, 1]");
    }
    if !alpha.is_finite() {
        return out_of_domain("alpha", alpha, "finite");
    }
    let lambda2 = 1.0 - lambda1;
    let (s, c) = alpha.sin_cos();
    DensityMatrix::new(
        lambda1 * c * c + lambda2 * s * s,
        lambda1 * s * s + lambda2 * c * c,
        Complex64::new((lambda1 - lambda2) * c * s, 0.0),
    )
}

/// Polarization Stokes parameters (S0, S1, S2, S3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn new(s0: f64, s1: f64, s2: f64, s3: f64) -> Result<Self> {
        let s = Self { s0, s1, s2, s3 };
        if !(s0 > 0.0) || !s0.is_finite() {
            return out_of_domain("s0", s0, "(0, ∞)");
        }
        if !(s1.is_finite() && s2.is_finite() && s3.is_finite()) {
            return Err(Error::Unphysical("non-finite Stokes component".into()));
        }
        if s.polarized_sq() > s0 * s0 * (1.0 + STATE_TOL) {
            return Err(Error::Unphysical(format!(
                "polarized intensity {} exceeds S0 = {s0}",
                s.polarized_sq().sqrt()
            )));
        }
        Ok(s)
    }

    fn polarized_sq(&self) -> f64 {
        self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3
    }

    /// |(S1, S2, S3)| / S0.
    pub fn degree_of_polarization(&self) -> f64 {
        self.polarized_sq().sqrt() / self.s0
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        if self.polarized_sq() > self.s0 * self.s0 * (1.0 + STATE_TOL) {
            return Err(Error::Unphysical(format!(
                "degree of polarization {} > 1",
                self.degree_of_polarization()
            )));
        }
        let inv = 1.0 / self.s0;
        DensityMatrix::new(
            0.5 * (1.0 + self.s1 * inv),
            0.5 * (1.0 - self.s1 * inv),
            Complex64::new(0.5 * self.s2 * inv, 0.5 * self.s3 * inv),
        )
    }

    /// Rescales (S1, S2, S3) onto the Poincaré sphere when the degree of
    /// polarization exceeds one. Returns the vector and whether it moved.
    pub fn project_physical(&self) -> (Self, bool) {
        let p = self.polarized_sq().sqrt();
        if p <= self.s0 {
            return (*self, false);
        }
        let k = self.s0 / p;
        (
            Self {
                s0: self.s0,
                s1: self.s1 * k,
                s2: self.s2 * k,
                s3: self.s3 * k,
            },
            true,
        )
    }
}

/// Eigenvalues of a qubit state, `lambda1 ≤ lambda2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SpectrumPair {
    /// Spectrum {w, 1 − w}, reordered so that `lambda1 ≤ lambda2`.
    pub fn from_weight(w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return out_of_domain("eigenvalue", w, "[0, 1]");
        }
        let other = 1.0 - w;
        Ok(Self {
            lambda1: w.min(other),
            lambda2: w.max(other),
        })
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.lambda1, self.lambda2]
    }
}

/// A dichotomic (±1) observable n̂·σ⃗.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    nx: f64,
    ny: f64,
    nz: f64,
}

impl Observable {
    pub fn new(nx: f64, ny: f64, nz: f64) -> Result<Self> {
        let n2 = nx * nx + ny * ny + nz * nz;
        if !((n2 - 1.0).abs() <= STATE_TOL) {
            return Err(Error::OutOfDomain {
                what: "|n|²",
                value: n2,
                domain: "1 ± 1e-12",
            });
        }
        Ok(Self { nx, ny, nz })
    }

    pub const fn sigma_x() -> Self {
        Self {
            nx: 1.0,
            ny: 0.0,
            nz: 0.0,
        }
    }

    pub const fn sigma_y() -> Self {
        Self {
            nx: 0.0,
            ny: 1.0,
            nz: 0.0,
        }
    }

    pub const fn sigma_z() -> Self {
        Self {
            nx: 0.0,
            ny: 0.0,
            nz: 1.0,
        }
    }

    pub fn direction(&self) -> [f64; 3] {
        [self.nx, self.ny, self.nz]
    }

    /// Matrix n̂·σ⃗ in the H/V basis.
    pub fn to_matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(self.nz, 0.0),
            Complex64::new(self.nx, -self.ny),
            Complex64::new(self.nx, self.ny),
            Complex64::new(-self.nz, 0.0),
        )
    }
}

/// X(θ) = sin θ·σx + cos θ·σz together with a flag set when θ lies in
/// (π/2, π), outside the range the bound formulas are stated on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedObservable {
    pub observable: Observable,
    pub extended_range: bool,
}

pub fn observable_x(theta: f64) -> Result<RotatedObservable> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return out_of_domain("theta", theta, "(0, π)");
    }
    let (s, c) = theta.sin_cos();
    Ok(RotatedObservable {
        observable: Observable {
            nx: s,
            ny: 0.0,
            nz: c,
        },
        extended_range: theta > std::f64::consts::FRAC_PI_2 + STATE_TOL,
    })
}

/// Outcome probabilities (p₊, p₋) of a dichotomic measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbPair {
    pub p_plus: f64,
    pub p_minus: f64,
}

impl ProbPair {
    /// Rounding noise down to −1e−12 is clamped to zero and the pair
    /// renormalized; anything more negative is rejected.
    pub fn new(p_plus: f64, p_minus: f64) -> Result<Self> {
        for (index, value) in [p_plus, p_minus].into_iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < -STATE_TOL {
                return Err(Error::NegativeComponent { index, value });
            }
        }
        let (p, m) = (p_plus.max(0.0), p_minus.max(0.0));
        let total = p + m;
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Unphysical(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            p_plus: p / total,
            p_minus: m / total,
        })
    }

    /// From an expectation value ⟨O⟩ = p₊ − p₋, clamped to [−1, 1].
    pub(crate) fn from_expectation(e: f64) -> Self {
        let e = e.clamp(-1.0, 1.0);
        Self {
            p_plus: 0.5 * (1.0 + e),
            p_minus: 0.5 * (1.0 - e),
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.p_plus, self.p_minus]
    }
}

/// Probabilities p± = (1 ± n̂·⟨σ⃗⟩)/2.
pub fn measure_probs(rho: &DensityMatrix, o: &Observable) -> ProbPair {
    let r = rho.bloch();
    ProbPair::from_expectation(dot(&o.direction(), &r))
}

/// Shannon entropy in bits, with 0·log₂0 = 0. The input need not sum to one.
///
/// Terms are summed in sorted order, so the result is bitwise invariant
/// under permutations of `v`.
pub fn shannon_entropy(v: &[f64]) -> Result<f64> {
    for (index, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if x < 0.0 {
            return Err(Error::NegativeComponent { index, value: x });
        }
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(0.0 - sorted.iter().map(|&x| plogp(x)).sum::<f64>())
}

/// x·log₂x with the 0·log₂0 = 0 convention.
#[inline]
pub(crate) fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

pub fn binary_entropy(p: f64) -> f64 {
    -(plogp(p) + plogp(1.0 - p))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let sp = rho.spectrum();
    -(plogp(sp.lambda1) + plogp(sp.lambda2))
}

/// F(ρ, σ) = tr(ρσ) + √(1 − tr ρ²)·√(1 − tr σ²).
pub fn fidelity(rho: &DensityMatrix, rho1: &DensityMatrix) -> f64 {
    let overlap = 0.5 * (1.0 + dot(&rho.bloch(), &rho1.bloch()));
    let mixed = |r: &DensityMatrix| (1.0 - r.purity()).max(0.0).sqrt();
    (overlap + mixed(rho) * mixed(rho1)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobertsonTerms {
    /// ΔA²·ΔB²
    pub lhs: f64,
    /// ¼|⟨[A, B]⟩|²
    pub rhs: f64,
}

/// Both sides of the variance–commutator inequality for two dichotomic observables.
///
/// For A = a·σ and B = b·σ, A² = B² = I so ΔA² = 1 − ⟨A⟩², and
/// [A, B] = 2i (a × b)·σ.
pub fn robertson_check(rho: &DensityMatrix, a: &Observable, b: &Observable) -> RobertsonTerms {
    let r = rho.bloch();
    let (an, bn) = (a.direction(), b.direction());
    let ea = dot(&an, &r);
    let eb = dot(&bn, &r);
    let commutator = dot(&cross(&an, &bn), &r);
    RobertsonTerms {
        lhs: (1.0 - ea * ea) * (1.0 - eb * eb),
        rhs: commutator * commutator,
    }
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
