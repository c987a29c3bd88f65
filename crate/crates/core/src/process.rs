//! Process specifications X = -ct + Z + C (+ optional Brownian part).
//!
//! `-X` is spectrally negative with Laplace exponent
//! ψ(λ) = aλ²/2 + cλ - φ_Z(λ) - φ_C(λ), which is strictly convex on [0, ∞)
//! with ψ(0) = 0 and right derivative -E[X₁] at zero. All fluctuation
//! quantities in this crate are driven by ψ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::JumpMeasure;

/// Specification of X = -ct + Z_t + C_t (+ √a·B_t, centered).
///
/// The diffusion coefficient `a` may be positive only for specs fed to the
/// approximation module; exact path simulation requires `a = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    /// Downward drift rate c > 0.
    pub drift: f64,
    /// Lévy measure of the Z subordinator.
    pub z: JumpMeasure,
    /// Lévy measure of the C subordinator, if present.
    pub c: Option<JumpMeasure>,
    /// Brownian coefficient a ≥ 0 (variance per unit time).
    pub diffusion: f64,
}

impl ProcessSpec {
    pub fn new(drift: f64, z: JumpMeasure, c: Option<JumpMeasure>) -> Result<Self> {
        Self::with_diffusion(drift, z, c, 0.0)
    }

    pub fn with_diffusion(
        drift: f64,
        z: JumpMeasure,
        c: Option<JumpMeasure>,
        diffusion: f64,
    ) -> Result<Self> {
        if !(drift > 0.0) || !drift.is_finite() {
            return Err(Error::construction(format!("drift must be > 0, got {drift}")));
        }
        if !(diffusion >= 0.0) || !diffusion.is_finite() {
            return Err(Error::construction(format!("diffusion must be >= 0, got {diffusion}")));
        }
        Ok(ProcessSpec { drift, z, c, diffusion })
    }

    /// The Y part of the spec (Z and drift only, C removed).
    pub fn without_c(&self) -> ProcessSpec {
        ProcessSpec {
            drift: self.drift,
            z: self.z.clone(),
            c: None,
            diffusion: self.diffusion,
        }
    }

    pub fn mu_z(&self) -> f64 {
        self.z.mean()
    }

    pub fn mu_c(&self) -> f64 {
        self.c.as_ref().map_or(0.0, |m| m.mean())
    }

    /// γ = E[X₁] = -c + μ_Z + μ_C (the Brownian part is centered).
    pub fn mean_drift(&self) -> f64 {
        -self.drift + self.mu_z() + self.mu_c()
    }

    /// ψ(λ) = aλ²/2 + cλ - φ_Z(λ) - φ_C(λ) for λ ≥ 0.
    pub fn psi(&self, lam: f64) -> Result<f64> {
        if !(lam >= 0.0) {
            return Err(Error::domain(format!("psi requires lambda >= 0, got {lam}")));
        }
        Ok(self.psi_unchecked(lam))
    }

    pub(crate) fn psi_unchecked(&self, lam: f64) -> f64 {
        let jumps = self.z.exponent_unchecked(lam)
            + self.c.as_ref().map_or(0.0, |m| m.exponent_unchecked(lam));
        0.5 * self.diffusion * lam * lam + self.drift * lam - jumps
    }

    /// ψ'(λ) = aλ + c - φ_Z'(λ) - φ_C'(λ); ψ'(0⁺) = -E[X₁].
    pub fn psi_derivative(&self, lam: f64) -> f64 {
        let jumps = self.z.exponent_derivative(lam)
            + self.c.as_ref().map_or(0.0, |m| m.exponent_derivative(lam));
        self.diffusion * lam + self.drift - jumps
    }

    /// Cumulant κ(r) = log E[e^{r X₁}] = ar²/2 - cr + ∫(e^{rx}-1)ν_X(dx).
    ///
    /// Defined for r below the exponential-moment bound of the jump parts;
    /// equals ψ evaluated on the negative axis.
    pub fn cumulant(&self, r: f64) -> Result<f64> {
        let mut k = 0.5 * self.diffusion * r * r - self.drift * r + self.z.mgf_term(r)?;
        if let Some(cm) = &self.c {
            k += cm.mgf_term(r)?;
        }
        Ok(k)
    }

    /// Sup of r for which the cumulant is finite.
    pub fn cumulant_bound(&self) -> f64 {
        let zb = self.z.exp_moment_bound();
        let cb = self.c.as_ref().map_or(f64::INFINITY, |m| m.exp_moment_bound());
        zb.min(cb)
    }

    /// ∫ x² ν_X(dx) + a, the second-moment ingredient of Markov bias bounds.
    pub fn variance_rate(&self) -> f64 {
        self.diffusion
            + self.z.second_moment()
            + self.c.as_ref().map_or(0.0, |m| m.second_moment())
    }

    /// Combined jump intensity of both subordinators (total Lévy mass).
    pub fn total_jump_rate(&self) -> f64 {
        self.z.total_mass() + self.c.as_ref().map_or(0.0, |m| m.total_mass())
    }

    /// True iff both jump measures have finite mass (compound Poisson X).
    pub fn is_finite_activity(&self) -> bool {
        self.total_jump_rate().is_finite()
    }

    /// Checks ∫₀¹ x ν_C(dx) < ∞ and reports the integral.
    ///
    /// For spectrally positive Y the renewal function of the descending
    /// ladder height is linear, so this integrability (automatic for every
    /// supported measure) is exactly what guarantees σ > 0 a.s.
    pub fn sigma_positivity_check(&self) -> (bool, f64) {
        let integral = self.c.as_ref().map_or(0.0, |m| m.partial_mean(1.0));
        (integral.is_finite(), integral)
    }
}

/// A spec together with a pre-warmed ψ evaluation grid.
///
/// The grid doubles as the convexity certificate: second divided
/// differences on it must be nonnegative up to rounding.
#[derive(Debug, Clone)]
pub struct ExponentView {
    spec: ProcessSpec,
    grid: Vec<(f64, f64)>,
}

impl ExponentView {
    /// Warm the cache on λ ∈ {0, 0.1, …, 10}.
    pub fn new(spec: ProcessSpec) -> Self {
        let grid = (0..=100)
            .map(|i| {
                let lam = i as f64 * 0.1;
                (lam, spec.psi_unchecked(lam))
            })
            .collect();
        ExponentView { spec, grid }
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn psi(&self, lam: f64) -> Result<f64> {
        self.spec.psi(lam)
    }

    pub fn phi_z(&self, lam: f64) -> Result<f64> {
        self.spec.z.exponent(lam)
    }

    pub fn phi_c(&self, lam: f64) -> Result<f64> {
        match &self.spec.c {
            Some(m) => m.exponent(lam),
            None => Ok(0.0),
        }
    }

    pub fn grid(&self) -> &[(f64, f64)] {
        &self.grid
    }

    /// Minimum second divided difference of ψ over the cached grid.
    pub fn min_second_difference(&self) -> f64 {
        self.grid
            .windows(3)
            .map(|w| w[2].1 - 2.0 * w[1].1 + w[0].1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Convexity certificate: ψ(0) = 0 and second differences ≥ -1e-9.
    pub fn convexity_ok(&self) -> bool {
        self.grid[0].1.abs() < 1e-14 && self.min_second_difference() >= -1e-9
    }
}
