//! Closed-form fluctuation quantities for spectrally positive X.
//!
//! Everything here is driven by the convex dual exponent ψ and its largest
//! nonnegative root Φ(0):
//!
//! * Φ(0) = 0 exactly when E[X₁] ≤ 0, else the unique positive root of ψ;
//! * P(T_y < ∞) = e^(Φ(0)·y) for downward levels y ≤ 0;
//! * the probability that the first passage above 0 happens through a
//!   Z-jump is (1/c) ∫₀^∞ e^(-Φ(0)u) ν_Z(u,∞) du, with overshoot density
//!   (1/c)[ν_Z(x,∞) - Φ e^(Φx) ∫ₓ^∞ e^(-Φu) ν_Z(u,∞) du];
//! * when E[X₁] ≤ 0 these collapse to ν_Z(x,∞)/c and μ_Z/c — independent
//!   of C, which is the heart of the identity this crate verifies;
//! * E[e^(-λ sup Y)] = -γ λ/ψ_Y(λ) for γ = E[Y₁] < 0.
//!
//! Pure functions over immutable specs; safe for unrestricted parallel use.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::JumpMeasure;
use crate::process::ProcessSpec;
use crate::quad;
use crate::table::CdfTable;

/// Result of locating Φ(0), the largest root of ψ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootResult {
    pub phi0: f64,
    pub bracket: (f64, f64),
    pub iterations: u32,
    pub residual: f64,
}

/// Largest nonnegative solution of ψ(λ) = 0.
///
/// Returns 0 exactly when E[X₁] ≤ 0; the boundary E[X₁] = 0 makes generic
/// root-finders ill-conditioned (ψ'(0⁺) = 0), so the sign of the mean is
/// decided first and only the strictly-supercritical case is bracketed:
/// doubling expansion until ψ > 0, 80 bisection steps, then Newton polish.
pub fn phi_zero(spec: &ProcessSpec) -> Result<RootResult> {
    if spec.mean_drift() <= 0.0 {
        return Ok(RootResult { phi0: 0.0, bracket: (0.0, 0.0), iterations: 0, residual: 0.0 });
    }
    let mut hi = 1.0_f64;
    let mut iterations = 0u32;
    while spec.psi_unchecked(hi) <= 0.0 {
        hi *= 2.0;
        iterations += 1;
        if hi > 1e6 {
            return Err(Error::numeric(format!(
                "failed to bracket the positive root of psi below 1e6 (mean drift {}, psi(1e6)={})",
                spec.mean_drift(),
                spec.psi_unchecked(1e6)
            )));
        }
    }
    let bracket = (0.0, hi);
    let mut lo = 0.0_f64;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        if spec.psi_unchecked(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish against the analytic derivative.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let f = spec.psi_unchecked(x);
        let d = spec.psi_derivative(x);
        if d.abs() < 1e-300 {
            break;
        }
        let next = x - f / d;
        if next.is_finite() && next > bracket.0 && next < bracket.1 * 1.001 {
            x = next;
        } else {
            break;
        }
        iterations += 1;
    }
    let residual = spec.psi_unchecked(x).abs();
    Ok(RootResult { phi0: x, bracket, iterations, residual })
}

/// P(T_y < ∞) = e^(Φ(0)·y) for y ≤ 0. Equals 1 for all y when E[X₁] ≤ 0.
pub fn hitting_probability(spec: &ProcessSpec, y: f64) -> Result<f64> {
    if y > 0.0 {
        return Err(Error::domain(format!("hitting level must be <= 0, got {y}")));
    }
    let root = phi_zero(spec)?;
    Ok((root.phi0 * y).exp())
}

/// First passage over level 0 attributed to the Z stream: the probability
/// it happens at all, and the (conditional) overshoot law.
#[derive(Debug, Clone)]
pub struct CrossingLaw {
    /// Φ(0) of the full spec used in the formulas.
    pub phi0: f64,
    /// P(τ₀ < ∞ and the crossing jump came from Z).
    pub p_cross_by_z: f64,
    drift: f64,
    z: JumpMeasure,
    /// Tabulated conditional overshoot CDF (adaptive grid, ΔF < 1e-4).
    table: CdfTable,
}

impl CrossingLaw {
    /// ∫ₓ^∞ e^(-Φu) ν_Z(u,∞) du.
    fn weighted_tail_integral(z: &JumpMeasure, phi0: f64, x: f64) -> f64 {
        quad::integrate_to_inf(
            |u| (-phi0 * u).exp() * z.tail_unchecked(u.max(1e-300)),
            x,
            1e-11,
            1e-10,
        )
    }

    /// Unnormalized overshoot density at x > 0; integrates to `p_cross_by_z`.
    pub fn overshoot_density(&self, x: f64) -> f64 {
        let i = Self::weighted_tail_integral(&self.z, self.phi0, x);
        (self.z.tail_unchecked(x) - self.phi0 * (self.phi0 * x).exp() * i) / self.drift
    }

    /// Density of the overshoot given the crossing happened through Z.
    pub fn conditional_overshoot_density(&self, x: f64) -> f64 {
        self.overshoot_density(x) / self.p_cross_by_z
    }

    /// Exact (quadrature) conditional tail P(overshoot > x | crossing by Z).
    pub fn conditional_overshoot_tail(&self, x: f64) -> f64 {
        let i = Self::weighted_tail_integral(&self.z, self.phi0, x);
        (self.phi0 * x).exp() * i / (self.drift * self.p_cross_by_z)
    }

    /// Interpolated conditional CDF (for sampling and KS oracles).
    pub fn conditional_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.table.eval(x)
        }
    }

    pub fn cdf_table(&self) -> &CdfTable {
        &self.table
    }
}

/// P(the first passage above 0 is finite and made by a Z-jump):
/// (1/c) ∫₀^∞ e^(-Φ(0)u) ν_Z(u,∞) du, without tabulating the overshoot law.
pub fn crossing_probability(spec: &ProcessSpec) -> Result<f64> {
    let phi0 = phi_zero(spec)?.phi0;
    let i0 = CrossingLaw::weighted_tail_integral(&spec.z, phi0, 0.0);
    if !i0.is_finite() {
        return Err(Error::numeric("divergent tail integral in crossing probability"));
    }
    Ok(i0 / spec.drift)
}

/// Crossing law of the spec per the Φ-weighted tail formulas.
pub fn crossing_law(spec: &ProcessSpec) -> Result<CrossingLaw> {
    let root = phi_zero(spec)?;
    let phi0 = root.phi0;
    let z = spec.z.clone();
    let drift = spec.drift;
    let i0 = CrossingLaw::weighted_tail_integral(&z, phi0, 0.0);
    if !i0.is_finite() {
        return Err(Error::numeric("divergent tail integral in crossing law"));
    }
    let p = i0 / drift;
    // Tabulate the conditional CDF F(x) = 1 - e^{Φx} I(x) / (c p).
    let mut x_max = 1.0_f64;
    let cond_tail = |x: f64| {
        (phi0 * x).exp() * CrossingLaw::weighted_tail_integral(&z, phi0, x) / (drift * p)
    };
    while cond_tail(x_max) > 1e-9 && x_max < 1e9 {
        x_max *= 2.0;
    }
    let cdf = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            (1.0 - cond_tail(x)).clamp(0.0, 1.0)
        }
    };
    let table = CdfTable::build(cdf, 0.0, x_max, 1e-4);
    Ok(CrossingLaw { phi0, p_cross_by_z: p, drift, z, table })
}

/// Integrated-tail (equilibrium) law ν(x,∞)dx / μ of a finite-mean measure.
#[derive(Debug, Clone)]
pub struct EquilibriumLaw {
    measure: JumpMeasure,
    mean: f64,
}

impl EquilibriumLaw {
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.measure.tail_unchecked(x) / self.mean
        }
    }

    /// Closed-form CDF: (∫₀^x y ν(dy) + x ν(x,∞)) / μ.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        ((self.measure.partial_mean(x) + x * self.measure.tail_unchecked(x)) / self.mean).min(1.0)
    }

    pub fn tail(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    pub fn mean_of_measure(&self) -> f64 {
        self.mean
    }

    pub fn measure(&self) -> &JumpMeasure {
        &self.measure
    }
}

/// Conditional overshoot law of level 0 in the drift-dominated regime:
/// density ν_Z(x,∞)/μ_Z.
pub fn conditional_overshoot(z: &JumpMeasure) -> Result<EquilibriumLaw> {
    let mean = z.mean();
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::domain(format!(
            "equilibrium law needs a finite positive mean, got {mean}"
        )));
    }
    Ok(EquilibriumLaw { measure: z.clone(), mean })
}

/// Laplace transform of a geometric compound: (1-ρ)/(1-ρ·f(λ)).
///
/// `f` must be the Laplace transform of the positive summands (f(0) = 1).
pub fn geometric_sum_lt<F: Fn(f64) -> f64>(rho: f64, f: F, lam: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::domain(format!("geometric parameter must lie in (0,1), got {rho}")));
    }
    Ok((1.0 - rho) / (1.0 - rho * f(lam)))
}

/// E[e^(-λ sup Y)] = -γ λ / ψ_Y(λ) for a C-free spec with γ = E[Y₁] < 0.
pub fn sup_laplace_transform(y_spec: &ProcessSpec, lam: f64) -> Result<f64> {
    if y_spec.c.is_some() {
        return Err(Error::domain("sup transform applies to the Y part only (no C component)"));
    }
    let gamma = y_spec.mean_drift();
    if gamma >= 0.0 {
        return Err(Error::domain(format!(
            "sup transform requires E[Y1] < 0 strictly, got {gamma}"
        )));
    }
    if !(lam > 0.0) {
        return Err(Error::domain(format!("lambda must be > 0, got {lam}")));
    }
    Ok(-gamma * lam / y_spec.psi_unchecked(lam))
}

/// Closed-form supremum CDF for Y = -ct + (compound Poisson, Exp(θ) jumps):
/// atom 1-ρ at zero and F(x) = 1 - ρ e^(-θ(1-ρ)x) with ρ = rate/(θc).
pub fn exp_model_sup_cdf(c: f64, rate_z: f64, theta_z: f64, x: f64) -> Result<f64> {
    let rho = rate_z / (theta_z * c);
    if !(rho < 1.0) {
        return Err(Error::domain(format!(
            "exp-model supremum CDF requires mu_Z < c (rho {rho} >= 1)"
        )));
    }
    if x < 0.0 {
        return Err(Error::domain(format!("CDF argument must be >= 0, got {x}")));
    }
    Ok(1.0 - rho * (-theta_z * (1.0 - rho) * x).exp())
}

/// Adjustment (Lundberg) coefficient: the positive root of the cumulant
/// κ(r) = log E[e^{rX₁}] for a spec with E[X₁] < 0.
///
/// Returns `None` when no root exists below the exponential-moment bound
/// (callers fall back to a Markov-type bias bound).
pub fn adjustment_coefficient(spec: &ProcessSpec) -> Result<Option<f64>> {
    if spec.mean_drift() >= 0.0 {
        return Err(Error::domain("adjustment coefficient needs E[X1] < 0"));
    }
    let bound = spec.cumulant_bound();
    // Find hi with κ(hi) > 0; κ is convex with κ(0)=0, κ'(0)<0.
    let mut hi = None;
    if bound.is_finite() {
        for k in 1..=50 {
            let r = bound * (1.0 - 0.5_f64.powi(k));
            if let Ok(v) = spec.cumulant(r) {
                if v > 0.0 {
                    hi = Some(r);
                    break;
                }
            }
        }
    } else {
        let mut r = 1.0;
        for _ in 0..60 {
            if let Ok(v) = spec.cumulant(r) {
                if v > 0.0 {
                    hi = Some(r);
                    break;
                }
            }
            r *= 2.0;
        }
    }
    let Some(mut hi) = hi else { return Ok(None) };
    let mut lo = 0.0_f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = spec.cumulant(mid).unwrap_or(f64::INFINITY);
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
