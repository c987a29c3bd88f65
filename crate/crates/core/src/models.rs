//! Built-in model presets used by experiments and acceptance gates.

use crate::measure::JumpMeasure;
use crate::process::ProcessSpec;

/// A preset with a stable identifier.
#[derive(Debug, Clone)]
pub struct NamedModel {
    pub name: &'static str,
    pub spec: ProcessSpec,
}

/// c=1; Z: rate 0.5, Exp(1) jumps; C: rate 0.3, Exp(2) jumps. E[X₁] = -0.35.
pub fn model_a() -> ProcessSpec {
    ProcessSpec::new(
        1.0,
        JumpMeasure::exponential(0.5, 1.0).unwrap(),
        Some(JumpMeasure::exponential(0.3, 2.0).unwrap()),
    )
    .unwrap()
}

/// c=1; Z: rate 0.5, Exp(1); C: rate 1, Exp(1). E[X₁] = 0.5 with
/// μ_Z < c < μ_Z + μ_C — the regime where the two supremum laws differ.
pub fn model_b() -> ProcessSpec {
    ProcessSpec::new(
        1.0,
        JumpMeasure::exponential(0.5, 1.0).unwrap(),
        Some(JumpMeasure::exponential(1.0, 1.0).unwrap()),
    )
    .unwrap()
}

/// c=1; Z: rate 0.5, Exp(1); C: rate 1, Exp(2). E[X₁] = 0 exactly.
pub fn model_c() -> ProcessSpec {
    ProcessSpec::new(
        1.0,
        JumpMeasure::exponential(0.5, 1.0).unwrap(),
        Some(JumpMeasure::exponential(1.0, 2.0).unwrap()),
    )
    .unwrap()
}

/// c=1; Z: rate 2, Exp(1); no C. Drifts to +∞ (μ_Z > c), so the level-zero
/// passage is certain and Φ(0) = 1.
pub fn model_d() -> ProcessSpec {
    ProcessSpec::new(1.0, JumpMeasure::exponential(2.0, 1.0).unwrap(), None).unwrap()
}

/// Model A's Y perturbed by an infinite-activity gamma(0.2, 1) subordinator.
/// E[X₁] = -0.3; path simulation reaches it through truncation levels.
pub fn model_a_gamma_c() -> ProcessSpec {
    ProcessSpec::new(
        1.0,
        JumpMeasure::exponential(0.5, 1.0).unwrap(),
        Some(JumpMeasure::gamma(0.2, 1.0).unwrap()),
    )
    .unwrap()
}

/// Brownian motion with drift -1/2 (a=1, no jumps): sup is Exp(1).
pub fn brownian_y() -> ProcessSpec {
    ProcessSpec::with_diffusion(0.5, JumpMeasure::zero(), None, 1.0).unwrap()
}

/// All presets by name.
pub fn zoo() -> Vec<NamedModel> {
    vec![
        NamedModel { name: "A", spec: model_a() },
        NamedModel { name: "B", spec: model_b() },
        NamedModel { name: "C", spec: model_c() },
        NamedModel { name: "D", spec: model_d() },
        NamedModel { name: "A-gammaC", spec: model_a_gamma_c() },
        NamedModel { name: "brownY", spec: brownian_y() },
    ]
}

/// Look up a preset by its identifier (case-insensitive).
pub fn by_name(name: &str) -> Option<ProcessSpec> {
    zoo()
        .into_iter()
        .find(|m| m.name.eq_ignore_ascii_case(name))
        .map(|m| m.spec)
}
