//! The exponential integral E₁, used for tails of the gamma subordinator.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// E₁(x) = ∫ₓ^∞ e^(-u)/u du for x > 0.
///
/// Power series for x ≤ 1, modified Lentz continued fraction for x > 1.
/// Accurate to close to machine precision over the whole range.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires x > 0, got {x}");
    if x <= 1.0 {
        // E1(x) = -γ - ln x + Σ_{k≥1} (-1)^{k+1} x^k / (k · k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..=60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // Continued fraction: E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -(i as f64) * (i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_to_inf;
    use approx::assert_relative_eq;

    #[test]
    fn known_values() {
        // Reference values (Abramowitz & Stegun table 5.1).
        assert_relative_eq!(exp_integral_e1(1.0), 0.219_383_934_395_520_3, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_e1(0.5), 0.559_773_594_776_160_2, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_e1(2.0), 0.048_900_510_708_061_12, max_relative = 1e-12);
        assert_relative_eq!(exp_integral_e1(10.0), 4.156_968_929_685_325e-6, max_relative = 1e-11);
    }

    #[test]
    fn matches_direct_quadrature() {
        for &x in &[0.01, 0.1, 0.7, 1.5, 3.0, 8.0] {
            let q = integrate_to_inf(|u| (-u).exp() / u, x, 1e-13, 1e-12);
            assert_relative_eq!(exp_integral_e1(x), q, max_relative = 1e-9);
        }
    }

    #[test]
    fn small_argument_log_divergence() {
        let v = exp_integral_e1(1e-8);
        // -γ - ln(1e-8) ≈ 17.8434...
        assert_relative_eq!(v, -EULER_GAMMA - (1e-8_f64).ln(), epsilon = 1e-7);
    }
}
