//! Empirical distribution machinery with atom-aware testing.
//!
//! The supremum laws compared here are mixed: an atom at zero (probability
//! 1-ρ) plus a continuous positive part. Classical KS thresholds assume a
//! continuous law, so tests are split: exact zeros are compared by a
//! proportion z-test (z = 3 in acceptance runs) and the positive parts by
//! KS at the stated α. A combined verdict requires both to pass.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pathsim::{run_replications, SigmaSimulator, TruncationPolicy};
use crate::process::ProcessSpec;

/// Critical coefficient c(α) of the asymptotic KS distribution:
/// P(D > c(α)·scale) ≈ α with c(α) = sqrt(-ln(α/2)/2).
pub fn ks_critical_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Empirical CDF with its zero-atom split out.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
    zeros: usize,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Ecdf {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let zeros = values.iter().filter(|&&v| v == 0.0).count();
        Ecdf { sorted, zeros }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn atom_at_zero(&self) -> f64 {
        self.zeros as f64 / self.sorted.len() as f64
    }

    /// F(x) = #{v ≤ x}/n (right-continuous).
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.sorted.partition_point(|&v| v <= x);
        k as f64 / self.sorted.len() as f64
    }

    /// Strictly positive values in ascending order.
    pub fn positives(&self) -> &[f64] {
        &self.sorted[self.positive_start()..]
    }

    fn positive_start(&self) -> usize {
        self.sorted.partition_point(|&v| v <= 0.0)
    }

    fn zeros(&self) -> usize {
        self.zeros
    }
}

/// Verdict of one statistical gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Rejected,
}

/// Zero-atom comparison attached to an atom-aware test.
#[derive(Debug, Clone, Serialize)]
pub struct AtomCheck {
    pub p_sample: f64,
    pub p_reference: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub consistent: bool,
}

/// Outcome of a distribution test; verdict is a pure function of the
/// recorded statistic, threshold and atom check.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub n: usize,
    pub m: Option<usize>,
    pub verdict: Verdict,
    pub tolerance_basis: String,
    pub atom: Option<AtomCheck>,
}

impl TestReport {
    pub fn consistent(&self) -> bool {
        self.verdict == Verdict::Consistent
    }
}

/// z-score used for all atom/proportion gates in acceptance runs.
pub const PROPORTION_Z: f64 = 3.0;

/// Two-sample comparison of mixed laws: zero atoms by pooled two-proportion
/// z-test, positive parts by KS over the pooled positive support with
/// threshold c(α)·sqrt((n+m)/(nm)).
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<TestReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("two-sample test requires nonempty samples"));
    }
    let ea = Ecdf::new(a);
    let eb = Ecdf::new(b);
    let (n, m) = (ea.len() as f64, eb.len() as f64);

    // KS walk over pooled positive values using full-sample ECDFs; the
    // plateau just above zero (atom difference) is part of the sup.
    let pa = ea.positives();
    let pb = eb.positives();
    let mut fa = ea.atom_at_zero();
    let mut fb = eb.atom_at_zero();
    let mut d = (fa - fb).abs();
    let (mut i, mut j) = (0usize, 0usize);
    while i < pa.len() || j < pb.len() {
        let xa = pa.get(i).copied().unwrap_or(f64::INFINITY);
        let xb = pb.get(j).copied().unwrap_or(f64::INFINITY);
        let x = xa.min(xb);
        while i < pa.len() && pa[i] == x {
            i += 1;
        }
        while j < pb.len() && pb[j] == x {
            j += 1;
        }
        fa = (ea.zeros() + i) as f64 / n;
        fb = (eb.zeros() + j) as f64 / m;
        d = d.max((fa - fb).abs());
    }
    let threshold = ks_critical_coefficient(alpha) * ((n + m) / (n * m)).sqrt();

    // Pooled two-proportion z-test on the atoms.
    let (pa0, pb0) = (ea.atom_at_zero(), eb.atom_at_zero());
    let pooled = (ea.zeros() + eb.zeros()) as f64 / (n + m);
    let tol = PROPORTION_Z * (pooled * (1.0 - pooled) * (1.0 / n + 1.0 / m)).sqrt();
    let atom = AtomCheck {
        p_sample: pa0,
        p_reference: pb0,
        gap: (pa0 - pb0).abs(),
        tolerance: tol,
        consistent: (pa0 - pb0).abs() <= tol,
    };

    let verdict = if d < threshold && atom.consistent {
        Verdict::Consistent
    } else {
        Verdict::Rejected
    };
    Ok(TestReport {
        name: "ks_two_sample".into(),
        statistic: d,
        threshold,
        n: ea.len(),
        m: Some(eb.len()),
        verdict,
        tolerance_basis: format!(
            "KS c({alpha})·sqrt((n+m)/nm) on positive parts; atom two-proportion z={PROPORTION_Z}"
        ),
        atom: Some(atom),
    })
}

/// One-sample comparison against a reference CDF whose atom sits at zero
/// (`cdf(0)` is read as the atom mass; the CDF must be continuous on
/// (0, ∞)). Positive part by KS with threshold c(α)/sqrt(n); atom by
/// binomial proportion at z = 3.
pub fn ks_one_sample<F: Fn(f64) -> f64>(values: &[f64], cdf: F, alpha: f64) -> Result<TestReport> {
    if values.is_empty() {
        return Err(Error::domain("one-sample test requires a nonempty sample"));
    }
    let ecdf = Ecdf::new(values);
    let n = ecdf.len() as f64;
    let positives = ecdf.positives();

    // Probe monotonicity of the reference on the sample's own quantiles.
    let mut last = cdf(0.0);
    if !(0.0..=1.0).contains(&last) {
        return Err(Error::domain(format!("reference CDF out of range at 0: {last}")));
    }
    let step = (positives.len() / 64).max(1);
    for &x in positives.iter().step_by(step) {
        let f = cdf(x);
        if f < last - 1e-12 || !(0.0..=1.0 + 1e-12).contains(&f) {
            return Err(Error::domain(format!("reference CDF is not nondecreasing near x={x}")));
        }
        last = f;
    }

    let mut d = 0.0_f64;
    for (idx, &x) in positives.iter().enumerate() {
        let rank_hi = (ecdf.zeros() + idx + 1) as f64 / n;
        let rank_lo = (ecdf.zeros() + idx) as f64 / n;
        let f = cdf(x);
        d = d.max((rank_hi - f).abs()).max((f - rank_lo).abs());
    }
    let threshold = ks_critical_coefficient(alpha) / n.sqrt();

    let atom_ref = cdf(0.0);
    let atom_sample = ecdf.atom_at_zero();
    let tol = PROPORTION_Z * (atom_ref * (1.0 - atom_ref) / n).sqrt();
    let atom = AtomCheck {
        p_sample: atom_sample,
        p_reference: atom_ref,
        gap: (atom_sample - atom_ref).abs(),
        tolerance: tol,
        consistent: (atom_sample - atom_ref).abs() <= tol,
    };

    let verdict = if d < threshold && atom.consistent {
        Verdict::Consistent
    } else {
        Verdict::Rejected
    };
    Ok(TestReport {
        name: "ks_one_sample".into(),
        statistic: d,
        threshold,
        n: ecdf.len(),
        m: None,
        verdict,
        tolerance_basis: format!(
            "KS c({alpha})/sqrt(n) on positive part; atom binomial z={PROPORTION_Z}"
        ),
        atom: Some(atom),
    })
}

/// One-sample KS distance for laws on [0, ∞) whose only atom may sit at
/// zero: max of the positive-part two-sided deviation and the atom gap
/// |#zeros/n - F(0)|. (The naive order-statistic formula would misread the
/// reference jump at 0 as a deviation.) Used as the distance metric in
/// convergence studies.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let ecdf = Ecdf::new(values);
    let n = ecdf.len() as f64;
    let mut d = (ecdf.atom_at_zero() - cdf(0.0)).abs();
    for (idx, &x) in ecdf.positives().iter().enumerate() {
        let f = cdf(x);
        let rank_hi = (ecdf.zeros() + idx + 1) as f64 / n;
        let rank_lo = (ecdf.zeros() + idx) as f64 / n;
        d = d.max((rank_hi - f).abs()).max((f - rank_lo).abs());
    }
    d
}

/// Proportion gate |count/n - p0| vs z·sqrt(p0(1-p0)/n).
pub fn proportion_test(count: usize, n: usize, p0: f64, z: f64) -> TestReport {
    let p = count as f64 / n as f64;
    let statistic = (p - p0).abs();
    let threshold = z * (p0 * (1.0 - p0) / n as f64).sqrt();
    TestReport {
        name: "proportion".into(),
        statistic,
        threshold,
        n,
        m: None,
        verdict: if statistic <= threshold { Verdict::Consistent } else { Verdict::Rejected },
        tolerance_basis: format!("binomial z={z} around p0={p0}"),
        atom: None,
    }
}

/// Point estimate of E[e^(-λV)] with a 99% normal-approximation CI.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LtEstimate {
    pub lambda: f64,
    pub mean: f64,
    pub ci_half_width: f64,
}

/// Empirical Laplace transform of a nonnegative sample on a λ grid.
/// CI half-width is 2.58·s/sqrt(n) per point.
pub fn empirical_lt(values: &[f64], lambda_grid: &[f64]) -> Vec<LtEstimate> {
    let n = values.len() as f64;
    lambda_grid
        .iter()
        .map(|&lam| {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for &v in values {
                let e = (-lam * v).exp();
                sum += e;
                sumsq += e * e;
            }
            let mean = sum / n;
            let var = (sumsq / n - mean * mean).max(0.0);
            LtEstimate { lambda: lam, mean, ci_half_width: 2.58 * (var / n).sqrt() }
        })
        .collect()
}

/// One bin of the endpoint-conditional positivity experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TakacsBin {
    pub center: f64,
    pub mean_endpoint: f64,
    pub count: usize,
    pub empirical: f64,
    pub predicted: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TakacsReport {
    pub t: f64,
    pub bin_width: f64,
    pub replications: usize,
    pub min_bin_count: usize,
    pub bins: Vec<TakacsBin>,
    /// Max |empirical - predicted| over bins with at least `min_bin_count`.
    pub max_deviation: f64,
}

impl TakacsReport {
    /// CSV body, one row per reported bin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("center,mean_endpoint,count,empirical,predicted,deviation\n");
        for b in &self.bins {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                b.center, b.mean_endpoint, b.count, b.empirical, b.predicted, b.deviation
            ));
        }
        out
    }
}

/// Tests the endpoint-conditional positivity formula
/// P(sup_{s≤t} X_s > 0 | X_t) = 1 - (-X_t/(ct))⁺ by binning X_t.
///
/// The prediction is evaluated at each bin's mean endpoint, which is exact
/// within the formula's linear region; only bins with at least
/// `min_bin_count` replications enter the max-deviation summary.
pub fn takacs_check(
    spec: &ProcessSpec,
    t: f64,
    n_reps: usize,
    bin_width: f64,
    min_bin_count: usize,
    seed: u64,
) -> Result<TakacsReport> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("horizon must be positive, got {t}")));
    }
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::domain(format!("degenerate bin width {bin_width}")));
    }
    let sim = SigmaSimulator::new(spec, TruncationPolicy::event_cap_only(10_000_000))?;
    let endpoints = run_replications(seed, n_reps, |rng| sim.horizon_endpoint(t, rng));

    // X_t ≥ -ct always; index bins from the lowest reachable endpoint.
    let x_min = -spec.drift * t;
    let mut counts: Vec<(usize, usize, f64)> = Vec::new();
    for &(x, positive) in &endpoints {
        let idx = ((x - x_min) / bin_width).floor().max(0.0) as usize;
        if counts.len() <= idx {
            counts.resize(idx + 1, (0, 0, 0.0));
        }
        let slot = &mut counts[idx];
        slot.0 += 1;
        if positive {
            slot.1 += 1;
        }
        slot.2 += x;
    }

    let ct = spec.drift * t;
    let mut bins = Vec::new();
    let mut max_dev = 0.0_f64;
    for (idx, &(count, positives, sum_x)) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mean_x = sum_x / count as f64;
        let empirical = positives as f64 / count as f64;
        let predicted = 1.0 - (-mean_x / ct).max(0.0).min(1.0);
        let deviation = (empirical - predicted).abs();
        bins.push(TakacsBin {
            center: x_min + (idx as f64 + 0.5) * bin_width,
            mean_endpoint: mean_x,
            count,
            empirical,
            predicted,
            deviation,
        });
        if count >= min_bin_count {
            max_dev = max_dev.max(deviation);
        }
    }
    Ok(TakacsReport {
        t,
        bin_width,
        replications: n_reps,
        min_bin_count,
        bins,
        max_deviation: max_dev,
    })
}
