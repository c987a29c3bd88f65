//! Acceptance suite: one test per release gate, each printing a PASS line
//! with the measured statistics (run with `-- --nocapture` to see them).
//!
//! Every tolerance is pinned here, in code; nothing defers to later
//! calibration. Master seed 42 throughout; geometric and pathwise samplers
//! draw from disjoint RNG stream ranges, so sharing the seed does not
//! correlate them.

use std::time::Instant;

use levysup::approx::{
    check_cpp_scheme, check_truncation_scheme, compound_poisson_approx,
    exponent_convergence_report, paths_from_record, truncate_subordinator, DriftJumpPath,
};
use levysup::fluctuation::{
    adjustment_coefficient, conditional_overshoot, crossing_law, exp_model_sup_cdf, phi_zero,
    sup_laplace_transform,
};
use levysup::measure::JumpMeasure;
use levysup::models;
use levysup::pathsim::{
    geometric_sample_set, run_replications, sigma_sample_set, JumpSource, SigmaSimulator,
    TruncationPolicy,
};
use levysup::process::ProcessSpec;
use levysup::quad::integrate_to_inf;
use levysup::stats::{
    empirical_lt, ks_distance, ks_one_sample, ks_two_sample, proportion_test, takacs_check,
};

const SEED: u64 = 42;
const REPS: usize = 100_000;
const GAP_K: f64 = 40.0;
const EVENT_CAP: u64 = 10_000_000;

fn sigma_policy(spec: &ProcessSpec) -> TruncationPolicy {
    TruncationPolicy::for_sigma(spec, GAP_K, 0.0, EVENT_CAP).unwrap()
}

/// Criterion 1: two-sample atom-aware comparison of the geometric sup-Y
/// sampler against the pathwise σ-stopped supremum for Model A at n = 1e5;
/// KS on positive parts below the α = 0.05 threshold (≈ 0.00607), atoms
/// within z = 3 of each other, Lundberg bias bound below 1e-4, and the
/// whole comparison in under two minutes.
#[test]
fn criterion_01_theorem_identity_model_a() {
    let start = Instant::now();
    let spec = models::model_a();
    let policy = sigma_policy(&spec);
    assert!(policy.bias_bound < 1e-4, "bias bound {}", policy.bias_bound);
    let r = adjustment_coefficient(&spec).unwrap().unwrap();
    assert!(r > 0.3 && r < 0.45, "adjustment coefficient {r}");

    let sigma = sigma_sample_set(&spec, "A", &policy, REPS, SEED).unwrap();
    let geo = geometric_sample_set(&spec.without_c(), "A.Y", REPS, SEED).unwrap();
    assert!(sigma.discard_fraction() < 1e-3);

    let report = ks_two_sample(&geo.accepted_values(), &sigma.accepted_values(), 0.05).unwrap();
    assert!((report.threshold - 0.00607).abs() < 5e-5, "threshold {}", report.threshold);
    assert!(
        report.statistic < report.threshold,
        "KS {} vs {}",
        report.statistic,
        report.threshold
    );
    let atom = report.atom.as_ref().unwrap();
    assert!(atom.consistent, "atom gap {} tol {}", atom.gap, atom.tolerance);
    assert!(report.consistent());

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "runtime {elapsed:?}");
    println!(
        "ACCEPTANCE 01 (theorem identity, Model A): PASS — KS {:.5} < {:.5}, atom gap {:.5} < {:.5}, bias {:.2e}, R {:.3}, {:.2?}",
        report.statistic, report.threshold, atom.gap, atom.tolerance, policy.bias_bound, r, elapsed
    );
}

/// Criterion 2: the same gates at the E[X₁] = 0 boundary (Model C), where
/// gap truncation is disabled and the event cap must discard fewer than
/// 1e-3 of replications.
#[test]
fn criterion_02_boundary_model_c() {
    let spec = models::model_c();
    assert_eq!(spec.mean_drift(), 0.0);
    let policy = sigma_policy(&spec);
    assert!(policy.gap_threshold.is_infinite());

    let sigma = sigma_sample_set(&spec, "C", &policy, REPS, SEED).unwrap();
    let discard = sigma.discard_fraction();
    assert!(discard < 1e-3, "discard fraction {discard}");

    let geo = geometric_sample_set(&spec.without_c(), "C.Y", REPS, SEED).unwrap();
    let report = ks_two_sample(&geo.accepted_values(), &sigma.accepted_values(), 0.05).unwrap();
    assert!(report.consistent(), "KS {} thr {}", report.statistic, report.threshold);
    println!(
        "ACCEPTANCE 02 (boundary E[X1]=0, Model C): PASS — KS {:.5} < {:.5}, atom gap {:.5}, discards {:.1e}",
        report.statistic,
        report.threshold,
        report.atom.as_ref().unwrap().gap,
        discard
    );
}

/// Criterion 3: one-sample test of the σ-stopped supremum against the
/// closed-form law F(x) = 1 - 0.5·e^(-0.5x) (atom 0.5) at α = 0.01.
#[test]
fn criterion_03_closed_form_oracle_model_a() {
    let spec = models::model_a();
    let sigma = sigma_sample_set(&spec, "A", &sigma_policy(&spec), REPS, SEED).unwrap();
    let cdf = |x: f64| exp_model_sup_cdf(1.0, 0.5, 1.0, x).unwrap();
    assert!((cdf(0.0) - 0.5).abs() < 1e-15);
    let report = ks_one_sample(&sigma.accepted_values(), cdf, 0.01).unwrap();
    assert!(report.consistent(), "KS {} thr {}", report.statistic, report.threshold);
    println!(
        "ACCEPTANCE 03 (closed-form oracle, Model A): PASS — KS {:.5} < {:.5}, atom gap {:.5} < {:.5}",
        report.statistic,
        report.threshold,
        report.atom.as_ref().unwrap().gap,
        report.atom.as_ref().unwrap().tolerance
    );
}

/// Criterion 4: first-passage attribution proportions (0.5, 1/3, 1 for
/// Models A, B, D) at z = 3 and KS of the Z-attributed overshoots against
/// the tabulated crossing CDF at α = 0.01 (plus the equilibrium-law CDF in
/// the subcritical case).
#[test]
fn criterion_04_crossing_laws() {
    let cases: [(&str, ProcessSpec, f64); 3] = [
        ("A", models::model_a(), 0.5),
        ("B", models::model_b(), 1.0 / 3.0),
        ("D", models::model_d(), 1.0),
    ];
    let mut summary = String::new();
    for (name, spec, p_expected) in cases {
        let law = crossing_law(&spec).unwrap();
        assert!(
            (law.p_cross_by_z - p_expected).abs() < 1e-7,
            "model {name}: analytic p {} vs {}",
            law.p_cross_by_z,
            p_expected
        );
        let policy = TruncationPolicy::for_first_passage(&spec, GAP_K, 0.0, EVENT_CAP).unwrap();
        let sim = SigmaSimulator::new(&spec, policy).unwrap();
        let passages = run_replications(SEED, REPS, |rng| sim.first_passage(rng));
        let z_overshoots: Vec<f64> = passages
            .iter()
            .filter(|p| p.finite && p.source == Some(JumpSource::Z))
            .map(|p| p.overshoot.unwrap())
            .collect();

        let prop = proportion_test(z_overshoots.len(), REPS, law.p_cross_by_z, 3.0);
        assert!(
            prop.consistent(),
            "model {name}: Z-attribution {} vs {} (tol {})",
            z_overshoots.len() as f64 / REPS as f64,
            law.p_cross_by_z,
            prop.threshold
        );

        let ks = ks_one_sample(&z_overshoots, |x| law.conditional_cdf(x), 0.01).unwrap();
        assert!(ks.consistent(), "model {name}: overshoot KS {} thr {}", ks.statistic, ks.threshold);

        // Subcritical collapse: the conditional law equals the integrated
        // tail of ν_Z, independent of C.
        if spec.mean_drift() <= 0.0 {
            let eq = conditional_overshoot(&spec.z).unwrap();
            let ks_eq = ks_one_sample(&z_overshoots, |x| eq.cdf(x), 0.01).unwrap();
            assert!(ks_eq.consistent(), "model {name}: equilibrium KS {}", ks_eq.statistic);
        }
        summary.push_str(&format!(
            "[{name}: prop {:.4}±{:.4}, KS {:.4}<{:.4}] ",
            prop.statistic, prop.threshold, ks.statistic, ks.threshold
        ));
    }
    println!("ACCEPTANCE 04 (crossing laws, Models A/B/D): PASS — {summary}");
}

/// Criterion 5: in the μ_Z < c < μ_Z + μ_C regime (Model B) the two
/// samplers must be REJECTED as equal — KS statistic above three times the
/// threshold and the atom gap (0.5 vs 2/3) resolved at z = 3 — while the
/// analytic inequality 1 - p_cross > 1 - μ_Z/c holds with margin > 1e-12.
#[test]
fn criterion_05_counterexample_model_b() {
    let spec = models::model_b();
    assert!(spec.mu_z() < spec.drift && spec.drift < spec.mu_z() + spec.mu_c());
    let law = crossing_law(&spec).unwrap();
    let margin = (1.0 - law.p_cross_by_z) - (1.0 - spec.mu_z() / spec.drift);
    assert!(margin > 1e-12, "analytic margin {margin}");
    assert!((law.p_cross_by_z - 1.0 / 3.0).abs() < 1e-8);

    let sigma = sigma_sample_set(&spec, "B", &sigma_policy(&spec), REPS, SEED).unwrap();
    let geo = geometric_sample_set(&spec.without_c(), "B.Y", REPS, SEED).unwrap();
    let report = ks_two_sample(&geo.accepted_values(), &sigma.accepted_values(), 0.05).unwrap();
    assert!(!report.consistent(), "counterexample comparison must reject");
    assert!(
        report.statistic > 3.0 * report.threshold,
        "KS {} vs 3×{}",
        report.statistic,
        report.threshold
    );
    let atom = report.atom.as_ref().unwrap();
    assert!(!atom.consistent, "atom gap {} tol {}", atom.gap, atom.tolerance);
    assert!((atom.gap - 1.0 / 6.0).abs() < 0.01, "atom gap {}", atom.gap);

    // The zero fraction of the σ sampler matches 1 - p_cross = 2/3.
    let zeros = sigma.accepted_values().iter().filter(|&&v| v == 0.0).count();
    let never = proportion_test(zeros, sigma.len(), 1.0 - law.p_cross_by_z, 3.0);
    assert!(never.consistent(), "never-σ {} vs {}", never.statistic, never.threshold);
    println!(
        "ACCEPTANCE 05 (counterexample, Model B): PASS — rejected with KS {:.4} = {:.1}×threshold, atom gap {:.4}, margin {:.3e}",
        report.statistic,
        report.statistic / report.threshold,
        atom.gap,
        margin
    );
}

/// Criterion 6: empirical P(T₋₂ < ∞) for Model B within z = 3 of e⁻¹.
#[test]
fn criterion_06_hitting_probability_model_b() {
    let spec = models::model_b();
    let policy = TruncationPolicy::for_hitting(&spec, GAP_K, 0.0, EVENT_CAP).unwrap();
    let sim = SigmaSimulator::new(&spec, policy).unwrap();
    let hits = run_replications(SEED, REPS, |rng| sim.hitting(-2.0, rng).unwrap())
        .iter()
        .filter(|h| h.finite)
        .count();
    let target = (-1.0_f64).exp();
    let report = proportion_test(hits, REPS, target, 3.0);
    assert!(report.consistent(), "p {} vs {} (tol {})", hits as f64 / REPS as f64, target, report.threshold);
    println!(
        "ACCEPTANCE 06 (hitting probability, Model B): PASS — p {:.5} vs e^-1 = {:.5} (tol {:.5})",
        hits as f64 / REPS as f64,
        target,
        report.threshold
    );
}

/// Criterion 7: endpoint-conditional positivity (Model A, t = 2, 1e6
/// replications): max per-bin deviation from 1 - (-x/(ct))⁺ over bins with
/// at least 200 hits stays below 0.02.
#[test]
fn criterion_07_takacs_formula_model_a() {
    let report = takacs_check(&models::model_a(), 2.0, 1_000_000, 0.25, 200, SEED).unwrap();
    assert!(report.max_deviation < 0.02, "max deviation {}", report.max_deviation);
    println!(
        "ACCEPTANCE 07 (endpoint-conditional formula, Model A): PASS — max deviation {:.5} < 0.02 over {} bins",
        report.max_deviation,
        report.bins.iter().filter(|b| b.count >= 200).count()
    );
}

/// Criterion 8: root finder — Φ(0) = 0.5 (Model B) and 1 (Model D) to
/// 1e-12 against an independent bisection oracle; exactly zero for every
/// preset with E[X₁] ≤ 0.
#[test]
fn criterion_08_root_finder() {
    // Independent oracle: plain interval halving with 200 iterations.
    fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
    let b = phi_zero(&models::model_b()).unwrap();
    let b_oracle = bisect(|s| models::model_b().psi(s).unwrap(), 0.1, 100.0);
    assert!((b.phi0 - 0.5).abs() < 1e-12, "phi(B) {}", b.phi0);
    assert!((b.phi0 - b_oracle).abs() < 1e-12);

    let d = phi_zero(&models::model_d()).unwrap();
    let d_oracle = bisect(|s| models::model_d().psi(s).unwrap(), 0.1, 100.0);
    assert!((d.phi0 - 1.0).abs() < 1e-12, "phi(D) {}", d.phi0);
    assert!((d.phi0 - d_oracle).abs() < 1e-12);

    for (name, spec) in [
        ("A", models::model_a()),
        ("C", models::model_c()),
        ("A-gammaC", models::model_a_gamma_c()),
        ("brownY", models::brownian_y()),
    ] {
        assert!(spec.mean_drift() <= 0.0);
        let r = phi_zero(&spec).unwrap();
        assert_eq!(r.phi0, 0.0, "preset {name} must have root exactly 0");
    }
    println!(
        "ACCEPTANCE 08 (root finder): PASS — Φ(B) = {:.15}, Φ(D) = {:.15}, subcritical roots exactly 0",
        b.phi0, d.phi0
    );
}

/// Criterion 9: the empirical Laplace transform of geometric sup-Y draws
/// (Model A's Y) covers -γλ/ψ(λ) within 99% CIs at ≥ 3 of 4 grid points,
/// and the closed-form supremum CDF reproduces the transform by quadrature
/// to rel tol 1e-6.
#[test]
fn criterion_09_laplace_transforms() {
    let y = models::model_a().without_c();
    let geo = geometric_sample_set(&y, "A.Y", REPS, SEED).unwrap();
    let grid = [0.5, 1.0, 2.0, 5.0];
    let estimates = empirical_lt(&geo.accepted_values(), &grid);
    let mut covered = 0;
    let mut detail = String::new();
    for est in &estimates {
        let analytic = sup_laplace_transform(&y, est.lambda).unwrap();
        let inside = (est.mean - analytic).abs() <= est.ci_half_width;
        if inside {
            covered += 1;
        }
        detail.push_str(&format!(
            "λ={}: {:.5}±{:.5} vs {:.5}{} ",
            est.lambda,
            est.mean,
            est.ci_half_width,
            analytic,
            if inside { "" } else { " (miss)" }
        ));
    }
    assert!(covered >= 3, "only {covered} of 4 points covered: {detail}");

    // Quadrature LT of the closed-form mixed CDF vs the analytic transform.
    let (c, rate, theta) = (1.0, 0.5, 1.0);
    let rho = rate / (theta * c);
    for i in 1..=100 {
        let lam = i as f64 * 0.1;
        let lt_quad = (1.0 - rho)
            + integrate_to_inf(
                |x| {
                    (-lam * x).exp() * rho * theta * (1.0 - rho) * (-theta * (1.0 - rho) * x).exp()
                },
                0.0,
                1e-12,
                1e-11,
            );
        let lt_formula = sup_laplace_transform(&y, lam).unwrap();
        let rel = ((lt_quad - lt_formula) / lt_formula).abs();
        assert!(rel < 1e-6, "λ={lam}: rel err {rel}");
    }
    println!("ACCEPTANCE 09 (Laplace transforms): PASS — {covered}/4 CI coverage; closed-form LT matches to rel 1e-6 on λ∈(0,10]");
}

/// Criterion 10: distributional convergence. Gamma-C truncation levels
/// {1,4,16,64} against the closed-form sup-Y law, and Brownian-Y
/// compound-Poisson approximants {4,16,64,256} against Exp(1): KS distances
/// nonincreasing within a 2-SE slack, final level < 0.01, and exponent
/// sup-gaps strictly decreasing.
#[test]
fn criterion_10_convergence() {
    let slack = |n1: usize, n2: usize| 2.0 * 0.26 * (1.0 / n1 as f64 + 1.0 / n2 as f64).sqrt();

    // Gamma-C chain.
    let base = models::model_a_gamma_c();
    let target = |x: f64| exp_model_sup_cdf(1.0, 0.5, 1.0, x).unwrap();
    let levels = [1u32, 4, 16, 64];
    let mut distances = Vec::new();
    let mut approximants = Vec::new();
    for (k, &n) in levels.iter().enumerate() {
        let c = truncate_subordinator(base.c.as_ref().unwrap(), n).unwrap();
        let spec = ProcessSpec::new(base.drift, base.z.clone(), Some(c)).unwrap();
        assert!(spec.mean_drift() < 0.0);
        let set =
            sigma_sample_set(&spec, "A-gammaC", &sigma_policy(&spec), REPS, SEED + 1000 * (k as u64 + 1))
                .unwrap();
        distances.push(ks_distance(&set.accepted_values(), target));
        approximants.push((n, spec));
    }
    for w in distances.windows(2) {
        assert!(w[1] <= w[0] + slack(REPS, REPS), "gamma-C distances not nonincreasing: {distances:?}");
    }
    assert!(*distances.last().unwrap() < 0.01, "final gamma-C distance {distances:?}");
    let exp_report = exponent_convergence_report(
        &base,
        &approximants,
        &(1..=20).map(|i| i as f64 * 0.5).collect::<Vec<_>>(),
    );
    assert!(
        exp_report.sup_gaps.windows(2).all(|w| w[1] < w[0]),
        "gamma-C exponent gaps {:?}",
        exp_report.sup_gaps
    );

    // Brownian chain: atom location x_n = 1/n so the zero atom of the
    // approximant (≈ 0.5/n) clears the 0.01 gate at the final level.
    let source = models::brownian_y();
    let exp_cdf = |x: f64| 1.0 - (-x).exp();
    let b_levels = [4u32, 16, 64, 256];
    let mut b_distances = Vec::new();
    let mut b_approximants = Vec::new();
    for (k, &n) in b_levels.iter().enumerate() {
        let approx =
            compound_poisson_approx(1.0, -0.5, &JumpMeasure::zero(), n, 1.0 / n as f64).unwrap();
        let set = geometric_sample_set(
            &approx.spec,
            "brownY-approx",
            REPS,
            SEED + 2000 * (k as u64 + 1),
        )
        .unwrap();
        b_distances.push(ks_distance(&set.accepted_values(), exp_cdf));
        b_approximants.push((n, approx.spec));
    }
    for w in b_distances.windows(2) {
        assert!(w[1] <= w[0] + slack(REPS, REPS), "Brownian distances not nonincreasing: {b_distances:?}");
    }
    assert!(*b_distances.last().unwrap() < 0.01, "final Brownian distance {b_distances:?}");
    let b_exp = exponent_convergence_report(
        &source,
        &b_approximants,
        &(1..=20).map(|i| i as f64 * 0.5).collect::<Vec<_>>(),
    );
    assert!(
        b_exp.sup_gaps.windows(2).all(|w| w[1] < w[0]),
        "Brownian exponent gaps {:?}",
        b_exp.sup_gaps
    );
    println!(
        "ACCEPTANCE 10 (convergence): PASS — gamma-C KS {:?} (final < 0.01), Brownian KS {:?} (final < 0.01); exponent gaps strictly decreasing"
        , distances, b_distances
    );
}

/// Criterion 11: pathwise convergence conclusions hold on 100 recorded
/// paths per scheme whose hypotheses (disjoint jump times, strict overshoot
/// margin) are satisfied: σ_n = σ and |sup_n - sup| < 1e-9 for all levels
/// past some n₀ inside the tested range, with zero hard failures.
#[test]
fn criterion_11_pathwise_lemma_checks() {
    let tol = 1e-9;

    // Scheme 1: perturbed Y paths (scale factor 1 + 2^-k) sharing the
    // recorded C jumps of Model A trajectories.
    let spec = models::model_a();
    let sim = SigmaSimulator::new(&spec, TruncationPolicy::event_cap_only(1_000_000)).unwrap();
    let mut checked = 0;
    let mut rep_index = 0u64;
    while checked < 100 {
        let mut rng = levysup::pathsim::replication_rng(SEED + 7, rep_index);
        rep_index += 1;
        assert!(rep_index < 400, "too many hypothesis violations");
        let rec = sim.horizon(30.0, &mut rng).unwrap();
        let (y, c) = paths_from_record(&rec);
        let variants: Vec<(u32, DriftJumpPath)> =
            (1..=48).map(|k| (k, y.scaled(1.0 + 0.5_f64.powi(k as i32)))).collect();
        let report = check_cpp_scheme(&y, &variants, &c, tol);
        if report.skipped {
            continue;
        }
        assert!(report.passed, "CPP scheme hard failure on path {rep_index}: n0 {:?}", report.n0);
        checked += 1;
    }

    // Scheme 2: C drawn from a finite truncation of the gamma measure;
    // re-truncating at levels up to 64 must lock onto the source σ.
    let c_measure = JumpMeasure::gamma(0.2, 1.0).unwrap().truncated(1.0 / 64.0).unwrap();
    let spec2 =
        ProcessSpec::new(1.0, JumpMeasure::exponential(0.5, 1.0).unwrap(), Some(c_measure))
            .unwrap();
    let sim2 = SigmaSimulator::new(&spec2, TruncationPolicy::event_cap_only(1_000_000)).unwrap();
    let levels = [1u32, 2, 4, 8, 16, 32, 64];
    let mut checked2 = 0;
    let mut rep2 = 0u64;
    while checked2 < 100 {
        let mut rng = levysup::pathsim::replication_rng(SEED + 8, rep2);
        rep2 += 1;
        assert!(rep2 < 400, "too many hypothesis violations");
        let rec = sim2.horizon(40.0, &mut rng).unwrap();
        let (y, c) = paths_from_record(&rec);
        let report = check_truncation_scheme(&y, &c, &levels, tol);
        if report.skipped {
            continue;
        }
        assert!(
            report.passed,
            "truncation scheme hard failure on path {rep2}: rows {:?}",
            report.rows
        );
        checked2 += 1;
    }
    println!(
        "ACCEPTANCE 11 (pathwise convergence): PASS — 100 paths per scheme, zero hard failures ({} and {} paths simulated)",
        rep_index, rep2
    );
}

/// Criterion 12: bit-identical sample CSVs under re-runs and under a
/// different worker count.
#[test]
fn criterion_12_determinism() {
    let spec = models::model_a();
    let policy = sigma_policy(&spec);
    let s1 = sigma_sample_set(&spec, "A", &policy, 20_000, SEED).unwrap();
    let s2 = sigma_sample_set(&spec, "A", &policy, 20_000, SEED).unwrap();
    assert_eq!(s1.to_csv(), s2.to_csv());
    let g1 = geometric_sample_set(&spec.without_c(), "A.Y", 20_000, SEED).unwrap();
    let g2 = geometric_sample_set(&spec.without_c(), "A.Y", 20_000, SEED).unwrap();
    assert_eq!(g1.to_csv(), g2.to_csv());

    // A single-threaded pool must reproduce the default pool bytes.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let s3 = pool.install(|| sigma_sample_set(&spec, "A", &policy, 20_000, SEED).unwrap());
    assert_eq!(s1.to_csv(), s3.to_csv());
    // Geometric and pathwise streams are disjoint: their values differ.
    assert_ne!(s1.to_csv(), g1.to_csv());
    println!("ACCEPTANCE 12 (determinism): PASS — byte-identical CSVs across re-runs and worker counts");
}
