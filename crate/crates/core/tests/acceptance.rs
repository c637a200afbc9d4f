//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wavespec_core::inverse::{round_trip, RoundTripReport};
use wavespec_core::scalar::Wide512;
use wavespec_core::series::{build_vtable, build_vtable_in, reconstruct_vtable, reconstruct_vtable_in};
use wavespec_core::spectral::{
    c12, c12_derivative_check, find_eigenvalues, residue_at_singularity, spectral_singularities, Family,
    Region, SearchOptions,
};
use wavespec_core::validation::{
    asymptote_gaps, asymptote_ok, eigen_instance, eigen_instance_region, ode_residual_ratio, random_instance,
    resolvent_residual, run_validation, ValidateConfig, BETAS,
};
use wavespec_core::{MediumProfile, Potential, SolutionContext};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hand_table() -> Outcome {
    let t = build_vtable(&Potential::new(vec![c(1.0, 0.0)]).unwrap(), 3).unwrap();
    let want = [
        (1, 1, -1.0),
        (1, 2, 0.5),
        (2, 2, -0.5),
        (1, 3, -1.0 / 12.0),
        (2, 3, 1.0 / 6.0),
        (3, 3, -1.0 / 12.0),
    ];
    let worst = want
        .iter()
        .map(|&(n, a, v)| (t.value(n, a) - c(v, 0.0)).norm())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-14, format!("max |ΔV| = {worst:.1e} (tol 1e-14)"))
}

fn table_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_wide: f64 = 0.0;
    let mut worst_f64: f64 = 0.0;
    for _ in 0..50 {
        let (p, _) = random_instance(&mut rng, 8);
        let forward = build_vtable_in::<Wide512>(&p, 40).unwrap();
        let back = reconstruct_vtable_in(&forward.diagonal(), 40).unwrap();
        worst_wide = worst_wide.max(back.max_relative_gap(&forward));
        let narrow = build_vtable(&p, 40).unwrap();
        let narrow_back = reconstruct_vtable(&narrow.diagonal(), 40).unwrap();
        worst_f64 = worst_f64.max(narrow_back.normwise_gap(&narrow));
    }
    outcome(
        worst_wide <= 1e-10,
        format!("entrywise relative {worst_wide:.1e} (512-bit, tol 1e-10); f64 normwise {worst_f64:.1e}"),
    )
}

fn full_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_q: f64 = 0.0;
    let mut worst_beta: f64 = 0.0;
    let mut worst_plain: f64 = 0.0;
    let mut failures = 0;
    for k in 0..50 {
        let (p, _) = random_instance(&mut rng, 8);
        let medium = MediumProfile::new(BETAS[k % 3]).unwrap();
        let r = round_trip(&p, medium, p.default_truncation());
        if r.failure.is_some() {
            failures += 1;
        }
        worst_q = worst_q.max(r.q_error);
        worst_beta = worst_beta.max(r.beta_error);
        if let Some(b) = r.beta_plain {
            worst_plain = worst_plain.max((b - medium.beta()).abs());
        }
    }
    outcome(
        failures == 0 && worst_q <= RoundTripReport::Q_TOL && worst_beta <= RoundTripReport::BETA_TOL,
        format!(
            "q rel {worst_q:.1e} (tol 1e-8), β abs {worst_beta:.1e} (tol 1e-6); bare c∞+c₁/t fit β abs {worst_plain:.1e}"
        ),
    )
}

fn ode_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (p, m) = random_instance(&mut rng, 4);
        let ctx = SolutionContext::new(&p, m, 40).unwrap();
        worst = worst.max(ode_residual_ratio(&ctx, &mut rng, 20).unwrap());
    }
    outcome(worst <= 1.0, format!("worst residual / (1e-5(1+|λ|²)max|f|) = {worst:.2}"))
}

fn asymptote() -> Outcome {
    let heights = [10.0, 100.0, 1000.0];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = true;
    let mut worst: f64 = 1.0;
    let mut cases = vec![(Potential::new(vec![c(1.0, 0.0)]).unwrap(), MediumProfile::new(2.0).unwrap())];
    cases.extend((0..10).map(|_| random_instance(&mut rng, 4)));
    for (p, m) in cases {
        let ctx = SolutionContext::new(&p, m, p.default_truncation()).unwrap();
        let gaps = asymptote_gaps(&ctx, &heights).unwrap();
        let (good, spread) = asymptote_ok(&heights, &gaps);
        ok &= good;
        worst = worst.max(spread);
    }
    outcome(ok, format!("gaps decreasing, K spread {worst:.3} (tol factor 2)"))
}

fn zero_potential() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut eigen = 0;
    let mut singular_ok = true;
    for beta in [0.5, 2.0, 3.0] {
        let medium = MediumProfile::new(beta).unwrap();
        let ctx = SolutionContext::new(&Potential::zero(), medium, 24).unwrap();
        for lambda in [c(0.3, 0.2), c(-2.0, 1.5), c(0.0, 7.0), c(5.0, 0.01)] {
            worst = worst.max((c12(&ctx, lambda).unwrap() + (beta + 1.0) / 2.0).norm());
        }
        eigen += find_eigenvalues(&ctx, Region::default_for(&ctx), 6, SearchOptions::default())
            .unwrap()
            .eigenvalues
            .len();
        let s = spectral_singularities(medium, 6).unwrap();
        singular_ok &= s.len() == 12
            && s.iter().all(|e| match e.family {
                Family::Half => e.value == e.n as f64 / 2.0,
                Family::Scaled => e.value == e.n as f64 / (2.0 * beta),
            });
    }
    outcome(
        worst <= 1e-14 && eigen == 0 && singular_ok,
        format!("|C12+(β+1)/2| {worst:.1e} (tol 1e-14), {eigen} eigenvalues, singularity lists exact: {singular_ok}"),
    )
}

fn derivative_identity() -> Outcome {
    let ctx = eigen_instance(40).unwrap();
    let report = find_eigenvalues(&ctx, eigen_instance_region(), 2, SearchOptions::default()).unwrap();
    let zeta = report
        .upper()
        .map(|e| e.lambda)
        .min_by(|a, b| (a - c(-1.0, 1.0)).norm().total_cmp(&(b - c(-1.0, 1.0)).norm()))
        .expect("the manufactured instance has eigenvalues");
    let check = c12_derivative_check(&ctx, zeta).unwrap();
    let printed = (check.c12_slope - check.minus_i_overlap).norm() / check.c12_slope.norm();
    outcome(
        check.c12_gap <= 1e-4 && check.combo_b_gap <= 1e-4,
        format!(
            "ζ = {:.6}{:+.6}i: |C12'-i∫|/|C12'| {:.1e}, |combo_b'+i∫|/|combo_b'| {:.1e} (tol 1e-4); printed sign C12' = -i∫ off by {printed:.2}",
            zeta.re, zeta.im, check.c12_gap, check.combo_b_gap
        ),
    )
}

fn residue() -> Outcome {
    let p = Potential::new(vec![c(1.0, 0.0)]).unwrap();
    let ctx = SolutionContext::new(&p, MediumProfile::new(2.0).unwrap(), 24).unwrap();
    let est = residue_at_singularity(&ctx, 1, 0.0, 0.0).unwrap();
    outcome(
        est.relative_gap() <= 1e-3,
        format!(
            "limit {:.3e}{:+.3e}i vs formula {:.3e}{:+.3e}i, relative gap {:.3} (tol 1e-3)",
            est.limit_est.re,
            est.limit_est.im,
            est.formula.re,
            est.formula.im,
            est.relative_gap()
        ),
    )
}

fn resolvent_property() -> Outcome {
    let p = Potential::new(vec![c(0.5, 0.3), c(-0.2, 0.1)]).unwrap();
    let ctx = SolutionContext::new(&p, MediumProfile::new(2.0).unwrap(), 24).unwrap();
    let lambda = c(0.7, 0.5);
    let right = resolvent_residual(&ctx, lambda, (0.5, 2.5), &[0.8, 1.3, 1.9, 2.2], true).unwrap();
    let straddle = resolvent_residual(&ctx, lambda, (-1.5, 1.0), &[-1.2, -0.6, -0.3, 0.3, 0.7], false).unwrap();
    outcome(
        right <= 1e-4 && straddle <= 1e-4,
        format!("max residual: source in x>0 {right:.1e}, straddling source (vs ρf) {straddle:.1e} (tol 1e-4)"),
    )
}

fn determinism() -> Outcome {
    let cfg = ValidateConfig { seed: 7, ..ValidateConfig::default() };
    let a = run_validation(&cfg).render();
    let b = run_validation(&cfg).render();
    outcome(a == b, format!("two seed-7 reports, {} bytes, identical: {}", a.len(), a == b))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("hand-table fixture", hand_table),
        ("forward/inverse table equivalence", table_equivalence),
        ("full round trip", full_round_trip),
        ("ODE residual", ode_residual),
        ("C12 asymptote", asymptote),
        ("zero-potential closed forms", zero_potential),
        ("derivative identity at an eigenvalue", derivative_identity),
        ("residue at n/2", residue),
        ("resolvent defining property", resolvent_property),
        ("validate determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<38} {}  {}  [{:.2}s]",
            k + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
