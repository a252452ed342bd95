//! Acceptance gate: the eight checks this project commits to, one test
//! (and one pass/fail line) each, at the stated tolerances.
//!
//! Checks with a wall-clock budget share a lock so their timings never
//! overlap; the Monte Carlo budget scales with the cores actually
//! available, since the committed figure assumes eight.

use std::sync::Mutex;
use std::time::Instant;

use wshmin::montecarlo::{
    correction_diagnostic, draw_samples, ks_distance, sample_min_eig, write_dump, DumpHeader,
    SamplerConfig,
};
use wshmin::op_engine::{self, ModelParams};
use wshmin::painleve::{
    bessel_det_f, limiting_cdf, solve_h1_correction, solve_p2_hastings_mcleod, solve_p3,
    H1Config, ODESolverConfig, P2Config,
};
use wshmin::specialfns::{airy_ai, bessel_i};
use wshmin::PrecisionContext;

static TIMED: Mutex<()> = Mutex::new(());

fn lock_timed() -> std::sync::MutexGuard<'static, ()> {
    TIMED.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn criterion_1_exact_exponential_law_at_a_zero() {
    let _guard = lock_timed();
    let ctx = PrecisionContext::standard();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let t = 0.2 * i as f64 / 199.0;
        let params = ModelParams::new(50, 0.0, t).unwrap();
        let f = op_engine::compute_cdf(&params, &ctx).unwrap().f;
        worst = worst.max((f - (-50.0 * t).exp()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    println!("criterion 1: max |F_50 - exp(-50t)| = {worst:.2e} in {secs:.3} s");
    assert!(worst <= 1e-10, "max deviation {worst:.2e} above 1e-10");
    assert!(secs < 1.0, "took {secs:.3} s, budget 1 s");
}

#[test]
fn criterion_2_recursion_agrees_with_determinant_oracle() {
    let _guard = lock_timed();
    let ctx = PrecisionContext::standard();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=8u32 {
        for a in [0.0, 0.5, 1.0, 2.0, 3.7] {
            for t in [0.1, 0.5, 1.0, 2.0] {
                let params = ModelParams::new(n, a, t).unwrap();
                let f = op_engine::compute_cdf(&params, &ctx).unwrap().f;
                let oracle = op_engine::hankel_oracle_cdf(&params, &ctx).unwrap();
                let rel = (f - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
                assert!(
                    rel <= 1e-8,
                    "N = {n}, a = {a}, t = {t}: relative gap {rel:.2e}"
                );
                worst = worst.max(rel);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    println!("criterion 2: worst relative gap {worst:.2e} over 160 points in {secs:.2} s");
    assert!(secs < 10.0, "took {secs:.2} s, budget 10 s");
}

#[test]
fn criterion_3_recurrence_identities_hold_in_extended_precision() {
    let ctx = PrecisionContext::extended();
    for a in [0.5, 1.0, 2.0] {
        for t in [0.2, 1.0] {
            let params = ModelParams::new(100, a, t).unwrap();
            let res = op_engine::compute_cdf(&params, &ctx).unwrap();
            let trace = res.trace.as_ref().expect("t > 0 carries a trace");
            let rep = op_engine::validate_identities(trace, &ctx).unwrap();
            assert!(rep.omega_sq <= 1e-9, "a = {a}, t = {t}: omega^2 residual {:.2e}", rep.omega_sq);
            assert!(rep.quadratic <= 1e-9, "a = {a}, t = {t}: quadratic residual {:.2e}", rep.quadratic);
            assert!(rep.schlesinger_s <= 1e-4, "a = {a}, t = {t}: S residual {:.2e}", rep.schlesinger_s);
            assert!(rep.schlesinger_r <= 1e-4, "a = {a}, t = {t}: R residual {:.2e}", rep.schlesinger_r);
            assert!(rep.painleve_v <= 1e-4, "a = {a}, t = {t}: sigma-form residual {:.2e}", rep.painleve_v);
            println!(
                "criterion 3: a = {a}, t = {t}: omega^2 {:.1e}, quadratic {:.1e}, S {:.1e}, R {:.1e}, sigma {:.1e}",
                rep.omega_sq, rep.quadratic, rep.schlesinger_s, rep.schlesinger_r, rep.painleve_v
            );
        }
    }
}

#[test]
fn criterion_4_hard_edge_equation_matches_bessel_determinants() {
    let ctx = PrecisionContext::standard();
    for a in [1u32, 2, 3] {
        let p3 = solve_p3(f64::from(a), 10.0, &ODESolverConfig::default()).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=120 {
            // Log-spaced sweep of [0.01, 10].
            let x = 0.01 * 1000.0f64.powf(i as f64 / 120.0);
            let diff = (p3.f_at(x).unwrap() - bessel_det_f(a, x, &ctx).unwrap()).abs();
            worst = worst.max(diff);
        }
        println!("criterion 4: a = {a}: max |f_ode - f_bessel| = {worst:.2e}");
        assert!(worst <= 1e-6, "a = {a}: max gap {worst:.2e}");
    }

    // Anchor value at a = 1, x = 1: both representations equal the Bessel
    // ratio -I_2(2)/I_0(2).
    let reference = -bessel_i(2, 2.0, &ctx).unwrap() / bessel_i(0, 2.0, &ctx).unwrap();
    assert!((reference + 0.302225).abs() <= 1e-6, "reference {reference:.8}");
    let p3 = solve_p3(1.0, 10.0, &ODESolverConfig::default()).unwrap();
    assert!((p3.f_at(1.0).unwrap() - reference).abs() <= 1e-6);
    assert!((bessel_det_f(1, 1.0, &ctx).unwrap() - reference).abs() <= 1e-6);
}

#[test]
fn criterion_5_finite_size_correction_shrinks_like_one_over_n() {
    let _guard = lock_timed();
    let start = Instant::now();
    let ctx = PrecisionContext::extended();
    let xs = [0.5, 1.0, 2.0, 3.0];
    for a in [1.0, 2.0] {
        let p3 = solve_p3(a, 4.0, &ODESolverConfig::default()).unwrap();
        // target(x) = (a/2) x F_inf'(x) = (a/2) f(x) F_inf(x).
        let targets: Vec<f64> = xs
            .iter()
            .map(|&x| 0.5 * a * p3.f_at(x).unwrap() * limiting_cdf(&p3, x).unwrap())
            .collect();
        let scale = targets.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let deviation = |n: u32, x: f64| {
            let params = ModelParams::new(n, a, x / f64::from(n)).unwrap();
            let f_n = op_engine::compute_cdf(&params, &ctx).unwrap().f;
            f64::from(n) * (f_n - limiting_cdf(&p3, x).unwrap())
        };
        for (&x, &target) in xs.iter().zip(&targets) {
            let gap50 = (deviation(50, x) - target).abs();
            let gap200 = (deviation(200, x) - target).abs();
            println!(
                "criterion 5: a = {a}, x = {x}: |D_50 - target| = {gap50:.2e}, |D_200 - target| = {gap200:.2e}"
            );
            assert!(
                gap200 <= 0.5 * gap50 + 1e-6,
                "a = {a}, x = {x}: D_200 gap {gap200:.2e} not under half of {gap50:.2e}"
            );
            assert!(
                gap200 <= 0.05 * scale,
                "a = {a}, x = {x}: D_200 gap {gap200:.2e} above 5% of {scale:.2e}"
            );
        }
    }
    let secs = start.elapsed().as_secs_f64();
    println!("criterion 5: {secs:.1} s");
    assert!(secs < 60.0, "took {secs:.1} s, budget 60 s");
}

#[test]
fn criterion_6_soft_edge_solution_and_corrections() {
    let ctx = PrecisionContext::standard();
    let p2 = solve_p2_hastings_mcleod(&P2Config::default()).unwrap();

    // Right-tail boundary value against the Airy function.
    let gap = (p2.q_at(6.0).unwrap() - airy_ai(6.0, &ctx).unwrap()).abs();
    println!("criterion 6: |q(6) - Ai(6)| = {gap:.2e}");
    assert!(gap <= 1e-8);

    // Closed form q'^2 - q^4 - x q^2 against direct quadrature of q^2.
    // Corrected trapezoid with the exact derivative (q^2)' = 2qq'; the tail
    // past the grid is below 1e-19 and is dropped.
    let m = p2.grid.len() - 1;
    let h = (p2.grid[m] - p2.grid[0]) / m as f64;
    let mut integral = 0.0f64;
    let mut worst = 0.0f64;
    for i in (0..m).rev() {
        integral += 0.5 * h * (p2.q[i] * p2.q[i] + p2.q[i + 1] * p2.q[i + 1])
            + h * h / 12.0
                * (2.0 * p2.q[i] * p2.q_prime[i] - 2.0 * p2.q[i + 1] * p2.q_prime[i + 1]);
        if p2.grid[i] <= 8.0 {
            worst = worst.max((integral - p2.h0_tilde[i]).abs());
        }
    }
    println!("criterion 6: h0 identity residual {worst:.2e} on [-8, 8]");
    assert!(worst <= 1e-8);

    // Plug the stored h1 back into its linear equation
    //   alpha y'' + beta y' + gamma y = 0,
    //   alpha = -2qq', beta = 2(q'^2 + 2q^4 + xq^2), gamma = -2q^2,
    // with fourth-order central differences, away from the endpoints and
    // the deep-left region where alpha itself degenerates.
    let d1 = central_diff(&p2.h1_tilde, h);
    let d2 = central_diff(&d1, h);
    let mut worst = 0.0f64;
    for (i, &x) in p2.grid.iter().enumerate() {
        if !(-2.0..=6.0).contains(&x) {
            continue;
        }
        let (q, qp) = (p2.q[i], p2.q_prime[i]);
        let alpha = -2.0 * q * qp;
        let beta = 2.0 * (qp * qp + 2.0 * q * q * q * q + x * q * q);
        let gamma = -2.0 * q * q;
        let terms = [alpha * d2[i], beta * d1[i], gamma * p2.h1_tilde[i]];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        worst = worst.max((terms[0] + terms[1] + terms[2]).abs() / scale);
    }
    println!("criterion 6: h1 plug-back residual {worst:.2e}");
    assert!(worst <= 1e-6);

    // The equation is linear and homogeneous: doubling the tail amplitude
    // must double every value exactly.
    let base = solve_h1_correction(&p2, &H1Config::default()).unwrap();
    let double = solve_h1_correction(&p2, &H1Config { amplitude: 2.0 }).unwrap();
    assert_eq!(base.values.len(), double.values.len());
    for (b, d) in base.values.iter().zip(&double.values) {
        assert_eq!((2.0 * b).to_bits(), d.to_bits());
    }
}

/// Interior fourth-order first derivative; endpoints fall back to copies
/// of their neighbors, which the callers never read.
fn central_diff(vals: &[f64], h: f64) -> Vec<f64> {
    let n = vals.len();
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        out[i] = (-vals[i + 2] + 8.0 * vals[i + 1] - 8.0 * vals[i - 1] + vals[i - 2]) / (12.0 * h);
    }
    out[0] = out[2];
    out[1] = out[2];
    out[n - 2] = out[n - 3];
    out[n - 1] = out[n - 3];
    out
}

#[test]
fn criterion_7_monte_carlo_reproduces_the_exact_law_and_correction() {
    let _guard = lock_timed();
    let cores = std::thread::available_parallelism().map(|c| c.get()).unwrap_or(1);
    // Committed budget is 5 minutes on 8 threads; scale it to the cores
    // this machine actually has.
    let budget = 300.0 * 8.0 / cores.min(8) as f64;
    let start = Instant::now();
    let ctx = PrecisionContext::standard();
    for a in [0u32, 1, 2, 3] {
        let cfg = SamplerConfig {
            n: 50,
            m: 50 + a,
            n_samples: 300_000,
            seed: 0x5EED_0001 + u64::from(a),
            n_streams: cores as u32,
        };
        let emp = sample_min_eig(&cfg).unwrap();
        let exact = |t: f64| {
            let params = ModelParams::new(50, f64::from(a), t).unwrap();
            op_engine::compute_cdf(&params, &ctx).unwrap().f
        };
        let ks = ks_distance(&emp, exact);
        assert!(ks <= 0.005, "a = {a}: KS distance {ks:.4}");

        let p3 = solve_p3(f64::from(a), 5.0, &ODESolverConfig::default()).unwrap();
        let rows = correction_diagnostic(&emp, 50, f64::from(a), &p3, &[0.5, 1.0, 2.0]).unwrap();
        for row in &rows {
            assert!(!row.insufficient, "a = {a}, x = {}: too few survivors", row.x);
            let gap = (row.diagnostic - row.prediction).abs();
            assert!(
                gap <= 3.0 * row.std_error,
                "a = {a}, x = {}: diagnostic {:.4} vs prediction {:.4}, 3 SE = {:.4}",
                row.x,
                row.diagnostic,
                row.prediction,
                3.0 * row.std_error
            );
        }
        println!("criterion 7: a = {a}: KS {ks:.4}, correction diagnostic within 3 SE at x = 0.5, 1, 2");
    }
    let secs = start.elapsed().as_secs_f64();
    println!("criterion 7: measured {secs:.1} s against budget {budget:.0} s on {cores} core(s)");
    assert!(secs < budget, "took {secs:.1} s, budget {budget:.0} s");
}

#[test]
fn criterion_8_dumps_are_byte_identical_across_stream_counts() {
    let config = |streams: u32| SamplerConfig {
        n: 50,
        m: 51,
        n_samples: 4000,
        seed: 987_654_321,
        n_streams: streams,
    };
    let dump_of = |cfg: &SamplerConfig| {
        let samples = draw_samples(cfg).unwrap();
        let mut buf = Vec::new();
        write_dump(&mut buf, &DumpHeader::for_config(cfg), &samples).unwrap();
        buf
    };
    let reference = dump_of(&config(1));
    for streams in [1u32, 4, 16] {
        assert_eq!(
            dump_of(&config(streams)),
            reference,
            "streams = {streams} changed the dump"
        );
    }
    println!("criterion 8: dumps byte-identical across 1, 4, 16 streams and repeated runs");
}
