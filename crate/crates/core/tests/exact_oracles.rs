use std::f64::consts::PI;

use proptest::prelude::*;

use hwkit::approx::{make_evaluator, Target};
use hwkit::density::Evaluators;
use hwkit::exact::{critical_points, f_exact, g_exact, jbs_exact, solve_kappa, solve_m};
use hwkit::roots::RootSolverConfig;

fn cfg() -> RootSolverConfig {
    RootSolverConfig::default()
}

/// Plain bisection, no derivatives.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const GRID: [f64; 8] = [0.05, 0.2, 0.5, 0.8, 1.25, 2.0, 5.0, 20.0];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn f_and_g_against_bisection() {
    for rho in GRID {
        let (f, g) = if rho < 1.0 {
            let k = bisect(|k| k.sinh() / k - 1.0 / rho, 1e-6, 50.0);
            (k * k / 2.0 - k / k.tanh() + PI * PI / 2.0, k / (k / k.tanh() - 1.0).sqrt())
        } else {
            let m = bisect(|m| m.sin() / m - 1.0 / rho, 1e-6, PI);
            (PI * PI / 2.0 - m * m / 2.0 - m / m.tan(), m / (1.0 - m / m.tan()).sqrt())
        };
        assert!(rel(f_exact(rho, &cfg()).unwrap(), f) < 1e-12, "F({rho})");
        assert!(rel(g_exact(rho, &cfg()).unwrap(), g) < 1e-12, "G({rho})");
    }
}

#[test]
fn rate_function_against_bisection() {
    for x in GRID {
        let j = if x >= 1.0 {
            let xi = bisect(|t| t.sinh() / t - x, 1e-6, 50.0);
            xi * (xi / 2.0 - (xi / 2.0).tanh())
        } else {
            let z = bisect(|t| t.sin() / t - x, 1e-6, PI);
            z * ((z / 2.0).tan() - z / 2.0)
        };
        assert!(rel(jbs_exact(x, &cfg()).unwrap(), j) < 1e-12, "J_BS({x})");
    }
}

#[test]
fn roots_satisfy_their_equations() {
    for rho in [0.01f64, 0.3, 0.9] {
        let k = solve_kappa(rho, &cfg()).unwrap();
        assert!((rho * k.sinh() / k - 1.0).abs() < 1e-13);
    }
    for rho in [1.1f64, 3.0, 1000.0] {
        let m = solve_m(rho, &cfg()).unwrap();
        assert!((rho * m.sin() / m - 1.0).abs() < 1e-13);
    }
}

#[test]
fn series_evaluators_match_closed_forms() {
    for target in [Target::F, Target::G, Target::Jbs] {
        let ev = make_evaluator(target, 40, Evaluators::default_window()).unwrap();
        for i in 0..=60 {
            let x = (0.05f64.ln() + (20f64.ln() - 0.05f64.ln()) * i as f64 / 60.0).exp();
            let exact = match target {
                Target::F => f_exact(x, &cfg()),
                Target::G => g_exact(x, &cfg()),
                Target::Jbs => jbs_exact(x, &cfg()),
            }
            .unwrap();
            assert!((ev.eval(x).unwrap() - exact).abs() < 1e-10, "{target}({x})");
        }
    }
}

#[test]
fn near_one_branch_is_continuous() {
    for target in [f_exact::<f64>, g_exact::<f64>, jbs_exact::<f64>] {
        for s in [1e-3f64, -1e-3] {
            // the slopes are O(1), so the true change across the switch is ~2e-12
            let inside = target((s * (1.0 - 1e-9)).exp(), &cfg()).unwrap();
            let outside = target((s * (1.0 + 1e-9)).exp(), &cfg()).unwrap();
            assert!((inside - outside).abs() < 1e-10, "{inside} vs {outside}");
        }
    }
}

#[test]
fn f32_follows_f64() {
    for rho in [0.3f32, 1.0, 4.0] {
        let a = f_exact(rho, &cfg()).unwrap();
        let b = f_exact(rho as f64, &cfg()).unwrap();
        assert!((a as f64 - b).abs() < 1e-5 * b.abs());
    }
}

#[test]
fn critical_point_table_to_printed_digits() {
    // k, η_k, z_k, ω_k, |Log ω_k| as printed (η₂ is truncated there, not rounded)
    let printed = [
        (4.4934, -20.19, -0.2172, 3.4929),
        (7.7252, -59.68, 0.1284, 2.0528),
        (10.9041, -118.90, -0.0913, 3.9494),
        (14.0662, -197.86, 0.0709, 2.6463),
        (17.2208, -296.55, -0.0580, 4.2402),
    ];
    let table = critical_points(5, &cfg()).unwrap();
    for (e, p) in table.entries.iter().zip(printed) {
        assert!((e.eta - p.0).abs() <= 1e-4, "eta_{}", e.k);
        assert!((e.z - p.1).abs() <= 1e-2, "z_{}", e.k);
        assert!((e.omega - p.2).abs() <= 1e-4, "omega_{}", e.k);
        assert!((e.abs_log_omega - p.3).abs() <= 1e-4, "log_{}", e.k);
        assert!((e.eta.tan() - e.eta).abs() < 1e-9 * e.eta);
    }
}

proptest! {
    #[test]
    fn rate_and_exponent_are_nonnegative(s in -4.0f64..4.0) {
        let x = s.exp();
        prop_assert!(jbs_exact(x, &cfg()).unwrap() >= 0.0);
        // F(ρ) − π²/2 + ρ is the exponent of the density at a = 1/ρ
        prop_assert!(f_exact(x, &cfg()).unwrap() - PI * PI / 2.0 + x >= -1e-12);
        prop_assert!(g_exact(x, &cfg()).unwrap() > 0.0);
    }
}
