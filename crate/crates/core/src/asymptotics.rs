//! Large-order behaviour of the coefficient families.
//!
//! The dominant singularity of `h` is the square-root branch point at
//! `ω₁ = sin η₁/η₁`, image of the first critical point `z₁ = −η₁²` of
//! `S(z) = sinh√z/√z`. Writing `S(z) − ω₁ = a₂(z−z₁)² + a₃(z−z₁)³ + …`,
//!
//! ```text
//! h(ω) = z₁ + C₁(ω−ω₁)^{1/2} + C₂(ω−ω₁) + …,  C₁ = a₂^{−1/2},  C₂ = −a₃/(2a₂²)
//! ```
//!
//! Since `𝒥'(z₁) = 𝓕'(z₁) = 0`, the rate function and `F` start at
//! `(ω−ω₁)^{3/2}` with `C_{3/2} = 𝒥'''(z₁)C₁³/6 + 𝒥''(z₁)C₁C₂`, while `𝒢²`
//! has a simple pole at `z₁` so `G` behaves like `(ω−ω₁)^{−1/4}`.
//!
//! Local expansions at `z₁` are computed as floating-point Taylor jets with
//! the generic series engine: functions of `η = η₁ + ε` are expanded in `ε`
//! and composed with the reverted map `z − z₁ = −2η₁ε − ε²`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::exact::{critical_points, CriticalPointTable};
use crate::roots::RootSolverConfig;
use crate::series::Series;

/// Order of the local jets at `z₁`.
const JET_ORDER: usize = 10;

/// Local data at the branch point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxData {
    pub eta1: f64,
    pub z1: f64,
    pub omega1: f64,
    /// `g''(z₁)/2` and `g'''(z₁)/6`
    pub a2: f64,
    pub a3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c32_j: f64,
    pub c32_f: f64,
    /// `𝒥'(z₁)` and `𝓕'(z₁)`, which vanish analytically
    pub j_slope: f64,
    pub f_slope: f64,
    /// residue of `𝒢²` at `z₁`
    pub g_sq_residue: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub rho_x: f64,
    pub theta_x: f64,
    pub c_inf: f64,
    pub d_inf: f64,
    pub d_j: f64,
    pub d_f: f64,
    pub d_g: f64,
}

/// Taylor coefficients in `ε` of `sin(η₁ + ε)` (`phase = 0`) or
/// `cos(η₁ + ε)` (`phase = 1`).
fn trig_jet(eta: f64, phase: usize, order: usize) -> Series<f64> {
    let mut fact = 1.0;
    Series::from_fn(order, |k| {
        if k > 0 {
            fact *= k as f64;
        }
        (eta + (k + phase) as f64 * std::f64::consts::FRAC_PI_2).sin() / fact
    })
}

struct Jets {
    /// `η₁ + ε(w)`, `w = z − z₁`
    eta: Series<f64>,
    /// `ε(w)`
    eps: Series<f64>,
}

impl Jets {
    fn new(eta1: f64) -> Jets {
        // w = −2η₁ε − ε²
        let w_of_eps = Series::new((0..=JET_ORDER)
            .map(|k| match k {
                1 => -2.0 * eta1,
                2 => -1.0,
                _ => 0.0,
            })
            .collect());
        let eps = w_of_eps.revert().expect("linear term is nonzero");
        let eta = Series::constant(eta1, JET_ORDER).add(&eps).expect("plain series");
        Jets { eta, eps }
    }

    /// Function of `η` given by its `ε`-expansion, re-expanded in `w`.
    fn in_w(&self, f_eps: &Series<f64>) -> Series<f64> {
        let c0 = f_eps.coeffs()[0];
        let mut tail = f_eps.clone().into_coeffs();
        tail[0] = 0.0;
        Series::new(tail)
            .compose(&self.eps)
            .expect("plain series")
            .add(&Series::constant(c0, JET_ORDER))
            .expect("plain series")
    }
}

fn compute_puiseux(table: &CriticalPointTable) -> PuiseuxData {
    let p1 = table.entries[0];
    let (eta1, z1, omega1) = (p1.eta, p1.z, p1.omega);
    let jets = Jets::new(eta1);
    let half = |s: &Series<f64>| s.scale(&0.5);
    let sin_eta = jets.in_w(&trig_jet(eta1, 0, JET_ORDER));
    let cos_eta = jets.in_w(&trig_jet(eta1, 1, JET_ORDER));
    let sin_half = jets.in_w(&half_angle(eta1, 0));
    let cos_half = jets.in_w(&half_angle(eta1, 1));
    let z = Series::constant(z1, JET_ORDER).add(&Series::identity(JET_ORDER)).unwrap();

    // S(z) = sin η/η
    let s = sin_eta.div(&jets.eta).unwrap();
    let (a2, a3) = (s.coeffs()[2], s.coeffs()[3]);
    let c1 = 1.0 / a2.sqrt();
    let c2 = -a3 / (2.0 * a2 * a2);

    // 𝒥 = z/2 + η tan(η/2)
    let j = half(&z).add(&jets.eta.mul(&sin_half.div(&cos_half).unwrap()).unwrap()).unwrap();
    // 𝓕 − π²/2 = z/2 − η cot η
    let f = half(&z).sub(&jets.eta.mul(&cos_eta.div(&sin_eta).unwrap()).unwrap()).unwrap();
    let c32 = |s: &Series<f64>| s.coeffs()[3] * c1.powi(3) + 2.0 * s.coeffs()[2] * c1 * c2;

    // 𝒢² = z/(η cot η − 1); the denominator vanishes at z₁
    let denom = jets.eta.mul(&cos_eta.div(&sin_eta).unwrap()).unwrap();
    let g_sq_residue = z1 / denom.coeffs()[1];

    PuiseuxData {
        eta1,
        z1,
        omega1,
        a2,
        a3,
        c1,
        c2,
        c32_j: c32(&j),
        c32_f: c32(&f),
        j_slope: j.coeffs()[1],
        f_slope: f.coeffs()[1],
        g_sq_residue,
    }
}

/// `sin((η₁+ε)/2)` or `cos((η₁+ε)/2)` in `ε`.
fn half_angle(eta1: f64, phase: usize) -> Series<f64> {
    let mut fact = 1.0;
    let mut scale = 1.0;
    Series::from_fn(JET_ORDER, |k| {
        if k > 0 {
            fact *= k as f64;
            scale *= 0.5;
        }
        scale * (0.5 * eta1 + (k + phase) as f64 * std::f64::consts::FRAC_PI_2).sin() / fact
    })
}

fn compute_constants(table: &CriticalPointTable, p: &PuiseuxData) -> AsymptoticConstants {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let (rho_x, theta_x) = (table.rho_x, table.theta_x);
    let w = -p.omega1;
    let half_three = |c: f64| 1.5 * (w * rho_x).powf(1.5) * c / sqrt_pi;
    let gamma_quarter = statrs::function::gamma::gamma(0.25);
    AsymptoticConstants {
        rho_x,
        theta_x,
        c_inf: -p.c1 * (1.0 - p.omega1).sqrt() / (2.0 * sqrt_pi),
        d_inf: -p.c1 * (w * rho_x / std::f64::consts::PI).sqrt(),
        d_j: half_three(p.c32_j),
        d_f: half_three(p.c32_f),
        d_g: 2.0 / gamma_quarter * (-p.g_sq_residue / p.c1).sqrt() * (w * rho_x).powf(-0.25),
    }
}

struct Cache {
    table: CriticalPointTable,
    puiseux: PuiseuxData,
    constants: AsymptoticConstants,
}

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| {
        let table = critical_points(5, &RootSolverConfig::default()).expect("bracketed roots converge");
        let puiseux = compute_puiseux(&table);
        let constants = compute_constants(&table, &puiseux);
        Cache { table, puiseux, constants }
    })
}

/// First five critical points with `ρ_x`, `θ_x`.
pub fn critical_point_table() -> &'static CriticalPointTable {
    &cache().table
}

pub fn puiseux_data() -> PuiseuxData {
    cache().puiseux
}

/// `C₁` from `C₁² = −8z₁/ℓ''(η₁)` with `ℓ(η) = sin η/η`, `ℓ''(η₁) = −ω₁`;
/// an independent route to the value in [`PuiseuxData::c1`].
pub fn c1_from_curvature() -> f64 {
    let p = puiseux_data();
    (-8.0 * p.z1 / -p.omega1).sqrt()
}

pub fn asymptotic_constants() -> AsymptoticConstants {
    cache().constants
}

fn sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Leading term for `c_n`, coefficients of `h` in `ω − 1`.
pub fn asympt_c(n: usize) -> f64 {
    let k = asymptotic_constants();
    let omega1 = puiseux_data().omega1;
    let nf = n as f64;
    k.c_inf * (1.0 - omega1).powf(-nf) * sign(n) * nf.powf(-1.5)
}

/// Leading term for `d_n`, coefficients of `h(e^y)`.
pub fn asympt_d(n: usize) -> f64 {
    let k = asymptotic_constants();
    let nf = n as f64;
    k.d_inf * k.rho_x.powf(-nf) * (k.theta_x * (nf - 0.5)).cos() * nf.powf(-1.5)
}

/// Leading term for the `(ω−1)` coefficients of `J_BS`.
pub fn asympt_cj(n: usize) -> f64 {
    2.0 * sign(n)
}

/// Leading term for the `log ω` coefficients of `J_BS`.
pub fn asympt_dj(n: usize) -> f64 {
    let k = asymptotic_constants();
    let nf = n as f64;
    k.d_j * k.rho_x.powf(-nf) * (k.theta_x * (1.5 - nf)).cos() * nf.powf(-2.5)
}

/// Leading term for `d_{F,n}` (expansion in `log ρ`).
pub fn asympt_df(n: usize) -> f64 {
    let k = asymptotic_constants();
    let nf = n as f64;
    sign(n) * k.d_f * k.rho_x.powf(-nf) * (k.theta_x * (nf - 1.5)).cos() * nf.powf(-2.5)
}

/// Leading term for the full coefficient `√3·d_{G,n}` of `G` in `log ρ`.
pub fn asympt_dg(n: usize) -> f64 {
    let k = asymptotic_constants();
    let nf = n as f64;
    sign(n) * k.d_g * k.rho_x.powf(-nf) * (k.theta_x * (nf + 0.25)).sin() * nf.powf(-0.75)
}

/// Coefficient family for the diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptFamily {
    C,
    D,
    CJ,
    DJ,
    DF,
    DG,
}

impl AsymptFamily {
    pub const ALL: [AsymptFamily; 6] =
        [AsymptFamily::C, AsymptFamily::D, AsymptFamily::CJ, AsymptFamily::DJ, AsymptFamily::DF, AsymptFamily::DG];

    pub fn name(self) -> &'static str {
        match self {
            AsymptFamily::C => "c",
            AsymptFamily::D => "d",
            AsymptFamily::CJ => "cJ",
            AsymptFamily::DJ => "dJ",
            AsymptFamily::DF => "dF",
            AsymptFamily::DG => "dG",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        AsymptFamily::ALL.into_iter().find(|f| f.name().eq_ignore_ascii_case(s))
    }

    /// The exact coefficient family this asymptotic law describes.
    pub fn source(self) -> crate::Family {
        use crate::Family;
        match self {
            AsymptFamily::C => Family::H,
            AsymptFamily::D => Family::HLog,
            AsymptFamily::CJ => Family::JbsOmega,
            AsymptFamily::DJ => Family::JbsLog,
            AsymptFamily::DF => Family::F,
            AsymptFamily::DG => Family::G,
        }
    }

    pub fn asympt(self, n: usize) -> f64 {
        match self {
            AsymptFamily::C => asympt_c(n),
            AsymptFamily::D => asympt_d(n),
            AsymptFamily::CJ => asympt_cj(n),
            AsymptFamily::DJ => asympt_dj(n),
            AsymptFamily::DF => asympt_df(n),
            AsymptFamily::DG => asympt_dg(n),
        }
    }

    /// The oscillating factor of the leading term (1 when there is none).
    pub fn trig_factor(self, n: usize) -> f64 {
        let t = asymptotic_constants().theta_x;
        let nf = n as f64;
        match self {
            AsymptFamily::C | AsymptFamily::CJ => 1.0,
            AsymptFamily::D => (t * (nf - 0.5)).cos(),
            AsymptFamily::DJ => (t * (1.5 - nf)).cos(),
            AsymptFamily::DF => (t * (nf - 1.5)).cos(),
            AsymptFamily::DG => (t * (nf + 0.25)).sin(),
        }
    }

    /// Limit of `|coeff_n|^{1/n}`.
    pub fn root_limit(self) -> f64 {
        match self {
            AsymptFamily::C => 1.0 / (1.0 - puiseux_data().omega1),
            AsymptFamily::CJ => 1.0,
            _ => 1.0 / asymptotic_constants().rho_x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub n: usize,
    pub coeff_exact: f64,
    pub coeff_asympt: f64,
    pub epsilon: f64,
    pub trig_factor: f64,
}

/// `ε_n = coeff_n/asympt_n − 1` for `n = 1..coeffs.len()`. `coeffs` are the
/// full coefficients (for `G` including the `√3`), index 0 is skipped.
pub fn diagnostic_epsilon(family: AsymptFamily, coeffs: &[f64]) -> Vec<DiagnosticRow> {
    (1..coeffs.len())
        .map(|n| {
            let exact = coeffs[n];
            let asympt = family.asympt(n);
            DiagnosticRow {
                n,
                coeff_exact: exact,
                coeff_asympt: asympt,
                epsilon: exact / asympt - 1.0,
                trig_factor: family.trig_factor(n),
            }
        })
        .collect()
}

/// Median of `|coeff_n|^{1/n}` over `n ∈ [lo, hi]`.
pub fn root_test_median(coeffs: &[f64], lo: usize, hi: usize) -> f64 {
    let mut roots: Vec<f64> =
        (lo..=hi.min(coeffs.len() - 1)).map(|n| coeffs[n].abs().powf(1.0 / n as f64)).collect();
    roots.sort_by(|a, b| a.total_cmp(b));
    let m = roots.len();
    if m == 0 {
        return f64::NAN;
    }
    if m % 2 == 1 {
        roots[m / 2]
    } else {
        0.5 * (roots[m / 2 - 1] + roots[m / 2])
    }
}

/// Writes diagnostic rows as CSV with a header.
pub fn diagnostics_csv(rows: &[DiagnosticRow], precision: usize) -> String {
    let mut out = String::from("n,coeff_exact,coeff_asympt,epsilon,trig_factor\n");
    let p = precision.saturating_sub(1);
    for r in rows {
        out.push_str(&format!(
            "{},{:.p$e},{:.p$e},{:.p$e},{:.p$e}\n",
            r.n, r.coeff_exact, r.coeff_asympt, r.epsilon, r.trig_factor
        ));
    }
    out
}
