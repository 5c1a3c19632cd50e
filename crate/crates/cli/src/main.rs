mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use thiserror::Error;

use hwkit::approx::{fold_coeffs, Target};
use hwkit::asymptotics::{
    asymptotic_constants, critical_point_table, diagnostic_epsilon, puiseux_data, root_test_median, AsymptFamily,
};
use hwkit::density::{theta_asympt, theta_hw, theta_hw_unchecked, Evaluators, ReducedDensity};
use hwkit::pricing::{price_batch, price_scenario, table3, ReducedParams, Scenario};
use hwkit::quadrature::{QuadratureSpec, Scheme};
use hwkit::series::families::{coeffs_family, Family};
use hwkit::series::text::write_series;
use hwkit::{RationalSeries, MAX_ORDER};

use output::Table;

#[derive(Parser, Debug)]
#[command(name = "hwkit", version, about = "Hartman-Watson series, rate functions and Asian option prices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format (`text` is accepted by `coeffs` only)
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Series order of the F and G evaluators
    #[arg(long, global = true, default_value_t = Evaluators::DEFAULT_ORDER)]
    order: usize,
    /// Series window of the evaluators as `lo,hi` in ρ units [default: e^-2,e^2]
    #[arg(long, global = true, value_parser = parse_domain)]
    domain: Option<(f64, f64)>,
    #[arg(long, global = true, default_value_t = Scheme::TanhSinh)]
    quad_scheme: Scheme,
    #[arg(long, global = true, default_value_t = QuadratureSpec::default().target_rel_err)]
    quad_tol: f64,
    /// Significant digits of printed floats
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact series coefficients of one family
    Coeffs {
        family: Family,
        #[arg(value_parser = clap::value_parser!(u32).range(1..=MAX_ORDER as i64))]
        n: u32,
    },
    /// Critical points and asymptotic constants
    Constants,
    /// Piecewise evaluation of F, G or J_BS
    Eval {
        target: Target,
        #[arg(required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
    },
    /// Exact versus asymptotic coefficients with relative errors
    Asympt {
        #[arg(value_parser = parse_asympt_family)]
        family: AsymptFamily,
        #[arg(value_parser = clap::value_parser!(u32).range(2..=MAX_ORDER as i64))]
        n: u32,
    },
    /// Normalized density f₀ of the time average on a grid of a
    Density {
        t: f64,
        #[arg(allow_negative_numbers = true)]
        mu: f64,
        values: Vec<f64>,
        /// Log-spaced grid `lo,hi,count` in addition to the listed values
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(f64, f64, usize)>,
    },
    /// Hartman-Watson θ_r(t) by quadrature or leading asymptotics
    Theta {
        r: f64,
        t: f64,
        #[arg(value_enum, default_value_t = ThetaMethod::Quadrature)]
        method: ThetaMethod,
        /// Skip the small-t guard and report the node-doubling change
        #[arg(long)]
        unchecked: bool,
    },
    /// Asian call prices for a scenario file or the built-in `table3`
    Price { source: String },
    /// Wall time per built-in scenario
    Bench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ThetaMethod {
    Quadrature,
    Asymptotic,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error(transparent)]
    Numeric(#[from] hwkit::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Parse { .. } => 4,
            CliError::Numeric(_) => 5,
        }
    }
}

fn numeric<E: Into<hwkit::Error>>(e: E) -> CliError {
    CliError::Numeric(e.into())
}

fn parse_domain(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected `lo,hi,count`".into());
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("{e}"))?;
    let count: usize = parts[2].parse().map_err(|e| format!("{e}"))?;
    if !(lo > 0.0 && hi >= lo && count >= 1) {
        return Err("grid needs 0 < lo <= hi and count >= 1".into());
    }
    Ok((lo, hi, count))
}

fn parse_asympt_family(s: &str) -> Result<AsymptFamily, String> {
    AsymptFamily::parse(s).ok_or_else(|| format!("unknown family `{s}` (expected c, d, cJ, dJ, dF or dG)"))
}

#[derive(Clone, Copy)]
struct Ctx {
    format: Format,
    precision: usize,
    quad: QuadratureSpec,
    order: usize,
    domain: (f64, f64),
}

impl Ctx {
    fn evaluators(&self) -> Result<Evaluators, CliError> {
        Evaluators::new(self.order, self.domain).map_err(numeric)
    }

    fn render(&self, table: &Table) -> Result<String, CliError> {
        match self.format {
            Format::Csv => Ok(table.to_csv(self.precision)),
            Format::Json => Ok(table.to_json(self.precision)),
            Format::Text => Err(CliError::Usage("--format text is only available for `coeffs`".into())),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    if !(g.quad_tol > 0.0) {
        return Err(CliError::Usage(format!("--quad-tol must be positive, got {}", g.quad_tol)));
    }
    let domain = g.domain.unwrap_or_else(Evaluators::default_window);
    if !(domain.0 > 0.0 && domain.0 <= 1.0 && domain.1 >= 1.0) {
        return Err(CliError::Usage(format!("--domain must satisfy 0 < lo <= 1 <= hi, got {domain:?}")));
    }
    let ctx = Ctx {
        format: g.format,
        precision: g.precision as usize,
        quad: QuadratureSpec { scheme: g.quad_scheme, ..QuadratureSpec::default() }.with_tol(g.quad_tol),
        order: g.order,
        domain,
    };
    let text = match cli.command {
        Command::Coeffs { family, n } => cmd_coeffs(&ctx, family, n as usize)?,
        Command::Constants => cmd_constants(&ctx)?,
        Command::Eval { target, values } => cmd_eval(&ctx, target, &values)?,
        Command::Asympt { family, n } => cmd_asympt(&ctx, family, n as usize)?,
        Command::Density { t, mu, values, grid } => cmd_density(&ctx, t, mu, values, grid)?,
        Command::Theta { r, t, method, unchecked } => cmd_theta(&ctx, r, t, method, unchecked)?,
        Command::Price { source } => cmd_price(&ctx, &source)?,
        Command::Bench => cmd_bench(&ctx)?,
    };
    match g.out {
        Some(path) => fs::write(&path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn cmd_coeffs(ctx: &Ctx, family: Family, n: usize) -> Result<String, CliError> {
    if n < family.min_order() {
        return Err(CliError::Usage(format!("family {family} needs N >= {}", family.min_order())));
    }
    let series: RationalSeries = coeffs_family(family, n).map_err(numeric)?;
    if ctx.format == Format::Text {
        return Ok(write_series(&series, Some(family.name())));
    }
    let surd = series.prefactor_sq().to_f64().unwrap_or(f64::NAN).sqrt();
    let mut table = Table::new(&["n", "exact", "value", "scaled"]);
    for (k, c) in series.coeffs().iter().enumerate() {
        let value = c.to_f64().unwrap_or(f64::NAN);
        table.push(vec![k.into(), format!("{}/{}", c.numer(), c.denom()).into(), value.into(), (value * surd).into()]);
    }
    ctx.render(&table)
}

fn cmd_constants(ctx: &Ctx) -> Result<String, CliError> {
    // constants are always printed with at least 12 digits
    let ctx = Ctx { precision: ctx.precision.max(12), ..*ctx };
    let table_1 = critical_point_table();
    let k = asymptotic_constants();
    let p = puiseux_data();
    let mut table = Table::new(&["name", "value"]);
    for e in &table_1.entries {
        table.push(vec![format!("eta_{}", e.k).into(), e.eta.into()]);
        table.push(vec![format!("z_{}", e.k).into(), e.z.into()]);
        table.push(vec![format!("omega_{}", e.k).into(), e.omega.into()]);
        table.push(vec![format!("abs_log_omega_{}", e.k).into(), e.abs_log_omega.into()]);
    }
    let rows = [
        ("rho_x", k.rho_x),
        ("theta_x", k.theta_x),
        ("c_inf", k.c_inf),
        ("d_inf", k.d_inf),
        ("d_J", k.d_j),
        ("d_F", k.d_f),
        ("d_G", k.d_g),
        ("C1", p.c1),
        ("C2", p.c2),
        ("a2", p.a2),
        ("a3", p.a3),
        ("C32_J", p.c32_j),
        ("C32_F", p.c32_f),
        ("G_sq_residue", p.g_sq_residue),
        ("self_check_rho_x_times_inverse", k.rho_x * (1.0 / k.rho_x)),
    ];
    for (name, value) in rows {
        table.push(vec![name.into(), value.into()]);
    }
    ctx.render(&table)
}

fn cmd_eval(ctx: &Ctx, target: Target, values: &[f64]) -> Result<String, CliError> {
    let ev = hwkit::approx::make_evaluator(target, ctx.order, ctx.domain).map_err(numeric)?;
    let mut table = Table::new(&["arg", "value", "path"]);
    for &x in values {
        let v = ev.eval(x).map_err(numeric)?;
        let path = if ev.in_window(x) { "series" } else { "exact" };
        table.push(vec![x.into(), v.into(), path.into()]);
    }
    ctx.render(&table)
}

fn cmd_asympt(ctx: &Ctx, family: AsymptFamily, n: usize) -> Result<String, CliError> {
    let source = family.source();
    let series: RationalSeries = coeffs_family(source, n.max(source.min_order())).map_err(numeric)?;
    let coeffs = fold_coeffs(&series);
    let rows = diagnostic_epsilon(family, &coeffs);
    let mut table = Table::new(&["n", "coeff_exact", "coeff_asympt", "epsilon", "trig_factor"]);
    for r in &rows {
        table.push(vec![r.n.into(), r.coeff_exact.into(), r.coeff_asympt.into(), r.epsilon.into(), r.trig_factor.into()]);
    }
    let text = ctx.render(&table)?;
    if ctx.format == Format::Csv && n >= 10 {
        // the root test summary goes to stderr to keep stdout plain CSV
        let lo = (4 * n) / 5;
        eprintln!(
            "median |coeff_n|^(1/n) over [{lo}, {n}]: {} (limit {})",
            output::fmt_sig(root_test_median(&coeffs, lo, n), ctx.precision),
            output::fmt_sig(family.root_limit(), ctx.precision)
        );
    }
    Ok(text)
}

fn cmd_density(ctx: &Ctx, t: f64, mu: f64, mut values: Vec<f64>, grid: Option<(f64, f64, usize)>) -> Result<String, CliError> {
    if let Some((lo, hi, count)) = grid {
        let step = if count > 1 { (hi / lo).ln() / (count - 1) as f64 } else { 0.0 };
        values.extend((0..count).map(|i| lo * (step * i as f64).exp()));
    }
    if values.is_empty() {
        return Err(CliError::Usage("density needs at least one value of a (or --grid)".into()));
    }
    let evals = ctx.evaluators()?;
    let density = ReducedDensity::new(t, mu, &evals, &ctx.quad).map_err(numeric)?;
    let mut table = Table::new(&["a", "f0", "norm"]);
    for a in values {
        let f = density.f0(a).map_err(numeric)?;
        table.push(vec![a.into(), f.into(), density.norm().into()]);
    }
    ctx.render(&table)
}

fn cmd_theta(ctx: &Ctx, r: f64, t: f64, method: ThetaMethod, unchecked: bool) -> Result<String, CliError> {
    let mut table = Table::new(&["r", "t", "method", "value", "rel_change"]);
    match method {
        ThetaMethod::Quadrature if unchecked => {
            let probe = theta_hw_unchecked(r, t, &ctx.quad).map_err(numeric)?;
            table.push(vec![r.into(), t.into(), "quadrature".into(), probe.value.into(), probe.rel_change.into()]);
        }
        ThetaMethod::Quadrature => {
            let v = theta_hw(r, t, &ctx.quad).map_err(numeric)?;
            table.push(vec![r.into(), t.into(), "quadrature".into(), v.into(), f64::NAN.into()]);
        }
        ThetaMethod::Asymptotic => {
            let evals = ctx.evaluators()?;
            let v = theta_asympt(r * t, t, &evals).map_err(numeric)?;
            table.push(vec![r.into(), t.into(), "asymptotic".into(), v.into(), f64::NAN.into()]);
        }
    }
    ctx.render(&table)
}

fn load_scenarios(source: &str) -> Result<Vec<Scenario>, CliError> {
    if source == "table3" {
        return Ok(table3());
    }
    let text = fs::read_to_string(source).map_err(|e| CliError::Io { path: source.into(), source: e })?;
    let scenarios: Vec<Scenario> =
        serde_json::from_str(&text).map_err(|e| CliError::Parse { path: source.into(), msg: e.to_string() })?;
    for s in &scenarios {
        s.validate().map_err(|e| CliError::Parse { path: source.into(), msg: e.to_string() })?;
    }
    Ok(scenarios)
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("HWKIT_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("HWKIT_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn cmd_price(ctx: &Ctx, source: &str) -> Result<String, CliError> {
    let scenarios = load_scenarios(source)?;
    let evals = ctx.evaluators()?;
    let results = price_batch(&scenarios, &evals, &ctx.quad, thread_cap()?).map_err(numeric)?;
    let mut table = Table::new(&["scenario", "mu", "tau", "c_A", "n", "C_A", "C_A_raw", "P_A"]);
    for (i, (s, r)) in scenarios.iter().zip(&results).enumerate() {
        let p = ReducedParams::from(s);
        table.push(vec![
            (i + 1).into(),
            p.mu.into(),
            p.tau.into(),
            r.c_reduced.into(),
            r.norm.into(),
            r.price.into(),
            r.price_raw.into(),
            r.put_price.unwrap_or(f64::NAN).into(),
        ]);
    }
    ctx.render(&table)
}

fn cmd_bench(ctx: &Ctx) -> Result<String, CliError> {
    let start = Instant::now();
    let evals = ctx.evaluators()?;
    let setup = start.elapsed().as_secs_f64();
    let mut table = Table::new(&["scenario", "seconds", "C_A"]);
    table.push(vec!["setup".into(), setup.into(), f64::NAN.into()]);
    for (i, s) in table3().iter().enumerate() {
        let t0 = Instant::now();
        let r = price_scenario(s, &evals, &ctx.quad).map_err(numeric)?;
        table.push(vec![(i + 1).to_string().into(), t0.elapsed().as_secs_f64().into(), r.price.into()]);
    }
    ctx.render(&table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hwkit::approx::{DEFAULT_RHO_L, DEFAULT_RHO_R};

    #[test]
    fn domain_and_grid_parsers() {
        assert_eq!(parse_domain("0.04,32.88").unwrap(), (DEFAULT_RHO_L, DEFAULT_RHO_R));
        assert!(parse_domain("1").is_err());
        assert_eq!(parse_grid("0.5,2,3").unwrap(), (0.5, 2.0, 3));
        assert!(parse_grid("0,2,3").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
