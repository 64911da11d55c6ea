//! Cross-route agreement suite behind `asep validate`.

use asep_core::airy::f_gue;
use asep_core::bethe::{check_free_evolution, green_function, tw_distribution, GreenOptions, TwOptions};
use asep_core::bose::{she_moment, two_replica_oracle, BoseParams};
use asep_core::duality::{
    det_cauchy, det_mellin_barnes, invert_distribution, moment_table_nested, moment_table_partition,
    tau_laplace_series, u_step, InversionOptions, MellinBarnesOptions, MomentOptions, UStepOptions,
};
use asep_core::markov::{check_duality, poisson_margin, Direction, DualityVariant, JumpRates, ParticleConfig};
use asep_core::montecarlo::{estimate_moments, sample_currents, SimConfig};
use asep_core::{ModelParams, Result, C64};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match &self.error {
            Some(e) => format!("{verdict} {}: {e}", self.name),
            None => format!("{verdict} {}: observed {:.3e}, tolerance {:.1e}", self.name, self.observed, self.tolerance),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub quick: bool,
    pub checks: Vec<Check>,
}

fn check(name: &str, tolerance: f64, observed: Result<f64>) -> Check {
    match observed {
        Ok(v) => Check {
            name: name.to_string(),
            observed: v,
            tolerance,
            pass: v <= tolerance,
            error: None,
        },
        Err(e) => Check {
            name: name.to_string(),
            observed: f64::NAN,
            tolerance,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every check; `quick` trims sizes and replica counts.
pub fn run(quick: bool, seed: u64) -> Report {
    let pr = ModelParams::new(0.3).expect("valid rate");
    let window = if quick { 5 } else { 6 };
    let replicas = if quick { 20_000 } else { 200_000 };
    let checks = vec![
        check("generator duality, both functionals", 1e-10, duality(window)),
        check("transition probability row sum", 1e-8, row_sum(&pr)),
        check("partition vs nested moments", 1e-7, nested_vs_partition(&pr)),
        check("tau-Laplace series vs Cauchy vs Mellin-Barnes", 1e-6, laplace_routes(&pr)),
        check("moment inversion vs Fredholm determinant", 1e-4, inversion_vs_tw(&pr)),
        check("contour solution residuals", 1e-7, u_step_residuals(&pr)),
        check("Bose gas one replica vs heat kernel", 1e-10, bose_heat()),
        check("Bose gas two replicas vs PDE", 1e-4, bose_pde()),
        check("F_GUE quadrature doubling", 1e-8, gue_doubling(quick)),
        check("Monte Carlo moments (in standard errors)", 3.0, monte_carlo(&pr, replicas, seed)),
        check("thread-count independence", 0.0, reproducible(&pr, seed)),
    ];
    Report { quick, checks }
}

fn duality(window: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in [0.3, 0.45] {
        let rates = JumpRates::of(&ModelParams::new(p)?, Direction::Forward);
        for variant in [DualityVariant::Schutz, DualityVariant::Second] {
            worst = worst.max(check_duality(window, 2, 0.5, variant, rates)?);
        }
    }
    Ok(worst)
}

fn row_sum(pr: &ModelParams) -> Result<f64> {
    let t = 0.5;
    let y = ParticleConfig::new(vec![0, 1])?;
    let margin = poisson_margin(2, t, 1e-10) as i64;
    let mut total = 0.0;
    for a in -margin..=1 + margin {
        for b in a + 1..=1 + margin {
            total += green_function(&y, &ParticleConfig::new(vec![a, b])?, t, pr, GreenOptions::default())?;
        }
    }
    Ok((total - 1.0).abs())
}

fn nested_vs_partition(pr: &ModelParams) -> Result<f64> {
    let t = 0.5;
    let a = moment_table_partition(3, t, pr, MomentOptions::default())?;
    let b = moment_table_nested(3, t, pr, 64)?;
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x.value - y.value).abs())
        .fold(0.0, f64::max))
}

fn laplace_routes(pr: &ModelParams) -> Result<f64> {
    let (zeta, t) = (-0.1, 1.0);
    let s = tau_laplace_series(zeta, t, pr, 24, MomentOptions::default())?.value.re;
    let c = det_cauchy(C64::new(zeta, 0.0), t, pr, 128)?.value.re;
    let m = det_mellin_barnes(zeta, t, pr, MellinBarnesOptions::default())?.value.re;
    Ok((s - c).abs().max((c - m).abs()))
}

fn inversion_vs_tw(pr: &ModelParams) -> Result<f64> {
    let t = 0.5;
    let d = invert_distribution(t, pr, 8, InversionOptions::default())?;
    let mut worst = 0.0f64;
    for m in 0..=4 {
        worst = worst.max((d.mass(m) - tw_distribution(m, t, pr, TwOptions::default())?).abs());
    }
    Ok(worst)
}

fn u_step_residuals(pr: &ModelParams) -> Result<f64> {
    let rates = JumpRates::of(pr, Direction::Adjoint);
    let v = |x: &[i64], t: f64| u_step(x, t, pr, UStepOptions::default());
    let mut worst = 0.0f64;
    for x in [vec![1i64, 2], vec![2, 4], vec![1, 2, 3]] {
        let r = check_free_evolution(v, &x, 0.7, rates)?;
        worst = worst.max(r.relative_free()).max(r.relative_boundary().unwrap_or(0.0));
    }
    Ok(worst)
}

fn bose_heat() -> Result<f64> {
    let (x, t) = (0.4, 0.8);
    let v = she_moment(&[x], t, &BoseParams::new(1.0, 1)?, 128)?;
    let heat = (-x * x / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t).sqrt();
    Ok((v - heat).abs())
}

fn bose_pde() -> Result<f64> {
    let v = she_moment(&[0.0, 0.0], 0.5, &BoseParams::new(1.0, 2)?, 128)?;
    Ok((v - two_replica_oracle(1.0, 0.5, 1e-3, 1e-4)?).abs())
}

fn gue_doubling(quick: bool) -> Result<f64> {
    let points: &[f64] = if quick { &[-2.0] } else { &[-4.0, -2.0, 0.0, 2.0] };
    let mut worst = 0.0f64;
    for &s in points {
        worst = worst.max((f_gue(s, 64)? - f_gue(s, 128)?).abs());
    }
    Ok(worst)
}

/// Largest `|simulated - exact| / stderr` over `k = 1..=3`.
fn monte_carlo(pr: &ModelParams, replicas: usize, seed: u64) -> Result<f64> {
    let t = 0.5;
    let mc = estimate_moments(&SimConfig::new(*pr, t, replicas, seed)?, 3)?;
    let exact = moment_table_partition(3, t, pr, MomentOptions::default())?;
    Ok((1..=3)
        .map(|k| (mc.entries[k].value - exact.entries[k].value).abs() / mc.entries[k].error)
        .fold(0.0, f64::max))
}

/// Number of replicas whose outcome depends on the worker count.
fn reproducible(pr: &ModelParams, seed: u64) -> Result<f64> {
    let cfg = SimConfig::new(*pr, 2.0, 2_000, seed)?;
    let with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| sample_currents(&cfg))
    };
    let (a, b) = (with(1)?, with(3)?);
    Ok(a.iter().zip(&b).filter(|(x, y)| x != y).count() as f64)
}
