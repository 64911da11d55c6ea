use std::path::PathBuf;

use asep_core::airy::{comparison_grid, f_gue, kpz_scaling_compare, ScalingSource};
use asep_core::bethe::{green_function, tw_distribution, GreenOptions, TwOptions};
use asep_core::bose::{she_moment, BoseParams};
use asep_core::duality::{
    det_cauchy, det_mellin_barnes, invert_distribution, moment_table_nested, moment_table_partition,
    tau_laplace_series, InversionOptions, LaplaceValue, MellinBarnesOptions, MomentOptions,
};
use asep_core::markov::{ParticleConfig, StepOracle, POISSON_TAIL};
use asep_core::montecarlo::{
    distribution_from_samples, estimate_distribution, estimate_moments, moments_from_samples, sample_currents,
    SimConfig,
};
use asep_core::tables::{DistributionTable, Method, MomentTable};
use asep_core::{ModelParams, C64};
use serde::Serialize;

use crate::config::{parse_list, Command, RunConfig};
use crate::error::CliError;
use crate::output::{number, svg_plot, Series, Sink};
use crate::validate;

/// Largest support computed by the `tw` route.
const MAX_TW_SUPPORT: usize = asep_core::bethe::MAX_TW_M;

/// Runs a resolved configuration and returns the files written.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let command = cfg.command.expect("resolved config names its command");
    let mut sink = Sink::new(cfg.out_path.as_deref().expect("resolved"))?;
    sink.json("config.json", cfg)?;
    let mut run = Run { cfg, sink: &mut sink };
    match command {
        Command::Simulate => run.simulate()?,
        Command::Oracle => run.oracle()?,
        Command::Green => run.green()?,
        Command::Moments => run.moments()?,
        Command::Dist => run.dist()?,
        Command::Laplace => run.laplace()?,
        Command::Bose => run.bose()?,
        Command::Gue => run.gue()?,
        Command::Compare => run.compare()?,
        Command::Validate => run.validate()?,
    }
    Ok(sink.written)
}

struct Run<'a> {
    cfg: &'a RunConfig,
    sink: &'a mut Sink,
}

fn value<T: Copy>(v: Option<T>) -> T {
    v.expect("resolved config sets every key its command reads")
}

impl Run<'_> {
    fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(value(self.cfg.p))?)
    }

    fn method(&self) -> &str {
        self.cfg.method.as_deref().expect("resolved")
    }

    fn plot(&self) -> bool {
        value(self.cfg.plot)
    }

    fn tables<T: Serialize>(&mut self, name: &str, header: &[&str], rows: &[Vec<String>], json: &T) -> Result<(), CliError> {
        let format = value(self.cfg.out_format);
        if format.csv() {
            self.sink.csv(&format!("{name}.csv"), header, rows)?;
        }
        if format.json() {
            self.sink.json(&format!("{name}.json"), json)?;
        }
        Ok(())
    }

    fn moment_table(&mut self, table: &MomentTable) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = table
            .entries
            .iter()
            .map(|e| vec![e.k.to_string(), number(e.value), number(e.error), table.method.to_string()])
            .collect();
        for r in &rows {
            println!("k={} value={} err={}", r[0], r[1], r[2]);
        }
        self.tables("moments", &["k", "value", "stderr_or_quaderr", "method"], &rows, table)
    }

    fn dist_table(&mut self, table: &DistributionTable) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = table
            .masses
            .iter()
            .zip(&table.errors)
            .enumerate()
            .map(|(m, (p, e))| vec![m.to_string(), number(*p), number(*e), table.method.to_string()])
            .collect();
        for r in &rows {
            println!("m={} mass={} err={}", r[0], r[1], r[2]);
        }
        println!("tail={}", number(table.tail));
        self.tables("dist", &["m", "mass", "err", "method"], &rows, table)?;
        if self.plot() {
            let points = table.masses.iter().enumerate().map(|(m, &p)| (m as f64, p)).collect();
            let svg = svg_plot(
                &format!("P(N0 = m), t = {}", table.t),
                "m",
                "mass",
                &[Series {
                    label: table.method.to_string(),
                    points,
                    step: false,
                }],
            );
            self.sink.text("dist.svg", &svg)?;
        }
        Ok(())
    }

    fn sim_config(&self, horizon: f64) -> Result<SimConfig, CliError> {
        Ok(SimConfig::new(
            self.params()?,
            horizon,
            value(self.cfg.replicas),
            value(self.cfg.seed),
        )?)
    }

    fn simulate(&mut self) -> Result<(), CliError> {
        let t = value(self.cfg.t);
        let cfg = self.sim_config(t)?;
        let samples = sample_currents(&cfg)?;
        let moments = moments_from_samples(&samples, cfg.params.tau(), t, value(self.cfg.k))?;
        let dist = distribution_from_samples(&samples, t, value(self.cfg.m))?;
        self.moment_table(&moments)?;
        self.dist_table(&dist)
    }

    fn oracle(&mut self) -> Result<(), CliError> {
        let (t, m, window) = (value(self.cfg.t), value(self.cfg.m), value(self.cfg.window));
        let full = StepOracle::new(&self.params()?, t, window, window)?.current_distribution();
        let masses: Vec<f64> = (0..=m).map(|i| full.get(i).copied().unwrap_or(0.0)).collect();
        let tail = full.iter().skip(m + 1).sum();
        let errors = vec![POISSON_TAIL; masses.len()];
        let table = DistributionTable::new(Method::Oracle, t, masses, errors, tail)?;
        self.dist_table(&table)
    }

    fn green(&mut self) -> Result<(), CliError> {
        let x: Vec<i64> = parse_list("x", self.cfg.x.as_deref().expect("resolved"))?;
        let y: Vec<i64> = parse_list("y", self.cfg.y.as_deref().expect("resolved"))?;
        let t = value(self.cfg.t);
        let opts = GreenOptions {
            nodes: value(self.cfg.nodes),
            ..GreenOptions::default()
        };
        let xc = ParticleConfig::new(x).map_err(|e| CliError::Usage(e.to_string()))?;
        let yc = ParticleConfig::new(y).map_err(|e| CliError::Usage(e.to_string()))?;
        let v = green_function(&yc, &xc, t, &self.params()?, opts)?;
        println!("P(x(t) = x | x(0) = y) = {}", number(v));
        let row = vec![self.cfg.y.clone().unwrap(), self.cfg.x.clone().unwrap(), number(t), number(v)];
        let quoted: Vec<String> = row.into_iter().map(|c| if c.contains(',') { format!("\"{c}\"") } else { c }).collect();
        #[derive(Serialize)]
        struct Green<'a> {
            y: &'a [i64],
            x: &'a [i64],
            t: f64,
            value: f64,
        }
        let json = Green {
            y: yc.coords(),
            x: xc.coords(),
            t,
            value: v,
        };
        self.tables("green", &["y", "x", "t", "value"], &[quoted], &json)
    }

    fn moments(&mut self) -> Result<(), CliError> {
        let (k, t, pr) = (value(self.cfg.k), value(self.cfg.t), self.params()?);
        let table = match self.method() {
            "partition" => moment_table_partition(k, t, &pr, MomentOptions { nodes: value(self.cfg.nodes) })?,
            "nested" => moment_table_nested(k, t, &pr, value(self.cfg.nodes))?,
            _ => estimate_moments(&self.sim_config(t)?, k)?,
        };
        self.moment_table(&table)
    }

    fn dist(&mut self) -> Result<(), CliError> {
        let (m, t, pr) = (value(self.cfg.m), value(self.cfg.t), self.params()?);
        let table = match self.method() {
            "duality" => invert_distribution(t, &pr, m, InversionOptions::default())?,
            "tw" => {
                let support = m.min(MAX_TW_SUPPORT);
                let opts = TwOptions::default();
                let masses = (0..=support)
                    .map(|mm| tw_distribution(mm, t, &pr, opts))
                    .collect::<Result<Vec<_>, _>>()?;
                let tail = 1.0 - masses.iter().sum::<f64>();
                let errors = vec![asep_core::bethe::TW_TOLERANCE; masses.len()];
                DistributionTable::new(Method::Tw, t, masses, errors, tail)?
            }
            "oracle" => return self.oracle(),
            _ => estimate_distribution(&self.sim_config(t)?, m)?,
        };
        self.dist_table(&table)
    }

    fn laplace(&mut self) -> Result<(), CliError> {
        let (zeta, t, pr, nodes) = (value(self.cfg.zeta), value(self.cfg.t), self.params()?, value(self.cfg.nodes));
        let v: LaplaceValue = match self.method() {
            "series" => tau_laplace_series(zeta, t, &pr, value(self.cfg.k), MomentOptions { nodes })?,
            "cauchy" => det_cauchy(C64::new(zeta, 0.0), t, &pr, nodes)?,
            _ => det_mellin_barnes(
                zeta,
                t,
                &pr,
                MellinBarnesOptions {
                    w_nodes: nodes,
                    ..MellinBarnesOptions::default()
                },
            )?,
        };
        println!("E[1/(zeta tau^N0; tau)_inf] = {} (err {})", number(v.value.re), number(v.error));
        let row = vec![
            number(zeta),
            number(v.value.re),
            number(v.value.im),
            number(v.error),
            number(v.truncation),
            self.method().to_string(),
        ];
        self.tables("laplace", &["zeta", "value_re", "value_im", "err", "truncation", "method"], &[row], &v)
    }

    fn bose(&mut self) -> Result<(), CliError> {
        let x: Vec<f64> = parse_list("x", self.cfg.x.as_deref().expect("resolved"))?;
        let (kappa, t) = (value(self.cfg.kappa), value(self.cfg.t));
        let bp = BoseParams::new(kappa, x.len())?;
        let v = she_moment(&x, t, &bp, value(self.cfg.nodes))?;
        println!("Zbar = {}", number(v));
        let row = vec![format!("\"{}\"", self.cfg.x.clone().unwrap()), number(kappa), number(t), number(v)];
        #[derive(Serialize)]
        struct Bose<'a> {
            x: &'a [f64],
            kappa: f64,
            t: f64,
            value: f64,
        }
        self.tables("bose", &["x", "kappa", "t", "value"], &[row], &Bose { x: &x, kappa, t, value: v })
    }

    fn gue(&mut self) -> Result<(), CliError> {
        let s: Vec<f64> = match &self.cfg.s {
            Some(list) => parse_list("s", list)?,
            None => comparison_grid(),
        };
        let nodes = value(self.cfg.nodes);
        let f = s.iter().map(|&s| f_gue(s, nodes)).collect::<Result<Vec<_>, _>>()?;
        let rows: Vec<Vec<String>> = s.iter().zip(&f).map(|(s, f)| vec![number(*s), number(*f)]).collect();
        #[derive(Serialize)]
        struct Gue<'a> {
            s: &'a [f64],
            f_gue: &'a [f64],
        }
        self.tables("gue", &["s", "f_gue"], &rows, &Gue { s: &s, f_gue: &f })?;
        if self.plot() {
            let points = s.iter().copied().zip(f.iter().copied()).collect();
            let svg = svg_plot("F_GUE", "s", "F_GUE(s)", &[Series { label: "F_GUE".into(), points, step: false }]);
            self.sink.text("gue.svg", &svg)?;
        }
        Ok(())
    }

    fn compare(&mut self) -> Result<(), CliError> {
        let t = value(self.cfg.t);
        let source = match self.method() {
            "exact" => ScalingSource::Exact,
            _ => ScalingSource::Simulation {
                replicas: value(self.cfg.replicas),
                seed: value(self.cfg.seed),
            },
        };
        let c = kpz_scaling_compare(t, &self.params()?, source)?;
        println!("sup distance = {} (se {})", number(c.distance), number(c.standard_error));
        let rows: Vec<Vec<String>> = c
            .grid
            .iter()
            .zip(c.empirical.iter().zip(&c.f_gue))
            .map(|(s, (e, f))| vec![number(*s), number(*e), number(*f)])
            .collect();
        self.tables("compare", &["s", "empirical", "f_gue"], &rows, &c)?;
        if self.plot() {
            let series = [
                Series {
                    label: "rescaled current".into(),
                    points: c.grid.iter().copied().zip(c.empirical.iter().copied()).collect(),
                    step: true,
                },
                Series {
                    label: "F_GUE".into(),
                    points: c.grid.iter().copied().zip(c.f_gue.iter().copied()).collect(),
                    step: false,
                },
            ];
            self.sink.text("compare.svg", &svg_plot(&format!("t = {t}"), "s", "CDF", &series))?;
        }
        Ok(())
    }

    fn validate(&mut self) -> Result<(), CliError> {
        let report = validate::run(value(self.cfg.quick), value(self.cfg.seed));
        let mut text = String::new();
        for c in &report.checks {
            let line = c.line();
            println!("{line}");
            text.push_str(&line);
            text.push('\n');
        }
        self.sink.text("validate.txt", &text)?;
        self.sink.json("validate.json", &report)?;
        let failed = report.checks.iter().filter(|c| !c.pass).count();
        if failed > 0 {
            return Err(CliError::Failed(format!("{failed} of {} checks failed", report.checks.len())));
        }
        Ok(())
    }
}
