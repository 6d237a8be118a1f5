//! Canned experiment recipes. Each target writes plot data only, one file
//! per curve, into the output directory.

use crate::commands::{Command, Context};
use crate::config::{ExperimentConfig, GammaSpec, OutageMethodChoice};
use crate::error::CliError;
use crate::output::{self, Table};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Required SNR against the rotation angle, 4/8/16-point real sets
    Fig4,
    /// Outage boundaries of the rotated 4-point set
    Fig5,
    /// Outage curves, two real blocks
    Fig6,
    /// Required SNR against the rotation angle, complex sets
    Fig7,
    /// Outage curves, complex sets
    Fig8,
    /// Three blocks: angle sweeps and outage curves
    Fig9,
}

struct Plan {
    step_deg: f64,
    step_b3_deg: f64,
    gammas_db: &'static str,
    gammas_b3_db: &'static str,
    rays: usize,
    intervals: usize,
    heavy_order: usize,
}

impl Plan {
    fn new(quick: bool) -> Self {
        if quick {
            Plan {
                step_deg: 15.0,
                step_b3_deg: 30.0,
                gammas_db: "4:12:8",
                gammas_b3_db: "6:12:6",
                rays: 100,
                intervals: 64,
                heavy_order: 4,
            }
        } else {
            Plan {
                step_deg: 0.5,
                step_b3_deg: 1.0,
                gammas_db: "0:30:1",
                gammas_b3_db: "0:24:2",
                rays: 1000,
                intervals: 512,
                heavy_order: 8,
            }
        }
    }
}

struct Emitter<'a> {
    dir: PathBuf,
    base: &'a ExperimentConfig,
}

impl Emitter<'_> {
    /// The user's engine, seed and format with every experiment field reset.
    fn cfg(&self, f: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
        let mut c = ExperimentConfig {
            engine: self.base.engine.clone(),
            seed: self.base.seed,
            format: self.base.format,
            ..ExperimentConfig::default()
        };
        f(&mut c);
        c
    }

    fn write(&self, stem: &str, cmd: Command, cfg: &ExperimentConfig, table: &Table) -> Result<(), CliError> {
        let path = self.dir.join(format!("{stem}.{}", cfg.format.extension()));
        output::write(&output::render(table, cmd.name(), cfg, cfg.format)?, Some(&path))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn emit(&self, stem: &str, cmd: Command, cfg: ExperimentConfig, notes: &[(&str, String)]) -> Result<(), CliError> {
        let mut t = Context::new(cfg.clone())?.run(cmd)?;
        for (k, v) in notes {
            t.note(k, v);
        }
        self.write(stem, cmd, &cfg, &t)
    }

    /// Writes the optimization profile and returns the optimal angle in degrees.
    fn optimize(&self, stem: &str, cfg: ExperimentConfig) -> Result<f64, CliError> {
        let (t, opt) = Context::new(cfg.clone())?.optimize()?;
        self.write(stem, Command::Optimize, &cfg, &t)?;
        Ok(opt.theta_opt_deg)
    }
}

fn range(hi: f64, step: f64) -> Option<String> {
    Some(format!("0:{hi}:{step}"))
}

fn gammas(spec: &str) -> Option<GammaSpec> {
    Some(GammaSpec::Range(spec.to_string()))
}

pub fn run(fig: Figure, base: &ExperimentConfig, quick: bool) -> Result<(), CliError> {
    let dir = base.out.clone().unwrap_or_else(|| PathBuf::from("reproduce"));
    let e = Emitter { dir, base };
    let p = Plan::new(quick);
    match fig {
        Figure::Fig4 => fig4(&e, &p),
        Figure::Fig5 => fig5(&e, &p),
        Figure::Fig6 => fig6(&e, &p),
        Figure::Fig7 => fig7(&e, &p),
        Figure::Fig8 => fig8(&e, &p),
        Figure::Fig9 => fig9(&e, &p),
    }
}

const REAL2: [&str; 3] = ["r2_4", "r2_8", "r2_16"];
const COMPLEX2: [&str; 2] = ["c2_16", "c2_64"];
const REAL3: [&str; 3] = ["r3_8", "r3_16", "r3_64"];

fn fig4(e: &Emitter, p: &Plan) -> Result<(), CliError> {
    for name in REAL2 {
        let cfg = e.cfg(|c| {
            c.constellation = Some(name.into());
            c.rate = Some(0.9);
            c.theta_range_deg = range(90.0, p.step_deg);
        });
        e.emit(&format!("fig4_{name}"), Command::Sweep, cfg, &[])?;
    }
    let cfg = e.cfg(|c| {
        c.constellations = Some(REAL2.iter().map(|s| s.to_string()).collect());
        c.rate = Some(0.9);
        c.optimize.coarse_step_deg = p.step_deg.min(5.0);
    });
    e.emit("fig4_expand", Command::Expand, cfg, &[])
}

fn fig5(e: &Emitter, p: &Plan) -> Result<(), CliError> {
    for theta in [0.0, 10.0, 27.0] {
        let cfg = e.cfg(|c| {
            c.constellation = Some("r2_4".into());
            c.theta_deg = Some(theta);
            c.rate = Some(0.9);
            c.gamma_db = Some(GammaSpec::Single(8.0));
            c.boundary_intervals = p.intervals;
        });
        e.emit(&format!("fig5_theta{theta}"), Command::Boundary, cfg, &[])?;
    }
    let cfg = e.cfg(|c| {
        c.constellation = Some("gaussian".into());
        c.dim = Some(2);
        c.rate = Some(0.9);
        c.gamma_db = Some(GammaSpec::Single(8.0));
        c.boundary_intervals = p.intervals;
    });
    e.emit("fig5_gaussian", Command::Boundary, cfg, &[])
}

fn outage_cfg(e: &Emitter, p: &Plan, name: &str, rate: f64, theta: Option<f64>) -> ExperimentConfig {
    e.cfg(|c| {
        c.constellation = Some(name.into());
        c.dim = Some(2);
        c.theta_deg = theta;
        c.rate = Some(rate);
        c.gamma_db = gammas(p.gammas_db);
        c.method = OutageMethodChoice::Boundary;
        c.boundary_intervals = p.intervals;
    })
}

fn fig6(e: &Emitter, p: &Plan) -> Result<(), CliError> {
    for name in REAL2 {
        let opt = e.cfg(|c| {
            c.constellation = Some(name.into());
            c.rate = Some(0.9);
            c.theta_range_deg = range(90.0, p.step_deg);
        });
        let theta = e.optimize(&format!("fig6_{name}_optimize"), opt)?;
        let cfg = outage_cfg(e, p, name, 0.9, Some(theta));
        e.emit(&format!("fig6_{name}"), Command::Outage, cfg, &[("theta_deg", theta.to_string())])?;
    }
    let cfg = outage_cfg(e, p, "r2_4", 0.9, Some(0.0));
    e.emit("fig6_r2_4_theta0", Command::Outage, cfg, &[("theta_deg", "0".into())])?;
    e.emit("fig6_gaussian", Command::Outage, outage_cfg(e, p, "gaussian", 0.9, None), &[])
}

fn fig7(e: &Emitter, p: &Plan) -> Result<(), CliError> {
    for name in COMPLEX2 {
        let cfg = e.cfg(|c| {
            c.constellation = Some(name.into());
            c.rate = Some(1.8);
            c.theta_range_deg = range(90.0, p.step_deg.max(1.0));
            if name == "c2_64" {
                c.engine.gh_order = c.engine.gh_order.min(2 * p.heavy_order);
            }
        });
        e.emit(&format!("fig7_{name}"), Command::Sweep, cfg, &[])?;
    }
    Ok(())
}

fn fig8(e: &Emitter, p: &Plan) -> Result<(), CliError> {
    for name in COMPLEX2 {
        let heavy = name == "c2_64";
        let opt = e.cfg(|c| {
            c.constellation = Some(name.into());
            c.rate = Some(1.8);
            c.theta_range_deg = range(90.0, p.step_deg.max(1.0));
            if heavy {
                c.engine.gh_order = c.engine.gh_order.min(2 * p.heavy_order);
            }
        });
        let theta = e.optimize(&format!("fig8_{name}_optimize"), opt)?;
        let mut cfg = outage_cfg(e, p, name, 1.8, Some(theta));
        if heavy {
            cfg.engine.gh_order = cfg.engine.gh_order.min(p.heavy_order);
            cfg.boundary_intervals = cfg.boundary_intervals.min(64);
        }
        e.emit(&format!("fig8_{name}"), Command::Outage, cfg, &[("theta_deg", theta.to_string())])?;
    }
    e.emit("fig8_gaussian", Command::Outage, outage_cfg(e, p, "gaussian_complex", 1.8, None), &[])
}

fn fig9(e: &Emitter, p: &Plan) -> Result<(), CliError> {
    let mc = |name: &str, theta: Option<f64>| {
        e.cfg(|c| {
            c.constellation = Some(name.into());
            c.dim = Some(3);
            c.theta1_deg = theta;
            c.rate = Some(0.9);
            c.gamma_db = gammas(p.gammas_b3_db);
            c.method = OutageMethodChoice::Ray;
            c.rays = p.rays;
            c.engine.gh_order = c.engine.gh_order.min(if name == "r3_64" { p.heavy_order } else { 2 * p.heavy_order });
        })
    };
    for name in REAL3 {
        let opt = e.cfg(|c| {
            c.constellation = Some(name.into());
            c.rate = Some(0.9);
            c.theta_range_deg = range(120.0, p.step_b3_deg);
        });
        let theta = e.optimize(&format!("fig9_{name}_optimize"), opt)?;
        e.emit(&format!("fig9_{name}"), Command::Outage, mc(name, Some(theta)), &[("theta1_deg", theta.to_string())])?;
    }
    e.emit("fig9_gaussian", Command::Outage, mc("gaussian", None), &[])
}
