use crate::config::{parse_range, ExperimentConfig, OutageMethodChoice};
use crate::error::CliError;
use crate::output::{Cell, Table};
use outagelab::constellations::{build_named, load_constellation};
use outagelab::mutual_info::{mi_gaussian, MiUnits};
use outagelab::optimizer::{self, default_range_deg, degree_grid, OptimizeOptions, SweepProfile};
use outagelab::outage::{
    self, compute_anchors, db_to_linear, hypersphere_bounds, linear_to_db, McOptions, OutageAnchors, OutageQuery,
    OutageResult, RayMcOptions,
};
use outagelab::{ChannelSample, Constellation, Field, MiEngine, Precoder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Mi,
    Anchors,
    Outage,
    Boundary,
    Sweep,
    Optimize,
    Expand,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Mi => "mi",
            Command::Anchors => "anchors",
            Command::Outage => "outage",
            Command::Boundary => "boundary",
            Command::Sweep => "sweep",
            Command::Optimize => "optimize",
            Command::Expand => "expand",
        }
    }
}

/// Channel input: a precoded discrete constellation or Gaussian signalling.
pub enum Input {
    Discrete { omega_z: Constellation, omega_x: Constellation },
    Gaussian { field: Field, dim: usize },
}

impl Input {
    pub fn dim(&self) -> usize {
        match self {
            Input::Discrete { omega_x, .. } => omega_x.dim(),
            Input::Gaussian { dim, .. } => *dim,
        }
    }

    fn bits(&self) -> Option<f64> {
        match self {
            Input::Discrete { omega_z, .. } => Some(omega_z.bits()),
            Input::Gaussian { .. } => None,
        }
    }

    fn omega_z(&self) -> Result<&Constellation, CliError> {
        match self {
            Input::Discrete { omega_z, .. } => Ok(omega_z),
            Input::Gaussian { .. } => Err(CliError::config("this command needs a discrete constellation")),
        }
    }

    fn query(&self, engine: &MiEngine, rate: f64, gamma: f64) -> Result<OutageQuery, CliError> {
        Ok(match self {
            Input::Discrete { omega_x, .. } => OutageQuery::precoded(engine, omega_x.clone(), rate, gamma)?,
            Input::Gaussian { field, dim } => OutageQuery::gaussian(*field, *dim, rate, gamma)?,
        })
    }
}

pub struct Context {
    pub cfg: ExperimentConfig,
    pub engine: MiEngine,
}

impl Context {
    pub fn new(cfg: ExperimentConfig) -> Result<Self, CliError> {
        let engine = MiEngine::new(cfg.engine.clone())?;
        Ok(Self { cfg, engine })
    }

    pub fn run(&self, cmd: Command) -> Result<Table, CliError> {
        match cmd {
            Command::Mi => self.mi(),
            Command::Anchors => self.anchors(),
            Command::Outage => self.outage(),
            Command::Boundary => self.boundary(),
            Command::Sweep => self.sweep(),
            Command::Optimize => self.optimize().map(|(t, _)| t),
            Command::Expand => self.expand(),
        }
    }

    fn constellation(&self) -> Result<Option<Constellation>, CliError> {
        let c = match (&self.cfg.constellation_file, self.cfg.constellation.as_deref()) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("give either `--constellation` or `--constellation-file`, not both"))
            }
            (Some(path), None) => load_constellation(path)?,
            (None, Some("gaussian" | "gaussian_complex")) => return Ok(None),
            (None, Some(name)) => build_named(name)?,
            (None, None) => return Err(CliError::config("missing `--constellation` or `--constellation-file`")),
        };
        if let Some(b) = self.cfg.dim {
            if b != c.dim() {
                return Err(CliError::config(format!(
                    "field `B`: {} is {}-dimensional but B = {b}",
                    c.name(),
                    c.dim()
                )));
            }
        }
        Ok(Some(c))
    }

    pub fn input(&self) -> Result<Input, CliError> {
        match self.constellation()? {
            Some(omega_z) => {
                let omega_x = self.precoder(omega_z.dim())?.apply(&omega_z)?;
                Ok(Input::Discrete { omega_z, omega_x })
            }
            None => {
                let field = match self.cfg.constellation.as_deref() {
                    Some("gaussian_complex") => Field::Complex,
                    _ => Field::Real,
                };
                Ok(Input::Gaussian { field, dim: self.cfg.dim.unwrap_or(2) })
            }
        }
    }

    fn precoder(&self, b: usize) -> Result<Precoder, CliError> {
        let cfg = &self.cfg;
        let sign0 = cfg.lambda0_sign.unwrap_or(1);
        if let Some(phases) = &cfg.phases_deg {
            if cfg.theta_deg.is_some() || cfg.theta1_deg.is_some() {
                return Err(CliError::config("`--phases-deg` cannot be combined with `--theta-deg` or `--theta1-deg`"));
            }
            let rad: Vec<f64> = phases.iter().map(|d| d.to_radians()).collect();
            let half = (b % 2 == 0).then_some(1);
            return Ok(Precoder::circulant_from_phases(b, &rad, sign0, half)?);
        }
        match b {
            1 => Ok(Precoder::identity(1)),
            2 => {
                if cfg.theta1_deg.is_some() {
                    return Err(CliError::config("`--theta1-deg` applies to B=3; use `--theta-deg` for B=2"));
                }
                Ok(Precoder::rotation2(cfg.theta_deg.unwrap_or(0.0).to_radians()))
            }
            3 => {
                let t = cfg.theta1_deg.or(cfg.theta_deg).unwrap_or(0.0);
                Ok(Precoder::rotation3(t.to_radians(), sign0)?)
            }
            _ if cfg.theta_deg.is_some() || cfg.theta1_deg.is_some() => Err(CliError::config(format!(
                "single-angle precoders need B=2 or B=3; use `--phases-deg` for B={b}"
            ))),
            _ => Ok(Precoder::identity(b)),
        }
    }

    pub fn rate(&self, input: &Input) -> Result<f64, CliError> {
        let cfg = &self.cfg;
        let b = input.dim();
        if let (Some(m), Some(bits)) = (cfg.m, input.bits()) {
            if (m - bits).abs() > 1e-9 {
                return Err(CliError::config(format!("field `m`: {m} does not match the constellation's {bits} bits")));
            }
        }
        let r = match (cfg.rate, cfg.rc) {
            (Some(_), Some(_)) => return Err(CliError::config("give either `--R` or `--Rc`, not both")),
            (Some(r), None) => r,
            (None, Some(rc)) => {
                let m = cfg
                    .m
                    .or(input.bits())
                    .ok_or_else(|| CliError::config("`--Rc` with Gaussian input needs `--m`"))?;
                outage::rate_from_code(rc, m, b)
            }
            (None, None) => return Err(CliError::config("missing `--R` (or `--Rc`)")),
        };
        if !(r > 0.0 && r.is_finite()) {
            return Err(CliError::config(format!("field `R`: rate must be positive, got {r}")));
        }
        Ok(r)
    }

    fn mi(&self) -> Result<Table, CliError> {
        let input = self.input()?;
        let b = input.dim();
        let alpha = self.cfg.alpha.clone().unwrap_or_else(|| vec![1.0; b]);
        if alpha.len() != b {
            return Err(CliError::config(format!("field `alpha`: expected {b} gains, got {}", alpha.len())));
        }
        let mut t = Table::new(&["gamma_db", "mi_bits", "mi_bits_per_use", "method", "std_error", "evaluations"]);
        for g in self.cfg.gammas_db()? {
            let s = ChannelSample::new(alpha.clone(), db_to_linear(g))?;
            let est = match &input {
                Input::Discrete { omega_x, .. } => self.engine.mi_discrete(omega_x, &s)?,
                Input::Gaussian { field, .. } => mi_gaussian(&s, *field),
            };
            let (total, per_use) = match est.units {
                MiUnits::PerChannelUse => (est.value * b as f64, est.value),
                MiUnits::PerSymbolVector => (est.value, est.value / b as f64),
            };
            let method = serde_json::to_value(est.method).ok().and_then(|v| v.as_str().map(String::from));
            t.push(vec![
                g.into(),
                total.into(),
                per_use.into(),
                method.unwrap_or_default().into(),
                est.std_error.into(),
                est.nodes_or_samples.into(),
            ]);
        }
        Ok(t)
    }

    fn anchors_for(&self, input: &Input, q: &OutageQuery) -> Result<OutageAnchors, CliError> {
        Ok(match input {
            Input::Discrete { .. } => compute_anchors(&self.engine, q)?,
            Input::Gaussian { field, dim } => OutageAnchors::gaussian(*field, *dim, q.rate(), q.gamma()),
        })
    }

    fn anchors(&self) -> Result<Table, CliError> {
        let input = self.input()?;
        let rate = self.rate(&input)?;
        let mut t = Table::new(&["gamma_db", "alpha_o", "alpha_e", "p_up", "p_low", "note"]);
        for g in self.cfg.gammas_db()? {
            let q = input.query(&self.engine, rate, db_to_linear(g))?;
            let a = self.anchors_for(&input, &q)?;
            let (p_up, p_low) = hypersphere_bounds(&a, input.dim());
            let note = [a.alpha_o_reason.clone(), a.alpha_e_reason.clone()]
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
                .join("; ");
            t.push(vec![g.into(), a.alpha_o.into(), a.alpha_e.into(), p_up.into(), p_low.into(), note.into()]);
        }
        Ok(t)
    }

    fn outage_curve(&self, input: &Input, rate: f64, gammas_db: &[f64]) -> Result<Vec<OutageResult>, CliError> {
        let first = *gammas_db.first().ok_or_else(|| CliError::config("field `gamma_db`: empty grid"))?;
        let q = input.query(&self.engine, rate, db_to_linear(first))?;
        let gammas: Vec<f64> = gammas_db.iter().map(|g| db_to_linear(*g)).collect();
        let method = match self.cfg.method {
            OutageMethodChoice::Auto if q.dim() == 2 => OutageMethodChoice::Boundary,
            OutageMethodChoice::Auto => OutageMethodChoice::Ray,
            OutageMethodChoice::Boundary if q.dim() != 2 => {
                return Err(CliError::config("boundary integration needs B=2; use `--method ray` or `--method mc`"))
            }
            m => m,
        };
        Ok(match method {
            OutageMethodChoice::Boundary => {
                outage::outage_curve_2d(&self.engine, &q, &gammas, self.cfg.boundary_intervals)?
            }
            OutageMethodChoice::Ray => {
                let opts = RayMcOptions { rays: self.cfg.rays, seed: self.cfg.seed };
                outage::outage_ray_mc_curve(&self.engine, &q, &gammas, &opts)?
            }
            _ => {
                let opts = McOptions::new(self.cfg.outage_samples, self.cfg.seed);
                let mut out = Vec::with_capacity(gammas.len());
                for g in gammas {
                    out.push(outage::outage_mc(&self.engine, &q.with_gamma(g)?, &opts)?);
                }
                out
            }
        })
    }

    fn outage(&self) -> Result<Table, CliError> {
        let input = self.input()?;
        let rate = self.rate(&input)?;
        if let Some(bits) = input.bits() {
            let limit = bits / input.dim() as f64;
            if rate >= limit {
                eprintln!(
                    "warning: R = {rate} is not below the alphabet limit m/B = {limit}; p_out = 1 at every SNR"
                );
            }
        }
        let mut t = Table::new(&["gamma_db", "p_out", "ci_lo", "ci_hi", "p_up", "p_low", "method", "seed"]);
        let gammas = self.cfg.gammas_db()?;
        for (g, r) in gammas.iter().zip(self.outage_curve(&input, rate, &gammas)?) {
            t.push(vec![
                (*g).into(),
                r.p_out.into(),
                r.ci95.0.into(),
                r.ci95.1.into(),
                r.p_up.into(),
                r.p_low.into(),
                r.method.label().into(),
                self.cfg.seed.into(),
            ]);
        }
        Ok(t)
    }

    fn boundary(&self) -> Result<Table, CliError> {
        let input = self.input()?;
        if input.dim() != 2 {
            return Err(CliError::config(format!("boundary tracing needs B=2, got B={}", input.dim())));
        }
        let rate = self.rate(&input)?;
        let gammas = self.cfg.gammas_db()?;
        let [g] = gammas.as_slice() else {
            return Err(CliError::config("boundary takes a single `--gamma-db` value"));
        };
        let q = input.query(&self.engine, rate, db_to_linear(*g))?;
        let trace = outage::trace_boundary_2d(&self.engine, &q, self.cfg.boundary_intervals)?;
        let mut t = Table::new(&["lambda_rad", "rho", "saturated"]);
        for p in &trace.points {
            t.push(vec![p.lambda_rad.into(), p.rho.into(), p.saturated.into()]);
        }
        t.note("gamma_db", g);
        t.note("rate", rate);
        if let Some(a) = trace.ergodic_anchor() {
            t.note("alpha_e", a);
        }
        if trace.intervals() % 2 == 0 && trace.intervals() >= outage::MIN_TRACE_INTERVALS {
            t.note("p_out", outage::outage_from_boundary_2d(&trace)?.p_out);
        }
        Ok(t)
    }

    fn grid_deg(&self, dim: usize) -> Result<Vec<f64>, CliError> {
        match &self.cfg.theta_range_deg {
            Some(s) => parse_range("theta_range_deg", s),
            None => {
                let (lo, hi) = default_range_deg(dim);
                Ok(degree_grid(lo, hi, self.cfg.optimize.coarse_step_deg)?)
            }
        }
    }

    fn sweep(&self) -> Result<Table, CliError> {
        let input = self.input()?;
        let omega_z = input.omega_z()?;
        let rate = self.rate(&input)?;
        let grid: Vec<f64> = self.grid_deg(omega_z.dim())?.iter().map(|d| d.to_radians()).collect();
        let profile = optimizer::sweep(&self.engine, omega_z, rate, &grid, true)?;
        profile_table(&profile, omega_z)
    }

    pub fn optimize(&self) -> Result<(Table, optimizer::Optimum), CliError> {
        let input = self.input()?;
        let omega_z = input.omega_z()?;
        let rate = self.rate(&input)?;
        let mut opts: OptimizeOptions = self.cfg.optimize.clone();
        if let Some(s) = &self.cfg.theta_range_deg {
            let parts: Vec<f64> = parse_range("theta_range_deg", s)?;
            if parts.len() < 2 {
                return Err(CliError::config("field `theta_range_deg`: optimize needs `a:b:step`"));
            }
            opts.range_deg = Some((parts[0], *parts.last().unwrap()));
            opts.coarse_step_deg = parts[1] - parts[0];
        }
        let opt = optimizer::optimize(&self.engine, omega_z, rate, &opts)?;
        let mut t = profile_table(&opt.profile, omega_z)?;
        let intervals: Vec<String> = opt.intervals_deg.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
        t.note("theta_opt_deg", opt.theta_opt_deg);
        t.note("gamma_s_opt_db", linear_to_db(opt.gamma_s_opt));
        t.note("gap_to_gaussian_db", opt.gap_to_gaussian_db());
        t.note("near_optimal_deg", intervals.join(" "));
        Ok((t, opt))
    }

    fn expand(&self) -> Result<Table, CliError> {
        let names = self
            .cfg
            .constellations
            .as_ref()
            .filter(|v| !v.is_empty())
            .ok_or_else(|| CliError::config("expand needs `--constellations a,b,...`"))?;
        let rate = self.cfg.rate.ok_or_else(|| CliError::config("expand needs `--R`"))?;
        let mut candidates = Vec::with_capacity(names.len());
        for n in names {
            let c = build_named(n)?;
            let rc = rate * c.dim() as f64 / c.bits();
            candidates.push((c, rc));
        }
        let rows = optimizer::expansion_compare(&self.engine, &candidates, rate, &self.cfg.optimize)?;
        let mut t = Table::new(&["name", "m", "rc", "theta_opt_deg", "gamma_s_opt_db", "ergodic_snr_db", "gap_db"]);
        for r in rows {
            t.push(vec![
                r.name.into(),
                r.m.into(),
                r.rc.into(),
                r.theta_opt_deg.into(),
                r.gamma_s_opt_db.into(),
                r.ergodic_snr_db.into(),
                r.gap_db.into(),
            ]);
        }
        Ok(t)
    }
}

fn profile_table(p: &SweepProfile, omega_z: &Constellation) -> Result<Table, CliError> {
    let d_pmin = match &p.d_pmin {
        Some(d) => d.clone(),
        None => optimizer::product_distance_profile(omega_z, &p.grid)?,
    };
    let floor_db = linear_to_db(p.gaussian_floor);
    let mut t = Table::new(&["theta_deg", "gamma_s_db", "gamma_floor_db", "d_pmin", "saturated"]);
    for (k, th) in p.grid.iter().enumerate() {
        let deg = (th.to_degrees() * 1e9).round() / 1e9;
        t.push(vec![
            deg.into(),
            linear_to_db(p.gamma_s[k]).into(),
            floor_db.into(),
            d_pmin[k].into(),
            Cell::B(p.saturated(k)),
        ]);
    }
    t.note("parameter", &p.param_name);
    t.note("rate", p.rate);
    Ok(t)
}
