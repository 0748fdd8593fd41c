//! Command-line front end.
//!
//! Options come from flags and, optionally, from a `key = value` file named by
//! `--config`; flags win. Keys are long flag names (`q-max` or `q_max`).
//! Exit status: 0 on success, 1 on numerical failure, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::acceptance;
use crate::algebra::{classify, ConformalModel, Generator, GeneratorCoeffs};
use crate::dos::{self, DosEstimate, SemiclassicalForm};
use crate::dynamics::{self, EffectiveOp, Method, PhaseState};
use crate::frames::{rckf_flow, DiamondGeometry, KillingField, SpacetimeEvent};
use crate::io::{self, Cell, Table};
use crate::pathint::{self, GreensSide, KernelKind, PartitionMethod, TraceMethod, TraceOp};
use crate::spectral::{self, BoxDiscretization, Potential};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] crate::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 1,
        }
    }
}

fn numerical<E: Into<crate::Error>>(e: E) -> CliError {
    CliError::Numerical(e.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "H", alias = "h")]
    H,
}

impl OpArg {
    fn effective(self) -> EffectiveOp {
        match self {
            OpArg::R => EffectiveOp::R,
            OpArg::S => EffectiveOp::S,
            OpArg::H => EffectiveOp::H,
        }
    }

    fn name(self) -> &'static str {
        match self {
            OpArg::R => "R",
            OpArg::S => "S",
            OpArg::H => "H",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "D", alias = "d")]
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quadrature,
    ClosedForm,
}

impl MethodArg {
    fn method(self) -> Method {
        match self {
            MethodArg::Quadrature => Method::Quadrature,
            MethodArg::ClosedForm => Method::ClosedForm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "K_R")]
    KR,
    #[value(name = "K_S")]
    KS,
    #[value(name = "K_R_Euclid")]
    KREuclid,
    #[value(name = "G_R")]
    GR,
    #[value(name = "G_S")]
    GS,
}

impl KindArg {
    fn kind(self) -> KernelKind {
        match self {
            KindArg::KR => KernelKind::KR,
            KindArg::KS => KernelKind::KS,
            KindArg::KREuclid => KernelKind::KREuclid,
            KindArg::GR => KernelKind::GR,
            KindArg::GS => KernelKind::GS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Retarded,
    Advanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DosRoute {
    Digamma,
    ThomasFermi,
    ThomasFermiBox,
    PoleClosed,
    GutzwillerSeries,
    Series,
    Staircase,
    All,
}

#[derive(Debug, Parser)]
#[command(name = "cqm", version, about = "Conformal quantum mechanics of causal diamonds")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// coupling of the inverse-square barrier
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// diamond half-size; omega = 1/alpha
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    /// write the artifact here instead of stdout
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key = value file; flags given on the command line take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discriminant and class of H, D, K, R, S or of u H + v D + w K
    Classify {
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        v: Option<f64>,
        #[arg(long)]
        w: Option<f64>,
    },
    /// Effective potential samples V(q)
    Potential {
        #[arg(long, value_enum, default_value = "S")]
        op: OpArg,
        /// in units of sqrt(hbar/(M omega))
        #[arg(long, default_value_t = 0.3)]
        q_min: f64,
        #[arg(long, default_value_t = 3.0)]
        q_max: f64,
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// Integral curves of a radial conformal Killing field inside the diamond
    Flow {
        #[arg(long, value_enum, default_value = "S")]
        field: FieldArg,
        /// start points r0 (fractions of alpha) on t = t0
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.4,0.55,0.7,0.85")]
        r0: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 12.0)]
        s_max: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// also emit each curve reflected to r < 0
        #[arg(long)]
        mirror: bool,
    },
    /// Hamiltonian direction field (dq, dp) on a (q, p) grid
    PhaseField {
        #[arg(long, value_enum, default_value = "S")]
        op: OpArg,
        #[arg(long, default_value_t = 0.2)]
        q_min: f64,
        #[arg(long, default_value_t = 3.0)]
        q_max: f64,
        #[arg(long, default_value_t = -3.0)]
        p_min: f64,
        #[arg(long, default_value_t = 3.0)]
        p_max: f64,
        #[arg(long, default_value_t = 21)]
        nq: usize,
        #[arg(long, default_value_t = 21)]
        np: usize,
    },
    /// Trajectory (tau, q, p, energy) of an effective Hamiltonian
    Orbit {
        #[arg(long, value_enum, default_value = "R")]
        op: OpArg,
        #[arg(long, default_value_t = 2.0)]
        energy: f64,
        /// start position; default is the inner turning point (R) or the crossover length (S, H)
        #[arg(long)]
        q0: Option<f64>,
        #[arg(long)]
        p0: Option<f64>,
        /// default: one period pi alpha (R) or 3 alpha (S, H)
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Twin-trajectory Lyapunov rate
    Lyapunov {
        #[arg(long, value_enum, default_value = "S")]
        op: OpArg,
        #[arg(long)]
        q0: Option<f64>,
        /// initial separation relative to q0
        #[arg(long, default_value_t = 1e-6)]
        delta0: f64,
        /// default 12 alpha
        #[arg(long)]
        tau_max: Option<f64>,
    },
    /// Closed-orbit period of R
    Period {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        energy: Vec<f64>,
        #[arg(long, value_enum, default_value = "quadrature")]
        method: MethodArg,
    },
    /// Closed-orbit Jacobi action of R
    Action {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        energy: Vec<f64>,
        #[arg(long, value_enum, default_value = "quadrature")]
        method: MethodArg,
        /// replace g by g + 1/4
        #[arg(long)]
        langer: bool,
    },
    /// Propagator or Green's function table
    Propagator {
        #[arg(long, value_enum, default_value = "K_R_Euclid")]
        kind: KindArg,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        r1: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        r2: Vec<f64>,
        /// times for kernels
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
        /// energies for Green's functions
        #[arg(long, value_delimiter = ',', default_value = "1")]
        energy: Vec<f64>,
        #[arg(long, value_enum, default_value = "retarded")]
        side: SideArg,
    },
    /// Kernel trace, closed form against quadrature
    Trace {
        /// Euclidean times in units of 1/omega
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,5")]
        omega_t: Vec<f64>,
    },
    /// Partition function of R, closed form against eigen-sum
    Partition {
        /// inverse temperatures in units of 1/(hbar omega)
        #[arg(long, value_delimiter = ',', default_value = "0.1,1,10")]
        beta_hbar_omega: Vec<f64>,
    },
    /// Diamond temperature and the chaos-bound ratio
    Thermality,
    /// Density of states of S by one or all routes
    Dos {
        #[arg(long, value_enum, default_value = "all")]
        route: DosRoute,
        /// energies in units of hbar omega
        #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
        energy: Vec<f64>,
        /// box length in units of sqrt(hbar/(M omega))
        #[arg(long, default_value_t = 40.0)]
        length: f64,
        /// regularization constant; default ln(M omega L^2/hbar)
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 200)]
        k_max: usize,
        #[arg(long, default_value_t = 100_000)]
        n_max: usize,
        /// grid points for the staircase route
        #[arg(long, default_value_t = 8000)]
        n_points: usize,
    },
    /// Finite-difference levels, or the smoothed staircase with --staircase
    Spectrum {
        #[arg(long, value_enum, default_value = "R")]
        op: OpArg,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// in units of sqrt(hbar/(M omega))
        #[arg(long, default_value_t = 1e-3)]
        q_min: f64,
        #[arg(long, default_value_t = 20.0)]
        length: f64,
        #[arg(long, default_value_t = 4000)]
        n_points: usize,
        #[arg(long, default_value_t = 4)]
        order: u8,
        /// energies (units of hbar omega) for the smoothed staircase instead of levels
        #[arg(long, value_delimiter = ',')]
        staircase: Vec<f64>,
    },
    /// Run the acceptance suite and print a pass/fail table
    Verify {
        /// pinned grids only
        #[arg(long)]
        quick: bool,
    },
}

/// Validated parameters handed to a command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ConformalModel,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_common(c: &CommonArgs, default_format: Format) -> Result<Self, CliError> {
        let model = ConformalModel::with_units(
            c.g.unwrap_or(1.0),
            c.alpha.unwrap_or(1.0),
            c.mass.unwrap_or(1.0),
            c.hbar.unwrap_or(1.0),
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(RunConfig {
            model,
            output: c.output.clone(),
            format: c.format.unwrap_or(default_format),
        })
    }
}

/// `key = value` pairs; `#` starts a comment. Keys are normalized to flag names.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Parses argv, folding in config-file entries that the command line did not set.
pub fn parse_args(args: Vec<OsString>) -> Result<Cli, clap::Error> {
    let matches = Cli::command().try_get_matches_from(&args)?;
    let cli = Cli::from_arg_matches(&matches)?;
    let Some(path) = cli.common.config.clone() else {
        return Ok(cli);
    };
    let entries = read_config(&path).map_err(|e| Cli::command().error(clap::error::ErrorKind::Io, e.to_string()))?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cmd = Cli::command();
    let sub_cmd = cmd.find_subcommand(name).expect("known subcommand");
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let Some(arg) = sub_cmd
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
        else {
            log::debug!("config key {key} does not apply to {name}");
            continue;
        };
        let id = arg.get_id().as_str();
        if sub.value_source(id) == Some(ValueSource::CommandLine) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(format!("--{key}").into());
            extra.push(value.into());
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => extra.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                _ => {
                    return Err(Cli::command().error(
                        clap::error::ErrorKind::InvalidValue,
                        format!("config key {key}: expected a boolean"),
                    ))
                }
            }
        }
    }
    let mut all = args;
    all.extend(extra);
    Cli::try_parse_from(all)
}

/// Runs the front end on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse_args(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cfg: &RunConfig, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => io::write_all(stdout, text).map_err(|source| CliError::Io {
            path: "stdout".into(),
            source,
        }),
    }
}

fn emit_table(cfg: &RunConfig, stdout: &mut dyn Write, t: &Table) -> Result<(), CliError> {
    let text = match cfg.format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    };
    emit(cfg, stdout, &text)
}

fn model_meta(t: &mut Table, m: &ConformalModel) {
    t.meta_f64("g", m.g)
        .meta_f64("alpha", m.alpha)
        .meta_f64("mass", m.mass)
        .meta_f64("hbar", m.hbar);
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let default_format = match cli.command {
        Command::Thermality | Command::Lyapunov { .. } => Format::Json,
        _ => Format::Csv,
    };
    let cfg = RunConfig::from_common(&cli.common, default_format)?;
    let m = cfg.model;
    let hw = m.hbar * m.omega();
    let ell = m.length_scale();
    match &cli.command {
        Command::Classify { u, v, w } => {
            let mut t = Table::new(
                "generator classification by discriminant v^2 - 4uw",
                &["name", "u", "v", "w", "discriminant", "class"],
            );
            model_meta(&mut t, &m);
            let rows: Vec<(String, GeneratorCoeffs)> = if u.is_some() || v.is_some() || w.is_some() {
                let c = GeneratorCoeffs::new(u.unwrap_or(0.0), v.unwrap_or(0.0), w.unwrap_or(0.0))
                    .map_err(|e| usage(e.to_string()))?;
                vec![("G".into(), c)]
            } else {
                [
                    ("H", Generator::H),
                    ("D", Generator::D),
                    ("K", Generator::K),
                    ("R", Generator::R),
                    ("S", Generator::S),
                ]
                .iter()
                .map(|(n, g)| (n.to_string(), g.coeffs(&m)))
                .collect()
            };
            for (name, c) in rows {
                t.push(vec![
                    name.into(),
                    c.u.into(),
                    c.v.into(),
                    c.w.into(),
                    c.discriminant().into(),
                    classify(&c).to_string().into(),
                ]);
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Potential { op, q_min, q_max, n } => {
            if !(*q_min > 0.0 && q_max > q_min && *n >= 2) {
                return Err(usage("potential needs 0 < q-min < q-max and n >= 2"));
            }
            let mut t = Table::new(&format!("effective potential of {}", op.name()), &["q", "V"]);
            model_meta(&mut t, &m);
            t.meta("op", op.name())
                .meta_f64("crossover_length", dynamics::crossover_length(&m));
            for i in 0..*n {
                let q = ell * (q_min + (q_max - q_min) * i as f64 / (*n - 1) as f64);
                t.push(vec![
                    q.into(),
                    dynamics::effective_potential(&m, op.effective(), q).into(),
                ]);
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Flow {
            field,
            r0,
            t0,
            s_max,
            tol,
            mirror,
        } => {
            let geo = DiamondGeometry::new(m.alpha).map_err(|e| usage(e.to_string()))?;
            let which = match field {
                FieldArg::S => KillingField::SK,
                FieldArg::R => KillingField::RK,
                FieldArg::D => KillingField::DK,
            };
            let mut t = Table::new(
                "radial conformal Killing flow in the diamond |t| + |r| < alpha",
                &["curve", "s", "t", "r"],
            );
            model_meta(&mut t, &m);
            t.meta("field", format!("{field:?}")).meta("mirror", mirror);
            for (k, frac) in r0.iter().enumerate() {
                let e0 = SpacetimeEvent {
                    t: *t0,
                    r: frac * m.alpha,
                };
                if !(e0.r >= 0.0 && geo.contains(&e0)) {
                    return Err(usage(format!(
                        "start point ({}, {}) is not inside the diamond",
                        e0.t, e0.r
                    )));
                }
                let curve = rckf_flow(&e0, &geo, which, *s_max, *tol).map_err(numerical)?;
                let signs: &[f64] = if *mirror { &[1.0, -1.0] } else { &[1.0] };
                for &sign in signs {
                    for p in &curve {
                        t.push(vec![Cell::Int(k as i64), p.s.into(), p.t.into(), (sign * p.r).into()]);
                    }
                }
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::PhaseField {
            op,
            q_min,
            q_max,
            p_min,
            p_max,
            nq,
            np,
        } => {
            let pscale = m.mass * m.omega() * ell;
            let field = dynamics::phase_field(
                &m,
                op.effective(),
                (q_min * ell, q_max * ell),
                (p_min * pscale, p_max * pscale),
                *nq,
                *np,
            )
            .map_err(|e| match e {
                dynamics::DynamicsError::Domain(s) => usage(s),
                e => numerical(e),
            })?;
            let mut t = Table::new(
                &format!("Hamiltonian direction field of {}", op.name()),
                &["q", "p", "dq", "dp"],
            );
            model_meta(&mut t, &m);
            t.meta("op", op.name()).meta("asymptote", "p = M q / alpha");
            for s in field {
                t.push(vec![s.q.into(), s.p.into(), s.dq.into(), s.dp.into()]);
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Orbit {
            op,
            energy,
            q0,
            p0,
            tau_max,
            tol,
        } => {
            let e_op = op.effective();
            let q = match (q0, e_op) {
                (Some(q), _) => *q,
                (None, EffectiveOp::R) => dynamics::turning_points(&m, *energy).map_err(numerical)?.0,
                (None, _) => dynamics::crossover_length(&m),
            };
            let p = match p0 {
                Some(p) => *p,
                None => {
                    let kinetic = energy - dynamics::effective_potential(&m, e_op, q);
                    if kinetic < -1e-12 * energy.abs().max(hw) {
                        return Err(usage(format!("energy {energy} is below V(q0) = {}", energy - kinetic)));
                    }
                    (2.0 * m.mass * kinetic.max(0.0)).sqrt()
                }
            };
            let horizon = tau_max.unwrap_or(if e_op == EffectiveOp::R {
                std::f64::consts::PI * m.alpha
            } else {
                3.0 * m.alpha
            });
            let tr = dynamics::integrate(&m, e_op, &PhaseState { q, p, tau: 0.0 }, horizon, *tol).map_err(numerical)?;
            let mut t = Table::new(&format!("trajectory of {}", op.name()), &["tau", "q", "p", "energy"]);
            model_meta(&mut t, &m);
            t.meta("op", op.name())
                .meta_f64("energy", tr.energy)
                .meta_f64("max_energy_drift", tr.max_energy_drift);
            for s in &tr.samples {
                t.push(vec![
                    s.tau.into(),
                    s.q.into(),
                    s.p.into(),
                    dynamics::energy(&m, e_op, s.q, s.p).into(),
                ]);
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Lyapunov {
            op,
            q0,
            delta0,
            tau_max,
        } => {
            let q = q0.unwrap_or_else(|| dynamics::crossover_length(&m));
            let horizon = tau_max.unwrap_or(12.0 * m.alpha);
            let est = dynamics::lyapunov_estimate(
                &m,
                op.effective(),
                &PhaseState { q, p: 0.0, tau: 0.0 },
                delta0 * q,
                horizon,
            )
            .map_err(numerical)?;
            match cfg.format {
                Format::Json => {
                    #[derive(serde::Serialize)]
                    struct Report {
                        op: &'static str,
                        alpha: f64,
                        rate: f64,
                        expected: f64,
                        relative_error: f64,
                    }
                    let r = Report {
                        op: op.name(),
                        alpha: m.alpha,
                        rate: est.rate,
                        expected: 1.0 / m.alpha,
                        relative_error: (est.rate * m.alpha - 1.0).abs(),
                    };
                    emit(&cfg, stdout, &io::to_json(&r).expect("report json"))?;
                }
                Format::Csv => {
                    let mut t = Table::new("cumulative log separation of twin trajectories", &["tau", "log_growth"]);
                    model_meta(&mut t, &m);
                    t.meta("op", op.name()).meta_f64("rate", est.rate);
                    for (tau, lg) in &est.log_growth {
                        t.push(vec![(*tau).into(), (*lg).into()]);
                    }
                    emit_table(&cfg, stdout, &t)?;
                }
            }
        }
        Command::Period { energy, method } => {
            let mut t = Table::new("closed-orbit period of R", &["E", "period", "pi_alpha"]);
            model_meta(&mut t, &m);
            t.meta("method", format!("{method:?}"));
            for e in energy {
                let p = dynamics::period(&m, *e, method.method()).map_err(numerical)?;
                t.push(vec![(*e).into(), p.into(), (std::f64::consts::PI * m.alpha).into()]);
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Action { energy, method, langer } => {
            let mut t = Table::new(
                "closed-orbit Jacobi action of R",
                &["E", "W", "q_minus", "q_plus", "period"],
            );
            model_meta(&mut t, &m);
            t.meta("method", format!("{method:?}")).meta("langer", langer);
            for e in energy {
                let w = dynamics::jacobi_action(&m, *e, *langer, method.method()).map_err(numerical)?;
                let o = dynamics::orbit_data(&m, *e, *langer).map_err(numerical)?;
                t.push(vec![
                    (*e).into(),
                    w.into(),
                    o.q_minus.into(),
                    o.q_plus.into(),
                    o.period.into(),
                ]);
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Propagator {
            kind,
            r1,
            r2,
            t: times,
            energy,
            side,
        } => {
            let k = kind.kind();
            let green = matches!(k, KernelKind::GR | KernelKind::GS);
            let third = if green { "E" } else { "T" };
            let mut t = Table::new(
                &format!("{} table", k.label()),
                &["r1", "r2", third, "re", "im", "kind"],
            );
            model_meta(&mut t, &m);
            let sweep = if green { energy } else { times };
            for &a in r1 {
                for &b in r2 {
                    for &x in sweep {
                        let v = if green {
                            let s = match side {
                                SideArg::Retarded => GreensSide::Retarded,
                                SideArg::Advanced => GreensSide::Advanced,
                            };
                            pathint::greens(&m, k, a, b, x, s)
                        } else {
                            pathint::propagator(&m, k, a, b, x)
                        };
                        let v = match v {
                            Ok(v) => v,
                            Err(pathint::PathIntError::Caustic { .. }) => pathint::KernelValue::caustic(k),
                            Err(e) => return Err(numerical(e)),
                        };
                        t.push(vec![
                            a.into(),
                            b.into(),
                            x.into(),
                            v.value.re.into(),
                            v.value.im.into(),
                            k.label().into(),
                        ]);
                    }
                }
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Trace { omega_t } => {
            let mut t = Table::new(
                "kernel trace on the half line",
                &["omega_T", "closed_form", "quadrature", "relative_difference"],
            );
            model_meta(&mut t, &m);
            for &x in omega_t {
                let time = x / m.omega();
                let c = pathint::trace_z(&m, TraceOp::S, time, TraceMethod::ClosedForm)
                    .map_err(numerical)?
                    .re;
                let q = pathint::trace_z(&m, TraceOp::REuclid, time, TraceMethod::Quadrature)
                    .map_err(numerical)?
                    .re;
                t.push(vec![x.into(), c.into(), q.into(), ((q - c) / c).abs().into()]);
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Partition { beta_hbar_omega } => {
            let mut t = Table::new(
                "partition function of R",
                &["beta", "temperature", "Z_closed", "Z_sum", "levels", "mean_energy"],
            );
            model_meta(&mut t, &m);
            for &x in beta_hbar_omega {
                let beta = x / hw;
                let a = pathint::partition_function(&m, beta, PartitionMethod::ClosedForm).map_err(numerical)?;
                let b = pathint::partition_function(&m, beta, PartitionMethod::EigenSum).map_err(numerical)?;
                let u = pathint::mean_energy(&m, beta).map_err(numerical)?;
                t.push(vec![
                    beta.into(),
                    a.temperature.into(),
                    a.partition_value.into(),
                    b.partition_value.into(),
                    b.eigenvalues_used.into(),
                    u.into(),
                ]);
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Thermality => {
            let d = pathint::diamond_temperature(&m);
            match cfg.format {
                Format::Json => emit(&cfg, stdout, &io::to_json(&d).expect("report json"))?,
                Format::Csv => {
                    let mut t = Table::new(
                        "diamond thermality",
                        &["alpha", "beta", "T_D", "lambda_L", "bound", "ratio", "Z"],
                    );
                    model_meta(&mut t, &m);
                    t.push(vec![
                        d.alpha.into(),
                        d.beta.into(),
                        d.temperature.into(),
                        d.lyapunov.into(),
                        d.bound.into(),
                        d.ratio.into(),
                        d.partition_value.into(),
                    ]);
                    emit_table(&cfg, stdout, &t)?;
                }
            }
        }
        Command::Dos {
            route,
            energy,
            length,
            c,
            k_max,
            n_max,
            n_points,
        } => {
            let l = length * ell;
            let c = c.unwrap_or_else(|| dos::cutoff_constant(&m, l));
            let routes: Vec<DosRoute> = match route {
                DosRoute::All => vec![
                    DosRoute::Digamma,
                    DosRoute::ThomasFermi,
                    DosRoute::ThomasFermiBox,
                    DosRoute::PoleClosed,
                    DosRoute::GutzwillerSeries,
                    DosRoute::Staircase,
                ],
                r => vec![*r],
            };
            let mut t = Table::new("density of states of S", &["E", "rho", "method", "C", "L"]);
            model_meta(&mut t, &m);
            let energies: Vec<f64> = energy.iter().map(|x| x * hw).collect();
            for r in routes {
                let rows: Vec<DosEstimate> = match r {
                    DosRoute::Staircase => {
                        let b =
                            BoxDiscretization::new(1e-3 * ell, l, *n_points, 4).map_err(|e| usage(e.to_string()))?;
                        spectral::staircase(&m, Potential::S, &b, &energies)
                            .map_err(numerical)?
                            .into_iter()
                            .map(|p| DosEstimate {
                                energy: p.energy,
                                rho: p.rho,
                                method: dos::DosMethod::SpectralStaircase,
                                c: None,
                                l: Some(l),
                            })
                            .collect()
                    }
                    _ => energies
                        .iter()
                        .map(|&e| match r {
                            DosRoute::Digamma => dos::dos_digamma(&m, e, c),
                            DosRoute::ThomasFermi => dos::dos_thomas_fermi(&m, e, l),
                            DosRoute::ThomasFermiBox => dos::dos_thomas_fermi_box(&m, e, l),
                            DosRoute::PoleClosed => {
                                dos::dos_semiclassical(&m, e, SemiclassicalForm::PoleClosed, 1, None)
                            }
                            DosRoute::GutzwillerSeries => {
                                dos::dos_semiclassical(&m, e, SemiclassicalForm::GutzwillerSeries, *k_max, None)
                            }
                            _ => dos::dos_series(&m, e, *n_max, c, true),
                        })
                        .collect::<Result<_, _>>()
                        .map_err(numerical)?,
                };
                for d in rows {
                    let opt = |x: Option<f64>| x.map_or(Cell::Text(String::new()), Cell::Num);
                    t.push(vec![
                        d.energy.into(),
                        d.rho.into(),
                        d.method.label().into(),
                        opt(d.c),
                        opt(d.l),
                    ]);
                }
            }
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Spectrum {
            op,
            count,
            q_min,
            length,
            n_points,
            order,
            staircase,
        } => {
            let potential = match op {
                OpArg::R => Potential::R,
                OpArg::S => Potential::S,
                OpArg::H => return Err(usage("spectrum supports --op R or S")),
            };
            let b = BoxDiscretization::new(q_min * ell, length * ell, *n_points, *order)
                .map_err(|e| usage(e.to_string()))?;
            let mut t;
            if staircase.is_empty() {
                let s = spectral::eigenvalues(&m, potential, &b, *count).map_err(numerical)?;
                t = Table::new(&format!("finite-difference levels of {}", op.name()), &["n", "E_n"]);
                for (n, e) in s.eigenvalues.iter().enumerate() {
                    t.push(vec![n.into(), (*e).into()]);
                }
            } else {
                let grid: Vec<f64> = staircase.iter().map(|x| x * hw).collect();
                let pts = spectral::staircase(&m, potential, &b, &grid).map_err(numerical)?;
                t = Table::new(
                    &format!("level staircase of {}", op.name()),
                    &["E", "N", "rho_smoothed"],
                );
                for p in pts {
                    t.push(vec![p.energy.into(), p.count.into(), p.rho.into()]);
                }
            }
            model_meta(&mut t, &m);
            t.meta_f64("q_min", b.q_min)
                .meta_f64("L", b.length)
                .meta("n_points", b.n_points)
                .meta("order", b.scheme_order);
            emit_table(&cfg, stdout, &t)?;
        }
        Command::Verify { quick } => {
            let results = acceptance::run_all(*quick);
            let text = match cfg.format {
                Format::Json => io::to_json(&results).expect("report json"),
                Format::Csv => {
                    let mut s: String = results.iter().map(|r| r.line() + "\n").collect();
                    let passed = results.iter().filter(|r| r.passed).count();
                    s.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
                    s
                }
            };
            emit(&cfg, stdout, &text)?;
            if results.iter().any(|r| !r.passed) {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("cqm").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn data_rows(csv: &str) -> Vec<Vec<f64>> {
        csv.lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').filter_map(|x| x.parse().ok()).collect())
            .collect()
    }

    #[test]
    fn potential_s_is_monotone() {
        let (code, out, _) = run_capture(&["potential", "--g", "1", "--alpha", "1", "--op", "S"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "q,V"));
        let rows = data_rows(&out);
        assert_eq!(rows.len(), 201);
        assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
    }

    #[test]
    fn thermality_report() {
        let (code, out, _) = run_capture(&["thermality", "--alpha", "1"]);
        assert_eq!(code, 0);
        let j: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(j["T_D"].as_f64().unwrap(), 1.0 / std::f64::consts::PI);
        assert_eq!(j["lambda_L"].as_f64().unwrap(), 1.0);
        assert_eq!(j["bound"].as_f64().unwrap(), 2.0);
        assert_eq!(j["ratio"].as_f64().unwrap(), 0.5);
        let keys: Vec<&str> = out.lines().filter_map(|l| l.trim().split('"').nth(1)).collect();
        assert_eq!(keys, ["alpha", "beta", "T_D", "lambda_L", "bound", "ratio", "Z"]);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["potential", "--op", "Q"]).0, 2);
        assert_eq!(run_capture(&["potential", "--alpha", "-1"]).0, 2);
        assert_eq!(run_capture(&["spectrum", "--n-points", "10"]).0, 2);
        assert_eq!(run_capture(&["flow", "--r0", "1.5"]).0, 2);
    }

    #[test]
    fn numerical_errors_exit_1() {
        let (code, _, err) = run_capture(&["period", "--energy", "0.5", "--g", "1", "--alpha", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("error"), "{err}");
    }

    #[test]
    fn config_file_with_flag_override() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "# model\ng = 2\nalpha = 3\nq_max = 2.0\nn = 5\nunrelated = 1\n").unwrap();
        let path = cfg.to_str().unwrap();
        let (code, out, err) = run_capture(&["potential", "--config", path, "--alpha", "1"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("# g = 2.0000000000000000e0"));
        assert!(out.contains("# alpha = 1.0000000000000000e0"));
        assert_eq!(data_rows(&out).len(), 5);
        assert!(parse_config("novalue").is_err());
    }

    #[test]
    fn output_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("levels.csv");
        let (code, out, _) = run_capture(&["spectrum", "--count", "3", "-o", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        let text = std::fs::read_to_string(&path).unwrap();
        let rows = data_rows(&text);
        assert_eq!(rows.len(), 3);
        assert!((rows[0][1] / (1.25f64.sqrt() + 1.0) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn mirrored_flow_stays_inside() {
        let (code, out, _) = run_capture(&["flow", "--alpha", "2", "--mirror", "--r0", "0.25"]);
        assert_eq!(code, 0);
        let rows = data_rows(&out);
        assert!(rows.iter().any(|r| r[3] < 0.0));
        assert!(rows.iter().all(|r| r[2].abs() + r[3].abs() < 2.0));
    }

    #[test]
    fn propagator_table_kinds() {
        let (code, out, _) = run_capture(&["propagator", "--kind", "K_S", "--r1", "1", "--r2", "1", "--t", "0.5"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "r1,r2,T,re,im,kind"));
        assert!(out.trim_end().ends_with("K_S"));
        let (code, out, _) = run_capture(&[
            "propagator",
            "--kind",
            "G_R",
            "--r1",
            "0.5",
            "--r2",
            "0.7",
            "--energy",
            "1.3",
        ]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "r1,r2,E,re,im,kind"));
    }
}
