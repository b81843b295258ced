//! Command-line front end.
//!
//! ```text
//! spinchain <spectrum|roots|evolve|figure> <config.json> [--out DIR] [--verbose] [--tol-im X]
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{antiresonance_labels, antiresonance_metric, classify_bands, BandReport};
use crate::analytic::magnon_band;
use crate::chain::{build_hamiltonian, Boundary, ChainSpec, SiteTuple};
use crate::eigen::{eigh, eigvalsh, evolve};
use crate::error::{Error, Result};
use crate::experiments::{
    run_doublet_check, run_fig2, run_fig3, run_fig4, run_fig5, run_ldp_table, run_root_census,
    CensusConfig, DoubletConfig, ExperimentId, ExperimentResult, Fig2Config, Fig3Config,
    Fig4Config, Fig5Config, LdpTableConfig, CODE_VERSION,
};
use crate::output::{write_atomic, write_json, Cell, Table};
use crate::quantization::{RootSet, RootSolver, RootSource, DEFAULT_TOL_IM};

#[derive(Debug, Parser)]
#[command(name = "spinchain", version, about = "XXZ chain with one detuned site")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON run configuration
    pub config: PathBuf,
    /// Output directory (overrides the config)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report progress on stdout
    #[arg(long)]
    pub verbose: bool,
    /// Threshold on Im θ separating localized from extended roots
    #[arg(long = "tol-im")]
    pub tol_im: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagonalize one sector and report its bands
    Spectrum(CommonArgs),
    /// Solve a quantization condition
    Roots(CommonArgs),
    /// Propagate an initial state
    Evolve(CommonArgs),
    /// Regenerate a figure or table
    Figure(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Spectrum(a) | Command::Roots(a) | Command::Evolve(a) | Command::Figure(a) => a,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Roots(_) => "roots",
            Command::Evolve(_) => "evolve",
            Command::Figure(_) => "figure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeWindow {
    pub t_max: f64,
    pub samples: usize,
}

impl Default for TimeWindow {
    fn default() -> Self {
        Self {
            t_max: 200.0,
            samples: 2001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub state: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Basis(Vec<usize>),
    Superposition(Vec<Amplitude>),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub spec: Option<ChainSpec>,
    /// Excitation number for `spectrum`.
    #[serde(default)]
    pub sector: Option<usize>,
    /// Quantization condition for `roots`; inferred from the boundary if absent.
    #[serde(default)]
    pub source: Option<RootSource>,
    /// Defect strengths g to sweep instead of the value in `spec`.
    #[serde(default)]
    pub sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub time: Option<TimeWindow>,
    #[serde(default)]
    pub initial: Option<InitialState>,
    #[serde(default)]
    pub observables: Option<Vec<Vec<usize>>>,
    /// Pipeline for `figure`.
    #[serde(default)]
    pub id: Option<String>,
    /// Overrides for the pipeline's default parameters.
    #[serde(default)]
    pub params: Option<Value>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tol_im: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn require_spec(&self) -> Result<&ChainSpec> {
        self.spec
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs a \"spec\" entry".into()))
    }

    /// The base spec, or one copy per swept value of g.
    fn specs(&self) -> Result<Vec<ChainSpec>> {
        let spec = self.require_spec()?;
        match &self.sweep {
            None => Ok(vec![spec.clone()]),
            Some(gs) if gs.is_empty() => Err(Error::Config("sweep grid is empty".into())),
            Some(gs) => {
                let mut out: Vec<ChainSpec> =
                    gs.iter().map(|&g| spec.with_g(g)).collect::<Result<_>>()?;
                out.sort_by(|a, b| a.g().total_cmp(&b.g()));
                Ok(out)
            }
        }
    }
}

fn tuple(sites: &[usize]) -> Result<SiteTuple> {
    SiteTuple::from_sites(sites)
        .ok_or_else(|| Error::Config(format!("{sites:?} is not one site or two distinct sites")))
}

pub struct Context {
    pub out: PathBuf,
    pub verbose: bool,
    pub tol_im: f64,
}

impl Context {
    fn wrote(&self, paths: &[PathBuf]) {
        if self.verbose {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a, T: Serialize> {
    command: &'a str,
    code_version: &'a str,
    tolerances: BTreeMap<&'a str, f64>,
    inputs: &'a [ChainSpec],
    details: T,
}

fn write_outputs<T: Serialize>(
    ctx: &Context,
    stem: &str,
    table: &Table,
    sidecar: &Sidecar<'_, T>,
) -> Result<Vec<PathBuf>> {
    let csv_path = ctx.out.join(format!("{stem}.csv"));
    let json_path = ctx.out.join(format!("{stem}.json"));
    write_atomic(&csv_path, table.to_csv()?.as_bytes())?;
    write_json(&json_path, sidecar)?;
    Ok(vec![csv_path, json_path])
}

fn one_exc_label(spec: &ChainSpec, e: f64) -> &'static str {
    let band = magnon_band(spec);
    if e >= band.lower() - 1e-9 && e <= band.upper() + 1e-9 {
        "magnon"
    } else {
        "localized"
    }
}

pub fn two_exc_labels(report: &BandReport, n: usize) -> Vec<String> {
    let mut labels = vec!["unassigned".to_string(); n];
    for b in &report.bands {
        let name = b
            .kinds
            .iter()
            .map(|k| format!("{k:?}"))
            .collect::<Vec<_>>()
            .join("+");
        for &i in &b.indices {
            labels[i] = name.clone();
        }
    }
    for m in &report.localized_levels {
        labels[m.index] = format!("{:?}", m.kind);
    }
    labels
}

pub fn cmd_spectrum(cfg: &RunConfig, ctx: &Context) -> Result<Vec<PathBuf>> {
    let sector = cfg.sector.unwrap_or(2);
    let specs = cfg.specs()?;
    let mut table = Table::new(&["g", "index", "energy", "assignment"]);
    let mut reports = Vec::new();
    for spec in &specs {
        let h = build_hamiltonian(spec, sector)?;
        let values = eigvalsh(&h.entries)?;
        let labels: Vec<String> = if sector == 2 {
            let report = classify_bands(&values, spec);
            let l = two_exc_labels(&report, values.len());
            reports.push(json!({ "g": spec.g(), "report": report }));
            l
        } else {
            values.iter().map(|&e| one_exc_label(spec, e).to_string()).collect()
        };
        for (i, (e, l)) in values.iter().zip(labels).enumerate() {
            table.push(vec![spec.g().into(), i.into(), (*e).into(), l.into()]);
        }
    }
    table.sort_by_columns(&["g", "index"]);
    let sidecar = Sidecar {
        command: "spectrum",
        code_version: CODE_VERSION,
        tolerances: BTreeMap::new(),
        inputs: &specs,
        details: json!({ "sector": sector, "band_reports": reports }),
    };
    write_outputs(ctx, "spectrum", &table, &sidecar)
}

fn default_source(spec: &ChainSpec) -> RootSource {
    match spec.boundary() {
        Boundary::Open => RootSource::OpenChain,
        Boundary::Closed => RootSource::ClosedChain,
    }
}

fn solve_source(solver: &RootSolver, source: RootSource, spec: &ChainSpec) -> Result<RootSet> {
    match source {
        RootSource::OpenChain => solver.open_chain(spec),
        RootSource::ClosedChain | RootSource::ClosedNode => solver.closed_chain(spec),
        RootSource::BoundPairSurface => solver.bp_surface(spec),
        RootSource::Hybrid => solver.hybrid(spec),
    }
}

pub fn cmd_roots(cfg: &RunConfig, ctx: &Context) -> Result<Vec<PathBuf>> {
    let specs = cfg.specs()?;
    let solver = RootSolver::new(ctx.tol_im);
    let mut table = Table::new(&[
        "g",
        "source",
        "classification",
        "re_theta",
        "im_theta",
        "re_z",
        "im_z",
        "energy",
        "residual",
    ]);
    let mut counts = Vec::new();
    for spec in &specs {
        let source = cfg.source.unwrap_or_else(|| default_source(spec));
        let set = solve_source(&solver, source, spec)?;
        counts.push(json!({
            "g": spec.g(),
            "roots": set.len(),
            "localized": set.localized_count(),
            "spurious": set.spurious.len(),
        }));
        for r in set.roots.iter().chain(&set.spurious) {
            table.push(vec![
                spec.g().into(),
                r.source.as_str().into(),
                format!("{:?}", r.classification).to_lowercase().into(),
                r.theta.re.into(),
                r.theta.im.into(),
                r.z.re.into(),
                r.z.im.into(),
                r.energy.into(),
                r.residual.into(),
            ]);
        }
    }
    table.sort_by_columns(&["g", "source", "classification", "re_theta", "im_theta"]);
    let sidecar = Sidecar {
        command: "roots",
        code_version: CODE_VERSION,
        tolerances: BTreeMap::from([("tol_im", ctx.tol_im)]),
        inputs: &specs,
        details: json!({ "counts": counts }),
    };
    write_outputs(ctx, "roots", &table, &sidecar)
}

fn fig4_spec() -> Result<ChainSpec> {
    let cfg = Fig4Config::default();
    cfg.spec(cfg.j * cfg.delta)
}

pub fn cmd_evolve(cfg: &RunConfig, ctx: &Context) -> Result<Vec<PathBuf>> {
    let spec = match &cfg.spec {
        Some(s) => s.clone(),
        None => fig4_spec()?,
    };
    if cfg.sweep.is_some() {
        return Err(Error::Config("evolve does not take a sweep".into()));
    }
    let protocol = antiresonance_labels(&spec);
    let window = cfg.time.clone().unwrap_or_default();
    if window.samples < 2 || !(window.t_max > 0.0) {
        return Err(Error::Config("time window needs t_max > 0 and at least 2 samples".into()));
    }
    let initial = cfg
        .initial
        .clone()
        .unwrap_or_else(|| InitialState::Basis(protocol[0].sites()));
    let excitations = match &initial {
        InitialState::Basis(s) => s.len(),
        InitialState::Superposition(a) => a.first().map_or(0, |x| x.state.len()),
    };
    let decomp = eigh(&build_hamiltonian(&spec, excitations)?)?;
    let mut psi0 = vec![Complex64::new(0.0, 0.0); decomp.dim()];
    let terms: Vec<(Vec<usize>, Complex64)> = match initial {
        InitialState::Basis(s) => vec![(s, Complex64::new(1.0, 0.0))],
        InitialState::Superposition(a) => a
            .into_iter()
            .map(|x| (x.state, Complex64::new(x.re, x.im)))
            .collect(),
    };
    if terms.is_empty() {
        return Err(Error::Config("initial superposition is empty".into()));
    }
    for (sites, amp) in terms {
        let t = tuple(&sites)?;
        let i = decomp
            .basis
            .index_of(t)
            .ok_or_else(|| Error::Config(format!("{t} is not a state of this sector")))?;
        psi0[i] += amp;
    }
    let labels: Vec<SiteTuple> = match &cfg.observables {
        Some(list) => list.iter().map(|s| tuple(s)).collect::<Result<_>>()?,
        None if excitations == 2 => protocol.to_vec(),
        None => vec![SiteTuple::One(spec.n0())],
    };
    let times: Vec<f64> = (0..window.samples)
        .map(|i| window.t_max * i as f64 / (window.samples - 1) as f64)
        .collect();
    let trace = evolve(&decomp, &psi0, &times, &labels)?;
    let mut columns = vec!["t".to_string()];
    columns.extend(labels.iter().map(|l| format!("p{l}")));
    columns.extend(["norm".to_string(), "energy".to_string()]);
    let mut table = Table {
        columns,
        records: Vec::new(),
    };
    for (k, &t) in times.iter().enumerate() {
        let mut row: Vec<Cell> = vec![t.into()];
        row.extend(trace.observables.iter().map(|s| Cell::from(s[k])));
        row.push(trace.norm[k].into());
        row.push(trace.energy[k].into());
        table.push(row);
    }
    let metric = if excitations == 2 {
        antiresonance_metric(&trace, &spec).ok()
    } else {
        None
    };
    let sidecar = Sidecar {
        command: "evolve",
        code_version: CODE_VERSION,
        tolerances: BTreeMap::new(),
        inputs: std::slice::from_ref(&spec),
        details: json!({
            "time": window,
            "antiresonance": metric,
            "max_norm_drift": trace.max_norm_drift(),
            "max_energy_drift": trace.max_energy_drift(),
        }),
    };
    write_outputs(ctx, "evolve", &table, &sidecar)
}

fn params<T: Default + serde::de::DeserializeOwned>(cfg: &RunConfig) -> Result<T> {
    match &cfg.params {
        None => Ok(T::default()),
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| Error::Config(format!("invalid figure parameters: {e}"))),
    }
}

pub fn run_figure(cfg: &RunConfig, tol_im: Option<f64>) -> Result<ExperimentResult> {
    let id: ExperimentId = cfg
        .id
        .as_deref()
        .ok_or_else(|| Error::Config("figure needs an \"id\" entry".into()))?
        .parse()?;
    match id {
        ExperimentId::Fig2Sweep => run_fig2(&params::<Fig2Config>(cfg)?),
        ExperimentId::Fig3Sweep => run_fig3(&params::<Fig3Config>(cfg)?),
        ExperimentId::Fig4Dynamics => run_fig4(&params::<Fig4Config>(cfg)?),
        ExperimentId::Fig5LocLength => {
            let mut p: Fig5Config = params(cfg)?;
            if let Some(t) = tol_im {
                p.tol_im = t;
            }
            run_fig5(&p)
        }
        ExperimentId::LDPTable => run_ldp_table(&params::<LdpTableConfig>(cfg)?),
        ExperimentId::DoubletCheck => run_doublet_check(&params::<DoubletConfig>(cfg)?),
        ExperimentId::RootCensus => {
            let mut p: CensusConfig = params(cfg)?;
            if let Some(t) = tol_im {
                p.tol_im = t;
            }
            run_root_census(&p)
        }
    }
}

pub fn cmd_figure(cfg: &RunConfig, ctx: &Context, tol_override: Option<f64>) -> Result<Vec<PathBuf>> {
    let result = run_figure(cfg, tol_override.or(cfg.tol_im))?;
    let (a, b) = result.write(&ctx.out)?;
    Ok(vec![a, b])
}

/// Runs one parsed invocation and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let args = cli.command.args();
    let cfg = RunConfig::load(&args.config)?;
    if let Some(t) = args.tol_im.or(cfg.tol_im) {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("tol-im must be positive, got {t}")));
        }
    }
    let ctx = Context {
        out: args
            .out
            .clone()
            .or_else(|| cfg.output.clone())
            .unwrap_or_else(|| PathBuf::from(".")),
        verbose: args.verbose,
        tol_im: args.tol_im.or(cfg.tol_im).unwrap_or(DEFAULT_TOL_IM),
    };
    if ctx.verbose {
        println!("{} {}", cli.command.name(), args.config.display());
    }
    let written = match &cli.command {
        Command::Spectrum(_) => cmd_spectrum(&cfg, &ctx)?,
        Command::Roots(_) => cmd_roots(&cfg, &ctx)?,
        Command::Evolve(_) => cmd_evolve(&cfg, &ctx)?,
        Command::Figure(_) => cmd_figure(&cfg, &ctx, args.tol_im)?,
    };
    ctx.wrote(&written);
    Ok(written)
}
