//! Sweep pipelines that regenerate the figure and table data.
//!
//! Each pipeline pairs an analytic curve with exact-diagonalization or
//! root-finding checks and returns an [`ExperimentResult`] whose records are
//! sorted by their swept parameters, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{
    antiresonance_labels, antiresonance_metric, classify_bands, oscillation_period,
    AntiresonanceMetric,
};
use crate::analytic::{
    bp_band_center, bp_surface_state, defect_state, ldp_band, ldp_hybrid_surface_state,
    BandKind, LocalizedKind,
};
use crate::chain::{build_hamiltonian, Boundary, ChainSpec};
use crate::eigen::{basis_state, eigh, eigvalsh, evolve, EvolutionTrace};
use crate::error::{Error, Result};
use crate::output::{write_atomic, Cell, Table};
use crate::quantization::{RootSet, RootSolver};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentId {
    Fig2Sweep,
    Fig3Sweep,
    Fig4Dynamics,
    Fig5LocLength,
    LDPTable,
    DoubletCheck,
    RootCensus,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::Fig2Sweep,
        ExperimentId::Fig3Sweep,
        ExperimentId::Fig4Dynamics,
        ExperimentId::Fig5LocLength,
        ExperimentId::LDPTable,
        ExperimentId::DoubletCheck,
        ExperimentId::RootCensus,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Fig2Sweep => "Fig2Sweep",
            ExperimentId::Fig3Sweep => "Fig3Sweep",
            ExperimentId::Fig4Dynamics => "Fig4Dynamics",
            ExperimentId::Fig5LocLength => "Fig5LocLength",
            ExperimentId::LDPTable => "LDPTable",
            ExperimentId::DoubletCheck => "DoubletCheck",
            ExperimentId::RootCensus => "RootCensus",
        }
    }

    pub fn file_stem(&self) -> &'static str {
        match self {
            ExperimentId::Fig2Sweep => "fig2_sweep",
            ExperimentId::Fig3Sweep => "fig3_sweep",
            ExperimentId::Fig4Dynamics => "fig4_dynamics",
            ExperimentId::Fig5LocLength => "fig5_loc_length",
            ExperimentId::LDPTable => "ldp_table",
            ExperimentId::DoubletCheck => "doublet_check",
            ExperimentId::RootCensus => "root_census",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = ExperimentId::ALL.iter().map(|i| i.as_str()).collect();
                Error::Config(format!("unknown figure id {s:?} (known: {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub tolerances: BTreeMap<String, f64>,
    pub parameters: Value,
    pub summary: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub id: ExperimentId,
    pub inputs: Vec<ChainSpec>,
    pub table: Table,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    id: ExperimentId,
    columns: &'a [String],
    records: usize,
    provenance: &'a Provenance,
    inputs: &'a [ChainSpec],
}

impl ExperimentResult {
    fn new<P: Serialize>(
        id: ExperimentId,
        inputs: Vec<ChainSpec>,
        table: Table,
        config: &P,
        tolerances: &[(&str, f64)],
        summary: BTreeMap<String, Value>,
    ) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::Config(format!("{id} produced no records")));
        }
        Ok(Self {
            id,
            inputs,
            table,
            provenance: Provenance {
                code_version: CODE_VERSION.to_string(),
                tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
                parameters: serde_json::to_value(config)?,
                summary,
            },
        })
    }

    pub fn summary(&self, key: &str) -> Option<&Value> {
        self.provenance.summary.get(key)
    }

    pub fn sidecar_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&Sidecar {
            id: self.id,
            columns: &self.table.columns,
            records: self.table.len(),
            provenance: &self.provenance,
            inputs: &self.inputs,
        })?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv_path = dir.join(format!("{}.csv", self.id.file_stem()));
        let json_path = dir.join(format!("{}.json", self.id.file_stem()));
        write_atomic(&csv_path, self.table.to_csv()?.as_bytes())?;
        write_atomic(&json_path, self.sidecar_json()?.as_bytes())?;
        Ok((csv_path, json_path))
    }
}

fn require_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{name} sweep grid is empty")));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{name} grid contains {x}")));
    }
    Ok(())
}

fn ring(n: usize, j: f64, delta: f64, g: f64) -> Result<ChainSpec> {
    ChainSpec::builder(n, Boundary::Closed)
        .exchange(j)
        .anisotropy(delta)
        .eps1(0.0)
        .defect(g, n / 2)
        .build()
}

fn two_exc_levels(spec: &ChainSpec) -> Result<Vec<f64>> {
    eigvalsh(&build_hamiltonian(spec, 2)?.entries)
}

fn nearest(values: &[f64], target: f64) -> Option<f64> {
    values
        .iter()
        .copied()
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
}

fn contains_point(points: &[f64], x: f64) -> bool {
    points.iter().any(|p| (p - x).abs() <= 1e-12 * x.abs().max(1.0))
}

fn oracle_residual(spec: &ChainSpec, predicted: Option<f64>) -> Result<(Option<f64>, Option<f64>)> {
    let Some(e) = predicted else {
        return Ok((None, None));
    };
    let levels = two_exc_levels(spec)?;
    let hit = nearest(&levels, e);
    Ok((hit, hit.map(|h| (h - e).abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Config {
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// Values of g/JΔ.
    pub grid: Vec<f64>,
    /// Subset of `grid` that also gets an exact-diagonalization check.
    pub oracle_points: Vec<f64>,
    pub oracle_sites: usize,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            j: 1.0,
            delta: 20.0,
            grid: (6..=60).map(|k| k as f64 / 20.0).collect(),
            oracle_points: vec![0.6, 0.8, 1.5, 2.0],
            oracle_sites: 40,
        }
    }
}

/// Trapped-pair offset (E − E_BP⁽⁰⁾)/(J/4Δ) against g/JΔ.
pub fn run_fig2(cfg: &Fig2Config) -> Result<ExperimentResult> {
    require_grid("g/JDelta", &cfg.grid)?;
    let jd = cfg.j * cfg.delta;
    let unit = cfg.j / (4.0 * cfg.delta);
    let tol = 0.05 * unit.abs();
    let rows: Vec<(ChainSpec, Vec<Cell>)> = cfg
        .grid
        .par_iter()
        .map(|&r| -> Result<(ChainSpec, Vec<Cell>)> {
            let g = r * jd;
            let spec = ring(cfg.oracle_sites, cfg.j, cfg.delta, g)?;
            let q = (g != 0.0).then(|| (jd - g) / g);
            let pred = bp_surface_state(&spec).ok().filter(|p| p.exists);
            let energy = pred.and_then(|p| p.energy);
            let eps = match energy {
                Some(e) => Some((e - bp_band_center(&spec)?) / unit),
                None => None,
            };
            let checked = pred.is_some() && contains_point(&cfg.oracle_points, r);
            let (oracle, residual) = if checked {
                oracle_residual(&spec, energy)?
            } else {
                (None, None)
            };
            let row = vec![
                r.into(),
                g.into(),
                q.into(),
                pred.is_some().into(),
                pred.and_then(|p| p.im_theta()).into(),
                energy.into(),
                eps.into(),
                q.filter(|q| *q != 0.0).map(|q| 1.0 / q).into(),
                (-2.0).into(),
                if checked { cfg.oracle_sites.into() } else { Cell::Empty },
                oracle.into(),
                residual.into(),
                if checked { tol.into() } else { Cell::Empty },
                residual.map_or(Cell::Empty, |x| (x <= tol).into()),
            ];
            Ok((spec, row))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "g_over_jdelta",
        "g",
        "q",
        "exists",
        "im_theta",
        "energy",
        "eps_bp",
        "asymptote_resonant",
        "asymptote_strong",
        "oracle_sites",
        "oracle_energy",
        "oracle_residual",
        "tolerance",
        "within_tolerance",
    ]);
    let mut inputs = Vec::new();
    for (spec, row) in rows {
        inputs.push(spec);
        table.push(row);
    }
    table.sort_by_columns(&["g_over_jdelta"]);
    inputs.sort_by(|a, b| a.g().total_cmp(&b.g()));
    ExperimentResult::new(
        ExperimentId::Fig2Sweep,
        inputs,
        table,
        cfg,
        &[("oracle_residual", tol)],
        BTreeMap::new(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig3Config {
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// Values of 2(JΔ − g)/J.
    pub grid: Vec<f64>,
    pub oracle_points: Vec<f64>,
    pub oracle_sites: usize,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Self {
            j: 1.0,
            delta: 20.0,
            grid: (-20..=20).map(|k| k as f64 / 4.0).collect(),
            oracle_points: vec![-4.0, -3.0, 3.0, 4.0],
            oracle_sites: 60,
        }
    }
}

/// Hybrid surface state offset (E − 2ε1 − g)/(J/2) against 2(JΔ − g)/J.
pub fn run_fig3(cfg: &Fig3Config) -> Result<ExperimentResult> {
    require_grid("2(JDelta-g)/J", &cfg.grid)?;
    let jd = cfg.j * cfg.delta;
    let unit = cfg.j / 2.0;
    let tol = 0.05 * unit.abs();
    let rows: Vec<(ChainSpec, Vec<Cell>)> = cfg
        .grid
        .par_iter()
        .map(|&x| -> Result<(ChainSpec, Vec<Cell>)> {
            let g = jd - x * cfg.j / 2.0;
            let spec = ring(cfg.oracle_sites, cfg.j, cfg.delta, g)?;
            let pred = ldp_hybrid_surface_state(&spec);
            let eps = pred.energy.map(|e| (e - 2.0 * spec.eps1() - g) / unit);
            let checked = pred.exists && contains_point(&cfg.oracle_points, x);
            let (oracle, residual) = if checked {
                oracle_residual(&spec, pred.energy)?
            } else {
                (None, None)
            };
            let row = vec![
                x.into(),
                g.into(),
                pred.exists.into(),
                pred.im_theta().into(),
                pred.energy.into(),
                eps.into(),
                if checked { cfg.oracle_sites.into() } else { Cell::Empty },
                oracle.into(),
                residual.into(),
                if checked { tol.into() } else { Cell::Empty },
                residual.map_or(Cell::Empty, |r| (r <= tol).into()),
            ];
            Ok((spec, row))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "detuning",
        "g",
        "exists",
        "im_theta",
        "energy",
        "eps_ldp",
        "oracle_sites",
        "oracle_energy",
        "oracle_residual",
        "tolerance",
        "within_tolerance",
    ]);
    let mut inputs = Vec::new();
    for (spec, row) in rows {
        inputs.push(spec);
        table.push(row);
    }
    table.sort_by_columns(&["detuning"]);
    inputs.sort_by(|a, b| b.g().total_cmp(&a.g()));
    ExperimentResult::new(
        ExperimentId::Fig3Sweep,
        inputs,
        table,
        cfg,
        &[("oracle_residual", tol)],
        BTreeMap::new(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig4Config {
    #[serde(rename = "N")]
    pub n_sites: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub n0: usize,
    /// Values of g/JΔ.
    pub g_over_jdelta: Vec<f64>,
    pub t_max: f64,
    pub samples: usize,
    /// Width of the Gaussian used before locating the recurrence.
    pub smoothing: f64,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Self {
            n_sites: 10,
            j: 1.0,
            delta: 10.0,
            n0: 5,
            g_over_jdelta: vec![0.25, 1.0],
            t_max: 200.0,
            samples: 2001,
            smoothing: 2.0,
        }
    }
}

impl Fig4Config {
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples.max(2);
        (0..n)
            .map(|i| self.t_max * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn spec(&self, g: f64) -> Result<ChainSpec> {
        ChainSpec::builder(self.n_sites, Boundary::Closed)
            .exchange(self.j)
            .anisotropy(self.delta)
            .eps1(0.0)
            .defect(g, self.n0)
            .build()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Run {
    pub spec: ChainSpec,
    pub trace: EvolutionTrace,
    pub metric: AntiresonanceMetric,
    /// Recurrence time of the initial pair, if one is resolved in the window.
    pub period: Option<f64>,
}

/// Propagates the pair started at (n0+1, n0+2) for one value of g.
pub fn fig4_run(cfg: &Fig4Config, g: f64) -> Result<Fig4Run> {
    let spec = cfg.spec(g)?;
    let decomp = eigh(&build_hamiltonian(&spec, 2)?)?;
    let labels = antiresonance_labels(&spec);
    let psi0 = basis_state(&decomp.basis, labels[0])?;
    let times = cfg.times();
    let trace = evolve(&decomp, &psi0, &times, &labels)?;
    let metric = antiresonance_metric(&trace, &spec)?;
    let start = trace.series(labels[0]).expect("label was requested");
    let period = oscillation_period(&times, start, cfg.smoothing / cfg.j.abs());
    Ok(Fig4Run {
        spec,
        trace,
        metric,
        period,
    })
}

pub fn run_fig4(cfg: &Fig4Config) -> Result<ExperimentResult> {
    require_grid("g/JDelta", &cfg.g_over_jdelta)?;
    if cfg.samples < 2 || !(cfg.t_max > 0.0) {
        return Err(Error::Config("time window needs t_max > 0 and at least 2 samples".into()));
    }
    let jd = cfg.j * cfg.delta;
    let runs: Vec<Fig4Run> = cfg
        .g_over_jdelta
        .par_iter()
        .map(|r| fig4_run(cfg, r * jd))
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "g",
        "t",
        "p_initial",
        "p_dissociated",
        "p_shifted",
        "norm",
        "energy",
    ]);
    let mut summary = BTreeMap::new();
    for run in &runs {
        let tr = &run.trace;
        for (i, &t) in tr.times.iter().enumerate() {
            table.push(vec![
                run.spec.g().into(),
                t.into(),
                tr.observables[0][i].into(),
                tr.observables[1][i].into(),
                tr.observables[2][i].into(),
                tr.norm[i].into(),
                tr.energy[i].into(),
            ]);
        }
        summary.insert(
            format!("g={:.6e}", run.spec.g()),
            json!({
                "g": run.spec.g(),
                "leak_bp": run.metric.leak_bp,
                "leak_ldp": run.metric.leak_ldp,
                "period": run.period,
                "reference_period": 2.0 * PI * cfg.delta / cfg.j,
                "max_norm_drift": tr.max_norm_drift(),
                "max_energy_drift": tr.max_energy_drift(),
            }),
        );
    }
    table.sort_by_columns(&["g", "t"]);
    let mut inputs: Vec<ChainSpec> = runs.into_iter().map(|r| r.spec).collect();
    inputs.sort_by(|a, b| a.g().total_cmp(&b.g()));
    ExperimentResult::new(
        ExperimentId::Fig4Dynamics,
        inputs,
        table,
        cfg,
        &[("smoothing_sigma", cfg.smoothing / cfg.j.abs())],
        summary,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig5Config {
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub sites: Vec<usize>,
    pub grid: Vec<f64>,
    pub tol_im: f64,
}

impl Default for Fig5Config {
    fn default() -> Self {
        Self {
            j: 1.0,
            delta: 10.0,
            sites: vec![6, 12],
            grid: vec![
                0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0,
                3.0, 4.0, 5.0, 7.0, 10.0, 15.0, 20.0,
            ],
            tol_im: crate::quantization::DEFAULT_TOL_IM,
        }
    }
}

/// Im θ of the defect-bound root; the two edge roots of an open chain are set aside.
pub fn defect_root_im(spec: &ChainSpec, roots: &RootSet) -> Option<f64> {
    let mut ims: Vec<f64> = roots.localized().map(|r| r.theta.im).collect();
    if spec.boundary() == Boundary::Open && spec.delta().abs() > 1.0 {
        let surface = spec.delta().abs().ln();
        for _ in 0..2 {
            let Some(i) = (0..ims.len())
                .min_by(|&a, &b| (ims[a] - surface).abs().total_cmp(&(ims[b] - surface).abs()))
            else {
                break;
            };
            ims.remove(i);
        }
    }
    ims.into_iter().reduce(f64::max)
}

pub fn run_fig5(cfg: &Fig5Config) -> Result<ExperimentResult> {
    require_grid("g", &cfg.grid)?;
    if cfg.sites.is_empty() {
        return Err(Error::Config("site list is empty".into()));
    }
    let solver = RootSolver::new(cfg.tol_im);
    let mut points = Vec::new();
    for boundary in [Boundary::Open, Boundary::Closed] {
        for &n in &cfg.sites {
            for &g in &cfg.grid {
                points.push((boundary, n, g));
            }
        }
    }
    let rows: Vec<(ChainSpec, Vec<Cell>)> = points
        .par_iter()
        .map(|&(boundary, n, g)| -> Result<(ChainSpec, Vec<Cell>)> {
            let spec = ChainSpec::builder(n, boundary)
                .exchange(cfg.j)
                .anisotropy(cfg.delta)
                .eps1(0.0)
                .defect(g, n / 2)
                .build()?;
            let roots = match boundary {
                Boundary::Open => solver.open_chain(&spec)?,
                Boundary::Closed => solver.closed_chain(&spec)?,
            };
            let im = defect_root_im(&spec, &roots);
            let infinite = defect_state(&spec).im_theta();
            let sqrt_law = (boundary == Boundary::Closed && n % 2 == 0 && g != 0.0)
                .then(|| (2.0 * g.abs() / (n as f64 * cfg.j.abs())).sqrt());
            let rel = |reference: Option<f64>| match (im, reference) {
                (Some(x), Some(r)) if r != 0.0 => Some((x - r).abs() / r),
                _ => None,
            };
            let row = vec![
                boundary.to_string().into(),
                n.into(),
                g.into(),
                im.is_some().into(),
                im.into(),
                infinite.into(),
                rel(infinite).into(),
                sqrt_law.into(),
                rel(sqrt_law).into(),
            ];
            Ok((spec, row))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "boundary",
        "N",
        "g",
        "exists",
        "im_theta",
        "im_theta_infinite",
        "deviation_infinite",
        "sqrt_law",
        "deviation_sqrt",
    ]);
    let mut inputs = Vec::new();
    for (spec, row) in rows {
        inputs.push(spec);
        table.push(row);
    }
    table.sort_by_columns(&["boundary", "N", "g"]);
    inputs.sort_by(|a, b| {
        (a.boundary().to_string(), a.n_sites())
            .cmp(&(b.boundary().to_string(), b.n_sites()))
            .then(a.g().total_cmp(&b.g()))
    });
    let mut summary = BTreeMap::new();
    summary.insert(
        "series".to_string(),
        json!(2 * cfg.sites.len()),
    );
    ExperimentResult::new(
        ExperimentId::Fig5LocLength,
        inputs,
        table,
        cfg,
        &[("tol_im", cfg.tol_im)],
        summary,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdpTableConfig {
    #[serde(rename = "N")]
    pub n_sites: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub g: f64,
}

impl Default for LdpTableConfig {
    fn default() -> Self {
        Self {
            n_sites: 100,
            j: 1.0,
            delta: 20.0,
            g: 10.0,
        }
    }
}

/// Oracle LDP levels paired by rank with the band formula.
pub fn run_ldp_table(cfg: &LdpTableConfig) -> Result<ExperimentResult> {
    let spec = ring(cfg.n_sites, cfg.j, cfg.delta, cfg.g)?;
    let values = two_exc_levels(&spec)?;
    let report = classify_bands(&values, &spec);
    let band = report
        .band(BandKind::LDP)
        .ok_or_else(|| Error::Regime("no LDP band for these parameters".into()))?;
    if band.merged() {
        return Err(Error::Regime(
            "the LDP window overlaps another band; rank pairing is ambiguous".into(),
        ));
    }
    let mut observed: Vec<f64> = band.indices.iter().map(|&i| values[i]).collect();
    observed.sort_by(f64::total_cmp);
    let mut predicted: Vec<(usize, f64)> = ldp_band(&spec)
        .into_iter()
        .enumerate()
        .map(|(i, (_, e))| (i + 1, e))
        .collect();
    predicted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let shift = cfg.j * cfg.j / (2.0 * cfg.g);
    let mut table = Table::new(&["rank", "k", "predicted", "oracle", "residual", "shift"]);
    let mut max_residual: f64 = 0.0;
    for (rank, ((k, p), o)) in predicted.iter().zip(&observed).enumerate() {
        let r = (o - p).abs();
        max_residual = max_residual.max(r);
        table.push(vec![
            (rank + 1).into(),
            (*k).into(),
            (*p).into(),
            (*o).into(),
            r.into(),
            shift.into(),
        ]);
    }
    let mut summary = BTreeMap::new();
    summary.insert("expected_levels".into(), json!(predicted.len()));
    summary.insert("observed_levels".into(), json!(observed.len()));
    summary.insert("paired_levels".into(), json!(table.len()));
    summary.insert("max_residual".into(), json!(max_residual));
    ExperimentResult::new(
        ExperimentId::LDPTable,
        vec![spec],
        table,
        cfg,
        &[("max_residual", 5e-3 * cfg.j.abs())],
        summary,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubletConfig {
    #[serde(rename = "N")]
    pub n_sites: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub g_values: Vec<f64>,
}

impl Default for DoubletConfig {
    fn default() -> Self {
        Self {
            n_sites: 40,
            j: 1.0,
            delta: 20.0,
            g_values: vec![8.0, 10.0, 16.0, 30.0],
        }
    }
}

fn localized_kind_name(kind: LocalizedKind) -> &'static str {
    match kind {
        LocalizedKind::DefectOneExc => "defect_one_exc",
        LocalizedKind::SurfaceOneExc => "surface_one_exc",
        LocalizedKind::BPDoubletPlus => "bp_doublet_plus",
        LocalizedKind::BPDoubletMinus => "bp_doublet_minus",
        LocalizedKind::BPSurface => "bp_surface",
        LocalizedKind::LDPHybridSurface => "ldp_hybrid_surface",
    }
}

/// Tolerance for matching a localized level: absolute for defect-bound
/// states, a fraction of the host band half-width for surface-type pairs.
pub fn localized_tolerance(spec: &ChainSpec, kind: LocalizedKind) -> f64 {
    match kind {
        LocalizedKind::BPSurface => 0.05 * (spec.j() / (2.0 * spec.delta())).abs(),
        LocalizedKind::LDPHybridSurface => 0.05 * spec.j().abs(),
        _ => 1e-2 * spec.j().abs(),
    }
}

/// Oracle check of the defect, doublet and surface-pair energies.
pub fn run_doublet_check(cfg: &DoubletConfig) -> Result<ExperimentResult> {
    require_grid("g", &cfg.g_values)?;
    let per_g: Vec<(ChainSpec, Vec<Vec<Cell>>)> = cfg
        .g_values
        .par_iter()
        .map(|&g| -> Result<(ChainSpec, Vec<Vec<Cell>>)> {
            let spec = ring(cfg.n_sites, cfg.j, cfg.delta, g)?;
            let mut rows = Vec::new();
            let mut push = |kind: LocalizedKind, copy: usize, predicted: f64, oracle: f64| {
                let residual = (oracle - predicted).abs();
                let tol = localized_tolerance(&spec, kind);
                rows.push(vec![
                    g.into(),
                    localized_kind_name(kind).into(),
                    copy.into(),
                    predicted.into(),
                    oracle.into(),
                    residual.into(),
                    tol.into(),
                    (residual <= tol).into(),
                ]);
            };
            let defect = defect_state(&spec);
            if let Some(e) = defect.energy {
                let one = eigvalsh(&build_hamiltonian(&spec, 1)?.entries)?;
                if let Some(o) = nearest(&one, e) {
                    push(LocalizedKind::DefectOneExc, 1, e, o);
                }
            }
            let values = two_exc_levels(&spec)?;
            let report = classify_bands(&values, &spec);
            let mut copies: BTreeMap<&str, usize> = BTreeMap::new();
            for m in &report.localized_levels {
                let c = copies.entry(localized_kind_name(m.kind)).or_insert(0);
                *c += 1;
                push(m.kind, *c, m.predicted, m.energy);
            }
            Ok((spec, rows))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "g",
        "kind",
        "copy",
        "predicted",
        "oracle",
        "residual",
        "tolerance",
        "within_tolerance",
    ]);
    let mut inputs = Vec::new();
    for (spec, rows) in per_g {
        inputs.push(spec);
        for r in rows {
            table.push(r);
        }
    }
    table.sort_by_columns(&["g", "kind", "copy"]);
    inputs.sort_by(|a, b| a.g().total_cmp(&b.g()));
    ExperimentResult::new(
        ExperimentId::DoubletCheck,
        inputs,
        table,
        cfg,
        &[
            ("defect_and_doublet", 1e-2 * cfg.j.abs()),
            ("bp_surface", 0.05 * (cfg.j / (2.0 * cfg.delta)).abs()),
            ("ldp_hybrid_surface", 0.05 * cfg.j.abs()),
        ],
        BTreeMap::new(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusConfig {
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// Defect strengths for the one-excitation conditions.
    pub g_draws: Vec<f64>,
    /// Values of q = (JΔ − g)/g for the trapped-pair condition.
    pub q_draws: Vec<f64>,
    /// Values of a = 2(JΔ − g)/J for the resonant condition.
    pub a_draws: Vec<f64>,
    /// Chain lengths at which the complex-pair onsets are located.
    pub onset_sites: Vec<usize>,
    pub odd_sites: Vec<usize>,
    pub grid_step: f64,
    pub tol_im: f64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        Self {
            j: 1.0,
            delta: 10.0,
            n_min: 5,
            n_max: 60,
            g_draws: vec![-3.7, -0.45, 0.3, 2.5],
            q_draws: vec![-1.5, -0.62, 0.45, 0.93, 1.5],
            a_draws: vec![-4.0, 0.8, 2.5],
            onset_sites: vec![10, 20, 40],
            odd_sites: vec![5, 7, 9, 11],
            grid_step: 1e-3,
            tol_im: crate::quantization::DEFAULT_TOL_IM,
        }
    }
}

#[derive(Clone, Copy)]
enum Condition {
    Open,
    Closed,
    BoundPair,
    Hybrid,
}

impl Condition {
    fn name(self) -> &'static str {
        match self {
            Condition::Open => "open_chain",
            Condition::Closed => "closed_chain",
            Condition::BoundPair => "bound_pair_surface",
            Condition::Hybrid => "hybrid",
        }
    }

    fn expected(self, n: usize) -> usize {
        match self {
            Condition::Open | Condition::Closed => n,
            Condition::BoundPair => n - 2,
            Condition::Hybrid => n - 1,
        }
    }
}

fn census_spec(cfg: &CensusConfig, cond: Condition, n: usize, p: f64) -> Result<ChainSpec> {
    let jd = cfg.j * cfg.delta;
    let (boundary, g) = match cond {
        Condition::Open => (Boundary::Open, p),
        Condition::Closed => (Boundary::Closed, p),
        Condition::BoundPair => (Boundary::Closed, jd / (1.0 + p)),
        Condition::Hybrid => (Boundary::Closed, jd - p * cfg.j / 2.0),
    };
    ChainSpec::builder(n, boundary)
        .exchange(cfg.j)
        .anisotropy(cfg.delta)
        .eps1(0.0)
        .defect(g, n.div_ceil(2))
        .build()
}

fn solve(solver: &RootSolver, cond: Condition, spec: &ChainSpec) -> Result<RootSet> {
    match cond {
        Condition::Open => solver.open_chain(spec),
        Condition::Closed => solver.closed_chain(spec),
        Condition::BoundPair => solver.bp_surface(spec),
        Condition::Hybrid => solver.hybrid(spec),
    }
}

const CENSUS_COLUMNS: [&str; 9] = [
    "check", "source", "N", "parameter", "found", "expected", "localized", "deviation",
    "max_residual",
];

/// First parameter on a scan at which the localized count reaches `level`.
///
/// The scan visits midpoints of a uniform grid ordered by `order`; the
/// reported onset is the cell edge at which the count changes.
fn locate_onset(
    cfg: &CensusConfig,
    solver: &RootSolver,
    cond: Condition,
    n: usize,
    points: &[f64],
    level: usize,
) -> Result<Option<f64>> {
    let counts: Vec<usize> = points
        .par_iter()
        .map(|&p| {
            let spec = census_spec(cfg, cond, n, p)?;
            Ok(solve(solver, cond, &spec)?.localized_count())
        })
        .collect::<Result<_>>()?;
    Ok(counts
        .iter()
        .position(|&c| c >= level)
        .filter(|&i| i > 0)
        .map(|i| 0.5 * (points[i - 1] + points[i])))
}

/// Root counts for all four conditions plus the complex-pair onsets.
pub fn run_root_census(cfg: &CensusConfig) -> Result<ExperimentResult> {
    if cfg.n_min < 5 || cfg.n_max < cfg.n_min {
        return Err(Error::Config(format!(
            "census needs 5 <= n_min <= n_max, got {}..{}",
            cfg.n_min, cfg.n_max
        )));
    }
    if !(cfg.grid_step > 0.0) {
        return Err(Error::Config("grid_step must be positive".into()));
    }
    let solver = RootSolver::new(cfg.tol_im);
    let mut draws = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        for (cond, list) in [
            (Condition::Open, &cfg.g_draws),
            (Condition::Closed, &cfg.g_draws),
            (Condition::BoundPair, &cfg.q_draws),
            (Condition::Hybrid, &cfg.a_draws),
        ] {
            for &p in list.iter() {
                draws.push((cond, n, p));
            }
        }
    }
    if draws.is_empty() {
        return Err(Error::Config("census has no parameter draws".into()));
    }
    let count_rows: Vec<(ChainSpec, Vec<Cell>)> = draws
        .par_iter()
        .map(|&(cond, n, p)| -> Result<(ChainSpec, Vec<Cell>)> {
            let spec = census_spec(cfg, cond, n, p)?;
            let expected = cond.expected(n);
            let (found, localized, residual) = match solve(&solver, cond, &spec) {
                Ok(set) => {
                    let res = set.roots.iter().map(|r| r.residual).fold(0.0, f64::max);
                    (set.len(), Some(set.localized_count()), Some(res))
                }
                Err(Error::RootCount { found, .. }) => (found, None, None),
                Err(e) => return Err(e),
            };
            let row = vec![
                "count".into(),
                cond.name().into(),
                n.into(),
                p.into(),
                found.into(),
                expected.into(),
                localized.map_or(Cell::Empty, Cell::from),
                (found.abs_diff(expected) as f64).into(),
                residual.into(),
            ];
            Ok((spec, row))
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&CENSUS_COLUMNS);
    let mut inputs = Vec::new();
    for (spec, row) in count_rows {
        inputs.push(spec);
        table.push(row);
    }

    let step = cfg.grid_step;
    let descending = |hi: f64, lo: f64| -> Vec<f64> {
        let cells = ((hi - lo) / step).round() as usize;
        (0..cells).map(|k| hi - (k as f64 + 0.5) * step).collect()
    };
    let mut onset = |check: &str,
                     cond: Condition,
                     n: usize,
                     points: &[f64],
                     level: usize,
                     expected: f64|
     -> Result<()> {
        let found = locate_onset(cfg, &solver, cond, n, points, level)?;
        table.push(vec![
            check.into(),
            cond.name().into(),
            n.into(),
            Cell::Empty,
            found.into(),
            expected.into(),
            level.into(),
            found.map(|f| (f - expected).abs()).into(),
            Cell::Empty,
        ]);
        Ok(())
    };
    for &n in &cfg.onset_sites {
        let second = 1.0 - 2.0 / (n as f64 - 1.0);
        for sign in [1.0, -1.0] {
            let pts: Vec<f64> = descending(1.2, 0.5).into_iter().map(|q| sign * q).collect();
            onset("onset_first", Condition::BoundPair, n, &pts, 1, sign)?;
            onset("onset_second", Condition::BoundPair, n, &pts, 2, sign * second)?;
        }
    }
    for &n in &cfg.odd_sites {
        let pts = descending(0.0, -1.0);
        onset("odd_threshold", Condition::Closed, n, &pts, 1, -2.0 / n as f64)?;
    }
    table.sort_by_columns(&["check", "source", "N", "parameter", "expected"]);
    inputs.sort_by(|a, b| {
        (a.boundary().to_string(), a.n_sites())
            .cmp(&(b.boundary().to_string(), b.n_sites()))
            .then(a.g().total_cmp(&b.g()))
    });
    ExperimentResult::new(
        ExperimentId::RootCensus,
        inputs,
        table,
        cfg,
        &[("grid_step", step), ("tol_im", cfg.tol_im)],
        BTreeMap::new(),
    )
}

/// Runs a pipeline with its default configuration.
pub fn run_default(id: ExperimentId) -> Result<ExperimentResult> {
    match id {
        ExperimentId::Fig2Sweep => run_fig2(&Fig2Config::default()),
        ExperimentId::Fig3Sweep => run_fig3(&Fig3Config::default()),
        ExperimentId::Fig4Dynamics => run_fig4(&Fig4Config::default()),
        ExperimentId::Fig5LocLength => run_fig5(&Fig5Config::default()),
        ExperimentId::LDPTable => run_ldp_table(&LdpTableConfig::default()),
        ExperimentId::DoubletCheck => run_doublet_check(&DoubletConfig::default()),
        ExperimentId::RootCensus => run_root_census(&CensusConfig::default()),
    }
}
