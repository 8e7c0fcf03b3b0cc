//! Experiment configuration and batch runner behind the command-line tool.
//!
//! A run loads each configured fixture, builds the active-space qubit Hamiltonian
//! (optionally tapered), executes the configured method, compares against exact
//! diagonalization and writes CSV tables. Output is byte-identical across reruns.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{qccsd, resources, strongly_entangled, uccsd, AnsatzKind, ResourceReport};
use crate::drivers::{
    fs_ssvqe, fs_vqd, fs_vqe, sector_inputs, ssvqe_weighted, vqd, vqe, RunOptions, RunRecord, SsvqeSchedule,
    StoppingRule, VqdSchedule,
};
use crate::exact::{dense_spectrum, relative_error, sector_eigenvalues, sector_spectrum, SectorSpec};
use crate::fermion::{hartree_fock_index, spin_penalty_operator, ActiveSpace, MolecularFixture};
use crate::optim::OptimizerConfig;
use crate::pauli::PauliSum;
use crate::sim::{Circuit, InitialState};
use crate::tapering::{find_symmetries, sector_of, taper_basis_index, taper_circuit, taper_operator, Z2Symmetries};
use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "VQEX_OUTPUT_DIR";

const DEFAULT_OUTPUT_DIR: &str = "vqex-output";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Vqe,
    Vqd,
    Ssvqe,
    FsVqe,
    FsVqd,
    FsSsvqe,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Vqe => "vqe",
            Method::Vqd => "vqd",
            Method::Ssvqe => "ssvqe",
            Method::FsVqe => "fs_vqe",
            Method::FsVqd => "fs_vqd",
            Method::FsSsvqe => "fs_ssvqe",
        }
    }

    pub fn is_folded(self) -> bool {
        matches!(self, Method::FsVqe | Method::FsVqd | Method::FsSsvqe)
    }

    fn is_deflation(self) -> bool {
        matches!(self, Method::Vqd | Method::FsVqd)
    }

    fn is_subspace(self) -> bool {
        matches!(self, Method::Ssvqe | Method::FsSsvqe)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    /// FCIDUMP path; relative paths resolve against the config file's directory.
    pub path: PathBuf,
    /// Overrides the sidecar's bond length tag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bond_length: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzConfig {
    pub kind: AnsatzKind,
    /// One entry per target state for deflation methods; the first entry is used
    /// by single-circuit methods.
    pub layers: Vec<usize>,
    pub spin_restricted: bool,
    /// Weight of the `(S_z - m_z)^2` penalty added for the strongly entangled ansatz.
    pub spin_penalty_weight: f64,
    pub m_z: f64,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        AnsatzConfig {
            kind: AnsatzKind::Qccsd,
            layers: vec![1],
            spin_restricted: true,
            spin_penalty_weight: 1.0,
            m_z: 0.0,
        }
    }
}

/// Thresholds evaluated in `--check` mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_variance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub method: Method,
    #[serde(default)]
    pub tapering: bool,
    /// Target energy of folded-spectrum methods, Hartree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Deflation penalties; default 3 Ha (5 Ha for folded runs) per excited state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    /// Subspace-search weights; default `[1.0, 0.7, 0.4]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub equal_weights: bool,
    #[serde(default)]
    pub sqrt_loss: bool,
    /// Number of exact states reported by the `exact` method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_states: Option<usize>,
    /// Tapering sector override; defaults to the Hartree-Fock sector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub fixtures: Vec<FixtureEntry>,
    #[serde(default)]
    pub active_space: ActiveSpace,
    #[serde(default)]
    pub ansatz: AnsatzConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub stopping: StoppingRule,
    #[serde(default)]
    pub check: CheckConfig,
    /// Variants for `compare-optimizers`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub optimizers: Vec<OptimizerConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].lines().count().max(1)).unwrap_or(0);
            Error::Parse { line, message: e.message().to_string() }
        })?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    /// Reads a config file; relative fixture paths become relative to its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
        let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| e.in_file(path))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for f in &mut cfg.fixtures {
            if f.path.is_relative() {
                f.path = base.join(&f.path);
            }
        }
        Ok(cfg)
    }

    /// Number of target states.
    pub fn n_targets(&self) -> usize {
        match self.method {
            Method::Exact => self.n_states.unwrap_or(3),
            Method::Vqe | Method::FsVqe => 1,
            Method::Vqd | Method::FsVqd => self.ansatz.layers.len(),
            Method::Ssvqe | Method::FsSsvqe => self.weights().len(),
        }
    }

    pub fn betas(&self) -> Vec<f64> {
        self.betas.clone().unwrap_or_else(|| {
            let b = if self.method.is_folded() { 5.0 } else { 3.0 };
            vec![b; self.ansatz.layers.len().saturating_sub(1)]
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| {
            if self.equal_weights {
                vec![0.4; 3]
            } else {
                vec![1.0, 0.7, 0.4]
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.fixtures.is_empty() {
            return Err(Error::config("fixtures", "at least one fixture is required"));
        }
        if self.method.is_folded() && self.omega.is_none() {
            return Err(Error::config("omega", format!("required by method {}", self.method.name())));
        }
        if self.method != Method::Exact {
            if self.ansatz.layers.is_empty() || self.ansatz.layers.contains(&0) {
                return Err(Error::config("ansatz.layers", "needs positive layer counts"));
            }
            self.optimizer.validate()?;
            self.stopping.validate()?;
        }
        if self.method.is_deflation() && self.betas().len() + 1 != self.ansatz.layers.len() {
            return Err(Error::config(
                "betas",
                format!("{} target states need {} penalties", self.ansatz.layers.len(), self.ansatz.layers.len() - 1),
            ));
        }
        if self.method.is_subspace() && self.weights().is_empty() {
            return Err(Error::config("weights", "at least one weight is required"));
        }
        if self.n_states == Some(0) {
            return Err(Error::config("n_states", "must be positive"));
        }
        for o in &self.optimizers {
            o.validate()?;
        }
        Ok(())
    }

    /// `flag`, then the config value, then the environment variable, then a default.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }
}

/// The qubit problem for one fixture: active-space Hamiltonian and, when tapering
/// is enabled, the symmetry data used to map operators, states and circuits.
#[derive(Clone, Debug)]
pub struct Problem {
    pub molecule: String,
    pub bond_length: f64,
    pub n_qubits: usize,
    pub n_electrons: usize,
    /// Untapered active-space Hamiltonian.
    pub hamiltonian: PauliSum,
    pub tapering: Option<(Z2Symmetries, Vec<i8>)>,
    /// Hamiltonian the variational methods see (tapered when enabled).
    pub working: PauliSum,
}

impl Problem {
    pub fn build(entry: &FixtureEntry, cfg: &ExperimentConfig) -> Result<Self> {
        let fixture = MolecularFixture::load(&entry.path)?;
        let integrals = fixture.integrals(&cfg.active_space)?;
        let hamiltonian = crate::fermion::jordan_wigner(&integrals)?;
        let n_qubits = integrals.n_spin_orbitals;
        let n_electrons = integrals.n_electrons;
        let (tapering, working) = if cfg.tapering {
            let syms = find_symmetries(&hamiltonian)?;
            let sector = match &cfg.sector {
                Some(s) => s.clone(),
                None => sector_of(hartree_fock_index(n_electrons, n_qubits), &syms)?,
            };
            let working = taper_operator(&hamiltonian, &syms, &sector)?;
            (Some((syms, sector)), working)
        } else {
            (None, hamiltonian.clone())
        };
        Ok(Problem {
            molecule: fixture.metadata.molecule.clone(),
            bond_length: entry.bond_length.unwrap_or(fixture.bond_length()),
            n_qubits,
            n_electrons,
            hamiltonian,
            tapering,
            working,
        })
    }

    pub fn working_qubits(&self) -> usize {
        self.working.n_qubits()
    }

    pub fn sector(&self) -> SectorSpec {
        SectorSpec::new(self.n_electrons, 0.0)
    }

    /// Whether untapered basis state `b` survives tapering in the chosen sector.
    pub fn in_tapered_sector(&self, b: usize) -> bool {
        match &self.tapering {
            Some((syms, sector)) => sector_of(b, syms).map(|s| &s == sector).unwrap_or(false),
            None => true,
        }
    }

    pub fn map_basis(&self, b: usize) -> usize {
        match &self.tapering {
            Some((syms, _)) => taper_basis_index(b, syms),
            None => b,
        }
    }

    pub fn map_operator(&self, op: &PauliSum) -> Result<PauliSum> {
        match &self.tapering {
            Some((syms, sector)) => taper_operator(op, syms, sector),
            None => Ok(op.clone()),
        }
    }

    pub fn hf_state(&self) -> InitialState {
        InitialState::Basis(self.map_basis(hartree_fock_index(self.n_electrons, self.n_qubits)))
    }

    /// Ansatz circuit with `layers` layers on the working register.
    pub fn circuit(&self, ansatz: &AnsatzConfig, layers: usize) -> Result<Circuit> {
        let full = match ansatz.kind {
            AnsatzKind::Qccsd => qccsd(self.n_qubits, self.n_electrons, layers, ansatz.spin_restricted)?,
            AnsatzKind::Uccsd => uccsd(self.n_qubits, self.n_electrons, layers, ansatz.spin_restricted)?,
            AnsatzKind::Se => return strongly_entangled(self.working_qubits(), layers),
        };
        match &self.tapering {
            Some((syms, sector)) => Ok(taper_circuit(&full, syms, sector)?.circuit),
            None => Ok(full),
        }
    }

    pub fn run_options(&self, cfg: &ExperimentConfig) -> Result<RunOptions> {
        let penalty_observable = if cfg.ansatz.kind == AnsatzKind::Se && cfg.ansatz.spin_penalty_weight > 0.0 {
            let op = spin_penalty_operator(self.n_qubits, cfg.ansatz.m_z, cfg.ansatz.spin_penalty_weight)?;
            Some(self.map_operator(&op)?)
        } else {
            None
        };
        Ok(RunOptions { penalty_observable, sqrt_loss: cfg.sqrt_loss })
    }
}

/// One reported state of one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct StateRow {
    pub state: usize,
    pub energy: f64,
    /// Exact reference: the k-th sector eigenvalue, or for folded methods the
    /// sector eigenvalue nearest the reported energy.
    pub exact: f64,
    pub relative_error: f64,
    pub variance: Option<f64>,
    pub s2: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceRow {
    pub state: usize,
    pub layers: usize,
    pub n_qubits: usize,
    pub report: ResourceReport,
}

#[derive(Clone, Debug)]
pub struct PointResult {
    pub molecule: String,
    pub bond_length: f64,
    pub method: Method,
    pub rows: Vec<StateRow>,
    pub resources: Vec<ResourceRow>,
    pub record: Option<RunRecord>,
}

fn nearest(values: &[f64], e: f64) -> f64 {
    values
        .iter()
        .copied()
        .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
        .expect("non-empty spectrum")
}

/// Executes the configured method on one fixture.
pub fn run_point(entry: &FixtureEntry, cfg: &ExperimentConfig) -> Result<PointResult> {
    let p = Problem::build(entry, cfg)?;
    let n_targets = cfg.n_targets();
    let sector = p.sector();
    let mut result = PointResult {
        molecule: p.molecule.clone(),
        bond_length: p.bond_length,
        method: cfg.method,
        rows: Vec::new(),
        resources: Vec::new(),
        record: None,
    };
    if cfg.method == Method::Exact {
        let sol = sector_spectrum(&p.hamiltonian, sector, n_targets)?;
        for (k, &e) in sol.eigenvalues.iter().enumerate() {
            result.rows.push(StateRow {
                state: k,
                energy: e,
                exact: e,
                relative_error: 0.0,
                variance: None,
                s2: sol.s2.as_ref().map(|s| s[k]),
                iterations: None,
                converged: None,
            });
        }
        return Ok(result);
    }
    let opts = p.run_options(cfg)?;
    let layers = &cfg.ansatz.layers;
    let record = match cfg.method {
        Method::Vqe | Method::FsVqe => {
            let c = p.circuit(&cfg.ansatz, layers[0])?;
            result.resources.push(resource_row(0, layers[0], &c));
            if cfg.method == Method::Vqe {
                vqe(&p.working, &c, &p.hf_state(), &cfg.optimizer, &cfg.stopping, &opts)?
            } else {
                fs_vqe(&p.working, cfg.omega.unwrap(), &c, &p.hf_state(), &cfg.optimizer, &cfg.stopping, &opts)?
            }
        }
        Method::Vqd | Method::FsVqd => {
            let circuits = layers.iter().map(|&l| p.circuit(&cfg.ansatz, l)).collect::<Result<Vec<_>>>()?;
            for (k, (c, &l)) in circuits.iter().zip(layers).enumerate() {
                result.resources.push(resource_row(k, l, c));
            }
            let schedule = VqdSchedule { betas: cfg.betas(), circuits, initial_state: p.hf_state() };
            if cfg.method == Method::Vqd {
                vqd(&p.working, &schedule, &cfg.optimizer, &cfg.stopping, &opts)?
            } else {
                fs_vqd(&p.working, cfg.omega.unwrap(), &schedule, &cfg.optimizer, &cfg.stopping, &opts)?
            }
        }
        Method::Ssvqe | Method::FsSsvqe => {
            let circuit = p.circuit(&cfg.ansatz, layers[0])?;
            result.resources.push(resource_row(0, layers[0], &circuit));
            let inputs = sector_inputs(p.n_qubits, p.n_electrons, n_targets, |b| p.in_tapered_sector(b))?
                .into_iter()
                .map(|b| p.map_basis(b))
                .collect();
            let schedule =
                SsvqeSchedule { weights: cfg.weights(), input_states: inputs, circuit, equal_weights: cfg.equal_weights };
            if cfg.method == Method::Ssvqe {
                ssvqe_weighted(&p.working, &schedule, &cfg.optimizer, &cfg.stopping, &opts)?
            } else {
                fs_ssvqe(&p.working, cfg.omega.unwrap(), &schedule, &cfg.optimizer, &cfg.stopping, &opts)?
            }
        }
        Method::Exact => unreachable!(),
    };
    let spectrum = sector_eigenvalues(&p.hamiltonian, sector)?;
    if !cfg.method.is_folded() {
        warn_outside_tapered_sector(&p, &spectrum[..n_targets.min(spectrum.len())])?;
    }
    for (k, (&e, &var)) in record.energies.iter().zip(&record.variances).enumerate() {
        let exact = if cfg.method.is_folded() { nearest(&spectrum, e) } else { spectrum[k] };
        let iterations = if cfg.method.is_deflation() { record.stage_iterations[k] } else { record.iterations_used };
        result.rows.push(StateRow {
            state: k,
            energy: e,
            exact,
            relative_error: relative_error(e, exact)?,
            variance: Some(var),
            s2: None,
            iterations: Some(iterations),
            converged: Some(record.converged),
        });
    }
    result.record = Some(record);
    Ok(result)
}

/// Reports exact target states that the chosen tapering sector cannot represent.
fn warn_outside_tapered_sector(p: &Problem, targets: &[f64]) -> Result<()> {
    if p.tapering.is_none() || p.working_qubits() > 10 {
        return Ok(());
    }
    let reduced = dense_spectrum(&p.working)?;
    for (k, e) in targets.iter().enumerate() {
        if !reduced.iter().any(|r| (r - e).abs() < 1e-8) {
            eprintln!(
                "warning: {} {:.3} A: exact state {k} ({e:.8} Ha) lies outside the tapering sector",
                p.molecule, p.bond_length
            );
        }
    }
    Ok(())
}

fn resource_row(state: usize, layers: usize, c: &Circuit) -> ResourceRow {
    ResourceRow { state, layers, n_qubits: c.n_qubits(), report: resources(c) }
}

/// Checks in `--check` mode, one message per violation.
pub fn check_point(p: &PointResult, check: &CheckConfig) -> Vec<String> {
    let mut failures = Vec::new();
    let tag = format!("{} {:.3} A {}", p.molecule, p.bond_length, p.method.name());
    if let Some(rec) = &p.record {
        if let Some(msg) = &rec.aborted {
            failures.push(format!("{tag}: run aborted: {msg}"));
        }
    }
    for r in &p.rows {
        if let Some(max) = check.max_relative_error {
            if !(r.relative_error < max) {
                failures.push(format!("{tag} state {}: relative error {:e} >= {max:e}", r.state, r.relative_error));
            }
        }
        if let (Some(max), Some(v)) = (check.max_variance, r.variance) {
            if !(v < max) {
                failures.push(format!("{tag} state {}: variance {v:e} >= {max:e}", r.state));
            }
        }
    }
    failures
}

fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `rows` to `path` through a temporary file and a rename.
fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.to_path_buf(), source: e };
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::Writer::from_path(&tmp).map_err(|e| io(e.into()))?;
        w.write_record(header).map_err(|e| io(e.into()))?;
        for r in rows {
            w.write_record(r).map_err(|e| io(e.into()))?;
        }
        w.flush().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

pub fn trace_file_name(molecule: &str, bond_length: f64) -> String {
    format!("trace_{molecule}_{bond_length:.3}.csv")
}

/// Writes `energies.csv`, `resources.csv` and one trace per point into `dir`.
pub fn write_outputs(dir: &Path, points: &[PointResult]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    let mut energy_rows = Vec::new();
    let mut resource_rows = Vec::new();
    for p in points {
        for r in &p.rows {
            energy_rows.push(vec![
                p.molecule.clone(),
                format!("{:.3}", p.bond_length),
                p.method.name().to_string(),
                r.state.to_string(),
                fmt(r.energy),
                fmt(r.exact),
                fmt(r.relative_error),
                opt(r.variance.map(fmt)),
                opt(r.s2.map(fmt)),
                opt(r.iterations),
                opt(r.converged),
            ]);
        }
        for r in &p.resources {
            resource_rows.push(vec![
                p.molecule.clone(),
                format!("{:.3}", p.bond_length),
                r.state.to_string(),
                r.layers.to_string(),
                r.n_qubits.to_string(),
                r.report.n_params.to_string(),
                r.report.one_qubit_gates.to_string(),
                r.report.two_qubit_gates.to_string(),
                r.report.depth.to_string(),
            ]);
        }
        if let Some(rec) = &p.record {
            write_csv(&dir.join(trace_file_name(&p.molecule, p.bond_length)), &["iteration", "stage", "loss"], &trace_rows(rec))?;
        }
    }
    write_csv(
        &dir.join("energies.csv"),
        &[
            "molecule",
            "bond_length_angstrom",
            "method",
            "state",
            "energy_ha",
            "exact_ha",
            "relative_error",
            "variance_ha2",
            "s2",
            "iterations",
            "converged",
        ],
        &energy_rows,
    )?;
    if !resource_rows.is_empty() {
        write_csv(&dir.join("resources.csv"), &RESOURCE_HEADER, &resource_rows)?;
    }
    Ok(())
}

const RESOURCE_HEADER: [&str; 9] = [
    "molecule",
    "bond_length_angstrom",
    "state",
    "layers",
    "n_qubits",
    "n_params",
    "one_qubit_gates",
    "two_qubit_gates",
    "depth",
];

fn trace_rows(rec: &RunRecord) -> Vec<Vec<String>> {
    let mut rows = Vec::with_capacity(rec.loss_trace.len());
    let mut it = rec.loss_trace.iter();
    for (stage, &n) in rec.stage_iterations.iter().enumerate() {
        for i in 0..n {
            let loss = it.next().expect("trace length matches stage iterations");
            rows.push(vec![(i + 1).to_string(), stage.to_string(), fmt(*loss)]);
        }
    }
    rows
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))
}

/// Runs every fixture on a pool of `jobs` workers (0 picks the core count) and
/// returns the points sorted by bond length.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<PointResult>> {
    cfg.validate()?;
    let mut points = pool(jobs)?.install(|| {
        cfg.fixtures.par_iter().map(|f| run_point(f, cfg)).collect::<Result<Vec<_>>>()
    })?;
    points.sort_by(|a, b| {
        a.bond_length.total_cmp(&b.bond_length).then(a.molecule.cmp(&b.molecule)).then(a.method.cmp(&b.method))
    });
    Ok(points)
}

/// Resource rows for the configured ansatz on every fixture, without optimizing.
pub fn resource_table(cfg: &ExperimentConfig) -> Result<Vec<PointResult>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for f in &cfg.fixtures {
        let p = Problem::build(f, cfg)?;
        let layer_list: Vec<usize> = if cfg.method.is_deflation() {
            cfg.ansatz.layers.clone()
        } else {
            vec![cfg.ansatz.layers[0]]
        };
        let resources = layer_list
            .iter()
            .enumerate()
            .map(|(k, &l)| Ok(resource_row(k, l, &p.circuit(&cfg.ansatz, l)?)))
            .collect::<Result<Vec<_>>>()?;
        out.push(PointResult {
            molecule: p.molecule,
            bond_length: p.bond_length,
            method: cfg.method,
            rows: vec![],
            resources,
            record: None,
        });
    }
    out.sort_by(|a, b| a.bond_length.total_cmp(&b.bond_length));
    Ok(out)
}

pub fn write_resources(dir: &Path, points: &[PointResult]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .flat_map(|p| {
            p.resources.iter().map(move |r| {
                vec![
                    p.molecule.clone(),
                    format!("{:.3}", p.bond_length),
                    r.state.to_string(),
                    r.layers.to_string(),
                    r.n_qubits.to_string(),
                    r.report.n_params.to_string(),
                    r.report.one_qubit_gates.to_string(),
                    r.report.two_qubit_gates.to_string(),
                    r.report.depth.to_string(),
                ]
            })
        })
        .collect();
    write_csv(&dir.join("resources.csv"), &RESOURCE_HEADER, &rows)
}

/// One optimizer variant of a comparison.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub optimizer: OptimizerConfig,
    pub record: RunRecord,
    pub final_loss: f64,
    pub target_loss: f64,
    pub gap: f64,
    pub trace_file: String,
}

/// Runs every `cfg.optimizers` variant on the single configured fixture.
pub fn compare_optimizers(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<ComparisonRow>> {
    cfg.validate()?;
    if cfg.optimizers.len() < 2 {
        return Err(Error::config("optimizers", "at least two optimizer variants are required"));
    }
    if cfg.fixtures.len() != 1 {
        return Err(Error::config("fixtures", "optimizer comparison uses exactly one fixture"));
    }
    if !matches!(cfg.method, Method::Vqe | Method::FsVqe) {
        return Err(Error::config("method", "optimizer comparison supports vqe and fs_vqe"));
    }
    let p = Problem::build(&cfg.fixtures[0], cfg)?;
    let circuit = p.circuit(&cfg.ansatz, cfg.ansatz.layers[0])?;
    let opts = p.run_options(cfg)?;
    let spectrum = sector_eigenvalues(&p.hamiltonian, p.sector())?;
    let target_loss = match cfg.omega {
        Some(w) if cfg.method == Method::FsVqe => {
            spectrum.iter().map(|e| (e - w).powi(2)).fold(f64::INFINITY, f64::min)
        }
        _ => spectrum[0],
    };
    pool(jobs)?.install(|| {
        cfg.optimizers
            .par_iter()
            .enumerate()
            .map(|(i, o)| {
                let record = match cfg.method {
                    Method::Vqe => vqe(&p.working, &circuit, &p.hf_state(), o, &cfg.stopping, &opts)?,
                    _ => fs_vqe(&p.working, cfg.omega.unwrap(), &circuit, &p.hf_state(), o, &cfg.stopping, &opts)?,
                };
                let final_loss = record.loss_trace.last().copied().unwrap_or(f64::NAN);
                let name = serde_kind(o);
                Ok(ComparisonRow {
                    optimizer: o.clone(),
                    final_loss,
                    target_loss,
                    gap: final_loss - target_loss,
                    trace_file: format!("trace_{i}_{name}.csv"),
                    record,
                })
            })
            .collect()
    })
}

fn serde_kind(o: &OptimizerConfig) -> String {
    toml::Value::try_from(o.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

pub fn write_comparison(dir: &Path, rows: &[ComparisonRow]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    let mut table = Vec::new();
    for r in rows {
        write_csv(&dir.join(&r.trace_file), &["iteration", "stage", "loss"], &trace_rows(&r.record))?;
        table.push(vec![
            serde_kind(&r.optimizer),
            fmt(r.optimizer.learning_rate),
            r.record.iterations_used.to_string(),
            fmt(r.final_loss),
            fmt(r.target_loss),
            fmt(r.gap),
            r.record.converged.to_string(),
            r.trace_file.clone(),
        ]);
    }
    write_csv(
        &dir.join("comparison.csv"),
        &["optimizer", "learning_rate", "iterations", "final_loss", "target_loss", "gap", "converged", "trace_file"],
        &table,
    )
}

/// Writes a gnuplot script next to every known CSV in `dir`; returns the scripts.
pub fn emit_gnuplot(dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |p: &Path, e| Error::Io { path: p.to_path_buf(), source: e };
    let mut names: Vec<String> = fs::read_dir(dir)
        .map_err(|e| io(dir, e))?
        .filter_map(|e| e.ok().and_then(|e| e.file_name().into_string().ok()))
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    let mut written = Vec::new();
    for name in names {
        let stem = name.trim_end_matches(".csv");
        let body = if name == "energies.csv" {
            format!(
                "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n\
                 set output '{stem}.png'\nset xlabel 'bond length (angstrom)'\nset ylabel 'energy (Ha)'\n\
                 plot for [s=0:9] '{name}' using ($4==s ? $2 : 1/0):5 with linespoints title sprintf('state %d', s), \\\n\
                 \x20    '{name}' using 2:6 with points pt 6 title 'exact'\n"
            )
        } else if name.starts_with("trace_") {
            format!(
                "set datafile separator ','\nset terminal pngcairo size 900,600\nset output '{stem}.png'\n\
                 set xlabel 'iteration'\nset ylabel 'loss'\n\
                 plot '{name}' every ::1 using 0:3 with lines title '{stem}'\n"
            )
        } else if name == "comparison.csv" {
            format!(
                "set datafile separator ','\nset terminal pngcairo size 900,600\nset output '{stem}.png'\n\
                 set style data histograms\nset logscale y\nset ylabel 'final loss gap'\n\
                 plot '{name}' every ::1 using 6:xtic(1) title 'gap'\n"
            )
        } else {
            continue;
        };
        let path = dir.join(format!("{stem}.gp"));
        let mut f = fs::File::create(&path).map_err(|e| io(&path, e))?;
        f.write_all(body.as_bytes()).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
