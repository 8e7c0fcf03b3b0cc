//! `vqex` command-line experiment runner.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vqex::experiment::{
    check_point, compare_optimizers, emit_gnuplot, resource_table, run_experiment, write_comparison,
    write_outputs, write_resources, ExperimentConfig, FixtureEntry, Method, Problem,
};
use vqex::optim::OptimizerKind;

#[derive(Parser)]
#[command(name = "vqex", version, about = "Variational excited-state experiments on molecular Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact sector spectrum for every fixture (forces method = exact).
    Exact(Common),
    /// Run the configured method on every fixture with a single worker unless `--jobs` is given.
    Run(Common),
    /// Run a bond-length sweep on a worker pool (all cores by default).
    Sweep(Common),
    /// Run every `[[optimizers]]` variant on the single configured fixture.
    CompareOptimizers(Common),
    /// Print the Z2 symmetries, chosen qubits and sector of each fixture.
    TaperInfo(Common),
    /// Write the gate and parameter counts of the configured ansatz.
    Resources(Common),
    /// Write gnuplot scripts next to the CSV files of a result directory.
    EmitGnuplot {
        /// Directory holding CSV results.
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
    /// Exit nonzero when a configured check threshold is violated.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Replaces the fixture list with a single FCIDUMP path.
    #[arg(long)]
    fixture: Option<PathBuf>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long)]
    tapering: Option<Toggle>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Comma-separated layer counts, one per target state.
    #[arg(long, value_delimiter = ',')]
    layers: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_optimizer)]
    optimizer: Option<OptimizerKind>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    convergence_threshold: Option<f64>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    toml::Value::String(s.to_string()).try_into().map_err(|_| format!("unknown method `{s}`"))
}

fn parse_optimizer(s: &str) -> Result<OptimizerKind, String> {
    toml::Value::String(s.to_string()).try_into().map_err(|_| format!("unknown optimizer `{s}`"))
}

impl Common {
    fn load(&self) -> vqex::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(f) = &self.fixture {
            cfg.fixtures = vec![FixtureEntry { path: f.clone(), bond_length: None }];
        }
        if let Some(m) = self.method {
            cfg.method = m;
        }
        if let Some(t) = self.tapering {
            cfg.tapering = matches!(t, Toggle::On);
        }
        if self.omega.is_some() {
            cfg.omega = self.omega;
        }
        if let Some(l) = &self.layers {
            cfg.ansatz.layers = l.clone();
        }
        if let Some(k) = self.optimizer {
            cfg.optimizer.kind = k;
        }
        if let Some(lr) = self.learning_rate {
            cfg.optimizer.learning_rate = lr;
        }
        if let Some(n) = self.max_iterations {
            cfg.stopping.max_iterations = n;
        }
        if let Some(t) = self.convergence_threshold {
            cfg.stopping.convergence_threshold = t;
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = Some(d.clone());
        }
        Ok(cfg)
    }

    fn output_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        cfg.resolve_output_dir(self.output_dir.as_deref())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns `Ok(false)` when a run aborted or a check failed.
fn dispatch(command: Command) -> vqex::Result<bool> {
    match command {
        Command::Exact(c) => {
            let mut cfg = c.load()?;
            cfg.method = Method::Exact;
            run(&c, &cfg, c.jobs.unwrap_or(0))
        }
        Command::Run(c) => {
            let cfg = c.load()?;
            run(&c, &cfg, c.jobs.unwrap_or(1))
        }
        Command::Sweep(c) => {
            let cfg = c.load()?;
            run(&c, &cfg, c.jobs.unwrap_or(0))
        }
        Command::CompareOptimizers(c) => {
            let cfg = c.load()?;
            let rows = compare_optimizers(&cfg, c.jobs.unwrap_or(0))?;
            let dir = c.output_dir(&cfg);
            write_comparison(&dir, &rows)?;
            for r in &rows {
                println!(
                    "{:?} lr={} iterations={} final={:.11e} gap={:.11e}",
                    r.optimizer.kind, r.optimizer.learning_rate, r.record.iterations_used, r.final_loss, r.gap
                );
            }
            println!("wrote {}", dir.join("comparison.csv").display());
            Ok(rows.iter().all(|r| r.record.aborted.is_none()))
        }
        Command::TaperInfo(c) => {
            let mut cfg = c.load()?;
            cfg.tapering = true;
            cfg.validate()?;
            for f in &cfg.fixtures {
                let p = Problem::build(f, &cfg)?;
                let (syms, sector) = p.tapering.as_ref().expect("tapering enabled");
                println!("{} {:.3} A: {} -> {} qubits", p.molecule, p.bond_length, p.n_qubits, syms.reduced_qubits());
                for (g, q) in syms.generators.iter().zip(&syms.chosen_qubits) {
                    println!("  {g}  qubit {q}");
                }
                println!("  sector {sector:?}");
                println!("  terms {} -> {}", p.hamiltonian.len(), p.working.len());
            }
            Ok(true)
        }
        Command::Resources(c) => {
            let cfg = c.load()?;
            let points = resource_table(&cfg)?;
            let dir = c.output_dir(&cfg);
            write_resources(&dir, &points)?;
            for p in &points {
                for r in &p.resources {
                    println!(
                        "{} {:.3} A state {}: layers={} qubits={} params={} 1q={} 2q={} depth={}",
                        p.molecule,
                        p.bond_length,
                        r.state,
                        r.layers,
                        r.n_qubits,
                        r.report.n_params,
                        r.report.one_qubit_gates,
                        r.report.two_qubit_gates,
                        r.report.depth
                    );
                }
            }
            Ok(true)
        }
        Command::EmitGnuplot { dir } => {
            for p in emit_gnuplot(&dir)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
    }
}

fn run(c: &Common, cfg: &ExperimentConfig, jobs: usize) -> vqex::Result<bool> {
    let points = run_experiment(cfg, jobs)?;
    let dir = c.output_dir(cfg);
    write_outputs(&dir, &points)?;
    let mut ok = true;
    for p in &points {
        for r in &p.rows {
            println!(
                "{} {:.3} A {} state {}: E={:.11e} exact={:.11e} rel={:.3e}{}",
                p.molecule,
                p.bond_length,
                p.method.name(),
                r.state,
                r.energy,
                r.exact,
                r.relative_error,
                r.variance.map(|v| format!(" var={v:.3e}")).unwrap_or_default()
            );
        }
        if let Some(msg) = p.record.as_ref().and_then(|r| r.aborted.as_ref()) {
            eprintln!("aborted: {} {:.3} A: {msg}", p.molecule, p.bond_length);
            ok = false;
        }
        if c.check {
            for f in check_point(p, &cfg.check) {
                eprintln!("check failed: {f}");
                ok = false;
            }
        }
    }
    println!("wrote {}", display(&dir));
    Ok(ok)
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
