//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use vqex::ansatz::qccsd;
use vqex::drivers::{fs_ssvqe, fs_vqd, fs_vqe, max_pairwise_overlap, vqe, RunOptions, SsvqeSchedule, StoppingRule, VqdSchedule};
use vqex::exact::{dense_spectrum, nearest_eigenvalues, relative_error, sector_eigenvalues, SectorSpec};
use vqex::experiment::{run_point, ExperimentConfig, FixtureEntry, Method, PointResult};
use vqex::fermion::{hartree_fock_index, ActiveSpace, MolecularFixture};
use vqex::optim::{geometric_tensor, OptimizerConfig, OptimizerKind};
use vqex::pauli::{fold, PauliPolynomial, PauliSum, PauliTerm};
use vqex::sim::{loss, loss_and_gradient, run, CompiledOperator, InitialState, LossSpec, LossTerm, Objective, Penalty};
use vqex::tapering::{find_symmetries, sector_of, taper};
use vqex::Complex64;

type Matrix = nalgebra::DMatrix<Complex64>;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn fixture(name: &str) -> MolecularFixture {
    MolecularFixture::load(fixture_path(name)).unwrap()
}

fn poly_matrix(p: &PauliPolynomial) -> Matrix {
    let dim = 1 << p.n_qubits();
    p.terms().fold(Matrix::zeros(dim, dim), |acc, (s, c)| {
        let single = PauliSum::from_terms(p.n_qubits(), [PauliTerm::new(1.0, *s)]).unwrap();
        acc + single.to_matrix().unwrap() * *c
    })
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn adam(lr: f64) -> OptimizerConfig {
    OptimizerConfig::with_kind(OptimizerKind::Adam, lr)
}

fn lih_config(method: Method, r: f64, tapering: bool, layers: Vec<usize>) -> (ExperimentConfig, FixtureEntry) {
    let entry = FixtureEntry { path: fixture_path(&format!("lih_{r:.3}.fcidump")), bond_length: None };
    let mut cfg = ExperimentConfig::from_toml("method = \"exact\"\nfixtures = []\n").unwrap();
    cfg.method = method;
    cfg.fixtures = vec![entry.clone()];
    cfg.tapering = tapering;
    cfg.active_space = ActiveSpace::frozen_core(1);
    cfg.ansatz.layers = layers;
    cfg.optimizer = adam(0.3);
    cfg.stopping = StoppingRule::new(1e-5, 400);
    (cfg, entry)
}

fn worst_relative(p: &PointResult) -> f64 {
    p.rows.iter().map(|r| r.relative_error).fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f = fixture("h2_0.735.fcidump");
    let h = f.hamiltonian(&ActiveSpace::default()).unwrap();
    let exact = dense_spectrum(&h).unwrap()[0];
    let oracle = (exact - f.metadata.reference_ground_ha).abs();
    let c = qccsd(4, 2, 1, true).unwrap();
    let r = vqe(&h, &c, &InitialState::Basis(3), &adam(0.3), &StoppingRule::new(1e-5, 400), &RunOptions::default())
        .unwrap();
    let vqe_err = (r.energies[0] - exact).abs();
    let best = r.loss_trace.iter().map(|l| (l - exact).abs()).fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    outcome(
        oracle <= 1e-8 && vqe_err <= 1e-6 && elapsed < Duration::from_secs(10),
        format!(
            "exact vs reference {oracle:.2e} Ha; VQE final error {vqe_err:.2e} Ha after {} iterations \
             (closest trace point {best:.2e} Ha); {elapsed:.2?}",
            r.iterations_used
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for k in 2..=9 {
        let start = Instant::now();
        let r = 0.4 * k as f64;
        let f = fixture(&format!("lih_{r:.3}.fcidump"));
        let full = sector_eigenvalues(&f.hamiltonian(&ActiveSpace::default()).unwrap(), SectorSpec::new(4, 0.0)).unwrap();
        let act =
            sector_eigenvalues(&f.hamiltonian(&ActiveSpace::frozen_core(1)).unwrap(), SectorSpec::new(2, 0.0)).unwrap();
        for i in 0..2 {
            worst = worst.max(relative_error(act[i], full[i]).unwrap());
        }
        slowest = slowest.max(start.elapsed());
    }
    outcome(
        worst < 1e-3 && slowest < Duration::from_secs(120),
        format!("worst relative error {worst:.2e} over 0.8..3.6 A; slowest point {slowest:.2?}"),
    )
}

const SWEEP: [f64; 4] = [1.2, 1.6, 2.0, 2.4];

fn criterion_3() -> Outcome {
    let points: Vec<PointResult> = SWEEP
        .par_iter()
        .map(|&r| {
            let (cfg, e) = lih_config(Method::Vqd, r, true, vec![2, 3, 4]);
            run_point(&e, &cfg).unwrap()
        })
        .collect();
    let worst = points.iter().map(worst_relative).fold(0.0, f64::max);
    let summary: Vec<String> = points.iter().map(|p| format!("{:.1}:{:.1e}", p.bond_length, worst_relative(p))).collect();
    outcome(worst < 1e-3, format!("worst S0/T1/S1 relative error per bond length {}", summary.join(" ")))
}

fn criterion_4() -> Outcome {
    let points: Vec<PointResult> = SWEEP
        .par_iter()
        .map(|&r| {
            let (mut cfg, e) = lih_config(Method::Ssvqe, r, true, vec![4]);
            cfg.weights = Some(vec![1.0, 0.7, 0.4]);
            run_point(&e, &cfg).unwrap()
        })
        .collect();
    let worst = points.iter().map(worst_relative).fold(0.0, f64::max);
    let overlap = points
        .iter()
        .map(|p| max_pairwise_overlap(&p.record.as_ref().unwrap().states).unwrap())
        .fold(0.0, f64::max);
    outcome(
        worst < 4e-3 && overlap <= 1e-10,
        format!("worst relative error {worst:.2e}; largest pairwise overlap {overlap:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let f = fixture("lih_1.600.fcidump");
    let h = f.hamiltonian(&ActiveSpace::frozen_core(1)).unwrap();
    let syms = find_symmetries(&h).unwrap();
    let sector = sector_of(hartree_fock_index(2, 10), &syms).unwrap();
    let reduced = taper(&h, &syms, &sector).unwrap().reduced;
    let full = dense_spectrum(&h).unwrap();
    let small = dense_spectrum(&reduced).unwrap();
    let containment = small
        .iter()
        .map(|e| full.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let run_vqd = |tapering: bool| {
        let (cfg, e) = lih_config(Method::Vqd, 1.6, tapering, vec![2, 3, 4]);
        run_point(&e, &cfg).unwrap()
    };
    let (tapered, untapered) = rayon::join(|| run_vqd(true), || run_vqd(false));
    let energy_gap = tapered
        .rows
        .iter()
        .zip(&untapered.rows)
        .map(|(a, b)| (a.energy - b.energy).abs())
        .fold(0.0, f64::max);
    let params = |p: &PointResult| p.resources.iter().map(|r| r.report.n_params).collect::<Vec<_>>();
    let (pt, pu) = (params(&tapered), params(&untapered));
    outcome(
        syms.reduced_qubits() == 6
            && containment <= 1e-9
            && energy_gap <= 1e-5
            && pu == [48, 72, 96]
            && pt == [20, 30, 40],
        format!(
            "10 -> {} qubits; containment {containment:.1e}; tapered vs untapered VQD {energy_gap:.1e} Ha; \
             params {pu:?} -> {pt:?}",
            syms.reduced_qubits()
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let f = fixture("lih_1.600.fcidump");
    let h = f.hamiltonian(&ActiveSpace::frozen_core(1)).unwrap();
    let omega = -7.8;
    let target = sector_eigenvalues(&h, SectorSpec::new(2, 0.0))
        .unwrap()
        .iter()
        .map(|e| (e - omega).powi(2))
        .fold(f64::INFINITY, f64::min);
    let c = qccsd(10, 2, 3, true).unwrap();
    let gaps: Vec<f64> = [OptimizerKind::Adam, OptimizerKind::Qng, OptimizerKind::Gd]
        .par_iter()
        .map(|&k| {
            let r = fs_vqe(
                &h,
                omega,
                &c,
                &InitialState::Basis(3),
                &OptimizerConfig::with_kind(k, 0.07),
                &StoppingRule::new(1e-6, 400),
                &RunOptions::default(),
            )
            .unwrap();
            r.loss_trace.last().unwrap() - target
        })
        .collect();
    let elapsed = start.elapsed();
    outcome(
        gaps[0] < gaps[1] && gaps[1] < gaps[2] && gaps[0] <= 1e-3 && elapsed < Duration::from_secs(1800),
        format!("gap Adam {:.3e} < QNG {:.9e} < GD {:.9e}; {elapsed:.2?}", gaps[0], gaps[1], gaps[2]),
    )
}

struct H4Run {
    bond_length: f64,
    h: PauliSum,
    energies: Vec<f64>,
    variances: Vec<f64>,
    stage_iterations: Vec<usize>,
}

fn h4_fs_vqd(r: f64) -> H4Run {
    let f: MolecularFixture = fixture(&format!("h4_{r:.3}.fcidump"));
    let h = f.hamiltonian(&ActiveSpace::default()).unwrap();
    let c = qccsd(8, 4, 5, true).unwrap();
    let sched = VqdSchedule { betas: vec![5.0, 5.0], circuits: vec![c.clone(), c.clone(), c], initial_state: InitialState::Basis(15) };
    let rec = fs_vqd(&h, -1.0, &sched, &adam(0.3), &StoppingRule::new(1e-5, 400), &RunOptions::default()).unwrap();
    H4Run { bond_length: r, h, energies: rec.energies, variances: rec.variances, stage_iterations: rec.stage_iterations }
}

fn criterion_7(runs: &[H4Run]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for run in runs {
        for (e, v) in run.energies.iter().zip(&run.variances) {
            let nearest = nearest_eigenvalues(&run.h, *e, SectorSpec::new(4, 0.0), 1).unwrap()[0];
            let ok = *v < 1e-3 && (e - nearest).abs() <= 3.0 * v.sqrt();
            pass &= ok;
        }
        let vars: Vec<String> = run.variances.iter().map(|v| format!("{v:.1e}")).collect();
        parts.push(format!("{:.1}: [{}]", run.bond_length, vars.join(", ")));
    }
    outcome(pass, format!("variances (limit 1e-3) {}", parts.join(" ")))
}

fn criterion_8(vqd_run: &H4Run) -> Outcome {
    let h = &vqd_run.h;
    let sched = SsvqeSchedule {
        weights: vec![1.0, 0.7, 0.4],
        input_states: vec![15, 27, 30],
        circuit: qccsd(8, 4, 5, true).unwrap(),
        equal_weights: false,
    };
    let rec = fs_ssvqe(h, -1.0, &sched, &adam(0.3), &StoppingRule::new(1e-5, 400), &RunOptions::default()).unwrap();
    let max_vqd = *vqd_run.stage_iterations.iter().max().unwrap();
    outcome(
        rec.iterations_used > max_vqd,
        format!("FS-SSVQE {} iterations vs FS-VQD stages {:?}", rec.iterations_used, vqd_run.stage_iterations),
    )
}

fn term(initial: usize, weight: f64, obj: Objective<'_>) -> LossTerm<'_> {
    LossTerm { initial: InitialState::Basis(initial), weight, objectives: vec![obj], penalties: vec![] }
}

fn criterion_9() -> Outcome {
    let mut checks = Vec::new();

    // Jordan-Wigner anticommutation at four modes.
    let n = 4;
    let mut car: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a = poly_matrix(&PauliPolynomial::annihilation(n, i));
            let ad = poly_matrix(&PauliPolynomial::creation(n, j));
            let id = if i == j { Matrix::identity(16, 16) } else { Matrix::zeros(16, 16) };
            car = car.max(max_abs(&(&a * &ad + &ad * &a - id)));
        }
    }
    checks.push(("anticommutation", car, 1e-12));

    // Gradients of every loss family against central differences.
    let h = fixture("h4_1.600.fcidump").hamiltonian(&ActiveSpace::default()).unwrap();
    let plain = CompiledOperator::new(&h);
    let folded = CompiledOperator::new(&fold(&h, -1.0));
    let circuit = qccsd(8, 4, 2, true).unwrap();
    let params: Vec<f64> = (0..circuit.n_params()).map(|k| 0.2 * (k as f64).cos()).collect();
    let target = run(&circuit, &params.iter().map(|p| -p).collect::<Vec<_>>(), &InitialState::Basis(15)).unwrap();
    let mut penalized = term(15, 1.0, Objective::Expectation(&plain));
    penalized.penalties.push(Penalty { beta: 3.0, target: &target });
    let families = [
        LossSpec { terms: vec![term(15, 1.0, Objective::Expectation(&plain))] },
        LossSpec { terms: vec![penalized] },
        LossSpec { terms: vec![term(15, 1.0, Objective::Expectation(&folded))] },
        LossSpec { terms: vec![term(15, 1.0, Objective::SqrtExpectation(&folded))] },
        LossSpec {
            terms: vec![term(15, 1.0, Objective::Expectation(&folded)), term(27, 0.7, Objective::Expectation(&folded))],
        },
    ];
    let mut grad_err: f64 = 0.0;
    for spec in &families {
        let g = loss_and_gradient(&circuit, &params, spec).unwrap().gradient;
        for k in 0..params.len() {
            let mut p = params.clone();
            p[k] += 1e-5;
            let up = loss(&circuit, &p, spec).unwrap();
            p[k] -= 2e-5;
            let down = loss(&circuit, &p, spec).unwrap();
            grad_err = grad_err.max((g[k] - (up - down) / 2e-5).abs());
        }
    }
    checks.push(("gradient", grad_err, 1e-6));

    // fold against the dense square at six qubits.
    let small = PauliSum::from_text("0.3 XYZIZX\n-0.7 ZZIIYY\n1.1 IIIIII\n0.25 XIXIXI\n0.4 ZIIIIZ\n").unwrap();
    let m = small.to_matrix().unwrap() - Matrix::identity(64, 64) * Complex64::new(0.6, 0.0);
    let fold_err = max_abs(&(fold(&small, 0.6).to_matrix().unwrap() - &m * &m));
    checks.push(("fold", fold_err, 1e-10));

    // Metric blocks: PSD and state-derivative equivalence on single-gate layers.
    let se = vqex::ansatz::strongly_entangled(3, 2).unwrap();
    let sp: Vec<f64> = (0..se.n_params()).map(|k| 0.4 + 0.3 * (k as f64).sin()).collect();
    let metric = geometric_tensor(&se, &sp, &InitialState::Basis(0)).unwrap();
    let min_eig = metric
        .blocks
        .iter()
        .map(|(_, b)| b.clone().symmetric_eigen().eigenvalues.min())
        .fold(f64::INFINITY, f64::min);
    checks.push(("metric psd", (-min_eig).max(0.0), 1e-9));

    let psi = run(&circuit, &params, &InitialState::Basis(15)).unwrap();
    checks.push(("norm", (psi.norm_sqr() - 1.0).abs(), 1e-9));

    let again = loss_and_gradient(&circuit, &params, &families[4]).unwrap();
    let first = loss_and_gradient(&circuit, &params, &families[4]).unwrap();
    let identical = again.loss.to_bits() == first.loss.to_bits()
        && again.gradient.iter().zip(&first.gradient).all(|(a, b)| a.to_bits() == b.to_bits());
    checks.push(("determinism", if identical { 0.0 } else { 1.0 }, 0.0));

    let pass = checks.iter().all(|(_, v, tol)| v <= tol);
    let detail = checks.iter().map(|(n, v, _)| format!("{n} {v:.1e}")).collect::<Vec<_>>().join(", ");
    outcome(pass, format!("{detail} (full suites in the other test targets)"))
}

fn main() {
    let start = Instant::now();
    let h4_runs: Vec<H4Run> = [1.2, 1.6, 2.0].par_iter().map(|&r| h4_fs_vqd(r)).collect();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + Sync>)> = vec![
        ("1 H2 oracle and VQE", Box::new(criterion_1)),
        ("2 LiH active space", Box::new(criterion_2)),
        ("3 LiH tapered VQD", Box::new(criterion_3)),
        ("4 LiH weighted SSVQE", Box::new(criterion_4)),
        ("5 LiH tapering", Box::new(criterion_5)),
        ("6 optimizer ordering", Box::new(criterion_6)),
        ("7 H4 FS-VQD", Box::new(|| criterion_7(&h4_runs))),
        ("8 FS-SSVQE vs FS-VQD iterations", Box::new(|| criterion_8(&h4_runs[1]))),
        ("9 property suites", Box::new(criterion_9)),
    ];
    let results: Vec<Outcome> = criteria.par_iter().map(|(_, f)| f()).collect();
    let mut failed = 0;
    for ((name, _), r) in criteria.iter().zip(&results) {
        println!("{} criterion {name}: {}", if r.pass { "PASS" } else { "FAIL" }, r.detail);
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {} passed, {failed} failed in {:.2?}", results.len() - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
