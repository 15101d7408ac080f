use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use qcwb_core::circuit::{
    compile_metrics, qpe_circuit, trotter_circuit, uccsd_circuit, uccsd_excitations_with, Basis, Circuit,
    CircuitMetrics, SpinPairing, UccsdAnsatz,
};
use qcwb_core::fermion::{hf_state, jordan_wigner, parse_fcidump, OccupationState};
use qcwb_core::pauli::{CommuteMode, PauliSum};
use qcwb_core::qpe::{convergence_sweep, run_qpe, scale_spectrum, QpeConfig};
use qcwb_core::resources::{
    error_rate_sweep, estimate, spacetime_frontier, PhysicalParams, ResourceEstimate, ResourceModel,
};
use qcwb_core::shots::{
    empirical_std_bound, measurement_partition, min_shots_grouped, min_shots_single, min_shots_uniform,
    validate_plan, ShotPlan,
};
use qcwb_core::spectrum::{eigensystem, sector_ground_state};
use qcwb_core::vqe::{
    clifford_warm_start, coefficient_histogram, incremental_term_study, run_vqe, EnergyMode, Optimizer, VqeConfig,
    CLIFFORD_GRID,
};
use qcwb_core::Error;

use crate::args::*;
use crate::output::{RunManifest, Sink, Table};
use crate::Failure;

/// Parameter value used for every ansatz angle when only the circuit shape
/// matters; nonzero and off the Clifford grid so each rotation is costed.
const SYNTHESIS_ANGLE: f64 = 0.1;

/// Headroom of the default spectral scale over the largest `|λ − shift|`.
const SCALE_HEADROOM: f64 = 1.02;

struct Loaded {
    h: PauliSum,
    reference: Option<OccupationState>,
}

impl Loaded {
    fn reference(&self) -> Result<&OccupationState, Failure> {
        self.reference
            .as_ref()
            .ok_or_else(|| Failure::Usage("--electrons is required for Pauli text inputs".into()))
    }
}

fn at_file(path: &Path, e: Error) -> Failure {
    match e {
        Error::Parse { line, message } => Failure::Compute(format!("{}:{line}: {message}", path.display())),
        other => Failure::Compute(format!("{}: {other}", path.display())),
    }
}

fn load(manifest: &mut RunManifest, path: &Path, electrons: Option<usize>) -> Result<Loaded, Failure> {
    let text = manifest.read_input(path)?;
    if text.trim_start().to_ascii_uppercase().starts_with("&FCI") {
        let mi = parse_fcidump(&text).map_err(|e| at_file(path, e))?;
        let reference = match electrons {
            Some(n) => hf_state(n, mi.n_spatial)?,
            None => mi.reference(),
        };
        return Ok(Loaded {
            h: jordan_wigner(&mi)?,
            reference: Some(reference),
        });
    }
    let h = PauliSum::from_text(&text).map_err(|e| at_file(path, e))?;
    let reference = match electrons {
        Some(n) => {
            if h.width() % 2 != 0 {
                return Err(Failure::Usage(format!(
                    "{}: odd register width {} has no spin-orbital layout",
                    path.display(),
                    h.width()
                )));
            }
            Some(hf_state(n, h.width() / 2)?)
        }
        None => None,
    };
    Ok(Loaded { h, reference })
}

fn load_input(manifest: &mut RunManifest, input: &Input) -> Result<Loaded, Failure> {
    load(manifest, &input.input, input.electrons)
}

/// `--scale`, or `SCALE_HEADROOM·max|λ − shift|` from the exact spectrum.
fn resolve_scale(manifest: &mut RunManifest, h: &PauliSum, args: &ScaleArgs) -> Result<f64, Failure> {
    let scale = match args.scale {
        Some(s) => s,
        None => {
            let e = eigensystem(h)?.eigenvalues();
            let m = e.iter().map(|v| (v - args.shift).abs()).fold(0.0, f64::max);
            if m == 0.0 {
                return Err(Failure::Compute("spectrum is zero after the shift; pass --scale".into()));
            }
            SCALE_HEADROOM * m
        }
    };
    manifest.resolve("resolved_scale", scale);
    Ok(scale)
}

fn ansatz(reference: &OccupationState, args: &AnsatzArgs) -> Result<UccsdAnsatz, Failure> {
    let pairing = match args.pairing {
        PairingArg::Independent => SpinPairing::Independent,
        PairingArg::Merged => SpinPairing::Merged,
    };
    Ok(uccsd_excitations_with(reference.electron_count() as usize, reference.n_spatial, pairing)?)
}

fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn is_stochastic(cmd: &Command) -> bool {
    match cmd {
        Command::Qpe(a) => a.shots > 0,
        Command::Vqe(a) | Command::VqeTerms(a) => matches!(a.mode, ModeArg::Sampled) || a.jitter > 0.0,
        Command::VqeWarmstart(_) => true,
        Command::Shots(a) => a.validate.is_some(),
        _ => false,
    }
}

fn num(x: impl ToString) -> String {
    x.to_string()
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let seed = match cli.seed {
        Some(s) => s,
        None => {
            if is_stochastic(&cli.command) {
                eprintln!("warning: no --seed given, using seed 0");
            }
            0
        }
    };
    let sink = Sink {
        out: cli.out.clone(),
        csv: cli.csv,
    };
    let name = cli.command.name();
    match &cli.command {
        Command::Spectrum(a) => spectrum(&sink, RunManifest::new(name, seed, params(a)), a),
        Command::Jw(a) => jw(&sink, RunManifest::new(name, seed, params(a)), a),
        Command::Qpe(a) => qpe(&sink, RunManifest::new(name, seed, params(a)), a, seed),
        Command::QpeSweep(a) => qpe_sweep(&sink, RunManifest::new(name, seed, params(a)), a, seed),
        Command::Vqe(a) => vqe(&sink, RunManifest::new(name, seed, params(a)), a, seed),
        Command::VqeTerms(a) => vqe_terms(&sink, RunManifest::new(name, seed, params(a)), a, seed),
        Command::VqeWarmstart(a) => warm_start(&sink, RunManifest::new(name, seed, params(a)), a, seed),
        Command::CoeffHist(a) => coeff_hist(&sink, RunManifest::new(name, seed, params(a)), a),
        Command::Shots(a) => shots(&sink, RunManifest::new(name, seed, params(a)), a, seed),
        Command::Metrics(a) => metrics(&sink, RunManifest::new(name, seed, params(a)), a),
        Command::Resources(a) => resources(&sink, RunManifest::new(name, seed, params(a)), a),
        Command::ErrorSweep(a) => error_sweep(&sink, RunManifest::new(name, seed, params(a)), a),
        Command::Frontier(a) => frontier(&sink, RunManifest::new(name, seed, params(a)), a),
    }
}

fn spectrum(sink: &Sink, mut m: RunManifest, a: &SpectrumArgs) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    let report = eigensystem(&l.h)?.report(a.threshold);
    sink.write(&m, &report, || {
        let mut t = Table::new(&["index", "eigenvalue"]);
        for (i, e) in report.eigenvalues.iter().enumerate() {
            t.row(vec![num(i), num(e)]);
        }
        t
    })
}

#[derive(Serialize)]
struct TermRecord {
    label: String,
    coefficient: f64,
}

#[derive(Serialize)]
struct JwReport {
    width: usize,
    terms: Vec<TermRecord>,
}

fn jw(sink: &Sink, mut m: RunManifest, a: &JwArgs) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    if a.text {
        return sink.write_text(&m, &l.h.to_text());
    }
    let report = JwReport {
        width: l.h.width(),
        terms: l
            .h
            .terms()
            .iter()
            .map(|t| TermRecord {
                label: t.label(),
                coefficient: t.coefficient,
            })
            .collect(),
    };
    sink.write(&m, &report, || {
        let mut t = Table::new(&["label", "coefficient"]);
        for r in &report.terms {
            t.row(vec![r.label.clone(), num(r.coefficient)]);
        }
        t
    })
}

fn qpe(sink: &Sink, mut m: RunManifest, a: &QpeArgs, seed: u64) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    let reference = l.reference()?.clone();
    let cfg = QpeConfig {
        ancilla: a.ancilla,
        trotter_steps: a.trotter,
        scale: resolve_scale(&mut m, &l.h, &a.scale)?,
        shift: a.scale.shift,
        shots: a.shots,
        seed,
    };
    let r = run_qpe(&l.h, &reference, &cfg)?;
    sink.write(&m, &r, || {
        if r.histogram.is_empty() {
            let mut t = Table::new(&["integer", "phase", "energy", "probability"]);
            for o in &r.top_outcomes {
                t.row(vec![num(o.integer), num(o.phase), num(o.energy), num(o.probability)]);
            }
            t
        } else {
            let mut t = Table::new(&["integer", "phase", "energy", "count"]);
            let n = 1u64 << cfg.ancilla;
            for (&k, &c) in &r.histogram {
                let phase = k as f64 / n as f64;
                t.row(vec![num(k), num(phase), num(phase * cfg.scale + cfg.shift), num(c)]);
            }
            t
        }
    })
}

fn to_usize(values: Vec<u64>) -> Vec<usize> {
    values.into_iter().map(|v| v as usize).collect()
}

fn qpe_sweep(sink: &Sink, mut m: RunManifest, a: &QpeSweepArgs, seed: u64) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    let reference = l.reference()?.clone();
    let base = QpeConfig {
        shift: a.scale.shift,
        seed,
        ..QpeConfig::new(1, 1, resolve_scale(&mut m, &l.h, &a.scale)?)
    };
    let table = convergence_sweep(&l.h, &reference, &to_usize(a.ancilla.values()), &to_usize(a.trotter.values()), &base)?;
    sink.write(&m, &table, || {
        let mut t = Table::new(&["n", "a", "energy", "cnot", "depth", "in_chem_acc"]);
        for r in &table.rows {
            let acc = r.in_chem_acc.map(|b| b.to_string()).unwrap_or_default();
            t.row(vec![num(r.n), num(r.a), num(r.energy), num(r.cnot), num(r.depth), acc]);
        }
        t.comment("oracle_energy", table.oracle_energy).comment("band", table.band)
    })
}

fn vqe_config(a: &VqeArgs, seed: u64) -> VqeConfig {
    VqeConfig {
        max_iterations: a.max_iter,
        tolerance: a.tol,
        mode: match a.mode {
            ModeArg::Exact => EnergyMode::Exact,
            ModeArg::Sampled => EnergyMode::Sampled,
        },
        shots_epsilon: a.epsilon,
        seed,
        optimizer: match a.optimizer {
            OptimizerArg::Sqp => Optimizer::SqpLike,
            OptimizerArg::NelderMead => Optimizer::NelderMead,
        },
        init_jitter: a.jitter,
        initial: None,
    }
}

fn vqe(sink: &Sink, mut m: RunManifest, a: &VqeArgs, seed: u64) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    let ans = ansatz(l.reference()?, &a.ansatz)?;
    let r = run_vqe(&l.h, &ans, &vqe_config(a, seed))?;
    sink.write(&m, &r, || {
        let mut t = Table::new(&["iteration", "energy"]);
        for (i, e) in r.energy_trace.iter().enumerate() {
            t.row(vec![num(i), num(e)]);
        }
        t.comment("converged", r.converged).comment("evaluations", r.evaluations)
    })
}

fn vqe_terms(sink: &Sink, mut m: RunManifest, a: &VqeArgs, seed: u64) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    let ans = ansatz(l.reference()?, &a.ansatz)?;
    let runs = incremental_term_study(&l.h, &ans, &vqe_config(a, seed))?;
    sink.write(&m, &runs, || {
        let mut t = Table::new(&["groups", "final_energy", "iterations", "evaluations", "converged"]);
        for (k, r) in runs.iter().enumerate() {
            t.row(vec![num(k), num(r.final_energy), num(r.iterations), num(r.evaluations), num(r.converged)]);
        }
        t
    })
}

fn warm_start(sink: &Sink, mut m: RunManifest, a: &WarmStartArgs, seed: u64) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    let ans = ansatz(l.reference()?, &a.ansatz)?;
    let grid = a.grid.clone().unwrap_or_else(|| CLIFFORD_GRID.to_vec());
    m.resolve("resolved_grid", &grid);
    let w = clifford_warm_start(&l.h, &ans, &grid, seed)?;
    sink.write(&m, &w, || {
        let mut t = Table::new(&["parameter", "value"]);
        for (i, p) in w.best_params.iter().enumerate() {
            t.row(vec![num(i), num(p)]);
        }
        t.comment("best_energy", w.best_energy)
            .comment("points_evaluated", w.points_evaluated)
            .comment("exhaustive", w.exhaustive)
    })
}

fn coeff_hist(sink: &Sink, mut m: RunManifest, a: &CoeffHistArgs) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    let h = coefficient_histogram(&l.h, a.bins)?;
    sink.write(&m, &h, || {
        let mut t = Table::new(&["lower", "upper", "count"]);
        for b in &h.bins {
            t.row(vec![num(b.lower), num(b.upper), num(b.count)]);
        }
        t.comment("mean", h.mean).comment("std", h.std).comment("term_count", h.term_count)
    })
}

#[derive(Serialize)]
struct Validation {
    trials: usize,
    empirical_std: f64,
    bound: f64,
    within_bound: bool,
}

#[derive(Serialize)]
struct ShotsReport {
    epsilon: f64,
    single_observable: u64,
    measured_terms: usize,
    uniform_per_term: u64,
    uniform_total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<ShotPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    validation: Option<Validation>,
}

fn shots(sink: &Sink, mut m: RunManifest, a: &ShotsArgs, seed: u64) -> Result<(), Failure> {
    let l = load_input(&mut m, &a.input)?;
    let (_, measured) = l.h.split_identity();
    let coeffs: Vec<f64> = measured.terms().iter().map(|t| t.coefficient).collect();
    let (uniform_total, uniform_per_term) = min_shots_uniform(&coeffs, a.epsilon)?;
    let mode = match a.group {
        GroupArg::None => None,
        GroupArg::Qubitwise => Some(CommuteMode::Qubitwise),
        GroupArg::General => Some(CommuteMode::General),
    };
    let plan = match mode {
        Some(mode) => Some(min_shots_grouped(&l.h, &measurement_partition(&l.h, mode), a.epsilon)?),
        None => None,
    };
    let validation = match (a.validate, &plan) {
        (None, _) => None,
        (Some(trials), Some(p)) if p.partition.mode == CommuteMode::Qubitwise => {
            let (_, psi) = sector_ground_state(&l.h, l.reference()?)?;
            let std = validate_plan(&psi, &l.h, p, trials, seed)?;
            let bound = empirical_std_bound(a.epsilon, trials);
            Some(Validation {
                trials,
                empirical_std: std,
                bound,
                within_bound: std <= bound,
            })
        }
        _ => return Err(Failure::Usage("--validate needs --group qubitwise".into())),
    };
    let report = ShotsReport {
        epsilon: a.epsilon,
        single_observable: min_shots_single(a.epsilon)?,
        measured_terms: coeffs.len(),
        uniform_per_term,
        uniform_total,
        plan,
        validation,
    };
    sink.write(&m, &report, || {
        let mut t = Table::new(&["group", "terms", "shots"]);
        match &report.plan {
            Some(p) => {
                for (j, (g, n)) in p.partition.groups.iter().zip(&p.per_group_shots).enumerate() {
                    t.row(vec![num(j), num(g.len()), num(n)]);
                }
            }
            None => {
                for j in 0..report.measured_terms {
                    t.row(vec![num(j), num(1), num(report.uniform_per_term)]);
                }
            }
        }
        let total = report.plan.as_ref().map_or(report.uniform_total, |p| p.total_shots);
        t.comment("total_shots", total).comment("epsilon", report.epsilon)
    })
}

fn basis(b: BasisArg) -> Basis {
    match b {
        BasisArg::CliffordRz => Basis::CliffordRz,
        BasisArg::CliffordT => Basis::CliffordT,
    }
}

fn parse_active(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("--active expects `electrons/orbitals`, got {s:?}"));
    let (e, o) = s.split_once('/').ok_or_else(bad)?;
    Ok((e.trim().parse().map_err(|_| bad())?, o.trim().parse().map_err(|_| bad())?))
}

fn metrics_table(x: &CircuitMetrics) -> Table {
    let opt = |v: Option<u64>| v.map(num).unwrap_or_default();
    let mut t = Table::new(&["width", "gate_count", "depth", "two_qubit_count", "rz_count", "t_count", "parameter_count"]);
    t.row(vec![
        num(x.width),
        num(x.gate_count),
        num(x.depth),
        num(x.two_qubit_count),
        num(x.rz_count),
        opt(x.t_count),
        opt(x.parameter_count.map(|p| p as u64)),
    ]);
    t
}

fn metrics(sink: &Sink, mut m: RunManifest, a: &MetricsArgs) -> Result<(), Failure> {
    let b = basis(a.basis);
    let result = if let Some(path) = &a.circuit {
        let text = m.read_input(path)?;
        let c = Circuit::from_text(&text).map_err(|e| at_file(path, e))?;
        compile_metrics(&c, b, a.rz_precision)?
    } else {
        let loaded = match &a.input {
            Some(p) => Some(load(&mut m, p, a.electrons)?),
            None => None,
        };
        match a.kind {
            KindArg::Uccsd => {
                let reference = match (&a.active, &loaded) {
                    (Some(s), _) => {
                        let (e, o) = parse_active(s)?;
                        hf_state(e, o)?
                    }
                    (None, Some(l)) => l.reference()?.clone(),
                    (None, None) => return Err(Failure::Usage("uccsd metrics need --in or --active".into())),
                };
                let ans = ansatz(&reference, &a.ansatz)?;
                m.resolve("synthesis_angle", SYNTHESIS_ANGLE);
                let c = uccsd_circuit(&ans, &vec![SYNTHESIS_ANGLE; ans.parameter_count()])?;
                compile_metrics(&c, b, a.rz_precision)?.with_parameters(ans.parameter_count())
            }
            KindArg::Qpe | KindArg::Trotter => {
                let l = loaded.ok_or_else(|| Failure::Usage(format!("{:?} metrics need --in", a.kind).to_lowercase()))?;
                let scale = resolve_scale(&mut m, &l.h, &a.scale)?;
                let scaled = scale_spectrum(&l.h, scale, a.scale.shift)?;
                if matches!(a.kind, KindArg::Qpe) {
                    qpe_circuit(&scaled.h, a.ancilla, a.trotter, l.reference()?)?.metrics(b, a.rz_precision)?
                } else {
                    let c = trotter_circuit(&scaled.h, 2.0 * std::f64::consts::PI, a.trotter)?;
                    compile_metrics(&c, b, a.rz_precision)?
                }
            }
        }
    };
    sink.write(&m, &result, || metrics_table(&result))
}

fn model(a: &ModelArgs) -> Result<ResourceModel, Failure> {
    let model = ResourceModel {
        physical: PhysicalParams {
            gate_time_ns: a.gate_time_ns,
            measure_time_ns: a.measure_time_ns,
            p_phys: a.p_phys,
            p_threshold: a.p_threshold,
            prefactor: a.prefactor,
        },
        target_total_error: a.target_error,
        ..ResourceModel::default()
    };
    model.validate()?;
    Ok(model)
}

/// Clifford+T metrics of the workload and its logical qubit count.
fn workload(m: &mut RunManifest, a: &WorkloadArgs) -> Result<(CircuitMetrics, usize), Failure> {
    let metrics = if let Some(path) = &a.metrics {
        let text = m.read_input(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Compute(format!("{}:{}: {e}", path.display(), e.line())))?;
        let v = v.get("result").cloned().unwrap_or(v);
        serde_json::from_value(v).map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?
    } else {
        let path = a.input.as_ref().ok_or_else(|| Failure::Usage("--in or --metrics is required".into()))?;
        let l = load(m, path, a.electrons)?;
        let scale = resolve_scale(m, &l.h, &a.scale)?;
        let scaled = scale_spectrum(&l.h, scale, a.scale.shift)?;
        qpe_circuit(&scaled.h, a.ancilla, a.trotter, l.reference()?)?.metrics(Basis::CliffordT, a.rz_precision)?
    };
    let logical = a.logical_qubits.unwrap_or(metrics.width);
    m.resolve("resolved_logical_qubits", logical);
    Ok((metrics, logical))
}

#[derive(Serialize)]
struct ResourceReport<'a, T: Serialize> {
    model: &'a ResourceModel,
    logical_qubits: usize,
    metrics: &'a CircuitMetrics,
    #[serde(flatten)]
    body: T,
}

fn estimate_row(p: f64, e: &ResourceEstimate) -> Vec<String> {
    vec![
        num(p),
        num(e.code_distance),
        num(e.algorithmic_qubits),
        num(e.t_factory_qubits),
        num(e.total_physical_qubits),
        num(e.runtime_seconds),
    ]
}

const ESTIMATE_HEADER: [&str; 6] = [
    "p_phys",
    "code_distance",
    "algorithmic_qubits",
    "t_factory_qubits",
    "total_physical_qubits",
    "runtime_seconds",
];

fn resources(sink: &Sink, mut m: RunManifest, a: &ResourcesArgs) -> Result<(), Failure> {
    let model = model(&a.model)?;
    let (metrics, logical) = workload(&mut m, &a.workload)?;
    let e = estimate(&metrics, logical, &model, a.factories)?;
    #[derive(Serialize)]
    struct Body<'a> {
        estimate: &'a ResourceEstimate,
    }
    let report = ResourceReport {
        model: &model,
        logical_qubits: logical,
        metrics: &metrics,
        body: Body { estimate: &e },
    };
    sink.write(&m, &report, || {
        let mut t = Table::new(&ESTIMATE_HEADER);
        t.row(estimate_row(model.physical.p_phys, &e));
        t.comment("model", model)
    })
}

fn error_sweep(sink: &Sink, mut m: RunManifest, a: &ErrorSweepArgs) -> Result<(), Failure> {
    let model = model(&a.model)?;
    let (metrics, logical) = workload(&mut m, &a.workload)?;
    let points = error_rate_sweep(&metrics, logical, &model, a.factories, &a.p_list)?;
    #[derive(Serialize)]
    struct Body<'a> {
        points: &'a [qcwb_core::resources::ErrorRatePoint],
    }
    let report = ResourceReport {
        model: &model,
        logical_qubits: logical,
        metrics: &metrics,
        body: Body { points: &points },
    };
    sink.write(&m, &report, || {
        let mut t = Table::new(&ESTIMATE_HEADER);
        for p in &points {
            t.row(estimate_row(p.p_phys, &p.estimate));
        }
        t.comment("model", model)
    })
}

fn frontier(sink: &Sink, mut m: RunManifest, a: &FrontierArgs) -> Result<(), Failure> {
    let model = model(&a.model)?;
    let (metrics, logical) = workload(&mut m, &a.workload)?;
    let points = spacetime_frontier(&metrics, logical, &model, &a.factories.values())?;
    #[derive(Serialize)]
    struct Body<'a> {
        points: &'a [qcwb_core::resources::FrontierPoint],
    }
    let report = ResourceReport {
        model: &model,
        logical_qubits: logical,
        metrics: &metrics,
        body: Body { points: &points },
    };
    sink.write(&m, &report, || {
        let mut t = Table::new(&["factories", "total_physical_qubits", "runtime_seconds"]);
        for p in &points {
            t.row(vec![num(p.factories), num(p.total_physical_qubits), num(p.runtime_seconds)]);
        }
        t.comment("model", model)
    })
}
