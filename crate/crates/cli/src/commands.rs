use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use pqst::bench::mse::MethodPlan;
use pqst::bench::pipeline::matrix_parts;
use pqst::bench::{
    load_fixture, mse_experiment, nmr_pipeline_sim, write_csv, Method, MseConfig, MseProblem,
    PipelineMode,
};
use pqst::channels::{depolarizing_channel, depolarizing_inverse};
use pqst::ensembles::{split_ensemble_list, UnitaryEnsemble};
use pqst::metrics::fidelity;
use pqst::operators::{expectation, rotate_to_x_structure};
use pqst::rng;
use pqst::shadow::{
    combine_pses, ensemble_pse, estimate_observable, plan_pqst, sampled_pse, x_shadow_rotated,
    Mode, ShotDistribution,
};
use pqst::state::conjugate_by_unitary;
use pqst::validation::{run_validation, ValidationOptions};
use pqst::{ActivityPattern, DensityMatrix, Observable, Operator, PartialShadowEstimator};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{parse_shots, FileConfig};
use crate::{BenchArgs, CliError, EstimateArgs, InfoArgs, ReconstructArgs, ValidateArgs};

type Res<T> = Result<T, CliError>;

struct LoadedState {
    label: String,
    state: DensityMatrix,
    x_state: bool,
}

fn looks_like_path(src: &str) -> bool {
    src.contains('/') || src.contains('\\') || src.ends_with(".json")
}

fn load_state(src: &str) -> Res<LoadedState> {
    let path = Path::new(src);
    if path.is_file() {
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| src.to_string());
        return Ok(LoadedState {
            label,
            state: DensityMatrix::load(path)?,
            x_state: false,
        });
    }
    if looks_like_path(src) {
        return Err(CliError::usage(format!("state file {src} does not exist")));
    }
    let f = load_fixture(src)?;
    let state = f
        .state
        .ok_or_else(|| CliError::usage(format!("`{src}` is an observable fixture, not a state")))?;
    Ok(LoadedState {
        label: f.name,
        state,
        x_state: f.x_state,
    })
}

/// Fixture name or a literal Pauli sum.
fn load_observable(src: &str) -> Res<(String, Observable)> {
    if let Ok(f) = load_fixture(src) {
        if let Some(o) = f.observable {
            return Ok((f.name, o));
        }
    }
    let obs: Observable = src.parse()?;
    Ok((src.trim().to_string(), obs))
}

fn required<T>(v: Option<T>, flag: &str) -> Res<T> {
    v.ok_or_else(|| CliError::usage(format!("missing --{flag}")))
}

/// Checks that an output path can be created before any work is done.
fn check_out(path: &Path) -> Res<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    match parent {
        Some(dir) if !dir.is_dir() => Err(CliError::usage(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ if path.is_dir() => Err(CliError::usage(format!(
            "{} is a directory",
            path.display()
        ))),
        _ => Ok(()),
    }
}

/// `None` for exact mode, otherwise `(shots, seed)`.
fn sampling(exact: bool, shots: Option<u64>, seed: Option<u64>) -> Res<Option<(u64, u64)>> {
    if exact {
        return Ok(None);
    }
    let shots = shots.ok_or_else(|| CliError::usage("give --exact, or --shots with --seed"))?;
    if shots == 0 {
        return Err(CliError::usage("--shots must be at least 1"));
    }
    let seed = seed.ok_or_else(|| CliError::usage("--seed is required for sampled runs"))?;
    Ok(Some((shots, seed)))
}

fn single_shots(args: Option<u64>, cfg: &FileConfig) -> Res<Option<u64>> {
    if args.is_some() {
        return Ok(args);
    }
    match cfg.shots.clone().map(|s| s.into_vec()) {
        None => Ok(None),
        Some(v) if v.len() == 1 => Ok(Some(v[0])),
        Some(_) => Err(CliError::usage(
            "`shots` in the config must be a single number here",
        )),
    }
}

fn write_report(path: &Path, report: &impl Serialize) -> Res<()> {
    let text = serde_json::to_string_pretty(report).map_err(io_err)?;
    std::fs::write(path, text + "\n")?;
    println!("report written to {}", path.display());
    Ok(())
}

fn print_matrix(m: &Operator) {
    for i in 0..m.dim() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
            .collect();
        println!("  {}", row.join("  "));
    }
}

#[derive(Serialize)]
struct ReconstructReport {
    state: String,
    reference: String,
    sets: Vec<String>,
    shots_per_set: Option<u64>,
    seed: Option<u64>,
    estimate_re: Vec<Vec<f64>>,
    estimate_im: Vec<Vec<f64>>,
    /// Set whose estimator supplied each entry.
    owner: Vec<Vec<String>>,
    trusted: Vec<Vec<bool>>,
    /// Per-entry standard errors, sampled mode only.
    stderr_re: Option<Vec<Vec<f64>>>,
    stderr_im: Option<Vec<Vec<f64>>>,
    fidelity: f64,
    fidelity_clamped_mass: f64,
}

fn owner_of(pses: &[PartialShadowEstimator], i: usize, j: usize) -> Option<usize> {
    pses.iter().position(|p| p.is_trusted(i, j))
}

pub fn reconstruct(a: ReconstructArgs, cfg: FileConfig) -> Res<()> {
    let src = required(a.state.or(cfg.state.clone()), "state")?;
    let reference_src = a.reference.or(cfg.reference.clone());
    let out = a.out.or(cfg.out.clone());
    let pipeline = a.pipeline || cfg.pipeline == Some(true);
    let sets = a.sets.or(cfg.sets.clone());
    let exact = a.exact || (a.shots.is_none() && cfg.exact == Some(true));
    let mode = sampling(exact, single_shots(a.shots, &cfg)?, a.seed.or(cfg.seed))?;
    if let Some(path) = &out {
        check_out(path)?;
    }
    let input = load_state(&src)?;
    let (reference_label, reference) = match &reference_src {
        Some(r) => {
            let l = load_state(r)?;
            (l.label, l.state)
        }
        None => (input.label.clone(), input.state.clone()),
    };
    if reference.dim() != input.state.dim() {
        return Err(CliError::usage("reference and state have different sizes"));
    }

    if pipeline {
        if sets.is_some() {
            return Err(CliError::usage("--pipeline fixes the sets; drop --sets"));
        }
        let pm = match mode {
            None => PipelineMode::Exact,
            Some((shots, seed)) => PipelineMode::Sampled { shots, seed },
        };
        let mut report = nmr_pipeline_sim(&input.state, pm)?;
        let fid = fidelity(&reference, &report.estimate)?;
        report.fidelity = fid.value;
        report.fidelity_clamped_mass = fid.clamped_mass;
        println!("pipeline  zeta-X, zeta-m:1 on {}", input.label);
        print_matrix(&report.estimate);
        println!("fidelity vs {reference_label}  {:.12}", fid.value);
        if let Some(path) = &out {
            write_report(path, &report)?;
        }
        return Ok(());
    }

    let sets = required(sets, "sets")?;
    let n = input.state.n_qubits();
    let ensembles = split_ensemble_list(&sets)
        .iter()
        .map(|s| UnitaryEnsemble::parse(n, s))
        .collect::<pqst::Result<Vec<_>>>()?;
    let pses = ensembles
        .iter()
        .enumerate()
        .map(|(idx, e)| match mode {
            None => ensemble_pse(&input.state, e),
            Some((shots, seed)) => {
                let mut r: ChaCha8Rng = rng::stream(seed, &[idx as u64]);
                sampled_pse(&input.state, e, shots, &mut r)
            }
        })
        .collect::<pqst::Result<Vec<_>>>()?;
    let estimate = combine_pses(&pses)?;
    let fid = fidelity(&reference, &estimate)?;

    let d = estimate.dim();
    let mut owner = vec![vec![String::new(); d]; d];
    let mut trusted = vec![vec![false; d]; d];
    let mut se_re = vec![vec![0.0; d]; d];
    let mut se_im = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            if let Some(k) = owner_of(&pses, i, j) {
                owner[i][j] = pses[k].ensemble.clone();
                trusted[i][j] = true;
                if let Some(err) = &pses[k].errors {
                    se_re[i][j] = err.re[i * d + j];
                    se_im[i][j] = err.im[i * d + j];
                }
            }
        }
    }
    let (estimate_re, estimate_im) = matrix_parts(&estimate);
    let report = ReconstructReport {
        state: input.label.clone(),
        reference: reference_label.clone(),
        sets: ensembles.iter().map(|e| e.name().to_string()).collect(),
        shots_per_set: mode.map(|m| m.0),
        seed: mode.map(|m| m.1),
        estimate_re,
        estimate_im,
        owner,
        trusted,
        stderr_re: mode.map(|_| se_re),
        stderr_im: mode.map(|_| se_im),
        fidelity: fid.value,
        fidelity_clamped_mass: fid.clamped_mass,
    };
    println!("sets      {}", report.sets.join(", "));
    match mode {
        None => println!("mode      exact"),
        Some((shots, seed)) => println!("mode      sampled, {shots} shots per set, seed {seed}"),
    }
    print_matrix(&estimate);
    println!("fidelity vs {reference_label}  {:.12}", fid.value);
    if fid.clamped_mass > 0.0 {
        println!("clamped negative mass  {:.3e}", fid.clamped_mass);
    }
    if let Some(path) = &out {
        write_report(path, &report)?;
    }
    Ok(())
}

fn io_err(e: serde_json::Error) -> CliError {
    CliError::numeric(e.to_string())
}

fn check_width(obs: &Observable, rho: &DensityMatrix) -> Res<()> {
    if obs.n_qubits() != rho.n_qubits() {
        return Err(CliError::usage(format!(
            "observable acts on {} qubits, state has {}",
            obs.n_qubits(),
            rho.n_qubits()
        )));
    }
    Ok(())
}

fn exact_single(rho: &DensityMatrix, e: &UnitaryEnsemble, obs: &Observable) -> Res<f64> {
    if e.is_explicit() {
        Ok(estimate_observable(obs, &[ensemble_pse(rho, e)?])?)
    } else {
        // sampled Cliffords: the exact channel is the depolarizing one
        let mean = depolarizing_inverse(&depolarizing_channel(rho.op()));
        Ok(expectation(obs, &mean)?.value)
    }
}

pub fn estimate(a: EstimateArgs, cfg: FileConfig) -> Res<()> {
    let src = required(a.state.or(cfg.state.clone()), "state")?;
    let obs_src = required(a.obs.or(cfg.obs.clone()), "obs")?;
    let method = a
        .method
        .or(cfg.method.clone())
        .unwrap_or_else(|| "pqst".into());
    let exact = a.exact || (a.shots.is_none() && cfg.exact == Some(true));
    let mode = sampling(exact, single_shots(a.shots, &cfg)?, a.seed.or(cfg.seed))?;
    let input = load_state(&src)?;
    let (obs_label, obs) = load_observable(&obs_src)?;
    check_width(&obs, &input.state)?;
    let x_prior = a.x_state || cfg.x_state == Some(true) || input.x_state;
    let rho = &input.state;
    let n = rho.n_qubits();

    let problem = MseProblem {
        state_name: input.label.clone(),
        state: rho.clone(),
        observable_name: obs_label.clone(),
        observable: obs.clone(),
        x_prior,
    };
    let (description, plan) = match method.as_str() {
        "pqst" | "pqst-auto" => {
            let planned = plan_pqst(&obs, x_prior)?;
            let names: Vec<&str> = planned.iter().map(|p| p.ensemble.name()).collect();
            (format!("pqst, direct PSE: {}", names.join(", ")), None)
        }
        "pqst-rotated" => {
            let rot = rotate_to_x_structure(&obs)?;
            (
                format!("pqst-rotated, X-shadow after U = {}", rot.label()),
                None,
            )
        }
        other => {
            let m: Method = other.parse()?;
            (m.to_string(), Some(m))
        }
    };

    let (value, stderr) = match mode {
        None => {
            let v = match method.as_str() {
                "pqst" | "pqst-auto" => {
                    let mut total = 0.0;
                    for p in plan_pqst(&obs, x_prior)? {
                        total +=
                            estimate_observable(&p.observable, &[ensemble_pse(rho, &p.ensemble)?])?;
                    }
                    total
                }
                "pqst-rotated" => x_shadow_rotated::<ChaCha8Rng>(rho, &obs, Mode::Exact)?,
                _ => exact_single(rho, &UnitaryEnsemble::parse(n, &method)?, &obs)?,
            };
            (v, None)
        }
        Some((shots, seed)) => {
            let mplan = match (method.as_str(), plan) {
                ("pqst-rotated", _) => {
                    let rot = rotate_to_x_structure(&obs)?;
                    let rotated = conjugate_by_unitary(rho, &rot.unitary)?;
                    let zx = UnitaryEnsemble::zeta_x(n)?;
                    MethodPlan {
                        parts: vec![(
                            "zeta-X".to_string(),
                            ShotDistribution::new(&rotated, &zx, &rot.rotated)?,
                        )],
                    }
                }
                (_, Some(m)) => MethodPlan::new(&problem, m)?,
                _ => MethodPlan::new(&problem, Method::Pqst)?,
            };
            let split = mplan.split(shots)?;
            let mut r: ChaCha8Rng = rng::stream(seed, &[rng::tag(&method)]);
            let (v, se) = mplan.sample_with_error(&split, &mut r);
            (v, Some(se))
        }
    };
    let truth = expectation(&obs, rho.op())?.value;
    println!("method    {description}");
    println!("estimate  {value:.12}");
    if let Some(se) = stderr {
        println!("stderr    {se:.6e}");
    }
    if let Some((shots, seed)) = mode {
        println!("shots     {shots}, seed {seed}");
    }
    println!("trace     {truth:.12}");
    Ok(())
}

pub fn bench(a: BenchArgs, cfg: FileConfig) -> Res<()> {
    let src = required(a.state.or(cfg.state.clone()), "state")?;
    let obs_src = required(a.obs.or(cfg.obs.clone()), "obs")?;
    let seed = required(a.seed.or(cfg.seed), "seed")?;
    let out = a.out.or(cfg.out.clone());
    if let Some(path) = &out {
        check_out(path)?;
    }
    let methods: Vec<Method> = a
        .methods
        .or(cfg.methods.clone())
        .unwrap_or_else(|| "pqst,pauli,clifford,mub".into())
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<pqst::Result<_>>()?;
    let mut mc = MseConfig::new(seed);
    if let Some(t) = a.trials.or(cfg.trials) {
        mc.trials = t;
    }
    if let Some(s) = &a.shots {
        mc.shots = parse_shots(s)?;
    } else if let Some(s) = cfg.shots.clone() {
        mc.shots = s.into_vec();
    }
    let input = load_state(&src)?;
    let (obs_label, obs) = load_observable(&obs_src)?;
    check_width(&obs, &input.state)?;
    let problem = MseProblem {
        state_name: input.label,
        state: input.state,
        observable_name: obs_label,
        observable: obs,
        x_prior: a.x_state || cfg.x_state == Some(true) || input.x_state,
    };
    let mut rows = Vec::new();
    for m in methods {
        rows.extend(mse_experiment(&problem, m, &mc)?);
    }
    match &out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_csv(&rows, &mut w)?;
            w.flush()?;
            eprintln!("{} rows written to {}", rows.len(), path.display());
        }
        None => write_csv(&rows, io::stdout().lock())?,
    }
    if out.is_some() {
        println!(
            "{:<9} {:>7} {:>12} {:>10} {:>8}",
            "method", "shots", "mse", "stderr", "slope"
        );
        for r in &rows {
            println!(
                "{:<9} {:>7} {:>12.4e} {:>10.2e} {:>8}",
                r.method.as_str(),
                r.shots,
                r.mse,
                r.stderr,
                r.slope_tag
            );
        }
    }
    Ok(())
}

pub fn validate(a: ValidateArgs, cfg: FileConfig) -> Res<()> {
    let mut opts = ValidationOptions::default();
    if let Some(s) = a.states.or(cfg.states) {
        opts.states = s;
    }
    if let Some(s) = a.seed.or(cfg.seed) {
        opts.seed = s;
    }
    if let Some(p) = a.p_offset.or(cfg.p_offset) {
        opts.p_offset = p;
    }
    if opts.states == 0 {
        return Err(CliError::usage("--states must be at least 1"));
    }
    let checks = run_validation(&opts)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if a.json || cfg.json == Some(true) {
        println!("{}", serde_json::to_string_pretty(&checks).map_err(io_err)?);
    } else {
        println!(
            "seed {}, {} random states per check",
            opts.seed, opts.states
        );
        for c in &checks {
            println!("{c}");
        }
        println!(
            "{} of {} checks passed",
            checks.len() - failed,
            checks.len()
        );
    }
    if failed > 0 {
        return Err(CliError::numeric(format!(
            "{failed} validation checks failed"
        )));
    }
    Ok(())
}

pub fn ensemble_info(a: InfoArgs, cfg: FileConfig) -> Res<()> {
    let n = required(a.n.or(cfg.n), "n")?;
    let name = required(a.ensemble.or(cfg.ensemble.clone()), "ensemble")?;
    let e = UnitaryEnsemble::parse(n, &name)?;
    let info = e.info();
    if a.json || cfg.json == Some(true) {
        println!("{}", serde_json::to_string_pretty(&info).map_err(io_err)?);
    } else {
        println!("{info}");
        let trusted: Vec<String> = e.trusted().iter().map(ActivityPattern::to_string).collect();
        println!("trusted    {}", trusted.join(" "));
    }
    Ok(())
}
