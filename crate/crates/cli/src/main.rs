//! gpw: spectra, sampling inequalities, and reconstruction experiments on
//! weighted graphs.
//!
//! Reports are JSON on stdout; `--out file.csv` additionally writes the
//! error table as CSV. All randomness is seeded, so a fixed config gives
//! byte-identical output. Exit codes: 0 success, 1 a numerical contract
//! failed, 2 usage or parse problem, 3 invalid cover, 4 bandwidth outside
//! the admissible range.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gpw_core::lattice::{
    make_cycle, make_path, run_lattice_experiment, triple_cover_fixture, LatticeKind,
    LatticeMethod, LatticeReport,
};
use gpw_core::spline::{spline_reconstruct, SplineReport};
use gpw_core::{
    random_pw_signal, rng_from_seed, verify_cover_poincare, verify_single_poincare_with, Cover,
    Error, FrameSystem, FunctionalSet, Signal, SpectralDecomposition, WeightedGraph,
};

const VERIFY_TRIALS: usize = 200;
const DEMO_TRIALS: usize = 50;

#[derive(Parser)]
#[command(
    name = "gpw",
    version,
    about = "Sampling and reconstruction of bandlimited signals on weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Indicator of each subset.
    Characteristic,
    /// Indicator scaled to unit norm.
    Normalized,
    /// Point evaluation at one vertex per subset.
    Dirac,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Characteristic => "characteristic",
            Kind::Normalized => "normalized",
            Kind::Dirac => "dirac",
        }
    }

    fn build(self, cover: &Cover) -> Result<FunctionalSet, Error> {
        match self {
            Kind::Characteristic => FunctionalSet::characteristic(cover, None),
            Kind::Normalized => FunctionalSet::normalized(cover),
            Kind::Dirac => FunctionalSet::dirac(cover, None),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Relaxed frame iteration plus the dual-frame solve.
    Frame,
    /// Variational spline interpolation at each order in --k.
    Spline,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, spectral gap, and bandlimited-space dimension.
    Spectrum {
        /// Edge-list file, or builtin `path:N` / `cycle:N`.
        #[arg(long)]
        graph: String,
        /// Bandwidth whose space dimension is reported.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the sampling inequalities over seeded random signals.
    Verify {
        #[arg(long)]
        graph: String,
        /// Cover source: JSON file or builtin `triples`. Without a cover the
        /// single-functional inequalities run on the whole graph.
        #[arg(long)]
        cover: Option<String>,
        #[arg(long, value_enum)]
        functionals: Option<Kind>,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a seeded random bandlimited signal and reconstruct it from
    /// weighted averages.
    Reconstruct {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        cover: String,
        #[arg(long, value_enum)]
        functionals: Option<Kind>,
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, value_enum)]
        method: Method,
        /// Spline orders, comma separated powers of two.
        #[arg(long, default_value = "1,2,4,8")]
        k: String,
        /// Relaxation parameter, `auto` for 2/(A+B).
        #[arg(long, default_value = "auto")]
        rho: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triple-cover reconstruction experiment on a builtin path or cycle,
    /// including the eigenvector sweep and the closed-form cross-checks.
    LatticeDemo {
        /// Builtin graph only: `path:N` or `cycle:N` with 3 | N.
        #[arg(long)]
        graph: String,
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "frame")]
        method: Method,
        #[arg(long, default_value = "1,2,4,8")]
        k: String,
        #[arg(long, default_value = "auto")]
        rho: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::EmptyEdgeList
            | Error::NegativeWeight { .. }
            | Error::SelfLoop { .. }
            | Error::ConflictingEdge { .. }
            | Error::UnknownVertex { .. }
            | Error::EdgeListParse { .. }
            | Error::ComplexParse { .. }
            | Error::SignalParse { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::NonPositiveEpsilon { .. }
            | Error::NegativeBandwidth { .. }
            | Error::InvalidRelaxation { .. }
            | Error::InvalidSplineOrder { .. }
            | Error::NotPowerOfTwo { .. }
            | Error::SignalLength { .. }
            | Error::LatticeTooSmall { .. } => 2,
            Error::CoverMissingVertices { .. }
            | Error::CoverSharedEdge { .. }
            | Error::CoverDisconnectedSubset { .. }
            | Error::CoverSubsetTooSmall { .. }
            | Error::CoverDuplicateVertex { .. }
            | Error::EmptySubset
            | Error::IndexOutOfRange { .. }
            | Error::FunctionalOutsideSubset { .. }
            | Error::FunctionalZero { .. }
            | Error::FunctionalZeroMean { .. }
            | Error::FunctionalCount { .. }
            | Error::FunctionalReassigned { .. }
            | Error::FunctionalMissing { .. }
            | Error::NotTripleSized { .. }
            | Error::DisconnectedGraph => 3,
            Error::InadmissibleBandwidth { .. } | Error::TrivialPwSpace { .. } => 4,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GPW_LOG", "warn")).init();
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    std::process::exit(i32::from(code));
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Spectrum { graph, omega, out } => cmd_spectrum(&graph, omega, out.as_deref()),
        Command::Verify {
            graph,
            cover,
            functionals,
            epsilon,
            seed,
            out,
        } => cmd_verify(
            &graph,
            cover.as_deref(),
            functionals,
            epsilon,
            seed,
            out.as_deref(),
        ),
        Command::Reconstruct {
            graph,
            cover,
            functionals,
            omega,
            epsilon,
            method,
            k,
            rho,
            tol,
            max_iter,
            seed,
            out,
        } => {
            let params = ReconstructParams {
                omega,
                epsilon,
                method,
                k_list: parse_k_list(&k)?,
                rho: parse_rho(&rho)?,
                tol,
                max_iter,
                seed,
            };
            cmd_reconstruct(&graph, &cover, functionals, &params, out.as_deref())
        }
        Command::LatticeDemo {
            graph,
            omega,
            epsilon,
            method,
            k,
            rho,
            seed,
            out,
        } => {
            let method = match method {
                Method::Frame => LatticeMethod::Frame {
                    rho: parse_rho(&rho)?,
                },
                Method::Spline => LatticeMethod::Spline {
                    k_list: parse_k_list(&k)?,
                },
            };
            cmd_lattice_demo(&graph, omega, epsilon, &method, seed, out.as_deref())
        }
    }
}

fn parse_k_list(text: &str) -> Result<Vec<usize>, Failure> {
    let ks = text
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| usage(format!("--k expects comma-separated integers, got {text:?}")))?;
    if ks.is_empty() {
        return Err(usage("--k list is empty"));
    }
    Ok(ks)
}

fn parse_rho(text: &str) -> Result<Option<f64>, Failure> {
    if text == "auto" {
        return Ok(None);
    }
    text.parse::<f64>()
        .map(Some)
        .map_err(|_| usage(format!("--rho expects a number or `auto`, got {text:?}")))
}

fn parse_builtin(spec: &str) -> Option<(LatticeKind, usize)> {
    let (kind, rest) = spec.split_once(':')?;
    let kind = match kind {
        "path" => LatticeKind::Path,
        "cycle" => LatticeKind::Cycle,
        _ => return None,
    };
    rest.parse::<usize>().ok().map(|n| (kind, n))
}

fn load_graph(spec: &str) -> Result<WeightedGraph, Failure> {
    if let Some((kind, n)) = parse_builtin(spec) {
        let g = match kind {
            LatticeKind::Path => make_path(n)?,
            LatticeKind::Cycle => make_cycle(n)?,
        };
        log::info!("built {spec} with {} vertices", g.len());
        return Ok(g);
    }
    if spec.contains(':') {
        return Err(usage(format!(
            "unknown builtin graph {spec:?}; expected path:N, cycle:N, or a file"
        )));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| usage(format!("cannot read graph file {spec:?}: {e}")))?;
    let g = WeightedGraph::from_edge_list_text(&text)?;
    log::info!("loaded {spec}: {} vertices, {} edges", g.len(), g.edge_count());
    Ok(g)
}

fn consecutive_triples(g: &WeightedGraph) -> Result<Cover, Failure> {
    let n = g.len();
    if n % 3 != 0 {
        return Err(Error::NotTripleSized { n }.into());
    }
    let subsets: Vec<Vec<usize>> = (0..n / 3)
        .map(|j| vec![3 * j, 3 * j + 1, 3 * j + 2])
        .collect();
    Ok(Cover::build(g, subsets)?)
}

/// Cover plus functionals from `triples` or a JSON file. A file may embed
/// its own functionals; combining that with --functionals is ambiguous and
/// rejected.
fn load_cover(
    g: &WeightedGraph,
    spec: &str,
    kind: Option<Kind>,
) -> Result<(Cover, FunctionalSet, &'static str), Failure> {
    if spec == "triples" {
        let cover = consecutive_triples(g)?;
        let kind = kind.unwrap_or(Kind::Characteristic);
        let fs = kind.build(&cover)?;
        return Ok((cover, fs, kind.name()));
    }
    let text =
        fs::read_to_string(spec).map_err(|e| usage(format!("cannot read cover file {spec:?}: {e}")))?;
    let cover_spec = gpw_core::CoverSpec::from_json(&text)?;
    if cover_spec.functionals.is_some() && kind.is_some() {
        return Err(usage(
            "cover file already defines functionals; drop --functionals or the file entry",
        ));
    }
    let (cover, embedded) = cover_spec.resolve(g)?;
    match kind {
        Some(k) => {
            let fs = k.build(&cover)?;
            Ok((cover, fs, k.name()))
        }
        None => Ok((cover, embedded, "file")),
    }
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>, csv: Option<String>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Failure {
        code: 1,
        message: format!("cannot serialize report: {e}"),
    })?;
    text.push('\n');
    if let Some(path) = out {
        let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let payload = match (&csv, is_csv) {
            (Some(table), true) => table.clone(),
            _ => text.clone(),
        };
        fs::write(path, payload)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    command: &'static str,
    graph: &'a str,
    n: usize,
    lambda_1: Option<f64>,
    lambda_max: f64,
    max_residual: f64,
    eigenvalues: Vec<f64>,
    omega: Option<f64>,
    pw_dimension: Option<usize>,
}

fn cmd_spectrum(graph: &str, omega: Option<f64>, out: Option<&Path>) -> Result<u8, Failure> {
    let g = load_graph(graph)?;
    let d = SpectralDecomposition::decompose(&g)?;
    let pw_dimension = match omega {
        Some(w) => Some(d.pw_space(w)?.dim()),
        None => None,
    };
    let report = SpectrumOut {
        command: "spectrum",
        graph,
        n: g.len(),
        lambda_1: d.lambda_1(),
        lambda_max: d.lambda_max(),
        max_residual: d.max_residual(),
        eigenvalues: d.eigenvalues().to_vec(),
        omega,
        pw_dimension,
    };
    emit(&report, out, None)?;
    Ok(0)
}

#[derive(Serialize)]
struct MarginRow {
    label: String,
    worst_margin: f64,
    holds: bool,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    command: &'static str,
    graph: &'a str,
    cover: Option<&'a str>,
    functionals: &'static str,
    epsilon: f64,
    seed: u64,
    trials: usize,
    margins: Vec<MarginRow>,
    all_hold: bool,
}

fn fold_margin(rows: &mut BTreeMap<String, (f64, bool)>, label: &str, margin: f64, holds: bool) {
    let entry = rows.entry(label.to_string()).or_insert((f64::INFINITY, true));
    entry.0 = entry.0.min(margin);
    entry.1 = entry.1 && holds;
}

fn cmd_verify(
    graph: &str,
    cover: Option<&str>,
    kind: Option<Kind>,
    epsilon: f64,
    seed: u64,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    if epsilon <= 0.0 {
        return Err(usage(format!("epsilon must be positive, got {epsilon}")));
    }
    let g = load_graph(graph)?;
    let d = SpectralDecomposition::decompose(&g)?;
    let mut rng = rng_from_seed(seed);
    let mut rows: BTreeMap<String, (f64, bool)> = BTreeMap::new();
    let mut all_hold = true;
    let functionals_name;

    match cover {
        None => {
            // Whole-graph functionals of the requested kind.
            let kind = kind.unwrap_or(Kind::Characteristic);
            functionals_name = kind.name();
            let n = g.len();
            let psi = match kind {
                Kind::Characteristic => Signal::ones(n),
                Kind::Normalized => {
                    Signal::ones(n).scale((1.0 / (n as f64).sqrt()).into())
                }
                Kind::Dirac => Signal::indicator(n, &[n / 2]),
            };
            for _ in 0..VERIFY_TRIALS {
                let f = gpw_core::random_signal(n, &mut rng);
                let report = verify_single_poincare_with(&g, &d, &psi, &f)?;
                all_hold = all_hold && report.holds;
                if let Some(c) = &report.kernel_form {
                    fold_margin(&mut rows, &c.label, c.margin, c.holds);
                }
                fold_margin(
                    &mut rows,
                    &report.centered.label,
                    report.centered.margin,
                    report.centered.holds,
                );
                for e in &report.one_set {
                    fold_margin(
                        &mut rows,
                        &format!("one-set(eps={})", e.epsilon),
                        e.margin,
                        e.holds,
                    );
                }
                fold_margin(
                    &mut rows,
                    &report.mean_value.label,
                    report.mean_value.margin,
                    report.mean_value.holds,
                );
            }
        }
        Some(spec) => {
            let (cov, fs, name) = load_cover(&g, spec, kind)?;
            functionals_name = name;
            for _ in 0..VERIFY_TRIALS {
                let f = gpw_core::random_signal(g.len(), &mut rng);
                let report = verify_cover_poincare(&g, &cov, &fs, &f, epsilon, None)?;
                all_hold = all_hold && report.holds;
                for c in [
                    &report.local,
                    &report.global,
                    &report.kernel_local,
                    &report.kernel_global,
                    &report.subgraph_local,
                    &report.subgraph_global,
                ] {
                    fold_margin(&mut rows, &c.label, c.margin, c.holds);
                }
            }
        }
    }

    let margins: Vec<MarginRow> = rows
        .into_iter()
        .map(|(label, (worst_margin, holds))| MarginRow {
            label,
            worst_margin,
            holds,
        })
        .collect();
    let report = VerifyOut {
        command: "verify",
        graph,
        cover,
        functionals: functionals_name,
        epsilon,
        seed,
        trials: VERIFY_TRIALS,
        margins,
        all_hold,
    };
    emit(&report, out, None)?;
    Ok(u8::from(!all_hold))
}

struct ReconstructParams {
    omega: f64,
    epsilon: f64,
    method: Method,
    k_list: Vec<usize>,
    rho: Option<f64>,
    tol: f64,
    max_iter: usize,
    seed: u64,
}

#[derive(Serialize)]
struct FrameRecOut<'a> {
    command: &'static str,
    graph: &'a str,
    cover: &'a str,
    functionals: &'static str,
    omega: f64,
    epsilon: f64,
    seed: u64,
    method: &'static str,
    dimension: usize,
    n_functionals: usize,
    lower: f64,
    upper: f64,
    gamma: f64,
    rho: f64,
    eta: f64,
    iterations: usize,
    converged: bool,
    signal_norm: f64,
    iterative_error: f64,
    dual_error: f64,
    methods_agreement: f64,
    per_iteration_errors: Vec<f64>,
    contract_ok: bool,
}

#[derive(Serialize)]
struct SplineRecOut<'a> {
    command: &'static str,
    graph: &'a str,
    cover: &'a str,
    functionals: &'static str,
    omega: f64,
    epsilon: f64,
    seed: u64,
    method: &'static str,
    omega_effective: f64,
    admissible_sup: f64,
    gamma: f64,
    signal_norm: f64,
    steps: Vec<SplineReport>,
    contract_ok: bool,
}

fn cmd_reconstruct(
    graph: &str,
    cover: &str,
    kind: Option<Kind>,
    params: &ReconstructParams,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    if params.epsilon <= 0.0 {
        return Err(usage(format!(
            "epsilon must be positive, got {}",
            params.epsilon
        )));
    }
    let g = load_graph(graph)?;
    let d = SpectralDecomposition::decompose(&g)?;
    let (cov, fs, functionals_name) = load_cover(&g, cover, kind)?;
    let constants = fs.constants(&cov);

    let mut rng = rng_from_seed(params.seed);
    let pw = d.pw_space(params.omega)?;
    let f = random_pw_signal(&pw, &mut rng);
    let samples = fs.sample(&f)?;

    match params.method {
        Method::Frame => {
            let limit = constants.admissible_sup / (1.0 + params.epsilon);
            if params.omega <= 0.0 || params.omega >= limit {
                return Err(Error::InadmissibleBandwidth {
                    omega: params.omega,
                    limit,
                }
                .into());
            }
            let frame =
                FrameSystem::build(&cov, &fs, d.pw_space(params.omega)?, params.epsilon)?;
            let (lower, upper) = frame.bounds();
            log::info!("frame bounds A = {lower:.6}, B = {upper:.6}");
            let (iterative, trace) = frame.reconstruct_iterative(
                &samples,
                params.rho,
                params.tol,
                params.max_iter,
                Some(&f),
            )?;
            let dual = frame.reconstruct_dual(&samples)?;
            let per_iteration_errors = trace.errors.clone().unwrap_or_default();
            let iterative_error = iterative.sub(&f).norm();
            let dual_error = dual.sub(&f).norm();
            let methods_agreement = iterative.sub(&dual).norm();
            let geometric = per_iteration_errors
                .iter()
                .enumerate()
                .all(|(i, err)| *err <= trace.eta.powi(i as i32 + 1) * f.norm() + 1e-9);
            let contract_ok =
                trace.converged && geometric && dual_error < 1e-8 && methods_agreement < 1e-6;
            let report = FrameRecOut {
                command: "reconstruct",
                graph,
                cover,
                functionals: functionals_name,
                omega: params.omega,
                epsilon: params.epsilon,
                seed: params.seed,
                method: "frame",
                dimension: frame.dim(),
                n_functionals: frame.n_functionals(),
                lower,
                upper,
                gamma: frame.gamma(),
                rho: trace.rho,
                eta: trace.eta,
                iterations: trace.iterations,
                converged: trace.converged,
                signal_norm: f.norm(),
                iterative_error,
                dual_error,
                methods_agreement,
                per_iteration_errors,
                contract_ok,
            };
            let mut csv = String::from("iteration,error\n");
            for (i, err) in report.per_iteration_errors.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", i + 1, err));
            }
            emit(&report, out, Some(csv))?;
            Ok(u8::from(!contract_ok))
        }
        Method::Spline => {
            if params.omega <= 0.0 || params.omega >= constants.admissible_sup {
                return Err(Error::InadmissibleBandwidth {
                    omega: params.omega,
                    limit: constants.admissible_sup,
                }
                .into());
            }
            let recon = spline_reconstruct(&fs, &d, &constants, &f, &params.k_list)?;
            let feasible = 1e-9 * (1.0 + f.norm());
            let contract_ok = recon.hypothesis_holds
                && recon.steps.iter().all(|s| {
                    s.interpolation_residual <= feasible
                        && s.bound.is_some_and(|b| s.error <= b + 1e-12)
                });
            let report = SplineRecOut {
                command: "reconstruct",
                graph,
                cover,
                functionals: functionals_name,
                omega: params.omega,
                epsilon: params.epsilon,
                seed: params.seed,
                method: "spline",
                omega_effective: recon.omega_effective,
                admissible_sup: recon.admissible_sup,
                gamma: recon.gamma,
                signal_norm: recon.norm_f,
                steps: recon.steps.iter().map(SplineReport::from_step).collect(),
                contract_ok,
            };
            let mut csv = String::from("k,error,bound\n");
            for s in &report.steps {
                let bound = s.bound.map_or(String::new(), |b| b.to_string());
                csv.push_str(&format!("{},{},{}\n", s.k, s.error_vs_truth.unwrap_or(f64::NAN), bound));
            }
            emit(&report, out, Some(csv))?;
            Ok(u8::from(!contract_ok))
        }
    }
}

#[derive(Serialize)]
struct DemoOut<'a> {
    command: &'static str,
    graph: &'a str,
    seed: u64,
    #[serde(flatten)]
    report: LatticeReport,
}

fn cmd_lattice_demo(
    graph: &str,
    omega: f64,
    epsilon: f64,
    method: &LatticeMethod,
    seed: u64,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let (kind, n) = parse_builtin(graph)
        .ok_or_else(|| usage(format!("lattice-demo needs path:N or cycle:N, got {graph:?}")))?;
    let fix = triple_cover_fixture(n, kind)?;
    let report = run_lattice_experiment(&fix, omega, epsilon, method, DEMO_TRIALS, seed)?;
    let contract_ok = report.uniqueness
        && report.worst_error < 1e-6
        && report.eigenvector_sweep.worst_error < 1e-6;
    let mut csv = String::from("trial,error\n");
    for (i, err) in report.errors.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, err));
    }
    let wrapped = DemoOut {
        command: "lattice-demo",
        graph,
        seed,
        report,
    };
    emit(&wrapped, out, Some(csv))?;
    Ok(u8::from(!contract_ok))
}
