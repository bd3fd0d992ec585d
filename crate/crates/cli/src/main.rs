use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use vertex_time::atoms::{product_dictionary, Dictionary};
use vertex_time::ecgl::{ecgl, graph_metrics, EcglOptions};
use vertex_time::gaussian::{scale_search, ScaleGrid};
use vertex_time::graph::{Graph, SpectralBasis};
use vertex_time::harness::io::{read_edges_file, read_matrix, read_samples, write_matrix, write_table};
use vertex_time::harness::{run_experiment, stream, ExperimentConfig, GraphSpec, MethodSpec, SignalSpec, SweepSpec, TimeSpec};
use vertex_time::jecd::{
    estimate_priors, jecd_dictionary, jecd_learn, reconstruct, IntervalInit, JecdOptions, Role, SampleSet, SpectralPrior,
};
use vertex_time::operators::{product_projector, spectral_mask, vertex_mask};
use vertex_time::time_axis::{band_limit, time_limit, FrequencyBand, TimeAxis, TimeInterval};
use vertex_time::uncertainty::{feasible_region, BOUNDARY_POINTS};
use vertex_time::{Error, Result};

#[derive(Parser)]
#[command(name = "vertex-time", version, about = "Vertex-time concentration toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Feasible spread region of a vertex-time / spectral-frequency pair.
    Region(SubsetArgs),
    /// Product Slepian dictionary for the given subsets.
    Atoms {
        #[command(flatten)]
        subsets: SubsetArgs,
        #[arg(long, default_value_t = 4)]
        n_time: usize,
    },
    /// Learn a dictionary from `vertex,time,value,role` samples and reconstruct.
    Jecd(JecdArgs),
    /// Diffusion-scale search and reconstruction on the sinc-mixture model.
    Gaussian(GaussianArgs),
    /// Graph learning from an N×M signal matrix.
    Ecgl(EcglArgs),
    /// Run a TOML experiment configuration.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Edge list `source,target[,weight]`.
    #[arg(long, conflicts_with = "er")]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    index_base: usize,
    /// Erdős–Rényi graph `N,P`.
    #[arg(long)]
    er: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct TimeArgs {
    /// `start:end:points`.
    #[arg(long, allow_hyphen_values = true, default_value = "0:1:50")]
    time: String,
}

#[derive(Args, Clone)]
struct SubsetArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    time: TimeArgs,
    #[arg(long, value_delimiter = ',')]
    vertices: Vec<usize>,
    /// `center:length`.
    #[arg(long, allow_hyphen_values = true)]
    interval: String,
    #[arg(long, value_delimiter = ',')]
    spectrum: Vec<usize>,
    /// Half-width `W` of the frequency band.
    #[arg(long)]
    band: f64,
    #[arg(long, default_value_t = 0.0)]
    band_center: f64,
    #[arg(long, default_value = "run")]
    out: PathBuf,
}

#[derive(Args)]
struct JecdArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    time: TimeArgs,
    #[arg(long)]
    samples: PathBuf,
    /// Graph frequencies; estimated from the training samples when omitted.
    #[arg(long, value_delimiter = ',')]
    spectrum: Vec<usize>,
    /// Band half-width; estimated when omitted.
    #[arg(long)]
    band: Option<f64>,
    #[arg(long, default_value_t = 0.95)]
    beta_spectral: f64,
    #[arg(long, default_value_t = 0.95)]
    beta_frequency: f64,
    /// Initial `center:length`; a grid search is used when omitted.
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
    #[arg(long, default_value_t = 4)]
    time_atoms: usize,
    #[arg(long, default_value_t = 0.01)]
    mu_rel: f64,
    #[arg(long, default_value = "run")]
    out: PathBuf,
}

#[derive(Args)]
struct GaussianArgs {
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, allow_hyphen_values = true, default_value = "-2.5:2.5:300")]
    time: String,
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.1,0.01")]
    tau_v_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.1,0.01")]
    tau_t_grid: Vec<f64>,
    /// `vertex:time,...` (0-based vertices).
    #[arg(long, allow_hyphen_values = true, default_value = "35:0")]
    centers: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 10.0)]
    omega0: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-8,-6,-4,-2,0,2")]
    snr_db: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    #[arg(long, default_value = "run")]
    out: PathBuf,
}

#[derive(Args)]
struct EcglArgs {
    #[arg(long)]
    signals: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Trace of the Laplacian estimate; defaults to N.
    #[arg(long)]
    trace_p: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_vertex: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_time: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_time: f64,
    /// Ground-truth edge list for metrics.
    #[arg(long)]
    true_graph: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    index_base: usize,
    #[arg(long, default_value = "run")]
    out: PathBuf,
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let mut it = s.split([':', ',']);
    let a = it.next().and_then(|x| x.trim().parse().ok());
    let b = it.next().and_then(|x| x.trim().parse().ok());
    match (a, b, it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::Parse(format!("{what}: expected two numbers, got '{s}'"))),
    }
}

fn parse_axis(s: &str) -> Result<TimeAxis<f64>> {
    let p: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parse(format!("time: expected start:end:points, got '{s}'"));
    if p.len() != 3 {
        return Err(bad());
    }
    let start: f64 = p[0].trim().parse().map_err(|_| bad())?;
    let end: f64 = p[1].trim().parse().map_err(|_| bad())?;
    let m: usize = p[2].trim().parse().map_err(|_| bad())?;
    TimeAxis::uniform(start, end, m)
}

fn load_graph(g: &GraphArgs) -> Result<Graph<f64>> {
    match (&g.graph, &g.er) {
        (Some(path), _) => read_edges_file(path, g.index_base, None),
        (None, Some(er)) => {
            let (n, p) = parse_pair(er, "er")?;
            Graph::erdos_renyi(n as usize, p, &mut stream(g.seed, "graph/0"))
        }
        (None, None) => Err(Error::Config("either --graph or --er is required".into())),
    }
}

fn args_hash() -> String {
    let joined = std::env::args().skip(1).collect::<Vec<_>>().join("\u{1f}");
    Sha256::digest(joined.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn create(out: &Path, name: &str) -> Result<fs::File> {
    fs::create_dir_all(out)?;
    Ok(fs::File::create(out.join(name))?)
}

fn write_json(out: &Path, name: &str, v: &serde_json::Value) -> Result<()> {
    fs::create_dir_all(out)?;
    fs::write(out.join(name), serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

fn region(a: &SubsetArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let basis = SpectralBasis::of_graph(&g)?;
    let axis = parse_axis(&a.time.time)?;
    let (c, l) = parse_pair(&a.interval, "interval")?;
    let n = basis.len();
    let vt = product_projector(&vertex_mask(n, &a.vertices)?, &time_limit(&axis, &TimeInterval::new(c, l)?)?);
    let sf = product_projector(
        &spectral_mask(&basis, &a.spectrum)?,
        &band_limit(&axis, &FrequencyBand::new(a.band_center, a.band)?)?,
    );
    let r = feasible_region(&vt, &sf)?;
    let rows: Vec<Vec<String>> = r
        .boundary(BOUNDARY_POINTS)
        .into_iter()
        .map(|(x, hi, lo)| vec![x.to_string(), hi.to_string(), lo.to_string()])
        .collect();
    write_table(create(&a.out, "region.csv")?, &args_hash(), &["alpha2", "beta2_max", "beta2_min"], &rows)?;
    write_json(&a.out, "region.json", &serde_json::to_value(&r)?)?;
    println!("lambda_max = {}", r.sf_vt_sf);
    Ok(())
}

fn write_dictionary(out: &Path, d: &Dictionary<f64>) -> Result<()> {
    write_json(out, "atoms.json", &d.manifest())?;
    let g = d.grid_samples();
    let rows: Vec<Vec<String>> = (0..g.ncols())
        .map(|j| g.column(j).iter().map(|v| v.to_string()).collect())
        .collect();
    let header: Vec<String> = (0..g.nrows()).map(|i| format!("s{i}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(create(out, "atoms.csv")?, &args_hash(), &header, &rows)
}

fn atoms(a: &SubsetArgs, n_time: usize) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let basis = SpectralBasis::of_graph(&g)?;
    let axis = parse_axis(&a.time.time)?;
    let (c, l) = parse_pair(&a.interval, "interval")?;
    let d = product_dictionary(
        &basis,
        &axis,
        &a.vertices,
        &a.spectrum,
        &TimeInterval::new(c, l)?,
        &FrequencyBand::new(a.band_center, a.band)?,
        a.spectrum.len(),
        n_time,
    )?;
    write_dictionary(&a.out, &d)?;
    println!("{} atoms", d.len());
    Ok(())
}

fn jecd(a: &JecdArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let basis = SpectralBasis::of_graph(&g)?;
    let axis = parse_axis(&a.time.time)?;
    let sets = read_samples(fs::File::open(&a.samples)?)?;
    let pick = |r: Role| sets.iter().find(|s| s.role == r).cloned();
    let train = pick(Role::Train).ok_or(Error::InsufficientData)?;
    let test = pick(Role::Test).unwrap_or_else(|| SampleSet { role: Role::Test, ..train.clone() });
    let val = pick(Role::Validation).ok_or(Error::ZeroValidationEnergy)?;
    let mut prior = estimate_priors(&train, &basis, &axis, a.beta_spectral, a.beta_frequency)?;
    if !a.spectrum.is_empty() {
        prior.spectrum = a.spectrum.clone();
    }
    if let Some(w) = a.band {
        prior.band = FrequencyBand::lowpass(w)?;
    }
    let init = match &a.interval {
        Some(s) => {
            let (c, l) = parse_pair(s, "interval")?;
            IntervalInit::Fixed(TimeInterval::new(c, l)?)
        }
        None => IntervalInit::GridSearch {
            centers: 11,
            lengths: [0.2, 0.4, 0.6].iter().map(|f| f * axis.span()).collect(),
        },
    };
    let mut opts = JecdOptions::new(init, a.time_atoms);
    opts.mu_rel = a.mu_rel;
    let state = jecd_learn(&train, &basis, &axis, &prior, &opts)?;
    let dict = jecd_dictionary(&basis, &axis, &prior, &state.vertices, &state.interval(), a.time_atoms)?;
    let rec = reconstruct(&test, &val, &dict, Some(state.mu), opts.lasso)?;
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join("state.json"), state.to_json()? + "\n")?;
    write_json(&a.out, "prior.json", &prior_json(&prior))?;
    let m = axis.len();
    let rows: Vec<Vec<String>> = (0..rec.grid.len())
        .map(|i| vec![(i / m).to_string(), axis.points()[i % m].to_string(), rec.grid[i].to_string()])
        .collect();
    write_table(create(&a.out, "reconstruction.csv")?, &args_hash(), &["vertex", "time", "value"], &rows)?;
    write_json(&a.out, "metrics.json", &serde_json::json!({ "rse": rec.rse }))?;
    println!("rse = {}", rec.rse);
    Ok(())
}

fn prior_json(p: &SpectralPrior<f64>) -> serde_json::Value {
    serde_json::json!({
        "spectrum": p.spectrum,
        "band_center": p.band.center,
        "band_half_width": p.band.half_width,
        "beta_spectral": p.beta_spectral,
        "beta_frequency": p.beta_frequency,
    })
}

fn gaussian(a: &GaussianArgs) -> Result<bool> {
    let axis = parse_axis(&a.time)?;
    let mut centers = Vec::new();
    for c in a.centers.split(',') {
        let (v, t) = parse_pair(c, "centers")?;
        centers.push((v as usize, t));
    }
    let cfg = ExperimentConfig {
        seed: a.seed,
        name: Some("gaussian".into()),
        graph: GraphSpec::ErdosRenyi { n: a.n, prob: a.prob },
        time: TimeSpec { start: axis.start(), end: axis.end(), points: axis.len() },
        signal: SignalSpec::SincMixture { k: a.k, omega0: a.omega0 },
        methods: vec![MethodSpec::Gaussian {
            tau_v_grid: a.tau_v_grid.clone(),
            tau_t_grid: a.tau_t_grid.clone(),
            centers: centers.clone(),
            k: a.k,
            bandwidth: a.omega0,
        }],
        sweep: SweepSpec { snr_db: a.snr_db.clone(), train_ratio: vec![], repetitions: a.repetitions },
    };
    let table = run_experiment(&cfg)?;
    let hash = cfg.hash()?;

    let g = vertex_time::harness::build_graph(&cfg, 0)?;
    let basis = SpectralBasis::of_graph(&g)?;
    let spectrum: Vec<usize> = (0..a.k).collect();
    let ps = product_projector(&spectral_mask(&basis, &spectrum)?, &band_limit(&axis, &FrequencyBand::lowpass(a.omega0)?)?);
    let search = scale_search(&basis, &axis, &ps, &centers, &ScaleGrid::new(a.tau_v_grid.clone(), a.tau_t_grid.clone())?)?;
    let scores = search.grid.score_table.as_ref().expect("filled by search");
    let mut rows = Vec::new();
    for (i, tv) in a.tau_v_grid.iter().enumerate() {
        for (j, tt) in a.tau_t_grid.iter().enumerate() {
            rows.push(vec![tv.to_string(), tt.to_string(), scores[(i, j)].to_string()]);
        }
    }
    write_table(create(&a.out, "scales.csv")?, &hash, &["tau_v", "tau_t", "phi"], &rows)?;
    let rows: Vec<Vec<String>> = table
        .cells
        .iter()
        .filter(|c| c.metric == "rse")
        .map(|c| {
            vec![
                c.snr_db.map_or("inf".into(), |s| s.to_string()),
                c.median.to_string(),
                c.q1.to_string(),
                c.q3.to_string(),
                c.failures.to_string(),
            ]
        })
        .collect();
    write_table(create(&a.out, "rse_vs_snr.csv")?, &hash, &["snr_db", "median", "q1", "q3", "failures"], &rows)?;
    fs::write(a.out.join("raw.csv"), table.raw_csv()?)?;
    println!("selected (tau_v, tau_t) = ({}, {}) on repetition 0", search.tau_v, search.tau_t);
    Ok(!table.any_failure())
}

fn ecgl_cmd(a: &EcglArgs) -> Result<bool> {
    let y = read_matrix(fs::File::open(&a.signals)?)?;
    let n = y.nrows();
    let mut opts = EcglOptions::new(a.k, a.trace_p.unwrap_or(n as f64));
    opts.gamma = a.gamma;
    opts.mu = a.mu;
    opts.eta = a.eta;
    opts.alpha_vertex = a.alpha_vertex;
    opts.alpha_time = a.alpha_time;
    opts.lambda_time = a.lambda_time;
    let state = ecgl(&y, &opts)?;
    write_matrix(create(&a.out, "laplacian.csv")?, &state.laplacian)?;
    let mut metrics = serde_json::json!({
        "iterations": state.iterations,
        "converged": state.converged,
        "projection_stalled": state.projection_stalled,
        "total_variation": state.total_variation,
        "data_fit": state.fit_history.last(),
    });
    if let Some(path) = &a.true_graph {
        let truth = read_edges_file(path, a.index_base, Some(n))?;
        let m = graph_metrics(&truth.laplacian(), &state.laplacian, None)?;
        metrics["metrics"] = serde_json::to_value(m)?;
    }
    write_json(&a.out, "metrics.json", &metrics)?;
    println!("{}", serde_json::to_string(&metrics)?);
    Ok(!state.projection_stalled)
}

fn sweep(config: &Path, out: &Path) -> Result<bool> {
    let cfg = ExperimentConfig::from_file(config)?;
    let table = run_experiment(&cfg)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("summary.csv"), table.summary_csv()?)?;
    fs::write(out.join("raw.csv"), table.raw_csv()?)?;
    fs::write(out.join("config.toml"), cfg.to_toml()?)?;
    for (m, r, s, rep, e) in &table.failures {
        eprintln!("failed: method={m} ratio={r} snr={s:?} rep={rep}: {e}");
    }
    print!("{}", table.summary_csv()?);
    Ok(!table.any_failure())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Region(a) => region(&a).map(|_| true),
        Cmd::Atoms { subsets, n_time } => atoms(&subsets, n_time).map(|_| true),
        Cmd::Jecd(a) => jecd(&a).map(|_| true),
        Cmd::Gaussian(a) => gaussian(&a),
        Cmd::Ecgl(a) => ecgl_cmd(&a),
        Cmd::Sweep { config, out } => sweep(&config, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
