//! Experiment orchestration: synthetic generators, seeded streams, noise, sampling, sweeps
//! and result tables.

pub mod config;
pub mod io;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::atoms::{baseline_dictionary, BaselineSpec, Dictionary};
use crate::ecgl::{ecgl, graph_metrics, EcglOptions};
use crate::error::{Error, Result};
use crate::gaussian::{project_reconstruct, scale_search, sinc, sinc_mixture, ScaleGrid};
use crate::graph::{Graph, SpectralBasis};
use crate::jecd::{
    estimate_priors, greedy_vertex_selection, jecd_dictionary, jecd_learn, reconstruct, rse, IntervalInit, JecdOptions, Role,
    Sample, SampleSet, SpectralPrior,
};
use crate::lasso::LassoOptions;
use crate::operators::{product_projector, spectral_mask};
use crate::time_axis::{band_limit, FrequencyBand, TimeAxis, TimeInterval};

pub use config::{ExperimentConfig, GraphSpec, MethodSpec, SignalSpec, SweepSpec, TimeSpec};

/// Independent generator for `label` derived from the experiment seed.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Sha256::digest(label.as_bytes());
    let mut b = [0u8; 8];
    b.copy_from_slice(&h[..8]);
    rng.set_stream(u64::from_le_bytes(b));
    rng
}

/// Adds white Gaussian noise scaled so that `10 log₁₀(‖y‖²/‖ε‖²) = snr_db` exactly.
pub fn add_noise_snr<R: Rng + ?Sized>(y: &DVector<f64>, snr_db: f64, rng: &mut R) -> Result<DVector<f64>> {
    let ny = y.norm();
    if ny == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let n = DVector::from_fn(y.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let nn = n.norm();
    if nn == 0.0 {
        return Ok(y.clone());
    }
    Ok(y + n * (ny / (nn * 10f64.powf(snr_db / 20.0))))
}

/// `round(ratio · total)` distinct sorted indices (at least one).
pub fn sample_indices<R: Rng + ?Sized>(total: usize, ratio: f64, rng: &mut R) -> Vec<usize> {
    let k = ((ratio * total as f64).round() as usize).clamp(1, total);
    let mut idx = sample(rng, total, k).into_vec();
    idx.sort_unstable();
    idx
}

/// Ground truth and everything needed to score a method on it.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub graph: Graph<f64>,
    pub basis: SpectralBasis<f64>,
    pub axis: TimeAxis<f64>,
    /// Vertex-major joint grid.
    pub truth: DVector<f64>,
    pub prior: Option<SpectralPrior<f64>>,
    pub planted: Option<Planted>,
}

#[derive(Debug, Clone)]
pub struct Planted {
    pub vertices: Vec<usize>,
    pub interval: TimeInterval<f64>,
    pub coefficients: DVector<f64>,
    pub dictionary: Dictionary<f64>,
}

impl Synthetic {
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn truth_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n(), self.axis.len(), self.truth.as_slice())
    }
}

pub fn build_graph(cfg: &ExperimentConfig, rep: usize) -> Result<Graph<f64>> {
    match &cfg.graph {
        GraphSpec::ErdosRenyi { n, prob } => Graph::erdos_renyi(*n, *prob, &mut stream(cfg.seed, &format!("graph/{rep}"))),
        GraphSpec::Path { n } => Graph::path(*n),
        GraphSpec::File { path, index_base, n } => io::read_edges_file(std::path::Path::new(path), *index_base, *n),
    }
}

/// Prior energy fractions used when planting; the learning method must use the same.
pub const PLANTED_BETA: f64 = 0.95;

/// Ground truth for repetition `rep`.
pub fn generate_synthetic(cfg: &ExperimentConfig, rep: usize) -> Result<Synthetic> {
    let graph = build_graph(cfg, rep)?;
    let basis = SpectralBasis::of_graph(&graph)?;
    let axis = TimeAxis::uniform(cfg.time.start, cfg.time.end, cfg.time.points)?;
    let (n, m) = (basis.len(), axis.len());
    let factor = |k: usize, f: &dyn Fn(f64) -> f64| -> Result<DVector<f64>> {
        if k == 0 || k > n {
            return Err(Error::RankExceeded { requested: k, available: n });
        }
        let u = basis.eigenvectors();
        Ok(DVector::from_fn(n * m, |i, _| {
            let s: f64 = (0..k).map(|c| u[(i / m, c)]).sum();
            s * f(axis.points()[i % m])
        }))
    };
    let (truth, prior, planted) = match &cfg.signal {
        SignalSpec::Planted { spectrum, bandwidth, center, length, time_atoms, sparsity } => {
            let prior = SpectralPrior {
                spectrum: spectrum.clone(),
                band: FrequencyBand::lowpass(*bandwidth)?,
                beta_spectral: PLANTED_BETA,
                beta_frequency: PLANTED_BETA,
            };
            let interval = TimeInterval::new(*center, *length)?;
            let vertices = greedy_vertex_selection(&prior, &interval, &basis, &axis)?.vertices;
            let dictionary = jecd_dictionary(&basis, &axis, &prior, &vertices, &interval, *time_atoms)?;
            if *sparsity == 0 || *sparsity > dictionary.len() {
                return Err(Error::Config(format!("sparsity must lie in 1..={}", dictionary.len())));
            }
            let mut rng = stream(cfg.seed, &format!("signal/{rep}"));
            let mut x = DVector::zeros(dictionary.len());
            for i in sample(&mut rng, dictionary.len(), *sparsity).into_vec() {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                x[i] = sign * rng.random_range(0.5..2.0);
            }
            let truth = dictionary.synthesize(&x);
            (truth, Some(prior), Some(Planted { vertices, interval, coefficients: x, dictionary }))
        }
        SignalSpec::SincMixture { k, omega0 } => (factor(*k, &|t| sinc_mixture(*omega0, t))?, None, None),
        SignalSpec::Sinc { k, omega0 } => (factor(*k, &|t| sinc(*omega0 * t))?, None, None),
    };
    Ok(Synthetic { graph, basis, axis, truth, prior, planted })
}

/// Observed samples at `indices` (values from `observed`) and validation samples elsewhere
/// (values from `truth`).
pub fn split_samples(syn: &Synthetic, observed: &DVector<f64>, indices: &[usize]) -> (SampleSet<f64>, SampleSet<f64>) {
    let m = syn.axis.len();
    let at = |i: usize, v: f64| Sample { vertex: i / m, time: syn.axis.points()[i % m], value: v };
    let mut chosen = vec![false; syn.truth.len()];
    for &i in indices {
        chosen[i] = true;
    }
    let train = indices.iter().map(|&i| at(i, observed[i])).collect();
    let val = (0..syn.truth.len()).filter(|&i| !chosen[i]).map(|i| at(i, syn.truth[i])).collect();
    (SampleSet::new(train, Role::Train), SampleSet::new(val, Role::Validation))
}

fn dictionary_rse(train: &SampleSet<f64>, val: &SampleSet<f64>, dict: &Dictionary<f64>, mu_rel: f64) -> Result<f64> {
    let d = dict.matrix_at(&train.points())?;
    let mu = mu_rel * d.tr_mul(&train.values()).amax();
    Ok(reconstruct(train, val, dict, Some(mu), LassoOptions::default())?.rse)
}

fn prior_for(syn: &Synthetic, train: &SampleSet<f64>, estimate: bool, beta_s: f64, beta_f: f64) -> Result<SpectralPrior<f64>> {
    match (&syn.prior, estimate) {
        (Some(p), false) => Ok(SpectralPrior { beta_spectral: beta_s, beta_frequency: beta_f, ..p.clone() }),
        _ => estimate_priors(train, &syn.basis, &syn.axis, beta_s, beta_f),
    }
}

/// Runs one method on one repetition; returns `(metric, value)` pairs.
pub fn run_method(
    cfg: &ExperimentConfig,
    method: &MethodSpec,
    syn: &Synthetic,
    ratio: f64,
    snr_db: Option<f64>,
    rep: usize,
) -> Result<Vec<(String, f64)>> {
    // One noise draw per repetition, rescaled for every SNR level.
    let observed = match snr_db {
        Some(s) => add_noise_snr(&syn.truth, s, &mut stream(cfg.seed, &format!("noise/{rep}")))?,
        None => syn.truth.clone(),
    };
    let axis = &syn.axis;
    let split = || {
        let idx = sample_indices(syn.truth.len(), ratio, &mut stream(cfg.seed, &format!("mask/{rep}/{ratio}")));
        split_samples(syn, &observed, &idx)
    };
    let rse_only = |v: f64| Ok(vec![("rse".to_string(), v)]);
    match method {
        MethodSpec::Jecd { mu_rel, time_atoms, init_lengths, init_centers, estimate_prior, beta_spectral, beta_frequency } => {
            let (train, val) = split();
            let prior = prior_for(syn, &train, *estimate_prior, *beta_spectral, *beta_frequency)?;
            let lengths = init_lengths.iter().map(|f| f * axis.span()).collect();
            let mut opts = JecdOptions::new(IntervalInit::GridSearch { centers: *init_centers, lengths }, *time_atoms);
            opts.mu_rel = *mu_rel;
            let state = jecd_learn(&train, &syn.basis, axis, &prior, &opts)?;
            let dict = jecd_dictionary(&syn.basis, axis, &prior, &state.vertices, &state.interval(), *time_atoms)?;
            let r = reconstruct(&train, &val, &dict, Some(state.mu), opts.lasso)?;
            Ok(vec![
                ("rse".into(), r.rse),
                ("center".into(), state.center),
                ("length".into(), state.length),
            ])
        }
        MethodSpec::Negup { mu_rel, length, time_atoms, beta_spectral } => {
            let (train, val) = split();
            let prior = prior_for(syn, &train, false, *beta_spectral, PLANTED_BETA)?;
            let spec = BaselineSpec::Negup {
                spectrum: prior.spectrum.clone(),
                band: prior.band,
                length: length * axis.span(),
                beta_spectral: *beta_spectral,
                n_time: *time_atoms,
            };
            rse_only(dictionary_rse(&train, &val, &baseline_dictionary(&spec, &syn.basis, axis)?, *mu_rel)?)
        }
        MethodSpec::Jft { mu_rel, k, l } => {
            let (train, val) = split();
            let d = baseline_dictionary(&BaselineSpec::Jft { k: *k, l: *l }, &syn.basis, axis)?;
            rse_only(dictionary_rse(&train, &val, &d, *mu_rel)?)
        }
        MethodSpec::Stvft { mu_rel, q, tau0, omega0, rho, n_freq } => {
            let (train, val) = split();
            let spec = BaselineSpec::Stvft { q: *q, tau0: *tau0, omega0: *omega0, rho: *rho, n_freq: *n_freq };
            rse_only(dictionary_rse(&train, &val, &baseline_dictionary(&spec, &syn.basis, axis)?, *mu_rel)?)
        }
        MethodSpec::Stvwt { mu_rel, n_scales, n_a, n_b, omega0 } => {
            let (train, val) = split();
            let spec = BaselineSpec::stvwt_dyadic(axis, *n_scales, *n_a, *n_b, *omega0);
            rse_only(dictionary_rse(&train, &val, &baseline_dictionary(&spec, &syn.basis, axis)?, *mu_rel)?)
        }
        MethodSpec::Gaussian { tau_v_grid, tau_t_grid, centers, k, bandwidth } => {
            let spectrum: Vec<usize> = (0..*k).collect();
            let p_sigma = product_projector(&spectral_mask(&syn.basis, &spectrum)?, &band_limit(axis, &FrequencyBand::lowpass(*bandwidth)?)?);
            let grid = ScaleGrid::new(tau_v_grid.clone(), tau_t_grid.clone())?;
            let search = scale_search(&syn.basis, axis, &p_sigma, centers, &grid)?;
            let est = project_reconstruct(&observed, &search.basis.vectors, axis)?;
            Ok(vec![
                ("rse".into(), rse(&syn.truth, &est)?),
                ("tau_v".into(), search.tau_v),
                ("tau_t".into(), search.tau_t),
            ])
        }
        MethodSpec::Ecgl { k, gamma, mu, trace, eta, alpha_vertex, alpha_time, lambda_time, tv_weight } => {
            let y = DMatrix::from_row_slice(syn.n(), axis.len(), observed.as_slice());
            let l_true = syn.graph.laplacian();
            let mut opts = EcglOptions::new(*k, trace.unwrap_or(l_true.trace()));
            opts.gamma = *gamma;
            opts.mu = *mu;
            opts.eta = *eta;
            opts.alpha_vertex = *alpha_vertex;
            opts.alpha_time = *alpha_time;
            opts.lambda_time = *lambda_time;
            opts.tv_weight = *tv_weight;
            let state = ecgl(&y, &opts)?;
            let m = graph_metrics(&l_true, &state.laplacian, None)?;
            Ok(vec![
                ("rho".into(), m.rho),
                ("eps_f".into(), m.eps_f),
                ("precision".into(), m.precision),
                ("recall".into(), m.recall),
            ])
        }
    }
}

/// Aggregated statistics of one `(method, ratio, snr, metric)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub method: String,
    pub train_ratio: f64,
    pub snr_db: Option<f64>,
    pub metric: String,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub count: usize,
    pub failures: usize,
}

/// Per-repetition value.
#[derive(Debug, Clone, PartialEq)]
pub struct RawValue {
    pub method: String,
    pub train_ratio: f64,
    pub snr_db: Option<f64>,
    pub rep: usize,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ResultsTable {
    pub config_hash: String,
    pub cells: Vec<CellSummary>,
    pub raw: Vec<RawValue>,
    /// `(method, ratio, snr, rep, message)` of every failed repetition.
    pub failures: Vec<(String, f64, Option<f64>, usize, String)>,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn snr_str(s: Option<f64>) -> String {
    s.map_or("inf".into(), |v| v.to_string())
}

impl ResultsTable {
    pub fn any_failure(&self) -> bool {
        !self.failures.is_empty()
    }

    pub fn summary_csv(&self) -> Result<String> {
        let rows: Vec<Vec<String>> = self
            .cells
            .iter()
            .map(|c| {
                vec![
                    c.method.clone(),
                    c.train_ratio.to_string(),
                    snr_str(c.snr_db),
                    c.metric.clone(),
                    c.median.to_string(),
                    c.q1.to_string(),
                    c.q3.to_string(),
                    c.count.to_string(),
                    c.failures.to_string(),
                ]
            })
            .collect();
        let mut buf = Vec::new();
        io::write_table(
            &mut buf,
            &self.config_hash,
            &["method", "train_ratio", "snr_db", "metric", "median", "q1", "q3", "count", "failures"],
            &rows,
        )?;
        Ok(String::from_utf8(buf).expect("utf-8 csv"))
    }

    pub fn raw_csv(&self) -> Result<String> {
        let rows: Vec<Vec<String>> = self
            .raw
            .iter()
            .map(|r| vec![r.method.clone(), r.train_ratio.to_string(), snr_str(r.snr_db), r.rep.to_string(), r.metric.clone(), r.value.to_string()])
            .collect();
        let mut buf = Vec::new();
        io::write_table(&mut buf, &self.config_hash, &["method", "train_ratio", "snr_db", "rep", "metric", "value"], &rows)?;
        Ok(String::from_utf8(buf).expect("utf-8 csv"))
    }

    pub fn find(&self, method: &str, ratio: f64, snr_db: Option<f64>, metric: &str) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.train_ratio == ratio && c.snr_db == snr_db && c.metric == metric)
    }
}

/// Executes every method over the sweep; repetitions run in parallel and are merged in a
/// fixed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultsTable> {
    cfg.validate()?;
    let snrs = cfg.snr_levels();
    let mut cells: Vec<(usize, f64, Option<f64>)> = Vec::new();
    for (mi, m) in cfg.methods.iter().enumerate() {
        let ratios = if m.uses_sampling() { cfg.sweep.train_ratio.clone() } else { vec![1.0] };
        for &r in &ratios {
            for &s in &snrs {
                cells.push((mi, r, s));
            }
        }
    }
    let reps = cfg.sweep.repetitions;
    let synthetic: Vec<Result<Synthetic>> = (0..reps).into_par_iter().map(|rep| generate_synthetic(cfg, rep)).collect();
    let tasks: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..reps).map(move |r| (c, r))).collect();
    let outcomes: Vec<Result<Vec<(String, f64)>>> = tasks
        .par_iter()
        .map(|&(c, rep)| {
            let (mi, ratio, snr) = cells[c];
            match &synthetic[rep] {
                Ok(syn) => run_method(cfg, &cfg.methods[mi], syn, ratio, snr, rep),
                Err(e) => Err(Error::Config(format!("signal generation failed: {e}"))),
            }
        })
        .collect();

    let mut table = ResultsTable { config_hash: cfg.hash()?, cells: Vec::new(), raw: Vec::new(), failures: Vec::new() };
    for (c, &(mi, ratio, snr)) in cells.iter().enumerate() {
        let method = cfg.methods[mi].label().to_string();
        let mut metrics: Vec<(String, Vec<f64>)> = Vec::new();
        let mut failures = 0;
        for rep in 0..reps {
            match &outcomes[c * reps + rep] {
                Ok(vals) => {
                    for (name, v) in vals {
                        if !v.is_finite() {
                            continue;
                        }
                        match metrics.iter_mut().find(|(n, _)| n == name) {
                            Some((_, list)) => list.push(*v),
                            None => metrics.push((name.clone(), vec![*v])),
                        }
                        table.raw.push(RawValue { method: method.clone(), train_ratio: ratio, snr_db: snr, rep, metric: name.clone(), value: *v });
                    }
                }
                Err(e) => {
                    failures += 1;
                    table.failures.push((method.clone(), ratio, snr, rep, e.to_string()));
                }
            }
        }
        if metrics.is_empty() {
            metrics.push(("rse".into(), Vec::new()));
        }
        for (name, mut vals) in metrics {
            vals.sort_by(f64::total_cmp);
            table.cells.push(CellSummary {
                method: method.clone(),
                train_ratio: ratio,
                snr_db: snr,
                metric: name,
                median: quantile(&vals, 0.5),
                q1: quantile(&vals, 0.25),
                q3: quantile(&vals, 0.75),
                count: vals.len(),
                failures,
            });
        }
    }
    Ok(table)
}
