//! TOML experiment configuration.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default)]
    pub name: Option<String>,
    pub graph: GraphSpec,
    pub time: TimeSpec,
    pub signal: SignalSpec,
    pub methods: Vec<MethodSpec>,
    pub sweep: SweepSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    ErdosRenyi { n: usize, prob: f64 },
    Path { n: usize },
    /// Edge list `source,target[,weight]`.
    File {
        path: String,
        #[serde(default)]
        index_base: usize,
        #[serde(default)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    /// Sparse combination of product atoms for a known vertex set and interval.
    Planted {
        spectrum: Vec<usize>,
        bandwidth: f64,
        center: f64,
        length: f64,
        time_atoms: usize,
        sparsity: usize,
    },
    /// `Σ_{i<K} u_i ⊗ (2 sinc(ω₀t) − sinc((ω₀−2)t) + ½ sinc((ω₀−4)t))`.
    SincMixture { k: usize, omega0: f64 },
    /// `Σ_{i<K} u_i ⊗ sin(ω₀t)/(ω₀t)`.
    Sinc { k: usize, omega0: f64 },
}

fn default_mu_rel() -> f64 {
    0.01
}
fn default_beta() -> f64 {
    0.95
}
fn default_time_atoms() -> usize {
    4
}
fn default_init_centers() -> usize {
    11
}
fn default_init_lengths() -> Vec<f64> {
    vec![0.2, 0.4, 0.6]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodSpec {
    Jecd {
        #[serde(default = "default_mu_rel")]
        mu_rel: f64,
        #[serde(default = "default_time_atoms")]
        time_atoms: usize,
        /// Fractions of the span used as candidate initial lengths.
        #[serde(default = "default_init_lengths")]
        init_lengths: Vec<f64>,
        #[serde(default = "default_init_centers")]
        init_centers: usize,
        /// Estimate priors from the training samples instead of taking the planted ones.
        #[serde(default)]
        estimate_prior: bool,
        #[serde(default = "default_beta")]
        beta_spectral: f64,
        #[serde(default = "default_beta")]
        beta_frequency: f64,
    },
    Negup {
        #[serde(default = "default_mu_rel")]
        mu_rel: f64,
        /// Fraction of the span.
        length: f64,
        #[serde(default = "default_time_atoms")]
        time_atoms: usize,
        #[serde(default = "default_beta")]
        beta_spectral: f64,
    },
    Jft {
        #[serde(default = "default_mu_rel")]
        mu_rel: f64,
        k: usize,
        l: usize,
    },
    Stvft {
        #[serde(default = "default_mu_rel")]
        mu_rel: f64,
        q: usize,
        tau0: f64,
        omega0: f64,
        rho: f64,
        n_freq: usize,
    },
    Stvwt {
        #[serde(default = "default_mu_rel")]
        mu_rel: f64,
        n_scales: usize,
        n_a: usize,
        n_b: usize,
        omega0: f64,
    },
    Gaussian {
        tau_v_grid: Vec<f64>,
        tau_t_grid: Vec<f64>,
        /// `(vertex, time)` centers, 0-based vertices.
        centers: Vec<(usize, f64)>,
        k: usize,
        bandwidth: f64,
    },
    Ecgl {
        k: usize,
        #[serde(default)]
        gamma: f64,
        #[serde(default = "one")]
        mu: f64,
        /// Trace of the estimate; `None` uses the true Laplacian's trace.
        #[serde(default)]
        trace: Option<f64>,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "one")]
        alpha_vertex: f64,
        #[serde(default = "one")]
        alpha_time: f64,
        #[serde(default = "one")]
        lambda_time: f64,
        #[serde(default)]
        tv_weight: f64,
    },
}

fn one() -> f64 {
    1.0
}
fn default_eta() -> f64 {
    1e-3
}

impl MethodSpec {
    pub fn label(&self) -> &'static str {
        match self {
            MethodSpec::Jecd { .. } => "jecd",
            MethodSpec::Negup { .. } => "negup",
            MethodSpec::Jft { .. } => "jft",
            MethodSpec::Stvft { .. } => "stvft",
            MethodSpec::Stvwt { .. } => "stvwt",
            MethodSpec::Gaussian { .. } => "gaussian",
            MethodSpec::Ecgl { .. } => "ecgl",
        }
    }

    /// Whether the method reconstructs from a sampled subset.
    pub fn uses_sampling(&self) -> bool {
        !matches!(self, MethodSpec::Gaussian { .. } | MethodSpec::Ecgl { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Empty or `inf` entries mean noiseless.
    #[serde(default)]
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub train_ratio: Vec<f64>,
    pub repetitions: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.sweep.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.sweep.train_ratio.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return bad("train ratios must lie in (0, 1)");
        }
        if self.time.points < 2 {
            return bad("time grid needs at least 2 points");
        }
        if !(self.time.end > self.time.start) {
            return bad("time grid end must exceed start");
        }
        if self.methods.is_empty() {
            return bad("no methods configured");
        }
        if self.methods.iter().any(|m| m.uses_sampling()) && self.sweep.train_ratio.is_empty() {
            return bad("sampling methods need at least one train ratio");
        }
        if let GraphSpec::ErdosRenyi { prob, .. } = self.graph {
            if !(prob > 0.0 && prob <= 1.0) {
                return bad("edge probability must lie in (0, 1]");
            }
        }
        Ok(())
    }

    /// SNR levels with noiseless represented by `None`.
    pub fn snr_levels(&self) -> Vec<Option<f64>> {
        if self.sweep.snr_db.is_empty() {
            return vec![None];
        }
        self.sweep.snr_db.iter().map(|&s| if s.is_finite() { Some(s) } else { None }).collect()
    }
}
