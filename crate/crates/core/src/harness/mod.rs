//! Monte Carlo driver: replicate generate → simulate → sample → estimate
//! and aggregate bias, standard errors and coverage per `(method, ρ)` cell.

mod report;

pub use report::{emit_report, format_sig, ReportFormat};

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dgp::{draw_errors, gen_response, DgpConfig, ErrorDist};
use crate::error::{Error, Result};
use crate::inference::{self, bootstrap_se, confidence_interval, SeVariant};
use crate::netcore::{extract_selection, load_edge_list, load_labels, row_normalize, AdjacencyMatrix, WeightMatrix};
use crate::netgen::{gen_lsm, gen_sbm, LsmConfig, SbmConfig, SbmScale};
use crate::qmle::FitOptions;
use crate::rng;
use crate::sampler::{self, SamplerMethod, SamplerSpec};

/// Share of failed replicates above which a cell is flagged unreliable.
pub const FAILURE_THRESHOLD: f64 = 0.01;

const STAGE_NETWORK: u64 = 0;
const STAGE_ERRORS: u64 = 1;
const STAGE_SAMPLE: u64 = 2;
const STAGE_BOOTSTRAP: u64 = 3;

fn default_beta() -> f64 {
    1.0
}
fn default_alpha_within() -> f64 {
    5.0
}
fn default_alpha_between() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "UPPERCASE")]
pub enum NetworkSpec {
    Sbm {
        n_nodes: usize,
        n_blocks: usize,
        #[serde(default)]
        scale: SbmScale,
    },
    Lsm {
        n_nodes: usize,
        n_blocks: usize,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default = "default_alpha_within")]
        alpha_within: f64,
        #[serde(default = "default_alpha_between")]
        alpha_between: f64,
    },
    /// Fixed observed network; cluster labels are only needed for CS.
    Edgelist {
        path: PathBuf,
        #[serde(default)]
        labels: Option<PathBuf>,
    },
}

impl NetworkSpec {
    fn name(&self) -> &'static str {
        match self {
            NetworkSpec::Sbm { .. } => "SBM",
            NetworkSpec::Lsm { .. } => "LSM",
            NetworkSpec::Edgelist { .. } => "EDGELIST",
        }
    }
}

fn default_level() -> f64 {
    0.95
}
fn default_replications() -> usize {
    500
}
fn default_ratio() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub network: NetworkSpec,
    pub rho_grid: Vec<f64>,
    pub error_dist: ErrorDist,
    /// Sampler constants; `target_n` is derived from `subsample_ratio`.
    pub sampler: SamplerSpec,
    /// Extra sampler methods run on the same networks and responses.
    #[serde(default)]
    pub methods: Vec<SamplerMethod>,
    #[serde(default = "default_ratio")]
    pub subsample_ratio: f64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub se_variant: SeVariant,
    #[serde(default)]
    pub bootstrap_b: Option<usize>,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default)]
    pub fit: FitOptions,
}

impl ExperimentConfig {
    pub fn new(network: NetworkSpec, rho_grid: Vec<f64>, error_dist: ErrorDist, method: SamplerMethod) -> Self {
        Self {
            network,
            rho_grid,
            error_dist,
            sampler: SamplerSpec::new(method, 0, 0),
            methods: Vec::new(),
            subsample_ratio: default_ratio(),
            replications: default_replications(),
            base_seed: 0,
            se_variant: SeVariant::default(),
            bootstrap_b: None,
            level: default_level(),
            fit: FitOptions::default(),
        }
    }

    /// `sampler.method` followed by `methods`, without repeats.
    pub fn all_methods(&self) -> Vec<SamplerMethod> {
        let mut out = vec![self.sampler.method];
        for &m in &self.methods {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if let Some(bad) = self.rho_grid.iter().find(|r| !(r.abs() < 1.0)) {
            return Err(Error::Config(format!("rho {bad} outside (-1, 1)")));
        }
        if !(self.subsample_ratio > 0.0 && self.subsample_ratio <= 1.0) {
            return Err(Error::Config(format!("subsample_ratio {} outside (0, 1]", self.subsample_ratio)));
        }
        if matches!(self.bootstrap_b, Some(b) if b < 2) {
            return Err(Error::Config("bootstrap_b must be >= 2".into()));
        }
        Ok(())
    }
}

/// One aggregated `(method, ρ)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCRow {
    pub network: String,
    pub n_nodes: usize,
    pub n_blocks: usize,
    pub method: SamplerMethod,
    pub rho: f64,
    pub bias: f64,
    /// Mean plug-in standard error.
    pub se_hat: f64,
    /// Standard deviation of the estimates, divisor `M`.
    pub se: f64,
    pub ecp: f64,
    /// Mean seconds spent in fit plus standard error.
    pub cpu_s: f64,
    pub n_fail: usize,
    pub n_ok: usize,
    pub unreliable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_bt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecp_bt: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub rows: Vec<MCRow>,
}

/// Per-replicate outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Replicate {
    rho_hat: f64,
    se: f64,
    covers: bool,
    cpu_s: f64,
    bootstrap: Option<(f64, bool)>,
}

struct Network {
    adj: AdjacencyMatrix,
    w: WeightMatrix,
    labels: Option<Vec<usize>>,
}

impl Network {
    fn new(adj: AdjacencyMatrix, labels: Option<Vec<usize>>) -> Self {
        let w = row_normalize(&adj);
        Self { adj, w, labels }
    }
}

fn load_fixed(spec: &NetworkSpec) -> Result<Option<Network>> {
    let NetworkSpec::Edgelist { path, labels } = spec else {
        return Ok(None);
    };
    let adj = load_edge_list(BufReader::new(File::open(path)?))?;
    let labels = match labels {
        Some(p) => Some(load_labels(BufReader::new(File::open(p)?), adj.n_nodes())?),
        None => None,
    };
    Ok(Some(Network::new(adj, labels)))
}

fn generate(spec: &NetworkSpec, seed: u64) -> Result<Network> {
    let g = match *spec {
        NetworkSpec::Sbm { n_nodes, n_blocks, scale } => {
            gen_sbm(&SbmConfig::new(n_nodes, n_blocks, seed).with_scale(scale))?
        }
        NetworkSpec::Lsm { n_nodes, n_blocks, beta, alpha_within, alpha_between } => {
            gen_lsm(&LsmConfig { n_nodes, n_blocks, beta, alpha_within, alpha_between, seed })?
        }
        NetworkSpec::Edgelist { .. } => unreachable!("edge lists are loaded once"),
    };
    Ok(Network::new(g.adjacency, Some(g.labels)))
}

fn network_size(spec: &NetworkSpec, fixed: Option<&Network>) -> (usize, usize) {
    match (spec, fixed) {
        (NetworkSpec::Sbm { n_nodes, n_blocks, .. }, _) | (NetworkSpec::Lsm { n_nodes, n_blocks, .. }, _) => {
            (*n_nodes, *n_blocks)
        }
        (NetworkSpec::Edgelist { .. }, Some(net)) => {
            let k = net.labels.as_ref().map_or(0, |l| l.iter().max().map_or(0, |&m| m + 1));
            (net.adj.n_nodes(), k)
        }
        (NetworkSpec::Edgelist { .. }, None) => (0, 0),
    }
}

/// Runs every `(method, ρ)` cell of the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MCReport> {
    cfg.validate()?;
    let fixed = load_fixed(&cfg.network)?;
    let mut rows = Vec::new();
    for rho_index in 0..cfg.rho_grid.len() {
        for method in cfg.all_methods() {
            rows.push(cell(cfg, fixed.as_ref(), method, rho_index)?);
        }
    }
    Ok(MCReport { rows })
}

/// One cell: `cfg.replications` replicates at `rho_grid[rho_index]`.
pub fn run_cell(cfg: &ExperimentConfig, method: SamplerMethod, rho_index: usize) -> Result<MCRow> {
    cfg.validate()?;
    if rho_index >= cfg.rho_grid.len() {
        return Err(Error::Config(format!("rho index {rho_index} out of range")));
    }
    let fixed = load_fixed(&cfg.network)?;
    cell(cfg, fixed.as_ref(), method, rho_index)
}

fn cell(cfg: &ExperimentConfig, fixed: Option<&Network>, method: SamplerMethod, rho_index: usize) -> Result<MCRow> {
    let rho = cfg.rho_grid[rho_index];
    let (n_nodes, n_blocks) = network_size(&cfg.network, fixed);
    let target = ((cfg.subsample_ratio * n_nodes as f64).round() as usize).max(2);
    let method_id = method as u64;
    let outcomes: Vec<Option<Replicate>> = (0..cfg.replications)
        .into_par_iter()
        .map(|m| {
            // network and errors depend on (ρ, m) only, so methods share them
            let key = |stage: u64| rng::derive_seed(cfg.base_seed, &[rho_index as u64, m as u64, stage]);
            let res = replicate(cfg, fixed, method, rho, target, key(STAGE_NETWORK), key(STAGE_ERRORS), |stage| {
                rng::derive_seed(cfg.base_seed, &[rho_index as u64, m as u64, stage, method_id])
            });
            match res {
                Ok(r) => Some(r),
                Err(e) => {
                    log::debug!("replicate {m} of {method} at rho = {rho} failed: {e}");
                    None
                }
            }
        })
        .collect();

    let ok: Vec<Replicate> = outcomes.iter().flatten().copied().collect();
    let n_fail = outcomes.len() - ok.len();
    let unreliable = n_fail as f64 / cfg.replications as f64 > FAILURE_THRESHOLD;
    if unreliable {
        log::warn!("{method} at rho = {rho}: {n_fail} of {} replicates failed", cfg.replications);
    }
    let mut row = MCRow {
        network: cfg.network.name().to_string(),
        n_nodes,
        n_blocks,
        method,
        rho,
        bias: f64::NAN,
        se_hat: f64::NAN,
        se: f64::NAN,
        ecp: f64::NAN,
        cpu_s: f64::NAN,
        n_fail,
        n_ok: ok.len(),
        unreliable,
        se_bt: None,
        ecp_bt: None,
    };
    if ok.is_empty() {
        return Ok(row);
    }
    let estimates: Vec<f64> = ok.iter().map(|r| r.rho_hat).collect();
    let mean_rho = sorted_mean(&estimates);
    row.bias = mean_rho - rho;
    row.se = sorted_mean(&estimates.iter().map(|e| (e - mean_rho).powi(2)).collect::<Vec<_>>()).sqrt();
    row.se_hat = sorted_mean(&ok.iter().map(|r| r.se).collect::<Vec<_>>());
    row.ecp = ok.iter().filter(|r| r.covers).count() as f64 / ok.len() as f64;
    row.cpu_s = sorted_mean(&ok.iter().map(|r| r.cpu_s).collect::<Vec<_>>());
    if cfg.bootstrap_b.is_some() {
        let bt: Vec<(f64, bool)> = ok.iter().filter_map(|r| r.bootstrap).collect();
        if !bt.is_empty() {
            row.se_bt = Some(sorted_mean(&bt.iter().map(|b| b.0).collect::<Vec<_>>()));
            row.ecp_bt = Some(bt.iter().filter(|b| b.1).count() as f64 / bt.len() as f64);
        }
    }
    Ok(row)
}

#[allow(clippy::too_many_arguments)]
fn replicate(
    cfg: &ExperimentConfig,
    fixed: Option<&Network>,
    method: SamplerMethod,
    rho: f64,
    target: usize,
    network_seed: u64,
    error_seed: u64,
    sample_seed: impl Fn(u64) -> u64,
) -> Result<Replicate> {
    let generated;
    let net = match fixed {
        Some(net) => net,
        None => {
            generated = generate(&cfg.network, network_seed)?;
            &generated
        }
    };
    let dgp = DgpConfig::new(rho, cfg.error_dist);
    let errors: Vec<f64> = draw_errors(cfg.error_dist, net.adj.n_nodes(), &mut rng::from_seed(error_seed));
    let y = gen_response(&net.w, &dgp, &errors)?.y;

    let mut spec = cfg.sampler.clone();
    spec.method = method;
    spec.target_n = target;
    spec.seed = sample_seed(STAGE_SAMPLE);
    if method == SamplerMethod::Cs {
        let labels = net.labels.clone().ok_or_else(|| Error::Config("CS needs cluster labels".into()))?;
        spec = spec.with_labels(labels);
    }
    let smp = sampler::sample(&net.adj, &spec)?;
    let sel = extract_selection(&net.w, &smp.nodes, false)?;
    let y1 = sel.restrict(&y);

    let t0 = Instant::now();
    let est = inference::estimate(&y1, &sel.w11, &cfg.fit, cfg.se_variant, cfg.level)?;
    let cpu_s = t0.elapsed().as_secs_f64();

    let bootstrap = match cfg.bootstrap_b {
        Some(b) => {
            let bt = bootstrap_se(&net.adj, &net.w, &y, &spec, b, sample_seed(STAGE_BOOTSTRAP), &cfg.fit)?;
            let ci = confidence_interval(est.fit.rho_hat, bt.se_bt, cfg.level)?;
            Some((bt.se_bt, ci.covers(rho)))
        }
        None => None,
    };
    Ok(Replicate { rho_hat: est.fit.rho_hat, se: est.interval.se, covers: est.interval.covers(rho), cpu_s, bootstrap })
}

/// Mean with the summation order fixed by sorting.
fn sorted_mean(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}
