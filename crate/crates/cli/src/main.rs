use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use subsar::conditions::verify_conditions;
use subsar::dgp::{self, DgpConfig, ErrorDist};
use subsar::harness::{emit_report, run_experiment, ExperimentConfig, ReportFormat};
use subsar::inference::{bootstrap_se, estimate, SeVariant};
use subsar::netcore::{
    extract_selection, load_edge_list, load_labels, load_node_list, row_normalize, write_edge_list, write_labels,
    AdjacencyMatrix, WeightMatrix,
};
use subsar::netgen::{gen_lsm, gen_sbm, LsmConfig, SbmConfig, SbmScale};
use subsar::qmle::FitOptions;
use subsar::sampler::{self, SamplerMethod, SamplerSpec};

#[derive(Parser)]
#[command(name = "subsar", version, about = "Subnetwork QMLE for spatial autoregressive models")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an SBM or LSM network as an edge list.
    Generate(GenerateArgs),
    /// Draw a subnetwork and print its node ids.
    Sample(SampleArgs),
    /// Simulate a SAR response on a network.
    Simulate(SimulateArgs),
    /// Fit the subnetwork QMLE with a plug-in confidence interval.
    Estimate(EstimateArgs),
    /// Bootstrap standard error by re-sampling the network.
    Bootstrap(BootstrapArgs),
    /// Compute the regularity-condition diagnostics.
    VerifyConditions(ConditionArgs),
    /// Run a Monte Carlo experiment from a JSON config.
    Mc(McArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Sbm,
    Lsm,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    blocks: usize,
    /// SBM probability scale: `literal`, `node-count` or a numeric factor.
    #[arg(long, default_value = "literal")]
    scale: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write cluster labels here.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct SamplerArgs {
    #[arg(long, default_value = "snow")]
    method: String,
    /// Subnetwork size.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    n_seeds: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Cluster labels, required for CS.
    #[arg(long)]
    labels: Option<PathBuf>,
}

impl SamplerArgs {
    fn spec(&self, adj: &AdjacencyMatrix, seed: u64) -> Result<SamplerSpec> {
        let method: SamplerMethod = self.method.parse()?;
        let mut spec = SamplerSpec::new(method, self.n, seed);
        spec.n_seeds = self.n_seeds;
        spec.k = self.k;
        if let Some(path) = &self.labels {
            spec = spec.with_labels(load_labels(reader(path)?, adj.n_nodes())?);
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value = "EXP")]
    dist: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// Sampled node ids; ignored with `--full`.
    #[arg(long, required_unless_present = "full")]
    s1: Option<PathBuf>,
    /// Use every node.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value = "LEMMA2")]
    variant: String,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Args)]
struct BootstrapArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long = "B", default_value_t = 20)]
    b: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ConditionArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    s1: PathBuf,
    #[arg(long)]
    rho: f64,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "csv")]
    format: String,
}

fn reader(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn load_graph(path: &Path) -> Result<(AdjacencyMatrix, WeightMatrix)> {
    let adj = load_edge_list(reader(path)?).with_context(|| format!("reading {}", path.display()))?;
    let w = row_normalize(&adj);
    Ok((adj, w))
}

fn load_response(path: &Path, n: usize) -> Result<Vec<f64>> {
    let y = dgp::read_vector(reader(path)?)?;
    if y.len() != n {
        bail!("response has {} values but the graph has {n} nodes", y.len());
    }
    Ok(y)
}

fn parse_scale(s: &str) -> Result<SbmScale> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "literal" => SbmScale::Literal,
        "node-count" | "node_count" => SbmScale::NodeCount,
        other => SbmScale::Factor(other.parse().with_context(|| format!("invalid scale {s:?}"))?),
    })
}

fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct EstimateOutput {
    rho_hat: f64,
    sigma2_hat: f64,
    se: f64,
    ci_lo: f64,
    ci_hi: f64,
    iterations: usize,
    converged: bool,
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let g = match a.model {
                Model::Sbm => gen_sbm(&SbmConfig::new(a.nodes, a.blocks, a.seed).with_scale(parse_scale(&a.scale)?))?,
                Model::Lsm => gen_lsm(&LsmConfig::new(a.nodes, a.blocks, a.seed))?,
            };
            write_edge_list(&g.adjacency, &mut *out)?;
            if let Some(path) = a.labels {
                write_labels(&g.labels, BufWriter::new(File::create(path)?))?;
            }
        }
        Command::Sample(a) => {
            let (adj, _) = load_graph(&a.graph)?;
            let smp = sampler::sample(&adj, &a.sampler.spec(&adj, a.seed)?)?;
            for i in smp.nodes {
                writeln!(out, "{i}")?;
            }
        }
        Command::Simulate(a) => {
            let (_, w) = load_graph(&a.graph)?;
            let mut cfg = DgpConfig::new(a.rho, a.dist.parse::<ErrorDist>()?);
            cfg.seed = a.seed;
            let (_, resp) = dgp::simulate(&w, &cfg)?;
            if resp.hit_cap {
                log::warn!("Neumann series truncated at the iteration cap");
            }
            dgp::write_vector(&resp.y, &mut *out)?;
        }
        Command::Estimate(a) => {
            let (adj, w) = load_graph(&a.graph)?;
            let y = load_response(&a.y, adj.n_nodes())?;
            let nodes: Vec<usize> = match (&a.s1, a.full) {
                (_, true) => (0..adj.n_nodes()).collect(),
                (Some(p), false) => load_node_list(reader(p)?)?,
                (None, false) => bail!("either --s1 or --full is required"),
            };
            let sel = extract_selection(&w, &nodes, false)?;
            let y1 = sel.restrict(&y);
            let variant: SeVariant = a.variant.parse()?;
            let est = estimate(&y1, &sel.w11, &FitOptions::default(), variant, a.level)?;
            write_json(
                out,
                &EstimateOutput {
                    rho_hat: est.fit.rho_hat,
                    sigma2_hat: est.fit.sigma2_hat,
                    se: est.interval.se,
                    ci_lo: est.interval.ci_lo,
                    ci_hi: est.interval.ci_hi,
                    iterations: est.fit.iterations,
                    converged: est.fit.converged,
                },
            )?;
        }
        Command::Bootstrap(a) => {
            let (adj, w) = load_graph(&a.graph)?;
            let y = load_response(&a.y, adj.n_nodes())?;
            let spec = a.sampler.spec(&adj, a.seed)?;
            let bt = bootstrap_se(&adj, &w, &y, &spec, a.b, a.seed, &FitOptions::default())?;
            write_json(out, &bt)?;
        }
        Command::VerifyConditions(a) => {
            let (adj, w) = load_graph(&a.graph)?;
            let nodes = load_node_list(reader(&a.s1)?)?;
            let sel = extract_selection(&w, &nodes, true)?;
            write_json(out, &verify_conditions(&adj, &w, &sel, a.rho)?)?;
        }
        Command::Mc(a) => {
            let cfg: ExperimentConfig = serde_json::from_reader(reader(&a.config)?)
                .with_context(|| format!("parsing {}", a.config.display()))?;
            let format: ReportFormat = a.format.parse()?;
            let report = run_experiment(&cfg)?;
            emit_report(&report, format, &mut *out)?;
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    run(cli, &mut *out)?;
    out.flush()?;
    Ok(())
}
