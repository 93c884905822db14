//! Config-driven experiment runner behind the `spinlab` command line.
//!
//! A config is a TOML file with `[model]`, `[task]` and `[run]` tables.
//! Every task produces a JSON summary (embedding the resolved config and
//! library version) plus CSV data files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::concentration::{self, FdaPolynomial, PolynomialSpec};
use crate::ergm_stats::{self, iid_samples, sample_er, CampaignSettings};
use crate::error::{Error, Result};
use crate::glauber::{default_threshold, mixing_bound, ExactChain, GlauberEngine, LocalDynamics, ModelDynamics};
use crate::graph::Graph;
use crate::hoeffding;
use crate::models::{ColoringParams, ErgmParams, HardCoreParams, Model, PatternKind, VwErgmParams};
use crate::spin::Spin;
use crate::stats::{self, Histogram};
use crate::weakdep;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest state space certified exactly by the `certify` task.
pub const EXACT_CERTIFY_CAP: f64 = 65536.0;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Ergm {
        n: usize,
        betas: Vec<f64>,
        patterns: Vec<String>,
    },
    VwErgm {
        n: usize,
        beta1: f64,
        beta2: f64,
        p: f64,
    },
    Coloring {
        graph: String,
        k: usize,
    },
    Hardcore {
        graph: String,
        lambda: f64,
    },
    Er {
        n: usize,
        p: f64,
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Certify,
    Sample,
    MixExact,
    ConcTails,
    Clt,
    Figure1,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Certify => "certify",
            TaskKind::Sample => "sample",
            TaskKind::MixExact => "mix-exact",
            TaskKind::ConcTails => "conc-tails",
            TaskKind::Clt => "clt",
            TaskKind::Figure1 => "figure1",
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub kind: Option<TaskKind>,
    /// i.i.d. draws (`clt`, and `conc-tails` on the `er` model).
    pub samples: Option<usize>,
    pub bins: Option<usize>,
    /// Pattern for `clt`.
    pub pattern: Option<String>,
    /// Degree of the polynomial for `conc-tails`.
    pub degree: Option<usize>,
    /// Sparse coefficient file (`i_1 … i_d value` per line) for `conc-tails`.
    pub tensor: Option<String>,
    /// Values `f(x)` of the spin function, indexed by spin.
    pub spin_values: Option<Vec<f64>>,
    /// Number of tail levels reported.
    pub levels: Option<usize>,
    /// Total-variation threshold for `mix-exact`.
    pub threshold: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default = "default_steps")]
    pub steps: u64,
    #[serde(default)]
    pub burn_in: u64,
    #[serde(default = "default_thin")]
    pub thin: u64,
    pub threads: Option<usize>,
    pub out: Option<String>,
}

fn default_chains() -> usize {
    1
}
fn default_steps() -> u64 {
    100_000
}
fn default_thin() -> u64 {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            chains: default_chains(),
            steps: default_steps(),
            burn_in: 0,
            thin: default_thin(),
            threads: None,
            out: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub task: TaskConfig,
    #[serde(default)]
    pub run: RunConfig,
}

/// Command-line overrides applied on top of a config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub task: Option<TaskKind>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::parse(&text)
    }

    /// Applies overrides; a task given both in the file and on the command
    /// line must agree.
    pub fn resolve(mut self, o: &Overrides) -> Result<Self> {
        match (self.task.kind, o.task) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!(
                    "config task '{}' conflicts with command '{}'",
                    a.name(),
                    b.name()
                )))
            }
            (None, Some(b)) => self.task.kind = Some(b),
            _ => {}
        }
        if o.seed.is_some() {
            self.run.seed = o.seed;
        }
        if o.threads.is_some() {
            self.run.threads = o.threads;
        }
        if o.out.is_some() {
            self.run.out = o.out.clone();
        }
        Ok(self)
    }

    pub fn seed(&self) -> Result<u64> {
        self.run
            .seed
            .ok_or_else(|| Error::Config("run.seed is required (no nondeterministic default)".into()))
    }

    pub fn kind(&self) -> Result<TaskKind> {
        self.task
            .kind
            .ok_or_else(|| Error::Config("task.kind is missing".into()))
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.run.out.clone().unwrap_or_else(|| "out".into()))
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::InvalidParams(m) | Error::Graph(m) | Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<Model> {
        let model = match self {
            ModelConfig::Ergm { n, betas, patterns } => {
                let graphs = patterns
                    .iter()
                    .map(|p| Graph::from_spec(p))
                    .collect::<Result<Vec<_>>>()
                    .map_err(config_err)?;
                Model::Ergm(ErgmParams::new(*n, betas.clone(), graphs).map_err(config_err)?)
            }
            ModelConfig::Er { n, p } => Model::Ergm(ErgmParams::erdos_renyi(*n, *p).map_err(config_err)?),
            ModelConfig::VwErgm { n, beta1, beta2, p } => {
                Model::VwErgm(VwErgmParams::new(*n, *beta1, *beta2, *p).map_err(config_err)?)
            }
            ModelConfig::Coloring { graph, k } => {
                let g = Graph::from_spec(graph).map_err(config_err)?;
                Model::Coloring(ColoringParams::new(g, *k).map_err(config_err)?)
            }
            ModelConfig::Hardcore { graph, lambda } => {
                let g = Graph::from_spec(graph).map_err(config_err)?;
                Model::HardCore(HardCoreParams::new(g, *lambda).map_err(config_err)?)
            }
        };
        Ok(model)
    }
}

/// Problems found by [`validate`]; warnings do not block a run.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Schema and model-condition checks without running anything.
pub fn validate(text: &str, overrides: &Overrides) -> ValidationReport {
    let mut report = ValidationReport::default();
    let config = match ExperimentConfig::parse(text).and_then(|c| c.resolve(overrides)) {
        Ok(c) => c,
        Err(e) => {
            report.errors.push(e.to_string());
            return report;
        }
    };
    if let Err(e) = config.seed() {
        report.errors.push(e.to_string());
    }
    if let Err(e) = config.kind() {
        report.errors.push(e.to_string());
    }
    if config.run.chains == 0 {
        report.errors.push("run.chains must be positive".into());
    }
    if config.run.thin == 0 {
        report.errors.push("run.thin must be positive".into());
    }
    if config.run.threads == Some(0) {
        report.errors.push("run.threads must be positive".into());
    }
    let out = config.out_dir();
    if out.exists() && !out.is_dir() {
        report.errors.push(format!("output path {} is not a directory", out.display()));
    } else if let Some(meta) = out.metadata().ok().filter(|m| m.permissions().readonly()) {
        let _ = meta;
        report.errors.push(format!("output directory {} is read-only", out.display()));
    }
    match config.model.build() {
        Ok(model) => {
            let cond = model.condition();
            if !cond.holds {
                report.warnings.push(format!(
                    "weak-dependence condition fails ({}); analytic certificate unavailable",
                    cond.inequality
                ));
            }
            if let Ok(kind) = config.kind() {
                task_requirements(kind, &config, &model, &mut report);
            }
        }
        Err(e) => report.errors.push(e.to_string()),
    }
    report
}

fn task_requirements(kind: TaskKind, config: &ExperimentConfig, model: &Model, report: &mut ValidationReport) {
    let is_er = matches!(config.model, ModelConfig::Er { .. });
    match kind {
        TaskKind::Clt if !is_er => report.errors.push("task clt needs model type 'er'".into()),
        TaskKind::Figure1 => {
            let ok = matches!(model, Model::Ergm(p) if p.patterns.len() == 2
                && p.kinds() == vec![PatternKind::Edge, PatternKind::Triangle]);
            if !ok {
                report
                    .errors
                    .push("task figure1 needs an ergm with patterns [edge, triangle]".into());
            }
        }
        TaskKind::MixExact => {
            let size = model.system().state_space_size();
            if size > crate::glauber::exact::DENSE_CAP as f64 {
                report.errors.push(format!(
                    "state space {size} too large for exact mixing analysis (cap {})",
                    crate::glauber::exact::DENSE_CAP
                ));
            }
        }
        TaskKind::ConcTails => {
            let d = config.task.degree.unwrap_or(1);
            if d > 1 && config.task.tensor.is_none() {
                report.errors.push("conc-tails with degree > 1 needs task.tensor".into());
            }
        }
        _ => {}
    }
}

/// Files produced by a task, in write order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    fn push(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

fn envelope(config: &ExperimentConfig, kind: TaskKind, result: serde_json::Value) -> String {
    let v = json!({
        "spinlab_version": VERSION,
        "task": kind.name(),
        "config": config,
        "result": result,
    });
    serde_json::to_string_pretty(&v).expect("summary serializes") + "\n"
}

/// Runs the configured task on a dedicated thread pool (`run.threads`,
/// default 1). Outputs do not depend on the thread count.
pub fn run(config: &ExperimentConfig) -> Result<Artifacts> {
    config.seed()?;
    config.kind()?;
    let threads = config.run.threads.unwrap_or(1);
    if threads == 0 {
        return Err(Error::Config("run.threads must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::NumericFailure(e.to_string()))?;
    pool.install(|| run_in_current_pool(config))
}

/// Runs the task on whatever rayon pool is current (the browser build has
/// no threads to spare).
pub fn run_in_current_pool(config: &ExperimentConfig) -> Result<Artifacts> {
    let kind = config.kind()?;
    let model = config.model.build()?;
    let seed = config.seed()?;
    let mut art = Artifacts::default();
    let result = match kind {
        TaskKind::Certify => task_certify(&model)?,
        TaskKind::Sample => task_sample(config, &model, seed, &mut art)?,
        TaskKind::MixExact => task_mix_exact(config, &model, &mut art)?,
        TaskKind::ConcTails => task_conc_tails(config, &model, seed, &mut art)?,
        TaskKind::Clt => task_clt(config, seed, &mut art)?,
        TaskKind::Figure1 => task_figure1(config, &model, seed, &mut art)?,
    };
    art.files.insert(0, ("summary.json".into(), envelope(config, kind, result)));
    Ok(art)
}

fn task_certify(model: &Model) -> Result<serde_json::Value> {
    let condition = model.condition();
    let analytic = weakdep::certify_analytic(model);
    let system = model.system();
    let mut exact_json = serde_json::Value::Null;
    let mut consistency = serde_json::Value::Null;
    let mut exact_ok = false;
    if system.state_space_size() <= EXACT_CERTIFY_CAP {
        let e = system.enumerate()?;
        let beta_tilde = e.beta_tilde()?;
        match weakdep::certify_exact(&e) {
            Ok((cert, j)) => {
                exact_ok = true;
                exact_json = json!({ "certificate": cert, "beta_tilde": beta_tilde });
                if analytic.is_ok() {
                    let aj = model.analytic_interdependence().to_matrix()?;
                    consistency = json!({
                        "exact_j_dominated": j.dominated_by(&aj, 1e-12),
                        "beta_tilde_ge_alpha1": beta_tilde >= model.analytic_alpha1() - 1e-12,
                    });
                }
            }
            Err(e) => exact_json = json!({ "error": e.to_string(), "beta_tilde": beta_tilde }),
        }
    }
    if analytic.is_err() && !exact_ok {
        return Err(Error::ConditionViolated(format!(
            "no certificate: {} and the system is not exactly certifiable",
            condition.inequality
        )));
    }
    Ok(json!({
        "model": model.kind(),
        "sites": model.num_sites(),
        "condition": condition,
        "analytic": match &analytic {
            Ok(c) => serde_json::to_value(c).expect("certificate serializes"),
            Err(e) => json!({ "error": e.to_string() }),
        },
        "exact": exact_json,
        "consistency": consistency,
    }))
}

fn settings(config: &ExperimentConfig, seed: u64) -> CampaignSettings {
    CampaignSettings {
        chains: config.run.chains,
        burn_in: config.run.burn_in,
        steps: config.run.steps,
        thin: config.run.thin,
        seed,
    }
}

/// Runs Glauber chains of any model, recording the configuration every `thin` steps.
fn model_chains(model: &Model, s: &CampaignSettings) -> Result<Vec<Vec<Vec<Spin>>>> {
    use rayon::prelude::*;
    if s.chains == 0 || s.thin == 0 {
        return Err(Error::Config("run.chains and run.thin must be positive".into()));
    }
    let base = ModelDynamics::new(model)?;
    Ok((0..s.chains)
        .into_par_iter()
        .map(|k| {
            let mut engine = GlauberEngine::new(base.clone(), s.seed, k as u64);
            engine.run(s.burn_in);
            (0..s.steps / s.thin)
                .map(|_| {
                    engine.run(s.thin);
                    engine.dynamics().configuration()
                })
                .collect()
        })
        .collect())
}

fn task_sample(config: &ExperimentConfig, model: &Model, seed: u64, art: &mut Artifacts) -> Result<serde_json::Value> {
    let s = settings(config, seed);
    let mut csv = String::from("chain,record,step,sum");
    let ergm = matches!(model, Model::Ergm(_));
    if ergm {
        csv.push_str(",edges,triangles");
    }
    csv.push('\n');
    let mut per_chain = Vec::new();
    if let Model::Ergm(params) = model {
        let chains = ergm_stats::run_chains(params, &s)?;
        for (c, recs) in chains.iter().enumerate() {
            for (r, g) in recs.iter().enumerate() {
                let step = s.burn_in + (r as u64 + 1) * s.thin;
                csv.push_str(&format!("{c},{r},{step},{},{},{}\n", g.edges, g.edges, g.triangles));
            }
            let xs: Vec<f64> = recs.iter().map(|g| g.edges as f64).collect();
            per_chain.push(chain_summary(&xs));
        }
    } else {
        let chains = model_chains(model, &s)?;
        for (c, recs) in chains.iter().enumerate() {
            let xs: Vec<f64> = recs.iter().map(|x| x.iter().map(|&v| v as f64).sum()).collect();
            for (r, v) in xs.iter().enumerate() {
                let step = s.burn_in + (r as u64 + 1) * s.thin;
                csv.push_str(&format!("{c},{r},{step},{v}\n"));
            }
            per_chain.push(chain_summary(&xs));
        }
    }
    art.push("samples.csv", csv);
    Ok(json!({ "model": model.kind(), "settings": s, "chains": per_chain }))
}

fn chain_summary(xs: &[f64]) -> serde_json::Value {
    json!({
        "records": xs.len(),
        "mean_sum": stats::mean(xs),
        "var_sum": stats::variance(xs),
        "ess": stats::batch_means_ess(xs, (xs.len() as f64).sqrt() as usize),
    })
}

fn task_mix_exact(config: &ExperimentConfig, model: &Model, art: &mut Artifacts) -> Result<serde_json::Value> {
    let chain = ExactChain::from_system(&model.system())?;
    let threshold = config.task.threshold.unwrap_or_else(default_threshold);
    let tol = config.task.tol.unwrap_or(1e-6);
    let t_mix = chain.exact_mixing_time(threshold, tol)?;
    let (cert, _) = weakdep::certify_exact(chain.enumeration())?;
    let mu_star = chain.enumeration().minimal_probability();
    let bound = mixing_bound(&cert, mu_star);
    let mut csv = String::from("t,worst_tv\n");
    let horizon = (2.0 * t_mix).max(1.0);
    for k in 0..=50 {
        let t = horizon * k as f64 / 50.0;
        csv.push_str(&format!("{t},{}\n", chain.worst_tv(t)?));
    }
    art.push("mixing_curve.csv", csv);
    Ok(json!({
        "model": model.kind(),
        "states": chain.len(),
        "threshold": threshold,
        "t_mix": t_mix,
        "bound": bound,
        "bound_holds": t_mix <= bound,
        "mu_star": mu_star,
        "spectral_gap": chain.spectral_gap(),
        "certificate": cert,
    }))
}

fn task_conc_tails(config: &ExperimentConfig, model: &Model, seed: u64, art: &mut Artifacts) -> Result<serde_json::Value> {
    let sites = model.num_sites();
    let spins = model.num_spins();
    let degree = config.task.degree.unwrap_or(1);
    let spin_values = config
        .task
        .spin_values
        .clone()
        .unwrap_or_else(|| (0..spins).map(|s| s as f64).collect());
    let spec = match &config.task.tensor {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read tensor file {path}: {e}")))?;
            let entries = PolynomialSpec::parse_coordinates(&text, degree)?;
            PolynomialSpec::from_coordinates(degree, sites, &entries, spin_values)
        }
        None if degree == 1 => PolynomialSpec::new(1, sites, vec![1.0; sites], spin_values),
        None => Err(Error::Config("conc-tails with degree > 1 needs task.tensor".into())),
    }
    .map_err(config_err)?;
    let (sigma2, source) = match &config.model {
        ModelConfig::Er { p, .. } => (hoeffding::lsi_constant_er(*p)?, "product measure"),
        _ => (weakdep::certify_analytic(model)?.sigma2, "analytic certificate"),
    };
    let samples: Vec<Vec<Spin>> = match &config.model {
        ModelConfig::Er { n, p } => {
            let count = config.task.samples.unwrap_or(20_000);
            iid_samples(count, seed, |rng| sample_er(*n, *p, rng).to_config())
        }
        _ => model_chains(model, &settings(config, seed))?.into_iter().flatten().collect(),
    };
    let poly = FdaPolynomial::from_samples(spec, &samples)?;
    let values = poly.evaluate_many(&samples)?;
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let levels = concentration::tail_levels(&abs, config.task.levels.unwrap_or(100));
    let spec = poly.spec();
    let report = concentration::tail_check_with(&abs, &levels, sigma2, |t| {
        concentration::fda_tail_bound(spec, sigma2, t)
    });
    art.push("tails.csv", report.to_csv());
    let moments: Vec<serde_json::Value> = [2.0, 4.0]
        .iter()
        .map(|&p| {
            json!({
                "p": p,
                "bound": concentration::moment_bound(spec, sigma2, p),
                "measured": concentration::mc_lp(&values, p, 200, 0.95, seed).estimate,
            })
        })
        .collect();
    Ok(json!({
        "model": model.kind(),
        "degree": degree,
        "samples": samples.len(),
        "sigma2": sigma2,
        "sigma2_source": source,
        "norm_a": spec.norm2(),
        "oscillation": spec.oscillation(),
        "moment_bounds": moments,
        "violations": report.violations,
        "holds": report.holds(),
    }))
}

fn task_clt(config: &ExperimentConfig, seed: u64, art: &mut Artifacts) -> Result<serde_json::Value> {
    let ModelConfig::Er { n, p } = config.model else {
        return Err(Error::Config("task clt needs model type 'er'".into()));
    };
    let name = config.task.pattern.clone().unwrap_or_else(|| "triangle".into());
    let g = Graph::from_spec(&name).map_err(config_err)?;
    let pattern = hoeffding::pattern_analyze(&g).map_err(config_err)?;
    let samples = config.task.samples.unwrap_or(10_000);
    let pairs = hoeffding::clt_samples(&pattern, n, p, samples, seed);
    let z: Vec<f64> = pairs.iter().map(|v| v.0).collect();
    let report = hoeffding::clt_experiment(&name, &pattern, n, p, samples, seed)?;
    art.push("standardized_histogram.csv", Histogram::new(&z, config.task.bins.unwrap_or(60)).to_csv());
    Ok(json!({
        "report": report,
        "pattern_constants": {
            "aut_count": pattern.aut_count,
            "density": pattern.density,
            "modified_density": pattern.modified_density,
            "alpha": pattern.alpha,
        },
    }))
}

fn task_figure1(config: &ExperimentConfig, model: &Model, seed: u64, art: &mut Artifacts) -> Result<serde_json::Value> {
    let Model::Ergm(params) = model else {
        return Err(Error::Config("task figure1 needs an ergm".into()));
    };
    if params.kinds() != vec![PatternKind::Edge, PatternKind::Triangle] {
        return Err(Error::Config("task figure1 needs patterns [edge, triangle]".into()));
    }
    let s = settings(config, seed);
    let chains = ergm_stats::run_chains(params, &s)?;
    let out = ergm_stats::figure1_analysis(params.n, &chains, config.task.bins.unwrap_or(60), seed)?;
    art.push("hist_centered.csv", out.hist_centered.to_csv());
    art.push("hist_corrected.csv", out.hist_corrected.to_csv());
    art.push("tails_centered.csv", out.summary.tail_centered.report.to_csv());
    art.push("tails_corrected.csv", out.summary.tail_corrected.report.to_csv());
    let cert = weakdep::certify_analytic(model).ok();
    Ok(json!({ "settings": s, "summary": out.summary, "certificate": cert }))
}

/// Runs and writes artifacts to the configured output directory.
pub fn run_and_write(config: &ExperimentConfig) -> Result<PathBuf> {
    let art = run(config)?;
    let dir = config.out_dir();
    art.write_to(&dir)?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"
[model]
type = "ergm"
n = 100
betas = [-0.1, 0.05]
patterns = ["edge", "triangle"]

[task]
kind = "figure1"

[run]
seed = 7
"#;

    #[test]
    fn valid_config_has_no_problems() {
        let r = validate(FIG1, &Overrides::default());
        assert!(r.errors.is_empty() && r.warnings.is_empty(), "{r:?}");
    }

    #[test]
    fn missing_seed_is_reported() {
        let text = FIG1.replace("seed = 7", "");
        let r = validate(&text, &Overrides::default());
        assert!(r.errors.iter().any(|e| e.contains("seed")));
    }

    #[test]
    fn coloring_at_two_delta_warns() {
        let text = r#"
[model]
type = "coloring"
graph = "path:3"
k = 4
[task]
kind = "certify"
[run]
seed = 1
"#;
        let r = validate(text, &Overrides::default());
        assert!(r.is_ok());
        assert!(r.warnings.iter().any(|w| w.contains("certificate unavailable")));
    }

    #[test]
    fn conflicting_task_is_config_error() {
        let c = ExperimentConfig::parse(FIG1).unwrap();
        let o = Overrides {
            task: Some(TaskKind::Certify),
            ..Default::default()
        };
        assert!(matches!(c.resolve(&o), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = FIG1.replace("n = 100", "n = 100\nbogus = 1");
        assert!(ExperimentConfig::parse(&text).is_err());
    }
}
