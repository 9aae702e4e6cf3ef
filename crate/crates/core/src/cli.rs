//! The `gt-ergodica` command line.
//!
//! [`run`] parses arguments and renders a report without touching the
//! process, so tests can drive it directly. Exit codes: 0 success, 2 bad
//! arguments or input, 3 a well-formed request without an answer, 1 I/O.

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dashu_ratio::RBig;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::graph::{self, PathPrefix, Signature};
use crate::measure::{CentralityReport, MeasureApprox, NormalizationReport, PathSampler, ThetaMeasure};
use crate::qweights::{self, parse_rational, path_weight, qdim_product, QContext};
use crate::ratio::{
    self, chain_cover_search, chain_partition_young, validate_young_chains, young_interval,
    RatioCertificate, RatioSetSummary, RectYoungDiagram, DEFAULT_BUDGET,
};
use crate::report::{format_sig, render_float, ExactJson};
use crate::theta::{ThetaSpec, ThetaType};

pub const SCHEMA: &str = "gt-ergodica/1";

#[derive(Parser, Debug)]
#[command(
    name = "gt-ergodica",
    version,
    about = "q-central measures on the Gelfand-Tsetlin graph",
    long_about = "Exact q-dimensions, cylinder masses of the extreme q-central measures P^theta, \
                  chain partitions of Young intervals, ratio-set certificates and type \
                  classification. Reports are JSON (schema gt-ergodica/1) or CSV."
)]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Deformation parameter, a rational in (0,1) such as 1/2
    #[arg(long, global = true, default_value = "1/2")]
    pub q: String,
    /// Relative tolerance of the depth-doubling rule (rational or 1e-9 style)
    #[arg(long, global = true, default_value = "1e-9")]
    pub eps: String,
    /// Largest depth m at which limits are evaluated
    #[arg(long, global = true, default_value_t = 64)]
    pub depth_cap: usize,
    /// Seed for the sampler
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file, or - for standard output
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    /// Report format (json by default, csv for sample)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weyl dimension, path count and q-dimension of a signature
    Dims {
        /// Signature such as 2,1,0
        #[arg(long, allow_hyphen_values = true)]
        sig: String,
    },
    /// Type of the factor attached to theta (I_1, I_inf or III_q2)
    Classify {
        /// Parameter, e.g. 'prefix=0;tail=const:1' or 'prefix=;tail=affine:start=1,step=1'
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Attach atom masses (bounded theta) or a ratio certificate digest (unbounded theta)
        #[arg(long)]
        evidence: bool,
    },
    /// Cylinder mass P^theta(C_alpha)
    Measure {
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Path from the root, vertices separated by ';', e.g. '(1);(1,0)'
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        /// Also run the q-centrality and normalization checks at the path's level
        #[arg(long)]
        check: bool,
    },
    /// Ratio certificate for one cylinder, or a summary over all cylinders up to a level
    RatioSet {
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Path from the root; without it every supported cylinder up to --level-cap is certified
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Horizon level L (default: smallest L > N+1 with theta_L > lambda_1)
        #[arg(long)]
        horizon: Option<usize>,
        /// Highest cylinder level in the summary
        #[arg(long, default_value_t = 2)]
        level_cap: usize,
        /// Added to the default horizon in the summary
        #[arg(long, default_value_t = 0)]
        l_extra: usize,
        /// Depth used to enumerate supported endpoints in the summary (default: level cap + 2)
        #[arg(long)]
        cylinder_probe: Option<usize>,
    },
    /// Chain partition of the Young interval above lam in a k x l rectangle
    Partition {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        l: usize,
        /// Lower diagram, l entries ending in 0 (default: all zeros)
        #[arg(long, allow_hyphen_values = true)]
        lam: Option<String>,
    },
    /// Sample paths from P^theta and compare frequencies with exact masses
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Path length
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Number of paths
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Leave the sampled paths out of the report
        #[arg(long)]
        no_paths: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dims { .. } => "dims",
            Command::Classify { .. } => "classify",
            Command::Measure { .. } => "measure",
            Command::RatioSet { .. } => "ratio-set",
            Command::Partition { .. } => "partition",
            Command::Sample { .. } => "sample",
        }
    }
}

/// Validated global options.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub ctx: QContext,
    pub eps: RBig,
    pub depth_cap: usize,
    pub seed: u64,
    pub output: String,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_args(a: &ConfigArgs) -> Result<Self> {
        let ctx: QContext = a.q.parse()?;
        let eps = parse_rational(&a.eps)?;
        if eps <= RBig::ZERO {
            return Err(Error::Parse(format!("eps must be positive, got {}", a.eps)));
        }
        if a.depth_cap < 2 {
            return Err(Error::Parse(format!("depth cap must be at least 2, got {}", a.depth_cap)));
        }
        Ok(RunConfig {
            ctx,
            eps,
            depth_cap: a.depth_cap,
            seed: a.seed,
            output: a.output.clone(),
            format: a.format,
        })
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// What a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: String) -> Self {
        Outcome { code, stdout: String::new(), stderr: msg }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => 3,
        Error::Parse(_) | Error::Contract(_) => 2,
    }
}

/// Parses `args` (program name first) and runs the command. With
/// `--output FILE` the report goes to the file and `stdout` stays empty.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome::fail(code, text)
            };
        }
    };
    let cfg = match RunConfig::from_args(&cli.config) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(exit_code(&e), format!("error: {e}\n")),
    };
    let text = match dispatch(&cli.command, &cfg) {
        Ok(t) => t,
        Err(e) => return Outcome::fail(exit_code(&e), format!("error: {e}\n")),
    };
    if cfg.output == "-" {
        Outcome::ok(text)
    } else {
        match std::fs::write(&cfg.output, text) {
            Ok(()) => Outcome::ok(String::new()),
            Err(e) => Outcome::fail(1, format!("error: cannot write {}: {e}\n", cfg.output)),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    report: T,
}

fn json<T: Serialize>(command: &str, report: T) -> Result<String> {
    let env = Envelope { schema: SCHEMA, command, report };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| Error::Contract(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_table<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Contract(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|x| x.as_ref())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Contract(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<String> {
    let name = cmd.name();
    match cmd {
        Command::Dims { sig } => {
            let r = dims(sig, cfg)?;
            match cfg.format_or(Format::Json) {
                Format::Json => json(name, r),
                Format::Csv => csv_table(
                    &["signature", "level", "weyl_dim", "path_count", "qdim_exact", "qdim_float"],
                    &[vec![
                        r.signature.to_string(),
                        r.level.to_string(),
                        r.weyl_dim.clone(),
                        r.path_count.clone(),
                        r.qdim.exact.clone(),
                        r.qdim.float.clone(),
                    ]],
                ),
            }
        }
        Command::Classify { theta, evidence } => {
            let r = classify(theta, *evidence, cfg)?;
            match cfg.format_or(Format::Json) {
                Format::Json => json(name, r),
                Format::Csv => csv_table(&["theta", "type"], &[vec![r.theta.to_string(), r.kind.to_string()]]),
            }
        }
        Command::Measure { theta, path, check } => {
            let r = measure(theta, path, *check, cfg)?;
            match cfg.format_or(Format::Json) {
                Format::Json => json(name, r),
                Format::Csv => {
                    let m = &r.mass;
                    csv_table(
                        &["theta", "path", "mass_exact", "mass_float", "depth", "eps_achieved", "converged"],
                        &[vec![
                            m.theta.to_string(),
                            r.path.to_string(),
                            m.value.to_string(),
                            render_float(&m.value),
                            m.depth.to_string(),
                            m.eps_achieved.as_ref().map(render_float).unwrap_or_default(),
                            m.converged.to_string(),
                        ]],
                    )
                }
            }
        }
        Command::RatioSet { theta, alpha, horizon, level_cap, l_extra, cylinder_probe } => {
            let theta: ThetaSpec = theta.parse()?;
            let m = ThetaMeasure::new(theta, cfg.ctx.clone());
            match alpha {
                Some(a) => {
                    let alpha: PathPrefix = a.parse()?;
                    if alpha.is_empty() {
                        return Err(Error::Parse("alpha must have at least one step".into()));
                    }
                    let horizon = match horizon {
                        Some(h) => *h,
                        None => ratio::default_horizon(m.theta(), alpha.end())?,
                    };
                    let c = ratio::ratio_certificate(&m, &alpha, horizon, &cfg.eps, cfg.depth_cap)?;
                    match cfg.format_or(Format::Json) {
                        Format::Json => json(name, c),
                        Format::Csv => certificate_csv(&c),
                    }
                }
                None => {
                    let probe = cylinder_probe.unwrap_or(level_cap + 2);
                    let s = ratio::ratio_set_summary(&m, *level_cap, *l_extra, probe, &cfg.eps, cfg.depth_cap)?;
                    match cfg.format_or(Format::Json) {
                        Format::Json => json(name, s),
                        Format::Csv => summary_csv(&s),
                    }
                }
            }
        }
        Command::Partition { k, l, lam } => {
            let r = partition(*k, *l, lam.as_deref())?;
            match cfg.format_or(Format::Json) {
                Format::Json => json(name, r),
                Format::Csv => {
                    let mut rows = Vec::new();
                    for (i, c) in r.partition.chains().iter().enumerate() {
                        for (j, d) in c.iter().enumerate() {
                            rows.push(vec![i.to_string(), j.to_string(), d.to_string()]);
                        }
                    }
                    csv_table(&["chain", "position", "diagram"], &rows)
                }
            }
        }
        Command::Sample { theta, depth, count, no_paths } => {
            let r = sample(theta, *depth, *count, !*no_paths, cfg)?;
            match cfg.format_or(Format::Csv) {
                Format::Json => json(name, r),
                Format::Csv => sample_csv(&r),
            }
        }
    }
}

#[derive(Serialize)]
pub struct DimsReport {
    pub signature: Signature,
    pub level: usize,
    /// Decimal string, since it can exceed 64 bits.
    pub weyl_dim: String,
    pub path_count: String,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub q: RBig,
    pub qdim: ExactJson,
}

pub fn dims(sig: &str, cfg: &RunConfig) -> Result<DimsReport> {
    let lam: Signature = sig.parse()?;
    let weyl = graph::weyl_dim(&lam);
    let count = if lam.is_root() {
        RBig::ONE
    } else {
        qweights::qdim_between(&QContext::classical(), &Signature::root(), &lam)?.into_value()
    };
    let qd = qdim_product(&cfg.ctx, &lam);
    Ok(DimsReport {
        level: lam.level(),
        weyl_dim: weyl.to_string(),
        path_count: count.to_string(),
        q: cfg.ctx.q().clone(),
        qdim: ExactJson::from(qd.value()),
        signature: lam,
    })
}

#[derive(Serialize)]
pub struct AtomEvidence {
    pub index: usize,
    pub path: PathPrefix,
    pub mass: MeasureApprox,
}

#[derive(Serialize)]
pub struct DimGrowth {
    pub n: usize,
    pub weyl_dim: String,
}

#[derive(Serialize)]
pub struct CertificateDigest {
    pub alpha: PathPrefix,
    pub horizon: usize,
    pub pass: bool,
    pub margin: ExactJson,
    pub e_gamma_mass: ExactJson,
    pub half_mass: ExactJson,
    pub rn_exponents_on_e: Vec<i64>,
    pub chains: usize,
    pub unchained: usize,
    pub ratio: String,
}

#[derive(Serialize, Default)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom: Option<AtomEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_growth: Option<Vec<DimGrowth>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_strictly_increasing: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_certificate: Option<CertificateDigest>,
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub theta: ThetaSpec,
    #[serde(rename = "type")]
    pub kind: ThetaType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
}

const DIM_GROWTH_N: usize = 30;

pub fn classify(theta: &str, evidence: bool, cfg: &RunConfig) -> Result<ClassifyReport> {
    let theta: ThetaSpec = theta.parse()?;
    let kind = theta.classify();
    let evidence = if evidence {
        Some(classify_evidence(&theta, kind, cfg)?)
    } else {
        None
    };
    Ok(ClassifyReport { theta, kind, evidence })
}

fn classify_evidence(theta: &ThetaSpec, kind: ThetaType, cfg: &RunConfig) -> Result<Evidence> {
    let m = ThetaMeasure::new(theta.clone(), cfg.ctx.clone());
    let mut ev = Evidence::default();
    match theta.stable_index() {
        Some(index) => {
            ev.atom = Some(AtomEvidence {
                index,
                path: theta.distinguished_path(index),
                mass: m.atom_mass(&cfg.eps, cfg.depth_cap)?,
            });
            if kind == ThetaType::IInf {
                let dims = crate::measure::dim_growth_evidence(theta, DIM_GROWTH_N)?;
                ev.dim_strictly_increasing = Some(dims.windows(2).skip(1).all(|w| w[0] < w[1]));
                ev.dim_growth = Some(
                    dims.iter()
                        .enumerate()
                        .map(|(i, d)| DimGrowth { n: i + 1, weyl_dim: d.to_string() })
                        .collect(),
                );
            }
        }
        None => {
            let alpha = theta.distinguished_path(1);
            let horizon = ratio::default_horizon(theta, alpha.end())?;
            let c = ratio::ratio_certificate(&m, &alpha, horizon, &cfg.eps, cfg.depth_cap)?;
            ev.ratio_certificate = Some(CertificateDigest {
                alpha: c.alpha.clone(),
                horizon: c.horizon,
                pass: c.pass,
                margin: ExactJson::from(&c.margin),
                e_gamma_mass: ExactJson::from(&c.e_gamma_mass),
                half_mass: ExactJson::from(&c.half_mass),
                rn_exponents_on_e: c.rn_exponents_on_e.iter().copied().collect(),
                chains: c.chains,
                unchained: c.unchained.len(),
                ratio: c.ratio.clone(),
            });
        }
    }
    Ok(ev)
}

#[derive(Serialize)]
pub struct MeasureReport {
    pub path: PathPrefix,
    pub weight: ExactJson,
    pub mass: MeasureApprox,
    /// Set when the mass vanishes: zero is only certain at the depth shown.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centrality: Option<CentralityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationReport>,
}

pub fn measure(theta: &str, path: &str, check: bool, cfg: &RunConfig) -> Result<MeasureReport> {
    let theta: ThetaSpec = theta.parse()?;
    let alpha: PathPrefix = path.parse()?;
    if cfg.depth_cap <= alpha.len() {
        return Err(Error::Parse(format!(
            "depth cap {} must exceed the path length {}",
            cfg.depth_cap,
            alpha.len()
        )));
    }
    let m = ThetaMeasure::new(theta, cfg.ctx.clone());
    let mass = m.cylinder_mass(&alpha, &cfg.eps, cfg.depth_cap)?;
    let qualifier = mass.is_zero().then(|| format!("0 (at depth {})", mass.depth));
    let (centrality, normalization) = if check && !alpha.is_empty() {
        let level = alpha.len();
        (
            Some(m.q_centrality_check(level, &cfg.eps, cfg.depth_cap)?),
            Some(m.normalization_check(level, &cfg.eps, cfg.depth_cap)?),
        )
    } else {
        (None, None)
    };
    Ok(MeasureReport {
        weight: ExactJson::from(path_weight(&cfg.ctx, &alpha).value()),
        path: alpha,
        mass,
        qualifier,
        centrality,
        normalization,
    })
}

fn certificate_csv(c: &RatioCertificate) -> Result<String> {
    csv_table(
        &[
            "alpha", "horizon", "working_depth", "probe_depth", "chains", "unchained", "e_gamma_mass",
            "half_mass", "margin", "coverage_deficit", "rn_is_q2", "preserves_cylinder", "pass",
        ],
        &[vec![
            c.alpha.to_string(),
            c.horizon.to_string(),
            c.working_depth.to_string(),
            c.probe_depth.to_string(),
            c.chains.to_string(),
            c.unchained.len().to_string(),
            render_float(&c.e_gamma_mass),
            render_float(&c.half_mass),
            render_float(&c.margin),
            render_float(&c.coverage_deficit),
            c.rn_is_q2.to_string(),
            c.preserves_cylinder.to_string(),
            c.pass.to_string(),
        ]],
    )
}

fn summary_csv(s: &RatioSetSummary) -> Result<String> {
    let rows: Vec<Vec<String>> = s
        .entries
        .iter()
        .map(|e| {
            vec![
                e.alpha.to_string(),
                e.horizon.to_string(),
                e.pass.to_string(),
                e.margin.to_string(),
                render_float(&e.margin),
                render_float(&e.relative_margin),
                e.chains.to_string(),
                e.unchained.to_string(),
            ]
        })
        .collect();
    csv_table(
        &["alpha", "horizon", "pass", "margin_exact", "margin_float", "relative_margin", "chains", "unchained"],
        &rows,
    )
}

#[derive(Serialize)]
pub struct PartitionReport {
    pub k: i64,
    pub l: usize,
    pub lambda: RectYoungDiagram,
    pub interval_size: usize,
    pub partition: crate::chains::ChainPartition<RectYoungDiagram>,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
    /// Whether the exhaustive search also finds a partition.
    pub search_feasible: Option<bool>,
}

pub fn partition(k: i64, l: usize, lam: Option<&str>) -> Result<PartitionReport> {
    let entries = match lam {
        Some(s) => s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad diagram entry {t:?}"))))
            .collect::<Result<Vec<_>>>()?,
        None => vec![0; l],
    };
    if entries.len() != l {
        return Err(Error::Parse(format!("lam has {} entries, expected l = {l}", entries.len())));
    }
    let lambda = RectYoungDiagram::new(k, entries).map_err(to_parse)?;
    let p = chain_partition_young(k, l, &lambda).map_err(to_parse)?;
    let check = validate_young_chains(&p);
    let universe = young_interval(k, l, &lambda)?;
    let search = chain_cover_search(&universe, |a, b| a.covered_by(b), DEFAULT_BUDGET).is_some();
    Ok(PartitionReport {
        k,
        l,
        interval_size: universe.len(),
        lambda,
        valid: check.is_ok(),
        violation: check.err(),
        search_feasible: Some(search),
        partition: p,
    })
}

fn to_parse(e: Error) -> Error {
    match e {
        Error::Contract(m) => Error::Parse(m),
        other => other,
    }
}

#[derive(Serialize)]
pub struct FrequencyRow {
    pub path: PathPrefix,
    pub count: usize,
    pub empirical: String,
    pub exact: ExactJson,
    pub sigma: String,
    /// `None` when sigma vanishes and the count differs from its expectation.
    pub z: Option<f64>,
}

#[derive(Serialize)]
pub struct SampleReport {
    pub theta: ThetaSpec,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub q: RBig,
    pub seed: u64,
    pub depth: usize,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<PathPrefix>>,
    pub table: Vec<FrequencyRow>,
    pub max_abs_z: Option<f64>,
}

/// Samples `count` paths and tabulates every cylinder of length `1..=depth`
/// that was observed or whose expected count is at least 1.
pub fn sample(theta: &str, depth: usize, count: usize, keep_paths: bool, cfg: &RunConfig) -> Result<SampleReport> {
    let theta: ThetaSpec = theta.parse()?;
    if count == 0 || depth == 0 {
        return Err(Error::Parse("count and depth must be at least 1".into()));
    }
    if cfg.depth_cap <= depth {
        return Err(Error::Parse(format!("depth cap {} must exceed the depth {depth}", cfg.depth_cap)));
    }
    let m = ThetaMeasure::new(theta.clone(), cfg.ctx.clone());
    let paths = PathSampler::new(&m, cfg.eps.clone(), cfg.depth_cap).sample_many(cfg.seed, depth, count)?;

    let mut observed: BTreeMap<PathPrefix, usize> = BTreeMap::new();
    for p in &paths {
        for k in 1..=depth {
            *observed.entry(p.truncate(k)).or_default() += 1;
        }
    }
    let n = RBig::from(count);
    let mut cylinders: BTreeMap<PathPrefix, RBig> = BTreeMap::new();
    let mut frontier = vec![PathPrefix::trivial(Signature::root())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for alpha in &frontier {
            let t = m.transition_from(alpha.end(), &cfg.eps, cfg.depth_cap)?;
            for (s, _) in t.law {
                let child = alpha.extended(s)?;
                let mass = m.cylinder_mass(&child, &cfg.eps, cfg.depth_cap)?.value;
                if &mass * &n >= RBig::ONE || observed.contains_key(&child) {
                    cylinders.insert(child.clone(), mass);
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    for p in observed.keys() {
        if !cylinders.contains_key(p) {
            let mass = m.cylinder_mass(p, &cfg.eps, cfg.depth_cap)?.value;
            cylinders.insert(p.clone(), mass);
        }
    }

    let nf = count as f64;
    let mut table = Vec::with_capacity(cylinders.len());
    let mut max_abs_z: Option<f64> = Some(0.0);
    for (path, mass) in cylinders {
        let c = observed.get(&path).copied().unwrap_or(0);
        let p = to_f64(&mass);
        let sigma = (nf * p * (1.0 - p)).max(0.0).sqrt();
        let diff = c as f64 - nf * p;
        let z = if sigma > 0.0 {
            Some(diff / sigma)
        } else if diff.abs() < 1e-9 {
            Some(0.0)
        } else {
            None
        };
        max_abs_z = match (max_abs_z, z) {
            (Some(a), Some(b)) => Some(a.max(b.abs())),
            _ => None,
        };
        table.push(FrequencyRow {
            count: c,
            empirical: format_sig(c as f64 / nf),
            exact: ExactJson::from(&mass),
            sigma: format_sig(sigma),
            z,
            path,
        });
    }
    Ok(SampleReport {
        theta,
        q: cfg.ctx.q().clone(),
        seed: cfg.seed,
        depth,
        count,
        samples: keep_paths.then_some(paths),
        table,
        max_abs_z,
    })
}

fn sample_csv(r: &SampleReport) -> Result<String> {
    let mut out = String::new();
    if let Some(paths) = &r.samples {
        let rows: Vec<Vec<String>> = paths
            .iter()
            .enumerate()
            .map(|(i, p)| vec![i.to_string(), p.to_string()])
            .collect();
        out.push_str(&csv_table(&["sample", "path"], &rows)?);
        out.push('\n');
    }
    let rows: Vec<Vec<String>> = r
        .table
        .iter()
        .map(|row| {
            vec![
                row.path.to_string(),
                row.count.to_string(),
                row.empirical.clone(),
                row.exact.exact.clone(),
                row.sigma.clone(),
                row.z.map(format_sig).unwrap_or_else(|| "inf".into()),
            ]
        })
        .collect();
    out.push_str(&csv_table(&["path", "count", "empirical", "exact", "sigma", "z"], &rows)?);
    Ok(out)
}
