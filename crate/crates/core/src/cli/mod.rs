//! The `itp` command line.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerically
//! inconsistent verdicts, 4 file I/O failure.

mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

pub use config::ScenarioConfig;
use config::{vector, ChainMode};

use crate::analogues::{
    binomial_partial_sums, cf_convergents, decimal_string, dedupe_common_terms, limit_distance, rescaled_binomial_sums,
    side_of_sqrt2,
};
use crate::chain::{build_chain, decay_curve, pointer_state, stochastic_context_translation, ChainConfig, DecayRow};
use crate::error::Error;
use crate::linalg::projector_onto;
use crate::operators::{apply, apply_image, projection_trace, sensitivity_probe, ProbeReport, ProductOperator};
use crate::product::{inner_product, partial_products, truncated_overlap, OverlapResult, PartialProduct, ProductState};
use crate::sectors::{partition_sectors, sector_equivalent, Partition, Relation};
use crate::spinchain::{spin_state, SpinPattern};

const CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Config(String),
    Inconsistent(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Inconsistent(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn field(field: &str, e: Error) -> Self {
        CliError::Config(format!("{field}: {e}"))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Inconsistent(m) => write!(f, "inconsistent result: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::TransitivityViolation(..) => CliError::Inconsistent(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "itp", version, about = "Infinite tensor product scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for stochastic scenarios; overrides the scenario file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Depth: curve length, chain length or sequence length.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Infinite inner product of two states with its truncated curve.
    Overlap,
    /// Sector partition of a list of states.
    Sectors,
    /// Decay curves and stochastic statistics of measurement chains.
    Chain,
    /// The up/down/alternating spin-chain sector demo.
    Spinchain,
    /// Probes of the infinite product projection `⊗E`.
    Project,
    /// Two exact rational sequences converging to √2.
    Sqrt2,
}

impl Command {
    fn default_format(self) -> Format {
        match self {
            Command::Chain | Command::Sqrt2 => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Parses arguments, runs the scenario and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("itp: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let scenario = match &cli.config {
        None => ScenarioConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            ScenarioConfig::parse(&text)?
        }
    };
    let format = cli.format.unwrap_or(cli.command.default_format());
    let text = render(cli, &scenario, format)?;
    match &cli.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
    }
}

/// The output document of one scenario.
pub fn render(cli: &Cli, scenario: &ScenarioConfig, format: Format) -> Result<String, CliError> {
    if cli.seed.is_some() && cli.command != Command::Chain {
        return Err(CliError::Config(format!("--seed is not used by `{}`", command_name(cli.command))));
    }
    if cli.depth.is_some() && matches!(cli.command, Command::Sectors | Command::Spinchain | Command::Project) {
        return Err(CliError::Config(format!("--depth is not used by `{}`", command_name(cli.command))));
    }
    match cli.command {
        Command::Overlap => overlap(scenario, cli.depth, format),
        Command::Sectors => sectors(scenario, format),
        Command::Chain => chain(scenario, cli.depth, cli.seed, format),
        Command::Spinchain => spinchain(scenario, format),
        Command::Project => project(scenario, format),
        Command::Sqrt2 => sqrt2(scenario, cli.depth, format),
    }
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Overlap => "overlap",
        Command::Sectors => "sectors",
        Command::Chain => "chain",
        Command::Spinchain => "spinchain",
        Command::Project => "project",
        Command::Sqrt2 => "sqrt2",
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Inconsistent(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Inconsistent(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Inconsistent(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Inconsistent(e.to_string()))
}

#[derive(Serialize)]
struct OverlapReport {
    overlap: OverlapResult,
    curve: Vec<PartialProduct>,
}

fn overlap(s: &ScenarioConfig, depth: Option<usize>, format: Format) -> Result<String, CliError> {
    let psi = s.overlap.psi.state("overlap.psi")?;
    let phi = s.overlap.phi.state("overlap.phi")?;
    let depth = depth.unwrap_or(s.overlap.depth);
    let overlap = inner_product(&psi, &phi)?;
    let curve = partial_products(&psi, &phi)?.take(depth).collect::<crate::Result<Vec<_>>>()?;
    // |∏ δ_i| never increases, so a non-zero limit cannot exceed a partial product
    if let Some(last) = curve.last() {
        if !overlap.verdict.is_zero() && overlap.magnitude() > last.magnitude * (1.0 + CONSISTENCY_TOL) {
            return Err(CliError::Inconsistent(format!(
                "limit magnitude {} exceeds the partial product {} at n = {}",
                overlap.magnitude(),
                last.magnitude,
                last.n
            )));
        }
    }
    match format {
        Format::Json => json(&OverlapReport { overlap, curve }),
        Format::Csv => csv(curve),
    }
}

#[derive(Serialize)]
struct PairRow {
    left: usize,
    right: usize,
    relation: Relation,
    rule: String,
    sum_bound_estimate: Option<f64>,
}

fn pair_rows(p: &Partition) -> Vec<PairRow> {
    p.pairwise
        .iter()
        .map(|e| PairRow {
            left: e.left,
            right: e.right,
            relation: e.relation,
            rule: rule_name(&e.rule),
            sum_bound_estimate: e.sum_bound_estimate,
        })
        .collect()
}

fn rule_name<T: Serialize>(rule: &T) -> String {
    serde_json::to_value(rule)
        .ok()
        .and_then(|v| v.get("rule").and_then(|r| r.as_str()).map(str::to_owned))
        .unwrap_or_default()
}

fn sectors(s: &ScenarioConfig, format: Format) -> Result<String, CliError> {
    let states = s
        .sectors
        .states
        .iter()
        .enumerate()
        .map(|(i, c)| c.state(&format!("sectors.states[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let p = partition_sectors(&states)?;
    match format {
        Format::Json => json(&p),
        Format::Csv => csv(pair_rows(&p)),
    }
}

fn chain_config(
    s: &ScenarioConfig,
    depth: Option<usize>,
    seed: Option<u64>,
) -> Result<(ChainConfig, ChainConfig), CliError> {
    let c = &s.chain;
    let object = vector(&c.object, "chain.object")?;
    let steps = depth.unwrap_or(c.steps);
    let mut a = ChainConfig::new(object, steps, c.mismatch.family("chain.mismatch")?);
    a.seed = seed.or(c.seed);
    a.branch_cap = c.branch_cap;
    a.prune_threshold = c.prune_threshold;
    a.validate().map_err(|e| CliError::field("chain", e))?;
    let mut b = a.clone();
    b.mismatch = c.reference.family("chain.reference")?;
    Ok((a, b))
}

#[derive(Serialize)]
struct DecayReport {
    rows: Vec<DecayRow>,
    pointer_overlap: f64,
}

#[derive(Serialize)]
struct BranchRow {
    branch: usize,
    coeff_re: f64,
    coeff_im: f64,
    weight: f64,
    record: String,
}

#[derive(Serialize)]
struct BranchReport {
    branches: Vec<BranchRow>,
    total_weight: f64,
    pruned_weight: f64,
}

fn chain(s: &ScenarioConfig, depth: Option<usize>, seed: Option<u64>, format: Format) -> Result<String, CliError> {
    let (a, b) = chain_config(s, depth, seed)?;
    match s.chain.mode {
        ChainMode::Decay => {
            let rows = decay_curve(&a, &b)?;
            // the product column must agree with the overlap of the two pointer records
            let t = truncated_overlap(&pointer_state(&a)?, &pointer_state(&b)?, a.steps + 1)?;
            let last = rows.last().map_or(1.0, |r| r.product);
            let pointer_overlap = t.value.norm();
            if (pointer_overlap - last).abs() > CONSISTENCY_TOL {
                return Err(CliError::Inconsistent(format!(
                    "decay product {last} differs from pointer-state overlap {pointer_overlap}"
                )));
            }
            match format {
                Format::Json => json(&DecayReport { rows, pointer_overlap }),
                Format::Csv => csv(rows),
            }
        }
        ChainMode::Stochastic => {
            if a.seed.is_none() {
                return Err(CliError::Config("chain.seed: stochastic mode requires a seed (or --seed)".into()));
            }
            let report = stochastic_context_translation(&a, &s.chain.distribution, s.chain.trials)
                .map_err(|e| CliError::field("chain", e))?;
            match format {
                Format::Json => json(&report),
                Format::Csv => csv(report.depths),
            }
        }
        ChainMode::Branches => {
            let state = build_chain(&a)?;
            let branches: Vec<BranchRow> = state
                .branches
                .iter()
                .enumerate()
                .map(|(i, br)| BranchRow {
                    branch: i,
                    coeff_re: br.coeff.re,
                    coeff_im: br.coeff.im,
                    weight: br.coeff.norm_sqr(),
                    record: record_bits(&br.factors),
                })
                .collect();
            let total_weight = state.weight();
            if (total_weight + state.pruned_weight - 1.0).abs() > 1e-8 {
                return Err(CliError::Inconsistent(format!(
                    "branch weight {total_weight} plus pruned {} is not 1",
                    state.pruned_weight
                )));
            }
            match format {
                Format::Json => json(&BranchReport { branches, total_weight, pruned_weight: state.pruned_weight }),
                Format::Csv => csv(branches),
            }
        }
    }
}

/// Computational-basis records of a branch, `-` for the unrecorded last factor.
fn record_bits(factors: &[crate::linalg::LocalVector]) -> String {
    let n = factors.len();
    factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let a = f.amps();
            match (i + 1 == n && n > 1, a) {
                (false, [x, y]) if *y == Complex64::new(0.0, 0.0) && *x == Complex64::new(1.0, 0.0) => '0',
                (false, [x, y]) if *x == Complex64::new(0.0, 0.0) && *y == Complex64::new(1.0, 0.0) => '1',
                _ => '-',
            }
        })
        .collect()
}

#[derive(Serialize)]
struct OverlapRow {
    left: String,
    right: String,
    relation: Relation,
    verdict: crate::product::Verdict,
    magnitude: f64,
}

#[derive(Serialize)]
struct NamedSector {
    sector: usize,
    members: Vec<String>,
}

#[derive(Serialize)]
struct SpinchainReport {
    states: Vec<String>,
    sector_count: usize,
    sectors: Vec<NamedSector>,
    overlaps: Vec<OverlapRow>,
}

fn spinchain(s: &ScenarioConfig, format: Format) -> Result<String, CliError> {
    let mut named: Vec<(String, ProductState)> = [SpinPattern::Up, SpinPattern::Down, SpinPattern::Mixed]
        .into_iter()
        .map(|p| (p.name().to_owned(), spin_state(p, &[])))
        .collect();
    for e in &s.spinchain.extra {
        let flips = e.flips.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("_");
        let name =
            if flips.is_empty() { e.pattern.name().to_owned() } else { format!("{}_flip_{flips}", e.pattern.name()) };
        named.push((name, spin_state(e.pattern, &e.flips)));
    }
    let states: Vec<ProductState> = named.iter().map(|(_, st)| st.clone()).collect();
    let p = partition_sectors(&states)?;
    let mut overlaps = Vec::new();
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let o = inner_product(&states[i], &states[j])?;
            let relation = sector_equivalent(&states[i], &states[j])?.relation;
            if relation == Relation::DifferentSector && !o.verdict.is_zero() {
                return Err(CliError::Inconsistent(format!(
                    "{} and {} lie in different sectors but overlap with magnitude {}",
                    named[i].0,
                    named[j].0,
                    o.magnitude()
                )));
            }
            overlaps.push(OverlapRow {
                left: named[i].0.clone(),
                right: named[j].0.clone(),
                relation,
                verdict: o.verdict,
                magnitude: o.magnitude(),
            });
        }
    }
    let sectors = p
        .groups
        .iter()
        .enumerate()
        .map(|(k, g)| NamedSector { sector: k, members: g.iter().map(|&i| named[i].0.clone()).collect() })
        .collect();
    let report = SpinchainReport {
        states: named.iter().map(|(n, _)| n.clone()).collect(),
        sector_count: p.groups.len(),
        sectors,
        overlaps,
    };
    match format {
        Format::Json => json(&report),
        Format::Csv => csv(report.overlaps),
    }
}

#[derive(Serialize)]
struct TraceRow {
    factors: usize,
    trace: u64,
}

#[derive(Serialize)]
struct ProjectReport {
    state_norm: f64,
    idempotent: bool,
    probes: Vec<ProbeReport>,
    traces: Vec<TraceRow>,
}

fn project(s: &ScenarioConfig, format: Format) -> Result<String, CliError> {
    let c = &s.project;
    let psi = c.state.state("project.state")?;
    let e = projector_onto(&vector(&c.projector, "project.projector")?)?;
    let f = ProductOperator::repeat(e.clone());
    let once = apply(&f, &psi).map_err(|err| CliError::field("project.state", err))?;
    let twice = apply_image(&f, &once)?;
    let depth = psi.prefix().len() + 4;
    let idempotent = once.approx_eq(&twice, depth, 1e-12);
    if !idempotent {
        return Err(CliError::Inconsistent("applying the projection twice changed the image".into()));
    }
    let probes = c
        .probes
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let field = format!("project.probes[{i}].replacement");
            let r = vector(&p.replacement, &field)?;
            sensitivity_probe(&f, &psi, p.index, &r).map_err(|err| CliError::field(&field, err))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let traces = (1..=c.trace_factors)
        .map(|k| Ok(TraceRow { factors: k, trace: projection_trace(&vec![e.clone(); k])? }))
        .collect::<Result<Vec<_>, CliError>>()?;
    let report = ProjectReport { state_norm: once.norm(), idempotent, probes, traces };
    match format {
        Format::Json => json(&report),
        Format::Csv => csv(report.probes),
    }
}

#[derive(Serialize)]
struct SequenceRow {
    sequence: &'static str,
    index: usize,
    numerator: String,
    denominator: String,
    decimal: String,
    distance: f64,
}

#[derive(Serialize)]
struct Sqrt2Report {
    rows: Vec<SequenceRow>,
    common_terms: Vec<String>,
    continued_fraction_after_dedupe: Vec<String>,
    binomial_after_dedupe: Vec<String>,
}

fn sqrt2(s: &ScenarioConfig, depth: Option<usize>, format: Format) -> Result<String, CliError> {
    let n = depth.unwrap_or(s.sqrt2.depth);
    let cf = cf_convergents(n).map_err(|e| CliError::field("sqrt2.depth", e))?;
    let bin = binomial_partial_sums(n)?;
    let resc = rescaled_binomial_sums(n)?;
    for (name, seq) in [("continued_fraction", &cf), ("binomial", &bin)] {
        let d = limit_distance(seq);
        if d.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::Inconsistent(format!("{name} distances to sqrt(2) are not strictly decreasing")));
        }
    }
    if cf.windows(2).any(|w| side_of_sqrt2(&w[0]) == side_of_sqrt2(&w[1])) {
        return Err(CliError::Inconsistent("continued-fraction convergents do not alternate around sqrt(2)".into()));
    }
    let mut rows = Vec::new();
    for (name, seq) in [("continued_fraction", &cf), ("binomial", &bin), ("rescaled_binomial", &resc)] {
        for ((k, x), d) in seq.iter().enumerate().zip(limit_distance(seq)) {
            rows.push(SequenceRow {
                sequence: name,
                index: k + 1,
                numerator: x.numer().to_string(),
                denominator: x.denom().to_string(),
                decimal: decimal_string(x, 30),
                distance: d,
            });
        }
    }
    let (da, db) = dedupe_common_terms(&cf, &bin);
    let common_terms = cf.iter().filter(|x| !da.contains(x)).map(|x| x.to_string()).collect();
    match format {
        Format::Json => json(&Sqrt2Report {
            rows,
            common_terms,
            continued_fraction_after_dedupe: da.iter().map(|x| x.to_string()).collect(),
            binomial_after_dedupe: db.iter().map(|x| x.to_string()).collect(),
        }),
        Format::Csv => csv(rows),
    }
}
