//! Command-line front end: every subcommand reads plain files, writes CSV or
//! JSON, and prefixes CSV output with the run configuration and input hashes.
//!
//! Graph and circuit arguments accept a path or `fixture:NAME` for the shipped files.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::apps::{self, TeleportStrategy};
use crate::bellsim::{simulate, MeasurementNoise, NoiseModel};
use crate::circuit::{heuristic_search, Circuit, Objective, SearchConfig};
use crate::enumerate::{key_set, transversal, EnumConfig, ProtocolRecord, Strategy};
use crate::error::{Error, Result};
use crate::evolve::{evolve, GaConfig};
use crate::graph::orbit::{format_orbit_db, generate_lc_classes};
use crate::graph::NKGraph;
use crate::io::{cache_dir, csv_string, write_output, Provenance};
use crate::pauli::label_string;
use crate::stats::dedup::DedupGroup;
use crate::stats::{statistics, OutputTable, SyndromeMode};
use crate::symplectic::SymplecticMatrix;

#[derive(Parser, Debug)]
#[command(name = "distil", version, about = "Bilocal Clifford entanglement distillation toolkit")]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate one protocol per statistics class.
    Enumerate(EnumerateArgs),
    /// Exact statistics of a graph or circuit on Werner inputs.
    Stats(StatsArgs),
    /// Compile a graph into a circuit, optionally searching for a cheaper one.
    Synth(SynthArgs),
    /// Simulate a circuit with gate and measurement noise.
    Simulate(SimulateArgs),
    /// Genetic search for noisy circuits.
    Ga(GaArgs),
    /// Key rates and encoded teleportation.
    Apps(AppsArgs),
    /// Generate LC-class databases into the cache directory.
    OrbitDb(OrbitDbArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StrategyChoice {
    Graphs,
    NormalForms,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Toggle {
    Auto,
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GroupChoice {
    Auto,
    Symplectic,
    LocalPermutations,
    Exact,
}

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'k')]
    pub k: usize,
    #[arg(long, value_enum, default_value = "graphs")]
    pub strategy: StrategyChoice,
    #[arg(long, value_enum, default_value = "auto")]
    pub symmetry_breaking: Toggle,
    #[arg(long, value_enum, default_value = "auto")]
    pub group: GroupChoice,
    /// Skip LC classes of disconnected graphs.
    #[arg(long)]
    pub connected_only: bool,
    /// Checkpoint file; defaults to the cache directory when `--resume` is set.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub resume: bool,
    /// Directory receiving `transversal_<strategy>_<n>_<k>.csv`.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SyndromeChoice {
    Trivial,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct StatsArgs {
    /// Graph file (`{"graph6", "inputs"}`) or `fixture:NAME`.
    #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
    pub graph: Option<String>,
    /// Circuit file (`{"n", "keep", "gates"}`) or `fixture:NAME`.
    #[arg(long)]
    pub circuit: Option<String>,
    /// Input fidelities: `a:b:step`, a comma list or a single value.
    #[arg(long, default_value = "0.6:1.0:0.05")]
    pub f_grid: String,
    #[arg(long, value_enum, default_value = "trivial")]
    pub syndromes: SyndromeChoice,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_enum, default_value = "two-qubit")]
    pub objective: Objective,
    /// Graphs visited by the search; 0 keeps the direct synthesis.
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub search_labelings: bool,
    /// Circuit JSON destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Metrics JSON destination (stderr when absent).
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub circuit: String,
    #[arg(long = "f")]
    pub f_in: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p_g: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p_m: f64,
    #[arg(long, value_enum, default_value = "coincidence")]
    pub measurement: MeasurementNoise,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct GaArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'k')]
    pub k: usize,
    #[arg(long = "f")]
    pub f_in: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p_g: f64,
    #[arg(long, default_value_t = 0.0)]
    pub p_m: f64,
    /// JSON file with any subset of the GA settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the seed of the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory receiving `manifest.json` and `circuit.json`.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AppTask {
    Qkd,
    Teleport,
}

#[derive(Args, Debug, Serialize)]
pub struct AppsArgs {
    #[arg(value_enum)]
    pub task: AppTask,
    #[arg(long, default_value = "0.8:1.0:0.01")]
    pub f_grid: String,
    /// Largest `n` of the `n -> 1` protocols for key rates.
    #[arg(long, default_value_t = 5)]
    pub max_n: usize,
    /// The `n -> 7` protocol graph for teleportation.
    #[arg(long, default_value = "fixture:ten_to_seven")]
    pub graph: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct OrbitDbArgs {
    /// Generate classes for `1..=max_n` vertices.
    #[arg(long, default_value_t = 9)]
    pub max_n: usize,
    /// Defaults to `$DISTIL_CACHE_DIR`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parse the command line and run it; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Enumerate(a) => cmd_enumerate(&a),
        Command::Stats(a) => cmd_stats(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Ga(a) => cmd_ga(&a),
        Command::Apps(a) => cmd_apps(&a),
        Command::OrbitDb(a) => cmd_orbit_db(&a),
    }
}

/// `a:b:step` (inclusive), `x,y,...` or a single value, each in `[0, 1]`.
pub fn parse_f_grid(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?} in F grid")));
    let grid = if let [a, b, step] = spec.split(':').collect::<Vec<_>>()[..] {
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step.is_nan() || step <= 0.0 || b < a {
            return Err(Error::Parse(format!("F grid {spec:?} needs a <= b and a positive step")));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        (0..=count).map(|i| a + step * i as f64).collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() || grid.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::InvalidInput(format!("F grid {spec:?} must hold fidelities in [0, 1]")));
    }
    Ok(grid)
}

/// Contents of a `path` or `fixture:NAME` argument.
fn read_source(arg: &str, fixture: fn(&str) -> Result<&'static str>) -> Result<String> {
    match arg.strip_prefix("fixture:") {
        Some(name) => Ok(fixture(name)?.to_string()),
        None => Ok(std::fs::read_to_string(arg)?),
    }
}

fn load_graph(arg: &str) -> Result<(NKGraph, String)> {
    let text = read_source(arg, crate::fixtures::graph)?;
    Ok((NKGraph::from_json(&text)?, text))
}

fn load_circuit(arg: &str) -> Result<(Circuit, String)> {
    let text = read_source(arg, crate::fixtures::circuit)?;
    Ok((Circuit::from_json(&text)?, text))
}

fn fmt(x: f64) -> String {
    format!("{x:.15e}")
}

fn cmd_enumerate(a: &EnumerateArgs) -> Result<()> {
    let checkpoint = match (&a.checkpoint, a.resume) {
        (Some(p), _) => Some(p.clone()),
        (None, true) => Some(cache_dir().join(format!("checkpoint_{}_{}.json", a.n, a.k))),
        (None, false) => None,
    };
    let cfg = EnumConfig {
        symmetry_breaking: match a.symmetry_breaking {
            Toggle::Auto => None,
            Toggle::On => Some(true),
            Toggle::Off => Some(false),
        },
        include_disconnected: !a.connected_only,
        group: match a.group {
            GroupChoice::Auto => None,
            GroupChoice::Symplectic => Some(DedupGroup::Symplectic),
            GroupChoice::LocalPermutations => Some(DedupGroup::LocalPermutations),
            GroupChoice::Exact => Some(DedupGroup::Exact),
        },
        checkpoint,
        ..EnumConfig::default()
    };
    let strategies: &[Strategy] = match a.strategy {
        StrategyChoice::Graphs => &[Strategy::Graphs],
        StrategyChoice::NormalForms => &[Strategy::NormalForms],
        StrategyChoice::Both => &[Strategy::Graphs, Strategy::NormalForms],
    };
    let prov = Provenance::new(a);
    let mut sets = Vec::new();
    for &s in strategies {
        let mut run_cfg = cfg.clone();
        if strategies.len() > 1 {
            run_cfg.checkpoint = cfg.checkpoint.as_ref().map(|p| p.with_extension(format!("{}.json", strategy_name(s))));
        }
        let records = transversal(s, a.n, a.k, &run_cfg)?;
        let path = a.out_dir.join(format!("transversal_{}_{}_{}.csv", strategy_name(s), a.n, a.k));
        write_output(Some(&path), &transversal_csv(&prov, &records)?)?;
        eprintln!("{}: {} classes -> {}", strategy_name(s), records.len(), path.display());
        sets.push(key_set(&records));
    }
    if let [g, f] = &sets[..] {
        if g != f {
            return Err(Error::Internal(format!("strategies disagree: {} vs {} classes", g.len(), f.len())));
        }
        eprintln!("strategies agree on {} classes", g.len());
    }
    Ok(())
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Graphs => "graphs",
        Strategy::NormalForms => "normal_forms",
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn transversal_csv(prov: &Provenance, records: &[ProtocolRecord]) -> Result<String> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.source.to_string(),
                r.n.to_string(),
                r.k.to_string(),
                r.key.digest(),
                join(&r.success.0),
                join(&r.identity.0),
            ]
        })
        .collect();
    csv_string(prov, &["source", "n", "k", "key", "success_enumerator", "identity_enumerator"], &rows)
}

/// Largest `k` for which per-label coefficient columns are written.
const MAX_LABEL_COLUMNS_K: usize = 3;

fn table_rows(f: f64, t: &OutputTable, rows: &mut Vec<Vec<String>>) -> Result<()> {
    for &b in &t.syndromes {
        let p = t.success_probability(b)?;
        let mut row = vec![fmt(f), b.to_string(), fmt(p)];
        if p > 0.0 {
            let c = t.output_coefficients(b)?;
            row.push(fmt(c[0]));
            if t.k <= MAX_LABEL_COLUMNS_K {
                row.extend(c.iter().map(|&x| fmt(x)));
            }
        } else {
            row.push(String::new());
            if t.k <= MAX_LABEL_COLUMNS_K {
                row.extend(std::iter::repeat_n(String::new(), t.labels()));
            }
        }
        rows.push(row);
    }
    Ok(())
}

fn table_header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = ["f_in", "syndrome", "p_succ", "fidelity"].map(String::from).to_vec();
    if k <= MAX_LABEL_COLUMNS_K {
        h.extend((0..1u32 << (2 * k)).map(|l| format!("coeff_{}", label_string(l, k))));
    }
    h
}

fn cmd_stats(a: &StatsArgs) -> Result<()> {
    let grid = parse_f_grid(&a.f_grid)?;
    let (m, k, name, text): (SymplecticMatrix, usize, &str, String) = match (&a.graph, &a.circuit) {
        (Some(g), _) => {
            let (graph, text) = load_graph(g)?;
            (apps::graph_protocol(&graph)?, graph.k_in(), g, text)
        }
        (None, Some(c)) => {
            let (circuit, text) = load_circuit(c)?;
            (circuit.to_symplectic(), circuit.keep(), c, text)
        }
        (None, None) => return Err(Error::InvalidInput("pass --graph or --circuit".into())),
    };
    let mode = match a.syndromes {
        SyndromeChoice::Trivial => SyndromeMode::Trivial,
        SyndromeChoice::All => SyndromeMode::All,
    };
    let stats = statistics(&m, k, mode)?;
    let mut rows = Vec::new();
    for &f in &grid {
        table_rows(f, &stats.werner_table(f), &mut rows)?;
    }
    let header = table_header(k);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let prov = Provenance::new(a).with_input(name, text.as_bytes());
    write_output(a.out.as_deref(), &csv_string(&prov, &header, &rows)?)
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let (graph, _) = load_graph(&a.graph)?;
    let cfg = SearchConfig {
        objective: a.objective,
        budget: a.budget,
        seed: a.seed,
        search_labelings: a.search_labelings,
        ..SearchConfig::default()
    };
    let result = heuristic_search(&graph, &cfg)?;
    write_output(a.out.as_deref(), &(result.circuit.to_json() + "\n"))?;
    let metrics = serde_json::to_string_pretty(&result.metrics)? + "\n";
    match &a.metrics {
        Some(p) => write_output(Some(p), &metrics),
        None => {
            eprint!("{metrics}");
            Ok(())
        }
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let (circuit, text) = load_circuit(&a.circuit)?;
    let noise = NoiseModel::new(a.p_g, a.p_m)?.with_measurement(a.measurement);
    let input = crate::stats::BellDiagonalInput::werner(circuit.n(), a.f_in)?;
    let table = simulate(&circuit, &input, &noise)?;
    let mut rows = Vec::new();
    table_rows(a.f_in, &table, &mut rows)?;
    let header = table_header(circuit.keep());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let prov = Provenance::new(a).with_input(&a.circuit, text.as_bytes());
    write_output(a.out.as_deref(), &csv_string(&prov, &header, &rows)?)
}

fn cmd_ga(a: &GaArgs) -> Result<()> {
    let mut cfg: GaConfig = match &a.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => GaConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let noise = NoiseModel::new(a.p_g, a.p_m)?;
    let manifest = evolve(a.n, a.k, a.f_in, &noise, &cfg)?;
    write_output(Some(&a.out_dir.join("manifest.json")), &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    let circuit = manifest.best.to_circuit(a.k)?;
    write_output(Some(&a.out_dir.join("circuit.json")), &(circuit.to_json() + "\n"))?;
    eprintln!(
        "best fitness {:.12} (p_succ {:.6}) after {} generations: {}",
        manifest.best_fitness,
        manifest.best_success_probability,
        manifest.history.len(),
        manifest.best
    );
    Ok(())
}

fn cmd_apps(a: &AppsArgs) -> Result<()> {
    let grid = parse_f_grid(&a.f_grid)?;
    let prov = Provenance::new(a);
    let text = match a.task {
        AppTask::Qkd => {
            let ns: Vec<usize> = (1..=a.max_n).collect();
            let env = apps::key_rate_envelopes(&ns, &grid)?;
            let rows: Vec<Vec<String>> = env
                .iter()
                .map(|e| vec![fmt(e.f_in), e.n.to_string(), fmt(e.binned_rate), fmt(e.detection_rate)])
                .collect();
            let mut prov = prov;
            prov.config["werner_threshold"] = serde_json::json!(apps::werner_rate_threshold());
            csv_string(&prov, &["f_in", "n", "binned_rate", "detection_rate"], &rows)?
        }
        AppTask::Teleport => {
            let (graph, text) = load_graph(&a.graph)?;
            let stats = statistics(&apps::graph_protocol(&graph)?, graph.k_in(), SyndromeMode::Trivial)?;
            let curves = apps::teleportation_curves(&stats, &grid)?;
            let rows: Vec<Vec<String>> = curves
                .iter()
                .map(|p| vec![fmt(p.f_in), teleport_name(p.strategy).into(), fmt(p.infidelity), fmt(p.expected_pairs)])
                .collect();
            let prov = prov.with_input(&a.graph, text.as_bytes());
            csv_string(&prov, &["f_in", "strategy", "infidelity", "expected_pairs"], &rows)?
        }
    };
    write_output(a.out.as_deref(), &text)
}

fn teleport_name(s: TeleportStrategy) -> &'static str {
    match s {
        TeleportStrategy::Undistilled => "undistilled",
        TeleportStrategy::TenToSeven => "ten_to_seven",
        TeleportStrategy::Dejmps => "dejmps",
    }
}

fn cmd_orbit_db(a: &OrbitDbArgs) -> Result<()> {
    let dir = a.out_dir.clone().unwrap_or_else(cache_dir);
    let classes = generate_lc_classes(a.max_n)?;
    for (i, reps) in classes.iter().enumerate() {
        let path = dir.join(format!("lc_classes_{}.g6", i + 1));
        write_output(Some(&path), &format_orbit_db(reps))?;
        eprintln!("{} vertices: {} classes -> {}", i + 1, reps.len(), path.display());
    }
    Ok(())
}

