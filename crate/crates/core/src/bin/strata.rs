//! Command-line driver: synthetic generators, audio features, the full
//! pipeline, parameter sweeps, graph export and invariant checks.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use strata_core::audiofeat::{song_to_cloud, AudioParams, WavAudio};
use strata_core::covertree::{build_adaptive_cover_tree, check_cover_tree, SubdivisionPolicy};
use strata_core::io::{
    self, export_dot, CoverNodeDump, GraphDocument,
};
use strata_core::mlpca::{all_profiles, RadiusSchedule};
use strata_core::pipeline::{run_pipeline, sweep, PipelineConfig};
use strata_core::scaffolding::EdgeRule;
use strata_core::synth::{generate, Shape, SynthSpec};
use strata_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "strata",
    about = "Multi-scale scaffolding and spine graphs for stratified point clouds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic stratified point cloud.
    Synth(SynthArgs),
    /// Convert a WAV file into a 59-dimensional feature point cloud.
    AudioFeatures(AudioArgs),
    /// Run the full pipeline on a point-cloud CSV.
    Pipeline(PipelineArgs),
    /// Run the pipeline over a grid of (tau, delta) values.
    Sweep(SweepArgs),
    /// Re-export a graph document as DOT or JSON.
    Export(ExportArgs),
    /// Run structural invariant checks on a point cloud.
    Check(CheckArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// One of: sphere_curve, spiral_plane, plane_two_lines, plane_one_line,
    /// lollipops_r6, planes_r4.
    #[arg(long)]
    shape: String,
    /// Per-stratum point counts, comma separated (defaults per shape).
    #[arg(long)]
    counts: Option<String>,
    #[arg(long, default_value_t = 0.01)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output point-cloud CSV path.
    #[arg(long = "out")]
    out: PathBuf,
    /// Optional ground-truth label CSV path.
    #[arg(long)]
    labels_out: Option<PathBuf>,
    /// Write a header row in the CSV.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct AudioArgs {
    /// Input WAV (16-bit PCM or 32-bit float).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output point-cloud CSV path.
    #[arg(long = "out")]
    out: PathBuf,
    /// Optional JSON sidecar mapping rows to (start seconds, duration).
    #[arg(long)]
    spans_out: Option<PathBuf>,
    #[arg(long, default_value_t = 2048)]
    window: usize,
    #[arg(long, default_value_t = 150)]
    block_len: usize,
    #[arg(long, default_value_t = 1)]
    block_hop: usize,
    #[arg(long)]
    header: bool,
}

#[derive(Args, Clone)]
struct ConfigFlags {
    /// Plain key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Eigenthreshold for cover-tree subdivision.
    #[arg(long)]
    tau: Option<f64>,
    /// Scaffolding distance threshold, a number or "auto".
    #[arg(long)]
    delta: Option<String>,
    /// Persistent-H0 subdivision threshold.
    #[arg(long)]
    h0_thresh: Option<f64>,
    /// Higher-persistence subdivision threshold.
    #[arg(long)]
    pers_thresh: Option<f64>,
    /// MLPCA radii, comma separated.
    #[arg(long)]
    radii: Option<String>,
    #[arg(long)]
    dim_rho_lo: Option<f64>,
    #[arg(long)]
    dim_rho_hi: Option<f64>,
    #[arg(long)]
    dim_steps: Option<usize>,
    /// Persistence cutoff for Betti decoration.
    #[arg(long)]
    betti_cutoff: Option<f64>,
    /// Decorate spine vertices with Betti vectors.
    #[arg(long)]
    betti: bool,
    /// Edge rule: centers or clusters.
    #[arg(long)]
    edge_rule: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Input point-cloud CSV.
    #[arg(long = "in")]
    input: PathBuf,
    /// Input CSV has a header row.
    #[arg(long)]
    header: bool,
    #[arg(long)]
    out_dir: PathBuf,
    /// Output format: json, dot or both.
    #[arg(long, default_value = "json")]
    format: String,
    #[command(flatten)]
    flags: ConfigFlags,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    header: bool,
    #[arg(long)]
    out_dir: PathBuf,
    /// Comma-separated tau values.
    #[arg(long)]
    tau_list: String,
    /// Comma-separated delta values ("auto" allowed).
    #[arg(long)]
    delta_list: String,
    #[command(flatten)]
    flags: ConfigFlags,
}

#[derive(Args)]
struct ExportArgs {
    /// Input graph document JSON.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output format: json or dot.
    #[arg(long, default_value = "dot")]
    format: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Input point-cloud CSV.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    header: bool,
    /// Dump the cover tree as JSON to this path.
    #[arg(long)]
    tree_out: Option<PathBuf>,
    #[command(flatten)]
    flags: ConfigFlags,
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::input(format!("bad number {s:?} in list")))
        })
        .collect()
}

fn parse_delta(text: &str) -> Result<Option<f64>> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    let d = text
        .parse::<f64>()
        .map_err(|_| Error::input(format!("delta must be a number or \"auto\", got {text:?}")))?;
    Ok(Some(d))
}

fn parse_edge_rule(text: &str) -> Result<EdgeRule> {
    match text {
        "centers" => Ok(EdgeRule::Centers),
        "clusters" => Ok(EdgeRule::Clusters),
        other => Err(Error::input(format!(
            "edge rule must be centers or clusters, got {other:?}"
        ))),
    }
}

/// Read a plain `key = value` configuration file ('#' comments allowed).
fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in fs::read_to_string(path)?.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::input(format!("config line {}: expected key=value", lineno + 1)))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Merge defaults, config file, and CLI flags (flags win).
fn build_config(flags: &ConfigFlags) -> Result<PipelineConfig> {
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let known = [
        "tau", "delta", "h0_thresh", "pers_thresh", "radii", "dim_rho_lo", "dim_rho_hi",
        "dim_steps", "betti", "betti_cutoff", "edge_rule", "seed",
    ];
    for key in file.keys() {
        if !known.contains(&key.as_str()) {
            return Err(Error::input(format!("unknown config key {key:?}")));
        }
    }
    let file_f64 = |key: &str| -> Result<Option<f64>> {
        file.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::input(format!("config {key}: bad number {v:?}")))
            })
            .transpose()
    };

    let mut config = PipelineConfig::default();
    if let Some(v) = file_f64("tau")? {
        config.tau = v;
    }
    if let Some(v) = flags.tau {
        config.tau = v;
    }
    if let Some(v) = file.get("delta") {
        config.delta = parse_delta(v)?;
    }
    if let Some(v) = &flags.delta {
        config.delta = parse_delta(v)?;
    }
    config.h0_thresh = flags.h0_thresh.or(file_f64("h0_thresh")?);
    config.higher_pers_thresh = flags.pers_thresh.or(file_f64("pers_thresh")?);
    if let Some(v) = file.get("radii") {
        config.radii = Some(parse_list(v)?);
    }
    if let Some(v) = &flags.radii {
        config.radii = Some(parse_list(v)?);
    }
    config.rho_lo = flags.dim_rho_lo.or(file_f64("dim_rho_lo")?);
    config.rho_hi = flags.dim_rho_hi.or(file_f64("dim_rho_hi")?);
    if let Some(v) = file.get("dim_steps") {
        config.dim_steps = v
            .parse()
            .map_err(|_| Error::input(format!("config dim_steps: bad integer {v:?}")))?;
    }
    if let Some(v) = flags.dim_steps {
        config.dim_steps = v;
    }
    if let Some(v) = file.get("betti") {
        config.betti = v == "true" || v == "1";
    }
    if flags.betti {
        config.betti = true;
    }
    config.betti_cutoff = flags.betti_cutoff.or(file_f64("betti_cutoff")?);
    if let Some(v) = file.get("edge_rule") {
        config.edge_rule = parse_edge_rule(v)?;
    }
    if let Some(v) = &flags.edge_rule {
        config.edge_rule = parse_edge_rule(v)?;
    }
    if let Some(v) = file.get("seed") {
        config.seed = v
            .parse()
            .map_err(|_| Error::input(format!("config seed: bad integer {v:?}")))?;
    }
    if let Some(v) = flags.seed {
        config.seed = v;
    }
    Ok(config)
}

fn write_documents(
    out_dir: &Path,
    format: &str,
    prefix: &str,
    doc: &GraphDocument,
) -> Result<()> {
    let json = matches!(format, "json" | "both");
    let dot = matches!(format, "dot" | "both");
    if !json && !dot {
        return Err(Error::input(format!(
            "format must be json, dot or both, got {format:?}"
        )));
    }
    if json {
        doc.write(&out_dir.join(format!("{prefix}.json")))?;
    }
    if dot {
        io::write_atomic(
            &out_dir.join(format!("{prefix}.dot")),
            export_dot(doc).as_bytes(),
        )?;
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let shape: Shape = args.shape.parse()?;
    let counts = match &args.counts {
        Some(text) => Some(
            text.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::input(format!("bad count {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let spec = SynthSpec {
        shape,
        counts,
        noise_sigma: args.noise_sigma,
        seed: args.seed,
    };
    let out = generate(&spec)?;
    io::write_cloud_csv(&args.out, &out.cloud, args.header)?;
    if let Some(path) = &args.labels_out {
        io::write_labels_csv(path, &out.labels)?;
    }
    println!(
        "wrote {} points in R^{} to {}",
        out.cloud.len(),
        out.cloud.dim(),
        args.out.display()
    );
    Ok(())
}

fn cmd_audio(args: &AudioArgs) -> Result<()> {
    let audio = WavAudio::load(&args.input)?;
    let params = AudioParams {
        window: args.window,
        block_len: args.block_len,
        block_hop: args.block_hop,
    };
    let out = song_to_cloud(&audio, &params)?;
    io::write_cloud_csv(&args.out, &out.cloud, args.header)?;
    if let Some(path) = &args.spans_out {
        let spans: Vec<serde_json::Value> = out
            .spans
            .iter()
            .map(|&(start, dur)| serde_json::json!({"start_seconds": start, "duration_seconds": dur}))
            .collect();
        io::write_atomic(path, serde_json::to_string_pretty(&spans)?.as_bytes())?;
    }
    println!(
        "wrote {} blocks x {} features to {}",
        out.cloud.len(),
        out.cloud.dim(),
        args.out.display()
    );
    Ok(())
}

fn cmd_pipeline(args: &PipelineArgs) -> Result<()> {
    let config = build_config(&args.flags)?;
    let digest = io::digest_file(&args.input)?;
    let cloud = io::read_cloud_csv(&args.input, args.header)?;
    let out = run_pipeline(&cloud, &config, &digest)?;
    write_documents(&args.out_dir, &args.format, "scaffolding", &out.scaffolding_doc)?;
    write_documents(&args.out_dir, &args.format, "spine", &out.spine_doc)?;
    let summary = out.summary.render();
    io::write_atomic(&args.out_dir.join("summary.txt"), summary.as_bytes())?;
    print!("{summary}");
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let config = build_config(&args.flags)?;
    let digest = io::digest_file(&args.input)?;
    let cloud = io::read_cloud_csv(&args.input, args.header)?;
    let taus = parse_list(&args.tau_list)?;
    let deltas: Vec<Option<f64>> = args
        .delta_list
        .split(',')
        .map(|s| parse_delta(s.trim()))
        .collect::<Result<_>>()?;
    let result = sweep(&cloud, &config, &taus, &deltas, &digest)?;
    io::write_atomic(&args.out_dir.join("sweep.csv"), result.to_csv().as_bytes())?;
    for (idx, cell) in result.cells.iter().enumerate() {
        match &cell.outcome {
            Ok(res) => {
                let prefix = format!("cell{idx}_spine");
                write_documents(&args.out_dir, "json", &prefix, &res.spine_doc)?;
            }
            Err(e) => eprintln!(
                "cell {idx} (tau={}, delta={:?}) failed: {e}",
                cell.tau, cell.delta
            ),
        }
    }
    println!("wrote {}", args.out_dir.join("sweep.csv").display());
    Ok(())
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let doc = GraphDocument::read(&args.input)?;
    let text = match args.format.as_str() {
        "dot" => export_dot(&doc),
        "json" => doc.to_json()?,
        other => {
            return Err(Error::input(format!(
                "format must be json or dot, got {other:?}"
            )))
        }
    };
    match &args.out {
        Some(path) => io::write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<()> {
    let config = build_config(&args.flags)?;
    let cloud = io::read_cloud_csv(&args.input, args.header)?;
    let schedule = match &config.radii {
        Some(r) => RadiusSchedule::new(r.clone())?,
        None => RadiusSchedule::default_for(&cloud)?,
    };
    let profiles = all_profiles(&cloud, &schedule)?;
    let mut policy = SubdivisionPolicy::new(config.tau, schedule)?;
    policy.h0_thresh = config.h0_thresh;
    policy.higher_pers_thresh = config.higher_pers_thresh;
    let tree = build_adaptive_cover_tree(&cloud, &profiles, &policy)?;
    if let Some(path) = &args.tree_out {
        io::write_atomic(path, CoverNodeDump::from_tree(&tree).to_json()?.as_bytes())?;
    }
    let violations = check_cover_tree(&tree, &cloud);
    if violations.is_empty() {
        println!(
            "ok: cover tree on {} points passes all invariants ({} leaves)",
            cloud.len(),
            tree.leaves().len()
        );
        Ok(())
    } else {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        Err(Error::Invariant(format!(
            "{} cover-tree violations",
            violations.len()
        )))
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::AudioFeatures(args) => cmd_audio(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Export(args) => cmd_export(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
