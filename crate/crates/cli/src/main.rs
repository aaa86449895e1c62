//! `ffofdm`: construct, verify, export and simulate finite-field OFDM systems.

mod verify;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffofdm::channel::trial_rng;
use ffofdm::config::{preset, Config, PRESETS};
use ffofdm::geometry::{export_alist, gf2_rank};
use ffofdm::sim::{RunControl, SimResult, Simulator};
use ffofdm::txrx::{write_trace, StreamBlock};
use ffofdm::{Error, Result};
use serde::Serialize;

static STOP: AtomicBool = AtomicBool::new(false);

#[derive(Parser)]
#[command(name = "ffofdm", version, about = "Finite-field OFDM global coded multiplexing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the code and print the global matrix summary
    Construct(Source),
    /// Run the structural verifier battery
    Verify {
        #[command(flatten)]
        source: Source,
        /// Random samples per sampled check
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Monte Carlo sweep, written as CSV plus a JSON manifest
    Simulate(SimulateArgs),
    /// Write H_global to a file
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Alist)]
        format: Format,
    },
    /// Write one transmitted frame (global word and streams) in binary trace format
    Trace {
        #[command(flatten)]
        source: Source,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// List the shipped presets
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Alist,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// TOML configuration file
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Name of a shipped preset
    #[arg(long, short)]
    preset: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    target_errors: Option<u64>,
    /// Comma-separated Eb/N0 points in dB
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ebn0: Option<Vec<f64>>,
    /// Comma-separated iteration limits
    #[arg(long, value_delimiter = ',')]
    iterations: Option<Vec<usize>>,
    #[arg(long)]
    scale: Option<f64>,
    /// Suppress progress output
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    timestamp_unix: u64,
    config_source: String,
    config: String,
    outputs: Vec<String>,
    truncated: bool,
    rate: f64,
    wall_seconds: Vec<f64>,
}

impl Source {
    fn load(&self) -> Result<(Config, String)> {
        match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config { field: "config".into(), message: format!("{}: {e}", path.display()) })?;
                Ok((Config::from_toml_str(&text)?, path.display().to_string()))
            }
            (None, Some(name)) => preset(name)
                .map(|c| (c, format!("preset:{name}")))
                .ok_or_else(|| Error::Config { field: "preset".into(), message: format!("unknown preset {name:?}") }),
            (None, None) => unreachable!("clap requires a source"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Construct(source) => construct(&source),
        Command::Verify { source, samples } => run_verify(&source, samples),
        Command::Simulate(args) => simulate(&args),
        Command::Export { source, output, format } => export(&source, &output, format),
        Command::Trace { source, output, trial } => trace(&source, &output, trial),
        Command::Presets => {
            for (name, _) in PRESETS {
                println!("{name}");
            }
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } => 2,
                _ => 1,
            })
        }
    }
}

/// Rates are shown truncated to four places.
fn truncated_rate(rate: f64) -> String {
    format!("{:.4}", (rate * 1e4).floor() / 1e4)
}

fn construct(source: &Source) -> Result<bool> {
    let (cfg, _) = source.load()?;
    cfg.validate()?;
    let system = cfg.system()?;
    let spec = system.spec();
    let h = system.global_check();
    let (n, m, s) = (spec.n(), spec.m(), spec.s());
    let rank = gf2_rank(h);
    println!(
        "field     GF(2^{s}), poly {:#x}, beta = alpha^{}",
        spec.field().primitive_poly(),
        spec.subgroup().alpha_exponent()
    );
    println!("code      ({n},{}) {}, n = {n}, s = {s}, m = {m}", n - m, spec.mode().as_str());
    println!(
        "H_global  {}×{}, weights {}/{}, rank {rank}, dim {}, rate {}",
        h.n_rows(),
        h.n_cols(),
        h.column_weight(),
        h.row_weight(),
        n * n - rank,
        truncated_rate(system.rate())
    );
    println!("info bits {} per global codeword", ffofdm::txrx::info_bits(spec));
    println!("decoding  {} ops per layer iteration, {} per stream", 3 * m * n * n, 3 * m * n);
    Ok(true)
}

fn run_verify(source: &Source, samples: Option<usize>) -> Result<bool> {
    let (cfg, _) = source.load()?;
    cfg.sim_config().validate()?;
    let checks = verify::run(&cfg, samples.unwrap_or_else(|| verify::default_samples(cfg.code.n)))?;
    let mut all = true;
    for c in &checks {
        println!("{:<4} {:<14} {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
        all &= c.passed;
    }
    println!("{}", if all { "all checks passed" } else { "verification failed" });
    Ok(all)
}

fn export(source: &Source, output: &Path, format: Format) -> Result<bool> {
    let (cfg, _) = source.load()?;
    let system = cfg.system()?;
    match format {
        Format::Alist => export_alist(system.global_check(), output)?,
    }
    Ok(true)
}

fn trace(source: &Source, output: &Path, trial: u64) -> Result<bool> {
    let (cfg, _) = source.load()?;
    cfg.validate()?;
    let system = cfg.system()?;
    let ebn0 = cfg.channel.ebn0_db[0];
    // same stream draw as the first Eb/N0 point of a simulation
    let mut rng = trial_rng(cfg.channel.seed, ebn0.to_bits(), trial);
    let streams = StreamBlock::random(system.spec(), &mut rng);
    let tx = system.transmit(&streams)?;
    write_trace(BufWriter::new(File::create(output)?), system.spec(), &tx.global, &streams)?;
    Ok(true)
}

fn apply_overrides(cfg: &mut Config, args: &SimulateArgs) {
    if let Some(x) = args.seed {
        cfg.channel.seed = x;
    }
    if let Some(x) = args.threads {
        cfg.sim.threads = Some(x);
    }
    if let Some(x) = args.max_frames {
        cfg.sim.max_frames = x;
    }
    if let Some(x) = args.target_errors {
        cfg.sim.target_errors = x;
    }
    if let Some(x) = &args.ebn0 {
        cfg.channel.ebn0_db = x.clone();
    }
    if let Some(x) = &args.iterations {
        cfg.decoder.iterations = x.clone();
    }
    if let Some(x) = args.scale {
        cfg.decoder.scale = x;
    }
    if let Some(x) = &args.out {
        cfg.output.dir = x.display().to_string();
    }
}

fn simulate(args: &SimulateArgs) -> Result<bool> {
    let (mut cfg, origin) = args.source.load()?;
    apply_overrides(&mut cfg, args);
    cfg.validate()?;
    let sim = Simulator::new(cfg.system()?, cfg.sim_config())?;
    let _ = ctrlc::set_handler(|| STOP.store(true, Ordering::Relaxed));

    let quiet = args.quiet;
    let progress = move |ebn0: f64, frames: u64, errors: u64| {
        if !quiet {
            eprintln!("Eb/N0 {ebn0:>5.2} dB  frames {frames:>10}  global errors {errors}");
        }
    };
    let control = RunControl {
        stop: Some(&STOP),
        progress: Some(&progress),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.sim.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config { field: "sim.threads".into(), message: e.to_string() })?;
    let result = pool.install(|| sim.monte_carlo_with(control))?;

    let dir = PathBuf::from(&cfg.output.dir);
    fs::create_dir_all(&dir)?;
    let stem = cfg.name.clone().unwrap_or_else(|| "run".into());
    let csv_path = dir.join(format!("{stem}.csv"));
    write_csv(&csv_path, &result)?;
    let mut outputs = vec![csv_path.display().to_string()];
    if !result.baseline.is_empty() {
        let path = dir.join(format!("{stem}.baseline.csv"));
        write_baseline_csv(&path, &result)?;
        outputs.push(path.display().to_string());
    }
    let manifest_path = dir.join(format!("{stem}.manifest.json"));
    outputs.push(manifest_path.display().to_string());
    let manifest = RunManifest {
        tool: "ffofdm",
        version: env!("CARGO_PKG_VERSION"),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        config_source: origin,
        config: cfg.to_toml_string(),
        outputs: outputs.clone(),
        truncated: result.truncated,
        rate: result.rate,
        wall_seconds: result.cells.iter().map(|c| c.wall_seconds).collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, json + "\n")?;
    for p in &outputs {
        println!("wrote {p}");
    }
    if result.truncated {
        eprintln!("interrupted: partial results written");
    }
    let failures: u64 = result.cells.iter().map(|c| c.stats.verify_failures).sum();
    if failures > 0 {
        eprintln!("{failures} per-trial invariant violations");
    }
    Ok(failures == 0)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, result: &SimResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record([
        "ebn0_db", "iters", "frames", "ger", "wer", "ber", "lambda", "ci_low", "ci_high", "mean_iters", "edge_ops",
    ])
    .map_err(csv_err)?;
    for c in &result.cells {
        let st = &c.stats;
        let ci = st.wer_interval(result.n);
        w.write_record([
            c.ebn0_db.to_string(),
            c.iterations.to_string(),
            st.frames.to_string(),
            opt(st.ger()),
            opt(st.wer(result.n)),
            opt(st.ber()),
            opt(st.lambda()),
            opt(ci.map(|x| x.0)),
            opt(ci.map(|x| x.1)),
            opt(st.mean_iterations()),
            st.edge_ops.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w, result.truncated)
}

fn write_baseline_csv(path: &Path, result: &SimResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["ebn0_db", "composites", "wer", "ci_low", "ci_high"]).map_err(csv_err)?;
    for b in &result.baseline {
        let ci = b.stats.interval();
        w.write_record([
            b.ebn0_db.to_string(),
            b.stats.composites.to_string(),
            opt(b.stats.wer()),
            opt(ci.map(|x| x.0)),
            opt(ci.map(|x| x.1)),
        ])
        .map_err(csv_err)?;
    }
    finish(w, result.truncated)
}

fn finish(w: csv::Writer<File>, truncated: bool) -> Result<()> {
    let mut file = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    if truncated {
        writeln!(file, "# truncated")?;
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.into())
}
