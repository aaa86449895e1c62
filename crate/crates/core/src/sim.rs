//! Monte Carlo estimation of GER, WER, BER and decoder statistics.
//!
//! Trial `t` at a given Eb/N0 always draws its streams and noise from the
//! same ChaCha8 substream, whichever worker runs it, and every iteration
//! setting at that Eb/N0 sees the same noise. Cells stop at batch boundaries
//! on a fixed batch schedule, and counters are integers merged by addition,
//! so a result does not depend on the thread count.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{awgn, llr, sigma_for, trial_rng};
use crate::cyclic::{encode_binary, MldOracle, Mode, MLD_MAX_N};
use crate::decoder::{decode_global, DecoderGraph, MsaParams};
use crate::error::{Error, Result};
use crate::txrx::{bpsk, FfOfdm, GlobalWord, StreamBlock};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

const FIRST_BATCH: u64 = 32;
const MAX_BATCH: u64 = 1 << 14;

/// Keeps baseline noise apart from the joint-decoding noise of the same trial.
const BASELINE_TAG: u64 = 0x6261_7365_6c69_6e65;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub ebn0_db: Vec<f64>,
    pub iterations: Vec<usize>,
    pub scale: f64,
    pub saturation: Option<f64>,
    pub max_frames: u64,
    /// Global errors after which a cell stops.
    pub target_errors: u64,
    pub seed: u64,
    /// Also estimate the independent hard-decision MLD baseline.
    pub baseline: bool,
    /// Check decoder and layer-equivalence invariants on every trial.
    pub verify: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            ebn0_db: vec![0.0],
            iterations: vec![10],
            scale: 0.625,
            saturation: None,
            max_frames: 10_000,
            target_errors: 100,
            seed: 1,
            baseline: false,
            verify: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() {
            return Err(Error::config("channel.ebn0_db", "at least one point is required"));
        }
        if let Some(x) = self.ebn0_db.iter().find(|x| !x.is_finite()) {
            return Err(Error::config("channel.ebn0_db", format!("{x} is not finite")));
        }
        if self.iterations.is_empty() {
            return Err(Error::config("decoder.iterations", "at least one value is required"));
        }
        if self.iterations.contains(&0) {
            return Err(Error::config("decoder.iterations", "must be positive"));
        }
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(Error::config("decoder.scale", "must lie in (0, 1]"));
        }
        if let Some(s) = self.saturation {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::config("decoder.saturation", "must be positive and finite"));
            }
        }
        if self.max_frames == 0 {
            return Err(Error::config("sim.max_frames", "must be positive"));
        }
        if self.target_errors == 0 {
            return Err(Error::config("sim.target_errors", "must be positive"));
        }
        Ok(())
    }

    fn params(&self, iterations: usize) -> MsaParams {
        MsaParams {
            max_iterations: iterations,
            scale: self.scale,
            saturation: self.saturation,
            early_stop: true,
        }
    }
}

/// Counters from one decoded frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialRecord {
    pub global_error: bool,
    pub composite_errors: u32,
    pub bit_errors: u64,
    /// Iterations of the slowest layer.
    pub iterations: u32,
    /// Iterations summed over the s layers.
    pub layer_iterations: u64,
    pub converged: bool,
    pub edge_ops: u64,
    pub verify_failures: u32,
}

/// Counters from one baseline trial of n independently decoded composites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BaselineRecord {
    pub composites: u64,
    pub composite_errors: u64,
}

/// Integer counters of one (Eb/N0, iterations) cell.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CellStats {
    pub frames: u64,
    pub global_errors: u64,
    pub composite_errors: u64,
    pub bit_errors: u64,
    pub info_bits: u64,
    pub layer_iterations: u64,
    pub edge_ops: u64,
    pub unconverged: u64,
    pub verify_failures: u64,
    /// `iteration_hist[i]` frames whose slowest layer used i iterations.
    pub iteration_hist: Vec<u64>,
}

impl CellStats {
    pub fn record(&mut self, r: &TrialRecord, info_bits: u64) {
        self.frames += 1;
        self.global_errors += u64::from(r.global_error);
        self.composite_errors += u64::from(r.composite_errors);
        self.bit_errors += r.bit_errors;
        self.info_bits += info_bits;
        self.layer_iterations += r.layer_iterations;
        self.edge_ops += r.edge_ops;
        self.unconverged += u64::from(!r.converged);
        self.verify_failures += u64::from(r.verify_failures);
        let it = r.iterations as usize;
        if self.iteration_hist.len() <= it {
            self.iteration_hist.resize(it + 1, 0);
        }
        self.iteration_hist[it] += 1;
    }

    /// Associative, commutative combination.
    pub fn merge(mut self, other: &CellStats) -> Self {
        self.frames += other.frames;
        self.global_errors += other.global_errors;
        self.composite_errors += other.composite_errors;
        self.bit_errors += other.bit_errors;
        self.info_bits += other.info_bits;
        self.layer_iterations += other.layer_iterations;
        self.edge_ops += other.edge_ops;
        self.unconverged += other.unconverged;
        self.verify_failures += other.verify_failures;
        if self.iteration_hist.len() < other.iteration_hist.len() {
            self.iteration_hist.resize(other.iteration_hist.len(), 0);
        }
        for (a, b) in self.iteration_hist.iter_mut().zip(&other.iteration_hist) {
            *a += b;
        }
        self
    }

    pub fn ger(&self) -> Option<f64> {
        (self.frames > 0).then(|| self.global_errors as f64 / self.frames as f64)
    }

    /// Composite-word error rate over n composites per frame.
    pub fn wer(&self, n: usize) -> Option<f64> {
        (self.frames > 0).then(|| self.composite_errors as f64 / (n as u64 * self.frames) as f64)
    }

    pub fn ber(&self) -> Option<f64> {
        (self.info_bits > 0).then(|| self.bit_errors as f64 / self.info_bits as f64)
    }

    /// Mean erroneous composites per erroneous frame; absent without errors.
    pub fn lambda(&self) -> Option<f64> {
        (self.global_errors > 0).then(|| self.composite_errors as f64 / self.global_errors as f64)
    }

    /// Wilson interval for the WER.
    pub fn wer_interval(&self, n: usize) -> Option<(f64, f64)> {
        (self.frames > 0).then(|| confidence_interval(self.composite_errors, n as u64 * self.frames))
    }

    pub fn ger_interval(&self) -> Option<(f64, f64)> {
        (self.frames > 0).then(|| confidence_interval(self.global_errors, self.frames))
    }

    pub fn mean_iterations(&self) -> Option<f64> {
        (self.frames > 0).then(|| {
            let sum: u64 = self.iteration_hist.iter().enumerate().map(|(i, c)| i as u64 * c).sum();
            sum as f64 / self.frames as f64
        })
    }

    /// Lower median of the per-frame iteration counts.
    pub fn median_iterations(&self) -> Option<usize> {
        let half = self.frames.div_ceil(2);
        let mut seen = 0;
        for (i, &c) in self.iteration_hist.iter().enumerate() {
            seen += c;
            if seen >= half && seen > 0 {
                return Some(i);
            }
        }
        None
    }

    /// Operations of one iteration over all s layers, when the counters
    /// divide exactly.
    pub fn ops_per_frame_iteration(&self, s: usize) -> Option<u64> {
        let num = self.edge_ops.checked_mul(s as u64)?;
        (self.layer_iterations > 0 && num % self.layer_iterations == 0).then(|| num / self.layer_iterations)
    }

    /// Operations per stream per iteration, N/(n·s).
    pub fn ops_per_stream_iteration(&self, n: usize, s: usize) -> Option<u64> {
        let per_frame = self.ops_per_frame_iteration(s)?;
        let streams = (n * s) as u64;
        (per_frame % streams == 0).then(|| per_frame / streams)
    }

    /// WER = (λ/n)·GER checked on the integer counters, plus the bounds
    /// 1 ≤ λ ≤ n. Vacuous without global errors.
    pub fn metric_identity_holds(&self, n: usize) -> bool {
        if self.global_errors == 0 {
            return self.composite_errors == 0;
        }
        let (ce, ge, f, n) = (
            self.composite_errors as u128,
            self.global_errors as u128,
            self.frames as u128,
            n as u128,
        );
        // ce/(n f) against (ce/ge)·(1/n)·(ge/f)
        let exact = ce * (ge * n * f) == (ce * ge) * (n * f);
        exact && ge <= ce && ce <= n * ge
    }
}

/// Independent-decoding baseline counters at one Eb/N0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BaselineStats {
    pub trials: u64,
    pub composites: u64,
    pub composite_errors: u64,
}

impl BaselineStats {
    pub fn record(&mut self, r: &BaselineRecord) {
        self.trials += 1;
        self.composites += r.composites;
        self.composite_errors += r.composite_errors;
    }

    pub fn merge(mut self, other: &BaselineStats) -> Self {
        self.trials += other.trials;
        self.composites += other.composites;
        self.composite_errors += other.composite_errors;
        self
    }

    pub fn wer(&self) -> Option<f64> {
        (self.composites > 0).then(|| self.composite_errors as f64 / self.composites as f64)
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        (self.composites > 0).then(|| confidence_interval(self.composite_errors, self.composites))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub ebn0_db: f64,
    pub iterations: usize,
    pub stats: CellStats,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub ebn0_db: f64,
    pub stats: BaselineStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub n: usize,
    pub s: usize,
    pub m: usize,
    pub rate: f64,
    /// Ordered by Eb/N0, then by iteration setting.
    pub cells: Vec<CellResult>,
    pub baseline: Vec<BaselineResult>,
    /// Set when a stop request cut the run short.
    pub truncated: bool,
}

impl SimResult {
    pub fn cell(&self, ebn0_db: f64, iterations: usize) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.ebn0_db == ebn0_db && c.iterations == iterations)
    }

    pub fn baseline_at(&self, ebn0_db: f64) -> Option<&BaselineStats> {
        self.baseline.iter().find(|b| b.ebn0_db == ebn0_db).map(|b| &b.stats)
    }
}

/// Wilson score interval at 95% for `errors` out of `trials`.
pub fn confidence_interval(errors: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1, "confidence interval needs at least one trial");
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Observer hooks for a running simulation.
#[derive(Default, Clone, Copy)]
pub struct RunControl<'a> {
    /// Checked at batch boundaries.
    pub stop: Option<&'a AtomicBool>,
    /// Called after each batch with (Eb/N0, frames so far, fewest global
    /// errors among active cells).
    pub progress: Option<&'a (dyn Fn(f64, u64, u64) + Sync)>,
}

/// A system, its decoder graph and a validated configuration.
pub struct Simulator {
    system: FfOfdm,
    graph: DecoderGraph,
    oracle: Option<MldOracle>,
    config: SimConfig,
    info_bits: u64,
}

impl Simulator {
    pub fn new(system: FfOfdm, config: SimConfig) -> Result<Self> {
        config.validate()?;
        let oracle = if config.baseline {
            let spec = system.spec();
            if spec.mode() != Mode::Binary || spec.n() > MLD_MAX_N {
                return Err(Error::config(
                    "sim.baseline",
                    format!("only available for binary codes with n <= {MLD_MAX_N}"),
                ));
            }
            Some(MldOracle::new(spec)?)
        } else {
            None
        };
        let graph = DecoderGraph::from_global(system.global_check());
        let info_bits = crate::txrx::info_bits(system.spec()) as u64;
        Ok(Self {
            system,
            graph,
            oracle,
            config,
            info_bits,
        })
    }

    pub fn system(&self) -> &FfOfdm {
        &self.system
    }

    pub fn graph(&self) -> &DecoderGraph {
        &self.graph
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// One frame through the full chain, decoded once per entry of
    /// `iterations` against the same noise.
    pub fn run_trial(&self, ebn0_db: f64, iterations: &[usize], trial: u64) -> Result<Vec<TrialRecord>> {
        let spec = self.system.spec();
        let (n, s) = (spec.n(), spec.s());
        let sigma = sigma_for(ebn0_db, self.system.rate());
        let mut rng = trial_rng(self.config.seed, ebn0_db.to_bits(), trial);
        let streams = StreamBlock::random(spec, &mut rng);
        let tx = self.system.transmit(&streams)?;
        let y = awgn(&tx.bpsk, sigma, &mut rng);
        let frame = llr(&y, sigma, s)?;
        iterations
            .iter()
            .map(|&it| {
                let out = decode_global(&frame, &self.graph, &self.config.params(it))?;
                let estimate = GlobalWord::new(n, s, out.symbols.clone())?;
                let rx = self.system.receive(&estimate);
                let composite_errors = rx
                    .composites
                    .iter()
                    .zip(&tx.composites)
                    .filter(|(a, b)| **a != b.symbols)
                    .count() as u32;
                let global_error = estimate != tx.global;
                let bit_errors = streams.bit_errors(&rx.streams).iter().sum::<usize>() as u64;
                let mut verify_failures = 0;
                if global_error != (composite_errors > 0) {
                    verify_failures += 1;
                }
                if self.config.verify {
                    for layer in &out.layers {
                        if layer.converged && crate::decoder::syndrome_gf2(&layer.hard_bits, &self.graph) != 0 {
                            verify_failures += 1;
                        }
                    }
                    let gf_zero = self
                        .system
                        .global_check()
                        .syndrome_symbols(&out.symbols)
                        .iter()
                        .all(|&x| x == 0);
                    if gf_zero != out.converged() {
                        verify_failures += 1;
                    }
                }
                Ok(TrialRecord {
                    global_error,
                    composite_errors,
                    bit_errors,
                    iterations: out.iterations() as u32,
                    layer_iterations: out.layers.iter().map(|l| l.iterations_used as u64).sum(),
                    converged: out.converged(),
                    edge_ops: out.edge_ops(),
                    verify_failures,
                })
            })
            .collect()
    }

    /// n composites of s independently transmitted base codewords, each
    /// decoded by hard-decision MLD at the base code rate.
    pub fn run_baseline_trial(&self, ebn0_db: f64, trial: u64) -> Result<BaselineRecord> {
        let oracle = self
            .oracle
            .as_ref()
            .ok_or_else(|| Error::config("sim.baseline", "baseline not enabled"))?;
        let spec = self.system.spec();
        let (n, s, k) = (spec.n(), spec.s(), spec.k());
        let sigma = sigma_for(ebn0_db, k as f64 / n as f64);
        let mut rng = trial_rng(self.config.seed, ebn0_db.to_bits() ^ BASELINE_TAG, trial);
        let mut errors = 0;
        for _ in 0..n {
            let mut wrong = false;
            for _ in 0..s {
                let msg: Vec<u8> = (0..k).map(|_| rng.random::<bool>() as u8).collect();
                let word = encode_binary(&msg, self.system.generator())?;
                let y = awgn(&bpsk(&word), sigma, &mut rng);
                let hard: Vec<u8> = y.iter().map(|&v| u8::from(v < 0.0)).collect();
                wrong |= oracle.decode(&hard)? != word;
            }
            errors += u64::from(wrong);
        }
        Ok(BaselineRecord {
            composites: n as u64,
            composite_errors: errors,
        })
    }

    pub fn monte_carlo(&self) -> Result<SimResult> {
        self.monte_carlo_with(RunControl::default())
    }

    pub fn monte_carlo_with(&self, control: RunControl<'_>) -> Result<SimResult> {
        let spec = self.system.spec();
        let mut result = SimResult {
            n: spec.n(),
            s: spec.s(),
            m: spec.m(),
            rate: self.system.rate(),
            cells: Vec::new(),
            baseline: Vec::new(),
            truncated: false,
        };
        let cfg = &self.config;
        let stopped = || control.stop.is_some_and(|f| f.load(Ordering::Relaxed));
        for &ebn0 in &cfg.ebn0_db {
            let started = Instant::now();
            let cells = cfg.iterations.len();
            let mut stats = vec![CellStats::default(); cells];
            let mut seconds = vec![0.0; cells];
            let mut base = BaselineStats::default();
            let mut base_active = self.oracle.is_some();
            let mut frames = 0u64;
            let mut batch = FIRST_BATCH;
            loop {
                let active: Vec<usize> = (0..cells)
                    .filter(|&c| stats[c].global_errors < cfg.target_errors)
                    .collect();
                if frames >= cfg.max_frames || (active.is_empty() && !base_active) {
                    break;
                }
                if stopped() {
                    result.truncated = true;
                    break;
                }
                let size = batch.min(cfg.max_frames - frames);
                let iters: Vec<usize> = active.iter().map(|&c| cfg.iterations[c]).collect();
                let (part, part_base) = (frames..frames + size)
                    .into_par_iter()
                    .map(|t| {
                        let mut cell = vec![CellStats::default(); iters.len()];
                        for (c, r) in self.run_trial(ebn0, &iters, t)?.iter().enumerate() {
                            cell[c].record(r, self.info_bits);
                        }
                        let mut b = BaselineStats::default();
                        if base_active {
                            b.record(&self.run_baseline_trial(ebn0, t)?);
                        }
                        Ok::<_, Error>((cell, b))
                    })
                    .try_reduce(
                        || (vec![CellStats::default(); iters.len()], BaselineStats::default()),
                        |(a, ab), (b, bb)| {
                            let merged = a.into_iter().zip(&b).map(|(x, y)| x.merge(y)).collect();
                            Ok((merged, ab.merge(&bb)))
                        },
                    )?;
                for (slot, &c) in active.iter().enumerate() {
                    stats[c] = std::mem::take(&mut stats[c]).merge(&part[slot]);
                    seconds[c] = started.elapsed().as_secs_f64();
                }
                if base_active {
                    base = base.merge(&part_base);
                    base_active = base.composite_errors < cfg.target_errors;
                }
                frames += size;
                batch = (batch * 2).min(MAX_BATCH);
                if let Some(progress) = control.progress {
                    let fewest = active.iter().map(|&c| stats[c].global_errors).min().unwrap_or(0);
                    progress(ebn0, frames, fewest);
                }
            }
            for (c, st) in stats.into_iter().enumerate() {
                result.cells.push(CellResult {
                    ebn0_db: ebn0,
                    iterations: cfg.iterations[c],
                    stats: st,
                    wall_seconds: seconds[c],
                });
            }
            if self.oracle.is_some() {
                result.baseline.push(BaselineResult {
                    ebn0_db: ebn0,
                    stats: base,
                });
            }
            if result.truncated {
                break;
            }
        }
        Ok(result)
    }
}
