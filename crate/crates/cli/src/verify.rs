//! Structural verifier battery behind `ffofdm verify`.

use std::io::BufReader;

use ffofdm::channel::LlrFrame;
use ffofdm::config::Config;
use ffofdm::cyclic::{base_matrix, BaseCodeSpec};
use ffofdm::decoder::{decode_global, syndrome_gf2, DecoderGraph, MsaParams};
use ffofdm::geometry::{
    exact_girth, girth_lower_bound, gf2_rank, rc_check, read_alist, write_alist, GlobalParityCheck,
    DENSE_LIMIT,
};
use ffofdm::txrx::{build_cascaded_ref, verify_similarity, verify_similarity_blocks, FfOfdm, StreamBlock};
use ffofdm::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

pub fn default_samples(n: usize) -> usize {
    if n <= DENSE_LIMIT {
        1000
    } else {
        20
    }
}

fn has_duplicate_roots(cfg: &Config) -> Result<bool> {
    let n = cfg.code.n;
    let mut seen = vec![false; n];
    for r in cfg.roots()? {
        if std::mem::replace(&mut seen[r % n], true) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Runs every check that applies at this scale.
pub fn run(cfg: &Config, samples: usize) -> Result<Vec<Check>> {
    if has_duplicate_roots(cfg)? {
        // the system cannot be built; inspect the defective matrix alone
        let spec = cfg.spec_unchecked()?;
        let b = base_matrix(&spec, 1)?;
        let h = GlobalParityCheck::from_exponents(b.m(), b.n(), b.exponents().concat())?;
        return Ok(structural(&spec, &h));
    }
    let system = cfg.system()?;
    let spec = system.spec().clone();
    let h = system.global_check().clone();
    let mut out = structural(&spec, &h);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.channel.seed);
    out.push(similarity(&spec, &h, samples, &mut rng)?);
    out.push(layer_equivalence(&system, samples, &mut rng)?);
    out.push(round_trip(&system, samples, &mut rng)?);
    Ok(out)
}

fn structural(spec: &BaseCodeSpec, h: &GlobalParityCheck) -> Vec<Check> {
    let (n, m) = (spec.n(), spec.m());
    let field = spec.field();
    let beta = spec.subgroup();
    let order_ok = beta.power(field, n as i64) == 1 && (1..n).all(|t| beta.power(field, t as i64) != 1);
    let mut out = vec![check(
        "subgroup",
        order_ok,
        format!("beta = alpha^{} has order {n}", beta.alpha_exponent()),
    )];

    let shape_ok = h.n_rows() == m * n
        && h.n_cols() == n * n
        && h.column_weight() == m
        && h.row_weight() == n
        && h.edge_count() == m * n * n;
    out.push(check(
        "shape",
        shape_ok,
        format!(
            "{}×{}, weights {}/{}",
            h.n_rows(),
            h.n_cols(),
            h.column_weight(),
            h.row_weight()
        ),
    ));

    let rc = rc_check(h);
    let rc_detail = match (rc.violation, rc.brute_force_passed) {
        (Some((i1, i2, j1, j2)), _) => format!("4-cycle through block rows {i1},{i2} and columns {j1},{j2}"),
        (None, Some(_)) => "no 4-cycles (algebraic and pairwise)".to_string(),
        (None, None) => "no 4-cycles (algebraic)".to_string(),
    };
    out.push(check("rc-constraint", rc.passed() && rc.methods_agree(), rc_detail));

    let bound = girth_lower_bound(h);
    let (girth_ok, girth_detail) = if n <= DENSE_LIMIT {
        let exact = exact_girth(&h.to_sparse());
        (
            bound == 6 && exact == Some(6),
            format!("lower bound {bound}, BFS girth {exact:?}"),
        )
    } else {
        (bound == 6, format!("lower bound {bound}"))
    };
    out.push(check("girth", girth_ok, girth_detail));

    let rank = gf2_rank(h);
    let expected = m * (n - 1) + 1;
    out.push(check(
        "rank",
        rank == expected,
        format!("rank {rank} (expected {expected}), dim {}", n * n - rank),
    ));

    let mut buf = Vec::new();
    let alist_ok = write_alist(&h.to_sparse(), &mut buf)
        .and_then(|_| read_alist(BufReader::new(buf.as_slice())))
        .map(|back| back == h.to_sparse())
        .unwrap_or(false);
    out.push(check("alist", alist_ok, "write/read round trip"));

    let graph = DecoderGraph::from_global(h);
    let ops = graph.ops_per_iteration();
    out.push(check(
        "complexity",
        ops == (3 * m * n * n) as u64,
        format!("{ops} ops per layer iteration, {} per stream", ops / n as u64),
    ));
    out
}

fn similarity(spec: &BaseCodeSpec, h: &GlobalParityCheck, samples: usize, rng: &mut ChaCha8Rng) -> Result<Check> {
    let (n, m) = (spec.n(), spec.m());
    let report = if n <= DENSE_LIMIT {
        verify_similarity(&build_cascaded_ref(spec)?, spec, h)
    } else {
        let blocks: Vec<(usize, usize)> = (0..samples.max(20))
            .map(|_| (rng.random_range(0..m), rng.random_range(0..n)))
            .collect();
        verify_similarity_blocks(spec, h, &blocks)
    };
    let detail = match report.mismatch {
        Some((i, j)) => format!("block ({i},{j}) differs"),
        None => format!("{} blocks equal", report.checked),
    };
    Ok(check("similarity", report.passed(), detail))
}

fn layer_equivalence(system: &FfOfdm, samples: usize, rng: &mut ChaCha8Rng) -> Result<Check> {
    let spec = system.spec();
    let (n, s) = (spec.n(), spec.s());
    let h = system.global_check();
    let graph = DecoderGraph::from_global(h);
    let q = 1u32 << s;
    let mut checked = 0;
    let mut counterexamples = 0;
    let mut test = |word: &[u16]| {
        let gf_zero = h.syndrome_symbols(word).iter().all(|&x| x == 0);
        let layers_zero = (0..s).all(|l| {
            let bits: Vec<u8> = word.iter().map(|&x| ((x >> l) & 1) as u8).collect();
            syndrome_gf2(&bits, &graph) == 0
        });
        checked += 1;
        counterexamples += usize::from(gf_zero != layers_zero);
    };
    for _ in 0..samples {
        let word: Vec<u16> = (0..n * n).map(|_| rng.random_range(0..q) as u16).collect();
        test(&word);
    }
    for _ in 0..samples.div_ceil(10) {
        let tx = system.transmit(&StreamBlock::random(spec, rng))?;
        test(tx.global.symbols());
    }
    Ok(check(
        "layer-syndrome",
        counterexamples == 0,
        format!("{checked} words, {counterexamples} counterexamples"),
    ))
}

fn round_trip(system: &FfOfdm, samples: usize, rng: &mut ChaCha8Rng) -> Result<Check> {
    let spec = system.spec();
    let graph = DecoderGraph::from_global(system.global_check());
    let params = MsaParams::new(10, 0.625);
    let frames = samples.div_ceil(10);
    let mut failures = 0;
    for _ in 0..frames {
        let streams = StreamBlock::random(spec, rng);
        let tx = system.transmit(&streams)?;
        let rx = system.receive(&tx.global);
        let frame = LlrFrame::new(tx.bpsk.iter().map(|x| 20.0 * x).collect(), spec.s())?;
        let dec = decode_global(&frame, &graph, &params)?;
        let ok = rx.streams == streams
            && dec.converged()
            && dec.iterations() == 1
            && dec.symbols == tx.global.symbols();
        failures += usize::from(!ok);
    }
    Ok(check(
        "round-trip",
        failures == 0,
        format!("{frames} frames, {failures} failures"),
    ))
}
