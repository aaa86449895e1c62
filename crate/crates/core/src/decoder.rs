//! Flooding scaled min-sum decoding of the binary layers.
//!
//! Each of the s layers of a received frame is decoded independently against
//! the same binary matrix; the hard decisions are recomposed into a GF(2^s)
//! word afterwards. Accounting is fixed at three real operations per edge per
//! iteration, so one layer iteration costs 3·|E| operations.

use rayon::prelude::*;

use crate::channel::LlrFrame;
use crate::cyclic::compose_streams;
use crate::error::{Error, Result};
use crate::galois::Symbol;
use crate::geometry::{GlobalParityCheck, SparseBinaryMatrix};

/// Real-number operations charged per edge per iteration.
pub const OPS_PER_EDGE: u64 = 3;

/// Above this many edges the layers of a frame are decoded on the thread pool.
const PARALLEL_EDGE_THRESHOLD: usize = 1 << 15;

/// Tanner graph in compressed adjacency form. Edges are numbered check by
/// check.
#[derive(Debug, Clone)]
pub struct DecoderGraph {
    check_offsets: Vec<usize>,
    edge_var: Vec<usize>,
    var_offsets: Vec<usize>,
    var_edges: Vec<usize>,
}

impl DecoderGraph {
    pub fn from_sparse(h: &SparseBinaryMatrix) -> Self {
        Self::from_rows(h.n_cols(), h.rows().iter().map(|r| r.iter().copied()))
    }

    pub fn from_global(h: &GlobalParityCheck) -> Self {
        Self::from_rows(h.n_cols(), (0..h.n_rows()).map(|r| h.row_support(r)))
    }

    fn from_rows<I, R>(n_vars: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = usize>,
    {
        let mut check_offsets = vec![0];
        let mut edge_var = Vec::new();
        for row in rows {
            edge_var.extend(row);
            check_offsets.push(edge_var.len());
        }
        let mut var_deg = vec![0usize; n_vars];
        for &v in &edge_var {
            var_deg[v] += 1;
        }
        let mut var_offsets = vec![0; n_vars + 1];
        for v in 0..n_vars {
            var_offsets[v + 1] = var_offsets[v] + var_deg[v];
        }
        let mut fill = var_offsets.clone();
        let mut var_edges = vec![0; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        Self {
            check_offsets,
            edge_var,
            var_offsets,
            var_edges,
        }
    }

    pub fn n_checks(&self) -> usize {
        self.check_offsets.len() - 1
    }

    pub fn n_vars(&self) -> usize {
        self.var_offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_offsets[c + 1] - self.check_offsets[c]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_offsets[v + 1] - self.var_offsets[v]
    }

    /// Operations charged for one iteration on one layer.
    pub fn ops_per_iteration(&self) -> u64 {
        OPS_PER_EDGE * self.n_edges() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsaParams {
    pub max_iterations: usize,
    pub scale: f64,
    /// Clamp on variable-to-check magnitudes; `None` leaves messages unbounded.
    pub saturation: Option<f64>,
    /// Stop as soon as the hard decision satisfies every check.
    pub early_stop: bool,
}

impl MsaParams {
    pub fn new(max_iterations: usize, scale: f64) -> Self {
        Self {
            max_iterations,
            scale,
            saturation: None,
            early_stop: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub hard_bits: Vec<u8>,
    pub converged: bool,
    pub iterations_used: usize,
    pub edge_ops: u64,
}

/// Number of unsatisfied checks.
pub fn syndrome_gf2(bits: &[u8], graph: &DecoderGraph) -> usize {
    (0..graph.n_checks())
        .filter(|&c| {
            graph.edge_var[graph.check_offsets[c]..graph.check_offsets[c + 1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ bits[v])
                == 1
        })
        .count()
}

/// Scaled min-sum on one binary layer.
pub fn decode_layer(llr: &[f64], graph: &DecoderGraph, params: &MsaParams) -> Result<DecodeResult> {
    if llr.len() != graph.n_vars() {
        return Err(Error::LengthMismatch {
            what: "layer LLRs",
            expected: graph.n_vars(),
            found: llr.len(),
        });
    }
    let clamp = |x: f64| match params.saturation {
        Some(s) => x.clamp(-s, s),
        None => x,
    };
    let mut v2c: Vec<f64> = graph.edge_var.iter().map(|&v| clamp(llr[v])).collect();
    let mut c2v = vec![0.0; graph.n_edges()];
    let mut hard: Vec<u8> = llr.iter().map(|&l| u8::from(l < 0.0)).collect();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iterations {
        iterations += 1;
        // check nodes
        for c in 0..graph.n_checks() {
            let edges = graph.check_offsets[c]..graph.check_offsets[c + 1];
            let mut parity = false;
            let (mut min1, mut min2, mut arg1) = (f64::INFINITY, f64::INFINITY, usize::MAX);
            for e in edges.clone() {
                let x = v2c[e];
                parity ^= x < 0.0;
                let mag = x.abs();
                if mag < min1 {
                    min2 = min1;
                    min1 = mag;
                    arg1 = e;
                } else if mag < min2 {
                    min2 = mag;
                }
            }
            for e in edges {
                let mag = if e == arg1 { min2 } else { min1 };
                let negative = parity ^ (v2c[e] < 0.0);
                let out = params.scale * mag;
                c2v[e] = if negative { -out } else { out };
            }
        }
        // variable nodes and hard decision
        for v in 0..graph.n_vars() {
            let edges = &graph.var_edges[graph.var_offsets[v]..graph.var_offsets[v + 1]];
            let total = llr[v] + edges.iter().map(|&e| c2v[e]).sum::<f64>();
            for &e in edges {
                v2c[e] = clamp(total - c2v[e]);
            }
            hard[v] = u8::from(total < 0.0);
        }
        if params.early_stop && syndrome_gf2(&hard, graph) == 0 {
            converged = true;
            break;
        }
    }
    if !converged {
        converged = syndrome_gf2(&hard, graph) == 0;
    }
    Ok(DecodeResult {
        hard_bits: hard,
        converged,
        iterations_used: iterations,
        edge_ops: graph.ops_per_iteration() * iterations as u64,
    })
}

/// Outcome of decoding all s layers of a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDecode {
    /// Recomposed GF(2^s) estimate.
    pub symbols: Vec<Symbol>,
    pub layers: Vec<DecodeResult>,
}

impl GlobalDecode {
    pub fn converged(&self) -> bool {
        self.layers.iter().all(|r| r.converged)
    }

    pub fn edge_ops(&self) -> u64 {
        self.layers.iter().map(|r| r.edge_ops).sum()
    }

    /// Iterations of the slowest layer.
    pub fn iterations(&self) -> usize {
        self.layers.iter().map(|r| r.iterations_used).max().unwrap_or(0)
    }
}

/// Decodes every layer independently and recomposes the estimate.
pub fn decode_global(frame: &LlrFrame, graph: &DecoderGraph, params: &MsaParams) -> Result<GlobalDecode> {
    if frame.symbols() != graph.n_vars() {
        return Err(Error::LengthMismatch {
            what: "LLR frame symbols",
            expected: graph.n_vars(),
            found: frame.symbols(),
        });
    }
    let run = |l: usize| decode_layer(&frame.layer(l), graph, params);
    let layers: Vec<DecodeResult> = if graph.n_edges() >= PARALLEL_EDGE_THRESHOLD {
        (0..frame.s()).into_par_iter().map(run).collect::<Result<_>>()?
    } else {
        (0..frame.s()).map(run).collect::<Result<_>>()?
    };
    let bits: Vec<Vec<u8>> = layers.iter().map(|r| r.hard_bits.clone()).collect();
    let symbols = compose_streams(&bits)?;
    Ok(GlobalDecode { symbols, layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::{base_matrix, BaseCodeSpec, Mode};
    use crate::galois::GaloisField;
    use crate::geometry::cpm_dispersion;
    use crate::txrx::{FfOfdm, StreamBlock};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn desk() -> FfOfdm {
        let f = Arc::new(GaloisField::with_default_poly(3).unwrap());
        let g = f.element_of_order(7).unwrap();
        FfOfdm::new(BaseCodeSpec::new(f, g, vec![1, 2, 4], Mode::Binary).unwrap()).unwrap()
    }

    fn strong(bits: &[u8], mag: f64) -> Vec<f64> {
        bits.iter().map(|&b| if b == 0 { mag } else { -mag }).collect()
    }

    #[test]
    fn graph_degrees() {
        let sys = desk();
        let g = DecoderGraph::from_global(sys.global_check());
        assert_eq!((g.n_checks(), g.n_vars(), g.n_edges()), (21, 49, 147));
        assert!((0..21).all(|c| g.check_degree(c) == 7));
        assert!((0..49).all(|v| g.var_degree(v) == 3));
        let g2 = DecoderGraph::from_sparse(&sys.global_check().to_sparse());
        assert_eq!(g.edge_var, g2.edge_var);
        assert_eq!(g.var_edges, g2.var_edges);
    }

    #[test]
    fn syndrome_examples() {
        let sys = desk();
        let g = DecoderGraph::from_global(sys.global_check());
        assert_eq!(syndrome_gf2(&[0; 49], &g), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tx = sys.transmit(&StreamBlock::random(sys.spec(), &mut rng)).unwrap();
        for layer in tx.global.layers() {
            assert_eq!(syndrome_gf2(&layer, &g), 0);
            for flip in [0, 13, 48] {
                let mut bad = layer.clone();
                bad[flip] ^= 1;
                assert_eq!(syndrome_gf2(&bad, &g), 3);
            }
        }
    }

    #[test]
    fn noiseless_converges_in_one_iteration() {
        let sys = desk();
        let g = DecoderGraph::from_global(sys.global_check());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tx = sys.transmit(&StreamBlock::random(sys.spec(), &mut rng)).unwrap();
        for layer in tx.global.layers() {
            let r = decode_layer(&strong(&layer, 20.0), &g, &MsaParams::new(10, 0.625)).unwrap();
            assert!(r.converged);
            assert_eq!(r.iterations_used, 1);
            assert_eq!(r.hard_bits, layer);
            assert_eq!(r.edge_ops, 3 * 3 * 49);
        }
    }

    #[test]
    fn corrects_single_weak_error() {
        let sys = desk();
        let g = DecoderGraph::from_global(sys.global_check());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let tx = sys.transmit(&StreamBlock::random(sys.spec(), &mut rng)).unwrap();
            let layer = tx.global.layer(rng.random_range(0..3));
            let flip = rng.random_range(0..49);
            let mut l = strong(&layer, 4.0);
            l[flip] = -l[flip] * 0.25;
            let r = decode_layer(&l, &g, &MsaParams::new(10, 0.625)).unwrap();
            assert!(r.converged);
            assert!(r.iterations_used <= 10);
            assert_eq!(r.hard_bits, layer);
        }
    }

    #[test]
    fn edge_ops_per_iteration() {
        let f = Arc::new(GaloisField::with_default_poly(7).unwrap());
        let sg = f.element_of_order(127).unwrap();
        let spec = BaseCodeSpec::new(f, sg, crate::cyclic::bch_roots(5, 127), Mode::Binary).unwrap();
        let h = cpm_dispersion(&base_matrix(&spec, 1).unwrap()).unwrap();
        let g = DecoderGraph::from_global(&h);
        assert_eq!(g.ops_per_iteration(), 3 * 14 * 127 * 127);
        // pure noise never converges; all max iterations are charged
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let llr: Vec<f64> = (0..16129).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = decode_layer(&llr, &g, &MsaParams::new(3, 0.625)).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations_used, 3);
        assert_eq!(r.edge_ops, 3 * 3 * 14 * 16129);
    }

    #[test]
    fn global_decode_recomposes() {
        let sys = desk();
        let g = DecoderGraph::from_global(sys.global_check());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let tx = sys.transmit(&StreamBlock::random(sys.spec(), &mut rng)).unwrap();
        let frame = LlrFrame::new(tx.bpsk.iter().map(|&x| 8.0 * x).collect(), 3).unwrap();
        let out = decode_global(&frame, &g, &MsaParams::new(10, 0.75)).unwrap();
        assert!(out.converged());
        assert_eq!(out.symbols, tx.global.symbols());
        assert_eq!(out.edge_ops(), 3 * 3 * 3 * 49);
        assert!(sys.global_check().syndrome_symbols(&out.symbols).iter().all(|&x| x == 0));
    }

    #[test]
    fn deterministic_and_codeword_symmetric() {
        let sys = desk();
        let g = DecoderGraph::from_global(sys.global_check());
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for early_stop in [false, true] {
            let params = MsaParams {
                early_stop,
                ..MsaParams::new(7, 0.625)
            };
            for _ in 0..50 {
                let llr: Vec<f64> = (0..49).map(|_| rng.random_range(-3.0..3.0)).collect();
                let a = decode_layer(&llr, &g, &params).unwrap();
                let b = decode_layer(&llr, &g, &params).unwrap();
                assert_eq!(a, b);
                // flipping signs on the support of a codeword shifts the decision by it
                let tx = sys.transmit(&StreamBlock::random(sys.spec(), &mut rng)).unwrap();
                let cw = tx.global.layer(1);
                let flipped: Vec<f64> = llr.iter().zip(&cw).map(|(x, &c)| if c == 1 { -x } else { *x }).collect();
                let c = decode_layer(&flipped, &g, &params).unwrap();
                assert_eq!(a.iterations_used, c.iterations_used);
                for ((x, y), z) in a.hard_bits.iter().zip(&c.hard_bits).zip(&cw) {
                    assert_eq!(x ^ z, *y);
                }
            }
        }
    }

    #[test]
    fn zero_llr_is_bit_zero_and_saturation() {
        let sys = desk();
        let g = DecoderGraph::from_global(sys.global_check());
        let r = decode_layer(&[0.0; 49], &g, &MsaParams::new(5, 1.0)).unwrap();
        assert!(r.hard_bits.iter().all(|&b| b == 0));
        assert!(r.converged);
        let params = MsaParams {
            saturation: Some(2.0),
            ..MsaParams::new(5, 0.625)
        };
        let r = decode_layer(&[100.0; 49], &g, &params).unwrap();
        assert!(r.converged);
        assert!(decode_layer(&[0.0; 48], &g, &params).is_err());
    }
}
