//! AWGN channel, Eb/N0 bookkeeping and LLR extraction.
//!
//! The noise variance follows σ² = 1 / (2·R·10^{Eb/N0/10}) with R the
//! information rate of whatever code occupies the channel. Gaussian samples
//! come from `rand_distr::StandardNormal` (ziggurat) driven by a ChaCha8
//! stream selected from (master seed, cell key, trial index), so a trial's
//! noise never depends on which worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn from_ebn0(ebn0_db: f64, rate: f64) -> Self {
        Self {
            ebn0_db,
            rate,
            sigma: sigma_for(ebn0_db, rate),
        }
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// σ for BPSK at the given Eb/N0 (dB) and code rate.
pub fn sigma_for(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Per-trial random stream. Different `cell` keys give unrelated streams.
pub fn trial_rng(master_seed: u64, cell: u64, trial: u64) -> ChaCha8Rng {
    // splitmix64 finalizer to spread (seed, cell) over the key space
    let mut z = master_seed ^ cell.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    let mut rng = ChaCha8Rng::seed_from_u64(z);
    rng.set_stream(trial);
    rng
}

/// y = x + z with z ~ N(0, σ²) i.i.d.
pub fn awgn<R: rand::Rng + ?Sized>(x: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
    x.iter()
        .map(|&xi| {
            let z: f64 = StandardNormal.sample(rng);
            xi + sigma * z
        })
        .collect()
}

/// Channel LLRs for the s·n² transmitted bits, symbol-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    values: Vec<f64>,
    s: usize,
}

impl LlrFrame {
    pub fn new(values: Vec<f64>, s: usize) -> Result<Self> {
        if s == 0 || values.len() % s != 0 {
            return Err(Error::LengthMismatch {
                what: "LLR frame",
                expected: s.max(1) * (values.len() / s.max(1)),
                found: values.len(),
            });
        }
        Ok(Self { values, s })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of symbols (n²).
    pub fn symbols(&self) -> usize {
        self.values.len() / self.s
    }

    /// L_l[t] = LLR of bit l of symbol t.
    pub fn layer(&self, l: usize) -> Vec<f64> {
        self.values.iter().skip(l).step_by(self.s).copied().collect()
    }

    /// Inverse of taking every layer view.
    pub fn from_layers(layers: &[Vec<f64>]) -> Result<Self> {
        let s = layers.len();
        let len = layers.first().map_or(0, Vec::len);
        if let Some(bad) = layers.iter().find(|v| v.len() != len) {
            return Err(Error::LengthMismatch {
                what: "LLR layer",
                expected: len,
                found: bad.len(),
            });
        }
        let values = (0..len).flat_map(|t| layers.iter().map(move |v| v[t])).collect();
        Self::new(values, s)
    }
}

/// L = 2y/σ²; positive values favour bit 0.
pub fn llr(y: &[f64], sigma: f64, s: usize) -> Result<LlrFrame> {
    let scale = 2.0 / (sigma * sigma);
    LlrFrame::new(y.iter().map(|&v| scale * v).collect(), s)
}

/// The s strided sub-vectors of a frame holding n² symbols.
pub fn layer_views(frame: &LlrFrame, s: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    if frame.s != s || frame.values.len() != s * n * n {
        return Err(Error::LengthMismatch {
            what: "LLR frame",
            expected: s * n * n,
            found: frame.values.len(),
        });
    }
    Ok((0..s).map(|l| frame.layer(l)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_convention() {
        let p = ChannelParams::from_ebn0(0.0, 0.5);
        assert!((p.variance() - 1.0).abs() < 1e-15);
        let p = ChannelParams::from_ebn0(3.0, 14364.0 / 16129.0);
        let expect = 1.0 / (2.0 * 14364.0 / 16129.0 * 10f64.powf(0.3));
        assert!((p.variance() - expect).abs() < 1e-15);
    }

    #[test]
    fn vanishing_noise() {
        let x = [1.0, -1.0, 1.0];
        let mut rng = trial_rng(1, 0, 0);
        let y = awgn(&x, 1e-12, &mut rng);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-9);
        }
        let y = awgn(&x, 0.0, &mut rng);
        assert_eq!(y, x);
    }

    #[test]
    fn noise_moments() {
        let sigma = 0.8;
        let mut rng = trial_rng(42, 3, 0);
        let y = awgn(&vec![0.0; 1_000_000], sigma, &mut rng);
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 * sigma / 1e3, "mean {mean}");
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn substreams_reproducible_and_distinct() {
        let x = vec![1.0; 64];
        let a = awgn(&x, 1.0, &mut trial_rng(5, 1, 17));
        let b = awgn(&x, 1.0, &mut trial_rng(5, 1, 17));
        let c = awgn(&x, 1.0, &mut trial_rng(5, 1, 18));
        let d = awgn(&x, 1.0, &mut trial_rng(5, 2, 17));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn llr_examples() {
        assert_eq!(llr(&[1.0], 1.0, 1).unwrap().values(), &[2.0]);
        assert_eq!(llr(&[0.0], 1.0, 1).unwrap().values(), &[0.0]);
        let sigma = 0.5f64.sqrt();
        let l = llr(&[-0.5], sigma, 1).unwrap().values()[0];
        assert!((l + 2.0).abs() < 1e-12);
    }

    #[test]
    fn llr_odd_and_linear() {
        let y = [0.3, -1.7, 2.2, 0.0];
        let a = llr(&y, 0.9, 1).unwrap();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let b = llr(&neg, 0.9, 1).unwrap();
        let scaled: Vec<f64> = y.iter().map(|v| 2.5 * v).collect();
        let c = llr(&scaled, 0.9, 1).unwrap();
        for i in 0..y.len() {
            assert_eq!(a.values()[i], -b.values()[i]);
            assert!((2.5 * a.values()[i] - c.values()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn layer_view_examples() {
        let f = LlrFrame::new((0..49).map(f64::from).collect(), 1).unwrap();
        assert_eq!(layer_views(&f, 1, 7).unwrap()[0], f.values());
        let f = LlrFrame::new((0..147).map(f64::from).collect(), 3).unwrap();
        let views = layer_views(&f, 3, 7).unwrap();
        assert_eq!(views[2][0], f.values()[2]);
        assert_eq!(views[1][5], f.values()[16]);
        assert_eq!(LlrFrame::from_layers(&views).unwrap(), f);
        assert!(layer_views(&f, 3, 6).is_err());
        assert!(LlrFrame::new(vec![0.0; 5], 3).is_err());
    }
}
