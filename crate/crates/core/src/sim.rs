//! Monte-Carlo frame error rates.
//!
//! Trials are split into shards; shard `s` draws from a ChaCha8 stream
//! seeded with the run seed and positioned on stream `s`, so a result is a
//! fixed function of `(seed, shards)` however the shards are scheduled.

use std::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{ChannelParam, DiscreteSymmetricChannel};
use crate::error::{Error, Result};
use crate::llr::{Bit, Llr, TieBreak};
use crate::polar::{encode, sc_decode_with, PolarCodeSpec, ScDecoder};

pub const DEFAULT_SHARDS: usize = 16;

/// An encoder/decoder pair over binary codewords.
pub trait Codec: Sync {
    fn info_len(&self) -> usize;
    fn code_len(&self) -> usize;
    fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>>;
    /// Estimated information bits.
    fn decode(&self, llrs: &[Llr], rng: &mut dyn RngCore) -> Result<Vec<Bit>>;
}

/// Plain polar code under successive cancellation.
#[derive(Debug, Clone)]
pub struct PolarCodec {
    pub spec: PolarCodeSpec,
    pub ties: TieBreak,
}

impl PolarCodec {
    pub fn new(spec: PolarCodeSpec) -> Self {
        PolarCodec {
            spec,
            ties: TieBreak::default(),
        }
    }
}

impl Codec for PolarCodec {
    fn info_len(&self) -> usize {
        self.spec.k()
    }

    fn code_len(&self) -> usize {
        self.spec.len()
    }

    fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        encode(info, &self.spec)
    }

    fn decode(&self, llrs: &[Llr], rng: &mut dyn RngCore) -> Result<Vec<Bit>> {
        let mut dec = ScDecoder::new(self.spec.n());
        Ok(sc_decode_with(&mut dec, llrs, &self.spec, self.ties, rng)?.info)
    }
}

impl Codec for crate::kernels::KernelCode {
    fn info_len(&self) -> usize {
        self.k()
    }

    fn code_len(&self) -> usize {
        self.len()
    }

    fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        crate::kernels::KernelCode::encode(self, info)
    }

    fn decode(&self, llrs: &[Llr], rng: &mut dyn RngCore) -> Result<Vec<Bit>> {
        crate::kernels::KernelCode::decode(self, llrs, TieBreak::default(), rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub trials: u64,
    pub errors: u64,
    pub fer: f64,
    pub ci_radius: f64,
    pub seed: u64,
}

impl McResult {
    pub fn new(trials: u64, errors: u64, seed: u64) -> Self {
        let fer = if trials == 0 {
            0.0
        } else {
            errors as f64 / trials as f64
        };
        McResult {
            trials,
            errors,
            fer,
            ci_radius: ci_radius(trials, errors),
            seed,
        }
    }
}

/// 95% radius `1.96·sqrt(σ̂²/N_T)` with `σ̂² = N_T/(N_T-1)·p̂(1-p̂)`.
pub fn ci_radius(trials: u64, errors: u64) -> f64 {
    if trials < 2 {
        return f64::INFINITY;
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let var = n / (n - 1.0) * p * (1.0 - p);
    1.96 * (var / n).sqrt()
}

/// Trials needed so the 95% radius is `rel` times a true rate `p`.
pub fn required_trials(p: f64, rel: f64) -> f64 {
    1.96 * 1.96 * (1.0 - p) / (rel * rel * p)
}

#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub shards: usize,
    /// Send uniformly random messages instead of the all-zero codeword.
    pub random_messages: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            shards: DEFAULT_SHARDS,
            random_messages: false,
        }
    }
}

/// Generator for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

/// Transmits `trials` frames over `channel` and counts frames whose decoded
/// message differs from the one sent.
pub fn run_mc<C: Codec + ?Sized>(
    codec: &C,
    channel: &DiscreteSymmetricChannel,
    trials: u64,
    seed: u64,
    opts: McOptions,
) -> Result<McResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let shards = opts.shards.max(1);
    let per = trials / shards as u64;
    let extra = trials % shards as u64;
    let counts: Vec<Result<u64>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let n = per + u64::from((s as u64) < extra);
            run_shard(codec, channel, n, &mut shard_rng(seed, s), opts.random_messages)
        })
        .collect();
    let mut errors = 0;
    for c in counts {
        errors += c?;
    }
    Ok(McResult::new(trials, errors, seed))
}

fn run_shard<C: Codec + ?Sized>(
    codec: &C,
    channel: &DiscreteSymmetricChannel,
    trials: u64,
    rng: &mut ChaCha8Rng,
    random_messages: bool,
) -> Result<u64> {
    let k = codec.info_len();
    let len = codec.code_len();
    let mut errors = 0;
    let mut info = vec![0; k];
    let mut word = vec![0; len];
    let mut llrs = vec![0.0; len];
    for _ in 0..trials {
        if random_messages {
            info.iter_mut().for_each(|b| *b = rng.random_range(0..2));
            word = codec.encode(&info)?;
        }
        for (l, &b) in llrs.iter_mut().zip(&word) {
            *l = channel.sample_llr(b, rng);
        }
        if codec.decode(&llrs, rng)? != info {
            errors += 1;
        }
    }
    Ok(errors)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    pub result: McResult,
    pub de_bound: f64,
}

/// Simulates the codec at every parameter of `family` and pairs each result
/// with `bound` evaluated on the same channel.
pub fn sweep<C, B>(
    codec: &C,
    family: ChannelParam,
    params: &[f64],
    trials: u64,
    seed: u64,
    opts: McOptions,
    bound: B,
) -> Result<Vec<SweepPoint>>
where
    C: Codec + ?Sized,
    B: Fn(&DiscreteSymmetricChannel) -> Result<f64>,
{
    params
        .iter()
        .map(|&p| {
            let channel = family.with_value(p).build()?;
            Ok(SweepPoint {
                param: p,
                result: run_mc(codec, &channel, trials, seed, opts)?,
                de_bound: bound(&channel)?,
            })
        })
        .collect()
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("param,trials,errors,fer,ci_radius,de_bound\n");
    for p in points {
        let r = &p.result;
        let _ = writeln!(
            out,
            "{},{},{},{:e},{:e},{:e}",
            p.param, r.trials, r.errors, r.fer, r.ci_radius, p.de_bound
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_bsc, ChannelParam};
    use crate::shortcodes::{ml_decode, LinearBlockCode};

    struct Repetition(LinearBlockCode);

    impl Codec for Repetition {
        fn info_len(&self) -> usize {
            1
        }
        fn code_len(&self) -> usize {
            self.0.len()
        }
        fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
            self.0.encode(info)
        }
        fn decode(&self, llrs: &[Llr], _: &mut dyn RngCore) -> Result<Vec<Bit>> {
            self.0.extract_info(&ml_decode(&self.0, llrs)?)
        }
    }

    #[test]
    fn interval_formula() {
        let r = McResult::new(10_000, 100, 0);
        assert_eq!(r.fer, 0.01);
        assert!((r.ci_radius - 1.95e-3).abs() < 1e-5);
        let t = required_trials(1e-7, 0.5);
        assert!((t / 15e7 - 1.0).abs() < 0.03, "{t}");
    }

    #[test]
    fn noiseless_and_deterministic() {
        let spec = PolarCodeSpec::new(4, [0, 1, 2, 4, 8]).unwrap();
        let codec = PolarCodec::new(spec);
        let clean = make_bsc(0.0).unwrap();
        let r = run_mc(&codec, &clean, 500, 3, McOptions::default()).unwrap();
        assert_eq!(r.errors, 0);
        let noisy = make_bsc(0.08).unwrap();
        let opts = McOptions {
            shards: 4,
            random_messages: true,
        };
        let a = run_mc(&codec, &noisy, 3000, 9, opts).unwrap();
        let b = run_mc(&codec, &noisy, 3000, 9, opts).unwrap();
        assert_eq!(a, b);
        assert!(a.errors > 0);
    }

    #[test]
    fn repetition_coverage() {
        // Exact FER of a length-5 repetition code on BSC(p): 3 or more flips.
        let p: f64 = 0.2;
        let exact: f64 = (3..=5)
            .map(|k| {
                let c = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0][k];
                c * p.powi(k as i32) * (1.0 - p).powi(5 - k as i32)
            })
            .sum();
        let codec = Repetition(LinearBlockCode::repetition(5).unwrap());
        let ch = make_bsc(p).unwrap();
        let hits = (0..100)
            .filter(|&s| {
                let r = run_mc(&codec, &ch, 2000, s, McOptions::default()).unwrap();
                (r.fer - exact).abs() <= 4.0 * r.ci_radius
            })
            .count();
        assert!(hits >= 95, "{hits}");
    }

    #[test]
    fn csv_layout() {
        let codec = PolarCodec::new(PolarCodeSpec::new(2, [0]).unwrap());
        let pts = sweep(
            &codec,
            ChannelParam::Bsc(0.0),
            &[0.01, 0.02],
            100,
            1,
            McOptions::default(),
            |_| Ok(0.5),
        )
        .unwrap();
        let csv = sweep_csv(&pts);
        assert!(csv.starts_with("param,trials,errors,fer,ci_radius,de_bound\n0.01,100,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
