//! Binary-input symmetric memoryless channels with finite output alphabets.
//!
//! A channel is stored through `W(y|0)` alone; symmetry gives
//! `W(y|1) = W(-y|0)`, so the alphabet must be closed under negation.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use rand::Rng;
use statrs::function::erf::erfc;

use crate::density::{project, LlrGrid, QuantizedDensity};
use crate::error::{Error, Result};
use crate::llr::{Bit, Llr};

/// Default AWGN discretization: odd so that one bin straddles 0.
pub const AWGN_BINS: usize = 513;
pub const AWGN_RANGE: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSymmetricChannel {
    name: String,
    /// Output symbols in increasing order.
    symbols: Vec<f64>,
    w0: Vec<f64>,
    llr: Vec<Llr>,
    /// `mirror[k]` is the index of `-symbols[k]`.
    mirror: Vec<usize>,
    cdf: Vec<f64>,
}

impl DiscreteSymmetricChannel {
    /// Builds a channel from `(y, W(y|0))` pairs.
    pub fn new(name: impl Into<String>, outputs: Vec<(f64, f64)>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::Empty("channel needs at least one output"));
        }
        let mut outputs = outputs;
        for &(y, w) in &outputs {
            if !y.is_finite() {
                return Err(Error::InvalidParameter(format!("output symbol {y} must be finite")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidDistribution(format!("W({y}|0) = {w}")));
            }
        }
        outputs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if outputs.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(Error::InvalidParameter("duplicate output symbol".into()));
        }
        let total: f64 = outputs.iter().map(|o| o.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("W(.|0) sums to {total}")));
        }
        let symbols: Vec<f64> = outputs.iter().map(|o| o.0).collect();
        let w0: Vec<f64> = outputs.iter().map(|o| o.1 / total).collect();
        let n = symbols.len();
        let mirror: Vec<usize> = (0..n).map(|k| n - 1 - k).collect();
        for k in 0..n {
            // Sorted and closed under negation means index k pairs with n-1-k.
            let (y, z) = (symbols[k], symbols[mirror[k]]);
            if y != -z && !(y == 0.0 && z == 0.0) {
                return Err(Error::NotSymmetric(format!("symbol {y} has no mirror image")));
            }
        }
        // Evaluate one side of each mirror pair so the LLRs are exactly odd.
        let llr = (0..n)
            .map(|k| {
                if k >= mirror[k] {
                    log_ratio(w0[k], w0[mirror[k]])
                } else {
                    -log_ratio(w0[mirror[k]], w0[k])
                }
            })
            .collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = w0
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        *cdf.last_mut().expect("non-empty") = f64::INFINITY;
        Ok(DiscreteSymmetricChannel {
            name: name.into(),
            symbols,
            w0,
            llr,
            mirror,
            cdf,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `(y, W(y|0))` in increasing symbol order.
    pub fn outputs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.symbols.iter().copied().zip(self.w0.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `ln(W(y|0) / W(-y|0))`.
    pub fn llr_of(&self, y: f64) -> Result<Llr> {
        self.index_of(y).map(|k| self.llr[k])
    }

    fn index_of(&self, y: f64) -> Result<usize> {
        self.symbols
            .binary_search_by(|s| s.total_cmp(&y))
            .or_else(|_| {
                // -0.0 and 0.0 compare differently under total order.
                if y == 0.0 {
                    self.symbols.iter().position(|s| *s == 0.0).ok_or(())
                } else {
                    Err(())
                }
            })
            .map_err(|_| Error::UnknownSymbol(y))
    }

    /// Probability of a wrong hard decision on one channel use, counting
    /// zero-LLR outputs as half errors.
    pub fn bit_error(&self) -> f64 {
        self.w0
            .iter()
            .zip(&self.llr)
            .map(|(w, l)| {
                if *l < 0.0 {
                    *w
                } else if *l == 0.0 {
                    0.5 * w
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Density of the channel LLR given that 0 was sent, projected on `grid`.
    pub fn initial_density(&self, grid: LlrGrid) -> QuantizedDensity {
        let points: Vec<(f64, f64)> = self.llr.iter().copied().zip(self.w0.iter().copied()).collect();
        project(&points, grid).expect("channel law is a valid distribution")
    }

    /// Draws an output for the transmitted `bit`, returning it with its LLR.
    pub fn sample<R: Rng + ?Sized>(&self, bit: Bit, rng: &mut R) -> (f64, Llr) {
        let k = self.sample_index(bit, rng);
        (self.symbols[k], self.llr[k])
    }

    /// LLR of a fresh output for `bit`.
    #[inline]
    pub fn sample_llr<R: Rng + ?Sized>(&self, bit: Bit, rng: &mut R) -> Llr {
        self.llr[self.sample_index(bit, rng)]
    }

    #[inline]
    fn sample_index<R: Rng + ?Sized>(&self, bit: Bit, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|c| *c <= u);
        if bit == 0 {
            k
        } else {
            self.mirror[k]
        }
    }

    /// Channel file: one `symbol w0` line per output.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.name);
        for (y, w) in self.outputs() {
            out.push_str(&format!("{y} {w:e}\n"));
        }
        out
    }

    pub fn from_text<R: BufRead>(name: &str, reader: R) -> Result<Self> {
        let mut outputs = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(y), Some(w), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::parse(no + 1, "expected `symbol w0`"));
            };
            let y = y.parse::<f64>().map_err(|e| Error::parse(no + 1, e.to_string()))?;
            let w = w.parse::<f64>().map_err(|e| Error::parse(no + 1, e.to_string()))?;
            outputs.push((y, w));
        }
        DiscreteSymmetricChannel::new(name, outputs)
    }
}

fn log_ratio(a: f64, b: f64) -> Llr {
    match (a == 0.0, b == 0.0) {
        (true, true) => 0.0,
        (false, true) => f64::INFINITY,
        (true, false) => f64::NEG_INFINITY,
        (false, false) => (a / b).ln(),
    }
}

/// Binary symmetric channel with crossover probability `p`.
pub fn make_bsc(p: f64) -> Result<DiscreteSymmetricChannel> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidParameter(format!("BSC crossover {p} outside [0, 1/2]")));
    }
    DiscreteSymmetricChannel::new(format!("bsc:{p}"), vec![(1.0, 1.0 - p), (-1.0, p)])
}

/// Binary erasure channel; the erasure is output symbol 0.
pub fn make_bec(p: f64) -> Result<DiscreteSymmetricChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("BEC erasure {p} outside [0, 1]")));
    }
    DiscreteSymmetricChannel::new(format!("bec:{p}"), vec![(1.0, 1.0 - p), (0.0, p), (-1.0, 0.0)])
}

/// Noise variance for BPSK (`±1`) at the given SNR in dB.
pub fn awgn_sigma2(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// BPSK over AWGN quantized to `bins` equal bins on `[-range, range]` plus
/// the two tails; each bin is represented by its midpoint (tails by
/// `±(range + width/2)`).
pub fn discretize_awgn(snr_db: f64, bins: usize, range: f64) -> Result<DiscreteSymmetricChannel> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!("SNR {snr_db} dB")));
    }
    if bins == 0 || bins.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("bin count {bins} must be odd")));
    }
    if !(range.is_finite() && range > 0.0) {
        return Err(Error::InvalidParameter(format!("range {range} must be positive")));
    }
    let sigma = awgn_sigma2(snr_db).sqrt();
    let scale = 1.0 / (sigma * std::f64::consts::SQRT_2);
    // Pr{Y > t | mean +1}, accurate on both sides of the mean.
    let upper = |t: f64| {
        if t.is_infinite() {
            return if t > 0.0 { 0.0 } else { 1.0 };
        }
        0.5 * erfc((t - 1.0) * scale)
    };
    let lower = |t: f64| {
        if t.is_infinite() {
            return if t > 0.0 { 1.0 } else { 0.0 };
        }
        0.5 * erfc((1.0 - t) * scale)
    };
    let mass = |a: f64, b: f64| {
        if a >= 1.0 {
            upper(a) - upper(b)
        } else if b <= 1.0 {
            lower(b) - lower(a)
        } else {
            1.0 - upper(b) - lower(a)
        }
    };
    let width = 2.0 * range / bins as f64;
    let edge = |k: usize| -range + k as f64 * width;
    let mut outputs = Vec::with_capacity(bins + 2);
    outputs.push((-range - 0.5 * width, mass(f64::NEG_INFINITY, -range)));
    for k in 0..bins {
        let mid = if 2 * k + 1 == bins {
            0.0
        } else {
            -range + (k as f64 + 0.5) * width
        };
        outputs.push((mid, mass(edge(k), edge(k + 1))));
    }
    outputs.push((range + 0.5 * width, mass(range, f64::INFINITY)));
    // Mirror-pair midpoints so the alphabet is exactly closed under negation.
    let n = outputs.len();
    for k in 0..n / 2 {
        outputs[k].0 = -outputs[n - 1 - k].0;
    }
    let total: f64 = outputs.iter().map(|o| o.1).sum();
    outputs.iter_mut().for_each(|o| o.1 /= total);
    DiscreteSymmetricChannel::new(format!("awgn:{snr_db}"), outputs)
}

/// A named channel family member, e.g. `bsc:0.06`, `bec:0.5`, `awgn:3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelParam {
    Bsc(f64),
    Bec(f64),
    Awgn(f64),
}

impl ChannelParam {
    pub fn build(&self) -> Result<DiscreteSymmetricChannel> {
        match *self {
            ChannelParam::Bsc(p) => make_bsc(p),
            ChannelParam::Bec(p) => make_bec(p),
            ChannelParam::Awgn(snr) => discretize_awgn(snr, AWGN_BINS, AWGN_RANGE),
        }
    }

    /// The numeric parameter (probability or SNR in dB).
    pub fn value(&self) -> f64 {
        match *self {
            ChannelParam::Bsc(v) | ChannelParam::Bec(v) | ChannelParam::Awgn(v) => v,
        }
    }

    /// Same family with another parameter value.
    pub fn with_value(&self, v: f64) -> ChannelParam {
        match self {
            ChannelParam::Bsc(_) => ChannelParam::Bsc(v),
            ChannelParam::Bec(_) => ChannelParam::Bec(v),
            ChannelParam::Awgn(_) => ChannelParam::Awgn(v),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ChannelParam::Bsc(_) => "bsc",
            ChannelParam::Bec(_) => "bec",
            ChannelParam::Awgn(_) => "awgn",
        }
    }
}

impl fmt::Display for ChannelParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family(), self.value())
    }
}

impl FromStr for ChannelParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("channel `{s}` is not `kind:value`")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("channel parameter `{value}`")))?;
        let param = match kind.trim().to_ascii_lowercase().as_str() {
            "bsc" => ChannelParam::Bsc(v),
            "bec" => ChannelParam::Bec(v),
            "awgn" => ChannelParam::Awgn(v),
            other => return Err(Error::InvalidParameter(format!("unknown channel kind `{other}`"))),
        };
        // Validate the range eagerly.
        match param {
            ChannelParam::Bsc(p) if !(0.0..=0.5).contains(&p) => {
                Err(Error::InvalidParameter(format!("BSC crossover {p} outside [0, 1/2]")))
            }
            ChannelParam::Bec(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::InvalidParameter(format!("BEC erasure {p} outside [0, 1]")))
            }
            ChannelParam::Awgn(s) if !s.is_finite() => Err(Error::InvalidParameter(format!("SNR {s}"))),
            p => Ok(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bsc_llrs() {
        let ch = make_bsc(0.06).unwrap();
        assert!((ch.llr_of(1.0).unwrap() - (0.94f64 / 0.06).ln()).abs() < 1e-12);
        assert!((ch.llr_of(1.0).unwrap() - 2.7515).abs() < 1e-4);
        assert_eq!(ch.llr_of(-1.0).unwrap(), -ch.llr_of(1.0).unwrap());
        assert_eq!(make_bsc(0.0).unwrap().llr_of(1.0).unwrap(), f64::INFINITY);
        assert_eq!(make_bsc(0.0).unwrap().llr_of(-1.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(make_bsc(0.5).unwrap().llr_of(-1.0).unwrap(), 0.0);
        assert!(make_bsc(0.7).is_err());
        assert!(matches!(ch.llr_of(0.5), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn bec_llrs() {
        let ch = make_bec(0.3).unwrap();
        assert_eq!(ch.llr_of(1.0).unwrap(), f64::INFINITY);
        assert_eq!(ch.llr_of(0.0).unwrap(), 0.0);
        assert_eq!(ch.llr_of(-0.0).unwrap(), 0.0);
        assert_eq!(ch.llr_of(-1.0).unwrap(), f64::NEG_INFINITY);
        let g = LlrGrid::default();
        let d = make_bec(0.5).unwrap().initial_density(g);
        assert_eq!(d, QuantizedDensity::bec(g, 0.5).unwrap());
        assert_eq!(make_bec(1.0).unwrap().initial_density(g), QuantizedDensity::point(g, 0));
        assert_eq!(
            make_bec(0.0).unwrap().initial_density(g),
            QuantizedDensity::point(g, g.q() as i64)
        );
    }

    #[test]
    fn awgn_discretization() {
        assert!((awgn_sigma2(3.0) - 0.5012).abs() < 1e-4);
        for snr in [-10.0, 0.0, 3.0, 8.0] {
            let ch = discretize_awgn(snr, AWGN_BINS, AWGN_RANGE).unwrap();
            assert_eq!(ch.len(), AWGN_BINS + 2);
            let total: f64 = ch.outputs().map(|o| o.1).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for (y, _) in ch.outputs() {
                let (a, b) = (ch.llr_of(y).unwrap(), ch.llr_of(-y).unwrap());
                assert!(a == -b, "llr({y}) = {a}, llr(-y) = {b}");
            }
            assert_eq!(ch.llr_of(0.0).unwrap(), 0.0);
        }
        // Interior LLRs approach the continuous 2y/σ².
        let ch = discretize_awgn(0.0, 1001, 4.0).unwrap();
        let y = ch.outputs().map(|o| o.0).find(|y| (*y - 0.5).abs() < 0.004).unwrap();
        assert!((ch.llr_of(y).unwrap() - 2.0 * y).abs() < 1e-4);
        assert!(discretize_awgn(3.0, 512, 8.0).is_err());
        assert!(discretize_awgn(3.0, 513, -1.0).is_err());
    }

    #[test]
    fn initial_density_error_matches_raw_channel() {
        let g = LlrGrid::default();
        for ch in [
            make_bsc(0.06).unwrap(),
            make_bec(0.4).unwrap(),
            discretize_awgn(1.0, 513, 8.0).unwrap(),
        ] {
            let d = ch.initial_density(g);
            assert!((d.error_prob() - ch.bit_error()).abs() < 1e-12, "{}", ch.name());
            assert!((d.total() - 1.0).abs() < 1e-12);
        }
        let d = make_bsc(0.06).unwrap().initial_density(g);
        assert!((d.mass(g.nearest(2.7515)) - 0.94).abs() < 1e-15);
        assert!((d.mass(g.nearest(-2.7515)) - 0.06).abs() < 1e-15);
    }

    #[test]
    fn degradation_sweep_is_monotone() {
        let g = LlrGrid::default();
        let errs: Vec<f64> = [6.0, 4.0, 2.0, 0.0, -2.0]
            .iter()
            .map(|s| discretize_awgn(*s, 513, 8.0).unwrap().initial_density(g).error_prob())
            .collect();
        assert!(errs.windows(2).all(|w| w[0] <= w[1]));
        let errs: Vec<f64> = [0.01, 0.05, 0.1, 0.3]
            .iter()
            .map(|p| make_bsc(*p).unwrap().bit_error())
            .collect();
        assert!(errs.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sampling_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = make_bsc(0.0).unwrap();
        for _ in 0..100 {
            assert_eq!(ch.sample(0, &mut rng), (1.0, f64::INFINITY));
        }
        let n = 100_000;
        let p = 0.1;
        let sigma3 = 3.0 * (p * (1.0 - p) / n as f64).sqrt();
        let ch = make_bsc(p).unwrap();
        let flips = (0..n).filter(|_| ch.sample(0, &mut rng).0 < 0.0).count();
        assert!((flips as f64 / n as f64 - p).abs() < sigma3);
        let flips = (0..n).filter(|_| ch.sample(1, &mut rng).0 > 0.0).count();
        assert!((flips as f64 / n as f64 - p).abs() < sigma3);
        let ch = make_bec(p).unwrap();
        let erased = (0..n).filter(|_| ch.sample(1, &mut rng).0 == 0.0).count();
        assert!((erased as f64 / n as f64 - p).abs() < sigma3);
        assert!((0..1000).all(|_| ch.sample(1, &mut rng).1 <= 0.0));
    }

    #[test]
    fn params_and_files() {
        assert_eq!("bsc:0.06".parse::<ChannelParam>().unwrap(), ChannelParam::Bsc(0.06));
        assert_eq!("AWGN:3".parse::<ChannelParam>().unwrap(), ChannelParam::Awgn(3.0));
        assert!("bsc:0.8".parse::<ChannelParam>().is_err());
        assert!("foo:1".parse::<ChannelParam>().is_err());
        assert!("bec".parse::<ChannelParam>().is_err());
        assert_eq!(ChannelParam::Bec(0.5).to_string(), "bec:0.5");

        let ch = discretize_awgn(2.0, 11, 3.0).unwrap();
        let back = DiscreteSymmetricChannel::from_text("x", ch.to_text().as_bytes()).unwrap();
        for ((y1, w1), (y2, w2)) in ch.outputs().zip(back.outputs()) {
            assert_eq!(y1, y2);
            assert!((w1 - w2).abs() < 1e-15);
        }
        let lopsided = "1 0.5\n0.5 0.5\n";
        assert!(matches!(
            DiscreteSymmetricChannel::from_text("x", lopsided.as_bytes()),
            Err(Error::NotSymmetric(_))
        ));
    }
}
