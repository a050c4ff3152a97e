//! Code construction by density evolution and the union bound on the
//! frame error rate of successive-cancellation decoding.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::channel::DiscreteSymmetricChannel;
use crate::density::{bec_box, bec_star, conv_box, conv_box_fast, conv_star, BecDensity, LlrGrid, QuantizedDensity};
use crate::error::{Error, Result};
use crate::polar::PolarCodeSpec;

/// Which box convolution density evolution uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoxMode {
    /// Pairwise `O(Q²)` projection.
    Exact,
    /// Run-length `O(Q·M(δ))` version with the same output.
    #[default]
    Fast,
}

impl BoxMode {
    pub fn apply(self, f: &QuantizedDensity, g: &QuantizedDensity) -> Result<QuantizedDensity> {
        match self {
            BoxMode::Exact => conv_box(f, g),
            BoxMode::Fast => conv_box_fast(f, g),
        }
    }
}

impl std::str::FromStr for BoxMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BoxMode::Exact),
            "fast" => Ok(BoxMode::Fast),
            other => Err(Error::InvalidParameter(format!(
                "box mode `{other}` (expected exact|fast)"
            ))),
        }
    }
}

/// Per-bit error probabilities `E_i` of successive cancellation with a
/// genie-correct prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct BitErrorProfile {
    e: Vec<f64>,
}

impl BitErrorProfile {
    pub fn new(e: Vec<f64>) -> Result<Self> {
        if let Some(bad) = e.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("bit error probability {bad}")));
        }
        Ok(BitErrorProfile { e })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.e
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    /// One value per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.e {
            let _ = writeln!(out, "{v:e}");
        }
        out
    }

    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut e = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line.map_err(|err| Error::parse(no + 1, err.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            e.push(
                line.parse::<f64>()
                    .map_err(|err| Error::parse(no + 1, err.to_string()))?,
            );
        }
        BitErrorProfile::new(e)
    }
}

// Subtrees smaller than this are evaluated on the current thread.
const PARALLEL_DEPTH: usize = 3;

/// Runs density evolution from the channel density `f0` down `n` levels and
/// maps each of the `2^n` leaf densities `f_0^i` through `leaf`.
///
/// The leaf index is built most significant bit first: the first level
/// splits on the top bit of `i`. An even child is `f ⊠ f`, an odd child
/// `f ★ f`. Sibling subtrees may run in parallel; the result does not depend
/// on scheduling.
pub fn de_map_leaves<T, F>(f0: &QuantizedDensity, n: usize, mode: BoxMode, leaf: &F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &QuantizedDensity) -> T + Sync,
{
    fn walk<T: Send, F: Fn(usize, &QuantizedDensity) -> T + Sync>(
        f: &QuantizedDensity,
        depth: usize,
        index: usize,
        mode: BoxMode,
        leaf: &F,
    ) -> Result<Vec<T>> {
        if depth == 0 {
            return Ok(vec![leaf(index, f)]);
        }
        let even = |_: ()| -> Result<Vec<T>> {
            let child = mode.apply(f, f)?;
            walk(&child, depth - 1, 2 * index, mode, leaf)
        };
        let odd = |_: ()| -> Result<Vec<T>> {
            let child = conv_star(f, f)?;
            walk(&child, depth - 1, 2 * index + 1, mode, leaf)
        };
        let (mut left, right) = if depth >= PARALLEL_DEPTH {
            let (l, r) = rayon::join(|| even(()), || odd(()));
            (l?, r?)
        } else {
            (even(())?, odd(())?)
        };
        left.extend(right);
        Ok(left)
    }
    walk(f0, n, 0, mode, leaf)
}

/// `E_i = error_prob(f_0^i)` for every `i < 2^n`.
pub fn de_bit_errors(f0: &QuantizedDensity, n: usize, mode: BoxMode) -> Result<BitErrorProfile> {
    let e = de_map_leaves(f0, n, mode, &|_, f| f.error_prob().clamp(0.0, 1.0))?;
    BitErrorProfile::new(e)
}

/// Closed-form erasure-channel recursion: `p ↦ 2p - p²` for even children
/// and `p ↦ p²` for odd ones, `E_i = p_0^i / 2`.
pub fn bec_bit_errors(p: f64, n: usize) -> Result<BitErrorProfile> {
    let mut layer = vec![BecDensity::new(p)?];
    for _ in 0..n {
        layer = layer.iter().flat_map(|b| [bec_box(*b, *b), bec_star(*b, *b)]).collect();
    }
    BitErrorProfile::new(layer.iter().map(BecDensity::error_prob).collect())
}

/// Freezes the `N - K` positions with the largest `E_i`; among equal values
/// the smaller index is frozen first.
pub fn choose_frozen(profile: &BitErrorProfile, k: usize) -> Result<Vec<usize>> {
    let len = profile.len();
    if k > len {
        return Err(Error::InvalidParameter(format!("K = {k} exceeds N = {len}")));
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| profile.e[b].total_cmp(&profile.e[a]).then(a.cmp(&b)));
    let mut frozen = order[..len - k].to_vec();
    frozen.sort_unstable();
    Ok(frozen)
}

/// `Σ_{i ∉ F} E_i`, the union bound on the frame error rate.
pub fn fer_upper_bound(profile: &BitErrorProfile, frozen: &[usize]) -> f64 {
    let mut is_frozen = vec![false; profile.len()];
    frozen.iter().for_each(|&i| is_frozen[i] = true);
    profile
        .e
        .iter()
        .zip(&is_frozen)
        .filter(|(_, f)| !**f)
        .map(|(e, _)| e)
        .sum()
}

fn check_length(n: usize) -> Result<()> {
    if n > 24 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} is too large for density evolution"
        )));
    }
    Ok(())
}

/// A constructed code with the data it was derived from.
#[derive(Debug, Clone)]
pub struct Construction {
    pub spec: PolarCodeSpec,
    pub profile: BitErrorProfile,
    pub bound: f64,
}

/// Profile on `channel`, then the best `K`-dimensional frozen set.
pub fn construct(
    channel: &DiscreteSymmetricChannel,
    n: usize,
    k: usize,
    grid: LlrGrid,
    mode: BoxMode,
) -> Result<Construction> {
    check_length(n)?;
    let profile = de_bit_errors(&channel.initial_density(grid), n, mode)?;
    let frozen = choose_frozen(&profile, k)?;
    let bound = fer_upper_bound(&profile, &frozen);
    Ok(Construction {
        spec: PolarCodeSpec::new(n, frozen)?,
        profile,
        bound,
    })
}

/// Union bound for an existing code on another channel.
pub fn analyze(spec: &PolarCodeSpec, channel: &DiscreteSymmetricChannel, grid: LlrGrid, mode: BoxMode) -> Result<f64> {
    check_length(spec.n())?;
    let profile = de_bit_errors(&channel.initial_density(grid), spec.n(), mode)?;
    Ok(fer_upper_bound(&profile, spec.frozen()))
}
