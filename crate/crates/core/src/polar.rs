//! The rate-1 polar transform, frozen-set codes and successive-cancellation
//! decoding.
//!
//! Variables are indexed as `u_k^i[j]`: layer `k ∈ 0..=n`, group
//! `j < 2^k`, position `i < 2^{n-k}` inside the group. Layer 0 is the
//! message `u`, layer `n` the codeword `x`, and
//! `[u_{k+1}^i[2j], u_{k+1}^i[2j+1]] = [u_k^{2i}[j], u_k^{2i+1}[j]]·G2`.

use std::fmt::Write as _;
use std::io::BufRead;

use rand::Rng;

use crate::error::{Error, Result};
use crate::llr::{boxplus, llr_add, Bit, Llr, TieBreak};

/// Applies `G2^{⊗n}·R_n` to `u`, i.e. `x = [T(u_even ⊕ u_odd), T(u_odd)]`.
pub fn polar_transform(u: &[Bit]) -> Result<Vec<Bit>> {
    let n = log2_exact(u.len())?;
    let mut v = u.to_vec();
    // u·G2^{⊗n} by butterflies, then the bit-reversal reorder R_n.
    let mut half = 1;
    while half < v.len() {
        for block in v.chunks_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            a.iter_mut().zip(b.iter()).for_each(|(x, y)| *x ^= y);
        }
        half *= 2;
    }
    Ok(bit_reversal_perm(n).into_iter().map(|p| v[p]).collect())
}

/// Inverse of [`polar_transform`]; the transform is an involution up to the
/// bit-reversal, which commutes with `G2^{⊗n}`, so both are the same map.
pub fn polar_transform_inverse(x: &[Bit]) -> Result<Vec<Bit>> {
    polar_transform(x)
}

/// The permutation reversing the `n`-bit binary expansion of each index.
pub fn bit_reversal_perm(n: usize) -> Vec<usize> {
    let len = 1usize << n;
    (0..len)
        .map(|i| {
            if n == 0 {
                0
            } else {
                i.reverse_bits() >> (usize::BITS as usize - n)
            }
        })
        .collect()
}

fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// A polar code: length `2^n` with the frozen positions fixed to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarCodeSpec {
    n: usize,
    frozen: Vec<usize>,
    is_frozen: Vec<bool>,
}

impl PolarCodeSpec {
    pub fn new(n: usize, frozen: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n > 30 {
            return Err(Error::InvalidParameter(format!("n = {n} is too large")));
        }
        let len = 1usize << n;
        let mut is_frozen = vec![false; len];
        for i in frozen {
            if i >= len {
                return Err(Error::InvalidParameter(format!("frozen index {i} >= N = {len}")));
            }
            if std::mem::replace(&mut is_frozen[i], true) {
                return Err(Error::InvalidParameter(format!("frozen index {i} repeated")));
            }
        }
        let frozen = (0..len).filter(|&i| is_frozen[i]).collect();
        Ok(PolarCodeSpec { n, frozen, is_frozen })
    }

    /// Rate-1 code of length `2^n`.
    pub fn full(n: usize) -> Result<Self> {
        PolarCodeSpec::new(n, [])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block length `N = 2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of information bits.
    pub fn k(&self) -> usize {
        self.len() - self.frozen.len()
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.is_frozen[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.is_frozen
    }

    pub fn info_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_frozen[i]).collect()
    }

    /// Frozen-set file: `n K` then the frozen indices, one per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.k());
        for i in &self.frozen {
            let _ = writeln!(out, "{i}");
        }
        out
    }

    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut header = None;
        let mut frozen = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if header.is_none() {
                let mut it = line.split_whitespace().map(str::parse::<usize>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(n)), Some(Ok(k)), None) => header = Some((n, k, no + 1)),
                    _ => return Err(Error::parse(no + 1, "header must be `n K`")),
                }
                continue;
            }
            let i = line
                .parse::<usize>()
                .map_err(|_| Error::parse(no + 1, format!("bad frozen index `{line}`")))?;
            if frozen.last().is_some_and(|&prev| prev >= i) {
                return Err(Error::parse(no + 1, "frozen indices must be strictly increasing"));
            }
            frozen.push(i);
        }
        let (n, k, line) = header.ok_or_else(|| Error::parse(1, "missing `n K` header"))?;
        let spec = PolarCodeSpec::new(n, frozen).map_err(|e| Error::parse(line, e.to_string()))?;
        if spec.k() != k {
            return Err(Error::parse(
                line,
                format!(
                    "header says K = {k} but {} frozen indices leave {}",
                    spec.frozen.len(),
                    spec.k()
                ),
            ));
        }
        Ok(spec)
    }
}

/// Rows of `G2^{⊗n}·R_n` outside the frozen set, in increasing index order.
pub fn generator(spec: &PolarCodeSpec) -> Vec<Vec<Bit>> {
    spec.info_indices()
        .into_iter()
        .map(|i| {
            let mut e = vec![0; spec.len()];
            e[i] = 1;
            polar_transform(&e).expect("power-of-two length")
        })
        .collect()
}

/// Places `info` on the unfrozen positions and transforms.
pub fn encode(info: &[Bit], spec: &PolarCodeSpec) -> Result<Vec<Bit>> {
    polar_transform(&scatter_info(info, spec)?)
}

/// The message vector `u` carrying `info` with zeros on the frozen set.
pub fn scatter_info(info: &[Bit], spec: &PolarCodeSpec) -> Result<Vec<Bit>> {
    if info.len() != spec.k() {
        return Err(Error::LengthMismatch {
            expected: spec.k(),
            actual: info.len(),
        });
    }
    let mut u = vec![0; spec.len()];
    for (slot, &b) in spec.info_indices().into_iter().zip(info) {
        u[slot] = b & 1;
    }
    Ok(u)
}

/// Incremental successive-cancellation decoder for the rate-1 transform.
///
/// For each message index `m` in order, [`next_llr`](Self::next_llr) yields
/// `L(u_0^m[0])` given all earlier committed bits and [`commit`](Self::commit)
/// fixes `u_m`. Memory is `O(N)`: layer `k` keeps only the LLRs of the current
/// position `m >> k` in each of its `2^k` groups.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: usize,
    /// Layer `k` occupies `[2^k, 2^{k+1})`; layer `n` holds the channel LLRs.
    llr: Vec<Llr>,
    /// Bits of the latest even and odd position of every group, same layout.
    bits: [Vec<Bit>; 2],
    next: usize,
    fresh: bool,
    ops: u64,
}

impl ScDecoder {
    pub fn new(n: usize) -> Self {
        let len = 1usize << n;
        ScDecoder {
            n,
            llr: vec![0.0; 2 * len],
            bits: [vec![0; 2 * len], vec![0; 2 * len]],
            next: 0,
            fresh: false,
            ops: 0,
        }
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Loads channel LLRs `λ_j = L(u_n^0[j])` and rewinds to index 0.
    pub fn reset(&mut self, channel_llrs: &[Llr]) -> Result<()> {
        let len = self.len();
        if channel_llrs.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: channel_llrs.len(),
            });
        }
        self.llr[len..].copy_from_slice(channel_llrs);
        self.next = 0;
        self.fresh = false;
        Ok(())
    }

    /// Index of the bit awaiting a decision.
    pub fn position(&self) -> usize {
        self.next
    }

    /// Number of box-plus / signed-sum evaluations since construction.
    pub fn llr_ops(&self) -> u64 {
        self.ops
    }

    /// `L(u_0^m[0])` for the current index `m`.
    pub fn next_llr(&mut self) -> Llr {
        assert!(self.next < self.len(), "all bits already decided");
        if !self.fresh {
            let m = self.next;
            let top = if m == 0 {
                self.n
            } else {
                (m.trailing_zeros() as usize + 1).min(self.n)
            };
            for k in (0..top).rev() {
                self.update_layer(k, m >> k);
            }
            self.fresh = true;
        }
        self.llr[1]
    }

    fn update_layer(&mut self, k: usize, pos: usize) {
        let width = 1usize << k;
        let (lower, upper) = self.llr.split_at_mut(2 * width);
        let dst = &mut lower[width..];
        let src = &upper[..2 * width];
        if pos & 1 == 0 {
            for (j, d) in dst.iter_mut().enumerate() {
                *d = boxplus(src[2 * j], src[2 * j + 1]);
            }
        } else {
            let prev = &self.bits[0][width..2 * width];
            for (j, d) in dst.iter_mut().enumerate() {
                let a = src[2 * j];
                let signed = if prev[j] == 0 { a } else { -a };
                *d = llr_add(src[2 * j + 1], signed);
            }
        }
        self.ops += width as u64;
    }

    /// Fixes `u_m` for the current index and advances.
    pub fn commit(&mut self, bit: Bit) {
        let m = self.next;
        assert!(m < self.len(), "all bits already decided");
        self.bits[m & 1][1] = bit & 1;
        let mut k = 0;
        // An odd position completes a pair; push the pair one layer outwards.
        while k < self.n && (m >> k) & 1 == 1 {
            let width = 1usize << k;
            let slot = (m >> (k + 1)) & 1;
            for j in 0..width {
                let b0 = self.bits[0][width + j];
                let b1 = self.bits[1][width + j];
                self.bits[slot][2 * width + 2 * j] = b0 ^ b1;
                self.bits[slot][2 * width + 2 * j + 1] = b1;
            }
            k += 1;
        }
        self.next += 1;
        self.fresh = false;
    }

    /// Re-encoded codeword estimate; valid once every bit is committed.
    pub fn codeword(&self) -> Option<Vec<Bit>> {
        (self.next == self.len()).then(|| {
            let len = self.len();
            self.bits[0][len..2 * len].to_vec()
        })
    }
}

/// Result of successive-cancellation decoding.
#[derive(Debug, Clone, PartialEq)]
pub struct ScOutput {
    pub info: Vec<Bit>,
    pub u_hat: Vec<Bit>,
    /// Decision LLR `L(u_0^i[0])` of every position, frozen ones included.
    pub llrs: Vec<Llr>,
}

/// Decodes channel LLRs with frozen bits forced to zero; ties on information
/// bits follow `ties`.
pub fn sc_decode<R: Rng + ?Sized>(
    lambda: &[Llr],
    spec: &PolarCodeSpec,
    ties: TieBreak,
    rng: &mut R,
) -> Result<ScOutput> {
    let mut dec = ScDecoder::new(spec.n());
    sc_decode_with(&mut dec, lambda, spec, ties, rng)
}

/// [`sc_decode`] reusing a caller-owned decoder.
pub fn sc_decode_with<R: Rng + ?Sized>(
    dec: &mut ScDecoder,
    lambda: &[Llr],
    spec: &PolarCodeSpec,
    ties: TieBreak,
    rng: &mut R,
) -> Result<ScOutput> {
    if dec.n != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            actual: dec.len(),
        });
    }
    dec.reset(lambda)?;
    let len = spec.len();
    let mut u_hat = Vec::with_capacity(len);
    let mut llrs = Vec::with_capacity(len);
    let mut info = Vec::with_capacity(spec.k());
    for i in 0..len {
        let l = dec.next_llr();
        let b = if spec.is_frozen(i) {
            0
        } else {
            let b = ties.decide(l, rng);
            info.push(b);
            b
        };
        dec.commit(b);
        llrs.push(l);
        u_hat.push(b);
    }
    Ok(ScOutput { info, u_hat, llrs })
}

/// Parses a string of `0`/`1` characters, ignoring whitespace.
pub fn parse_bits(text: &str) -> Result<Vec<Bit>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .enumerate()
        .map(|(pos, c)| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidParameter(format!(
                "character `{other}` at bit {pos} is not 0 or 1"
            ))),
        })
        .collect()
}

pub fn format_bits(bits: &[Bit]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}
