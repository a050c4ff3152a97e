//! Polarization kernels other than `G2`.
//!
//! An `l × l` invertible kernel `G` generalizes the two-by-two step to
//! `[u_{k+1}^i[lj+s]]_s = [u_k^{li+t}[j]]_t · G`. Any kernel with `l ≤ 8` can
//! be evaluated by exhaustive marginalization; `G3` also has closed forms and
//! a density-evolution recursion, and both drive the generic transform,
//! successive-cancellation decoder and construction here.

use std::io::BufRead;

use rand::Rng;

use crate::construct::{BitErrorProfile, BoxMode};
use crate::density::{conv_star, QuantizedDensity};
use crate::error::{Error, Result};
use crate::gf2;
use crate::llr::{boxplus, llr_add, Bit, Llr, TieBreak};

pub const MAX_KERNEL: usize = 8;

/// Invertible binary kernel; row `r` is stored with column `c` in bit `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    l: usize,
    rows: Vec<u64>,
    inv: Vec<u64>,
}

impl Kernel {
    pub fn new(rows: &[Vec<Bit>]) -> Result<Self> {
        let l = rows.len();
        if !(2..=MAX_KERNEL).contains(&l) {
            return Err(Error::InvalidParameter(format!(
                "kernel size {l} outside 2..={MAX_KERNEL}"
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != l) {
            return Err(Error::LengthMismatch {
                expected: l,
                actual: r.len(),
            });
        }
        let packed: Vec<u64> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold(0, |acc, (c, b)| acc | (((b & 1) as u64) << c))
            })
            .collect();
        let inv = gf2::inverse(&packed)?;
        Ok(Kernel { l, rows: packed, inv })
    }

    /// `[[1,0],[1,1]]`.
    pub fn g2() -> Self {
        Kernel::new(&[vec![1, 0], vec![1, 1]]).expect("G2 is invertible")
    }

    /// `[[1,0,0],[1,1,0],[1,0,1]]`.
    pub fn g3() -> Self {
        Kernel::new(&[vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]]).expect("G3 is invertible")
    }

    pub fn size(&self) -> usize {
        self.l
    }

    pub fn entry(&self, r: usize, c: usize) -> Bit {
        ((self.rows[r] >> c) & 1) as Bit
    }

    /// `x = u·G` on packed `l`-bit words.
    pub fn apply(&self, u: u64) -> u64 {
        gf2::vec_mul(u, &self.rows)
    }

    /// `u = x·G^{-1}`.
    pub fn apply_inverse(&self, x: u64) -> u64 {
        gf2::vec_mul(x, &self.inv)
    }

    pub fn inverse_rows(&self) -> Vec<Vec<Bit>> {
        self.inv
            .iter()
            .map(|r| (0..self.l).map(|c| ((r >> c) & 1) as Bit).collect())
            .collect()
    }

    fn is_g3(&self) -> bool {
        *self == Kernel::g3()
    }

    fn is_g2(&self) -> bool {
        *self == Kernel::g2()
    }

    /// Kernel file: `l`, then `l` rows of `0`/`1` characters.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.l);
        for r in 0..self.l {
            out.extend((0..self.l).map(|c| if self.entry(r, c) == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut size = None;
        let mut rows = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if size.is_none() {
                size = Some(
                    line.parse::<usize>()
                        .map_err(|_| Error::parse(no + 1, "first line must be the kernel size"))?,
                );
                continue;
            }
            let row = crate::polar::parse_bits(line).map_err(|e| Error::parse(no + 1, e.to_string()))?;
            rows.push(row);
        }
        let l = size.ok_or_else(|| Error::parse(1, "empty kernel file"))?;
        if rows.len() != l {
            return Err(Error::parse(l + 1, format!("expected {l} rows, found {}", rows.len())));
        }
        Kernel::new(&rows)
    }
}

/// `L(u_m)` given `u_0..u_{m-1}` and channel LLRs of `x = u·G`, by summing
/// the likelihoods of every completion `u_{m+1..l}` in the log domain.
pub fn kernel_llr_exhaustive(kernel: &Kernel, m: usize, prior: &[Bit], chan: &[Llr]) -> Result<Llr> {
    let l = kernel.l;
    if m >= l {
        return Err(Error::InvalidParameter(format!(
            "bit index {m} outside kernel of size {l}"
        )));
    }
    if prior.len() < m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: prior.len(),
        });
    }
    if chan.len() != l {
        return Err(Error::LengthMismatch {
            expected: l,
            actual: chan.len(),
        });
    }
    let fixed = prior[..m]
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, b)| acc | (((b & 1) as u64) << i));
    let free = l - m - 1;
    let mut best = [f64::NEG_INFINITY; 2];
    let mut terms: [Vec<f64>; 2] = [Vec::with_capacity(1 << free), Vec::with_capacity(1 << free)];
    for a in 0..2u64 {
        for tail in 0..1u64 << free {
            let u = fixed | (a << m) | (tail << (m + 1));
            let x = kernel.apply(u);
            // log W(y|x) relative to the likelier input, per coordinate.
            let mut s = 0.0;
            for (t, &lam) in chan.iter().enumerate() {
                let bit = (x >> t) & 1;
                if (bit == 1 && lam > 0.0) || (bit == 0 && lam < 0.0) {
                    s -= lam.abs();
                }
            }
            best[a as usize] = best[a as usize].max(s);
            terms[a as usize].push(s);
        }
    }
    let lse = |v: &[f64], mx: f64| {
        if mx == f64::NEG_INFINITY {
            mx
        } else {
            mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
        }
    };
    let (l0, l1) = (lse(&terms[0], best[0]), lse(&terms[1], best[1]));
    Ok(llr_add(l0, -l1))
}

/// Closed-form `G3` step: `a□b□c`, `b + (-1)^{u0}(a□c)`, `c + (-1)^{u0⊕u1} a`.
pub fn g3_llr_step(m: usize, prior: &[Bit], llrs: [Llr; 3]) -> Llr {
    let [a, b, c] = llrs;
    match m {
        0 => boxplus(boxplus(a, b), c),
        1 => {
            let t = boxplus(a, c);
            llr_add(b, if prior[0] & 1 == 0 { t } else { -t })
        }
        2 => llr_add(c, if (prior[0] ^ prior[1]) & 1 == 0 { a } else { -a }),
        _ => panic!("G3 has three inputs, got index {m}"),
    }
}

/// Densities of the three `G3` outputs when every input has density `f`:
/// `f⊠f⊠f`, `f★(f⊠f)` and `f★f`.
pub fn g3_density_step(f: &QuantizedDensity, mode: BoxMode) -> Result<[QuantizedDensity; 3]> {
    let ff = mode.apply(f, f)?;
    let fff = mode.apply(&ff, f)?;
    let mid = conv_star(f, &ff)?;
    let last = conv_star(f, f)?;
    Ok([fff, mid, last])
}

/// Density evolution for `G3^{⊗n}`: `E_i` for every `i < 3^n`, most
/// significant ternary digit first.
pub fn g3_bit_errors(f0: &QuantizedDensity, n: usize, mode: BoxMode) -> Result<BitErrorProfile> {
    fn walk(f: &QuantizedDensity, depth: usize, mode: BoxMode, out: &mut Vec<f64>) -> Result<()> {
        if depth == 0 {
            out.push(f.error_prob().clamp(0.0, 1.0));
            return Ok(());
        }
        for child in g3_density_step(f, mode)? {
            walk(&child, depth - 1, mode, out)?;
        }
        Ok(())
    }
    if n > 14 {
        return Err(Error::InvalidParameter(format!("3^{n} is too long")));
    }
    let mut out = Vec::with_capacity(3usize.pow(n as u32));
    walk(f0, n, mode, &mut out)?;
    BitErrorProfile::new(out)
}

/// `x = T(u)` for the kernel's Kronecker power: block `i` of `u` is mapped
/// through `G` and digit `t` of the result feeds sub-transform `t`.
pub fn kernel_transform(kernel: &Kernel, u: &[Bit]) -> Result<Vec<Bit>> {
    let l = kernel.l;
    levels(l, u.len())?;
    if u.len() == 1 {
        return Ok(u.to_vec());
    }
    let s = u.len() / l;
    let mut parts = vec![Vec::with_capacity(s); l];
    for block in u.chunks(l) {
        let w = block
            .iter()
            .enumerate()
            .fold(0u64, |acc, (t, b)| acc | (((b & 1) as u64) << t));
        let x = kernel.apply(w);
        for (t, p) in parts.iter_mut().enumerate() {
            p.push(((x >> t) & 1) as Bit);
        }
    }
    let mut out = Vec::with_capacity(u.len());
    for p in parts {
        out.extend(kernel_transform(kernel, &p)?);
    }
    Ok(out)
}

fn levels(l: usize, len: usize) -> Result<usize> {
    let mut n = 0;
    let mut size = 1;
    while size < len {
        size *= l;
        n += 1;
    }
    if size != len {
        return Err(Error::InvalidParameter(format!("length {len} is not a power of {l}")));
    }
    Ok(n)
}

/// Successive-cancellation decoder for `kernel^{⊗n}` with the same
/// layer-by-layer schedule as the binary decoder.
#[derive(Debug, Clone)]
pub struct KernelScDecoder {
    kernel: Kernel,
    n: usize,
    /// LLRs of the current position per layer; layer `k` has `l^k` groups.
    llr: Vec<Vec<Llr>>,
    /// Bits of the current block of `l` positions, per layer and group.
    bits: Vec<Vec<Bit>>,
    next: usize,
    fresh: bool,
}

impl KernelScDecoder {
    pub fn new(kernel: Kernel, n: usize) -> Self {
        let l = kernel.l;
        let llr = (0..=n).map(|k| vec![0.0; l.pow(k as u32)]).collect();
        let bits = (0..=n).map(|k| vec![0; l.pow(k as u32) * l]).collect();
        KernelScDecoder {
            kernel,
            n,
            llr,
            bits,
            next: 0,
            fresh: false,
        }
    }

    pub fn len(&self) -> usize {
        self.llr[self.n].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn reset(&mut self, channel_llrs: &[Llr]) -> Result<()> {
        if channel_llrs.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: channel_llrs.len(),
            });
        }
        self.llr[self.n].copy_from_slice(channel_llrs);
        self.next = 0;
        self.fresh = false;
        Ok(())
    }

    fn step(&self, t: usize, prior: &[Bit], chan: &[Llr]) -> Llr {
        if self.kernel.is_g3() {
            g3_llr_step(t, prior, [chan[0], chan[1], chan[2]])
        } else if self.kernel.is_g2() {
            if t == 0 {
                boxplus(chan[0], chan[1])
            } else {
                llr_add(chan[1], if prior[0] == 0 { chan[0] } else { -chan[0] })
            }
        } else {
            kernel_llr_exhaustive(&self.kernel, t, prior, chan).expect("shapes checked at construction")
        }
    }

    pub fn next_llr(&mut self) -> Llr {
        assert!(self.next < self.len(), "all bits already decided");
        let l = self.kernel.l;
        if !self.fresh {
            let m = self.next;
            // Layer k changes position whenever l^k divides m.
            let mut top = 0;
            let mut span = 1;
            while top < self.n && m.is_multiple_of(span) {
                top += 1;
                span *= l;
            }
            if m == 0 {
                top = self.n;
            }
            for k in (0..top).rev() {
                let t = (m / l.pow(k as u32)) % l;
                for j in 0..l.pow(k as u32) {
                    let prior: Vec<Bit> = self.bits[k][j * l..j * l + t].to_vec();
                    let chan: Vec<Llr> = self.llr[k + 1][j * l..(j + 1) * l].to_vec();
                    self.llr[k][j] = self.step(t, &prior, &chan);
                }
            }
            self.fresh = true;
        }
        self.llr[0][0]
    }

    pub fn commit(&mut self, bit: Bit) {
        let l = self.kernel.l;
        let m = self.next;
        assert!(m < self.len(), "all bits already decided");
        self.bits[0][m % l] = bit & 1;
        let mut k = 0;
        let mut pos = m;
        // A full block of l positions maps through G to one position above.
        while k < self.n && pos % l == l - 1 {
            let q = pos / l;
            for j in 0..l.pow(k as u32) {
                let w = self.bits[k][j * l..(j + 1) * l]
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (t, b)| acc | ((*b as u64) << t));
                let x = self.kernel.apply(w);
                for s in 0..l {
                    self.bits[k + 1][(l * j + s) * l + q % l] = ((x >> s) & 1) as Bit;
                }
            }
            k += 1;
            pos = q;
        }
        self.next += 1;
        self.fresh = false;
    }
}

/// A frozen-set code on `kernel^{⊗n}`.
#[derive(Debug, Clone)]
pub struct KernelCode {
    pub kernel: Kernel,
    pub n: usize,
    is_frozen: Vec<bool>,
}

impl KernelCode {
    pub fn new(kernel: Kernel, n: usize, frozen: &[usize]) -> Result<Self> {
        let len = kernel
            .l
            .checked_pow(n as u32)
            .filter(|v| *v <= 1 << 24)
            .ok_or_else(|| Error::InvalidParameter(format!("{}^{n} is too long", kernel.l)))?;
        let mut is_frozen = vec![false; len];
        for &i in frozen {
            if i >= len || std::mem::replace(&mut is_frozen[i], true) {
                return Err(Error::InvalidParameter(format!("bad frozen index {i}")));
            }
        }
        Ok(KernelCode { kernel, n, is_frozen })
    }

    pub fn len(&self) -> usize {
        self.is_frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k(&self) -> usize {
        self.is_frozen.iter().filter(|f| !**f).count()
    }

    pub fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: info.len(),
            });
        }
        let mut it = info.iter();
        let u: Vec<Bit> = self
            .is_frozen
            .iter()
            .map(|f| if *f { 0 } else { *it.next().expect("length checked") & 1 })
            .collect();
        kernel_transform(&self.kernel, &u)
    }

    /// Returns the decoded information bits.
    pub fn decode<R: Rng + ?Sized>(&self, lambda: &[Llr], ties: TieBreak, rng: &mut R) -> Result<Vec<Bit>> {
        let mut dec = KernelScDecoder::new(self.kernel.clone(), self.n);
        dec.reset(lambda)?;
        let mut info = Vec::with_capacity(self.k());
        for &frozen in &self.is_frozen {
            let l = dec.next_llr();
            let b = if frozen { 0 } else { ties.decide(l, rng) };
            if !frozen {
                info.push(b);
            }
            dec.commit(b);
        }
        Ok(info)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_bec, make_bsc};
    use crate::density::{LlrGrid, QuantizedDensity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_llr(rng: &mut ChaCha8Rng) -> f64 {
        rng.random_range(-6.0..6.0)
    }

    #[test]
    fn g2_reduces_to_binary_rules() {
        let g2 = Kernel::g2();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (a, b) = (rand_llr(&mut rng), rand_llr(&mut rng));
            let l0 = kernel_llr_exhaustive(&g2, 0, &[], &[a, b]).unwrap();
            assert!((l0 - boxplus(a, b)).abs() < 1e-10);
            for u0 in 0..2 {
                let l1 = kernel_llr_exhaustive(&g2, 1, &[u0], &[a, b]).unwrap();
                let expect = b + if u0 == 0 { a } else { -a };
                assert!((l1 - expect).abs() < 1e-10);
            }
        }
        assert_eq!(kernel_llr_exhaustive(&g2, 0, &[], &[f64::INFINITY, 2.0]).unwrap(), 2.0);
        assert!(kernel_llr_exhaustive(&g2, 2, &[0, 0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn g3_closed_forms_match_exhaustive() {
        let g3 = Kernel::g3();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..2000 {
            let v = [rand_llr(&mut rng), rand_llr(&mut rng), rand_llr(&mut rng)];
            let prior = [rng.random_range(0..2), rng.random_range(0..2)];
            for m in 0..3 {
                let a = kernel_llr_exhaustive(&g3, m, &prior, &v).unwrap();
                let b = g3_llr_step(m, &prior, v);
                assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "m={m}: {a} vs {b}");
            }
        }
        let (a, b, c) = (1.3, -0.7, 2.1);
        assert_eq!(g3_llr_step(0, &[], [a, b, f64::INFINITY]), boxplus(a, b));
        assert_eq!(g3_llr_step(1, &[1], [a, b, c]), b - boxplus(a, c));
        assert_eq!(g3_llr_step(2, &[1, 1], [a, b, c]), c + a);
    }

    #[test]
    fn kernel_inverse_and_file() {
        let g3 = Kernel::g3();
        for u in 0..8 {
            assert_eq!(g3.apply_inverse(g3.apply(u)), u);
        }
        assert_eq!(Kernel::from_text(g3.to_text().as_bytes()).unwrap(), g3);
        assert!(matches!(Kernel::new(&[vec![1, 1], vec![1, 1]]), Err(Error::Singular)));
        assert!(Kernel::from_text("3\n100\n110\n".as_bytes()).is_err());
    }

    #[test]
    fn g3_densities_on_bec() {
        let grid = LlrGrid::default();
        let p = 0.3;
        let f = QuantizedDensity::bec(grid, p).unwrap();
        let [a, b, c] = g3_density_step(&f, BoxMode::Fast).unwrap();
        let erasure = |d: &QuantizedDensity| d.mass(0);
        assert!((erasure(&a) - (1.0 - (1.0f64 - p).powi(3))).abs() < 1e-12);
        assert!((erasure(&b) - p * (2.0 * p - p * p)).abs() < 1e-12);
        assert!((erasure(&c) - p * p).abs() < 1e-12);
        for d in [&a, &b, &c] {
            assert!((d.total() - 1.0).abs() < 1e-12);
        }
        let z = QuantizedDensity::point(grid, 0);
        for d in g3_density_step(&z, BoxMode::Exact).unwrap() {
            assert_eq!(d, z);
        }
    }

    /// Exhaustive `L(u_m)` for the full transform.
    fn brute(kernel: &Kernel, lambda: &[f64], prefix: &[Bit]) -> f64 {
        let len = lambda.len();
        let free = len - prefix.len() - 1;
        let mut lse = [Vec::new(), Vec::new()];
        for a in 0..2u8 {
            for tail in 0..1usize << free {
                let mut u = prefix.to_vec();
                u.push(a);
                u.extend((0..free).map(|t| ((tail >> t) & 1) as Bit));
                let x = kernel_transform(kernel, &u).unwrap();
                lse[a as usize].push(
                    x.iter()
                        .zip(lambda)
                        .map(|(b, l)| if *b == 0 { l / 2.0 } else { -l / 2.0 })
                        .sum::<f64>(),
                );
            }
        }
        let f = |v: &[f64]| {
            let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
        };
        f(&lse[0]) - f(&lse[1])
    }

    #[test]
    fn kernel_sc_matches_marginalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let odd = Kernel::new(&[vec![1, 0, 0, 0], vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 1, 1, 1]]).unwrap();
        for (kernel, n) in [(Kernel::g3(), 1), (Kernel::g3(), 2), (Kernel::g2(), 3), (odd, 2)] {
            let len = kernel.size().pow(n as u32);
            let lambda: Vec<f64> = (0..len).map(|_| rand_llr(&mut rng)).collect();
            let mut dec = KernelScDecoder::new(kernel.clone(), n);
            dec.reset(&lambda).unwrap();
            let mut prefix = Vec::new();
            for _ in 0..len {
                let l = dec.next_llr();
                let oracle = brute(&kernel, &lambda, &prefix);
                assert!((l - oracle).abs() <= 1e-9 * oracle.abs().max(1.0));
                let b = rng.random_range(0..2);
                dec.commit(b);
                prefix.push(b);
            }
        }
    }

    #[test]
    fn g3_code_round_trip_and_bec_profile() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = KernelCode::new(Kernel::g3(), 3, &[0, 1, 2, 3, 9]).unwrap();
        for _ in 0..20 {
            let info: Vec<Bit> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
            let x = code.encode(&info).unwrap();
            let lambda: Vec<f64> = x.iter().map(|b| if *b == 0 { 5.0 } else { -5.0 }).collect();
            assert_eq!(code.decode(&lambda, TieBreak::Random, &mut rng).unwrap(), info);
        }
        let grid = LlrGrid::default();
        let e = g3_bit_errors(&make_bec(0.4).unwrap().initial_density(grid), 2, BoxMode::Fast).unwrap();
        // Erasure parameters through two levels of the BEC maps.
        let maps = [
            |p: f64| 1.0 - (1.0 - p).powi(3),
            |p: f64| p * (2.0 * p - p * p),
            |p: f64| p * p,
        ];
        for (i, v) in e.as_slice().iter().enumerate() {
            let expect = maps[i % 3](maps[i / 3](0.4)) / 2.0;
            assert!((v - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn g3_histograms_match_sampled_llrs() {
        let grid = LlrGrid::with_bound(2048, 30.0).unwrap();
        let ch = make_bsc(0.1).unwrap();
        let f = ch.initial_density(grid);
        let dens = g3_density_step(&f, BoxMode::Fast).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples = 100_000;
        let mut counts = vec![vec![0usize; grid.len()]; 3];
        for _ in 0..samples {
            let v = [
                ch.sample_llr(0, &mut rng),
                ch.sample_llr(0, &mut rng),
                ch.sample_llr(0, &mut rng),
            ];
            for (m, c) in counts.iter_mut().enumerate() {
                let cell = grid.nearest(g3_llr_step(m, &[0, 0], v));
                c[(cell + grid.q() as i64) as usize] += 1;
            }
        }
        // Nested rounding inside the box convolutions can move an atom by a
        // cell relative to rounding the exact value once, so the CDFs are
        // compared with a two-cell slack.
        let slack = 2;
        for (d, c) in dens.iter().zip(&counts) {
            let mut cd = Vec::with_capacity(grid.len());
            let mut ce = Vec::with_capacity(grid.len());
            let (mut sd, mut se) = (0.0f64, 0.0f64);
            for (p, k) in d.masses().iter().zip(c) {
                sd += p;
                se += *k as f64 / samples as f64;
                cd.push(sd);
                ce.push(se);
            }
            let mut ks = 0.0f64;
            for i in 0..grid.len() {
                let hi = (i + slack).min(grid.len() - 1);
                ks = ks.max(cd[i] - ce[hi]).max(ce[i] - cd[hi]);
            }
            let emp: f64 = c[..grid.q()].iter().sum::<usize>() as f64 / samples as f64;
            assert!(ks <= 0.02, "KS distance {ks}, E {} vs {emp}", d.error_prob());
        }
    }
}
