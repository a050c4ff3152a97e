//! Short binary linear block codes: exact minimum distance and exact
//! soft-decision maximum-likelihood decoding.
//!
//! Codewords are packed into a `u64` with position `j` in bit `j`, so
//! lengths up to 64 are supported.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2;
use crate::llr::{Bit, Llr};

/// Largest `K` (or `M - K`) handled by exhaustive enumeration.
pub const MAX_ENUM: usize = 20;
/// Largest `K` for enumeration decoding and `M - K` for trellis decoding.
pub const MAX_ML: usize = 16;

/// Magnitude that stands in for an infinite LLR inside `φ` sums.
const LLR_CAP: f64 = 1e100;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearBlockCode {
    len: usize,
    /// Generator in reduced row echelon form.
    gen: Vec<u64>,
    /// Parity checks spanning the dual code.
    checks: Vec<u64>,
    /// `None` for the zero code.
    distance: Option<u32>,
    multiplicity: u64,
}

impl LinearBlockCode {
    /// Builds a code from generator rows, verifying rank and computing the
    /// minimum distance exactly.
    pub fn new(len: usize, rows: &[u64]) -> Result<Self> {
        if len == 0 || len > 64 {
            return Err(Error::InvalidParameter(format!("code length {len} outside 1..=64")));
        }
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(Error::InvalidParameter(format!("generator row wider than {len}")));
        }
        let (gen, _) = gf2::rref(rows);
        if gen.len() != rows.len() {
            return Err(Error::CodeMismatch(format!(
                "generator has rank {} but {} rows",
                gen.len(),
                rows.len()
            )));
        }
        let checks = gf2::nullspace(&gen, len);
        let mut code = LinearBlockCode {
            len,
            gen,
            checks,
            distance: None,
            multiplicity: 0,
        };
        if code.k() > 0 {
            let (d, m) = code.compute_distance()?;
            code.distance = Some(d);
            code.multiplicity = m;
        }
        Ok(code)
    }

    pub fn from_bit_rows(rows: &[Vec<Bit>]) -> Result<Self> {
        let len = rows.first().map_or(0, |r| r.len());
        if let Some(r) = rows.iter().find(|r| r.len() != len) {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: r.len(),
            });
        }
        LinearBlockCode::new(len, &rows.iter().map(|r| pack(r)).collect::<Vec<_>>())
    }

    pub fn zero(len: usize) -> Result<Self> {
        LinearBlockCode::new(len, &[])
    }

    pub fn full(len: usize) -> Result<Self> {
        LinearBlockCode::new(len, &(0..len).map(|j| 1u64 << j).collect::<Vec<_>>())
    }

    pub fn repetition(len: usize) -> Result<Self> {
        let all = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        LinearBlockCode::new(len, &[all])
    }

    pub fn single_parity(len: usize) -> Result<Self> {
        LinearBlockCode::new(len, &(1..len).map(|j| 1 | (1u64 << j)).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k(&self) -> usize {
        self.gen.len()
    }

    pub fn generator(&self) -> &[u64] {
        &self.gen
    }

    pub fn parity_checks(&self) -> &[u64] {
        &self.checks
    }

    /// Minimum distance, `None` for the zero code.
    pub fn distance(&self) -> Option<u32> {
        self.distance
    }

    /// Number of codewords of minimum weight.
    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    pub fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: info.len(),
            });
        }
        Ok(unpack(gf2::vec_mul(pack(info), &self.gen), self.len))
    }

    /// Recovers the information bits of a codeword; the generator is in
    /// reduced echelon form so they sit at the pivot positions.
    pub fn extract_info(&self, codeword: &[Bit]) -> Result<Vec<Bit>> {
        let c = pack(codeword);
        if codeword.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: codeword.len(),
            });
        }
        if !self.contains(c) {
            return Err(Error::CodeMismatch("word is not a codeword".into()));
        }
        Ok(self
            .gen
            .iter()
            .map(|g| ((c >> g.trailing_zeros()) & 1) as Bit)
            .collect())
    }

    pub fn contains(&self, word: u64) -> bool {
        self.checks.iter().all(|h| (h & word).count_ones().is_multiple_of(2))
    }

    /// Full weight distribution `A_0..=A_M`.
    pub fn weight_distribution(&self) -> Result<Vec<u64>> {
        let (k, r) = (self.k(), self.len - self.k());
        if k <= MAX_ENUM {
            Ok(enumerate_weights(&self.gen, self.len))
        } else if r <= MAX_ENUM {
            macwilliams(&enumerate_weights(&self.checks, self.len), self.len, r)
        } else {
            Err(Error::UnsupportedCode(format!(
                "[{}, {k}] is too large for exact weight enumeration",
                self.len
            )))
        }
    }

    fn compute_distance(&self) -> Result<(u32, u64)> {
        min_distance_of(&self.weight_distribution()?)
            .ok_or_else(|| Error::CodeMismatch("nonzero code without nonzero codewords".into()))
    }
}

fn min_distance_of(dist: &[u64]) -> Option<(u32, u64)> {
    dist.iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| **a > 0)
        .map(|(w, a)| (w as u32, *a))
}

/// `(d, m)` by direct enumeration when `K ≤ 20`, otherwise through the dual
/// code's weight enumerator.
pub fn min_distance(code: &LinearBlockCode) -> Result<(u32, u64)> {
    if code.k() == 0 {
        return Err(Error::InvalidParameter("the zero code has no minimum distance".into()));
    }
    code.compute_distance()
}

pub(crate) fn pack(bits: &[Bit]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (j, b)| acc | (((b & 1) as u64) << j))
}

pub(crate) fn unpack(word: u64, len: usize) -> Vec<Bit> {
    (0..len).map(|j| ((word >> j) & 1) as Bit).collect()
}

/// Weight distribution of the span of `rows` by Gray-code enumeration.
fn enumerate_weights(rows: &[u64], len: usize) -> Vec<u64> {
    let mut dist = vec![0u64; len + 1];
    let mut c = 0u64;
    dist[0] = 1;
    for step in 1u64..1 << rows.len() {
        c ^= rows[step.trailing_zeros() as usize];
        dist[c.count_ones() as usize] += 1;
    }
    dist
}

/// Weight distribution of a code from that of its `r`-dimensional dual.
fn macwilliams(dual: &[u64], len: usize, r: usize) -> Result<Vec<u64>> {
    let n = len as i128;
    let mut binom = vec![vec![0i128; len + 1]; len + 1];
    for i in 0..=len {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
        }
    }
    let choose = |a: i128, b: i128| {
        if b < 0 || b > a {
            0
        } else {
            binom[a as usize][b as usize]
        }
    };
    let mut out = Vec::with_capacity(len + 1);
    for w in 0..=len as i128 {
        let mut acc = 0i128;
        for (j, &b) in dual.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let j = j as i128;
            // Krawtchouk polynomial K_w(j).
            let kraw: i128 = (0..=w)
                .map(|s| {
                    let t = choose(j, s) * choose(n - j, w - s);
                    if s % 2 == 0 {
                        t
                    } else {
                        -t
                    }
                })
                .sum();
            acc += b as i128 * kraw;
        }
        if acc < 0 || acc % (1i128 << r) != 0 {
            return Err(Error::CodeMismatch("MacWilliams transform is not integral".into()));
        }
        out.push((acc >> r) as u64);
    }
    Ok(out)
}

fn phi(word: u64, lambda: &[f64]) -> f64 {
    lambda
        .iter()
        .enumerate()
        .filter(|(j, _)| (word >> j) & 1 == 1)
        .map(|(_, l)| *l)
        .sum()
}

/// `true` when `a` precedes `b` with position 0 as the most significant.
fn lex_less(a: u64, b: u64) -> bool {
    a.reverse_bits() < b.reverse_bits()
}

/// Maximum-likelihood codeword: the minimizer of `φ(c) = Σ c_j λ_j`, ties
/// resolved toward the lexicographically smallest codeword.
pub fn ml_decode(code: &LinearBlockCode, lambda: &[Llr]) -> Result<Vec<Bit>> {
    ml_decode_word(code, lambda).map(|w| unpack(w, code.len))
}

pub fn ml_decode_word(code: &LinearBlockCode, lambda: &[Llr]) -> Result<u64> {
    if lambda.len() != code.len {
        return Err(Error::LengthMismatch {
            expected: code.len,
            actual: lambda.len(),
        });
    }
    let k = code.k();
    let r = code.len - k;
    if k == 0 {
        return Ok(0);
    }
    let lam: Vec<f64> = lambda.iter().map(|l| l.clamp(-LLR_CAP, LLR_CAP)).collect();
    // Strictly signed LLRs make the hard decision the unique minimizer of φ
    // over all words, hence over the code whenever it is a codeword.
    if lam.iter().all(|l| *l != 0.0) {
        let hard = lam
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, l)| acc | (((*l < 0.0) as u64) << j));
        if code.contains(hard) {
            return Ok(hard);
        }
    }
    let enum_ok = k <= MAX_ML;
    let trellis_ok = r <= MAX_ML;
    match (enum_ok, trellis_ok) {
        (true, true) if (k << k) <= (code.len << r) => Ok(ml_enumerate(code, &lam)),
        (true, false) => Ok(ml_enumerate(code, &lam)),
        (_, true) => Ok(ml_trellis(code, &lam)),
        (false, false) => Err(Error::UnsupportedCode(format!(
            "[{}, {k}] has neither K <= {MAX_ML} nor M-K <= {MAX_ML}",
            code.len
        ))),
    }
}

/// Enumeration decoder. With `col_j` the `j`-th generator column,
/// `φ(uG) = (Σλ - S(u))/2` where `S(u) = Σ_j λ_j (-1)^{u·col_j}` is a
/// Walsh–Hadamard transform over the `2^K` messages.
pub fn ml_enumerate(code: &LinearBlockCode, lambda: &[f64]) -> u64 {
    let k = code.k();
    let mut s = vec![0.0f64; 1 << k];
    for (j, &l) in lambda.iter().enumerate() {
        let col = code
            .gen
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, g)| acc | ((((g >> j) & 1) as usize) << i));
        s[col] += l;
    }
    let mut h = 1;
    while h < s.len() {
        for block in s.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    let best = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-9 * lambda.iter().map(|l| l.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    // Re-score near-optimal messages directly so ties are decided on φ.
    let mut pick: Option<(f64, u64)> = None;
    for (u, v) in s.iter().enumerate() {
        if *v < best - slack {
            continue;
        }
        let c = gf2::vec_mul(u as u64, &code.gen);
        let f = phi(c, lambda);
        pick = match pick {
            Some((pf, pc)) if pf < f || (pf == f && !lex_less(c, pc)) => Some((pf, pc)),
            _ => Some((f, c)),
        };
    }
    pick.expect("at least the maximum qualifies").1
}

/// Syndrome-trellis decoder over `2^{M-K}` states: a backward pass computes
/// the cost-to-go, and the forward trace prefers `c_j = 0` on equal cost,
/// which yields the lexicographically smallest optimum.
pub fn ml_trellis(code: &LinearBlockCode, lambda: &[f64]) -> u64 {
    let m = code.len;
    let states = 1usize << code.checks.len();
    let cols: Vec<usize> = (0..m)
        .map(|j| {
            code.checks
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, h)| acc | ((((h >> j) & 1) as usize) << i))
        })
        .collect();
    let mut cost = vec![f64::INFINITY; (m + 1) * states];
    cost[m * states] = 0.0;
    for j in (0..m).rev() {
        let (cur, next) = cost.split_at_mut((j + 1) * states);
        let cur = &mut cur[j * states..];
        let next = &next[..states];
        for s in 0..states {
            let stay = next[s];
            let flip = lambda[j] + next[s ^ cols[j]];
            cur[s] = if flip < stay { flip } else { stay };
        }
    }
    let mut word = 0u64;
    let mut s = 0usize;
    for j in 0..m {
        let next = &cost[(j + 1) * states..(j + 2) * states];
        let stay = next[s];
        let flip = lambda[j] + next[s ^ cols[j]];
        if flip < stay {
            word |= 1 << j;
            s ^= cols[j];
        }
    }
    word
}

/// The expected `(K, d)` of the 26 length-32 codes; `None` is the zero
/// code's infinite distance.
pub const REFERENCE_DISTANCES: [(usize, Option<u32>); 26] = [
    (0, None),
    (1, Some(32)),
    (2, Some(21)),
    (3, Some(18)),
    (4, Some(16)),
    (5, Some(16)),
    (6, Some(16)),
    (7, Some(14)),
    (8, Some(13)),
    (11, Some(12)),
    (13, Some(10)),
    (14, Some(8)),
    (15, Some(8)),
    (16, Some(8)),
    (21, Some(6)),
    (22, Some(5)),
    (23, Some(4)),
    (24, Some(4)),
    (25, Some(4)),
    (26, Some(4)),
    (27, Some(2)),
    (28, Some(2)),
    (29, Some(2)),
    (30, Some(2)),
    (31, Some(2)),
    (32, Some(1)),
];

/// An ordered list of codes of a common length; index 0 is the zero code.
#[derive(Debug, Clone)]
pub struct CodeTable {
    codes: Vec<LinearBlockCode>,
}

/// Text of the shipped length-32 table.
pub const SHIPPED_TABLE: &str = include_str!("../data/codes32.txt");

impl CodeTable {
    pub fn new(codes: Vec<LinearBlockCode>) -> Result<Self> {
        let first = codes.first().ok_or(Error::Empty("code table"))?;
        let len = first.len;
        if first.k() != 0 {
            return Err(Error::CodeMismatch("the first entry must be the zero code".into()));
        }
        if let Some(c) = codes.iter().find(|c| c.len != len) {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: c.len,
            });
        }
        Ok(CodeTable { codes })
    }

    /// `{zero code, full space}` on length `m`.
    pub fn trivial(m: usize) -> Result<Self> {
        CodeTable::new(vec![LinearBlockCode::zero(m)?, LinearBlockCode::full(m)?])
    }

    /// The shipped length-32 table. Every declared `d` and `m` is re-derived
    /// on load; agreement with [`REFERENCE_DISTANCES`] is a separate `check_against`.
    pub fn shipped() -> Result<Self> {
        CodeTable::from_text(SHIPPED_TABLE.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        CodeTable::from_text(std::io::BufReader::new(file))
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Common code length `M`.
    pub fn code_len(&self) -> usize {
        self.codes[0].len
    }

    pub fn get(&self, i: usize) -> Option<&LinearBlockCode> {
        self.codes.get(i)
    }

    pub fn codes(&self) -> &[LinearBlockCode] {
        &self.codes
    }

    pub fn max_k(&self) -> usize {
        self.codes.iter().map(|c| c.k()).max().unwrap_or(0)
    }

    /// Fails on the first entry whose `(K, d)` differs from `expected`.
    pub fn check_against(&self, expected: &[(usize, Option<u32>)]) -> Result<()> {
        if self.codes.len() != expected.len() {
            return Err(Error::CodeMismatch(format!(
                "table has {} codes, expected {}",
                self.codes.len(),
                expected.len()
            )));
        }
        for (i, (c, &(k, d))) in self.codes.iter().zip(expected).enumerate() {
            if c.k() != k || c.distance() != d {
                return Err(Error::CodeMismatch(format!(
                    "entry {}: found (K={}, d={}), expected (K={k}, d={})",
                    i + 1,
                    c.k(),
                    fmt_distance(c.distance()),
                    fmt_distance(d)
                )));
            }
        }
        Ok(())
    }

    /// Blocks of `K d m` followed by `K` rows of `0`/`1` characters; the
    /// declared `d` and `m` are re-derived and must match.
    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
            l.as_ref()
                .map_or(true, |s| !s.trim().is_empty() && !s.trim_start().starts_with('#'))
        });
        let mut codes = Vec::new();
        let mut width: Option<usize> = None;
        while let Some((no, line)) = lines.next() {
            let line = line.map_err(|e| Error::parse(no, e.to_string()))?;
            let head: Vec<&str> = line.split_whitespace().collect();
            if head.len() != 3 {
                return Err(Error::parse(no, "expected header `K d m`"));
            }
            let k: usize = head[0].parse().map_err(|_| Error::parse(no, "bad K"))?;
            let d: Option<u32> = match head[1] {
                "inf" => None,
                s => Some(s.parse().map_err(|_| Error::parse(no, "bad d"))?),
            };
            let m: u64 = head[2].parse().map_err(|_| Error::parse(no, "bad m"))?;
            let mut rows = Vec::with_capacity(k);
            for _ in 0..k {
                let (rno, row) = lines.next().ok_or_else(|| Error::parse(no, "missing generator rows"))?;
                let row = row.map_err(|e| Error::parse(rno, e.to_string()))?;
                let bits = crate::polar::parse_bits(row.trim()).map_err(|e| Error::parse(rno, e.to_string()))?;
                match width {
                    None => width = Some(bits.len()),
                    Some(w) if w != bits.len() => {
                        return Err(Error::parse(rno, format!("row length {} != {w}", bits.len())))
                    }
                    _ => {}
                }
                rows.push(pack(&bits));
            }
            let len = width.unwrap_or(32);
            let code = LinearBlockCode::new(len, &rows)?;
            if code.distance() != d || code.multiplicity() != m {
                return Err(Error::CodeMismatch(format!(
                    "code at line {no}: declared (d={}, m={m}), computed (d={}, m={})",
                    fmt_distance(d),
                    fmt_distance(code.distance()),
                    code.multiplicity()
                )));
            }
            codes.push(code);
        }
        if let Some(w) = width {
            for c in codes.iter_mut().filter(|c| c.k() == 0) {
                *c = LinearBlockCode::zero(w)?;
            }
        }
        CodeTable::new(codes)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.codes {
            let _ = writeln!(out, "{} {} {}", c.k(), fmt_distance(c.distance()), c.multiplicity());
            for g in &c.gen {
                out.extend((0..c.len).map(|j| if (g >> j) & 1 == 1 { '1' } else { '0' }));
                out.push('\n');
            }
        }
        out
    }
}

fn fmt_distance(d: Option<u32>) -> String {
    d.map_or_else(|| "inf".to_string(), |d| d.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_code(rng: &mut ChaCha8Rng, len: usize, k: usize) -> LinearBlockCode {
        loop {
            let rows: Vec<u64> = (0..k).map(|_| rng.random::<u64>() & ((1 << len) - 1)).collect();
            if gf2::rank(&rows) == k {
                return LinearBlockCode::new(len, &rows).unwrap();
            }
        }
    }

    #[test]
    fn small_distances() {
        let rep = LinearBlockCode::repetition(32).unwrap();
        assert_eq!(min_distance(&rep).unwrap(), (32, 1));
        let spc = LinearBlockCode::single_parity(32).unwrap();
        assert_eq!(min_distance(&spc).unwrap(), (2, 496));
        let full = LinearBlockCode::full(32).unwrap();
        assert_eq!(min_distance(&full).unwrap(), (1, 32));
        assert!(min_distance(&LinearBlockCode::zero(32).unwrap()).is_err());
        assert!(matches!(
            LinearBlockCode::new(4, &[0b11, 0b11]),
            Err(Error::CodeMismatch(_))
        ));
    }

    #[test]
    fn macwilliams_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (len, k) in [(16, 9), (20, 14), (24, 18), (12, 3)] {
            let c = random_code(&mut rng, len, k);
            let direct = enumerate_weights(&c.gen, len);
            let dual = enumerate_weights(&c.checks, len);
            assert_eq!(macwilliams(&dual, len, len - k).unwrap(), direct);
        }
    }

    /// Brute-force ML with the same tie rule.
    fn ml_brute(code: &LinearBlockCode, lambda: &[f64]) -> u64 {
        let mut best = (f64::INFINITY, 0u64);
        for u in 0u64..1 << code.k() {
            let c = gf2::vec_mul(u, &code.gen);
            let f = phi(c, lambda);
            if f < best.0 || (f == best.0 && lex_less(c, best.1)) {
                best = (f, c);
            }
        }
        best.1
    }

    #[test]
    fn decoders_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = random_code(&mut rng, 32, 16);
        for _ in 0..1000 {
            let lambda: Vec<f64> = (0..32).map(|_| rng.random_range(-2.0..4.0)).collect();
            assert_eq!(ml_enumerate(&code, &lambda), ml_trellis(&code, &lambda));
        }
        for (len, k) in [(10, 4), (12, 9), (8, 1), (8, 7)] {
            let code = random_code(&mut rng, len, k);
            for _ in 0..200 {
                // Integer LLRs produce plenty of exact ties.
                let lambda: Vec<f64> = (0..len).map(|_| rng.random_range(-2..3) as f64).collect();
                let b = ml_brute(&code, &lambda);
                assert_eq!(ml_enumerate(&code, &lambda), b);
                assert_eq!(ml_trellis(&code, &lambda), b);
                assert_eq!(ml_decode_word(&code, &lambda).unwrap(), b);
            }
        }
    }

    #[test]
    fn ml_examples() {
        let rep = LinearBlockCode::repetition(32).unwrap();
        let mut lambda = vec![1.0; 32];
        lambda[0] = -40.0;
        assert_eq!(ml_decode(&rep, &lambda).unwrap(), vec![1; 32]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = random_code(&mut rng, 32, 20);
        assert_eq!(ml_decode_word(&code, &[f64::INFINITY; 32]).unwrap(), 0);
        let zero = LinearBlockCode::zero(32).unwrap();
        assert_eq!(ml_decode_word(&zero, &[-1.0; 32]).unwrap(), 0);
        let wide = random_code(&mut rng, 40, 20);
        let mut lambda = [0.5; 40];
        lambda[0] = -0.5;
        assert!(matches!(ml_decode_word(&wide, &lambda), Err(Error::UnsupportedCode(_))));
        for _ in 0..100 {
            let lambda: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..3.0)).collect();
            let c = ml_decode(&code, &lambda).unwrap();
            assert!(code.contains(pack(&c)));
            let info = code.extract_info(&c).unwrap();
            assert_eq!(code.encode(&info).unwrap(), c);
        }
    }

    #[test]
    fn table_text_round_trip() {
        let t = CodeTable::new(vec![
            LinearBlockCode::zero(8).unwrap(),
            LinearBlockCode::repetition(8).unwrap(),
            LinearBlockCode::single_parity(8).unwrap(),
        ])
        .unwrap();
        let back = CodeTable::from_text(t.to_text().as_bytes()).unwrap();
        assert_eq!(back.codes(), t.codes());
        let bad = t.to_text().replace("1 8 1", "1 7 1");
        assert!(matches!(
            CodeTable::from_text(bad.as_bytes()),
            Err(Error::CodeMismatch(_))
        ));
    }
}
