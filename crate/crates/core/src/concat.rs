//! Concatenation of polar codes with short block codes.
//!
//! A message is laid out as an `M × N` matrix `V` whose column `i` is a
//! codeword of `C_{a_i}`; every row is then sent through the rate-1 polar
//! transform, `X = V·G`. The codeword is `X` flattened row-major. Decoding
//! alternates successive cancellation on the rows with ML decoding of the
//! columns.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;
use std::sync::Arc;

use rand::RngCore;
use rustfft::num_complex::Complex64;

use crate::channel::DiscreteSymmetricChannel;
use crate::construct::{de_map_leaves, BoxMode};
use crate::density::{fft_plan, LlrGrid, QuantizedDensity};
use crate::error::{Error, Result};
use crate::llr::{Bit, Llr};
use crate::polar::{polar_transform, ScDecoder};
use crate::shortcodes::{ml_decode_word, unpack, CodeTable, LinearBlockCode};
use crate::sim::{run_mc, Codec, McOptions, McResult};

#[derive(Debug, Clone)]
pub struct ConcatSpec {
    n: usize,
    table: Arc<CodeTable>,
    /// Zero-based table index per column.
    assignment: Vec<usize>,
}

impl ConcatSpec {
    /// `assignment[i]` is the zero-based table index of column `i`.
    pub fn new(n: usize, table: Arc<CodeTable>, assignment: Vec<usize>) -> Result<Self> {
        if n > 20 {
            return Err(Error::InvalidParameter(format!("n = {n} is too large")));
        }
        if assignment.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                actual: assignment.len(),
            });
        }
        if let Some(a) = assignment.iter().find(|a| **a >= table.len()) {
            return Err(Error::InvalidParameter(format!(
                "code index {} outside a table of {} codes",
                a + 1,
                table.len()
            )));
        }
        Ok(ConcatSpec { n, table, assignment })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row length `N`.
    pub fn row_len(&self) -> usize {
        1 << self.n
    }

    /// Column length `M`.
    pub fn col_len(&self) -> usize {
        self.table.code_len()
    }

    pub fn table(&self) -> &CodeTable {
        &self.table
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    fn column_code(&self, i: usize) -> &LinearBlockCode {
        self.table.get(self.assignment[i]).expect("indices validated")
    }

    pub fn k(&self) -> usize {
        (0..self.row_len()).map(|i| self.column_code(i).k()).sum()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / (self.row_len() * self.col_len()) as f64
    }

    /// One-based indices, one per line.
    pub fn assignment_text(&self) -> String {
        self.assignment.iter().map(|a| format!("{}\n", a + 1)).collect()
    }

    pub fn assignment_from_text<R: BufRead>(reader: R) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let a: usize = line
                .parse()
                .map_err(|_| Error::parse(no + 1, format!("`{line}` is not a code index")))?;
            if a == 0 {
                return Err(Error::parse(no + 1, "code indices start at 1"));
            }
            out.push(a - 1);
        }
        Ok(out)
    }

    pub fn load_assignment(path: &Path) -> Result<Vec<usize>> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        ConcatSpec::assignment_from_text(std::io::BufReader::new(file))
    }
}

/// Encodes `Σ K_{a_i}` bits, taken column by column, into the flattened
/// `M × N` matrix `X`.
pub fn concat_encode(info: &[Bit], spec: &ConcatSpec) -> Result<Vec<Bit>> {
    if info.len() != spec.k() {
        return Err(Error::LengthMismatch {
            expected: spec.k(),
            actual: info.len(),
        });
    }
    let (m, n) = (spec.col_len(), spec.row_len());
    let mut v = vec![0; m * n];
    let mut rest = info;
    for i in 0..n {
        let code = spec.column_code(i);
        let (head, tail) = rest.split_at(code.k());
        rest = tail;
        if code.k() == 0 {
            continue;
        }
        for (j, b) in code.encode(head)?.into_iter().enumerate() {
            v[j * n + i] = b;
        }
    }
    let mut x = Vec::with_capacity(m * n);
    for row in v.chunks(n) {
        x.extend(polar_transform(row)?);
    }
    Ok(x)
}

/// Decoded message matrix together with the information bits.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcatOutput {
    /// `V̂`, row-major.
    pub v_hat: Vec<Bit>,
    pub info: Vec<Bit>,
}

/// Reusable per-row decoder state.
#[derive(Debug, Clone)]
pub struct ConcatDecoder {
    rows: Vec<ScDecoder>,
    column: Vec<Llr>,
}

impl ConcatDecoder {
    pub fn new(spec: &ConcatSpec) -> Self {
        ConcatDecoder {
            rows: (0..spec.col_len()).map(|_| ScDecoder::new(spec.n())).collect(),
            column: vec![0.0; spec.col_len()],
        }
    }
}

pub fn concat_decode(llrs: &[Llr], spec: &ConcatSpec) -> Result<ConcatOutput> {
    concat_decode_with(&mut ConcatDecoder::new(spec), llrs, spec)
}

/// For each column in turn: gather `L(v_{j,i})` from every row, ML-decode
/// the column, and commit its bits to the rows as known values.
pub fn concat_decode_with(dec: &mut ConcatDecoder, llrs: &[Llr], spec: &ConcatSpec) -> Result<ConcatOutput> {
    let (m, n) = (spec.col_len(), spec.row_len());
    if llrs.len() != m * n {
        return Err(Error::LengthMismatch {
            expected: m * n,
            actual: llrs.len(),
        });
    }
    if dec.rows.len() != m || dec.rows.first().is_some_and(|r| r.len() != n) {
        return Err(Error::InvalidParameter("decoder was built for another code".into()));
    }
    for (row, chunk) in dec.rows.iter_mut().zip(llrs.chunks(n)) {
        row.reset(chunk)?;
    }
    let mut v_hat = vec![0; m * n];
    let mut info = Vec::with_capacity(spec.k());
    for i in 0..n {
        let code = spec.column_code(i);
        // Every row must advance through next_llr, frozen column or not.
        for (l, row) in dec.column.iter_mut().zip(dec.rows.iter_mut()) {
            *l = row.next_llr();
        }
        let word = ml_decode_word(code, &dec.column)?;
        if code.k() > 0 {
            let bits = unpack(word, m);
            info.extend(code.extract_info(&bits)?);
        }
        for (j, row) in dec.rows.iter_mut().enumerate() {
            let b = ((word >> j) & 1) as Bit;
            row.commit(b);
            v_hat[j * n + i] = b;
        }
    }
    Ok(ConcatOutput { v_hat, info })
}

impl Codec for ConcatSpec {
    fn info_len(&self) -> usize {
        self.k()
    }

    fn code_len(&self) -> usize {
        self.col_len() * self.row_len()
    }

    fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        concat_encode(info, self)
    }

    fn decode(&self, llrs: &[Llr], _rng: &mut dyn RngCore) -> Result<Vec<Bit>> {
        Ok(concat_decode(llrs, self)?.info)
    }
}

/// `P(f, w)` for every `w` in `weights`: the mass of `f^{★w}` at cells `≤ 0`,
/// the zero cell included. The powers are taken on a grid wide enough that
/// nothing is clamped.
pub fn p_f_w_many(f: &QuantizedDensity, weights: &[u32]) -> Vec<f64> {
    let Some(&wmax) = weights.iter().max() else {
        return Vec::new();
    };
    let q = f.grid().q();
    let cells = 2 * q + 1;
    let size = (wmax as usize * (cells - 1) + 1).next_power_of_two();
    let mut spec = vec![Complex64::new(0.0, 0.0); size];
    for (s, &m) in spec.iter_mut().zip(f.masses()) {
        s.re = m;
    }
    fft_plan(size, false).process(&mut spec);
    let inverse = fft_plan(size, true);
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    weights
        .iter()
        .map(|&w| {
            if w == 0 {
                return 1.0;
            }
            for (b, s) in buf.iter_mut().zip(&spec) {
                *b = s.powu(w);
            }
            inverse.process(&mut buf);
            // Index t holds the mass of cell t - w·Q.
            let zero = w as usize * q;
            let scale = 1.0 / size as f64;
            let p: f64 = buf[..=zero].iter().map(|z| (z.re * scale).max(0.0)).sum();
            p.min(1.0)
        })
        .collect()
}

pub fn p_f_w(f: &QuantizedDensity, w: u32) -> f64 {
    p_f_w_many(f, &[w])[0]
}

/// `m_k · P(f, d_k)`, with the zero code contributing nothing.
pub fn column_error_estimate(f: &QuantizedDensity, code: &LinearBlockCode) -> f64 {
    match code.distance() {
        None => 0.0,
        Some(d) => code.multiplicity() as f64 * p_f_w(f, d),
    }
}

/// `E[i][k] = E_i^k`, the estimated error probability of code `k` placed in
/// column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnErrorTable {
    pub e: Vec<Vec<f64>>,
}

impl ColumnErrorTable {
    /// Runs density evolution on `channel` to the `N` layer-0 densities and
    /// evaluates every table code on each. `multipliers` replaces `m_k` when
    /// given.
    pub fn build(
        channel: &DiscreteSymmetricChannel,
        n: usize,
        table: &CodeTable,
        grid: LlrGrid,
        mode: BoxMode,
        multipliers: Option<&[f64]>,
    ) -> Result<Self> {
        let mult: Vec<f64> = match multipliers {
            Some(m) if m.len() != table.len() => {
                return Err(Error::LengthMismatch {
                    expected: table.len(),
                    actual: m.len(),
                })
            }
            Some(m) => m.to_vec(),
            None => table.codes().iter().map(|c| c.multiplicity() as f64).collect(),
        };
        let mut weights: Vec<u32> = table.codes().iter().filter_map(|c| c.distance()).collect();
        weights.sort_unstable();
        weights.dedup();
        let rows = de_map_leaves(&channel.initial_density(grid), n, mode, &|_, f| p_f_w_many(f, &weights))?;
        let e = rows
            .iter()
            .map(|p| {
                table
                    .codes()
                    .iter()
                    .zip(&mult)
                    .map(|(c, m)| match c.distance() {
                        None => 0.0,
                        Some(d) => m * p[weights.binary_search(&d).expect("collected above")],
                    })
                    .collect()
            })
            .collect();
        Ok(ColumnErrorTable { e })
    }

    pub fn columns(&self) -> usize {
        self.e.len()
    }
}

/// Optimal assignment and its objective `F(N-1, K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub assignment: Vec<usize>,
    pub bound: f64,
}

/// Minimizes `Σ_i E_i^{a_i}` subject to `Σ_i K_{a_i} = K` by dynamic
/// programming over `F(s, t) = min_l F(s-1, t-K_l) + E_s^l`. Returns `None`
/// when no assignment reaches `K`. Ties go to the smaller code index.
pub fn dp_allocate(e: &ColumnErrorTable, dims: &[usize], k_target: usize) -> Result<Option<Allocation>> {
    let cols = e.columns();
    if let Some(row) = e.e.iter().find(|r| r.len() != dims.len()) {
        return Err(Error::LengthMismatch {
            expected: dims.len(),
            actual: row.len(),
        });
    }
    let width = k_target + 1;
    let mut prev = vec![f64::INFINITY; width];
    prev[0] = 0.0;
    let mut choice = vec![0usize; cols * width];
    for s in 0..cols {
        let mut cur = vec![f64::INFINITY; width];
        for t in 0..width {
            let mut best = f64::INFINITY;
            let mut arg = usize::MAX;
            for (l, &kl) in dims.iter().enumerate() {
                if kl > t || prev[t - kl] == f64::INFINITY {
                    continue;
                }
                let v = prev[t - kl] + e.e[s][l];
                if v < best {
                    best = v;
                    arg = l;
                }
            }
            cur[t] = best;
            choice[s * width + t] = arg;
        }
        prev = cur;
    }
    let bound = prev[k_target];
    if bound == f64::INFINITY {
        return Ok(None);
    }
    let mut assignment = vec![0; cols];
    let mut t = k_target;
    for s in (0..cols).rev() {
        let l = choice[s * width + t];
        assignment[s] = l;
        t -= dims[l];
    }
    Ok(Some(Allocation { assignment, bound }))
}

/// `Σ_i E_i^{a_i}`.
pub fn concat_fer_bound(e: &ColumnErrorTable, assignment: &[usize]) -> f64 {
    e.e.iter().zip(assignment).map(|(row, &a)| row[a]).sum()
}

/// Text report of a design.
pub fn design_report(spec: &ConcatSpec, e: &ColumnErrorTable, k_target: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "K_target {k_target}");
    let _ = writeln!(out, "rate {}", spec.rate());
    let _ = writeln!(out, "column code E");
    for (i, &a) in spec.assignment().iter().enumerate() {
        let _ = writeln!(out, "{i} {} {:e}", a + 1, e.e[i][a]);
    }
    let _ = writeln!(out, "bound {:e}", concat_fer_bound(e, spec.assignment()));
    out
}

/// Least-squares fit of `log FER ≈ log m̂ + log P` over the points that saw
/// at least one error; each point is `(P(f, d), result)`.
pub fn fit_multiplier(points: &[(f64, McResult)]) -> Result<f64> {
    let logs: Vec<f64> = points
        .iter()
        .filter(|(p, r)| r.errors > 0 && *p > 0.0)
        .map(|(p, r)| r.fer.ln() - p.ln())
        .collect();
    if logs.is_empty() {
        return Err(Error::CalibrationFailed("no Monte-Carlo errors observed".into()));
    }
    Ok((logs.iter().sum::<f64>() / logs.len() as f64).exp())
}

/// The short code on its own under ML decoding.
struct ColumnCodec<'a>(&'a LinearBlockCode);

impl Codec for ColumnCodec<'_> {
    fn info_len(&self) -> usize {
        self.0.k()
    }

    fn code_len(&self) -> usize {
        self.0.len()
    }

    fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        self.0.encode(info)
    }

    fn decode(&self, llrs: &[Llr], _rng: &mut dyn RngCore) -> Result<Vec<Bit>> {
        let w = ml_decode_word(self.0, llrs)?;
        self.0.extract_info(&unpack(w, self.0.len()))
    }
}

/// Empirical correction of `m_k`: simulates the code directly on each
/// channel, pairs the FER with `P(f, d_k)` for that channel's density and
/// fits the multiplier.
pub fn calibrate_multiplier(
    code: &LinearBlockCode,
    channels: &[DiscreteSymmetricChannel],
    grid: LlrGrid,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let d = code
        .distance()
        .ok_or_else(|| Error::InvalidParameter("the zero code has nothing to calibrate".into()))?;
    let mut points = Vec::with_capacity(channels.len());
    for ch in channels {
        let p = p_f_w(&ch.initial_density(grid), d);
        let r = run_mc(&ColumnCodec(code), ch, trials, seed, McOptions::default())?;
        points.push((p, r));
    }
    fit_multiplier(&points)
}
