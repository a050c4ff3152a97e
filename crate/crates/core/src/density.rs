//! Probability mass functions of LLR random variables on a uniform grid.
//!
//! A [`QuantizedDensity`] holds `2Q+1` masses for the cells `Ω_{-Q} ..= Ω_Q`.
//! Cell `i` is centred at `iδ`; the two extreme cells absorb everything beyond
//! `±(Qδ - δ/2)`, so `±inf` land in `±Q`.
//!
//! Two convolutions model the decoder updates: [`conv_star`] is the law of a
//! sum of independent LLRs and [`conv_box`] the law of their box-plus.
//! [`conv_box_fast`] produces the same projection in `O(Q·M(δ))` time using a
//! per-grid table of where `nearest(aδ □ bδ)` changes value.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::llr::boxplus;

/// Uniform LLR quantization grid with `2Q+1` cells of width `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlrGrid {
    q: usize,
    delta: f64,
}

impl Default for LlrGrid {
    /// `A = 60`, `Q = 2^13`.
    fn default() -> Self {
        LlrGrid::with_bound(1 << 13, 60.0).expect("default grid is valid")
    }
}

impl LlrGrid {
    pub fn new(q: usize, delta: f64) -> Result<Self> {
        if q == 0 || q > (1 << 24) {
            return Err(Error::InvalidParameter(format!("grid level count {q} out of range")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("grid step {delta} must be positive")));
        }
        Ok(LlrGrid { q, delta })
    }

    /// Grid whose outermost node sits at `bound = Q·δ`.
    pub fn with_bound(q: usize, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::InvalidParameter(format!("grid bound {bound} must be positive")));
        }
        LlrGrid::new(q, bound / q as f64)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Saturation bound `A = Q·δ`.
    pub fn bound(&self) -> f64 {
        self.q as f64 * self.delta
    }

    /// Number of cells, `2Q+1`.
    pub fn len(&self) -> usize {
        2 * self.q + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// LLR value at the centre of cell `i`.
    #[inline]
    pub fn node(&self, i: i64) -> f64 {
        i as f64 * self.delta
    }

    /// Index of the cell containing `x`. Positive cells are closed on the
    /// left, negative cells closed on the right, and `±inf` map to `±Q`.
    #[inline]
    pub fn nearest(&self, x: f64) -> i64 {
        debug_assert!(!x.is_nan());
        let q = self.q as f64;
        if x >= 0.0 {
            (x / self.delta + 0.5).floor().min(q) as i64
        } else {
            -((-x / self.delta + 0.5).floor().min(q) as i64)
        }
    }

    /// Largest possible distance, in cells, between `nearest(iδ □ jδ)` and
    /// `sgn(i)sgn(j)·min(|i|,|j|)`: `M(δ) = ⌈ln2/δ - 1/2⌉`.
    pub fn box_window(&self) -> usize {
        (std::f64::consts::LN_2 / self.delta - 0.5).ceil().max(0.0) as usize
    }

    #[inline]
    fn offset(&self, i: i64) -> usize {
        (i + self.q as i64) as usize
    }

    fn key(&self) -> (usize, u64) {
        (self.q, self.delta.to_bits())
    }
}

/// Probability mass function on an [`LlrGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedDensity {
    grid: LlrGrid,
    mass: Vec<f64>,
}

impl QuantizedDensity {
    /// Wraps `mass` (indexed `-Q..=Q`) after checking it is a distribution.
    pub fn new(grid: LlrGrid, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: mass.len(),
            });
        }
        if let Some(bad) = mass.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("mass {bad} is not a probability")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(QuantizedDensity { grid, mass })
    }

    /// Unit mass at cell `i`.
    pub fn point(grid: LlrGrid, i: i64) -> Self {
        let i = i.clamp(-(grid.q as i64), grid.q as i64);
        let mut mass = vec![0.0; grid.len()];
        mass[grid.offset(i)] = 1.0;
        QuantizedDensity { grid, mass }
    }

    /// Grid image of a binary erasure channel law: `p` at 0, `1-p` at `+A`.
    pub fn bec(grid: LlrGrid, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("erasure probability {p}")));
        }
        let mut mass = vec![0.0; grid.len()];
        mass[grid.offset(0)] = p;
        mass[grid.offset(grid.q as i64)] += 1.0 - p;
        Ok(QuantizedDensity { grid, mass })
    }

    pub fn grid(&self) -> &LlrGrid {
        &self.grid
    }

    /// Masses in index order `-Q..=Q`.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Mass of cell `i`, `-Q <= i <= Q`.
    pub fn mass(&self, i: i64) -> f64 {
        self.mass[self.grid.offset(i)]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `Pr{L < 0} + ½ Pr{L = 0}`.
    pub fn error_prob(&self) -> f64 {
        let q = self.grid.q;
        let negative: f64 = self.mass[..q].iter().sum();
        negative + 0.5 * self.mass[q]
    }

    /// `Pr{L <= 0}`, counting the zero cell fully.
    pub fn nonpositive_prob(&self) -> f64 {
        self.mass[..=self.grid.q].iter().sum()
    }

    fn support_len(&self) -> usize {
        self.mass.iter().filter(|m| **m != 0.0).count()
    }

    /// Text dump: `Q delta` header then one mass per line, index `-Q..=Q`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.mass.len() * 24);
        let _ = writeln!(out, "{} {}", self.grid.q, self.grid.delta);
        for m in &self.mass {
            let _ = writeln!(out, "{m:e}");
        }
        out
    }

    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (q, delta) = loop {
            let (no, line) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
            let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let q = it.next().and_then(|s| s.parse::<usize>().ok());
            let d = it.next().and_then(|s| s.parse::<f64>().ok());
            match (q, d) {
                (Some(q), Some(d)) => break (q, d),
                _ => return Err(Error::parse(no + 1, "header must be `Q delta`")),
            }
        };
        let grid = LlrGrid::new(q, delta)?;
        let mut mass = Vec::with_capacity(grid.len());
        for (no, line) in lines {
            let line = line.map_err(|e| Error::parse(no + 1, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v = line
                .parse::<f64>()
                .map_err(|e| Error::parse(no + 1, format!("bad mass `{line}`: {e}")))?;
            mass.push(v);
        }
        QuantizedDensity::new(grid, mass)
    }
}

/// Symbolic erasure-channel law `B_p`: mass `p` at LLR 0 and `1-p` at `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BecDensity {
    p: f64,
}

impl BecDensity {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("erasure probability {p}")));
        }
        Ok(BecDensity { p })
    }

    pub fn erasure(&self) -> f64 {
        self.p
    }

    pub fn error_prob(&self) -> f64 {
        0.5 * self.p
    }
}

/// `B_p ★ B_r = B_{pr}`.
pub fn bec_star(a: BecDensity, b: BecDensity) -> BecDensity {
    BecDensity { p: a.p * b.p }
}

/// `B_p ⊠ B_r = B_{p+r-pr}`.
pub fn bec_box(a: BecDensity, b: BecDensity) -> BecDensity {
    BecDensity {
        p: a.p + b.p - a.p * b.p,
    }
}

/// Projects a finite set of `(llr, mass)` atoms onto `grid`.
pub fn project(points: &[(f64, f64)], grid: LlrGrid) -> Result<QuantizedDensity> {
    let mut mass = vec![0.0; grid.len()];
    let mut total = 0.0;
    for &(x, m) in points {
        if x.is_nan() {
            return Err(Error::InvalidDistribution("atom at NaN".into()));
        }
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::InvalidDistribution(format!("mass {m} is not a probability")));
        }
        total += m;
        mass[grid.offset(grid.nearest(x))] += m;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
    }
    Ok(QuantizedDensity { grid, mass })
}

fn check_same_grid(f: &QuantizedDensity, g: &QuantizedDensity) -> Result<LlrGrid> {
    if f.grid.key() != g.grid.key() {
        return Err(Error::GridMismatch);
    }
    Ok(f.grid)
}

// Below this many atom pairs the direct sum beats the FFT.
const DIRECT_STAR_PAIRS: usize = 1 << 16;

/// Law of `X + Y` for independent `X ~ f`, `Y ~ g`, with the overflow beyond
/// `±Q` folded into the extreme cells.
pub fn conv_star(f: &QuantizedDensity, g: &QuantizedDensity) -> Result<QuantizedDensity> {
    let grid = check_same_grid(f, g)?;
    let pairs = f.support_len().saturating_mul(g.support_len());
    let mass = if pairs <= DIRECT_STAR_PAIRS {
        star_direct(grid, &f.mass, &g.mass)
    } else {
        star_fft(grid, &f.mass, &g.mass, std::ptr::eq(f, g))
    };
    Ok(QuantizedDensity { grid, mass })
}

/// Direct `O(|supp f|·|supp g|)` summation.
pub(crate) fn star_direct(grid: LlrGrid, f: &[f64], g: &[f64]) -> Vec<f64> {
    let q = grid.q as i64;
    let mut out = vec![0.0; grid.len()];
    let gs: Vec<(i64, f64)> = g
        .iter()
        .enumerate()
        .filter(|(_, m)| **m != 0.0)
        .map(|(j, m)| (j as i64 - q, *m))
        .collect();
    for (i, &fm) in f.iter().enumerate() {
        if fm == 0.0 {
            continue;
        }
        let i = i as i64 - q;
        for &(j, gm) in &gs {
            let k = (i + j).clamp(-q, q);
            out[(k + q) as usize] += fm * gm;
        }
    }
    out
}

pub(crate) fn fft_plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Linear convolution of two nonnegative real sequences via one forward and
/// one inverse complex FFT (the two inputs share the forward transform).
pub(crate) fn linear_convolve(f: &[f64], g: &[f64], same: bool) -> Vec<f64> {
    let out_len = f.len() + g.len() - 1;
    let size = out_len.next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    for (b, &x) in buf.iter_mut().zip(f) {
        b.re = x;
    }
    if !same {
        for (b, &y) in buf.iter_mut().zip(g) {
            b.im = y;
        }
    }
    fft_plan(size, false).process(&mut buf);
    let spectrum: Vec<Complex64> = if same {
        buf.iter().map(|z| z * z).collect()
    } else {
        // Split Z = F + iG using conjugate symmetry of real transforms.
        (0..size)
            .map(|k| {
                let z = buf[k];
                let zc = buf[(size - k) % size].conj();
                let fk = (z + zc) * 0.5;
                let gk = (z - zc) * Complex64::new(0.0, -0.5);
                fk * gk
            })
            .collect()
    };
    let mut spectrum = spectrum;
    fft_plan(size, true).process(&mut spectrum);
    let scale = 1.0 / size as f64;
    spectrum[..out_len].iter().map(|z| (z.re * scale).max(0.0)).collect()
}

fn star_fft(grid: LlrGrid, f: &[f64], g: &[f64], same: bool) -> Vec<f64> {
    let q = grid.q;
    let full = linear_convolve(f, g, same);
    // full[t] is the mass of index t - 2Q.
    let mut out = full[q..=3 * q].to_vec();
    let low: f64 = full[..q].iter().sum();
    let high: f64 = full[3 * q + 1..].iter().sum();
    out[0] += low;
    out[2 * q] += high;
    out
}

/// Law of `X □ Y` for independent `X ~ f`, `Y ~ g`, projected pairwise onto
/// the grid exactly as `nearest(iδ □ jδ)`. Runs in `O(Q²)`.
pub fn conv_box(f: &QuantizedDensity, g: &QuantizedDensity) -> Result<QuantizedDensity> {
    let grid = check_same_grid(f, g)?;
    let q = grid.q;
    let mut out = vec![0.0; grid.len()];
    out[q] += zero_cell_mass(q, &f.mass, &g.mass);
    let (fp, fneg) = split_signs(q, &f.mass);
    let (gp, gneg) = split_signs(q, &g.mass);
    let rows: Vec<usize> = (1..=q)
        .filter(|&a| fp[a] != 0.0 || fneg[a] != 0.0 || gp[a] != 0.0 || gneg[a] != 0.0)
        .collect();
    // Only magnitudes with mass on either side matter; the output cell depends
    // on the magnitudes alone and is symmetric in them.
    for (ri, &a) in rows.iter().enumerate() {
        let x = grid.node(a as i64);
        for &b in &rows[ri..] {
            let k = grid.nearest(boxplus(x, grid.node(b as i64))) as usize;
            let (mut pos, mut neg) = (fp[a] * gp[b] + fneg[a] * gneg[b], fp[a] * gneg[b] + fneg[a] * gp[b]);
            if b != a {
                pos += fp[b] * gp[a] + fneg[b] * gneg[a];
                neg += fp[b] * gneg[a] + fneg[b] * gp[a];
            }
            out[q + k] += pos;
            out[q - k] += neg;
        }
    }
    Ok(QuantizedDensity { grid, mass: out })
}

fn zero_cell_mass(q: usize, f: &[f64], g: &[f64]) -> f64 {
    let tf: f64 = f.iter().sum();
    let tg: f64 = g.iter().sum();
    f[q] * tg + (tf - f[q]) * g[q]
}

/// Splits a density into magnitude-indexed positive and negative halves;
/// index 0 of both is unused.
fn split_signs(q: usize, m: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pos: Vec<f64> = std::iter::once(0.0).chain(m[q + 1..].iter().copied()).collect();
    let neg: Vec<f64> = std::iter::once(0.0).chain(m[..q].iter().rev().copied()).collect();
    (pos, neg)
}

/// For each magnitude `a`, the runs of `b >= a` on which
/// `nearest(aδ □ bδ)` is constant. Depends only on the grid.
#[derive(Debug)]
struct BoxTable {
    /// `starts[a]..starts[a+1]` indexes the runs of row `a`.
    starts: Vec<usize>,
    /// `(last b of the run, output cell)` per run.
    runs: Vec<(u32, u32)>,
}

impl BoxTable {
    fn build(grid: LlrGrid) -> Self {
        let q = grid.q;
        let mut starts = Vec::with_capacity(q + 2);
        let mut runs = Vec::with_capacity(q * (grid.box_window() + 2));
        starts.push(0);
        starts.push(0);
        let cell = |a: usize, b: usize| grid.nearest(boxplus(grid.node(a as i64), grid.node(b as i64))) as usize;
        for a in 1..=q {
            let last = cell(a, q);
            let mut k = cell(a, a);
            let mut b = a;
            while k < last {
                // First b whose output reaches k+1, seeded by the inverse map
                // and settled with the forward rounding itself.
                let mut next = breakpoint_guess(grid, a, k + 1).clamp(b + 1, q);
                while next > b + 1 && cell(a, next - 1) > k {
                    next -= 1;
                }
                while cell(a, next) <= k {
                    next += 1;
                }
                runs.push(((next - 1) as u32, k as u32));
                b = next;
                k = cell(a, b);
            }
            runs.push((q as u32, k as u32));
            starts.push(runs.len());
        }
        BoxTable { starts, runs }
    }

    fn get(grid: LlrGrid) -> Arc<BoxTable> {
        type TableCache = Mutex<HashMap<(usize, u64), Arc<BoxTable>>>;
        static TABLES: OnceLock<TableCache> = OnceLock::new();
        let cache = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&grid.key()) {
            return t.clone();
        }
        let table = Arc::new(BoxTable::build(grid));
        cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .entry(grid.key())
            .or_insert(table)
            .clone()
    }
}

/// Smallest `b` with `aδ □ bδ >= (t - ½)δ`, from the inverse
/// `y = z + ln(1 - e^{-(x+z)}) - ln(1 - e^{-(x-z)})` of `z = x □ y`.
fn breakpoint_guess(grid: LlrGrid, a: usize, t: usize) -> usize {
    let x = grid.node(a as i64);
    let z = (t as f64 - 0.5) * grid.delta;
    if z >= x {
        return grid.q;
    }
    let y = z + (-(-(x + z)).exp()).ln_1p() - (-(-(x - z)).exp()).ln_1p();
    if !y.is_finite() {
        return grid.q;
    }
    (y / grid.delta).ceil().max(0.0) as usize
}

/// Same projection as [`conv_box`] in `O(Q·M(δ))` operations.
///
/// Since `|k| ∈ (min(|i|,|j|) - M(δ), min(|i|,|j|)]` and is nondecreasing in
/// the larger magnitude, each row splits into at most `M(δ)+1` runs with a
/// fixed output cell; masses over a run come from prefix sums.
pub fn conv_box_fast(f: &QuantizedDensity, g: &QuantizedDensity) -> Result<QuantizedDensity> {
    let grid = check_same_grid(f, g)?;
    let q = grid.q;
    let table = BoxTable::get(grid);
    let mut out = vec![0.0; grid.len()];
    out[q] += zero_cell_mass(q, &f.mass, &g.mass);
    let (fp, fneg) = split_signs(q, &f.mass);
    let (gp, gneg) = split_signs(q, &g.mass);
    let prefix = |v: &[f64]| {
        let mut acc = 0.0;
        v.iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect::<Vec<f64>>()
    };
    let (pfp, pfn, pgp, pgn) = (prefix(&fp), prefix(&fneg), prefix(&gp), prefix(&gneg));
    let range = |p: &[f64], lo: usize, hi: usize| (p[hi] - p[lo - 1]).max(0.0);
    let f_tail = |a: usize| pfp[q] - pfp[a - 1] + pfn[q] - pfn[a - 1];
    let g_tail = |a: usize| pgp[q] - pgp[a - 1] + pgn[q] - pgn[a - 1];
    for a in 1..=q {
        let (fa_p, fa_n, ga_p, ga_n) = (fp[a], fneg[a], gp[a], gneg[a]);
        let f_row = fa_p != 0.0 || fa_n != 0.0;
        let g_row = ga_p != 0.0 || ga_n != 0.0;
        // Row a pairs f at a with g at b >= a, and g at a with f at b > a.
        if !(f_row && g_tail(a) != 0.0) && !(g_row && f_tail(a + 1).max(0.0) != 0.0 && a < q) {
            continue;
        }
        let mut lo = a;
        for &(hi, k) in &table.runs[table.starts[a]..table.starts[a + 1]] {
            let (hi, k) = (hi as usize, k as usize);
            let mut pos = 0.0;
            let mut neg = 0.0;
            if f_row {
                let (sp, sn) = (range(&pgp, lo, hi), range(&pgn, lo, hi));
                pos += fa_p * sp + fa_n * sn;
                neg += fa_p * sn + fa_n * sp;
            }
            let lo_f = lo.max(a + 1);
            if g_row && lo_f <= hi {
                let (sp, sn) = (range(&pfp, lo_f, hi), range(&pfn, lo_f, hi));
                pos += ga_p * sp + ga_n * sn;
                neg += ga_p * sn + ga_n * sp;
            }
            out[q + k] += pos;
            out[q - k] += neg;
            lo = hi + 1;
        }
    }
    Ok(QuantizedDensity { grid, mass: out })
}
