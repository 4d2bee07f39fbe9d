//! Error-floor analysis: minimum stall-pattern weight, its multiplicity,
//! the union-bound BER floor, and stall-pattern search on small instances.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bits::BitBlock;
use crate::code::{phi, Geometry, SrscParams};
use crate::error::{Error, Result};

/// Code parameters that matter for the floor (no field degrees).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloorParams {
    pub m1: usize,
    pub m2: usize,
    pub q1: usize,
    pub q2: usize,
    pub w: usize,
    pub t1: u32,
    pub t2: u32,
}

impl From<&SrscParams> for FloorParams {
    fn from(p: &SrscParams) -> Self {
        Self { m1: p.m1, m2: p.m2, q1: p.q1, q2: p.q2, w: p.w, t1: p.t1, t2: p.t2 }
    }
}

impl FloorParams {
    pub fn symmetric(m: usize, q: usize, w: usize, t: u32) -> Self {
        Self { m1: m, m2: m, q1: q, q2: q, w, t1: t, t2: t }
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.m1, self.m2, self.q1, self.q2, self.w)
    }

    fn check(&self) -> Result<()> {
        if self.t1 == 0 || self.t2 == 0 {
            return Err(Error::InvalidParams(vec![crate::code::Violation::Zero("t")]));
        }
        self.geometry().map(|_| ())
    }

    fn swapped(&self) -> Self {
        Self { m1: self.m2, m2: self.m1, q1: self.q2, q2: self.q1, w: self.w, t1: self.t2, t2: self.t1 }
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exact minimum stall weight for `w = 2`.
pub fn s_min_w2(t1: u32, t2: u32, q1: usize, q2: usize) -> u64 {
    let (a, b) = (t1 as u64 + 1, t2 as u64 + 1);
    let (q1, q2) = (q1 as u64, q2 as u64);
    let first = (ceil_div(b, q1) * a).max(ceil_div(a, q1) * b);
    let second = (ceil_div(a, q2) * b).max(ceil_div(b, q2) * a);
    first.min(second)
}

/// Lower bound on the minimum stall weight for `w ≥ q + 1`.
pub fn s_min_lb_wide(t1: u32, t2: u32) -> u64 {
    let t = t1.min(t2) as u64;
    (t + 1) * (t + 2) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tightness {
    /// The lower bound is attained.
    TightLowerBound,
    StrictlyLarger,
    Unknown,
}

impl Tightness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tightness::TightLowerBound => "tight",
            Tightness::StrictlyLarger => "strictly-larger",
            Tightness::Unknown => "unknown",
        }
    }
}

fn tight_conditions(t1: u32, t2: u32, q: usize, w: usize) -> bool {
    let t = t1.min(t2) as usize;
    let mult = if t1 != t2 { 2 } else { 1 };
    w > mult * (t + 1) && q > t
}

/// Whether the wide-coupling lower bound is attained. Since the attainment
/// conditions are necessary and sufficient, every in-regime input is
/// classified; `Unknown` is kept for callers that model other regimes.
pub fn tightness(t1: u32, t2: u32, q: usize, w: usize) -> Result<Tightness> {
    if w < q + 1 {
        return Err(Error::Regime(format!("w = {w} < q + 1 = {}", q + 1)));
    }
    if tight_conditions(t1, t2, q, w) {
        return Ok(Tightness::TightLowerBound);
    }
    let t = t1.min(t2) as usize;
    let unequal_regime = t1 != t2 && (t >= q || (t < q && w <= 2 * (t + 1)));
    if unequal_regime || !tight_conditions(t1, t2, q, w) {
        return Ok(Tightness::StrictlyLarger);
    }
    Ok(Tightness::Unknown)
}

/// Which sums of an assignment matrix are bounded by which thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumRule {
    /// Each sub-array (column) holds at least `t1 + 1` errors and each row
    /// at least `t2 + 1`.
    SubArray,
    /// Columns at least `t2 + 1`, rows at least `t1 + 1`.
    Transposed,
}

/// Constraint system for weighted enumeration of integer matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentSpec {
    pub rows: usize,
    pub cols: usize,
    /// Columns `< split` use `bounds[0]` and weight `C(q[0], ·)`; the rest
    /// use side 1.
    pub split: usize,
    pub bounds: [(u64, u64); 2],
    pub q: [u64; 2],
    pub col_min: u64,
    pub row_min: u64,
    pub total: u64,
}

impl AssignmentSpec {
    pub fn new(t1: u32, t2: u32, q1: usize, q2: usize, s_min: u64, j: usize, rule: SumRule) -> Self {
        let a = t1 as u64 + 1;
        let (q1, q2) = (q1 as u64, q2 as u64);
        let lo = |q: u64| a - (ceil_div(a, q) - 1) * q;
        let (col_min, row_min) = match rule {
            SumRule::SubArray => (a, t2 as u64 + 1),
            SumRule::Transposed => (t2 as u64 + 1, a),
        };
        Self {
            rows: ceil_div(a, q1) as usize,
            cols: ceil_div(s_min, a) as usize,
            split: j,
            bounds: [(lo(q1), q1), (lo(q2), q2)],
            q: [q1, q2],
            col_min,
            row_min,
            total: s_min,
        }
    }

    fn side(&self, col: usize) -> usize {
        usize::from(col >= self.split)
    }

    /// Weight `Π C(q, A)` of a matrix given column-major.
    pub fn weight(&self, entries: &[u64]) -> BigUint {
        let mut w = BigUint::one();
        for (idx, &a) in entries.iter().enumerate() {
            w *= binomial(self.q[self.side(idx / self.rows)], a);
        }
        w
    }

    pub fn admits(&self, entries: &[u64]) -> bool {
        if entries.len() != self.rows * self.cols {
            return false;
        }
        let mut total = 0;
        for c in 0..self.cols {
            let (lo, hi) = self.bounds[self.side(c)];
            let col = &entries[c * self.rows..(c + 1) * self.rows];
            if col.iter().any(|&a| a < lo || a > hi) || col.iter().sum::<u64>() < self.col_min {
                return false;
            }
            total += col.iter().sum::<u64>();
        }
        (0..self.rows).all(|r| (0..self.cols).map(|c| entries[c * self.rows + r]).sum::<u64>() >= self.row_min)
            && total == self.total
    }

    /// Weighted count over all admissible matrices.
    pub fn weighted_count(&self) -> BigUint {
        if self.rows == 0 || self.cols == 0 || self.bounds.iter().any(|&(lo, hi)| lo > hi) {
            return BigUint::zero();
        }
        let mut cols_min = vec![0u64; self.cols + 1];
        let mut cols_max = vec![0u64; self.cols + 1];
        for c in (0..self.cols).rev() {
            let (lo, hi) = self.bounds[self.side(c)];
            let r = self.rows as u64;
            cols_min[c] = cols_min[c + 1] + (lo * r).max(self.col_min);
            cols_max[c] = cols_max[c + 1] + hi * r;
        }
        let mut row_sums = vec![0u64; self.rows];
        let mut acc = BigUint::zero();
        self.columns(0, 0, &mut row_sums, &BigUint::one(), &cols_min, &cols_max, &mut acc);
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn columns(
        &self,
        c: usize,
        total: u64,
        row_sums: &mut [u64],
        weight: &BigUint,
        cols_min: &[u64],
        cols_max: &[u64],
        acc: &mut BigUint,
    ) {
        if c == self.cols {
            if total == self.total && row_sums.iter().all(|&s| s >= self.row_min) {
                *acc += weight;
            }
            return;
        }
        if total + cols_min[c] > self.total || total + cols_max[c] < self.total {
            return;
        }
        let mut col = vec![0u64; self.rows];
        self.entries(c, 0, &mut col, total, row_sums, weight, cols_min, cols_max, acc);
    }

    #[allow(clippy::too_many_arguments)]
    fn entries(
        &self,
        c: usize,
        r: usize,
        col: &mut [u64],
        total: u64,
        row_sums: &mut [u64],
        weight: &BigUint,
        cols_min: &[u64],
        cols_max: &[u64],
        acc: &mut BigUint,
    ) {
        let side = self.side(c);
        if r == self.rows {
            let sum: u64 = col.iter().sum();
            if sum < self.col_min {
                return;
            }
            let mut w = weight.clone();
            for &a in col.iter() {
                w *= binomial(self.q[side], a);
            }
            for (s, &a) in row_sums.iter_mut().zip(col.iter()) {
                *s += a;
            }
            self.columns(c + 1, total + sum, row_sums, &w, cols_min, cols_max, acc);
            for (s, &a) in row_sums.iter_mut().zip(col.iter()) {
                *s -= a;
            }
            return;
        }
        let (lo, hi) = self.bounds[side];
        for a in lo..=hi {
            col[r] = a;
            self.entries(c, r + 1, col, total, row_sums, weight, cols_min, cols_max, acc);
        }
    }
}

/// Weighted count of error-number assignments with `j` sub-arrays on the
/// `q1` side and `⌈s_min/(t1+1)⌉` sub-arrays in total.
pub fn enumerate_assignments(t1: u32, t2: u32, q1: usize, q2: usize, s_min: u64, j: usize, rule: SumRule) -> BigUint {
    AssignmentSpec::new(t1, t2, q1, q2, s_min, j, rule).weighted_count()
}

/// How the multiplicity sums over assignment matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssignmentRule {
    pub sums: SumRule,
    /// Sum over every sub-array count `J` with `⌈(t2+1)/q1⌉ ≤ J ≤
    /// ⌊s_min/(t1+1)⌋` instead of the single count `⌈s_min/(t1+1)⌉`. The
    /// two agree whenever `t1 + 1` divides `s_min`.
    pub all_column_counts: bool,
}

impl AssignmentRule {
    /// Matches exhaustive stall search on every instance tried.
    pub const DEFAULT: Self = Self { sums: SumRule::SubArray, all_column_counts: true };
    pub const SINGLE_COUNT: Self = Self { sums: SumRule::SubArray, all_column_counts: false };
    pub const TRANSPOSED: Self = Self { sums: SumRule::Transposed, all_column_counts: false };
}

/// Multiplicity of minimum stall patterns for `w = 2`, counted over
/// patterns whose earliest block is even (odd after the swap that makes
/// `q1 ≥ q2`).
pub fn a_min_w2(p: &FloorParams) -> Result<BigUint> {
    a_min_w2_with(p, AssignmentRule::DEFAULT)
}

pub fn a_min_w2_with(p: &FloorParams, rule: AssignmentRule) -> Result<BigUint> {
    p.check()?;
    if p.w != 2 {
        return Err(Error::Regime(format!("w = {} but the exact multiplicity needs w = 2", p.w)));
    }
    let p = if p.q2 > p.q1 { p.swapped() } else { *p };
    let s = s_min_w2(p.t1, p.t2, p.q1, p.q2);
    let a = p.t1 as u64 + 1;
    let rows = ceil_div(a, p.q1 as u64);
    let a_row = binomial((p.m1 / p.q1) as u64, rows);
    let sub = (p.m2 / p.q2) as u64;
    let counts = if rule.all_column_counts {
        ceil_div(p.t2 as u64 + 1, p.q1 as u64)..=s / a
    } else {
        let c = ceil_div(s, a);
        c..=c
    };
    let mut inner = BigUint::zero();
    for cols in counts {
        let mut spec = AssignmentSpec::new(p.t1, p.t2, p.q1, p.q2, s, cols as usize, rule.sums);
        spec.cols = cols as usize;
        inner += binomial(sub, cols) * spec.weighted_count();
        // q2 > t1 / rows, kept strict.
        if (p.q2 as u64) * rows > p.t1 as u64 {
            for j in 1..cols {
                spec.split = j as usize;
                inner += binomial(sub, j) * binomial(sub, cols - j) * spec.weighted_count();
            }
        }
    }
    Ok(a_row * inner)
}

fn wide_check(p: &FloorParams) -> Result<()> {
    p.check()?;
    if p.w < 3 {
        return Err(Error::Regime(format!("w = {} but wide coupling needs w > 2", p.w)));
    }
    if p.w < p.q1 + 1 {
        return Err(Error::Regime(format!("w = {} < q + 1 = {}", p.w, p.q1 + 1)));
    }
    Ok(())
}

/// Multiplicity at the lower bound when it is attained.
pub fn a_min_wide(p: &FloorParams) -> Result<BigUint> {
    wide_check(p)?;
    let t = p.t1.min(p.t2) as u64;
    let mult = if p.t1 != p.t2 { 2 } else { 1 };
    let (m, q, w) = (p.m1 as u64, p.q1 as u64, p.w as u64);
    Ok(binomial((w - 1) / mult, t + 1) * BigUint::from(m / (w - 1)) * BigUint::from(m / q).pow(t as u32 + 1))
}

/// `m^{t+2} / ((w − 1)·q^{t+1})` with `t = min(t1, t2)`.
pub fn a_min_wide_bound(p: &FloorParams) -> Result<BigRational> {
    wide_check(p)?;
    let t = p.t1.min(p.t2);
    let num = BigInt::from(p.m1).pow(t + 2);
    let den = BigInt::from(p.w - 1) * BigInt::from(p.q1).pow(t + 1);
    Ok(BigRational::new(num, den))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Multiplicity {
    Exact(BigUint),
    Bound(BigRational),
}

impl Multiplicity {
    pub fn to_f64(&self) -> f64 {
        match self {
            Multiplicity::Exact(a) => a.to_f64().unwrap_or(f64::INFINITY),
            Multiplicity::Bound(a) => a.to_f64().unwrap_or(f64::INFINITY),
        }
    }
}

impl std::fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Multiplicity::Exact(a) => write!(f, "{a}"),
            Multiplicity::Bound(a) if a.is_integer() => write!(f, "{}", a.numer()),
            Multiplicity::Bound(_) => write!(f, "{:.6e}", self.to_f64()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloorEstimate {
    pub s_min: u64,
    pub a_min: Multiplicity,
    /// Bits per block used as the denominator.
    pub block_bits: u64,
    /// `s_min` and `a_min` are exact.
    pub tight: bool,
    /// Present for `w > 2`.
    pub tightness: Option<Tightness>,
}

impl FloorEstimate {
    pub fn is_upper_bound(&self) -> bool {
        !self.tight
    }

    /// `s_min·A_min / block_bits`, the factor in front of `p^{s_min}`.
    pub fn coefficient(&self) -> f64 {
        self.s_min as f64 * self.a_min.to_f64() / self.block_bits as f64
    }

    pub fn ber_floor(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        self.coefficient() * p.powi(self.s_min as i32)
    }
}

pub fn floor_estimate(p: &FloorParams) -> Result<FloorEstimate> {
    p.check()?;
    if p.q1.max(p.q2) > p.t1.min(p.t2) as usize {
        log::warn!(
            "max(q1, q2) = {} exceeds min(t1, t2) = {}; the floor may be dominated by larger arrays",
            p.q1.max(p.q2),
            p.t1.min(p.t2)
        );
    }
    if p.w == 2 {
        return Ok(FloorEstimate {
            s_min: s_min_w2(p.t1, p.t2, p.q1, p.q2),
            a_min: Multiplicity::Exact(a_min_w2(p)?),
            block_bits: (p.m1 * p.m2 / p.q1.min(p.q2)) as u64,
            tight: true,
            tightness: None,
        });
    }
    let tight = tightness(p.t1, p.t2, p.q1, p.w)?;
    let a_min = if tight == Tightness::TightLowerBound {
        Multiplicity::Exact(a_min_wide(p)?)
    } else {
        Multiplicity::Bound(a_min_wide_bound(p)?)
    };
    Ok(FloorEstimate {
        s_min: s_min_lb_wide(p.t1, p.t2),
        a_min,
        block_bits: (p.m1 * p.m1 / p.q1) as u64,
        tight: tight == Tightness::TightLowerBound,
        tightness: Some(tight),
    })
}

pub fn ber_floor(p: &FloorParams, prob: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&prob) {
        return Err(Error::Channel(format!("crossover probability {prob} outside [0, 0.5)")));
    }
    Ok(floor_estimate(p)?.ber_floor(prob))
}

/// Error positions `(block, row, col)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StallPattern {
    pub coords: Vec<(i64, usize, usize)>,
}

impl StallPattern {
    pub fn weight(&self) -> usize {
        self.coords.len()
    }

    /// Errors per component-code row constraint `(block, row)`.
    pub fn constraint_counts(&self, geometry: &Geometry) -> HashMap<(i64, usize), u32> {
        let mut counts = HashMap::new();
        for &(i, r, c) in &self.coords {
            *counts.entry((i, r)).or_insert(0) += 1;
            let tg = geometry.coupled_target(i, r, c);
            *counts.entry((i + tg.lag as i64, tg.row)).or_insert(0) += 1;
        }
        counts
    }

    /// Nonempty and every touched constraint sees more than `t` errors.
    pub fn is_fixed_point(&self, geometry: &Geometry, t1: u32, t2: u32) -> bool {
        !self.coords.is_empty()
            && self.constraint_counts(geometry).iter().all(|(&(i, _), &n)| n > if phi(i) == 1 { t1 } else { t2 })
    }

    /// Error blocks `1..=len` with the pattern's positions set.
    pub fn error_blocks(&self, geometry: &Geometry, len: usize) -> Vec<BitBlock> {
        let mut blocks: Vec<BitBlock> = (1..=len as i64)
            .map(|i| {
                let (r, c) = geometry.block_dims(i);
                BitBlock::zeros(r, c)
            })
            .collect();
        for &(i, r, c) in &self.coords {
            if i >= 1 && (i as usize) <= len {
                blocks[i as usize - 1].set(r, c, 1);
            }
        }
        blocks
    }
}

/// Stall search over blocks `first..first + window` of a coupling
/// geometry. Blocks before `first` are error free.
#[derive(Clone, Debug)]
pub struct OracleQuery {
    pub geometry: Geometry,
    pub t1: u32,
    pub t2: u32,
    pub first: i64,
    pub window: usize,
    pub s_max: usize,
    pub node_budget: u64,
    /// Patterns to keep in the result.
    pub keep: usize,
}

impl OracleQuery {
    /// Window of `w + 1` blocks starting at the designated block.
    pub fn new(geometry: Geometry, t1: u32, t2: u32, first: i64, s_max: usize) -> Self {
        let window = geometry.w() + 1;
        Self { geometry, t1, t2, first, window, s_max, node_budget: 2_000_000_000, keep: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub min_weight: Option<usize>,
    /// Patterns of weight `min_weight` that hit the first block.
    pub count: u64,
    pub patterns: Vec<StallPattern>,
    pub nodes: u64,
}

struct Structure {
    coords: Vec<(i64, usize, usize)>,
    bit_cons: Vec<[usize; 2]>,
    cons_bits: Vec<Vec<usize>>,
    cons_t: Vec<u32>,
    designated: usize,
}

impl Structure {
    fn build(q: &OracleQuery) -> Result<Self> {
        if q.window == 0 || q.first < 1 {
            return Err(Error::InvalidParams(vec![crate::code::Violation::Zero("window")]));
        }
        let g = &q.geometry;
        let mut coords = Vec::new();
        for i in q.first..q.first + q.window as i64 {
            let (rows, cols) = g.block_dims(i);
            for r in 0..rows {
                for c in 0..cols {
                    coords.push((i, r, c));
                }
            }
        }
        let designated = g.block_bits(q.first);
        let mut ids: HashMap<(i64, usize), usize> = HashMap::new();
        let mut cons_bits: Vec<Vec<usize>> = Vec::new();
        let mut cons_t = Vec::new();
        let mut id = |key: (i64, usize), cons_bits: &mut Vec<Vec<usize>>| {
            *ids.entry(key).or_insert_with(|| {
                cons_bits.push(Vec::new());
                cons_t.push(if phi(key.0) == 1 { q.t1 } else { q.t2 });
                cons_bits.len() - 1
            })
        };
        let mut bit_cons = Vec::with_capacity(coords.len());
        for (b, &(i, r, c)) in coords.iter().enumerate() {
            let own = id((i, r), &mut cons_bits);
            let tg = g.coupled_target(i, r, c);
            let coupled = id((i + tg.lag as i64, tg.row), &mut cons_bits);
            cons_bits[own].push(b);
            cons_bits[coupled].push(b);
            bit_cons.push([own, coupled]);
        }
        Ok(Self { coords, bit_cons, cons_bits, cons_t, designated })
    }

    fn pattern(&self, bits: impl Iterator<Item = usize>) -> StallPattern {
        let mut coords: Vec<_> = bits.map(|b| self.coords[b]).collect();
        coords.sort();
        StallPattern { coords }
    }
}

const UNDECIDED: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

struct Search<'a> {
    s: &'a Structure,
    state: Vec<u8>,
    cnt: Vec<u32>,
    undecided: Vec<u32>,
    size: usize,
    target: usize,
    nodes: u64,
    budget: u64,
    count: u64,
    keep: usize,
    patterns: Vec<StallPattern>,
    stop_after: Option<u64>,
}

impl<'a> Search<'a> {
    fn new(s: &'a Structure, target: usize, budget: u64, keep: usize) -> Self {
        Self {
            s,
            state: vec![UNDECIDED; s.coords.len()],
            cnt: vec![0; s.cons_bits.len()],
            undecided: s.cons_bits.iter().map(|b| b.len() as u32).collect(),
            size: 0,
            target,
            nodes: 0,
            budget,
            count: 0,
            keep,
            patterns: Vec::new(),
            stop_after: None,
        }
    }

    fn include(&mut self, b: usize) {
        self.state[b] = IN;
        self.size += 1;
        for c in self.s.bit_cons[b] {
            self.cnt[c] += 1;
            self.undecided[c] -= 1;
        }
    }

    fn exclude(&mut self, b: usize) {
        self.state[b] = OUT;
        for c in self.s.bit_cons[b] {
            self.undecided[c] -= 1;
        }
    }

    fn reset(&mut self, b: usize) {
        if self.state[b] == IN {
            self.size -= 1;
            for c in self.s.bit_cons[b] {
                self.cnt[c] -= 1;
            }
        }
        for c in self.s.bit_cons[b] {
            self.undecided[c] += 1;
        }
        self.state[b] = UNDECIDED;
    }

    fn done(&self) -> bool {
        self.stop_after.is_some_and(|n| self.count >= n)
    }

    /// Includes each candidate in turn, excluding the earlier ones.
    fn branch(&mut self, candidates: &[usize]) -> Result<()> {
        for &b in candidates {
            if self.done() {
                break;
            }
            self.include(b);
            let r = self.node();
            self.reset(b);
            r?;
            self.exclude(b);
        }
        for &b in candidates {
            if self.state[b] == OUT {
                self.reset(b);
            }
        }
        Ok(())
    }

    fn node(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SearchBudget(self.nodes));
        }
        let remaining = (self.target - self.size) as u32;
        let (mut max_d, mut sum_d) = (0u32, 0u32);
        let mut best: Option<(u32, usize)> = None;
        for c in 0..self.cnt.len() {
            let n = self.cnt[c];
            let t = self.s.cons_t[c];
            if n == 0 || n > t {
                continue;
            }
            let d = t + 1 - n;
            if self.undecided[c] < d {
                return Ok(());
            }
            max_d = max_d.max(d);
            sum_d += d;
            let options = self.undecided[c] - d + 1;
            if best.is_none_or(|(o, _)| options < o) {
                best = Some((options, c));
            }
        }
        let Some((options, c)) = best else {
            if self.size == self.target {
                self.count += 1;
                if self.patterns.len() < self.keep {
                    let bits = (0..self.state.len()).filter(|&b| self.state[b] == IN);
                    self.patterns.push(self.s.pattern(bits));
                }
            }
            return Ok(());
        };
        if max_d > remaining || sum_d > 2 * remaining {
            return Ok(());
        }
        let mut candidates: Vec<usize> =
            self.s.cons_bits[c].iter().copied().filter(|&b| self.state[b] == UNDECIDED).collect();
        // Bits whose other constraint already holds errors first.
        candidates.sort_by_key(|&b| {
            let other = self.s.bit_cons[b].iter().copied().find(|&x| x != c).unwrap_or(c);
            u32::from(self.cnt[other] == 0)
        });
        candidates.truncate(options as usize);
        self.branch(&candidates)
    }

    fn run(&mut self) -> Result<()> {
        let roots: Vec<usize> = (0..self.s.designated).collect();
        self.branch(&roots)
    }
}

/// Minimal stall weight and its exact count by branching on unsatisfied
/// constraints. A set is counted when every touched constraint holds zero
/// or more than `t` errors; at the minimal weight these are exactly the
/// error patterns left uncorrected by miscorrection-free iterative decoding.
pub fn brute_force_stall_oracle(query: &OracleQuery) -> Result<OracleResult> {
    let s = Structure::build(query)?;
    let mut nodes = 0;
    for target in 1..=query.s_max {
        let mut search = Search::new(&s, target, query.node_budget.saturating_sub(nodes), query.keep);
        search.run()?;
        nodes += search.nodes;
        if search.count > 0 {
            return Ok(OracleResult {
                min_weight: Some(target),
                count: search.count,
                patterns: search.patterns,
                nodes,
            });
        }
    }
    Ok(OracleResult { min_weight: None, count: 0, patterns: Vec::new(), nodes })
}

/// First fixed-point pattern of exactly `weight` errors hitting the first
/// block, if any.
pub fn find_stall_pattern(query: &OracleQuery, weight: usize) -> Result<Option<StallPattern>> {
    let s = Structure::build(query)?;
    let mut search = Search::new(&s, weight, query.node_budget, 1);
    search.stop_after = Some(1);
    search.run()?;
    Ok(search.patterns.pop())
}

/// Miscorrection-free iterative decoding of an error set in the structural
/// model: every constraint holding between 1 and `t` errors clears them,
/// until nothing changes. Returns the residual errors.
fn peel(s: &Structure, errors: &mut [bool], cnt: &mut [u32]) -> usize {
    cnt.iter_mut().for_each(|c| *c = 0);
    let mut residual = 0;
    for (b, &e) in errors.iter().enumerate() {
        if e {
            residual += 1;
            for c in s.bit_cons[b] {
                cnt[c] += 1;
            }
        }
    }
    loop {
        let mut changed = false;
        for c in 0..cnt.len() {
            if cnt[c] == 0 || cnt[c] > s.cons_t[c] {
                continue;
            }
            for &b in &s.cons_bits[c] {
                if errors[b] {
                    errors[b] = false;
                    residual -= 1;
                    for x in s.bit_cons[b] {
                        cnt[x] -= 1;
                    }
                }
            }
            changed = true;
        }
        if !changed {
            return residual;
        }
    }
}

/// Exhaustive version of [`brute_force_stall_oracle`]: decodes every error
/// pattern of each weight up to `s_max` that hits the first block.
pub fn exhaustive_stall_oracle(query: &OracleQuery) -> Result<OracleResult> {
    let s = Structure::build(query)?;
    let n = s.coords.len();
    let mut nodes = 0u64;
    let mut cnt = vec![0u32; s.cons_bits.len()];
    let mut errors = vec![false; n];
    for weight in 1..=query.s_max.min(n) {
        let mut count = 0u64;
        let mut patterns = Vec::new();
        let mut idx: Vec<usize> = (0..weight).collect();
        loop {
            if idx[0] >= s.designated {
                break;
            }
            nodes += 1;
            if nodes > query.node_budget {
                return Err(Error::SearchBudget(nodes));
            }
            errors.iter_mut().for_each(|e| *e = false);
            for &b in &idx {
                errors[b] = true;
            }
            if peel(&s, &mut errors, &mut cnt) > 0 {
                count += 1;
                if patterns.len() < query.keep {
                    patterns.push(s.pattern(idx.iter().copied()));
                }
            }
            // Next combination in lexicographic order.
            let mut k = weight;
            while k > 0 && idx[k - 1] == n - weight + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for x in k..weight {
                idx[x] = idx[x - 1] + 1;
            }
        }
        if count > 0 {
            return Ok(OracleResult { min_weight: Some(weight), count, patterns, nodes });
        }
    }
    Ok(OracleResult { min_weight: None, count: 0, patterns: Vec::new(), nodes })
}
