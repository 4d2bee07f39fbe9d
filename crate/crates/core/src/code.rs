//! SR-staircase structure: parameters, sub-block rearrangement, coupling
//! geometry and recursive chain encoding.
//!
//! Blocks are indexed from 1. Odd blocks are `(m1/q1) × m2` and protected
//! row-wise by `C2`; even blocks are `(m2/q2) × m1` and protected by `C1`.
//! Blocks with index `≤ 0` are virtual all-zero blocks.

use std::collections::VecDeque;
use std::fmt;

use num_rational::Ratio;

use crate::bch::BchCode;
use crate::bits::BitBlock;
use crate::error::{Error, Result};

/// `φ(x)`: 2 for odd `x`, 1 for even `x`.
pub fn phi(x: i64) -> usize {
    if x.rem_euclid(2) == 1 {
        2
    } else {
        1
    }
}

/// A failed parameter constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Zero(&'static str),
    NotDivisible { what: &'static str, value: usize, divisor: usize },
    WideCouplingAsymmetric { m1: usize, m2: usize, q1: usize, q2: usize },
    LengthExceedsField { component: usize, n: usize, max: usize },
    NoFreshInfo { component: usize, m: usize, redundancy: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Zero(name) => write!(f, "{name} must be positive"),
            Violation::NotDivisible { what, value, divisor } => {
                write!(f, "{what} = {value} is not divisible by {divisor}")
            }
            Violation::WideCouplingAsymmetric { m1, m2, q1, q2 } => {
                write!(f, "w > 2 requires m1 = m2 and q1 = q2 (got m1={m1}, m2={m2}, q1={q1}, q2={q2})")
            }
            Violation::LengthExceedsField { component, n, max } => {
                write!(f, "n{component} = {n} exceeds 2^nu{component} - 1 = {max}")
            }
            Violation::NoFreshInfo { component, m, redundancy } => write!(
                f,
                "fresh information width of C{component} is negative (m{component} = {m} < nu*t = {redundancy})"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrscParams {
    pub m1: usize,
    pub m2: usize,
    pub q1: usize,
    pub q2: usize,
    pub w: usize,
    pub nu1: u32,
    pub nu2: u32,
    pub t1: u32,
    pub t2: u32,
    /// Number of transmitted blocks `L`.
    pub chain_len: usize,
}

impl SrscParams {
    /// Same block width, decomposition and component code on both sides.
    pub fn symmetric(m: usize, q: usize, w: usize, nu: u32, t: u32, chain_len: usize) -> Self {
        Self { m1: m, m2: m, q1: q, q2: q, w, nu1: nu, nu2: nu, t1: t, t2: t, chain_len }
    }

    fn pick<T: Copy>(j: usize, a: T, b: T) -> T {
        match j {
            1 => a,
            2 => b,
            _ => panic!("component index must be 1 or 2, got {j}"),
        }
    }

    pub fn m(&self, j: usize) -> usize {
        Self::pick(j, self.m1, self.m2)
    }

    pub fn q(&self, j: usize) -> usize {
        Self::pick(j, self.q1, self.q2)
    }

    pub fn t(&self, j: usize) -> u32 {
        Self::pick(j, self.t1, self.t2)
    }

    pub fn nu(&self, j: usize) -> u32 {
        Self::pick(j, self.nu1, self.nu2)
    }

    fn other(j: usize) -> usize {
        3 - j
    }

    /// Component length `n_j = m_j + m_j·q_{other}/q_j`.
    pub fn n(&self, j: usize) -> usize {
        self.m(j) + self.coupled_width(j)
    }

    /// Width `n_j − m_j` of the coupled part of a `C_j` row.
    pub fn coupled_width(&self, j: usize) -> usize {
        self.m(j) * self.q(Self::other(j)) / self.q(j)
    }

    pub fn redundancy(&self, j: usize) -> usize {
        self.nu(j) as usize * self.t(j) as usize
    }

    pub fn k(&self, j: usize) -> usize {
        self.n(j) - self.redundancy(j)
    }

    /// Shortening `e_j = 2^ν_j − 1 − n_j`.
    pub fn e(&self, j: usize) -> usize {
        (1usize << self.nu(j)) - 1 - self.n(j)
    }

    /// Fresh information bits per row of a block protected by `C_j`.
    pub fn fresh_width(&self, j: usize) -> usize {
        self.m(j) - self.redundancy(j)
    }

    /// Rows of a block protected by `C_j`.
    pub fn block_rows(&self, j: usize) -> usize {
        let o = Self::other(j);
        self.m(o) / self.q(o)
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        if self.t1 == 0 {
            v.push(Violation::Zero("t1"));
        }
        if self.t2 == 0 {
            v.push(Violation::Zero("t2"));
        }
        v.extend(geometry_violations(self.m1, self.m2, self.q1, self.q2, self.w));
        if !v.is_empty() {
            return Err(v);
        }
        for j in [1, 2] {
            let nu = self.nu(j);
            if !(crate::gf::MIN_NU..=crate::gf::MAX_NU).contains(&nu) {
                v.push(Violation::LengthExceedsField { component: j, n: self.n(j), max: 0 });
                continue;
            }
            let max = (1usize << nu) - 1;
            if self.n(j) > max {
                v.push(Violation::LengthExceedsField { component: j, n: self.n(j), max });
            }
            if self.redundancy(j) > self.m(j) {
                v.push(Violation::NoFreshInfo { component: j, m: self.m(j), redundancy: self.redundancy(j) });
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.m1, self.m2, self.q1, self.q2, self.w)
    }

    pub fn check(&self) -> Result<()> {
        self.validate().map_err(Error::InvalidParams)
    }

    /// `R = 1 − ½(ν1t1/m1 + ν2t2/m2)`.
    pub fn rate(&self) -> Ratio<i64> {
        rate_from_redundancy(self.m1, self.m2, self.redundancy(1), self.redundancy(2))
    }

    /// `R = ½(k1/m1 + k2/m2 − q2/q1 − q1/q2)`.
    pub fn rate_from_dimensions(&self) -> Ratio<i64> {
        let r = |a: usize, b: usize| Ratio::new(a as i64, b as i64);
        (r(self.k(1), self.m1) + r(self.k(2), self.m2) - r(self.q2, self.q1) - r(self.q1, self.q2))
            / Ratio::from_integer(2)
    }
}

/// Rate of a staircase-like chain with `r_j` parity bits per row of width
/// `m_j`.
pub fn rate_from_redundancy(m1: usize, m2: usize, r1: usize, r2: usize) -> Ratio<i64> {
    Ratio::from_integer(1)
        - (Ratio::new(r1 as i64, m1 as i64) + Ratio::new(r2 as i64, m2 as i64)) / Ratio::from_integer(2)
}

pub fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Position of input cell `(r, c)` of a `rows × cols` block after splitting
/// it into `q` column sub-blocks, transposing each and concatenating.
#[inline]
pub fn rearranged_position(rows: usize, cols: usize, q: usize, r: usize, c: usize) -> (usize, usize) {
    let sub = cols / q;
    (c % sub, (c / sub) * rows + r)
}

/// Inverse of [`rearranged_position`].
#[inline]
pub fn rearranged_source(rows: usize, cols: usize, q: usize, orow: usize, ocol: usize) -> (usize, usize) {
    let sub = cols / q;
    (ocol % rows, (ocol / rows) * sub + orow)
}

/// Sub-block rearrangement: `(rows × cols)` → `(cols/q) × (rows·q)`.
pub fn rearrange(block: &BitBlock, q: usize) -> Result<BitBlock> {
    if q == 0 || !block.cols().is_multiple_of(q) {
        return Err(Error::Indivisible { cols: block.cols(), q });
    }
    let (rows, cols) = (block.rows(), block.cols());
    Ok(BitBlock::from_fn(cols / q, rows * q, |orow, ocol| {
        let (r, c) = rearranged_source(rows, cols, q, orow, ocol);
        block.get(r, c) == 1
    }))
}

/// Concatenates slice `l` of `prev[l-1]` for `l = 1..=prev.len()`, each
/// slice being `cols / prev.len()` columns wide.
pub fn coupling_slices(prev: &[BitBlock]) -> Result<BitBlock> {
    let first = prev.first().ok_or_else(|| Error::DecoderConfig("no preceding blocks".into()))?;
    let (rows, cols) = (first.rows(), first.cols());
    for b in prev {
        if (b.rows(), b.cols()) != (rows, cols) {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: b.rows(),
                cols: b.cols(),
            });
        }
    }
    if cols % prev.len() != 0 {
        return Err(Error::Indivisible { cols, q: prev.len() });
    }
    let width = cols / prev.len();
    Ok(BitBlock::from_fn(rows, cols, |r, c| prev[c / width].get(r, c) == 1))
}

/// Where a coupled position reads from: block `i − lag`, cell `(row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Source {
    pub lag: usize,
    pub row: usize,
    pub col: usize,
}

/// Where a code-block cell is re-used: block `j + lag`, row `row`, coupled
/// position `pos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Target {
    pub lag: usize,
    pub row: usize,
    pub pos: usize,
}

/// Coupling geometry of an SR-staircase chain, independent of the
/// component codes.
#[derive(Clone, Debug)]
pub struct Geometry {
    m: [usize; 2],
    q: [usize; 2],
    w: usize,
    /// Optional column permutation of the coupled part, per component
    /// (`perm[j-1][p]` is the deterministic position feeding position `p`).
    perm: [Option<Vec<usize>>; 2],
    perm_inv: [Option<Vec<usize>>; 2],
}

fn geometry_violations(m1: usize, m2: usize, q1: usize, q2: usize, w: usize) -> Vec<Violation> {
    let mut v = Vec::new();
    for (name, value) in [("m1", m1), ("m2", m2), ("q1", q1), ("q2", q2)] {
        if value == 0 {
            v.push(Violation::Zero(name));
        }
    }
    if w < 2 {
        v.push(Violation::Zero("w - 1"));
    }
    if !v.is_empty() {
        return v;
    }
    if !m1.is_multiple_of(q1) {
        v.push(Violation::NotDivisible { what: "m1", value: m1, divisor: q1 });
    }
    if !m2.is_multiple_of(q2) {
        v.push(Violation::NotDivisible { what: "m2", value: m2, divisor: q2 });
    }
    if !m1.is_multiple_of(w - 1) {
        v.push(Violation::NotDivisible { what: "m1", value: m1, divisor: w - 1 });
    }
    if !m2.is_multiple_of(w - 1) {
        v.push(Violation::NotDivisible { what: "m2", value: m2, divisor: w - 1 });
    }
    if w > 2 && (m1 != m2 || q1 != q2) {
        v.push(Violation::WideCouplingAsymmetric { m1, m2, q1, q2 });
    }
    v
}

impl Geometry {
    pub fn new(m1: usize, m2: usize, q1: usize, q2: usize, w: usize) -> Result<Self> {
        let v = geometry_violations(m1, m2, q1, q2, w);
        if !v.is_empty() {
            return Err(Error::InvalidParams(v));
        }
        Ok(Self { m: [m1, m2], q: [q1, q2], w, perm: [None, None], perm_inv: [None, None] })
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn m(&self, j: usize) -> usize {
        self.m[j - 1]
    }

    pub fn q(&self, j: usize) -> usize {
        self.q[j - 1]
    }

    /// Installs column permutations of the coupled parts of `C1` and `C2`
    /// rows.
    pub fn with_coupled_permutation(mut self, perm1: Vec<usize>, perm2: Vec<usize>) -> Result<Self> {
        for (j, perm) in [(1, perm1), (2, perm2)] {
            let width = self.component_coupled_width(j);
            let mut inv = vec![usize::MAX; width];
            if perm.len() != width {
                return Err(Error::LengthMismatch { expected: width, got: perm.len() });
            }
            for (p, &src) in perm.iter().enumerate() {
                if src >= width || inv[src] != usize::MAX {
                    return Err(Error::Format(format!("coupled permutation of C{j} is not a bijection")));
                }
                inv[src] = p;
            }
            self.perm[j - 1] = Some(perm);
            self.perm_inv[j - 1] = Some(inv);
        }
        Ok(self)
    }

    fn component_coupled_width(&self, j: usize) -> usize {
        self.m(j) * self.q(3 - j) / self.q(j)
    }

    pub fn block_dims(&self, i: i64) -> (usize, usize) {
        let j = phi(i);
        let o = 3 - j;
        (self.m(o) / self.q(o), self.m(j))
    }

    pub fn block_bits(&self, i: i64) -> usize {
        let (r, c) = self.block_dims(i);
        r * c
    }

    pub fn coupled_width(&self, i: i64) -> usize {
        self.component_coupled_width(phi(i))
    }

    fn slice_width(&self, i: i64) -> usize {
        self.coupled_width(i) / (self.w - 1)
    }

    /// Source of coupled position `pos` on row `row` of block `i`'s
    /// constraint matrix.
    #[inline]
    pub fn coupled_source(&self, i: i64, row: usize, pos: usize) -> Source {
        let pos = match &self.perm[phi(i) - 1] {
            Some(p) => p[pos],
            None => pos,
        };
        let lag = pos / self.slice_width(i) + 1;
        let src = i - lag as i64;
        let (rows, cols) = self.block_dims(src);
        let q = self.q(phi(src));
        let (r, c) = rearranged_source(rows, cols, q, row, pos);
        Source { lag, row: r, col: c }
    }

    /// Constraint that re-uses cell `(row, col)` of block `j` as a coupled
    /// bit.
    #[inline]
    pub fn coupled_target(&self, j: i64, row: usize, col: usize) -> Target {
        let (rows, cols) = self.block_dims(j);
        let q = self.q(phi(j));
        let (orow, ocol) = rearranged_position(rows, cols, q, row, col);
        let lag = ocol / self.slice_width(j + 1) + 1;
        let pos = match &self.perm_inv[phi(j + lag as i64) - 1] {
            Some(inv) => inv[ocol],
            None => ocol,
        };
        Target { lag, row: orow, pos }
    }
}

/// Validated parameters together with both component codes.
#[derive(Clone, Debug)]
pub struct SrscCode {
    params: SrscParams,
    geometry: Geometry,
    c1: BchCode,
    c2: BchCode,
}

impl SrscCode {
    pub fn new(params: SrscParams) -> Result<Self> {
        params.check()?;
        let c1 = BchCode::new(params.nu1, params.t1, params.n(1))?;
        let c2 = BchCode::new(params.nu2, params.t2, params.n(2))?;
        let geometry = params.geometry()?;
        Ok(Self { params, geometry, c1, c2 })
    }

    /// Installs column permutations of the coupled parts of `C1` and `C2`
    /// rows. Encoder and decoder both honour them.
    pub fn with_coupled_permutation(mut self, perm1: Vec<usize>, perm2: Vec<usize>) -> Result<Self> {
        self.geometry = self.geometry.with_coupled_permutation(perm1, perm2)?;
        Ok(self)
    }

    pub fn params(&self) -> &SrscParams {
        &self.params
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn w(&self) -> usize {
        self.params.w
    }

    /// Component code index protecting block `i`.
    pub fn component_index(&self, i: i64) -> usize {
        phi(i)
    }

    pub fn component(&self, i: i64) -> &BchCode {
        self.code(phi(i))
    }

    pub fn code(&self, j: usize) -> &BchCode {
        if j == 1 {
            &self.c1
        } else {
            &self.c2
        }
    }

    pub fn block_dims(&self, i: i64) -> (usize, usize) {
        self.geometry.block_dims(i)
    }

    pub fn block_bits(&self, i: i64) -> usize {
        self.geometry.block_bits(i)
    }

    pub fn coupled_width(&self, i: i64) -> usize {
        self.geometry.coupled_width(i)
    }

    pub fn fresh_width(&self, i: i64) -> usize {
        self.params.fresh_width(phi(i))
    }

    #[inline]
    pub fn coupled_source(&self, i: i64, row: usize, pos: usize) -> Source {
        self.geometry.coupled_source(i, row, pos)
    }

    #[inline]
    pub fn coupled_target(&self, j: i64, row: usize, col: usize) -> Target {
        self.geometry.coupled_target(j, row, col)
    }

    /// Information bits consumed by block `i`.
    pub fn info_bits(&self, i: i64) -> usize {
        self.block_dims(i).0 * self.fresh_width(i)
    }

    /// Information bits consumed by blocks `1..=len`.
    pub fn info_bits_for_chain(&self, len: usize) -> usize {
        (1..=len as i64).map(|i| self.info_bits(i)).sum()
    }

    pub fn encoder(&self) -> Encoder<'_> {
        Encoder::new(self)
    }
}

/// Streaming encoder state: the last `w − 1` code blocks and the index of
/// the next block.
#[derive(Clone, Debug)]
pub struct Encoder<'a> {
    code: &'a SrscCode,
    /// `history[l-1]` is `B_{i-l}`.
    history: VecDeque<BitBlock>,
    next: i64,
    scratch_msg: Vec<u8>,
    scratch_word: Vec<u8>,
}

impl<'a> Encoder<'a> {
    pub fn new(code: &'a SrscCode) -> Self {
        let w = code.w() as i64;
        let history = (1..w)
            .map(|l| {
                let (r, c) = code.block_dims(1 - l);
                BitBlock::zeros(r, c)
            })
            .collect();
        Self { code, history, next: 1, scratch_msg: Vec::new(), scratch_word: Vec::new() }
    }

    /// Index of the block the next call produces.
    pub fn next_index(&self) -> i64 {
        self.next
    }

    pub fn history(&self) -> &VecDeque<BitBlock> {
        &self.history
    }

    /// Coupled part of row `row` for the next block, read from history.
    pub fn coupled_row(&self, row: usize) -> Vec<u8> {
        let i = self.next;
        (0..self.code.coupled_width(i))
            .map(|p| {
                let s = self.code.coupled_source(i, row, p);
                self.history[s.lag - 1].get(s.row, s.col)
            })
            .collect()
    }

    /// Encodes the next block from `info` (`rows × fresh_width`).
    pub fn encode_next(&mut self, info: &BitBlock) -> Result<BitBlock> {
        let i = self.next;
        let (rows, cols) = self.code.block_dims(i);
        let fresh = self.code.fresh_width(i);
        if (info.rows(), info.cols()) != (rows, fresh) {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: fresh,
                rows: info.rows(),
                cols: info.cols(),
            });
        }
        let bch = self.code.component(i);
        let coupled = self.code.coupled_width(i);
        let mut block = BitBlock::zeros(rows, cols);
        self.scratch_msg.resize(bch.k(), 0);
        self.scratch_word.resize(bch.n(), 0);
        for r in 0..rows {
            for p in 0..coupled {
                let s = self.code.coupled_source(i, r, p);
                self.scratch_msg[p] = self.history[s.lag - 1].get(s.row, s.col);
            }
            self.scratch_msg[coupled..].copy_from_slice(info.row(r));
            bch.encode_into(&self.scratch_msg, &mut self.scratch_word)?;
            block.row_mut(r).copy_from_slice(&self.scratch_word[coupled..]);
        }
        self.history.pop_back();
        self.history.push_front(block.clone());
        self.next += 1;
        Ok(block)
    }
}

/// Encodes `code.params().chain_len` blocks, consuming `info` row-major
/// block by block.
pub fn encode_chain(code: &SrscCode, info: &[u8]) -> Result<Vec<BitBlock>> {
    let mut enc = code.encoder();
    let mut offset = 0;
    let mut out = Vec::with_capacity(code.params().chain_len);
    for i in 1..=code.params().chain_len as i64 {
        let (rows, _) = code.block_dims(i);
        let need = code.info_bits(i);
        if offset + need > info.len() {
            return Err(Error::InsufficientInfo { block: i as usize });
        }
        let block = BitBlock::from_vec(rows, code.fresh_width(i), info[offset..offset + need].to_vec())?;
        offset += need;
        out.push(enc.encode_next(&block)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn phi_values() {
        assert_eq!(phi(1), 2);
        assert_eq!(phi(2), 1);
        assert_eq!(phi(100), 1);
        assert_eq!(phi(0), 1);
        assert_eq!(phi(-1), 2);
    }

    #[test]
    fn validate_table_two_row() {
        let p = SrscParams::symmetric(876, 3, 2, 11, 5, 10);
        assert_eq!(p.validate(), Ok(()));
        assert_eq!(p.n(1), 1752);
        assert_eq!(p.k(1), 1697);
    }

    #[test]
    fn validate_reports_divisibility() {
        let mut p = SrscParams::symmetric(9, 2, 2, 5, 1, 4);
        p.m2 = 4;
        let v = p.validate().unwrap_err();
        assert!(v.contains(&Violation::NotDivisible { what: "m1", value: 9, divisor: 2 }));
    }

    #[test]
    fn validate_rejects_asymmetric_wide_coupling() {
        let mut p = SrscParams::symmetric(12, 2, 3, 6, 2, 4);
        p.m2 = 14;
        let v = p.validate().unwrap_err();
        assert!(v.iter().any(|x| matches!(x, Violation::WideCouplingAsymmetric { .. })));
        assert!(v.iter().all(|x| !x.to_string().is_empty()));
    }

    #[test]
    fn validate_rejects_overlong_component() {
        let p = SrscParams::symmetric(20, 1, 2, 5, 2, 4);
        let v = p.validate().unwrap_err();
        assert!(matches!(v[0], Violation::LengthExceedsField { n: 40, max: 31, .. }));
    }

    #[test]
    fn rate_examples() {
        let p = SrscParams::symmetric(876, 3, 2, 11, 5, 1);
        assert_eq!(p.rate(), Ratio::new(821, 876));
        assert_eq!(p.rate(), p.rate_from_dimensions());
        let mut p = SrscParams::symmetric(964, 1, 2, 11, 6, 1);
        p.t2 = 5;
        assert_eq!(p.rate(), Ratio::new(1928 - 121, 1928));
        assert_eq!(rate_from_redundancy(10, 12, 10, 12), Ratio::from_integer(0));
    }

    #[test]
    fn rate_forms_agree_with_asymmetric_q() {
        let p = SrscParams { m1: 24, m2: 36, q1: 2, q2: 3, w: 2, nu1: 7, nu2: 7, t1: 2, t2: 3, chain_len: 1 };
        assert_eq!(p.validate(), Ok(()));
        assert_eq!(p.rate(), p.rate_from_dimensions());
    }

    /// Direct cell-by-cell construction: sub-block `s` holds columns
    /// `s·(c/q)..(s+1)·(c/q)`; its transpose is placed at output columns
    /// `s·r..(s+1)·r`.
    fn rearrange_oracle(x: &BitBlock, q: usize) -> BitBlock {
        let (r, c) = (x.rows(), x.cols());
        let sub = c / q;
        let mut out = BitBlock::zeros(sub, r * q);
        for s in 0..q {
            for a in 0..r {
                for b in 0..sub {
                    out.set(b, s * r + a, x.get(a, s * sub + b));
                }
            }
        }
        out
    }

    #[test]
    fn rearrange_two_by_six() {
        let mut x = BitBlock::zeros(2, 6);
        x.set(0, 3, 1);
        let y = rearrange(&x, 3).unwrap();
        assert_eq!((y.rows(), y.cols()), (2, 6));
        assert_eq!(y.support(), vec![(1, 2)]);
        for r in 0..2 {
            for c in 0..6 {
                let single = BitBlock::from_fn(2, 6, |a, b| (a, b) == (r, c));
                assert_eq!(rearrange(&single, 3).unwrap(), rearrange_oracle(&single, 3));
            }
        }
    }

    #[test]
    fn rearrange_q1_is_transpose() {
        let x = BitBlock::from_fn(3, 5, |r, c| (r + 2 * c) % 3 == 0);
        assert_eq!(rearrange(&x, 1).unwrap(), x.transpose());
        assert!(rearrange(&x, 2).is_err());
    }

    #[test]
    fn coupling_slices_examples() {
        let a = BitBlock::from_fn(2, 4, |_, _| true);
        let b = BitBlock::zeros(2, 4);
        let c = coupling_slices(&[a.clone(), b.clone()]).unwrap();
        // Columns 3..4 (1-based) come from the second (older) block.
        assert_eq!(c.support(), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(coupling_slices(std::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(coupling_slices(&[b.clone(), b.clone()]).unwrap(), b);
        assert!(coupling_slices(&[a, BitBlock::zeros(3, 4)]).is_err());
    }

    fn random_info(code: &SrscCode, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..code.info_bits_for_chain(code.params().chain_len)).map(|_| rng.random_range(0..2)).collect()
    }

    /// Builds the coupled block of `B_i` from whole blocks via `rearrange`
    /// and `coupling_slices`.
    fn coupled_block_oracle(code: &SrscCode, blocks: &[BitBlock], i: i64) -> BitBlock {
        let w = code.w() as i64;
        let get = |j: i64| -> BitBlock {
            if j >= 1 {
                blocks[(j - 1) as usize].clone()
            } else {
                let (r, c) = code.block_dims(j);
                BitBlock::zeros(r, c)
            }
        };
        let prev: Vec<BitBlock> =
            (1..w).map(|l| rearrange(&get(i - l), code.params().q(phi(i - l))).unwrap()).collect();
        if w == 2 {
            prev[0].clone()
        } else {
            coupling_slices(&prev).unwrap()
        }
    }

    fn check_chain_rows(code: &SrscCode, blocks: &[BitBlock]) {
        for (idx, b) in blocks.iter().enumerate() {
            let i = idx as i64 + 1;
            let bch = code.component(i);
            let coupled = coupled_block_oracle(code, blocks, i);
            assert_eq!(coupled.rows(), b.rows());
            assert_eq!(coupled.cols() + b.cols(), bch.n());
            for r in 0..b.rows() {
                let mut word = coupled.row(r).to_vec();
                word.extend_from_slice(b.row(r));
                assert!(bch.is_codeword(&word), "block {i} row {r}");
            }
        }
    }

    #[test]
    fn chain_rows_are_codewords_w2() {
        let code = SrscCode::new(SrscParams::symmetric(12, 2, 2, 5, 2, 4)).unwrap();
        let blocks = encode_chain(&code, &random_info(&code, 1)).unwrap();
        assert_eq!(blocks.len(), 4);
        check_chain_rows(&code, &blocks);
    }

    #[test]
    fn chain_rows_are_codewords_asymmetric() {
        let p = SrscParams { m1: 24, m2: 36, q1: 2, q2: 3, w: 2, nu1: 7, nu2: 7, t1: 2, t2: 3, chain_len: 5 };
        let code = SrscCode::new(p).unwrap();
        assert_eq!(code.block_dims(1), (12, 36));
        assert_eq!(code.block_dims(2), (12, 24));
        let blocks = encode_chain(&code, &random_info(&code, 2)).unwrap();
        check_chain_rows(&code, &blocks);
    }

    #[test]
    fn chain_rows_are_codewords_wide() {
        let code = SrscCode::new(SrscParams::symmetric(24, 2, 4, 6, 2, 6)).unwrap();
        let blocks = encode_chain(&code, &random_info(&code, 3)).unwrap();
        check_chain_rows(&code, &blocks);
    }

    #[test]
    fn zero_info_gives_zero_blocks() {
        let code = SrscCode::new(SrscParams::symmetric(12, 2, 2, 5, 2, 3)).unwrap();
        let info = vec![0; code.info_bits_for_chain(3)];
        for b in encode_chain(&code, &info).unwrap() {
            assert_eq!(b.weight(), 0);
        }
    }

    #[test]
    fn insufficient_info() {
        let code = SrscCode::new(SrscParams::symmetric(12, 2, 2, 5, 2, 3)).unwrap();
        let info = vec![0; code.info_bits_for_chain(2) + 1];
        assert!(matches!(encode_chain(&code, &info), Err(Error::InsufficientInfo { block: 3 })));
    }

    #[test]
    fn example_layout_q2_q3() {
        let p = SrscParams { m1: 12, m2: 18, q1: 2, q2: 3, w: 2, nu1: 5, nu2: 5, t1: 1, t2: 1, chain_len: 2 };
        let code = SrscCode::new(p).unwrap();
        assert_eq!(code.block_dims(1), (6, 18));
        assert_eq!(code.block_dims(2), (6, 12));
    }

    #[test]
    fn staircase_degeneration() {
        let code = SrscCode::new(SrscParams::symmetric(10, 1, 2, 5, 1, 3)).unwrap();
        let blocks = encode_chain(&code, &random_info(&code, 4)).unwrap();
        let enc = {
            let mut e = code.encoder();
            let info = random_info(&code, 4);
            let rows = code.block_dims(1).0;
            let fresh = code.fresh_width(1);
            e.encode_next(&BitBlock::from_vec(rows, fresh, info[..rows * fresh].to_vec()).unwrap()).unwrap();
            e
        };
        let coupled: Vec<Vec<u8>> = (0..10).map(|r| enc.coupled_row(r)).collect();
        let t = blocks[0].transpose();
        for (r, row) in coupled.iter().enumerate() {
            assert_eq!(row, t.row(r));
        }
    }

    #[test]
    fn source_and_target_are_inverse() {
        for p in [
            SrscParams::symmetric(24, 2, 4, 6, 2, 6),
            SrscParams { m1: 24, m2: 36, q1: 2, q2: 3, w: 2, nu1: 7, nu2: 7, t1: 2, t2: 3, chain_len: 5 },
        ] {
            let code = SrscCode::new(p).unwrap();
            for j in 1..=4i64 {
                let (rows, cols) = code.block_dims(j);
                for r in 0..rows {
                    for c in 0..cols {
                        let t = code.coupled_target(j, r, c);
                        let s = code.coupled_source(j + t.lag as i64, t.row, t.pos);
                        assert_eq!((s.lag, s.row, s.col), (t.lag, r, c));
                    }
                }
            }
        }
    }

    #[test]
    fn wide_coupling_uses_distinct_blocks() {
        // w ≥ q + 1: the w − 1 slices of a row come from w − 1 distinct blocks.
        let code = SrscCode::new(SrscParams::symmetric(24, 2, 4, 6, 2, 6)).unwrap();
        let lags: std::collections::BTreeSet<usize> =
            (0..code.coupled_width(5)).map(|p| code.coupled_source(5, 0, p).lag).collect();
        assert_eq!(lags.into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn permutation_hook_keeps_codeword_property() {
        let code = SrscCode::new(SrscParams::symmetric(12, 2, 2, 5, 2, 4)).unwrap();
        let width = code.params().coupled_width(1);
        let perm: Vec<usize> = (0..width).rev().collect();
        let code = code.with_coupled_permutation(perm.clone(), perm).unwrap();
        let blocks = encode_chain(&code, &random_info(&code, 9)).unwrap();
        let mut enc = code.encoder();
        for (idx, b) in blocks.iter().enumerate() {
            let i = idx as i64 + 1;
            for r in 0..b.rows() {
                let mut word = enc.coupled_row(r);
                word.extend_from_slice(b.row(r));
                assert!(code.component(i).is_codeword(&word));
            }
            let fresh = code.fresh_width(i);
            let info = BitBlock::from_fn(b.rows(), fresh, |r, c| b.get(r, c) == 1);
            assert_eq!(&enc.encode_next(&info).unwrap(), b);
        }
        assert!(SrscCode::new(SrscParams::symmetric(12, 2, 2, 5, 2, 4))
            .unwrap()
            .with_coupled_permutation(vec![0; width], (0..width).collect())
            .is_err());
    }
}
