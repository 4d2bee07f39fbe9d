//! Shortened binary primitive BCH codes: systematic encoding and bounded
//! distance decoding (syndromes, Berlekamp–Massey, Chien search).
//!
//! Words are slices of bits stored one per byte (`0` or `1`). Position `j`
//! of a length-`n` shortened word carries the coefficient of `x^(n-1-j)`,
//! so the `e` shortened positions are the implicit zero coefficients of
//! degrees `n..2^ν-1`. Messages occupy the first `k` positions and parity
//! the last `n - k`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{cyclotomic_coset, FieldTables};

/// Redundancy `deg g(x)` of the narrow-sense primitive BCH code with design
/// distance `2t + 1` over GF(2^ν), without building the generator.
pub fn generator_degree(nu: u32, t: u32) -> usize {
    let order = (1usize << nu) - 1;
    let mut seen = vec![false; order];
    let mut degree = 0;
    for i in (1..2 * t as usize).step_by(2) {
        if seen[i % order] {
            continue;
        }
        for r in cyclotomic_coset(i, order) {
            if !seen[r] {
                seen[r] = true;
                degree += 1;
            }
        }
    }
    degree
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeKind {
    Corrected,
    Failure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub kind: DecodeKind,
    pub word: Vec<u8>,
    /// Number of flipped positions; zero on failure.
    pub errors_corrected: usize,
}

impl DecodeOutcome {
    pub fn is_corrected(&self) -> bool {
        self.kind == DecodeKind::Corrected
    }
}

/// One shortened BCH component code. Cheap to clone: the field tables are
/// shared.
#[derive(Clone, Debug)]
pub struct BchCode {
    nu: u32,
    t: u32,
    n: usize,
    k: usize,
    /// Generator coefficients, lowest degree first; `generator[deg] == 1`.
    generator: Vec<u8>,
    field: Arc<FieldTables>,
}

impl BchCode {
    /// Builds the code of length `n` (shortened by `2^ν − 1 − n`) correcting
    /// `t` errors.
    pub fn new(nu: u32, t: u32, n: usize) -> Result<Self> {
        let field = Arc::new(FieldTables::new(nu)?);
        Self::with_field(field, t, n)
    }

    pub fn with_field(field: Arc<FieldTables>, t: u32, n: usize) -> Result<Self> {
        let nu = field.nu();
        let order = field.order();
        let invalid = |reason: String| Error::InvalidBch { nu, t, n, reason };
        if t == 0 {
            return Err(invalid("t must be at least 1".into()));
        }
        if n > order {
            return Err(invalid(format!("length exceeds 2^nu - 1 = {order}")));
        }
        let expected = nu as usize * t as usize;
        if expected >= n {
            return Err(invalid(format!("message length n - nu*t = {} is not positive", n as i64 - expected as i64)));
        }
        if 2 * t as usize >= order {
            return Err(invalid("design distance exceeds the code length".into()));
        }
        let generator = build_generator(&field, t);
        let degree = generator.len() - 1;
        if degree != expected {
            return Err(Error::GeneratorDegree { nu, t, degree, expected });
        }
        Ok(Self { nu, t, n, k: n - degree, generator, field })
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of shortened (known-zero) leading positions.
    pub fn shortening(&self) -> usize {
        self.field.order() - self.n
    }

    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    pub fn field(&self) -> &FieldTables {
        &self.field
    }

    /// Systematic encoding: returns `[msg, parity]` where the parity is the
    /// remainder of `x^(n-k)·m(x)` modulo `g(x)`.
    pub fn encode(&self, msg: &[u8]) -> Result<Vec<u8>> {
        let mut word = vec![0u8; self.n];
        self.encode_into(msg, &mut word)?;
        Ok(word)
    }

    pub fn encode_into(&self, msg: &[u8], out: &mut [u8]) -> Result<()> {
        if msg.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: msg.len() });
        }
        if out.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: out.len() });
        }
        let r = self.redundancy();
        // reg[d] is the coefficient of x^d of the running remainder.
        let mut reg = vec![0u8; r];
        for &bit in msg {
            let feedback = (bit & 1) ^ reg[r - 1];
            for d in (1..r).rev() {
                reg[d] = reg[d - 1] ^ (feedback & self.generator[d]);
            }
            reg[0] = feedback & self.generator[0];
        }
        out[..self.k].copy_from_slice(msg);
        for (j, slot) in out[self.k..].iter_mut().enumerate() {
            *slot = reg[r - 1 - j];
        }
        Ok(())
    }

    /// Syndromes `S_1..S_2t` of a length-`n` word.
    pub fn syndromes(&self, word: &[u8]) -> Vec<u16> {
        let two_t = 2 * self.t as usize;
        let mut s = vec![0u16; two_t + 1];
        let order = self.field.order();
        for (pos, _) in word.iter().enumerate().filter(|(_, &b)| b != 0) {
            let degree = self.n - 1 - pos;
            for j in (1..=two_t).step_by(2) {
                s[j] ^= self.field.alpha_pow((j * degree) % order);
            }
        }
        for j in (2..=two_t).step_by(2) {
            s[j] = self.field.mul(s[j / 2], s[j / 2]);
        }
        s.remove(0);
        s
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n && self.syndromes(word).iter().all(|&s| s == 0)
    }

    /// Positions (word indices) of the error pattern found by BDD, or `None`
    /// if decoding fails. A zero-syndrome word yields an empty list.
    pub fn locate_errors(&self, word: &[u8]) -> Option<Vec<usize>> {
        debug_assert_eq!(word.len(), self.n);
        let syn = self.syndromes(word);
        if syn.iter().all(|&s| s == 0) {
            return Some(Vec::new());
        }
        let (lambda, degree) = self.berlekamp_massey(&syn);
        if degree > self.t as usize || lambda.iter().rposition(|&c| c != 0) != Some(degree) {
            return None;
        }
        self.chien_search(&lambda, degree)
    }

    fn berlekamp_massey(&self, syn: &[u16]) -> (Vec<u16>, usize) {
        let f = &self.field;
        let n = syn.len();
        let mut lambda = vec![0u16; n + 1];
        let mut prev = vec![0u16; n + 1];
        lambda[0] = 1;
        prev[0] = 1;
        let mut degree = 0usize;
        let mut shift = 1usize;
        let mut prev_disc = 1u16;
        for step in 0..n {
            let mut disc = syn[step];
            for i in 1..=degree {
                disc ^= f.mul(lambda[i], syn[step - i]);
            }
            if disc == 0 {
                shift += 1;
                continue;
            }
            let scale = f.div(disc, prev_disc);
            if 2 * degree <= step {
                let saved = lambda.clone();
                for i in 0..=n - shift {
                    lambda[i + shift] ^= f.mul(scale, prev[i]);
                }
                degree = step + 1 - degree;
                prev = saved;
                prev_disc = disc;
                shift = 1;
            } else {
                for i in 0..=n - shift {
                    lambda[i + shift] ^= f.mul(scale, prev[i]);
                }
                shift += 1;
            }
        }
        (lambda, degree)
    }

    /// Finds the roots of the locator among the transmitted positions. A
    /// locator whose roots are not all found there either has a root in a
    /// shortened position or does not split over the field; both are
    /// decoding failures.
    fn chien_search(&self, lambda: &[u16], degree: usize) -> Option<Vec<usize>> {
        let f = &self.field;
        let order = f.order();
        let mut positions = Vec::with_capacity(degree);
        // terms[k] = Λ_k · α^(-k·d), stepped as d increases.
        let mut terms: Vec<u16> = lambda[..=degree].to_vec();
        for d in 0..self.n {
            let mut sum = 0u16;
            for &term in &terms {
                sum ^= term;
            }
            if sum == 0 {
                positions.push(self.n - 1 - d);
                if positions.len() == degree {
                    return Some(positions);
                }
            }
            for (k, term) in terms.iter_mut().enumerate().skip(1) {
                *term = f.mul_alpha_pow(*term, order - k % order);
            }
        }
        None
    }

    /// Bounded distance decoding.
    pub fn decode(&self, word: &[u8]) -> DecodeOutcome {
        match self.locate_errors(word) {
            Some(positions) => {
                let mut out = word.to_vec();
                for &p in &positions {
                    out[p] ^= 1;
                }
                DecodeOutcome { kind: DecodeKind::Corrected, word: out, errors_corrected: positions.len() }
            }
            None => DecodeOutcome { kind: DecodeKind::Failure, word: word.to_vec(), errors_corrected: 0 },
        }
    }

    /// Miscorrection-free decoding: plain BDD whose result is kept only if it
    /// equals `truth`.
    pub fn decode_genie(&self, word: &[u8], truth: &[u8]) -> DecodeOutcome {
        let out = self.decode(word);
        if out.is_corrected() && out.word == truth {
            out
        } else {
            DecodeOutcome { kind: DecodeKind::Failure, word: word.to_vec(), errors_corrected: 0 }
        }
    }

    /// Outcome of [`decode_genie`](Self::decode_genie) computed from the
    /// distance alone: BDD returns `truth` exactly when `truth` lies within
    /// distance `t`, and never otherwise.
    pub fn genie_corrects(&self, distance_to_truth: usize) -> bool {
        distance_to_truth <= self.t as usize
    }
}

/// `g(x) = lcm` of the minimal polynomials of `α, α^3, …, α^(2t-1)`, built
/// as the product of `(x − α^r)` over the union of their cyclotomic cosets.
fn build_generator(field: &FieldTables, t: u32) -> Vec<u8> {
    let order = field.order();
    let mut roots = vec![false; order];
    for i in (1..2 * t as usize).step_by(2) {
        for r in cyclotomic_coset(i, order) {
            roots[r] = true;
        }
    }
    let mut g: Vec<u16> = vec![1];
    for (r, _) in roots.iter().enumerate().filter(|(_, &b)| b) {
        let root = field.alpha_pow(r);
        let mut next = vec![0u16; g.len() + 1];
        for (i, &c) in g.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= field.mul(c, root);
        }
        g = next;
    }
    g.iter()
        .map(|&c| {
            debug_assert!(c <= 1, "generator coefficient outside GF(2)");
            c as u8
        })
        .collect()
}
