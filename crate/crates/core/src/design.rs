//! Block-size design search: given a staircase benchmark, find SR-staircase
//! block widths `m` that match its rate, beat its BSC threshold and do not
//! exceed its block size.

use num_integer::Integer;
use num_rational::Ratio;

use crate::de::{threshold_m, DeConfig};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Benchmark {
    pub m: usize,
    pub nu: u32,
    pub t: u32,
    /// Target rate `R′`; defaults to the staircase rate `1 − ν′t′/m′`.
    pub rate: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub nu: u32,
    pub t: u32,
    pub q: usize,
    pub w: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignQuery {
    pub benchmark: Benchmark,
    pub candidate: Candidate,
    /// Allowed rate loss `δ ≥ 0`: the design only needs `R ≥ R′ − δ`.
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignResult {
    pub beta: usize,
    pub a: usize,
    pub b: f64,
    /// Lower end `βa` of the feasible range.
    pub m_low: usize,
    /// `βa < b`: some multiple of `β` lies in `[βa, b)`.
    pub feasible: bool,
    /// The literal comparison `a < b`.
    pub a_below_b: bool,
    /// Smallest feasible width `βa`, if any.
    pub recommended_m: Option<usize>,
    /// Number of multiples of `β` in `[βa, b)`.
    pub count: usize,
    pub m_bar: f64,
    pub m_bar_ref: f64,
}

impl DesignQuery {
    pub fn validate(&self) -> Result<()> {
        let (b, c) = (&self.benchmark, &self.candidate);
        if c.t <= b.t {
            return Err(Error::Design(format!("candidate t = {} must exceed benchmark t' = {}", c.t, b.t)));
        }
        if c.nu < b.nu {
            return Err(Error::Design(format!("candidate nu = {} must be at least benchmark nu' = {}", c.nu, b.nu)));
        }
        if c.q == 0 || c.w < 2 || b.m == 0 || b.t == 0 || b.nu == 0 {
            return Err(Error::Design("q, m', t', nu' must be positive and w >= 2".into()));
        }
        if self.delta.is_nan() || self.delta < 0.0 {
            return Err(Error::Design(format!("rate slack {} must be nonnegative", self.delta)));
        }
        if c.nu > 30 {
            return Err(Error::Design(format!("nu = {} too large", c.nu)));
        }
        Ok(())
    }

    pub fn beta(&self) -> usize {
        (self.candidate.w - 1).lcm(&self.candidate.q)
    }

    /// `a = ⌈tν / ((1 − R′ + δ)·β)⌉`, with `1 − R′ = ν′t′/m′` by default.
    pub fn a(&self) -> Result<usize> {
        let (b, c) = (&self.benchmark, &self.candidate);
        let beta = self.beta() as i128;
        let tnu = (c.t as i128) * (c.nu as i128);
        let exact_default = b.rate.is_none() && self.delta == 0.0;
        if exact_default {
            let r = Ratio::new(tnu * b.m as i128, (b.t as i128) * (b.nu as i128) * beta);
            return Ok(r.ceil().to_integer() as usize);
        }
        let redundancy = match b.rate {
            Some(r) => 1.0 - r,
            None => (b.t as f64 * b.nu as f64) / b.m as f64,
        } + self.delta;
        if redundancy.is_nan() || redundancy <= 0.0 {
            return Err(Error::Design("benchmark redundancy plus slack must be positive".into()));
        }
        Ok((tnu as f64 / (redundancy * beta as f64)).ceil() as usize)
    }

    /// `b = min{√q·m′, (M̄/M̄′)·m′, (2^ν − 1)/2}`.
    pub fn b(&self, m_bar: f64, m_bar_ref: f64) -> f64 {
        let (bm, c) = (&self.benchmark, &self.candidate);
        let m_ref = bm.m as f64;
        let field = ((1u64 << c.nu) - 1) as f64 / 2.0;
        ((c.q as f64).sqrt() * m_ref).min(m_bar / m_bar_ref * m_ref).min(field)
    }
}

/// Evaluates the search for known thresholds `M̄` (candidate, with
/// `t1 = t2 = t`) and `M̄′` (benchmark staircase).
pub fn block_size_search(query: &DesignQuery, m_bar: f64, m_bar_ref: f64) -> Result<DesignResult> {
    query.validate()?;
    if !(m_bar > 0.0 && m_bar_ref > 0.0) {
        return Err(Error::Design("thresholds must be positive".into()));
    }
    let beta = query.beta();
    let a = query.a()?;
    let b = query.b(m_bar, m_bar_ref);
    let m_low = beta * a;
    let feasible = (m_low as f64) < b;
    let count = if feasible { ((b - m_low as f64) / beta as f64).ceil() as usize } else { 0 };
    Ok(DesignResult {
        beta,
        a,
        b,
        m_low,
        feasible,
        a_below_b: (a as f64) < b,
        recommended_m: feasible.then_some(m_low),
        count,
        m_bar,
        m_bar_ref,
    })
}

/// Runs the search with both thresholds computed by density evolution.
pub fn design_search(query: &DesignQuery, config: &DeConfig, tol: f64) -> Result<DesignResult> {
    query.validate()?;
    let c = &query.candidate;
    let t_ref = query.benchmark.t;
    let m_bar = threshold_m(c.t, c.t, c.w, config, tol)?;
    let m_bar_ref = threshold_m(t_ref, t_ref, 2, config, tol)?;
    block_size_search(query, m_bar, m_bar_ref)
}
