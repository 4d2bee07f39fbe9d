//! Density evolution for miscorrection-free iterative BDD over the BSC, and
//! the resulting decoding thresholds.

use crate::channel::ebn0_db_for_p;
use crate::code::{phi, ratio_to_f64, SrscParams};
use crate::error::{Error, Result};

/// First index of the subtracted Poisson sum in `f(λ, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoissonStart {
    /// `f(λ,t) = 1 − Σ_{i=0}^{t−1} λ^i e^{−λ}/i!`, the usual upper tail.
    Zero,
    /// `f(λ,t) = 1 − Σ_{i=1}^{t−1} λ^i e^{−λ}/i!`, which keeps `f(0,t) = 1`.
    One,
}

/// `P[Poisson(λ) ≥ t]`.
pub fn poisson_tail(lambda: f64, t: u32) -> f64 {
    debug_assert!(lambda >= 0.0);
    if lambda == 0.0 {
        return if t == 0 { 1.0 } else { 0.0 };
    }
    let t = t as usize;
    // term = e^{−λ} λ^i / i!
    let mut term = (-lambda).exp();
    if lambda < t as f64 {
        for i in 1..=t {
            term *= lambda / i as f64;
        }
        let mut sum = 0.0;
        let mut i = t;
        while term > sum * 1e-17 {
            sum += term;
            i += 1;
            term *= lambda / i as f64;
        }
        sum.min(1.0)
    } else {
        let mut lower = 0.0;
        for i in 0..t {
            lower += term;
            term *= lambda / (i + 1) as f64;
        }
        (1.0 - lower).max(0.0)
    }
}

pub fn poisson_tail_from(lambda: f64, t: u32, start: PoissonStart) -> f64 {
    match start {
        PoissonStart::Zero => poisson_tail(lambda, t),
        PoissonStart::One => poisson_tail(lambda, t) + (-lambda).exp(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeConfig {
    /// Chain length `L`.
    pub chain_len: usize,
    /// Iteration cap `ℓ_max` (per window position in windowed mode).
    pub max_iters: usize,
    /// Success when every `x_i ≤ eps_num`.
    pub eps_num: f64,
    /// Declared stuck when no `x_i` decreases by more than this in a sweep.
    pub stall_tol: f64,
    pub poisson_start: PoissonStart,
    /// Windowed-mode target `ε` on the final `x_i`.
    pub window_target: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            chain_len: 100,
            max_iters: 1_000_000,
            eps_num: 1e-10,
            stall_tol: 1e-15,
            poisson_start: PoissonStart::Zero,
            window_target: 1e-6,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.chain_len == 0 || self.max_iters == 0 {
            return Err(Error::DensityEvolution("chain length and iteration cap must be positive".into()));
        }
        if !(self.eps_num > 0.0 && self.eps_num < 1e-3) {
            return Err(Error::DensityEvolution(format!("eps_num {} must be in (0, 1e-3)", self.eps_num)));
        }
        if self.stall_tol.is_nan() || self.stall_tol < 0.0 || !(self.window_target > 0.0 && self.window_target < 1.0) {
            return Err(Error::DensityEvolution("invalid stall tolerance or window target".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeOutcome {
    pub converged: bool,
    /// `x_1..x_L`.
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// Shared update state: `x` padded with `w − 1` zeros on each side.
struct Chain {
    x: Vec<f64>,
    pad: usize,
    m: [f64; 2],
    t: [u32; 2],
    w: usize,
    start: PoissonStart,
}

impl Chain {
    fn new(m1: f64, m2: f64, t1: u32, t2: u32, w: usize, len: usize, start: PoissonStart) -> Self {
        let pad = w - 1;
        let mut x = vec![0.0; len + 2 * pad];
        x[pad..pad + len].fill(1.0);
        Self { x, pad, m: [m1, m2], t: [t1, t2], w, start }
    }

    /// One Gauss–Seidel sweep over positions `lo..=hi` (1-based); returns
    /// `(max x, max decrease)` over the swept positions.
    fn sweep(&mut self, lo: usize, hi: usize) -> (f64, f64) {
        let wm1 = self.w - 1;
        let mut max_x: f64 = 0.0;
        let mut max_drop: f64 = 0.0;
        for i in lo..=hi {
            let j = phi(i as i64) - 1;
            let k = self.pad + i - 1;
            let mut s = 0.0;
            for d in 1..=wm1 {
                s += self.x[k - d] + self.x[k + d];
            }
            let v = poisson_tail_from(self.m[j] / (2.0 * wm1 as f64) * s, self.t[j], self.start);
            max_drop = max_drop.max(self.x[k] - v);
            self.x[k] = v;
            max_x = max_x.max(v);
        }
        (max_x, max_drop)
    }

    fn values(&self, len: usize) -> Vec<f64> {
        self.x[self.pad..self.pad + len].to_vec()
    }
}

fn check_de_args(m1: f64, m2: f64, t1: u32, t2: u32, w: usize, config: &DeConfig) -> Result<()> {
    config.validate()?;
    if w < 2 {
        return Err(Error::DensityEvolution(format!("coupling width {w} < 2")));
    }
    if t1 == 0 || t2 == 0 {
        return Err(Error::DensityEvolution("t1 and t2 must be positive".into()));
    }
    if !(m1 >= 0.0 && m2 >= 0.0 && m1.is_finite() && m2.is_finite()) {
        return Err(Error::DensityEvolution("effective channel qualities must be finite and nonnegative".into()));
    }
    if w > 2 && m1 != m2 {
        return Err(Error::DensityEvolution("w > 2 requires M1 = M2".into()));
    }
    Ok(())
}

/// Full-chain DE from `x^(0) = 1`.
pub fn de_run(m1: f64, m2: f64, t1: u32, t2: u32, w: usize, config: &DeConfig) -> Result<DeOutcome> {
    check_de_args(m1, m2, t1, t2, w, config)?;
    let len = config.chain_len;
    let mut chain = Chain::new(m1, m2, t1, t2, w, len, config.poisson_start);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        let (max_x, max_drop) = chain.sweep(1, len);
        if max_x <= config.eps_num {
            converged = true;
            break;
        }
        if max_drop <= config.stall_tol {
            break;
        }
    }
    Ok(DeOutcome { converged, x: chain.values(len), iterations })
}

/// Sliding-window DE: for each window position only the `window` positions
/// inside it are updated, everything else keeps its last value. Success
/// means every final `x_i ≤ config.window_target`.
pub fn de_run_windowed(
    m1: f64,
    m2: f64,
    t1: u32,
    t2: u32,
    w: usize,
    window: usize,
    config: &DeConfig,
) -> Result<DeOutcome> {
    check_de_args(m1, m2, t1, t2, w, config)?;
    let len = config.chain_len;
    if window <= w || window > len {
        return Err(Error::DensityEvolution(format!("window {window} outside ({w}, {len}]")));
    }
    let mut chain = Chain::new(m1, m2, t1, t2, w, len, config.poisson_start);
    let mut iterations = 0;
    for start in 1..=len - window + 1 {
        let end = start + window - 1;
        for _ in 0..config.max_iters {
            iterations += 1;
            let (max_x, max_drop) = chain.sweep(start, end);
            if max_x <= config.eps_num || max_drop <= config.stall_tol {
                break;
            }
        }
    }
    let x = chain.values(len);
    let converged = x.iter().all(|&v| v <= config.window_target);
    Ok(DeOutcome { converged, x, iterations })
}

fn bisect(mut lo: f64, mut hi: f64, tol: f64, mut ok: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::DensityEvolution(format!("bisection tolerance {tol} must be positive")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Default bisection tolerance on `M̄`.
pub const DEFAULT_TOL: f64 = 5e-5;

/// `M̄` for `M1 = M2 = M`: bisection on `[0, t1 + t2]`.
pub fn threshold_m(t1: u32, t2: u32, w: usize, config: &DeConfig, tol: f64) -> Result<f64> {
    check_de_args(0.0, 0.0, t1, t2, w, config)?;
    bisect(0.0, (t1 + t2) as f64, tol, |m| Ok(de_run(m, m, t1, t2, w, config)?.converged))
}

/// `M̄` under sliding-window DE with the configured target `ε`.
pub fn threshold_m_windowed(t1: u32, t2: u32, w: usize, window: usize, config: &DeConfig, tol: f64) -> Result<f64> {
    check_de_args(0.0, 0.0, t1, t2, w, config)?;
    bisect(0.0, (t1 + t2) as f64, tol, |m| Ok(de_run_windowed(m, m, t1, t2, w, window, config)?.converged))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdResult {
    /// Effective channel quality threshold; for asymmetric codes the mean
    /// `p̄·(n1 + n2)/2`.
    pub m_bar: f64,
    pub p_bar: f64,
    pub ebn0_db: f64,
    pub tol: f64,
}

/// BSC threshold of a code. Symmetric codes use `p̄ = M̄/(2m)`; otherwise
/// DE is bisected directly on `p` with `M_j = p·n_j`.
pub fn threshold_p(params: &SrscParams, config: &DeConfig, tol: f64) -> Result<ThresholdResult> {
    params.check()?;
    let rate = ratio_to_f64(params.rate());
    let (t1, t2, w) = (params.t1, params.t2, params.w);
    if params.m1 == params.m2 && params.q1 == params.q2 {
        let m_bar = threshold_m(t1, t2, w, config, tol)?;
        let p_bar = m_bar / (2 * params.m1) as f64;
        return Ok(ThresholdResult { m_bar, p_bar, ebn0_db: ebn0_db_for_p(p_bar, rate), tol });
    }
    let (n1, n2) = (params.n(1) as f64, params.n(2) as f64);
    let p_tol = tol / n1.max(n2);
    let hi = ((t1 + t2) as f64 / n1.min(n2)).min(0.5);
    let p_bar = bisect(0.0, hi, p_tol, |p| Ok(de_run(p * n1, p * n2, t1, t2, w, config)?.converged))?;
    Ok(ThresholdResult { m_bar: p_bar * (n1 + n2) / 2.0, p_bar, ebn0_db: ebn0_db_for_p(p_bar, rate), tol })
}
