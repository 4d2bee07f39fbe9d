//! `key = value` design spec files.
//!
//! ```text
//! # benchmark staircase code
//! m_ref = 748
//! nu_ref = 11
//! t_ref = 4
//! rate_ref = 0.94118     # optional
//! delta = 0              # optional
//! candidate = 11,5,2,2   # nu,t,q,w; repeatable
//! ```

use srsc::design::{Benchmark, Candidate, DesignQuery};
use srsc::{Error, Result};

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Design(format!("spec line {line}: {msg}"))
}

fn num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(line, format!("invalid value {value:?} for {key}")))
}

pub fn parse(text: &str) -> Result<Vec<DesignQuery>> {
    let (mut m, mut nu, mut t, mut rate, mut delta) = (None, None, None, None, 0.0);
    let mut candidates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| bad(line, "expected key = value"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "m_ref" => m = Some(num(line, key, value)?),
            "nu_ref" => nu = Some(num(line, key, value)?),
            "t_ref" => t = Some(num(line, key, value)?),
            "rate_ref" => rate = Some(num(line, key, value)?),
            "delta" => delta = num(line, key, value)?,
            "candidate" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 4 {
                    return Err(bad(line, "candidate needs nu,t,q,w"));
                }
                candidates.push(Candidate {
                    nu: num(line, "nu", parts[0])?,
                    t: num(line, "t", parts[1])?,
                    q: num(line, "q", parts[2])?,
                    w: num(line, "w", parts[3])?,
                });
            }
            other => return Err(bad(line, format!("unknown key {other:?}"))),
        }
    }
    let missing = |k: &str| Error::Design(format!("spec is missing {k}"));
    let benchmark = Benchmark {
        m: m.ok_or_else(|| missing("m_ref"))?,
        nu: nu.ok_or_else(|| missing("nu_ref"))?,
        t: t.ok_or_else(|| missing("t_ref"))?,
        rate,
    };
    if candidates.is_empty() {
        return Err(missing("candidate"));
    }
    Ok(candidates.into_iter().map(|candidate| DesignQuery { benchmark, candidate, delta }).collect())
}
