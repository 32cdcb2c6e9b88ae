use serde::Serialize;

use crate::error::{Error, Result};

/// German-tank estimate of a population size from the largest observed
/// serial number `m` among `k` observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TankEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub m: u64,
    pub k: u64,
    pub level: f64,
}

fn check(m: u64, k: u64) -> Result<()> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidArgument("German tank needs m >= 1 and k >= 1".into()));
    }
    if k > m {
        return Err(Error::InvalidArgument(format!(
            "sample size {k} exceeds the maximum serial {m}"
        )));
    }
    Ok(())
}

/// Minimum-variance unbiased estimate `m (1 + 1/k) - 1`.
pub fn german_tank_point(m: u64, k: u64) -> Result<f64> {
    check(m, k)?;
    Ok((m - 1) as f64 + m as f64 / k as f64)
}

/// Interval `[m (1 - a/2)^(-1/k), m (a/2)^(-1/k)]` with `a = 1 - level`,
/// from inverting `P(max <= m | N) ≈ (m / N)^k`.
pub fn german_tank_ci(m: u64, k: u64, level: f64) -> Result<(f64, f64)> {
    check(m, k)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside (0, 1)")));
    }
    let half = (1.0 - level) / 2.0;
    let m = m as f64;
    let k = k as f64;
    // m * x^(-1/k) = m + m * expm1(-ln(x) / k), exact for x near 1
    let bound = |x: f64| m + m * (-x.ln() / k).exp_m1();
    Ok((bound(1.0 - half), bound(half)))
}

pub fn german_tank(m: u64, k: u64, level: f64) -> Result<TankEstimate> {
    let point = german_tank_point(m, k)?;
    let (ci_low, ci_high) = german_tank_ci(m, k, level)?;
    Ok(TankEstimate {
        point,
        ci_low,
        ci_high,
        m,
        k,
        level,
    })
}
