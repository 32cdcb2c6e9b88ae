use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::summary::quantile_sorted;
use crate::error::{Error, Result};

/// 1-based ranks with ties given their average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j share the average of ranks i+1..=j+1
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of mid-ranks.
/// `Ok(None)` when either input is constant.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "spearman inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "spearman needs at least 3 pairs, got {}",
            x.len()
        )));
    }
    Ok(pearson(&midranks(x), &midranks(y)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapInterval {
    pub low: f64,
    pub high: f64,
    pub level: f64,
    pub replicates: usize,
    /// Replicates whose statistic was undefined.
    pub skipped: usize,
    pub seed: u64,
}

/// Percentile bootstrap over paired resamples.
///
/// Replicate `r` draws from its own ChaCha stream `r` under `seed`, so the
/// interval does not depend on how replicates are scheduled across threads.
pub fn bootstrap_ci<F>(x: &[f64], y: &[f64], statistic: F, level: f64, b: usize, seed: u64) -> Result<BootstrapInterval>
where
    F: Fn(&[f64], &[f64]) -> Option<f64> + Sync,
{
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("bootstrap inputs differ in length".into()));
    }
    if x.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "bootstrap needs at least 10 pairs, got {}",
            x.len()
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside (0, 1)")));
    }
    if b == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one replicate".into()));
    }
    let n = x.len();
    let stats: Vec<Option<f64>> = (0..b)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut xs = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                let i = rng.random_range(0..n);
                xs.push(x[i]);
                ys.push(y[i]);
            }
            statistic(&xs, &ys)
        })
        .collect();
    let mut valid: Vec<f64> = stats.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    let skipped = b - valid.len();
    if valid.is_empty() {
        return Err(Error::InsufficientData("every bootstrap replicate was degenerate".into()));
    }
    valid.sort_by(f64::total_cmp);
    let alpha = 1.0 - level;
    Ok(BootstrapInterval {
        low: quantile_sorted(&valid, alpha / 2.0),
        high: quantile_sorted(&valid, 1.0 - alpha / 2.0),
        level,
        replicates: b,
        skipped,
        seed,
    })
}
