//! Finite-data check of a close almost bijection between two spectra.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};
use crate::spectrum::SpectrumSeq;

#[derive(Clone, Debug, PartialEq)]
pub struct MatchSchedule {
    /// number of equal-count windows over the matched pairs
    pub windows: usize,
    /// deviation the last window must reach, and the slack allowed between windows
    pub tol: f64,
    /// largest head discarded on either side
    pub max_head: usize,
}

impl Default for MatchSchedule {
    fn default() -> Self {
        MatchSchedule { windows: 8, tol: 1e-6, max_head: 50 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchVerdict {
    Consistent,
    Mismatch,
    StructuralMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowDeviation {
    /// smallest matched value in the window
    pub from: f64,
    pub to: f64,
    pub sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    /// entries discarded at the bottom of X and of Y
    pub heads: (usize, usize),
    /// (rank in X, rank in Y), 0-based, after truncation at the common top
    pub pairs: Vec<(usize, usize)>,
    pub windows: Vec<WindowDeviation>,
    /// eigenvalue count per unit length over the upper half of each side
    pub weyl_slopes: (f64, f64),
    pub verdict: MatchVerdict,
}

impl MatchReport {
    pub fn to_json(&self) -> Value {
        json!({
            "heads": [self.heads.0, self.heads.1],
            "matched": self.pairs.len(),
            "windows": self.windows,
            "weyl_slopes": [self.weyl_slopes.0, self.weyl_slopes.1],
            "verdict": self.verdict,
        })
    }

    pub fn swapped(&self) -> MatchReport {
        MatchReport {
            heads: (self.heads.1, self.heads.0),
            pairs: self.pairs.iter().map(|(a, b)| (*b, *a)).collect(),
            windows: self.windows.clone(),
            weyl_slopes: (self.weyl_slopes.1, self.weyl_slopes.0),
            verdict: self.verdict,
        }
    }
}

/// least-squares slope of rank against value over the upper half; endpoint counts would carry
/// an O(1/N) bias from uneven gaps within a period
fn weyl_slope(v: &[f64]) -> f64 {
    let h = &v[v.len() / 2..];
    let n = h.len() as f64;
    let (mv, mi) = (h.iter().sum::<f64>() / n, (n - 1.0) / 2.0);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, x) in h.iter().enumerate() {
        sxy += (x - mv) * (i as f64 - mi);
        sxx += (x - mv) * (x - mv);
    }
    if sxx > 0.0 {
        sxy / sxx
    } else {
        f64::INFINITY
    }
}

/// windowed sup |x − y| over the pairing X[hx + i] ↔ Y[hy + i]
fn profile(x: &[f64], y: &[f64], hx: usize, hy: usize, windows: usize) -> Vec<WindowDeviation> {
    let n = (x.len() - hx).min(y.len() - hy);
    let mut out = Vec::new();
    for w in 0..windows {
        let (a, b) = (w * n / windows, (w + 1) * n / windows);
        if a == b {
            continue;
        }
        let sup = (a..b).map(|i| (x[hx + i] - y[hy + i]).abs()).fold(0.0, f64::max);
        out.push(WindowDeviation { from: x[hx + a].min(y[hy + a]), to: x[hx + b - 1].max(y[hy + b - 1]), sup });
    }
    out
}

/// Monotone matching after discarding the heads that minimise the tail deviation; the verdict
/// is symmetric in X and Y.
pub fn match_close<T: Real>(x: &SpectrumSeq<T>, y: &SpectrumSeq<T>, schedule: &MatchSchedule) -> Result<MatchReport> {
    if schedule.windows == 0 {
        return Err(Error::InvalidInput("at least one window is needed".into()));
    }
    let xs: Vec<f64> = x.values().into_iter().map(to_f64).collect();
    let ys: Vec<f64> = y.values().into_iter().map(to_f64).collect();
    // common energy cut
    let top = match (xs.last(), ys.last()) {
        (Some(a), Some(b)) => a.min(*b),
        _ => return Err(Error::InvalidInput("empty spectrum".into())),
    };
    let xs: Vec<f64> = xs.into_iter().filter(|v| *v <= top).collect();
    let ys: Vec<f64> = ys.into_iter().filter(|v| *v <= top).collect();
    let min_len = 4 * schedule.windows.max(4);
    if xs.len() < min_len || ys.len() < min_len {
        return Err(Error::InvalidInput(format!("need at least {min_len} eigenvalues below the common cut on each side")));
    }
    let slopes = (weyl_slope(&xs), weyl_slope(&ys));
    let max_head = schedule.max_head.min(xs.len() / 4).min(ys.len() / 4);
    // candidates ordered by tail score, then the whole profile, then head size
    let mut best: Option<(f64, Vec<f64>, usize, usize, usize, Vec<WindowDeviation>)> = None;
    for d in -(max_head as i64)..=(max_head as i64) {
        let (hx, hy) = (d.max(0) as usize, (-d).max(0) as usize);
        let n = (xs.len() - hx).min(ys.len() - hy);
        let tail = (n - n / 4..n).map(|i| (xs[hx + i] - ys[hy + i]).abs()).fold(0.0, f64::max);
        let prof = profile(&xs, &ys, hx, hy, schedule.windows);
        let sups: Vec<f64> = prof.iter().map(|w| w.sup).collect();
        let key = (tail, sups, d.unsigned_abs() as usize);
        let better = match &best {
            None => true,
            Some(b) => {
                key.0.total_cmp(&b.0).then_with(|| cmp_vec(&key.1, &b.1)).then(key.2.cmp(&b.2)).is_lt()
            }
        };
        if better {
            best = Some((key.0, key.1, key.2, hx, hy, prof));
        }
    }
    let (_, sups, _, hx, hy, windows) = best.expect("at least one head choice");
    let n = (xs.len() - hx).min(ys.len() - hy);
    let verdict = if (slopes.0 / slopes.1 - 1.0).abs() > 0.01 {
        MatchVerdict::StructuralMismatch
    } else if sups.last().is_some_and(|s| *s <= schedule.tol) && sups.windows(2).all(|w| w[1] <= w[0] + schedule.tol) {
        MatchVerdict::Consistent
    } else {
        MatchVerdict::Mismatch
    };
    Ok(MatchReport {
        heads: (hx, hy),
        pairs: (0..n).map(|i| (hx + i, hy + i)).collect(),
        windows,
        weyl_slopes: slopes,
        verdict,
    })
}

fn cmp_vec(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(a.len().cmp(&b.len()))
}
