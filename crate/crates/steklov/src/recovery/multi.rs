//! Merged spectra as unions of m ≤ 3 two-sided ladders (2π/ℓ)(n ± α) + C_±/n.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::{PI, TAU};

use super::{fold_half, lstsq};
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};
use crate::spectrum::SpectrumSeq;

/// fewest eigenvalues accepted by `recover_multi`
pub const MIN_MULTI: usize = 100;
const MAX_COMPONENTS: usize = 3;
/// length peaks and flux modes kept as ladder candidates
const LENGTH_PEAKS: usize = 10;
const FLUX_MODES: usize = 3;
/// candidates surviving the single-ladder screen
const SCREEN_KEEP: usize = 12;
/// ℓ is also tried at these fractions of each peak
const HARMONICS: usize = 3;
/// a data point counts for a polished ladder within this fraction of its period
const HIT: f64 = 0.005;
const REFIT_ROUNDS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct MultiConfig {
    /// largest accepted residual, relative to the top eigenvalue
    pub tol: f64,
    /// fraction of the spectrum treated as the tail
    pub tail_fraction: f64,
    /// α within this distance of 1/4 or 3/4 is flagged
    pub eps_quarter: f64,
    /// relative mismatch allowed between model and observed densities
    pub density_tol: f64,
}

impl Default for MultiConfig {
    fn default() -> Self {
        MultiConfig { tol: 1e-6, tail_fraction: 0.75, eps_quarter: 0.01, density_tol: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentEstimate {
    pub length: f64,
    /// representative in [0, 1/2]
    pub alpha: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub near_quarter: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiComponentEstimate {
    pub m: usize,
    /// sorted by length
    pub components: Vec<ComponentEstimate>,
    pub max_residual: f64,
    pub score: f64,
    /// best score for each m that produced an admissible fit
    pub scores: Vec<(usize, f64)>,
    pub warnings: Vec<String>,
}

impl MultiComponentEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "components": self.components,
            "max_residual": self.max_residual,
            "score": self.score,
            "scores": self.scores,
            "warnings": self.warnings,
        })
    }
}

/// σ = b0·n + s·c + C_s/n for s = ±1, n ≥ 1
#[derive(Clone, Debug, PartialEq)]
struct Ladder {
    b0: f64,
    c: f64,
    cp: f64,
    cm: f64,
}

impl Ladder {
    fn value(&self, n: i64, s: i8) -> f64 {
        let nf = n as f64;
        let (sc, cc) = if s > 0 { (self.c, self.cp) } else { (-self.c, self.cm) };
        self.b0 * nf + sc + cc / nf
    }

    /// whether v lies within HIT·b0 of a ladder point
    fn explains(&self, v: f64) -> bool {
        let near = |s: f64| {
            let n = ((v - s * self.c) / self.b0).round() as i64;
            n >= 1 && (v - self.value(n, if s > 0.0 { 1 } else { -1 })).abs() < HIT * self.b0
        };
        near(1.0) || near(-1.0)
    }

    /// (value, n, s) for every point with value in [lo, hi]
    fn points(&self, lo: f64, hi: f64) -> Vec<(f64, i64, i8)> {
        let n0 = (((lo - self.c.abs()) / self.b0).floor() as i64 - 2).max(1);
        let n1 = ((hi + self.c.abs()) / self.b0).ceil() as i64 + 2;
        let mut out = Vec::new();
        for n in n0..=n1 {
            for s in [1i8, -1] {
                let v = self.value(n, s);
                if v >= lo && v <= hi {
                    out.push((v, n, s));
                }
            }
        }
        out
    }
}

struct Fit {
    ladders: Vec<Ladder>,
    rss: f64,
    max_res: f64,
}

/// peaks of the Hann-weighted |Σ e^{itx}| for t ≤ t_max; a ladder of length ℓ peaks at t = ℓ
fn length_peaks(x: &[f64], t_max: f64) -> Vec<f64> {
    let (x0, x1) = (x[0], x[x.len() - 1]);
    let range = x1 - x0;
    let w: Vec<f64> = x.iter().map(|v| (PI * (v - x0) / range).sin().powi(2)).collect();
    let wsum: f64 = w.iter().sum();
    let h = |t: f64| -> f64 {
        let s: Complex64 = x.iter().zip(&w).map(|(v, wi)| Complex64::from_polar(*wi, t * v)).sum();
        s.norm() / wsum
    };
    let (t0, t1, dt) = (8.0 * TAU / range, t_max, PI / (4.0 * range));
    let ts: Vec<f64> = (0..).map(|i| t0 + i as f64 * dt).take_while(|t| *t <= t1).collect();
    let hs: Vec<f64> = ts.iter().map(|t| h(*t)).collect();
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 1..hs.len().saturating_sub(1) {
        if hs[i] >= hs[i - 1] && hs[i] > hs[i + 1] && hs[i] > 0.03 {
            // parabolic vertex through the three samples
            let den = hs[i - 1] - 2.0 * hs[i] + hs[i + 1];
            let shift = if den < 0.0 { 0.5 * (hs[i - 1] - hs[i + 1]) / den } else { 0.0 };
            peaks.push((hs[i], ts[i] + shift * dt));
        }
    }
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
    peaks.into_iter().take(LENGTH_PEAKS).map(|p| p.1).collect()
}

/// modes of the folded phases x/b0 mod 1
fn flux_modes(x: &[f64], b0: f64) -> Vec<f64> {
    const BINS: usize = 64;
    let f: Vec<f64> = x.iter().map(|v| fold_half(v / b0)).collect();
    let bin = |a: f64| ((a * 2.0 * BINS as f64) as usize).min(BINS - 1);
    let mut counts = [0usize; BINS];
    f.iter().for_each(|a| counts[bin(*a)] += 1);
    let mut order: Vec<usize> = (0..BINS).collect();
    order.sort_by(|a, b| counts[*b].cmp(&counts[*a]).then(a.cmp(b)));
    let mut picked: Vec<usize> = Vec::new();
    for i in order {
        if picked.len() == FLUX_MODES || counts[i] < 4 {
            break;
        }
        if picked.iter().all(|p| p.abs_diff(i) > 2) {
            picked.push(i);
        }
    }
    picked
        .into_iter()
        .map(|i| {
            let near: Vec<f64> = f.iter().copied().filter(|a| bin(*a).abs_diff(i) <= 1).collect();
            near.iter().sum::<f64>() / near.len() as f64
        })
        .collect()
}

/// Least-squares refit of one ladder from the data points within a shrinking distance of it;
/// corrects periodogram lengths whose drift across the tail exceeds the spacing.
fn polish(x: &[f64], mut l: Ladder) -> Ladder {
    // a periodogram length is good to about b0/range, which drifts a full step over the tail:
    // widen the range before narrowing the window
    let (lo, span) = (x[0], x[x.len() - 1] - x[0]);
    let stages = [(0.25, 0.1), (0.5, 0.1), (1.0, 0.1), (1.0, 0.05), (1.0, 0.025), (1.0, 0.0125), (1.0, 0.005)];
    for (frac, w) in stages {
        let mut pts: Vec<(i64, i8, f64)> = Vec::new();
        for v in x.iter().filter(|v| **v <= lo + frac * span) {
            let u = (v - l.c) / l.b0;
            let np = u.round() as i64;
            let nm = ((v + l.c) / l.b0).round() as i64;
            let dp = if np >= 1 { (v - l.value(np, 1)).abs() } else { f64::INFINITY };
            let dm = if nm >= 1 { (v - l.value(nm, -1)).abs() } else { f64::INFINITY };
            let (n, s, d) = if dp <= dm { (np, 1, dp) } else { (nm, -1, dm) };
            if d < w * l.b0 {
                pts.push((n, s, *v));
            }
        }
        let with_c = w < 0.03;
        let rows: Vec<Vec<f64>> = pts
            .iter()
            .map(|(n, s, _)| {
                let (nf, inv) = (*n as f64, 1.0 / *n as f64);
                let mut r = vec![nf, *s as f64];
                if with_c {
                    r.extend([if *s > 0 { inv } else { 0.0 }, if *s < 0 { inv } else { 0.0 }]);
                }
                r
            })
            .collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.2).collect();
        match lstsq(&rows, &ys) {
            Ok((c, _)) if c[0] > 0.0 => {
                l = Ladder { b0: c[0], c: c[1], cp: if with_c { c[2] } else { 0.0 }, cm: if with_c { c[3] } else { 0.0 } };
            }
            _ => break,
        }
    }
    l
}

/// points of the ladder found in the tail against points missing; pieces of a true ladder hit
/// everywhere but explain less
fn screen_score(x: &[f64], l: &Ladder) -> f64 {
    let model = l.points(x[0], x[x.len() - 1]);
    let hits = model
        .iter()
        .filter(|p| {
            let k = x.partition_point(|v| *v < p.0);
            [k.wrapping_sub(1), k].iter().any(|&i| i < x.len() && (x[i] - p.0).abs() < HIT * l.b0)
        })
        .count();
    hits as f64 - 2.0 * (model.len() - hits) as f64
}

/// Ladders suggested by the periodogram of `pts`, polished against `pts` and scored against
/// the whole tail `x`, best first.
fn ladder_candidates(x: &[f64], pts: &[f64]) -> Vec<(f64, Ladder)> {
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    // a ladder of length ℓ also peaks at its harmonics kℓ, where peaks of different ladders
    // may cancel; try ℓ = t/k for every peak t
    // no ladder is denser than the whole tail: ℓ ≤ π·density
    let t_max = 1.05 * PI * (x.len() - 1) as f64 / (x[x.len() - 1] - x[0]);
    let mut lengths: Vec<f64> = Vec::new();
    for t in length_peaks(pts, t_max) {
        for k in 1..=HARMONICS {
            let l = t / k as f64;
            if l >= 8.0 * TAU / (hi - lo) && lengths.iter().all(|m| (m / l - 1.0).abs() > 1e-3) {
                lengths.push(l);
            }
        }
    }
    let mut cands: Vec<(f64, Ladder)> = Vec::new();
    for l in lengths {
        let b0 = TAU / l;
        for a in flux_modes(pts, b0) {
            let init = polish(pts, Ladder { b0, c: b0 * a, cp: 0.0, cm: 0.0 });
            // equal-length pieces of a longer ladder (ℓk, kα) are found before the ladder itself
            let alpha = init.c / init.b0;
            let parents = (2..=HARMONICS).map(|k| {
                let b = init.b0 / k as f64;
                polish(x, Ladder { b0: b, c: b * fold_half(k as f64 * alpha), cp: 0.0, cm: 0.0 })
            });
            for l in std::iter::once(init.clone()).chain(parents) {
                cands.push((screen_score(x, &l), l));
            }
        }
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    cands
}

/// (ladder, index, sign) for each data point: the merged model points matched in order, with the
/// start offset chosen by least squares
fn label(x: &[f64], ladders: &[Ladder]) -> Option<Vec<(usize, i64, i8)>> {
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let margin = 3.0 * ladders.iter().map(|l| l.b0).fold(0.0, f64::max);
    let mut pred: Vec<(f64, usize, i64, i8)> = ladders
        .iter()
        .enumerate()
        .flat_map(|(j, l)| l.points(lo - margin, hi + margin).into_iter().map(move |(v, n, s)| (v, j, n, s)))
        .collect();
    pred.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pred.len() < x.len() {
        return None;
    }
    let p0 = pred.partition_point(|p| p.0 < lo) as i64;
    let best = (p0 - 4..=p0 + 4)
        .filter(|o| *o >= 0 && (*o as usize) + x.len() <= pred.len())
        .map(|o| {
            let o = o as usize;
            let ss: f64 = x.iter().enumerate().map(|(i, v)| (v - pred[o + i].0).powi(2)).sum();
            (ss, o)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))?;
    Some((0..x.len()).map(|i| {
        let p = pred[best.1 + i];
        (p.1, p.2, p.3)
    }).collect())
}

/// Monotone matching of the data to the merged model points, then a least-squares refit of
/// each ladder from the labels; repeated until the labels settle.
fn refine(x: &[f64], init: &[Ladder]) -> Option<Fit> {
    let mut ladders = init.to_vec();
    let mut last_labels: Vec<(usize, i64, i8)> = Vec::new();
    for _ in 0..REFIT_ROUNDS {
        let labels = label(x, &ladders)?;
        if labels == last_labels {
            break;
        }
        for (j, l) in ladders.iter_mut().enumerate() {
            let pts: Vec<(i64, i8, f64)> =
                labels.iter().zip(x).filter(|(lab, _)| lab.0 == j).map(|(lab, v)| (lab.1, lab.2, *v)).collect();
            let np = pts.iter().filter(|p| p.1 > 0).count();
            let nm = pts.len() - np;
            if np < 4 || nm < 4 {
                return None;
            }
            // c/b0 is fixed only mod 1 by the leading terms; a ladder labelled one index off
            // keeps an O(1/n²) residual in its 1/n terms, so each relabelling n → n − s·t is tried
            let mut fits = Vec::new();
            for t in [0i64, -1, 1] {
                if pts.iter().any(|(n, s, _)| n - *s as i64 * t < 1) {
                    continue;
                }
                let rows: Vec<Vec<f64>> = pts
                    .iter()
                    .map(|(n, s, _)| {
                        let m = (n - *s as i64 * t) as f64;
                        vec![m, *s as f64, if *s > 0 { 1.0 / m } else { 0.0 }, if *s < 0 { 1.0 / m } else { 0.0 }]
                    })
                    .collect();
                let ys: Vec<f64> = pts.iter().map(|p| p.2).collect();
                if let Ok(f) = lstsq(&rows, &ys) {
                    fits.push(f);
                }
            }
            let (c, _) = fits.into_iter().min_by(|a, b| a.1.total_cmp(&b.1))?;
            if !(c[0] > 0.0) {
                return None;
            }
            *l = Ladder { b0: c[0], c: c[1], cp: c[2], cm: c[3] };
        }
        last_labels = labels;
    }
    // a relabelled ladder moves its indices, so label once more against the final ladders
    let res: Vec<f64> =
        label(x, &ladders)?.iter().zip(x).map(|(lab, v)| v - ladders[lab.0].value(lab.1, lab.2)).collect();
    Some(Fit {
        rss: res.iter().map(|r| r * r).sum(),
        max_res: res.iter().map(|r| r.abs()).fold(0.0, f64::max),
        ladders,
    })
}

/// k-multisets of 0..n: identical components (two ends of a cylinder) reuse one candidate
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn recover_multi<T: Real>(sigma: &SpectrumSeq<T>, m_max: usize) -> Result<MultiComponentEstimate> {
    recover_multi_with(sigma, m_max, &MultiConfig::default())
}

/// Model selection over m = 1..m_max: candidate ladders from a periodogram of the tail,
/// alternating labelling and refitting for each subset with matching density, and the score
/// N·ln(RSS/N) + 2m·ln N among fits within tolerance.
pub fn recover_multi_with<T: Real>(sigma: &SpectrumSeq<T>, m_max: usize, cfg: &MultiConfig) -> Result<MultiComponentEstimate> {
    if !(1..=MAX_COMPONENTS).contains(&m_max) {
        return Err(Error::InvalidInput(format!("m_max must be 1..={MAX_COMPONENTS}, got {m_max}")));
    }
    let all: Vec<f64> = sigma.values().into_iter().map(to_f64).collect();
    if all.len() < MIN_MULTI {
        return Err(Error::InvalidInput(format!("need at least {MIN_MULTI} eigenvalues, got {}", all.len())));
    }
    let x = &all[all.len() - (cfg.tail_fraction * all.len() as f64) as usize..];
    let (lo, hi) = (x[0], x[x.len() - 1]);
    if !(hi > lo) {
        return Err(Error::InvalidInput("tail has no spread".into()));
    }
    let density = (x.len() - 1) as f64 / (hi - lo);
    let nf = x.len() as f64;
    let floor = (1e-13 * hi).powi(2);

    // candidates from the data, then again from what the best ladder so far leaves unexplained,
    // which separates ladders whose peaks overlap
    let mut cands: Vec<(f64, Ladder)> = Vec::new();
    let mut rest = x.to_vec();
    for _ in 0..MAX_COMPONENTS {
        if rest.len() < 30 || rest[rest.len() - 1] - rest[0] <= 0.0 {
            break;
        }
        let round = ladder_candidates(x, &rest);
        let Some((_, top)) = round.first().cloned() else { break };
        cands.extend(round);
        rest.retain(|v| !top.explains(*v));
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    // polishing often lands several starts on the same ladder
    let mut unique: Vec<(f64, Ladder)> = Vec::new();
    for (score, l) in cands {
        let same = |u: &Ladder| {
            (u.b0 / l.b0 - 1.0).abs() < 1e-4 && (fold_half(u.c / u.b0) - fold_half(l.c / l.b0)).abs() < 1e-3
        };
        if !unique.iter().any(|(_, u)| same(u)) {
            unique.push((score, l));
        }
    }
    let mut cands = unique;
    cands.truncate(SCREEN_KEEP);

    let mut best_per_m: Vec<(usize, Fit, f64)> = Vec::new();
    for m in 1..=m_max {
        let mut best: Option<Fit> = None;
        for sub in subsets(cands.len(), m) {
            let init: Vec<Ladder> = sub.iter().map(|i| cands[*i].1.clone()).collect();
            // the densities must add up
            let model_density: f64 = init.iter().map(|l| 2.0 / l.b0).sum();
            if (model_density / density - 1.0).abs() > cfg.density_tol {
                continue;
            }
            if let Some(f) = refine(x, &init) {
                if best.as_ref().is_none_or(|b| f.rss < b.rss) {
                    best = Some(f);
                }
            }
        }
        if let Some(f) = best {
            if f.max_res <= cfg.tol * hi {
                let score = nf * (f.rss / nf).max(floor).ln() + 2.0 * m as f64 * nf.ln();
                best_per_m.push((m, f, score));
            }
        }
    }
    let scores: Vec<(usize, f64)> = best_per_m.iter().map(|b| (b.0, b.2)).collect();
    let (m, fit, score) = best_per_m
        .into_iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .ok_or_else(|| Error::ModelMismatch(format!("no model with at most {m_max} components fits within {:e}", cfg.tol)))?;

    let mut components: Vec<ComponentEstimate> = fit
        .ladders
        .iter()
        .map(|l| {
            let alpha = fold_half(l.c / l.b0);
            ComponentEstimate {
                length: TAU / l.b0,
                alpha,
                c_plus: l.cp,
                c_minus: l.cm,
                near_quarter: (alpha - 0.25).abs() < cfg.eps_quarter,
            }
        })
        .collect();
    components.sort_by(|a, b| a.length.total_cmp(&b.length));
    let mut warnings = Vec::new();
    for c in components.iter().filter(|c| c.near_quarter) {
        warnings.push(format!(
            "component of length {} has alpha {} within {} of 1/4 or 3/4, where the flux is not identifiable",
            c.length, c.alpha, cfg.eps_quarter
        ));
    }
    if m < m_max {
        warnings.push(format!(
            "the same tail arises from splitting a component of length l and flux alpha into k components of \
             length l/k and fluxes (alpha + i)/k; models with up to {m_max} components are not distinguishable"
        ));
    }
    Ok(MultiComponentEstimate { m, components, max_residual: fit.max_res, score, scores, warnings })
}
