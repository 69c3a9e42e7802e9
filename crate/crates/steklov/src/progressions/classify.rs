//! All ways a union (a_j ℕ ± b_j), j = 1..k, can agree almost everywhere with ℕ ± β, for k ≤ 3.
//! Normalized to the single progression having modulus 1 and β ∈ [0, 1/2].

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::{almost_equal, rat, APPair, GenMultiset, Rational};
use crate::error::{Error, Result};

/// unit-fraction denominators searched up to this bound
const DENOM_LIMIT: u64 = 10_000;

/// Offset b_j of a family member.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Offset {
    /// β + t
    Beta(Rational),
    Fixed(Rational),
}

impl std::fmt::Display for Offset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Offset::Beta(t) if t.is_zero() => write!(f, "β"),
            Offset::Beta(t) => write!(f, "β + {t}"),
            Offset::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// Moduli a_j = p_j/2 and the admissible offset patterns, each listed up to b ↦ a − b and
/// permutations of equal moduli. `beta` is None when every β works.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub denominators: Vec<u64>,
    pub moduli: Vec<Rational>,
    pub beta: Option<Rational>,
    pub patterns: Vec<Vec<Offset>>,
    pub label: String,
}

impl Family {
    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "moduli": self.moduli.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "beta": self.beta.as_ref().map_or("any".to_string(), |b| b.to_string()),
            "patterns": self.patterns.iter()
                .map(|p| p.iter().map(|o| o.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    /// the members (a_j, b_j) for a given β
    pub fn instance(&self, pattern: usize, beta: &Rational) -> GenMultiset {
        GenMultiset::new(
            self.moduli
                .iter()
                .zip(&self.patterns[pattern])
                .map(|(a, o)| {
                    let b = match o {
                        Offset::Beta(t) => beta + t,
                        Offset::Fixed(v) => v.clone(),
                    };
                    APPair::new(a.clone(), b).unwrap()
                })
                .collect(),
        )
    }
}

/// Nondecreasing p_1 ≤ … ≤ p_k with Σ 2/p_j = 1.
pub fn unit_fraction_tuples(k: usize) -> Result<Vec<Vec<u64>>> {
    fn go(rem: &Rational, k: usize, min: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) -> Result<()> {
        let two = rat(2, 1);
        if k == 0 {
            if rem.is_zero() {
                out.push(cur.clone());
            }
            return Ok(());
        }
        if !rem.is_positive() {
            return Ok(());
        }
        // 2/p ≤ rem, and the largest of the k remaining terms is at least rem/k
        let lo = (&two / rem).ceil().to_integer().to_u64().unwrap().max(min);
        let hi = (&two * rat(k as i64, 1) / rem).floor().to_integer().to_u64().unwrap();
        if hi > DENOM_LIMIT {
            return Err(Error::SizeLimit(format!("unit-fraction denominators beyond {DENOM_LIMIT}")));
        }
        for p in lo..=hi {
            cur.push(p);
            go(&(rem - &two / rat(p as i64, 1)), k - 1, p, cur, out)?;
            cur.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(&Rational::one(), k, 1, &mut Vec::new(), &mut out)?;
    Ok(out)
}

fn target(beta: &Rational) -> GenMultiset {
    GenMultiset::new(vec![APPair::new(Rational::one(), beta.clone()).unwrap()]).with_reflection()
}

/// min(b, a − b) mod a: the representative of b under b ↦ a − b
fn sym_rep(a: &Rational, b: &Rational) -> Rational {
    let p = APPair::new(a.clone(), b.clone()).unwrap();
    let q = p.reflected();
    p.b.min(q.b)
}

/// sorts offsets within runs of equal moduli
fn normalize(moduli: &[Rational], mut offs: Vec<Rational>) -> Vec<Rational> {
    let mut i = 0;
    while i < moduli.len() {
        let j = (i..moduli.len()).find(|&j| moduli[j] != moduli[i]).unwrap_or(moduli.len());
        offs[i..j].sort();
        i = j;
    }
    offs
}

/// every offset vector (in symmetric representatives) making the union agree with ℕ ± β
fn solutions(moduli: &[Rational], beta: &Rational) -> Result<Vec<Vec<Rational>>> {
    let cands: Vec<Vec<Rational>> = moduli
        .iter()
        .map(|a| {
            let top = a.ceil().to_integer().to_i64().unwrap();
            let mut c: Vec<Rational> = (0..=top)
                .flat_map(|t| [beta + rat(t, 1), rat(t, 1) - beta])
                .filter(|b| !b.is_negative() && b * rat(2, 1) <= *a)
                .collect();
            c.sort();
            c.dedup();
            c
        })
        .collect();
    let goal = target(beta);
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn go(
        moduli: &[Rational],
        cands: &[Vec<Rational>],
        goal: &GenMultiset,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<Rational>>,
    ) -> Result<()> {
        let j = cur.len();
        if j == moduli.len() {
            let offs: Vec<Rational> = cur.iter().enumerate().map(|(i, &c)| cands[i][c].clone()).collect();
            let r = GenMultiset::new(
                moduli.iter().zip(&offs).map(|(a, b)| APPair::new(a.clone(), b.clone()).unwrap()).collect(),
            );
            if almost_equal(goal, &r.with_reflection())?.is_equal() {
                out.push(offs);
            }
            return Ok(());
        }
        // equal moduli: nondecreasing candidate index
        let start = if j > 0 && moduli[j] == moduli[j - 1] { cur[j - 1] } else { 0 };
        for c in start..cands[j].len() {
            cur.push(c);
            go(moduli, cands, goal, cur, out)?;
            cur.pop();
        }
        Ok(())
    }
    go(moduli, &cands, &goal, &mut cur, &mut out)?;
    Ok(out)
}

/// writes a solution at generic β as shifts t_j with b_j = β + t_j, flipping b ↦ a − b where needed
fn as_pattern(moduli: &[Rational], offs: &[Rational], beta: &Rational) -> Option<Vec<Rational>> {
    let ts = moduli
        .iter()
        .zip(offs)
        .map(|(a, b)| {
            let t = b - beta;
            if t.is_integer() {
                return Some(t);
            }
            let t = a - b - beta;
            t.is_integer().then_some(t)
        })
        .collect::<Option<Vec<_>>>()?;
    Some(normalize(moduli, ts))
}

fn fmt_list(xs: &[Rational]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// β values away from ½ℤ and ¼ + ½ℤ, where residues ±β mod ½ cannot collide
fn generic_samples() -> [Rational; 2] {
    [rat(1, 7), rat(2, 9)]
}

/// the only β ∈ [0, 1/2] where such collisions happen
fn special_values() -> [Rational; 3] {
    [rat(0, 1), rat(1, 4), rat(1, 2)]
}

/// Every family of k2 progressions (with their reflections) agreeing almost everywhere with
/// ℕ ± β: solve Σ 2/p_j = 1, try moduli p_j/2, and match residues exactly.
pub fn classify_vs_single(k2: usize) -> Result<Vec<Family>> {
    if !(k2 == 2 || k2 == 3) {
        return Err(Error::InvalidInput(format!("classification is available for 2 or 3 progressions, got {k2}")));
    }
    let mut families = Vec::new();
    for ps in unit_fraction_tuples(k2)? {
        let moduli: Vec<Rational> = ps.iter().map(|&p| rat(p as i64, 2)).collect();
        let mut generic: Option<Vec<Vec<Rational>>> = None;
        for beta in generic_samples() {
            let mut pats: Vec<Vec<Rational>> =
                solutions(&moduli, &beta)?.iter().filter_map(|s| as_pattern(&moduli, s, &beta)).collect();
            pats.sort();
            pats.dedup();
            generic = Some(match generic {
                None => pats,
                Some(prev) => prev.into_iter().filter(|p| pats.contains(p)).collect(),
            });
        }
        let generic = generic.unwrap_or_default();
        if !generic.is_empty() {
            families.push(Family {
                denominators: ps.clone(),
                moduli: moduli.clone(),
                beta: None,
                patterns: generic.iter().map(|p| p.iter().cloned().map(Offset::Beta).collect()).collect(),
                label: format!("moduli {}; any β", fmt_list(&moduli)),
            });
        }
        for beta in special_values() {
            let instances: Vec<Vec<Rational>> = generic
                .iter()
                .map(|p| {
                    let offs = moduli.iter().zip(p).map(|(a, t)| sym_rep(a, &(&beta + t))).collect();
                    normalize(&moduli, offs)
                })
                .collect();
            let extra: Vec<Vec<Rational>> = solutions(&moduli, &beta)?
                .into_iter()
                .map(|s| normalize(&moduli, s))
                .filter(|s| !instances.contains(s))
                .collect();
            if !extra.is_empty() {
                families.push(Family {
                    denominators: ps.clone(),
                    moduli: moduli.clone(),
                    beta: Some(beta.clone()),
                    patterns: extra.into_iter().map(|p| p.into_iter().map(Offset::Fixed).collect()).collect(),
                    label: format!("moduli {}; β = {beta}", fmt_list(&moduli)),
                });
            }
        }
    }
    Ok(families)
}
