//! Covering systems of ℤ by residue classes b mod a.

use std::collections::{BTreeSet, HashSet};

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{GenMultiset, TABLE_LIMIT};
use crate::error::{Error, Result};

/// Residue class `residue` mod `modulus`, split into the classes of its children.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitTree {
    pub modulus: u64,
    pub residue: u64,
    pub children: Vec<SplitTree>,
}

impl SplitTree {
    pub fn leaves(&self) -> Vec<(u64, u64)> {
        if self.children.is_empty() {
            return vec![(self.modulus, self.residue)];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub cs: bool,
    pub ecs: bool,
    pub dcs: bool,
    /// only decided for exact covers
    pub necs: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_tree: Option<SplitTree>,
}

fn integer_pairs(r: &GenMultiset) -> Result<Vec<(u64, u64)>> {
    if r.is_tagged() {
        return Err(Error::InvalidInput("covering systems take untagged integer pairs".into()));
    }
    r.pairs
        .iter()
        .map(|p| {
            if !p.is_integral() {
                return Err(Error::InvalidInput(format!("{p} is not an integer pair")));
            }
            match (p.a.to_integer().to_u64(), p.b.to_integer().to_u64()) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(Error::SizeLimit(format!("{p} exceeds 64 bits"))),
            }
        })
        .collect()
}

/// how many classes contain each residue mod lcm
fn counts(pairs: &[(u64, u64)]) -> Result<Vec<u32>> {
    let mut p = 1u64;
    for (a, _) in pairs {
        p = p.lcm(a);
        if p > TABLE_LIMIT {
            return Err(Error::SizeLimit(format!("lcm of moduli exceeds {TABLE_LIMIT}")));
        }
    }
    let mut t = vec![0u32; p as usize];
    for &(a, b) in pairs {
        (b..p).step_by(a as usize).for_each(|r| t[r as usize] += 1);
    }
    Ok(t)
}

pub fn is_covering(r: &GenMultiset) -> Result<bool> {
    let pairs = integer_pairs(r)?;
    Ok(!pairs.is_empty() && counts(&pairs)?.iter().all(|c| *c >= 1))
}

pub fn is_exact_covering(r: &GenMultiset) -> Result<bool> {
    let pairs = integer_pairs(r)?;
    Ok(!pairs.is_empty() && counts(&pairs)?.iter().all(|c| *c == 1))
}

/// a covering whose moduli are pairwise distinct
pub fn is_distinct_covering(r: &GenMultiset) -> Result<bool> {
    let pairs = integer_pairs(r)?;
    let moduli: HashSet<u64> = pairs.iter().map(|p| p.0).collect();
    Ok(moduli.len() == pairs.len() && is_covering(r)?)
}

/// Whether an exact cover arises from ℤ by repeatedly splitting one class b mod a into
/// b, b + a, …, b + (m−1)a mod ma. Searches merges backwards from R; returns the split tree.
pub fn is_natural_exact(r: &GenMultiset) -> Result<Option<SplitTree>> {
    if !is_exact_covering(r)? {
        return Err(Error::Precondition("not an exact covering system".into()));
    }
    let pairs = integer_pairs(r)?;
    let nodes: Vec<SplitTree> =
        pairs.iter().map(|&(modulus, residue)| SplitTree { modulus, residue, children: vec![] }).collect();
    let mut dead = HashSet::new();
    Ok(merge_search(nodes, &mut dead))
}

fn state_key(nodes: &[SplitTree]) -> BTreeSet<(u64, u64)> {
    nodes.iter().map(|n| (n.modulus, n.residue)).collect()
}

fn merge_search(nodes: Vec<SplitTree>, dead: &mut HashSet<BTreeSet<(u64, u64)>>) -> Option<SplitTree> {
    if nodes.len() == 1 {
        return (nodes[0].modulus == 1).then(|| nodes[0].clone());
    }
    let key = state_key(&nodes);
    if dead.contains(&key) {
        return None;
    }
    let moduli: BTreeSet<u64> = nodes.iter().map(|n| n.modulus).collect();
    for &big in moduli.iter().rev() {
        for m in 2..=big {
            if big % m != 0 {
                continue;
            }
            let small = big / m;
            for base in 0..small {
                let want: Vec<(u64, u64)> = (0..m).map(|i| (big, base + i * small)).collect();
                if !want.iter().all(|w| key.contains(w)) {
                    continue;
                }
                let (mut kids, mut rest): (Vec<SplitTree>, Vec<SplitTree>) =
                    nodes.iter().cloned().partition(|n| n.modulus == big && n.residue % small == base);
                kids.sort_by_key(|n| n.residue);
                rest.push(SplitTree { modulus: small, residue: base, children: kids });
                if let Some(t) = merge_search(rest, dead) {
                    return Some(t);
                }
            }
        }
    }
    dead.insert(key);
    None
}

pub fn cover_report(r: &GenMultiset) -> Result<CoverReport> {
    let cs = is_covering(r)?;
    let ecs = is_exact_covering(r)?;
    let dcs = is_distinct_covering(r)?;
    let split_tree = if ecs { is_natural_exact(r)? } else { None };
    Ok(CoverReport { cs, ecs, dcs, necs: ecs.then_some(split_tree.is_some()), split_tree })
}
