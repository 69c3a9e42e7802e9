//! Base-unit bookkeeping for progressions whose moduli are not rational multiples of each other.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{parse_rational, APPair, GenMultiset, Rational};
use crate::error::{Error, Result};

/// x_unit = scale·x_base, y_unit = y_base + shift·x_base. The base `"1"` is the rational unit
/// (x, y) = (1, 0) that untagged pairs use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitRelation {
    pub unit: String,
    pub base: String,
    pub scale: String,
    pub shift: String,
}

/// Pairs of both sides rewritten in the coordinates of one root unit (None: the rationals).
#[derive(Clone, Debug, PartialEq)]
pub struct UnitClass {
    pub unit: Option<String>,
    pub left: Vec<APPair>,
    pub right: Vec<APPair>,
}

const RATIONALS: &str = "1";

/// Groups the pairs of R1 and R2 into classes of units linked by the given relations. Classes are
/// ordered with the rationals first, then by root name.
pub fn commensurability_partition(r1: &GenMultiset, r2: &GenMultiset, relations: &[UnitRelation]) -> Result<Vec<UnitClass>> {
    let mut edges: BTreeMap<String, Vec<(String, Rational, Rational)>> = BTreeMap::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let key = |u: &Option<String>| u.clone().unwrap_or_else(|| RATIONALS.to_string());
    for u in r1.units.iter().chain(&r2.units) {
        names.insert(key(u));
    }
    for rel in relations {
        let s = parse_rational(&rel.scale)?;
        let t = parse_rational(&rel.shift)?;
        if !s.is_positive() {
            return Err(Error::InvalidInput(format!("unit {} must have a positive scale", rel.unit)));
        }
        if rel.unit == RATIONALS {
            return Err(Error::InvalidInput("the rational unit cannot be redefined".into()));
        }
        names.insert(rel.unit.clone());
        names.insert(rel.base.clone());
        edges.entry(rel.base.clone()).or_default().push((rel.unit.clone(), s.clone(), t.clone()));
        // inverse: x_base = x_unit/s, y_base = y_unit − (t/s)·x_unit
        edges.entry(rel.unit.clone()).or_default().push((rel.base.clone(), s.recip(), -(&t / &s)));
    }
    // (root, scale, shift) of each unit relative to its root
    let mut coords: BTreeMap<String, (String, Rational, Rational)> = BTreeMap::new();
    let mut order: Vec<String> = names.iter().cloned().collect();
    // the rationals root their class whenever present
    order.sort_by_key(|n| n != RATIONALS);
    for root in order {
        if coords.contains_key(&root) {
            continue;
        }
        coords.insert(root.clone(), (root.clone(), Rational::one(), Rational::zero()));
        let mut queue = VecDeque::from([root.clone()]);
        while let Some(u) = queue.pop_front() {
            let (_, su, tu) = coords[&u].clone();
            for (v, s, t) in edges.get(&u).into_iter().flatten() {
                let want = (root.clone(), s * &su, &tu + t * &su);
                match coords.get(v) {
                    Some(have) if *have != want => {
                        return Err(Error::Commensurability(format!(
                            "relations give unit {v} two different expressions in unit {root}"
                        )))
                    }
                    Some(_) => {}
                    None => {
                        coords.insert(v.clone(), want);
                        queue.push_back(v.clone());
                    }
                }
            }
        }
    }
    let mut classes: BTreeMap<(bool, String), UnitClass> = BTreeMap::new();
    for (side, r) in [(0, r1), (1, r2)] {
        for (p, u) in r.pairs.iter().zip(&r.units) {
            let (root, s, t) = &coords[&key(u)];
            let moved = APPair::new(&p.a * s, t + p.raw_offset() * s)?;
            let c = classes.entry((root != RATIONALS, root.clone())).or_insert_with(|| UnitClass {
                unit: (root != RATIONALS).then(|| root.clone()),
                left: Vec::new(),
                right: Vec::new(),
            });
            if side == 0 {
                c.left.push(moved);
            } else {
                c.right.push(moved);
            }
        }
    }
    Ok(classes.into_values().collect())
}
