//! When one ladder (ℓ₁, α₁) agrees almost everywhere with several (ℓ₂ⱼ, α₂ⱼ): the pairs
//! (rⱼ, rⱼ·εⱼ·α₂ⱼ − α₁), rⱼ = ℓ₁/ℓ₂ⱼ, must form an exact covering system for some signs εⱼ.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::progressions::{fmt_rational, is_exact_covering, rat, APPair, GenMultiset, Rational, SIGN_SEARCH_LIMIT};

#[derive(Clone, Debug, PartialEq)]
pub struct EcsCertificate {
    pub holds: bool,
    /// εⱼ of the witness
    pub signs: Option<Vec<i8>>,
    /// the covering system of the witness
    pub pairs: Option<Vec<APPair>>,
    pub reason: String,
}

impl EcsCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "signs": self.signs,
            "pairs": self.pairs.as_ref().map(|ps| ps.iter()
                .map(|p| [fmt_rational(&p.a), fmt_rational(&p.b)]).collect::<Vec<_>>()),
            "reason": self.reason,
        })
    }
}

pub fn ecs_certificate(l1: &Rational, alpha1: &Rational, parts: &[(Rational, Rational)]) -> Result<EcsCertificate> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("no components on the right".into()));
    }
    if parts.len() > SIGN_SEARCH_LIMIT {
        return Err(Error::SizeLimit(format!("sign search beyond {SIGN_SEARCH_LIMIT} components")));
    }
    if *l1 <= Rational::zero() || parts.iter().any(|(l, _)| *l <= Rational::zero()) {
        return Err(Error::InvalidInput("lengths must be positive".into()));
    }
    let a1 = alpha1 - alpha1.floor();
    if [rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4)].contains(&a1) {
        return Err(Error::Precondition(format!("alpha1 = {alpha1} lies in {{0, 1/4, 1/2, 3/4}} mod 1")));
    }
    let ratios: Vec<Rational> = parts.iter().map(|(l, _)| l1 / l).collect();
    let density: Rational = ratios.iter().map(|r| r.recip()).sum();
    if !density.is_one() {
        return Ok(EcsCertificate {
            holds: false,
            signs: None,
            pairs: None,
            reason: format!("densities sum to {density}, not 1"),
        });
    }
    let k = parts.len();
    for mask in 0u32..(1 << k) {
        let signs: Vec<i8> = (0..k).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
        let offsets: Vec<Rational> = ratios
            .iter()
            .zip(parts)
            .zip(&signs)
            .map(|((r, (_, a2)), s)| r * a2 * rat(*s as i64, 1) - alpha1)
            .collect();
        if !ratios.iter().chain(&offsets).all(|v| v.is_integer()) {
            continue;
        }
        let pairs: Vec<APPair> =
            ratios.iter().zip(offsets).map(|(r, b)| APPair::new(r.clone(), b)).collect::<Result<_>>()?;
        if is_exact_covering(&GenMultiset::new(pairs.clone()))? {
            return Ok(EcsCertificate {
                holds: true,
                signs: Some(signs),
                pairs: Some(pairs.iter().map(|p| p.canonical()).collect()),
                reason: "exact covering system".into(),
            });
        }
    }
    Ok(EcsCertificate {
        holds: false,
        signs: None,
        pairs: None,
        reason: "no choice of signs gives an exact covering system".into(),
    })
}
