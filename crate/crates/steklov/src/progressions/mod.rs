//! Exact decisions for finite unions of arithmetic progressions aℕ + b (ℕ = {1, 2, …}) with
//! rational data: almost-equality, refinements, sign reductions, covering systems and the
//! small-case classification against a single two-sided progression.

mod classify;
mod covering;
mod units;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use classify::{classify_vs_single, unit_fraction_tuples, Family, Offset};
pub use covering::{
    cover_report, is_covering, is_distinct_covering, is_exact_covering, is_natural_exact, CoverReport, SplitTree,
};
pub use units::{commensurability_partition, UnitClass, UnitRelation};

pub type Rational = BigRational;

/// largest residue table built explicitly
pub const TABLE_LIMIT: u64 = 10_000_000;
/// largest multiset accepted by the sign search
pub const SIGN_SEARCH_LIMIT: usize = 20;
/// work budget (residues × divisor terms) of the table-free comparison
const STRUCTURED_BUDGET: u64 = 200_000_000;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `p/q` or a terminating decimal such as `-0.25`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let r = Rational::new(n, BigInt::from(10u32).pow(frac.len() as u32));
        return Ok(if neg { -r } else { r });
    }
    let r: Rational = t.parse().map_err(|_| bad())?;
    Ok(r)
}

pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

fn lcm_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x))
}

/// lcm of positive rationals: the least positive rational that is an integer multiple of each
pub fn rational_lcm(xs: &[Rational]) -> Rational {
    let d = lcm_all(xs.iter().map(|x| x.denom()));
    let n = lcm_all(xs.iter().map(|x| (x * Rational::from(d.clone())).to_integer()).collect::<Vec<_>>().iter());
    Rational::new(n, d)
}

/// Progression aℕ + b with a > 0. `b` is the canonical offset in [0, a); the offset as given is
/// b + shift·a, which `generate` honours exactly. Equality, order and hashing use (a, b) only.
#[derive(Clone, Debug)]
pub struct APPair {
    pub a: Rational,
    pub b: Rational,
    pub shift: BigInt,
}

impl APPair {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidInput(format!("modulus must be positive, got {a}")));
        }
        let shift = (&b / &a).floor().to_integer();
        let canon = &b - &a * Rational::from(shift.clone());
        Ok(APPair { a, b: canon, shift })
    }

    pub fn ints(a: i64, b: i64) -> Self {
        Self::new(Rational::from(BigInt::from(a)), Rational::from(BigInt::from(b))).expect("positive modulus")
    }

    pub fn parse(a: &str, b: &str) -> Result<Self> {
        Self::new(parse_rational(a)?, parse_rational(b)?)
    }

    /// the offset as originally given
    pub fn raw_offset(&self) -> Rational {
        &self.b + &self.a * Rational::from(self.shift.clone())
    }

    /// smallest element a + raw offset
    pub fn first(&self) -> Rational {
        &self.a + self.raw_offset()
    }

    /// (a, −b) with the given offset negated exactly
    pub fn reflected(&self) -> Self {
        Self::new(self.a.clone(), -self.raw_offset()).unwrap()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// same progression, offset taken canonical
    pub fn canonical(&self) -> Self {
        APPair { a: self.a.clone(), b: self.b.clone(), shift: BigInt::zero() }
    }
}

impl PartialEq for APPair {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b
    }
}

impl Eq for APPair {}

impl Hash for APPair {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.a.hash(h);
        self.b.hash(h);
    }
}

impl PartialOrd for APPair {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for APPair {
    fn cmp(&self, o: &Self) -> Ordering {
        (&self.a, &self.b).cmp(&(&o.a, &o.b))
    }
}

impl std::fmt::Display for APPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Finite multiset of progressions. `units[i]` optionally names the base unit (x, y) in which
/// pair i is written: modulus a·x, offset y + b·x. Untagged pairs are plain rationals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GenMultiset {
    pub pairs: Vec<APPair>,
    pub units: Vec<Option<String>>,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    a: String,
    b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit: Option<String>,
}

impl GenMultiset {
    pub fn new(pairs: Vec<APPair>) -> Self {
        let units = vec![None; pairs.len()];
        GenMultiset { pairs, units }
    }

    pub fn tagged(pairs: Vec<APPair>, units: Vec<Option<String>>) -> Result<Self> {
        if pairs.len() != units.len() {
            return Err(Error::InvalidInput("one unit tag per pair expected".into()));
        }
        Ok(GenMultiset { pairs, units })
    }

    pub fn from_ints(v: &[(i64, i64)]) -> Self {
        Self::new(v.iter().map(|&(a, b)| APPair::ints(a, b)).collect())
    }

    pub fn parse(v: &[(&str, &str)]) -> Result<Self> {
        Ok(Self::new(v.iter().map(|(a, b)| APPair::parse(a, b)).collect::<Result<_>>()?))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_tagged(&self) -> bool {
        self.units.iter().any(|u| u.is_some())
    }

    pub fn union(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.pairs.extend(o.pairs.iter().cloned());
        r.units.extend(o.units.iter().cloned());
        r
    }

    /// R ∪ R⁻
    pub fn with_reflection(&self) -> Self {
        self.union(&reflect(self))
    }

    /// pairs sorted by (a, b), tags dropped; handy for multiset comparison
    pub fn sorted_pairs(&self) -> Vec<APPair> {
        let mut v: Vec<APPair> = self.pairs.iter().map(APPair::canonical).collect();
        v.sort();
        v
    }

    /// `[{"a":"p/q","b":"r/s","unit":…}, …]`
    pub fn from_json_str(s: &str) -> Result<Self> {
        let rows: Vec<PairJson> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut pairs = Vec::new();
        let mut units = Vec::new();
        for r in rows {
            pairs.push(APPair::parse(&r.a, &r.b)?);
            units.push(r.unit);
        }
        Ok(GenMultiset { pairs, units })
    }

    pub fn to_json_string(&self) -> String {
        let rows: Vec<PairJson> = self
            .pairs
            .iter()
            .zip(&self.units)
            .map(|(p, u)| PairJson { a: p.a.to_string(), b: p.raw_offset().to_string(), unit: u.clone() })
            .collect();
        serde_json::to_string(&rows).unwrap()
    }
}

/// All elements a·n + b ≤ t, n ≥ 1, with multiplicity, sorted. Tags are ignored: values are in
/// each pair's own unit.
pub fn generate(r: &GenMultiset, t: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    for p in &r.pairs {
        let mut x = p.first();
        while &x <= t {
            out.push(x.clone());
            x += &p.a;
        }
    }
    out.sort();
    out
}

/// {(a, −b)}; an involution
pub fn reflect(r: &GenMultiset) -> GenMultiset {
    GenMultiset { pairs: r.pairs.iter().map(APPair::reflected).collect(), units: r.units.clone() }
}

/// Pairs of a rational multiset scaled by a common integer D to integer moduli and offsets.
struct Scaled {
    d: BigInt,
    /// (A, B) with 0 ≤ B < A
    pairs: Vec<(u64, u64)>,
    period: BigInt,
}

fn scale_pairs<'a>(pairs: impl IntoIterator<Item = &'a APPair> + Clone) -> Result<Scaled> {
    let d = lcm_all(pairs.clone().into_iter().flat_map(|p| [p.a.denom(), p.b.denom()]));
    let dr = Rational::from(d.clone());
    let mut out = Vec::new();
    for p in pairs {
        let big_a = (&p.a * &dr).to_integer();
        let big_b = (&p.b * &dr).to_integer();
        let (Some(a), Some(b)) = (big_a.to_u64(), big_b.to_u64()) else {
            return Err(Error::SizeLimit(format!("scaled modulus of {p} exceeds 64 bits")));
        };
        out.push((a, b));
    }
    let period = lcm_all(out.iter().map(|(a, _)| BigInt::from(*a)).collect::<Vec<_>>().iter());
    Ok(Scaled { d, pairs: out, period })
}

/// Multiplicity of x in S(R) for x ≥ threshold: zero unless x·scale is an integer, then
/// table[x·scale mod period]. The modulus is period/scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ResiduePattern {
    pub modulus: Rational,
    pub threshold: Rational,
    pub scale: BigInt,
    pub table: Vec<u32>,
}

impl ResiduePattern {
    pub fn multiplicity(&self, x: &Rational) -> u32 {
        let y = x * Rational::from(self.scale.clone());
        if !y.is_integer() {
            return 0;
        }
        let p = BigInt::from(self.table.len());
        let r = y.to_integer().mod_floor(&p);
        self.table[r.to_usize().unwrap()]
    }

    /// residue r·(1/scale) of the class stored at table index r
    pub fn residue(&self, r: usize) -> Rational {
        Rational::new(BigInt::from(r), self.scale.clone())
    }
}

fn threshold(pairs: &[&APPair]) -> Rational {
    pairs.iter().map(|p| p.first()).max().unwrap_or_else(Rational::zero)
}

fn build_table(s: &Scaled, sign: &[i32]) -> Result<Vec<i64>> {
    let p = s.period.to_u64().filter(|p| *p <= TABLE_LIMIT).ok_or_else(|| {
        Error::SizeLimit(format!("residue table of size {} exceeds {TABLE_LIMIT}", s.period))
    })? as usize;
    let mut t = vec![0i64; p];
    for (&(a, b), &sg) in s.pairs.iter().zip(sign) {
        let mut r = b as usize;
        while r < p {
            t[r] += sg as i64;
            r += a as usize;
        }
    }
    Ok(t)
}

pub fn residue_pattern(r: &GenMultiset) -> Result<ResiduePattern> {
    let refs: Vec<&APPair> = r.pairs.iter().collect();
    let s = scale_pairs(refs.iter().copied())?;
    let t = build_table(&s, &vec![1; s.pairs.len()])?;
    Ok(ResiduePattern {
        modulus: Rational::new(s.period.clone(), s.d.clone()),
        threshold: threshold(&refs),
        scale: s.d,
        table: t.into_iter().map(|c| c as u32).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AeVerdict {
    EqualAe,
    Differ,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AeWitness {
    /// generated multisets agree exactly at and above this value
    AgreeBeyond(Rational),
    /// multiplicities differ on the class residue mod modulus; `value` is such an element above
    /// every threshold
    Residue { modulus: Rational, residue: Rational, left: u32, right: u32, value: Rational },
    /// the multiplicity functions differ in their component of exact period `period`
    /// (found without a residue table)
    Period { period: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AeReport {
    pub verdict: AeVerdict,
    pub witness: AeWitness,
    /// base unit of the class the witness refers to
    pub unit: Option<String>,
}

impl AeReport {
    pub fn is_equal(&self) -> bool {
        self.verdict == AeVerdict::EqualAe
    }

    pub fn to_json(&self) -> Value {
        let w = match &self.witness {
            AeWitness::AgreeBeyond(t) => json!({"agree_beyond": t.to_string()}),
            AeWitness::Residue { modulus, residue, left, right, value } => json!({
                "modulus": modulus.to_string(), "residue": residue.to_string(),
                "left": left, "right": right, "value": value.to_string()
            }),
            AeWitness::Period { period } => json!({"period": period.to_string()}),
        };
        let verdict = match self.verdict {
            AeVerdict::EqualAe => "equal_ae",
            AeVerdict::Differ => "differ",
        };
        let mut v = json!({"verdict": verdict, "witness": w});
        if let Some(u) = &self.unit {
            v["unit"] = json!(u);
        }
        v
    }
}

/// Decides S(R1) =_ae S(R2). Pairs with unit tags are compared class by class; see
/// [`almost_equal_with`] for relations between units.
pub fn almost_equal(r1: &GenMultiset, r2: &GenMultiset) -> Result<AeReport> {
    almost_equal_with(r1, r2, &[])
}

pub fn almost_equal_with(r1: &GenMultiset, r2: &GenMultiset, relations: &[UnitRelation]) -> Result<AeReport> {
    let classes = commensurability_partition(r1, r2, relations)?;
    let mut bound = Rational::zero();
    for c in &classes {
        let rep = decide(&c.left, &c.right)?;
        match rep.witness {
            AeWitness::AgreeBeyond(t) => bound = bound.max(t),
            w => return Ok(AeReport { verdict: AeVerdict::Differ, witness: w, unit: c.unit.clone() }),
        }
    }
    Ok(AeReport { verdict: AeVerdict::EqualAe, witness: AeWitness::AgreeBeyond(bound), unit: None })
}

/// Close-almost-bijection equivalence of the generated multisets. For these discrete sets it
/// coincides with almost-equality, so this is the same decision.
pub fn cab_equivalent(r1: &GenMultiset, r2: &GenMultiset) -> Result<AeReport> {
    almost_equal(r1, r2)
}

fn decide(left: &[APPair], right: &[APPair]) -> Result<AeReport> {
    let all: Vec<&APPair> = left.iter().chain(right).collect();
    let t0 = threshold(&all);
    let equal = AeReport { verdict: AeVerdict::EqualAe, witness: AeWitness::AgreeBeyond(t0.clone()), unit: None };
    if all.is_empty() {
        return Ok(equal);
    }
    let s = scale_pairs(all.iter().copied())?;
    let sign: Vec<i32> = left.iter().map(|_| 1).chain(right.iter().map(|_| -1)).collect();
    if s.period <= BigInt::from(TABLE_LIMIT) {
        decide_table(&s, &sign, left.len(), &t0)
    } else {
        decide_structured(&s, &sign)
    }
    .map(|w| match w {
        None => equal,
        Some(w) => AeReport { verdict: AeVerdict::Differ, witness: w, unit: None },
    })
}

fn decide_table(s: &Scaled, sign: &[i32], n_left: usize, t0: &Rational) -> Result<Option<AeWitness>> {
    let diff = build_table(s, sign)?;
    let Some(r) = diff.iter().position(|c| *c != 0) else { return Ok(None) };
    let count = |range: std::ops::Range<usize>| {
        s.pairs[range].iter().filter(|(a, b)| (r as u64) % a == *b).count() as u32
    };
    let d = Rational::from(s.d.clone());
    let p = Rational::from(s.period.clone());
    // least x ≥ t0 with x·D ≡ r (mod P)
    let k = ((t0 * &d - Rational::from(BigInt::from(r))) / &p).ceil();
    let value = (Rational::from(BigInt::from(r)) + k * &p) / &d;
    Ok(Some(AeWitness::Residue {
        modulus: &p / &d,
        residue: Rational::from(BigInt::from(r)) / &d,
        left: count(0..n_left),
        right: count(n_left..s.pairs.len()),
        value,
    }))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut ps = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            ps.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    ps
}

/// Table-free comparison. The difference g of the two multiplicity functions on ℤ/P vanishes iff
/// its Fourier coefficients vanish. Those at frequencies of exact order d only see pairs with
/// d | A, and vanish iff Σ_{d|A_i} (c_i/A_i) ζ_d^{B_i} = 0 in ℚ(ζ_d), i.e. iff the primitive
/// part Σ_{e|d} μ(d/e)·e·S_e(r mod e) of the weights is identically zero.
fn decide_structured(s: &Scaled, sign: &[i32]) -> Result<Option<AeWitness>> {
    let mut ds: Vec<u64> = s.pairs.iter().flat_map(|(a, _)| divisors(*a)).collect();
    ds.sort_unstable();
    ds.dedup();
    let mut work = 0u64;
    for d in ds {
        let members: Vec<usize> = (0..s.pairs.len()).filter(|&i| s.pairs[i].0.is_multiple_of(d)).collect();
        let lcm = members.iter().try_fold(1i128, |acc, &i| {
            let a = s.pairs[i].0 as i128;
            let l = acc / acc.gcd(&a) * a;
            (l < 1 << 100).then_some(l)
        });
        let Some(lcm) = lcm else {
            return Err(Error::SizeLimit(format!("weights for divisor {d} overflow")));
        };
        let primes = prime_factors(d);
        // squarefree divisors m of d give e = d/m with sign μ(m)
        let terms: Vec<(u64, i128)> = (0..1u32 << primes.len())
            .map(|mask| {
                let m: u64 = primes.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, p)| p).product();
                (d / m, if mask.count_ones() % 2 == 0 { 1 } else { -1 })
            })
            .collect();
        work += d * terms.len() as u64;
        if work > STRUCTURED_BUDGET {
            return Err(Error::SizeLimit(format!("comparison without a table exceeds {STRUCTURED_BUDGET} steps")));
        }
        let sums: Vec<BTreeMap<u64, i128>> = terms
            .iter()
            .map(|&(e, _)| {
                let mut m = BTreeMap::new();
                for &i in &members {
                    let (a, b) = s.pairs[i];
                    *m.entry(b % e).or_insert(0) += sign[i] as i128 * (lcm / a as i128);
                }
                m
            })
            .collect();
        for r in 0..d {
            let g: i128 = terms
                .iter()
                .zip(&sums)
                .map(|(&(e, mu), m)| mu * e as i128 * m.get(&(r % e)).copied().unwrap_or(0))
                .sum();
            if g != 0 {
                return Ok(Some(AeWitness::Period { period: Rational::new(BigInt::from(d), s.d.clone()) }));
            }
        }
    }
    Ok(None)
}

/// {(ma, b + ia) : i = 0..m−1}. Offsets are chosen so that the union of the pieces generates
/// exactly the elements of `p` (piece i ≥ 1 starts one block early), so nothing is lost to
/// canonicalization.
pub fn refinement(p: &APPair, m: u32) -> Result<Vec<APPair>> {
    if m == 0 {
        return Err(Error::InvalidInput("refinement factor must be at least 1".into()));
    }
    let mr = Rational::from(BigInt::from(m));
    let raw = p.raw_offset();
    (0..m)
        .map(|i| {
            let mut off = &raw + &p.a * Rational::from(BigInt::from(i));
            if i > 0 {
                off -= &p.a * &mr;
            }
            APPair::new(&p.a * &mr, off)
        })
        .collect()
}

/// Refined pieces of members of R whose union covers the class of `target` exactly once
/// (up to finitely many elements), or None.
pub fn find_refinement_decomposition(target: &APPair, r: &GenMultiset) -> Result<Option<Vec<APPair>>> {
    let all: Vec<&APPair> = std::iter::once(target).chain(&r.pairs).collect();
    let s = scale_pairs(all.iter().copied())?;
    let (at, bt) = s.pairs[0];
    let period = s.period.to_u64().filter(|p| p / at <= 1_000_000).ok_or_else(|| {
        Error::SizeLimit(format!("target splits into more than 10^6 classes mod {}", s.period))
    })?;
    let slots = (period / at) as usize;
    // candidate pieces: refinements of members to lcm(target, member) inside the target class
    let mut pieces: Vec<(u64, u64)> = Vec::new();
    for &(a, b) in &s.pairs[1..] {
        let l = a.lcm(&at);
        for i in 0..l / a {
            let off = b + i * a;
            if off % at == bt {
                pieces.push((l, off));
            }
        }
    }
    // residue k of the target class is bt + k·at mod P
    let covers = |&(l, off): &(u64, u64)| -> Vec<usize> {
        (0..period / l).map(|t| (((off + t * l) % period - bt) / at) as usize).collect()
    };
    let cover_sets: Vec<Vec<usize>> = pieces.iter().map(covers).collect();
    let mut covered = vec![false; slots];
    let mut chosen = Vec::new();
    fn search(cover_sets: &[Vec<usize>], covered: &mut Vec<bool>, chosen: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let Some(first) = covered.iter().position(|c| !c) else { return true };
        for (j, set) in cover_sets.iter().enumerate() {
            if used[j] || !set.contains(&first) || set.iter().any(|&k| covered[k]) {
                continue;
            }
            used[j] = true;
            set.iter().for_each(|&k| covered[k] = true);
            chosen.push(j);
            if search(cover_sets, covered, chosen, used) {
                return true;
            }
            chosen.pop();
            set.iter().for_each(|&k| covered[k] = false);
            used[j] = false;
        }
        false
    }
    let mut used = vec![false; pieces.len()];
    if !search(&cover_sets, &mut covered, &mut chosen, &mut used) {
        return Ok(None);
    }
    let d = Rational::from(s.d.clone());
    let mut out: Vec<APPair> = chosen
        .iter()
        .map(|&j| {
            let (l, off) = pieces[j];
            APPair::new(Rational::from(BigInt::from(l)) / &d, Rational::from(BigInt::from(off)) / &d).unwrap()
        })
        .collect();
    out.sort();
    Ok(Some(out))
}

/// true iff a ± 4b ∉ 4aℤ for every pair
pub fn anomaly_check(r: &GenMultiset) -> bool {
    let four = Rational::from(BigInt::from(4));
    r.pairs.iter().all(|p| {
        let m = &four * &p.a;
        [&p.a + &four * &p.b, &p.a - &four * &p.b].iter().all(|x| !(x / &m).is_integer())
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignReduction {
    /// ε_j ∈ {±1} with S({(a, b)}) =_ae S({(a_j, ε_j b_j)}), if any
    pub signs: Option<Vec<i8>>,
    /// b, b − a/2, b ± a/4 ∉ aℤ; without it a found (or missing) witness proves nothing general
    pub hypothesis_holds: bool,
}

/// Exhaustive search over the 2^k sign choices.
pub fn sign_reduction(a: &Rational, b: &Rational, r: &GenMultiset) -> Result<SignReduction> {
    if r.len() > SIGN_SEARCH_LIMIT {
        return Err(Error::SizeLimit(format!("sign search is limited to {SIGN_SEARCH_LIMIT} pairs")));
    }
    let target = GenMultiset::new(vec![APPair::new(a.clone(), b.clone())?]);
    let half = a / Rational::from(BigInt::from(2));
    let quarter = a / Rational::from(BigInt::from(4));
    let hypothesis_holds =
        [b.clone(), b - &half, b + &quarter, b - &quarter].iter().all(|x| !(x / a).is_integer());
    for mask in 0u32..1 << r.len() {
        let pairs = r
            .pairs
            .iter()
            .enumerate()
            .map(|(j, p)| if mask >> j & 1 == 1 { p.reflected() } else { p.clone() })
            .collect();
        let cand = GenMultiset { pairs, units: r.units.clone() };
        if almost_equal(&target, &cand)?.is_equal() {
            let signs = (0..r.len()).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
            return Ok(SignReduction { signs: Some(signs), hypothesis_holds });
        }
    }
    Ok(SignReduction { signs: None, hypothesis_holds })
}
