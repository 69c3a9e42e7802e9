//! Symbol calculus on sampled branches. A symbol is kept as its restrictions to ξ = +1 and
//! ξ = −1, each sampled on a uniform grid; component j has order `lead − j`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{Grid, C};
use crate::scalar::{lit, to_f64, Real};

pub(crate) const PLUS: usize = 0;
pub(crate) const MINUS: usize = 1;

pub(crate) type Branches<T> = [Vec<C<T>>; 2];

#[derive(Clone, Debug)]
pub(crate) struct GSym<T: Real> {
    pub lead: T,
    pub comps: Vec<Branches<T>>,
}

pub(crate) fn zeros<T: Real>(m: usize) -> Vec<C<T>> {
    vec![Complex::new(T::zero(), T::zero()); m]
}

/// μ(μ−1)…(μ−k+1)
pub(crate) fn falling<T: Real>(mu: T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| acc * (mu - lit::<T>(i as f64)))
}

fn factorial<T: Real>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, i| acc * lit::<T>(i as f64))
}

/// (−i)^k / k! · ∂_ξ^k factor for a component of order μ on a branch
pub(crate) fn xi_weight<T: Real>(mu: T, k: usize, branch: usize) -> C<T> {
    let sign = if branch == MINUS && k % 2 == 1 { -T::one() } else { T::one() };
    let mi = Complex::new(T::zero(), -T::one());
    crate::grid::ipow(mi, k) * (falling(mu, k) * sign / factorial::<T>(k))
}

impl<T: Real> GSym<T> {
    pub fn zero(lead: T, depth: usize, m: usize) -> Self {
        GSym { lead, comps: (0..depth).map(|_| [zeros(m), zeros(m)]).collect() }
    }

    /// multiplication operator by f (order 0, both branches equal)
    pub fn multiplication(f: &[C<T>], depth: usize) -> Self {
        let mut s = GSym::zero(T::zero(), depth, f.len());
        s.comps[0] = [f.to_vec(), f.to_vec()];
        s
    }

    pub fn order(&self, j: usize) -> T {
        self.lead - lit::<T>(j as f64)
    }

    pub fn depth(&self) -> usize {
        self.comps.len()
    }

    fn need(&self, k: usize) -> Result<()> {
        if self.depth() < k {
            return Err(Error::TruncationDepth {
                order: format!("{}", to_f64(self.order(self.depth()))),
                have: self.depth(),
                need: k,
            });
        }
        Ok(())
    }
}

/// Σ_k (−i)^k/k! ∂_ξ^k a ∂_x^k b, truncated to `depth` components
pub(crate) fn compose<T: Real>(g: &Grid<T>, a: &GSym<T>, b: &GSym<T>, depth: usize) -> Result<GSym<T>> {
    a.need(depth)?;
    b.need(depth)?;
    let mut out = GSym::zero(a.lead + b.lead, depth, g.m);
    for j in 0..depth {
        for br in [PLUS, MINUS] {
            let bj = &b.comps[j][br];
            if bj.iter().all(|z| z.norm() == T::zero()) {
                continue;
            }
            for k in 0..depth - j {
                let dbj = g.deriv(bj, k);
                for i in 0..depth - j - k {
                    let w = xi_weight(a.order(i), k, br);
                    if w.norm() == T::zero() {
                        continue;
                    }
                    let ai = &a.comps[i][br];
                    let o = &mut out.comps[i + j + k][br];
                    for x in 0..g.m {
                        o[x] = o[x] + w * ai[x] * dbj[x];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Σ_k (−i)^k/k! ∂_ξ^k ∂_x^k ā
pub(crate) fn adjoint<T: Real>(g: &Grid<T>, a: &GSym<T>, depth: usize) -> Result<GSym<T>> {
    a.need(depth)?;
    let mut out = GSym::zero(a.lead, depth, g.m);
    for i in 0..depth {
        for br in [PLUS, MINUS] {
            let conj: Vec<C<T>> = a.comps[i][br].iter().map(|z| z.conj()).collect();
            for k in 0..depth - i {
                let w = xi_weight(a.order(i), k, br);
                if w.norm() == T::zero() {
                    continue;
                }
                let d = g.deriv(&conj, k);
                let o = &mut out.comps[i + k][br];
                for x in 0..g.m {
                    o[x] = o[x] + w * d[x];
                }
            }
        }
    }
    Ok(out)
}

/// left inverse r with r # a = 1 to the given depth
pub(crate) fn parametrix<T: Real>(g: &Grid<T>, a: &GSym<T>, depth: usize) -> Result<GSym<T>> {
    a.need(depth)?;
    for br in [PLUS, MINUS] {
        let lo = a.comps[0][br].iter().fold(T::infinity(), |m, z| m.min(z.norm()));
        let hi = a.comps[0][br].iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if !(lo > hi * lit::<T>(1e-12)) || hi == T::zero() {
            return Err(Error::NotElliptic(format!(
                "leading component vanishes on the {} branch",
                if br == PLUS { "ξ > 0" } else { "ξ < 0" }
            )));
        }
    }
    let mut r = GSym::zero(-a.lead, depth, g.m);
    let inv0: Branches<T> = [
        a.comps[0][PLUS].iter().map(|z| z.inv()).collect(),
        a.comps[0][MINUS].iter().map(|z| z.inv()).collect(),
    ];
    r.comps[0] = inv0.clone();
    // x-derivatives of a are reused at every level
    let mut da: Vec<Vec<Branches<T>>> = Vec::new();
    for j in 0..depth {
        let mut row = Vec::new();
        for k in 0..depth - j {
            row.push([g.deriv(&a.comps[j][PLUS], k), g.deriv(&a.comps[j][MINUS], k)]);
        }
        da.push(row);
    }
    for n in 1..depth {
        for br in [PLUS, MINUS] {
            let mut s = zeros::<T>(g.m);
            for i in 0..n {
                for j in 0..=n - i {
                    let k = n - i - j;
                    let w = xi_weight(r.order(i), k, br);
                    if w.norm() == T::zero() {
                        continue;
                    }
                    let ri = &r.comps[i][br];
                    let d = &da[j][k][br];
                    for x in 0..g.m {
                        s[x] = s[x] + w * ri[x] * d[x];
                    }
                }
            }
            for x in 0..g.m {
                r.comps[n][br][x] = -s[x] * inv0[br][x];
            }
        }
    }
    Ok(r)
}

/// k⁻¹ # a # k
pub(crate) fn conjugate<T: Real>(g: &Grid<T>, k: &GSym<T>, a: &GSym<T>, depth: usize) -> Result<GSym<T>> {
    let kinv = parametrix(g, k, depth)?;
    let left = compose(g, &kinv, a, depth)?;
    compose(g, &left, k, depth)
}

pub(crate) fn max_abs<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |m, z| m.max(z.norm()))
}

pub(crate) fn max_diff<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).norm()))
}
