//! Classical symbols on the punctured cotangent bundle of the circle: composition, adjoints,
//! parametrices and reduction to an x-independent normal form.

pub(crate) mod calculus;
mod normal_form;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use normal_form::{
    b2_closed_form, nf_step1, nf_step2, normal_form, normal_form_with, transported_e1, NormalFormConfig,
    NormalFormResult, Step1,
};

use crate::boundary_model::{FourierCoeffs, PeriodicFn};
use crate::error::{Error, Result};
use crate::grid::{smallest_grid, Grid};
use crate::scalar::{lit, to_f64, Real};
use calculus::{GSym, MINUS, PLUS};

/// Positively homogeneous component: plus(x)·ξ^order for ξ > 0, minus(x)·|ξ|^order for ξ < 0.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogComponent<T: Real> {
    pub order: T,
    pub plus: PeriodicFn<T>,
    pub minus: PeriodicFn<T>,
}

impl<T: Real> HomogComponent<T> {
    pub fn new(order: T, plus: PeriodicFn<T>, minus: PeriodicFn<T>) -> Self {
        HomogComponent { order, plus, minus }
    }

    pub fn zero(order: T) -> Self {
        Self::new(order, PeriodicFn::zero(), PeriodicFn::zero())
    }

    /// f(x)|ξ|^order
    pub fn even(order: T, f: PeriodicFn<T>) -> Self {
        Self::new(order, f.clone(), f)
    }

    /// f(x) sgn ξ |ξ|^order
    pub fn odd(order: T, f: PeriodicFn<T>) -> Self {
        Self::new(order, f.clone(), f.neg())
    }

    pub fn eval(&self, x: T, xi: T) -> Complex<T> {
        if xi > T::zero() {
            self.plus.eval(x) * xi.powf(self.order)
        } else {
            self.minus.eval(x) * (-xi).powf(self.order)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.plus.is_zero() && self.minus.is_zero()
    }

    fn degree(&self) -> usize {
        self.plus.degree().max(self.minus.degree())
    }
}

/// ∂_ξ of a homogeneous component
pub fn xi_derivative<T: Real>(c: &HomogComponent<T>) -> HomogComponent<T> {
    HomogComponent {
        order: c.order - T::one(),
        plus: c.plus.scale(c.order),
        minus: c.minus.scale(-c.order),
    }
}

/// Finite descending list of homogeneous components of orders m, m−1, …
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSymbol<T: Real> {
    pub m: T,
    pub components: Vec<HomogComponent<T>>,
    /// declared formally self-adjoint on L²(dx)
    pub self_adjoint: bool,
    /// number of leading components that are data; the rest are zero padding
    pub known: usize,
}

impl<T: Real> GradedSymbol<T> {
    pub fn new(m: T, components: Vec<HomogComponent<T>>) -> Result<Self> {
        for (j, c) in components.iter().enumerate() {
            let want = m - lit::<T>(j as f64);
            if (c.order - want).abs() > lit::<T>(1e-12) {
                return Err(Error::InvalidInput(format!(
                    "component {j} has order {} but {} was expected",
                    to_f64(c.order),
                    to_f64(want)
                )));
            }
        }
        let known = components.len();
        Ok(GradedSymbol { m, components, self_adjoint: false, known })
    }

    /// identity symbol to the given depth
    pub fn identity(depth: usize) -> Self {
        let mut comps = vec![HomogComponent::even(T::zero(), PeriodicFn::constant(T::one()))];
        for j in 1..depth {
            comps.push(HomogComponent::zero(-lit::<T>(j as f64)));
        }
        GradedSymbol { m: T::zero(), components: comps, self_adjoint: true, known: depth }
    }

    /// multiplication operator by f
    pub fn multiplication(f: PeriodicFn<T>, depth: usize) -> Self {
        let mut s = Self::identity(depth);
        s.components[0] = HomogComponent::even(T::zero(), f);
        s.self_adjoint = false;
        s
    }

    pub fn depth(&self) -> usize {
        self.components.len()
    }

    pub fn with_self_adjoint(mut self, flag: bool) -> Self {
        self.self_adjoint = flag;
        self
    }

    /// extend with zero components; padding is not counted as known data
    pub fn padded(&self, depth: usize) -> Self {
        let mut s = self.clone();
        while s.components.len() < depth {
            let j = s.components.len();
            s.components.push(HomogComponent::zero(self.m - lit::<T>(j as f64)));
        }
        s
    }

    pub fn truncated(&self, depth: usize) -> Self {
        let mut s = self.clone();
        s.components.truncate(depth);
        s.known = s.known.min(depth);
        s
    }

    pub fn eval(&self, x: T, xi: T) -> Complex<T> {
        self.components.iter().fold(Complex::new(T::zero(), T::zero()), |s, c| s + c.eval(x, xi))
    }

    pub(crate) fn bandwidth(&self) -> usize {
        self.components.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub(crate) fn to_grid(&self, g: &Grid<T>) -> GSym<T> {
        GSym {
            lead: self.m,
            comps: self.components.iter().map(|c| [c.plus.to_grid(g), c.minus.to_grid(g)]).collect(),
        }
    }

    pub(crate) fn from_grid(g: &Grid<T>, s: &GSym<T>, real: bool) -> Self {
        let comps = s
            .comps
            .iter()
            .enumerate()
            .map(|(j, c)| HomogComponent {
                order: s.order(j),
                plus: PeriodicFn::from_grid(g, &c[PLUS], real),
                minus: PeriodicFn::from_grid(g, &c[MINUS], real),
            })
            .collect::<Vec<_>>();
        let known = comps.len();
        GradedSymbol { m: s.lead, components: comps, self_adjoint: false, known }
    }

    /// largest coefficient difference per order against another symbol of the same leading order
    pub fn max_diff_per_order(&self, o: &Self) -> Vec<T> {
        self.components
            .iter()
            .zip(&o.components)
            .map(|(a, b)| {
                let dp = a.plus.sub(&b.plus);
                let dm = a.minus.sub(&b.minus);
                dp.coeffs().iter().chain(dm.coeffs()).fold(T::zero(), |m, z| m.max(z.norm()))
            })
            .collect()
    }
}

fn grid_for<T: Real>(syms: &[&GradedSymbol<T>], floor: usize) -> Grid<T> {
    let bw: usize = syms.iter().map(|s| s.bandwidth()).sum();
    Grid::new(smallest_grid(bw, floor))
}

/// Σ_k (−i)^k/k! ∂_ξ^k a · ∂_x^k b, collected by order and truncated to `depth` components
pub fn compose<T: Real>(a: &GradedSymbol<T>, b: &GradedSymbol<T>, depth: usize) -> Result<GradedSymbol<T>> {
    let g = grid_for(&[a, b], 64);
    let r = calculus::compose(&g, &a.to_grid(&g), &b.to_grid(&g), depth)?;
    let mut out = GradedSymbol::from_grid(&g, &r, false);
    out.known = a.known.min(b.known).min(depth);
    Ok(out)
}

/// formal adjoint on L²(dx), truncated to `depth` components
pub fn adjoint<T: Real>(a: &GradedSymbol<T>, depth: usize) -> Result<GradedSymbol<T>> {
    let g = grid_for(&[a], 64);
    let r = calculus::adjoint(&g, &a.to_grid(&g), depth)?;
    let mut out = GradedSymbol::from_grid(&g, &r, false);
    out.known = a.known.min(depth);
    Ok(out)
}

/// r with compose(r, a) = 1 to `depth` components; the leading symbol must not vanish
pub fn parametrix<T: Real>(a: &GradedSymbol<T>, depth: usize) -> Result<GradedSymbol<T>> {
    let g = grid_for(&[a], 1024);
    let r = calculus::parametrix(&g, &a.to_grid(&g), depth)?;
    let mut out = GradedSymbol::from_grid(&g, &r, false);
    out.known = a.known.min(depth);
    Ok(out)
}

/// residual of a − a* per order, measured on coefficients
pub fn self_adjoint_defect<T: Real>(a: &GradedSymbol<T>, depth: usize) -> Result<Vec<T>> {
    let adj = adjoint(a, depth)?;
    Ok(a.truncated(depth).max_diff_per_order(&adj))
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    order: f64,
    plus: FourierCoeffs,
    minus: FourierCoeffs,
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    m: f64,
    components: Vec<ComponentJson>,
}

impl<T: Real> GradedSymbol<T> {
    pub fn to_json_string(&self) -> String {
        let raw = SymbolJson {
            m: to_f64(self.m),
            components: self
                .components
                .iter()
                .map(|c| ComponentJson { order: to_f64(c.order), plus: c.plus.to_json(), minus: c.minus.to_json() })
                .collect(),
        };
        serde_json::to_string(&raw).unwrap()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: SymbolJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let comps = raw
            .components
            .iter()
            .map(|c| {
                Ok(HomogComponent {
                    order: lit(c.order),
                    plus: PeriodicFn::from_json(&c.plus, false, 0.0)?,
                    minus: PeriodicFn::from_json(&c.minus, false, 0.0)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GradedSymbol::new(lit(raw.m), comps)
    }
}

#[cfg(test)]
mod tests;
