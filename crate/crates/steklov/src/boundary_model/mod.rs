//! Boundary jet data of a surface, one circle at a time, in a chart proportional to arc length.

mod periodic;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use periodic::{FourierCoeffs, PeriodicFn};

use crate::error::{Error, Result};
use crate::grid::{smallest_grid, Grid};
use crate::scalar::{lit, to_f64, two_pi, Real};

/// default node count for quadrature and square roots
pub const QUAD_NODES: usize = 4096;

/// One boundary circle. The magnetic data enter through their real representatives:
/// tangential potential i·h1 and its normal derivative i·w1.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryComponent<T: Real> {
    pub g11: PeriodicFn<T>,
    pub h1: PeriodicFn<T>,
    pub w1: PeriodicFn<T>,
    pub q: PeriodicFn<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceBoundary<T: Real> {
    pub components: Vec<BoundaryComponent<T>>,
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl<T: Real> BoundaryComponent<T> {
    pub fn new(g11: PeriodicFn<T>, h1: PeriodicFn<T>, w1: PeriodicFn<T>, q: PeriodicFn<T>) -> Result<Self> {
        let c = BoundaryComponent { g11, h1, w1, q };
        c.validate()?;
        Ok(c)
    }

    /// constant data: g11 = (ℓ/2π)², h1 ≡ flux, no field, no electric potential
    pub fn constant(length: T, flux: T) -> Result<Self> {
        let s = length / two_pi::<T>();
        Self::new(
            PeriodicFn::constant(s * s),
            PeriodicFn::constant(flux),
            PeriodicFn::zero(),
            PeriodicFn::zero(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, f) in [("g11", &self.g11), ("h1", &self.h1), ("w1", &self.w1), ("q", &self.q)] {
            if !f.is_real() {
                return Err(Error::InvalidInput(format!("{name} must be real-valued")));
            }
        }
        let (lo, _) = self.g11.range_on_grid(QUAD_NODES);
        if !(lo > T::zero()) {
            return Err(Error::InvalidGeometry(format!("g11 is not positive (min {})", to_f64(lo))));
        }
        Ok(())
    }

    /// same component with the magnetic data negated
    pub fn negated_field(&self) -> Self {
        BoundaryComponent { g11: self.g11.clone(), h1: self.h1.neg(), w1: self.w1.neg(), q: self.q.clone() }
    }

    /// largest Fourier degree among the four functions
    pub fn bandwidth(&self) -> usize {
        [&self.g11, &self.h1, &self.w1, &self.q].iter().map(|f| f.degree()).max().unwrap()
    }
}

/// ∫_0^{2π} √g11 dx
pub fn boundary_length<T: Real>(c: &BoundaryComponent<T>) -> Result<T> {
    let g = Grid::new(smallest_grid(c.g11.degree(), QUAD_NODES));
    let v = c.g11.to_grid(&g);
    let mut s = T::zero();
    for z in &v {
        if !(z.re > T::zero()) {
            return Err(Error::InvalidGeometry(format!("g11 is not positive (value {})", to_f64(z.re))));
        }
        s = s + z.re.sqrt();
    }
    Ok(s * two_pi::<T>() / lit::<T>(g.m as f64))
}

/// (α, p) with α = p + mean(h1) ∈ [0, 1)
pub fn flux_alpha<T: Real>(c: &BoundaryComponent<T>) -> (T, i64) {
    canonical_flux(c.h1.mean().re)
}

pub(crate) fn canonical_flux<T: Real>(v: T) -> (T, i64) {
    let p = -v.floor();
    let mut alpha = v + p;
    let mut p = p.to_i64().unwrap();
    if alpha >= T::one() {
        alpha = alpha - T::one();
        p -= 1;
    }
    if alpha < T::zero() {
        alpha = alpha + T::one();
        p += 1;
    }
    (alpha, p)
}

/// ∫_0^{2π} w1 dx, signed so that the (+1) branch of the order −1 coefficient is κ/4π + (1/4π)∫q
pub fn curvature_flux<T: Real>(c: &BoundaryComponent<T>) -> T {
    c.w1.integral().re
}

/// ∫ q dℓ = ∫_0^{2π} q √g11 dx
pub fn electric_integral<T: Real>(c: &BoundaryComponent<T>) -> Result<T> {
    let g = Grid::new(smallest_grid(c.g11.degree().max(c.q.degree()), QUAD_NODES));
    let gv = c.g11.to_grid(&g);
    let qv = c.q.to_grid(&g);
    let mut s = T::zero();
    for (a, b) in gv.iter().zip(&qv) {
        if !(a.re > T::zero()) {
            return Err(Error::InvalidGeometry(format!("g11 is not positive (value {})", to_f64(a.re))));
        }
        s = s + a.re.sqrt() * b.re;
    }
    Ok(s * two_pi::<T>() / lit::<T>(g.m as f64))
}

/// two unit circles bounding [−L, L] × S¹ with potential β dx on both ends
pub fn make_flat_cylinder<T: Real>(l: T, beta: T) -> Result<SurfaceBoundary<T>> {
    if !(l > T::zero()) {
        return Err(Error::InvalidInput(format!("half-length must be positive, got {}", to_f64(l))));
    }
    let comp = BoundaryComponent::constant(two_pi::<T>(), beta)?;
    let mut meta = BTreeMap::new();
    meta.insert("model".into(), serde_json::json!("cylinder"));
    meta.insert("L".into(), serde_json::json!(to_f64(l)));
    meta.insert("beta".into(), serde_json::json!(to_f64(beta)));
    Ok(SurfaceBoundary { components: vec![comp.clone(), comp], meta })
}

impl<T: Real> SurfaceBoundary<T> {
    pub fn new(components: Vec<BoundaryComponent<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("a boundary needs at least one component".into()));
        }
        Ok(SurfaceBoundary { components, meta: BTreeMap::new() })
    }

    pub fn total_length(&self) -> Result<T> {
        self.components.iter().try_fold(T::zero(), |s, c| Ok(s + boundary_length(c)?))
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    g11: FourierCoeffs,
    h1: FourierCoeffs,
    w1: FourierCoeffs,
    q: FourierCoeffs,
}

#[derive(Serialize, Deserialize)]
struct BoundaryJson {
    components: Vec<ComponentJson>,
    #[serde(default)]
    meta: BTreeMap<String, serde_json::Value>,
}

/// tolerance on conjugate symmetry when loading boundary files
pub const SYMMETRY_TOL: f64 = 1e-12;

impl<T: Real> SurfaceBoundary<T> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: BoundaryJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut comps = Vec::new();
        for (j, c) in raw.components.iter().enumerate() {
            let load = |name: &str, f: &FourierCoeffs| {
                PeriodicFn::from_json(f, true, SYMMETRY_TOL)
                    .map_err(|e| Error::Parse(format!("component {j}, {name}: {e}")))
            };
            comps.push(BoundaryComponent::new(
                load("g11", &c.g11)?,
                load("h1", &c.h1)?,
                load("w1", &c.w1)?,
                load("q", &c.q)?,
            )?);
        }
        let mut b = SurfaceBoundary::new(comps)?;
        b.meta = raw.meta;
        Ok(b)
    }

    pub fn to_json_string(&self) -> String {
        let raw = BoundaryJson {
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    g11: c.g11.to_json(),
                    h1: c.h1.to_json(),
                    w1: c.w1.to_json(),
                    q: c.q.to_json(),
                })
                .collect(),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&raw).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(g11: PeriodicFn<f64>, h1: PeriodicFn<f64>, w1: PeriodicFn<f64>, q: PeriodicFn<f64>) -> BoundaryComponent<f64> {
        BoundaryComponent::new(g11, h1, w1, q).unwrap()
    }

    fn zero() -> PeriodicFn<f64> {
        PeriodicFn::zero()
    }

    // independent trapezoid rule on pointwise evaluation
    fn trapezoid(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = std::f64::consts::TAU / n as f64;
        (0..n).map(|j| f(j as f64 * h)).sum::<f64>() * h
    }

    #[test]
    fn length_of_unit_and_scaled_circles() {
        let c = comp(PeriodicFn::constant(1.0), zero(), zero(), zero());
        assert!((boundary_length(&c).unwrap() - std::f64::consts::TAU).abs() < 1e-13);
        let l = 3.7;
        let s = l / std::f64::consts::TAU;
        let c = comp(PeriodicFn::constant(s * s), zero(), zero(), zero());
        assert!((boundary_length(&c).unwrap() - l).abs() < 1e-13);
    }

    #[test]
    fn length_of_wobbly_circle() {
        // (1 + cos x / 2)^2 = 9/8 + cos x + cos 2x / 8
        let g = PeriodicFn::trig(9.0 / 8.0, &[1.0, 0.125], &[]);
        let c = comp(g.clone(), zero(), zero(), zero());
        let oracle = trapezoid(|x| g.eval_real(x).sqrt(), 10_000);
        assert!((boundary_length(&c).unwrap() - oracle).abs() < 1e-11);
        assert!((oracle - std::f64::consts::TAU).abs() < 1e-11);
    }

    #[test]
    fn flux_canonicalization() {
        let mk = |v: f64| comp(PeriodicFn::constant(1.0), PeriodicFn::constant(v), zero(), zero());
        assert_eq!(flux_alpha(&mk(0.0)), (0.0, 0));
        let (a, p) = flux_alpha(&mk(0.3));
        assert!((a - 0.3).abs() < 1e-15 && p == 0);
        let (a, p) = flux_alpha(&mk(-1.7));
        // the only p in a window with p + (-1.7) in [0, 1)
        let brute: Vec<i64> = (-5..=5).filter(|p| (0.0..1.0).contains(&(*p as f64 - 1.7))).collect();
        assert_eq!(brute, vec![p]);
        assert!((a - 0.3).abs() < 1e-12);
    }

    #[test]
    fn curvature_and_electric_integrals() {
        let c = comp(PeriodicFn::constant(1.0), zero(), PeriodicFn::constant(1.0 / std::f64::consts::TAU), zero());
        assert!((curvature_flux(&c) - 1.0).abs() < 1e-14);
        let c = comp(PeriodicFn::constant(1.0), zero(), PeriodicFn::trig(0.0, &[1.0], &[]), zero());
        assert!(curvature_flux(&c).abs() < 1e-15);

        let c = comp(PeriodicFn::constant(1.0), zero(), zero(), PeriodicFn::constant(1.0));
        assert!((electric_integral(&c).unwrap() - std::f64::consts::TAU).abs() < 1e-13);

        let g = PeriodicFn::trig(9.0 / 8.0, &[1.0, 0.125], &[]);
        let q = PeriodicFn::trig(1.0, &[1.0], &[]);
        let c = comp(g.clone(), zero(), zero(), q.clone());
        let oracle = trapezoid(|x| q.eval_real(x) * g.eval_real(x).sqrt(), 10_000);
        assert!((electric_integral(&c).unwrap() - oracle).abs() < 1e-11);
    }

    #[test]
    fn cylinder_components() {
        let b = make_flat_cylinder(1.0f64, 0.3).unwrap();
        assert_eq!(b.components.len(), 2);
        for c in &b.components {
            assert!((c.h1.mean().re - 0.3).abs() < 1e-15);
        }
        let b = make_flat_cylinder(2.0f64, -0.25).unwrap();
        for c in &b.components {
            let (a, p) = flux_alpha(c);
            assert!((a - 0.75).abs() < 1e-15);
            assert_eq!(p, 1);
        }
        assert!(make_flat_cylinder(0.0, 0.3).is_err());
    }

    #[test]
    fn rejects_nonpositive_metric() {
        let g = PeriodicFn::trig(0.5, &[1.0], &[]);
        assert!(matches!(
            BoundaryComponent::new(g, zero(), zero(), zero()),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn json_round_trip_and_symmetry_check() {
        let g = PeriodicFn::trig(1.2, &[0.1], &[0.05]);
        let c = comp(g, PeriodicFn::trig(0.3, &[], &[0.2]), zero(), PeriodicFn::constant(0.5));
        let b = SurfaceBoundary::new(vec![c]).unwrap();
        let s = b.to_json_string();
        let back = SurfaceBoundary::<f64>::from_json_str(&s).unwrap();
        assert_eq!(back.components[0].g11.coeffs().len(), b.components[0].g11.coeffs().len());
        let bad = r#"{"components":[{"g11":{"re":[0.1,1,0.2],"im":[0,0,0]},"h1":{"re":[0],"im":[0]},"w1":{"re":[0],"im":[0]},"q":{"re":[0],"im":[0]}}],"meta":{}}"#;
        assert!(matches!(SurfaceBoundary::<f64>::from_json_str(bad), Err(Error::Parse(_))));
    }
}
