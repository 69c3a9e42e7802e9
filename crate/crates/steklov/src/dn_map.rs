//! Full symbol of the magnetic Dirichlet-to-Neumann map on one boundary circle, its
//! eigenvalue coefficients (closed form and through the normal-form engine), and the
//! truncated eigenvalue ladders they produce.

use serde::Serialize;

use crate::boundary_model::{
    boundary_length, curvature_flux, electric_integral, flux_alpha, BoundaryComponent, SurfaceBoundary, QUAD_NODES,
};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, two_pi, Real};
use crate::spectrum::{merge_spectra, SpecEntry, SpectrumSeq};
use crate::symbol_algebra::{compose, normal_form_with, GradedSymbol, HomogComponent, NormalFormConfig};

/// agreement required between the engine and the closed forms
pub const ENGINE_TOL: f64 = 1e-9;

/// Eigenvalue coefficients b_k(±1) of one boundary circle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentCoeffs<T: Real> {
    /// (b_k(+1), b_k(−1)), k = 0, 1, …
    pub b: Vec<(T, T)>,
    pub p: i64,
    pub alpha: T,
    pub length: T,
    /// b_k with k ≥ this index come from the engine alone
    pub engine_derived_from: usize,
}

impl<T: Real> ComponentCoeffs<T> {
    pub fn b0(&self) -> T {
        self.b[0].0
    }

    pub fn b1(&self) -> (T, T) {
        self.b[1]
    }

    pub fn b2(&self) -> (T, T) {
        self.b[2]
    }
}

/// Coefficients for every component of a boundary.
pub type SteklovCoeffs<T> = Vec<ComponentCoeffs<T>>;

/// a0 = √g¹¹|ξ|, a1 = √g¹¹ h1 sgn ξ, a2 = ½ w1 ξ⁻¹ + ½ √g₁₁ q |ξ|⁻¹ (g¹¹ = 1/g₁₁)
pub fn dn_symbol<T: Real>(c: &BoundaryComponent<T>) -> Result<GradedSymbol<T>> {
    c.validate()?;
    let inv_sqrt = c.g11.map_real(QUAD_NODES, |v| T::one() / v.sqrt());
    let sqrt = c.g11.map_real(QUAD_NODES, |v| v.sqrt());
    let half = lit::<T>(0.5);
    let a1 = inv_sqrt.mul(&c.h1).trimmed(T::zero());
    let even = sqrt.mul(&c.q).scale(half);
    let odd = c.w1.scale(half);
    let comps = vec![
        HomogComponent::even(T::one(), inv_sqrt),
        HomogComponent::odd(T::zero(), a1),
        HomogComponent::new(-T::one(), even.add(&odd), even.sub(&odd)),
    ];
    let mut s = GradedSymbol::new(T::one(), comps)?;
    s.self_adjoint = true;
    if terminates(c) {
        s.known = usize::MAX;
    }
    Ok(s)
}

/// constant h1 and no w1, q: the first two terms are the whole symbol
fn terminates<T: Real>(c: &BoundaryComponent<T>) -> bool {
    let tol = lit::<T>(1e-14);
    c.h1.is_constant(tol) && c.w1.is_zero() && c.q.is_zero()
}

/// b0 = 2π/ℓ, b1(±1) = ±b0 α, b2(±1) = ±κ/4π + (1/4π)∫q dℓ
pub fn steklov_coeffs_closed<T: Real>(c: &BoundaryComponent<T>) -> Result<ComponentCoeffs<T>> {
    c.validate()?;
    let length = boundary_length(c)?;
    let (alpha, p) = flux_alpha(c);
    let b0 = two_pi::<T>() / length;
    let four_pi = two_pi::<T>() + two_pi::<T>();
    let kappa = curvature_flux(c) / four_pi;
    let elec = electric_integral(c)? / four_pi;
    Ok(ComponentCoeffs {
        b: vec![(b0, b0), (b0 * alpha, -b0 * alpha), (kappa + elec, -kappa + elec)],
        p,
        alpha,
        length,
        engine_derived_from: 3,
    })
}

/// Runs the normal-form engine on the DN symbol and checks b0, b1, b2 against the closed forms.
pub fn steklov_coeffs_via_nf<T: Real>(c: &BoundaryComponent<T>, depth: usize) -> Result<ComponentCoeffs<T>> {
    steklov_coeffs_via_nf_with(c, &NormalFormConfig { depth, ..Default::default() })
}

pub fn steklov_coeffs_via_nf_with<T: Real>(c: &BoundaryComponent<T>, cfg: &NormalFormConfig) -> Result<ComponentCoeffs<T>> {
    let closed = steklov_coeffs_closed(c)?;
    let depth = cfg.depth;
    let sym = dn_symbol(c)?;
    let known = sym.known;
    // the DN map is symmetric for √g₁₁ dx; conjugating by g₁₁^{1/4} makes it symmetric for dx
    let quarter = c.g11.map_real(QUAD_NODES, |v| v.sqrt().sqrt());
    let inv_quarter = c.g11.map_real(QUAD_NODES, |v| T::one() / v.sqrt().sqrt());
    let padded = sym.padded(depth.max(3));
    let k = padded.depth();
    let right = compose(&padded, &GradedSymbol::multiplication(inv_quarter, k), k)?;
    let mut conj = compose(&GradedSymbol::multiplication(quarter, k), &right, k)?;
    conj.components.iter_mut().for_each(|comp| {
        comp.plus = comp.plus.trimmed(T::epsilon());
        comp.minus = comp.minus.trimmed(T::epsilon());
    });
    conj.self_adjoint = true;
    conj.known = known.min(k);
    let p = cfg.p.unwrap_or(closed.p);
    let nf = normal_form_with(&conj, &NormalFormConfig { depth, grid: cfg.grid, p: Some(p) })?;

    let shift = lit::<T>((p - closed.p) as f64);
    let mut want = closed.b.clone();
    want[1] = (want[1].0 + shift * want[0].0, want[1].1 - shift * want[0].1);
    for k in 0..depth.min(3) {
        let (e, w) = (nf.b[k], want[k]);
        let d = (e.0 - w.0).abs().max((e.1 - w.1).abs());
        if d > lit::<T>(ENGINE_TOL) {
            return Err(Error::Convention(format!(
                "engine b_{k} = ({}, {}) differs from closed form ({}, {}) by {:.3e}",
                to_f64(e.0),
                to_f64(e.1),
                to_f64(w.0),
                to_f64(w.1),
                to_f64(d)
            )));
        }
    }
    Ok(ComponentCoeffs {
        b: nf.b,
        p,
        alpha: closed.alpha,
        length: closed.length,
        engine_derived_from: nf.engine_derived_from.max(3),
    })
}

/// λ_n = Σ_{k<k0} b_k(sgn n)|n|^{1−k} for n in [n_min, n_max], n ≠ 0
pub fn component_spectrum_asymptotic<T: Real>(
    b: &[(T, T)],
    n_min: i64,
    n_max: i64,
    k0: usize,
    label: &str,
) -> Result<SpectrumSeq<T>> {
    if k0 > b.len() {
        return Err(Error::TruncationDepth { order: format!("b_{}", b.len()), have: b.len(), need: k0 });
    }
    let entries = (n_min..=n_max)
        .filter(|n| *n != 0)
        .map(|n| {
            let x = lit::<T>(n.unsigned_abs() as f64);
            let value = b[..k0].iter().enumerate().rev().fold(T::zero(), |acc, (k, bk)| {
                let c = if n > 0 { bk.0 } else { bk.1 };
                acc + c * x.powi(1 - k as i32)
            });
            SpecEntry { index: n, value, component: label.to_string() }
        })
        .collect();
    SpectrumSeq::new(entries)
}

/// closed-form coefficients of every component
pub fn surface_coeffs_closed<T: Real>(sb: &SurfaceBoundary<T>) -> Result<SteklovCoeffs<T>> {
    sb.components.iter().map(steklov_coeffs_closed).collect()
}

/// merged ladders −n_max..n_max of every component, labelled by component number
pub fn surface_spectrum_asymptotic<T: Real>(coeffs: &[ComponentCoeffs<T>], n_max: i64, k0: usize) -> Result<SpectrumSeq<T>> {
    let parts = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| component_spectrum_asymptotic(&c.b, -n_max, n_max, k0, &j.to_string()))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_spectra(&parts))
}
