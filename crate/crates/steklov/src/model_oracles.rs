//! Exact spectra of the solvable models: the flat cylinder with a flux potential, the
//! Aharonov–Bohm disk, and surfaces whose boundary data are constant.

use serde::{Deserialize, Serialize};

use crate::boundary_model::{boundary_length, flux_alpha, SurfaceBoundary};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, two_pi, Real};
use crate::spectrum::{SpecEntry, SpectrumSeq};

/// [−L, L] × S¹ with potential β dx
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderModel<T> {
    pub l: T,
    pub beta: T,
}

/// unit disk with a pure flux β ∈ (0, 1/2] at the origin
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskFluxModel<T> {
    pub beta: T,
}

impl<T: Real> CylinderModel<T> {
    pub fn new(l: T, beta: T) -> Result<Self> {
        if !(l > T::zero()) {
            return Err(Error::InvalidInput(format!("half-length must be positive, got {}", to_f64(l))));
        }
        Ok(CylinderModel { l, beta })
    }
}

impl<T: Real> DiskFluxModel<T> {
    pub fn new(beta: T) -> Result<Self> {
        if !(beta > T::zero() && beta <= lit(0.5)) {
            return Err(Error::InvalidInput(format!("flux must lie in (0, 1/2], got {}", to_f64(beta))));
        }
        Ok(DiskFluxModel { beta })
    }
}

/// (x tanh(xL), x coth(xL)) for x > 0 without overflow
pub fn tanh_coth_pair<T: Real>(x: T, l: T) -> (T, T) {
    let y = x * l;
    // e^{−2y} − 1, accurate for small y and harmless for large y
    let em = (-(y + y)).exp_m1();
    let two = lit::<T>(2.0);
    let tanh = -em / (two + em);
    (x * tanh, x / tanh)
}

/// {|k+β| tanh(|k+β|L), |k+β| coth(|k+β|L) : |k| ≤ kmax, k+β ≠ 0}, plus {0, 1/L} when β ∈ ℤ;
/// labels are `tanh`, `coth` and `zero`, indices are k
pub fn cylinder_spectrum<T: Real>(m: &CylinderModel<T>, kmax: i64) -> SpectrumSeq<T> {
    let mut entries = Vec::new();
    for k in -kmax..=kmax {
        let x = (lit::<T>(k as f64) + m.beta).abs();
        if x == T::zero() {
            entries.push(SpecEntry { index: k, value: T::zero(), component: "zero".into() });
            entries.push(SpecEntry { index: k, value: T::one() / m.l, component: "zero".into() });
            continue;
        }
        let (t, c) = tanh_coth_pair(x, m.l);
        entries.push(SpecEntry { index: k, value: t, component: "tanh".into() });
        entries.push(SpecEntry { index: k, value: c, component: "coth".into() });
    }
    SpectrumSeq::new(entries).expect("finite values")
}

/// {|k − β| : |k| ≤ kmax}
pub fn ab_disk_spectrum<T: Real>(m: &DiskFluxModel<T>, kmax: i64) -> SpectrumSeq<T> {
    let entries = (-kmax..=kmax)
        .map(|k| SpecEntry { index: k, value: (lit::<T>(k as f64) - m.beta).abs(), component: "disk".into() })
        .collect();
    SpectrumSeq::new(entries).expect("finite values")
}

/// (k+β)² for k = −kmax..kmax, in that order
pub fn circle_laplacian_eigs<T: Real>(beta: T, kmax: i64) -> Vec<T> {
    (-kmax..=kmax).map(|k| (lit::<T>(k as f64) + beta).powi(2)).collect()
}

/// {(2π/ℓ_j)(n ± α_j) : 1 ≤ n ≤ n_max} over all components; exact up to rapidly decaying terms
/// when every component has constant g11 and h1 and no w1, q
pub fn constant_a_exact_spectrum<T: Real>(sb: &SurfaceBoundary<T>, n_max: i64) -> Result<SpectrumSeq<T>> {
    let tol = lit::<T>(1e-14);
    let mut entries = Vec::new();
    for (j, c) in sb.components.iter().enumerate() {
        if !(c.g11.is_constant(tol) && c.h1.is_constant(tol) && c.w1.is_zero() && c.q.is_zero()) {
            return Err(Error::Precondition(format!("component {j} does not have constant data")));
        }
        let d = two_pi::<T>() / boundary_length(c)?;
        let (alpha, _) = flux_alpha(c);
        for n in 1..=n_max {
            let nn = lit::<T>(n as f64);
            entries.push(SpecEntry { index: n, value: d * (nn + alpha), component: format!("{j}+") });
            entries.push(SpecEntry { index: -n, value: d * (nn - alpha), component: format!("{j}-") });
        }
    }
    SpectrumSeq::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_model::{make_flat_cylinder, BoundaryComponent};
    use std::f64::consts::PI;

    fn count(s: &SpectrumSeq<f64>, v: f64) -> usize {
        s.values().iter().filter(|x| (**x - v).abs() < 1e-12).count()
    }

    #[test]
    fn zero_flux_cylinder_extras() {
        let s = cylinder_spectrum(&CylinderModel::<f64>::new(1.0, 0.0).unwrap(), 3);
        assert_eq!(s.values()[0], 0.0);
        assert_eq!(count(&s, 1.0), 1);
        // k = ±1: tanh 1 and coth 1, each twice; reference values from the series definitions
        let tanh1 = (1.0f64.exp() - (-1.0f64).exp()) / (1.0f64.exp() + (-1.0f64).exp());
        assert!((tanh1 - 0.761594155955765).abs() < 1e-14);
        assert_eq!(count(&s, tanh1), 2);
        assert_eq!(count(&s, 1.0 / tanh1), 2);
        assert!((1.0 / tanh1 - 1.313035285499331).abs() < 1e-14);
        assert_eq!(s.len(), 14);
    }

    #[test]
    fn flux_cylinder_count_and_tail() {
        let s = cylinder_spectrum(&CylinderModel::<f64>::new(1.0, 0.3).unwrap(), 50);
        assert_eq!(s.len(), 202);
        let at15: Vec<f64> = s.entries.iter().filter(|e| e.index == 15).map(|e| e.value).collect();
        assert_eq!(at15.len(), 2);
        // the coth branch sits 2·15.3·e^{−30.6} ≈ 1.6e−12 above the ladder
        assert!(at15.iter().all(|v| (v - 15.3).abs() < 2e-12));
        // large arguments stay finite
        let big = cylinder_spectrum(&CylinderModel::<f64>::new(10.0, 0.3).unwrap(), 1000);
        assert!(big.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn cylinder_branches_bracket_ladder() {
        for (l, beta) in [(1.0, 0.3), (0.2, 0.7), (3.0, -1.25)] {
            let s = cylinder_spectrum(&CylinderModel::<f64>::new(l, beta).unwrap(), 40);
            for e in &s.entries {
                let x = (e.index as f64 + beta).abs();
                // strict while the gap is above round-off
                let visible = (-2.0 * x * l).exp() > 1e-14;
                match e.component.as_str() {
                    "tanh" => assert!(e.value <= x && (e.value < x || !visible)),
                    "coth" => assert!(e.value >= x && (e.value > x || !visible)),
                    _ => unreachable!(),
                }
                let bound = 2.0 * x * (-2.0 * x * l).exp() / (1.0 - (-2.0 * x * l).exp());
                assert!((e.value - x).abs() <= bound + 8.0 * f64::EPSILON * e.value, "{x} {l} {} {bound}", e.value);
            }
        }
    }

    #[test]
    fn disk_examples() {
        let s = ab_disk_spectrum(&DiskFluxModel::<f64>::new(0.3).unwrap(), 2);
        let want = [0.3, 0.7, 1.3, 1.7, 2.3];
        assert!(s.values().iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15));
        let half = ab_disk_spectrum(&DiskFluxModel::<f64>::new(0.5).unwrap(), 20);
        let v = half.values();
        assert_eq!(&v[..4], &[0.5, 0.5, 1.5, 1.5]);
        for x in &v[..40] {
            assert_eq!(count(&half, *x) % 2, 0);
        }
        assert!(DiskFluxModel::<f64>::new(0.0).is_err() && DiskFluxModel::<f64>::new(0.6).is_err());
    }

    #[test]
    fn circle_laplacian_examples() {
        assert_eq!(circle_laplacian_eigs::<f64>(0.0, 3)[6], 9.0);
        assert_eq!(circle_laplacian_eigs::<f64>(0.5, 0)[0], 0.25);
        assert!((circle_laplacian_eigs::<f64>(0.3, 1)[0] - 0.49).abs() < 1e-15);
    }

    #[test]
    fn constant_data_ladders() {
        let sb = SurfaceBoundary::new(vec![BoundaryComponent::constant(2.0 * PI, 0.3).unwrap()]).unwrap();
        let s = constant_a_exact_spectrum(&sb, 3).unwrap();
        let want = [0.7, 1.3, 1.7, 2.3, 2.7, 3.3];
        assert!(s.values().iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-14));

        let s = constant_a_exact_spectrum(&make_flat_cylinder(1.0, 0.0).unwrap(), 3).unwrap();
        assert_eq!(s.values(), vec![1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0, 3.0, 3.0, 3.0, 3.0]);

        let mut bent = sb.clone();
        bent.components[0].q = crate::boundary_model::PeriodicFn::constant(1.0);
        assert!(matches!(constant_a_exact_spectrum(&bent, 3), Err(Error::Precondition(_))));
    }
}
