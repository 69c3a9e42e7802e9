use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{smallest_grid, Grid, C};
use crate::scalar::{lit, to_f64, two_pi, Real};

/// Truncated Fourier series Σ_{|n|≤N} c_n e^{inx} on ℝ/2πℤ.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFn<T: Real> {
    /// c_{-N}, …, c_N
    coeffs: Vec<Complex<T>>,
    real: bool,
}

/// JSON form of a coefficient array, n = −N..N
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FourierCoeffs {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl<T: Real> PeriodicFn<T> {
    pub fn from_coeffs(coeffs: Vec<Complex<T>>, real: bool) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return Err(Error::InvalidInput(format!(
                "coefficient array must have odd length 2N+1, got {}",
                coeffs.len()
            )));
        }
        let mut f = PeriodicFn { coeffs, real };
        if real {
            f.symmetrize();
        }
        Ok(f)
    }

    pub fn constant(c: T) -> Self {
        PeriodicFn { coeffs: vec![Complex::new(c, T::zero())], real: true }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// Σ c e^{inx} over the given (n, c) terms
    pub fn from_terms(terms: &[(i64, Complex<T>)], real: bool) -> Self {
        let n = terms.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); 2 * n + 1];
        for &(k, c) in terms {
            coeffs[(k + n as i64) as usize] = coeffs[(k + n as i64) as usize] + c;
        }
        let mut f = PeriodicFn { coeffs, real };
        if real {
            f.symmetrize();
        }
        f
    }

    /// real trigonometric polynomial c0 + Σ (a_n cos nx + b_n sin nx)
    pub fn trig(c0: T, cos: &[T], sin: &[T]) -> Self {
        let half = lit::<T>(0.5);
        let mut terms = vec![(0, Complex::new(c0, T::zero()))];
        for (k, &a) in cos.iter().enumerate() {
            let n = k as i64 + 1;
            terms.push((n, Complex::new(a * half, T::zero())));
            terms.push((-n, Complex::new(a * half, T::zero())));
        }
        for (k, &b) in sin.iter().enumerate() {
            let n = k as i64 + 1;
            terms.push((n, Complex::new(T::zero(), -b * half)));
            terms.push((-n, Complex::new(T::zero(), b * half)));
        }
        Self::from_terms(&terms, true)
    }

    pub fn degree(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, n: i64) -> Complex<T> {
        let d = self.degree() as i64;
        if n.abs() > d {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[(n + d) as usize]
        }
    }

    pub fn mean(&self) -> Complex<T> {
        self.coeff(0)
    }

    /// ∫_0^{2π} f dx
    pub fn integral(&self) -> Complex<T> {
        self.mean() * two_pi::<T>()
    }

    pub fn eval(&self, x: T) -> Complex<T> {
        let d = self.degree() as i64;
        let mut acc = Complex::new(T::zero(), T::zero());
        for n in -d..=d {
            let nx = x * lit::<T>(n as f64);
            acc = acc + self.coeff(n) * Complex::new(nx.cos(), nx.sin());
        }
        acc
    }

    pub fn eval_real(&self, x: T) -> T {
        self.eval(x).re
    }

    /// largest |c_{-n} − conj(c_n)|
    pub fn symmetry_defect(&self) -> T {
        let d = self.degree() as i64;
        (0..=d).fold(T::zero(), |m, n| m.max((self.coeff(-n) - self.coeff(n).conj()).norm()))
    }

    fn symmetrize(&mut self) {
        let d = self.degree() as i64;
        let half = lit::<T>(0.5);
        for n in 0..=d {
            let a = self.coeff(n);
            let b = self.coeff(-n).conj();
            let avg = (a + b) * half;
            self.coeffs[(n + d) as usize] = avg;
            self.coeffs[(d - n) as usize] = avg.conj();
        }
    }

    fn padded(&self, d: usize) -> Vec<Complex<T>> {
        let d = d.max(self.degree()) as i64;
        (-d..=d).map(|n| self.coeff(n)).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        let d = self.degree().max(o.degree());
        let c = self.padded(d).iter().zip(o.padded(d)).map(|(a, b)| *a + b).collect();
        PeriodicFn { coeffs: c, real: self.real && o.real }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        PeriodicFn { coeffs: self.coeffs.iter().map(|c| *c * s).collect(), real: self.real }
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        let real = self.real && s.im == T::zero();
        PeriodicFn { coeffs: self.coeffs.iter().map(|c| *c * s).collect(), real }
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    /// exact product by coefficient convolution
    pub fn mul(&self, o: &Self) -> Self {
        let (d1, d2) = (self.degree() as i64, o.degree() as i64);
        let d = d1 + d2;
        let mut c = vec![Complex::new(T::zero(), T::zero()); (2 * d + 1) as usize];
        for n in -d1..=d1 {
            let a = self.coeff(n);
            if a.norm() == T::zero() {
                continue;
            }
            for k in -d2..=d2 {
                c[(n + k + d) as usize] = c[(n + k + d) as usize] + a * o.coeff(k);
            }
        }
        PeriodicFn { coeffs: c, real: self.real && o.real }
    }

    /// the function x ↦ conj(f(x))
    pub fn conj(&self) -> Self {
        let d = self.degree() as i64;
        let c = (-d..=d).map(|n| self.coeff(-n).conj()).collect();
        PeriodicFn { coeffs: c, real: self.real }
    }

    pub fn derivative(&self, k: usize) -> Self {
        let d = self.degree() as i64;
        let c = (-d..=d)
            .map(|n| self.coeff(n) * crate::grid::ipow(Complex::new(T::zero(), lit::<T>(n as f64)), k))
            .collect();
        PeriodicFn { coeffs: c, real: self.real }
    }

    /// x ↦ f(x + s)
    pub fn rotate(&self, s: T) -> Self {
        let d = self.degree() as i64;
        let c = (-d..=d)
            .map(|n| {
                let ns = s * lit::<T>(n as f64);
                self.coeff(n) * Complex::new(ns.cos(), ns.sin())
            })
            .collect();
        PeriodicFn { coeffs: c, real: self.real }
    }

    /// drop trailing coefficients below `tol` times the largest one
    pub fn trimmed(&self, tol: T) -> Self {
        let big = self.coeffs.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        let d = self.degree() as i64;
        let mut keep = 0;
        for n in 0..=d {
            if self.coeff(n).norm() > tol * big || self.coeff(-n).norm() > tol * big {
                keep = n;
            }
        }
        PeriodicFn { coeffs: (-keep..=keep).map(|n| self.coeff(n)).collect(), real: self.real }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == T::zero())
    }

    /// true if all non-constant coefficients vanish up to `tol`
    pub fn is_constant(&self, tol: T) -> bool {
        let d = self.degree() as i64;
        (1..=d).all(|n| self.coeff(n).norm() <= tol && self.coeff(-n).norm() <= tol)
    }

    pub(crate) fn to_grid(&self, g: &Grid<T>) -> Vec<C<T>> {
        let mut c = vec![Complex::new(T::zero(), T::zero()); g.m];
        let d = self.degree() as i64;
        for n in -d..=d {
            c[g.slot(n)] = c[g.slot(n)] + self.coeff(n);
        }
        g.values(&c)
    }

    pub(crate) fn from_grid(g: &Grid<T>, v: &[C<T>], real: bool) -> Self {
        let c = g.clean_coeffs(v);
        let d = (g.m / 2 - 1) as i64;
        let coeffs = (-d..=d).map(|n| c[g.slot(n)]).collect();
        let mut f = PeriodicFn { coeffs, real };
        if real {
            f.symmetrize();
        }
        f.trimmed(T::zero())
    }

    /// pointwise map of a real function through an oversampled grid
    pub fn map_real(&self, nodes: usize, f: impl Fn(T) -> T) -> Self {
        let g = Grid::new(smallest_grid(self.degree(), nodes));
        let v: Vec<C<T>> = self.to_grid(&g).iter().map(|z| Complex::new(f(z.re), T::zero())).collect();
        Self::from_grid(&g, &v, true)
    }

    /// minimum and maximum of the real part on a uniform grid
    pub fn range_on_grid(&self, nodes: usize) -> (T, T) {
        let g = Grid::new(smallest_grid(self.degree(), nodes));
        self.to_grid(&g).iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), z| {
            (lo.min(z.re), hi.max(z.re))
        })
    }

    pub fn to_json(&self) -> FourierCoeffs {
        FourierCoeffs {
            re: self.coeffs.iter().map(|c| to_f64(c.re)).collect(),
            im: self.coeffs.iter().map(|c| to_f64(c.im)).collect(),
        }
    }

    /// build from JSON; with `real` the conjugate symmetry is checked to `tol`
    pub fn from_json(j: &FourierCoeffs, real: bool, tol: f64) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::Parse("re and im arrays differ in length".into()));
        }
        let coeffs: Vec<Complex<T>> =
            j.re.iter().zip(&j.im).map(|(a, b)| Complex::new(lit::<T>(*a), lit::<T>(*b))).collect();
        let raw = PeriodicFn { coeffs, real: false };
        if raw.coeffs.len() % 2 != 1 {
            return Err(Error::Parse(format!("coefficient array length {} is not odd", raw.coeffs.len())));
        }
        if real {
            let defect = to_f64(raw.symmetry_defect());
            if defect > tol {
                return Err(Error::Parse(format!(
                    "conjugate symmetry violated by {defect:.3e} (tolerance {tol:.0e})"
                )));
            }
        }
        PeriodicFn::from_coeffs(raw.coeffs, real)
    }
}
