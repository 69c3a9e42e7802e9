//! Uniform periodic grids on [0, 2π) and the spectral helpers built on them.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::{lit, two_pi, Real};

pub(crate) type C<T> = Complex<T>;

#[derive(Clone)]
pub(crate) struct Grid<T: Real> {
    pub m: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> Grid<T> {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Grid {
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    pub fn node(&self, j: usize) -> T {
        two_pi::<T>() * lit::<T>(j as f64) / lit::<T>(self.m as f64)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.m).map(|j| self.node(j)).collect()
    }

    /// signed frequency stored at slot j
    pub fn freq(&self, j: usize) -> i64 {
        if j <= self.m / 2 {
            j as i64
        } else {
            j as i64 - self.m as i64
        }
    }

    pub fn slot(&self, n: i64) -> usize {
        n.rem_euclid(self.m as i64) as usize
    }

    /// Fourier coefficients c_n (slot order) of grid values
    pub fn coeffs(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut buf = v.to_vec();
        self.fwd.process(&mut buf);
        let s = T::one() / lit::<T>(self.m as f64);
        for c in buf.iter_mut() {
            *c = *c * s;
        }
        buf
    }

    pub fn values(&self, c: &[C<T>]) -> Vec<C<T>> {
        let mut buf = c.to_vec();
        self.inv.process(&mut buf);
        buf
    }

    /// coefficients with round-off noise removed; the Nyquist slot is always dropped
    pub fn clean_coeffs(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut c = self.coeffs(v);
        chop(&mut c);
        if self.m.is_multiple_of(2) {
            c[self.m / 2] = C::new(T::zero(), T::zero());
        }
        c
    }

    pub fn deriv(&self, v: &[C<T>], k: usize) -> Vec<C<T>> {
        if k == 0 {
            return v.to_vec();
        }
        let mut c = self.clean_coeffs(v);
        for (j, cj) in c.iter_mut().enumerate() {
            let n = lit::<T>(self.freq(j) as f64);
            *cj = *cj * ipow(C::new(T::zero(), n), k);
        }
        self.values(&c)
    }

    pub fn mean(&self, v: &[C<T>]) -> C<T> {
        let mut s = C::new(T::zero(), T::zero());
        for x in v {
            s = s + *x;
        }
        s / lit::<T>(self.m as f64)
    }

    /// ∫_0^x (v − mean v) dy, which is periodic
    pub fn antideriv(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut c = self.clean_coeffs(v);
        c[0] = C::new(T::zero(), T::zero());
        for (j, cj) in c.iter_mut().enumerate() {
            let n = self.freq(j);
            if n != 0 {
                *cj = *cj / C::new(T::zero(), lit::<T>(n as f64));
            }
        }
        let mut f = self.values(&c);
        let f0 = f[0];
        for x in f.iter_mut() {
            *x = *x - f0;
        }
        f
    }

    /// evaluate the trigonometric interpolant of `v` at arbitrary points
    pub fn eval_at(&self, v: &[C<T>], points: &[T]) -> Vec<C<T>> {
        let c = self.clean_coeffs(v);
        let nmax = bandwidth(&c, self);
        points.iter().map(|&t| eval_series(&c, self, nmax, t)).collect()
    }
}

/// zero out coefficients below the round-off floor
pub(crate) fn chop<T: Real>(c: &mut [C<T>]) {
    let big = c.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let floor = big * T::epsilon() * lit::<T>(8.0);
    for z in c.iter_mut() {
        if z.norm() <= floor {
            *z = C::new(T::zero(), T::zero());
        }
    }
}

fn bandwidth<T: Real>(c: &[C<T>], g: &Grid<T>) -> i64 {
    let mut n = 0;
    for (j, z) in c.iter().enumerate() {
        if z.norm() > T::zero() {
            n = n.max(g.freq(j).abs());
        }
    }
    n
}

fn eval_series<T: Real>(c: &[C<T>], g: &Grid<T>, nmax: i64, t: T) -> C<T> {
    let w = C::new(t.cos(), t.sin());
    let mut acc = c[0];
    let mut p = C::new(T::one(), T::zero());
    for n in 1..=nmax {
        if n % 64 == 0 {
            let nt = t * lit::<T>(n as f64);
            p = C::new(nt.cos(), nt.sin());
        } else {
            p = p * w;
        }
        acc = acc + c[g.slot(n)] * p + c[g.slot(-n)] * p.conj();
    }
    acc
}

pub(crate) fn ipow<T: Real>(z: C<T>, k: usize) -> C<T> {
    let mut r = C::new(T::one(), T::zero());
    for _ in 0..k {
        r = r * z;
    }
    r
}

pub(crate) fn smallest_grid(bandwidth: usize, floor: usize) -> usize {
    let need = (4 * bandwidth + 4).max(floor).max(16);
    need.next_power_of_two()
}
