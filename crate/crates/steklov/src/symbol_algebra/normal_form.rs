//! Reduction of an elliptic self-adjoint symbol on the circle to an x-independent one:
//! a diffeomorphism flattening the principal symbol, a unit-modulus conjugator fixing the
//! next order, then conjugators id + Op(c_ℓ) for each lower order.

use num_complex::Complex;

use super::calculus::{self, compose, conjugate, max_abs, max_diff, zeros, GSym, MINUS, PLUS};
use super::{GradedSymbol, HomogComponent};
use crate::boundary_model::PeriodicFn;
use crate::error::{Error, Result};
use crate::grid::{smallest_grid, Grid, C};
use crate::scalar::{lit, to_f64, two_pi, Real};

#[derive(Clone, Debug)]
pub struct NormalFormConfig {
    /// number of coefficients b_0 … b_{depth−1}
    pub depth: usize,
    /// minimum number of grid nodes
    pub grid: usize,
    /// winding of the first conjugator; `None` picks b_1(+1)/(m b_0(+1)) ∈ [0, 1)
    pub p: Option<i64>,
}

impl Default for NormalFormConfig {
    fn default() -> Self {
        NormalFormConfig { depth: 5, grid: 1024, p: None }
    }
}

#[derive(Clone, Debug)]
pub struct NormalFormResult<T: Real> {
    /// (b_k(+1), b_k(−1)) for k = 0..depth
    pub b: Vec<(T, T)>,
    /// imaginary parts left in the means; zero for self-adjoint input
    pub b_imag: Vec<(T, T)>,
    /// φ at 2πj/M for j = 0..=M
    pub phi: Vec<T>,
    pub k1: HomogComponent<T>,
    pub p: i64,
    /// first k whose value depends on zero padding of the input rather than data
    pub engine_derived_from: usize,
    /// x-dependence left in each reduced order after its conjugation
    pub residuals: Vec<T>,
}

/// Output of the flattening step.
#[derive(Clone, Debug)]
pub struct Step1<T: Real> {
    pub b0: (T, T),
    /// φ at 2πj/M for j = 0..=M
    pub phi: Vec<T>,
}

pub(super) struct Flattened<T: Real> {
    pub b0: (T, T),
    pub phi: Vec<T>,
    pub sym: GSym<T>,
}

fn real_tol<T: Real>() -> T {
    lit(1e-9)
}

/// b0 and φ′ = (b0(+1)/a0(·, +1))^{1/m} sampled on the grid
fn principal<T: Real>(g: &Grid<T>, a0: &[Vec<C<T>>; 2], m: T) -> Result<((T, T), Vec<T>)> {
    if m == T::zero() {
        return Err(Error::Precondition("leading order must be nonzero".into()));
    }
    let scale = max_abs(&a0[PLUS]);
    if scale == T::zero() {
        return Err(Error::NotElliptic("leading component is identically zero".into()));
    }
    let tol = scale * lit::<T>(1e-10);
    for br in [PLUS, MINUS] {
        if a0[br].iter().any(|z| z.im.abs() > tol) {
            return Err(Error::Precondition("leading component is not real".into()));
        }
    }
    let sign = a0[PLUS][0].re.signum();
    if a0[PLUS].iter().any(|z| !(z.re * sign > tol)) {
        return Err(Error::NotElliptic("leading component vanishes or changes sign".into()));
    }
    let eps = (a0[MINUS][0].re / a0[PLUS][0].re).signum();
    let defect = a0[PLUS].iter().zip(&a0[MINUS]).fold(T::zero(), |d, (p, q)| d.max((q.re - eps * p.re).abs()));
    if defect > tol {
        return Err(Error::Precondition(format!(
            "leading component is neither even nor odd in ξ (defect {:.3e})",
            to_f64(defect)
        )));
    }
    let inv_m = T::one() / m;
    let mean = a0[PLUS].iter().fold(T::zero(), |s, z| s + z.re.abs().powf(-inv_m)) / lit::<T>(g.m as f64);
    // (2π)^m (∫|a0|^{-1/m})^{-m} = mean^{-m}
    let b0p = sign * mean.powf(-m);
    let phi_prime = a0[PLUS].iter().map(|z| (b0p.abs() / z.re.abs()).powf(inv_m)).collect();
    Ok(((b0p, eps * b0p), phi_prime))
}

/// ψ = φ⁻¹ at the grid nodes, φ′∘ψ there, and φ at the nodes (with the endpoint 2π appended)
fn invert<T: Real>(g: &Grid<T>, phi_prime: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
    let v: Vec<C<T>> = phi_prime.iter().map(|x| Complex::new(*x, T::zero())).collect();
    let mut d = g.clean_coeffs(&v);
    let d0 = d[0].re;
    for z in d.iter_mut() {
        *z = *z / d0;
    }
    let nmax = (1..g.m as i64 / 2)
        .filter(|&n| d[g.slot(n)].norm() > T::zero() || d[g.slot(-n)].norm() > T::zero())
        .max()
        .unwrap_or(0);
    // φ(t) = t + c0 + Σ e_n e^{int}, e_n = d_n/(in)
    let mut e = zeros::<T>(g.m);
    let mut c0 = T::zero();
    for n in 1..=nmax {
        for s in [n, -n] {
            let en = d[g.slot(s)] / Complex::new(T::zero(), lit::<T>(s as f64));
            e[g.slot(s)] = en;
            c0 = c0 - en.re;
        }
    }
    let eval = |t: T| -> (T, T) {
        let w = Complex::new(t.cos(), t.sin());
        let mut p = Complex::new(T::one(), T::zero());
        let (mut f, mut fp) = (t + c0, T::one());
        for n in 1..=nmax {
            if n % 64 == 0 {
                let nt = t * lit::<T>(n as f64);
                p = Complex::new(nt.cos(), nt.sin());
            } else {
                p = p * w;
            }
            let (ep, em) = (e[g.slot(n)], e[g.slot(-n)]);
            let (dp, dm) = (d[g.slot(n)], d[g.slot(-n)]);
            f = f + (ep * p + em * p.conj()).re;
            fp = fp + (dp * p + dm * p.conj()).re;
        }
        (f, fp)
    };
    let nodes = g.nodes();
    let mut psi = Vec::with_capacity(g.m);
    let mut dpsi = Vec::with_capacity(g.m);
    for &x in &nodes {
        let mut t = x;
        let mut fp = T::one();
        for _ in 0..60 {
            let (f, dfp) = eval(t);
            fp = dfp;
            let step = (f - x) / dfp;
            t = t - step;
            if step.abs() <= T::epsilon() * lit::<T>(4.0) {
                fp = eval(t).1;
                break;
            }
        }
        psi.push(t);
        dpsi.push(fp);
    }
    let ev = g.values(&e);
    let mut phi: Vec<T> = nodes.iter().zip(&ev).map(|(t, z)| *t + c0 + z.re).collect();
    phi.push(two_pi::<T>());
    (psi, dpsi, phi)
}

/// Taylor coefficients in h of J(x+h)·G(x,x+h)^{−μ−1}, where G(x,y) = (ψ(x) − ψ(y))/(x − y),
/// from j[r] = J^{(r)}(x)
fn pushforward_weights<T: Real>(j: &[T], mu: T, deg: usize) -> Vec<T> {
    let mut fact = vec![T::one(); deg + 2];
    for r in 1..deg + 2 {
        fact[r] = fact[r - 1] * lit::<T>(r as f64);
    }
    let gser: Vec<T> = (0..=deg).map(|r| j[r] / fact[r + 1]).collect();
    let jser: Vec<T> = (0..=deg).map(|r| j[r] / fact[r]).collect();
    let pw = -mu - T::one();
    let mut gp = vec![T::zero(); deg + 1];
    gp[0] = gser[0].powf(pw);
    for n in 1..=deg {
        let mut s = T::zero();
        for k in 1..=n {
            s = s + ((pw + T::one()) * lit::<T>(k as f64) - lit::<T>(n as f64)) * gser[k] * gp[n - k];
        }
        gp[n] = s / (lit::<T>(n as f64) * gser[0]);
    }
    (0..=deg).map(|k| (0..=k).fold(T::zero(), |s, r| s + jser[r] * gp[k - r])).collect()
}

/// change of variables by φ followed by conjugation with J^{1/2}, J = (φ⁻¹)′
pub(super) fn flatten<T: Real>(g: &Grid<T>, a: &GSym<T>, depth: usize) -> Result<Flattened<T>> {
    let m = a.lead;
    let (b0, phi_prime) = principal(g, &a.comps[0], m)?;
    let (psi, dphi_at_psi, phi) = invert(g, &phi_prime);
    let jv: Vec<C<T>> = dphi_at_psi.iter().map(|d| Complex::new(T::one() / *d, T::zero())).collect();
    let jd: Vec<Vec<T>> = (0..depth).map(|r| g.deriv(&jv, r).iter().map(|z| z.re).collect()).collect();
    let pulled: Vec<[Vec<C<T>>; 2]> =
        (0..depth).map(|j| [g.eval_at(&a.comps[j][PLUS], &psi), g.eval_at(&a.comps[j][MINUS], &psi)]).collect();

    let mut moved = GSym::zero(m, depth, g.m);
    for (j, comp) in pulled.iter().enumerate() {
        let mu = a.order(j);
        let deg = depth - 1 - j;
        let wts: Vec<Vec<T>> = (0..g.m)
            .map(|x| {
                let jx: Vec<T> = (0..=deg).map(|r| jd[r][x]).collect();
                pushforward_weights(&jx, mu, deg)
            })
            .collect();
        for br in [PLUS, MINUS] {
            for k in 0..=deg {
                let w = calculus::xi_weight(mu, k, br) * calculus::falling(lit::<T>(k as f64), k);
                // xi_weight carries 1/k!, the Taylor coefficient already has it
                let o = &mut moved.comps[j + k][br];
                for x in 0..g.m {
                    o[x] = o[x] + w * comp[br][x] * wts[x][k];
                }
            }
        }
    }

    let sqrt_j: Vec<C<T>> = jv.iter().map(|z| Complex::new(z.re.sqrt(), T::zero())).collect();
    let inv_sqrt_j: Vec<C<T>> = jv.iter().map(|z| Complex::new(T::one() / z.re.sqrt(), T::zero())).collect();
    let right = compose(g, &moved, &GSym::multiplication(&inv_sqrt_j, depth), depth)?;
    let sym = compose(g, &GSym::multiplication(&sqrt_j, depth), &right, depth)?;

    let flat = max_diff(&sym.comps[0][PLUS], &vec![Complex::new(b0.0, T::zero()); g.m])
        .max(max_diff(&sym.comps[0][MINUS], &vec![Complex::new(b0.1, T::zero()); g.m]));
    if flat > b0.0.abs() * lit::<T>(1e-8) {
        return Err(Error::Precondition(format!(
            "transported principal symbol is not constant (defect {:.3e})",
            to_f64(flat)
        )));
    }
    Ok(Flattened { b0, phi, sym })
}

/// winding-adjusted b1 and the unit-modulus conjugator k1 on both branches
fn first_conjugator<T: Real>(
    g: &Grid<T>,
    a1: &[Vec<C<T>>; 2],
    b0: (T, T),
    m: T,
    p: Option<i64>,
) -> ((T, T), [Vec<C<T>>; 2], i64, (T, T)) {
    let mean_p = g.mean(&a1[PLUS]);
    let mean_m = g.mean(&a1[MINUS]);
    let p = p.unwrap_or_else(|| -(mean_p.re / (m * b0.0)).floor().to_i64().unwrap());
    let pt = lit::<T>(p as f64);
    let b1 = (m * pt * b0.0 + mean_p.re, -m * pt * b0.1 + mean_m.re);
    let nodes = g.nodes();
    let mut k1 = [zeros::<T>(g.m), zeros::<T>(g.m)];
    for (br, s, b0s, b1s) in [(PLUS, T::one(), b0.0, b1.0), (MINUS, -T::one(), b0.1, b1.1)] {
        let rate: Vec<C<T>> =
            a1[br].iter().map(|z| (Complex::new(b1s, T::zero()) - *z) / (m * s * b0s)).collect();
        let theta = g.antideriv(&rate);
        for x in 0..g.m {
            let th = theta[x] + Complex::new(pt * nodes[x], T::zero());
            // θ may carry an imaginary part when a1 is complex; exp handles both
            k1[br][x] = (Complex::new(T::zero(), T::one()) * th).exp();
        }
    }
    (b1, k1, p, (mean_p.im, mean_m.im))
}

pub(super) fn pick_grid<T: Real>(a: &GradedSymbol<T>, floor: usize) -> Grid<T> {
    Grid::new(smallest_grid(2 * a.bandwidth(), floor))
}

/// Flattening step for a principal component of order m.
pub fn nf_step1<T: Real>(a0: &HomogComponent<T>, m: T) -> Result<Step1<T>> {
    let sym = GradedSymbol::new(m, vec![HomogComponent { order: m, ..a0.clone() }])?;
    let g = pick_grid(&sym, 1024);
    let f = flatten(&g, &sym.to_grid(&g), 1)?;
    Ok(Step1 { b0: f.b0, phi: f.phi })
}

/// First conjugator and b1 for a symbol whose leading component is already x-independent.
pub fn nf_step2<T: Real>(a: &GradedSymbol<T>, p: i64) -> Result<(HomogComponent<T>, (T, T))> {
    if a.depth() < 2 {
        return Err(Error::TruncationDepth { order: format!("{}", to_f64(a.m - T::one())), have: a.depth(), need: 2 });
    }
    let lead = &a.components[0];
    let tol = lit::<T>(1e-10);
    if !lead.plus.is_constant(tol) || !lead.minus.is_constant(tol) {
        return Err(Error::Precondition("leading component depends on x".into()));
    }
    let g = pick_grid(a, 256);
    let s = a.to_grid(&g);
    let b0 = (lead.plus.mean().re, lead.minus.mean().re);
    let (b1, k1, _, _) = first_conjugator(&g, &s.comps[1], b0, a.m, Some(p));
    let comp = HomogComponent {
        order: T::zero(),
        plus: PeriodicFn::from_grid(&g, &k1[PLUS], false),
        minus: PeriodicFn::from_grid(&g, &k1[MINUS], false),
    };
    Ok((comp, b1))
}

/// Order m−1 of the flattened symbol in closed form:
/// e1 = a1(ψ, J⁻¹ξ) + (i/2) m² (J′/J) ξ⁻¹ e0, sampled at the grid nodes for ξ = ±1.
pub fn transported_e1<T: Real>(a: &GradedSymbol<T>, grid: usize) -> Result<[Vec<Complex<T>>; 2]> {
    if a.depth() < 2 {
        return Err(Error::TruncationDepth { order: format!("{}", to_f64(a.m - T::one())), have: a.depth(), need: 2 });
    }
    let g = pick_grid(a, grid);
    let s = a.to_grid(&g);
    let m = a.lead_order();
    let (b0, phi_prime) = principal(&g, &s.comps[0], m)?;
    let (psi, dphi, _) = invert(&g, &phi_prime);
    let jv: Vec<C<T>> = dphi.iter().map(|d| Complex::new(T::one() / *d, T::zero())).collect();
    let jp = g.deriv(&jv, 1);
    let mut out = [zeros::<T>(g.m), zeros::<T>(g.m)];
    for (br, sgn, b0s) in [(PLUS, T::one(), b0.0), (MINUS, -T::one(), b0.1)] {
        let a1 = g.eval_at(&s.comps[1][br], &psi);
        for x in 0..g.m {
            // a1 has order m−1: a1(ψ, J⁻¹ξ) = J^{1−m} a1(ψ, ξ)
            let moved = a1[x] * jv[x].re.powf(T::one() - m);
            let corr = Complex::new(T::zero(), lit::<T>(0.5) * m * m * jp[x].re / jv[x].re * sgn * b0s);
            out[br][x] = moved + corr;
        }
    }
    Ok(out)
}

impl<T: Real> GradedSymbol<T> {
    fn lead_order(&self) -> T {
        self.m
    }
}

/// Mean formula for b2 when the leading component is x-independent.
pub fn b2_closed_form<T: Real>(
    a0: &HomogComponent<T>,
    a1: &HomogComponent<T>,
    a2: &HomogComponent<T>,
    b1: (T, T),
    m: T,
) -> Result<(T, T)> {
    let tol = lit::<T>(1e-10);
    if !a0.plus.is_constant(tol) || !a0.minus.is_constant(tol) {
        return Err(Error::Precondition("leading component depends on x".into()));
    }
    let b0 = (a0.plus.mean().re, a0.minus.mean().re);
    if b0.0 == T::zero() || b0.1 == T::zero() {
        return Err(Error::NotElliptic("leading component vanishes".into()));
    }
    let bw = a1.plus.degree().max(a1.minus.degree()).max(a2.plus.degree()).max(a2.minus.degree());
    let g: Grid<T> = Grid::new(smallest_grid(2 * bw, 256));
    let mut out = [T::zero(); 2];
    for (idx, s, b0s, b1s, f1, f2) in [
        (0, T::one(), b0.0, b1.0, &a1.plus, &a2.plus),
        (1, -T::one(), b0.1, b1.1, &a1.minus, &a2.minus),
    ] {
        let v1 = f1.to_grid(&g);
        let v2 = f2.to_grid(&g);
        // θ′ = (b1 − a1)/(m ξ⁻¹ a0), ∂²k1/k1 = iθ″ − θ′²
        let rate: Vec<C<T>> = v1.iter().map(|z| (Complex::new(b1s, T::zero()) - *z) / (m * s * b0s)).collect();
        let drate = g.deriv(&rate, 1);
        let mut acc = Complex::new(T::zero(), T::zero());
        for x in 0..g.m {
            let k2 = Complex::new(T::zero(), T::one()) * drate[x] - rate[x] * rate[x];
            let mid = v1[x] * (Complex::new(b1s, T::zero()) - v1[x]) * ((m - T::one()) / (m * b0s));
            let last = k2 * (lit::<T>(0.5) * m * (m - T::one()) * b0s);
            acc = acc + v2[x] + mid - last;
        }
        out[idx] = (acc / lit::<T>(g.m as f64)).re;
    }
    Ok((out[0], out[1]))
}

/// Normal form with default settings and the given depth and winding.
pub fn normal_form<T: Real>(a: &GradedSymbol<T>, depth: usize, p: Option<i64>) -> Result<NormalFormResult<T>> {
    normal_form_with(a, &NormalFormConfig { depth, p, ..Default::default() })
}

pub fn normal_form_with<T: Real>(a: &GradedSymbol<T>, cfg: &NormalFormConfig) -> Result<NormalFormResult<T>> {
    let depth = cfg.depth;
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    if a.depth() < depth {
        return Err(Error::TruncationDepth {
            order: format!("{}", to_f64(a.m - lit::<T>(a.depth() as f64))),
            have: a.depth(),
            need: depth,
        });
    }
    if !a.self_adjoint {
        return Err(Error::Precondition("symbol is not marked self-adjoint".into()));
    }
    let check = a.known.min(depth).min(3);
    let defect = super::self_adjoint_defect(&a.truncated(check), check)?;
    let scale = a.components[0].plus.coeffs().iter().fold(T::one(), |s, z| s.max(z.norm()));
    if let Some((j, d)) = defect.iter().enumerate().find(|(_, d)| **d > scale * lit::<T>(1e-9)) {
        return Err(Error::SelfAdjointness(format!("order {} differs from its adjoint by {:.3e}", j, to_f64(*d))));
    }

    let g = pick_grid(a, cfg.grid);
    let m = a.m;
    let flat = flatten(&g, &a.truncated(depth).to_grid(&g), depth)?;
    let b0 = flat.b0;
    let mut b = vec![b0];
    let mut b_imag = vec![(T::zero(), T::zero())];
    let mut residuals = vec![T::zero()];
    let mut sym = flat.sym;

    let mut k1_out = HomogComponent::even(T::zero(), PeriodicFn::constant(T::one()));
    let mut p_used = cfg.p.unwrap_or(0);
    if depth >= 2 {
        let (b1, k1, p, im) = first_conjugator(&g, &sym.comps[1], b0, m, cfg.p);
        p_used = p;
        let mut kk = GSym::zero(T::zero(), depth, g.m);
        kk.comps[0] = k1.clone();
        sym = conjugate(&g, &kk, &sym, depth)?;
        b.push(b1);
        b_imag.push(im);
        residuals.push(order_residual(&sym.comps[1], b1));
        k1_out = HomogComponent {
            order: T::zero(),
            plus: PeriodicFn::from_grid(&g, &k1[PLUS], false),
            minus: PeriodicFn::from_grid(&g, &k1[MINUS], false),
        };
    }
    for l in 2..depth {
        let mp = g.mean(&sym.comps[l][PLUS]);
        let mm = g.mean(&sym.comps[l][MINUS]);
        let bl = (mp.re, mm.re);
        b.push(bl);
        b_imag.push((mp.im, mm.im));
        if l + 1 < depth {
            let mut kk = GSym::zero(T::zero(), depth, g.m);
            kk.comps[0] = [
                vec![Complex::new(T::one(), T::zero()); g.m],
                vec![Complex::new(T::one(), T::zero()); g.m],
            ];
            for (br, s, b0s, mean) in [(PLUS, T::one(), b0.0, mp), (MINUS, -T::one(), b0.1, mm)] {
                let diff: Vec<C<T>> = sym.comps[l][br].iter().map(|z| mean - *z).collect();
                let integral = g.antideriv(&diff);
                let fac = Complex::new(T::zero(), T::one() / (m * s * b0s));
                kk.comps[l - 1][br] = integral.iter().map(|z| *z * fac).collect();
            }
            sym = conjugate(&g, &kk, &sym, depth)?;
            residuals.push(order_residual(&sym.comps[l], bl));
        } else {
            residuals.push(T::zero());
        }
    }

    let engine_derived_from = a.known.min(depth);
    for (k, (ip, im)) in b_imag.iter().enumerate().take(engine_derived_from) {
        if ip.abs().max(im.abs()) > real_tol::<T>() * scale {
            return Err(Error::SelfAdjointness(format!(
                "b_{k} has imaginary part {:.3e}",
                to_f64(ip.abs().max(im.abs()))
            )));
        }
    }
    Ok(NormalFormResult { b, b_imag, phi: flat.phi, k1: k1_out, p: p_used, engine_derived_from, residuals })
}

fn order_residual<T: Real>(v: &[Vec<C<T>>; 2], b: (T, T)) -> T {
    let n = v[PLUS].len();
    max_diff(&v[PLUS], &vec![Complex::new(b.0, T::zero()); n])
        .max(max_diff(&v[MINUS], &vec![Complex::new(b.1, T::zero()); n]))
}
