//! Well-conditioned polynomial bases for the solvers: Chebyshev polynomials
//! scaled to a bounded window, or Laguerre polynomials for `e^{-x}`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::measures::VectorMeasure;
use crate::poly::{roots, Poly};
use crate::sobolev::Differentiable;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Basis {
    Chebyshev { a: f64, b: f64 },
    Laguerre,
}

impl Basis {
    pub fn for_measure(vm: &VectorMeasure) -> Basis {
        if vm.is_bounded() {
            let hull = vm.continuous_hull();
            Basis::Chebyshev {
                a: hull.lo,
                b: hull.hi,
            }
        } else {
            Basis::Laguerre
        }
    }

    /// `phi_k^(order)(x)` for `k = 0..=n`.
    pub fn eval(&self, n: usize, order: usize, x: f64) -> Vec<f64> {
        // rows[j][k] = phi_k^(j)(x)
        let mut rows = vec![vec![0.0; n + 1]; order + 1];
        match *self {
            Basis::Chebyshev { a, b } => {
                let t = (2.0 * x - a - b) / (b - a);
                for j in 0..=order {
                    let (lower, upper) = rows.split_at_mut(j);
                    let cur = &mut upper[0];
                    let prev = lower.last();
                    cur[0] = if j == 0 { 1.0 } else { 0.0 };
                    if n >= 1 {
                        cur[1] = match j {
                            0 => t,
                            1 => 1.0,
                            _ => 0.0,
                        };
                    }
                    for k in 1..n {
                        let coupling = prev.map_or(0.0, |p| 2.0 * j as f64 * p[k]);
                        cur[k + 1] = 2.0 * t * cur[k] + coupling - cur[k - 1];
                    }
                }
                let scale = 2.0 / (b - a);
                let s = scale.powi(order as i32);
                rows.pop().unwrap().into_iter().map(|v| v * s).collect()
            }
            Basis::Laguerre => {
                for j in 0..=order {
                    let (lower, upper) = rows.split_at_mut(j);
                    let cur = &mut upper[0];
                    let prev = lower.last();
                    cur[0] = if j == 0 { 1.0 } else { 0.0 };
                    if n >= 1 {
                        cur[1] = match j {
                            0 => 1.0 - x,
                            1 => -1.0,
                            _ => 0.0,
                        };
                    }
                    for k in 1..n {
                        let kk = k as f64;
                        let coupling = prev.map_or(0.0, |p| j as f64 * p[k]);
                        cur[k + 1] = ((2.0 * kk + 1.0 - x) * cur[k] - coupling - kk * cur[k - 1]) / (kk + 1.0);
                    }
                }
                rows.pop().unwrap()
            }
        }
    }

    /// `phi_0, ..., phi_n` in monomial form.
    pub fn polys(&self, n: usize) -> Vec<Poly> {
        let mut out = vec![Poly::constant(1.0)];
        if n == 0 {
            return out;
        }
        match *self {
            Basis::Chebyshev { a, b } => {
                let t = Poly::new(vec![-(a + b) / (b - a), 2.0 / (b - a)]);
                let two_t = t.scale(2.0);
                out.push(t);
                for k in 1..n {
                    let next = &(&two_t * &out[k]) - &out[k - 1];
                    out.push(next);
                }
            }
            Basis::Laguerre => {
                out.push(Poly::new(vec![1.0, -1.0]));
                for k in 1..n {
                    let kk = k as f64;
                    let lin = Poly::new(vec![2.0 * kk + 1.0, -1.0]);
                    let next = (&(&lin * &out[k]) - &out[k - 1].scale(kk)).scale(1.0 / (kk + 1.0));
                    out.push(next);
                }
            }
        }
        out
    }

    /// Leading coefficient of `phi_n`.
    pub fn leading(&self, n: usize) -> f64 {
        match *self {
            Basis::Chebyshev { a, b } => {
                let s = 2.0 / (b - a);
                if n == 0 {
                    1.0
                } else {
                    2f64.powi(n as i32 - 1) * s.powi(n as i32)
                }
            }
            Basis::Laguerre => {
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                if n.is_multiple_of(2) {
                    1.0 / fact
                } else {
                    -1.0 / fact
                }
            }
        }
    }
}

impl Basis {
    /// Coordinates of `p` in `phi_0, ..., phi_deg`.
    pub fn coords_of(&self, p: &Poly) -> Vec<f64> {
        let Some(n) = p.degree() else {
            return Vec::new();
        };
        let polys = self.polys(n);
        let mut rest: Vec<f64> = p.coeffs().to_vec();
        let mut out = vec![0.0; n + 1];
        for k in (0..=n).rev() {
            let c = rest[k] / polys[k].leading();
            out[k] = c;
            for (i, &v) in polys[k].coeffs().iter().enumerate() {
                rest[i] -= c * v;
            }
        }
        out
    }
}

/// A monic degree-`n` polynomial `phi_n / lead_n + sum_{i<n} c_i phi_i`, kept in
/// basis form for accurate evaluation.
#[derive(Clone, Debug)]
pub struct BasisPoly {
    basis: Basis,
    /// Full expansion, `coeffs[n] = 1 / lead_n`.
    coeffs: Vec<f64>,
    mono: Poly,
}

impl BasisPoly {
    pub fn monic(basis: Basis, lower: &[f64]) -> BasisPoly {
        let n = lower.len();
        let mut coeffs = lower.to_vec();
        coeffs.push(1.0 / basis.leading(n));
        let polys = basis.polys(n);
        let mut acc = vec![0.0; n + 1];
        for (c, p) in coeffs.iter().zip(&polys) {
            for (i, &v) in p.coeffs().iter().enumerate() {
                acc[i] += c * v;
            }
        }
        acc[n] = 1.0;
        BasisPoly {
            basis,
            coeffs,
            mono: Poly::new(acc),
        }
    }

    pub fn to_poly(&self) -> Poly {
        self.mono.clone()
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }
}

impl Differentiable for BasisPoly {
    fn value(&self, order: usize, x: f64) -> f64 {
        let phi = self.basis.eval(self.n(), order, x);
        phi.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    fn value_scale(&self, order: usize, x: f64) -> f64 {
        let phi = self.basis.eval(self.n(), order, x);
        phi.iter().zip(&self.coeffs).map(|(a, b)| (a * b).abs()).sum()
    }

    fn degree(&self, order: usize) -> Option<usize> {
        self.n().checked_sub(order)
    }

    fn real_roots(&self, order: usize) -> Result<Vec<(f64, usize)>> {
        let d = self.mono.derivative(order);
        if d.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        if let Basis::Chebyshev { a, b } = self.basis {
            return Ok(self.chebyshev_real_roots(order, a, b));
        }
        let mut out = roots(&d)?.real();
        for (r, m) in out.iter_mut() {
            if *m == 1 {
                *r = self.polish(order, *r);
            }
        }
        Ok(out)
    }
}

/// Chebyshev coefficients of `d/dt` of `sum a_k T_k(t)`.
fn chebyshev_derivative(a: &[f64]) -> Vec<f64> {
    let m = a.len();
    if m <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; m + 1];
    for k in (1..m).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * a[k];
    }
    d[0] *= 0.5;
    d.truncate(m - 1);
    d
}

/// Real eigenvalues of the colleague matrix of `sum a_k T_k(t)`.
fn colleague_real_roots(a: &[f64]) -> Vec<f64> {
    let m = a.len() - 1;
    if m == 0 {
        return Vec::new();
    }
    let top = a[m];
    if m == 1 {
        return vec![-a[0] / top];
    }
    let mut c = DMatrix::<f64>::zeros(m, m);
    c[(0, 1)] = 1.0;
    for k in 1..m {
        c[(k, k - 1)] = 0.5;
        if k + 1 < m {
            c[(k, k + 1)] = 0.5;
        }
    }
    for j in 0..m {
        c[(m - 1, j)] -= a[j] / (2.0 * top);
    }
    c.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect()
}

impl BasisPoly {
    fn chebyshev_real_roots(&self, order: usize, a: f64, b: f64) -> Vec<(f64, usize)> {
        let mut coeffs = self.coeffs.clone();
        for _ in 0..order {
            coeffs = chebyshev_derivative(&coeffs);
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut xs: Vec<f64> = colleague_real_roots(&coeffs)
            .into_iter()
            .map(|t| self.polish(order, mid + half * t))
            .collect();
        xs.sort_by(f64::total_cmp);
        let mut out: Vec<(f64, usize)> = Vec::with_capacity(xs.len());
        for x in xs {
            match out.last_mut() {
                Some((r, m)) if (x - *r).abs() <= 1e-10 * half => *m += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

impl BasisPoly {
    /// Newton steps on `P^(order)` in basis form; the monomial roots lose
    /// digits when `P` is small on the window.
    fn polish(&self, order: usize, x0: f64) -> f64 {
        let mut x = x0;
        let mut last_step = f64::INFINITY;
        for _ in 0..12 {
            let v = self.value(order, x);
            let dv = self.value(order + 1, x);
            if v == 0.0 || dv == 0.0 || !dv.is_finite() {
                break;
            }
            let step = v / dv;
            if !(step.abs() < last_step) && last_step.is_finite() {
                break;
            }
            x -= step;
            last_step = step.abs();
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
                break;
            }
        }
        if (x - x0).abs() <= 1e-3 * (1.0 + x0.abs()) {
            x
        } else {
            x0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_match_monomial_forms() {
        for basis in [Basis::Chebyshev { a: -1.0, b: 3.0 }, Basis::Laguerre] {
            let n = 9;
            let polys = basis.polys(n);
            for order in 0..4 {
                for &x in &[-1.0, 0.3, 2.5, 4.0] {
                    let v = basis.eval(n, order, x);
                    for k in 0..=n {
                        let want = polys[k].eval_derivative(order, x);
                        assert!(
                            (v[k] - want).abs() <= 1e-11 * (1.0 + want.abs()),
                            "{basis:?} k={k} order={order} x={x}: {} vs {want}",
                            v[k]
                        );
                    }
                }
            }
            for k in 0..=n {
                assert!((polys[k].leading() - basis.leading(k)).abs() <= 1e-14 * basis.leading(k).abs());
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let basis = Basis::Chebyshev { a: -2.0, b: 0.5 };
        let p = Poly::new(vec![0.3, -1.0, 2.0, 0.0, 1.0]);
        let c = basis.coords_of(&p);
        let back = BasisPoly::monic(basis, &c[..4]).to_poly();
        for i in 0..5 {
            assert!((back.coeff(i) - p.coeff(i)).abs() < 1e-13);
        }
    }

    #[test]
    fn chebyshev_roots_match_monomial_roots() {
        let basis = Basis::Chebyshev { a: -2.0, b: 1.0 };
        let want = [-1.7, -0.4, 0.25, 0.9];
        let p = Poly::from_roots(&want);
        let c = basis.coords_of(&p);
        let bp = BasisPoly::monic(basis, &c[..4]);
        let got = bp.real_roots(0).unwrap();
        assert_eq!(got.len(), 4);
        for ((r, m), w) in got.iter().zip(want) {
            assert!((r - w).abs() < 1e-13 && *m == 1);
        }
        let crit = bp.real_roots(1).unwrap();
        let dp = p.derivative(1);
        assert_eq!(crit.len(), 3);
        assert!(crit.iter().all(|(r, _)| dp.eval(*r).abs() < 1e-12));
    }

    #[test]
    fn monic_expansion() {
        let basis = Basis::Chebyshev { a: -1.0, b: 1.0 };
        // T_2 / 2 - 1/2 T_0 = x^2 - 1
        let p = BasisPoly::monic(basis, &[-0.5, 0.0]);
        assert_eq!(p.to_poly(), Poly::new(vec![-1.0, 0.0, 1.0]));
        assert!((p.value(0, 0.5) + 0.75).abs() < 1e-15);
        assert!((p.value(1, 0.5) - 1.0).abs() < 1e-15);
    }
}
