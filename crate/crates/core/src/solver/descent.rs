use nalgebra::{DMatrix, DVector};

use super::least_squares::least_squares_system;
use super::frame::{Frame, FramePoly};
use super::{check_degree, Method, MinimalSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::sobolev::SobolevNorm;

/// Below this exponent the line search bisects on the directional derivative.
const NEAR_ONE: f64 = 1.2;

/// Minimises `||P||^p` over monic degree-`n` `P`, starting from the `p = 2`
/// minimiser of the same measure.
pub fn solve_p(sn: &SobolevNorm, n: usize, opts: &SolverOptions) -> Result<MinimalSolution> {
    solve_p_from(sn, n, opts, None)
}

/// As [`solve_p`] from an explicit monic starting polynomial of degree `n`.
pub fn solve_p_from(sn: &SobolevNorm, n: usize, opts: &SolverOptions, start: Option<&Poly>) -> Result<MinimalSolution> {
    check_degree(n)?;
    if sn.p() <= 1.0 {
        return Err(Error::InvalidInput(format!("descent needs p > 1, got {}", sn.p())));
    }
    sn.check_supported()?;
    let obj = Objective::new(sn, n)?;
    let y0 = match start {
        None => DVector::zeros(n),
        Some(p) => {
            if p.degree() != Some(n) || !p.is_monic() {
                return Err(Error::InvalidInput("start must be monic of degree n".into()));
            }
            obj.y_of(&obj.frame.coords_of(p))
        }
    };
    bfgs(&obj, y0, opts)
}

/// `F(y) = ||P||^p / F0` in coordinates whitened by the `p = 2` problem.
struct Objective<'a> {
    sn: &'a SobolevNorm,
    n: usize,
    frame: Frame,
    center: Vec<f64>,
    r: DMatrix<f64>,
    perm: Vec<usize>,
    mono_norms: Vec<f64>,
    f0: f64,
}

struct Eval {
    f: f64,
    g: DVector<f64>,
    residual: f64,
    point: FramePoly,
}

impl<'a> Objective<'a> {
    fn new(sn: &'a SobolevNorm, n: usize) -> Result<Objective<'a>> {
        let sys = least_squares_system(sn, n)?;
        let (qr, center) = sys.solve()?;
        // unit steps in y move P by about its own p = 2 norm
        let fit = &sys.rows * DVector::from_column_slice(&center) - DVector::from_column_slice(&sys.rhs);
        let unit = if fit.norm() > 0.0 { fit.norm() } else { 1.0 };
        let mono_norms = (0..n)
            .map(|l| sn.norm(&Poly::monomial(l)))
            .collect::<Result<Vec<_>>>()?;
        let mut obj = Objective {
            sn,
            n,
            frame: sys.frame,
            center,
            r: qr.r_block(n) / unit,
            perm: qr.permutation().to_vec(),
            mono_norms,
            f0: 1.0,
        };
        let f0 = sn.norm_pow_of(&obj.point(&DVector::zeros(n)))?;
        if !(f0 > 0.0) {
            return Err(Error::Singular("zero objective at the start".into()));
        }
        obj.f0 = f0;
        Ok(obj)
    }

    fn coords(&self, y: &DVector<f64>) -> Vec<f64> {
        let n = self.n;
        let mut z = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| self.r[(k, j)] * z[j]).sum();
            z[k] = (y[k] - s) / self.r[(k, k)];
        }
        let mut c = self.center.clone();
        for (k, &orig) in self.perm.iter().enumerate() {
            c[orig] += z[k];
        }
        c
    }

    fn y_of(&self, c: &[f64]) -> DVector<f64> {
        let n = self.n;
        let z: Vec<f64> = self.perm.iter().map(|&orig| c[orig] - self.center[orig]).collect();
        DVector::from_fn(n, |k, _| (k..n).map(|j| self.r[(k, j)] * z[j]).sum())
    }

    fn point(&self, y: &DVector<f64>) -> FramePoly {
        self.frame.point(&self.coords(y))
    }

    fn eval(&self, y: &DVector<f64>) -> Result<Eval> {
        let n = self.n;
        let p = self.sn.p();
        let point = self.point(y);
        let big_f = self.sn.norm_pow_of(&point)?;
        let functional = self.sn.pairing_functional_of(&point, n)?;
        // gradient in basis coefficients, then pulled back to frame coordinates
        let mut gc = vec![0.0; n + 1];
        let mut gu = vec![0.0; n];
        for part in &functional.parts {
            for (&x, &coef) in part.nodes.iter().zip(&part.coefs) {
                if coef == 0.0 {
                    continue;
                }
                if part.point {
                    if let Some(j) = self.frame.pin_index(x, part.order) {
                        gu[j] += coef;
                        continue;
                    }
                }
                let phi = self.frame.basis.eval(n, part.order, x);
                for (g, v) in gc.iter_mut().zip(&phi) {
                    *g += coef * v;
                }
            }
        }
        for (g, v) in gu.iter_mut().zip(self.frame.pull_back(&gc)) {
            *g += v;
        }
        let scale = big_f.powf((p - 1.0) / p);
        let residual = (0..n)
            .map(|l| functional.apply(&Poly::monomial(l)).abs() / (scale * self.mono_norms[l]))
            .fold(0.0, f64::max);
        // dF/dy = R^{-T} P^T dF/dc
        let mut w = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (0..k).map(|j| self.r[(j, k)] * w[j]).sum();
            w[k] = (p * gu[self.perm[k]] - s) / self.r[(k, k)];
        }
        Ok(Eval {
            f: big_f / self.f0,
            g: DVector::from_vec(w) / self.f0,
            residual,
            point,
        })
    }
}

fn finish(obj: &Objective, e: &Eval, iterations: usize) -> Result<MinimalSolution> {
    let residual = obj.sn.residuals_of(&e.point, obj.n)?;
    Ok(MinimalSolution {
        poly: e.point.to_poly(),
        norm_value: (e.f * obj.f0).powf(1.0 / obj.sn.p()),
        residual: Some(residual),
        iterations,
        method: Method::Descent,
    })
}

fn bfgs(obj: &Objective, y0: DVector<f64>, opts: &SolverOptions) -> Result<MinimalSolution> {
    let n = obj.n;
    let near_one = obj.sn.p() < NEAR_ONE;
    let mut y = y0;
    let mut cur = obj.eval(&y)?;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut stalls = 0;
    for iter in 0..opts.max_iter {
        if cur.residual <= opts.tol {
            return finish(obj, &cur, iter);
        }
        let mut d = -(&h * &cur.g);
        if d.dot(&cur.g) >= 0.0 {
            h = DMatrix::identity(n, n);
            fresh = true;
            d = -cur.g.clone();
        }
        match line_search(obj, &y, &cur, &d, near_one)? {
            Some((alpha, next)) => {
                stalls = 0;
                let s = &d * alpha;
                let yk = &next.g - &cur.g;
                let sy = s.dot(&yk);
                if sy > 1e-14 * s.norm() * yk.norm() {
                    if fresh {
                        h *= sy / yk.dot(&yk);
                        fresh = false;
                    }
                    let rho = 1.0 / sy;
                    let hy = &h * &yk;
                    let yhy = yk.dot(&hy);
                    // H+ = H - rho (s hy^T + hy s^T) + (rho^2 y^T H y + rho) s s^T
                    h -= (&s * hy.transpose() + &hy * s.transpose()) * rho;
                    h += (&s * s.transpose()) * (rho * rho * yhy + rho);
                }
                y += s;
                cur = next;
            }
            None => {
                stalls += 1;
                if stalls > 2 {
                    return Err(Error::NonConvergence {
                        iterations: iter,
                        residual: cur.residual,
                        best: Box::new(cur.point.to_poly()),
                    });
                }
                h = DMatrix::identity(n, n);
                fresh = true;
            }
        }
    }
    if cur.residual <= opts.tol {
        return finish(obj, &cur, opts.max_iter);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: cur.residual,
        best: Box::new(cur.point.to_poly()),
    })
}

/// Strong Wolfe conditions by bracketing on the sign of the directional
/// derivative, which stays informative after `f` has flattened into rounding.
fn line_search(
    obj: &Objective,
    y: &DVector<f64>,
    cur: &Eval,
    d: &DVector<f64>,
    near_one: bool,
) -> Result<Option<(f64, Eval)>> {
    let gd = cur.g.dot(d);
    let slack = 1e-13 * cur.f.abs();
    let (c1, c2) = (1e-4, if near_one { 0.1 } else { 0.9 });
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut alpha = 1.0;
    let mut best: Option<(f64, Eval, f64)> = None;
    for _ in 0..80 {
        let e = obj.eval(&(y + d * alpha))?;
        let dphi = e.g.dot(d);
        if e.f > cur.f + c1 * alpha * gd + slack {
            hi = alpha;
        } else if dphi.abs() <= -c2 * gd {
            return Ok(Some((alpha, e)));
        } else {
            if dphi < 0.0 {
                lo = alpha;
            } else {
                hi = alpha;
            }
            if e.f <= cur.f + slack && dphi.abs() < -gd && best.as_ref().is_none_or(|b| dphi.abs() < b.2) {
                best = Some((alpha, e, dphi.abs()));
            }
        }
        alpha = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * alpha };
        if hi.is_finite() && hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(best.map(|(a, e, _)| (a, e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{ContinuousMeasure, DiracTerm, VectorMeasure};

    fn plain(p: f64) -> SobolevNorm {
        let vm = VectorMeasure::new(ContinuousMeasure::Lebesgue { a: -1.0, b: 1.0 }, vec![]).unwrap();
        SobolevNorm::new(p, vm).unwrap()
    }

    #[test]
    fn symmetric_degree_one() {
        let s = solve_p(&plain(4.0), 1, &SolverOptions::default()).unwrap();
        assert!(s.poly.coeff(0).abs() < 1e-9);
        assert!(s.residual_max().unwrap() <= 1e-9);
    }

    #[test]
    fn p2_start_is_already_optimal() {
        let vm = VectorMeasure::new(
            ContinuousMeasure::Lebesgue { a: -1.0, b: 1.0 },
            vec![DiracTerm::new(4.0, 1, 8.0), DiracTerm::new(2.0, 2, 6.0)],
        )
        .unwrap();
        let sn = SobolevNorm::new(2.0, vm).unwrap();
        let a = solve_p(&sn, 4, &SolverOptions::default()).unwrap();
        let b = super::super::solve_p2(&sn, 4).unwrap();
        for i in 0..4 {
            assert!((a.poly.coeff(i) - b.poly.coeff(i)).abs() <= 1e-8 * b.poly.coeff(i).abs());
        }
    }

    #[test]
    fn converges_for_several_exponents() {
        for p in [1.1, 1.5, 3.0, 6.0] {
            let s = solve_p(&plain(p), 5, &SolverOptions::default()).unwrap();
            assert!(s.residual_max().unwrap() <= 1e-9, "p = {p}");
            assert!(s.poly.coeff(0).abs() < 1e-7 && s.poly.coeff(2).abs() < 1e-7 && s.poly.coeff(4).abs() < 1e-7);
        }
    }
}
