//! Monic minimal polynomials: least squares for `p = 2`, quasi-Newton descent
//! for `1 < p < inf`, linear programming for `p = 1`, and a grid oracle.

mod basis;
mod descent;
mod frame;
mod least_squares;
mod lp;
mod oracle;
pub mod simplex;

use serde::{Deserialize, Serialize};

pub use basis::{Basis, BasisPoly};
pub use frame::FramePoly;
pub use descent::{solve_p, solve_p_from};
pub use least_squares::{gram_system, solve_p2};
pub use lp::solve_p1;
pub use oracle::oracle_grid;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::sobolev::{ResidualVector, SobolevNorm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gram,
    Descent,
    Lp,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Gram => "gram",
            Method::Descent => "descent",
            Method::Lp => "lp",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimalSolution {
    pub poly: Poly,
    pub norm_value: f64,
    pub residual: Option<ResidualVector>,
    pub iterations: usize,
    pub method: Method,
}

impl MinimalSolution {
    pub fn residual_max(&self) -> Option<f64> {
        self.residual.as_ref().map(|r| r.max_abs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    /// Target for the normalized residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Panels (of 4 Gauss nodes) per continuous part in the p = 1 program.
    pub lp_grid: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-9,
            max_iter: 5000,
            lp_grid: 64,
        }
    }
}

/// Picks the method from `p`.
pub fn solve(sn: &SobolevNorm, n: usize, opts: &SolverOptions) -> Result<MinimalSolution> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    sn.check_supported()?;
    let p = sn.p();
    if p == 2.0 {
        solve_p2(sn, n)
    } else if p == 1.0 {
        solve_p1(sn, n, opts.lp_grid)
    } else {
        solve_p(sn, n, opts)
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("degree must be positive".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{ContinuousMeasure, DerivativePart, DiracTerm, VectorMeasure};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn leb(a: f64, b: f64) -> ContinuousMeasure {
        ContinuousMeasure::Lebesgue { a, b }
    }

    fn example5(p: f64) -> SobolevNorm {
        let vm = VectorMeasure::new(leb(-1.0, 1.0), vec![DiracTerm::new(4.0, 1, 8.0), DiracTerm::new(2.0, 2, 6.0)]).unwrap();
        SobolevNorm::new(p, vm).unwrap()
    }

    fn rel_close(got: f64, want: f64, tol: f64) -> bool {
        (got - want).abs() <= tol * want.abs()
    }

    #[test]
    fn legendre_degree_two() {
        let sn = SobolevNorm::new(2.0, VectorMeasure::new(leb(-1.0, 1.0), vec![]).unwrap()).unwrap();
        let s = solve_p2(&sn, 2).unwrap();
        assert!((s.poly.coeff(0) + 1.0 / 3.0).abs() < 1e-14 && s.poly.coeff(1).abs() < 1e-14);
        assert!((s.norm_value - (8.0f64 / 45.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn example5_coefficients() {
        let s = solve_p2(&example5(2.0), 4).unwrap();
        let want = [8181.0 / 2695.0, -837735.0 / 39347.0, -5232.0 / 539.0, -2595.0 / 803.0, 1.0];
        for (i, w) in want.iter().enumerate() {
            assert!(rel_close(s.poly.coeff(i), *w, 1e-8), "coefficient {i}: {}", s.poly.coeff(i));
        }
        let (g, b) = gram_system(&example5(2.0), 4).unwrap();
        let c = crate::linalg::least_squares(&g, &b, 1e-15).unwrap();
        for i in 0..4 {
            assert!(rel_close(c[i], want[i], 1e-6));
        }
    }

    #[test]
    fn example6_coefficients() {
        let vm = VectorMeasure::new(
            ContinuousMeasure::LaguerreExp,
            vec![DiracTerm::new(-4.0, 1, 3.0), DiracTerm::new(0.0, 2, 8.0)],
        )
        .unwrap();
        let s = solve_p2(&SobolevNorm::new(2.0, vm).unwrap(), 4).unwrap();
        let want = [-5288.0 / 97.0, 8800.0 / 97.0, -2536.0 / 97.0, -128.0 / 97.0, 1.0];
        for (i, w) in want.iter().enumerate() {
            assert!(rel_close(s.poly.coeff(i), *w, 1e-6), "coefficient {i}: {}", s.poly.coeff(i));
        }
    }

    #[test]
    fn descent_agrees_with_oracle_at_p3() {
        let sn = SobolevNorm::new(3.0, VectorMeasure::new(leb(-1.0, 1.0), vec![]).unwrap()).unwrap();
        let d = solve_p(&sn, 2, &SolverOptions::default()).unwrap();
        let o = oracle_grid(&sn, 2, 1.0, 41).unwrap();
        for i in 0..2 {
            assert!((d.poly.coeff(i) - o.poly.coeff(i)).abs() < 1e-4);
        }
        assert!((d.norm_value - sn.norm(&d.poly).unwrap()).abs() <= 1e-12 * d.norm_value);
    }

    #[test]
    fn unique_from_random_starts() {
        let sn = example5(3.0);
        let opts = SolverOptions::default();
        let base = solve_p(&sn, 4, &opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut c: Vec<f64> = base.poly.coeffs().to_vec();
            for v in c.iter_mut().take(4) {
                *v += rng.gen_range(-3.0..3.0);
            }
            let s = solve_p_from(&sn, 4, &opts, Some(&Poly::new(c))).unwrap();
            for i in 0..4 {
                assert!((s.poly.coeff(i) - base.poly.coeff(i)).abs() <= 1e-6 * (1.0 + base.poly.coeff(i).abs()));
            }
        }
    }

    #[test]
    fn norm_is_convex_along_segments() {
        let sn = example5(1.5);
        let q = Poly::new(vec![1.0, -2.0, 0.5, 1.0]);
        let r = Poly::new(vec![-0.3, 0.7, -1.5, 1.0]);
        let (nq, nr) = (sn.norm(&q).unwrap(), sn.norm(&r).unwrap());
        for k in 0..=10 {
            let l = k as f64 / 10.0;
            let mix = &q.scale(l) + &r.scale(1.0 - l);
            assert!(sn.norm(&mix).unwrap() <= l * nq + (1.0 - l) * nr + 1e-10);
        }
    }

    #[test]
    fn imaginary_perturbation_increases_norm() {
        let sn = example5(3.0);
        let s = solve_p(&sn, 4, &SolverOptions::default()).unwrap();
        let q = crate::quadrature::composite_rule(&leb(-1.0, 1.0), 64, 16, &[]).unwrap();
        let complex_norm = |f: &dyn Fn(usize, f64) -> Complex64| -> f64 {
            let mut acc: f64 = q.nodes.iter().zip(&q.weights).map(|(&x, &w)| w * f(0, x).norm().powi(3)).sum();
            for t in sn.measure().dirac() {
                acc += t.weight * f(t.order, t.location).norm().powi(3);
            }
            acc
        };
        let p = &s.poly;
        let base = complex_norm(&|k, x| Complex64::new(p.eval_derivative(k, x), 0.0));
        for j in 0..4 {
            let m = Poly::monomial(j);
            let bumped = complex_norm(&|k, x| Complex64::new(p.eval_derivative(k, x), 1e-3 * m.eval_derivative(k, x)));
            assert!(bumped > base, "j = {j}");
        }
    }

    #[test]
    fn p1_examples() {
        let e3 = SobolevNorm::new(1.0, VectorMeasure::new(leb(-1.0, 1.0), vec![DiracTerm::new(0.0, 1, 1.0)]).unwrap()).unwrap();
        let s = solve_p1(&e3, 3, 64).unwrap();
        assert!((s.norm_value - 0.5).abs() < 2e-3);
        let e2 = SobolevNorm::new(1.0, VectorMeasure::new(leb(-2.0, 0.0), vec![DiracTerm::new(0.0, 1, 1.0)]).unwrap()).unwrap();
        let s = solve_p1(&e2, 2, 64).unwrap();
        assert!((s.norm_value - 2.0).abs() < 2e-3, "{}", s.norm_value);
        let e1 = SobolevNorm::new(
            1.0,
            VectorMeasure::with_derivative_parts(leb(-2.0, 0.0), vec![DerivativePart { order: 1, measure: leb(0.0, 1.0) }], vec![])
                .unwrap(),
        )
        .unwrap();
        let s = solve_p1(&e1, 2, 64).unwrap();
        // the family (x + 1)(x - a), 0 <= a <= 1, attains 3
        assert!((s.norm_value - 3.0).abs() < 2e-3, "{}", s.norm_value);
    }

    #[test]
    fn oracle_on_cube_example() {
        let e3 = SobolevNorm::new(1.0, VectorMeasure::new(leb(-1.0, 1.0), vec![DiracTerm::new(0.0, 1, 1.0)]).unwrap()).unwrap();
        let o = oracle_grid(&e3, 3, 2.0, 41).unwrap();
        assert!((o.norm_value - 0.5).abs() < 1e-6);
        assert!((0..3).all(|i| o.poly.coeff(i).abs() < 1e-3));
    }

    #[test]
    fn bounded_by_scaled_chebyshev() {
        let sn = example5(3.0);
        let opts = SolverOptions::default();
        // rho = (x - 4)^2 (x - 2)^3 kills the Dirac terms; T_k monic on [-1, 1]
        let rho = Poly::from_roots(&[4.0, 4.0, 2.0, 2.0, 2.0]);
        for n in [6usize, 10, 16] {
            let k = n - 5;
            let t = crate::poly::monic_chebyshev(-1.0, 1.0, k).unwrap();
            let bound = sn.norm(&(&rho * &t)).unwrap();
            let s = solve_p(&sn, n, &opts).unwrap();
            assert!(s.norm_value <= bound + 1e-9, "n = {n}");
        }
    }
}
