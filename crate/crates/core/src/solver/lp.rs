use super::simplex::simplex_with_basis;
use super::{check_degree, Basis, BasisPoly, Method, MinimalSolution};
use crate::error::{Error, Result};
use crate::quadrature::composite_rule;
use crate::sobolev::{Differentiable, SobolevNorm};

const NODES_PER_PANEL: usize = 4;
const REFINE_ROUNDS: usize = 8;

/// A minimiser for `p = 1` from the discretised linear program
/// `min sum w_i |P^(k)(x_i)| + sum A |P^(k)(c)|`. The value is recomputed
/// with the full quadrature of the norm. The program is re-solved with panels
/// split at the kinks of the previous minimiser while that lowers the value.
pub fn solve_p1(sn: &SobolevNorm, n: usize, grid: usize) -> Result<MinimalSolution> {
    check_degree(n)?;
    if sn.p() != 1.0 {
        return Err(Error::InvalidInput(format!("solve_p1 needs p = 1, got {}", sn.p())));
    }
    if grid == 0 {
        return Err(Error::InvalidInput("grid must be positive".into()));
    }
    sn.check_supported()?;
    let basis = Basis::for_measure(sn.measure());
    let first = lp_round(sn, n, grid, basis, None)?;
    let mut pivots = first.1;
    let mut best_value = sn.norm_pow_of(&first.0)?;
    let mut best = first.0;
    let mut current = best.clone();
    let mut last_value = best_value;
    for _ in 0..REFINE_ROUNDS {
        let next = lp_round(sn, n, grid, basis, Some(&current))?;
        pivots += next.1;
        let value = sn.norm_pow_of(&next.0)?;
        if value < best_value {
            best = next.0.clone();
            best_value = value;
        }
        let settled = (last_value - value).abs() <= 1e-15 * value;
        current = next.0;
        last_value = value;
        if settled {
            break;
        }
    }
    Ok(MinimalSolution {
        poly: best.to_poly(),
        norm_value: best_value,
        residual: None,
        iterations: pivots,
        method: Method::Lp,
    })
}

/// One linear program; with `previous`, every panel is also split at the
/// kinks of that iterate.
fn lp_round(sn: &SobolevNorm, n: usize, grid: usize, basis: Basis, previous: Option<&BasisPoly>) -> Result<(BasisPoly, usize)> {
    let vm = sn.measure();
    let lead = 1.0 / basis.leading(n);

    // (derivative values of phi_0..phi_n, weight)
    let mut samples: Vec<(Vec<f64>, f64)> = Vec::new();
    for (order, measure) in vm.continuous_parts() {
        if order > n {
            continue;
        }
        let support = measure.support();
        let breaks: Vec<f64> = match previous {
            Some(bp) if order < n => bp
                .real_roots(order)?
                .into_iter()
                .map(|(r, _)| r)
                .filter(|&r| support.lo < r && r < support.hi)
                .collect(),
            _ => Vec::new(),
        };
        let q = composite_rule(&measure, grid, NODES_PER_PANEL, &breaks)?;
        for (&x, &w) in q.nodes.iter().zip(&q.weights) {
            samples.push((basis.eval(n, order, x), w));
        }
    }
    for t in vm.dirac() {
        if t.order <= n {
            samples.push((basis.eval(n, t.order, t.location), t.weight));
        }
    }

    // columns: c+ (n), c- (n), u (m), v (m); row i: a.c - u_i + v_i = -lead phi_n
    let m = samples.len();
    let cols = 2 * n + 2 * m;
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut basis_cols = Vec::with_capacity(m);
    let mut cost = vec![0.0; cols];
    for (i, (phi, w)) in samples.iter().enumerate() {
        let rhs = -lead * phi[n];
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols];
        for j in 0..n {
            row[j] = sign * phi[j];
            row[n + j] = -sign * phi[j];
        }
        row[2 * n + i] = -sign;
        row[2 * n + m + i] = sign;
        basis_cols.push(if sign > 0.0 { 2 * n + m + i } else { 2 * n + i });
        cost[2 * n + i] = *w;
        cost[2 * n + m + i] = *w;
        a.push(row);
        b.push(sign * rhs);
    }
    let sol = simplex_with_basis(&a, &b, &cost, basis_cols)?;
    let c: Vec<f64> = (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect();
    Ok((BasisPoly::monic(basis, &c), sol.pivots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{ContinuousMeasure, DiracTerm, VectorMeasure};

    fn norm(a: f64, b: f64, dirac: Vec<DiracTerm>) -> SobolevNorm {
        SobolevNorm::new(1.0, VectorMeasure::new(ContinuousMeasure::Lebesgue { a, b }, dirac).unwrap()).unwrap()
    }

    #[test]
    fn plain_l1_degree_two() {
        // the monic L1 minimiser on [-1, 1] is the Chebyshev U_2 / 4 = x^2 - 1/4, norm 1/2
        let s = solve_p1(&norm(-1.0, 1.0, vec![]), 2, 64).unwrap();
        assert!((s.norm_value - 0.5).abs() < 1e-12, "{}", s.norm_value);
        assert!((s.poly.coeff(0) + 0.25).abs() < 1e-8 && s.poly.coeff(1).abs() < 1e-8);
    }

    #[test]
    fn cube_with_derivative_mass() {
        let s = solve_p1(&norm(-1.0, 1.0, vec![DiracTerm::new(0.0, 1, 1.0)]), 3, 64).unwrap();
        assert!((s.norm_value - 0.5).abs() < 2e-3);
        assert!((0..3).all(|i| s.poly.coeff(i).abs() <= 0.05));
    }

    #[test]
    fn rejects_other_exponents() {
        assert!(solve_p1(&SobolevNorm::new(2.0, norm(-1.0, 1.0, vec![]).measure().clone()).unwrap(), 2, 8).is_err());
    }
}
