use super::{check_degree, Method, MinimalSolution};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::sobolev::SobolevNorm;

const GOLDEN_ROUNDS: usize = 30;
const GOLDEN_STEPS: usize = 60;

/// Brute force over monomial coefficients `c` of `x^n + sum c_l x^l` in
/// `[-span, span]^n`, then coordinate-wise golden-section refinement.
pub fn oracle_grid(sn: &SobolevNorm, n: usize, span: f64, steps: usize) -> Result<MinimalSolution> {
    check_degree(n)?;
    if n > 3 {
        return Err(Error::InvalidInput(format!("oracle_grid supports n <= 3, got {n}")));
    }
    if steps == 0 || !(span > 0.0) || !span.is_finite() {
        return Err(Error::InvalidInput("need steps >= 1 and a positive span".into()));
    }
    let value = |c: &[f64]| -> Result<f64> {
        let mut coeffs = c.to_vec();
        coeffs.push(1.0);
        sn.norm(&Poly::new(coeffs))
    };
    let axis = |i: usize| {
        if steps == 1 {
            0.0
        } else {
            -span + 2.0 * span * i as f64 / (steps - 1) as f64
        }
    };

    let mut best = vec![0.0; n];
    let mut best_value = f64::INFINITY;
    let mut evaluations = 0;
    let mut idx = vec![0usize; n];
    loop {
        let c: Vec<f64> = idx.iter().map(|&i| axis(i)).collect();
        let v = value(&c)?;
        evaluations += 1;
        if v < best_value {
            best_value = v;
            best = c;
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < steps {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }

    let cell = if steps > 1 { 2.0 * span / (steps - 1) as f64 } else { span };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut radius = cell;
    for _ in 0..GOLDEN_ROUNDS {
        let before = best_value;
        for k in 0..n {
            let mut probe = best.clone();
            let mut at = |x: f64| -> Result<f64> {
                probe[k] = x;
                evaluations += 1;
                value(&probe)
            };
            let (mut lo, mut hi) = (best[k] - radius, best[k] + radius);
            let mut x1 = hi - inv_phi * (hi - lo);
            let mut x2 = lo + inv_phi * (hi - lo);
            let (mut f1, mut f2) = (at(x1)?, at(x2)?);
            for _ in 0..GOLDEN_STEPS {
                if f1 <= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - inv_phi * (hi - lo);
                    f1 = at(x1)?;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + inv_phi * (hi - lo);
                    f2 = at(x2)?;
                }
            }
            let (x, f) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
            if f < best_value {
                best_value = f;
                best[k] = x;
            }
        }
        if before - best_value <= 1e-15 * best_value {
            radius *= 0.5;
            if radius < 1e-12 * span {
                break;
            }
        }
    }

    let mut coeffs = best;
    coeffs.push(1.0);
    Ok(MinimalSolution {
        poly: Poly::new(coeffs),
        norm_value: best_value,
        residual: None,
        iterations: evaluations,
        method: Method::Oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{ContinuousMeasure, DiracTerm, VectorMeasure};

    fn plain(p: f64, dirac: Vec<DiracTerm>) -> SobolevNorm {
        SobolevNorm::new(p, VectorMeasure::new(ContinuousMeasure::Lebesgue { a: -1.0, b: 1.0 }, dirac).unwrap()).unwrap()
    }

    #[test]
    fn monic_legendre() {
        let s = oracle_grid(&plain(2.0, vec![]), 2, 1.0, 21).unwrap();
        assert!((s.poly.coeff(0) + 1.0 / 3.0).abs() < 1e-6);
        assert!(s.poly.coeff(1).abs() < 1e-6);
    }

    #[test]
    fn symmetric_degree_one() {
        let s = oracle_grid(&plain(3.0, vec![]), 1, 1.0, 11).unwrap();
        assert!(s.poly.coeff(0).abs() < 1e-6);
    }

    #[test]
    fn rejects_large_degree() {
        assert!(oracle_grid(&plain(2.0, vec![]), 4, 1.0, 3).is_err());
    }
}
