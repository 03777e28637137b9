use nalgebra::{DMatrix, DVector};

use super::frame::Frame;
use super::{check_degree, Method, MinimalSolution};
use crate::error::{Error, Result};
use crate::linalg::PivotedQr;
use crate::measures::ContinuousMeasure;
use crate::poly::Poly;
use crate::quadrature::{gauss_laguerre, gauss_legendre, Quadrature};
use crate::sobolev::SobolevNorm;

/// `||P||_2^2` over frame coordinates `u`, written as `|| rows u - rhs ||^2`.
pub(crate) struct LeastSquares {
    pub frame: Frame,
    pub rows: DMatrix<f64>,
    pub rhs: Vec<f64>,
}

fn exact_rule(sn: &SobolevNorm, measure: &ContinuousMeasure, n: usize) -> Quadrature {
    match *measure {
        ContinuousMeasure::Lebesgue { a, b } => gauss_legendre(n + 1).mapped(a, b),
        ContinuousMeasure::LaguerreExp => (*gauss_laguerre(sn.policy().laguerre_nodes)).clone(),
    }
}

pub(crate) fn least_squares_system(sn: &SobolevNorm, n: usize) -> Result<LeastSquares> {
    let vm = sn.measure();
    let frame = Frame::new(vm, n);
    let basis = frame.basis;
    let lead = 1.0 / basis.leading(n);
    let zero_point = frame.lower(&vec![0.0; n]);
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let row_at = |order: usize, x: f64, w: f64| {
        let sw = w.sqrt();
        let phi = basis.eval(n, order, x);
        let base = lead * phi[n] + phi[..n].iter().zip(&zero_point).map(|(a, b)| a * b).sum::<f64>();
        let row: Vec<f64> = frame.pull_back(&phi).into_iter().map(|v| sw * v).collect();
        (row, -sw * base)
    };
    for (order, measure) in vm.continuous_parts() {
        if order > n {
            continue;
        }
        let q = exact_rule(sn, &measure, n);
        for (&x, &w) in q.nodes.iter().zip(&q.weights) {
            rows.push(row_at(order, x, w));
        }
    }
    for t in vm.dirac() {
        if t.order > n {
            continue;
        }
        match frame.pin_index(t.location, t.order) {
            Some(j) => {
                let mut row = vec![0.0; n];
                row[j] = t.weight.sqrt();
                rows.push((row, 0.0));
            }
            None => rows.push(row_at(t.order, t.location, t.weight)),
        }
    }
    rows.sort_by(|a, b| {
        let na = a.0.iter().fold(a.1.abs(), |m, v| m.max(v.abs()));
        let nb = b.0.iter().fold(b.1.abs(), |m, v| m.max(v.abs()));
        nb.total_cmp(&na)
    });
    let m = rows.len();
    let mut mat = DMatrix::zeros(m, n);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, r)) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            mat[(i, j)] = v;
        }
        rhs.push(r);
    }
    Ok(LeastSquares { frame, rows: mat, rhs })
}

pub(crate) const RANK_TOL: f64 = 1e-13;

impl LeastSquares {
    /// Solves the weighted problem; the rank test runs on unit-max rows so
    /// heavy Dirac rows cannot mask the continuous ones.
    pub(crate) fn solve(&self) -> Result<(PivotedQr, Vec<f64>)> {
        let mut scaled = self.rows.clone();
        for mut row in scaled.row_iter_mut() {
            let m = row.amax();
            if m > 0.0 {
                row /= m;
            }
        }
        let n = self.rows.ncols();
        let rank = PivotedQr::new(&scaled).rank(RANK_TOL);
        if rank < n {
            return Err(Error::Singular(format!("rank {rank} < {n} columns")));
        }
        let qr = PivotedQr::new(&self.rows);
        let c = qr.solve_least_squares(&self.rhs, 0.0)?;
        Ok((qr, c))
    }
}

/// Unique minimiser for `p = 2`.
pub fn solve_p2(sn: &SobolevNorm, n: usize) -> Result<MinimalSolution> {
    check_degree(n)?;
    if sn.p() != 2.0 {
        return Err(Error::InvalidInput(format!("solve_p2 needs p = 2, got {}", sn.p())));
    }
    let sys = least_squares_system(sn, n)?;
    let (_, u) = sys.solve()?;
    let bp = sys.frame.point(&u);
    let norm_value = sn.norm_pow_of(&bp)?.sqrt();
    let residual = sn.residuals_of(&bp, n)?;
    Ok(MinimalSolution {
        poly: bp.to_poly(),
        norm_value,
        residual: Some(residual),
        iterations: 1,
        method: Method::Gram,
    })
}

/// Monomial normal equations `G c = b` with `G_ij = <x^i, x^j>` and
/// `b_i = -<x^n, x^i>` in the bilinear inner product of the norm.
pub fn gram_system(sn: &SobolevNorm, n: usize) -> Result<(DMatrix<f64>, DVector<f64>)> {
    check_degree(n)?;
    let vm = sn.measure();
    let inner = |i: usize, j: usize| -> f64 {
        let (pi, pj) = (Poly::monomial(i), Poly::monomial(j));
        let mut acc = 0.0;
        for (order, measure) in vm.continuous_parts() {
            let q = exact_rule(sn, &measure, n);
            for (&x, &w) in q.nodes.iter().zip(&q.weights) {
                acc += w * pi.eval_derivative(order, x) * pj.eval_derivative(order, x);
            }
        }
        for t in vm.dirac() {
            acc += t.weight * pi.eval_derivative(t.order, t.location) * pj.eval_derivative(t.order, t.location);
        }
        acc
    };
    let g = DMatrix::from_fn(n, n, &inner);
    let b = DVector::from_fn(n, |i, _| -inner(n, i));
    Ok((g, b))
}
