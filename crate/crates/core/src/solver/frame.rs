//! Coordinates for monic polynomials in which the values read by the Dirac
//! terms of a norm are explicit.
//!
//! A Dirac mass far from the continuous support reads `P^(k)(c)`, which in
//! basis coordinates is a sum of terms many orders of magnitude above the
//! result. Carrying those values as coordinates of their own keeps every
//! quantity the norm sees at unit sensitivity.

use nalgebra::DMatrix;

use super::basis::{Basis, BasisPoly};
use crate::error::Result;
use crate::linalg::PivotedQr;
use crate::measures::VectorMeasure;
use crate::poly::Poly;
use crate::sobolev::Differentiable;

const PIN_RANK_TOL: f64 = 1e-10;

/// `P = phi_n / lead + sum_i c_i phi_i` with `c = offset + map u`, where the
/// last `pins.len()` entries of `u` are the pinned values `P^(k)(x)`.
#[derive(Clone, Debug)]
pub(crate) struct Frame {
    pub basis: Basis,
    pub n: usize,
    /// `(location, order)` of each pinned value.
    pub pins: Vec<(f64, usize)>,
    offset: Vec<f64>,
    map: DMatrix<f64>,
    /// Rows project `c - offset` onto the free coordinates.
    free_projection: DMatrix<f64>,
}

impl Frame {
    pub fn new(vm: &VectorMeasure, n: usize) -> Frame {
        let basis = Basis::for_measure(vm);
        let pins: Vec<(f64, usize)> = vm
            .dirac()
            .iter()
            .filter(|t| t.order < n)
            .map(|t| (t.location, t.order))
            .collect();
        Frame::with_pins(basis, n, pins).unwrap_or_else(|| Frame::plain(basis, n))
    }

    fn plain(basis: Basis, n: usize) -> Frame {
        Frame {
            basis,
            n,
            pins: Vec::new(),
            offset: vec![0.0; n],
            map: DMatrix::identity(n, n),
            free_projection: DMatrix::identity(n, n),
        }
    }

    fn with_pins(basis: Basis, n: usize, pins: Vec<(f64, usize)>) -> Option<Frame> {
        let k = pins.len();
        if k == 0 || k >= n {
            return None;
        }
        let lead = basis.leading(n);
        // constraint rows L c = b - ell, scaled to unit max
        let mut lt = DMatrix::zeros(n, k);
        let mut ell = vec![0.0; k];
        let mut scale = vec![0.0; k];
        for (j, &(x, order)) in pins.iter().enumerate() {
            let phi = basis.eval(n, order, x);
            let s = phi[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(s > 0.0 && s.is_finite()) {
                return None;
            }
            for i in 0..n {
                lt[(i, j)] = phi[i] / s;
            }
            ell[j] = phi[n] / lead / s;
            scale[j] = s;
        }
        let qr = PivotedQr::new(&lt);
        if qr.rank(PIN_RANK_TOL) < k {
            return None;
        }
        let r = qr.r_block(k);
        let perm = qr.permutation();
        // c = Q [w; z], R^T w = P^T beta
        let particular = |beta: &[f64]| -> Vec<f64> {
            let mut w = vec![0.0; k];
            for i in 0..k {
                let s: f64 = (0..i).map(|j| r[(j, i)] * w[j]).sum();
                w[i] = (beta[perm[i]] - s) / r[(i, i)];
            }
            w.resize(n, 0.0);
            qr.q_mul(&w)
        };
        let neg_ell: Vec<f64> = ell.iter().map(|v| -v).collect();
        let offset = particular(&neg_ell);
        let mut map = DMatrix::zeros(n, n);
        let mut free_projection = DMatrix::zeros(n - k, n);
        for i in 0..n - k {
            let mut e = vec![0.0; n];
            e[k + i] = 1.0;
            let col = qr.q_mul(&e);
            for (row, v) in col.iter().enumerate() {
                map[(row, i)] = *v;
                free_projection[(i, row)] = *v;
            }
        }
        for j in 0..k {
            let mut beta = vec![0.0; k];
            beta[j] = 1.0 / scale[j];
            let col = particular(&beta);
            for (row, v) in col.iter().enumerate() {
                map[(row, n - k + j)] = *v;
            }
        }
        Some(Frame {
            basis,
            n,
            pins,
            offset,
            map,
            free_projection,
        })
    }

    pub fn n_free(&self) -> usize {
        self.n - self.pins.len()
    }

    /// Basis coefficients `c` of the lower part.
    pub fn lower(&self, u: &[f64]) -> Vec<f64> {
        let mut c = self.offset.clone();
        for (j, &uj) in u.iter().enumerate() {
            if uj != 0.0 {
                for (i, ci) in c.iter_mut().enumerate() {
                    *ci += self.map[(i, j)] * uj;
                }
            }
        }
        c
    }

    pub fn point(&self, u: &[f64]) -> FramePoly {
        let inner = BasisPoly::monic(self.basis, &self.lower(u));
        let pinned = self
            .pins
            .iter()
            .zip(&u[self.n_free()..])
            .map(|(&pin, &v)| (pin, v))
            .collect();
        FramePoly { inner, pinned }
    }

    /// `d c / d u_j` applied to `phi`: row vector `phi^T map`.
    pub fn pull_back(&self, phi: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| phi[i] * self.map[(i, j)]).sum())
            .collect()
    }

    /// Index in `u` of the pinned value at `(x, order)`.
    pub fn pin_index(&self, x: f64, order: usize) -> Option<usize> {
        self.pins
            .iter()
            .position(|&(px, po)| px == x && po == order)
            .map(|j| self.n_free() + j)
    }

    /// Coordinates of a monic degree-`n` polynomial.
    pub fn coords_of(&self, p: &Poly) -> Vec<f64> {
        let c = self.basis.coords_of(p);
        let shifted: Vec<f64> = (0..self.n).map(|i| c[i] - self.offset[i]).collect();
        let mut u: Vec<f64> = (0..self.n_free())
            .map(|i| (0..self.n).map(|j| self.free_projection[(i, j)] * shifted[j]).sum())
            .collect();
        u.extend(self.pins.iter().map(|&(x, order)| p.eval_derivative(order, x)));
        u
    }
}

/// A point of a [`Frame`].
#[derive(Clone, Debug)]
pub struct FramePoly {
    inner: BasisPoly,
    pinned: Vec<((f64, usize), f64)>,
}

impl FramePoly {
    pub fn to_poly(&self) -> Poly {
        self.inner.to_poly()
    }

    pub fn basis_poly(&self) -> &BasisPoly {
        &self.inner
    }
}

impl Differentiable for FramePoly {
    fn value(&self, order: usize, x: f64) -> f64 {
        self.inner.value(order, x)
    }

    fn value_scale(&self, order: usize, x: f64) -> f64 {
        self.inner.value_scale(order, x)
    }

    fn degree(&self, order: usize) -> Option<usize> {
        self.inner.degree(order)
    }

    fn real_roots(&self, order: usize) -> Result<Vec<(f64, usize)>> {
        self.inner.real_roots(order)
    }

    fn point_value(&self, order: usize, x: f64) -> f64 {
        match self.pinned.iter().find(|((px, po), _)| *px == x && *po == order) {
            Some(&(_, v)) => v,
            None => self.inner.value(order, x),
        }
    }

    fn point_scale(&self, order: usize, x: f64) -> f64 {
        match self.pinned.iter().find(|((px, po), _)| *px == x && *po == order) {
            Some(&(_, v)) => v.abs(),
            None => self.inner.value_scale(order, x),
        }
    }
}
