//! Real polynomials in the monomial basis.
//!
//! Coefficients are stored in ascending order with trailing zeros trimmed, so
//! the zero polynomial is the empty coefficient vector and `degree()` is exact.

mod count;
mod roots;
mod sets;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use count::{
    count_distinct_zeros, count_zeros_with_multiplicity, monic_chebyshev, sign_changes, sturm_count,
    sup_norm,
};
pub use roots::{roots, roots_with_tolerance, Root, RootSet, MULTIPLICITY_TOL};
pub use sets::{Interval, RealSet, Span};

#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Poly {
    fn from(coeffs: Vec<f64>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<f64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `x^n`
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Poly { coeffs }
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Poly::constant(1.0), |acc, &r| &acc * &Poly::new(vec![-r, 1.0]))
    }

    /// Monic real polynomial with roots `z` and `conj(z)` for every entry of
    /// `pairs`, times the real linear factors for `real`.
    pub fn from_root_pairs(real: &[f64], pairs: &[Complex64]) -> Self {
        let base = Poly::from_roots(real);
        pairs.iter().fold(base, |acc, z| {
            &acc * &Poly::new(vec![z.norm_sqr(), -2.0 * z.re, 1.0])
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divides by the leading coefficient and stores an exact 1 on top.
    pub fn to_monic(&self) -> Option<Poly> {
        let lead = self.leading();
        if lead == 0.0 {
            return None;
        }
        let mut coeffs: Vec<f64> = self.coeffs.iter().map(|c| c / lead).collect();
        if let Some(top) = coeffs.last_mut() {
            *top = 1.0;
        }
        Some(Poly { coeffs })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_i| |x|^i`, the natural magnitude of a Horner evaluation at `x`.
    pub fn eval_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    /// Sum of absolute coefficient values.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// k-fold formal derivative.
    pub fn derivative(&self, k: usize) -> Poly {
        if k == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= k {
            return Poly::zero();
        }
        let coeffs = (k..self.coeffs.len())
            .map(|i| falling_factorial(i, k) * self.coeffs[i])
            .collect();
        Poly::new(coeffs)
    }

    /// Value of the k-th derivative at `x` without materialising it.
    pub fn eval_derivative(&self, k: usize, x: f64) -> f64 {
        if self.coeffs.len() <= k {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in (k..self.coeffs.len()).rev() {
            acc = acc * x + falling_factorial(i, k) * self.coeffs[i];
        }
        acc
    }

    /// Real-coefficient quotient by `x - r` (synthetic division), remainder dropped.
    pub fn deflate(&self, r: f64) -> Poly {
        let n = self.coeffs.len();
        if n <= 1 {
            return Poly::zero();
        }
        let mut out = vec![0.0; n - 1];
        let mut carry = 0.0;
        for i in (1..n).rev() {
            carry = carry * r + self.coeffs[i];
            out[i - 1] = carry;
        }
        Poly::new(out)
    }
}

/// `i (i-1) ... (i-k+1)`
pub fn falling_factorial(i: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (i - j) as f64)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}
