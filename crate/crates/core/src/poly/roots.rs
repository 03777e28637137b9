//! Complex roots via balanced companion matrices, with numerical multiplicity
//! resolution.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Poly;
use crate::error::{Error, Result};

/// Relative threshold on `|p^(i)(r)|` deciding that `r` is a root of `p^(i)`.
pub const MULTIPLICITY_TOL: f64 = 1e-8;

/// Imaginary parts below `REAL_TOL * (1 + |re|)` are dropped.
const REAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    #[serde(rename = "mult")]
    pub multiplicity: usize,
}

impl Root {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub residual_bound: f64,
}

impl RootSet {
    /// Distinct real roots with multiplicities, ascending.
    pub fn real(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = self
            .roots
            .iter()
            .filter(|r| r.is_real())
            .map(|r| (r.re, r.multiplicity))
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Every root repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value(), r.multiplicity))
            .collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.value().norm())
            .fold(0.0, f64::max)
    }
}

/// All complex roots of `p` with multiplicities resolved at the default threshold.
pub fn roots(p: &Poly) -> Result<RootSet> {
    roots_with_tolerance(p, MULTIPLICITY_TOL)
}

/// As [`roots`], with an explicit multiplicity threshold.
pub fn roots_with_tolerance(p: &Poly, mult_tol: f64) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let raw = raw_roots(p);
    let mut clustered = cluster(p, raw, mult_tol);
    for r in clustered.iter_mut().filter(|r| r.multiplicity == 1) {
        let z = newton_polish(p, r.value());
        r.re = z.re;
        if !r.is_real() {
            r.im = z.im;
        }
    }
    let residual_bound = clustered
        .iter()
        .map(|r| {
            let z = r.value();
            let scale = p.eval_scale(z.norm()).max(f64::MIN_POSITIVE);
            p.eval_complex(z).norm() / scale
        })
        .fold(0.0, f64::max);
    Ok(RootSet {
        roots: clustered,
        residual_bound,
    })
}

/// Roots repeated by multiplicity, unclustered.
fn raw_roots(p: &Poly) -> Vec<Complex64> {
    let c = p.coeffs();
    let zeros_at_origin = c.iter().take_while(|&&x| x == 0.0).count();
    let q = Poly::new(c[zeros_at_origin..].to_vec());
    let mut out = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    let qc = q.coeffs();
    match q.degree() {
        None | Some(0) => {}
        Some(1) => out.push(Complex64::new(-qc[0] / qc[1], 0.0)),
        Some(2) => out.extend(quadratic(qc[2], qc[1], qc[0])),
        Some(_) => {
            out.extend(companion_eigenvalues(&q));
        }
    }
    out
}

/// Roots of `a x^2 + b x + c` without cancellation.
fn quadratic(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let r1 = q / a;
        let r2 = c / q;
        [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn companion_eigenvalues(q: &Poly) -> Vec<Complex64> {
    let c = q.coeffs();
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(0, i)] = -c[n - 1 - i] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    balance(&mut m);
    m.complex_eigenvalues().iter().copied().collect()
}

/// Parlett-Reinsch diagonal similarity balancing with power-of-two scalings.
fn balance(m: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    m[(i, j)] *= g;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// One Newton step, kept only if it reduces the residual.
fn newton_polish(p: &Poly, z: Complex64) -> Complex64 {
    let dp = p.derivative(1);
    let f = p.eval_complex(z);
    let df = dp.eval_complex(z);
    if df.norm() == 0.0 {
        return z;
    }
    let z1 = z - f / df;
    if z1.is_finite() && p.eval_complex(z1).norm() <= f.norm() {
        z1
    } else {
        z
    }
}

/// True when `p^(i)(x)` vanishes relative to its evaluation scale for all `i < k`.
fn vanishes_to_order(p: &Poly, x: Complex64, k: usize, tol: f64) -> bool {
    (0..k).all(|i| {
        let d = p.derivative(i);
        let scale = d.eval_scale(x.norm());
        d.eval_complex(x).norm() <= tol * scale
    })
}

/// Groups numerically coincident roots into multiple roots.
fn cluster(p: &Poly, mut raw: Vec<Complex64>, tol: f64) -> Vec<Root> {
    raw.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut used = vec![false; raw.len()];
    let mut out = Vec::new();
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        let z = raw[i];
        let radius = 1e-2 * (1.0 + z.norm());
        let mut near: Vec<usize> = (0..raw.len())
            .filter(|&j| !used[j] && (raw[j] - z).norm() <= radius)
            .collect();
        near.sort_by(|&a, &b| (raw[a] - z).norm().total_cmp(&(raw[b] - z).norm()));
        let mut chosen = vec![i];
        let mut center = z;
        for k in (2..=near.len()).rev() {
            let members = &near[..k];
            let mean = members.iter().map(|&j| raw[j]).sum::<Complex64>() / k as f64;
            if vanishes_to_order(p, mean, k, tol) {
                chosen = members.to_vec();
                center = mean;
                break;
            }
        }
        for &j in &chosen {
            used[j] = true;
        }
        let im = if center.im.abs() < REAL_TOL * (1.0 + center.re.abs()) {
            0.0
        } else {
            center.im
        };
        out.push(Root {
            re: center.re,
            im,
            multiplicity: chosen.len(),
        });
    }
    out
}
