//! Potential-theoretic diagnostics for sequences of minimal polynomials on an
//! interval: capacity, arcsine law, nth-root growth and derivative ratios.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{roots, sup_norm, Interval, Poly};
use crate::sobolev::SobolevNorm;
use crate::solver::{solve, SolverOptions};

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("need a finite interval with a < b, got [{a}, {b}]")))
    }
}

/// Logarithmic capacity of `[a, b]`.
pub fn capacity(a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    Ok((b - a) / 4.0)
}

/// Distribution function of the arcsine measure on `[a, b]`.
pub fn equilibrium_cdf(a: f64, b: f64, x: f64) -> Result<f64> {
    check_interval(a, b)?;
    let t = ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0);
    Ok(0.5 + t.asin() / std::f64::consts::PI)
}

/// Cauchy transform of the arcsine measure on `[a, b]`, `1 / sqrt((z-a)(z-b))`
/// with the branch that behaves like `1/z` at infinity.
pub fn equilibrium_cauchy(a: f64, b: f64, z: Complex64) -> Result<Complex64> {
    check_interval(a, b)?;
    let w = ((z - a).sqrt() * (z - b).sqrt()).inv();
    Ok(w)
}

/// Unit mass spread evenly over the zeros of a polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingMeasure {
    pub atoms: Vec<Complex64>,
    pub n: usize,
}

impl CountingMeasure {
    pub fn of_poly(p: &Poly) -> Result<Self> {
        let n = p.degree().ok_or(Error::ZeroPolynomial)?;
        if n == 0 {
            return Err(Error::InvalidInput("a constant has no zeros".into()));
        }
        let atoms = roots(p)?.expanded();
        Ok(CountingMeasure { n: atoms.len(), atoms })
    }

    pub fn from_real(points: &[f64]) -> Self {
        CountingMeasure {
            atoms: points.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            n: points.len(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|_| 1.0 / self.n as f64).sum()
    }
}

/// Kolmogorov distance between the real parts of the atoms and the arcsine law.
pub fn ks_distance(cm: &CountingMeasure, a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    let mut xs: Vec<f64> = cm.atoms.iter().map(|z| z.re).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = equilibrium_cdf(a, b, x)?;
        worst = worst.max((i as f64 / n - f).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    Ok(worst)
}

/// `P^(j+1)(z) / (n P^(j)(z))` with `n = deg P`.
pub fn green_ratio(p: &Poly, z: Complex64, j: usize) -> Result<Complex64> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return Err(Error::InvalidInput("need a polynomial of positive degree".into()));
    }
    let low = p.derivative(j);
    let den = low.eval_complex(z);
    let scale: f64 = low.coeffs().iter().enumerate().map(|(i, c)| c.abs() * z.norm().powi(i as i32)).sum();
    if den.norm() <= 1e-14 * scale {
        return Err(Error::InvalidInput(format!("z = {z} is a zero of P^({j})")));
    }
    Ok(p.derivative(j + 1).eval_complex(z) / (n as f64 * den))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsRow {
    pub n: usize,
    pub j: usize,
    pub sup_norm_nth_root: f64,
    pub ks_distance: f64,
    pub green_ratio: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub interval: Interval,
    pub capacity: f64,
    pub green_point: Complex64,
    /// Limit of the green ratio at `green_point`.
    pub green_limit: Complex64,
    /// Sorted by `n`, then `j`.
    pub rows: Vec<AsymptoticsRow>,
}

impl AsymptoticsReport {
    pub fn row(&self, n: usize, j: usize) -> Option<&AsymptoticsRow> {
        self.rows.iter().find(|r| r.n == n && r.j == j)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,j,nth_root,ks,green_re,green_im\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                r.n, r.j, r.sup_norm_nth_root, r.ks_distance, r.green_ratio.re, r.green_ratio.im
            ));
        }
        out
    }
}

/// Solves for `P_n`, `n = 1..=n_max`, and records for each `j < n`, `j <= j_max`
/// the nth root of `sup |P_n^(j)|` on the hull of the continuous supports, the
/// arcsine distance of the zeros of `P_n^(j)` and the green ratio at a point
/// half a width to the right of the interval.
pub fn nth_root_diagnostic(sn: &SobolevNorm, n_max: usize, j_max: usize, opts: &SolverOptions) -> Result<AsymptoticsReport> {
    let delta = sn.measure().delta();
    if !delta.is_bounded() || delta.is_point() {
        return Err(Error::Hypothesis("the continuous support must be a bounded interval".into()));
    }
    let (a, b) = (delta.lo, delta.hi);
    let z = Complex64::new(b + 0.5 * (b - a), 0.0);
    let solutions: Vec<Result<Poly>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (1..=n_max)
            .map(|n| scope.spawn(move || solve(sn, n, opts).map(|s| s.poly)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    let mut rows = Vec::new();
    for (n, poly) in (1..=n_max).zip(solutions) {
        let poly = poly?;
        for j in 0..=j_max.min(n - 1) {
            let dj = poly.derivative(j);
            rows.push(AsymptoticsRow {
                n,
                j,
                sup_norm_nth_root: sup_norm(&dj, a, b)?.powf(1.0 / n as f64),
                ks_distance: ks_distance(&CountingMeasure::of_poly(&dj)?, a, b)?,
                green_ratio: green_ratio(&poly, z, j)?,
            });
        }
    }
    Ok(AsymptoticsReport {
        interval: delta,
        capacity: capacity(a, b)?,
        green_point: z,
        green_limit: equilibrium_cauchy(a, b, z)?,
        rows,
    })
}
