//! Sign changes, zero counting on sets, Chebyshev polynomials and sup norms.

use super::roots::roots;
use super::sets::{Interval, RealSet};
use super::Poly;
use crate::error::{Error, Result};

/// Roots within this relative distance of a set endpoint are placed on it.
const SNAP_TOL: f64 = 1e-10;

fn check_nonzero(p: &Poly) -> Result<()> {
    if p.is_zero() {
        Err(Error::ZeroPolynomial)
    } else {
        Ok(())
    }
}

fn real_roots(p: &Poly) -> Result<Vec<(f64, usize)>> {
    check_nonzero(p)?;
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    Ok(roots(p)?.real())
}

/// Number of points of `(a, b)` where `p` changes sign, i.e. the real roots of
/// odd multiplicity strictly inside. `b` may be `+inf` and `a` may be `-inf`.
pub fn sign_changes(p: &Poly, a: f64, b: f64) -> Result<usize> {
    if !(a < b) {
        return Err(Error::InvalidInput(format!("need a < b, got [{a}, {b}]")));
    }
    let set = RealSet::open(a, b);
    Ok(real_roots(p)?
        .into_iter()
        .filter(|&(r, m)| m % 2 == 1 && set.contains_approx(r, SNAP_TOL))
        .count())
}

/// `N0(p; S)`: distinct real zeros of `p` in `S`.
pub fn count_distinct_zeros(p: &Poly, set: &RealSet) -> Result<usize> {
    Ok(real_roots(p)?
        .into_iter()
        .filter(|&(r, _)| set.contains_approx(r, SNAP_TOL))
        .count())
}

/// `Nz(p; J)`: real zeros of `p` in the closed interval `J`, with multiplicity.
/// An absent `J` is the empty set.
pub fn count_zeros_with_multiplicity(p: &Poly, j: Option<&Interval>) -> Result<usize> {
    let set = RealSet::from_opt(j);
    Ok(real_roots(p)?
        .into_iter()
        .filter(|&(r, _)| set.contains_approx(r, SNAP_TOL))
        .map(|(_, m)| m)
        .sum())
}

/// Monic polynomial of least sup-norm on `[a, b]`:
/// `2 ((b-a)/4)^n T_n((2x - a - b)/(b - a))`.
pub fn monic_chebyshev(a: f64, b: f64, n: usize) -> Result<Poly> {
    if !(a < b) {
        return Err(Error::InvalidInput(format!("need a < b, got [{a}, {b}]")));
    }
    if n == 0 {
        return Ok(Poly::constant(1.0));
    }
    let t = Poly::new(vec![-(a + b) / (b - a), 2.0 / (b - a)]);
    let two_t = t.scale(2.0);
    let mut prev = Poly::constant(1.0);
    let mut cur = t;
    for _ in 1..n {
        let next = &(&two_t * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    Ok(cur.to_monic().expect("Chebyshev polynomial has nonzero leading term"))
}

/// `max |p(x)|` over `[a, b]`, from the endpoints and the real critical points.
pub fn sup_norm(p: &Poly, a: f64, b: f64) -> Result<f64> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("need finite a <= b, got [{a}, {b}]")));
    }
    let mut best = p.eval(a).abs().max(p.eval(b).abs());
    let dp = p.derivative(1);
    if dp.degree().unwrap_or(0) >= 1 {
        for r in roots(&dp)?.roots {
            if r.im.abs() <= 1e-6 * (1.0 + r.re.abs()) && a <= r.re && r.re <= b {
                best = best.max(p.eval(r.re).abs());
            }
        }
    }
    Ok(best)
}

/// Sturm-sequence count of distinct real roots in `(a, b]`.
///
/// Floating-point remainders make this reliable only at low degree; it serves
/// as an independent cross-check of the eigenvalue-based counters.
pub fn sturm_count(p: &Poly, a: f64, b: f64) -> Result<usize> {
    check_nonzero(p)?;
    let seq = sturm_sequence(p);
    Ok(sign_variations(&seq, a).saturating_sub(sign_variations(&seq, b)))
}

fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), p.derivative(1)];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        if seq[n - 1].degree() == Some(0) {
            break;
        }
        let r = remainder(&seq[n - 2], &seq[n - 1]);
        let scale = seq[n - 2].coeff_norm().max(seq[n - 1].coeff_norm());
        let cleaned = Poly::new(
            r.coeffs()
                .iter()
                .map(|&c| if c.abs() <= 1e-11 * scale { 0.0 } else { -c })
                .collect(),
        );
        seq.push(cleaned);
    }
    seq
}

fn remainder(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.coeffs().to_vec();
    let bc = b.coeffs();
    let db = bc.len() - 1;
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let f = r[r.len() - 1] / bc[db];
        for (i, &c) in bc.iter().enumerate() {
            r[shift + i] -= f * c;
        }
        r.pop();
    }
    Poly::new(r)
}

fn sign_variations(seq: &[Poly], x: f64) -> usize {
    let signs: Vec<f64> = seq
        .iter()
        .map(|q| {
            if x.is_infinite() {
                let d = q.degree().unwrap_or(0);
                let s = q.leading().signum();
                if x < 0.0 && d % 2 == 1 {
                    -s
                } else {
                    s
                }
            } else {
                q.eval(x)
            }
        })
        .filter(|v| *v != 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
}
