//! Sign changes of minimal polynomials inside the continuous support, against
//! the lower bounds `n - d` and, for sequentially ordered norms, `n - d*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::VectorMeasure;
use crate::poly::{roots_with_tolerance, Interval, Poly, RealSet, MULTIPLICITY_TOL};
use crate::sobolev::SobolevNorm;
use crate::solver::{solve, SolverOptions};
use crate::structure::classify;

const SNAP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroLocationReport {
    pub n: usize,
    pub sign_changes_in_delta: usize,
    pub bound_d: usize,
    pub bound_dstar: usize,
    pub ordered: bool,
    pub pass: bool,
    /// The count changes when the multiplicity threshold moves by 10x.
    pub fragile: bool,
    pub note: Option<String>,
}

/// Odd-multiplicity real roots of `p` in the open interval `delta`.
pub fn sign_changes_in(p: &Poly, delta: &Interval, mult_tol: f64) -> Result<usize> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(0);
    }
    let open = RealSet::open(delta.lo, delta.hi);
    Ok(roots_with_tolerance(p, mult_tol)?
        .real()
        .into_iter()
        .filter(|&(r, m)| m % 2 == 1 && open.contains_approx(r, SNAP_TOL))
        .count())
}

/// Solves for `P_n` and compares its sign changes in the interior of the
/// continuous support with the bounds.
pub fn check_zero_location(sn: &SobolevNorm, n: usize, opts: &SolverOptions) -> Result<ZeroLocationReport> {
    let p = sn.p();
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Hypothesis(format!("zero location needs 1 < p < inf, got p = {p}")));
    }
    let vm = sn.measure();
    let delta = vm.delta();
    if let Some(t) = vm.dirac().iter().find(|t| Interval::point(t.location).meets_interior_of(&delta)) {
        return Err(Error::Hypothesis(format!(
            "mass point {} lies in the interior of the continuous support",
            t.location
        )));
    }
    let poly = solve(sn, n, opts)?.poly;
    report_for(sn, &poly)
}

/// As [`check_zero_location`] for an already computed minimal polynomial.
pub fn report_for(sn: &SobolevNorm, poly: &Poly) -> Result<ZeroLocationReport> {
    let n = poly.degree().ok_or(Error::ZeroPolynomial)?;
    let class = classify(sn.measure());
    let delta = sn.measure().delta();
    let count = sign_changes_in(poly, &delta, MULTIPLICITY_TOL)?;
    let fragile = sign_changes_in(poly, &delta, 10.0 * MULTIPLICITY_TOL)? != count
        || sign_changes_in(poly, &delta, 0.1 * MULTIPLICITY_TOL)? != count;
    let bound_d = n.saturating_sub(class.d);
    let bound_dstar = n.saturating_sub(class.d_star);
    let pass = count >= bound_d && (!class.is_sequentially_ordered || count >= bound_dstar);
    let note = (!class.is_sequentially_ordered && count < bound_dstar).then(|| {
        format!("n - d* bound not applicable (norm not sequentially ordered): {count} < {bound_dstar}")
    });
    Ok(ZeroLocationReport {
        n,
        sign_changes_in_delta: count,
        bound_d,
        bound_dstar,
        ordered: class.is_sequentially_ordered,
        pass,
        fragile,
        note,
    })
}

/// Whether `P` has an odd-multiplicity zero in the interior of the hull of
/// the order-0 support, and (for `deg P >= 2`) `P'` in the interior of the
/// hull of the order-0 and order-1 supports.
pub fn odd_zero_check(vm: &VectorMeasure, poly: &Poly) -> Result<(bool, bool)> {
    let hulls = classify(vm).delta_k;
    let h0 = hulls[0].unwrap_or_else(|| vm.delta());
    let own = sign_changes_in(poly, &h0, MULTIPLICITY_TOL)? >= 1;
    if poly.degree().unwrap_or(0) < 2 {
        return Ok((own, true));
    }
    let h01 = hulls.get(1).copied().flatten().map_or(h0, |h1| h0.hull(&h1));
    let derived = sign_changes_in(&poly.derivative(1), &h01, MULTIPLICITY_TOL)? >= 1;
    Ok((own, derived))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{ContinuousMeasure, DiracTerm};
    use crate::poly::roots;

    fn norm(p: f64, cont: ContinuousMeasure, dirac: &[(f64, usize, f64)]) -> SobolevNorm {
        let terms = dirac.iter().map(|&(c, k, w)| DiracTerm::new(c, k, w)).collect();
        SobolevNorm::new(p, VectorMeasure::new(cont, terms).unwrap()).unwrap()
    }

    fn lebesgue() -> ContinuousMeasure {
        ContinuousMeasure::Lebesgue { a: -1.0, b: 1.0 }
    }

    #[test]
    fn far_masses_counterexample() {
        let sn = norm(2.0, lebesgue(), &[(4.0, 1, 8.0), (2.0, 2, 6.0)]);
        let r = check_zero_location(&sn, 4, &SolverOptions::default()).unwrap();
        assert_eq!((r.sign_changes_in_delta, r.bound_dstar, r.bound_d), (1, 2, 0));
        assert!(!r.ordered && r.pass && !r.fragile);
        assert!(r.note.is_some());
        let p4 = solve(&sn, 4, &SolverOptions::default()).unwrap().poly;
        let rs = roots(&p4).unwrap();
        assert_eq!(rs.real().len(), 2);
        assert_eq!(rs.roots.iter().filter(|r| !r.is_real()).count(), 2);
        assert_eq!(odd_zero_check(sn.measure(), &p4).unwrap(), (true, true));
    }

    #[test]
    fn laguerre_counterexample() {
        let sn = norm(2.0, ContinuousMeasure::LaguerreExp, &[(-4.0, 1, 3.0), (0.0, 2, 8.0)]);
        let r = check_zero_location(&sn, 4, &SolverOptions::default()).unwrap();
        assert_eq!(r.sign_changes_in_delta, 1);
        assert!(!r.ordered);
        let rs = roots(&solve(&sn, 4, &SolverOptions::default()).unwrap().poly).unwrap();
        assert_eq!(rs.real().len(), 2);
    }

    #[test]
    fn ordered_masses_at_both_ends() {
        let sn = norm(2.0, lebesgue(), &[(-1.0, 0, 1.0), (1.0, 1, 2.0), (-1.0, 2, 1.0), (1.0, 3, 0.5)]);
        let r = check_zero_location(&sn, 10, &SolverOptions::default()).unwrap();
        assert!(r.ordered);
        assert!(r.sign_changes_in_delta >= 10 - 4 && r.pass, "{r:?}");
    }

    #[test]
    fn classical_case() {
        for p in [1.5, 2.0, 3.0] {
            let r = check_zero_location(&norm(p, lebesgue(), &[]), 6, &SolverOptions::default()).unwrap();
            assert_eq!(r.sign_changes_in_delta, 6);
        }
    }

    #[test]
    fn hypotheses_are_checked() {
        let inside = norm(2.0, lebesgue(), &[(0.5, 1, 1.0)]);
        assert!(matches!(check_zero_location(&inside, 3, &SolverOptions::default()), Err(Error::Hypothesis(_))));
        let p1 = norm(1.0, lebesgue(), &[]);
        assert!(matches!(check_zero_location(&p1, 3, &SolverOptions::default()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn double_roots_do_not_change_sign() {
        let delta = Interval::new(-1.0, 1.0);
        let p = Poly::from_roots(&[0.5, 0.5, -0.2]);
        assert_eq!(sign_changes_in(&p, &delta, MULTIPLICITY_TOL).unwrap(), 1);
        assert_eq!(sign_changes_in(&Poly::constant(2.0), &delta, MULTIPLICITY_TOL).unwrap(), 0);
    }
}
