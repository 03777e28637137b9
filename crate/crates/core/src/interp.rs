//! Monic polynomials of least degree with prescribed vanishing derivatives,
//! and Rolle-type zero counting inequalities.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{equilibrated_rank, PivotedQr};
use crate::poly::{count_distinct_zeros, count_zeros_with_multiplicity, falling_factorial, Interval, Poly, RealSet};
use crate::structure::hulls_sequentially_ordered;

const RANK_TOL: f64 = 1e-10;

/// Conditions `U^(order)(point) = 0`, kept sorted by order (stable).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, usize)>", into = "Vec<(f64, usize)>")]
pub struct OrderedPairSeq {
    pairs: Vec<(f64, usize)>,
}

impl OrderedPairSeq {
    pub fn new(mut pairs: Vec<(f64, usize)>) -> Result<Self> {
        if let Some(&(r, _)) = pairs.iter().find(|(r, _)| !r.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite point {r}")));
        }
        pairs.sort_by_key(|&(_, nu)| nu);
        Ok(OrderedPairSeq { pairs })
    }

    pub fn pairs(&self) -> &[(f64, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Hull of the points carrying each order `0..=max order`.
    pub fn hulls(&self) -> Vec<Option<Interval>> {
        let top = self.pairs.last().map_or(0, |&(_, nu)| nu);
        (0..=top)
            .map(|k| Interval::hull_of(self.pairs.iter().filter(|p| p.1 == k).map(|p| p.0)))
            .collect()
    }
}

impl TryFrom<Vec<(f64, usize)>> for OrderedPairSeq {
    type Error = Error;

    fn try_from(pairs: Vec<(f64, usize)>) -> Result<Self> {
        OrderedPairSeq::new(pairs)
    }
}

impl From<OrderedPairSeq> for Vec<(f64, usize)> {
    fn from(s: OrderedPairSeq) -> Self {
        s.pairs
    }
}

pub fn is_sequentially_ordered_pairs(s: &OrderedPairSeq) -> bool {
    hulls_sequentially_ordered(&s.hulls())
}

/// One less than the first index `i` (from 1) with `order_i >= i`, or `M`.
pub fn degree_formula(s: &OrderedPairSeq) -> usize {
    s.pairs
        .iter()
        .enumerate()
        .find(|(i, &(_, nu))| nu > *i)
        .map_or(s.len(), |(i, _)| i)
}

/// The monic polynomial of least degree satisfying every condition of `s`.
pub fn minimal_interp(s: &OrderedPairSeq) -> Result<Poly> {
    if s.is_empty() {
        return Err(Error::InvalidInput("need at least one condition".into()));
    }
    // work in t = (x - center) / half so the points sit in [-1, 1]
    let lo = s.pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = s.pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let half = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
    let ts: Vec<(f64, usize)> = s.pairs.iter().map(|&(r, nu)| ((r - center) / half, nu)).collect();

    for d in 0..=s.len() {
        let rows = ts.len();
        let mut a = DMatrix::zeros(rows, d);
        let mut aug = DMatrix::zeros(rows, d + 1);
        let mut rhs = vec![0.0; rows];
        for (i, &(t, nu)) in ts.iter().enumerate() {
            for j in 0..=d {
                let v = if j >= nu { falling_factorial(j, nu) * t.powi((j - nu) as i32) } else { 0.0 };
                if j < d {
                    a[(i, j)] = v;
                    aug[(i, j)] = v;
                } else {
                    aug[(i, j)] = -v;
                    rhs[i] = -v;
                }
            }
        }
        let rank = if d == 0 { 0 } else { equilibrated_rank(&a, RANK_TOL) };
        let rhs_zero = rhs.iter().all(|&v| v == 0.0);
        let solvable = if d == 0 { rhs_zero } else { rhs_zero || equilibrated_rank(&aug, RANK_TOL) == rank };
        if !solvable {
            continue;
        }
        let mut v = if d == 0 {
            Vec::new()
        } else {
            let mut scaled = a.clone();
            let mut scale = vec![1.0; d];
            for (j, mut col) in scaled.column_iter_mut().enumerate() {
                let m = col.amax();
                if m > 0.0 {
                    col /= m;
                    scale[j] = m;
                }
            }
            let w = PivotedQr::new(&scaled).solve_least_squares(&rhs, RANK_TOL)?;
            w.iter().zip(&scale).map(|(w, s)| w / s).collect()
        };
        v.push(1.0);
        return Ok(from_unit_variable(&v, center, half));
    }
    unreachable!("degree M always admits a monic solution")
}

/// `half^d V((x - center) / half)` for monic `V` with coefficients `v`.
fn from_unit_variable(v: &[f64], center: f64, half: f64) -> Poly {
    let d = v.len() - 1;
    let shift = Poly::new(vec![-center, 1.0]);
    let mut acc = Poly::zero();
    for (j, &c) in v.iter().enumerate().rev() {
        acc = &(&acc * &shift) + &Poly::constant(c * half.powi((d - j) as i32));
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolleReport {
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
    pub degree: usize,
    /// `lhs <= deg Q`.
    pub holds_degree_bound: bool,
    /// Distinct zeros of `Q^(i)` on `I_i`, summed over `i`.
    pub distinct_sum: usize,
    pub holds_distinct_bound: bool,
}

/// Evaluates both sides of the counting inequality for `Q`, intervals
/// `I_0..I_m` (an absent one is empty) and a closed `J` inside `int I_0`.
pub fn rolle_inequality_check(q: &Poly, intervals: &[Option<Interval>], j: Option<&Interval>) -> Result<RolleReport> {
    if intervals.is_empty() {
        return Err(Error::InvalidInput("need at least I_0".into()));
    }
    if !hulls_sequentially_ordered(intervals) {
        return Err(Error::Hypothesis("intervals are not sequentially ordered".into()));
    }
    let m = intervals.len() - 1;
    let degree = q.degree().ok_or(Error::ZeroPolynomial)?;
    if degree < m {
        return Err(Error::InvalidInput(format!("deg Q = {degree} is below m = {m}")));
    }
    if let Some(j) = j {
        let inside = intervals[0].is_some_and(|i0| j.inside_interior_of(&i0));
        if !inside {
            return Err(Error::InvalidInput("J must lie in the interior of I_0".into()));
        }
    }

    let top = q.derivative(m);
    let i0 = RealSet::from_opt(intervals[0].as_ref());
    let mut lhs = count_zeros_with_multiplicity(q, j)? + count_distinct_zeros(q, &i0.minus_closed(j))?;
    let mut distinct_sum = count_distinct_zeros(q, &i0)?;
    for (i, iv) in intervals.iter().enumerate().skip(1) {
        let set = RealSet::from_opt(iv.as_ref());
        let c = count_distinct_zeros(&q.derivative(i), &set)?;
        lhs += c;
        distinct_sum += c;
    }
    let hull = intervals.iter().flatten().fold(None, |acc: Option<Interval>, iv| {
        Some(acc.map_or(*iv, |a| a.hull(iv)))
    });
    let rhs = count_zeros_with_multiplicity(&top, j)?
        + count_distinct_zeros(&top, &RealSet::from_opt(hull.as_ref()).minus_closed(j))?
        + m;
    Ok(RolleReport {
        lhs,
        rhs,
        holds: lhs <= rhs,
        degree,
        holds_degree_bound: lhs <= degree,
        distinct_sum,
        holds_distinct_bound: distinct_sum <= degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use crate::verify::{condition_residual, random_ordered_hulls, random_ordered_pairs};

    fn seq(pairs: &[(f64, usize)]) -> OrderedPairSeq {
        OrderedPairSeq::new(pairs.to_vec()).unwrap()
    }

    fn assert_coeffs(p: &Poly, want: &[f64], tol: f64) {
        assert_eq!(p.degree(), Some(want.len() - 1), "{p:?}");
        for (i, w) in want.iter().enumerate() {
            assert!((p.coeff(i) - w).abs() <= tol, "coefficient {i}: {p:?}");
        }
    }

    #[test]
    fn unordered_three_pairs() {
        let s = seq(&[(-1.0, 0), (1.0, 0), (0.0, 1)]);
        assert!(!is_sequentially_ordered_pairs(&s));
        assert_eq!(degree_formula(&s), 3);
        assert_coeffs(&minimal_interp(&s).unwrap(), &[-1.0, 0.0, 1.0], 1e-12);
    }

    #[test]
    fn ordered_three_pairs() {
        let s = seq(&[(-0.5, 0), (0.5, 0), (2.0, 1)]);
        assert!(is_sequentially_ordered_pairs(&s));
        assert_eq!(degree_formula(&s), 3);
        let want = &Poly::from_roots(&[-0.5, 0.5]) * &Poly::new(vec![-47.0 / 16.0, 1.0]);
        assert_coeffs(&minimal_interp(&s).unwrap(), want.coeffs(), 1e-12);
    }

    #[test]
    fn single_pairs() {
        let s = seq(&[(0.0, 1)]);
        assert_eq!(degree_formula(&s), 0);
        assert_coeffs(&minimal_interp(&s).unwrap(), &[1.0], 0.0);
        assert!(is_sequentially_ordered_pairs(&seq(&[(0.0, 0)])));
        assert_coeffs(&minimal_interp(&seq(&[(3.0, 0)])).unwrap(), &[-3.0, 1.0], 1e-14);
    }

    #[test]
    fn pairs_sort_by_order() {
        let s = seq(&[(2.0, 1), (-0.5, 0), (0.5, 0)]);
        assert_eq!(s.pairs()[2], (2.0, 1));
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<OrderedPairSeq>(&json).unwrap(), s);
    }

    #[test]
    fn trivial_rolle_case() {
        let q = Poly::from_roots(&[-1.0, 1.0]);
        let r = rolle_inequality_check(&q, &[Some(Interval::new(-2.0, 2.0))], Some(&Interval::new(-1.5, 1.5))).unwrap();
        assert_eq!((r.lhs, r.rhs), (2, 2));
        assert!(r.holds && r.holds_degree_bound);
    }

    #[test]
    fn rolle_with_derivative_point() {
        let q = &Poly::from_roots(&[-0.5, 0.5]) * &Poly::new(vec![-47.0 / 16.0, 1.0]);
        let ivs = [Some(Interval::new(-0.5, 0.5)), Some(Interval::point(2.0))];
        let r = rolle_inequality_check(&q, &ivs, None).unwrap();
        assert_eq!((r.distinct_sum, r.degree), (3, 3));
        assert!(r.holds && r.holds_distinct_bound);
    }

    #[test]
    fn rolle_rejects_unordered_intervals() {
        let ivs = [Some(Interval::new(-1.0, 1.0)), Some(Interval::point(0.0))];
        assert!(matches!(
            rolle_inequality_check(&Poly::monomial(3), &ivs, None),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn degree_matches_formula_for_ordered_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let s = random_ordered_pairs(&mut rng);
            if !is_sequentially_ordered_pairs(&s) {
                continue;
            }
            let u = minimal_interp(&s).unwrap();
            assert_eq!(u.degree(), Some(degree_formula(&s)), "{:?}", s.pairs());
            assert!(condition_residual(&u, &s) < 1e-9, "{:?}", s.pairs());

            let mut shuffled = s.pairs().to_vec();
            shuffled.shuffle(&mut rng);
            let again = minimal_interp(&OrderedPairSeq::new(shuffled).unwrap()).unwrap();
            for i in 0..=u.degree().unwrap() {
                let diff = (again.coeff(i) - u.coeff(i)).abs();
                assert!(diff <= 1e-10 * u.coeff_norm().max(1.0), "{diff:e} {:?} {u:?}", s.pairs());
            }
        }
    }

    #[test]
    fn degree_never_exceeds_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let m = rng.gen_range(1..=7);
            let pairs: Vec<(f64, usize)> = (0..m).map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0..3))).collect();
            let s = OrderedPairSeq::new(pairs).unwrap();
            let u = minimal_interp(&s).unwrap();
            assert!(u.degree().unwrap() <= degree_formula(&s));
            assert!(condition_residual(&u, &s) < 1e-9, "{:?}", s.pairs());
        }
    }

    #[test]
    fn counting_inequalities_hold_on_random_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let levels = rng.gen_range(1..=4);
            let mut ivs = random_ordered_hulls(&mut rng, levels);
            if ivs[0].is_none() {
                ivs[0] = Some(Interval::new(-1.0, 1.0));
            }
            let m = ivs.len() - 1;
            let deg = rng.gen_range(m.max(1)..=8);
            let roots: Vec<f64> = (0..deg).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let q = Poly::from_roots(&roots);
            let i0 = ivs[0].unwrap();
            let j = if i0.lo < i0.hi && rng.gen_bool(0.6) {
                let a = rng.gen_range(i0.lo..i0.hi);
                let b = rng.gen_range(i0.lo..i0.hi);
                let (a, b) = (a.min(b), a.max(b));
                (a > i0.lo && b < i0.hi).then(|| Interval::new(a, b))
            } else {
                None
            };
            let r = rolle_inequality_check(&q, &ivs, j.as_ref()).unwrap();
            assert!(r.holds && r.holds_degree_bound && r.holds_distinct_bound, "{r:?} {roots:?} {ivs:?} {j:?}");
        }
    }
}
