//! Lacunary and sequentially ordered discrete norms, and the bound on the
//! multiplication operator `q -> x q`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{DiracTerm, VectorMeasure};
use crate::poly::{Interval, Poly};
use crate::sobolev::SobolevNorm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormClassification {
    #[serde(rename = "lacunary")]
    pub is_lacunary: bool,
    #[serde(rename = "ordered")]
    pub is_sequentially_ordered: bool,
    pub d: usize,
    pub d_star: usize,
    /// Hull of the support of the order-`k` measure; `None` when empty.
    pub delta_k: Vec<Option<Interval>>,
}

/// True when no hull meets the interior of the hull of all earlier ones.
pub fn hulls_sequentially_ordered(hulls: &[Option<Interval>]) -> bool {
    let mut acc: Option<Interval> = None;
    for h in hulls {
        if let (Some(h), Some(prev)) = (h, acc) {
            if h.meets_interior_of(&prev) {
                return false;
            }
        }
        acc = match (acc, h) {
            (Some(a), Some(h)) => Some(a.hull(h)),
            (a, h) => a.or(*h),
        };
    }
    true
}

fn delta_k(vm: &VectorMeasure) -> Vec<Option<Interval>> {
    let m = vm.max_order();
    (0..=m)
        .map(|k| {
            let mut pts: Vec<f64> = vm
                .dirac()
                .iter()
                .filter(|t| t.order == k)
                .map(|t| t.location)
                .collect();
            let mut hull = Interval::hull_of(pts.drain(..));
            for (order, measure) in vm.continuous_parts() {
                if order == k {
                    let s = measure.support();
                    hull = Some(hull.map_or(s, |h| h.hull(&s)));
                }
            }
            hull
        })
        .collect()
}

pub fn is_lacunary(vm: &VectorMeasure) -> bool {
    vm.max_orders()
        .iter()
        .any(|(loc, &m)| (0..=m).any(|k| vm.weight(loc.0, k) <= 0.0))
}

pub fn classify(vm: &VectorMeasure) -> NormClassification {
    let delta_k = delta_k(vm);
    NormClassification {
        is_lacunary: is_lacunary(vm),
        is_sequentially_ordered: hulls_sequentially_ordered(&delta_k),
        d: vm.d(),
        d_star: vm.d_star(),
        delta_k,
    }
}

/// Fills every missing order below the top one at each mass point with weight 1.
pub fn associated_nonlacunary(vm: &VectorMeasure) -> Result<VectorMeasure> {
    let mut dirac: Vec<DiracTerm> = vm.dirac().to_vec();
    for (loc, &m) in &vm.max_orders() {
        for k in 0..m {
            if vm.weight(loc.0, k) <= 0.0 {
                dirac.push(DiracTerm::new(loc.0, k, 1.0));
            }
        }
    }
    VectorMeasure::with_derivative_parts(*vm.continuous(), vm.derivative_parts().to_vec(), dirac)
}

/// Constant `M` with `||x q|| <= M ||q||` for a non-lacunary discrete norm on
/// a bounded interval. The Dirac part uses `|k q^(k-1)|^p <= m^p |q^(k-1)|^p`.
pub fn mult_bound(vm: &VectorMeasure, p: f64) -> Result<f64> {
    let (m1, m2, m) = bound_terms(vm, p)?;
    let mp = (m as f64).powf(p);
    Ok(m1.max(2f64.powf(p - 1.0) * (m1 + mp * m2)).powf(1.0 / p))
}

/// The same bound with the factor `m` in place of `m^p`.
pub fn mult_bound_uncorrected(vm: &VectorMeasure, p: f64) -> Result<f64> {
    let (m1, m2, m) = bound_terms(vm, p)?;
    Ok(m1.max(2f64.powf(p - 1.0) * (m1 + m as f64 * m2)).powf(1.0 / p))
}

fn bound_terms(vm: &VectorMeasure, p: f64) -> Result<(f64, f64, usize)> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidInput(format!("p must be finite and >= 1, got {p}")));
    }
    if !vm.is_bounded() {
        return Err(Error::Hypothesis("the continuous support must be bounded".into()));
    }
    if !vm.derivative_parts().is_empty() {
        return Err(Error::Hypothesis("derivatives may only carry Dirac terms".into()));
    }
    if is_lacunary(vm) {
        return Err(Error::Hypothesis("the norm is lacunary".into()));
    }
    let delta = vm.delta();
    let reach = vm
        .dirac()
        .iter()
        .map(|t| t.location.abs())
        .fold(delta.lo.abs().max(delta.hi.abs()), f64::max);
    let m1 = reach.powf(p);
    let mut m2 = 0.0f64;
    for (loc, &m) in &vm.max_orders() {
        for k in 0..m {
            m2 = m2.max(vm.weight(loc.0, k + 1) / vm.weight(loc.0, k));
        }
    }
    Ok((m1, m2, vm.max_order()))
}

/// Largest `||x q|| / ||q||` over random `q` of degree `<= max_degree`.
pub fn mult_ratio_probe(sn: &SobolevNorm, trials: usize, max_degree: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Poly::monomial(1);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let deg = rng.gen_range(0..=max_degree);
        let q = Poly::new((0..=deg).map(|_| rng.gen_range(-1.0..=1.0)).collect());
        if q.is_zero() {
            continue;
        }
        worst = worst.max(sn.norm(&(&x * &q))? / sn.norm(&q)?);
    }
    Ok(worst)
}
