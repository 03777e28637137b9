//! Measures defining a discrete Sobolev norm: one continuous measure, optional
//! continuous measures acting on derivatives, and weighted Dirac masses on
//! derivative values.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ContinuousMeasure {
    /// Lebesgue measure on `[a, b]`.
    #[serde(rename = "lebesgue")]
    Lebesgue { a: f64, b: f64 },
    /// `e^{-x} dx` on `[0, +inf)`.
    #[serde(rename = "laguerre-exp")]
    LaguerreExp,
}

impl ContinuousMeasure {
    pub fn lebesgue(a: f64, b: f64) -> Result<Self> {
        let m = ContinuousMeasure::Lebesgue { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ContinuousMeasure::Lebesgue { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidInput(format!(
                        "Lebesgue interval needs finite a < b, got [{a}, {b}]"
                    )));
                }
                Ok(())
            }
            ContinuousMeasure::LaguerreExp => Ok(()),
        }
    }

    /// Convex hull of the support.
    pub fn support(&self) -> Interval {
        match *self {
            ContinuousMeasure::Lebesgue { a, b } => Interval::new(a, b),
            ContinuousMeasure::LaguerreExp => Interval::new(0.0, f64::INFINITY),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, ContinuousMeasure::Lebesgue { .. })
    }

    pub fn mass(&self) -> f64 {
        match *self {
            ContinuousMeasure::Lebesgue { a, b } => b - a,
            ContinuousMeasure::LaguerreExp => 1.0,
        }
    }
}

/// `weight * |f^(order)(location)|^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracTerm {
    #[serde(rename = "c")]
    pub location: f64,
    #[serde(rename = "k")]
    pub order: usize,
    #[serde(rename = "A")]
    pub weight: f64,
}

impl DiracTerm {
    pub fn new(location: f64, order: usize, weight: f64) -> Self {
        DiracTerm {
            location,
            order,
            weight,
        }
    }
}

/// A continuous measure acting on the `order`-th derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativePart {
    #[serde(rename = "k")]
    pub order: usize,
    pub measure: ContinuousMeasure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorMeasure {
    continuous: ContinuousMeasure,
    derivative_parts: Vec<DerivativePart>,
    dirac: Vec<DiracTerm>,
}

impl VectorMeasure {
    /// Validates and stores the terms. Zero-weight Dirac terms are dropped.
    pub fn new(continuous: ContinuousMeasure, dirac: Vec<DiracTerm>) -> Result<Self> {
        VectorMeasure::with_derivative_parts(continuous, Vec::new(), dirac)
    }

    pub fn with_derivative_parts(
        continuous: ContinuousMeasure,
        derivative_parts: Vec<DerivativePart>,
        dirac: Vec<DiracTerm>,
    ) -> Result<Self> {
        continuous.validate()?;
        let mut orders = BTreeSet::new();
        for part in &derivative_parts {
            part.measure.validate()?;
            if part.order == 0 {
                return Err(Error::InvalidInput(
                    "derivative parts act on orders k >= 1".into(),
                ));
            }
            if !part.measure.is_bounded() {
                return Err(Error::Unsupported(
                    "derivative parts must have bounded support".into(),
                ));
            }
            if !orders.insert(part.order) {
                return Err(Error::InvalidInput(format!(
                    "duplicate derivative part of order {}",
                    part.order
                )));
            }
        }
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(dirac.len());
        for t in dirac {
            if !t.location.is_finite() || !t.weight.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite Dirac term {t:?}")));
            }
            if t.weight < 0.0 {
                return Err(Error::InvalidInput(format!("negative Dirac weight {t:?}")));
            }
            if t.weight == 0.0 {
                continue;
            }
            if !seen.insert((t.location.to_bits(), t.order)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate Dirac term at c = {}, k = {}",
                    t.location, t.order
                )));
            }
            kept.push(t);
        }
        Ok(VectorMeasure {
            continuous,
            derivative_parts,
            dirac: kept,
        })
    }

    pub fn continuous(&self) -> &ContinuousMeasure {
        &self.continuous
    }

    pub fn derivative_parts(&self) -> &[DerivativePart] {
        &self.derivative_parts
    }

    pub fn dirac(&self) -> &[DiracTerm] {
        &self.dirac
    }

    /// Every continuous measure with the derivative order it acts on.
    pub fn continuous_parts(&self) -> Vec<(usize, ContinuousMeasure)> {
        std::iter::once((0, self.continuous))
            .chain(self.derivative_parts.iter().map(|d| (d.order, d.measure)))
            .collect()
    }

    /// `Delta`, the hull of the support of the continuous measure.
    pub fn delta(&self) -> Interval {
        self.continuous.support()
    }

    /// True when every continuous part has bounded support.
    pub fn is_bounded(&self) -> bool {
        self.continuous.is_bounded()
    }

    /// Hull of every continuous support; the natural scaling window for bases.
    pub fn continuous_hull(&self) -> Interval {
        self.derivative_parts
            .iter()
            .fold(self.continuous.support(), |acc, d| {
                acc.hull(&d.measure.support())
            })
    }

    /// Highest Dirac order per distinct location, ascending in location.
    pub fn max_orders(&self) -> BTreeMap<OrderedLoc, usize> {
        let mut out: BTreeMap<OrderedLoc, usize> = BTreeMap::new();
        for t in &self.dirac {
            let e = out.entry(OrderedLoc(t.location)).or_insert(0);
            *e = (*e).max(t.order);
        }
        out
    }

    /// `N`, the number of distinct mass points.
    pub fn n_locations(&self) -> usize {
        self.max_orders().len()
    }

    /// `m`, the highest derivative order carried by any term.
    pub fn max_order(&self) -> usize {
        let dirac = self.dirac.iter().map(|t| t.order).max().unwrap_or(0);
        let cont = self.derivative_parts.iter().map(|d| d.order).max().unwrap_or(0);
        dirac.max(cont)
    }

    /// `d = N + sum_j m_j`.
    pub fn d(&self) -> usize {
        self.max_orders().values().map(|m| m + 1).sum()
    }

    /// `d*`, the number of stored (positive) Dirac terms.
    pub fn d_star(&self) -> usize {
        self.dirac.len()
    }

    pub fn weight(&self, location: f64, order: usize) -> f64 {
        self.dirac
            .iter()
            .find(|t| t.location == location && t.order == order)
            .map(|t| t.weight)
            .unwrap_or(0.0)
    }
}

/// Total-order wrapper for finite Dirac locations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderedLoc(pub f64);

impl Eq for OrderedLoc {}

impl PartialOrd for OrderedLoc {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedLoc {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example5() -> VectorMeasure {
        VectorMeasure::new(
            ContinuousMeasure::Lebesgue { a: -1.0, b: 1.0 },
            vec![DiracTerm::new(4.0, 1, 8.0), DiracTerm::new(2.0, 2, 6.0)],
        )
        .unwrap()
    }

    #[test]
    fn derived_counts() {
        let vm = example5();
        assert_eq!(vm.n_locations(), 2);
        assert_eq!(vm.max_order(), 2);
        assert_eq!(vm.d(), 5);
        assert_eq!(vm.d_star(), 2);
    }

    #[test]
    fn rejects_bad_terms() {
        let leb = ContinuousMeasure::Lebesgue { a: -1.0, b: 1.0 };
        assert!(VectorMeasure::new(
            leb,
            vec![DiracTerm::new(0.0, 1, 1.0), DiracTerm::new(0.0, 1, 2.0)]
        )
        .is_err());
        assert!(VectorMeasure::new(leb, vec![DiracTerm::new(0.0, 1, -1.0)]).is_err());
        assert!(ContinuousMeasure::lebesgue(1.0, 1.0).is_err());
        let vm = VectorMeasure::new(leb, vec![DiracTerm::new(0.0, 1, 0.0)]).unwrap();
        assert_eq!(vm.d_star(), 0);
    }

    #[test]
    fn json_fragment() {
        let m: ContinuousMeasure =
            serde_json::from_str(r#"{"kind": "lebesgue", "a": -1, "b": 1}"#).unwrap();
        assert_eq!(m, ContinuousMeasure::Lebesgue { a: -1.0, b: 1.0 });
        let l: ContinuousMeasure = serde_json::from_str(r#"{"kind": "laguerre-exp"}"#).unwrap();
        assert_eq!(l.support().lo, 0.0);
        assert!(l.support().hi.is_infinite());
        let t: DiracTerm = serde_json::from_str(r#"{"c": 4, "k": 1, "A": 8}"#).unwrap();
        assert_eq!(t, DiracTerm::new(4.0, 1, 8.0));
        assert!(serde_json::from_str::<DiracTerm>(r#"{"c": 4, "k": 1, "A": 8, "x": 1}"#).is_err());
    }
}
