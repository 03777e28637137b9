//! Finite unions of real intervals with explicit endpoint closure, used for
//! zero counting on sets like `I \ J`.

use serde::{Deserialize, Serialize};

/// Closed interval `[lo, hi]`; `lo == hi` is a single point. Endpoints may be
/// infinite, in which case the infinite side is treated as open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Convex hull of a set of points; `None` for an empty set.
    pub fn hull_of(points: impl IntoIterator<Item = f64>) -> Option<Interval> {
        points.into_iter().fold(None, |acc, x| match acc {
            None => Some(Interval::point(x)),
            Some(iv) => Some(iv.hull(&Interval::point(x))),
        })
    }

    /// True when this interval meets the open interior `(lo, hi)` of `other`.
    /// A degenerate `other` has empty interior.
    pub fn meets_interior_of(&self, other: &Interval) -> bool {
        other.lo < other.hi && self.lo < other.hi && self.hi > other.lo
    }

    /// True when `self` is a subset of the open interior of `other`.
    pub fn inside_interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Span {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }
}

/// A finite union of spans.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealSet {
    spans: Vec<Span>,
}

impl RealSet {
    pub fn empty() -> Self {
        RealSet { spans: Vec::new() }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        RealSet::from_span(Span {
            lo,
            hi,
            lo_closed: lo.is_finite(),
            hi_closed: hi.is_finite(),
        })
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        RealSet::from_span(Span {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        })
    }

    pub fn point(x: f64) -> Self {
        RealSet::closed(x, x)
    }

    pub fn from_interval(iv: &Interval) -> Self {
        RealSet::closed(iv.lo, iv.hi)
    }

    /// `iv` as a set, or the empty set.
    pub fn from_opt(iv: Option<&Interval>) -> Self {
        iv.map(RealSet::from_interval).unwrap_or_default()
    }

    pub fn from_span(span: Span) -> Self {
        let spans = if span.is_empty() { vec![] } else { vec![span] };
        RealSet { spans }
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn union(mut self, other: RealSet) -> Self {
        self.spans.extend(other.spans);
        self
    }

    /// `self \ [j.lo, j.hi]`.
    pub fn minus_closed(&self, j: Option<&Interval>) -> RealSet {
        let Some(j) = j else {
            return self.clone();
        };
        let mut spans = Vec::new();
        for s in &self.spans {
            let left = Span {
                lo: s.lo,
                hi: s.hi.min(j.lo),
                lo_closed: s.lo_closed,
                hi_closed: if s.hi < j.lo { s.hi_closed } else { false },
            };
            let right = Span {
                lo: s.lo.max(j.hi),
                hi: s.hi,
                lo_closed: if s.lo > j.hi { s.lo_closed } else { false },
                hi_closed: s.hi_closed,
            };
            for part in [left, right] {
                if !part.is_empty() {
                    spans.push(part);
                }
            }
        }
        RealSet { spans }
    }

    /// Membership with a relative snapping tolerance at span endpoints.
    pub fn contains_approx(&self, x: f64, tol: f64) -> bool {
        self.spans.iter().any(|s| {
            let near = |e: f64| e.is_finite() && (x - e).abs() <= tol * (1.0 + e.abs());
            if near(s.lo) {
                return s.lo_closed;
            }
            if near(s.hi) {
                return s.hi_closed;
            }
            s.lo < x && x < s.hi
        })
    }
}
