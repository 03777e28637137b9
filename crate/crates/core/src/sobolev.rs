//! Discrete Sobolev p-norms, the nonlinear pairing `<P, q>` and optimality
//! residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{ContinuousMeasure, VectorMeasure};
use crate::poly::{roots, Poly};
use crate::quadrature::{gauss_laguerre, integrate, kinked_rule, AdaptiveSpec, Kink};

/// Dirac values below this fraction of their evaluation scale count as zero.
const SIGN_ZERO_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadPolicy {
    /// Uniform panels before splitting at kinks.
    pub panels: usize,
    /// Minimum Gauss nodes per panel.
    pub nodes_per_panel: usize,
    /// Gauss-Laguerre nodes for `e^{-x}`.
    pub laguerre_nodes: usize,
}

impl Default for QuadPolicy {
    fn default() -> Self {
        QuadPolicy {
            panels: 4,
            nodes_per_panel: 16,
            laguerre_nodes: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SobolevNorm {
    p: f64,
    vm: VectorMeasure,
    quad: QuadPolicy,
}

/// `q -> sum_i coef_i q^(order)(x_i)`, one block per derivative order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Functional {
    pub parts: Vec<FunctionalPart>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalPart {
    pub order: usize,
    /// True for a Dirac term, false for a quadrature block.
    pub point: bool,
    pub nodes: Vec<f64>,
    pub coefs: Vec<f64>,
}

impl Functional {
    pub fn apply(&self, q: &Poly) -> f64 {
        self.parts
            .iter()
            .map(|part| {
                let dq = q.derivative(part.order);
                part.nodes
                    .iter()
                    .zip(&part.coefs)
                    .map(|(&x, &c)| c * dq.eval(x))
                    .sum::<f64>()
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualVector {
    /// `<P, x^l>` for `l = 0..n`.
    pub entries: Vec<f64>,
    /// Entries divided by `||P||^(p-1) ||x^l||`; each lies in `[-1, 1]`.
    pub normalized: Vec<f64>,
    /// Largest absolute normalized entry.
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentReport {
    pub trials: usize,
    /// Smallest `(||P - t h|| - ||P||) / t` seen.
    pub min_slope: f64,
    pub worst_direction: Poly,
    pub worst_step: f64,
}

impl DescentReport {
    pub fn supports_minimality(&self) -> bool {
        self.min_slope >= -1e-8
    }
}

#[derive(Clone, Copy)]
enum Kernel {
    /// `|y|^s`
    Abs,
    /// `sgn(y) |y|^s`
    Signed,
}

/// What the evaluator needs from a function: derivative values, and the
/// real roots of each derivative for quadrature breakpoints.
pub trait Differentiable {
    fn value(&self, order: usize, x: f64) -> f64;
    /// Magnitude scale of a value, for deciding when it is numerically zero.
    fn value_scale(&self, order: usize, x: f64) -> f64;
    /// Degree of the derivative; `None` when it vanishes identically.
    fn degree(&self, order: usize) -> Option<usize>;
    fn real_roots(&self, order: usize) -> Result<Vec<(f64, usize)>>;
    /// Value seen by a Dirac term at `x`.
    fn point_value(&self, order: usize, x: f64) -> f64 {
        self.value(order, x)
    }
    fn point_scale(&self, order: usize, x: f64) -> f64 {
        self.value_scale(order, x)
    }
}

impl Differentiable for Poly {
    fn value(&self, order: usize, x: f64) -> f64 {
        self.eval_derivative(order, x)
    }

    fn value_scale(&self, order: usize, x: f64) -> f64 {
        self.derivative(order).eval_scale(x)
    }

    fn degree(&self, order: usize) -> Option<usize> {
        self.degree()
            .and_then(|d| d.checked_sub(order))
    }

    fn real_roots(&self, order: usize) -> Result<Vec<(f64, usize)>> {
        let d = self.derivative(order);
        if d.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        Ok(roots(&d)?.real())
    }
}

impl SobolevNorm {
    pub fn new(p: f64, vm: VectorMeasure) -> Result<Self> {
        SobolevNorm::with_policy(p, vm, QuadPolicy::default())
    }

    pub fn with_policy(p: f64, vm: VectorMeasure, quad: QuadPolicy) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidInput(format!("p must be finite and >= 1, got {p}")));
        }
        if quad.panels == 0 || quad.nodes_per_panel == 0 || quad.laguerre_nodes == 0 {
            return Err(Error::InvalidInput("quadrature sizes must be positive".into()));
        }
        Ok(SobolevNorm { p, vm, quad })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn measure(&self) -> &VectorMeasure {
        &self.vm
    }

    pub fn policy(&self) -> &QuadPolicy {
        &self.quad
    }

    /// The same measure under another exponent.
    pub fn with_p(&self, p: f64) -> Result<SobolevNorm> {
        SobolevNorm::with_policy(p, self.vm.clone(), self.quad)
    }

    pub fn check_supported(&self) -> Result<()> {
        if !self.vm.is_bounded() && self.p != 2.0 {
            return Err(Error::Unsupported("p≠2 on unbounded support".into()));
        }
        Ok(())
    }

    /// `||f||^p`.
    pub fn norm_pow(&self, f: &Poly) -> Result<f64> {
        self.norm_pow_of(f)
    }

    pub fn norm(&self, f: &Poly) -> Result<f64> {
        Ok(self.norm_pow(f)?.powf(1.0 / self.p))
    }

    /// `||f||^p` for any [`Differentiable`] `f`.
    pub fn norm_pow_of(&self, f: &dyn Differentiable) -> Result<f64> {
        self.check_supported()?;
        let p = self.p;
        let mut total = 0.0;
        for (order, measure) in self.vm.continuous_parts() {
            if f.degree(order).is_none() {
                continue;
            }
            let (nodes, weights) = self.kernel_rule(&measure, f, order, p, Kernel::Abs, 0)?;
            for (&x, &w) in nodes.iter().zip(&weights) {
                total += w * f.value(order, x).abs().powf(p);
            }
        }
        for t in self.vm.dirac() {
            total += t.weight * f.point_value(t.order, t.location).abs().powf(p);
        }
        if !total.is_finite() {
            return Err(Error::NonFinite(total));
        }
        Ok(total)
    }

    /// The pairing `<P, .>` as a linear functional on polynomials.
    pub fn pairing_functional(&self, big_p: &Poly) -> Result<Functional> {
        self.pairing_functional_of(big_p, big_p.degree().unwrap_or(0))
    }

    /// As [`pairing_functional`](Self::pairing_functional), exact for test
    /// functions up to degree `test_degree`.
    pub fn pairing_functional_of(&self, big_p: &dyn Differentiable, test_degree: usize) -> Result<Functional> {
        self.check_supported()?;
        let s = self.p - 1.0;
        let mut parts = Vec::new();
        for (order, measure) in self.vm.continuous_parts() {
            if big_p.degree(order).is_none() {
                continue;
            }
            let (nodes, weights) = self.kernel_rule(&measure, big_p, order, s, Kernel::Signed, test_degree)?;
            let coefs = nodes
                .iter()
                .zip(&weights)
                .map(|(&x, &w)| w * signed_pow(big_p.value(order, x), s))
                .collect();
            parts.push(FunctionalPart {
                order,
                point: false,
                nodes,
                coefs,
            });
        }
        for t in self.vm.dirac() {
            let v = big_p.point_value(t.order, t.location);
            let scale = big_p.point_scale(t.order, t.location);
            let kernel = if v.abs() < SIGN_ZERO_TOL * scale {
                0.0
            } else {
                signed_pow(v, s)
            };
            parts.push(FunctionalPart {
                order: t.order,
                point: true,
                nodes: vec![t.location],
                coefs: vec![t.weight * kernel],
            });
        }
        Ok(Functional { parts })
    }

    /// `sum_k int q^(k) sgn(P^(k)) |P^(k)|^(p-1) d mu_k`, Dirac parts included.
    pub fn pairing(&self, big_p: &Poly, q: &Poly) -> Result<f64> {
        Ok(self.pairing_functional(big_p)?.apply(q))
    }

    pub fn residuals(&self, big_p: &Poly) -> Result<ResidualVector> {
        let n = big_p
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidInput("residuals need deg P >= 1".into()))?;
        self.residuals_of(big_p, n)
    }

    /// Residuals of a degree-`n` function against `x^l`, `l < n`.
    pub fn residuals_of(&self, big_p: &dyn Differentiable, n: usize) -> Result<ResidualVector> {
        let functional = self.pairing_functional_of(big_p, n)?;
        let scale = self.norm_pow_of(big_p)?.powf((self.p - 1.0) / self.p);
        let mut entries = Vec::with_capacity(n);
        let mut normalized = Vec::with_capacity(n);
        for l in 0..n {
            let xl = Poly::monomial(l);
            let r = functional.apply(&xl);
            let denom = scale * self.norm(&xl)?;
            entries.push(r);
            normalized.push(if denom > 0.0 { r / denom } else { r });
        }
        let max_abs = normalized.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        Ok(ResidualVector {
            entries,
            normalized,
            max_abs,
        })
    }

    /// True when every normalized residual is below `tol`: the sufficient
    /// condition for minimality, and for `p > 1` also necessary.
    pub fn sufficient_condition_holds(&self, big_p: &Poly, tol: f64) -> Result<bool> {
        Ok(self.residuals(big_p)?.max_abs <= tol)
    }

    /// Looks for a descent direction at `P` among random `h` of degree `< n`.
    pub fn p1_descent_check(&self, big_p: &Poly, trials: usize, seed: u64) -> Result<DescentReport> {
        if self.p != 1.0 {
            return Err(Error::InvalidInput("descent check is defined for p = 1".into()));
        }
        let n = big_p
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidInput("descent check needs deg P >= 1".into()))?;
        let base = self.norm(big_p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = DescentReport {
            trials,
            min_slope: f64::INFINITY,
            worst_direction: Poly::zero(),
            worst_step: 0.0,
        };
        for _ in 0..trials {
            let h = Poly::new((0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect());
            for step in [1e-2, 1e-3, 1e-4] {
                let moved = big_p - &h.scale(step);
                let slope = (self.norm(&moved)? - base) / step;
                if slope < report.min_slope {
                    report.min_slope = slope;
                    report.worst_direction = h.clone();
                    report.worst_step = step;
                }
            }
        }
        Ok(report)
    }

    /// Nodes and weights integrating `g(x) K(f^(order)(x))` against `measure`
    /// for polynomial `g` up to `extra_degree`.
    fn kernel_rule(
        &self,
        measure: &ContinuousMeasure,
        f: &dyn Differentiable,
        order: usize,
        s: f64,
        kernel: Kernel,
        extra_degree: usize,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        match *measure {
            ContinuousMeasure::LaguerreExp => {
                let q = gauss_laguerre(self.quad.laguerre_nodes);
                Ok((q.nodes.clone(), q.weights.clone()))
            }
            ContinuousMeasure::Lebesgue { a, b } => {
                let deg = f.degree(order).unwrap_or(0);
                let needed = ((s.ceil() as usize) * deg + extra_degree) / 2 + 2;
                let spec = AdaptiveSpec {
                    panels: self.quad.panels,
                    nodes: self.quad.nodes_per_panel.max(needed),
                    ..AdaptiveSpec::default()
                };
                let smooth = s == s.round()
                    && match kernel {
                        Kernel::Abs => (s as i64) % 2 == 0,
                        Kernel::Signed => (s as i64) % 2 == 1,
                    };
                let kinks = if smooth || deg == 0 {
                    Vec::new()
                } else {
                    let lo = a - 1e-9 * (1.0 + a.abs());
                    let hi = b + 1e-9 * (1.0 + b.abs());
                    f.real_roots(order)?
                        .into_iter()
                        .filter(|&(r, _)| lo < r && r < hi)
                        .map(|(r, m)| Kink {
                            at: r,
                            exponent: s * m as f64,
                        })
                        .collect()
                };
                let probe = |x: f64| {
                    let v = f.value(order, x);
                    match kernel {
                        Kernel::Abs => v.abs().powf(s),
                        Kernel::Signed => signed_pow(v, s),
                    }
                };
                let q = kinked_rule(a, b, &kinks, &spec, &probe);
                Ok((q.nodes, q.weights))
            }
        }
    }
}

/// `sgn(y) |y|^s` with `sgn(0) = 0`.
pub fn signed_pow(y: f64, s: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else if s == 0.0 {
        y.signum()
    } else if s == 1.0 {
        y
    } else {
        y.signum() * y.abs().powf(s)
    }
}

/// Plain Gauss evaluation of `int f d mu`, for smooth `f`.
pub fn integrate_smooth(measure: &ContinuousMeasure, n: usize, f: impl Fn(f64) -> f64) -> Result<f64> {
    integrate(&crate::quadrature::gauss_rule(measure, n)?, f)
}
