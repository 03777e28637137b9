//! Gauss rules from Jacobi matrices, composite rules with breakpoints, and
//! adaptive rules for integrands with algebraic kinks such as `|P(x)|^s`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::measures::ContinuousMeasure;

#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly, when known.
    pub exactness: Option<usize>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Affine image of a rule on `[-1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Quadrature {
        let h = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Quadrature {
            nodes: self.nodes.iter().map(|t| mid + h * t).collect(),
            weights: self.weights.iter().map(|w| h * w).collect(),
            exactness: self.exactness,
        }
    }

    fn append(&mut self, other: &Quadrature) {
        self.nodes.extend_from_slice(&other.nodes);
        self.weights.extend_from_slice(&other.weights);
        self.exactness = match (self.exactness, other.exactness) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum RuleKey {
    Jacobi { n: usize, alpha: u64, beta: u64 },
    Laguerre { n: usize },
}

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<Quadrature>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<Quadrature>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: RuleKey, build: impl FnOnce() -> Quadrature) -> Arc<Quadrature> {
    if let Some(q) = cache().lock().unwrap().get(&key) {
        return q.clone();
    }
    let q = Arc::new(build());
    cache().lock().unwrap().insert(key, q.clone());
    q
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Arc<Quadrature> {
    assert!(n >= 1, "Gauss rule needs at least one node");
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss-Jacobi rule on `[-1, 1]` for the weight `(1-t)^alpha (1+t)^beta`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Arc<Quadrature> {
    assert!(n >= 1, "Gauss rule needs at least one node");
    assert!(alpha > -1.0 && beta > -1.0, "Jacobi exponents must exceed -1");
    let key = RuleKey::Jacobi {
        n,
        alpha: alpha.to_bits(),
        beta: beta.to_bits(),
    };
    cached(key, || {
        let ab = alpha + beta;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        for (k, d) in diag.iter_mut().enumerate() {
            *d = if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                let kk = k as f64;
                (beta * beta - alpha * alpha) / ((2.0 * kk + ab) * (2.0 * kk + ab + 2.0))
            };
        }
        for (k, e) in off.iter_mut().enumerate().take(n - 1) {
            let kk = (k + 1) as f64;
            let s = 2.0 * kk + ab;
            let b = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
            *e = b.sqrt();
        }
        let mu0 = if ab == 0.0 && alpha == 0.0 {
            2.0
        } else {
            jacobi_mass(alpha, beta)
        };
        let mut q = golub_welsch(diag, off, mu0);
        q.exactness = Some(2 * n - 1);
        q
    })
}

fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    let ab = alpha + beta;
    ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp()
}

/// Gauss-Laguerre rule for `e^{-x}` on `[0, inf)`.
pub fn gauss_laguerre(n: usize) -> Arc<Quadrature> {
    assert!(n >= 1, "Gauss rule needs at least one node");
    cached(RuleKey::Laguerre { n }, || {
        let diag = (0..n).map(|k| (2 * k + 1) as f64).collect();
        let off = (0..n)
            .map(|k| if k + 1 < n { (k + 1) as f64 } else { 0.0 })
            .collect();
        let mut q = golub_welsch(diag, off, 1.0);
        q.exactness = Some(2 * n - 1);
        q
    })
}

/// Nodes are the eigenvalues of the Jacobi matrix; weights are `mu0` times the
/// squared first components of its normalised eigenvectors.
fn golub_welsch(mut d: Vec<f64>, mut e: Vec<f64>, mu0: f64) -> Quadrature {
    let n = d.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n > 1 {
        e[n - 1] = 0.0;
        tridiagonal_ql(&mut d, &mut e, &mut z);
    }
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| mu0 * v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Quadrature {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        exactness: None,
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `e[i]` couples rows `i` and `i+1`. Only the first row of the eigenvector
/// matrix is accumulated, in `z`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Gauss rule for the measure's own weight.
pub fn gauss_rule(measure: &ContinuousMeasure, n: usize) -> Result<Quadrature> {
    if n == 0 {
        return Err(Error::InvalidInput("Gauss rule needs at least one node".into()));
    }
    measure.validate()?;
    Ok(match *measure {
        ContinuousMeasure::Lebesgue { a, b } => gauss_legendre(n).mapped(a, b),
        ContinuousMeasure::LaguerreExp => (*gauss_laguerre(n)).clone(),
    })
}

/// Union of Gauss-Legendre rules on `panels` equal panels, further split at
/// every breakpoint.
pub fn composite_rule(
    measure: &ContinuousMeasure,
    panels: usize,
    nodes_per_panel: usize,
    breakpoints: &[f64],
) -> Result<Quadrature> {
    let ContinuousMeasure::Lebesgue { a, b } = *measure else {
        return Err(Error::Unsupported(
            "composite rules need bounded support; use gauss_rule".into(),
        ));
    };
    measure.validate()?;
    if panels == 0 || nodes_per_panel == 0 {
        return Err(Error::InvalidInput("panels and nodes must be positive".into()));
    }
    if let Some(&x) = breakpoints.iter().find(|&&x| !(a..=b).contains(&x)) {
        return Err(Error::InvalidInput(format!("breakpoint {x} outside [{a}, {b}]")));
    }
    let edges = panel_edges(a, b, panels, breakpoints);
    let reference = gauss_legendre(nodes_per_panel);
    let mut out = Quadrature {
        nodes: Vec::new(),
        weights: Vec::new(),
        exactness: reference.exactness,
    };
    for w in edges.windows(2) {
        out.append(&reference.mapped(w[0], w[1]));
    }
    Ok(out)
}

fn panel_edges(a: f64, b: f64, panels: usize, breakpoints: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect();
    edges[panels] = b;
    edges.extend_from_slice(breakpoints);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}

/// `sum w_i f(x_i)`.
pub fn integrate(q: &Quadrature, f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut acc = 0.0;
    for (&x, &w) in q.nodes.iter().zip(&q.weights) {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFinite(x));
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Hard cap on the size of an adaptive rule.
const MAX_NODES: usize = 1 << 16;

/// A point where the integrand behaves like `|x - at|^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kink {
    pub at: f64,
    pub exponent: f64,
}

/// Controls for [`kinked_rule`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveSpec {
    pub panels: usize,
    pub nodes: usize,
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for AdaptiveSpec {
    fn default() -> Self {
        AdaptiveSpec {
            panels: 4,
            nodes: 16,
            rel_tol: 4e-15,
            max_depth: 40,
        }
    }
}

/// A rule on `[a, b]` for integrands of the form `F(x) * prod |x - k|^e` with
/// smooth `F`, given as plain values of the integrand.
///
/// Panels break at every kink. Non-integer exponents at panel ends are
/// absorbed into Gauss-Jacobi weights, which are then divided back out so that
/// the returned weights apply to the integrand itself. Panels are bisected
/// until `n` and `2n` node rules agree on `probe`.
pub fn kinked_rule(
    a: f64,
    b: f64,
    kinks: &[Kink],
    spec: &AdaptiveSpec,
    probe: &dyn Fn(f64) -> f64,
) -> Quadrature {
    let snap = |x: f64| {
        let tol = 1e-12 * (1.0 + x.abs());
        if (x - a).abs() <= tol {
            a
        } else if (x - b).abs() <= tol {
            b
        } else {
            x
        }
    };
    let inner: Vec<Kink> = kinks
        .iter()
        .map(|k| Kink {
            at: snap(k.at),
            exponent: k.exponent,
        })
        .filter(|k| a <= k.at && k.at <= b)
        .collect();
    let exponent_at = |x: f64| {
        inner
            .iter()
            .filter(|k| k.at == x)
            .map(|k| k.exponent)
            .sum::<f64>()
    };
    let points: Vec<f64> = inner.iter().map(|k| k.at).collect();
    let edges = panel_edges(a, b, spec.panels.max(1), &points);

    let mut panels: Vec<Panel> = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Panel::new(w[0], w[1], jacobi_exponent(exponent_at(w[0])), jacobi_exponent(exponent_at(w[1])), spec.nodes, probe))
        .collect();
    let total: f64 = panels.iter().map(|p| p.fine_value.abs()).sum();
    let budget = spec.rel_tol * total.max(f64::MIN_POSITIVE);

    let mut out = Quadrature {
        nodes: Vec::new(),
        weights: Vec::new(),
        exactness: None,
    };
    let width = b - a;
    while let Some(panel) = panels.pop() {
        let share = budget * (panel.hi - panel.lo) / width;
        let rounding = 64.0 * f64::EPSILON * panel.abs_value;
        let settled = panel.error() <= share.max(rounding);
        if settled || panel.depth >= spec.max_depth || out.len() + panels.len() * 4 * spec.nodes > MAX_NODES {
            out.append(&panel.fine);
            continue;
        }
        let mid = 0.5 * (panel.lo + panel.hi);
        let depth = panel.depth + 1;
        let mut left = Panel::new(panel.lo, mid, panel.left_exp, 0.0, spec.nodes, probe);
        let mut right = Panel::new(mid, panel.hi, 0.0, panel.right_exp, spec.nodes, probe);
        left.depth = depth;
        right.depth = depth;
        panels.push(left);
        panels.push(right);
    }
    out
}

fn jacobi_exponent(e: f64) -> f64 {
    if e == e.round() {
        0.0
    } else {
        e
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    left_exp: f64,
    right_exp: f64,
    coarse_value: f64,
    fine_value: f64,
    abs_value: f64,
    fine: Quadrature,
    depth: usize,
}

impl Panel {
    fn new(lo: f64, hi: f64, left_exp: f64, right_exp: f64, n: usize, probe: &dyn Fn(f64) -> f64) -> Panel {
        let coarse = panel_rule(lo, hi, left_exp, right_exp, n);
        let fine = panel_rule(lo, hi, left_exp, right_exp, 2 * n);
        let value = |q: &Quadrature| -> f64 {
            q.nodes.iter().zip(&q.weights).map(|(&x, &w)| w * probe(x)).sum()
        };
        let abs_value = fine
            .nodes
            .iter()
            .zip(&fine.weights)
            .map(|(&x, &w)| (w * probe(x)).abs())
            .sum();
        Panel {
            lo,
            hi,
            left_exp,
            right_exp,
            coarse_value: value(&coarse),
            fine_value: value(&fine),
            abs_value,
            fine,
            depth: 0,
        }
    }

    fn error(&self) -> f64 {
        (self.fine_value - self.coarse_value).abs()
    }
}

fn panel_rule(lo: f64, hi: f64, left_exp: f64, right_exp: f64, n: usize) -> Quadrature {
    if left_exp == 0.0 && right_exp == 0.0 {
        return gauss_legendre(n).mapped(lo, hi);
    }
    let reference = gauss_jacobi(n, right_exp, left_exp);
    let h = 0.5 * (hi - lo);
    let mid = 0.5 * (lo + hi);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (&t, &w) in reference.nodes.iter().zip(&reference.weights) {
        nodes.push(mid + h * t);
        weights.push(h * w / ((1.0 + t).powf(left_exp) * (1.0 - t).powf(right_exp)));
    }
    Quadrature {
        nodes,
        weights,
        exactness: None,
    }
}
