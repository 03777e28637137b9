//! Randomized property suites over the structural results, shared by the
//! command line `verify` subcommand and the test suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics::nth_root_diagnostic;
use crate::error::Result;
use crate::interp::{degree_formula, is_sequentially_ordered_pairs, minimal_interp, rolle_inequality_check, OrderedPairSeq};
use crate::poly::{Interval, Poly};
use crate::sobolev::SobolevNorm;
use crate::solver::{solve, solve_p1, SolverOptions};
use crate::structure::{classify, mult_bound, mult_ratio_probe};
use crate::zerolocation::{check_zero_location, odd_zero_check};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<String>,
    /// Named summary values, e.g. the bound and the worst observed ratio.
    pub values: Vec<(String, f64)>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            ..SuiteReport::default()
        }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Interval families `I_0..I_{levels-1}` satisfying the ordering condition by
/// construction; later levels may be empty.
pub fn random_ordered_hulls(rng: &mut ChaCha8Rng, levels: usize) -> Vec<Option<Interval>> {
    let mut out = Vec::new();
    let mut hull: Option<Interval> = None;
    for _ in 0..levels {
        if !out.is_empty() && rng.gen_bool(0.2) {
            out.push(None);
            continue;
        }
        let width = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.1..2.0) };
        let iv = match hull {
            Some(h) if h.lo < h.hi => {
                let gap = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.5) };
                if rng.gen_bool(0.5) {
                    Interval::new(h.hi + gap, h.hi + gap + width)
                } else {
                    Interval::new(h.lo - gap - width, h.lo - gap)
                }
            }
            _ => {
                let lo = rng.gen_range(-2.0..1.0);
                Interval::new(lo, lo + width)
            }
        };
        hull = Some(hull.map_or(iv, |h| h.hull(&iv)));
        out.push(Some(iv));
    }
    out
}

/// Up to 8 conditions placed on random ordered hulls, interior points at
/// least 0.05 apart.
pub fn random_ordered_pairs(rng: &mut ChaCha8Rng) -> OrderedPairSeq {
    let m = rng.gen_range(1..=8);
    let levels = rng.gen_range(1..=4);
    let hulls = random_ordered_hulls(rng, levels);
    let mut pairs: Vec<(f64, usize)> = Vec::new();
    for (k, h) in hulls.iter().enumerate() {
        let Some(h) = h else { continue };
        pairs.push((h.lo, k));
        if h.is_point() {
            continue;
        }
        pairs.push((h.hi, k));
        for _ in 0..rng.gen_range(0..3) {
            let r = rng.gen_range(h.lo..h.hi);
            if pairs.iter().all(|p| (p.0 - r).abs() > 0.05) {
                pairs.push((r, k));
            }
        }
    }
    pairs.sort_by_key(|p| p.1);
    pairs.truncate(m);
    OrderedPairSeq::new(pairs).expect("finite points")
}

/// `|U^(nu)(r)|` relative to the size of the terms that make it up.
pub fn condition_residual(u: &Poly, s: &OrderedPairSeq) -> f64 {
    s.pairs()
        .iter()
        .map(|&(r, nu)| {
            let d = u.derivative(nu);
            d.eval(r).abs() / d.eval_scale(r.abs()).max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Minimal-degree interpolants of random ordered condition sets: degree equal
/// to the formula, conditions met, order of conditions irrelevant.
pub fn interp_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("interp");
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let s = random_ordered_pairs(&mut rng);
        if !is_sequentially_ordered_pairs(&s) {
            rep.check(false, || format!("generator produced unordered {:?}", s.pairs()));
            continue;
        }
        let u = minimal_interp(&s)?;
        let res = condition_residual(&u, &s);
        worst = worst.max(res);
        rep.check(u.degree() == Some(degree_formula(&s)), || {
            format!("degree {:?} != {} for {:?}", u.degree(), degree_formula(&s), s.pairs())
        });
        rep.check(res <= 1e-9, || format!("residual {res:e} for {:?}", s.pairs()));
        let mut shuffled = s.pairs().to_vec();
        shuffled.shuffle(&mut rng);
        let again = minimal_interp(&OrderedPairSeq::new(shuffled)?)?;
        let gap = (0..=u.degree().unwrap_or(0))
            .map(|i| (again.coeff(i) - u.coeff(i)).abs())
            .fold(0.0, f64::max);
        rep.check(gap <= 1e-10 * u.coeff_norm().max(1.0), || {
            format!("reordering moved coefficients by {gap:e} for {:?}", s.pairs())
        });
    }
    rep.values.push(("max_condition_residual".into(), worst));
    Ok(rep)
}

/// Random `(Q, ordered family, J)` against the counting inequality and its
/// two special cases.
pub fn rolle_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("rolle");
    for _ in 0..trials {
        let levels = rng.gen_range(1..=4);
        let mut ivs = random_ordered_hulls(&mut rng, levels);
        if ivs[0].is_none() {
            ivs[0] = Some(Interval::new(-1.0, 1.0));
        }
        let m = ivs.len() - 1;
        let deg = rng.gen_range(m.max(1)..=8);
        let roots: Vec<f64> = (0..deg).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let q = Poly::from_roots(&roots);
        let i0 = ivs[0].expect("set above");
        let j = if i0.lo < i0.hi && rng.gen_bool(0.6) {
            let a = rng.gen_range(i0.lo..i0.hi);
            let b = rng.gen_range(i0.lo..i0.hi);
            let (a, b) = (a.min(b), a.max(b));
            (a > i0.lo && b < i0.hi).then(|| Interval::new(a, b))
        } else {
            None
        };
        let r = rolle_inequality_check(&q, &ivs, j.as_ref())?;
        rep.check(r.holds && r.holds_degree_bound && r.holds_distinct_bound, || {
            format!("{r:?} for roots {roots:?}, intervals {ivs:?}, J {j:?}")
        });
    }
    Ok(rep)
}

/// Random polynomials against the multiplication-operator bound.
pub fn bounds_suite(sn: &SobolevNorm, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("bounds");
    let bound = mult_bound(sn.measure(), sn.p())?;
    let worst = mult_ratio_probe(sn, trials, 15, seed)?;
    rep.cases = trials;
    if worst > bound * (1.0 + 1e-10) {
        rep.failures.push(format!("ratio {worst} exceeds bound {bound}"));
    }
    rep.values.push(("bound".into(), bound));
    rep.values.push(("max_ratio".into(), worst));
    Ok(rep)
}

/// Relative value accuracy expected of the `p = 1` linear program.
pub const LP_VALUE_TOL: f64 = 1e-6;

/// No random perturbation of the `p = 1` solutions for `n = 1..=n_max` lowers
/// the norm by more than the program's accuracy.
pub fn p1_suite(sn: &SobolevNorm, n_max: usize, trials: usize, seed: u64, opts: &SolverOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("p1");
    for n in 1..=n_max {
        let sol = solve_p1(sn, n, opts.lp_grid)?;
        let d = sn.p1_descent_check(&sol.poly, trials, seed.wrapping_add(n as u64))?;
        let gain = (-d.min_slope * d.worst_step).max(0.0);
        rep.check(gain <= LP_VALUE_TOL * sol.norm_value, || {
            format!("n = {n}: lowered by {gain:e} along {:?}", d.worst_direction)
        });
        rep.values.push((format!("norm_{n}"), sol.norm_value));
    }
    Ok(rep)
}

/// Sign-change bounds for `n = 1..=n_max`, and the odd zeros of `P_n` and `P_n'`.
pub fn zeroloc_suite(sn: &SobolevNorm, n_max: usize, opts: &SolverOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("zeroloc");
    for n in 1..=n_max {
        let r = check_zero_location(sn, n, opts)?;
        rep.check(r.pass, || format!("{r:?}"));
        let poly = solve(sn, n, opts)?.poly;
        let (own, derived) = odd_zero_check(sn.measure(), &poly)?;
        rep.check(own && derived, || format!("n = {n}: odd zero of P {own}, of P' {derived}"));
    }
    Ok(rep)
}

/// Trend and band checks on the nth-root diagnostic, scaled to the interval.
pub fn asymptotics_suite(sn: &SobolevNorm, n_max: usize, opts: &SolverOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("asymptotics");
    let report = nth_root_diagnostic(sn, n_max, 0, opts)?;
    let cap = report.capacity;
    let width = report.interval.hi - report.interval.lo;
    let at = |n: usize| report.row(n, 0).expect("row computed");
    let (n1, n2, n3) = ((n_max / 3).max(1), (2 * n_max / 3).max(1), n_max);
    let last = at(n3);
    rep.check((0.9 * cap..=1.3 * cap).contains(&last.sup_norm_nth_root), || {
        format!("nth root {} outside [0.9, 1.3] x capacity {cap}", last.sup_norm_nth_root)
    });
    let trend = [at(n1), at(n2), at(n3)].map(|r| r.sup_norm_nth_root);
    rep.check(trend[0] > trend[1] && trend[1] > trend[2], || format!("nth roots not decreasing: {trend:?}"));
    rep.check(last.ks_distance <= 0.15, || format!("KS distance {} > 0.15", last.ks_distance));
    rep.check(last.ks_distance <= at(n1).ks_distance + 0.02, || {
        format!("KS distance grew from {} to {}", at(n1).ks_distance, last.ks_distance)
    });
    let green_gap = (last.green_ratio - report.green_limit).norm();
    rep.check(green_gap <= 0.1 / width, || format!("green ratio {} vs limit {}", last.green_ratio, report.green_limit));
    rep.values.push(("nth_root".into(), last.sup_norm_nth_root));
    rep.values.push(("ks".into(), last.ks_distance));
    rep.values.push(("green_gap".into(), green_gap));
    Ok(rep)
}

/// The sign-change lower bound from `d* + 1` on, for norms that are
/// sequentially ordered.
pub fn ordered_zeroloc_suite(sn: &SobolevNorm, n_max: usize, opts: &SolverOptions) -> Result<SuiteReport> {
    let class = classify(sn.measure());
    let mut rep = SuiteReport::new("ordered-zeroloc");
    for n in class.d_star + 1..=n_max {
        let r = check_zero_location(sn, n, opts)?;
        rep.check(r.sign_changes_in_delta >= n - class.d_star, || format!("{r:?}"));
    }
    Ok(rep)
}
