//! Dense tableau simplex for `min c.x` subject to `A x = b`, `x >= 0`.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-11;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    /// `m` constraint rows of `n + 1` entries, right-hand side last.
    rows: Vec<Vec<f64>>,
    /// Reduced costs, with minus the objective value last.
    cost: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn new(a: &[Vec<f64>], b: &[f64], c: &[f64], basis: Vec<usize>) -> Tableau {
        let n = c.len();
        let rows: Vec<Vec<f64>> = a
            .iter()
            .zip(b)
            .map(|(row, &bi)| {
                let mut r = row.clone();
                r.push(bi);
                r
            })
            .collect();
        let mut cost = c.to_vec();
        cost.push(0.0);
        for (i, &j) in basis.iter().enumerate() {
            let cj = cost[j];
            if cj != 0.0 {
                for k in 0..=n {
                    cost[k] -= cj * rows[i][k];
                }
            }
        }
        Tableau {
            rows,
            cost,
            basis,
            pivots: 0,
        }
    }

    fn ncols(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let n = self.ncols();
        let piv = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for k in 0..=n {
                    row[k] -= f * pivot_row[k];
                }
                row[col] = 0.0;
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for k in 0..=n {
                self.cost[k] -= f * pivot_row[k];
            }
            self.cost[col] = 0.0;
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Runs to optimality over columns `allowed`.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        let n = self.ncols();
        let mut degenerate = 0;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::LinearProgram("pivot limit reached".into()));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let scale = self.cost[..n].iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let entering = if bland {
                (0..n).find(|&j| allowed(j) && self.cost[j] < -COST_TOL * scale)
            } else {
                (0..n)
                    .filter(|&j| allowed(j) && self.cost[j] < -COST_TOL * scale)
                    .min_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]))
            };
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[col];
                if a > PIVOT_TOL {
                    let ratio = row[n].max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-15 * best.abs()
                                || (ratio <= best + 1e-15 * best.abs() && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::LinearProgram("unbounded objective".into()));
            };
            degenerate = if ratio == 0.0 { degenerate + 1 } else { 0 };
            self.pivot(r, col);
        }
    }

    fn solution(&self) -> Vec<f64> {
        let n = self.ncols();
        let mut x = vec![0.0; n];
        for (i, &j) in self.basis.iter().enumerate() {
            x[j] = self.rows[i][n];
        }
        x
    }
}

/// Simplex from a known feasible basis: `b >= 0` and column `basis[i]` of `A`
/// is the `i`-th unit vector.
pub fn simplex_with_basis(a: &[Vec<f64>], b: &[f64], c: &[f64], basis: Vec<usize>) -> Result<LpSolution> {
    check_shapes(a, b, c)?;
    if basis.len() != b.len() || b.iter().any(|&v| v < 0.0) {
        return Err(Error::LinearProgram("initial basis is not feasible".into()));
    }
    let mut t = Tableau::new(a, b, c, basis);
    t.optimize(&|_| true)?;
    let x = t.solution();
    let objective = x.iter().zip(c).map(|(x, c)| x * c).sum();
    Ok(LpSolution {
        x,
        objective,
        pivots: t.pivots,
    })
}

/// Two-phase simplex with artificial variables.
pub fn simplex(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    check_shapes(a, b, c)?;
    let m = b.len();
    let n = c.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut r: Vec<f64> = row.iter().map(|v| sign * v).collect();
        r.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
        rows.push(r);
        rhs.push(sign * bi);
    }
    let mut phase1 = vec![0.0; n];
    phase1.extend(std::iter::repeat_n(1.0, m));
    let mut t = Tableau::new(&rows, &rhs, &phase1, (n..n + m).collect());
    t.optimize(&|_| true)?;
    let infeasibility = -t.cost[n + m];
    let bscale = rhs.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    if infeasibility > 1e-9 * bscale {
        return Err(Error::LinearProgram("infeasible constraints".into()));
    }
    // drive artificials out of the basis; rows with no real column are redundant
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| t.rows[i][j].abs() > 1e-9) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(0.0, m));
    cost.push(0.0);
    for (r, &j) in t.basis.iter().enumerate() {
        let cj = cost[j];
        if cj != 0.0 {
            for k in 0..=n + m {
                cost[k] -= cj * t.rows[r][k];
            }
        }
    }
    t.cost = cost;
    t.optimize(&|j| j < n)?;
    let mut x = t.solution();
    x.truncate(n);
    let objective = x.iter().zip(c).map(|(x, c)| x * c).sum();
    Ok(LpSolution {
        x,
        objective,
        pivots: t.pivots,
    })
}

fn check_shapes(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<()> {
    if a.len() != b.len() || a.iter().any(|r| r.len() != c.len()) {
        return Err(Error::InvalidInput("inconsistent LP dimensions".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  => (2, 6), 36
        let a = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 1.0, 0.0],
            vec![3.0, 2.0, 0.0, 0.0, 1.0],
        ];
        let b = [4.0, 12.0, 18.0];
        let c = [-3.0, -5.0, 0.0, 0.0, 0.0];
        let s = simplex_with_basis(&a, &b, &c, vec![2, 3, 4]).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        let s2 = simplex(&a, &b, &c).unwrap();
        assert!((s2.objective + 36.0).abs() < 1e-12);
    }

    #[test]
    fn two_phase_with_equalities() {
        // min x + y s.t. x + 2y = 4, x - y = 1 => x = 2, y = 1
        let a = vec![vec![1.0, 2.0], vec![1.0, -1.0]];
        let s = simplex(&a, &[4.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
        assert!(simplex(&[vec![1.0, 1.0]], &[-1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn reports_unbounded() {
        // min -x s.t. x - y = 0
        let err = simplex(&[vec![1.0, -1.0]], &[0.0], &[-1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::LinearProgram(_)));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example, which cycles under the textbook rule without anti-cycling
        let a = vec![
            vec![0.25, -8.0, -1.0, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -12.0, -0.5, 3.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let c = [-0.75, 20.0, -0.5, 6.0, 0.0, 0.0, 0.0];
        let s = simplex_with_basis(&a, &[0.0, 0.0, 1.0], &c, vec![4, 5, 6]).unwrap();
        assert!((s.objective + 1.25).abs() < 1e-12);
    }
}
