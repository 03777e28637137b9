//! Householder QR with column-norm pivoting, for least squares and rank tests.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct PivotedQr {
    /// `R` in the upper triangle.
    r: DMatrix<f64>,
    /// Householder vectors, one per eliminated column.
    reflectors: Vec<Vec<f64>>,
    /// `perm[k]` is the original index of column `k` of `R`.
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(a: &DMatrix<f64>) -> PivotedQr {
        let (m, n) = a.shape();
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(m.min(n));
        for k in 0..m.min(n) {
            let norms: Vec<f64> = (k..n)
                .map(|j| (k..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>())
                .collect();
            let (best, _) = norms
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
            let piv = k + best;
            if piv != k {
                r.swap_columns(k, piv);
                perm.swap(k, piv);
            }
            let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                reflectors.push(vec![0.0; m - k]);
                continue;
            }
            let alpha = if v[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vv: f64 = v.iter().map(|x| x * x).sum();
            if vv > 0.0 {
                for j in k..n {
                    let dot: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
                    let f = 2.0 * dot / vv;
                    for i in k..m {
                        r[(i, j)] -= f * v[i - k];
                    }
                }
            }
            for i in k + 1..m {
                r[(i, k)] = 0.0;
            }
            reflectors.push(v);
        }
        PivotedQr { r, reflectors, perm }
    }

    pub fn ncols(&self) -> usize {
        self.r.ncols()
    }

    /// Leading `k x k` block of `R`.
    pub fn r_block(&self, k: usize) -> DMatrix<f64> {
        self.r.view((0, 0), (k, k)).upper_triangle()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Absolute values of the diagonal of `R`, non-increasing up to rounding.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.reflectors.len()).map(|k| self.r[(k, k)].abs()).collect()
    }

    /// Number of diagonal entries above `rel_tol` times the largest one.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let d = self.diagonal();
        let top = d.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        d.iter().take_while(|&&x| x > rel_tol * top).count()
    }

    /// `Q^T b`.
    pub fn q_transpose_mul(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for (k, v) in self.reflectors.iter().enumerate() {
            let vv: f64 = v.iter().map(|x| x * x).sum();
            if vv == 0.0 {
                continue;
            }
            let dot: f64 = v.iter().zip(&y[k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vv;
            for (yi, vi) in y[k..].iter_mut().zip(v) {
                *yi -= f * vi;
            }
        }
        y
    }

    /// `Q x` for `x` of length `nrows`.
    pub fn q_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            let vv: f64 = v.iter().map(|x| x * x).sum();
            if vv == 0.0 {
                continue;
            }
            let dot: f64 = v.iter().zip(&y[k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vv;
            for (yi, vi) in y[k..].iter_mut().zip(v) {
                *yi -= f * vi;
            }
        }
        y
    }

    /// Least-squares solution of `A x = b`; errors when `A` has rank below
    /// its column count at tolerance `rel_tol`.
    pub fn solve_least_squares(&self, b: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
        let n = self.ncols();
        if b.len() != self.r.nrows() {
            return Err(Error::InvalidInput("right-hand side length mismatch".into()));
        }
        let rank = self.rank(rel_tol);
        if rank < n {
            return Err(Error::Singular(format!("rank {rank} < {n} columns")));
        }
        let y = self.q_transpose_mul(b);
        let mut z = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| self.r[(k, j)] * z[j]).sum();
            z[k] = (y[k] - s) / self.r[(k, k)];
        }
        let mut x = vec![0.0; n];
        for (k, &orig) in self.perm.iter().enumerate() {
            x[orig] = z[k];
        }
        Ok(x)
    }
}

/// Rank of `a` after scaling every column to unit max-abs.
pub fn equilibrated_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let mut s = a.clone();
    for mut col in s.column_iter_mut() {
        let m = col.amax();
        if m > 0.0 {
            col /= m;
        }
    }
    PivotedQr::new(&s).rank(rel_tol)
}

/// Solves the square or tall system `A x = b` in the least-squares sense.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> Result<DVector<f64>> {
    let x = PivotedQr::new(a).solve_least_squares(b.as_slice(), rel_tol)?;
    Ok(DVector::from_vec(x))
}
