//! Small dense matrices and least-squares fits.
//!
//! Every matrix in this crate is an n x n Hessian with n <= 8, so a flat
//! row-major buffer with Gaussian elimination (partial pivoting) covers all
//! inversion needs, and regression problems never exceed three columns.

use crate::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    /// Zero matrix of size n x n.
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0.0; n * n] }
    }

    /// Identity matrix of size n x n.
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Side length.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Matrix product self * rhs.
    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "size mismatch in Mat::mul");
        let n = self.n;
        Mat::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len(), "size mismatch in Mat::mul_vec");
        (0..self.n).map(|i| (0..self.n).map(|k| self[(i, k)] * v[k]).sum()).collect()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Mat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot_row =
                (col..n).max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs())).unwrap();
            if a[(pivot_row, col)].abs() == 0.0 {
                return Err(Error::SingularMatrix { col });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = a[(i, col)];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] -= factor * a[(col, j)];
                    inv[(i, j)] -= factor * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    /// Largest absolute entry of self * rhs - I.
    pub fn max_product_deviation(&self, rhs: &Mat) -> f64 {
        let prod = self.mul(rhs);
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Largest absolute asymmetry |a_ij - a_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for col in 0..self.n {
            self.a.swap(i * self.n + col, j * self.n + col);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

/// Linear least squares: coefficients c minimizing |y - sum_k c_k cols_k|.
///
/// Columns are rescaled to unit max-norm before forming normal equations, so
/// regressors of wildly different magnitude (1 versus r^n near the origin)
/// stay well conditioned. Panics on empty input; returns an error only when
/// the scaled normal matrix is singular.
pub(crate) fn least_squares(cols: &[&[f64]], y: &[f64]) -> Result<Vec<f64>> {
    let k = cols.len();
    let m = y.len();
    assert!(k >= 1 && m >= k, "least_squares needs at least as many rows as columns");
    let scales: Vec<f64> = cols
        .iter()
        .map(|c| {
            let s = c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if s == 0.0 {
                1.0
            } else {
                s
            }
        })
        .collect();
    let mut ata = Mat::zeros(k);
    let mut aty = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            let mut s = 0.0;
            for (a, b) in cols[i].iter().zip(cols[j]) {
                s += a / scales[i] * (b / scales[j]);
            }
            ata[(i, j)] = s;
        }
        let mut s = 0.0;
        for row in 0..m {
            s += cols[i][row] / scales[i] * y[row];
        }
        aty[i] = s;
    }
    let inv = ata.inverse()?;
    let scaled = inv.mul_vec(&aty);
    Ok(scaled.iter().zip(&scales).map(|(c, s)| c / s).collect())
}

/// Root mean square of a residual slice.
pub(crate) fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}
