//! Jacobi-preconditioned conjugate gradient on a compressed sparse row matrix.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct CsrMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(col, value)` lists.
    pub(crate) fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { row_ptr, cols, vals }
    }

    pub(crate) fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            *yi = self.cols[lo..hi]
                .iter()
                .zip(&self.vals[lo..hi])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
                (lo..hi).find(|&k| self.cols[k] == i).map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖b - Ax‖ / ‖b‖`, recomputed from scratch at exit.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `Ax = b` for symmetric positive definite `A` until the true relative
/// residual is at most `tol`. The recurrence residual drifts from the true one
/// in floating point, so convergence is confirmed against `b - Ax` and the
/// iteration restarts from the current iterate when they disagree.
pub(crate) fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<CgOutcome> {
    let n = a.dim();
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut iterations = 0;

    loop {
        // (re)start from the true residual
        a.mul_into(&x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        let true_residual = norm(&r) / b_norm;
        if true_residual <= tol {
            return Ok(CgOutcome {
                x,
                iterations,
                residual: true_residual,
            });
        }
        if iterations >= max_iter {
            return Err(Error::NotConverged {
                iterations,
                residual: true_residual,
            });
        }

        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        let mut stalled = true;

        while iterations < max_iter {
            iterations += 1;
            a.mul_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 || !pap.is_finite() {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            stalled = false;
            if norm(&r) / b_norm <= tol {
                break;
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        if stalled {
            a.mul_into(&x, &mut ap);
            let residual = norm(&b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect::<Vec<_>>()) / b_norm;
            if residual <= tol {
                return Ok(CgOutcome {
                    x,
                    iterations,
                    residual,
                });
            }
            return Err(Error::NotConverged { iterations, residual });
        }
    }
}
