//! Dense row-major matrices and a column-pivoted Householder QR.

use serde::{Deserialize, Serialize};

/// Relative tolerance for rank detection: a pivot column whose remaining
/// norm falls below this fraction of the largest original column norm is
/// treated as linearly dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows * cols");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![0.0; rows * cols])
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Xᵀ v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                *o += x * vi;
            }
        }
        out
    }

    /// Multiplies row `i` by `factors[i]`.
    pub fn scale_rows(&self, factors: &[f64]) -> Matrix {
        assert_eq!(factors.len(), self.rows);
        let mut out = self.clone();
        for (i, f) in factors.iter().enumerate() {
            for x in &mut out.data[i * self.cols..(i + 1) * self.cols] {
                *x *= f;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// `A P = Q R` with column pivoting by largest remaining norm.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// Column-major working storage. Column `k` holds the Householder
    /// vector `v_k` in rows `k..m`; entries above the diagonal hold `R`.
    work: Vec<Vec<f64>>,
    r_diag: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
    rows: usize,
}

impl PivotedQr {
    pub fn decompose(a: &Matrix) -> Self {
        let (m, n) = (a.nrows(), a.ncols());
        let mut work: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut r_diag = vec![0.0; n];

        let norm_from = |col: &[f64], k: usize| col[k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let max_norm = work.iter().map(|c| norm_from(c, 0)).fold(0.0, f64::max);
        let threshold = RANK_TOLERANCE * max_norm;

        let mut rank = 0;
        for k in 0..n.min(m) {
            let (best, best_norm) = (k..n)
                .map(|j| (j, norm_from(&work[j], k)))
                .fold((k, -1.0), |acc, (j, nj)| if nj > acc.1 { (j, nj) } else { acc });
            if best_norm <= threshold || best_norm == 0.0 {
                break;
            }
            work.swap(k, best);
            perm.swap(k, best);

            let alpha = if work[k][k] > 0.0 { -best_norm } else { best_norm };
            work[k][k] -= alpha;
            let vtv: f64 = work[k][k..].iter().map(|v| v * v).sum();
            let (head, tail) = work.split_at_mut(k + 1);
            let v = &head[k][k..];
            if vtv > 0.0 {
                for col in tail.iter_mut() {
                    let dot: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
                    let s = 2.0 * dot / vtv;
                    for (c, vi) in col[k..].iter_mut().zip(v) {
                        *c -= s * vi;
                    }
                }
            }
            r_diag[k] = alpha;
            rank = k + 1;
        }
        PivotedQr {
            work,
            r_diag,
            perm,
            rank,
            rows: m,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.perm.len()
    }

    /// Original indices of the columns left out of the pivoted basis.
    pub fn dependent_columns(&self) -> Vec<usize> {
        let mut v = self.perm[self.rank..].to_vec();
        v.sort_unstable();
        v
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.r_diag[i]
        } else {
            self.work[j][i]
        }
    }

    /// `Qᵀ y` using the stored reflectors.
    fn apply_qt(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = y.to_vec();
        for k in 0..self.rank {
            let v = &self.work[k][k..];
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            if vtv == 0.0 {
                continue;
            }
            let dot: f64 = v.iter().zip(&out[k..]).map(|(a, b)| a * b).sum();
            let s = 2.0 * dot / vtv;
            for (o, vi) in out[k..].iter_mut().zip(v) {
                *o -= s * vi;
            }
        }
        out
    }

    /// Least-squares coefficients in the original column order. `None` when
    /// the matrix is rank deficient.
    pub fn solve(&self, y: &[f64]) -> Option<Vec<f64>> {
        if !self.is_full_rank() {
            return None;
        }
        let n = self.rank;
        let qty = self.apply_qt(y);
        let mut z = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| self.r(i, j) * z[j]).sum();
            z[i] = (qty[i] - s) / self.r(i, i);
        }
        let mut beta = vec![0.0; n];
        for (k, &orig) in self.perm.iter().enumerate() {
            beta[orig] = z[k];
        }
        Some(beta)
    }

    /// `(AᵀA)⁻¹ = P R⁻¹ R⁻ᵀ Pᵀ`, original column order.
    pub fn unscaled_covariance(&self) -> Option<Matrix> {
        if !self.is_full_rank() {
            return None;
        }
        let n = self.rank;
        // Upper-triangular inverse, column by column.
        let mut rinv = Matrix::zeros(n, n);
        for j in 0..n {
            rinv.set(j, j, 1.0 / self.r(j, j));
            for i in (0..j).rev() {
                let s: f64 = ((i + 1)..=j).map(|k| self.r(i, k) * rinv.get(k, j)).sum();
                rinv.set(i, j, -s / self.r(i, i));
            }
        }
        let mut cov = Matrix::zeros(n, n);
        for a in 0..n {
            for b in 0..=a {
                let s: f64 = (a.max(b)..n).map(|k| rinv.get(a, k) * rinv.get(b, k)).sum();
                let (pa, pb) = (self.perm[a], self.perm[b]);
                cov.set(pa, pb, s);
                cov.set(pb, pa, s);
            }
        }
        Some(cov)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_exact_line() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]);
        let qr = PivotedQr::decompose(&x);
        let beta = qr.solve(&[1.0, 3.0, 5.0]).unwrap();
        assert!((beta[0] - 1.0).abs() < 1e-14);
        assert!((beta[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn detects_duplicate_column() {
        let x = Matrix::from_rows(&[
            vec![1.0, 2.0, 2.0],
            vec![1.0, 3.0, 3.0],
            vec![1.0, 5.0, 5.0],
            vec![1.0, 7.0, 7.0],
        ]);
        let qr = PivotedQr::decompose(&x);
        assert_eq!(qr.rank(), 2);
        assert_eq!(qr.dependent_columns().len(), 1);
        assert!(qr.solve(&[1.0, 2.0, 3.0, 4.0]).is_none());
    }

    #[test]
    fn covariance_inverts_gram_matrix() {
        let x = Matrix::from_rows(&[
            vec![1.0, 0.5, -1.0],
            vec![1.0, 1.5, 2.0],
            vec![1.0, -0.3, 0.7],
            vec![1.0, 2.2, 1.1],
            vec![1.0, 0.9, -0.4],
        ]);
        let cov = PivotedQr::decompose(&x).unscaled_covariance().unwrap();
        // (XᵀX) cov = I
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    let g: f64 = (0..5).map(|r| x.get(r, i) * x.get(r, k)).sum();
                    s += g * cov.get(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12, "({i},{j}) = {s}");
            }
        }
    }
}
