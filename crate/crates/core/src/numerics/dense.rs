use std::ops::{Index, IndexMut};

use crate::scalar::Real;

use super::NumericsError;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, values: Vec<T>) -> Result<Self, NumericsError> {
        if values.len() != rows * cols {
            return Err(NumericsError::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, NumericsError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(NumericsError::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> T {
        self.diag().into_iter().sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(orow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, x: &[T]) -> Result<Vec<T>, NumericsError> {
        if x.len() != self.cols {
            return Err(NumericsError::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn add_to_diagonal(&mut self, delta: T) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] = self[(i, i)] + delta;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, &v| if v.abs() > m { v.abs() } else { m })
    }

    /// Checks `|a_ij - a_ji| <= rel_tol * max|a|` for every off-diagonal pair.
    pub fn is_symmetric(&self, rel_tol: T) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(T::min_positive_value());
        for i in 0..self.rows {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Keeps the rows and columns listed in `keep`, in that order.
    pub fn select_square(&self, keep: &[usize]) -> Self {
        let mut out = Self::zeros(keep.len(), keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.values[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.values[r * self.cols + c]
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor<T> {
    lower: DenseMatrix<T>,
}

impl<T: Real> CholeskyFactor<T> {
    pub fn lower(&self) -> &DenseMatrix<T> {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    /// `L Lᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = dot_slices(&self.lower.row(i)[..=j], &self.lower.row(j)[..=j]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        a
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, NumericsError> {
        let n = self.dim();
        if b.len() != n {
            return Err(NumericsError::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let s = dot_slices(&l.row(i)[..i], &y[..i]);
            y[i] = (y[i] - s) / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        Ok(y)
    }

    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        two * self.lower.diag().into_iter().map(|d| d.ln()).sum::<T>()
    }

    /// `A⁻¹ = L⁻ᵀ L⁻¹`, exactly symmetric.
    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let l = &self.lower;
        // Column j of L⁻¹ by forward substitution, stored as row j of `linv_t`
        // so both substitution and the product below walk contiguous memory.
        let mut linv_t = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let col = linv_t.row_mut(j);
            col[j] = T::one() / l[(j, j)];
            for i in j + 1..n {
                let s = dot_slices(&l.row(i)[j..i], &col[j..i]);
                col[i] = -s / l[(i, i)];
            }
        }
        let mut inv = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot_slices(&linv_t.row(i)[j..], &linv_t.row(j)[j..]);
                inv[(i, j)] = v;
                inv[(j, i)] = v;
            }
        }
        inv
    }
}

const SYMMETRY_TOL: f64 = 1e-9;

/// `Σ a_i b_i` over the common prefix, accumulated in four interleaved
/// partial sums so the loop vectorizes.
pub fn dot_slices<T: Real>(a: &[T], b: &[T]) -> T {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: T = ca.remainder().iter().zip(cb.remainder()).map(|(&x, &y)| x * y).sum();
    let mut acc = [T::zero(); 4];
    for (x, y) in ca.zip(cb) {
        acc[0] = acc[0] + x[0] * y[0];
        acc[1] = acc[1] + x[1] * y[1];
        acc[2] = acc[2] + x[2] * y[2];
        acc[3] = acc[3] + x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Factors a symmetric positive-definite matrix. Reads the lower triangle.
pub fn cholesky<T: Real>(a: &DenseMatrix<T>) -> Result<CholeskyFactor<T>, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_symmetric(T::lit(SYMMETRY_TOL)) {
        return Err(NumericsError::NotSymmetric);
    }
    factor_lower(a, T::zero())
}

fn factor_lower<T: Real>(a: &DenseMatrix<T>, jitter: T) -> Result<CholeskyFactor<T>, NumericsError> {
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let (head, tail) = l.values.split_at_mut(j * n);
        let row_j = &mut tail[..n];
        // Fill row j left of the diagonal: L[j][k] for k < j.
        for k in 0..j {
            let row_k = &head[k * n..k * n + n];
            let s = dot_slices(&row_j[..k], &row_k[..k]);
            row_j[k] = (a[(j, k)] - s) / row_k[k];
        }
        let s = dot_slices(&row_j[..j], &row_j[..j]);
        let pivot = a[(j, j)] + jitter - s;
        if !(pivot > T::zero()) || !pivot.is_finite() {
            return Err(NumericsError::NotPositiveDefinite { pivot: j });
        }
        row_j[j] = pivot.sqrt();
    }
    Ok(CholeskyFactor { lower: l })
}

/// Cholesky with a diagonal jitter ladder: `1e-10·trace/n` escalating ×10 up
/// to `1e-4·trace/n`. Returns the factor and the jitter that was applied.
pub fn cholesky_jittered<T: Real>(a: &DenseMatrix<T>) -> Result<(CholeskyFactor<T>, T), NumericsError> {
    match cholesky(a) {
        Ok(f) => return Ok((f, T::zero())),
        Err(NumericsError::NotPositiveDefinite { .. }) => {}
        Err(e) => return Err(e),
    }
    let n = a.rows().max(1);
    let mut scale = a.trace() / T::from_count(n);
    if !(scale > T::zero()) {
        scale = T::one();
    }
    let mut last = NumericsError::NotPositiveDefinite { pivot: 0 };
    let mut rung = T::lit(1e-10);
    let top = T::lit(1e-4) * T::lit(1.0 + 1e-6);
    while rung <= top {
        let jitter = rung * scale;
        log::warn!("cholesky: adding diagonal jitter {:e}", jitter);
        match factor_lower(a, jitter) {
            Ok(f) => return Ok((f, jitter)),
            Err(e) => last = e,
        }
        rung = rung * T::lit(10.0);
    }
    Err(last)
}

pub fn solve<T: Real>(factor: &CholeskyFactor<T>, b: &[T]) -> Result<Vec<T>, NumericsError> {
    factor.solve(b)
}

pub fn log_det<T: Real>(factor: &CholeskyFactor<T>) -> T {
    factor.log_det()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_factors_to_identity() {
        let f = cholesky(&DenseMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(f.lower(), &DenseMatrix::identity(3));
    }

    #[test]
    fn two_by_two_hand_expansion() {
        let f = cholesky(&m(&[&[4.0, 2.0], &[2.0, 3.0]])).unwrap();
        let l = f.lower();
        assert_eq!(l[(0, 0)], 2.0);
        assert_eq!(l[(0, 1)], 0.0);
        assert_eq!(l[(1, 0)], 1.0);
        assert!((l[(1, 1)] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn indefinite_fails_at_pivot_one() {
        let err = cholesky(&m(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap_err();
        assert_eq!(err, NumericsError::NotPositiveDefinite { pivot: 1 });
    }

    #[test]
    fn asymmetric_rejected() {
        let err = cholesky(&m(&[&[4.0, 2.0], &[1.0, 3.0]])).unwrap_err();
        assert_eq!(err, NumericsError::NotSymmetric);
    }

    #[test]
    fn solve_examples() {
        let id = cholesky(&DenseMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(solve(&id, &[1.0, -2.0, 3.5]).unwrap(), vec![1.0, -2.0, 3.5]);
        let f = cholesky(&m(&[&[4.0, 2.0], &[2.0, 3.0]])).unwrap();
        let x = solve(&f, &[8.0, 7.0]).unwrap();
        assert!((x[0] - 1.25).abs() < 1e-14 && (x[1] - 1.5).abs() < 1e-14);
        assert_eq!(solve(&f, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(
            solve(&f, &[1.0]),
            Err(NumericsError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn log_det_examples() {
        let id = cholesky(&DenseMatrix::<f64>::identity(4)).unwrap();
        assert_eq!(log_det(&id), 0.0);
        let d = cholesky(&DenseMatrix::diagonal(&[2.0, 2.0])).unwrap();
        assert!((log_det(&d) - 2.0 * 2f64.ln()).abs() < 1e-15);
        let f = cholesky(&m(&[&[4.0, 2.0], &[2.0, 3.0]])).unwrap();
        assert!((log_det(&f) - 8f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn inverse_of_two_by_two() {
        let f = cholesky(&m(&[&[4.0, 2.0], &[2.0, 3.0]])).unwrap();
        let inv = f.inverse();
        // det 8: inverse = [[3,-2],[-2,4]]/8
        let want = [[0.375, -0.25], [-0.25, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[(i, j)] - want[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn jitter_rescues_semidefinite() {
        // rank one: [[1,1],[1,1]]
        let a = m(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(cholesky(&a).is_err());
        let (_, jitter) = cholesky_jittered(&a).unwrap();
        assert!(jitter > 0.0 && jitter <= 1e-4);
        let bad = m(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(cholesky_jittered(&bad).is_err());
    }

    #[test]
    fn f32_factorization() {
        let a = DenseMatrix::<f32>::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let f = cholesky(&a).unwrap();
        assert!((f.log_det() - 8f32.ln()).abs() < 1e-5);
    }
}
