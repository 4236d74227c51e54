use crate::preprocess::SparseVector;
use crate::scalar::Real;

use super::DenseMatrix;

/// Sum of weight products over shared indices (merge of two sorted lists).
pub fn dot<T: Real>(x: &SparseVector<T>, y: &SparseVector<T>) -> T {
    let (a, b) = (x.entries(), y.entries());
    let (mut i, mut j) = (0, 0);
    let mut acc = T::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc = acc + a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Kernel function over sparse vectors. Only the linear kernel ships.
pub trait Kernel<T: Real>: Send + Sync {
    fn eval(&self, x: &SparseVector<T>, y: &SparseVector<T>) -> T;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinearKernel;

impl<T: Real> Kernel<T> for LinearKernel {
    fn eval(&self, x: &SparseVector<T>, y: &SparseVector<T>) -> T {
        dot(x, y)
    }
}

/// Symmetric `N×N` kernel matrix; each unordered pair is evaluated once.
pub fn gram_matrix_with<T: Real, K: Kernel<T>>(kernel: &K, vectors: &[SparseVector<T>]) -> DenseMatrix<T> {
    let n = vectors.len();
    let mut g = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&vectors[i], &vectors[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Linear-kernel Gram matrix.
pub fn gram_matrix<T: Real>(vectors: &[SparseVector<T>]) -> DenseMatrix<T> {
    gram_matrix_with(&LinearKernel, vectors)
}
