use crate::scalar::Real;

use super::PreprocessError;

/// Sparse feature vector: strictly increasing indices, finite weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector<T> {
    entries: Vec<(usize, T)>,
}

impl<T: Real> SparseVector<T> {
    pub fn zeros() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn from_entries(entries: Vec<(usize, T)>) -> Result<Self, PreprocessError> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(PreprocessError::InvalidVector(format!(
                    "indices not strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(i, _)) = entries.iter().find(|(_, v)| !v.is_finite()) {
            return Err(PreprocessError::InvalidVector(format!(
                "non-finite weight at index {i}"
            )));
        }
        Ok(Self { entries })
    }

    /// Builds from a dense slice, keeping non-zero entries.
    pub fn from_dense(values: &[T]) -> Result<Self, PreprocessError> {
        Self::from_entries(
            values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != T::zero())
                .map(|(i, &v)| (i, v))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, v)| *v == T::zero())
    }

    /// One past the largest index, or 0 for the empty vector.
    pub fn dim_lower_bound(&self) -> usize {
        self.entries.last().map_or(0, |(i, _)| i + 1)
    }

    pub fn norm(&self) -> T {
        self.entries.iter().map(|&(_, v)| v * v).sum::<T>().sqrt()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            entries: self.entries.iter().map(|&(i, v)| (i, v * s)).collect(),
        }
    }

    /// Unit-L2 copy; the zero vector stays zero.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == T::zero() {
            return self.clone();
        }
        Self {
            entries: self.entries.iter().map(|&(i, v)| (i, v / n)).collect(),
        }
    }

    /// `acc += s · self` over a dense accumulator.
    pub fn axpy_into(&self, s: T, acc: &mut [T]) {
        for &(i, v) in &self.entries {
            acc[i] = acc[i] + s * v;
        }
    }

    /// Dot product with a dense vector; indices beyond `dense` are ignored.
    pub fn dot_dense(&self, dense: &[T]) -> T {
        self.entries
            .iter()
            .filter(|(i, _)| *i < dense.len())
            .map(|&(i, v)| v * dense[i])
            .sum()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<T> {
        let mut d = vec![T::zero(); dim];
        for &(i, v) in &self.entries {
            if i < dim {
                d[i] = v;
            }
        }
        d
    }
}

/// A training pair: feature vector plus its class index.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVector<T> {
    pub vector: SparseVector<T>,
    pub class_index: usize,
}

impl<T: Real> LabeledVector<T> {
    pub fn new(vector: SparseVector<T>, class_index: usize) -> Self {
        Self { vector, class_index }
    }
}
