//! Minimal dense square matrix used by the filter recursions.

use crate::scalar::Scalar;

/// Row-major `dim x dim` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn scaled_identity(dim: usize, scale: T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = scale;
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, T::one())
    }

    /// Builds from row-major data; `None` when the length is not a square.
    pub fn from_row_major(dim: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: T) {
        self.data[row * self.dim + col] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.dim);
        self.data
            .chunks_exact(self.dim)
            .map(|row| dot(row, v))
            .collect()
    }

    /// `vᵀ * self`.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.dim);
        let mut out = vec![T::zero(); self.dim];
        for (row, &vi) in self.data.chunks_exact(self.dim).zip(v) {
            if vi == T::zero() {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(row) {
                *o = *o + vi * r;
            }
        }
        out
    }

    /// In-place `self ← (self − a bᵀ) · scale`.
    pub fn rank_one_update_scaled(&mut self, a: &[T], b: &[T], scale: T) {
        for (row, &ai) in self.data.chunks_exact_mut(self.dim).zip(a) {
            for (m, &bj) in row.iter_mut().zip(b) {
                *m = (*m - ai * bj) * scale;
            }
        }
    }

    /// Replaces the matrix by `(M + Mᵀ) / 2`.
    pub fn symmetrize(&mut self) {
        let half = T::of(0.5);
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let avg = (self.data[i * self.dim + j] + self.data[j * self.dim + i]) * half;
                self.data[i * self.dim + j] = avg;
                self.data[j * self.dim + i] = avg;
            }
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// `max |M − Mᵀ|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm_sq<T: Scalar>(a: &[T]) -> T {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_vec_and_vec_mul_agree_on_symmetric() {
        let m = SquareMatrix::from_row_major(2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let v = [1.0, -1.0];
        assert_eq!(m.mul_vec(&v), vec![1.0, -2.0]);
        assert_eq!(m.vec_mul(&v), vec![1.0, -2.0]);
    }

    #[test]
    fn symmetrize_averages_off_diagonal() {
        let mut m = SquareMatrix::from_row_major(2, vec![1.0, 2.0, 4.0, 1.0]).unwrap();
        assert_eq!(m.asymmetry(), 2.0);
        m.symmetrize();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.asymmetry(), 0.0);
    }

    #[test]
    fn from_row_major_rejects_bad_len() {
        assert!(SquareMatrix::<f64>::from_row_major(3, vec![0.0; 8]).is_none());
    }
}
