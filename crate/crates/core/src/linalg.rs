//! Small dense helpers: inner products, norms and a symmetric eigensolver.

use crate::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub fn normalized<T: Real>(a: &[T]) -> Option<Vec<T>> {
    let n = norm2(a);
    (n > T::zero()).then(|| scale(a, T::one() / n))
}

/// `min(‖a − b‖, ‖a + b‖)` in plain coordinates.
pub fn min_sign_distance<T: Real>(a: &[T], b: &[T]) -> T {
    let (mut minus, mut plus) = (T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        minus = minus + (x - y) * (x - y);
        plus = plus + (x + y) * (x + y);
    }
    minus.min(plus).sqrt()
}

/// `‖ |a| − |b| ‖` in plain coordinates.
pub fn abs_gap<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x.abs() - y.abs();
            d * d
        })
        .sum::<T>()
        .sqrt()
}

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    pub dim: usize,
    pub data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = T::one();
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    /// `AᵀA` for a row-major `rows × cols` matrix.
    pub fn gram(rows: usize, cols: usize, a: &[T]) -> Self {
        debug_assert_eq!(a.len(), rows * cols);
        let mut g = Self::zeros(cols);
        for r in 0..rows {
            let row = &a[r * cols..(r + 1) * cols];
            for i in 0..cols {
                let ri = row[i];
                if ri == T::zero() {
                    continue;
                }
                for (j, &rj) in row.iter().enumerate().skip(i) {
                    g.data[i * cols + j] = g.data[i * cols + j] + ri * rj;
                }
            }
        }
        for i in 0..cols {
            for j in 0..i {
                g.data[i * cols + j] = g.data[j * cols + i];
            }
        }
        g
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<T>>,
}

/// Cyclic Jacobi rotations; converges quadratically and keeps small
/// eigenvalues accurate relative to the matrix norm.
pub fn symmetric_eigen<T: Real>(matrix: &SquareMatrix<T>) -> SymmetricEigen<T> {
    let n = matrix.dim;
    let mut a = matrix.clone();
    let mut v = SquareMatrix::<T>::identity(n);
    let eps = T::epsilon();

    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let x = a.get(i, j) * a.get(i, j);
                total = total + x;
                if i != j {
                    off = off + x;
                }
            }
        }
        if off <= eps * eps * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .partial_cmp(&a.get(j, j))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    SymmetricEigen {
        values: order.iter().map(|&i| a.get(i, i)).collect(),
        vectors: order
            .iter()
            .map(|&i| (0..n).map(|k| v.get(k, i)).collect())
            .collect(),
    }
}

/// Orthonormal basis of the null space of a row-major `rows × cols` matrix.
///
/// A right singular vector counts as null when its singular value is at most
/// `rel_tol` times the largest one (or when the matrix is zero).
pub fn null_space<T: Real>(rows: usize, cols: usize, a: &[T], rel_tol: T) -> Vec<Vec<T>> {
    let eig = symmetric_eigen(&SquareMatrix::gram(rows, cols, a));
    let top = eig
        .values
        .last()
        .copied()
        .unwrap_or(T::zero())
        .max(T::zero());
    let cut = rel_tol * rel_tol * top;
    eig.values
        .iter()
        .zip(eig.vectors)
        .filter(|(&lambda, _)| lambda <= cut)
        .map(|(_, vec)| vec)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal_is_sorted_diagonal() {
        let mut m = SquareMatrix::<f64>::zeros(3);
        m.set(0, 0, 3.0);
        m.set(1, 1, -1.0);
        m.set(2, 2, 2.0);
        let e = symmetric_eigen(&m);
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, -0.25, 0.5, -0.25, 1.0];
        let m = SquareMatrix {
            dim: 3,
            data: a.to_vec(),
        };
        let e = symmetric_eigen(&m);
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3)
                    .map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j])
                    .sum();
                assert!((r - m.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = SquareMatrix {
            dim: 2,
            data: vec![2.0f32, 1.0, 1.0, 2.0],
        };
        let e = symmetric_eigen(&m);
        assert!((e.values[0] - 1.0).abs() < 1e-6);
        assert!((e.values[1] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn null_space_of_rank_one() {
        // Rows (1,1,0) twice: null space is span{(1,-1,0),(0,0,1)}.
        let a = [1.0f64, 1.0, 0.0, 1.0, 1.0, 0.0];
        let ns = null_space(2, 3, &a, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((v[0] + v[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn plain_gap_and_distance() {
        let f = [1.0, -2.0];
        let g = [-1.0, 2.0];
        assert_eq!(abs_gap(&f, &g), 0.0);
        assert_eq!(min_sign_distance(&f, &g), 0.0);
    }
}
