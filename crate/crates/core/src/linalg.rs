use crate::scalar::Scalar;

/// Dense row-major square matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.n + j] = self.data[i * self.n + j] + x;
    }

    /// `max_i |(A x - b)_i|`.
    pub fn residual(&self, x: &[T], b: &[T]) -> T {
        (0..self.n)
            .map(|i| {
                let ax = (0..self.n).fold(T::zero(), |acc, j| acc + self.get(i, j) * x[j]);
                (ax - b[i]).abs()
            })
            .fold(T::zero(), T::max)
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    ///
    /// On a zero pivot returns `Err(column)` identifying the offending unknown.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, usize> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .abs()
                        .partial_cmp(&a[s * n + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            let pv = a[pivot * n + col];
            if !(pv.abs() > T::min_positive_value()) {
                return Err(col);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                x.swap(pivot, col);
            }
            for r in col + 1..n {
                let f = a[r * n + col] / pv;
                if f == T::zero() {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = a[r * n + j] - f * a[col * n + j];
                }
                x[r] = x[r] - f * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut s = x[col];
            for j in col + 1..n {
                s = s - a[col * n + j] * x[j];
            }
            x[col] = s / a[col * n + col];
        }
        Ok(x)
    }
}
