//! Dense complex matrices for the analog scheme.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::PackedLower;
use crate::par::Backend;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(ComplexMatrix { rows: rows.len(), cols, data })
    }

    /// Entries drawn uniformly from `[-1, 1)`, imaginary parts zero.
    pub fn random_real<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()))
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape("subtraction of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn add_scaled(&mut self, c: Complex64, other: &ComplexMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape("addition of different shapes".into()));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..=i).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    pub fn pad_cols(&self, cols: usize) -> Self {
        Self::from_fn(self.rows, cols, |i, j| if j < self.cols { self.get(i, j) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn column_block(&self, start: usize, width: usize) -> Self {
        Self::from_fn(self.rows, width, |i, j| self.get(i, start + j))
    }

    pub fn partition_ipp(&self, p: usize) -> Result<Vec<ComplexMatrix>> {
        if p == 0 {
            return Err(Error::InvalidPartition(p));
        }
        let width = self.cols.div_ceil(p);
        let padded = self.pad_cols(width * p);
        Ok((0..p).map(|j| padded.column_block(j * width, width)).collect())
    }

    /// Lower triangle of `M·M*`. Summation inside each entry runs in column
    /// order so results are reproducible across backends.
    pub fn gram_lower_with(&self, backend: Backend) -> PackedLower<Complex64> {
        let t = self.rows;
        let rows: Vec<Vec<Complex64>> = backend.map_range(t, |i| {
            (0..=i).map(|j| self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b.conj()).sum()).collect()
        });
        PackedLower::new(t, rows.into_iter().flatten().collect()).expect("triangle length")
    }

    pub fn gram_lower(&self) -> PackedLower<Complex64> {
        self.gram_lower_with(Backend::Sequential)
    }
}

impl PackedLower<Complex64> {
    /// Expands to the full Hermitian matrix.
    pub fn unpack_hermitian(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(
            self.dim(),
            self.dim(),
            |i, j| {
                if j <= i {
                    self.get(i, j)
                } else {
                    self.get(j, i).conj()
                }
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gram_is_hermitian_with_real_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = ComplexMatrix::random(4, 7, &mut rng);
        let g = a.gram_lower().unpack_hermitian();
        assert!(g.is_hermitian(1e-14));
        for i in 0..4 {
            assert!(g.get(i, i).im.abs() < 1e-14);
            assert!(g.get(i, i).re >= 0.0);
        }
        let direct = a.matmul(&a.conj_transpose()).unwrap();
        assert!(g.sub(&direct).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn conj_transpose_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = ComplexMatrix::random(3, 5, &mut rng);
        assert_eq!(a.conj_transpose().conj_transpose(), a);
    }
}
