//! Dense matrices over F_q and packed storage for symmetric results.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::par::Backend;

/// Row-major dense matrix over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(field: &PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = field.elem(1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Fe>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    /// Builds a matrix from raw integers, reducing each mod q.
    pub fn from_u64_rows(field: &PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| field.elem(v)).collect();
        Ok(FieldMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Fe) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        FieldMatrix { rows, cols, data }
    }

    pub fn random<R: Rng + ?Sized>(field: &PrimeField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        FieldMatrix { rows, cols, data }
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

    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Fe] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn matmul(&self, field: &PrimeField, other: &FieldMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ot = other.transpose();
        Ok(Self::from_fn(self.rows, other.cols, |i, j| field.dot(self.row(i), ot.row(j))))
    }

    pub fn add(&self, field: &PrimeField, other: &FieldMatrix) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape("addition of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| field.add(a, b)).collect();
        Ok(FieldMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// `self += c * other`, in place.
    pub fn add_scaled(&mut self, field: &PrimeField, c: Fe, other: &FieldMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape("addition of different shapes".into()));
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = field.add(*a, field.mul(c, b));
        }
        Ok(())
    }

    pub fn scale(&self, field: &PrimeField, c: Fe) -> Self {
        let data = self.data.iter().map(|&a| field.mul(c, a)).collect();
        FieldMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Zero-pads on the right up to `cols` columns.
    pub fn pad_cols(&self, cols: usize) -> Self {
        debug_assert!(cols >= self.cols);
        Self::from_fn(self.rows, cols, |i, j| if j < self.cols { self.get(i, j) } else { Fe::ZERO })
    }

    pub fn column_block(&self, start: usize, width: usize) -> Self {
        Self::from_fn(self.rows, width, |i, j| self.get(i, start + j))
    }

    pub fn row_block(&self, start: usize, height: usize) -> Self {
        Self::from_fn(height, self.cols, |i, j| self.get(start + i, j))
    }

    pub fn hconcat(blocks: &[FieldMatrix]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::Shape("blocks disagree on row count".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    /// Inner product partitioning: `p` column blocks of width ⌈s/p⌉, the
    /// input zero-padded on the right when `p` does not divide `s`.
    pub fn partition_ipp(&self, p: usize) -> Result<Vec<FieldMatrix>> {
        if p == 0 {
            return Err(Error::InvalidPartition(p));
        }
        let width = self.cols.div_ceil(p);
        let padded = self.pad_cols(width * p);
        Ok((0..p).map(|j| padded.column_block(j * width, width)).collect())
    }

    /// Lower triangle of `M·Mᵀ`, one row-pair inner product per entry.
    pub fn gram_lower(&self, field: &PrimeField) -> PackedLower<Fe> {
        self.gram_lower_with(field, Backend::Sequential)
    }

    pub fn gram_lower_with(&self, field: &PrimeField, backend: Backend) -> PackedLower<Fe> {
        let t = self.rows;
        let rows: Vec<Vec<Fe>> =
            backend.map_range(t, |i| (0..=i).map(|j| field.dot(self.row(i), self.row(j))).collect());
        PackedLower { dim: t, entries: rows.into_iter().flatten().collect() }
    }
}

/// Number of entries in the packed lower triangle of a `t×t` matrix.
pub fn triangle_len(t: usize) -> usize {
    t * (t + 1) / 2
}

/// Row-major lower triangle `(0,0), (1,0), (1,1), (2,0), …` of a symmetric
/// (or Hermitian) `dim×dim` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedLower<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Copy> PackedLower<T> {
    pub fn new(dim: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != triangle_len(dim) {
            return Err(Error::Shape(format!("{} packed entries for dimension {dim}", entries.len())));
        }
        Ok(PackedLower { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn index_of(i: usize, j: usize) -> usize {
        debug_assert!(j <= i);
        i * (i + 1) / 2 + j
    }

    /// Entry `(i, j)` with `j <= i`.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[Self::index_of(i, j)]
    }
}

impl PackedLower<Fe> {
    pub fn from_symmetric(m: &FieldMatrix) -> Result<Self> {
        if !m.is_symmetric() {
            return Err(Error::Shape("matrix is not symmetric".into()));
        }
        let entries = (0..m.rows()).flat_map(|i| (0..=i).map(move |j| m.get(i, j))).collect();
        Ok(PackedLower { dim: m.rows(), entries })
    }

    pub fn unpack(&self) -> FieldMatrix {
        FieldMatrix::from_fn(self.dim, self.dim, |i, j| if j <= i { self.get(i, j) } else { self.get(j, i) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Independent triple-loop product, no shared dot helper.
    fn naive_aat(field: &PrimeField, m: &FieldMatrix) -> Vec<Vec<u64>> {
        let q = field.modulus() as u128;
        (0..m.rows())
            .map(|i| {
                (0..m.rows())
                    .map(|j| {
                        let mut acc = 0u128;
                        for k in 0..m.cols() {
                            acc = (acc + m.get(i, k).value() as u128 * m.get(j, k).value() as u128) % q;
                        }
                        acc as u64
                    })
                    .collect()
            })
            .collect()
    }

    fn to_rows(m: &FieldMatrix) -> Vec<Vec<u64>> {
        (0..m.rows()).map(|i| m.row(i).iter().map(|v| v.value()).collect()).collect()
    }

    #[test]
    fn partition_splits_columns() {
        let f = PrimeField::new(11).unwrap();
        let a = FieldMatrix::from_u64_rows(&f, &[vec![1, 2, 3, 4], vec![5, 6, 7, 8]]).unwrap();
        let blocks = a.partition_ipp(2).unwrap();
        assert_eq!(to_rows(&blocks[0]), vec![vec![1, 2], vec![5, 6]]);
        assert_eq!(to_rows(&blocks[1]), vec![vec![3, 4], vec![7, 8]]);
    }

    #[test]
    fn partition_pads_with_zero_columns() {
        let f = PrimeField::new(11).unwrap();
        let a = FieldMatrix::from_u64_rows(&f, &[vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        let blocks = a.partition_ipp(2).unwrap();
        assert_eq!(blocks[1].shape(), (2, 2));
        assert_eq!(to_rows(&blocks[1]), vec![vec![3, 0], vec![6, 0]]);
        assert!(matches!(a.partition_ipp(0), Err(Error::InvalidPartition(0))));
    }

    #[test]
    fn block_grams_sum_to_full_gram() {
        let f = PrimeField::new(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = FieldMatrix::random(&f, 3, 8, &mut rng);
        let mut sum = FieldMatrix::zeros(3, 3);
        for b in a.partition_ipp(4).unwrap() {
            sum = sum.add(&f, &b.matmul(&f, &b.transpose()).unwrap()).unwrap();
        }
        assert_eq!(to_rows(&sum), naive_aat(&f, &a));
    }

    #[test]
    fn gram_of_identity_and_zero() {
        let f = PrimeField::new(7).unwrap();
        let g = FieldMatrix::identity(&f, 2).gram_lower(&f);
        assert_eq!(g.entries(), &[f.elem(1), f.elem(0), f.elem(1)]);
        let z = FieldMatrix::zeros(3, 4).gram_lower(&f);
        assert!(z.entries().iter().all(|v| v.is_zero()));
        assert_eq!(z.entries().len(), 6);
    }

    #[test]
    fn packed_length_is_checked() {
        assert!(PackedLower::<Fe>::new(3, vec![Fe::ZERO; 5]).is_err());
        assert!(PackedLower::<Fe>::new(3, vec![Fe::ZERO; 6]).is_ok());
    }

    #[test]
    fn parallel_gram_matches_sequential() {
        let f = PrimeField::default_field();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = FieldMatrix::random(&f, 17, 33, &mut rng);
        assert_eq!(a.gram_lower_with(&f, Backend::Parallel), a.gram_lower(&f));
    }

    proptest! {
        #[test]
        fn gram_lower_is_aat(t in 1usize..6, s in 1usize..7, seed: u64, q in prop::sample::select(vec![7u64, 11, 65_537, crate::field::DEFAULT_MODULUS])) {
            let f = PrimeField::new(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = FieldMatrix::random(&f, t, s, &mut rng);
            let full = m.gram_lower(&f).unpack();
            prop_assert!(full.is_symmetric());
            prop_assert_eq!(to_rows(&full), naive_aat(&f, &m));
            prop_assert_eq!(PackedLower::from_symmetric(&full).unwrap(), m.gram_lower(&f));
        }

        #[test]
        fn partition_round_trip(s in 1usize..12, p_off in 0usize..12, seed: u64) {
            let p = 1 + p_off % s;
            let f = PrimeField::new(11).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = FieldMatrix::random(&f, 2, s, &mut rng);
            let blocks = a.partition_ipp(p).unwrap();
            prop_assert_eq!(blocks.len(), p);
            let joined = FieldMatrix::hconcat(&blocks).unwrap();
            prop_assert_eq!(joined.column_block(0, s), a);
        }

        #[test]
        fn transpose_laws(seed: u64) {
            let f = PrimeField::new(11).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = FieldMatrix::random(&f, 3, 4, &mut rng);
            let n = FieldMatrix::random(&f, 4, 2, &mut rng);
            prop_assert_eq!(m.transpose().transpose(), m.clone());
            prop_assert_eq!(
                m.matmul(&f, &n).unwrap().transpose(),
                n.transpose().matmul(&f, &m.transpose()).unwrap()
            );
        }
    }
}
