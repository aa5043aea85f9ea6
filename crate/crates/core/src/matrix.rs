use std::fmt;
use std::hash::{Hash, Hasher};

use crate::ffield::{Field, FieldError, SubfieldEmbedding};

/// Square matrix over a [`Field`], entries stored row-major as element codes.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    n: usize,
    entries: Vec<u64>,
}

impl Hash for Matrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.entries.hash(state);
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "] over {}", self.field.spec())
    }
}

impl Matrix {
    pub fn identity(field: &Field, n: usize) -> Self {
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Matrix {
            field: field.clone(),
            n,
            entries,
        }
    }

    pub fn zero(field: &Field, n: usize) -> Self {
        Matrix {
            field: field.clone(),
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn from_codes(field: &Field, n: usize, entries: Vec<u64>) -> Result<Self, FieldError> {
        if entries.len() != n * n {
            return Err(FieldError::DegreeMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        if let Some(&bad) = entries.iter().find(|&&c| c >= field.order()) {
            return Err(FieldError::BadCoefficient {
                value: bad,
                p: field.p(),
            });
        }
        Ok(Matrix {
            field: field.clone(),
            n,
            entries,
        })
    }

    /// Rows of integers mapped into the prime subfield.
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n, "matrix must be square");
                r.iter().map(|&v| field.from_int(v))
            })
            .collect();
        Matrix {
            field: field.clone(),
            n,
            entries,
        }
    }

    /// Identity plus `alpha` at `(i, j)`.
    pub fn elementary(field: &Field, n: usize, i: usize, j: usize, alpha: u64) -> Self {
        let mut m = Matrix::identity(field, n);
        m.entries[i * n + j] = field.add(m.entries[i * n + j], alpha);
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    pub fn same_shape(&self, other: &Matrix) -> bool {
        self.n == other.n && self.field == other.field
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert!(self.same_shape(other));
        let n = self.n;
        let f = &self.field;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                let brow = &other.entries[k * n..(k + 1) * n];
                let orow = &mut out[i * n..(i + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    if b != 0 {
                        *o = f.add(*o, f.mul(a, b));
                    }
                }
            }
        }
        Matrix {
            field: self.field.clone(),
            n,
            entries: out,
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert!(self.same_shape(other));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Matrix {
            field: self.field.clone(),
            n: self.n,
            entries,
        }
    }

    pub fn scale(&self, c: u64) -> Matrix {
        let entries = self.entries.iter().map(|&a| self.field.mul(a, c)).collect();
        Matrix {
            field: self.field.clone(),
            n: self.n,
            entries,
        }
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n).fold(0u64, |acc, k| {
                    self.field.add(acc, self.field.mul(self.entries[i * n + k], v[k]))
                })
            })
            .collect()
    }

    pub fn det(&self) -> u64 {
        let n = self.n;
        let f = &self.field;
        let mut a = self.entries.clone();
        let mut det = 1u64;
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = f.neg(det);
            }
            let pv = a[col * n + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for r in col + 1..n {
                let factor = f.mul(a[r * n + col], pinv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let v = f.mul(factor, a[col * n + j]);
                    a[r * n + j] = f.sub(a[r * n + j], v);
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let f = &self.field;
        let mut a = self.entries.clone();
        let mut inv = Matrix::identity(f, n).entries;
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r * n + col] != 0)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let pinv = f.inv(a[col * n + col])?;
            for j in 0..n {
                a[col * n + j] = f.mul(a[col * n + j], pinv);
                inv[col * n + j] = f.mul(inv[col * n + j], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    let va = f.mul(factor, a[col * n + j]);
                    a[r * n + j] = f.sub(a[r * n + j], va);
                    let vi = f.mul(factor, inv[col * n + j]);
                    inv[r * n + j] = f.sub(inv[r * n + j], vi);
                }
            }
        }
        Some(Matrix {
            field: self.field.clone(),
            n,
            entries: inv,
        })
    }

    /// Entrywise image under a subfield inclusion.
    pub fn embed(&self, emb: &SubfieldEmbedding) -> Matrix {
        debug_assert_eq!(&self.field, emb.base());
        Matrix {
            field: emb.ext().clone(),
            n: self.n,
            entries: self.entries.iter().map(|&c| emb.embed(c)).collect(),
        }
    }

    /// Copy of `self` placed on the index set `positions` of an identity
    /// matrix of size `size`.
    pub fn place(&self, size: usize, positions: &[usize]) -> Matrix {
        assert_eq!(positions.len(), self.n);
        let mut out = Matrix::identity(&self.field, size);
        for (a, &i) in positions.iter().enumerate() {
            for (b, &j) in positions.iter().enumerate() {
                out.set(i, j, self.get(a, b));
            }
        }
        out
    }

    /// Big-endian fixed-width encoding of the entries, row-major.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        let width = code_width(self.field.order());
        for &c in &self.entries {
            let bytes = c.to_be_bytes();
            out.extend_from_slice(&bytes[8 - width..]);
        }
    }
}

/// Bytes needed to hold every code of a field of the given order.
pub fn code_width(order: u64) -> usize {
    let max = order.saturating_sub(1);
    let bits = 64 - max.leading_zeros() as usize;
    bits.div_ceil(8).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_inverse_small() {
        let f3 = Field::prime(3).unwrap();
        let a = Matrix::from_ints(&f3, &[&[1, 1], &[0, 1]]);
        assert_eq!(a.mul(&a), Matrix::from_ints(&f3, &[&[1, 2], &[0, 1]]));
        let f5 = Field::prime(5).unwrap();
        let a5 = Matrix::from_ints(&f5, &[&[1, 1], &[0, 1]]);
        assert_eq!(a5.inverse().unwrap(), Matrix::from_ints(&f5, &[&[1, 4], &[0, 1]]));
        let b5 = Matrix::from_ints(&f5, &[&[0, 1], &[-1, 0]]);
        assert_eq!(b5.inverse().unwrap(), Matrix::from_ints(&f5, &[&[0, -1], &[1, 0]]));
    }

    #[test]
    fn det_of_product_is_product_of_dets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let f = Field::with_degree(3, 2).unwrap();
        for _ in 0..200 {
            let a = Matrix::from_codes(&f, 3, (0..9).map(|_| rng.gen_range(0..9)).collect()).unwrap();
            let b = Matrix::from_codes(&f, 3, (0..9).map(|_| rng.gen_range(0..9)).collect()).unwrap();
            assert_eq!(a.mul(&b).det(), f.mul(a.det(), b.det()));
            match a.inverse() {
                Some(ai) => assert!(a.mul(&ai).is_identity()),
                None => assert_eq!(a.det(), 0),
            }
        }
    }

    #[test]
    fn code_widths() {
        assert_eq!(code_width(2), 1);
        assert_eq!(code_width(256), 1);
        assert_eq!(code_width(257), 2);
        assert_eq!(code_width(1 << 20), 3);
    }
}
