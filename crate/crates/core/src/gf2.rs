//! Small dense GF(2) matrices with rows packed into `u32` words.

/// Row-major bit matrix; bit `j` of `rows[i]` is entry `(i, j)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitMatrix {
    pub cols: usize,
    pub rows: Vec<u32>,
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { cols, rows: vec![0; rows] }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix { cols: n, rows: (0..n).map(|i| 1u32 << i).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<u32>) -> Self {
        BitMatrix { cols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        self.rows[i] ^= 1 << j;
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.nrows());
        for (i, &r) in self.rows.iter().enumerate() {
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                t.rows[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        t
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.nrows(), "inner dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u32;
                let mut bits = r;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    acc ^= other.rows[j];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        BitMatrix { cols: other.cols, rows }
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.nrows(), other.nrows());
        BitMatrix {
            cols: self.cols,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Columns listed in `order` become columns `0..order.len()`.
    pub fn select_columns(&self, order: &[usize]) -> BitMatrix {
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                order
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (new, &old)| acc | (((r >> old) & 1) << new))
            })
            .collect();
        BitMatrix { cols: order.len(), rows }
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == m.nrows() {
                break;
            }
            let Some(p) = (r..m.nrows()).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.rows.swap(r, p);
            for i in 0..m.nrows() {
                if i != r && m.get(i, c) {
                    m.rows[i] ^= m.rows[r];
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.nrows();
        if n != self.cols {
            return None;
        }
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| a.get(i, c))?;
            a.rows.swap(c, p);
            inv.rows.swap(c, p);
            for i in 0..n {
                if i != c && a.get(i, c) {
                    a.rows[i] ^= a.rows[c];
                    inv.rows[i] ^= inv.rows[c];
                }
            }
        }
        Some(inv)
    }

    /// A basis of the right kernel `{v : M v = 0}` as bit vectors.
    pub fn kernel(&self) -> Vec<u32> {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = 1u32 << f;
                for (r, &p) in pivots.iter().enumerate() {
                    if matrix.get(r, f) {
                        v |= 1 << p;
                    }
                }
                v
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.cols == self.nrows() && *self == self.transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_of_codeword_example() {
        let a = BitMatrix::from_rows(4, vec![0b1101, 0b0110]);
        let r = a.rref();
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.matrix.rows, vec![0b1101, 0b0110]);
    }

    #[test]
    fn inverse_round_trip() {
        let a = BitMatrix::from_rows(3, vec![0b011, 0b110, 0b001]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), BitMatrix::identity(3));
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = BitMatrix::from_rows(2, vec![0b11, 0b11]);
        assert!(a.inverse().is_none());
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = BitMatrix::from_rows(5, vec![0b10110, 0b01011]);
        let ker = a.kernel();
        assert_eq!(ker.len(), 3);
        for v in ker {
            for &r in &a.rows {
                assert_eq!((r & v).count_ones() % 2, 0);
            }
        }
    }
}
