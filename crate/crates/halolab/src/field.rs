//! Prime fields and small dense matrices over them.

use crate::error::{HaloError, Result};
use serde::{Deserialize, Serialize};

/// The prime field of order `q`. Scalars are plain `u32` values in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeField {
    q: u32,
}

/// A field element tagged with nothing but its value; the field travels separately.
pub type FieldScalar = u32;

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 || !is_prime(q) {
            return Err(HaloError::InvalidInput(format!("field order {q} is not prime")));
        }
        Ok(PrimeField { q })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a % self.q == 0 {
            return None;
        }
        // Fermat: a^(q-2)
        let mut base = a as u64 % self.q as u64;
        let mut exp = self.q - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.q as u64;
            }
            base = base * base % self.q as u64;
            exp >>= 1;
        }
        Some(acc as u32)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = u32> {
        1..self.q
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while (k as u64) * (k as u64) <= n as u64 {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Square matrix stored row-major. Column `j` is the image of the `j`-th basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<u32>,
}

impl DenseMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        DenseMatrix { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        DenseMatrix { n, entries: vec![0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            entries.extend_from_slice(r);
        }
        DenseMatrix { n, entries }
    }

    /// Builds the matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vec<u32>]) -> Self {
        let n = cols.len();
        let mut m = DenseMatrix::zero(n);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "matrix must be square");
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.n + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    pub fn mul(&self, other: &DenseMatrix, f: &PrimeField) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let q = f.order() as u64;
        let mut out = DenseMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j) as u64;
                    if b != 0 {
                        let idx = i * n + j;
                        out.entries[idx] = ((out.entries[idx] as u64 + a * b) % q) as u32;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u32], f: &PrimeField) -> Vec<u32> {
        (0..self.n)
            .map(|i| {
                let mut acc = 0;
                for (j, &x) in v.iter().enumerate() {
                    acc = f.add(acc, f.mul(self.get(i, j), x));
                }
                acc
            })
            .collect()
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self, f: &PrimeField) -> Option<DenseMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = DenseMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let s = f.inv(a.get(col, col))?;
            a.scale_row(col, s, f);
            inv.scale_row(col, s, f);
            for r in 0..n {
                if r != col {
                    let factor = a.get(r, col);
                    if factor != 0 {
                        let c = f.neg(factor);
                        a.add_row_multiple(r, col, c, f);
                        inv.add_row_multiple(r, col, c, f);
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn rank(&self, f: &PrimeField) -> usize {
        let rows: Vec<Vec<u32>> = (0..self.n).map(|i| self.row(i).to_vec()).collect();
        rref(&rows, f).len()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.entries.swap(a * self.n + j, b * self.n + j);
        }
    }

    pub fn scale_row(&mut self, r: usize, s: u32, f: &PrimeField) {
        for j in 0..self.n {
            let v = self.get(r, j);
            self.set(r, j, f.mul(v, s));
        }
    }

    /// row[dst] += c * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, c: u32, f: &PrimeField) {
        for j in 0..self.n {
            let v = f.add(self.get(dst, j), f.mul(c, self.get(src, j)));
            self.set(dst, j, v);
        }
    }
}

/// Reduced row echelon basis of the span of `vectors`, pivots normalized to 1,
/// rows ordered by increasing pivot position. Zero rows are dropped.
pub fn rref(vectors: &[Vec<u32>], f: &PrimeField) -> Vec<Vec<u32>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let width = vectors[0].len();
    let mut rows: Vec<Vec<u32>> = vectors.to_vec();
    let mut out_rows = 0;
    for col in 0..width {
        let Some(p) = (out_rows..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(out_rows, p);
        let s = f.inv(rows[out_rows][col]).expect("nonzero pivot");
        for v in rows[out_rows].iter_mut() {
            *v = f.mul(*v, s);
        }
        let pivot_row = rows[out_rows].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != out_rows && row[col] != 0 {
                let c = f.neg(row[col]);
                for (x, &y) in row.iter_mut().zip(pivot_row.iter()) {
                    *x = f.add(*x, f.mul(c, y));
                }
            }
        }
        out_rows += 1;
        if out_rows == rows.len() {
            break;
        }
    }
    rows.truncate(out_rows);
    rows
}

/// Pivot column of each row of an echelon basis.
pub fn pivots(basis: &[Vec<u32>]) -> Vec<usize> {
    basis
        .iter()
        .map(|r| r.iter().position(|&x| x != 0).expect("echelon rows are nonzero"))
        .collect()
}

/// Reduces `v` against a reduced echelon basis; the result is zero iff `v` lies in the span.
pub fn reduce(v: &[u32], basis: &[Vec<u32>], f: &PrimeField) -> Vec<u32> {
    let mut out = v.to_vec();
    for row in basis {
        let p = row.iter().position(|&x| x != 0).expect("nonzero row");
        let c = out[p];
        if c != 0 {
            let neg = f.neg(c);
            for (x, &y) in out.iter_mut().zip(row.iter()) {
                *x = f.add(*x, f.mul(neg, y));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_inverse_table() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert!(f.inv(0).is_none());
        assert!(PrimeField::new(4).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let f = PrimeField::new(3).unwrap();
        let m = DenseMatrix::from_rows(&[vec![1, 2, 0], vec![0, 1, 1], vec![2, 0, 1]]);
        let inv = m.inverse(&f).unwrap();
        assert!(m.mul(&inv, &f).is_identity());
        let singular = DenseMatrix::from_rows(&[vec![1, 2], vec![2, 1]]);
        assert!(singular.inverse(&f).is_none());
        assert_eq!(singular.rank(&f), 1);
    }

    #[test]
    fn rref_and_reduce() {
        let f = PrimeField::new(2).unwrap();
        let basis = rref(&[vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![1, 0, 1, 0]], &f);
        assert_eq!(basis.len(), 2);
        assert_eq!(pivots(&basis), vec![0, 1]);
        assert!(reduce(&[1, 0, 1, 0], &basis, &f).iter().all(|&x| x == 0));
        assert!(reduce(&[0, 0, 0, 1], &basis, &f).iter().any(|&x| x != 0));
    }
}
