//! Dense matrices over a [`Field`], sized for the kernels and inverses the
//! decomposition pipeline needs (up to roughly a thousand rows).
//!
//! Everything reduces to in-place Gaussian elimination.  The elimination is
//! sequential and deterministic: pivots are chosen as the first nonzero
//! entry in column order, so kernels and solutions do not depend on thread
//! count or hash order.

use crate::error::{Error, Result};
use crate::field::{Element, Field};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Element>,
}

impl Mat {
    pub fn zero(f: &Field, rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![f.zero(); rows * cols] }
    }

    pub fn identity(f: &Field, n: usize) -> Self {
        let mut m = Mat::zero(f, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = f.one();
        }
        m
    }

    pub fn from_rows(f: &Field, rows: Vec<Vec<Element>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::SizeMismatch(row.len(), c));
            }
            for e in &row {
                f.check(e)?;
            }
            data.extend(row);
        }
        Ok(Mat { rows: r, cols: c, data })
    }

    pub fn at(&self, i: usize, j: usize) -> &Element {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Element {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Element] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self, f: &Field) -> Mat {
        let mut out = Mat::zero(f, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn mul(&self, f: &Field, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::SizeMismatch(self.cols, other.rows));
        }
        let mut out = Mat::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(a, other.at(k, j));
                    let cur = f.add(out.at(i, j), &t);
                    *out.at_mut(i, j) = cur;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, f: &Field, v: &[Element]) -> Result<Vec<Element>> {
        if self.cols != v.len() {
            return Err(Error::SizeMismatch(self.cols, v.len()));
        }
        let mut out = vec![f.zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = f.zero();
            for j in 0..self.cols {
                let t = f.mul(self.at(i, j), &v[j]);
                acc = f.add(&acc, &t);
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Reduce in place to reduced row echelon form; returns pivot columns.
    fn rref(&mut self, f: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !f.is_zero(self.at(i, c))) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self.at(r, c)).expect("nonzero pivot");
            for j in c..self.cols {
                *self.at_mut(r, j) = f.mul(self.at(r, j), &inv);
            }
            for i in 0..self.rows {
                if i == r || f.is_zero(self.at(i, c)) {
                    continue;
                }
                let factor = self.at(i, c).clone();
                for j in c..self.cols {
                    let t = f.mul(&factor, self.at(r, j));
                    let cur = f.sub(self.at(i, j), &t);
                    *self.at_mut(i, j) = cur;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.clone().rref(f).len()
    }

    /// Column indices of a maximal independent set, first-come order.
    pub fn pivot_columns(&self, f: &Field) -> Vec<usize> {
        self.clone().rref(f)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self, f: &Field) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::SizeMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        // Eliminate on [self | I].
        let mut aug = Mat::zero(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = f.one();
        }
        let pivots = aug.rref(f);
        // A singular left half pushes some pivot into the identity half.
        if pivots.len() != n || pivots[n - 1] >= n {
            return Err(Error::NotInvertible);
        }
        let mut out = Mat::zero(f, n, n);
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Ok(out)
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, f: &Field, b: &[Element]) -> Result<Option<Vec<Element>>> {
        if b.len() != self.rows {
            return Err(Error::SizeMismatch(b.len(), self.rows));
        }
        let mut aug = Mat::zero(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = b[i].clone();
        }
        let pivots = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return Ok(None); // a row reads 0 = 1
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel_basis(&self, f: &Field) -> Vec<Vec<Element>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec_ = vec![f.zero(); self.cols];
            vec_[free] = f.one();
            for (c, pr) in pivot_set.iter().enumerate() {
                if let Some(r) = pr {
                    vec_[c] = f.neg(m.at(*r, free));
                }
            }
            basis.push(vec_);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn mat(f: &Field, rows: &[&[u64]]) -> Mat {
        Mat::from_rows(
            f,
            rows.iter()
                .map(|r| r.iter().map(|&v| f.from_u64(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn test_inverse_roundtrip() {
        let f = gf(7);
        let m = mat(&f, &[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        let inv = m.inverse(&f).unwrap();
        assert_eq!(m.mul(&f, &inv).unwrap(), Mat::identity(&f, 3));
        assert_eq!(inv.mul(&f, &m).unwrap(), Mat::identity(&f, 3));
    }

    #[test]
    fn test_singular_detected() {
        let f = gf(5);
        let m = mat(&f, &[&[1, 2], &[2, 4]]);
        assert!(matches!(m.inverse(&f), Err(Error::NotInvertible)));
        assert_eq!(m.rank(&f), 1);
    }

    #[test]
    fn test_solve_and_kernel() {
        let f = gf(11);
        let m = mat(&f, &[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(m.rank(&f), 1);
        let k = m.kernel_basis(&f);
        assert_eq!(k.len(), 2);
        for v in &k {
            let img = m.mul_vec(&f, v).unwrap();
            assert!(img.iter().all(|e| f.is_zero(e)));
        }
        let b = vec![f.from_u64(6), f.from_u64(2)];
        assert_eq!(m.solve(&f, &b).unwrap(), None);
        let b = vec![f.from_u64(6), f.from_u64(1)]; // 2*6 = 1 mod 11
        let x = m.solve(&f, &b).unwrap().unwrap();
        assert_eq!(m.mul_vec(&f, &x).unwrap(), b);
    }

    #[test]
    fn test_kernel_over_extension() {
        let f2 = gf(2);
        let f4 = Field::extension(
            &f2,
            &crate::field::poly::UPoly::from_u64s(&f2, &[1, 1, 1]),
        )
        .unwrap();
        let g = f4.element_from_index(2); // a generator of GF(4)*
        let m = Mat::from_rows(
            &f4,
            vec![vec![f4.one(), g.clone()], vec![g.clone(), f4.mul(&g, &g)]],
        )
        .unwrap();
        assert_eq!(m.rank(&f4), 1);
        let k = m.kernel_basis(&f4);
        assert_eq!(k.len(), 1);
        let img = m.mul_vec(&f4, &k[0]).unwrap();
        assert!(img.iter().all(|e| f4.is_zero(e)));
    }
}
