//! Dense exact matrices over Q(i, sqrt 2): row reduction, kernels, inverses
//! and the inertia of real symmetric forms.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::exact::ExactScalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ExactScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ExactScalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<ExactScalar>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn from_rows(rows: &[Vec<ExactScalar>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j].clone())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<ExactScalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ExactScalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(ExactScalar::conj_i).collect() }
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn map(&self, f: impl Fn(&ExactScalar) -> ExactScalar) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = ExactScalar::zero();
                for (j, vj) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !vj.is_zero() {
                        acc += a * vj;
                    }
                }
                acc
            })
            .collect()
    }

    /// Commutator `self * other - other * self`.
    pub fn bracket(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> ExactScalar {
        let mut t = ExactScalar::zero();
        for i in 0..self.rows.min(self.cols) {
            t += &self[(i, i)];
        }
        t
    }

    /// Flattened entries in row-major order.
    pub fn entries(&self) -> &[ExactScalar] {
        &self.data
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_complex())
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                if !m[(r, j)].is_zero() {
                    m[(r, j)] = &m[(r, j)] * &inv;
                }
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let t = &f * &m[(r, j)];
                    m[(i, j)] -= &t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column. Each vector
    /// has a 1 in its free column and 0 in the other free columns.
    pub fn nullspace(&self) -> Vec<Vec<ExactScalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![ExactScalar::zero(); self.cols];
                v[fc] = ExactScalar::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&r[(row, fc)];
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                ExactScalar::one()
            } else {
                ExactScalar::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    /// Inertia `(positive, negative, zero)` of a real symmetric matrix,
    /// by exact congruence diagonalization. `None` if an entry is not real
    /// or the matrix is not symmetric.
    pub fn real_signature(&self) -> Option<(usize, usize, usize)> {
        if self.rows != self.cols || *self != self.transpose() || !self.data.iter().all(ExactScalar::is_real) {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let (mut pos, mut neg) = (0, 0);
        for k in 0..n {
            if a[(k, k)].is_zero() {
                if let Some(p) = (k + 1..n).find(|&i| !a[(i, i)].is_zero()) {
                    a.swap_rows(k, p);
                    a.swap_cols(k, p);
                } else if let Some(l) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                    // row_k += row_l and col_k += col_l; new diagonal is 2 a_kl.
                    for j in 0..n {
                        let t = a[(l, j)].clone();
                        a[(k, j)] += &t;
                    }
                    for i in 0..n {
                        let t = a[(i, l)].clone();
                        a[(i, k)] += &t;
                    }
                } else {
                    continue;
                }
            }
            let piv = a[(k, k)].clone();
            let inv = piv.inv().expect("nonzero pivot");
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = &a[(i, k)] * &inv;
                for j in k..n {
                    if a[(k, j)].is_zero() {
                        continue;
                    }
                    let t = &f * &a[(k, j)];
                    a[(i, j)] -= &t;
                }
                for r in k..n {
                    if a[(r, k)].is_zero() {
                        continue;
                    }
                    let t = &f * &a[(r, k)];
                    a[(r, i)] -= &t;
                }
            }
            match piv.real_sign() {
                Some(1) => pos += 1,
                Some(-1) => neg += 1,
                _ => {}
            }
        }
        Some((pos, neg, n - pos - neg))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

/// Coordinates of `v` in the span of `basis` (vectors of equal length), or
/// `None` when `v` is not in the span.
pub fn solve_in_span(basis: &[Vec<ExactScalar>], v: &[ExactScalar]) -> Option<Vec<ExactScalar>> {
    let k = basis.len();
    let n = v.len();
    let aug = ExactMatrix::from_fn(n, k + 1, |i, j| if j < k { basis[j][i].clone() } else { v[i].clone() });
    let (r, pivots) = aug.rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![ExactScalar::zero(); k];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[(row, k)].clone();
    }
    Some(x)
}

/// A linearly independent family with a fast exact coordinate map.
///
/// Coordinates are read off a fixed set of independent positions through a
/// precomputed inverse and then verified by reconstruction.
#[derive(Clone, Debug)]
pub struct Basis {
    vectors: Vec<Vec<ExactScalar>>,
    rows: Vec<usize>,
    inv: ExactMatrix,
}

impl Basis {
    /// Panics if the vectors are dependent.
    pub fn new(vectors: Vec<Vec<ExactScalar>>) -> Self {
        let k = vectors.len();
        let n = vectors.first().map_or(0, Vec::len);
        let at = ExactMatrix::from_rows(&vectors);
        let (_, rows) = at.rref();
        assert_eq!(rows.len(), k, "basis vectors are linearly dependent");
        let sub = ExactMatrix::from_fn(k, k, |i, j| vectors[j][rows[i]].clone());
        let inv = sub.inverse().expect("independent rows");
        debug_assert!(rows.iter().all(|&r| r < n));
        Self { vectors, rows, inv }
    }

    /// Reduced echelon basis of the span of `vs` (dependent input allowed).
    pub fn spanned_by(vs: &[Vec<ExactScalar>]) -> Self {
        if vs.is_empty() {
            return Self { vectors: Vec::new(), rows: Vec::new(), inv: ExactMatrix::zeros(0, 0) };
        }
        let (r, piv) = ExactMatrix::from_rows(vs).rref();
        let vectors = (0..piv.len()).map(|i| r.row(i)).collect();
        Self::new(vectors)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<ExactScalar>] {
        &self.vectors
    }

    pub fn coords(&self, v: &[ExactScalar]) -> Option<Vec<ExactScalar>> {
        let picked: Vec<ExactScalar> = self.rows.iter().map(|&r| v[r].clone()).collect();
        let c = self.inv.mul_vec(&picked);
        let mut recon = vec![ExactScalar::zero(); v.len()];
        for (ci, b) in c.iter().zip(&self.vectors) {
            if ci.is_zero() {
                continue;
            }
            for (r, bj) in recon.iter_mut().zip(b) {
                if !bj.is_zero() {
                    *r += ci * bj;
                }
            }
        }
        (recon == v).then_some(c)
    }

    pub fn contains(&self, v: &[ExactScalar]) -> bool {
        self.coords(v).is_some()
    }

    /// True if every vector of `other` lies in this span.
    pub fn contains_span(&self, other: &Basis) -> bool {
        other.vectors.iter().all(|v| self.contains(v))
    }
}

/// Rank of a family of vectors.
pub fn span_rank(vs: &[Vec<ExactScalar>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    ExactMatrix::from_rows(vs).rank()
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = ExactScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ExactScalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ExactScalar {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = ExactMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        self.map(|x| -x)
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> ExactScalar {
        ExactScalar::from_int(n)
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = ExactMatrix::from_rows(&[vec![int(1), int(2), int(3)], vec![int(2), int(4), int(6)]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(ExactScalar::is_zero));
        }
    }

    #[test]
    fn inverse_with_surds() {
        let s = ExactScalar::sqrt2();
        let i = ExactScalar::i();
        let m = ExactMatrix::from_rows(&[vec![s.clone(), i.clone()], vec![int(1), s.clone()]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, ExactMatrix::identity(2));
        let sing = ExactMatrix::from_rows(&[vec![s.clone(), int(2)], vec![int(1), s]]);
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn signature_of_hyperbolic_plane() {
        let m = ExactMatrix::from_rows(&[vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert_eq!(m.real_signature(), Some((1, 1, 0)));
        let d = ExactMatrix::from_rows(&[vec![int(2), int(0), int(0)], vec![int(0), int(-3), int(0)], vec![int(0), int(0), int(0)]]);
        assert_eq!(d.real_signature(), Some((1, 1, 1)));
    }

    #[test]
    fn basis_coordinates() {
        let b = Basis::new(vec![vec![int(1), int(1), int(0)], vec![int(0), int(1), int(1)]]);
        assert_eq!(b.coords(&[int(2), int(5), int(3)]), Some(vec![int(2), int(3)]));
        assert!(!b.contains(&[int(1), int(0), int(0)]));
        let s = Basis::spanned_by(&[vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn span_membership() {
        let b = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]];
        let x = solve_in_span(&b, &[int(2), int(3), int(5)]).unwrap();
        assert_eq!(x, vec![int(2), int(3)]);
        assert!(solve_in_span(&b, &[int(1), int(1), int(1)]).is_none());
    }
}
