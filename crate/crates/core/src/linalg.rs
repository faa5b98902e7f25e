//! Dense exact linear algebra over a [`Field`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::poly::Poly;

/// Row-major dense matrix; every entry lives in `field`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Scalar>,
}

/// Reduced row-echelon form together with rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, field: Field, data: Vec<Scalar>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.field() != field) {
            return Err(Error::FieldMismatch { left: field, right: bad.field() });
        }
        Ok(Matrix { rows, cols, field, data })
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Matrix {
        Matrix { rows, cols, field, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(n: usize, field: Field) -> Matrix {
        let mut m = Matrix::zeros(n, n, field);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// Elementary matrix with a single one at `(r, c)`.
    pub fn unit(n: usize, r: usize, c: usize, field: Field) -> Matrix {
        let mut m = Matrix::zeros(n, n, field);
        m.data[r * n + c] = field.one();
        m
    }

    /// Builds a matrix from integer rows. Panics on ragged input.
    pub fn from_i64(field: Field, rows: &[Vec<i64>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flatten().map(|&v| field.from_i64(v)).collect();
        Matrix { rows: rows.len(), cols, field, data }
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Matrix> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("row of length {} in {cols}-column matrix", r.len())));
        }
        let n = rows.len();
        Matrix::new(n, cols, field, rows.into_iter().flatten().collect())
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Scalar>]) -> Matrix {
        let mut m = Matrix::zeros(rows, columns.len(), field);
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, x) in col.iter().enumerate() {
                m.data[r * m.cols + c] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert_eq!(v.field(), self.field, "entry from a different field");
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let x = self.get(r, c);
                    if r == c {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn scale(&self, k: &Scalar) -> Matrix {
        Matrix { data: self.data.iter().map(|x| x * k).collect(), ..self.clone() }
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).fold(self.field.zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch { left: self.field, right: other.field });
        }
        let mut out = Matrix::zeros(self.rows, other.cols, self.field);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * other.cols + c;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Matrix::identity(self.rows, self.field);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn hstack(blocks: &[&Matrix]) -> Matrix {
        let first = blocks.first().expect("at least one block");
        let rows = first.rows;
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(rows, cols, first.field);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row count");
            for r in 0..rows {
                for c in 0..b.cols {
                    m.data[r * cols + offset + c] = b.get(r, c).clone();
                }
            }
            offset += b.cols;
        }
        m
    }

    pub fn vstack(blocks: &[&Matrix]) -> Matrix {
        let first = blocks.first().expect("at least one block");
        let cols = first.cols;
        let mut data = Vec::new();
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column count");
            data.extend_from_slice(&b.data);
        }
        Matrix { rows: blocks.iter().map(|b| b.rows).sum(), cols, field: first.field, data }
    }

    /// Reduced row-echelon form by Gauss-Jordan elimination, taking the first nonzero
    /// entry of each column as pivot.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for c in col..m.cols {
                let idx = row * m.cols + c;
                m.data[idx] = &m.data[idx] * &inv;
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let sub = &factor * m.get(row, c);
                    if !sub.is_zero() {
                        let idx = r * m.cols + c;
                        m.data[idx] = &m.data[idx] - &sub;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { reduced: m, rank: pivots.len(), pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right null space. Free columns are visited in increasing order and
    /// each basis vector has a one in its own free position and zeros in the others.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let Rref { reduced, pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![self.field.zero(); self.cols];
                v[free] = self.field.one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -reduced.get(r, free);
                }
                v
            })
            .collect()
    }

    /// One exact solution of `self * x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let rhs = Matrix::from_columns(self.field, self.rows, &[b.to_vec()]);
        self.solve_matrix(&rhs).map(|x| x.column(0))
    }

    /// Solves `self * X = rhs` column by column; free variables are set to zero.
    pub fn solve_matrix(&self, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(rhs.rows, self.rows, "right-hand side rows");
        let aug = Matrix::hstack(&[self, rhs]);
        let Rref { reduced, pivots, .. } = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols, self.field);
        for (r, &p) in pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                x.data[p * rhs.cols + c] = reduced.get(r, self.cols + c).clone();
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::hstack(&[self, &Matrix::identity(n, self.field)]);
        let Rref { reduced, pivots, .. } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n, self.field);
        for r in 0..n {
            for c in 0..n {
                inv.data[r * n + c] = reduced.get(r, n + c).clone();
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Columns of `self` at the pivot positions of its rref: a basis of the column space.
    pub fn column_space(&self) -> Matrix {
        let pivots = self.rref().pivots;
        let cols: Vec<Vec<Scalar>> = pivots.iter().map(|&c| self.column(c)).collect();
        Matrix::from_columns(self.field, self.rows, &cols)
    }

    /// Minimal polynomial, found as the first linear dependence among `I, M, M², ...`.
    pub fn min_poly(&self) -> Poly {
        assert!(self.is_square(), "minimal polynomial of a non-square matrix");
        let n = self.rows;
        let mut powers = vec![Matrix::identity(n, self.field)];
        loop {
            let k = powers.len();
            let next = &powers[k - 1] * self;
            let cols: Vec<Vec<Scalar>> = powers.iter().map(|p| p.data.clone()).collect();
            let basis = Matrix::from_columns(self.field, n * n, &cols);
            if let Some(c) = basis.solve(&next.data) {
                // M^k = sum c_i M^i  =>  x^k - sum c_i x^i
                let mut coeffs: Vec<Scalar> = c.into_iter().map(|x| -x).collect();
                coeffs.push(self.field.one());
                return Poly::new(self.field, coeffs);
            }
            powers.push(next);
        }
    }

    /// Least `k` with `M^k = 0`. A zero matrix (including the empty one) has index 1.
    pub fn nilpotency_index(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::Dimension("nilpotency of a non-square matrix".into()));
        }
        let mut p = self.clone();
        for k in 1..=self.rows.max(1) {
            if p.is_zero() {
                return Ok(k);
            }
            p = &p * self;
        }
        Err(Error::NotNilpotent)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_index().is_ok()
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = Matrix::zeros(rows, cols, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.get(r, c);
                if a.is_zero() {
                    continue;
                }
                for rr in 0..other.rows {
                    for cc in 0..other.cols {
                        let idx = (r * other.rows + rr) * cols + c * other.cols + cc;
                        m.data[idx] = a * other.get(rr, cc);
                    }
                }
            }
        }
        m
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let rows = self.rows + other.rows;
        let cols = self.cols + other.cols;
        let mut m = Matrix::zeros(rows, cols, self.field);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.data[r * cols + c] = self.get(r, c).clone();
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                m.data[(self.rows + r) * cols + self.cols + c] = other.get(r, c).clone();
            }
        }
        m
    }

    /// Columns reordered by `order` (new column `i` is old column `order[i]`).
    pub fn permute_columns(&self, order: &[usize]) -> Matrix {
        let cols: Vec<Vec<Scalar>> = order.iter().map(|&c| self.column(c)).collect();
        Matrix::from_columns(self.field, self.rows, &cols)
    }

    /// Square sub-block starting at `(offset, offset)`.
    pub fn diagonal_block(&self, offset: usize, size: usize) -> Matrix {
        let mut m = Matrix::zeros(size, size, self.field);
        for r in 0..size {
            for c in 0..size {
                m.data[r * size + c] = self.get(offset + r, offset + c).clone();
            }
        }
        m
    }

    /// `p(M)` by Horner's rule.
    pub fn eval_poly(&self, p: &Poly) -> Matrix {
        let n = self.rows;
        let mut acc = Matrix::zeros(n, n, self.field);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &Matrix::identity(n, self.field).scale(c);
        }
        acc
    }

    /// Rows of entry strings, the JSON shape used in reports.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|r| self.row(r).iter().map(Scalar::to_string).collect()).collect()
    }
}

/// Linear combination `sum coeffs[i] * mats[i]`; all matrices share a shape.
pub fn combine(coeffs: &[Scalar], mats: &[Matrix]) -> Matrix {
    assert_eq!(coeffs.len(), mats.len(), "coefficient count");
    let first = mats.first().expect("nonempty combination");
    let mut acc = Matrix::zeros(first.rows, first.cols, first.field);
    for (c, m) in coeffs.iter().zip(mats) {
        if !c.is_zero() {
            acc = &acc + &m.scale(c);
        }
    }
    acc
}

/// Coordinates with respect to a fixed linearly independent family of matrices.
///
/// The family is flattened into the columns of a tall matrix; a set of independent
/// rows is chosen once and inverted, so each coordinate lookup is a small product.
#[derive(Clone, Debug)]
pub struct Coordinates {
    rows: Vec<usize>,
    inverse: Matrix,
    basis: Vec<Matrix>,
}

impl Coordinates {
    pub fn new(basis: &[Matrix]) -> Result<Coordinates> {
        let first = basis.first().ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
        let cols: Vec<Vec<Scalar>> = basis.iter().map(|b| b.data.clone()).collect();
        let tall = Matrix::from_columns(first.field, first.data.len(), &cols);
        let pivots = tall.transpose().rref().pivots;
        if pivots.len() != basis.len() {
            return Err(Error::Inconsistent("basis matrices are linearly dependent".into()));
        }
        let square: Vec<Vec<Scalar>> = pivots.iter().map(|&r| tall.row(r).to_vec()).collect();
        let square = Matrix::from_rows(first.field, square, basis.len())?;
        let inverse = square.inverse().expect("independent rows give an invertible block");
        Ok(Coordinates { rows: pivots, inverse, basis: basis.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    /// Coordinates of `m`, or `None` when `m` is outside the span.
    pub fn of(&self, m: &Matrix) -> Option<Vec<Scalar>> {
        let sample: Vec<Scalar> = self.rows.iter().map(|&r| m.data[r].clone()).collect();
        let coords = self.inverse.mul_vec(&sample);
        (combine(&coords, &self.basis) == *m).then_some(coords)
    }
}

/// Span of vectors added one at a time, kept in echelon form so each insertion is a
/// single reduction pass.
#[derive(Clone, Debug, Default)]
pub struct SpanBuilder {
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl SpanBuilder {
    pub fn new() -> SpanBuilder {
        SpanBuilder { rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let c = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x = &*x - &(&c * r);
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero pivot");
        self.rows.push((p, v.iter().map(|x| x * &inv).collect()));
        true
    }
}

macro_rules! matrix_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Matrix> for &Matrix {
            type Output = Matrix;

            fn $method(self, rhs: &Matrix) -> Matrix {
                assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
                let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect();
                Matrix { data, ..self.clone() }
            }
        }
    };
}

matrix_binop!(Add, add, +);
matrix_binop!(Sub, sub, -);

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("incompatible matrix product")
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        Matrix { data: self.data.iter().map(|x| -x).collect(), ..self.clone() }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (c, x) in self.row(r).iter().enumerate() {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for row in self.to_strings() {
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}
