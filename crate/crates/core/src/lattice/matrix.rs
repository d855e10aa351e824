use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use super::field::{Field, Scalar};
use super::integer::{int_determinant, int_rank, IntMatrix};
use crate::error::{Error, Result};

/// Dense row-major matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        ExactMatrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// Builds a matrix from rows; every entry must live in `field`.
    pub fn from_rows(field: Field, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for s in row {
                if s.field() != field {
                    return Err(Error::FieldMismatch {
                        expected: field.characteristic(),
                        found: s.field().characteristic(),
                    });
                }
                data.push(s);
            }
        }
        Ok(ExactMatrix { field, rows: nrows, cols, data })
    }

    pub fn from_int_rows(field: Field, cols: usize, rows: &[Vec<BigInt>]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|x| field.from_int(x)).collect()).collect();
        Self::from_rows(field, cols, rows)
    }

    pub fn from_i64_rows(field: Field, cols: usize, rows: &[&[i64]]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
        Self::from_rows(field, cols, rows)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.field(), self.field, "entry from another field");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_field(other)?;
        if self.rows == 0 {
            return Ok(ExactMatrix { cols: other.cols, ..other.clone() });
        }
        if other.rows == 0 {
            return Ok(self.clone());
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} columns on {}",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(ExactMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn select_rows(&self, idx: &[usize]) -> ExactMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        ExactMatrix { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    fn same_field(&self, other: &ExactMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field.characteristic(),
                found: other.field.characteristic(),
            });
        }
        Ok(())
    }

    /// Rows scaled by the lcm of their denominators, as integers (rational field only).
    fn integer_rows(&self) -> Option<IntMatrix> {
        if self.field != Field::Rational {
            return None;
        }
        let rows = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |l, s| {
                    l.lcm(s.as_rational().expect("rational entry").denom())
                });
                row.iter()
                    .map(|s| {
                        let q = s.as_rational().expect("rational entry");
                        q.numer() * (&l / q.denom())
                    })
                    .collect()
            })
            .collect();
        Some(rows)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(p, r);
            let inv = a.get(r, c).inv();
            for j in 0..a.cols {
                let v = a.get(r, j) * &inv;
                a.data[r * a.cols + j] = v;
            }
            for i in 0..a.rows {
                if i == r {
                    continue;
                }
                let factor = a.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..a.cols {
                    let v = a.get(i, j) - &(&factor * a.get(r, j));
                    a.data[i * a.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Rank over the field; Bareiss elimination for rationals.
    pub fn rank(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        match self.integer_rows() {
            Some(int) => int_rank(&int, self.cols),
            None => self.rref().1.len(),
        }
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if let Some(int) = self.integer_rows() {
            let scale = (0..self.rows).fold(BigInt::one(), |acc, i| {
                let l = self.row(i).iter().fold(BigInt::one(), |l, s| {
                    l.lcm(s.as_rational().expect("rational entry").denom())
                });
                acc * l
            });
            let det = int_determinant(&int)?;
            return Ok(Scalar::Rational(BigRational::new(det, scale)));
        }
        let mut a = self.clone();
        let mut det = self.field.one();
        for c in 0..a.cols {
            let Some(p) = (c..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                return Ok(self.field.zero());
            };
            if p != c {
                a.swap_rows(p, c);
                det = -&det;
            }
            let pivot = a.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv();
            for i in c + 1..a.rows {
                let factor = a.get(i, c) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for j in c..a.cols {
                    let v = a.get(i, j) - &(&factor * a.get(c, j));
                    a.data[i * a.cols + j] = v;
                }
            }
        }
        Ok(det)
    }

    /// Basis of `{x : A x = 0}`, returned as the rows of its reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        if self.cols == 0 {
            return Vec::new();
        }
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let vectors: Vec<Vec<Scalar>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f);
                }
                v
            })
            .collect();
        if vectors.is_empty() {
            return vectors;
        }
        let k = ExactMatrix::from_rows(self.field, self.cols, vectors).expect("same field");
        k.row_space_canonical().row_vecs()
    }

    /// Reduced row echelon form with zero rows dropped.
    pub fn row_space_canonical(&self) -> ExactMatrix {
        let (r, pivots) = self.rref();
        let keep: Vec<usize> = (0..pivots.len()).collect();
        let mut out = r.select_rows(&keep);
        out.cols = self.cols;
        out
    }

    /// A particular solution of `A x = b`.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.data[i * (self.cols + 1) + j] = self.get(i, j).clone();
            }
            aug.data[i * (self.cols + 1) + self.cols] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<ExactMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j).clone();
            }
            aug.data[i * 2 * n + n + i] = self.field.one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.data[i * n + j] = r.get(i, n + j).clone();
            }
        }
        Some(inv)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(|s| s.to_display_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]], cols: usize) -> ExactMatrix {
        ExactMatrix::from_i64_rows(Field::Rational, cols, rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(ExactMatrix::identity(Field::Rational, 3).rank(), 3);
        assert_eq!(ExactMatrix::zeros(Field::Rational, 2, 4).rank(), 0);
        assert_eq!(q(&[&[1, 1, 1], &[1, 2, 3], &[2, 3, 4]], 3).rank(), 2);
        assert_eq!(ExactMatrix::zeros(Field::Rational, 0, 0).rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        assert!(ExactMatrix::identity(Field::Rational, 2).kernel_basis().is_empty());
        let p2 = q(&[&[1, 0, -1], &[0, 1, -1]], 3);
        let f = Field::Rational;
        assert_eq!(p2.kernel_basis(), vec![vec![f.one(), f.one(), f.one()]]);
        let z = ExactMatrix::zeros(Field::Prime(5), 1, 2);
        assert_eq!(z.kernel_basis().len(), 2);
    }

    #[test]
    fn determinant_examples() {
        assert!(ExactMatrix::identity(Field::Rational, 4).determinant().unwrap().is_one());
        let a = q(&[&[0, 0, 1], &[1, 1, 1], &[-1, -2, -2]], 3);
        let d = a.determinant().unwrap().to_integer().unwrap();
        assert_eq!(d.magnitude(), &num_bigint::BigUint::from(1u32));
        let b = q(&[&[0, -1, 1], &[1, 1, 1], &[-1, -2, -2]], 3);
        let d = b.determinant().unwrap().to_integer().unwrap();
        assert_eq!(d.magnitude(), &num_bigint::BigUint::from(2u32));
        assert!(q(&[&[1, 2, 3]], 3).determinant().is_err());
        let fp = ExactMatrix::from_i64_rows(Field::Prime(7), 2, &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(fp.determinant().unwrap(), Field::Prime(7).from_i64(-2));
    }

    #[test]
    fn rational_determinant_with_denominators() {
        let f = Field::Rational;
        let half = Scalar::Rational(BigRational::new(1.into(), 2.into()));
        let m = ExactMatrix::from_rows(f, 2, vec![vec![half.clone(), f.one()], vec![f.zero(), half]])
            .unwrap();
        assert_eq!(m.determinant().unwrap(), Scalar::Rational(BigRational::new(1.into(), 4.into())));
    }

    #[test]
    fn canonical_row_space() {
        let a = q(&[&[2, 0, 0], &[0, 2, 0]], 3);
        assert_eq!(a.row_space_canonical(), q(&[&[1, 0, 0], &[0, 1, 0]], 3));
        let b = q(&[&[1, 1, 0], &[0, 1, 1], &[1, 2, 1]], 3);
        assert_eq!(b.row_space_canonical(), q(&[&[1, 0, -1], &[0, 1, 1]], 3));
        let e = ExactMatrix::zeros(Field::Rational, 0, 3);
        assert_eq!(e.row_space_canonical().nrows(), 0);
    }

    #[test]
    fn solve_and_inverse() {
        let a = q(&[&[2, 1], &[1, 1]], 2);
        let f = Field::Rational;
        let x = a.solve(&[f.from_i64(3), f.from_i64(2)]).unwrap();
        assert_eq!(x, vec![f.one(), f.one()]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), ExactMatrix::identity(f, 2));
        assert!(q(&[&[1, 1], &[1, 1]], 2).inverse().is_none());
        assert!(q(&[&[1, 1], &[1, 1]], 2).solve(&[f.one(), f.zero()]).is_none());
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = ExactMatrix::identity(Field::Rational, 2);
        let b = ExactMatrix::identity(Field::Prime(3), 2);
        assert!(a.mul(&b).is_err());
        assert!(a.vstack(&b).is_err());
        let bad = ExactMatrix::from_rows(Field::Rational, 1, vec![vec![Field::Prime(3).one()]]);
        assert!(bad.is_err());
    }
}
