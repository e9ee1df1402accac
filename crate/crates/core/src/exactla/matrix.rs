use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Eliminator, SVec, Scalar};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Shape-explicit constructor, accepting empty row lists.
    pub fn from_rows_shaped(rows: usize, cols: usize, data: Vec<Vec<Scalar>>) -> Option<Self> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Matrix { rows, cols, data: data.into_iter().flatten().collect() })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    /// Matrix whose column `j` is `cols[j]`, with `rows` rows.
    pub fn from_columns(rows: usize, cols: &[SVec]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, v) in cols.iter().enumerate() {
            for (i, c) in v {
                m.set(*i, j, c.clone());
            }
        }
        m
    }

    pub fn columns(&self) -> Vec<SVec> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| (i, self.get(i, j).clone())).collect())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<Scalar>> = Vec::deserialize(d)?;
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_rows(rows))
    }
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = a.get(r, c).recip();
        for j in c..a.cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in c..a.cols {
                let rv = a.get(r, j);
                if !rv.is_zero() {
                    let v = a.get(i, j) - &(&f * rv);
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the null space `{v : m v = 0}`.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    let (r, pivots) = rref(m);
    let mut is_pivot = vec![None; m.cols];
    for (row, &p) in pivots.iter().enumerate() {
        is_pivot[p] = Some(row);
    }
    let mut out = Vec::new();
    for f in 0..m.cols {
        if is_pivot[f].is_some() {
            continue;
        }
        let mut v = vec![Scalar::zero(); m.cols];
        v[f] = Scalar::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(row, f);
        }
        out.push(v);
    }
    out
}

/// One solution of `m x = b`, or `None` if the system is inconsistent.
pub fn solve(m: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(m.rows, b.len());
    let mut aug = Matrix::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, m.cols, b[i].clone());
    }
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); m.cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, m.cols).clone();
    }
    Some(x)
}

/// Quotient of `Q^ambient_dim` by the span of `relations`.
///
/// Returns the representative coordinates, the projection (quotient × ambient)
/// and the section (ambient × quotient) sending each class to its representative.
pub fn quotient_basis(ambient_dim: usize, relations: &[Vec<Scalar>]) -> (Vec<usize>, Matrix, Matrix) {
    let mut el = Eliminator::new(ambient_dim);
    for r in relations {
        assert_eq!(r.len(), ambient_dim, "relation length must equal the ambient dimension");
        el.insert(SVec::from_dense(r));
    }
    let q = el.quotient();
    let projection = Matrix::from_columns(q.dim(), &q.proj);
    let section_cols: Vec<SVec> = (0..q.dim()).map(|i| SVec::unit(q.reps[i])).collect();
    let section = Matrix::from_columns(ambient_dim, &section_cols);
    (q.reps, projection, section)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn rref_identity_and_scaling() {
        let (r, p) = rref(&Matrix::identity(2));
        assert_eq!(r, Matrix::identity(2));
        assert_eq!(p, vec![0, 1]);
        let (r, p) = rref(&Matrix::from_ints(&[&[2, 4]]));
        assert_eq!(r, Matrix::from_ints(&[&[1, 2]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_small_cases() {
        assert!(kernel_basis(&Matrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&Matrix::zeros(2, 3)).len(), 3);
        let m = Matrix::from_ints(&[&[1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(m.mul_vec(&k[0]), vec![q(0)]);
        assert_eq!(k[0][0], -&k[0][1]);
    }

    #[test]
    fn quotient_examples() {
        let (reps, p, s) = quotient_basis(3, &[]);
        assert_eq!(reps, vec![0, 1, 2]);
        assert_eq!(p, Matrix::identity(3));
        assert_eq!(s, Matrix::identity(3));

        let (reps, p, s) = quotient_basis(2, &[vec![q(1), q(-1)]]);
        assert_eq!(reps, vec![0]);
        assert_eq!(p, Matrix::from_ints(&[&[1, 1]]));
        assert_eq!(p.mul(&s), Matrix::identity(1));
        assert_eq!(p.mul_vec(&[q(1), q(-1)]), vec![q(0)]);

        let (reps, p, _) = quotient_basis(2, &[vec![q(1), q(0)], vec![q(1), q(1)]]);
        assert!(reps.is_empty());
        assert_eq!(p.rows(), 0);
    }

    #[test]
    fn solve_consistency() {
        let m = Matrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(solve(&m, &[q(1), q(3)]).is_none());
        let x = solve(&m, &[q(1), q(2)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(1), q(2)]);
    }
}
