use crate::exactla::{SVec, Scalar};

use super::AlgError;

/// Finite-dimensional unital associative algebra over the rationals.
///
/// `mul[i][j]` is the product `e_i e_j` in the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    dim: usize,
    unit: SVec,
    mul: Vec<Vec<SVec>>,
}

impl Algebra {
    /// Validated construction from dense structure constants `c[i][j][k]`.
    pub fn new(dim: usize, unit: Vec<Scalar>, mul: Vec<Vec<Vec<Scalar>>>) -> Result<Self, AlgError> {
        if unit.len() != dim || mul.len() != dim {
            return Err(AlgError::Shape(format!("expected {dim} unit entries and {dim} rows of structure constants")));
        }
        let mut table = Vec::with_capacity(dim);
        for (i, row) in mul.iter().enumerate() {
            if row.len() != dim {
                return Err(AlgError::Shape(format!("row {i} of the structure constants has wrong length")));
            }
            let mut r = Vec::with_capacity(dim);
            for (j, v) in row.iter().enumerate() {
                if v.len() != dim {
                    return Err(AlgError::Shape(format!("product e_{i} e_{j} has wrong length")));
                }
                r.push(SVec::from_dense(v));
            }
            table.push(r);
        }
        Self::from_table(dim, SVec::from_dense(&unit), table)
    }

    /// Validated construction from a sparse multiplication table.
    pub fn from_table(dim: usize, unit: SVec, mul: Vec<Vec<SVec>>) -> Result<Self, AlgError> {
        let a = Algebra { dim, unit, mul };
        for i in 0..dim {
            let e = SVec::unit(i);
            if a.mul(&a.unit, &e) != e || a.mul(&e, &a.unit) != e {
                return Err(AlgError::NotUnital(i));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let ij = &a.mul[i][j];
                for k in 0..dim {
                    let left = a.mul(ij, &SVec::unit(k));
                    let right = a.mul(&SVec::unit(i), &a.mul[j][k]);
                    if left != right {
                        return Err(AlgError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(a)
    }

    /// The rationals as a one-dimensional algebra.
    pub fn ground() -> Self {
        Algebra { dim: 1, unit: SVec::unit(0), mul: vec![vec![SVec::unit(0)]] }
    }

    /// `M_n(Q)` with basis `E_ij` at index `i*n + j` (zero-based).
    pub fn matrix(n: usize) -> Self {
        let dim = n * n;
        let mut mul = vec![vec![SVec::new(); dim]; dim];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    mul[i * n + j][j * n + l] = SVec::unit(i * n + l);
                }
            }
        }
        let unit = (0..n).map(|i| (i * n + i, Scalar::one())).collect();
        Algebra { dim, unit, mul }
    }

    /// Group algebra of the cyclic group of order `n`, basis `g^0, .., g^{n-1}`.
    pub fn cyclic_group(n: usize) -> Self {
        let mul = (0..n).map(|i| (0..n).map(|j| SVec::unit((i + j) % n)).collect()).collect();
        Algebra { dim: n, unit: SVec::unit(0), mul }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &SVec {
        &self.unit
    }

    pub fn basis_mul(&self, i: usize, j: usize) -> &SVec {
        &self.mul[i][j]
    }

    pub fn table(&self) -> &[Vec<SVec>] {
        &self.mul
    }

    pub fn mul(&self, a: &SVec, b: &SVec) -> SVec {
        let mut out = SVec::new();
        for (i, x) in a {
            for (j, y) in b {
                out.axpy(&(x * y), &self.mul[*i][*j]);
            }
        }
        out
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.mul[i][j] == self.mul[j][i]))
    }

    /// Dense structure constants `c[i][j][k]`.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<Scalar>>> {
        self.mul.iter().map(|r| r.iter().map(|v| v.to_dense(self.dim)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::q;

    #[test]
    fn ground_and_matrix_algebras_validate() {
        let g = Algebra::ground();
        assert!(Algebra::from_table(1, g.unit().clone(), g.table().to_vec()).is_ok());
        let m = Algebra::matrix(2);
        assert!(Algebra::from_table(4, m.unit().clone(), m.table().to_vec()).is_ok());
        assert_eq!(m.basis_mul(1, 2), &SVec::unit(0));
    }

    #[test]
    fn zero_unit_is_rejected() {
        let r = Algebra::new(1, vec![q(0)], vec![vec![vec![q(1)]]]);
        assert_eq!(r, Err(AlgError::NotUnital(0)));
    }

    #[test]
    fn nonassociative_table_is_rejected() {
        // e1 e1 = e2, e2 e2 = e1, e1 e2 = e2 e1 = 0: (e1 e1) e2 = e1 but e1 (e1 e2) = 0
        let z = vec![q(0), q(0), q(0)];
        let e = |i: usize| {
            let mut v = z.clone();
            v[i] = q(1);
            v
        };
        let mul = vec![
            vec![e(0), e(1), e(2)],
            vec![e(1), e(2), z.clone()],
            vec![e(2), z.clone(), e(1)],
        ];
        let r = Algebra::new(3, e(0), mul);
        assert!(matches!(r, Err(AlgError::NotAssociative(..))));
    }
}
