use std::sync::Arc;

use crate::algmod::{Algebra, ModuleSpace};
use crate::coring::{find_base_points, BasedCoring, Coring};
use crate::exactla::{Eliminator, Quotient, SVec};
use crate::par;

use super::CatalogError;

/// Elements of `S = End_A(A^n) = M_n(A)`, basis `(i n + j) dim(A) + a` for `e_a E_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct EndoBasis(pub Vec<SVec>);

impl EndoBasis {
    /// `B = Q · 1`.
    pub fn scalars(n: usize, alg: &Algebra) -> Self {
        let d = alg.dim();
        let one: SVec = (0..n).flat_map(|i| alg.unit().iter().map(move |(a, c)| ((i * n + i) * d + a, c.clone()))).collect();
        EndoBasis(vec![one])
    }

    /// `B = S`.
    pub fn full(n: usize, alg: &Algebra) -> Self {
        EndoBasis((0..n * n * alg.dim()).map(SVec::unit).collect())
    }
}

fn bil(x: &SVec, y: &SVec, f: impl Fn(usize, usize) -> SVec) -> SVec {
    let mut out = SVec::new();
    for (i, a) in x {
        for (j, b) in y {
            out.axpy(&(a * b), &f(*i, *j));
        }
    }
    out
}

/// Products among basis elements of `P*` (rows), `S` and `P` (columns).
#[derive(Clone, Debug)]
struct Mats {
    alg: Arc<Algebra>,
    n: usize,
}

impl Mats {
    fn d(&self) -> usize {
        self.alg.dim()
    }

    /// Basis element `x` of slot `slot` (0 is `P*`, the others `S`) times `b` on the right.
    fn right_b(&self, slot: usize, x: usize, b: &SVec) -> SVec {
        if slot == 0 {
            bil(&SVec::unit(x), b, |c, s| self.row_times_s(c, s))
        } else {
            bil(&SVec::unit(x), b, |s1, s2| self.s_times_s(s1, s2))
        }
    }

    /// `b` times basis element `x` of slot `slot` (the last slot is `P`).
    fn left_b(&self, slot: usize, k: usize, x: usize, b: &SVec) -> SVec {
        if slot == k + 1 {
            bil(b, &SVec::unit(x), |s, p| self.s_times_col(s, p))
        } else {
            bil(b, &SVec::unit(x), |s1, s2| self.s_times_s(s1, s2))
        }
    }

    fn s_times_s(&self, x: usize, y: usize) -> SVec {
        let (n, d) = (self.n, self.d());
        let ((i, j), a) = (((x / d) / n, (x / d) % n), x % d);
        let ((k, l), b) = (((y / d) / n, (y / d) % n), y % d);
        if j != k {
            return SVec::new();
        }
        super::shift(self.alg.basis_mul(a, b), (i * n + l) * d)
    }

    fn row_times_s(&self, c: usize, s: usize) -> SVec {
        let (n, d) = (self.n, self.d());
        let (i, a) = (c / d, c % d);
        let ((k, l), b) = (((s / d) / n, (s / d) % n), s % d);
        if i != k {
            return SVec::new();
        }
        super::shift(self.alg.basis_mul(a, b), l * d)
    }

    fn s_times_col(&self, s: usize, p: usize) -> SVec {
        let (n, d) = (self.n, self.d());
        let ((i, j), a) = (((s / d) / n, (s / d) % n), s % d);
        let (k, b) = (p / d, p % d);
        if j != k {
            return SVec::new();
        }
        super::shift(self.alg.basis_mul(a, b), i * d)
    }

    /// `χ(p)` for basis elements.
    fn eval(&self, c: usize, p: usize) -> SVec {
        let d = self.d();
        if c / d != p / d {
            return SVec::new();
        }
        self.alg.basis_mul(c % d, p % d).clone()
    }
}

/// The comatrix coring `P* ⊗_B P` of `P = A^n` for a subalgebra `B ⊆ End_A(P)`.
#[derive(Clone, Debug)]
pub struct Comatrix {
    pub based: BasedCoring,
    pub alg: Arc<Algebra>,
    pub n: usize,
    pub b: EndoBasis,
    /// `P = A^n` as a right module, basis `i dim(A) + a` for `e_a` in entry `i`.
    pub p: Arc<ModuleSpace>,
    /// Quotient of the plain `P* ⊗ P`, pair `(χ, p)` at `χ rank(P) + p`.
    pub quotient: Quotient,
    mats: Mats,
}

impl Comatrix {
    fn d(&self) -> usize {
        self.alg.dim()
    }

    fn rank_p(&self) -> usize {
        self.n * self.d()
    }

    /// `χ ⊗ p` in `C`.
    pub fn tensor(&self, chi: &SVec, p: &SVec) -> SVec {
        let r = self.rank_p();
        self.quotient.project(&bil(chi, p, |i, j| SVec::unit(i * r + j)))
    }

    /// Column (or row) basis vector `i` carrying `1_A`.
    pub fn unit_vector(&self, i: usize) -> SVec {
        super::shift(self.alg.unit(), i * self.d())
    }

    /// `(χ, p)` representing basis vector `q` of `C`.
    pub fn rep(&self, q: usize) -> (usize, usize) {
        let r = self.quotient.reps[q];
        (r / self.rank_p(), r % self.rank_p())
    }

    /// `χ(p) ∈ A`.
    pub fn evaluate(&self, chi: &SVec, p: &SVec) -> SVec {
        bil(chi, p, |c, q| self.mats.eval(c, q))
    }

    /// `s(p)` for `s ∈ End_A(P)`.
    pub fn endo_apply(&self, s: &SVec, p: &SVec) -> SVec {
        bil(s, p, |x, q| self.mats.s_times_col(x, q))
    }

    /// Product in `S = End_A(P)`.
    pub fn endo_mul(&self, s: &SVec, t: &SVec) -> SVec {
        bil(s, t, |x, y| self.mats.s_times_s(x, y))
    }

    /// `χ ∘ s` for `χ ∈ P*` and `s ∈ S`.
    pub fn row_times_endo(&self, chi: &SVec, s: &SVec) -> SVec {
        bil(chi, s, |c, x| self.mats.row_times_s(c, x))
    }

    /// `B` as an algebra in the basis `self.b`.
    pub fn b_algebra(&self) -> Result<Algebra, CatalogError> {
        let b = &self.b.0;
        let mut te = crate::exactla::TrackedEliminator::new(self.n * self.n * self.d());
        for v in b {
            te.insert(v.clone()).map_err(|_| CatalogError::BNotClosed("the basis of B is linearly dependent".into()))?;
        }
        let express = |v: &SVec| te.express(v).ok_or_else(|| CatalogError::BNotClosed("B is not closed under products".into()));
        let one: SVec = (0..self.n).fold(SVec::new(), |acc, i| acc.plus(&super::shift(self.alg.unit(), (i * self.n + i) * self.d())));
        let unit = express(&one)?;
        let mul = b.iter().map(|x| b.iter().map(|y| express(&self.endo_mul(x, y))).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
        Ok(Algebra::from_table(b.len(), unit, mul)?)
    }

    /// `ρ(p) = e ⊗ p = Σ_i e_i ⊗ (φ_i ⊗ p)`, lifted to the plain `P ⊗ C`.
    pub fn p_coaction_lift(&self) -> Vec<SVec> {
        let rc = self.based.coring.rank();
        (0..self.rank_p())
            .map(|p| {
                let mut out = SVec::new();
                for i in 0..self.n {
                    let c = self.tensor(&self.unit_vector(i), &SVec::unit(p));
                    out.add(&bil(&self.unit_vector(i), &c, |a, b| SVec::unit(a * rc + b)));
                }
                out
            })
            .collect()
    }

    /// Dimensions of `P* ⊗_B S^{⊗_B k} ⊗_B P` and of the intersection of the
    /// kernels of `Φ_0 .. Φ_k` on it, for `k = 0 .. max_k`.
    ///
    /// These are the degree `k + 1` parts of `T_A(C)` and `T_A(C⁺)`.
    pub fn phi_dims(&self, max_k: usize) -> Vec<(usize, usize)> {
        let ws: Vec<(Vec<usize>, Quotient)> = (0..=max_k).map(|k| self.w_space(k)).collect();
        let mut out = Vec::new();
        for k in 0..=max_k {
            let (dims, q) = &ws[k];
            let target_dim = if k == 0 { self.d() } else { ws[k - 1].1.dim() };
            let maps: Vec<Vec<SVec>> = (0..=k)
                .map(|i| {
                    q.reps
                        .iter()
                        .map(|&r| {
                            let img = self.phi_plain(k, i, dims, r);
                            if k == 0 {
                                img
                            } else {
                                ws[k - 1].1.project(&img)
                            }
                        })
                        .collect()
                })
                .collect();
            // stack the maps and count the kernel of the combined map
            let mut stacked = Eliminator::new(target_dim * (k + 1));
            for col in 0..q.dim() {
                let mut v = SVec::new();
                for (i, m) in maps.iter().enumerate() {
                    v.add(&super::shift(&m[col], i * target_dim));
                }
                stacked.insert(v);
            }
            out.push((q.dim(), q.dim() - stacked.rank()));
        }
        out
    }

    fn slot_dims(&self, k: usize) -> Vec<usize> {
        let (r, s) = (self.rank_p(), self.n * self.n * self.d());
        let mut v = vec![r];
        v.extend(std::iter::repeat(s).take(k));
        v.push(r);
        v
    }

    fn w_space(&self, k: usize) -> (Vec<usize>, Quotient) {
        let dims = self.slot_dims(k);
        let total: usize = dims.iter().product();
        let mut el = Eliminator::new(total);
        for slot in 0..=k {
            let rels = par::map_range(total, |idx| {
                let t = decode(&dims, idx);
                self.b
                    .0
                    .iter()
                    .map(|b| {
                        let left = self.mats.right_b(slot, t[slot], b);
                        let right = self.mats.left_b(slot + 1, k, t[slot + 1], b);
                        let mut l = SVec::new();
                        for (x, c) in &left {
                            let mut u = t.clone();
                            u[slot] = *x;
                            l.add_term(encode(&dims, &u), c);
                        }
                        for (x, c) in &right {
                            let mut u = t.clone();
                            u[slot + 1] = *x;
                            l.add_term(encode(&dims, &u), &(-c.clone()));
                        }
                        l
                    })
                    .collect::<Vec<_>>()
            });
            for r in rels.into_iter().flatten() {
                el.insert(r);
            }
        }
        (dims, el.quotient())
    }

    /// `Φ_i^{(k)}` on a plain basis tuple, in plain coordinates of the
    /// previous space (or of `A` when `k = 0`).
    fn phi_plain(&self, k: usize, i: usize, dims: &[usize], idx: usize) -> SVec {
        let t = decode(dims, idx);
        if k == 0 {
            return self.mats.eval(t[0], t[1]);
        }
        let (merged, pos) = if i == 0 {
            (self.mats.row_times_s(t[0], t[1]), 0)
        } else if i == k {
            (self.mats.s_times_col(t[k], t[k + 1]), k)
        } else {
            (self.mats.s_times_s(t[i], t[i + 1]), i)
        };
        let small = self.slot_dims(k - 1);
        let mut out = SVec::new();
        for (x, c) in &merged {
            let mut u: Vec<usize> = t[..pos].to_vec();
            u.push(*x);
            u.extend_from_slice(&t[pos + 2..]);
            out.add_term(encode(&small, &u), c);
        }
        out
    }
}

fn decode(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; dims.len()];
    for (s, &d) in dims.iter().enumerate().rev() {
        t[s] = idx % d;
        idx /= d;
    }
    t
}

fn encode(dims: &[usize], t: &[usize]) -> usize {
    t.iter().zip(dims).fold(0, |acc, (x, d)| acc * d + x)
}

/// Build the comatrix coring, verifying that `B` is a unital subalgebra and
/// that the counit is surjective; `x` defaults to the canonical base point.
pub fn catalog_comatrix(alg: &Arc<Algebra>, n: usize, b: EndoBasis, x: Option<SVec>) -> Result<Comatrix, CatalogError> {
    let d = alg.dim();
    if n == 0 {
        return Err(CatalogError::NotProgenerator("P = 0".into()));
    }
    let sdim = n * n * d;
    if b.0.iter().any(|v| v.max_index().is_some_and(|m| m >= sdim)) {
        return Err(CatalogError::Shape("B basis element outside End(P)".into()));
    }
    let p = Arc::new(ModuleSpace::free_right(alg, n));
    let rank_p = n * d;
    let mats = Mats { alg: alg.clone(), n };
    let mut span = Eliminator::new(sdim);
    for v in &b.0 {
        span.insert(v.clone());
    }
    let one = EndoBasis::scalars(n, alg).0.remove(0);
    if !span.contains(&one) {
        return Err(CatalogError::BNotClosed("B does not contain 1".into()));
    }
    for (i, u) in b.0.iter().enumerate() {
        for (j, v) in b.0.iter().enumerate() {
            if !span.contains(&bil(u, v, |x, y| mats.s_times_s(x, y))) {
                return Err(CatalogError::BNotClosed(format!("product of basis elements {i} and {j}")));
            }
        }
    }
    let mut el = Eliminator::new(rank_p * rank_p);
    for bb in &b.0 {
        for c in 0..rank_p {
            for q in 0..rank_p {
                let l = mats.right_b(0, c, bb);
                let r = mats.left_b(1, 0, q, bb);
                let mut v: SVec = l.iter().map(|(x, k)| (x * rank_p + q, k.clone())).collect();
                for (y, k) in &r {
                    v.add_term(c * rank_p + y, &(-k.clone()));
                }
                el.insert(v);
            }
        }
    }
    let quotient = el.quotient();
    let rank_c = quotient.dim();
    let tensor = |chi: &SVec, q: &SVec| quotient.project(&bil(chi, q, |i, j| SVec::unit(i * rank_p + j)));
    let unit_vector = |i: usize| super::shift(alg.unit(), i * d);
    let pair_of = |r: usize| (r / rank_p, r % rank_p);
    let act = |left: bool| -> Vec<Vec<SVec>> {
        (0..d)
            .map(|k| {
                (0..rank_c)
                    .map(|qi| {
                        let (c, q) = pair_of(quotient.reps[qi]);
                        let (i, a) = (c / d, c % d);
                        if left {
                            let chi = super::shift(alg.basis_mul(k, a), i * d);
                            tensor(&chi, &SVec::unit(q))
                        } else {
                            let (j, b2) = (q / d, q % d);
                            let pp = super::shift(alg.basis_mul(b2, k), j * d);
                            tensor(&SVec::unit(c), &pp)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let cspace = Arc::new(ModuleSpace::new(alg.clone(), rank_c, Some(act(true)), Some(act(false)))?);
    let mut delta = Vec::with_capacity(rank_c);
    let mut counit = Vec::with_capacity(rank_c);
    for qi in 0..rank_c {
        let (c, q) = pair_of(quotient.reps[qi]);
        let mut v = SVec::new();
        for i in 0..n {
            let left = tensor(&SVec::unit(c), &unit_vector(i));
            let right = tensor(&unit_vector(i), &SVec::unit(q));
            v.add(&bil(&left, &right, |a, b2| SVec::unit(a * rank_c + b2)));
        }
        delta.push(v);
        counit.push(mats.eval(c, q));
    }
    let coring = Arc::new(Coring::new(cspace, &delta, counit)?);
    let x = match x {
        Some(x) => x,
        None => find_base_points(&coring).map_err(|_| CatalogError::NotProgenerator("the evaluation map is not surjective".into()))?.x,
    };
    let based = BasedCoring::new(coring, x)?;
    Ok(Comatrix { based, alg: alg.clone(), n, b, p, quotient, mats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_matrix;
    use crate::coring::check_coring;

    #[test]
    fn trivial_comatrix() {
        let a = Arc::new(Algebra::ground());
        let cm = catalog_comatrix(&a, 1, EndoBasis::scalars(1, &a), None).unwrap();
        assert_eq!(cm.based.coring.rank(), 1);
        assert!(check_coring(&cm.based.coring).all_pass());
        assert!(cm.based.coring.is_grouplike(&cm.based.x));
    }

    #[test]
    fn matrix_case_dimensions() {
        let a = Arc::new(Algebra::ground());
        let cm = catalog_comatrix(&a, 2, EndoBasis::scalars(2, &a), None).unwrap();
        let m = catalog_matrix(2, &a).unwrap();
        assert!(check_coring(&cm.based.coring).all_pass());
        assert_eq!(cm.based.coring.rank(), m.based.coring.rank());
        let dims = cm.phi_dims(2);
        assert_eq!(dims[0], (4, 3));
        assert_eq!(dims[1].0, 16);
    }

    #[test]
    fn full_endomorphisms() {
        let a = Arc::new(Algebra::ground());
        let cm = catalog_comatrix(&a, 2, EndoBasis::full(2, &a), None).unwrap();
        assert_eq!(cm.based.coring.rank(), 1);
        assert!(check_coring(&cm.based.coring).all_pass());
    }

    #[test]
    fn non_closed_b_rejected() {
        let a = Arc::new(Algebra::ground());
        let mut b = EndoBasis::scalars(2, &a);
        b.0.push(SVec::unit(1));
        b.0.push(SVec::unit(2));
        assert!(matches!(catalog_comatrix(&a, 2, b, None), Err(CatalogError::BNotClosed(_))));
    }
}
