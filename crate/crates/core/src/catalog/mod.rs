//! The example families: matrix, partial-order, Sweedler, comatrix and
//! entwining corings.

mod comatrix;
mod entwining;

use std::sync::Arc;

use serde_json::Value;

use crate::algmod::{AlgError, Algebra, ModuleSpace, TensorAlgebra};
use crate::coring::{BasedCoring, Coring, CoringError};
use crate::exactla::SVec;

pub use comatrix::{catalog_comatrix, Comatrix, EndoBasis};
pub use entwining::{catalog_entwining, check_entwining, super_flip_example, Coalgebra, Entwining, EntwiningData};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Coring(#[from] CoringError),
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not transitive: ({0}, {1}) and ({1}, {2})")]
    NotTransitive(usize, usize, usize),
    #[error("P is not a progenerator: {0}")]
    NotProgenerator(String),
    #[error("B is not a subalgebra of End(P): {0}")]
    BNotClosed(String),
    #[error("bow-tie identity {index} fails: {witness}")]
    BowTieFailed { index: usize, witness: Value },
    #[error(transparent)]
    Comod(#[from] crate::comod::ComodError),
    #[error(transparent)]
    Equiv(#[from] crate::equiv::EquivError),
    #[error("{0}")]
    Other(String),
}

pub(crate) fn shift(v: &SVec, off: usize) -> SVec {
    v.iter().map(|(i, c)| (i + off, c.clone())).collect()
}

/// `A ⊗ Q^r` with `A` acting on the first factor from both sides; basis
/// `s * dim(A) + a` for `e_a ⊗ s`.
pub fn central_bimodule(alg: &Arc<Algebra>, r: usize) -> ModuleSpace {
    let d = alg.dim();
    let act = |left: bool| {
        (0..d)
            .map(|k| {
                (0..r * d)
                    .map(|m| {
                        let (s, a) = (m / d, m % d);
                        shift(if left { alg.basis_mul(k, a) } else { alg.basis_mul(a, k) }, s * d)
                    })
                    .collect()
            })
            .collect()
    };
    ModuleSpace::from_parts(alg.clone(), r * d, Some(act(true)), Some(act(false)))
}

/// A coring built on a partial order, with its pair list.
#[derive(Clone, Debug)]
pub struct OrderCoring {
    pub based: BasedCoring,
    /// Pair `p` of the relation spans the summand with basis `p * dim(A) + a`.
    pub pairs: Vec<(usize, usize)>,
    pub e: usize,
}

impl OrderCoring {
    pub fn pair_index(&self, s: usize, t: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (s, t))
    }

    /// `1 · (s, t)` in `C`.
    pub fn elem(&self, s: usize, t: usize) -> SVec {
        let d = self.based.coring.algebra().dim();
        let p = self.pair_index(s, t).expect("pair in the relation");
        shift(self.based.coring.algebra().unit(), p * d)
    }

    /// `ω(s, t) = {u : (s,u), (u,t) ∈ Q}`.
    pub fn omega(&self, s: usize, t: usize) -> Vec<usize> {
        let mut us: Vec<usize> = self.pairs.iter().filter(|p| p.0 == s && self.pairs.contains(&(p.1, t))).map(|p| p.1).collect();
        us.sort_unstable();
        us
    }
}

/// `C = A^(Q)` with `Δ(s,t) = Σ_{u ∈ ω(s,t)} (s,u) ⊗ (u,t)` and `ε(s,t) = δ_st`,
/// based at `(e, e)`.
pub fn catalog_order(alg: &Arc<Algebra>, points: usize, q: &[(usize, usize)], e: usize) -> Result<OrderCoring, CatalogError> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for &p in q {
        if p.0 >= points || p.1 >= points {
            return Err(CatalogError::Shape(format!("pair {p:?} outside the set")));
        }
        if !pairs.contains(&p) {
            pairs.push(p);
        }
    }
    if e >= points {
        return Err(CatalogError::Shape("the base element is outside the set".into()));
    }
    if let Some(s) = (0..points).find(|s| !pairs.contains(&(*s, *s))) {
        return Err(CatalogError::NotReflexive(s));
    }
    for &(s, u) in &pairs {
        for &(u2, t) in &pairs {
            if u == u2 && !pairs.contains(&(s, t)) {
                return Err(CatalogError::NotTransitive(s, u, t));
            }
        }
    }
    let d = alg.dim();
    let c = Arc::new(central_bimodule(alg, pairs.len()));
    let rank = c.rank();
    let idx = |s: usize, t: usize| pairs.iter().position(|&p| p == (s, t)).expect("pair in the relation");
    let mut delta = Vec::with_capacity(rank);
    let mut counit = Vec::with_capacity(rank);
    for &(s, t) in &pairs {
        for a in 0..d {
            let mut v = SVec::new();
            for &(s1, u) in pairs.iter().filter(|x| x.0 == s) {
                if let Some(p2) = pairs.iter().position(|&y| y == (u, t)) {
                    let p1 = idx(s1, u);
                    for (i, cf) in alg.unit() {
                        v.add_term((p1 * d + a) * rank + p2 * d + i, cf);
                    }
                }
            }
            delta.push(v);
            counit.push(if s == t { SVec::unit(a) } else { SVec::new() });
        }
    }
    let coring = Arc::new(Coring::new(c, &delta, counit)?);
    let x = shift(alg.unit(), idx(e, e) * d);
    let based = BasedCoring::new(coring, x)?;
    Ok(OrderCoring { based, pairs, e })
}

/// `M_N(A)` with `Δ(E_ij) = Σ_k E_ik ⊗ E_kj`, `ε(E_ij) = δ_ij`, based at `E_NN`.
///
/// `E_ij` (zero-based) spans the summand with basis `(i N + j) dim(A) + a`.
pub fn catalog_matrix(n: usize, alg: &Arc<Algebra>) -> Result<OrderCoring, CatalogError> {
    if n == 0 {
        return Err(CatalogError::Shape("N must be at least 1".into()));
    }
    let q: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    catalog_order(alg, n, &q, n - 1)
}

/// The Sweedler coring `A ⊗ A` with `Δ(a ⊗ b) = a ⊗ 1 ⊗ b` and `ε(a ⊗ b) = ab`.
///
/// Basis `i * dim(A) + j` for `e_i ⊗ e_j`.
pub fn sweedler_coring(alg: &Arc<Algebra>) -> Result<Coring, CatalogError> {
    let d = alg.dim();
    let act = |left: bool| -> Vec<Vec<SVec>> {
        (0..d)
            .map(|k| {
                (0..d * d)
                    .map(|m| {
                        let (i, j) = (m / d, m % d);
                        if left {
                            alg.basis_mul(k, i).iter().map(|(u, c)| (u * d + j, c.clone())).collect()
                        } else {
                            shift(alg.basis_mul(j, k), i * d)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let c = Arc::new(ModuleSpace::from_parts(alg.clone(), d * d, Some(act(true)), Some(act(false))));
    let rank = d * d;
    let mut delta = Vec::with_capacity(rank);
    let mut counit = Vec::with_capacity(rank);
    for i in 0..d {
        for j in 0..d {
            let mut v = SVec::new();
            for (u, cu) in alg.unit() {
                for (w, cw) in alg.unit() {
                    v.add_term((i * d + u) * rank + w * d + j, &(cu * cw));
                }
            }
            delta.push(v);
            counit.push(alg.basis_mul(i, j).clone());
        }
    }
    Ok(Coring::new(c, &delta, counit)?)
}

/// `Σ c_ij e_i ⊗ e_j` in the Sweedler coring from pairs of elements of `A`.
pub fn sweedler_element(alg: &Algebra, terms: &[(SVec, SVec)]) -> SVec {
    let d = alg.dim();
    let mut out = SVec::new();
    for (a, b) in terms {
        for (i, x) in a {
            for (j, y) in b {
                out.add_term(i * d + j, &(x * y));
            }
        }
    }
    out
}

/// Elementary tensors of `A^{⊗(n+1)}`, indexed by `Σ a_k d^{n-k}`.
fn kron(factors: &[SVec], d: usize) -> SVec {
    let mut out = SVec::unit(0);
    for f in factors {
        let mut next = SVec::new();
        for (i, c) in &out {
            for (j, c2) in f {
                next.add_term(i * d + j, &(c * c2));
            }
        }
        out = next;
    }
    out
}

/// `T^n_A(A ⊗ A) ≅ A^{⊗(n+1)}` on a tower basis vector.
fn sweedler_plain(alg: &Algebra, t: &TensorAlgebra, n: usize, q: usize) -> SVec {
    let d = alg.dim();
    if n == 0 {
        return SVec::unit(q);
    }
    let tup = t.tuple(n, q);
    let mut factors = vec![SVec::unit(tup[0] / d)];
    for k in 1..n {
        factors.push(alg.basis_mul(tup[k - 1] % d, tup[k] / d).clone());
    }
    factors.push(SVec::unit(tup[n - 1] % d));
    kron(&factors, d)
}

/// The displayed Sweedler differential on `a_0 ⊗ … ⊗ a_n`, with `x = Σ x^i ⊗ y^i`.
fn sweedler_d(alg: &Algebra, x: &SVec, n: usize, word: usize) -> SVec {
    let d = alg.dim();
    let digits: Vec<usize> = (0..=n).rev().map(|k| word / d.pow(k as u32) % d).collect();
    let units: Vec<SVec> = digits.iter().map(|&a| SVec::unit(a)).collect();
    let mut out = SVec::new();
    for (xi, c) in x {
        let (l, r) = (SVec::unit(xi / d), SVec::unit(xi % d));
        let mut front = vec![l.clone(), alg.mul(&r, &units[0])];
        front.extend(units[1..].iter().cloned());
        out.axpy(c, &kron(&front, d));
        let mut back = units[..n].to_vec();
        back.push(alg.mul(&units[n], &l));
        back.push(r);
        out.axpy(&(c * crate::exactla::Scalar::sign(n as i64 + 1)), &kron(&back, d));
    }
    for k in 1..=n {
        let mut mid = units[..k].to_vec();
        mid.push(alg.unit().clone());
        mid.extend(units[k..].iter().cloned());
        out.axpy(&crate::exactla::Scalar::sign(k as i64), &kron(&mid, d));
    }
    out
}

/// The Sweedler coring together with `T♭(A ⊗ A, x)`, checked against the
/// displayed formulas in `A^{⊗(n+1)}`.
#[derive(Clone, Debug)]
pub struct SweedlerData {
    pub coring: Arc<Coring>,
    pub flat: crate::equiv::TFlatResult,
    pub report: crate::report::Report,
}

pub fn catalog_sweedler(alg: &Arc<Algebra>, x: &SVec, max_degree: usize) -> Result<SweedlerData, CatalogError> {
    let coring = Arc::new(sweedler_coring(alg)?);
    let flat = crate::equiv::t_flat(&coring, x, max_degree)?;
    let mut report = crate::report::Report::new();
    report.merge("coring", crate::coring::check_coring(&coring));
    report.merge("t_flat", flat.report.clone());
    let t = flat.cdga.t().clone();
    let d = alg.dim();
    let top = flat.cdga.max_degree();
    let mut bad = None;
    'outer: for n in 0..top {
        for q in 0..t.dim(n) {
            let plain = sweedler_plain(alg, &t, n, q);
            let mut rhs = SVec::new();
            for (w, c) in &plain {
                rhs.axpy(c, &sweedler_d(alg, x, n, *w));
            }
            let mut lhs = SVec::new();
            for (r, c) in &flat.cdga.apply_d(n, &SVec::unit(q)) {
                lhs.axpy(c, &sweedler_plain(alg, &t, n + 1, *r));
            }
            if lhs != rhs {
                bad = Some(serde_json::json!({"degree": n, "witness": crate::report::mismatch("basis", q, &lhs, &rhs)}));
                break 'outer;
            }
        }
    }
    report.record_window("displayed_differential", 0, top as i64 - 1, bad);
    let mut gamma = SVec::new();
    for (xi, c) in x {
        for (xj, c2) in x {
            let f = [SVec::unit(xi / d), alg.mul(&SVec::unit(xi % d), &SVec::unit(xj / d)), SVec::unit(xj % d)];
            gamma.axpy(&(c * c2), &kron(&f, d));
        }
        let f = [SVec::unit(xi / d), alg.unit().clone(), SVec::unit(xi % d)];
        gamma.axpy(&-c.clone(), &kron(&f, d));
    }
    let mut mine = SVec::new();
    for (r, c) in flat.cdga.gamma() {
        mine.axpy(c, &sweedler_plain(alg, &t, 2, *r));
    }
    report.record("displayed_curvature", (mine != gamma).then(|| crate::report::mismatch("gamma", 0, &mine, &gamma)));
    Ok(SweedlerData { coring, flat, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coring::{check_coring, find_base_points, split_at};
    use crate::exactla::q;

    fn ground() -> Arc<Algebra> {
        Arc::new(Algebra::ground())
    }

    #[test]
    fn matrix_coring_passes() {
        for n in 1..=3 {
            let m = catalog_matrix(n, &ground()).unwrap();
            let r = check_coring(&m.based.coring);
            assert!(r.all_pass(), "{}", r.to_text());
        }
    }

    #[test]
    fn matrix_coring_over_matrix_algebra() {
        let m = catalog_matrix(2, &Arc::new(Algebra::matrix(2))).unwrap();
        assert!(check_coring(&m.based.coring).all_pass());
    }

    #[test]
    fn traceless_kernel() {
        let m = catalog_matrix(2, &ground()).unwrap();
        let s = split_at(&m.based).unwrap();
        assert!(s.report.all_pass(), "{}", s.report.to_text());
        assert_eq!(s.cplus.inclusion.len(), 3);
        for v in [m.elem(0, 1), m.elem(1, 0), m.elem(1, 1).minus(&m.elem(0, 0))] {
            assert!(s.cplus.coords(&v).is_some());
        }
    }

    #[test]
    fn order_axioms_enforced() {
        let a = ground();
        assert_eq!(catalog_order(&a, 2, &[(0, 0)], 0).unwrap_err(), CatalogError::NotReflexive(1));
        let chain_broken = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)];
        assert_eq!(catalog_order(&a, 3, &chain_broken, 0).unwrap_err(), CatalogError::NotTransitive(0, 1, 2));
        let chain = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];
        let c = catalog_order(&a, 3, &chain, 0).unwrap();
        assert!(check_coring(&c.based.coring).all_pass());
        assert_eq!(c.omega(0, 2), vec![0, 1, 2]);
    }

    #[test]
    fn order_kernel_is_trace_condition() {
        let a = ground();
        let c = catalog_order(&a, 2, &[(0, 0), (1, 1), (0, 1), (1, 0)], 0).unwrap();
        let s = split_at(&c.based).unwrap();
        let good = c.elem(0, 0).scaled(&q(2)).minus(&c.elem(1, 1).scaled(&q(2))).plus(&c.elem(0, 1));
        assert!(s.cplus.coords(&good).is_some());
        assert!(s.cplus.coords(&c.elem(0, 0)).is_none());
    }

    #[test]
    fn sweedler_passes() {
        let a = Arc::new(Algebra::matrix(2));
        let c = sweedler_coring(&a).unwrap();
        assert!(check_coring(&c).all_pass());
        let one = sweedler_element(&a, &[(a.unit().clone(), a.unit().clone())]);
        assert!(c.is_grouplike(&one));
        assert_eq!(c.apply_counit(&one), *a.unit());
        assert!(find_base_points(&c).is_ok());
    }

    #[test]
    fn sweedler_matches_displayed_formulas() {
        let a = Arc::new(Algebra::matrix(2));
        let e11 = SVec::unit(0);
        let choices = [
            sweedler_element(&a, &[(a.unit().clone(), a.unit().clone())]),
            sweedler_element(&a, &[(e11.clone(), e11.clone())]),
            SVec::new(),
        ];
        for x in &choices {
            let s = catalog_sweedler(&a, x, 3).unwrap();
            assert!(s.report.all_pass(), "{}", s.report.to_text());
        }
        let g = catalog_sweedler(&a, &choices[0], 3).unwrap();
        assert!(g.flat.cdga.gamma().is_zero());
        assert!(!catalog_sweedler(&a, &choices[1], 3).unwrap().flat.cdga.gamma().is_zero());
    }
}
