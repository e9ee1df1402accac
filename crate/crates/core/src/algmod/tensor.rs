use std::sync::Arc;

use crate::exactla::{Eliminator, Matrix, Quotient, SVec};
use crate::par;

use super::{AlgError, LinMap, Linearity, ModuleSpace};

/// `M ⊗_A N` as a quotient of the plain tensor product.
///
/// Plain basis vector `e_i ⊗ f_j` has index `i * rank(N) + j`.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    pub left: Arc<ModuleSpace>,
    pub right: Arc<ModuleSpace>,
    pub quotient: Quotient,
    pub space: Arc<ModuleSpace>,
}

impl TensorProduct {
    pub fn plain_dim(&self) -> usize {
        self.left.rank() * self.right.rank()
    }

    /// Class of `e_i ⊗ f_j`.
    pub fn pair(&self, i: usize, j: usize) -> &SVec {
        &self.quotient.proj[i * self.right.rank() + j]
    }

    /// Class of `m ⊗ n`.
    pub fn tensor(&self, m: &SVec, n: &SVec) -> SVec {
        let mut out = SVec::new();
        for (i, x) in m {
            for (j, y) in n {
                out.axpy(&(x * y), self.pair(*i, *j));
            }
        }
        out
    }

    /// Plain pair `(i, j)` representing quotient basis vector `q`.
    pub fn rep(&self, q: usize) -> (usize, usize) {
        let r = self.quotient.reps[q];
        (r / self.right.rank(), r % self.right.rank())
    }

    /// Project a vector of the plain tensor product.
    pub fn project_plain(&self, v: &SVec) -> SVec {
        self.quotient.project(v)
    }

    /// The plain tensor product over the rationals with the inherited outer actions.
    pub fn plain_space(&self) -> ModuleSpace {
        let (m, n) = (&self.left, &self.right);
        let nr = n.rank();
        let d = m.algebra().dim();
        let left = m.left().map(|l| {
            (0..d)
                .map(|k| {
                    (0..m.rank() * nr)
                        .map(|p| l[k][p / nr].iter().map(|(i, c)| (i * nr + p % nr, c.clone())).collect())
                        .collect()
                })
                .collect()
        });
        let right = n.right().map(|r| {
            (0..d)
                .map(|k| {
                    (0..m.rank() * nr)
                        .map(|p| r[k][p % nr].iter().map(|(j, c)| ((p / nr) * nr + j, c.clone())).collect())
                        .collect()
                })
                .collect()
        });
        ModuleSpace::from_parts(m.algebra().clone(), m.rank() * nr, left, right)
    }

    /// The canonical surjection from the plain tensor product.
    pub fn projection(&self) -> LinMap {
        let lin = Linearity { left: self.space.has_left(), right: self.space.has_right() };
        LinMap::unchecked(Arc::new(self.plain_space()), self.space.clone(), self.quotient.proj.clone(), lin)
    }

    pub fn projection_matrix(&self) -> Matrix {
        Matrix::from_columns(self.space.rank(), &self.quotient.proj)
    }
}

/// `M ⊗_A N` for `M` with a right action and `N` with a left action.
pub fn tensor_over_a(m: &Arc<ModuleSpace>, n: &Arc<ModuleSpace>) -> Result<TensorProduct, AlgError> {
    let mr = m.require_right("the left factor")?;
    let nl = n.require_left("the right factor")?;
    let (rm, rn) = (m.rank(), n.rank());
    let d = m.algebra().dim();
    let mut el = Eliminator::new(rm * rn);
    for i in 0..rm {
        let rels = par::map_range(d * rn, |kj| {
            let (k, j) = (kj / rn, kj % rn);
            let mut v = SVec::new();
            for (i2, c) in &mr[k][i] {
                v.add_term(i2 * rn + j, c);
            }
            for (j2, c) in &nl[k][j] {
                v.add_term(i * rn + j2, &-c);
            }
            v
        });
        for v in rels {
            if !v.is_zero() {
                el.insert(v);
            }
        }
    }
    let quotient = el.quotient();
    let tp = TensorProduct {
        left: m.clone(),
        right: n.clone(),
        quotient,
        space: Arc::new(ModuleSpace::zero(m.algebra(), false, false)),
    };
    let qd = tp.quotient.dim();
    let left = m.left().map(|l| {
        (0..d)
            .map(|k| {
                par::map_range(qd, |q| {
                    let (i, j) = tp.rep(q);
                    tp.tensor(&l[k][i], &SVec::unit(j))
                })
            })
            .collect()
    });
    let right = n.right().map(|r| {
        (0..d)
            .map(|k| {
                par::map_range(qd, |q| {
                    let (i, j) = tp.rep(q);
                    tp.tensor(&SVec::unit(i), &r[k][j])
                })
            })
            .collect()
    });
    let space = Arc::new(ModuleSpace::from_parts(m.algebra().clone(), qd, left, right));
    Ok(TensorProduct { space, ..tp })
}

/// Iterated tensor powers `X ⊗_A V ⊗_A ... ⊗_A V` built one factor at a time.
#[derive(Clone, Debug)]
struct Chain {
    factor: Arc<ModuleSpace>,
    levels: Vec<Arc<ModuleSpace>>,
    steps: Vec<Option<TensorProduct>>,
}

impl Chain {
    fn push(&mut self) -> Result<(), AlgError> {
        let tp = tensor_over_a(self.levels.last().expect("nonempty chain"), &self.factor)?;
        self.levels.push(tp.space.clone());
        self.steps.push(Some(tp));
        Ok(())
    }

    fn step(&self, n: usize) -> &TensorProduct {
        self.steps[n].as_ref().expect("tensor step")
    }
}

/// Truncated tensor algebra `T_A(V)` in degrees `0..=max_degree`.
///
/// Degree 0 is `A`, degree 1 is `V`, and degree `n` is the quotient of the plain
/// `n`-fold tensor by all middle relations. Basis vectors in degree `n ≥ 1` are
/// represented by tuples of `V`-basis indices.
#[derive(Clone, Debug)]
pub struct TensorAlgebra {
    v: Arc<ModuleSpace>,
    max_degree: usize,
    chain: Chain,
    tuples: Vec<Vec<Vec<usize>>>,
}

impl TensorAlgebra {
    pub fn new(v: &Arc<ModuleSpace>, max_degree: usize) -> Result<Self, AlgError> {
        v.require_left("V")?;
        v.require_right("V")?;
        let a = Arc::new(ModuleSpace::regular(v.algebra()));
        let mut chain = Chain { factor: v.clone(), levels: vec![a, v.clone()], steps: vec![None, None] };
        let mut tuples = vec![Vec::new(), (0..v.rank()).map(|i| vec![i]).collect::<Vec<_>>()];
        for n in 2..=max_degree.max(1) {
            chain.push()?;
            let st = chain.step(n);
            let prev = &tuples[n - 1];
            let t: Vec<Vec<usize>> = (0..st.space.rank())
                .map(|q| {
                    let (s, c) = st.rep(q);
                    let mut t = prev[s].clone();
                    t.push(c);
                    t
                })
                .collect();
            tuples.push(t);
        }
        if max_degree == 0 {
            chain.levels.truncate(1);
            chain.steps.truncate(1);
            tuples.truncate(1);
        }
        Ok(TensorAlgebra { v: v.clone(), max_degree, chain, tuples })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn v(&self) -> &Arc<ModuleSpace> {
        &self.v
    }

    pub fn algebra(&self) -> &Arc<super::Algebra> {
        self.v.algebra()
    }

    pub fn space(&self, n: usize) -> &Arc<ModuleSpace> {
        &self.chain.levels[n]
    }

    pub fn dim(&self, n: usize) -> usize {
        self.chain.levels[n].rank()
    }

    /// Tuple of `V`-indices representing basis vector `q` of degree `n ≥ 1`.
    pub fn tuple(&self, n: usize, q: usize) -> &[usize] {
        &self.tuples[n][q]
    }

    /// `x ⊗ w` for `x` of degree `n` and `w ∈ V`.
    pub fn append(&self, n: usize, x: &SVec, w: &SVec) -> SVec {
        if n == 0 {
            self.v.act_left(x, w)
        } else {
            self.chain.step(n + 1).tensor(x, w)
        }
    }

    fn append_basis(&self, n: usize, x: &SVec, c: usize) -> SVec {
        if n == 0 {
            self.v.act_left(x, &SVec::unit(c))
        } else {
            let st = self.chain.step(n + 1);
            let mut out = SVec::new();
            for (s, a) in x {
                out.axpy(a, st.pair(*s, c));
            }
            out
        }
    }

    /// `x ⊗ v_{t_1} ⊗ ... ⊗ v_{t_k}`.
    pub fn append_tuple(&self, n: usize, x: &SVec, t: &[usize]) -> SVec {
        let mut cur = x.clone();
        for (i, &c) in t.iter().enumerate() {
            cur = self.append_basis(n + i, &cur, c);
        }
        cur
    }

    /// Class of the plain tensor `v_{t_1} ⊗ ... ⊗ v_{t_n}`, `n ≥ 1`.
    pub fn proj(&self, t: &[usize]) -> SVec {
        assert!(!t.is_empty(), "use the algebra for degree zero");
        self.append_tuple(1, &SVec::unit(t[0]), &t[1..])
    }

    /// Project a vector of the plain `n`-fold tensor, indexed in base `rank(V)`.
    pub fn project_plain(&self, n: usize, v: &SVec) -> SVec {
        let r = self.v.rank();
        let mut out = SVec::new();
        let mut t = vec![0; n];
        for (idx, c) in v {
            let mut x = *idx;
            for slot in t.iter_mut().rev() {
                *slot = x % r;
                x /= r;
            }
            out.axpy(c, &self.proj(&t));
        }
        out
    }

    /// Product of `x` in degree `p` and `y` in degree `q`.
    pub fn mul(&self, p: usize, x: &SVec, q: usize, y: &SVec) -> SVec {
        assert!(p + q <= self.max_degree, "product leaves the truncation window");
        if p == 0 {
            return self.space(q).act_left(x, y);
        }
        if q == 0 {
            return self.space(p).act_right(x, y);
        }
        let mut out = SVec::new();
        for (t, c) in y {
            out.axpy(c, &self.append_tuple(p, x, &self.tuples[q][*t]));
        }
        out
    }

    pub fn unit(&self) -> SVec {
        self.algebra().unit().clone()
    }

    /// Basis vector `q` of degree `n ≥ 1` with its `k`-th factor (from 1)
    /// replaced by `y` of degree `r`.
    pub fn splice(&self, n: usize, q: usize, k: usize, r: usize, y: &SVec) -> SVec {
        let t = &self.tuples[n][q];
        let head = if k == 1 { y.clone() } else { self.mul(k - 1, &self.proj(&t[..k - 1]), r, y) };
        self.append_tuple(k - 1 + r, &head, &t[k..])
    }

    /// Images of the degree `n` basis under the algebra map induced by `f0`
    /// on `A` and `f1: V → W` into the degree one part of `target`.
    pub fn map_cols(&self, target: &TensorAlgebra, f0: &[SVec], f1: &[SVec], n: usize) -> Vec<SVec> {
        if n == 0 {
            return f0.to_vec();
        }
        par::map_range(self.dim(n), |q| {
            let t = &self.tuples[n][q];
            let mut y = f1[t[0]].clone();
            for (i, &c) in t.iter().enumerate().skip(1) {
                y = target.mul(i, &y, 1, &f1[c]);
            }
            y
        })
    }
}

/// Iterated tensor products `M ⊗_A T^k` for a right module `M`.
#[derive(Clone, Debug)]
pub struct ModuleTower {
    t: Arc<TensorAlgebra>,
    chain: Chain,
    tuples: Vec<Vec<(usize, Vec<usize>)>>,
}

impl ModuleTower {
    pub fn new(base: &Arc<ModuleSpace>, t: &Arc<TensorAlgebra>, depth: usize) -> Result<Self, AlgError> {
        base.require_right("the base module")?;
        let mut chain = Chain { factor: t.v().clone(), levels: vec![base.clone()], steps: vec![None] };
        let mut tuples = vec![(0..base.rank()).map(|i| (i, Vec::new())).collect::<Vec<_>>()];
        for k in 1..=depth {
            chain.push()?;
            let st = chain.step(k);
            let prev = &tuples[k - 1];
            let tk = (0..st.space.rank())
                .map(|q| {
                    let (s, c) = st.rep(q);
                    let (h, mut f) = prev[s].clone();
                    f.push(c);
                    (h, f)
                })
                .collect();
            tuples.push(tk);
        }
        Ok(ModuleTower { t: t.clone(), chain, tuples })
    }

    pub fn depth(&self) -> usize {
        self.chain.levels.len() - 1
    }

    pub fn algebra_tower(&self) -> &Arc<TensorAlgebra> {
        &self.t
    }

    pub fn base(&self) -> &Arc<ModuleSpace> {
        &self.chain.levels[0]
    }

    pub fn space(&self, k: usize) -> &Arc<ModuleSpace> {
        &self.chain.levels[k]
    }

    pub fn dim(&self, k: usize) -> usize {
        self.chain.levels[k].rank()
    }

    pub fn tuple(&self, k: usize, q: usize) -> (usize, &[usize]) {
        let (h, f) = &self.tuples[k][q];
        (*h, f)
    }

    pub fn step(&self, k: usize) -> &TensorProduct {
        self.chain.step(k)
    }

    /// `x ⊗ w` for `x ∈ M ⊗ T^k`, `w ∈ V`.
    pub fn append(&self, k: usize, x: &SVec, w: &SVec) -> SVec {
        self.chain.step(k + 1).tensor(x, w)
    }

    pub fn append_tuple(&self, k: usize, x: &SVec, t: &[usize]) -> SVec {
        let mut cur = x.clone();
        for (i, &c) in t.iter().enumerate() {
            let st = self.chain.step(k + i + 1);
            let mut out = SVec::new();
            for (s, a) in &cur {
                out.axpy(a, st.pair(*s, c));
            }
            cur = out;
        }
        cur
    }

    /// `x ⊗ y` for `x ∈ M ⊗ T^k` and `y ∈ T^q`.
    pub fn tensor_t(&self, k: usize, x: &SVec, q: usize, y: &SVec) -> SVec {
        if q == 0 {
            return self.space(k).act_right(x, y);
        }
        let mut out = SVec::new();
        for (t, c) in y {
            out.axpy(c, &self.append_tuple(k, x, self.t.tuple(q, *t)));
        }
        out
    }

    /// Class of `m_i ⊗ v_{t_1} ⊗ ... ⊗ v_{t_k}`.
    pub fn elem(&self, i: usize, t: &[usize]) -> SVec {
        self.append_tuple(0, &SVec::unit(i), t)
    }

    /// Project a plain vector of `M ⊗ V^{⊗k}`, indexed `i * rank(V)^k + (tuple in base rank(V))`.
    pub fn project_plain(&self, k: usize, v: &SVec) -> SVec {
        let r = self.t.v().rank();
        let mut out = SVec::new();
        let mut t = vec![0; k];
        for (idx, c) in v {
            let mut x = *idx;
            for slot in t.iter_mut().rev() {
                *slot = x % r;
                x /= r;
            }
            out.axpy(c, &self.elem(x, &t));
        }
        out
    }

    /// `(m ⊗ t) · b` for `b ∈ T^q`, landing in `M ⊗ T^{k+q}`.
    pub fn act_right_t(&self, k: usize, x: &SVec, q: usize, b: &SVec) -> SVec {
        self.tensor_t(k, x, q, b)
    }
}

/// The `n`-fold tensor power of a bimodule over `A`.
#[derive(Clone, Debug)]
pub struct TensorPower {
    pub tower: Arc<TensorAlgebra>,
    pub n: usize,
}

impl TensorPower {
    pub fn space(&self) -> &Arc<ModuleSpace> {
        self.tower.space(self.n)
    }

    /// Projection from the plain `n`-fold tensor; for `n = 0` the identity of `A`.
    pub fn projection_cols(&self) -> Vec<SVec> {
        let r = self.tower.v().rank();
        if self.n == 0 {
            return (0..self.tower.dim(0)).map(SVec::unit).collect();
        }
        let total = r.pow(self.n as u32);
        par::map_range(total, |idx| self.tower.project_plain(self.n, &SVec::unit(idx)))
    }
}

/// `C^{⊗_A n}`; `n = 0` gives `A`.
pub fn tensor_power_over_a(c: &Arc<ModuleSpace>, n: usize) -> Result<TensorPower, AlgError> {
    Ok(TensorPower { tower: Arc::new(TensorAlgebra::new(c, n)?), n })
}

/// The same quotient computed in one pass over all middle relations of the
/// plain `n`-fold tensor. Only practical for small ranks.
pub fn tensor_power_single_pass(c: &ModuleSpace, n: usize) -> Result<Quotient, AlgError> {
    let l = c.require_left("C")?;
    let r = c.require_right("C")?;
    let rank = c.rank();
    let d = c.algebra().dim();
    let total = rank.pow(n as u32);
    let mut el = Eliminator::new(total);
    let digits = |mut x: usize| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = x % rank;
            x /= rank;
        }
        t
    };
    let index = |t: &[usize]| t.iter().fold(0, |acc, &x| acc * rank + x);
    for idx in 0..total {
        let t = digits(idx);
        for pos in 0..n.saturating_sub(1) {
            for k in 0..d {
                let mut v = SVec::new();
                let mut u = t.clone();
                for (a, x) in &r[k][t[pos]] {
                    u[pos] = *a;
                    v.add_term(index(&u), x);
                }
                u[pos] = t[pos];
                for (b, x) in &l[k][t[pos + 1]] {
                    u[pos + 1] = *b;
                    v.add_term(index(&u), &-x);
                }
                el.insert(v);
            }
        }
    }
    Ok(el.quotient())
}
