use std::sync::Arc;

use crate::exactla::{Eliminator, SVec, TrackedEliminator};
use crate::par;

use super::{tensor_over_a, AlgError, LinMap, Linearity, ModuleSpace, TensorProduct};

/// Values of a right-linear map on the chosen generators of its source.
pub type GenValues = Vec<SVec>;

/// `Hom_A(X, M)` for right modules, presented through generators of `X`.
///
/// A map is determined by its values on a generating set `g_j` of `X`; those
/// values must kill every relation `Σ g_j a_j = 0`. Elements are coordinate
/// vectors in the basis `space`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source: Arc<ModuleSpace>,
    pub target: Arc<ModuleSpace>,
    gens: Vec<usize>,
    /// `expr[x]` writes source basis vector `x` as `Σ c · g_j e_k`, keyed `j * dim(A) + k`.
    expr: Vec<SVec>,
    /// Unknown `j * rank(M) + m` is the `m`-th coordinate of the value on `g_j`.
    free_pos: Vec<Option<usize>>,
    basis: Vec<GenValues>,
    pub space: Arc<ModuleSpace>,
}

impl HomSpace {
    pub fn new(source: &Arc<ModuleSpace>, target: &Arc<ModuleSpace>) -> Result<Self, AlgError> {
        let sr = source.require_right("the hom source")?;
        let tr = target.require_right("the hom target")?;
        let d = source.algebra().dim();
        let rt = target.rank();
        let mut te = TrackedEliminator::new(source.rank());
        let mut gens = Vec::new();
        let mut relations = Vec::new();
        for i in 0..source.rank() {
            if te.contains(&SVec::unit(i)) {
                continue;
            }
            gens.push(i);
            for k in sr.iter().take(d) {
                if let Err(rel) = te.insert(k[i].clone()) {
                    relations.push(rel);
                }
            }
        }
        let expr = par::map_range(source.rank(), |x| te.express(&SVec::unit(x)).expect("generators span the source"));
        let unknowns = gens.len() * rt;
        let mut el = Eliminator::new(unknowns);
        for rel in &relations {
            let mut rows = vec![SVec::new(); rt];
            for (id, c) in rel {
                let (j, k) = (id / d, id % d);
                for m in 0..rt {
                    for (t, x) in &tr[k][m] {
                        rows[*t].add_term(j * rt + m, &(c * x));
                    }
                }
            }
            for r in rows {
                el.insert(r);
            }
        }
        let (free, kernel) = el.kernel();
        let mut free_pos = vec![None; unknowns];
        for (p, &f) in free.iter().enumerate() {
            free_pos[f] = Some(p);
        }
        let split = |v: &SVec| {
            let mut vals = vec![SVec::new(); gens.len()];
            for (u, c) in v {
                vals[u / rt].add_term(u % rt, c);
            }
            vals
        };
        let basis: Vec<GenValues> = kernel.iter().map(split).collect();
        let mut h = HomSpace {
            source: source.clone(),
            target: target.clone(),
            gens,
            expr,
            free_pos,
            basis,
            space: Arc::new(ModuleSpace::zero(source.algebra(), false, false)),
        };
        let right = source.left().map(|_| {
            (0..d)
                .map(|k| {
                    par::map_range(h.dim(), |b| {
                        let vals: GenValues = h
                            .gens
                            .iter()
                            .map(|&g| h.eval_vals(&h.basis[b], &source.act_left_basis(k, &SVec::unit(g))))
                            .collect();
                        h.coords_of_vals(&vals)
                    })
                })
                .collect()
        });
        h.space = Arc::new(ModuleSpace::from_parts(source.algebra().clone(), h.dim(), None, right));
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    /// Generator values of the element with coordinates `h`.
    pub fn vals(&self, h: &SVec) -> GenValues {
        let mut out = vec![SVec::new(); self.gens.len()];
        for (b, c) in h {
            for (o, v) in out.iter_mut().zip(&self.basis[*b]) {
                o.axpy(c, v);
            }
        }
        out
    }

    /// Coordinates of a map given by generator values that kill all relations.
    pub fn coords_of_vals(&self, vals: &GenValues) -> SVec {
        let rt = self.target.rank();
        let mut out = SVec::new();
        for (j, v) in vals.iter().enumerate() {
            for (m, c) in v {
                if let Some(p) = self.free_pos[j * rt + m] {
                    out.add_term(p, c);
                }
            }
        }
        out
    }

    /// Evaluate the map with generator values `vals` at `x`.
    pub fn eval_vals(&self, vals: &GenValues, x: &SVec) -> SVec {
        let d = self.source.algebra().dim();
        let mut out = SVec::new();
        for (xi, cx) in x {
            for (id, ce) in &self.expr[*xi] {
                let v = &vals[id / d];
                if v.is_zero() {
                    continue;
                }
                out.axpy(&(cx * ce), &self.target.act_right_basis(v, id % d));
            }
        }
        out
    }

    pub fn eval(&self, h: &SVec, x: &SVec) -> SVec {
        self.eval_vals(&self.vals(h), x)
    }

    /// Images of every source basis vector.
    pub fn to_cols(&self, h: &SVec) -> Vec<SVec> {
        let vals = self.vals(h);
        par::map_range(self.source.rank(), |x| self.eval_vals(&vals, &SVec::unit(x)))
    }

    /// Coordinates of the map with the given images, if it is right A-linear.
    pub fn from_cols(&self, cols: &[SVec]) -> Option<SVec> {
        let vals: GenValues = self.gens.iter().map(|&g| cols[g].clone()).collect();
        let h = self.coords_of_vals(&vals);
        let back = self.vals(&h);
        if back != vals {
            return None;
        }
        let ok = par::find_first(self.source.rank(), |x| (self.eval_vals(&back, &SVec::unit(x)) != cols[x]).then_some(())).is_none();
        ok.then_some(h)
    }

    /// Coordinates of the map `x ↦ f(x)`, evaluated only on generators.
    ///
    /// The caller guarantees right linearity; use `from_cols` to have it checked.
    pub fn from_generator_fn<F: Fn(usize) -> SVec>(&self, f: F) -> SVec {
        let vals: GenValues = self.gens.iter().map(|&g| f(g)).collect();
        self.coords_of_vals(&vals)
    }
}

/// `Hom_A(M, N)` for right modules.
pub fn hom_right_a(m: &Arc<ModuleSpace>, n: &Arc<ModuleSpace>) -> Result<HomSpace, AlgError> {
    HomSpace::new(m, n)
}

/// Mutually inverse maps `Hom_A(M ⊗_A L, N) ⇄ Hom_A(M, Hom_A(L, N))`.
#[derive(Clone, Debug)]
pub struct Adjunction {
    pub tensor: TensorProduct,
    pub lhs: HomSpace,
    pub inner: HomSpace,
    pub rhs: HomSpace,
    /// `f ↦ [m ↦ (l ↦ f(m ⊗ l))]`
    pub forward: LinMap,
    /// `g ↦ [m ⊗ l ↦ g(m)(l)]`
    pub backward: LinMap,
}

impl Adjunction {
    /// The element `m ↦ (l ↦ f(m ⊗ l))` of the outer hom space.
    pub fn curry<F: Fn(&SVec) -> SVec>(&self, f: F) -> SVec {
        self.rhs.from_generator_fn(|mi| {
            let em = SVec::unit(mi);
            self.inner.from_generator_fn(|lj| f(&self.tensor.tensor(&em, &SVec::unit(lj))))
        })
    }
}

pub fn adjunction_iso(m: &Arc<ModuleSpace>, l: &Arc<ModuleSpace>, n: &Arc<ModuleSpace>) -> Result<Adjunction, AlgError> {
    l.require_left("L")?;
    l.require_right("L")?;
    let tensor = tensor_over_a(m, l)?;
    let lhs = HomSpace::new(&tensor.space, n)?;
    let inner = HomSpace::new(l, n)?;
    let rhs = HomSpace::new(m, &inner.space)?;
    let fwd = par::map_range(lhs.dim(), |b| {
        let f = SVec::unit(b);
        let fv = lhs.vals(&f);
        rhs.from_generator_fn(|mi| {
            let em = SVec::unit(mi);
            inner.from_generator_fn(|lj| lhs.eval_vals(&fv, &tensor.tensor(&em, &SVec::unit(lj))))
        })
    });
    let bwd = par::map_range(rhs.dim(), |b| {
        let g = SVec::unit(b);
        let gv = rhs.vals(&g);
        lhs.from_generator_fn(|q| {
            let (mi, lj) = tensor.rep(q);
            let inner_elem = rhs.eval_vals(&gv, &SVec::unit(mi));
            inner.eval(&inner_elem, &SVec::unit(lj))
        })
    });
    let forward = LinMap::unchecked(lhs.space.clone(), rhs.space.clone(), fwd, Linearity::NONE);
    let backward = LinMap::unchecked(rhs.space.clone(), lhs.space.clone(), bwd, Linearity::NONE);
    let adj = Adjunction { tensor, lhs, inner, rhs, forward, backward };
    for b in 0..adj.lhs.dim() {
        let e = SVec::unit(b);
        if adj.backward.apply(&adj.forward.apply(&e)) != e {
            return Err(AlgError::AdjunctionFailed(format!("backward ∘ forward differs on basis {b}")));
        }
    }
    for b in 0..adj.rhs.dim() {
        let e = SVec::unit(b);
        if adj.forward.apply(&adj.backward.apply(&e)) != e {
            return Err(AlgError::AdjunctionFailed(format!("forward ∘ backward differs on basis {b}")));
        }
    }
    Ok(adj)
}
