//! Contramodules over corings, the graded module `Ξ(A, M)` with its right
//! `A•`-action, and ℤ-divergences: assembly from components and the
//! constructions from curved modules, left connections and contramodule
//! complexes.
//!
//! `Ξ(A, M)^n = ∏_i Hom_A(A^i, M^{n+i})` is kept for `i ≤ D`. Families with
//! `ξ_i = 0` for `i > D` form a sub-`A•`-module stable under every divergence
//! built here, since component `m` of `∇ξ` only reads `ξ_{m+k}` for `k ≥ 0`.
//! All identities are therefore checked exactly on that submodule.

mod sources;
#[cfg(test)]
mod tests;

use std::sync::Arc;

use serde_json::{json, Value};

use crate::algmod::{adjunction_iso, AlgError, HomSpace, ModuleSpace};
use crate::catalog::CatalogError;
use crate::cdga::{CdgaError, CurvedModule, SemiFreeCdga};
use crate::coring::{Coring, CoringError};
use crate::equiv::EquivError;
use crate::exactla::SVec;
use crate::par;
use crate::report::{vec_json, Report};

pub use sources::{
    comatrix_left_connection, direct_divergence, divergence_from_contramodule_complex, divergence_from_curved_module,
    divergence_from_left_connection, prop46_components, prop46_display, ComatrixConnection, ContraDivergence,
    CurvedModuleDivergence, DualDivergence, LeftConnection, Prop46Sign,
};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ContraError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error(transparent)]
    Coring(#[from] CoringError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("the truncation window is too narrow: {0}")]
    WindowTooNarrow(String),
    #[error("component ∇_{k} violates the Leibniz rule: {witness}")]
    ComponentLeibnizFailed { k: usize, witness: Value },
    #[error("the connection is not right B-linear: {0}")]
    NotRightBLinear(Value),
    #[error("not a left connection: {0}")]
    NotLeftConnection(Value),
    #[error("δ ∘ δ ≠ 0: {0}")]
    NotComplex(Value),
    #[error("δ is not a contramodule map: {0}")]
    NotContramoduleMap(Value),
    #[error("the base element does not have counit 1")]
    NotBased,
}

fn sign(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

fn add_signed(out: &mut SVec, negative: bool, v: &SVec) {
    if negative {
        out.sub(v);
    } else {
        out.add(v);
    }
}

/// A right contramodule: a right `A`-module `M` with `α: Hom_A(C, M) → M`.
#[derive(Clone, Debug)]
pub struct Contramodule {
    pub coring: Arc<Coring>,
    pub m: Arc<ModuleSpace>,
    /// `Hom_A(C, M)`.
    pub hom: Arc<HomSpace>,
    /// `α` on the basis of `hom`.
    pub alpha: Vec<SVec>,
}

impl Contramodule {
    pub fn new(coring: Arc<Coring>, m: Arc<ModuleSpace>, alpha: Vec<SVec>) -> Result<Self, ContraError> {
        if m.algebra() != coring.algebra() {
            return Err(ContraError::Shape("M is not a module over the base algebra".into()));
        }
        let hom = HomSpace::new(coring.c(), &m)?;
        if alpha.len() != hom.dim() || alpha.iter().any(|v| v.max_index().is_some_and(|i| i >= m.rank())) {
            return Err(ContraError::Shape(format!("α needs {} columns in a space of rank {}", hom.dim(), m.rank())));
        }
        Ok(Contramodule { coring, m, hom: Arc::new(hom), alpha })
    }

    pub fn apply(&self, f: &SVec) -> SVec {
        f.apply(&self.alpha)
    }

    /// `α` of the map with the given images of the basis of `C`, if it is right `A`-linear.
    pub fn apply_cols(&self, cols: &[SVec]) -> Option<SVec> {
        self.hom.from_cols(cols).map(|f| self.apply(&f))
    }
}

/// Right linearity of `α`, associativity through `Hom_A(C ⊗_A C, M) ≅ Hom_A(C, Hom_A(C, M))`
/// and counitality.
pub fn check_contramodule(c: &Contramodule) -> Report {
    let mut r = Report::new();
    let da = c.coring.algebra().dim();
    let rc = c.coring.rank();
    let sp = &c.hom.space;
    let lin = par::find_first(c.hom.dim() * da, |p| {
        let (f, k) = (p / da, p % da);
        let lhs = c.apply(&sp.act_right_basis(&SVec::unit(f), k));
        let rhs = c.m.act_right_basis(&c.apply(&SVec::unit(f)), k);
        (lhs != rhs).then(|| json!({"hom_basis": f, "alg": k, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
    });
    r.record("alpha_right_linear", lin);
    match adjunction_iso(c.coring.c(), c.coring.c(), &c.m) {
        Err(e) => r.fail("associativity", json!({"adjunction": e.to_string()})),
        Ok(adj) => {
            let delta: Vec<SVec> = c.coring.delta_lift().iter().map(|v| adj.tensor.project_plain(v)).collect();
            let bad = par::find_first(adj.lhs.dim(), |g| {
                let eg = SVec::unit(g);
                let curried = adj.rhs.vals(&adj.forward.apply(&eg));
                let mut nested = Vec::with_capacity(rc);
                for x in 0..rc {
                    let inner = adj.rhs.eval_vals(&curried, &SVec::unit(x));
                    match c.apply_cols(&adj.inner.to_cols(&inner)) {
                        Some(v) => nested.push(v),
                        None => return Some(json!({"lhs_basis": g, "reason": "inner map not linear"})),
                    }
                }
                let lhs = c.apply_cols(&nested);
                let along: Vec<SVec> = delta.iter().map(|d| adj.lhs.eval(&eg, d)).collect();
                let rhs = c.apply_cols(&along);
                match (lhs, rhs) {
                    (Some(l), Some(r)) if l == r => None,
                    (Some(l), Some(r)) => Some(json!({"lhs_basis": g, "lhs": vec_json(&l), "rhs": vec_json(&r)})),
                    _ => Some(json!({"lhs_basis": g, "reason": "composite not linear"})),
                }
            });
            r.record("associativity", bad);
        }
    }
    let counit = c.coring.counit();
    let cu = par::find_first(c.m.rank(), |m| {
        let em = SVec::unit(m);
        let cols: Vec<SVec> = counit.iter().map(|e| c.m.act_right(&em, e)).collect();
        match c.apply_cols(&cols) {
            Some(v) if v == em => None,
            Some(v) => Some(json!({"basis": m, "value": vec_json(&v)})),
            None => Some(json!({"basis": m, "reason": "m ε(·) is not linear"})),
        }
    });
    r.record("counitality", cu);
    r
}

/// `Hom_A(C, N)` with `α(g) = g̃ ∘ Δ`, where `g̃ ∈ Hom_A(C ⊗_A C, N)` is the
/// adjoint of `g ∈ Hom_A(C, Hom_A(C, N))`.
pub fn cofree_contramodule(coring: &Arc<Coring>, n: &Arc<ModuleSpace>) -> Result<Contramodule, ContraError> {
    let adj = adjunction_iso(coring.c(), coring.c(), n)?;
    let m = adj.inner.space.clone();
    let hom = HomSpace::new(coring.c(), &m)?;
    let delta: Vec<SVec> = coring.delta_lift().iter().map(|v| adj.tensor.project_plain(v)).collect();
    let alpha = par::map_range(hom.dim(), |f| {
        let g = adj.rhs.from_cols(&hom.to_cols(&SVec::unit(f))).expect("the same hom space");
        let gt = adj.backward.apply(&g);
        let cols: Vec<SVec> = delta.iter().map(|d| adj.lhs.eval(&gt, d)).collect();
        adj.inner.from_cols(&cols).expect("g̃ ∘ Δ is right linear")
    });
    Ok(Contramodule { coring: coring.clone(), m, hom: Arc::new(hom), alpha })
}

/// Right linearity of `f: M → M'` and `f ∘ α = α' ∘ Hom_A(C, f)`.
pub fn check_contramodule_map(src: &Contramodule, tgt: &Contramodule, f: &[SVec]) -> Report {
    let mut r = Report::new();
    if f.len() != src.m.rank() {
        r.fail("shape", json!({"columns": f.len(), "expected": src.m.rank()}));
        return r;
    }
    let da = src.coring.algebra().dim();
    let lin = par::find_first(src.m.rank() * da, |p| {
        let (x, k) = (p / da, p % da);
        let lhs = src.m.act_right_basis(&SVec::unit(x), k).apply(f);
        let rhs = tgt.m.act_right_basis(&f[x], k);
        (lhs != rhs).then(|| json!({"basis": x, "alg": k}))
    });
    r.record("right_linear", lin);
    let comm = par::find_first(src.hom.dim(), |h| {
        let cols: Vec<SVec> = src.hom.to_cols(&SVec::unit(h)).iter().map(|v| v.apply(f)).collect();
        let lhs = src.apply(&SVec::unit(h)).apply(f);
        match tgt.apply_cols(&cols) {
            Some(rhs) if rhs == lhs => None,
            Some(rhs) => Some(json!({"hom_basis": h, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)})),
            None => Some(json!({"hom_basis": h, "reason": "f ∘ h is not linear"})),
        }
    });
    r.record("commutes_with_alpha", comm);
    r
}

/// Contramodules `M^lo, ..., M^hi` over one coring with maps `δ^n: M^n → M^{n+1}`.
#[derive(Clone, Debug)]
pub struct ContramoduleComplex {
    pub lo: i64,
    pub terms: Vec<Contramodule>,
    pub delta: Vec<Vec<SVec>>,
}

impl ContramoduleComplex {
    pub fn new(lo: i64, terms: Vec<Contramodule>, delta: Vec<Vec<SVec>>) -> Result<Self, ContraError> {
        if terms.is_empty() || delta.len() + 1 != terms.len() {
            return Err(ContraError::Shape("one δ between consecutive terms".into()));
        }
        if terms.iter().any(|t| t.coring != terms[0].coring && *t.coring != *terms[0].coring) {
            return Err(ContraError::Shape("terms over different corings".into()));
        }
        for (i, d) in delta.iter().enumerate() {
            let next = terms[i + 1].m.rank();
            if d.len() != terms[i].m.rank() || d.iter().any(|v| v.max_index().is_some_and(|m| m >= next)) {
                return Err(ContraError::Shape(format!("δ out of degree {}", lo + i as i64)));
            }
        }
        Ok(ContramoduleComplex { lo, terms, delta })
    }

    pub fn single(c: Contramodule, lo: i64) -> Self {
        ContramoduleComplex { lo, terms: vec![c], delta: Vec::new() }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn coring(&self) -> &Arc<Coring> {
        &self.terms[0].coring
    }

    pub fn term(&self, n: i64) -> &Contramodule {
        &self.terms[(n - self.lo) as usize]
    }

    /// `δ^n`, zero outside the window.
    pub fn apply_delta(&self, n: i64, v: &SVec) -> SVec {
        if n < self.lo || n >= self.hi() {
            return SVec::new();
        }
        v.apply(&self.delta[(n - self.lo) as usize])
    }
}

/// Each term a contramodule, `δ ∘ δ = 0` and each `δ` a contramodule map.
pub fn check_contramodule_complex(cx: &ContramoduleComplex) -> Report {
    let mut r = Report::new();
    for (i, t) in cx.terms.iter().enumerate() {
        r.merge(&format!("term{}", cx.lo + i as i64), check_contramodule(t));
    }
    let mut sq = None;
    for n in cx.lo..cx.hi() - 1 {
        sq = (0..cx.term(n).m.rank()).find_map(|x| {
            let v = cx.apply_delta(n + 1, &cx.apply_delta(n, &SVec::unit(x)));
            (!v.is_zero()).then(|| json!({"degree": n, "basis": x, "value": vec_json(&v)}))
        });
        if sq.is_some() {
            break;
        }
    }
    r.record("delta_squared_zero", sq);
    for n in cx.lo..cx.hi() {
        let m = check_contramodule_map(cx.term(n), cx.term(n + 1), &cx.delta[(n - cx.lo) as usize]);
        r.merge(&format!("delta{n}"), m);
    }
    r
}

#[derive(Clone, Debug)]
struct Block {
    hom: HomSpace,
    offset: usize,
}

#[derive(Clone, Debug)]
struct XiDegree {
    blocks: Vec<Option<Block>>,
    dim: usize,
    space: Arc<ModuleSpace>,
}

/// `Ξ(A, M)^n = ∏_{i ≤ D} Hom_A(A^i, M^{n+i})` for `n` in `lo(M) − D ..= hi(M)`.
///
/// An element of `Ξ^n` is a coordinate vector; the block for `i` occupies a
/// contiguous range and holds coordinates in the basis of its hom space.
#[derive(Clone, Debug)]
pub struct XiModule {
    cdga: Arc<SemiFreeCdga>,
    mlo: i64,
    modules: Vec<Arc<ModuleSpace>>,
    degrees: Vec<XiDegree>,
}

/// Build `Ξ(A, M)` for the graded right `A`-module `modules` starting in degree `mlo`.
pub fn build_xi(cdga: &Arc<SemiFreeCdga>, mlo: i64, modules: Vec<Arc<ModuleSpace>>) -> Result<XiModule, ContraError> {
    if modules.is_empty() {
        return Err(ContraError::WindowTooNarrow("the module window is empty".into()));
    }
    for (i, m) in modules.iter().enumerate() {
        if !m.has_right() || m.algebra() != cdga.algebra() {
            return Err(ContraError::Shape(format!("degree {} is not a right module over A", mlo + i as i64)));
        }
    }
    let t = cdga.t();
    let dm = cdga.max_degree();
    let mhi = mlo + modules.len() as i64 - 1;
    let alg = cdga.algebra();
    let mut degrees = Vec::new();
    for n in mlo - dm as i64..=mhi {
        let mut blocks = Vec::with_capacity(dm + 1);
        let mut off = 0;
        for i in 0..=dm {
            let p = n + i as i64;
            let target = (p >= mlo && p <= mhi).then(|| &modules[(p - mlo) as usize]);
            let block = match target {
                Some(m) if m.rank() > 0 && t.dim(i) > 0 => {
                    let hom = HomSpace::new(t.space(i), m)?;
                    (hom.dim() > 0).then(|| {
                        let b = Block { hom, offset: off };
                        off += b.hom.dim();
                        b
                    })
                }
                _ => None,
            };
            blocks.push(block);
        }
        let action = (0..alg.dim())
            .map(|k| {
                let mut cols = Vec::with_capacity(off);
                for b in blocks.iter().flatten() {
                    for j in 0..b.hom.dim() {
                        cols.push(shift(&b.hom.space.act_right_basis(&SVec::unit(j), k), b.offset));
                    }
                }
                cols
            })
            .collect();
        let space = Arc::new(ModuleSpace::from_parts(alg.clone(), off, None, Some(action)));
        degrees.push(XiDegree { blocks, dim: off, space });
    }
    Ok(XiModule { cdga: cdga.clone(), mlo, modules, degrees })
}

fn shift(v: &SVec, off: usize) -> SVec {
    v.iter().map(|(i, c)| (i + off, c.clone())).collect()
}

impl XiModule {
    pub fn cdga(&self) -> &Arc<SemiFreeCdga> {
        &self.cdga
    }

    /// Largest component index kept.
    pub fn span(&self) -> usize {
        self.cdga.max_degree()
    }

    pub fn lo(&self) -> i64 {
        self.mlo - self.span() as i64
    }

    pub fn hi(&self) -> i64 {
        self.mhi()
    }

    pub fn mlo(&self) -> i64 {
        self.mlo
    }

    pub fn mhi(&self) -> i64 {
        self.mlo + self.modules.len() as i64 - 1
    }

    pub fn in_window(&self, n: i64) -> bool {
        n >= self.lo() && n <= self.hi()
    }

    fn deg(&self, n: i64) -> Option<&XiDegree> {
        self.in_window(n).then(|| &self.degrees[(n - self.lo()) as usize])
    }

    /// `M^p`, if `p` is in the module window.
    pub fn module(&self, p: i64) -> Option<&Arc<ModuleSpace>> {
        (p >= self.mlo && p <= self.mhi()).then(|| &self.modules[(p - self.mlo) as usize])
    }

    pub fn dim(&self, n: i64) -> usize {
        self.deg(n).map_or(0, |d| d.dim)
    }

    /// `Ξ^n` as a right `A`-module.
    pub fn space(&self, n: i64) -> &Arc<ModuleSpace> {
        &self.deg(n).expect("degree inside the window").space
    }

    /// `Hom_A(A^i, M^{n+i})`, when nonzero.
    pub fn block(&self, n: i64, i: usize) -> Option<&HomSpace> {
        self.deg(n).and_then(|d| d.blocks.get(i)).and_then(|b| b.as_ref()).map(|b| &b.hom)
    }

    fn block_full(&self, n: i64, i: usize) -> Option<&Block> {
        self.deg(n).and_then(|d| d.blocks.get(i)).and_then(|b| b.as_ref())
    }

    /// The blocks of `Ξ^n` as `(i, hom space)`.
    pub fn blocks(&self, n: i64) -> Vec<(usize, &HomSpace)> {
        self.deg(n).map_or(Vec::new(), |d| d.blocks.iter().enumerate().filter_map(|(i, b)| b.as_ref().map(|b| (i, &b.hom))).collect())
    }

    /// `ξ_i` in the basis of its block.
    pub fn component(&self, n: i64, xi: &SVec, i: usize) -> SVec {
        let Some(b) = self.block_full(n, i) else { return SVec::new() };
        let end = b.offset + b.hom.dim();
        xi.iter().filter(|(j, _)| **j >= b.offset && **j < end).map(|(j, c)| (j - b.offset, c.clone())).collect()
    }

    /// The family with a single nonzero component `h` in block `i`.
    pub fn embed(&self, n: i64, i: usize, h: &SVec) -> SVec {
        match self.block_full(n, i) {
            Some(b) => shift(h, b.offset),
            None => SVec::new(),
        }
    }

    /// `ξ_i(b)` for `b ∈ A^i`.
    pub fn eval(&self, n: i64, xi: &SVec, i: usize, b: &SVec) -> SVec {
        match self.block(n, i) {
            Some(h) => h.eval(&self.component(n, xi, i), b),
            None => SVec::new(),
        }
    }

    /// Images of the basis of `A^i` under `ξ_i`.
    pub fn component_cols(&self, n: i64, xi: &SVec, i: usize) -> Vec<SVec> {
        match self.block(n, i) {
            Some(h) => h.to_cols(&self.component(n, xi, i)),
            None => vec![SVec::new(); self.cdga.t().dim(i)],
        }
    }

    /// The family `Σ_i ξ_i` from the images of the bases of `A^i`; `None` if a
    /// component is not right `A`-linear or is nonzero outside the blocks.
    pub fn from_component_cols(&self, n: i64, cols: &[(usize, Vec<SVec>)]) -> Option<SVec> {
        let mut out = SVec::new();
        for (i, c) in cols {
            match self.block(n, *i) {
                Some(h) => out.add(&self.embed(n, *i, &h.from_cols(c)?)),
                None if c.iter().all(SVec::is_zero) => {}
                None => return None,
            }
        }
        Some(out)
    }

    /// `ξ a` for `ξ ∈ Ξ^n` and `a ∈ A^k`: component `j` is `b ↦ ξ_{j+k}(ab)`.
    pub fn act(&self, n: i64, xi: &SVec, k: usize, a: &SVec) -> SVec {
        let t = self.cdga.t();
        let mut out = SVec::new();
        for (j, hj) in self.blocks(n + k as i64) {
            let i = j + k;
            let Some(hi) = self.block(n, i) else { continue };
            let comp = self.component(n, xi, i);
            if comp.is_zero() {
                continue;
            }
            let vals = hi.vals(&comp);
            let h = hj.from_generator_fn(|g| hi.eval_vals(&vals, &t.mul(k, a, j, &SVec::unit(g))));
            out.add(&self.embed(n + k as i64, j, &h));
        }
        out
    }
}

/// Associativity and unitality of the action on every basis element of `Ξ`,
/// against basis elements of degrees 0 and 1.
pub fn check_xi(xi: &XiModule) -> Report {
    let mut r = Report::new();
    let t = xi.cdga().t();
    let bad = (xi.lo()..=xi.hi()).position(|n| xi.space(n).check().is_err());
    r.record("right_modules", bad.map(|i| json!({"degree": xi.lo() + i as i64})));
    let unit = t.unit();
    let mut un = None;
    for n in xi.lo()..=xi.hi() {
        un = par::find_first(xi.dim(n), |b| {
            let e = SVec::unit(b);
            let v = xi.act(n, &e, 0, &unit);
            (v != e).then(|| json!({"degree": n, "basis": b}))
        });
        if un.is_some() {
            break;
        }
    }
    r.record("unital", un);
    let mut assoc = None;
    'outer: for n in xi.lo()..=xi.hi() {
        for (k, l) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            if k + l > t.max_degree() {
                continue;
            }
            let (dk, dl) = (t.dim(k), t.dim(l));
            assoc = par::find_first(xi.dim(n) * dk * dl, |p| {
                let (b, a, c) = (p / (dk * dl), (p / dl) % dk, p % dl);
                let (e, ea, ec) = (SVec::unit(b), SVec::unit(a), SVec::unit(c));
                let lhs = xi.act(n + k as i64, &xi.act(n, &e, k, &ea), l, &ec);
                let rhs = xi.act(n, &e, k + l, &t.mul(k, &ea, l, &ec));
                (lhs != rhs).then(|| json!({"degree": n, "basis": b, "degrees": [k, l], "a": a, "c": c}))
            });
            if assoc.is_some() {
                break 'outer;
            }
        }
    }
    r.record("associative", assoc);
    r
}

/// A degree one map `∇` on `Ξ(A, M)`, stored on the basis of each `Ξ^n` with `n < hi`.
#[derive(Clone, Debug)]
pub struct ZDivergence {
    pub xi: Arc<XiModule>,
    nabla: Vec<Vec<SVec>>,
    /// Leibniz rule, checked at construction.
    pub report: Report,
}

impl ZDivergence {
    pub fn new(xi: Arc<XiModule>, nabla: Vec<Vec<SVec>>) -> Result<Self, ContraError> {
        let steps = (xi.hi() - xi.lo()) as usize;
        if nabla.len() != steps {
            return Err(ContraError::Shape(format!("∇ needs {steps} degrees")));
        }
        for (i, cols) in nabla.iter().enumerate() {
            let n = xi.lo() + i as i64;
            let next = xi.dim(n + 1);
            if cols.len() != xi.dim(n) || cols.iter().any(|v| v.max_index().is_some_and(|m| m >= next)) {
                return Err(ContraError::Shape(format!("∇ out of degree {n}")));
            }
        }
        let mut z = ZDivergence { xi, nabla, report: Report::new() };
        z.report = check_divergence_leibniz(&z);
        Ok(z)
    }

    pub fn cols(&self, n: i64) -> &[SVec] {
        &self.nabla[(n - self.xi.lo()) as usize]
    }

    /// `∇ξ` for `ξ ∈ Ξ^n`; zero from the top degree.
    pub fn apply(&self, n: i64, x: &SVec) -> SVec {
        if n < self.xi.lo() || n >= self.xi.hi() {
            return SVec::new();
        }
        x.apply(self.cols(n))
    }

    /// `(Ξ(A, M), ∇)` as a curved right module; it is one exactly when `∇` is
    /// an integrable divergence.
    pub fn to_curved_module(&self) -> Result<CurvedModule, ContraError> {
        let xi = &self.xi;
        let rv = xi.cdga().v().rank();
        let spaces = (xi.lo()..=xi.hi()).map(|n| xi.space(n).clone()).collect();
        let vact = (xi.lo()..xi.hi())
            .map(|n| par::map_range(xi.dim(n) * rv, |p| xi.act(n, &SVec::unit(p / rv), 1, &SVec::unit(p % rv))))
            .collect();
        Ok(CurvedModule::new(xi.cdga().clone(), xi.lo(), spaces, vact, self.nabla.clone())?)
    }

    /// `∇^n_k`: `∇^{n,0}` on the `k`-th factor, read through `Hom_A(A, M) ≅ M`.
    pub fn components(&self) -> DivergenceComponents {
        let xi = self.xi.clone();
        let unit = xi.cdga().t().unit();
        DivergenceComponents::from_fn(xi.clone(), |n, k, h| {
            let v = self.apply(n, &xi.embed(n, k, h));
            xi.eval(n + 1, &v, 0, &unit)
        })
    }
}

/// `∇(ξa) = ∇(ξ)a + (−1)^{|ξ|} ξ da` for basis elements `ξ ∈ Ξ^n` and `a ∈ A^s`,
/// `s < D`, whenever `Ξ^{n+s}` is in the window.
pub fn check_divergence_leibniz(z: &ZDivergence) -> Report {
    let mut r = Report::new();
    let xi = &z.xi;
    let cdga = xi.cdga();
    let t = cdga.t();
    let mut bad = None;
    'outer: for n in xi.lo()..=xi.hi() {
        for s in 0..t.max_degree() {
            if n + s as i64 > xi.hi() {
                break;
            }
            let ds = t.dim(s);
            bad = par::find_first(xi.dim(n) * ds, |p| {
                let (b, a) = (p / ds, p % ds);
                let (e, ea) = (SVec::unit(b), SVec::unit(a));
                let lhs = z.apply(n + s as i64, &xi.act(n, &e, s, &ea));
                let mut rhs = xi.act(n + 1, &z.apply(n, &e), s, &ea);
                add_signed(&mut rhs, sign(n), &xi.act(n, &e, s + 1, &cdga.apply_d(s, &ea)));
                (lhs != rhs).then(|| json!({"degree": n, "basis": b, "a_degree": s, "a": a, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
            });
            if bad.is_some() {
                break 'outer;
            }
        }
    }
    r.record_window("leibniz", xi.lo(), xi.hi(), bad);
    r
}

/// `∇∘∇(ξ) = −ξγ` on every basis element.
pub fn check_integrable(z: &ZDivergence) -> Report {
    let mut r = Report::new();
    let xi = &z.xi;
    let gamma = xi.cdga().gamma();
    let mut bad = None;
    for n in xi.lo()..xi.hi() - 1 {
        bad = par::find_first(xi.dim(n), |b| {
            let e = SVec::unit(b);
            let lhs = z.apply(n + 1, &z.apply(n, &e));
            let rhs = xi.act(n, &e, 2, gamma).neg();
            (lhs != rhs).then(|| json!({"degree": n, "basis": b, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
        });
        if bad.is_some() {
            break;
        }
    }
    r.record_window("integrable", xi.lo(), xi.hi() - 2, bad);
    r
}

/// Maps `∇^n_k: Hom_A(A^k, M^{n+k}) → M^{n+1}` on the basis of each block of `Ξ`.
#[derive(Clone, Debug)]
pub struct DivergenceComponents {
    pub xi: Arc<XiModule>,
    /// `cols[n − lo][k]`, empty where the block or `M^{n+1}` is zero.
    cols: Vec<Vec<Vec<SVec>>>,
}

impl DivergenceComponents {
    /// Components from their values on block basis vectors.
    pub fn from_fn<F>(xi: Arc<XiModule>, f: F) -> Self
    where
        F: Fn(i64, usize, &SVec) -> SVec + Sync + Send,
    {
        let cols = (xi.lo()..=xi.hi())
            .map(|n| {
                (0..=xi.span())
                    .map(|k| match (xi.block(n, k), xi.module(n + 1)) {
                        (Some(h), Some(_)) => par::map_range(h.dim(), |b| f(n, k, &SVec::unit(b))),
                        _ => Vec::new(),
                    })
                    .collect()
            })
            .collect();
        DivergenceComponents { xi, cols }
    }

    pub fn zero(xi: Arc<XiModule>) -> Self {
        Self::from_fn(xi, |_, _, _| SVec::new())
    }

    pub fn cols(&self, n: i64, k: usize) -> &[SVec] {
        if !self.xi.in_window(n) {
            return &[];
        }
        self.cols[(n - self.xi.lo()) as usize].get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn apply(&self, n: i64, k: usize, h: &SVec) -> SVec {
        let cols = self.cols(n, k);
        if cols.is_empty() {
            return SVec::new();
        }
        h.apply(cols)
    }

    /// `∇^n_k(ξa) = ∇^n_k(ξ)a + (−1)^n δ_{k1} ξ(da)` for `a ∈ A`; the first failure.
    pub fn leibniz_failure(&self) -> Option<(usize, Value)> {
        let xi = &self.xi;
        let d0 = xi.cdga().d0();
        let da = d0.len();
        for n in xi.lo()..=xi.hi() {
            let Some(target) = xi.module(n + 1) else { continue };
            for (k, h) in xi.blocks(n) {
                let bad = par::find_first(h.dim() * da, |p| {
                    let (b, a) = (p / da, p % da);
                    let e = SVec::unit(b);
                    let lhs = self.apply(n, k, &h.space.act_right_basis(&e, a));
                    let mut rhs = target.act_right_basis(&self.apply(n, k, &e), a);
                    if k == 1 {
                        add_signed(&mut rhs, sign(n), &h.eval(&e, &d0[a]));
                    }
                    (lhs != rhs).then(|| json!({"degree": n, "basis": b, "alg": a, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
                });
                if let Some(w) = bad {
                    return Some((k, w));
                }
            }
        }
        None
    }
}

/// The divergence with components `∇^n_k`:
/// `∇^{n,m}(ξ)(a) = Σ_k ∇^{n+m}_k(ξ_{m+k} a) + (−1)^{n+1} ξ_{m+1}(da)`.
///
/// A term enters exactly when its factor `ξ_{m+k}` or `ξ_{m+1}` is a block of
/// `Ξ^n`; all other terms vanish on the truncated product.
pub fn assemble_divergence(comps: &DivergenceComponents) -> Result<ZDivergence, ContraError> {
    if let Some((k, witness)) = comps.leibniz_failure() {
        return Err(ContraError::ComponentLeibnizFailed { k, witness });
    }
    let xi = comps.xi.clone();
    let cdga = xi.cdga().clone();
    let t = cdga.t();
    let span = xi.span();
    let mut nabla = Vec::new();
    for n in xi.lo()..xi.hi() {
        let cols = par::map_range(xi.dim(n), |b| {
            let e = SVec::unit(b);
            let mut parts = Vec::new();
            for (m, _) in xi.blocks(n + 1) {
                let mi = m as i64;
                let img = par::map_range(t.dim(m), |a| {
                    let ea = SVec::unit(a);
                    let mut v = SVec::new();
                    for (k, hk) in xi.blocks(n + mi) {
                        if m + k > span || xi.block(n, m + k).is_none() {
                            continue;
                        }
                        let h = hk.from_generator_fn(|g| xi.eval(n, &e, m + k, &t.mul(m, &ea, k, &SVec::unit(g))));
                        v.add(&comps.apply(n + mi, k, &h));
                    }
                    if m < span {
                        add_signed(&mut v, sign(n + 1), &xi.eval(n, &e, m + 1, &cdga.apply_d(m, &ea)));
                    }
                    v
                });
                parts.push((m, img));
            }
            xi.from_component_cols(n + 1, &parts)
        });
        let cols = cols
            .into_iter()
            .enumerate()
            .map(|(b, c)| c.ok_or_else(|| ContraError::Shape(format!("assembled ∇ on basis {b} of degree {n} is not right A-linear"))))
            .collect::<Result<Vec<_>, _>>()?;
        nabla.push(cols);
    }
    ZDivergence::new(xi, nabla)
}
