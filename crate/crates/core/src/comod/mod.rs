//! Right comodules, complexes of comodules with their differential graded
//! morphisms and cones, and the passage between such complexes and integrable
//! ℤ-connections.

mod connection;

use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algmod::{direct_sum, hom_right_a, AlgError, ModuleSpace, ModuleTower};
use crate::cdga::CdgaError;
use crate::coring::{Coring, CoringError};
use crate::equiv::EquivError;
use crate::exactla::{q, SVec, Scalar};
use crate::par;
use crate::report::{mismatch, Report};

pub use connection::{complex_from_connection, connection_from_complex, ZConnection};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ComodError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Coring(#[from] CoringError),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error("the morphism is not closed: {0}")]
    NotClosed(String),
    #[error("the morphism has degree {0}, not 0")]
    NotDegreeZero(i64),
    #[error("the element is not a base point")]
    NotBased,
    #[error("the connection has a nonzero component of degree {0}")]
    HigherComponentsPresent(usize),
    #[error("the morphisms are not composable")]
    NotComposable,
    #[error("the twisted coaction of the cone is not a coaction: {0}")]
    ConeCoaction(Value),
}

fn sign(e: i64) -> crate::exactla::Scalar {
    if e.rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// A right `C`-comodule: a right `A`-module `M` with `ρ: M → M ⊗_A C`.
#[derive(Debug)]
pub struct Comodule {
    coring: Arc<Coring>,
    m: Arc<ModuleSpace>,
    rho: Vec<SVec>,
    tower: RwLock<Arc<ModuleTower>>,
}

impl Clone for Comodule {
    fn clone(&self) -> Self {
        Comodule { coring: self.coring.clone(), m: self.m.clone(), rho: self.rho.clone(), tower: RwLock::new(self.tower(1)) }
    }
}

impl PartialEq for Comodule {
    fn eq(&self, other: &Self) -> bool {
        self.coring == other.coring && self.m == other.m && self.rho == other.rho
    }
}

impl Comodule {
    /// `rho_lift[m]` is `ρ(m)` in the plain tensor `M ⊗ C`, index `m * rank(C) + c`.
    pub fn new(coring: &Arc<Coring>, m: Arc<ModuleSpace>, rho_lift: &[SVec]) -> Result<Self, ComodError> {
        let bound = m.rank() * coring.rank();
        if rho_lift.len() != m.rank() || rho_lift.iter().any(|v| v.max_index().is_some_and(|i| i >= bound)) {
            return Err(ComodError::Shape("one coaction value in M ⊗ C per basis vector of M".into()));
        }
        Self::with_tower(coring, m, |tw| rho_lift.iter().map(|v| tw.project_plain(1, v)).collect())
    }

    /// Build the coaction from the tower `M ⊗_A C^{⊗k}`.
    pub fn with_tower<F>(coring: &Arc<Coring>, m: Arc<ModuleSpace>, f: F) -> Result<Self, ComodError>
    where
        F: FnOnce(&ModuleTower) -> Vec<SVec>,
    {
        if m.algebra() != coring.algebra() {
            return Err(ComodError::Shape("M is over a different algebra".into()));
        }
        m.require_right("M")?;
        let tw = Arc::new(ModuleTower::new(&m, &coring.tower(2), 1)?);
        let rho = f(&tw);
        let bound = tw.dim(1);
        if rho.len() != m.rank() || rho.iter().any(|v| v.max_index().is_some_and(|i| i >= bound)) {
            return Err(ComodError::Shape("coaction outside M ⊗_A C".into()));
        }
        Ok(Comodule { coring: coring.clone(), m, rho, tower: RwLock::new(tw) })
    }

    /// `C` as a right comodule over itself.
    pub fn regular(coring: &Arc<Coring>) -> Result<Self, ComodError> {
        Self::new(coring, Arc::new(coring.c().as_right()), &coring.delta_lift())
    }

    pub fn zero(coring: &Arc<Coring>) -> Self {
        Self::new(coring, Arc::new(ModuleSpace::zero(coring.algebra(), false, true)), &[]).expect("the zero comodule")
    }

    pub fn coring(&self) -> &Arc<Coring> {
        &self.coring
    }

    pub fn space(&self) -> &Arc<ModuleSpace> {
        &self.m
    }

    pub fn rank(&self) -> usize {
        self.m.rank()
    }

    pub fn rho(&self) -> &[SVec] {
        &self.rho
    }

    pub fn apply_rho(&self, x: &SVec) -> SVec {
        x.apply(&self.rho)
    }

    /// `M ⊗_A C^{⊗j}` for `j ≤ k`; deeper towers are built on demand.
    pub fn tower(&self, k: usize) -> Arc<ModuleTower> {
        {
            let t = self.tower.read().expect("tower lock");
            if t.depth() >= k {
                return t.clone();
            }
        }
        let mut w = self.tower.write().expect("tower lock");
        if w.depth() < k {
            *w = Arc::new(ModuleTower::new(&self.m, &self.coring.tower(k.max(2)), k).expect("M is a right module"));
        }
        w.clone()
    }
}

/// `m_h ⊗ t_1 ⊗ .. ⊗ y ⊗ .. ⊗ t_k` with the `i`-th factor (from 1) of basis
/// vector `q` of `M ⊗ C^{⊗k}` replaced by `y ∈ C^{⊗r}`.
fn splice(tw: &ModuleTower, k: usize, q: usize, i: usize, r: usize, y: &SVec) -> SVec {
    let (h, t) = tw.tuple(k, q);
    let head = tw.elem(h, &t[..i - 1]);
    let mid = tw.tensor_t(i - 1, &head, r, y);
    tw.append_tuple(i - 1 + r, &mid, &t[i..])
}

/// `(M ⊗ Δ_i)(x)` for `x ∈ M ⊗ C^{⊗k}`.
pub(crate) fn delta_slot(coring: &Coring, tw: &ModuleTower, k: usize, i: usize, x: &SVec) -> SVec {
    let mut out = SVec::new();
    for (qq, c) in x {
        let f = tw.tuple(k, *qq).1[i - 1];
        out.axpy(c, &splice(tw, k, *qq, i, 2, &coring.delta()[f]));
    }
    out
}

/// `(M ⊗ ε_i)(x)` for `x ∈ M ⊗ C^{⊗k}`.
pub(crate) fn counit_slot(coring: &Coring, tw: &ModuleTower, k: usize, i: usize, x: &SVec) -> SVec {
    let mut out = SVec::new();
    for (qq, c) in x {
        let f = tw.tuple(k, *qq).1[i - 1];
        out.axpy(c, &splice(tw, k, *qq, i, 0, &coring.counit()[f]));
    }
    out
}

/// `(f ⊗ C^{⊗k})(x)` for `x ∈ M ⊗ C^{⊗k}` and `f` sending the basis of `M`
/// into level `j` of `target`.
pub(crate) fn extend(target: &ModuleTower, j: usize, f: &[SVec], src: &ModuleTower, k: usize, x: &SVec) -> SVec {
    let mut out = SVec::new();
    for (qq, c) in x {
        let (h, t) = src.tuple(k, *qq);
        out.axpy(c, &target.append_tuple(j, &f[h], t));
    }
    out
}

/// Right linearity, coassociativity and counitality of `ρ` on basis vectors.
pub fn check_comodule(m: &Comodule) -> Report {
    let mut r = Report::new();
    let tw = m.tower(2);
    let sp = m.space();
    let da = m.coring().algebra().dim();
    r.record("module", sp.check().err().map(|e| json!(e.to_string())));
    let lin = par::find_first(m.rank() * da, |p| {
        let (x, k) = (p / da, p % da);
        let lhs = m.apply_rho(&sp.act_right_basis(&SVec::unit(x), k));
        let rhs = tw.space(1).act_right_basis(&m.rho()[x], k);
        (lhs != rhs).then(|| json!({"basis": x, "alg": k}))
    });
    r.record("rho_right_linear", lin);
    let coassoc = par::find_first(m.rank(), |x| {
        let y = &m.rho()[x];
        let lhs = extend(&tw, 1, m.rho(), &tw, 1, y);
        let rhs = delta_slot(m.coring(), &tw, 1, 1, y);
        (lhs != rhs).then(|| mismatch("basis", x, &lhs, &rhs))
    });
    r.record("coassociativity", coassoc);
    let counit = par::find_first(m.rank(), |x| {
        let lhs = counit_slot(m.coring(), &tw, 1, 1, &m.rho()[x]);
        let rhs = SVec::unit(x);
        (lhs != rhs).then(|| mismatch("basis", x, &lhs, &rhs))
    });
    r.record("counitality", counit);
    r
}

/// A bounded complex of comodules `(M^l, ρ_l, δ^l)` for `l = lo ..= hi`.
///
/// `deltas[i]` holds the images of the basis of `M^{lo+i}` in `M^{lo+i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComoduleComplex {
    coring: Arc<Coring>,
    lo: i64,
    terms: Vec<Comodule>,
    deltas: Vec<Vec<SVec>>,
}

impl ComoduleComplex {
    pub fn new(coring: Arc<Coring>, lo: i64, terms: Vec<Comodule>, deltas: Vec<Vec<SVec>>) -> Result<Self, ComodError> {
        if terms.is_empty() {
            return Err(ComodError::Shape("a complex needs at least one term".into()));
        }
        if deltas.len() + 1 != terms.len() {
            return Err(ComodError::Shape("one differential between consecutive terms".into()));
        }
        if let Some(i) = terms.iter().position(|t| *t.coring() != coring) {
            return Err(ComodError::Shape(format!("term {} is over another coring", lo + i as i64)));
        }
        for (i, d) in deltas.iter().enumerate() {
            let next = terms[i + 1].rank();
            if d.len() != terms[i].rank() || d.iter().any(|v| v.max_index().is_some_and(|m| m >= next)) {
                return Err(ComodError::Shape(format!("differential out of degree {}", lo + i as i64)));
            }
        }
        Ok(ComoduleComplex { coring, lo, terms, deltas })
    }

    /// One comodule in degree `l`.
    pub fn single(m: Comodule, l: i64) -> Self {
        ComoduleComplex { coring: m.coring().clone(), lo: l, terms: vec![m], deltas: Vec::new() }
    }

    pub fn coring(&self) -> &Arc<Coring> {
        &self.coring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn in_window(&self, l: i64) -> bool {
        l >= self.lo && l <= self.hi()
    }

    pub fn term(&self, l: i64) -> Option<&Comodule> {
        self.in_window(l).then(|| &self.terms[(l - self.lo) as usize])
    }

    pub fn terms(&self) -> &[Comodule] {
        &self.terms
    }

    /// Rank of `M^l`, zero outside the window.
    pub fn rank(&self, l: i64) -> usize {
        self.term(l).map_or(0, Comodule::rank)
    }

    /// `δ^l`, or `None` when it maps into or out of a zero term.
    pub fn delta(&self, l: i64) -> Option<&[SVec]> {
        (l >= self.lo && l < self.hi()).then(|| self.deltas[(l - self.lo) as usize].as_slice())
    }

    pub fn deltas(&self) -> &[Vec<SVec>] {
        &self.deltas
    }

    pub fn apply_delta(&self, l: i64, x: &SVec) -> SVec {
        self.delta(l).map_or_else(SVec::new, |d| x.apply(d))
    }

    /// `M[1]`: the same terms and differentials, one degree lower.
    pub fn shift(&self) -> Self {
        ComoduleComplex { lo: self.lo - 1, ..self.clone() }
    }
}

/// Every term is a comodule, every `δ^l` is right linear and colinear, and `δδ = 0`.
pub fn check_complex(c: &ComoduleComplex) -> Report {
    let mut r = Report::new();
    for (i, t) in c.terms().iter().enumerate() {
        r.merge(&format!("M^{}", c.lo() + i as i64), check_comodule(t));
    }
    let (lo, hi) = (c.lo(), c.hi());
    let da = c.coring().algebra().dim();
    let mut lin = None;
    let mut colin = None;
    for l in lo..hi {
        let (src, tgt) = (c.term(l).unwrap(), c.term(l + 1).unwrap());
        let d = c.delta(l).unwrap();
        if lin.is_none() {
            lin = par::find_first(src.rank() * da, |p| {
                let (x, k) = (p / da, p % da);
                let lhs = src.space().act_right_basis(&SVec::unit(x), k).apply(d);
                let rhs = tgt.space().act_right_basis(&d[x], k);
                (lhs != rhs).then(|| json!({"degree": l, "basis": x, "alg": k}))
            });
        }
        if colin.is_none() {
            let (ts, tt) = (src.tower(1), tgt.tower(1));
            colin = par::find_first(src.rank(), |x| {
                let lhs = tgt.apply_rho(&d[x]);
                let rhs = extend(&tt, 0, d, &ts, 1, &src.rho()[x]);
                (lhs != rhs).then(|| json!({"degree": l, "witness": mismatch("basis", x, &lhs, &rhs)}))
            });
        }
    }
    r.record_window("delta_right_linear", lo, hi - 1, lin);
    r.record_window("delta_colinear", lo, hi - 1, colin);
    let mut sq = None;
    for l in lo..hi - 1 {
        let (d0, d1) = (c.delta(l).unwrap(), c.delta(l + 1).unwrap());
        sq = (0..d0.len()).find_map(|x| {
            let y = d0[x].apply(d1);
            (!y.is_zero()).then(|| json!({"degree": l, "basis": x, "image": crate::report::vec_json(&y)}))
        });
        if sq.is_some() {
            break;
        }
    }
    r.record_window("delta_squared_zero", lo, hi - 2, sq);
    r
}

/// A morphism of comodule complexes of a fixed degree `s`, kept up to
/// `k = depth`.
///
/// `comps[k][l - source.lo]` holds the images of the basis of `M^l` in
/// `N^{l+s-k} ⊗_A C^{⊗k}`; it is empty-valued when that term is zero.
/// Component `k` of a differential or composite depends only on components of
/// index at most `k`, so the truncation is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMorphism {
    pub source: Arc<ComoduleComplex>,
    pub target: Arc<ComoduleComplex>,
    pub degree: i64,
    pub comps: Vec<Vec<Vec<SVec>>>,
}

fn target_dim(n: &ComoduleComplex, l: i64, k: usize) -> usize {
    n.term(l).map_or(0, |t| t.tower(k).dim(k))
}

impl ComplexMorphism {
    pub fn new(source: Arc<ComoduleComplex>, target: Arc<ComoduleComplex>, degree: i64, comps: Vec<Vec<Vec<SVec>>>) -> Result<Self, ComodError> {
        if !Arc::ptr_eq(source.coring(), target.coring()) && source.coring() != target.coring() {
            return Err(ComodError::Shape("complexes over different corings".into()));
        }
        if comps.is_empty() {
            return Err(ComodError::Shape("at least the k = 0 components".into()));
        }
        for (k, ck) in comps.iter().enumerate() {
            if ck.len() != source.terms().len() {
                return Err(ComodError::Shape(format!("one component per source degree at k = {k}")));
            }
            for (i, cols) in ck.iter().enumerate() {
                let l = source.lo() + i as i64;
                let bound = target_dim(&target, l + degree - k as i64, k);
                if cols.len() != source.rank(l) || cols.iter().any(|v| v.max_index().is_some_and(|m| m >= bound)) {
                    return Err(ComodError::Shape(format!("component ({k}, {l}) has the wrong shape")));
                }
            }
        }
        Ok(ComplexMorphism { source, target, degree, comps })
    }

    pub fn zero(source: &Arc<ComoduleComplex>, target: &Arc<ComoduleComplex>, degree: i64, depth: usize) -> Self {
        let comps = (0..=depth)
            .map(|_| source.terms().iter().map(|t| vec![SVec::new(); t.rank()]).collect())
            .collect();
        ComplexMorphism { source: source.clone(), target: target.clone(), degree, comps }
    }

    pub fn identity(c: &Arc<ComoduleComplex>, depth: usize) -> Self {
        let mut m = Self::zero(c, c, 0, depth);
        m.comps[0] = c.terms().iter().map(|t| (0..t.rank()).map(SVec::unit).collect()).collect();
        m
    }

    pub fn depth(&self) -> usize {
        self.comps.len() - 1
    }

    /// `φ^k_l`; `None` outside the source window.
    pub fn component(&self, k: usize, l: i64) -> Option<&[SVec]> {
        self.source.in_window(l).then(|| self.comps[k][(l - self.source.lo()) as usize].as_slice())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().flatten().flatten().all(SVec::is_zero)
    }

    /// First `(k, l, basis)` with a nonzero value.
    pub fn first_nonzero(&self) -> Option<(usize, i64, usize)> {
        for (k, ck) in self.comps.iter().enumerate() {
            for (i, cols) in ck.iter().enumerate() {
                if let Some(x) = cols.iter().position(|v| !v.is_zero()) {
                    return Some((k, self.source.lo() + i as i64, x));
                }
            }
        }
        None
    }

    pub fn truncate(&self, depth: usize) -> Self {
        ComplexMorphism { comps: self.comps[..=depth.min(self.depth())].to_vec(), ..self.clone() }
    }
}

/// `b(φ^k_l)(m)` for `φ^k_l: M^l → N^{l+s-k} ⊗ C^{⊗k}`.
fn b_operator(phi: &ComplexMorphism, k: usize, l: i64, x: usize) -> SVec {
    let n = l + phi.degree - k as i64;
    let (Some(nt), Some(mt)) = (phi.target.term(n), phi.source.term(l)) else {
        return SVec::new();
    };
    let cols = phi.component(k, l).unwrap();
    let coring = phi.source.coring();
    let twn = nt.tower(k + 1);
    let y = &cols[x];
    let mut out = extend(&twn, 1, nt.rho(), &twn, k, y);
    for i in 1..=k {
        out.axpy(&sign(i as i64), &delta_slot(coring, &twn, k, i, y));
    }
    let twm = mt.tower(1);
    out.axpy(&sign(k as i64 + 1), &extend(&twn, k, cols, &twm, 1, &mt.rho()[x]));
    out
}

/// The differential of a degree `s` morphism:
/// `(dφ)^k_l = (δ_N ⊗ C^{⊗k})φ^k_l − (−1)^s φ^k_{l+1}δ^l_M − (−1)^{l+s−k} b(φ^{k−1}_l)`.
pub fn dg_differential(phi: &ComplexMorphism) -> ComplexMorphism {
    let (m, n) = (&phi.source, &phi.target);
    let s = phi.degree;
    let mut out = ComplexMorphism::zero(m, n, s + 1, phi.depth());
    for k in 0..=phi.depth() {
        for l in m.lo()..=m.hi() {
            let src = l + s - k as i64;
            let cols = phi.component(k, l).unwrap();
            let next = phi.component(k, l + 1);
            let vals = par::map_range(m.rank(l), |x| {
                let mut v = SVec::new();
                if let (Some(d), Some(ns), Some(nt)) = (n.delta(src), n.term(src), n.term(src + 1)) {
                    v = extend(&nt.tower(k), 0, d, &ns.tower(k), k, &cols[x]);
                }
                if let (Some(dm), Some(nx)) = (m.delta(l), next) {
                    v.axpy(&-sign(s), &dm[x].apply(nx));
                }
                if k >= 1 {
                    v.axpy(&-sign(l + s - k as i64), &b_operator(phi, k - 1, l, x));
                }
                v
            });
            out.comps[k][(l - m.lo()) as usize] = vals;
        }
    }
    out
}

/// `(ψ∘φ)^k_l = Σ_i (ψ^{k−i}_{l+s−i} ⊗ C^{⊗i}) ∘ φ^i_l`, truncated at the
/// smaller depth.
pub fn dg_compose(psi: &ComplexMorphism, phi: &ComplexMorphism) -> Result<ComplexMorphism, ComodError> {
    if !Arc::ptr_eq(&phi.target, &psi.source) && *phi.target != *psi.source {
        return Err(ComodError::NotComposable);
    }
    let (m, nn, p) = (&phi.source, &phi.target, &psi.target);
    let (s, t) = (phi.degree, psi.degree);
    let depth = phi.depth().min(psi.depth());
    let mut out = ComplexMorphism::zero(m, p, s + t, depth);
    for k in 0..=depth {
        for l in m.lo()..=m.hi() {
            let pdeg = l + s + t - k as i64;
            let Some(pt) = p.term(pdeg) else { continue };
            let twp = pt.tower(k);
            let vals = par::map_range(m.rank(l), |x| {
                let mut v = SVec::new();
                for i in 0..=k {
                    let nd = l + s - i as i64;
                    let (Some(nt), Some(pc)) = (nn.term(nd), psi.component(k - i, nd)) else { continue };
                    let y = &phi.component(i, l).unwrap()[x];
                    v.add(&extend(&twp, k - i, pc, &nt.tower(i), i, y));
                }
                v
            });
            out.comps[k][(l - m.lo()) as usize] = vals;
        }
    }
    Ok(out)
}

/// `ψ + c φ` for morphisms with the same ends and degree.
pub fn morphism_axpy(psi: &ComplexMorphism, c: &crate::exactla::Scalar, phi: &ComplexMorphism) -> ComplexMorphism {
    let depth = psi.depth().min(phi.depth());
    let mut out = psi.truncate(depth);
    for (ok, pk) in out.comps.iter_mut().zip(&phi.comps) {
        for (ol, pl) in ok.iter_mut().zip(pk) {
            for (o, v) in ol.iter_mut().zip(pl) {
                o.axpy(c, v);
            }
        }
    }
    out
}

/// A morphism with uniformly random coordinates in `{−2, …, 2}` on the hom bases.
pub fn random_morphism<R: Rng>(src: &Arc<ComoduleComplex>, tgt: &Arc<ComoduleComplex>, degree: i64, depth: usize, rng: &mut R) -> ComplexMorphism {
    let mut m = ComplexMorphism::zero(src, tgt, degree, depth);
    for k in 0..=depth {
        for l in src.lo()..=src.hi() {
            let Some(nt) = tgt.term(l + degree - k as i64) else { continue };
            let h = hom_right_a(src.term(l).unwrap().space(), nt.tower(k).space(k)).expect("right modules");
            let coords: SVec = (0..h.dim()).map(|i| (i, Scalar::from(rng.gen_range(-2..=2i64)))).filter(|(_, c)| !c.is_zero()).collect();
            m.comps[k][(l - src.lo()) as usize] = h.to_cols(&coords);
        }
    }
    m
}

/// Seeded endomorphism samples of `x` in degrees `−1, 0, 1`: `d∘d = 0`, the
/// graded Leibniz rule for `dg_compose`, and associativity.
pub fn dg_sample_checks(x: &Arc<ComoduleComplex>, samples: usize, depth: usize, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sq = None;
    let mut leib = None;
    let mut assoc = None;
    for i in 0..samples {
        let s = (i % 3) as i64 - 1;
        let t = ((i / 3) % 3) as i64 - 1;
        let phi = random_morphism(x, x, s, depth, &mut rng);
        let psi = random_morphism(x, x, t, depth, &mut rng);
        let chi = random_morphism(x, x, 0, depth, &mut rng);
        if sq.is_none() {
            sq = dg_differential(&dg_differential(&phi)).first_nonzero().map(|(k, l, b)| json!({"sample": i, "k": k, "degree": l, "basis": b}));
        }
        let comp = dg_compose(&psi, &phi).expect("endomorphisms compose");
        if leib.is_none() {
            let lhs = dg_differential(&comp);
            let a = dg_compose(&dg_differential(&psi), &phi).expect("endomorphisms compose");
            let b = dg_compose(&psi, &dg_differential(&phi)).expect("endomorphisms compose");
            let rhs = morphism_axpy(&a, &sign(t), &b);
            if lhs.comps != rhs.comps {
                leib = morphism_axpy(&lhs, &q(-1), &rhs).first_nonzero().map(|(k, l, b)| json!({"sample": i, "k": k, "degree": l, "basis": b}));
            }
        }
        if assoc.is_none() {
            let l = dg_compose(&chi, &comp).expect("endomorphisms compose");
            let r = dg_compose(&dg_compose(&chi, &psi).expect("endomorphisms compose"), &phi).expect("endomorphisms compose");
            if l.comps != r.comps {
                assoc = morphism_axpy(&l, &q(-1), &r).first_nonzero().map(|(k, l, b)| json!({"sample": i, "k": k, "degree": l, "basis": b}));
            }
        }
    }
    let mut r = Report::new();
    r.note(format!("{samples} samples of depth {depth}, seed {seed}"));
    r.record("d_squared_zero", sq);
    r.record("d_is_a_derivation", leib);
    r.record("compose_associative", assoc);
    r
}

/// The cone of a closed degree zero morphism with its triangle maps
/// `N → Cone(φ) → M[1]`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: Arc<ComoduleComplex>,
    pub iota: ComplexMorphism,
    pub pi: ComplexMorphism,
    pub shifted: Arc<ComoduleComplex>,
    pub report: Report,
}

/// `O^l = N^l ⊕ M^{l+1}` with `ρ_O = [[ρ_N, (−1)^{l+1} φ^1], [0, ρ_M]]` and
/// `δ_O = [[−δ_N, φ^0], [0, δ_M]]`.
///
/// With this sign `δ_O` is colinear for every closed `φ`. `ρ_O` is a coaction
/// only when `(N ⊗ ε)φ^1 = 0` and `b(φ^1) = 0`, which holds for instance when
/// `φ^2 = 0`; both are checked.
pub fn cone(phi: &ComplexMorphism) -> Result<Cone, ComodError> {
    if phi.degree != 0 {
        return Err(ComodError::NotDegreeZero(phi.degree));
    }
    if let Some((k, l, x)) = dg_differential(phi).first_nonzero() {
        return Err(ComodError::NotClosed(format!("(dφ)^{k}_{l} is nonzero on basis vector {x}")));
    }
    let (m, n) = (&phi.source, &phi.target);
    if phi.depth() >= 1 {
        for l in m.lo()..=m.hi() {
            let Some(nt) = n.term(l - 1) else { continue };
            let tw = nt.tower(2);
            for (x, y) in phi.component(1, l).unwrap().iter().enumerate() {
                let e = counit_slot(m.coring(), &tw, 1, 1, y);
                if !e.is_zero() {
                    return Err(ComodError::ConeCoaction(json!({"condition": "counit", "degree": l, "basis": x, "image": crate::report::vec_json(&e)})));
                }
                let b = b_operator(phi, 1, l, x);
                if !b.is_zero() {
                    return Err(ComodError::ConeCoaction(json!({"condition": "b(φ^1) = 0", "degree": l, "basis": x, "image": crate::report::vec_json(&b)})));
                }
            }
        }
    }
    let coring = m.coring().clone();
    let alg = coring.algebra();
    let lo = n.lo().min(m.lo() - 1);
    let hi = n.hi().max(m.hi() - 1);
    let zero = ModuleSpace::zero(alg, false, true);
    let space_of = |t: Option<&Comodule>| t.map_or_else(|| zero.clone(), |t| (**t.space()).clone());
    let mut terms = Vec::new();
    for l in lo..=hi {
        let (nt, mt) = (n.term(l), m.term(l + 1));
        let off = n.rank(l);
        let sp = Arc::new(direct_sum(&space_of(nt), &space_of(mt)));
        let phi1 = if phi.depth() >= 1 { phi.component(1, l + 1) } else { None };
        let term = Comodule::with_tower(&coring, sp, |tw| {
            let mut rho = Vec::with_capacity(tw.dim(0));
            let shift_n: Vec<SVec> = (0..n.rank(l)).map(SVec::unit).collect();
            let shift_m: Vec<SVec> = (0..m.rank(l + 1)).map(|i| SVec::unit(off + i)).collect();
            if let Some(nt) = nt {
                let twn = nt.tower(1);
                rho.extend(nt.rho().iter().map(|y| extend(tw, 0, &shift_n, &twn, 1, y)));
            }
            if let Some(mt) = mt {
                let twm = mt.tower(1);
                for x in 0..mt.rank() {
                    let mut v = extend(tw, 0, &shift_m, &twm, 1, &mt.rho()[x]);
                    if let (Some(p1), Some(nt)) = (phi1, nt) {
                        v.axpy(&-sign(l), &extend(tw, 0, &shift_n, &nt.tower(1), 1, &p1[x]));
                    }
                    rho.push(v);
                }
            }
            rho
        })?;
        terms.push(term);
    }
    let mut deltas = Vec::new();
    for l in lo..hi {
        let off_next = n.rank(l + 1);
        let mut cols = Vec::new();
        for x in 0..n.rank(l) {
            cols.push(n.apply_delta(l, &SVec::unit(x)).neg());
        }
        let phi0 = phi.component(0, l + 1);
        for x in 0..m.rank(l + 1) {
            let mut v = phi0.map_or_else(SVec::new, |p| p[x].clone());
            v.add(&crate::catalog::shift(&m.apply_delta(l + 1, &SVec::unit(x)), off_next));
            cols.push(v);
        }
        deltas.push(cols);
    }
    let complex = Arc::new(ComoduleComplex::new(coring, lo, terms, deltas)?);
    let shifted = Arc::new(m.shift());
    let depth = phi.depth();
    let mut iota = ComplexMorphism::zero(n, &complex, 0, depth);
    for l in n.lo()..=n.hi() {
        iota.comps[0][(l - n.lo()) as usize] = (0..n.rank(l)).map(|x| SVec::single(x, sign(l))).collect();
    }
    let mut pi = ComplexMorphism::zero(&complex, &shifted, 0, depth);
    for l in lo..=hi {
        let off = n.rank(l);
        pi.comps[0][(l - lo) as usize] =
            (0..complex.rank(l)).map(|x| if x < off { SVec::new() } else { SVec::unit(x - off) }).collect();
    }
    let mut report = check_complex(&complex);
    report.record("iota_closed", dg_differential(&iota).first_nonzero().map(|w| json!({"nonzero": w})));
    report.record("pi_closed", dg_differential(&pi).first_nonzero().map(|w| json!({"nonzero": w})));
    Ok(Cone { complex, iota, pi, shifted, report })
}

#[cfg(test)]
mod tests;
