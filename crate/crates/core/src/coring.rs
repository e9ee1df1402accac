//! Corings over a finite-dimensional algebra, base points, splittings along a
//! base point, and coring morphisms.

use std::sync::{Arc, RwLock};

use serde_json::json;

use crate::algmod::{AlgError, Algebra, LinMap, Linearity, ModuleSpace, Submodule, TensorAlgebra};
use crate::exactla::{solve, Eliminator, Matrix, SVec};
use crate::par;
use crate::report::{mismatch, vec_json, Report};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CoringError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("the counit is not surjective, so there is no base point")]
    NoBasePoint,
    #[error("ε(x) ≠ 1")]
    NotBased,
}

/// An `A`-coring: a bimodule `C` with comultiplication into `C ⊗_A C` and counit into `A`.
#[derive(Debug)]
pub struct Coring {
    c: Arc<ModuleSpace>,
    delta: Vec<SVec>,
    counit: Vec<SVec>,
    tower: RwLock<Arc<TensorAlgebra>>,
}

impl Clone for Coring {
    fn clone(&self) -> Self {
        Coring {
            c: self.c.clone(),
            delta: self.delta.clone(),
            counit: self.counit.clone(),
            tower: RwLock::new(self.tower(2)),
        }
    }
}

impl PartialEq for Coring {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.delta == other.delta && self.counit == other.counit
    }
}

impl Coring {
    /// `delta_lift[i]` lives in the plain tensor `C ⊗ C`, pair `(j, k)` at index `j * rank + k`.
    pub fn new(c: Arc<ModuleSpace>, delta_lift: &[SVec], counit: Vec<SVec>) -> Result<Self, CoringError> {
        let t = Arc::new(TensorAlgebra::new(&c, 2)?);
        let plain = c.rank() * c.rank();
        if delta_lift.len() != c.rank() || delta_lift.iter().any(|v| v.max_index().is_some_and(|m| m >= plain)) {
            return Err(CoringError::Shape("comultiplication lift".into()));
        }
        let delta = delta_lift.iter().map(|v| t.project_plain(2, v)).collect();
        Self::from_projected(t, delta, counit)
    }

    /// Build from a comultiplication already expressed in the quotient basis of `t`.
    pub fn from_projected(t: Arc<TensorAlgebra>, delta: Vec<SVec>, counit: Vec<SVec>) -> Result<Self, CoringError> {
        let c = t.v().clone();
        let d = c.algebra().dim();
        if delta.len() != c.rank() || delta.iter().any(|v| v.max_index().is_some_and(|m| m >= t.dim(2))) {
            return Err(CoringError::Shape("comultiplication".into()));
        }
        if counit.len() != c.rank() || counit.iter().any(|v| v.max_index().is_some_and(|m| m >= d)) {
            return Err(CoringError::Shape("counit".into()));
        }
        Ok(Coring { c, delta, counit, tower: RwLock::new(t) })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.c.algebra()
    }

    pub fn c(&self) -> &Arc<ModuleSpace> {
        &self.c
    }

    pub fn rank(&self) -> usize {
        self.c.rank()
    }

    pub fn delta(&self) -> &[SVec] {
        &self.delta
    }

    pub fn counit(&self) -> &[SVec] {
        &self.counit
    }

    pub fn apply_delta(&self, v: &SVec) -> SVec {
        v.apply(&self.delta)
    }

    pub fn apply_counit(&self, v: &SVec) -> SVec {
        v.apply(&self.counit)
    }

    /// Tensor powers of `C` up to at least degree `n`.
    ///
    /// Lower degrees of a deeper tower coincide with those of a shallower one,
    /// so the deepest tower built so far is kept.
    pub fn tower(&self, n: usize) -> Arc<TensorAlgebra> {
        {
            let t = self.tower.read().expect("tower lock");
            if t.max_degree() >= n {
                return t.clone();
            }
        }
        let mut w = self.tower.write().expect("tower lock");
        if w.max_degree() < n {
            *w = Arc::new(TensorAlgebra::new(&self.c, n).expect("C is a bimodule"));
        }
        w.clone()
    }

    /// Comultiplication lifted to the plain tensor `C ⊗ C`.
    pub fn delta_lift(&self) -> Vec<SVec> {
        let t = self.tower(2);
        let r = self.rank();
        self.delta
            .iter()
            .map(|v| {
                v.iter()
                    .map(|(q, c)| {
                        let tu = t.tuple(2, *q);
                        (tu[0] * r + tu[1], c.clone())
                    })
                    .collect()
            })
            .collect()
    }

    /// `Δ_k^{(n)}`: comultiply the `k`-th factor (from 1) of `x ∈ C^{⊗n}`.
    pub fn delta_k(&self, t: &TensorAlgebra, n: usize, k: usize, x: &SVec) -> SVec {
        let mut out = SVec::new();
        for (q, c) in x {
            let f = t.tuple(n, *q)[k - 1];
            out.axpy(c, &t.splice(n, *q, k, 2, &self.delta[f]));
        }
        out
    }

    /// Apply `ε` to the `k`-th factor of `x ∈ C^{⊗n}`, `n ≥ 1`.
    pub fn counit_k(&self, t: &TensorAlgebra, n: usize, k: usize, x: &SVec) -> SVec {
        let mut out = SVec::new();
        for (q, c) in x {
            let f = t.tuple(n, *q)[k - 1];
            out.axpy(c, &t.splice(n, *q, k, 0, &self.counit[f]));
        }
        out
    }

    pub fn is_grouplike(&self, x: &SVec) -> bool {
        let t = self.tower(2);
        self.apply_delta(x) == t.mul(1, x, 1, x)
    }
}

/// Check bilinearity, coassociativity and counitality on basis vectors.
pub fn check_coring(c: &Coring) -> Report {
    let mut r = Report::new();
    let t = c.tower(3);
    let cs = c.c();
    let alg = c.algebra().clone();
    let da = alg.dim();
    let a_space = ModuleSpace::regular(&alg);
    r.record("bimodule", cs.check().err().map(|e| json!(e.to_string())));
    if !cs.is_bimodule() {
        r.fail("comultiplication_bilinear", json!("C lacks an action"));
        return r;
    }
    let n = c.rank();
    let pairs = da * n;
    let left_fail = par::find_first(pairs, |p| {
        let (k, m) = (p / n, p % n);
        let lhs = c.apply_delta(&cs.act_left_basis(k, &SVec::unit(m)));
        let rhs = t.space(2).act_left_basis(k, &c.delta()[m]);
        (lhs != rhs).then(|| json!({"alg": k, "basis": m, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
    });
    r.record("comultiplication_left_linear", left_fail);
    let right_fail = par::find_first(pairs, |p| {
        let (k, m) = (p / n, p % n);
        let lhs = c.apply_delta(&cs.act_right_basis(&SVec::unit(m), k));
        let rhs = t.space(2).act_right_basis(&c.delta()[m], k);
        (lhs != rhs).then(|| json!({"alg": k, "basis": m, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
    });
    r.record("comultiplication_right_linear", right_fail);
    let cl = par::find_first(pairs, |p| {
        let (k, m) = (p / n, p % n);
        let lhs = c.apply_counit(&cs.act_left_basis(k, &SVec::unit(m)));
        let rhs = a_space.act_left_basis(k, &c.counit()[m]);
        (lhs != rhs).then(|| json!({"alg": k, "basis": m, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
    });
    r.record("counit_left_linear", cl);
    let cr = par::find_first(pairs, |p| {
        let (k, m) = (p / n, p % n);
        let lhs = c.apply_counit(&cs.act_right_basis(&SVec::unit(m), k));
        let rhs = a_space.act_right_basis(&c.counit()[m], k);
        (lhs != rhs).then(|| json!({"alg": k, "basis": m, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
    });
    r.record("counit_right_linear", cr);
    let coassoc = par::find_first(n, |i| {
        let dx = &c.delta()[i];
        let lhs = c.delta_k(&t, 2, 1, dx);
        let rhs = c.delta_k(&t, 2, 2, dx);
        (lhs != rhs).then(|| mismatch("basis", i, &lhs, &rhs))
    });
    r.record("coassociativity", coassoc);
    let e = SVec::unit;
    let left = par::find_first(n, |i| {
        let lhs = c.counit_k(&t, 2, 1, &c.delta()[i]);
        (lhs != e(i)).then(|| mismatch("basis", i, &lhs, &e(i)))
    });
    r.record("counitality_left", left);
    let right = par::find_first(n, |i| {
        let lhs = c.counit_k(&t, 2, 2, &c.delta()[i]);
        (lhs != e(i)).then(|| mismatch("basis", i, &lhs, &e(i)))
    });
    r.record("counitality_right", right);
    r
}

/// A solution of `ε(x) = 1` and the dimension of the affine solution space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePoint {
    pub x: SVec,
    pub solution_dim: usize,
}

/// Solve `ε(x) = 1`.
///
/// The witness is supported on the first columns of `ε` that are independent,
/// with all other coordinates zero.
pub fn find_base_points(c: &Coring) -> Result<BasePoint, CoringError> {
    let d = c.algebra().dim();
    let m = Matrix::from_columns(d, c.counit());
    let b = c.algebra().unit().to_dense(d);
    let x = solve(&m, &b).ok_or(CoringError::NoBasePoint)?;
    Ok(BasePoint { x: SVec::from_dense(&x), solution_dim: c.rank() - m.rank() })
}

/// A coring with a chosen base point `x`, `ε(x) = 1`.
#[derive(Clone, Debug)]
pub struct BasedCoring {
    pub coring: Arc<Coring>,
    pub x: SVec,
}

impl BasedCoring {
    pub fn new(coring: Arc<Coring>, x: SVec) -> Result<Self, CoringError> {
        if &coring.apply_counit(&x) != coring.algebra().unit() {
            return Err(CoringError::NotBased);
        }
        Ok(BasedCoring { coring, x })
    }
}

/// The decomposition `C = Ax ⊕ C⁺ = xA ⊕ C⁺` determined by a base point.
#[derive(Clone, Debug)]
pub struct Split {
    pub x: SVec,
    /// `C⁺ = ker ε` as a sub-bimodule.
    pub cplus: Submodule,
    /// `c ↦ c − ε(c)x`, left linear.
    pub pi_l: LinMap,
    /// `c ↦ c − xε(c)`, right linear.
    pub pi_r: LinMap,
    pub report: Report,
}

impl Split {
    /// `π^L(c)` in coordinates of `C⁺`.
    pub fn pi_l_plus(&self, c: &SVec) -> SVec {
        self.cplus.coords(&self.pi_l.apply(c)).expect("π^L lands in C⁺")
    }

    pub fn pi_r_plus(&self, c: &SVec) -> SVec {
        self.cplus.coords(&self.pi_r.apply(c)).expect("π^R lands in C⁺")
    }
}

pub fn split_at(b: &BasedCoring) -> Result<Split, CoringError> {
    let c = &b.coring;
    if &c.apply_counit(&b.x) != c.algebra().unit() {
        return Err(CoringError::NotBased);
    }
    let cs = c.c();
    let alg = c.algebra();
    let da = alg.dim();
    let n = c.rank();
    let mut el = Eliminator::new(n);
    for k in 0..da {
        let row: SVec = (0..n).filter_map(|j| {
            let v = c.counit()[j].get(k);
            (!v.is_zero()).then_some((j, v))
        }).collect();
        el.insert(row);
    }
    let (_, kernel) = el.kernel();
    let cplus = Submodule::span(cs, &kernel)?;
    let pi_l_cols: Vec<SVec> = (0..n).map(|j| SVec::unit(j).minus(&cs.act_left(&c.counit()[j], &b.x))).collect();
    let pi_r_cols: Vec<SVec> = (0..n).map(|j| SVec::unit(j).minus(&cs.act_right(&b.x, &c.counit()[j]))).collect();
    let pi_l = LinMap::unchecked(cs.clone(), cs.clone(), pi_l_cols, Linearity::LEFT);
    let pi_r = LinMap::unchecked(cs.clone(), cs.clone(), pi_r_cols, Linearity::RIGHT);
    let mut report = Report::new();
    report.record("pi_l_left_linear", pi_l.left_linearity_failure().map(|(m, k)| json!({"basis": m, "alg": k})));
    report.record("pi_r_right_linear", pi_r.right_linearity_failure().map(|(m, k)| json!({"basis": m, "alg": k})));
    for (name, pi) in [("pi_l", &pi_l), ("pi_r", &pi_r)] {
        let lands = (0..n).find(|&j| cplus.coords(&pi.cols()[j]).is_none());
        report.record(format!("{name}_lands_in_cplus"), lands.map(|j| json!({"basis": j})));
        let retract = (0..cplus.inclusion.len()).find(|&i| pi.apply(&cplus.inclusion[i]) != cplus.inclusion[i]);
        report.record(format!("{name}_retracts_inclusion"), retract.map(|i| json!({"cplus_basis": i})));
    }
    let mut ax = Eliminator::new(n);
    let mut xa = Eliminator::new(n);
    for k in 0..da {
        ax.insert(cs.act_left_basis(k, &b.x));
        xa.insert(cs.act_right_basis(&b.x, k));
    }
    for (name, side, pi) in [("left", &ax, &pi_l), ("right", &xa, &pi_r)] {
        let mut sum = side.clone();
        for v in &cplus.inclusion {
            sum.insert(v.clone());
        }
        let dims = (side.rank(), cplus.inclusion.len(), n);
        let ok = dims.0 + dims.1 == dims.2 && sum.rank() == n;
        report.record(
            format!("{name}_direct_sum"),
            (!ok).then(|| json!({"dim_x_part": dims.0, "dim_cplus": dims.1, "dim_c": dims.2})),
        );
        let kernel_ok = (0..da).all(|k| {
            let v = if name == "left" { cs.act_left_basis(k, &b.x) } else { cs.act_right_basis(&b.x, k) };
            pi.apply(&v).is_zero()
        });
        report.record(format!("{name}_kernel_is_x_part"), (!kernel_ok).then(|| json!("π does not kill the x part")));
    }
    Ok(Split { x: b.x.clone(), cplus, pi_l, pi_r, report })
}

/// A morphism `(f0, f1)` from an `A`-coring to a `B`-coring.
#[derive(Clone, Debug)]
pub struct CoringMorphism {
    pub source: Arc<Coring>,
    pub target: Arc<Coring>,
    /// Algebra map `A → B` by columns.
    pub f0: Vec<SVec>,
    pub f1: Vec<SVec>,
}

impl CoringMorphism {
    pub fn identity(c: &Arc<Coring>) -> Self {
        let f0 = (0..c.algebra().dim()).map(SVec::unit).collect();
        let f1 = (0..c.rank()).map(SVec::unit).collect();
        CoringMorphism { source: c.clone(), target: c.clone(), f0, f1 }
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        v.apply(&self.f1)
    }

    pub fn compose(&self, first: &CoringMorphism) -> CoringMorphism {
        CoringMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            f0: first.f0.iter().map(|v| v.apply(&self.f0)).collect(),
            f1: first.f1.iter().map(|v| v.apply(&self.f1)).collect(),
        }
    }
}

/// Failure of `f(1) = 1` or `f(e_i e_j) = f(e_i) f(e_j)`.
pub fn algebra_map_failure(a: &Algebra, b: &Algebra, f: &[SVec]) -> Option<serde_json::Value> {
    if a.unit().apply(f) != *b.unit() {
        return Some(json!("unit not preserved"));
    }
    let d = a.dim();
    par::find_first(d * d, |p| {
        let (i, j) = (p / d, p % d);
        let lhs = a.basis_mul(i, j).apply(f);
        let rhs = b.mul(&f[i], &f[j]);
        (lhs != rhs).then(|| json!({"pair": [i, j], "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
    })
}

/// Check `f0` is an algebra map, `f1` is bilinear along `f0`, and `f1`
/// commutes with counits and comultiplications.
pub fn check_coring_morphism(m: &CoringMorphism) -> Report {
    let mut r = Report::new();
    let (s, t) = (&m.source, &m.target);
    let (a, b) = (s.algebra(), t.algebra());
    if m.f0.len() != a.dim() || m.f1.len() != s.rank() {
        r.fail("shape", json!("component sizes do not match the corings"));
        return r;
    }
    r.record("f0_algebra_map", algebra_map_failure(a, b, &m.f0));
    let (cs, ds) = (s.c(), t.c());
    let n = s.rank();
    let da = a.dim();
    let bil = par::find_first(da * n, |p| {
        let (k, j) = (p / n, p % n);
        let ej = SVec::unit(j);
        let l1 = m.apply(&cs.act_left_basis(k, &ej));
        let l2 = ds.act_left(&m.f0[k], &m.f1[j]);
        if l1 != l2 {
            return Some(json!({"side": "left", "alg": k, "basis": j}));
        }
        let r1 = m.apply(&cs.act_right_basis(&ej, k));
        let r2 = ds.act_right(&m.f1[j], &m.f0[k]);
        (r1 != r2).then(|| json!({"side": "right", "alg": k, "basis": j}))
    });
    r.record("f1_bilinear", bil);
    let counit = par::find_first(n, |j| {
        let lhs = t.apply_counit(&m.f1[j]);
        let rhs = s.counit()[j].apply(&m.f0);
        (lhs != rhs).then(|| mismatch("basis", j, &lhs, &rhs))
    });
    r.record("counit", counit);
    let ts = s.tower(2);
    let tt = t.tower(2);
    let t2 = ts.map_cols(&tt, &m.f0, &m.f1, 2);
    let comul = par::find_first(n, |j| {
        let lhs = s.delta()[j].apply(&t2);
        let rhs = t.apply_delta(&m.f1[j]);
        (lhs != rhs).then(|| mismatch("basis", j, &lhs, &rhs))
    });
    r.record("comultiplication", comul);
    r
}
