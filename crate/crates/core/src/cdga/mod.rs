//! Semi-free curved differential graded algebras `(T_A(V), d, γ)` truncated at a
//! maximal degree, their morphisms, curved modules and bimodules, the induced
//! modules and hom complexes.

mod graded;
mod module;

use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};

use crate::algmod::{AlgError, Algebra, ModuleSpace, TensorAlgebra};
use crate::coring::algebra_map_failure;
use crate::exactla::SVec;
use crate::par;
use crate::report::{mismatch, vec_json, Report};

pub use graded::{hom_complex, induced_tensor_module, induced_xi_module, GradedHom, HomComplex, Presentation};
pub use module::{check_curved_bimodule, check_curved_module, CurvedBimodule, CurvedModule};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CdgaError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("d violates the Leibniz rule on generators: {0}")]
    LeibnizIncompatible(String),
    #[error("d² ≠ [γ, ·] in degree {degree}: {witness}")]
    CurvatureMismatch { degree: usize, witness: String },
    #[error("Bianchi identity fails: {0}")]
    BianchiFailed(String),
    #[error("the codomain of the first morphism is not the domain of the second")]
    DomainMismatch,
    #[error("morphism fails verification: {0}")]
    MorphismInvalid(String),
    #[error("the truncation window is too narrow: {0}")]
    WindowTooNarrow(String),
}

/// `(T_A(V), d, γ)` in degrees `0..=D`.
///
/// `d` is stored on `A` and `V` and extended to higher degrees by the graded
/// Leibniz rule; each degree is computed once on first use.
#[derive(Debug)]
pub struct SemiFreeCdga {
    t: Arc<TensorAlgebra>,
    d0: Vec<SVec>,
    d1: Vec<SVec>,
    gamma: SVec,
    cache: Vec<OnceLock<Vec<SVec>>>,
}

impl PartialEq for SemiFreeCdga {
    fn eq(&self, other: &Self) -> bool {
        self.max_degree() == other.max_degree()
            && self.v() == other.v()
            && self.d0 == other.d0
            && self.d1 == other.d1
            && self.gamma == other.gamma
    }
}

/// Validate and build from lifts into the plain tensors `V ⊗ V`, indexed `i * rank(V) + j`.
pub fn make_cdga(
    v: &Arc<ModuleSpace>,
    d0: Vec<SVec>,
    d1_lift: &[SVec],
    gamma_lift: &SVec,
    max_degree: usize,
) -> Result<Arc<SemiFreeCdga>, CdgaError> {
    if max_degree < 2 {
        return Err(CdgaError::Shape("the maximal degree must be at least 2".into()));
    }
    let t = Arc::new(TensorAlgebra::new(v, max_degree)?);
    let r2 = v.rank() * v.rank();
    if d1_lift.len() != v.rank() || d1_lift.iter().chain([gamma_lift]).any(|x| x.max_index().is_some_and(|m| m >= r2)) {
        return Err(CdgaError::Shape("d1 or γ lift".into()));
    }
    let d1 = d1_lift.iter().map(|x| t.project_plain(2, x)).collect();
    let gamma = t.project_plain(2, gamma_lift);
    SemiFreeCdga::from_projected(t, d0, d1, gamma)
}

impl SemiFreeCdga {
    /// Validate and build from values already in the quotient bases of `t`.
    pub fn from_projected(t: Arc<TensorAlgebra>, d0: Vec<SVec>, d1: Vec<SVec>, gamma: SVec) -> Result<Arc<Self>, CdgaError> {
        let c = Self::unchecked(t, d0, d1, gamma)?;
        c.validate()?;
        Ok(Arc::new(c))
    }

    /// Build without checking the axioms; shapes are still checked.
    pub fn unchecked(t: Arc<TensorAlgebra>, d0: Vec<SVec>, d1: Vec<SVec>, gamma: SVec) -> Result<Self, CdgaError> {
        if t.max_degree() < 2 {
            return Err(CdgaError::Shape("the maximal degree must be at least 2".into()));
        }
        let bad = |cols: &[SVec], len: usize, dim: usize| cols.len() != len || cols.iter().any(|x| x.max_index().is_some_and(|m| m >= dim));
        if bad(&d0, t.dim(0), t.dim(1)) {
            return Err(CdgaError::Shape("d0".into()));
        }
        if bad(&d1, t.dim(1), t.dim(2)) || gamma.max_index().is_some_and(|m| m >= t.dim(2)) {
            return Err(CdgaError::Shape("d1 or γ".into()));
        }
        let cache = (0..t.max_degree()).map(|_| OnceLock::new()).collect();
        Ok(SemiFreeCdga { t, d0, d1, gamma, cache })
    }

    pub fn t(&self) -> &Arc<TensorAlgebra> {
        &self.t
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.t.algebra()
    }

    pub fn v(&self) -> &Arc<ModuleSpace> {
        self.t.v()
    }

    pub fn max_degree(&self) -> usize {
        self.t.max_degree()
    }

    pub fn d0(&self) -> &[SVec] {
        &self.d0
    }

    pub fn d1(&self) -> &[SVec] {
        &self.d1
    }

    pub fn gamma(&self) -> &SVec {
        &self.gamma
    }

    /// `d` on the degree `n` basis, `n < D`.
    pub fn d(&self, n: usize) -> &[SVec] {
        self.cache[n].get_or_init(|| match n {
            0 => self.d0.clone(),
            1 => self.d1.clone(),
            _ => par::map_range(self.t.dim(n), |q| {
                let tu = self.t.tuple(n, q);
                let mut out = SVec::new();
                for (k, &f) in tu.iter().enumerate() {
                    let term = self.t.splice(n, q, k + 1, 2, &self.d1[f]);
                    if k % 2 == 0 {
                        out.add(&term);
                    } else {
                        out.sub(&term);
                    }
                }
                out
            }),
        })
    }

    pub fn apply_d(&self, n: usize, x: &SVec) -> SVec {
        x.apply(self.d(n))
    }

    /// Graded commutator `xy − (−1)^{pq} yx`.
    pub fn commutator(&self, p: usize, x: &SVec, q: usize, y: &SVec) -> SVec {
        let xy = self.t.mul(p, x, q, y);
        let yx = self.t.mul(q, y, p, x);
        if (p * q) % 2 == 0 {
            xy.minus(&yx)
        } else {
            xy.plus(&yx)
        }
    }

    /// Lift of a degree-two element to the plain `V ⊗ V`.
    pub fn lift2(&self, x: &SVec) -> SVec {
        let r = self.v().rank();
        x.iter()
            .map(|(q, c)| {
                let tu = self.t.tuple(2, *q);
                (tu[0] * r + tu[1], c.clone())
            })
            .collect()
    }

    /// The axioms on generators.
    pub fn generator_report(&self) -> Report {
        let mut r = Report::new();
        let t = &self.t;
        let alg = self.algebra();
        let v = self.v();
        let (da, rv) = (alg.dim(), v.rank());
        let deriv = par::find_first(da * da, |p| {
            let (i, j) = (p / da, p % da);
            let lhs = alg.basis_mul(i, j).apply(&self.d0);
            let rhs = v.act_right_basis(&self.d0[i], j).plus(&v.act_left_basis(i, &self.d0[j]));
            (lhs != rhs).then(|| json!({"pair": [i, j], "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
        });
        r.record("d0_derivation", deriv);
        let left = par::find_first(da * rv, |p| {
            let (k, m) = (p / rv, p % rv);
            let lhs = v.act_left_basis(k, &SVec::unit(m)).apply(&self.d1);
            let rhs = t.mul(1, &self.d0[k], 1, &SVec::unit(m)).plus(&t.space(2).act_left_basis(k, &self.d1[m]));
            (lhs != rhs).then(|| json!({"alg": k, "v": m, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
        });
        r.record("d1_left_leibniz", left);
        let right = par::find_first(da * rv, |p| {
            let (k, m) = (p / rv, p % rv);
            let lhs = v.act_right_basis(&SVec::unit(m), k).apply(&self.d1);
            let rhs = t.space(2).act_right_basis(&self.d1[m], k).minus(&t.mul(1, &SVec::unit(m), 1, &self.d0[k]));
            (lhs != rhs).then(|| json!({"alg": k, "v": m, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
        });
        r.record("d1_right_leibniz", right);
        let c0 = par::find_first(da, |k| {
            let lhs = self.d0[k].apply(&self.d1);
            let rhs = self.commutator(2, &self.gamma, 0, &SVec::unit(k));
            (lhs != rhs).then(|| mismatch("alg", k, &lhs, &rhs))
        });
        r.record_window("curvature_on_a", 0, 0, c0);
        let deep = self.max_degree() >= 3;
        let c1 = if deep {
            par::find_first(rv, |m| {
                let lhs = self.apply_d(2, &self.d1[m]);
                let rhs = self.commutator(2, &self.gamma, 1, &SVec::unit(m));
                (lhs != rhs).then(|| mismatch("v", m, &lhs, &rhs))
            })
        } else {
            None
        };
        let top = if deep { 1 } else { 0 };
        r.record_window("curvature_on_v", 1, top, c1);
        let b = if deep {
            let db = self.apply_d(2, &self.gamma);
            (!db.is_zero()).then(|| json!({"d_gamma": vec_json(&db)}))
        } else {
            None
        };
        r.record_window("bianchi", 2, if deep { 2 } else { 1 }, b);
        r
    }

    fn validate(&self) -> Result<(), CdgaError> {
        let r = self.generator_report();
        let w = |name: &str| r.get(name).and_then(|c| c.witness.clone()).map(|v| v.to_string());
        for name in ["d0_derivation", "d1_left_leibniz", "d1_right_leibniz"] {
            if let Some(s) = w(name) {
                return Err(CdgaError::LeibnizIncompatible(format!("{name}: {s}")));
            }
        }
        if let Some(s) = w("curvature_on_a") {
            return Err(CdgaError::CurvatureMismatch { degree: 0, witness: s });
        }
        if let Some(s) = w("curvature_on_v") {
            return Err(CdgaError::CurvatureMismatch { degree: 1, witness: s });
        }
        if let Some(s) = w("bianchi") {
            return Err(CdgaError::BianchiFailed(s));
        }
        Ok(())
    }
}

/// Re-verify `d² = [γ, ·]` on every basis element of degree `≤ D − 2`, the
/// graded Leibniz rule on all products of basis elements inside the window,
/// and the Bianchi identity.
pub fn check_cdga_degreewise(c: &SemiFreeCdga) -> Report {
    let mut r = Report::new();
    let t = c.t();
    let dmax = c.max_degree();
    let mut fail = None;
    for n in 0..=dmax - 2 {
        fail = par::find_first(t.dim(n), |q| {
            let e = SVec::unit(q);
            let lhs = c.apply_d(n + 1, &c.apply_d(n, &e));
            let rhs = c.commutator(2, c.gamma(), n, &e);
            (lhs != rhs).then(|| json!({"degree": n, "basis": q, "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
        });
        if fail.is_some() {
            break;
        }
    }
    r.record_window("d_squared_is_commutator", 0, dmax as i64 - 2, fail);
    let mut lfail = None;
    'outer: for p in 0..dmax {
        for q in 0..dmax - p {
            let (dp, dq) = (t.dim(p), t.dim(q));
            lfail = par::find_first(dp * dq, |ix| {
                let (i, j) = (SVec::unit(ix / dq), SVec::unit(ix % dq));
                let lhs = c.apply_d(p + q, &t.mul(p, &i, q, &j));
                let a = t.mul(p + 1, &c.apply_d(p, &i), q, &j);
                let b = t.mul(p, &i, q + 1, &c.apply_d(q, &j));
                let rhs = if p % 2 == 0 { a.plus(&b) } else { a.minus(&b) };
                (lhs != rhs).then(|| json!({"degrees": [p, q], "basis": [ix / dq, ix % dq], "lhs": vec_json(&lhs), "rhs": vec_json(&rhs)}))
            });
            if lfail.is_some() {
                break 'outer;
            }
        }
    }
    r.record_window("graded_leibniz", 0, dmax as i64 - 1, lfail);
    let b = if dmax >= 3 {
        let db = c.apply_d(2, c.gamma());
        (!db.is_zero()).then(|| json!({"d_gamma": vec_json(&db)}))
    } else {
        None
    };
    r.record_window("bianchi", 2, if dmax >= 3 { 2 } else { 1 }, b);
    r
}

/// A morphism `(f, ω)` of semi-free curved algebras, determined by `f` on `A`
/// and on `V`.
#[derive(Clone, Debug)]
pub struct CdgaMorphism {
    pub source: Arc<SemiFreeCdga>,
    pub target: Arc<SemiFreeCdga>,
    pub f0: Vec<SVec>,
    /// `V_A → V_B`, the degree one part of the target.
    pub f1: Vec<SVec>,
    pub omega: SVec,
}

impl CdgaMorphism {
    pub fn identity(c: &Arc<SemiFreeCdga>) -> Self {
        CdgaMorphism {
            source: c.clone(),
            target: c.clone(),
            f0: (0..c.algebra().dim()).map(SVec::unit).collect(),
            f1: (0..c.v().rank()).map(SVec::unit).collect(),
            omega: SVec::new(),
        }
    }

    /// The graded algebra map on the degree `n` basis.
    pub fn cols(&self, n: usize) -> Vec<SVec> {
        self.source.t().map_cols(self.target.t(), &self.f0, &self.f1, n)
    }

    pub fn apply(&self, n: usize, x: &SVec) -> SVec {
        x.apply(&self.cols(n))
    }
}

/// Both conditions of a morphism on generators of degrees 0 and 1 plus the
/// curvature condition.
pub fn check_cdga_morphism(m: &CdgaMorphism) -> Report {
    let mut r = Report::new();
    let (s, t) = (&m.source, &m.target);
    let (a, b) = (s.algebra(), t.algebra());
    if m.f0.len() != a.dim() || m.f1.len() != s.v().rank() || m.omega.max_index().is_some_and(|i| i >= t.v().rank()) {
        r.fail("shape", json!("component sizes do not match"));
        return r;
    }
    r.record("f0_algebra_map", algebra_map_failure(a, b, &m.f0));
    let (va, vb) = (s.v(), t.v());
    let rv = va.rank();
    let bil = par::find_first(a.dim() * rv, |p| {
        let (k, j) = (p / rv, p % rv);
        let ej = SVec::unit(j);
        if va.act_left_basis(k, &ej).apply(&m.f1) != vb.act_left(&m.f0[k], &m.f1[j]) {
            return Some(json!({"side": "left", "alg": k, "v": j}));
        }
        (va.act_right_basis(&ej, k).apply(&m.f1) != vb.act_right(&m.f1[j], &m.f0[k])).then(|| json!({"side": "right", "alg": k, "v": j}))
    });
    r.record("f1_bilinear", bil);
    let f2 = m.cols(2);
    let tt = t.t();
    let d0 = par::find_first(a.dim(), |k| {
        let lhs = s.d0()[k].apply(&m.f1);
        let fa = &m.f0[k];
        let rhs = t.apply_d(0, fa).plus(&t.commutator(1, &m.omega, 0, fa));
        (lhs != rhs).then(|| mismatch("alg", k, &lhs, &rhs))
    });
    r.record("differential_on_a", d0);
    let d1 = par::find_first(rv, |j| {
        let lhs = s.d1()[j].apply(&f2);
        let fv = &m.f1[j];
        let rhs = t.apply_d(1, fv).plus(&t.commutator(1, &m.omega, 1, fv));
        (lhs != rhs).then(|| mismatch("v", j, &lhs, &rhs))
    });
    r.record("differential_on_v", d1);
    let lhs = s.gamma().apply(&f2);
    let rhs = t.gamma().plus(&t.apply_d(1, &m.omega)).plus(&tt.mul(1, &m.omega, 1, &m.omega));
    r.record("curvature", (lhs != rhs).then(|| json!({"lhs": vec_json(&lhs), "rhs": vec_json(&rhs)})));
    r
}

/// `(g ∘ f, g(ω_f) + ω_g)`, verified.
pub fn compose_cdga_morphisms(g: &CdgaMorphism, f: &CdgaMorphism) -> Result<CdgaMorphism, CdgaError> {
    if *f.target != *g.source {
        return Err(CdgaError::DomainMismatch);
    }
    let h = CdgaMorphism {
        source: f.source.clone(),
        target: g.target.clone(),
        f0: f.f0.iter().map(|x| x.apply(&g.f0)).collect(),
        f1: f.f1.iter().map(|x| x.apply(&g.f1)).collect(),
        omega: f.omega.apply(&g.f1).plus(&g.omega),
    };
    let r = check_cdga_morphism(&h);
    if !r.all_pass() {
        return Err(CdgaError::MorphismInvalid(r.to_text()));
    }
    Ok(h)
}

/// JSON witness helper shared by the submodules.
pub(crate) fn at_degree(n: i64, what: &str, index: usize, lhs: &SVec, rhs: &SVec) -> Value {
    json!({"degree": n, what: index, "lhs": vec_json(lhs), "rhs": vec_json(rhs)})
}
