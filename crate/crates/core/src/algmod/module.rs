use std::sync::Arc;

use crate::exactla::{Eliminator, Matrix, SVec, Scalar, TrackedEliminator};
use crate::par;

use super::{AlgError, Algebra};

/// Action matrices indexed by algebra basis element: `act[k][m]` is the image of
/// module basis vector `m` under `e_k` (on the relevant side).
pub type Action = Vec<Vec<SVec>>;

/// Finite-rank rational space with optional left and right actions of an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpace {
    algebra: Arc<Algebra>,
    rank: usize,
    left: Option<Action>,
    right: Option<Action>,
}

impl ModuleSpace {
    /// Validated construction.
    pub fn new(algebra: Arc<Algebra>, rank: usize, left: Option<Action>, right: Option<Action>) -> Result<Self, AlgError> {
        let m = ModuleSpace { algebra, rank, left, right };
        m.validate()?;
        Ok(m)
    }

    /// Construction without validation, for spaces whose actions are induced.
    pub fn from_parts(algebra: Arc<Algebra>, rank: usize, left: Option<Action>, right: Option<Action>) -> Self {
        ModuleSpace { algebra, rank, left, right }
    }

    /// `A` acting on itself from both sides.
    pub fn regular(algebra: &Arc<Algebra>) -> Self {
        let d = algebra.dim();
        let left = (0..d).map(|k| (0..d).map(|m| algebra.basis_mul(k, m).clone()).collect()).collect();
        let right = (0..d).map(|k| (0..d).map(|m| algebra.basis_mul(m, k).clone()).collect()).collect();
        ModuleSpace { algebra: algebra.clone(), rank: d, left: Some(left), right: Some(right) }
    }

    /// Free right module `A^n`, basis ordered copy-major.
    pub fn free_right(algebra: &Arc<Algebra>, n: usize) -> Self {
        let d = algebra.dim();
        let right = (0..d)
            .map(|k| {
                (0..n * d)
                    .map(|m| {
                        let (c, i) = (m / d, m % d);
                        algebra.basis_mul(i, k).iter().map(|(j, x)| (c * d + j, x.clone())).collect()
                    })
                    .collect()
            })
            .collect();
        ModuleSpace { algebra: algebra.clone(), rank: n * d, left: None, right: Some(right) }
    }

    pub fn zero(algebra: &Arc<Algebra>, left: bool, right: bool) -> Self {
        let d = algebra.dim();
        let empty = || Some(vec![Vec::new(); d]);
        ModuleSpace {
            algebra: algebra.clone(),
            rank: 0,
            left: if left { empty() } else { None },
            right: if right { empty() } else { None },
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn left(&self) -> Option<&Action> {
        self.left.as_ref()
    }

    pub fn right(&self) -> Option<&Action> {
        self.right.as_ref()
    }

    pub fn has_left(&self) -> bool {
        self.left.is_some()
    }

    pub fn has_right(&self) -> bool {
        self.right.is_some()
    }

    pub fn is_bimodule(&self) -> bool {
        self.left.is_some() && self.right.is_some()
    }

    pub fn require_left(&self, what: &str) -> Result<&Action, AlgError> {
        self.left.as_ref().ok_or_else(|| AlgError::MissingAction(format!("left action on {what}")))
    }

    pub fn require_right(&self, what: &str) -> Result<&Action, AlgError> {
        self.right.as_ref().ok_or_else(|| AlgError::MissingAction(format!("right action on {what}")))
    }

    /// Forget the left action.
    pub fn as_right(&self) -> ModuleSpace {
        ModuleSpace { left: None, ..self.clone() }
    }

    /// Forget the right action.
    pub fn as_left(&self) -> ModuleSpace {
        ModuleSpace { right: None, ..self.clone() }
    }

    /// `a · m`.
    pub fn act_left(&self, a: &SVec, m: &SVec) -> SVec {
        let l = self.left.as_ref().expect("left action");
        let mut out = SVec::new();
        for (k, x) in a {
            for (j, y) in m {
                out.axpy(&(x * y), &l[*k][*j]);
            }
        }
        out
    }

    /// `m · a`.
    pub fn act_right(&self, m: &SVec, a: &SVec) -> SVec {
        let r = self.right.as_ref().expect("right action");
        let mut out = SVec::new();
        for (k, x) in a {
            for (j, y) in m {
                out.axpy(&(x * y), &r[*k][*j]);
            }
        }
        out
    }

    pub fn act_right_basis(&self, m: &SVec, k: usize) -> SVec {
        m.apply(&self.right.as_ref().expect("right action")[k])
    }

    pub fn act_left_basis(&self, k: usize, m: &SVec) -> SVec {
        m.apply(&self.left.as_ref().expect("left action")[k])
    }

    fn validate(&self) -> Result<(), AlgError> {
        let a = &self.algebra;
        let d = a.dim();
        for (side, act) in [("left", &self.left), ("right", &self.right)] {
            let Some(act) = act else { continue };
            if act.len() != d || act.iter().any(|c| c.len() != self.rank) {
                return Err(AlgError::Shape(format!("{side} action has wrong shape")));
            }
            if act.iter().flatten().any(|v| v.max_index().is_some_and(|i| i >= self.rank)) {
                return Err(AlgError::Shape(format!("{side} action leaves the module")));
            }
        }
        for m in 0..self.rank {
            let e = SVec::unit(m);
            if self.left.is_some() && self.act_left(a.unit(), &e) != e {
                return Err(AlgError::ActionNotUnital { side: "left", basis: m });
            }
            if self.right.is_some() && self.act_right(&e, a.unit()) != e {
                return Err(AlgError::ActionNotUnital { side: "right", basis: m });
            }
        }
        for i in 0..d {
            for j in 0..d {
                let ij = a.basis_mul(i, j);
                for m in 0..self.rank {
                    let e = SVec::unit(m);
                    if self.left.is_some() {
                        let lhs = self.act_left(ij, &e);
                        let rhs = self.act_left_basis(i, &self.act_left_basis(j, &e));
                        if lhs != rhs {
                            return Err(AlgError::ActionNotAssociative { side: "left", a: i, b: j, basis: m });
                        }
                    }
                    if self.right.is_some() {
                        let lhs = self.act_right(&e, ij);
                        let rhs = self.act_right_basis(&self.act_right_basis(&e, i), j);
                        if lhs != rhs {
                            return Err(AlgError::ActionNotAssociative { side: "right", a: i, b: j, basis: m });
                        }
                    }
                    if self.is_bimodule() {
                        let lhs = self.act_right_basis(&self.act_left_basis(i, &e), j);
                        let rhs = self.act_left_basis(i, &self.act_right_basis(&e, j));
                        if lhs != rhs {
                            return Err(AlgError::ActionsDoNotCommute { a: i, b: j, basis: m });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check(&self) -> Result<(), AlgError> {
        self.validate()
    }
}

/// Which sides a linear map is declared to commute with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Linearity {
    pub left: bool,
    pub right: bool,
}

impl Linearity {
    pub const NONE: Linearity = Linearity { left: false, right: false };
    pub const LEFT: Linearity = Linearity { left: true, right: false };
    pub const RIGHT: Linearity = Linearity { left: false, right: true };
    pub const BOTH: Linearity = Linearity { left: true, right: true };

    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.left {
            v.push("leftA");
        }
        if self.right {
            v.push("rightA");
        }
        v
    }
}

/// Linear map between module spaces, stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    pub source: Arc<ModuleSpace>,
    pub target: Arc<ModuleSpace>,
    cols: Vec<SVec>,
    pub linearity: Linearity,
}

impl LinMap {
    /// Construction that re-checks the declared linearity.
    pub fn new(source: Arc<ModuleSpace>, target: Arc<ModuleSpace>, cols: Vec<SVec>, linearity: Linearity) -> Result<Self, AlgError> {
        if cols.len() != source.rank() || cols.iter().any(|c| c.max_index().is_some_and(|i| i >= target.rank())) {
            return Err(AlgError::Shape(format!(
                "map needs {} columns with entries below {}",
                source.rank(),
                target.rank()
            )));
        }
        let f = LinMap { source, target, cols, linearity };
        f.check_linearity()?;
        Ok(f)
    }

    pub fn unchecked(source: Arc<ModuleSpace>, target: Arc<ModuleSpace>, cols: Vec<SVec>, linearity: Linearity) -> Self {
        LinMap { source, target, cols, linearity }
    }

    pub fn from_matrix(source: Arc<ModuleSpace>, target: Arc<ModuleSpace>, m: &Matrix, linearity: Linearity) -> Result<Self, AlgError> {
        if m.rows() != target.rank() || m.cols() != source.rank() {
            return Err(AlgError::Shape(format!(
                "matrix is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                target.rank(),
                source.rank()
            )));
        }
        Self::new(source, target, m.columns(), linearity)
    }

    pub fn identity(space: &Arc<ModuleSpace>) -> Self {
        let lin = Linearity { left: space.has_left(), right: space.has_right() };
        LinMap { source: space.clone(), target: space.clone(), cols: (0..space.rank()).map(SVec::unit).collect(), linearity: lin }
    }

    pub fn zero(source: &Arc<ModuleSpace>, target: &Arc<ModuleSpace>) -> Self {
        let lin = Linearity {
            left: source.has_left() && target.has_left(),
            right: source.has_right() && target.has_right(),
        };
        LinMap { source: source.clone(), target: target.clone(), cols: vec![SVec::new(); source.rank()], linearity: lin }
    }

    pub fn cols(&self) -> &[SVec] {
        &self.cols
    }

    pub fn into_cols(self) -> Vec<SVec> {
        self.cols
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        v.apply(&self.cols)
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_columns(self.target.rank(), &self.cols)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> LinMap {
        let lin = Linearity {
            left: self.linearity.left && other.linearity.left,
            right: self.linearity.right && other.linearity.right,
        };
        LinMap {
            source: other.source.clone(),
            target: self.target.clone(),
            cols: other.cols.iter().map(|v| self.apply(v)).collect(),
            linearity: lin,
        }
    }

    /// First failure of right linearity `f(m e_k) = f(m) e_k`, as `(m, k)`.
    pub fn right_linearity_failure(&self) -> Option<(usize, usize)> {
        let (s, t) = (&self.source, &self.target);
        if !s.has_right() || !t.has_right() {
            return Some((usize::MAX, usize::MAX));
        }
        let d = s.algebra().dim();
        par::find_first(s.rank(), |m| {
            let e = SVec::unit(m);
            (0..d).find(|&k| self.apply(&s.act_right_basis(&e, k)) != t.act_right_basis(&self.cols[m], k)).map(|k| (m, k))
        })
    }

    /// First failure of left linearity `f(e_k m) = e_k f(m)`, as `(m, k)`.
    pub fn left_linearity_failure(&self) -> Option<(usize, usize)> {
        let (s, t) = (&self.source, &self.target);
        if !s.has_left() || !t.has_left() {
            return Some((usize::MAX, usize::MAX));
        }
        let d = s.algebra().dim();
        par::find_first(s.rank(), |m| {
            let e = SVec::unit(m);
            (0..d).find(|&k| self.apply(&s.act_left_basis(k, &e)) != t.act_left_basis(k, &self.cols[m])).map(|k| (m, k))
        })
    }

    pub fn check_linearity(&self) -> Result<(), AlgError> {
        if self.linearity.right {
            if let Some((m, k)) = self.right_linearity_failure() {
                return Err(AlgError::NotLinear { side: "right", basis: m, alg: k });
            }
        }
        if self.linearity.left {
            if let Some((m, k)) = self.left_linearity_failure() {
                return Err(AlgError::NotLinear { side: "left", basis: m, alg: k });
            }
        }
        Ok(())
    }
}

/// Direct sum `X ⊕ Y` with basis `[X-basis, Y-basis]`.
pub fn direct_sum(x: &ModuleSpace, y: &ModuleSpace) -> ModuleSpace {
    let a = x.algebra().clone();
    let off = x.rank();
    let glue = |p: Option<&Action>, q: Option<&Action>| -> Option<Action> {
        let (p, q) = (p?, q?);
        Some(
            p.iter()
                .zip(q)
                .map(|(pk, qk)| {
                    let mut col: Vec<SVec> = pk.clone();
                    col.extend(qk.iter().map(|v| v.iter().map(|(i, c)| (i + off, c.clone())).collect()));
                    col
                })
                .collect(),
        )
    };
    ModuleSpace::from_parts(a, x.rank() + y.rank(), glue(x.left(), y.left()), glue(x.right(), y.right()))
}

/// Subspace spanned by given vectors, closed under the ambient actions.
#[derive(Clone, Debug)]
pub struct Submodule {
    pub space: Arc<ModuleSpace>,
    /// Basis of the subspace as ambient vectors.
    pub inclusion: Vec<SVec>,
    elim: TrackedEliminator,
    ambient_rank: usize,
}

impl Submodule {
    /// The span of `gens`; errors if it is not closed under the available actions.
    pub fn span(ambient: &ModuleSpace, gens: &[SVec]) -> Result<Self, AlgError> {
        let mut probe = Eliminator::new(ambient.rank());
        let basis: Vec<SVec> = gens.iter().filter(|g| probe.insert((*g).clone())).cloned().collect();
        let elim = rebuild(ambient.rank(), &basis);
        let d = ambient.algebra().dim();
        let coords = |v: &SVec| elim.express(v);
        let act = |side: Option<&Action>, is_left: bool| -> Result<Option<Action>, AlgError> {
            let Some(_) = side else { return Ok(None) };
            let mut out = Vec::with_capacity(d);
            for k in 0..d {
                let mut col = Vec::with_capacity(basis.len());
                for (bi, b) in basis.iter().enumerate() {
                    let img = if is_left { ambient.act_left_basis(k, b) } else { ambient.act_right_basis(b, k) };
                    let c = coords(&img).ok_or(AlgError::NotClosed { basis: bi, alg: k })?;
                    col.push(c);
                }
                out.push(col);
            }
            Ok(Some(out))
        };
        let left = act(ambient.left(), true)?;
        let right = act(ambient.right(), false)?;
        let space = Arc::new(ModuleSpace::from_parts(ambient.algebra().clone(), basis.len(), left, right));
        Ok(Submodule { space, inclusion: basis, elim, ambient_rank: ambient.rank() })
    }

    /// Coordinates of an ambient vector in the subspace basis.
    pub fn coords(&self, v: &SVec) -> Option<SVec> {
        self.elim.express(v)
    }

    pub fn include(&self, c: &SVec) -> SVec {
        c.apply(&self.inclusion)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }
}

fn rebuild(dim: usize, basis: &[SVec]) -> TrackedEliminator {
    let mut e = TrackedEliminator::new(dim);
    for b in basis {
        let _ = e.insert(b.clone());
    }
    e
}

/// Scalar multiple of a column family.
pub fn scale_cols(cols: &[SVec], c: &Scalar) -> Vec<SVec> {
    cols.iter().map(|v| v.scaled(c)).collect()
}
