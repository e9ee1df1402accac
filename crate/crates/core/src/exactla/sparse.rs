use std::collections::btree_map::{self, BTreeMap};
use std::collections::HashMap;

use super::Scalar;

/// Sparse vector keyed by coordinate index. Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SVec(BTreeMap<usize, Scalar>);

impl SVec {
    pub fn new() -> Self {
        SVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut m = BTreeMap::new();
        m.insert(i, Scalar::one());
        SVec(m)
    }

    pub fn single(i: usize, c: Scalar) -> Self {
        let mut v = SVec::new();
        v.add_term(i, &c);
        v
    }

    pub fn from_dense(v: &[Scalar]) -> Self {
        SVec(
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        )
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); dim];
        for (i, c) in &self.0 {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.0.get(&i).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, usize, Scalar> {
        self.0.iter()
    }

    pub fn last(&self) -> Option<(usize, &Scalar)> {
        self.0.iter().next_back().map(|(i, c)| (*i, c))
    }

    pub fn first(&self) -> Option<(usize, &Scalar)> {
        self.0.iter().next().map(|(i, c)| (*i, c))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn add_term(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(i) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: &Scalar, other: &SVec) {
        if c.is_zero() {
            return;
        }
        for (i, x) in &other.0 {
            self.add_term(*i, &(c * x));
        }
    }

    pub fn add(&mut self, other: &SVec) {
        for (i, x) in &other.0 {
            self.add_term(*i, x);
        }
    }

    pub fn sub(&mut self, other: &SVec) {
        self.axpy(&Scalar::from_int(-1), other);
    }

    pub fn scaled(&self, c: &Scalar) -> SVec {
        if c.is_zero() {
            return SVec::new();
        }
        SVec(self.0.iter().map(|(i, x)| (*i, x * c)).collect())
    }

    pub fn neg(&self) -> SVec {
        self.scaled(&Scalar::from_int(-1))
    }

    pub fn plus(&self, other: &SVec) -> SVec {
        let mut v = self.clone();
        v.add(other);
        v
    }

    pub fn minus(&self, other: &SVec) -> SVec {
        let mut v = self.clone();
        v.sub(other);
        v
    }

    pub fn dot(&self, other: &SVec) -> Scalar {
        let (small, large) = if self.nnz() <= other.nnz() { (self, other) } else { (other, self) };
        small
            .0
            .iter()
            .filter_map(|(i, x)| large.0.get(i).map(|y| x * y))
            .sum()
    }

    /// Apply a column-stored linear map: `cols[j]` is the image of basis vector `j`.
    pub fn apply(&self, cols: &[SVec]) -> SVec {
        let mut out = SVec::new();
        for (j, c) in &self.0 {
            out.axpy(c, &cols[*j]);
        }
        out
    }

    pub fn remove(&mut self, i: usize) -> Option<Scalar> {
        self.0.remove(&i)
    }

    pub fn into_inner(self) -> BTreeMap<usize, Scalar> {
        self.0
    }
}

impl FromIterator<(usize, Scalar)> for SVec {
    fn from_iter<I: IntoIterator<Item = (usize, Scalar)>>(it: I) -> Self {
        let mut v = SVec::new();
        for (i, c) in it {
            v.add_term(i, &c);
        }
        v
    }
}

impl<'a> IntoIterator for &'a SVec {
    type Item = (&'a usize, &'a Scalar);
    type IntoIter = btree_map::Iter<'a, usize, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Compose column-stored maps: returns `g ∘ f`.
pub fn compose_cols(g: &[SVec], f: &[SVec]) -> Vec<SVec> {
    f.iter().map(|v| v.apply(g)).collect()
}

/// Incremental row echelon form where each row is led by its largest index.
///
/// Rows are kept with coefficient one at the leading index. The set of
/// leading indices of the span is exactly the complement of the
/// lexicographically-first set of coordinates independent modulo the span.
#[derive(Clone, Debug, Default)]
pub struct Eliminator {
    dim: usize,
    rows: HashMap<usize, SVec>,
}

impl Eliminator {
    pub fn new(dim: usize) -> Self {
        Eliminator { dim, rows: HashMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` modulo the rows gathered so far.
    pub fn reduce(&self, mut v: SVec) -> SVec {
        let mut out = SVec::new();
        while let Some((p, c)) = v.last().map(|(p, c)| (p, c.clone())) {
            match self.rows.get(&p) {
                Some(row) => v.axpy(&-c, row),
                None => {
                    v.remove(p);
                    out.add_term(p, &c);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    /// Insert `v`; returns whether it enlarged the span.
    pub fn insert(&mut self, mut v: SVec) -> bool {
        loop {
            let Some((p, c)) = v.last().map(|(p, c)| (p, c.clone())) else {
                return false;
            };
            match self.rows.get(&p) {
                Some(row) => v.axpy(&-c, row),
                None => {
                    let v = v.scaled(&c.recip());
                    self.rows.insert(p, v);
                    return true;
                }
            }
        }
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.rows.contains_key(&i)
    }

    /// Canonical quotient by the span of the inserted rows.
    pub fn quotient(&self) -> Quotient {
        let mut reps = Vec::new();
        let mut rep_of = vec![None; self.dim];
        for (j, slot) in rep_of.iter_mut().enumerate() {
            if !self.rows.contains_key(&j) {
                *slot = Some(reps.len());
                reps.push(j);
            }
        }
        let mut proj: Vec<SVec> = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let img = match rep_of[j] {
                Some(r) => SVec::unit(r),
                None => {
                    let row = &self.rows[&j];
                    let mut img = SVec::new();
                    for (k, c) in row {
                        if *k != j {
                            img.axpy(&-c, &proj[*k]);
                        }
                    }
                    img
                }
            };
            proj.push(img);
        }
        Quotient { ambient: self.dim, reps, rep_of, proj }
    }
}

/// Quotient of a coordinate space by a subspace, with canonical representatives.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub ambient: usize,
    /// Ambient coordinates whose classes form the quotient basis, increasing.
    pub reps: Vec<usize>,
    pub rep_of: Vec<Option<usize>>,
    /// `proj[j]` is the class of ambient basis vector `j`.
    pub proj: Vec<SVec>,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn project(&self, v: &SVec) -> SVec {
        v.apply(&self.proj)
    }

    pub fn lift(&self, q: &SVec) -> SVec {
        q.iter().map(|(i, c)| (self.reps[*i], c.clone())).collect()
    }

    pub fn identity(dim: usize) -> Quotient {
        Eliminator::new(dim).quotient()
    }
}

impl Eliminator {
    /// Basis of `{x : r·x = 0 for every inserted row r}`, one vector per free coordinate.
    ///
    /// The vector for free coordinate `f` has a one at `f` and zeros at the other
    /// free coordinates, so kernel coordinates of any solution are its free entries.
    pub fn kernel(&self) -> (Vec<usize>, Vec<SVec>) {
        let q = self.quotient();
        let mut basis: Vec<SVec> = q.reps.iter().map(|&f| SVec::unit(f)).collect();
        for (p, img) in q.proj.iter().enumerate() {
            if q.rep_of[p].is_some() {
                continue;
            }
            for (r, c) in img {
                basis[*r].add_term(p, c);
            }
        }
        (q.reps, basis)
    }
}

/// Elimination that remembers how each row arose from the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct TrackedEliminator {
    dim: usize,
    rows: HashMap<usize, (SVec, SVec)>,
    count: usize,
}

impl TrackedEliminator {
    pub fn new(dim: usize) -> Self {
        TrackedEliminator { dim, rows: HashMap::new(), count: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert the next vector, whose id is the number of vectors inserted before it.
    /// Returns `Ok(())` if it enlarged the span and otherwise `Err(relation)`,
    /// a combination of inserted ids that vanishes.
    pub fn insert(&mut self, v: SVec) -> Result<(), SVec> {
        let id = self.count;
        self.count += 1;
        let mut v = v;
        let mut origin = SVec::unit(id);
        loop {
            let Some((p, c)) = v.last().map(|(p, c)| (p, c.clone())) else {
                return Err(origin);
            };
            match self.rows.get(&p) {
                Some((row, o)) => {
                    let m = -c;
                    v.axpy(&m, row);
                    origin.axpy(&m, o);
                }
                None => {
                    let inv = c.recip();
                    self.rows.insert(p, (v.scaled(&inv), origin.scaled(&inv)));
                    return Ok(());
                }
            }
        }
    }

    /// Write `x` as a combination of inserted ids, if it lies in their span.
    pub fn express(&self, x: &SVec) -> Option<SVec> {
        let mut v = x.clone();
        let mut out = SVec::new();
        while let Some((p, c)) = v.last().map(|(p, c)| (p, c.clone())) {
            let (row, o) = self.rows.get(&p)?;
            v.axpy(&-&c, row);
            out.axpy(&c, o);
        }
        Some(out)
    }

    pub fn contains(&self, x: &SVec) -> bool {
        self.express(x).is_some()
    }
}
