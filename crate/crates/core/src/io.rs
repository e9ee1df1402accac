//! JSON forms of algebras, modules, corings, CDGAs, comodule complexes,
//! contramodules and complex morphisms.
//!
//! Scalars are strings `"p/q"`, vectors are dense arrays and a list of
//! vectors is a matrix given by its columns. Maps into tensor products over
//! `A` are written as lifts into the plain tensor over `ℚ`, so files never
//! depend on a computed quotient basis.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::algmod::{Action, Algebra, HomSpace, ModuleSpace, TensorAlgebra};
use crate::cdga::{make_cdga, SemiFreeCdga};
use crate::comod::{Comodule, ComoduleComplex, ComplexMorphism};
use crate::contra::{Contramodule, ContramoduleComplex};
use crate::coring::Coring;
use crate::exactla::{solve, Matrix, SVec, Scalar};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum IoError {
    #[error("malformed input at {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("{0}")]
    Build(String),
}

fn malformed(path: &str, reason: impl Into<String>) -> IoError {
    IoError::Malformed { path: path.into(), reason: reason.into() }
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, IoError> {
    v.get(key).ok_or_else(|| malformed(path, format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| malformed(path, "expected an array"))
}

fn usize_of(v: &Value, path: &str) -> Result<usize, IoError> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| malformed(path, "expected a non-negative integer"))
}

fn build<E: std::fmt::Display>(e: E) -> IoError {
    IoError::Build(e.to_string())
}

pub fn scalar_from(v: &Value, path: &str) -> Result<Scalar, IoError> {
    serde_json::from_value(v.clone()).map_err(|e| malformed(path, e.to_string()))
}

pub fn vec_to(v: &SVec, dim: usize) -> Value {
    Value::Array(v.to_dense(dim).iter().map(|c| json!(c)).collect())
}

pub fn vec_from(v: &Value, dim: usize, path: &str) -> Result<SVec, IoError> {
    let a = array(v, path)?;
    if a.len() != dim {
        return Err(malformed(path, format!("expected {dim} entries, found {}", a.len())));
    }
    let dense = a.iter().enumerate().map(|(i, x)| scalar_from(x, &format!("{path}[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    Ok(SVec::from_dense(&dense))
}

pub fn cols_to(cols: &[SVec], dim: usize) -> Value {
    Value::Array(cols.iter().map(|c| vec_to(c, dim)).collect())
}

pub fn cols_from(v: &Value, count: usize, dim: usize, path: &str) -> Result<Vec<SVec>, IoError> {
    let a = array(v, path)?;
    if a.len() != count {
        return Err(malformed(path, format!("expected {count} columns, found {}", a.len())));
    }
    a.iter().enumerate().map(|(i, c)| vec_from(c, dim, &format!("{path}[{i}]"))).collect()
}

pub fn algebra_to(a: &Algebra) -> Value {
    let d = a.dim();
    json!({
        "dim": d,
        "unit": vec_to(a.unit(), d),
        "mul": a.table().iter().map(|row| cols_to(row, d)).collect::<Vec<_>>(),
    })
}

pub fn algebra_from(v: &Value, path: &str) -> Result<Arc<Algebra>, IoError> {
    let d = usize_of(field(v, "dim", path)?, &format!("{path}.dim"))?;
    let unit = vec_from(field(v, "unit", path)?, d, &format!("{path}.unit"))?;
    let rows = array(field(v, "mul", path)?, &format!("{path}.mul"))?;
    if rows.len() != d {
        return Err(malformed(&format!("{path}.mul"), format!("expected {d} rows")));
    }
    let mul = rows.iter().enumerate().map(|(i, r)| cols_from(r, d, d, &format!("{path}.mul[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    Algebra::from_table(d, unit, mul).map(Arc::new).map_err(build)
}

fn action_to(act: Option<&Action>, rank: usize) -> Value {
    act.map_or(Value::Null, |a| Value::Array(a.iter().map(|cols| cols_to(cols, rank)).collect()))
}

fn action_from(v: &Value, d: usize, rank: usize, path: &str) -> Result<Option<Action>, IoError> {
    if v.is_null() {
        return Ok(None);
    }
    let a = array(v, path)?;
    if a.len() != d {
        return Err(malformed(path, format!("expected one matrix per algebra basis element ({d})")));
    }
    a.iter().enumerate().map(|(k, m)| cols_from(m, rank, rank, &format!("{path}[{k}]"))).collect::<Result<Vec<_>, _>>().map(Some)
}

pub fn module_to(m: &ModuleSpace) -> Value {
    json!({"rank": m.rank(), "left": action_to(m.left(), m.rank()), "right": action_to(m.right(), m.rank())})
}

pub fn module_from(v: &Value, alg: &Arc<Algebra>, path: &str) -> Result<Arc<ModuleSpace>, IoError> {
    let rank = usize_of(field(v, "rank", path)?, &format!("{path}.rank"))?;
    let d = alg.dim();
    let left = action_from(v.get("left").unwrap_or(&Value::Null), d, rank, &format!("{path}.left"))?;
    let right = action_from(v.get("right").unwrap_or(&Value::Null), d, rank, &format!("{path}.right"))?;
    ModuleSpace::new(alg.clone(), rank, left, right).map(Arc::new).map_err(build)
}

pub fn coring_to(c: &Coring, base_point: Option<&SVec>) -> Value {
    let r = c.rank();
    json!({
        "algebra": algebra_to(c.algebra()),
        "C": module_to(c.c()),
        "delta_lift": cols_to(&c.delta_lift(), r * r),
        "counit": cols_to(c.counit(), c.algebra().dim()),
        "base_point": base_point.map_or(Value::Null, |x| vec_to(x, r)),
    })
}

/// A coring file, with its base point if one is given.
pub fn coring_from(v: &Value, path: &str) -> Result<(Arc<Coring>, Option<SVec>), IoError> {
    let alg = algebra_from(field(v, "algebra", path)?, &format!("{path}.algebra"))?;
    let cm = module_from(field(v, "C", path)?, &alg, &format!("{path}.C"))?;
    let r = cm.rank();
    let delta = cols_from(field(v, "delta_lift", path)?, r, r * r, &format!("{path}.delta_lift"))?;
    let counit = cols_from(field(v, "counit", path)?, r, alg.dim(), &format!("{path}.counit"))?;
    let base = match v.get("base_point") {
        None | Some(Value::Null) => None,
        Some(x) => Some(vec_from(x, r, &format!("{path}.base_point"))?),
    };
    let c = Coring::new(cm, &delta, counit).map_err(build)?;
    Ok((Arc::new(c), base))
}

pub fn cdga_to(c: &SemiFreeCdga) -> Value {
    let rv = c.v().rank();
    json!({
        "algebra": algebra_to(c.algebra()),
        "V": module_to(c.v()),
        "d0": cols_to(c.d0(), rv),
        "d1_lift": cols_to(&c.d1().iter().map(|x| c.lift2(x)).collect::<Vec<_>>(), rv * rv),
        "gamma_lift": vec_to(&c.lift2(c.gamma()), rv * rv),
        "max_degree": c.max_degree(),
    })
}

/// A CDGA file. With `validate` false the axioms are left to the verifier.
pub fn cdga_from(v: &Value, max_degree: Option<usize>, validate: bool, path: &str) -> Result<Arc<SemiFreeCdga>, IoError> {
    let alg = algebra_from(field(v, "algebra", path)?, &format!("{path}.algebra"))?;
    let vm = module_from(field(v, "V", path)?, &alg, &format!("{path}.V"))?;
    let rv = vm.rank();
    let d0 = cols_from(field(v, "d0", path)?, alg.dim(), rv, &format!("{path}.d0"))?;
    let d1 = cols_from(field(v, "d1_lift", path)?, rv, rv * rv, &format!("{path}.d1_lift"))?;
    let gamma = vec_from(field(v, "gamma_lift", path)?, rv * rv, &format!("{path}.gamma_lift"))?;
    let dm = match max_degree {
        Some(d) => d,
        None => usize_of(field(v, "max_degree", path)?, &format!("{path}.max_degree"))?,
    };
    if validate {
        return make_cdga(&vm, d0, &d1, &gamma, dm).map_err(build);
    }
    let t = Arc::new(TensorAlgebra::new(&vm, dm).map_err(build)?);
    let d1 = d1.iter().map(|x| t.project_plain(2, x)).collect();
    let gamma = t.project_plain(2, &gamma);
    SemiFreeCdga::unchecked(t.clone(), d0, d1, gamma).map(Arc::new).map_err(build)
}

fn rho_lift(m: &Comodule) -> Vec<SVec> {
    let tw = m.tower(1);
    let r = m.coring().rank();
    m.rho()
        .iter()
        .map(|v| {
            v.iter()
                .map(|(q, c)| {
                    let (i, t) = tw.tuple(1, *q);
                    (i * r + t[0], c.clone())
                })
                .collect()
        })
        .collect()
}

pub fn comodule_to(m: &Comodule) -> Value {
    json!({"M": module_to(m.space()), "rho_lift": cols_to(&rho_lift(m), m.rank() * m.coring().rank())})
}

fn comodule_body(v: &Value, c: &Arc<Coring>, path: &str) -> Result<Comodule, IoError> {
    let m = module_from(field(v, "M", path)?, c.algebra(), &format!("{path}.M"))?;
    let rho = cols_from(field(v, "rho_lift", path)?, m.rank(), m.rank() * c.rank(), &format!("{path}.rho_lift"))?;
    Comodule::new(c, m, &rho).map_err(build)
}

/// A comodule file: `{"coring", "M", "rho_lift"}`.
pub fn comodule_from(v: &Value, path: &str) -> Result<(Comodule, Option<SVec>), IoError> {
    let (c, base) = coring_from(field(v, "coring", path)?, &format!("{path}.coring"))?;
    Ok((comodule_body(v, &c, path)?, base))
}

pub fn complex_to(x: &ComoduleComplex, base_point: Option<&SVec>) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut o = comodule_to(t);
            if let Some(d) = x.deltas().get(i) {
                o["delta"] = cols_to(d, x.terms()[i + 1].rank());
            }
            o
        })
        .collect();
    json!({"coring": coring_to(x.coring(), base_point), "window": [x.lo(), x.hi()], "terms": terms})
}

/// A complex file; `{"complex": ...}` wrappers are accepted.
pub fn complex_from(v: &Value, path: &str) -> Result<(Arc<ComoduleComplex>, Option<SVec>), IoError> {
    if let Some(inner) = v.get("complex") {
        return complex_from(inner, &format!("{path}.complex"));
    }
    let (c, base) = coring_from(field(v, "coring", path)?, &format!("{path}.coring"))?;
    let window = array(field(v, "window", path)?, &format!("{path}.window"))?;
    let lo = window.first().and_then(Value::as_i64).ok_or_else(|| malformed(&format!("{path}.window"), "expected [lo, hi]"))?;
    let hi = window.get(1).and_then(Value::as_i64).ok_or_else(|| malformed(&format!("{path}.window"), "expected [lo, hi]"))?;
    let tv = array(field(v, "terms", path)?, &format!("{path}.terms"))?;
    if tv.len() as i64 != hi - lo + 1 {
        return Err(malformed(&format!("{path}.terms"), "one term per degree of the window"));
    }
    let terms = tv.iter().enumerate().map(|(i, t)| comodule_body(t, &c, &format!("{path}.terms[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    let mut deltas = Vec::new();
    for i in 0..terms.len().saturating_sub(1) {
        let p = format!("{path}.terms[{i}].delta");
        deltas.push(cols_from(field(&tv[i], "delta", &p)?, terms[i].rank(), terms[i + 1].rank(), &p)?);
    }
    Ok((Arc::new(ComoduleComplex::new(c.clone(), lo, terms, deltas).map_err(build)?), base))
}

fn hom_basis(h: &HomSpace) -> Vec<Vec<SVec>> {
    (0..h.dim()).map(|i| h.to_cols(&SVec::unit(i))).collect()
}

fn contramodule_body_to(m: &Contramodule) -> Value {
    let r = m.m.rank();
    json!({
        "M": module_to(&m.m),
        "alpha": cols_to(&m.alpha, r),
        "hom_basis": hom_basis(&m.hom).iter().map(|cols| cols_to(cols, r)).collect::<Vec<_>>(),
    })
}

pub fn contramodule_to(m: &Contramodule, base_point: Option<&SVec>) -> Value {
    let mut o = contramodule_body_to(m);
    o["coring"] = coring_to(&m.coring, base_point);
    o
}

/// `α` is given on the listed basis of `Hom_A(C, M)`, or on the computed
/// basis when `hom_basis` is absent.
fn contramodule_body(v: &Value, c: &Arc<Coring>, path: &str) -> Result<Contramodule, IoError> {
    let m = module_from(field(v, "M", path)?, c.algebra(), &format!("{path}.M"))?;
    let hom = HomSpace::new(c.c(), &m).map_err(build)?;
    let (n, r) = (hom.dim(), m.rank());
    let given = cols_from(field(v, "alpha", path)?, n, r, &format!("{path}.alpha"))?;
    let alpha = match v.get("hom_basis") {
        None | Some(Value::Null) => given,
        Some(b) => {
            let p = format!("{path}.hom_basis");
            let list = array(b, &p)?;
            if list.len() != n {
                return Err(malformed(&p, format!("expected {n} maps")));
            }
            let mut coords = Vec::with_capacity(n);
            for (i, f) in list.iter().enumerate() {
                let cols = cols_from(f, c.rank(), r, &format!("{p}[{i}]"))?;
                coords.push(hom.from_cols(&cols).ok_or_else(|| malformed(&format!("{p}[{i}]"), "not right A-linear"))?);
            }
            let change = Matrix::from_columns(n, &coords);
            let mut alpha = Vec::with_capacity(n);
            for j in 0..n {
                let e = SVec::unit(j).to_dense(n);
                let y = solve(&change, &e).ok_or_else(|| malformed(&p, "not a basis"))?;
                let mut out = SVec::new();
                for (i, c) in y.iter().enumerate() {
                    out.axpy(c, &given[i]);
                }
                alpha.push(out);
            }
            alpha
        }
    };
    Contramodule::new(c.clone(), m, alpha).map_err(build)
}

/// A contramodule file `{"coring", "M", "alpha", "hom_basis"}`.
pub fn contramodule_from(v: &Value, path: &str) -> Result<(Contramodule, Option<SVec>), IoError> {
    let (c, base) = coring_from(field(v, "coring", path)?, &format!("{path}.coring"))?;
    Ok((contramodule_body(v, &c, path)?, base))
}

pub fn contramodule_complex_to(x: &ContramoduleComplex, base_point: Option<&SVec>) -> Value {
    let terms: Vec<Value> = x
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut o = contramodule_body_to(t);
            if let Some(d) = x.delta.get(i) {
                o["delta"] = cols_to(d, x.terms[i + 1].m.rank());
            }
            o
        })
        .collect();
    json!({"coring": coring_to(x.coring(), base_point), "window": [x.lo, x.hi()], "terms": terms})
}

/// A contramodule complex, or a single contramodule in degree zero.
pub fn contramodule_complex_from(v: &Value, path: &str) -> Result<(ContramoduleComplex, Option<SVec>), IoError> {
    let Some(tv) = v.get("terms") else {
        let (m, base) = contramodule_from(v, path)?;
        return Ok((ContramoduleComplex::single(m, 0), base));
    };
    let (c, base) = coring_from(field(v, "coring", path)?, &format!("{path}.coring"))?;
    let lo = field(v, "window", path)?.get(0).and_then(Value::as_i64).ok_or_else(|| malformed(&format!("{path}.window"), "expected [lo, hi]"))?;
    let tv = array(tv, &format!("{path}.terms"))?;
    let terms = tv.iter().enumerate().map(|(i, t)| contramodule_body(t, &c, &format!("{path}.terms[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    let mut delta = Vec::new();
    for i in 0..terms.len().saturating_sub(1) {
        let p = format!("{path}.terms[{i}].delta");
        delta.push(cols_from(field(&tv[i], "delta", &p)?, terms[i].m.rank(), terms[i + 1].m.rank(), &p)?);
    }
    Ok((ContramoduleComplex::new(lo, terms, delta).map_err(build)?, base))
}

/// `comps[k][l − lo][x]` lifted to the plain `N^{l+s−k} ⊗ C^{⊗k}`.
pub fn morphism_to(phi: &ComplexMorphism) -> Value {
    let (m, n) = (&phi.source, &phi.target);
    let r = m.coring().rank();
    let comps: Vec<Value> = (0..=phi.depth())
        .map(|k| {
            let per_l: Vec<Value> = (m.lo()..=m.hi())
                .map(|l| {
                    let cols = phi.component(k, l).unwrap_or(&[]);
                    let Some(nt) = n.term(l + phi.degree - k as i64) else { return cols_to(&vec![SVec::new(); cols.len()], 0) };
                    let tw = nt.tower(k);
                    let plain = nt.rank() * r.pow(k as u32);
                    let lifted: Vec<SVec> = cols
                        .iter()
                        .map(|v| {
                            v.iter()
                                .map(|(q, c)| {
                                    let (i, t) = tw.tuple(k, *q);
                                    (t.iter().fold(i, |acc, s| acc * r + s), c.clone())
                                })
                                .collect()
                        })
                        .collect();
                    cols_to(&lifted, plain)
                })
                .collect();
            Value::Array(per_l)
        })
        .collect();
    json!({"degree": phi.degree, "comps": comps})
}

/// A morphism file `{"degree", "comps"}` between the given complexes.
pub fn morphism_from(v: &Value, source: &Arc<ComoduleComplex>, target: &Arc<ComoduleComplex>, path: &str) -> Result<ComplexMorphism, IoError> {
    let degree = field(v, "degree", path)?.as_i64().ok_or_else(|| malformed(&format!("{path}.degree"), "expected an integer"))?;
    let kv = array(field(v, "comps", path)?, &format!("{path}.comps"))?;
    let r = source.coring().rank();
    let mut comps = Vec::with_capacity(kv.len());
    for (k, per_l) in kv.iter().enumerate() {
        let pk = format!("{path}.comps[{k}]");
        let ls = array(per_l, &pk)?;
        if ls.len() as i64 != source.hi() - source.lo() + 1 {
            return Err(malformed(&pk, "one entry per degree of the source"));
        }
        let mut row = Vec::with_capacity(ls.len());
        for (i, cols) in ls.iter().enumerate() {
            let l = source.lo() + i as i64;
            let p = format!("{pk}[{i}]");
            match target.term(l + degree - k as i64) {
                Some(nt) => {
                    let plain = nt.rank() * r.pow(k as u32);
                    let lifted = cols_from(cols, source.rank(l), plain, &p)?;
                    let tw = nt.tower(k);
                    row.push(lifted.iter().map(|x| tw.project_plain(k, x)).collect());
                }
                None => row.push(vec![SVec::new(); source.rank(l)]),
            }
        }
        comps.push(row);
    }
    ComplexMorphism::new(source.clone(), target.clone(), degree, comps).map_err(build)
}

/// Sort-stable object with the given entries.
pub fn object(entries: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_matrix, catalog_sweedler, sweedler_element, super_flip_example, catalog_entwining};
    use crate::comod::random_morphism;
    use crate::contra::cofree_contramodule;
    use crate::equiv::t_based;
    use rand::SeedableRng;

    fn through_text(v: &Value) -> Value {
        serde_json::from_str(&serde_json::to_string(v).unwrap()).unwrap()
    }

    #[test]
    fn coring_round_trip() {
        let m = catalog_matrix(2, &Arc::new(Algebra::ground())).unwrap();
        let v = through_text(&coring_to(&m.based.coring, Some(&m.based.x)));
        let (c, x) = coring_from(&v, "$").unwrap();
        assert_eq!(*c, *m.based.coring);
        assert_eq!(x, Some(m.based.x.clone()));
    }

    #[test]
    fn sweedler_round_trip_over_matrices() {
        let alg = Arc::new(Algebra::matrix(2));
        let x = sweedler_element(&alg, &[(SVec::unit(0), SVec::unit(0)), (SVec::unit(2), SVec::unit(1))]);
        let s = catalog_sweedler(&alg, &x, 2).unwrap();
        let (c, _) = coring_from(&through_text(&coring_to(&s.coring, None)), "$").unwrap();
        assert_eq!(*c, *s.coring);
    }

    #[test]
    fn cdga_round_trip_both_paths() {
        let m = catalog_matrix(2, &Arc::new(Algebra::ground())).unwrap();
        let b = t_based(&m.based, 3).unwrap();
        let v = through_text(&cdga_to(&b.cdga));
        assert_eq!(*cdga_from(&v, None, true, "$").unwrap(), *b.cdga);
        assert_eq!(*cdga_from(&v, None, false, "$").unwrap(), *b.cdga);
    }

    #[test]
    fn complex_and_morphism_round_trip() {
        let ent = super_flip_example();
        let data = catalog_entwining(&ent, &SVec::unit(0), 2, &ent.c.comul, 1).unwrap();
        let cx = Arc::new(data.complex);
        let (back, x) = complex_from(&through_text(&complex_to(&cx, Some(&data.based.x))), "$").unwrap();
        assert_eq!(x, Some(data.based.x.clone()));
        assert_eq!(back.terms(), cx.terms());
        assert_eq!(back.deltas(), cx.deltas());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let phi = random_morphism(&cx, &cx, 0, 2, &mut rng);
        let again = morphism_from(&through_text(&morphism_to(&phi)), &cx, &cx, "$").unwrap();
        assert_eq!(again.comps, phi.comps);
    }

    #[test]
    fn contramodule_round_trip_with_a_foreign_basis() {
        let m = catalog_matrix(2, &Arc::new(Algebra::ground())).unwrap();
        let c = m.based.coring.clone();
        let cf = cofree_contramodule(&c, &Arc::new(ModuleSpace::regular(c.algebra()))).unwrap();
        let v = through_text(&contramodule_to(&cf, None));
        let (back, _) = contramodule_from(&v, "$").unwrap();
        assert_eq!(back.alpha, cf.alpha);
        // list the basis in reverse with the first map doubled
        let mut w = v.clone();
        let n = cf.hom.dim();
        let basis = hom_basis(&cf.hom);
        let mut listed = Vec::new();
        let mut alpha = Vec::new();
        for i in (0..n).rev() {
            let s = if i == 0 { Scalar::from_int(2) } else { Scalar::one() };
            listed.push(cols_to(&basis[i].iter().map(|x| x.scaled(&s)).collect::<Vec<_>>(), cf.m.rank()));
            alpha.push(cf.alpha[i].scaled(&s));
        }
        w["hom_basis"] = Value::Array(listed);
        w["alpha"] = cols_to(&alpha, cf.m.rank());
        let (back, _) = contramodule_from(&through_text(&w), "$").unwrap();
        assert_eq!(back.alpha, cf.alpha);
    }

    #[test]
    fn malformed_inputs_name_their_path() {
        let m = catalog_matrix(1, &Arc::new(Algebra::ground())).unwrap();
        let mut v = coring_to(&m.based.coring, None);
        v["counit"] = json!([]);
        match coring_from(&v, "$") {
            Err(IoError::Malformed { path, .. }) => assert_eq!(path, "$.counit"),
            other => panic!("{other:?}"),
        }
        assert!(scalar_from(&json!("1/0"), "$").is_err());
        assert_eq!(scalar_from(&json!("-3/6"), "$").unwrap(), Scalar::ratio(-1, 2));
    }
}
