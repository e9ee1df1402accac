//! The `coring` command-line driver.
//!
//! Every subcommand reads JSON (a file, or stdin when the file is omitted or
//! `-`) and writes one JSON object carrying a `report`, so commands pipe into
//! each other. Exit codes: 0 when every check passes, 1 on a failed check or
//! a mathematical error (with a witness), 2 on usage or parse errors.
//!
//! Sizes: the matrix coring with `N = 3` at `--max-degree 4` has plain tensor
//! spaces of dimension `9^4`; keep `N ≤ 3` and `D ≤ 4` for interactive use.

use std::io::{Read, Write};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algmod::Algebra;
use crate::catalog::{
    catalog_comatrix, catalog_entwining, catalog_matrix, catalog_order, catalog_sweedler, check_entwining, super_flip_example,
    sweedler_element, EndoBasis,
};
use crate::cdga::{check_cdga_degreewise, check_curved_module};
use crate::comod::{check_comodule, check_complex, cone, connection_from_complex, dg_differential, dg_sample_checks, ComoduleComplex};
use crate::contra::{check_contramodule, check_contramodule_complex, divergence_from_contramodule_complex, divergence_from_curved_module, Prop46Sign};
use crate::coring::{check_coring, BasedCoring, Coring};
use crate::equiv::{roundtrip_tu, roundtrip_ut, t_based, t_flat, u_functor};
use crate::exactla::{Scalar, SVec};
use crate::io::{self, IoError};
use crate::report::Report;

#[derive(Parser, Debug)]
#[command(name = "coring", version, about = "Build and verify corings, semi-free curved DGAs and their modules")]
pub struct Cli {
    /// Truncation degree of tensor algebras.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_degree: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized sample checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify the axioms of an object.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        file: Option<String>,
        /// Random endomorphism samples for `check complex`.
        #[arg(long, default_value_t = 12)]
        samples: usize,
    },
    /// Apply T♭, T or U.
    Functor {
        #[arg(value_enum)]
        which: FunctorKind,
        file: Option<String>,
        #[command(flatten)]
        point: PointArg,
    },
    /// T∘U or U∘T round trips.
    Roundtrip {
        #[arg(value_enum)]
        which: RoundtripKind,
        file: Option<String>,
        #[command(flatten)]
        point: PointArg,
    },
    /// Build a catalog example.
    Catalog {
        #[command(subcommand)]
        which: CatalogCommand,
    },
    /// The connection of a comodule complex.
    Connection {
        #[arg(value_enum)]
        which: ConnectionKind,
        file: Option<String>,
        #[command(flatten)]
        point: PointArg,
        /// Work over T♭ instead of T.
        #[arg(long)]
        flat: bool,
    },
    /// Divergences from contramodule complexes or curved modules.
    Divergence {
        #[arg(value_enum)]
        which: DivergenceKind,
        file: Option<String>,
        #[command(flatten)]
        point: PointArg,
        #[arg(long)]
        flat: bool,
    },
    /// The cone of a closed degree zero morphism of comodule complexes.
    Cone {
        file: String,
        /// `{"degree", "comps"}`, with an optional `"target"` complex.
        morphism: String,
    },
}

#[derive(Args, Debug)]
pub struct PointArg {
    /// Base point as comma separated rationals, overriding the file.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub base_point: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CheckKind {
    Coring,
    Cdga,
    Comodule,
    Complex,
    Contramodule,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FunctorKind {
    Tflat,
    T,
    U,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RoundtripKind {
    Tu,
    Ut,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConnectionKind {
    FromComplex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DivergenceKind {
    FromContra,
    FromModule,
}

#[derive(Subcommand, Debug)]
pub enum CatalogCommand {
    /// `M_N(A)` based at `E_NN`.
    Matrix {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "ground")]
        algebra: String,
    },
    /// The coring of a reflexive transitive relation.
    Order {
        #[arg(long)]
        points: usize,
        /// Pairs `s-t`, comma separated; the full relation when omitted.
        #[arg(long, value_delimiter = ',')]
        relation: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        e: usize,
        #[arg(long, default_value = "ground")]
        algebra: String,
    },
    /// `P* ⊗_B P` for `P = A^n`.
    Comatrix {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = BChoice::Scalars)]
        b: BChoice,
        #[arg(long, default_value = "ground")]
        algebra: String,
    },
    /// `A ⊗ A` with the element `x = Σ e_i ⊗ e_j`.
    Sweedler {
        #[arg(long, default_value = "matrix:2")]
        algebra: String,
        /// Basis index pairs `i:j`, comma separated; `1 ⊗ 1` when omitted.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<String>>,
    },
    /// The super-flip entwining of `Q[Z/2]` with its comodule complex.
    Entwining {
        /// Negate one coefficient of ψ.
        #[arg(long)]
        flip_sign: bool,
        /// Top degree of the induced complex.
        #[arg(long, default_value_t = 1)]
        window: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BChoice {
    Scalars,
    Full,
}

enum Failure {
    Usage(String),
    Math { message: String, witness: Value },
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Malformed { .. } => Failure::Usage(e.to_string()),
            IoError::Build(m) => Failure::Math { message: m, witness: Value::Null },
        }
    }
}

fn math<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Math { message: e.to_string(), witness: Value::Null }
}

struct Output {
    payload: Value,
    report: Report,
}

impl Output {
    fn report(report: Report) -> Self {
        Output { payload: json!({}), report }
    }
}

/// Parse `argv` (program name first), read from `input` when no file is
/// given, and return the exit code.
pub fn run<I, T>(argv: I, input: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let fmt = cli.format;
    match dispatch(&cli, input) {
        Ok(o) => {
            let ok = o.report.all_pass();
            let mut payload = o.payload;
            payload["report"] = o.report.to_json();
            let _ = match fmt {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&payload).expect("json")),
                Format::Text => write!(out, "{}", o.report.to_text()),
            };
            if ok {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Math { message, witness }) => {
            let _ = match fmt {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&json!({"error": message, "witness": witness})).expect("json")),
                Format::Text => writeln!(out, "ERROR {message} {witness}"),
            };
            1
        }
    }
}

fn read_json(file: Option<&str>, input: &mut dyn Read) -> Result<Value, Failure> {
    let text = match file {
        None | Some("-") => {
            let mut s = String::new();
            input.read_to_string(&mut s).map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
            s
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("reading {p}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid JSON: {e}")))
}

/// The sub-object carrying `marker`, looking through `"coring"`, `"cdga"`
/// and `"complex"` wrappers.
fn locate<'a>(v: &'a Value, marker: &str, wrappers: &[&str]) -> &'a Value {
    if v.get(marker).is_some() {
        return v;
    }
    for w in wrappers {
        if let Some(inner) = v.get(*w) {
            let found = locate(inner, marker, wrappers);
            if found.get(marker).is_some() {
                return found;
            }
        }
    }
    v
}

fn coring_of(v: &Value) -> Result<(Arc<Coring>, Option<SVec>), Failure> {
    Ok(io::coring_from(locate(v, "delta_lift", &["coring", "complex"]), "$")?)
}

fn point(file_point: Option<SVec>, arg: &PointArg, rank: usize) -> Result<Option<SVec>, Failure> {
    let Some(raw) = &arg.base_point else { return Ok(file_point) };
    if raw.len() != rank {
        return Err(Failure::Usage(format!("--base-point needs {rank} entries")));
    }
    let dense = raw.iter().map(|s| s.trim().parse::<Scalar>().map_err(|e| Failure::Usage(format!("--base-point: {e}")))).collect::<Result<Vec<_>, _>>()?;
    Ok(Some(SVec::from_dense(&dense)))
}

fn require_point(p: Option<SVec>) -> Result<SVec, Failure> {
    p.ok_or_else(|| Failure::Usage("a base point is required (in the file or via --base-point)".into()))
}

fn based(c: &Arc<Coring>, x: SVec) -> Result<BasedCoring, Failure> {
    BasedCoring::new(c.clone(), x.clone()).map_err(|e| Failure::Math { message: e.to_string(), witness: json!({"counit_of_x": io::vec_to(&c.apply_counit(&x), c.algebra().dim())}) })
}

fn algebra(spec: &str) -> Result<Arc<Algebra>, Failure> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let n = || arg.parse::<usize>().map_err(|_| Failure::Usage(format!("algebra {spec}: expected a size after ':'")));
    let a = match name {
        "ground" => Algebra::ground(),
        "matrix" => Algebra::matrix(n()?),
        "cyclic" => Algebra::cyclic_group(n()?),
        _ => return Err(Failure::Usage(format!("unknown algebra {spec}; use ground, matrix:N or cyclic:N"))),
    };
    Ok(Arc::new(a))
}

fn index_pair(s: &str, sep: char) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("expected a pair a{sep}b, found {s}"));
    let (a, b) = s.trim().split_once(sep).ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn dispatch(cli: &Cli, input: &mut dyn Read) -> Result<Output, Failure> {
    let d = cli.max_degree;
    match &cli.command {
        Command::Check { kind, file, samples } => {
            let v = read_json(file.as_deref(), input)?;
            check(*kind, &v, d, *samples, cli.seed)
        }
        Command::Functor { which, file, point: p } => {
            let v = read_json(file.as_deref(), input)?;
            functor(*which, &v, p, d)
        }
        Command::Roundtrip { which, file, point: p } => {
            let v = read_json(file.as_deref(), input)?;
            match which {
                RoundtripKind::Tu => {
                    let cdga = io::cdga_from(locate(&v, "d0", &["cdga"]), Some(d), true, "$")?;
                    let mut r = roundtrip_tu(&cdga, None).map_err(math)?;
                    if r.all_pass() {
                        r.note("exact equality");
                    }
                    Ok(Output::report(r))
                }
                RoundtripKind::Ut => {
                    let (c, fp) = coring_of(&v)?;
                    let x = require_point(point(fp, p, c.rank())?)?;
                    let rt = roundtrip_ut(&based(&c, x)?, d).map_err(math)?;
                    Ok(Output::report(rt.report))
                }
            }
        }
        Command::Catalog { which } => catalog(which, d),
        Command::Connection { file, point: p, flat, .. } => {
            let v = read_json(file.as_deref(), input)?;
            let (cx, fp) = io::complex_from(&v, "$")?;
            let x = require_point(point(fp, p, cx.coring().rank())?)?;
            if !flat {
                based(cx.coring(), x.clone())?;
            }
            let (z, mut r) = connection_from_complex(&cx, &x, !flat, d).map_err(math)?;
            r.merge("connection", z.check());
            let ranks: Vec<Value> = (z.module.lo()..=z.module.hi()).map(|n| json!([n, z.module.rank(n)])).collect();
            Ok(Output { payload: json!({"cdga": io::cdga_to(&z.cdga), "window": [z.lo, z.hi()], "module_ranks": ranks}), report: r })
        }
        Command::Divergence { which, file, point: p, flat } => {
            let v = read_json(file.as_deref(), input)?;
            match which {
                DivergenceKind::FromContra => {
                    let (cx, fp) = io::contramodule_complex_from(&v, "$")?;
                    let x = require_point(point(fp, p, cx.coring().rank())?)?;
                    let z = divergence_from_contramodule_complex(&cx, &x, !flat, d, Prop46Sign::Displayed).map_err(math)?;
                    Ok(Output { payload: json!({"cdga": io::cdga_to(&z.cdga)}), report: z.report })
                }
                DivergenceKind::FromModule => {
                    let (cx, fp) = io::complex_from(&v, "$")?;
                    let x = require_point(point(fp, p, cx.coring().rank())?)?;
                    let (z, mut r) = connection_from_complex(&cx, &x, !flat, d).map_err(math)?;
                    r.merge("curved_module", check_curved_module(&z.module));
                    let div = divergence_from_curved_module(&z.module).map_err(math)?;
                    r.merge("divergence", div.report);
                    Ok(Output { payload: json!({"cdga": io::cdga_to(&z.cdga)}), report: r })
                }
            }
        }
        Command::Cone { file, morphism } => {
            let v = read_json(Some(file), input)?;
            let (src, base) = io::complex_from(&v, "$")?;
            let mv = read_json(Some(morphism), input)?;
            let tgt = match mv.get("target") {
                Some(t) => io::complex_from(t, "$.target")?.0,
                None => src.clone(),
            };
            let phi = io::morphism_from(&mv, &src, &tgt, "$")?;
            let mut r = Report::new();
            let open = dg_differential(&phi).first_nonzero().map(|(k, l, b)| json!({"k": k, "degree": l, "basis": b}));
            let closed = open.is_none();
            r.record("morphism_closed", open);
            if !closed || phi.degree != 0 {
                if phi.degree != 0 {
                    r.fail("morphism_degree_zero", json!({"degree": phi.degree}));
                }
                return Ok(Output::report(r));
            }
            let cn = cone(&phi).map_err(math)?;
            r.merge("cone", cn.report.clone());
            r.merge("complex", check_complex(&cn.complex));
            Ok(Output { payload: io::complex_to(&cn.complex, base.as_ref()), report: r })
        }
    }
}

fn check(kind: CheckKind, v: &Value, d: usize, samples: usize, seed: u64) -> Result<Output, Failure> {
    let r = match kind {
        CheckKind::Coring => {
            let (c, x) = coring_of(v)?;
            let mut r = check_coring(&c);
            if let Some(x) = x {
                let e = c.apply_counit(&x);
                r.record("base_point_counit", (e != *c.algebra().unit()).then(|| json!({"counit_of_x": io::vec_to(&e, c.algebra().dim())})));
            }
            r
        }
        CheckKind::Cdga => {
            let c = io::cdga_from(locate(v, "d0", &["cdga"]), Some(d), false, "$")?;
            check_cdga_degreewise(&c)
        }
        CheckKind::Comodule => check_comodule(&io::comodule_from(v, "$")?.0),
        CheckKind::Complex => {
            let (cx, _) = io::complex_from(v, "$")?;
            let mut r = check_complex(&cx);
            if samples > 0 && r.all_pass() {
                r.merge("dg", dg_sample_checks(&cx, samples, 2, seed));
            }
            r
        }
        CheckKind::Contramodule => {
            if v.get("terms").is_some() {
                check_contramodule_complex(&io::contramodule_complex_from(v, "$")?.0)
            } else {
                check_contramodule(&io::contramodule_from(v, "$")?.0)
            }
        }
    };
    Ok(Output::report(r))
}

fn functor(which: FunctorKind, v: &Value, p: &PointArg, d: usize) -> Result<Output, Failure> {
    match which {
        FunctorKind::Tflat => {
            let (c, fp) = coring_of(v)?;
            let x = point(fp, p, c.rank())?.unwrap_or_default();
            let f = t_flat(&c, &x, d).map_err(math)?;
            Ok(Output { payload: io::cdga_to(&f.cdga), report: f.report })
        }
        FunctorKind::T => {
            let (c, fp) = coring_of(v)?;
            let x = require_point(point(fp, p, c.rank())?)?;
            let b = t_based(&based(&c, x)?, d).map_err(math)?;
            Ok(Output { payload: io::cdga_to(&b.cdga), report: b.report })
        }
        FunctorKind::U => {
            let cdga = io::cdga_from(locate(v, "d0", &["cdga"]), Some(d), true, "$")?;
            let u = u_functor(&cdga).map_err(math)?;
            let mut r = u.report.clone();
            r.merge("coring", check_coring(u.coring()));
            Ok(Output { payload: io::coring_to(u.coring(), Some(&u.based.x)), report: r })
        }
    }
}

fn catalog(which: &CatalogCommand, d: usize) -> Result<Output, Failure> {
    let coring_out = |b: &BasedCoring, mut r: Report| {
        r.merge("coring", check_coring(&b.coring));
        Output { payload: io::coring_to(&b.coring, Some(&b.x)), report: r }
    };
    match which {
        CatalogCommand::Matrix { n, algebra: a } => {
            if *n == 0 {
                return Err(Failure::Usage("--n must be at least 1".into()));
            }
            let m = catalog_matrix(*n, &algebra(a)?).map_err(math)?;
            Ok(coring_out(&m.based, Report::new()))
        }
        CatalogCommand::Order { points, relation, e, algebra: a } => {
            let q = match relation {
                Some(list) => list.iter().map(|s| index_pair(s, '-')).collect::<Result<Vec<_>, _>>()?,
                None => (0..*points).flat_map(|s| (0..*points).map(move |t| (s, t))).collect(),
            };
            let o = catalog_order(&algebra(a)?, *points, &q, *e).map_err(math)?;
            Ok(coring_out(&o.based, Report::new()))
        }
        CatalogCommand::Comatrix { n, b, algebra: a } => {
            let alg = algebra(a)?;
            let basis = match b {
                BChoice::Scalars => EndoBasis::scalars(*n, &alg),
                BChoice::Full => EndoBasis::full(*n, &alg),
            };
            let cm = catalog_comatrix(&alg, *n, basis, None).map_err(math)?;
            Ok(coring_out(&cm.based, Report::new()))
        }
        CatalogCommand::Sweedler { algebra: a, x } => {
            let alg = algebra(a)?;
            let terms = match x {
                Some(list) => list
                    .iter()
                    .map(|s| {
                        let (i, j) = index_pair(s, ':')?;
                        if i >= alg.dim() || j >= alg.dim() {
                            return Err(Failure::Usage(format!("basis index in {s} exceeds {}", alg.dim())));
                        }
                        Ok((SVec::unit(i), SVec::unit(j)))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => vec![(alg.unit().clone(), alg.unit().clone())],
            };
            let x = sweedler_element(&alg, &terms);
            let s = catalog_sweedler(&alg, &x, d).map_err(math)?;
            let is_based = s.coring.apply_counit(&x) == *alg.unit();
            Ok(Output { payload: io::coring_to(&s.coring, is_based.then_some(&x)), report: s.report })
        }
        CatalogCommand::Entwining { flip_sign, window } => {
            let mut ent = super_flip_example();
            if *flip_sign {
                ent.psi[1] = ent.psi[1].neg();
            }
            let mut r = Report::new();
            r.merge("entwining", check_entwining(&ent));
            if !r.all_pass() {
                return Ok(Output::report(r));
            }
            let data = catalog_entwining(&ent, &SVec::unit(0), ent.c.dim, &ent.c.comul, *window).map_err(math)?;
            r.merge("coring", check_coring(&data.based.coring));
            r.merge("complex", check_complex(&data.complex));
            let cx: Arc<ComoduleComplex> = Arc::new(data.complex);
            Ok(Output { payload: io::complex_to(&cx, Some(&data.based.x)), report: r })
        }
    }
}
