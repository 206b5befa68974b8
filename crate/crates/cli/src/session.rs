//! Name resolution and command execution.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use orbilift::algebra::{CyclotomicNumber as Cyc, Order, Polynomial, RationalFunction, Vars};
use orbilift::connection_lift::{check_liftable_connection, lift_connection_slice, AdaptedConnectionPattern};
use orbilift::group::{close_with, cyclic, diagonal_cyclic, scalar, symmetric, ClosureOptions, GroupElement};
use orbilift::invariants::OrbitMap;
use orbilift::lift::{
    check_diffeo_conditions, decide_lift_adapted, default_series, inequality_sweep, lift_via_pullback, residuum, solomon_express,
    thm37_sweep, AdaptedChart, LiftCertificate, LiftFailure, ResiduumReport,
};
use orbilift::tensor::{tensor_divisor, ChristoffelConnection, Divisor, PolyMap, TensorField};
use orbilift::{Error, FiniteMatrixGroup};
use serde_json::{json, Value};

use crate::ast::*;
use crate::lexer::Span;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub closure: ClosureOptions,
}

/// Static error found before any command runs: unknown or duplicate names,
/// wrong kinds, inconsistent matrix sizes.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {}, column {}: {message}", span.line, span.column)]
pub struct ResolveError {
    pub span: Span,
    pub message: String,
}

/// Failure of a single command.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {}, column {}: {message}", span.line, span.column)]
pub struct CommandError {
    pub span: Span,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct Record {
    /// 1-based position among the commands of the session.
    pub index: usize,
    pub command: &'static str,
    pub input: String,
    pub outcome: Result<Value, CommandError>,
}

impl Record {
    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "index": self.index,
            "command": self.command,
            "input": self.input,
        });
        match &self.outcome {
            Ok(v) => out["result"] = v.clone(),
            Err(e) => {
                out["error"] = json!({
                    "message": e.message,
                    "line": e.span.line,
                    "column": e.span.column,
                })
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("[{}] {}\n", self.index, self.input);
        match &self.outcome {
            Ok(Value::Object(m)) => {
                for (k, v) in m {
                    let v = match v {
                        Value::String(t) => t.clone(),
                        other => other.to_string(),
                    };
                    s.push_str(&format!("    {k}: {v}\n"));
                }
            }
            Ok(other) => s.push_str(&format!("    {other}\n")),
            Err(e) => s.push_str(&format!("    error: {e}\n")),
        }
        s
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.records.iter().any(|r| r.outcome.is_err())
    }

    /// One JSON object per line, keys in lexicographic order.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| format!("{}\n", r.to_json()))
            .collect()
    }

    pub fn to_text(&self) -> String {
        self.records.iter().map(Record::to_text).collect()
    }
}

#[derive(Clone, Copy)]
enum Decl<'a> {
    Group(&'a GroupDef, Option<&'a [Name]>),
    Object(ObjectKind, &'a Expr),
    Connection(&'a ConnectionLit),
    Map(&'a MapLit),
}

impl Decl<'_> {
    fn describe(&self) -> &'static str {
        match self {
            Decl::Group(..) => "a group",
            Decl::Object(ObjectKind::Tensor, _) => "a tensor",
            Decl::Object(ObjectKind::Form, _) => "a form",
            Decl::Connection(_) => "a connection",
            Decl::Map(_) => "a map",
        }
    }
}

fn resolve_err(span: Span, message: impl Into<String>) -> ResolveError {
    ResolveError {
        span,
        message: message.into(),
    }
}

/// Checks names, kinds and matrix shapes. Declarations must precede use.
pub fn check(session: &Session) -> Result<(), ResolveError> {
    let mut decls: BTreeMap<&str, Decl> = BTreeMap::new();
    let all: BTreeMap<&str, Decl> = session
        .statements
        .iter()
        .filter_map(|s| declaration(s).map(|(n, d)| (n.text.as_str(), d)))
        .collect();
    for stmt in &session.statements {
        if let Some((name, decl)) = declaration(stmt) {
            check_declaration(decl, &decls, &all)?;
            if decls.insert(&name.text, decl).is_some() {
                return Err(resolve_err(name.span, format!("`{name}` is already defined")));
            }
            continue;
        }
        let StmtKind::Command(cmd) = &stmt.kind else {
            unreachable!()
        };
        let want = |name: &Name, kind: &str| -> Result<(), ResolveError> {
            match decls.get(name.text.as_str()) {
                Some(d) if d.describe() == kind => Ok(()),
                Some(d) => Err(resolve_err(name.span, format!("`{name}` is {}, expected {kind}", d.describe()))),
                None if all.contains_key(name.text.as_str()) => {
                    Err(resolve_err(name.span, format!("`{name}` is used before its definition")))
                }
                None => Err(resolve_err(name.span, format!("unknown name `{name}`"))),
            }
        };
        let exprs = |es: &[&Expr]| -> Result<(), ResolveError> {
            for e in es {
                check_expr(e, &decls, &all)?;
            }
            Ok(())
        };
        match &cmd.kind {
            CommandKind::Analyze { group } | CommandKind::Invariants { group } => want(group, "a group")?,
            CommandKind::Divisor { expr, group, along, .. } => {
                want(group, "a group")?;
                exprs(&[expr])?;
                exprs(&along.iter().collect::<Vec<_>>())?;
            }
            CommandKind::Lift { expr, group, off } => {
                want(group, "a group")?;
                exprs(&[expr])?;
                exprs(&off.iter().collect::<Vec<_>>())?;
            }
            CommandKind::LiftConnection { connection, group } => {
                want(group, "a group")?;
                match connection {
                    ConnectionRef::Named(n) => want(n, "a connection")?,
                    ConnectionRef::Literal(c) => check_connection(c, &decls, &all)?,
                }
            }
            CommandKind::Solomon { expr, group } => {
                want(group, "a group")?;
                exprs(&[expr])?;
            }
            CommandKind::ValidateThm37 { mrange, .. } => {
                if let Some((a, b)) = mrange {
                    if a > b {
                        return Err(resolve_err(cmd.span, format!("empty range {a}..{b}")));
                    }
                }
            }
            CommandKind::CheckDiffeo { map, inverse, from, to } => {
                want(from, "a group")?;
                want(to, "a group")?;
                for m in [map, inverse] {
                    match m {
                        MapRef::Named(n) => want(n, "a map")?,
                        MapRef::Literal(l) => exprs(&l.components.iter().collect::<Vec<_>>())?,
                    }
                }
            }
        }
    }
    Ok(())
}

fn declaration(stmt: &Stmt) -> Option<(&Name, Decl<'_>)> {
    match &stmt.kind {
        StmtKind::Group { name, def, coords } => Some((name, Decl::Group(def, coords.as_deref()))),
        StmtKind::Object { kind, name, expr } => Some((name, Decl::Object(*kind, expr))),
        StmtKind::Connection { name, value } => Some((name, Decl::Connection(value))),
        StmtKind::Map { name, value } => Some((name, Decl::Map(value))),
        StmtKind::Command(_) => None,
    }
}

fn check_declaration(
    decl: Decl,
    decls: &BTreeMap<&str, Decl>,
    all: &BTreeMap<&str, Decl>,
) -> Result<(), ResolveError> {
    match decl {
        Decl::Group(def, coords) => {
            let dim = match def {
                GroupDef::Generators(ms) => {
                    let n = ms[0].rows.len();
                    for m in ms {
                        if m.rows.len() != n || m.rows.iter().any(|r| r.len() != n) {
                            return Err(resolve_err(
                                m.span,
                                format!("generators must all be {n}x{n} matrices"),
                            ));
                        }
                        for e in m.rows.iter().flatten() {
                            if let Some(span) = first_non_constant(e) {
                                return Err(resolve_err(span, "matrix entries must be constants"));
                            }
                        }
                    }
                    n
                }
                GroupDef::Builtin { name, args } => builtin_dimension(name, args)?,
            };
            if let Some(c) = coords {
                if c.len() != dim {
                    return Err(resolve_err(
                        c[0].span,
                        format!("group acts on dimension {dim} but {} coordinates are given", c.len()),
                    ));
                }
                for (k, x) in c.iter().enumerate() {
                    if c[..k].iter().any(|y| y.text == x.text) {
                        return Err(resolve_err(x.span, format!("coordinate `{x}` repeated")));
                    }
                }
            }
            Ok(())
        }
        Decl::Object(_, e) => check_expr(e, decls, all),
        Decl::Connection(c) => check_connection(c, decls, all),
        Decl::Map(m) => {
            for e in &m.components {
                check_expr(e, decls, all)?;
            }
            Ok(())
        }
    }
}

fn builtin_dimension(name: &Name, args: &[(u32, Span)]) -> Result<usize, ResolveError> {
    let arity = |n: usize| -> Result<(), ResolveError> {
        if args.len() != n {
            return Err(resolve_err(
                name.span,
                format!("`{name}` takes {n} argument(s), found {}", args.len()),
            ));
        }
        Ok(())
    };
    for &(v, span) in args {
        if v == 0 {
            return Err(resolve_err(span, "arguments must be positive"));
        }
    }
    match name.text.as_str() {
        "cyclic" => arity(1).map(|_| 1),
        "symmetric" => arity(1).map(|_| args[0].0 as usize),
        "scalar" => arity(2).map(|_| args[0].0 as usize),
        "diagonal" => Ok(args.len()),
        _ => Err(resolve_err(
            name.span,
            format!("unknown group constructor `{name}`; expected cyclic, symmetric, scalar or diagonal"),
        )),
    }
}

fn first_non_constant(e: &Expr) -> Option<Span> {
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Zeta(_) => None,
        ExprKind::Var(_) | ExprKind::Slot(..) => Some(e.span),
        ExprKind::Neg(a) | ExprKind::Pow(a, _) => first_non_constant(a),
        ExprKind::Binary(_, a, b) => first_non_constant(a).or_else(|| first_non_constant(b)),
    }
}

fn check_expr(e: &Expr, decls: &BTreeMap<&str, Decl>, all: &BTreeMap<&str, Decl>) -> Result<(), ResolveError> {
    match &e.kind {
        ExprKind::Var(v) => match (decls.get(v.as_str()), all.get(v.as_str())) {
            (Some(Decl::Object(..)), _) => Ok(()),
            (Some(d), _) => Err(resolve_err(e.span, format!("`{v}` is {}, expected a tensor", d.describe()))),
            (None, Some(_)) => Err(resolve_err(e.span, format!("`{v}` is used before its definition"))),
            (None, None) => Ok(()),
        },
        ExprKind::Int(_) | ExprKind::Zeta(_) | ExprKind::Slot(..) => Ok(()),
        ExprKind::Neg(a) | ExprKind::Pow(a, _) => check_expr(a, decls, all),
        ExprKind::Binary(_, a, b) => {
            check_expr(a, decls, all)?;
            check_expr(b, decls, all)
        }
    }
}

fn check_connection(
    c: &ConnectionLit,
    decls: &BTreeMap<&str, Decl>,
    all: &BTreeMap<&str, Decl>,
) -> Result<(), ResolveError> {
    for e in &c.entries {
        check_expr(&e.value, decls, all)?;
    }
    Ok(())
}

/// Value of an expression in a coordinate context.
#[derive(Clone, Debug)]
enum Val {
    Scalar(RationalFunction),
    Tensor(TensorField),
}

struct Ctx<'a> {
    coords: &'a Vars,
    objects: &'a BTreeMap<String, Expr>,
}

fn cmd_err(span: Span, message: impl Into<String>) -> CommandError {
    CommandError {
        span,
        message: message.into(),
    }
}

fn engine(span: Span) -> impl Fn(Error) -> CommandError {
    move |e| cmd_err(span, e.to_string())
}

impl Ctx<'_> {
    fn eval(&self, e: &Expr) -> Result<Val, CommandError> {
        let at = engine(e.span);
        let c = self.coords;
        Ok(match &e.kind {
            ExprKind::Int(n) => {
                let q = BigRational::from_integer(BigInt::from(n.clone()));
                Val::Scalar(RationalFunction::constant(c, Cyc::from_rational(q)))
            }
            ExprKind::Zeta(n) => Val::Scalar(RationalFunction::constant(c, Cyc::zeta(*n))),
            ExprKind::Var(v) => {
                if let Some(def) = self.objects.get(v) {
                    return self.eval(def);
                }
                let p = Polynomial::var(c, v).map_err(|_| {
                    cmd_err(
                        e.span,
                        format!("unknown coordinate `{v}`; coordinates here are ({})", c.join(", ")),
                    )
                })?;
                Val::Scalar(p.into())
            }
            ExprKind::Slot(kind, x) => {
                let t = match kind {
                    SlotKind::Covariant => TensorField::covector(c, &x.text),
                    SlotKind::Contravariant => TensorField::vector(c, &x.text),
                };
                Val::Tensor(t.map_err(|_| {
                    cmd_err(
                        x.span,
                        format!("unknown coordinate `{x}`; coordinates here are ({})", c.join(", ")),
                    )
                })?)
            }
            ExprKind::Neg(a) => match self.eval(a)? {
                Val::Scalar(f) => Val::Scalar(-f),
                Val::Tensor(t) => Val::Tensor(t.neg()),
            },
            ExprKind::Pow(a, k) => match self.eval(a)? {
                Val::Scalar(f) => Val::Scalar(f.pow(*k as i64).map_err(at)?),
                Val::Tensor(_) => return Err(cmd_err(e.span, "powers apply to functions only")),
            },
            ExprKind::Binary(op, a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                match (op, x, y) {
                    (BinOp::Add, Val::Scalar(f), Val::Scalar(g)) => Val::Scalar(&f + &g),
                    (BinOp::Sub, Val::Scalar(f), Val::Scalar(g)) => Val::Scalar(&f - &g),
                    (BinOp::Add | BinOp::Sub, Val::Tensor(s), Val::Tensor(t)) => {
                        if (s.p(), s.q()) != (t.p(), t.q()) {
                            return Err(cmd_err(
                                e.span,
                                format!(
                                    "cannot combine a ({}, {}) tensor with a ({}, {}) tensor",
                                    s.p(),
                                    s.q(),
                                    t.p(),
                                    t.q()
                                ),
                            ));
                        }
                        let r = if *op == BinOp::Add { s.add(&t) } else { s.sub(&t) };
                        Val::Tensor(r.map_err(at)?)
                    }
                    (BinOp::Add | BinOp::Sub, ..) => {
                        return Err(cmd_err(e.span, "cannot add a function to a tensor"));
                    }
                    (BinOp::Mul | BinOp::Otimes, Val::Scalar(f), Val::Scalar(g)) => Val::Scalar(&f * &g),
                    (BinOp::Mul | BinOp::Otimes, Val::Scalar(f), Val::Tensor(t))
                    | (BinOp::Mul | BinOp::Otimes, Val::Tensor(t), Val::Scalar(f)) => {
                        Val::Tensor(t.mul_function(&f).map_err(at)?)
                    }
                    (BinOp::Mul, Val::Tensor(_), Val::Tensor(_)) => {
                        return Err(cmd_err(e.span, "use `(x)` or `^` to multiply tensors"));
                    }
                    (BinOp::Otimes, Val::Tensor(s), Val::Tensor(t)) => Val::Tensor(s.tensor_product(&t).map_err(at)?),
                    (BinOp::Div, x, Val::Scalar(g)) => {
                        if g.is_zero() {
                            return Err(cmd_err(b.span, "division by zero"));
                        }
                        let inv = g.inv().map_err(&at)?;
                        match x {
                            Val::Scalar(f) => Val::Scalar(&f * &inv),
                            Val::Tensor(t) => Val::Tensor(t.mul_function(&inv).map_err(&at)?),
                        }
                    }
                    (BinOp::Div, _, Val::Tensor(_)) => {
                        return Err(cmd_err(b.span, "cannot divide by a tensor"));
                    }
                    (BinOp::Wedge, x, y) => {
                        let (s, t) = (self.tensor(x)?, self.tensor(y)?);
                        if s.p() != 0 || t.p() != 0 {
                            return Err(cmd_err(e.span, "`^` needs covariant forms on both sides"));
                        }
                        Val::Tensor(s.wedge(&t).map_err(at)?)
                    }
                }
            }
        })
    }

    fn tensor(&self, v: Val) -> Result<TensorField, CommandError> {
        match v {
            Val::Tensor(t) => Ok(t),
            Val::Scalar(f) => TensorField::scalar(self.coords, f).map_err(engine(Span::default())),
        }
    }

    fn eval_tensor(&self, e: &Expr) -> Result<TensorField, CommandError> {
        let v = self.eval(e)?;
        self.tensor(v)
    }

    fn eval_function(&self, e: &Expr) -> Result<RationalFunction, CommandError> {
        match self.eval(e)? {
            Val::Scalar(f) => Ok(f),
            Val::Tensor(_) => Err(cmd_err(e.span, "expected a function, found a tensor")),
        }
    }

    fn eval_polynomial(&self, e: &Expr) -> Result<Polynomial, CommandError> {
        self.eval_function(e)?
            .as_polynomial()
            .ok_or_else(|| cmd_err(e.span, "expected a polynomial"))
    }

    fn eval_hypersurface(&self, e: &Expr) -> Result<Polynomial, CommandError> {
        let p = self.eval_polynomial(e)?;
        if p.as_constant().is_some() {
            return Err(cmd_err(e.span, "hypersurface equation must be non-constant"));
        }
        Ok(p)
    }

    fn eval_connection(&self, c: &ConnectionLit) -> Result<ChristoffelConnection, CommandError> {
        let pos = |x: &Name| {
            self.coords.iter().position(|c| *c == x.text).ok_or_else(|| {
                cmd_err(
                    x.span,
                    format!("unknown coordinate `{x}`; coordinates here are ({})", self.coords.join(", ")),
                )
            })
        };
        let mut out = ChristoffelConnection::zero(self.coords);
        let mut seen = Vec::new();
        for entry in &c.entries {
            let idx = (pos(&entry.upper)?, pos(&entry.lower.0)?, pos(&entry.lower.1)?);
            if seen.contains(&idx) {
                return Err(cmd_err(entry.upper.span, "component given twice"));
            }
            seen.push(idx);
            let f = self.eval_function(&entry.value)?;
            out.set(idx, f).map_err(engine(entry.value.span))?;
        }
        Ok(out)
    }
}

struct GroupData {
    group: FiniteMatrixGroup,
    sigma: OnceCell<Result<Rc<OrbitMap>, Error>>,
}

impl GroupData {
    fn sigma(&self) -> Result<Rc<OrbitMap>, Error> {
        self.sigma
            .get_or_init(|| OrbitMap::of_group(&self.group).map(Rc::new))
            .clone()
    }
}

struct Runner<'a> {
    opts: &'a RunOptions,
    groups: BTreeMap<String, (&'a GroupDef, Option<&'a [Name]>, Span)>,
    built: BTreeMap<String, Result<Rc<GroupData>, CommandError>>,
    objects: BTreeMap<String, Expr>,
    connections: BTreeMap<String, &'a ConnectionLit>,
    maps: BTreeMap<String, &'a MapLit>,
}

/// Checks the session, then runs its commands in order. Command failures
/// become error records; later commands still run.
pub fn run(session: &Session, opts: &RunOptions) -> Result<Report, ResolveError> {
    check(session)?;
    let mut runner = Runner {
        opts,
        groups: BTreeMap::new(),
        built: BTreeMap::new(),
        objects: BTreeMap::new(),
        connections: BTreeMap::new(),
        maps: BTreeMap::new(),
    };
    let mut report = Report::default();
    for stmt in &session.statements {
        match &stmt.kind {
            StmtKind::Group { name, def, coords } => {
                runner
                    .groups
                    .insert(name.text.clone(), (def, coords.as_deref(), stmt.span));
            }
            StmtKind::Object { name, expr, .. } => {
                runner.objects.insert(name.text.clone(), expr.clone());
            }
            StmtKind::Connection { name, value } => {
                runner.connections.insert(name.text.clone(), value);
            }
            StmtKind::Map { name, value } => {
                runner.maps.insert(name.text.clone(), value);
            }
            StmtKind::Command(cmd) => {
                let outcome = runner.command(cmd);
                report.records.push(Record {
                    index: report.records.len() + 1,
                    command: cmd.kind.keyword(),
                    input: cmd.to_string(),
                    outcome,
                });
            }
        }
    }
    Ok(report)
}

fn order_json(o: Order) -> Value {
    match o {
        Order::Finite(k) => json!(k),
        Order::Infinite => json!("inf"),
    }
}

fn divisor_json(d: &Divisor) -> Value {
    Value::Array(
        d.terms()
            .iter()
            .map(|(h, c)| json!({ "hypersurface": h.to_string(), "order": order_json(*c) }))
            .collect(),
    )
}

fn residua_json(residua: &[ResiduumReport]) -> Value {
    Value::Array(
        residua
            .iter()
            .map(|r| {
                json!({
                    "stratum": r.stratum.stratum_coord,
                    "ramification": r.stratum.ramification,
                    "mu_S": order_json(r.mu_s),
                })
            })
            .collect(),
    )
}

fn min_residuum(residua: &[ResiduumReport]) -> Value {
    residua
        .iter()
        .map(|r| r.mu_s)
        .min()
        .map_or(Value::Null, order_json)
}

fn index_text(coords: &Vars, (a, b, c): (usize, usize, usize)) -> String {
    format!("[{}; {}, {}]", coords[a], coords[b], coords[c])
}

impl<'a> Runner<'a> {
    fn group(&mut self, name: &Name) -> Result<Rc<GroupData>, CommandError> {
        if let Some(g) = self.built.get(&name.text) {
            return g.clone().map_err(|e| cmd_err(name.span, e.message));
        }
        let (def, coords, span) = self.groups[&name.text];
        let built = self.build_group(def, coords, span).map(|group| {
            Rc::new(GroupData {
                group,
                sigma: OnceCell::new(),
            })
        });
        self.built.insert(name.text.clone(), built.clone());
        built.map_err(|e| cmd_err(name.span, format!("group `{name}`: {}", e.message)))
    }

    fn build_group(
        &self,
        def: &GroupDef,
        coords: Option<&[Name]>,
        span: Span,
    ) -> Result<FiniteMatrixGroup, CommandError> {
        let at = engine(span);
        let gens = match def {
            GroupDef::Generators(ms) => {
                let empty = Vars::from(Vec::<String>::new());
                let ctx = Ctx {
                    coords: &empty,
                    objects: &self.objects,
                };
                let mut gens = Vec::new();
                for m in ms {
                    let mut rows = Vec::new();
                    for row in &m.rows {
                        let mut r = Vec::new();
                        for e in row {
                            let f = ctx.eval_polynomial(e)?;
                            r.push(f.as_constant().expect("constant entries"));
                        }
                        rows.push(r);
                    }
                    gens.push(GroupElement::from_rows(rows).map_err(engine(m.span))?);
                }
                gens
            }
            GroupDef::Builtin { name, args } => {
                let a: Vec<u32> = args.iter().map(|a| a.0).collect();
                let g = match name.text.as_str() {
                    "cyclic" => cyclic(a[0]),
                    "symmetric" => symmetric(a[0] as usize),
                    "scalar" => scalar(a[0] as usize, a[1]),
                    _ => diagonal_cyclic(&a),
                }
                .map_err(engine(name.span))?;
                g.generators().to_vec()
            }
        };
        let group = close_with(gens, self.opts.closure).map_err(&at)?;
        match coords {
            Some(c) => {
                let names: Vec<&str> = c.iter().map(|n| n.text.as_str()).collect();
                group.with_coords(orbilift::algebra::vars(&names)).map_err(at)
            }
            None => Ok(group),
        }
    }

    fn connection(&self, r: &'a ConnectionRef) -> &'a ConnectionLit {
        match r {
            ConnectionRef::Named(n) => self.connections[&n.text],
            ConnectionRef::Literal(l) => l,
        }
    }

    fn map(&self, r: &'a MapRef) -> &'a MapLit {
        match r {
            MapRef::Named(n) => self.maps[&n.text],
            MapRef::Literal(l) => l,
        }
    }

    fn ctx<'b>(&'b self, coords: &'b Vars) -> Ctx<'b> {
        Ctx {
            coords,
            objects: &self.objects,
        }
    }

    fn command(&mut self, cmd: &'a Command) -> Result<Value, CommandError> {
        let at = engine(cmd.span);
        match &cmd.kind {
            CommandKind::Analyze { group } => {
                let data = self.group(group)?;
                let g = &data.group;
                let hyps = g.hyperplanes().map_err(&at)?;
                Ok(json!({
                    "group": group.text,
                    "order": g.order(),
                    "dimension": g.dimension(),
                    "conductor": g.conductor(),
                    "coordinates": g.coords().to_vec(),
                    "reflections": g.reflections().len(),
                    "hyperplanes": hyps
                        .iter()
                        .map(|h| json!({ "form": h.linear_form.to_string(), "e_H": h.label }))
                        .collect::<Vec<_>>(),
                    "is_reflection_group": g.is_reflection_group(),
                    "is_diagonal": g.is_diagonal(),
                }))
            }
            CommandKind::Invariants { group } => {
                let data = self.group(group)?;
                let g = &data.group;
                let sigma = data.sigma().map_err(&at)?;
                let basis = sigma.basis();
                let product: u64 = basis.degrees().iter().map(|&d| d as u64).product();
                let mut out = json!({
                    "group": group.text,
                    "order": g.order(),
                    "degrees": basis.degrees(),
                    "degree_product": product,
                    "generators": basis.generators().iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "orbit_coordinates": sigma.target_vars().to_vec(),
                    "jacobian_det": Value::Null,
                    "jacobian_divisor": Value::Null,
                    "matches_reflection_divisor": Value::Null,
                });
                if sigma.is_square() {
                    let det = sigma.jacobian_det().map_err(&at)?;
                    let hyps = g.hyperplanes().map_err(&at)?;
                    let mut div = Divisor::new();
                    let mut rest = det.clone();
                    let mut matches = true;
                    for h in &hyps {
                        let k = det.multiplicity(&h.linear_form).map_err(&at)?;
                        div.push(h.linear_form.clone(), k).map_err(&at)?;
                        matches &= k == Order::Finite(h.label as i64 - 1);
                        if let Order::Finite(k) = k {
                            let f = h.linear_form.pow(k as u32);
                            rest = rest.exact_divide(&f).map_err(&at)?.expect("divides by multiplicity");
                        }
                    }
                    matches &= rest.as_constant().is_some_and(|c| !c.is_zero());
                    out["jacobian_det"] = json!(det.to_string());
                    out["jacobian_divisor"] = divisor_json(&div);
                    out["matches_reflection_divisor"] = json!(matches);
                }
                Ok(out)
            }
            CommandKind::Divisor { expr, side, group, along } => {
                let data = self.group(group)?;
                match side {
                    Side::Source => {
                        let g = &data.group;
                        let ctx = self.ctx(g.coords());
                        let t = ctx.eval_tensor(expr)?;
                        let mut hs: Vec<Polynomial> = g
                            .hyperplanes()
                            .map_err(&at)?
                            .into_iter()
                            .map(|h| h.linear_form)
                            .collect();
                        for e in along {
                            hs.push(ctx.eval_hypersurface(e)?);
                        }
                        let d = tensor_divisor(&t, &hs).map_err(&at)?;
                        Ok(json!({
                            "tensor": t.to_string(),
                            "divisor": divisor_json(&d),
                            "effective": d.is_effective(),
                        }))
                    }
                    Side::Orbit => {
                        let sigma = data.sigma().map_err(&at)?;
                        let ctx = self.ctx(sigma.target_vars());
                        let t = ctx.eval_tensor(expr)?;
                        let strata = AdaptedChart::from_orbit_map(&sigma)
                            .map(|c| c.strata().to_vec())
                            .unwrap_or_default();
                        let mut hs: Vec<Polynomial> = strata.iter().map(|s| s.label_equation.clone()).collect();
                        for e in along {
                            hs.push(ctx.eval_hypersurface(e)?);
                        }
                        let d = tensor_divisor(&t, &hs).map_err(&at)?;
                        let residua = strata
                            .iter()
                            .map(|s| residuum(&t, s))
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(&at)?;
                        let off_ok = d.terms().iter().filter(|(h, _)| {
                            !strata.iter().any(|s| s.label_equation == *h)
                        });
                        let div_d_effective = residua.iter().all(|r| r.mu_s.is_nonnegative())
                            && off_ok.into_iter().all(|(_, c)| c.is_nonnegative());
                        Ok(json!({
                            "tensor": t.to_string(),
                            "divisor": divisor_json(&d),
                            "effective": d.is_effective(),
                            "residua": residua_json(&residua),
                            "div_D_effective": div_d_effective,
                        }))
                    }
                }
            }
            CommandKind::Lift { expr, group, off } => {
                let data = self.group(group)?;
                let g = &data.group;
                let sigma = data.sigma().map_err(&at)?;
                let ctx = self.ctx(sigma.target_vars());
                let t = ctx.eval_tensor(expr)?;
                let off = off
                    .iter()
                    .map(|e| ctx.eval_hypersurface(e))
                    .collect::<Result<Vec<_>, _>>()?;
                let (route, cert) = match AdaptedChart::from_orbit_map(&sigma) {
                    Ok(chart) if g.is_diagonal() => {
                        let mut cert = decide_lift_adapted(&t, &chart, &off).map_err(&at)?;
                        if let Some(l) = cert.lifted.take() {
                            cert.lifted = Some(l.permute_coords(g.coords()).map_err(&at)?);
                        }
                        ("adapted", cert)
                    }
                    _ => ("pullback", lift_via_pullback(&t, &sigma, g).map_err(&at)?),
                };
                Ok(lift_json(&t, route, &cert))
            }
            CommandKind::LiftConnection { connection, group } => {
                let data = self.group(group)?;
                let sigma = data.sigma().map_err(&at)?;
                let chart = AdaptedChart::from_orbit_map(&sigma).map_err(&at)?;
                let y = sigma.target_vars();
                let last = y.len() - 1;
                let r = match chart.strata() {
                    [s] if s.stratum_coord == y[last] => s.ramification,
                    _ => {
                        return Err(cmd_err(
                            group.span,
                            "lift-connection needs exactly one reflection stratum, in the last orbit coordinate",
                        ))
                    }
                };
                let pattern = AdaptedConnectionPattern::new(r, y.clone(), chart.slice_coords().clone())
                    .map_err(&at)?;
                let gamma = self.ctx(y).eval_connection(self.connection(connection))?;
                let checked = check_liftable_connection(&gamma, &pattern).map_err(&at)?;
                let violations: Vec<Value> = checked
                    .violations()
                    .map(|d| json!({ "index": index_text(y, d.index), "requirement": d.shape.to_string() }))
                    .collect();
                let lifted = if checked.liftable {
                    let big = lift_connection_slice(&gamma, &pattern).map_err(&at)?;
                    json!(big.to_string())
                } else {
                    Value::Null
                };
                Ok(json!({
                    "connection": gamma.to_string(),
                    "ramification": r,
                    "liftable": checked.liftable,
                    "violations": violations,
                    "lifted": lifted,
                }))
            }
            CommandKind::Solomon { expr, group } => {
                let data = self.group(group)?;
                let sigma = data.sigma().map_err(&at)?;
                let omega = self.ctx(data.group.coords()).eval_tensor(expr)?;
                let phi = solomon_express(&omega, &sigma, &data.group).map_err(&at)?;
                Ok(json!({
                    "form": omega.to_string(),
                    "phi": phi.to_string(),
                    "orbit_map": sigma.components().iter().map(ToString::to_string).collect::<Vec<_>>(),
                }))
            }
            CommandKind::ValidateThm37 { rmax, pqmax, mrange } => {
                validate_thm37(rmax.unwrap_or(6), pqmax.unwrap_or(2), mrange.unwrap_or((-3, 3)))
                    .map_err(at)
            }
            CommandKind::CheckDiffeo { map, inverse, from, to } => {
                let src = self.group(from)?;
                let dst = self.group(to)?;
                let (s_sigma, d_sigma) = (src.sigma().map_err(&at)?, dst.sigma().map_err(&at)?);
                let charts = (
                    AdaptedChart::from_orbit_map(&s_sigma).map_err(engine(from.span))?,
                    AdaptedChart::from_orbit_map(&d_sigma).map_err(engine(to.span))?,
                );
                let (sy, dy) = (s_sigma.target_vars(), d_sigma.target_vars());
                let build = |lit: &MapLit, source: &Vars, target: &Vars| -> Result<PolyMap, CommandError> {
                    let ctx = self.ctx(source);
                    let comps = lit
                        .components
                        .iter()
                        .map(|e| ctx.eval_polynomial(e))
                        .collect::<Result<Vec<_>, _>>()?;
                    if comps.len() != target.len() {
                        return Err(cmd_err(
                            lit.span,
                            format!("map has {} components but the target has dimension {}", comps.len(), target.len()),
                        ));
                    }
                    PolyMap::new(source.clone(), target.clone(), comps).map_err(engine(lit.span))
                };
                let f = build(self.map(map), sy, dy)?;
                let f_inv = build(self.map(inverse), dy, sy)?;
                let passes = check_diffeo_conditions(&f, &f_inv, charts.0.strata(), charts.1.strata()).map_err(&at)?;
                Ok(json!({
                    "map": f.to_string(),
                    "source_strata": charts.0.strata().iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "target_strata": charts.1.strata().iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "passes": passes,
                }))
            }
        }
    }
}

fn lift_json(t: &TensorField, route: &str, cert: &LiftCertificate) -> Value {
    let failure = match &cert.failure {
        None => Value::Null,
        Some(LiftFailure::Stratum { stratum, mu_s }) => json!({
            "kind": "stratum",
            "stratum": stratum.stratum_coord,
            "mu_S": mu_s,
        }),
        Some(LiftFailure::OffStrata { hypersurface, order }) => json!({
            "kind": "off-strata",
            "hypersurface": hypersurface.to_string(),
            "order": order,
        }),
        Some(LiftFailure::Pole { index }) => json!({
            "kind": "pole",
            "index": index,
        }),
    };
    json!({
        "tensor": t.to_string(),
        "route": route,
        "verdict": cert.verdict.to_string(),
        "lifted": cert.lifted.as_ref().map(ToString::to_string),
        "mu_S": min_residuum(&cert.residua),
        "residua": residua_json(&cert.residua),
        "failure": failure,
    })
}

/// Sweeps both lifting routes and the closed-form inequality over
/// `r ∈ 2..=rmax`, `p, q ≤ pqmax`, `m ∈ mrange`.
pub fn validate_thm37(rmax: u32, pqmax: u32, (m0, m1): (i64, i64)) -> Result<Value, Error> {
    let series = default_series();
    let sweep = thm37_sweep(2..=rmax, pqmax as usize, m0..=m1, &series)?;
    let (checked, exceptions) = inequality_sweep(2..=rmax, pqmax as usize, m0..=m1);
    let disagreements: Vec<Value> = sweep
        .disagreements
        .iter()
        .map(|c| {
            json!({
                "r": c.r, "p": c.p, "q": c.q, "m": c.m, "series": c.series,
                "adapted": c.adapted.to_string(), "pullback": c.pullback.to_string(),
            })
        })
        .collect();
    Ok(json!({
        "rmax": rmax,
        "pqmax": pqmax,
        "mrange": [m0, m1],
        "series": series.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "cases": sweep.cases,
        "agreements": sweep.agreements,
        "lifts": sweep.lifts,
        "disagreements": disagreements,
        "inequality_cases": checked,
        "inequality_exceptions": exceptions.len(),
        "passed": sweep.disagreements.is_empty() && exceptions.is_empty(),
    }))
}
