//! Syntax tree of a session file. `Display` prints the canonical source
//! form, which parses back to an equal tree.

use std::fmt;

use num_bigint::BigUint;

use crate::lexer::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Session {
    pub statements: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectKind {
    Tensor,
    Form,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Group {
        name: Name,
        def: GroupDef,
        coords: Option<Vec<Name>>,
    },
    Object {
        kind: ObjectKind,
        name: Name,
        expr: Expr,
    },
    Connection {
        name: Name,
        value: ConnectionLit,
    },
    Map {
        name: Name,
        value: MapLit,
    },
    Command(Command),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDef {
    Generators(Vec<MatrixLit>),
    /// `cyclic(r)`, `symmetric(n)`, `diagonal(r1, …)` or `scalar(n, r)`.
    Builtin { name: Name, args: Vec<(u32, Span)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixLit {
    pub rows: Vec<Vec<Expr>>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionEntry {
    pub upper: Name,
    pub lower: (Name, Name),
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionLit {
    pub entries: Vec<ConnectionEntry>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapLit {
    pub components: Vec<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectionRef {
    Named(Name),
    Literal(ConnectionLit),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapRef {
    Named(Name),
    Literal(MapLit),
}

/// Which side of the orbit map a divisor is computed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Orbit chart, `over G`.
    Orbit,
    /// The representation space, `on G`.
    Source,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub kind: CommandKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Analyze {
        group: Name,
    },
    Invariants {
        group: Name,
    },
    Divisor {
        expr: Expr,
        side: Side,
        group: Name,
        along: Vec<Expr>,
    },
    Lift {
        expr: Expr,
        group: Name,
        off: Vec<Expr>,
    },
    LiftConnection {
        connection: ConnectionRef,
        group: Name,
    },
    Solomon {
        expr: Expr,
        group: Name,
    },
    ValidateThm37 {
        rmax: Option<u32>,
        pqmax: Option<u32>,
        mrange: Option<(i64, i64)>,
    },
    CheckDiffeo {
        map: MapRef,
        inverse: MapRef,
        from: Name,
        to: Name,
    },
}

impl CommandKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            CommandKind::Analyze { .. } => "analyze",
            CommandKind::Invariants { .. } => "invariants",
            CommandKind::Divisor { .. } => "divisor",
            CommandKind::Lift { .. } => "lift",
            CommandKind::LiftConnection { .. } => "lift-connection",
            CommandKind::Solomon { .. } => "solomon",
            CommandKind::ValidateThm37 { .. } => "validate",
            CommandKind::CheckDiffeo { .. } => "check-diffeo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    /// `d(x)`
    Covariant,
    /// `ddy(x)`
    Contravariant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    /// `(x)`
    Otimes,
    /// `^` between forms
    Wedge,
}

impl BinOp {
    fn text(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Otimes => " (x) ",
            BinOp::Wedge => " ^ ",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigUint),
    Var(String),
    Zeta(u32),
    Slot(SlotKind, Name),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Neg(_) => PREC_NEG,
            ExprKind::Pow(..) => PREC_POW,
            _ => PREC_ATOM,
        }
    }

    fn starts_with_int(&self) -> bool {
        match &self.kind {
            ExprKind::Int(_) => true,
            ExprKind::Pow(base, _) => base.precedence() >= PREC_ATOM && base.starts_with_int(),
            _ => false,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(0, f)?;
            return write!(f, ")");
        }
        match &self.kind {
            ExprKind::Int(n) => write!(f, "{n}"),
            ExprKind::Var(v) => f.write_str(v),
            ExprKind::Zeta(n) => write!(f, "zeta({n})"),
            ExprKind::Slot(SlotKind::Covariant, x) => write!(f, "d({x})"),
            ExprKind::Slot(SlotKind::Contravariant, x) => write!(f, "ddy({x})"),
            ExprKind::Neg(e) => {
                write!(f, "-")?;
                e.fmt_at(PREC_NEG, f)
            }
            ExprKind::Pow(base, e) => {
                base.fmt_at(PREC_ATOM, f)?;
                write!(f, "^{e}")
            }
            ExprKind::Binary(op, a, b) => {
                let p = op.precedence();
                a.fmt_at(p, f)?;
                f.write_str(op.text())?;
                // `^` followed by an integer reads as a power
                if *op == BinOp::Wedge && b.starts_with_int() {
                    write!(f, "(")?;
                    b.fmt_at(0, f)?;
                    return write!(f, ")");
                }
                b.fmt_at(p + 1, f)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}

/// `(a, b, …)`, padded as `( x )` so a lone `x` is not read as `(x)`.
fn paren_list<T: fmt::Display>(items: &[T], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let body: Vec<String> = items.iter().map(ToString::to_string).collect();
    let body = body.join(", ");
    if body == "x" {
        write!(f, "( x )")
    } else {
        write!(f, "({body})")
    }
}

fn comma_list<T: fmt::Display>(items: &[T], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (k, x) in items.iter().enumerate() {
        if k > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for MatrixLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, row) in self.rows.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            comma_list(row, f)?;
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for GroupDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDef::Generators(ms) => comma_list(ms, f),
            GroupDef::Builtin { name, args } => {
                let args: Vec<u32> = args.iter().map(|a| a.0).collect();
                write!(f, "{name}(")?;
                comma_list(&args, f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for ConnectionLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{{ ")?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[{}; {}, {}] = {}", e.upper, e.lower.0, e.lower.1, e.value)?;
        }
        write!(f, " }}")
    }
}

impl fmt::Display for MapLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        paren_list(&self.components, f)
    }
}

impl fmt::Display for ConnectionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionRef::Named(n) => write!(f, "{n}"),
            ConnectionRef::Literal(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for MapRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapRef::Named(n) => write!(f, "{n}"),
            MapRef::Literal(m) => write!(f, "{m}"),
        }
    }
}

fn clause(word: &str, items: &[Expr], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if items.is_empty() {
        return Ok(());
    }
    write!(f, " {word} ")?;
    paren_list(items, f)
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandKind::Analyze { group } => write!(f, "analyze {group}"),
            CommandKind::Invariants { group } => write!(f, "invariants {group}"),
            CommandKind::Divisor { expr, side, group, along } => {
                let word = match side {
                    Side::Orbit => "over",
                    Side::Source => "on",
                };
                write!(f, "divisor {expr} {word} {group}")?;
                clause("along", along, f)
            }
            CommandKind::Lift { expr, group, off } => {
                write!(f, "lift {expr} over {group}")?;
                clause("off", off, f)
            }
            CommandKind::LiftConnection { connection, group } => {
                write!(f, "lift-connection {connection} over {group}")
            }
            CommandKind::Solomon { expr, group } => write!(f, "solomon {expr} over {group}"),
            CommandKind::ValidateThm37 { rmax, pqmax, mrange } => {
                write!(f, "validate thm37")?;
                if let Some(r) = rmax {
                    write!(f, " rmax {r}")?;
                }
                if let Some(p) = pqmax {
                    write!(f, " pqmax {p}")?;
                }
                if let Some((a, b)) = mrange {
                    write!(f, " mrange {a}..{b}")?;
                }
                Ok(())
            }
            CommandKind::CheckDiffeo { map, inverse, from, to } => {
                write!(f, "check-diffeo {map} inverse {inverse} from {from} to {to}")
            }
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StmtKind::Group { name, def, coords } => {
                write!(f, "group {name} = {def}")?;
                if let Some(c) = coords {
                    write!(f, " on ")?;
                    paren_list(c, f)?;
                }
                Ok(())
            }
            StmtKind::Object { kind, name, expr } => {
                let word = match kind {
                    ObjectKind::Tensor => "tensor",
                    ObjectKind::Form => "form",
                };
                write!(f, "{word} {name} = {expr}")
            }
            StmtKind::Connection { name, value } => write!(f, "connection {name} = {value}"),
            StmtKind::Map { name, value } => write!(f, "map {name} = {value}"),
            StmtKind::Command(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
