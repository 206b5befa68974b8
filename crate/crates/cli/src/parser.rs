//! Recursive-descent parser for session files.
//!
//! ```text
//! session    := stmt*
//! stmt       := group | object | connection | map | command [';']
//! group      := 'group' IDENT '=' (matrix (',' matrix)* | IDENT '(' INT (',' INT)* ')')
//!               ['on' '(' IDENT (',' IDENT)* ')']
//! object     := ('tensor' | 'form') IDENT '=' expr
//! connection := 'connection' IDENT '=' conn
//! conn       := '{' [entry (',' entry)*] '}'
//! entry      := '[' IDENT ';' IDENT ',' IDENT ']' '=' expr
//! map        := 'map' IDENT '=' tuple
//! tuple      := '(' expr (',' expr)* ')'
//! command    := 'analyze' IDENT | 'invariants' IDENT
//!             | 'divisor' expr ('over' | 'on') IDENT ['along' tuple]
//!             | 'lift' expr 'over' IDENT ['off' tuple]
//!             | 'lift-connection' (IDENT | conn) 'over' IDENT
//!             | 'solomon' expr 'over' IDENT
//!             | 'validate' 'thm37' ['rmax' INT] ['pqmax' INT] ['mrange' SINT '..' SINT]
//!             | 'check-diffeo' (IDENT | tuple) 'inverse' (IDENT | tuple) 'from' IDENT 'to' IDENT
//! expr       := product (('+' | '-') product)*
//! product    := unary (('*' | '/' | '(x)' | '^') unary)*
//! unary      := '-' unary | power
//! power      := atom ('^' INT)*
//! atom       := INT | IDENT | 'zeta' '(' INT ')' | ('d' | 'ddy') '(' IDENT ')' | '(' expr ')'
//! ```
//!
//! `^` followed by an integer literal is a power; otherwise it is a wedge.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;

use crate::ast::*;
use crate::lexer::{tokenize, Keyword, Span, Tok};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    /// Token classes that would have been accepted at `span`.
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.span.line, self.span.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, "; expected {}", self.expected.join(", "))?;
        }
        Ok(())
    }
}

type PResult<T> = Result<T, ParseError>;

pub fn parse(src: &str) -> PResult<Session> {
    let tokens = tokenize(src).map_err(|e| ParseError {
        span: e.span,
        message: format!("unexpected character {:?}", e.ch),
        expected: Vec::new(),
    })?;
    let mut p = Parser {
        tokens,
        pos: 0,
        expected: BTreeSet::new(),
    };
    let mut statements = Vec::new();
    while !p.at(&Tok::Eof) {
        statements.push(p.statement()?);
        p.eat(&Tok::Semi);
    }
    Ok(Session { statements })
}

/// Parses a single expression, e.g. a polynomial typed on the command line.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let tokens = tokenize(src).map_err(|e| ParseError {
        span: e.span,
        message: format!("unexpected character {:?}", e.ch),
        expected: Vec::new(),
    })?;
    let mut p = Parser {
        tokens,
        pos: 0,
        expected: BTreeSet::new(),
    };
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

struct Parser {
    tokens: Vec<(Tok, Span)>,
    pos: usize,
    expected: BTreeSet<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.tokens[self.pos].clone();
        if t.0 != Tok::Eof {
            self.pos += 1;
        }
        self.expected.clear();
        t
    }

    fn at(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            true
        } else {
            self.expected.insert(t.to_string());
            false
        }
    }

    fn at_kw(&mut self, k: Keyword) -> bool {
        self.at(&Tok::Kw(k))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        let hit = self.at(t);
        if hit {
            self.bump();
        }
        hit
    }

    fn error(&mut self) -> ParseError {
        let found = self.peek().to_string();
        ParseError {
            span: self.span(),
            message: format!("unexpected {found}"),
            expected: std::mem::take(&mut self.expected).into_iter().collect(),
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<Span> {
        if self.at(t) {
            Ok(self.bump().1)
        } else {
            Err(self.error())
        }
    }

    fn expect_kw(&mut self, k: Keyword) -> PResult<Span> {
        self.expect(&Tok::Kw(k))
    }

    fn ident(&mut self) -> PResult<Name> {
        if let Tok::Ident(s) = self.peek() {
            let text = s.clone();
            let span = self.bump().1;
            return Ok(Name { text, span });
        }
        self.expected.insert("identifier".into());
        Err(self.error())
    }

    fn int(&mut self) -> PResult<(BigUint, Span)> {
        if let Tok::Int(s) = self.peek() {
            let n: BigUint = s.parse().expect("lexer yields digits");
            let span = self.bump().1;
            return Ok((n, span));
        }
        self.expected.insert("integer".into());
        Err(self.error())
    }

    fn small_int(&mut self) -> PResult<(u32, Span)> {
        let (n, span) = self.int()?;
        let v = u32::try_from(&n).map_err(|_| ParseError {
            span,
            message: format!("integer {n} is too large here"),
            expected: Vec::new(),
        })?;
        Ok((v, span))
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        let (n, span) = self.small_int()?;
        let _ = span;
        Ok(if neg { -(n as i64) } else { n as i64 })
    }

    /// Contextual word such as `thm37` or `rmax`.
    fn word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == w) {
            self.bump();
            true
        } else {
            self.expected.insert(format!("`{w}`"));
            false
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let kind = if self.at_kw(Keyword::Group) {
            self.bump();
            self.group_stmt()?
        } else if self.at_kw(Keyword::Tensor) || self.at_kw(Keyword::Form) {
            let kind = match self.bump().0 {
                Tok::Kw(Keyword::Tensor) => ObjectKind::Tensor,
                _ => ObjectKind::Form,
            };
            let name = self.ident()?;
            self.expect(&Tok::Equals)?;
            let expr = self.expr()?;
            StmtKind::Object { kind, name, expr }
        } else if self.at_kw(Keyword::Connection) {
            self.bump();
            let name = self.ident()?;
            self.expect(&Tok::Equals)?;
            let value = self.connection_lit()?;
            StmtKind::Connection { name, value }
        } else if self.at_kw(Keyword::Map) {
            self.bump();
            let name = self.ident()?;
            self.expect(&Tok::Equals)?;
            let value = self.map_lit()?;
            StmtKind::Map { name, value }
        } else {
            StmtKind::Command(self.command()?)
        };
        Ok(Stmt {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn group_stmt(&mut self) -> PResult<StmtKind> {
        let name = self.ident()?;
        self.expect(&Tok::Equals)?;
        let def = if self.at(&Tok::LBracket) {
            let mut ms = vec![self.matrix()?];
            while self.eat(&Tok::Comma) {
                ms.push(self.matrix()?);
            }
            GroupDef::Generators(ms)
        } else {
            let builtin = self.ident()?;
            self.expect(&Tok::LParen)?;
            let mut args = vec![self.small_int()?];
            while self.eat(&Tok::Comma) {
                args.push(self.small_int()?);
            }
            self.expect(&Tok::RParen)?;
            GroupDef::Builtin { name: builtin, args }
        };
        let coords = if self.at_kw(Keyword::On) {
            self.bump();
            self.expect(&Tok::LParen)?;
            let mut c = vec![self.ident()?];
            while self.eat(&Tok::Comma) {
                c.push(self.ident()?);
            }
            self.expect(&Tok::RParen)?;
            Some(c)
        } else {
            None
        };
        Ok(StmtKind::Group { name, def, coords })
    }

    fn matrix(&mut self) -> PResult<MatrixLit> {
        let start = self.expect(&Tok::LBracket)?;
        let mut rows = Vec::new();
        loop {
            self.expect(&Tok::LBracket)?;
            let mut row = vec![self.expr()?];
            while self.eat(&Tok::Comma) {
                row.push(self.expr()?);
            }
            self.expect(&Tok::RBracket)?;
            rows.push(row);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        let end = self.expect(&Tok::RBracket)?;
        Ok(MatrixLit {
            rows,
            span: start.to(end),
        })
    }

    fn connection_lit(&mut self) -> PResult<ConnectionLit> {
        let start = self.expect(&Tok::LBrace)?;
        let mut entries = Vec::new();
        if !self.at(&Tok::RBrace) {
            loop {
                self.expect(&Tok::LBracket)?;
                let upper = self.ident()?;
                self.expect(&Tok::Semi)?;
                let b = self.ident()?;
                self.expect(&Tok::Comma)?;
                let c = self.ident()?;
                self.expect(&Tok::RBracket)?;
                self.expect(&Tok::Equals)?;
                let value = self.expr()?;
                entries.push(ConnectionEntry {
                    upper,
                    lower: (b, c),
                    value,
                });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let end = self.expect(&Tok::RBrace)?;
        Ok(ConnectionLit {
            entries,
            span: start.to(end),
        })
    }

    fn tuple(&mut self) -> PResult<(Vec<Expr>, Span)> {
        let start = self.expect(&Tok::LParen)?;
        let mut items = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            items.push(self.expr()?);
        }
        let end = self.expect(&Tok::RParen)?;
        Ok((items, start.to(end)))
    }

    fn map_lit(&mut self) -> PResult<MapLit> {
        let (components, span) = self.tuple()?;
        Ok(MapLit { components, span })
    }

    fn map_ref(&mut self) -> PResult<MapRef> {
        if self.at(&Tok::LParen) {
            return Ok(MapRef::Literal(self.map_lit()?));
        }
        Ok(MapRef::Named(self.ident()?))
    }

    fn over(&mut self) -> PResult<Name> {
        self.expect_kw(Keyword::Over)?;
        self.ident()
    }

    fn optional_tuple(&mut self, k: Keyword) -> PResult<Vec<Expr>> {
        if self.at_kw(k) {
            self.bump();
            return Ok(self.tuple()?.0);
        }
        Ok(Vec::new())
    }

    fn command(&mut self) -> PResult<Command> {
        let start = self.span();
        let (tok, _) = match self.peek() {
            Tok::Kw(
                Keyword::Analyze
                | Keyword::Invariants
                | Keyword::Divisor
                | Keyword::Lift
                | Keyword::LiftConnection
                | Keyword::Solomon
                | Keyword::Validate
                | Keyword::CheckDiffeo,
            ) => self.bump(),
            _ => {
                for k in [
                    Keyword::Group,
                    Keyword::Tensor,
                    Keyword::Form,
                    Keyword::Connection,
                    Keyword::Map,
                    Keyword::Analyze,
                    Keyword::Invariants,
                    Keyword::Divisor,
                    Keyword::Lift,
                    Keyword::LiftConnection,
                    Keyword::Solomon,
                    Keyword::Validate,
                    Keyword::CheckDiffeo,
                ] {
                    self.expected.insert(Tok::Kw(k).to_string());
                }
                return Err(self.error());
            }
        };
        let kind = match tok {
            Tok::Kw(Keyword::Analyze) => CommandKind::Analyze { group: self.ident()? },
            Tok::Kw(Keyword::Invariants) => CommandKind::Invariants { group: self.ident()? },
            Tok::Kw(Keyword::Divisor) => {
                let expr = self.expr()?;
                let side = if self.at_kw(Keyword::Over) {
                    Side::Orbit
                } else if self.at_kw(Keyword::On) {
                    Side::Source
                } else {
                    return Err(self.error());
                };
                self.bump();
                let group = self.ident()?;
                let along = self.optional_tuple(Keyword::Along)?;
                CommandKind::Divisor { expr, side, group, along }
            }
            Tok::Kw(Keyword::Lift) => {
                let expr = self.expr()?;
                let group = self.over()?;
                let off = self.optional_tuple(Keyword::Off)?;
                CommandKind::Lift { expr, group, off }
            }
            Tok::Kw(Keyword::LiftConnection) => {
                let connection = if self.at(&Tok::LBrace) {
                    ConnectionRef::Literal(self.connection_lit()?)
                } else {
                    ConnectionRef::Named(self.ident()?)
                };
                let group = self.over()?;
                CommandKind::LiftConnection { connection, group }
            }
            Tok::Kw(Keyword::Solomon) => {
                let expr = self.expr()?;
                let group = self.over()?;
                CommandKind::Solomon { expr, group }
            }
            Tok::Kw(Keyword::Validate) => {
                if !self.word("thm37") {
                    return Err(self.error());
                }
                let rmax = if self.word("rmax") { Some(self.small_int()?.0) } else { None };
                let pqmax = if self.word("pqmax") { Some(self.small_int()?.0) } else { None };
                let mrange = if self.word("mrange") {
                    let a = self.signed_int()?;
                    self.expect(&Tok::DotDot)?;
                    let b = self.signed_int()?;
                    Some((a, b))
                } else {
                    None
                };
                CommandKind::ValidateThm37 { rmax, pqmax, mrange }
            }
            Tok::Kw(Keyword::CheckDiffeo) => {
                let map = self.map_ref()?;
                self.expect_kw(Keyword::Inverse)?;
                let inverse = self.map_ref()?;
                self.expect_kw(Keyword::From)?;
                let from = self.ident()?;
                self.expect_kw(Keyword::To)?;
                let to = self.ident()?;
                CommandKind::CheckDiffeo { map, inverse, from, to }
            }
            _ => unreachable!(),
        };
        Ok(Command {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.at(&Tok::Plus) {
                BinOp::Add
            } else if self.at(&Tok::Minus) {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.product()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.at(&Tok::Star) {
                BinOp::Mul
            } else if self.at(&Tok::Slash) {
                BinOp::Div
            } else if self.at(&Tok::Otimes) {
                BinOp::Otimes
            } else if self.at(&Tok::Caret) {
                BinOp::Wedge
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at(&Tok::Minus) {
            let start = self.bump().1;
            let inner = self.unary()?;
            let span = start.to(inner.span);
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let mut base = self.atom()?;
        while self.peek() == &Tok::Caret && matches!(self.peek2(), Tok::Int(_)) {
            self.bump();
            let (e, span) = self.small_int()?;
            let span = base.span.to(span);
            base = Expr {
                kind: ExprKind::Pow(Box::new(base), e),
                span,
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(_) => ExprKind::Int(self.int()?.0),
            Tok::Ident(s) => {
                self.bump();
                ExprKind::Var(s)
            }
            Tok::Kw(Keyword::Zeta) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let (n, span) = self.small_int()?;
                if n == 0 {
                    return Err(ParseError {
                        span,
                        message: "zeta(N) needs N >= 1".into(),
                        expected: Vec::new(),
                    });
                }
                self.expect(&Tok::RParen)?;
                ExprKind::Zeta(n)
            }
            Tok::Kw(k @ (Keyword::D | Keyword::Ddy)) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let x = self.ident()?;
                self.expect(&Tok::RParen)?;
                let slot = if k == Keyword::D {
                    SlotKind::Covariant
                } else {
                    SlotKind::Contravariant
                };
                ExprKind::Slot(slot, x)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                let end = self.expect(&Tok::RParen)?;
                return Ok(Expr {
                    kind: inner.kind,
                    span: start.to(end),
                });
            }
            _ => {
                for t in ["integer", "identifier", "`zeta`", "`d`", "`ddy`", "`(`", "`-`"] {
                    self.expected.insert(t.into());
                }
                return Err(self.error());
            }
        };
        Ok(Expr {
            kind,
            span: start.to(self.prev_span()),
        })
    }
}

fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
    let span = a.span.to(b.span);
    Expr {
        kind: ExprKind::Binary(op, Box::new(a), Box::new(b)),
        span,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(src: &str) -> Session {
        let s = parse(src).unwrap();
        let printed = s.to_string();
        let again = parse(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_eq!(s, again, "{printed}");
        assert_eq!(printed, again.to_string());
        s
    }

    #[test]
    fn spec_statements() {
        let s = roundtrip(
            "group G = [[zeta(3), 0], [0, 1]]\n\
             tensor T = y1 * d(y1) (x) ddy(y2)\n\
             lift T over G\n",
        );
        assert_eq!(s.statements.len(), 3);
        match &s.statements[0].kind {
            StmtKind::Group { def: GroupDef::Generators(ms), .. } => {
                assert_eq!(ms[0].rows.len(), 2);
                assert_eq!(ms[0].rows[0][0].kind, ExprKind::Zeta(3));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            &s.statements[2].kind,
            StmtKind::Command(Command { kind: CommandKind::Lift { .. }, .. })
        ));
    }

    #[test]
    fn power_versus_wedge() {
        let e = parse_expr("y^2").unwrap();
        assert!(matches!(e.kind, ExprKind::Pow(_, 2)));
        let w = parse_expr("d(x) ^ d(y)").unwrap();
        assert!(matches!(w.kind, ExprKind::Binary(BinOp::Wedge, ..)));
        let mixed = parse_expr("x^2*d(x) ^ (2)").unwrap();
        assert!(matches!(mixed.kind, ExprKind::Binary(BinOp::Wedge, ..)));
        assert_eq!(mixed.to_string(), "x^2*d(x) ^ (2)");
    }

    #[test]
    fn precedence_is_preserved() {
        for src in ["a - (b - c)", "(a + b)*c", "-(a + b)^2", "a/(b*c)", "(-2)^3", "a - -b", "1/2*y"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src}");
        }
        assert_eq!(parse_expr("a - (b - c)").unwrap().to_string(), "a - (b - c)");
        assert_eq!(parse_expr("(a - b) - c").unwrap().to_string(), "a - b - c");
    }

    #[test]
    fn every_command_round_trips() {
        roundtrip(
            "group S3 = symmetric(3)\n\
             group Z = [[-1]] on (w)\n\
             group D = diagonal(2, 3)\n\
             form W = d(z1) ^ d(z2) ^ d(z3)\n\
             connection C = { [y2; y2, y2] = -1/(2*y2), [y1; y1, y2] = y1 }\n\
             map F = (y1 + y2, y2)\n\
             analyze S3; invariants S3\n\
             divisor d(y) over Z along (y + 1)\n\
             divisor W on S3\n\
             lift ddy(y) over Z off (y + 1, y + 2)\n\
             lift-connection C over D\n\
             lift-connection {} over D\n\
             solomon W over S3\n\
             validate thm37 rmax 6 pqmax 2 mrange -3..3\n\
             validate thm37\n\
             check-diffeo F inverse (y1 - y2, y2) from D to D\n",
        );
    }

    #[test]
    fn errors_carry_positions_and_expectations() {
        let e = parse("group G = [[1, 0],\n  [0 1]]").unwrap_err();
        assert_eq!((e.span.line, e.span.column), (2, 6));
        assert!(e.expected.contains(&"`,`".to_string()), "{e}");
        assert!(e.expected.contains(&"`]`".to_string()), "{e}");

        let e = parse("lift d(y) G").unwrap_err();
        assert_eq!(e.expected, vec!["`(x)`", "`*`", "`+`", "`-`", "`/`", "`^`", "`over`"]);

        let e = parse("frobnicate G").unwrap_err();
        assert!(e.expected.contains(&"`analyze`".to_string()));
        assert!(e.to_string().starts_with("line 1, column 1: unexpected identifier `frobnicate`"));

        let e = parse("tensor T = 2 $ 3").unwrap_err();
        assert_eq!((e.span.line, e.span.column), (1, 14));
    }
}
