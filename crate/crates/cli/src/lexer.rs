//! Tokenizer for session files.

use std::fmt;

/// Source location of a token or syntax node.
///
/// Spans never take part in equality, so trees that differ only in layout
/// compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            end: other.end,
            ..self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Group,
    Tensor,
    Form,
    Connection,
    Map,
    Analyze,
    Invariants,
    Divisor,
    Lift,
    LiftConnection,
    Solomon,
    Validate,
    CheckDiffeo,
    Over,
    On,
    Off,
    Along,
    Inverse,
    From,
    To,
    D,
    Ddy,
    Zeta,
}

impl Keyword {
    pub const ALL: [Keyword; 23] = [
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
        Keyword::Over,
        Keyword::On,
        Keyword::Off,
        Keyword::Along,
        Keyword::Inverse,
        Keyword::From,
        Keyword::To,
        Keyword::D,
        Keyword::Ddy,
        Keyword::Zeta,
    ];

    pub fn text(self) -> &'static str {
        match self {
            Keyword::Group => "group",
            Keyword::Tensor => "tensor",
            Keyword::Form => "form",
            Keyword::Connection => "connection",
            Keyword::Map => "map",
            Keyword::Analyze => "analyze",
            Keyword::Invariants => "invariants",
            Keyword::Divisor => "divisor",
            Keyword::Lift => "lift",
            Keyword::LiftConnection => "lift-connection",
            Keyword::Solomon => "solomon",
            Keyword::Validate => "validate",
            Keyword::CheckDiffeo => "check-diffeo",
            Keyword::Over => "over",
            Keyword::On => "on",
            Keyword::Off => "off",
            Keyword::Along => "along",
            Keyword::Inverse => "inverse",
            Keyword::From => "from",
            Keyword::To => "to",
            Keyword::D => "d",
            Keyword::Ddy => "ddy",
            Keyword::Zeta => "zeta",
        }
    }

    fn lookup(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.text() == word)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Decimal digits of a non-negative integer literal.
    Int(String),
    Kw(Keyword),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    /// `(x)`
    Otimes,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Equals,
    DotDot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(s) => write!(f, "integer `{s}`"),
            Tok::Kw(k) => write!(f, "`{}`", k.text()),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Otimes => f.write_str("`(x)`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::DotDot => f.write_str("`..`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {}, column {}: unexpected character {ch:?}", span.line, span.column)]
pub struct LexError {
    pub ch: char,
    pub span: Span,
}

/// `d(x)` and `ddy(x)` name a coordinate `x`; everywhere else `(x)` is the
/// tensor product marker.
fn after_slot(out: &[(Tok, Span)]) -> bool {
    matches!(out.last(), Some((Tok::Kw(Keyword::D | Keyword::Ddy), _)))
}

/// Splits `src` into tokens. `#` starts a comment running to the end of
/// the line. A parenthesized lone `x` outside `d(x)`/`ddy(x)` must be
/// written with inner spaces, `( x )`. The final token is always [`Tok::Eof`].
pub fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, LexError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut line, mut line_start) = (1, 0);
    let mut i = 0;
    let at = |i: usize| chars.get(i).map(|&(_, c)| c);
    let offset = |i: usize| chars.get(i).map_or(src.len(), |&(o, _)| o);
    while i < chars.len() {
        let (start, c) = chars[i];
        let span_from = |j: usize, line: usize, line_start: usize| Span {
            start,
            end: offset(j),
            line,
            column: src[line_start..start].chars().count() + 1,
        };
        if c == '\n' {
            line += 1;
            line_start = start + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = if c.is_ascii_digit() {
            let mut j = i;
            while at(j).is_some_and(|c| c.is_ascii_digit()) {
                j += 1;
            }
            (Tok::Int(src[start..offset(j)].to_string()), j - i)
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while at(j).is_some_and(|c| c.is_alphanumeric() || c == '_') {
                j += 1;
            }
            let mut word = src[start..offset(j)].to_string();
            for (head, tail) in [("lift", "connection"), ("check", "diffeo")] {
                let rest = &src[offset(j)..];
                if word == head && rest.starts_with('-') && rest[1..].starts_with(tail) {
                    let k = j + 1 + tail.chars().count();
                    if !at(k).is_some_and(|c| c.is_alphanumeric() || c == '_') {
                        word = format!("{head}-{tail}");
                        j = k;
                    }
                }
            }
            let tok = match Keyword::lookup(&word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            (tok, j - i)
        } else {
            match c {
                '(' if at(i + 1) == Some('x') && at(i + 2) == Some(')') && !after_slot(&out) => (Tok::Otimes, 3),
                '.' if at(i + 1) == Some('.') => (Tok::DotDot, 2),
                '+' => (Tok::Plus, 1),
                '-' => (Tok::Minus, 1),
                '*' => (Tok::Star, 1),
                '/' => (Tok::Slash, 1),
                '^' => (Tok::Caret, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBracket, 1),
                ']' => (Tok::RBracket, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ',' => (Tok::Comma, 1),
                ';' => (Tok::Semi, 1),
                '=' => (Tok::Equals, 1),
                _ => {
                    return Err(LexError {
                        ch: c,
                        span: span_from(i + 1, line, line_start),
                    })
                }
            }
        };
        out.push((tok, span_from(i + len, line, line_start)));
        i += len;
    }
    let end = Span {
        start: src.len(),
        end: src.len(),
        line,
        column: src[line_start..].chars().count() + 1,
    };
    out.push((Tok::Eof, end));
    Ok(out)
}
