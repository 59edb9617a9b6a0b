//! Tiny expression grammar shared by ring constructors (`M(2, F2)`) and ring
//! elements (`e(1,2) + 3*e(2,2)`, `at(e, x+1)`, `delta(g, 1)`).
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | atom
//! atom    := INT | '#' INT | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'
//! NAME    := [A-Za-z_][A-Za-z0-9_'>.]* ('^' '-'? [0-9]+)* ... | "quoted"
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    /// Raw element index, `#k`.
    Index(usize),
    Name(String),
    Call(String, Vec<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Expr::Int(k) => Some(*k),
            Expr::Neg(inner) => inner.as_int().map(|k| -k),
            _ => None,
        }
    }

    /// A bare name (or a quoted label).
    pub fn as_name(&self) -> Option<&str> {
        match self {
            Expr::Name(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(k) => write!(f, "{k}"),
            Expr::Index(k) => write!(f, "#{k}"),
            Expr::Name(n) => f.write_str(&quote_label(n)),
            Expr::Call(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sub(a, b) => write!(f, "{a} - ({b})"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Mul(a, b) => write!(f, "({a})*({b})"),
        }
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '>' | '.')
}

/// True when `label` lexes as a single bare NAME token.
pub fn is_plain_label(label: &str) -> bool {
    match parse_expr(label) {
        Ok(Expr::Name(n)) => n == label,
        _ => false,
    }
}

/// Renders a label so that it parses back as a NAME.
pub fn quote_label(label: &str) -> String {
    if is_plain_label_lexically(label) {
        label.to_string()
    } else {
        format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

fn is_plain_label_lexically(label: &str) -> bool {
    let chars: Vec<char> = label.chars().collect();
    if chars.is_empty() || !is_name_start(chars[0]) {
        return false;
    }
    let mut i = 1;
    while i < chars.len() {
        let c = chars[i];
        if is_name_char(c) {
            i += 1;
        } else if c == '^' {
            i += 1;
            if i < chars.len() && chars[i] == '-' {
                i += 1;
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i == start {
                return false;
            }
        } else {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Name(String),
    Hash,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.char_indices().collect(),
            pos: 0,
        }
    }

    fn error_at(&self, char_pos: usize, msg: impl Into<String>) -> Error {
        let byte = self
            .chars
            .get(char_pos)
            .map(|&(b, _)| b)
            .unwrap_or(self.src.len());
        let before = &self.src[..byte];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            msg: msg.into(),
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        while let Some(c) = self.peek_char() {
            let start = self.pos;
            if c.is_whitespace() {
                self.pos += 1;
                continue;
            }
            let tok = match c {
                '(' => {
                    self.pos += 1;
                    Tok::LParen
                }
                ')' => {
                    self.pos += 1;
                    Tok::RParen
                }
                ',' => {
                    self.pos += 1;
                    Tok::Comma
                }
                '+' => {
                    self.pos += 1;
                    Tok::Plus
                }
                '-' => {
                    self.pos += 1;
                    Tok::Minus
                }
                '*' => {
                    self.pos += 1;
                    Tok::Star
                }
                '#' => {
                    self.pos += 1;
                    Tok::Hash
                }
                '"' => {
                    self.pos += 1;
                    let mut s = String::new();
                    loop {
                        match self.peek_char() {
                            None => return Err(self.error_at(start, "unterminated string")),
                            Some('"') => {
                                self.pos += 1;
                                break;
                            }
                            Some('\\') => {
                                self.pos += 1;
                                match self.peek_char() {
                                    Some(c) => {
                                        s.push(c);
                                        self.pos += 1;
                                    }
                                    None => {
                                        return Err(self.error_at(start, "unterminated string"))
                                    }
                                }
                            }
                            Some(c) => {
                                s.push(c);
                                self.pos += 1;
                            }
                        }
                    }
                    Tok::Name(s)
                }
                c if c.is_ascii_digit() => {
                    let mut s = String::new();
                    while let Some(d) = self.peek_char().filter(|d| d.is_ascii_digit()) {
                        s.push(d);
                        self.pos += 1;
                    }
                    Tok::Int(
                        s.parse()
                            .map_err(|_| self.error_at(start, "integer out of range"))?,
                    )
                }
                c if is_name_start(c) => {
                    let mut s = String::new();
                    while let Some(c) = self.peek_char() {
                        if is_name_char(c) {
                            s.push(c);
                            self.pos += 1;
                        } else if c == '^' {
                            // exponent suffix such as g^-1 or a^2
                            let save = self.pos;
                            let mut suffix = String::from("^");
                            self.pos += 1;
                            if self.peek_char() == Some('-') {
                                suffix.push('-');
                                self.pos += 1;
                            }
                            let mut digits = false;
                            while let Some(d) = self.peek_char().filter(|d| d.is_ascii_digit()) {
                                suffix.push(d);
                                self.pos += 1;
                                digits = true;
                            }
                            if !digits {
                                self.pos = save;
                                return Err(self.error_at(save, "expected exponent after `^`"));
                            }
                            s.push_str(&suffix);
                        } else {
                            break;
                        }
                    }
                    Tok::Name(s)
                }
                other => return Err(self.error_at(start, format!("unexpected character `{other}`"))),
            };
            out.push((start, tok));
        }
        Ok(out)
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|&(p, _)| p)
            .unwrap_or(self.lexer.chars.len())
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        self.lexer.error_at(self.here(), msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(Expr::Int(k))
            }
            Some(Tok::Hash) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Int(k)) if k >= 0 => {
                        self.pos += 1;
                        Ok(Expr::Index(k as usize))
                    }
                    _ => Err(self.err("expected element index after `#`")),
                }
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Call(n, args))
                } else {
                    Ok(Expr::Name(n))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.err("expected an expression")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let lexer = Lexer::new(src);
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser {
        lexer,
        toks,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_matrix_units_and_sums() {
        let e = parse_expr("e(1,2) + 3*e(2,2,x+1)").unwrap();
        match e {
            Expr::Add(a, b) => {
                assert_eq!(*a, Expr::Call("e".into(), vec![Expr::Int(1), Expr::Int(2)]));
                assert!(matches!(*b, Expr::Mul(_, _)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn labels_with_exponents() {
        assert_eq!(parse_expr("g^-1").unwrap(), Expr::Name("g^-1".into()));
        assert_eq!(parse_expr("hg^-1").unwrap(), Expr::Name("hg^-1".into()));
        assert_eq!(
            parse_expr("delta(gh^-1, 1)").unwrap(),
            Expr::Call("delta".into(), vec![Expr::Name("gh^-1".into()), Expr::Int(1)])
        );
        assert_eq!(parse_expr("\"a b\"").unwrap(), Expr::Name("a b".into()));
        assert!(is_plain_label("f1>f2"));
        assert!(!is_plain_label("a b"));
        assert_eq!(quote_label("a b"), "\"a b\"");
    }

    #[test]
    fn reports_position_of_errors() {
        match parse_expr("e(1,") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 5);
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("").is_err());
        assert!(parse_expr("1 2").is_err());
        assert!(parse_expr("g^").is_err());
    }

    #[test]
    fn ring_constructor_syntax() {
        assert_eq!(
            parse_expr("M(3, F2)").unwrap(),
            Expr::Call("M".into(), vec![Expr::Int(3), Expr::Name("F2".into())])
        );
        assert_eq!(parse_expr("#17").unwrap(), Expr::Index(17));
    }
}
