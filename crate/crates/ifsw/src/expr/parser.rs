//! Recursive-descent parser for the expression language.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr   := term   { ("+" | "-") term }          left-associative
//! term   := factor { ("*" | "/") factor }        left-associative
//! factor := "-" factor | power
//! power  := atom [ "^" factor ]                  right-associative
//! atom   := NUMBER | IDENT | IDENT "(" expr { "," expr } ")" | "(" expr ")"
//! ```
//!
//! `NUMBER` is a decimal literal with optional fraction and exponent
//! (`2`, `0.5`, `1e-3`). Identifiers are `x`/`xN` variables, the constant
//! `pi`, or one of the known function names. Errors carry the byte offset
//! of the offending token.

use super::{BinOp, Expr, Func1, Func2};
use crate::error::{Error, Result};

/// Parse a source string into an expression tree.
pub fn parse(src: &str) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let expr = p.expr()?;
    match p.peek() {
        None => Ok(expr),
        Some((tok, at)) => Err(err(format!("unexpected `{tok}` after expression"), *at)),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Num(v) => write!(f, "{v}"),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Plus => write!(f, "+"),
            Token::Minus => write!(f, "-"),
            Token::Star => write!(f, "*"),
            Token::Slash => write!(f, "/"),
            Token::Caret => write!(f, "^"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
            Token::Comma => write!(f, ","),
        }
    }
}

fn err(message: String, position: usize) -> Error {
    Error::Parse { message, position }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((Token::Plus, start));
                i += 1;
            }
            '-' => {
                tokens.push((Token::Minus, start));
                i += 1;
            }
            '*' => {
                tokens.push((Token::Star, start));
                i += 1;
            }
            '/' => {
                tokens.push((Token::Slash, start));
                i += 1;
            }
            '^' => {
                tokens.push((Token::Caret, start));
                i += 1;
            }
            '(' => {
                tokens.push((Token::LParen, start));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, start));
                i += 1;
            }
            ',' => {
                tokens.push((Token::Comma, start));
                i += 1;
            }
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| err(format!("invalid number `{text}`"), start))?;
                tokens.push((Token::Num(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((Token::Ident(src[start..i].to_string()), start));
            }
            other => return Err(err(format!("unexpected character `{other}`"), start)),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Token) -> bool {
        if matches!(self.peek(), Some((t, _)) if t == want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        match self.advance() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, at)) => Err(err(format!("expected {what}, found `{t}`"), at)),
            None => Err(err(format!("expected {what}, found end of input"), self.end())),
        }
    }

    fn end(&self) -> usize {
        self.tokens.last().map_or(0, |(_, at)| *at + 1)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(&Token::Plus) {
                BinOp::Add
            } else if self.eat(&Token::Minus) {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat(&Token::Star) {
                BinOp::Mul
            } else if self.eat(&Token::Slash) {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(&Token::Minus) {
            Ok(Expr::Neg(Box::new(self.factor()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(&Token::Caret) {
            // Right-associative; the exponent may start with a unary minus.
            let exp = self.factor()?;
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.advance() {
            Some((Token::Num(v), _)) => Ok(Expr::Const(v)),
            Some((Token::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some((Token::Ident(name), at)) => self.ident(name, at),
            Some((t, at)) => Err(err(format!("expected a value, found `{t}`"), at)),
            None => Err(err("expected a value, found end of input".into(), self.end())),
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Expr> {
        if self.eat(&Token::LParen) {
            let mut args = vec![self.expr()?];
            while self.eat(&Token::Comma) {
                args.push(self.expr()?);
            }
            self.expect(Token::RParen, "`)`")?;
            return self.call(&name, args, at);
        }
        // Plain identifier: a variable or a named constant.
        if name == "pi" {
            return Ok(Expr::Const(std::f64::consts::PI));
        }
        if name == "x" {
            return Ok(Expr::Var(0));
        }
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = rest
                    .parse()
                    .map_err(|_| err(format!("variable index too large in `{name}`"), at))?;
                if index == 0 {
                    return Err(err("variables are numbered from x1".into(), at));
                }
                return Ok(Expr::Var(index - 1));
            }
        }
        Err(err(format!("unknown identifier `{name}`"), at))
    }

    fn call(&mut self, name: &str, mut args: Vec<Expr>, at: usize) -> Result<Expr> {
        let f1 = match name {
            "sin" => Some(Func1::Sin),
            "cos" => Some(Func1::Cos),
            "exp" => Some(Func1::Exp),
            "ln" => Some(Func1::Ln),
            "abs" => Some(Func1::Abs),
            "sqrt" => Some(Func1::Sqrt),
            _ => None,
        };
        if let Some(f) = f1 {
            if args.len() != 1 {
                return Err(err(
                    format!("{name} expects 1 argument, found {}", args.len()),
                    at,
                ));
            }
            return Ok(Expr::Call1(f, Box::new(args.pop().unwrap())));
        }
        let f2 = match name {
            "min" => Some(Func2::Min),
            "max" => Some(Func2::Max),
            _ => None,
        };
        if let Some(f) = f2 {
            if args.len() != 2 {
                return Err(err(
                    format!("{name} expects 2 arguments, found {}", args.len()),
                    at,
                ));
            }
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            return Ok(Expr::Call2(f, Box::new(a), Box::new(b)));
        }
        Err(err(format!("unknown function `{name}`"), at))
    }
}
