//! Concrete syntax, loosest binding first:
//!
//! ```text
//! f ::= f '<->' f | f '->' f | f '|' f | f '&' f | '~' f
//!     | ('E' | 'A') x '.' f | ('E2' | 'A2') X '.' f
//!     | R '(' x (',' x)* ')' | X '(' x ')' | x '=' y | x '!=' y | '(' f ')'
//! ```
//!
//! `->` associates to the right, the other binary connectives to the left.
//! Quantifier bodies extend as far to the right as possible. Node variables
//! start with a lowercase letter and set variables with an uppercase one.
//!
//! A unary atom `X(x)` is a membership test when `X` is a bound set variable,
//! or when `X` is not a known relation symbol; otherwise it is a relation
//! atom.

use super::{Formula, MsoError};
use crate::structure::{builtin_arity, relation_label, Schema};

pub fn parse_formula(text: &str) -> Result<Formula, MsoError> {
    Parser::new(text, None).parse()
}

/// Like [`parse_formula`], but unary atoms over relations of `schema` are
/// always relation atoms.
pub fn parse_formula_in(text: &str, schema: &Schema) -> Result<Formula, MsoError> {
    Parser::new(text, Some(schema)).parse()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    Or,
    And,
    Implies,
    Iff,
    Eq,
    Neq,
    End,
}

struct Parser<'s> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    lex_error: Option<MsoError>,
    schema: Option<&'s Schema>,
    set_scope: Vec<String>,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, MsoError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        let (l, co) = (line, col);
        let take = |n: usize, tok: Tok, out: &mut Vec<(Tok, usize, usize)>| {
            out.push((tok, l, co));
            n
        };
        let n = if c == '\n' {
            line += 1;
            col = 0;
            1
        } else if c.is_whitespace() {
            1
        } else if c == '%' {
            let mut n = 0;
            while i + n < chars.len() && chars[i + n] != '\n' {
                n += 1;
            }
            n
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut n = 0;
            while i + n < chars.len() && (chars[i + n].is_ascii_alphanumeric() || chars[i + n] == '_') {
                n += 1;
            }
            take(n, Tok::Ident(chars[i..i + n].iter().collect()), &mut out)
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            if rest.starts_with("<->") {
                take(3, Tok::Iff, &mut out)
            } else if rest.starts_with("->") {
                take(2, Tok::Implies, &mut out)
            } else if rest.starts_with("!=") {
                take(2, Tok::Neq, &mut out)
            } else {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '~' => Tok::Not,
                    '|' => Tok::Or,
                    '&' => Tok::And,
                    '=' => Tok::Eq,
                    _ => {
                        return Err(MsoError::Syntax {
                            line,
                            col,
                            message: format!("unexpected character `{c}`"),
                        })
                    }
                };
                take(1, tok, &mut out)
            }
        };
        for _ in 0..n {
            col += 1;
        }
        i += n;
    }
    out.push((Tok::End, line, col));
    Ok(out)
}

fn is_node_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
}

fn is_set_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

impl<'s> Parser<'s> {
    fn new(text: &str, schema: Option<&'s Schema>) -> Self {
        let (toks, lex_error) = match lex(text) {
            Ok(t) => (t, None),
            Err(e) => (vec![(Tok::End, 1, 1)], Some(e)),
        };
        Parser {
            toks,
            pos: 0,
            lex_error,
            schema,
            set_scope: Vec::new(),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> MsoError {
        let (_, line, col) = self.toks[self.pos];
        MsoError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), MsoError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn parse(mut self) -> Result<Formula, MsoError> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        let f = self.iff()?;
        if *self.peek() != Tok::End {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(f)
    }

    fn iff(&mut self) -> Result<Formula, MsoError> {
        let mut f = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            f = f.iff(self.implies()?);
        }
        Ok(f)
    }

    fn implies(&mut self) -> Result<Formula, MsoError> {
        let f = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(f.implies(self.implies()?));
        }
        Ok(f)
    }

    fn or(&mut self) -> Result<Formula, MsoError> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = f.or(self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, MsoError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn node_var(&mut self) -> Result<String, MsoError> {
        match self.peek().clone() {
            Tok::Ident(s) if is_node_name(&s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("expected a node variable (lowercase)")),
        }
    }

    fn unary(&mut self) -> Result<Formula, MsoError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(q)
                if matches!(q.as_str(), "E" | "A" | "E2" | "A2") && matches!(self.peek_at(1), Tok::Ident(_)) =>
            {
                self.bump();
                let is_set = q.ends_with('2');
                let var = match self.bump() {
                    Tok::Ident(v) => v,
                    _ => unreachable!(),
                };
                if is_set && !is_set_name(&var) {
                    self.pos -= 1;
                    return Err(self.error("set variables start with an uppercase letter"));
                }
                if !is_set && !is_node_name(&var) {
                    self.pos -= 1;
                    return Err(self.error("node variables start with a lowercase letter"));
                }
                self.expect(Tok::Dot, "`.` after the quantified variable")?;
                if is_set {
                    self.set_scope.push(var.clone());
                }
                let body = self.iff();
                if is_set {
                    self.set_scope.pop();
                }
                let body = body?;
                Ok(match q.as_str() {
                    "E" => Formula::exists(var, body),
                    "A" => Formula::forall(var, body),
                    "E2" => Formula::exists_set(var, body),
                    _ => Formula::forall_set(var, body),
                })
            }
            Tok::Ident(name) => {
                self.bump();
                match self.peek() {
                    Tok::LParen => {
                        self.bump();
                        let mut args = vec![self.node_var()?];
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.node_var()?);
                        }
                        self.expect(Tok::RParen, "`)` or `,`")?;
                        Ok(self.atom(name, args))
                    }
                    Tok::Eq | Tok::Neq => {
                        if !is_node_name(&name) {
                            self.pos -= 1;
                            return Err(self.error("expected a node variable (lowercase)"));
                        }
                        let neq = self.bump() == Tok::Neq;
                        let rhs = self.node_var()?;
                        Ok(if neq { Formula::neq(name, rhs) } else { Formula::eq(name, rhs) })
                    }
                    _ => Err(self.error("expected `(`, `=` or `!=`")),
                }
            }
            _ => Err(self.error("expected a formula")),
        }
    }

    fn atom(&self, name: String, mut args: Vec<String>) -> Formula {
        if args.len() == 1 && is_set_name(&name) {
            let bound = self.set_scope.contains(&name);
            let known = match self.schema {
                Some(s) => s.contains(&name),
                None => builtin_arity(&name).is_some() || relation_label(&name).is_some(),
            };
            if bound || !known {
                return Formula::member(name, args.pop().expect("one argument"));
            }
        }
        Formula::Rel(name, args)
    }
}
