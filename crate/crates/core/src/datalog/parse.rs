//! Concrete syntax:
//!
//! ```text
//! rule ::= atom '<-' atom (',' atom)* '.'
//! atom ::= ident '(' var (',' var)* ')'
//! ```
//!
//! `%` starts a comment running to the end of the line. Query files end with a
//! line `query: <predicate>`.

use super::{Atom, DatalogError, Program, Query, Rule};

pub fn parse_program(text: &str) -> Result<Program, DatalogError> {
    let (rules, _) = Parser::new(text).parse_file()?;
    Program::new(rules)
}

pub fn parse_query(text: &str) -> Result<Query, DatalogError> {
    let mut parser = Parser::new(text);
    let (rules, predicate) = parser.parse_file()?;
    let predicate = predicate.ok_or_else(|| parser.error("missing `query: <predicate>` line"))?;
    Query::new(Program::new(rules)?, predicate)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> DatalogError {
        let (mut line, mut col) = (1, 1);
        for &c in &self.chars[..self.pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        DatalogError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '%' {
                while self.chars.get(self.pos).is_some_and(|&c| c != '\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_trivia();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, token: &str) -> Result<(), DatalogError> {
        self.skip_trivia();
        let end = self.pos + token.chars().count();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().copied().eq(token.chars()) {
            self.pos = end;
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn ident(&mut self) -> Result<String, DatalogError> {
        self.skip_trivia();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<Atom, DatalogError> {
        let predicate = self.ident()?;
        self.expect("(")?;
        let mut args = vec![self.ident()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            args.push(self.ident()?);
        }
        self.expect(")")?;
        Ok(Atom { predicate, args })
    }

    fn at_query_line(&mut self) -> bool {
        self.skip_trivia();
        if !self.chars[self.pos..].iter().take(5).copied().eq("query".chars()) {
            return false;
        }
        // `query` followed (after optional blanks) by a colon.
        let mut p = self.pos + 5;
        while self.chars.get(p).is_some_and(|c| *c == ' ' || *c == '\t') {
            p += 1;
        }
        self.chars.get(p) == Some(&':')
    }

    fn parse_file(&mut self) -> Result<(Vec<Rule>, Option<String>), DatalogError> {
        let mut rules = Vec::new();
        loop {
            if self.peek().is_none() {
                return Ok((rules, None));
            }
            if self.at_query_line() {
                self.ident()?;
                self.expect(":")?;
                let predicate = self.ident()?;
                if self.peek().is_some() {
                    return Err(self.error("`query:` must be the final line"));
                }
                return Ok((rules, Some(predicate)));
            }
            let head = self.atom()?;
            self.expect("<-")?;
            let mut body = vec![self.atom()?];
            while self.peek() == Some(',') {
                self.pos += 1;
                body.push(self.atom()?);
            }
            self.expect(".")?;
            rules.push(Rule { head, body });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rules_and_comments() {
        let p = parse_program("% comment\nP(x) <- Child(x,x). % trailing\n").unwrap();
        assert_eq!(p.rules().len(), 1);
        assert_eq!(p.idb(), vec!["P"]);
        assert_eq!(p.rules()[0].to_string(), "P(x) <- Child(x,x).");
    }

    #[test]
    fn unsafe_rule_is_rejected() {
        assert_eq!(
            parse_program("P(x) <- Q(y)."),
            Err(DatalogError::Safety {
                rule: 0,
                var: "x".into()
            })
        );
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_program("P(x) <- Child(x,y)\nQ(x) <- R(x).") {
            Err(DatalogError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 1)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_program("P(x) <- .") {
            Err(DatalogError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 9)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_program("P() <- Q(x)."), Err(DatalogError::Syntax { .. })));
    }

    #[test]
    fn query_line() {
        let q = parse_query("P(x) <- Leaf(x).\nquery: P\n").unwrap();
        assert_eq!(q.predicate(), "P");
        let q = parse_query("P(x) <- Leaf(x).\nquery: Leaf").unwrap();
        assert_eq!(q.predicate(), "Leaf");
        assert_eq!(
            parse_query("P(x) <- Leaf(x).\nquery: R"),
            Err(DatalogError::UnknownQueryPredicate("R".into()))
        );
        assert!(matches!(parse_query("P(x) <- Leaf(x)."), Err(DatalogError::Syntax { .. })));
        // a predicate named `query` is still a rule head
        let p = parse_program("query(x) <- Leaf(x).").unwrap();
        assert_eq!(p.idb(), vec!["query"]);
    }
}
