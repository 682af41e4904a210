//! Text forms: `T(dims; s [; a-list])` for statements, `dims` or `n1 x n2 x ...`
//! for formats. A list entry may be a power term `n^m` meaning `m` copies of `n`.

use super::{Format, FormatError, Statement};

pub fn parse_statement(text: &str) -> Result<Statement, FormatError> {
    let mut p = Parser::new(text);
    p.skip_ws();
    if !(p.eat('T') || p.eat('t')) {
        return Err(p.error("expected 'T('"));
    }
    p.expect('(')?;
    let dims = p.list()?;
    p.expect(';')?;
    let s = p.number()?;
    let a = if p.eat(';') {
        p.list()?
    } else {
        vec![0; dims.len()]
    };
    p.expect(')')?;
    p.end()?;
    let format = Format::new(dims)?;
    if a.len() != format.k() {
        return Err(FormatError::ArityMismatch {
            expected: format.k(),
            got: a.len(),
        });
    }
    Statement::new(format, s, a)
}

pub fn parse_format(text: &str) -> Result<Format, FormatError> {
    let mut p = Parser::new(text);
    p.skip_ws();
    let parens = p.eat('(');
    let first = p.term()?;
    let dims = if p.peek() == Some('x') || p.peek() == Some('X') {
        let mut dims = first;
        while p.eat('x') || p.eat('X') {
            dims.extend(p.term()?);
        }
        dims
    } else {
        let mut dims = first;
        while p.eat(',') {
            dims.extend(p.term()?);
        }
        dims
    };
    if parens {
        p.expect(')')?;
    }
    p.end()?;
    Format::new(dims)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn error(&self, msg: impl Into<String>) -> FormatError {
        FormatError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FormatError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn end(&mut self) -> Result<(), FormatError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected trailing '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<u32, FormatError> {
        match self.peek() {
            Some('-') => return Err(self.error("negative entries are not allowed")),
            Some(c) if c.is_ascii_digit() => {}
            _ => return Err(self.error("expected a non-negative integer")),
        }
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| FormatError::Syntax {
            pos: start,
            msg: format!("integer '{digits}' is out of range"),
        })
    }

    /// `n` or `n^m`.
    fn term(&mut self) -> Result<Vec<u32>, FormatError> {
        let n = self.number()?;
        if self.eat('^') {
            let at = self.pos;
            let m = self.number()?;
            if m == 0 {
                return Err(FormatError::Syntax {
                    pos: at,
                    msg: "power exponent must be at least 1".into(),
                });
            }
            Ok(vec![n; m as usize])
        } else {
            Ok(vec![n])
        }
    }

    fn list(&mut self) -> Result<Vec<u32>, FormatError> {
        let mut out = self.term()?;
        while self.eat(',') {
            out.extend(self.term()?);
        }
        Ok(out)
    }
}
