//! Tokenizer and cursor shared by the text formats (theories, models,
//! flag vectors, interpretations, theons).

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(String),
    Str(String),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const PUNCT: [&str; 25] = [
    "<->", "->", ":=", "!=", "<=", ">=", "(", ")", "{", "}", "[", "]", ",", "/", ";", "&", "|", "!", "=", "<", ">",
    "*", ":", "+", "-",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') || c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let text: String = chars[s..i].iter().collect();
            col += i - s;
            out.push(Token { tok: Tok::Ident(text), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[s..i].iter().collect();
            col += i - s;
            out.push(Token { tok: Tok::Num(text), line: l0, col: c0 });
            continue;
        }
        if c == '"' {
            let s = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\n' {
                    line += 1;
                    col = 0;
                }
                i += 1;
                col += 1;
            }
            if i >= chars.len() {
                return Err(Error::Syntax { line: l0, col: c0, msg: "unterminated string".into() });
            }
            let text: String = chars[s..i].iter().collect();
            i += 1;
            col += 2;
            out.push(Token { tok: Tok::Str(text), line: l0, col: c0 });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Token { tok: Tok::Punct(p), line: l0, col: c0 });
            }
            None => return Err(Error::Syntax { line: l0, col: c0, msg: format!("unexpected character {c:?}") }),
        }
    }
    Ok(out)
}

pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self> {
        let toks = tokenize(src)?;
        let lines = src.lines().count().max(1);
        let last = src.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        Ok(Cursor { toks, pos: 0, end: (lines, last) })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end);
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(q)) if q == s)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_ident(&mut self, s: &str) -> bool {
        if self.is_ident(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("expected '{p}'"))
        }
    }

    pub fn expect_keyword(&mut self, s: &str) -> Result<()> {
        if self.eat_ident(s) {
            Ok(())
        } else {
            self.error(format!("expected '{s}'"))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("expected identifier"),
        }
    }

    pub fn int(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Num(s)) if !s.contains('.') => {
                let v = s.parse::<usize>();
                match v {
                    Ok(v) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    Err(_) => self.error("integer out of range"),
                }
            }
            _ => self.error("expected integer"),
        }
    }

    pub fn string(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("expected string literal"),
        }
    }

    /// A signed rational literal: `-a/b`, `a`, or a decimal.
    pub fn rational(&mut self) -> Result<crate::Rational> {
        let neg = self.eat_punct("-");
        let num = match self.peek() {
            Some(Tok::Num(s)) => s.clone(),
            _ => return self.error("expected number"),
        };
        self.pos += 1;
        let mut text = num;
        if self.is_punct("/") {
            if let Some(Tok::Num(d)) = self.peek_at(1) {
                text = format!("{text}/{d}");
                self.pos += 2;
            }
        }
        match crate::rational::parse(&text) {
            Some(q) => Ok(if neg { -q } else { q }),
            None => self.error(format!("invalid rational {text}")),
        }
    }

    /// A registry theory name such as `Graph+LinOrder`, `Hypergraph(3)` or
    /// `3-Coloring`, returned as its canonical text.
    pub fn theory_spec(&mut self) -> Result<String> {
        let mut out = String::new();
        loop {
            if let Some(Tok::Num(d)) = self.peek() {
                out.push_str(&d.clone());
                self.pos += 1;
                if self.eat_punct("-") {
                    out.push('-');
                }
            }
            out.push_str(&self.ident()?);
            if self.is_punct("(") {
                if let Some(Tok::Num(d)) = self.peek_at(1) {
                    let d = d.clone();
                    self.pos += 2;
                    self.expect_punct(")")?;
                    out.push_str(&format!("({d})"));
                }
            }
            if !self.eat_punct("+") {
                return Ok(out);
            }
            out.push('+');
        }
    }

    pub fn save(&self) -> usize {
        self.pos
    }

    pub fn restore(&mut self, pos: usize) {
        self.pos = pos;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("a\n  <-> b").unwrap();
        assert_eq!((toks[1].line, toks[1].col), (2, 3));
        assert_eq!(toks[1].tok, Tok::Punct("<->"));
    }

    #[test]
    fn comments_skipped() {
        let toks = tokenize("x // note\n# other\ny").unwrap();
        assert_eq!(toks.len(), 2);
    }
}
