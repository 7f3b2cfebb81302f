//! Shared tokenizer for the brace-delimited formats (model, dspec, depl).

use super::DslError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Punct(char),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits `text` into tokens. `//` and `#` start comments running to the
/// end of the line. Characters outside the token classes become `Punct`, so
/// only an unterminated string literal is a lexical error.
pub(crate) fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
            }
            let s: String = chars[start..i].iter().collect();
            // digits with an optional fraction always parse
            Tok::Number(s.parse().unwrap_or(f64::INFINITY))
        } else if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => {
                        return Err(DslError::Syntax {
                            line: tline,
                            col: tcol,
                            msg: "unterminated string literal".into(),
                        })
                    }
                    Some('"') => {
                        bump!();
                        break;
                    }
                    Some('\\') if i + 1 < chars.len() => {
                        bump!();
                        s.push(chars[i]);
                        bump!();
                    }
                    Some(&ch) => {
                        s.push(ch);
                        bump!();
                    }
                }
            }
            Tok::Str(s)
        } else {
            bump!();
            Tok::Punct(c)
        };
        out.push(Token { tok, line: tline, col: tcol });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Recursive-descent helper over a token vector.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self, DslError> {
        Ok(Self { toks: lex(text)?, pos: 0 })
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek().tok, Tok::Eof)
    }

    pub fn error(&self, msg: impl Into<String>) -> DslError {
        let t = self.peek();
        DslError::Syntax { line: t.line, col: t.col, msg: msg.into() }
    }

    pub fn is_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    pub fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, c: char) -> Result<Token, DslError> {
        if self.is_punct(c) {
            Ok(self.next())
        } else {
            Err(self.error(format!("expected `{c}`, found {}", describe(&self.peek().tok))))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<Token, DslError> {
        if self.is_keyword(kw) {
            Ok(self.next())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", describe(&self.peek().tok))))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Token), DslError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.next()))
            }
            other => Err(self.error(format!("expected identifier, found {}", describe(other)))),
        }
    }

    pub fn expect_number(&mut self) -> Result<(f64, Token), DslError> {
        match self.peek().tok {
            Tok::Number(v) if v.is_finite() => Ok((v, self.next())),
            Tok::Number(_) => Err(self.error("number out of range")),
            ref other => Err(self.error(format!("expected number, found {}", describe(other)))),
        }
    }

    /// `( id, id, ... )`; the list may be empty.
    pub fn ident_list(&mut self) -> Result<Vec<String>, DslError> {
        self.expect_punct('(')?;
        let mut out = Vec::new();
        if self.eat_punct(')') {
            return Ok(out);
        }
        loop {
            out.push(self.expect_ident()?.0);
            if self.eat_punct(')') {
                return Ok(out);
            }
            self.expect_punct(',')?;
        }
    }

    /// Skips one item: tokens up to a `;` or a balanced `{...}` block at the
    /// current depth. Stops before an unmatched `}` or at end of input.
    pub fn skip_item(&mut self) -> Result<(), DslError> {
        let mut depth = 0usize;
        loop {
            match self.peek().tok {
                Tok::Eof => {
                    return if depth == 0 { Ok(()) } else { Err(self.error("unbalanced `{`")) };
                }
                Tok::Punct('{') => {
                    depth += 1;
                    self.next();
                }
                Tok::Punct('}') => {
                    if depth == 0 {
                        return Ok(());
                    }
                    depth -= 1;
                    self.next();
                    if depth == 0 {
                        self.eat_punct(';');
                        return Ok(());
                    }
                }
                Tok::Punct(';') if depth == 0 => {
                    self.next();
                    return Ok(());
                }
                _ => {
                    self.next();
                }
            }
        }
    }
}

pub(crate) fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(v) => format!("number {v}"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        lex(text).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers_idents_and_comments() {
        assert_eq!(
            kinds("cpu max 35 // x\nmem 0.7; # y\n"),
            vec![
                Tok::Ident("cpu".into()),
                Tok::Ident("max".into()),
                Tok::Number(35.0),
                Tok::Ident("mem".into()),
                Tok::Number(0.7),
                Tok::Punct(';'),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = lex("a\n  b").unwrap();
        assert_eq!((toks[1].line, toks[1].col), (2, 3));
    }

    #[test]
    fn trailing_dot_is_punct() {
        assert_eq!(kinds("1."), vec![Tok::Number(1.0), Tok::Punct('.'), Tok::Eof]);
    }

    #[test]
    fn unterminated_string() {
        assert!(matches!(lex("x \"abc"), Err(DslError::Syntax { line: 1, col: 3, .. })));
    }
}
