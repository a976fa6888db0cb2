//! Minimal s-expression reader with source positions.

use std::fmt;

use super::ParseError;

/// Line/column of a token, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    /// Symbols are lower-cased; PDDL is case-insensitive.
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// The head symbol of a list, if the list starts with an atom.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(SExpr::as_atom)
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<SExpr>, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Ok(None),
            Some(')') => Err(ParseError::syntax(start, "unexpected ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(ParseError::syntax(start, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(SExpr::List(items, start)));
                        }
                        Some(_) => match self.read()? {
                            Some(e) => items.push(e),
                            None => return Err(ParseError::syntax(start, "unclosed '('")),
                        },
                    }
                }
            }
            Some(_) => {
                let mut sym = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.extend(c.to_lowercase());
                    self.bump();
                }
                Ok(Some(SExpr::Atom(sym, start)))
            }
        }
    }
}

/// Reads exactly one top-level expression; trailing content is an error.
pub fn parse_one(text: &str) -> Result<SExpr, ParseError> {
    let mut reader = Reader::new(text);
    let expr = reader
        .read()?
        .ok_or_else(|| ParseError::syntax(reader.pos, "empty document"))?;
    reader.skip_trivia();
    if reader.chars.peek().is_some() {
        return Err(ParseError::syntax(
            reader.pos,
            "trailing content after top-level expression",
        ));
    }
    Ok(expr)
}

/// Reads every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut reader = Reader::new(text);
    let mut out = Vec::new();
    while let Some(e) = reader.read()? {
        out.push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_comments() {
        let e = parse_one("; header\n(define (Domain X) ; trailing\n  (:predicates (p ?x)))").unwrap();
        assert_eq!(e.head(), Some("define"));
        let items = e.as_list().unwrap();
        assert_eq!(items[1].as_list().unwrap()[1].as_atom(), Some("x"));
        assert_eq!(items[2].pos(), Pos { line: 3, column: 3 });
    }

    #[test]
    fn unbalanced_reports_position() {
        let err = parse_one("(a (b c)").unwrap_err();
        match err {
            ParseError::Syntax { pos, .. } => assert_eq!(pos, Pos { line: 1, column: 1 }),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_one("(a))").unwrap_err();
        match err {
            ParseError::Syntax { pos, .. } => assert_eq!(pos, Pos { line: 1, column: 4 }),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn several_top_level() {
        assert_eq!(parse_all("(a) b (c d)").unwrap().len(), 3);
        assert!(parse_all("  ; nothing\n").unwrap().is_empty());
    }
}
