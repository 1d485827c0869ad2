//! Concrete syntax for formulas and knowledge bases.
//!
//! Grammar (loosest to tightest): `|~` (non-associative), `->`
//! (right-associative), `|`, `&`, `~`. Atoms are identifiers, parentheses
//! group. `|~` rejects conditional operands: the language has no nested
//! conditionals. KB files are line-oriented; `#` starts a comment.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{Assertion, Formula, KnowledgeBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    /// 1-based line.
    pub line: usize,
    /// 1-based column (in chars).
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: {}", self.pos, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Neg,
    And,
    Or,
    Implies,
    Cond,
    LPar,
    RPar,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Neg => f.write_str("`~`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::Cond => f.write_str("`|~`"),
            Tok::LPar => f.write_str("`(`"),
            Tok::RPar => f.write_str("`)`"),
        }
    }
}

fn tokenize(text: &str, start_line: usize) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let mut line = start_line;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '~' => {
                chars.next();
                col += 1;
                toks.push((Tok::Neg, pos));
            }
            '&' => {
                chars.next();
                col += 1;
                toks.push((Tok::And, pos));
            }
            '(' => {
                chars.next();
                col += 1;
                toks.push((Tok::LPar, pos));
            }
            ')' => {
                chars.next();
                col += 1;
                toks.push((Tok::RPar, pos));
            }
            '|' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'~') {
                    chars.next();
                    col += 1;
                    toks.push((Tok::Cond, pos));
                } else {
                    toks.push((Tok::Or, pos));
                }
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    toks.push((Tok::Implies, pos));
                } else {
                    return Err(ParseError {
                        pos,
                        message: "expected `->`".to_string(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(name), pos));
            }
            c => {
                return Err(ParseError {
                    pos,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, Pos)> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn here(&self) -> Pos {
        self.peek().map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, pos: Pos, message: String) -> Result<T, ParseError> {
        Err(ParseError { pos, message })
    }

    // conditional := implication ('|~' implication)?   (non-associative)
    fn conditional(&mut self) -> Result<Formula, ParseError> {
        let start = self.here();
        let left = self.implication()?;
        if let Some((Tok::Cond, _)) = self.peek() {
            let (_, op_pos) = self.next().unwrap();
            if !left.is_propositional() {
                return self.err(start, "conditional inside conditional: antecedent must be propositional".to_string());
            }
            let right_start = self.here();
            let right = self.implication()?;
            if !right.is_propositional() {
                return self.err(right_start, "conditional inside conditional: consequent must be propositional".to_string());
            }
            if let Some((Tok::Cond, pos)) = self.peek() {
                let pos = *pos;
                return self.err(pos, "`|~` is non-associative; parenthesize (and conditionals cannot nest)".to_string());
            }
            let _ = op_pos;
            return Ok(left.cond(right));
        }
        Ok(left)
    }

    // implication := disjunction ('->' implication)?   (right-associative)
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if let Some((Tok::Implies, _)) = self.peek() {
            self.next();
            let right = self.implication()?;
            return Ok(left.implies(right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while let Some((Tok::Or, _)) = self.peek() {
            self.next();
            f = f.or(self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while let Some((Tok::And, _)) = self.peek() {
            self.next();
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.next() {
            Some((Tok::Neg, _)) => Ok(self.unary()?.neg()),
            Some((Tok::Ident(name), _)) => Ok(Formula::Atom(name)),
            Some((Tok::LPar, open)) => {
                let f = self.conditional()?;
                match self.next() {
                    Some((Tok::RPar, _)) => Ok(f),
                    Some((t, pos)) => self.err(pos, format!("expected `)` but found {t}")),
                    None => self.err(open, "unclosed `(`".to_string()),
                }
            }
            Some((t, pos)) => self.err(pos, format!("expected a formula but found {t}")),
            None => {
                let pos = self.end;
                self.err(pos, "unexpected end of input".to_string())
            }
        }
    }
}

fn parse_with_origin(text: &str, start_line: usize) -> Result<Formula, ParseError> {
    let toks = tokenize(text, start_line)?;
    let end = toks
        .last()
        .map(|(t, p)| {
            let width = match t {
                Tok::Ident(s) => s.chars().count(),
                Tok::Implies | Tok::Cond => 2,
                _ => 1,
            };
            Pos {
                line: p.line,
                col: p.col + width,
            }
        })
        .unwrap_or(Pos {
            line: start_line,
            col: 1,
        });
    let mut parser = Parser { toks, at: 0, end };
    let f = parser.conditional()?;
    if let Some((t, pos)) = parser.peek() {
        let (t, pos) = (t.clone(), *pos);
        return parser.err(pos, format!("unexpected {t} after formula"));
    }
    Ok(f)
}

/// Parses a single base-language formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_with_origin(text, 1)
}

/// Parses a knowledge base: one assertion per line, `#` comments, blank lines
/// ignored. Errors from all lines are aggregated.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, Vec<ParseError>> {
    let mut kb = KnowledgeBase::default();
    let mut errors = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        match parse_with_origin(line, line_no) {
            Ok(formula) => kb.assertions.push(Assertion { formula, line: line_no }),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(kb)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Formula;

    #[test]
    fn grammar_productions() {
        assert_eq!(
            parse_formula("adult |~ worker").unwrap(),
            Formula::atom("adult").cond(Formula::atom("worker"))
        );
        assert_eq!(
            parse_formula("~(a |~ ~r)").unwrap(),
            Formula::atom("a").cond(Formula::atom("r").neg()).neg()
        );
        // precedence: ~ > & > | > -> > |~
        assert_eq!(
            parse_formula("~a & b | c -> d |~ e"),
            parse_formula("((((~a) & b) | c) -> d) |~ e")
        );
        assert_eq!(parse_formula("a -> b -> c"), parse_formula("a -> (b -> c)"));
        assert_eq!(parse_formula("a & b & c"), parse_formula("(a & b) & c"));
    }

    #[test]
    fn rejects_nested_conditionals() {
        let err = parse_formula("(p |~ q) |~ r").unwrap_err();
        assert!(err.message.contains("conditional inside conditional"), "{err}");
        assert!(parse_formula("p |~ (q |~ r)").is_err());
        assert!(parse_formula("a |~ b |~ c").is_err());
        assert!(parse_formula("((p |~ q) & r) |~ s").is_err());
    }

    #[test]
    fn error_positions() {
        let err = parse_formula("a |~").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 5 });
        let err = parse_formula("a ? b").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 3 });
    }

    #[test]
    fn kb_parsing() {
        let kb = parse_kb("adult |~ worker\nretired |~ adult\nretired |~ ~worker").unwrap();
        assert_eq!(kb.len(), 3);
        assert_eq!(kb.assertions[2].line, 3);

        assert!(parse_kb("").unwrap().is_empty());

        let kb = parse_kb("# comment\n\na |~ b # trailing\n").unwrap();
        assert_eq!(kb.len(), 1);
        assert_eq!(kb.assertions[0].line, 3);

        let errs = parse_kb("a |~\nb |~ c\n)x\n").unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].pos.line, 1);
        assert_eq!(errs[1].pos.line, 3);
    }

    #[test]
    fn print_parse_round_trip_examples() {
        for s in [
            "a |~ ~b",
            "~(a |~ b)",
            "(a | b) & ~c -> d",
            "a -> (b -> c) -> d",
            "~(a & (b | c))",
            "(a & b | c) |~ (d -> e)",
        ] {
            let f = parse_formula(s).unwrap();
            let printed = alloc::string::ToString::to_string(&f);
            assert_eq!(parse_formula(&printed).unwrap(), f, "round trip via {printed}");
        }
    }
}
