use super::ast::{Formula, Term};
use super::LogicError;
use crate::rational::BoundedRational;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Dot,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, LogicError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        let tok = if let Some(t) = single {
            i += 1;
            col += 1;
            t
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            Tok::Int(chars[start..i].iter().collect())
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            return Err(LogicError::Parse {
                line,
                column: col,
                expected: vec!["a token".into()],
                found: format!("character `{c}`"),
            });
        };
        out.push(Spanned { tok, line: start_line, column: start_col });
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    scope: Vec<String>,
}

const FORMULA_START: [&str; 10] = ["sup", "inf", "min", "max", "neg", "plus", "minus", "d<level>", "zero<level>", "constant"];
const TERM_START: [&str; 4] = ["variable", "integer", "rational", "`(`"];

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, expected: &[&str]) -> LogicError {
        LogicError::Parse {
            line: at.line,
            column: at.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: at.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, LogicError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(self.error_at(&t, &[&tok.describe()]))
        }
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(word) => match word.as_str() {
                "sup" | "inf" => self.quantifier(word == "sup"),
                "neg" => {
                    self.expect(Tok::LParen)?;
                    let f = self.formula()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::Neg(Box::new(f)))
                }
                "min" | "max" | "plus" | "minus" => {
                    self.expect(Tok::LParen)?;
                    let a = Box::new(self.formula()?);
                    self.expect(Tok::Comma)?;
                    let b = Box::new(self.formula()?);
                    self.expect(Tok::RParen)?;
                    Ok(match word.as_str() {
                        "min" => Formula::Min(a, b),
                        "max" => Formula::Max(a, b),
                        "plus" => Formula::PlusTrunc(a, b),
                        _ => Formula::MinusTrunc(a, b),
                    })
                }
                _ if word.starts_with("zero") && is_level(&word[4..]) => {
                    let level = level_of(&word[4..], &t)?;
                    self.expect(Tok::LParen)?;
                    let term = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::ZeroPred { level, term })
                }
                _ if word.starts_with('d') && is_level(&word[1..]) => {
                    let level = level_of(&word[1..], &t)?;
                    self.expect(Tok::LParen)?;
                    let lhs = self.term()?;
                    self.expect(Tok::Comma)?;
                    let rhs = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::Dist { level, lhs, rhs })
                }
                _ => Err(self.error_at(&t, &FORMULA_START)),
            },
            Tok::Int(_) => {
                let value = self.rational_tail(&t, false)?;
                if value < BoundedRational::ZERO || value > BoundedRational::ONE {
                    return Err(LogicError::ConstantOutOfRange { line: t.line, column: t.column, value: value.to_string() });
                }
                Ok(Formula::Const(value))
            }
            Tok::Minus if matches!(self.peek().tok, Tok::Int(_)) => {
                let lit = self.next();
                let value = self.rational_tail(&lit, true)?;
                if value.is_zero() {
                    return Ok(Formula::Const(value));
                }
                Err(LogicError::ConstantOutOfRange { line: t.line, column: t.column, value: value.to_string() })
            }
            _ => Err(self.error_at(&t, &FORMULA_START)),
        }
    }

    fn quantifier(&mut self, is_sup: bool) -> Result<Formula, LogicError> {
        let v = self.next();
        let Tok::Ident(var) = v.tok.clone() else {
            return Err(self.error_at(&v, &["variable"]));
        };
        if self.scope.contains(&var) {
            return Err(LogicError::ShadowedVariable { name: var, line: v.line, column: v.column });
        }
        self.expect(Tok::Colon)?;
        let s = self.next();
        let level = match &s.tok {
            Tok::Ident(w) if w.starts_with('S') => level_of(&w[1..], &s)?,
            _ => return Err(self.error_at(&s, &["sort `S<level>`"])),
        };
        self.expect(Tok::Dot)?;
        self.scope.push(var.clone());
        let body = self.formula();
        self.scope.pop();
        let body = Box::new(body?);
        Ok(if is_sup { Formula::Sup { var, level, body } } else { Formula::Inf { var, level, body } })
    }

    /// The rest of `INT` or `INT "/" INT` after its first integer token.
    fn rational_tail(&mut self, first: &Spanned, negative: bool) -> Result<BoundedRational, LogicError> {
        let Tok::Int(num) = &first.tok else { unreachable!("called on integer tokens") };
        let num = parse_int(num, first)?;
        let num = if negative { -num } else { num };
        if self.peek().tok != Tok::Slash {
            return Ok(BoundedRational::integer(num));
        }
        self.next();
        let d = self.next();
        let Tok::Int(den) = &d.tok else {
            return Err(self.error_at(&d, &["denominator"]));
        };
        let den = parse_int(den, &d)?;
        BoundedRational::new(num, den).map_err(|e| LogicError::Parse {
            line: d.line,
            column: d.column,
            expected: vec!["nonzero denominator".into()],
            found: e.to_string(),
        })
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(name) => {
                if !self.scope.contains(name) {
                    return Err(LogicError::UnboundVariable { name: name.clone(), line: t.line, column: t.column });
                }
                Ok(Term::Var(name.clone()))
            }
            Tok::Int(_) => self.literal(&t, false),
            Tok::Minus if matches!(self.peek().tok, Tok::Int(_)) => {
                let lit = self.next();
                self.literal(&lit, true)
            }
            Tok::LParen => {
                let a = self.term()?;
                let op = self.next();
                let b = self.term()?;
                self.expect(Tok::RParen)?;
                match op.tok {
                    Tok::Plus => Ok(Term::add(a, b)),
                    Tok::Minus => Ok(Term::sub(a, b)),
                    Tok::Star => Ok(Term::mul(a, b)),
                    _ => Err(self.error_at(&op, &["`+`", "`-`", "`*`"])),
                }
            }
            _ => Err(self.error_at(&t, &TERM_START)),
        }
    }

    fn literal(&mut self, first: &Spanned, negative: bool) -> Result<Term, LogicError> {
        let is_rational = self.peek().tok == Tok::Slash;
        let value = self.rational_tail(first, negative)?;
        Ok(if is_rational { Term::Rat(value) } else { Term::Int(value.numer()) })
    }
}

fn is_level(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

fn level_of(s: &str, at: &Spanned) -> Result<u64, LogicError> {
    match s.parse::<u64>() {
        Ok(l) if l >= 1 => Ok(l),
        _ => Err(LogicError::MalformedLevel { line: at.line, column: at.column, text: at.tok.describe() }),
    }
}

fn parse_int(s: &str, at: &Spanned) -> Result<i64, LogicError> {
    s.parse().map_err(|_| LogicError::Parse {
        line: at.line,
        column: at.column,
        expected: vec!["integer within 64 bits".into()],
        found: at.tok.describe(),
    })
}

/// Parse one formula; trailing input is an error.
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, scope: Vec::new() };
    let f = p.formula()?;
    let end = p.next();
    if end.tok != Tok::Eof {
        return Err(p.error_at(&end, &["end of input"]));
    }
    Ok(f)
}
