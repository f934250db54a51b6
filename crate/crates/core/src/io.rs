//! The `.germ` instance format.
//!
//! ```text
//! # E6
//! n = 2
//! branch b1 (t): x1 = t^3, x2 = t^4
//! ideal: f = x1^4 - x2^3
//! ```
//!
//! Lines are `n = <int>`, `branch <name> (<param>): x1 = <poly>, ..., xn =
//! <poly>` and `ideal: <name> = <poly>`; `#` starts a comment. A polynomial
//! is a sum of terms `<rational> <monomial>`, where the rational is `p` or
//! `p/q` and the monomial a product of `var` or `var^k`; `*` between factors
//! is optional.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::germ::{Branch, IdealSpec, Parametrization, ProblemInstance, RunOptions};
use crate::poly::{MultiPoly, UniPoly};
use crate::Rational;

pub const MAX_EXPONENT: u64 = 1_000_000;
pub const MAX_AMBIENT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex_line(line: usize, text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let v = digits.parse::<BigInt>().expect("ascii digits");
            out.push(Token { tok: Tok::Int(v), col });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if "=,:()+-*^/".contains(c) {
            out.push(Token { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err(ParseError {
                line,
                col,
                kind: ErrorKind::Syntax,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    line: usize,
    end_col: usize,
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn err(&self, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col(),
            kind,
            message: message.into(),
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            None => "end of line".to_string(),
            Some(Tok::Ident(s)) => format!("'{s}'"),
            Some(Tok::Int(v)) => format!("'{v}'"),
            Some(Tok::Sym(c)) => format!("'{c}'"),
        };
        self.err(ErrorKind::Syntax, format!("expected {expected}, found {found}"))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&format!("'{c}'")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.syntax(what)),
        }
    }

    fn int(&mut self, what: &str) -> Result<BigInt, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.syntax(what)),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.syntax("end of line"))
        }
    }

    fn small(&self, v: &BigInt, limit: u64, what: &str) -> Result<u64, ParseError> {
        match u64::try_from(v) {
            Ok(x) if x <= limit => Ok(x),
            _ => Err(self.err(ErrorKind::Semantic, format!("{what} {v} exceeds the limit {limit}"))),
        }
    }

    /// `poly := ['+'|'-'] term (('+'|'-') term)*`; `vars` are the allowed
    /// variable names, terms come back as exponent vectors.
    fn poly(&mut self, vars: &[String]) -> Result<Vec<(Vec<u32>, Rational)>, ParseError> {
        let mut terms = Vec::new();
        let mut negative = self.eat('-');
        if !negative {
            self.eat('+');
        }
        loop {
            let (e, c) = self.term(vars)?;
            terms.push((e, if negative { -c } else { c }));
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                return Ok(terms);
            }
        }
    }

    fn term(&mut self, vars: &[String]) -> Result<(Vec<u32>, Rational), ParseError> {
        let mut coeff = Rational::one();
        let mut exps = vec![0u32; vars.len()];
        let mut any = false;
        if let Some(Tok::Int(_)) = self.peek() {
            let p = self.int("integer")?;
            let q = if self.eat('/') {
                let q = self.int("denominator")?;
                if q.is_zero() {
                    return Err(self.err(ErrorKind::Semantic, "zero denominator"));
                }
                q
            } else {
                BigInt::one()
            };
            coeff = Rational::new(p, q);
            any = true;
        }
        loop {
            let had_star = any && self.eat('*');
            match self.peek() {
                Some(Tok::Ident(name)) => {
                    let Some(v) = vars.iter().position(|x| x == name) else {
                        return Err(self.err(
                            ErrorKind::Syntax,
                            format!("unknown variable '{name}', expected one of {}", vars.join(", ")),
                        ));
                    };
                    self.pos += 1;
                    let k = if self.eat('^') {
                        let k = self.int("exponent")?;
                        self.small(&k, MAX_EXPONENT, "exponent")?
                    } else {
                        1
                    };
                    let total = exps[v] as u64 + k;
                    if total > MAX_EXPONENT {
                        return Err(self.err(
                            ErrorKind::Semantic,
                            format!("exponent {total} exceeds the limit {MAX_EXPONENT}"),
                        ));
                    }
                    exps[v] = total as u32;
                    any = true;
                }
                _ if had_star || !any => return Err(self.syntax("a coefficient or variable")),
                _ => return Ok((exps, coeff)),
            }
        }
    }
}

fn semantic(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        kind: ErrorKind::Semantic,
        message: message.into(),
    }
}

/// Parses an instance; options are left at their defaults.
pub fn parse_instance(text: &str) -> Result<ProblemInstance<Rational>, ParseError> {
    let mut n: Option<usize> = None;
    let mut branches: Vec<Branch<Rational>> = Vec::new();
    let mut names = BTreeSet::new();
    let mut ideal: Vec<(String, MultiPoly<Rational>)> = Vec::new();
    let mut ideal_names = BTreeSet::new();
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = lex_line(line, raw)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            line,
            end_col: raw.chars().count() + 1,
            toks: &toks,
            pos: 0,
        };
        let head_col = cur.col();
        let head = cur.ident("'n', 'branch' or 'ideal'")?;
        match head.as_str() {
            "n" => {
                if n.is_some() {
                    return Err(semantic(line, head_col, "ambient dimension given twice"));
                }
                cur.expect('=')?;
                let v = cur.int("ambient dimension")?;
                let v = cur.small(&v, MAX_AMBIENT as u64, "ambient dimension")? as usize;
                if v < 2 {
                    return Err(semantic(line, head_col, format!("ambient dimension {v} is below 2")));
                }
                cur.finish()?;
                n = Some(v);
            }
            "branch" => {
                let Some(n) = n else {
                    return Err(semantic(line, head_col, "'n = ...' must precede branches"));
                };
                let name_col = cur.col();
                let name = cur.ident("branch name")?;
                if !names.insert(name.clone()) {
                    return Err(semantic(line, name_col, format!("duplicate branch name '{name}'")));
                }
                cur.expect('(')?;
                let param = cur.ident("parameter name")?;
                cur.expect(')')?;
                cur.expect(':')?;
                let vars = [param.clone()];
                let mut coords: Vec<Option<UniPoly<Rational>>> = vec![None; n];
                loop {
                    let var_col = cur.col();
                    let var = cur.ident("coordinate name")?;
                    let j = coordinate_index(&var, n)
                        .ok_or_else(|| semantic(line, var_col, format!("'{var}' is not one of x1..x{n}")))?;
                    if coords[j].is_some() {
                        return Err(semantic(line, var_col, format!("coordinate {var} given twice")));
                    }
                    cur.expect('=')?;
                    let poly_col = cur.col();
                    let p = UniPoly::from_terms(cur.poly(&vars)?.into_iter().map(|(e, c)| (e[0], c)));
                    if !p.constant_term().is_zero() {
                        return Err(semantic(
                            line,
                            poly_col,
                            format!("coordinate {var} of branch {name} has a nonzero constant term"),
                        ));
                    }
                    coords[j] = Some(p);
                    if !cur.eat(',') {
                        break;
                    }
                }
                cur.finish()?;
                let coords = coords
                    .into_iter()
                    .enumerate()
                    .map(|(j, c)| {
                        c.ok_or_else(|| semantic(line, cur.end_col, format!("coordinate x{} missing", j + 1)))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                branches.push(Branch { name, param, coords });
            }
            "ideal" => {
                let Some(n) = n else {
                    return Err(semantic(line, head_col, "'n = ...' must precede the ideal"));
                };
                cur.expect(':')?;
                let name_col = cur.col();
                let name = cur.ident("generator name")?;
                if !ideal_names.insert(name.clone()) {
                    return Err(semantic(line, name_col, format!("duplicate generator name '{name}'")));
                }
                cur.expect('=')?;
                let vars: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
                let poly_col = cur.col();
                let f = MultiPoly::from_terms(n, cur.poly(&vars)?);
                cur.finish()?;
                if !f.constant_term().is_zero() {
                    return Err(semantic(
                        line,
                        poly_col,
                        format!("generator {name} has a nonzero constant term"),
                    ));
                }
                ideal.push((name, f));
            }
            other => {
                return Err(ParseError {
                    line,
                    col: head_col,
                    kind: ErrorKind::Syntax,
                    message: format!("expected 'n', 'branch' or 'ideal', found '{other}'"),
                })
            }
        }
    }
    let Some(n) = n else {
        return Err(semantic(last_line, 1, "missing 'n = ...'"));
    };
    if branches.is_empty() {
        return Err(semantic(last_line, 1, "no branches"));
    }
    let phi = Parametrization::new(n, branches).map_err(|e| semantic(last_line, 1, e.to_string()))?;
    let ideal = if ideal.is_empty() {
        None
    } else {
        Some(IdealSpec::new(n, ideal).map_err(|e| semantic(last_line, 1, e.to_string()))?)
    };
    Ok(ProblemInstance {
        phi,
        ideal,
        options: RunOptions::default(),
    })
}

fn coordinate_index(var: &str, n: usize) -> Option<usize> {
    let j: usize = var.strip_prefix('x')?.parse().ok()?;
    if var.len() > 1 && !var[1..].starts_with('0') && (1..=n).contains(&j) {
        Some(j - 1)
    } else {
        None
    }
}

struct Term<'a> {
    coeff: &'a Rational,
    factors: Vec<(&'a str, u32)>,
}

fn write_poly(out: &mut String, terms: &[Term<'_>]) {
    if terms.is_empty() {
        out.push('0');
        return;
    }
    for (i, t) in terms.iter().enumerate() {
        let neg = t.coeff.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = t.coeff.abs();
        let unit = abs.is_one() && !t.factors.is_empty();
        if !unit {
            write!(out, "{abs}").unwrap();
        }
        for (k, (v, e)) in t.factors.iter().enumerate() {
            if k > 0 || !unit {
                out.push('*');
            }
            out.push_str(v);
            if *e != 1 {
                write!(out, "^{e}").unwrap();
            }
        }
    }
}

/// Writes an instance back in the input format; `parse_instance` inverts it.
pub fn render_instance(inst: &ProblemInstance<Rational>) -> String {
    let mut out = String::new();
    let n = inst.phi.n();
    writeln!(out, "n = {n}").unwrap();
    for b in inst.phi.branches() {
        write!(out, "branch {} ({}): ", b.name, b.param).unwrap();
        for (j, p) in b.coords.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            write!(out, "x{} = ", j + 1).unwrap();
            let terms: Vec<Term<'_>> = p
                .terms()
                .map(|(k, c)| Term {
                    coeff: c,
                    factors: if k == 0 { vec![] } else { vec![(b.param.as_str(), k)] },
                })
                .collect();
            write_poly(&mut out, &terms);
        }
        out.push('\n');
    }
    if let Some(ideal) = &inst.ideal {
        let vars: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
        for (name, f) in ideal.names.iter().zip(&ideal.generators) {
            write!(out, "ideal: {name} = ").unwrap();
            let terms: Vec<Term<'_>> = f
                .terms()
                .map(|(a, c)| Term {
                    coeff: c,
                    factors: a
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(j, &e)| (vars[j].as_str(), e))
                        .collect(),
                })
                .collect();
            write_poly(&mut out, &terms);
            out.push('\n');
        }
    }
    out
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Semantic => "invalid instance",
        })
    }
}
