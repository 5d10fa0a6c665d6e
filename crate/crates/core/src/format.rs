//! Text format for models and extensions.
//!
//! ```text
//! # comments and blank lines are ignored
//! generator x 3
//! generator y 3
//! generator z 7
//! d z = 0
//! extend 1
//! D z = x*y*t1 + t1^4
//! ```
//!
//! A missing `d` line means `d = 0`. A missing `D` line means the generator
//! is not perturbed, that is `D = d`. When `extend 1` is used, `t` is accepted
//! as an alias for the single base generator.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gca::{Element, Generator, GeneratorSet, Monomial, Rational};
use crate::sullivan::{fresh_base_names, KsExtension, SullivanModel};

pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Parses `p` or `p/q` with an optional sign.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::parse(0, format!("invalid rational `{text}`"));
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

pub fn format_monomial(gens: &GeneratorSet, m: &Monomial) -> String {
    if m.is_one() {
        return "1".into();
    }
    m.factors()
        .map(|(i, e)| {
            let name = &gens.get(i).name;
            if e == 1 {
                name.clone()
            } else {
                format!("{name}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Canonical text of an element: terms from largest to smallest in display
/// order, unit coefficients omitted.
pub fn format_element(gens: &GeneratorSet, e: &Element) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in gens.sorted_terms(e).into_iter().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        let body = if m.is_one() {
            format_rational(&abs)
        } else if abs.is_one() {
            format_monomial(gens, m)
        } else {
            format!("{}*{}", format_rational(&abs), format_monomial(gens, m))
        };
        match (k, negative) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Number(BigInt),
    Name(String),
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Number(s.parse().expect("digits parse")));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
            _ => return Err(Error::parse(line, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    gens: &'a GeneratorSet,
    aliases: &'a HashMap<String, usize>,
    line: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, msg)
    }

    fn expr(&mut self) -> Result<Element> {
        let mut out = Element::zero();
        let mut sign = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                -Rational::one()
            }
            Some(Token::Plus) => {
                self.pos += 1;
                Rational::one()
            }
            _ => Rational::one(),
        };
        loop {
            let term = self.term()?;
            out.add_assign_scaled(&term, &sign);
            match self.next() {
                None => return Ok(out),
                Some(Token::Plus) => sign = Rational::one(),
                Some(Token::Minus) => sign = -Rational::one(),
                Some(t) => return Err(self.err(format!("expected `+` or `-`, found {t:?}"))),
            }
        }
    }

    fn number(&mut self) -> Result<BigInt> {
        match self.next() {
            Some(Token::Number(n)) => Ok(n),
            other => Err(self.err(format!("expected a number, found {other:?}"))),
        }
    }

    fn term(&mut self) -> Result<Element> {
        let mut coeff = Rational::one();
        let mut factors: Vec<(usize, u32)> = Vec::new();
        loop {
            match self.next() {
                Some(Token::Minus) => {
                    coeff = -coeff;
                    continue;
                }
                Some(Token::Number(n)) => {
                    let mut c = Rational::from_integer(n);
                    if self.peek() == Some(&Token::Slash) {
                        self.pos += 1;
                        let d = self.number()?;
                        if d.is_zero() {
                            return Err(self.err("zero denominator"));
                        }
                        c /= Rational::from_integer(d);
                    }
                    coeff *= c;
                }
                Some(Token::Name(name)) => {
                    let idx = self
                        .gens
                        .index_of(&name)
                        .or_else(|| self.aliases.get(&name).copied())
                        .ok_or_else(|| self.err(format!("unknown generator `{name}`")))?;
                    let mut e = 1u32;
                    if self.peek() == Some(&Token::Caret) {
                        self.pos += 1;
                        let n = self.number()?;
                        e = u32::try_from(n).map_err(|_| self.err("exponent too large"))?;
                    }
                    factors.push((idx, e));
                }
                other => return Err(self.err(format!("expected a factor, found {other:?}"))),
            }
            if self.peek() == Some(&Token::Star) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let mut totals: BTreeMap<usize, u32> = BTreeMap::new();
        for &(i, e) in &factors {
            *totals.entry(i).or_default() += e;
        }
        for (&i, &e) in &totals {
            if self.gens.is_odd(i) && e > 1 {
                return Err(self.err(format!(
                    "odd generator `{}` appears with exponent {e}",
                    self.gens.get(i).name
                )));
            }
        }
        let mut value = Element::term(Monomial::one(), coeff);
        for (i, e) in factors {
            value = self.gens.mul(&value, &Element::monomial(Monomial::power(i, e)));
        }
        Ok(value)
    }
}

fn parse_with_aliases(
    gens: &GeneratorSet,
    aliases: &HashMap<String, usize>,
    text: &str,
    line: usize,
) -> Result<Element> {
    let tokens = tokenize(text, line)?;
    if tokens.is_empty() {
        return Err(Error::parse(line, "empty expression"));
    }
    let mut p = ExprParser {
        tokens,
        pos: 0,
        gens,
        aliases,
        line,
    };
    p.expr()
}

/// Parses an expression over `gens`; `line` is used in error messages.
pub fn parse_element(gens: &GeneratorSet, text: &str, line: usize) -> Result<Element> {
    parse_with_aliases(gens, &HashMap::new(), text, line)
}

/// A parsed model file: the fiber, and the extension if `extend` was given.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub fiber: SullivanModel,
    pub extension: Option<KsExtension>,
}

impl ModelFile {
    /// The model whose properties are being asked about: the total model of
    /// the extension when present, otherwise the fiber.
    pub fn model(&self) -> &SullivanModel {
        match &self.extension {
            Some(e) => e.total(),
            None => &self.fiber,
        }
    }
}

struct Definition {
    line: usize,
    name: String,
    expr: String,
}

fn split_definition(rest: &str, line: usize) -> Result<(String, String)> {
    let (name, expr) = rest
        .split_once('=')
        .ok_or_else(|| Error::parse(line, "expected `<name> = <expr>`"))?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(Error::parse(line, format!("bad generator name `{name}`")));
    }
    Ok((name.to_string(), expr.trim().to_string()))
}

pub fn parse_model(text: &str) -> Result<ModelFile> {
    let mut gens: Vec<Generator> = Vec::new();
    let mut d_lines: Vec<Definition> = Vec::new();
    let mut big_d_lines: Vec<Definition> = Vec::new();
    let mut extend: Option<(usize, usize)> = None;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map(|(a, b)| (a, b.trim()))
            .unwrap_or((content, ""));
        match keyword {
            "generator" => {
                if extend.is_some() {
                    return Err(Error::parse(line, "generators must precede `extend`"));
                }
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(Error::parse(line, "expected `generator <name> <degree>`"));
                }
                let degree: u32 = parts[1]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad degree `{}`", parts[1])))?;
                let g = Generator::new(parts[0], degree)
                    .map_err(|e| Error::parse(line, e.to_string()))?;
                if gens.iter().any(|h| h.name == g.name) {
                    return Err(Error::parse(line, format!("duplicate generator `{}`", g.name)));
                }
                gens.push(g);
            }
            "d" => {
                let (name, expr) = split_definition(rest, line)?;
                d_lines.push(Definition { line, name, expr });
            }
            "extend" => {
                if extend.is_some() {
                    return Err(Error::parse(line, "`extend` given twice"));
                }
                let n: usize = rest
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad base rank `{rest}`")))?;
                extend = Some((n, line));
            }
            "D" => {
                if extend.is_none() {
                    return Err(Error::parse(line, "`D` lines need a preceding `extend`"));
                }
                let (name, expr) = split_definition(rest, line)?;
                big_d_lines.push(Definition { line, name, expr });
            }
            other => return Err(Error::parse(line, format!("unknown declaration `{other}`"))),
        }
    }

    let fiber_gens = GeneratorSet::new(gens)?;
    let mut diff = vec![Element::zero(); fiber_gens.len()];
    let mut seen = vec![false; fiber_gens.len()];
    let no_alias = HashMap::new();
    for def in &d_lines {
        let i = fiber_gens
            .index_of(&def.name)
            .ok_or_else(|| Error::parse(def.line, format!("unknown generator `{}`", def.name)))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::parse(def.line, format!("second `d` line for `{}`", def.name)));
        }
        let e = parse_with_aliases(&fiber_gens, &no_alias, &def.expr, def.line)?;
        check_degree(&fiber_gens, &e, fiber_gens.degree(i) + 1, def.line)?;
        diff[i] = e;
    }
    let fiber = SullivanModel::new(fiber_gens, diff)?;

    let Some((n, extend_line)) = extend else {
        return Ok(ModelFile {
            fiber,
            extension: None,
        });
    };
    if n == 0 {
        return Err(Error::parse(extend_line, "`extend` needs a positive base rank"));
    }
    let names = fresh_base_names(fiber.generators(), n);
    let extra = names
        .iter()
        .map(|s| Generator::new(s.clone(), 2))
        .collect::<Result<Vec<_>>>()?;
    let total_gens = fiber.generators().extended(extra)?;
    let mut aliases = HashMap::new();
    if n == 1 && total_gens.index_of("t").is_none() {
        aliases.insert("t".to_string(), fiber.len());
    }
    let mut total_diff = fiber.differentials().to_vec();
    total_diff.resize(total_gens.len(), Element::zero());
    let mut seen = vec![false; total_gens.len()];
    for def in &big_d_lines {
        let i = total_gens
            .index_of(&def.name)
            .or_else(|| aliases.get(&def.name).copied())
            .ok_or_else(|| Error::parse(def.line, format!("unknown generator `{}`", def.name)))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::parse(def.line, format!("second `D` line for `{}`", def.name)));
        }
        let e = parse_with_aliases(&total_gens, &aliases, &def.expr, def.line)?;
        check_degree(&total_gens, &e, total_gens.degree(i) + 1, def.line)?;
        if i >= fiber.len() && !e.is_zero() {
            return Err(Error::BaseNotClosed(def.name.clone()));
        }
        total_diff[i] = e;
    }
    let total = SullivanModel::new(total_gens, total_diff)?;
    let extension = KsExtension::from_total(fiber.clone(), total)?;
    Ok(ModelFile {
        fiber,
        extension: Some(extension),
    })
}

fn check_degree(gens: &GeneratorSet, e: &Element, degree: u32, line: usize) -> Result<()> {
    if let Some((m, _)) = e.terms().find(|(m, _)| gens.monomial_degree(m) != degree) {
        return Err(Error::parse(
            line,
            format!(
                "term `{}` has degree {}, expected {degree}",
                format_monomial(gens, m),
                gens.monomial_degree(m)
            ),
        ));
    }
    Ok(())
}

/// Writes a model, and optionally an extension of it, in canonical form.
/// Every nonzero `D` is written out in full.
pub fn write_model(fiber: &SullivanModel, extension: Option<&KsExtension>) -> String {
    let mut out = String::new();
    let gens = fiber.generators();
    for g in gens.generators() {
        out.push_str(&format!("generator {} {}\n", g.name, g.degree));
    }
    for (i, e) in fiber.differentials().iter().enumerate() {
        if !e.is_zero() {
            out.push_str(&format!("d {} = {}\n", gens.get(i).name, format_element(gens, e)));
        }
    }
    if let Some(ext) = extension {
        let total = ext.total();
        out.push_str(&format!("extend {}\n", ext.base_rank()));
        for i in 0..fiber.len() {
            let e = total.differential(i);
            if !e.is_zero() {
                out.push_str(&format!(
                    "D {} = {}\n",
                    total.generators().get(i).name,
                    format_element(total.generators(), e)
                ));
            }
        }
    }
    out
}

pub fn read_model_file(path: &std::path::Path) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}
