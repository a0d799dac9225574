//! Text and JSON input for germs.
//!
//! ```text
//! input     = { line } ;
//! line      = directive | sum | comment ;
//! directive = "@dim" int
//!           | "@remainder" "exp=(" int { "," int } ")" ( "flat=(" var { "," var } ")" | "unit" ) ;
//! sum       = [ sign ] term { sign term } ;
//! term      = factor { "*" factor } ;
//! factor    = number [ "/" int ] | var [ "^" int ] ;
//! var       = "x" int | "x" | "y" | "z" ;
//! comment   = "#" ... end of line ;
//! ```
//!
//! Sum lines accumulate, so a polynomial may span several lines. Coefficients
//! are exact: `0.25`, `1/4` and `3` are all rationals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::poly::{Remainder, TaylorModel, Term};

/// Parses either format; input starting with `{` is read as JSON.
pub fn parse_germ(input: &str) -> Result<TaylorModel> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}

#[derive(Debug)]
struct RawTerm {
    coeff: BigRational,
    powers: BTreeMap<usize, u32>,
}

#[derive(Debug)]
struct RawRemainder {
    exp: Vec<u32>,
    flat: Vec<usize>,
    unit: bool,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
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

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        let wc: Vec<char> = w.chars().collect();
        if self.chars[self.pos..].starts_with(&wc) {
            self.pos += wc.len();
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn uint<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        self.skip_ws();
        let d = self.digits();
        if d.is_empty() {
            return Err(self.err(format!("expected a non-negative integer {what}")));
        }
        if self.chars.get(self.pos) == Some(&'.') {
            return Err(self.err(format!("non-integer {what}")));
        }
        d.parse().map_err(|_| self.err(format!("{what} out of range")))
    }

    /// Unsigned decimal or integer literal.
    fn number(&mut self) -> Result<BigRational> {
        let int = self.digits();
        let mut value = BigRational::from_integer(int.parse::<BigInt>().unwrap_or_default());
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            let frac = self.digits();
            if int.is_empty() && frac.is_empty() {
                return Err(self.err("malformed number"));
            }
            if !frac.is_empty() {
                let num: BigInt = frac.parse().expect("digits");
                let den = BigInt::from(10u32).pow(frac.len() as u32);
                value += BigRational::new(num, den);
            }
        } else if int.is_empty() {
            return Err(self.err("expected a number"));
        }
        Ok(value)
    }

    /// Zero-based variable index.
    fn var(&mut self) -> Result<usize> {
        self.skip_ws();
        match self.chars.get(self.pos) {
            Some('x') => {
                self.pos += 1;
                if self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    let k: usize = self.uint("variable index")?;
                    if k == 0 {
                        return Err(self.err("variables are numbered from x1"));
                    }
                    Ok(k - 1)
                } else {
                    Ok(0)
                }
            }
            Some('y') => {
                self.pos += 1;
                Ok(1)
            }
            Some('z') => {
                self.pos += 1;
                Ok(2)
            }
            _ => Err(self.err("expected a variable")),
        }
    }

    fn is_minus(c: char) -> bool {
        c == '-' || c == '\u{2212}'
    }

    fn factor(&mut self, term: &mut RawTerm) -> Result<()> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut v = self.number()?;
                if self.eat('/') {
                    let d: u64 = self.uint("denominator")?;
                    if d == 0 {
                        return Err(self.err("zero denominator"));
                    }
                    v /= BigRational::from_integer(BigInt::from(d));
                }
                term.coeff *= v;
                Ok(())
            }
            Some('x' | 'y' | 'z') => {
                let i = self.var()?;
                let p = if self.eat('^') { self.uint("exponent")? } else { 1u32 };
                let e = term.powers.entry(i).or_insert(0);
                *e = e.checked_add(p).ok_or_else(|| self.err("exponent out of range"))?;
                Ok(())
            }
            Some(c) => Err(self.err(format!("unexpected '{c}'"))),
            None => Err(self.err("unexpected end of line")),
        }
    }

    fn sum(&mut self, out: &mut Vec<RawTerm>) -> Result<()> {
        let mut first = true;
        while !self.at_end() {
            let mut negative = false;
            let c = self.peek().expect("not at end");
            if c == '+' || Self::is_minus(c) {
                self.pos += 1;
                negative = Self::is_minus(c);
            } else if !first {
                return Err(self.err(format!("expected '+' or '-' before '{c}'")));
            }
            let mut term = RawTerm {
                coeff: BigRational::one(),
                powers: BTreeMap::new(),
            };
            self.factor(&mut term)?;
            while self.eat('*') {
                self.factor(&mut term)?;
            }
            if negative {
                term.coeff = -term.coeff;
            }
            out.push(term);
            first = false;
        }
        Ok(())
    }

    fn remainder(&mut self) -> Result<RawRemainder> {
        if !self.eat_word("exp=") {
            return Err(self.err("expected 'exp=(...)'"));
        }
        self.expect('(')?;
        let mut exp = vec![self.uint("exponent")?];
        while self.eat(',') {
            exp.push(self.uint("exponent")?);
        }
        self.expect(')')?;
        let (flat, unit) = if self.eat_word("unit") {
            (Vec::new(), true)
        } else if self.eat_word("flat=") {
            self.expect('(')?;
            let mut v = vec![self.var()?];
            while self.eat(',') {
                v.push(self.var()?);
            }
            self.expect(')')?;
            (v, false)
        } else {
            return Err(self.err("remainder must be 'unit' or 'flat=(...)'"));
        };
        if !self.at_end() {
            return Err(self.err("trailing input after remainder"));
        }
        Ok(RawRemainder { exp, flat, unit })
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

pub fn parse_text(input: &str) -> Result<TaylorModel> {
    let mut terms = Vec::new();
    let mut rems = Vec::new();
    let mut dim: Option<usize> = None;
    for (ln, raw) in input.lines().enumerate() {
        let line = strip_comment(raw);
        let mut cur = Cursor::new(line, ln + 1);
        if cur.at_end() {
            continue;
        }
        if cur.eat('@') {
            if cur.eat_word("dim") {
                let n: usize = cur.uint("dimension")?;
                if n == 0 {
                    return Err(cur.err("dimension must be at least 1"));
                }
                if !cur.at_end() {
                    return Err(cur.err("trailing input after @dim"));
                }
                dim = Some(n);
            } else if cur.eat_word("remainder") {
                let at = (cur.line, cur.pos);
                rems.push((at, cur.remainder()?));
            } else {
                return Err(cur.err("unknown directive"));
            }
        } else {
            cur.sum(&mut terms)?;
        }
    }
    let used = terms
        .iter()
        .filter_map(|t| t.powers.keys().next_back().map(|k| k + 1))
        .chain(rems.iter().flat_map(|(_, r)| r.flat.iter().map(|v| v + 1)))
        .max()
        .unwrap_or(1);
    let rem_dim = rems.first().map(|(_, r)| r.exp.len());
    let n = dim.or(rem_dim).unwrap_or(used).max(used);
    if let Some(d) = dim {
        if used > d {
            return Err(Error::DimensionMismatch { expected: d, got: used });
        }
    }
    let mut model_terms = Vec::with_capacity(terms.len());
    for t in terms {
        let mut e = vec![0u32; n];
        for (i, p) in t.powers {
            e[i] = p;
        }
        model_terms.push(Term::new(t.coeff, e));
    }
    let mut model_rems = Vec::with_capacity(rems.len());
    for ((line, column), r) in rems {
        if r.exp.len() != n {
            return Err(Error::Syntax {
                line,
                column: column + 1,
                message: format!("remainder exponent has {} entries, expected {n}", r.exp.len()),
            });
        }
        model_rems.push(if r.unit {
            Remainder::unit(r.exp)
        } else {
            Remainder::flat(r.exp, r.flat)
        });
    }
    TaylorModel::new(n, model_terms, model_rems)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonCoeff {
    Int(i64),
    Text(String),
    Frac { num: i64, den: i64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTerm {
    coeff: JsonCoeff,
    exp: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRemainder {
    exp: Vec<u32>,
    /// One-based variable indices.
    #[serde(default)]
    flat: Vec<usize>,
    #[serde(default)]
    unit: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGerm {
    dim: Option<usize>,
    terms: Option<Vec<JsonTerm>>,
    polynomial: Option<String>,
    #[serde(default)]
    remainders: Vec<JsonRemainder>,
}

fn json_coeff(c: JsonCoeff) -> Result<BigRational> {
    match c {
        JsonCoeff::Int(v) => Ok(BigRational::from_integer(v.into())),
        JsonCoeff::Frac { num, den } => {
            if den == 0 {
                Err(Error::InvalidModel("zero denominator".into()))
            } else {
                Ok(BigRational::new(num.into(), den.into()))
            }
        }
        JsonCoeff::Text(s) => {
            let m = parse_text(&s)?;
            match m.terms() {
                [] => Ok(BigRational::zero()),
                [t] if t.exp.is_zero() => Ok(t.coeff.clone()),
                _ => Err(Error::InvalidModel(format!("coefficient '{s}' is not a number"))),
            }
        }
    }
}

/// `{"terms": [{"coeff": .., "exp": [..]}], "remainders": [..]}` or
/// `{"polynomial": "<text>", "remainders": [..]}`.
pub fn parse_json(input: &str) -> Result<TaylorModel> {
    let g: JsonGerm = serde_json::from_str(input)?;
    let base = match (g.terms, g.polynomial) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidModel("give either \"terms\" or \"polynomial\", not both".into()))
        }
        (None, None) => return Err(Error::InvalidModel("missing \"terms\" or \"polynomial\"".into())),
        (Some(ts), None) => {
            let n = g
                .dim
                .or_else(|| ts.first().map(|t| t.exp.len()))
                .or_else(|| g.remainders.first().map(|r| r.exp.len()))
                .ok_or_else(|| Error::InvalidModel("cannot infer the dimension".into()))?;
            let mut terms = Vec::with_capacity(ts.len());
            for t in ts {
                terms.push(Term::new(json_coeff(t.coeff)?, t.exp));
            }
            TaylorModel::polynomial(n, terms)?
        }
        (None, Some(text)) => {
            let mut m = parse_text(&text)?;
            let want = g.dim.or_else(|| g.remainders.first().map(|r| r.exp.len()));
            if let Some(n) = want {
                if n < m.dim() {
                    return Err(Error::DimensionMismatch { expected: n, got: m.dim() });
                }
                let terms = m.terms().iter().map(|t| {
                    let mut e = t.exp.entries().to_vec();
                    e.resize(n, 0);
                    Term::new(t.coeff.clone(), e)
                });
                m = TaylorModel::polynomial(n, terms)?;
            }
            m
        }
    };
    let mut rems = Vec::with_capacity(g.remainders.len());
    for r in g.remainders {
        if r.flat.contains(&0) {
            return Err(Error::InvalidRemainder("flat variables are numbered from 1".into()));
        }
        rems.push(if r.unit {
            if !r.flat.is_empty() {
                return Err(Error::InvalidRemainder("a unit remainder cannot be flat".into()));
            }
            Remainder::unit(r.exp)
        } else {
            Remainder::flat(r.exp, r.flat.into_iter().map(|v| v - 1))
        });
    }
    TaylorModel::new(base.dim(), base.terms().to_vec(), rems)
}

fn write_coeff(out: &mut String, c: &BigRational) {
    if c.is_integer() {
        let _ = write!(out, "{}", c.numer());
    } else {
        let _ = write!(out, "{}/{}", c.numer(), c.denom());
    }
}

/// Canonical text form; `parse_text(to_text(m)) == m`.
pub fn to_text(model: &TaylorModel) -> String {
    let mut out = format!("@dim {}\n", model.dim());
    if model.terms().is_empty() {
        out.push('0');
    }
    for (k, t) in model.terms().iter().enumerate() {
        let neg = t.coeff.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        write_coeff(&mut out, &t.coeff.abs());
        for (i, &p) in t.exp.entries().iter().enumerate() {
            match p {
                0 => {}
                1 => {
                    let _ = write!(out, "*x{}", i + 1);
                }
                _ => {
                    let _ = write!(out, "*x{}^{}", i + 1, p);
                }
            }
        }
    }
    out.push('\n');
    for r in model.remainders() {
        let e: Vec<String> = r.exp.entries().iter().map(u32::to_string).collect();
        let _ = write!(out, "@remainder exp=({})", e.join(","));
        if r.is_unit {
            out.push_str(" unit\n");
        } else {
            let v: Vec<String> = r.flat_vars.iter().map(|v| format!("x{}", v + 1)).collect();
            let _ = writeln!(out, " flat=({})", v.join(","));
        }
    }
    out
}
