//! Text form of region construction trees.
//!
//! ```text
//! region := "box" "(" interval ("," interval)* ")"
//!         | "ball" "(" vector "," number ")"
//!         | "pred" "(" region "," <boolean expression> ")"
//!         | ("union" | "intersect" | "diff") "(" region "," region ")"
//! interval := "[" number "," number "]"
//! vector   := "[" number ("," number)* "]"
//! ```
//!
//! Numbers are constant expressions, so `box([-pi, pi])` is accepted.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::Region;
use crate::error::{Error, Result};
use crate::expr::{self, ParseError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RegionSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Predicate { within: Box<RegionSpec>, source: String },
    Union(Box<RegionSpec>, Box<RegionSpec>),
    Intersection(Box<RegionSpec>, Box<RegionSpec>),
    Difference(Box<RegionSpec>, Box<RegionSpec>),
}

impl RegionSpec {
    pub fn unit_box(dim: usize) -> Self {
        RegionSpec::Box {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RegionSpec::Box { lo, .. } => lo.len(),
            RegionSpec::Ball { center, .. } => center.len(),
            RegionSpec::Predicate { within, .. } => within.dim(),
            RegionSpec::Union(a, _) | RegionSpec::Intersection(a, _) | RegionSpec::Difference(a, _) => {
                a.dim()
            }
        }
    }

    pub(crate) fn build(&self) -> Result<Region> {
        match self {
            RegionSpec::Box { lo, hi } => Region::boxed(lo.clone(), hi.clone()),
            RegionSpec::Ball { center, radius } => Region::ball(center.clone(), *radius),
            RegionSpec::Predicate { within, source } => {
                let within = within.build()?;
                let predicate = expr::parse_predicate(source, within.dim())?;
                Region::predicate(&within, predicate)
            }
            RegionSpec::Union(a, b) => a.build()?.union(&b.build()?),
            RegionSpec::Intersection(a, b) => a.build()?.intersect(&b.build()?),
            RegionSpec::Difference(a, b) => a.build()?.difference(&b.build()?),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, values: &[f64]) -> fmt::Result {
    f.write_str("[")?;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v:?}")?;
    }
    f.write_str("]")
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionSpec::Box { lo, hi } => {
                f.write_str("box(")?;
                for (i, (a, b)) in lo.iter().zip(hi).enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "[{a:?}, {b:?}]")?;
                }
                f.write_str(")")
            }
            RegionSpec::Ball { center, radius } => {
                f.write_str("ball(")?;
                write_list(f, center)?;
                write!(f, ", {radius:?})")
            }
            RegionSpec::Predicate { within, source } => write!(f, "pred({within}, {source})"),
            RegionSpec::Union(a, b) => write!(f, "union({a}, {b})"),
            RegionSpec::Intersection(a, b) => write!(f, "intersect({a}, {b})"),
            RegionSpec::Difference(a, b) => write!(f, "diff({a}, {b})"),
        }
    }
}

impl FromStr for RegionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cursor = Cursor { src: s, at: 0 };
        let spec = cursor.region()?;
        cursor.skip_ws();
        if cursor.at != s.len() {
            return Err(cursor.error("unexpected trailing input"));
        }
        Ok(spec)
    }
}

struct Cursor<'a> {
    src: &'a str,
    at: usize,
}

impl Cursor<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(ParseError::syntax(self.at, format!("region: {msg}")))
    }

    fn skip_ws(&mut self) {
        while self.src[self.at..].starts_with(char::is_whitespace) {
            self.at += 1;
        }
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.src[self.at..].starts_with(c) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.at..].chars().next()
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.at;
        while self.src[self.at..].starts_with(|c: char| c.is_ascii_alphabetic()) {
            self.at += 1;
        }
        &self.src[start..self.at]
    }

    /// Text up to the next `,` `]` or `)` at nesting depth zero.
    fn raw_until_delim(&mut self) -> &str {
        let start = self.at;
        let mut depth = 0i32;
        for (i, c) in self.src[start..].char_indices() {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' if depth == 0 => {
                    self.at = start + i;
                    return &self.src[start..self.at];
                }
                ')' | ']' => depth -= 1,
                ',' if depth == 0 => {
                    self.at = start + i;
                    return &self.src[start..self.at];
                }
                _ => {}
            }
        }
        self.at = self.src.len();
        &self.src[start..]
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.at;
        let text = self.raw_until_delim().trim().to_string();
        let value = expr::parse_real(&text, 0)
            .map_err(|e| {
                Error::Parse(ParseError {
                    position: start + e.position,
                    kind: e.kind,
                })
            })?
            .eval_real(&[])?;
        Ok(value)
    }

    fn vector(&mut self) -> Result<Vec<f64>> {
        self.eat('[')?;
        let mut out = vec![self.number()?];
        while self.peek() == Some(',') {
            self.at += 1;
            out.push(self.number()?);
        }
        self.eat(']')?;
        Ok(out)
    }

    fn region(&mut self) -> Result<RegionSpec> {
        let start = self.at;
        let word = self.word().to_string();
        self.eat('(')?;
        let spec = match word.as_str() {
            "box" => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                loop {
                    let interval = self.vector()?;
                    if interval.len() != 2 {
                        return Err(self.error("box intervals are `[lo, hi]`"));
                    }
                    lo.push(interval[0]);
                    hi.push(interval[1]);
                    if self.peek() == Some(',') {
                        self.at += 1;
                    } else {
                        break;
                    }
                }
                RegionSpec::Box { lo, hi }
            }
            "ball" => {
                let center = self.vector()?;
                self.eat(',')?;
                let radius = self.number()?;
                RegionSpec::Ball { center, radius }
            }
            "pred" => {
                let within = self.region()?;
                self.eat(',')?;
                self.skip_ws();
                let mut depth = 0i32;
                let begin = self.at;
                let mut end = None;
                for (i, c) in self.src[begin..].char_indices() {
                    match c {
                        '(' => depth += 1,
                        ')' if depth == 0 => {
                            end = Some(begin + i);
                            break;
                        }
                        ')' => depth -= 1,
                        _ => {}
                    }
                }
                let end = end.ok_or_else(|| self.error("unterminated predicate"))?;
                let source = self.src[begin..end].trim().to_string();
                self.at = end;
                RegionSpec::Predicate {
                    within: Box::new(within),
                    source,
                }
            }
            "union" | "intersect" | "diff" => {
                let a = Box::new(self.region()?);
                self.eat(',')?;
                let b = Box::new(self.region()?);
                match word.as_str() {
                    "union" => RegionSpec::Union(a, b),
                    "intersect" => RegionSpec::Intersection(a, b),
                    _ => RegionSpec::Difference(a, b),
                }
            }
            _ => {
                self.at = start;
                return Err(self.error(&format!("unknown region kind `{word}`")));
            }
        };
        self.eat(')')?;
        Ok(spec)
    }
}
