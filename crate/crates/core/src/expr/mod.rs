//! A small expression language for real-valued fields and boolean region
//! predicates over the variables `x1..xn`.
//!
//! Parsed expressions are immutable and evaluate left to right, so repeated
//! evaluation at the same point is bit-reproducible. Domain errors such as
//! `log(-1)` or `1/0` are reported as [`EvalError`]s instead of producing NaN.

mod lexer;
mod parser;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    Bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

/// Abstract syntax tree. Variables are stored zero-based (`x1` is `Var(0)`).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Compare(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Logic(LogicOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownVariable { name: String, dim: usize },
    UnknownFunction(String),
    Type(String),
}

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{} at column {}", describe_kind(.kind), .position + 1)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

fn describe_kind(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Syntax(msg) => format!("syntax error: {msg}"),
        ParseErrorKind::UnknownVariable { name, dim } => {
            format!("unknown variable {name} (dimension is {dim})")
        }
        ParseErrorKind::UnknownFunction(name) => format!("unknown function `{name}`"),
        ParseErrorKind::Type(msg) => format!("type error: {msg}"),
    }
}

impl ParseError {
    pub(crate) fn syntax(position: usize, msg: impl Into<String>) -> Self {
        ParseError {
            position,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("`{op}` is undefined at {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("`{op}` produced a non-finite value")]
    NonFinite { op: &'static str },
    #[error("value {value} is below the declared positivity floor {floor}")]
    FloorViolated { value: f64, floor: f64 },
    #[error("point has {found} coordinates, expected at least {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("expression is not {0}-valued")]
    WrongKind(&'static str),
}

fn finite(value: f64, op: &'static str) -> Result<f64, EvalError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite { op })
    }
}

impl Expr {
    pub fn kind(&self) -> Kind {
        match self {
            Expr::Compare(..) | Expr::Not(_) | Expr::Logic(..) => Kind::Bool,
            _ => Kind::Real,
        }
    }

    /// Largest zero-based variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Not(a) => a.max_var(),
            Expr::Arith(_, a, b) | Expr::Compare(_, a, b) | Expr::Logic(_, a, b) => {
                a.max_var().max(b.max_var())
            }
            Expr::Call(_, args) => args.iter().filter_map(Expr::max_var).max(),
        }
    }

    pub fn eval_real(&self, p: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(i) => p.get(*i).copied().ok_or(EvalError::PointDimension {
                expected: i + 1,
                found: p.len(),
            }),
            Expr::Neg(a) => Ok(-a.eval_real(p)?),
            Expr::Arith(op, a, b) => {
                let x = a.eval_real(p)?;
                let y = b.eval_real(p)?;
                match op {
                    ArithOp::Add => finite(x + y, "+"),
                    ArithOp::Sub => finite(x - y, "-"),
                    ArithOp::Mul => finite(x * y, "*"),
                    ArithOp::Div => {
                        if y == 0.0 {
                            Err(EvalError::DivisionByZero)
                        } else {
                            finite(x / y, "/")
                        }
                    }
                    ArithOp::Pow => {
                        let v = x.powf(y);
                        if v.is_nan() {
                            Err(EvalError::Domain { op: "^", arg: x })
                        } else {
                            finite(v, "^")
                        }
                    }
                }
            }
            Expr::Call(func, args) => {
                let x = args[0].eval_real(p)?;
                match func {
                    Func::Sin => Ok(x.sin()),
                    Func::Cos => Ok(x.cos()),
                    Func::Exp => finite(x.exp(), "exp"),
                    Func::Log => {
                        if x <= 0.0 {
                            Err(EvalError::Domain { op: "log", arg: x })
                        } else {
                            Ok(x.ln())
                        }
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            Err(EvalError::Domain { op: "sqrt", arg: x })
                        } else {
                            Ok(x.sqrt())
                        }
                    }
                    Func::Abs => Ok(x.abs()),
                    Func::Min => Ok(x.min(args[1].eval_real(p)?)),
                    Func::Max => Ok(x.max(args[1].eval_real(p)?)),
                }
            }
            Expr::Compare(..) | Expr::Not(_) | Expr::Logic(..) => Err(EvalError::WrongKind("real")),
        }
    }

    pub fn eval_bool(&self, p: &[f64]) -> Result<bool, EvalError> {
        match self {
            Expr::Compare(op, a, b) => {
                let x = a.eval_real(p)?;
                let y = b.eval_real(p)?;
                Ok(match op {
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                })
            }
            Expr::Not(a) => Ok(!a.eval_bool(p)?),
            // short-circuit keeps `x1 > 0 and log(x1) < 1` well-defined
            Expr::Logic(LogicOp::And, a, b) => Ok(a.eval_bool(p)? && b.eval_bool(p)?),
            Expr::Logic(LogicOp::Or, a, b) => Ok(a.eval_bool(p)? || b.eval_bool(p)?),
            _ => Err(EvalError::WrongKind("boolean")),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Logic(LogicOp::Or, ..) => 1,
            Expr::Logic(LogicOp::And, ..) => 2,
            Expr::Not(_) => 3,
            Expr::Compare(..) => 4,
            Expr::Arith(ArithOp::Add | ArithOp::Sub, ..) => 5,
            Expr::Arith(ArithOp::Mul | ArithOp::Div, ..) => 6,
            Expr::Neg(_) => 7,
            Expr::Arith(ArithOp::Pow, ..) => 8,
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => 7,
            _ => 9,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "-{:?}", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 7)
            }
            Expr::Not(a) => {
                f.write_str("not ")?;
                write_child(f, a, 3)
            }
            Expr::Arith(op, a, b) => {
                let (sym, lp, rp) = match op {
                    ArithOp::Add => (" + ", 5, 6),
                    ArithOp::Sub => (" - ", 5, 6),
                    ArithOp::Mul => ("*", 6, 7),
                    ArithOp::Div => ("/", 6, 7),
                    ArithOp::Pow => ("^", 9, 7),
                };
                write_child(f, a, lp)?;
                f.write_str(sym)?;
                write_child(f, b, rp)
            }
            Expr::Compare(op, a, b) => {
                let sym = match op {
                    CmpOp::Lt => " < ",
                    CmpOp::Le => " <= ",
                    CmpOp::Gt => " > ",
                    CmpOp::Ge => " >= ",
                };
                write_child(f, a, 5)?;
                f.write_str(sym)?;
                write_child(f, b, 5)
            }
            Expr::Logic(op, a, b) => {
                let (sym, lp, rp) = match op {
                    LogicOp::Or => (" or ", 1, 2),
                    LogicOp::And => (" and ", 2, 3),
                };
                write_child(f, a, lp)?;
                f.write_str(sym)?;
                write_child(f, b, rp)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parse a real-valued expression over `x1..x{dim}`.
pub fn parse_real(source: &str, dim: usize) -> Result<Expr, ParseError> {
    let (expr, kind) = parser::parse(source, dim)?;
    if kind != Kind::Real {
        return Err(ParseError {
            position: 0,
            kind: ParseErrorKind::Type("field must be real-valued, found a boolean expression".into()),
        });
    }
    Ok(expr)
}

/// A boolean membership test parsed from text.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    dim: usize,
    expr: Expr,
}

impl Predicate {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, p: &[f64]) -> Result<bool, EvalError> {
        self.expr.eval_bool(p)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

pub fn parse_predicate(source: &str, dim: usize) -> Result<Predicate, ParseError> {
    let (expr, kind) = parser::parse(source, dim)?;
    if kind != Kind::Bool {
        return Err(ParseError {
            position: 0,
            kind: ParseErrorKind::Type("predicate must be boolean, found a real-valued expression".into()),
        });
    }
    Ok(Predicate { dim, expr })
}
