//! Recursive-descent parser.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or      := and ("or" and)*
//! and     := not ("and" not)*
//! not     := "not" not | compare
//! compare := sum (("<" | "<=" | ">" | ">=") sum)?
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := number | "pi" | "e" | xN | func "(" args ")" | "(" or ")"
//! ```

use std::f64::consts::{E, PI};

use super::lexer::{tokenize, Spanned, Token};
use super::{ArithOp, CmpOp, Expr, Func, Kind, LogicOp, ParseError, ParseErrorKind};

pub(crate) fn parse(source: &str, dim: usize) -> Result<(Expr, Kind), ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        at: 0,
        dim,
        end: source.len(),
    };
    let node = parser.or()?;
    if let Some(tok) = parser.tokens.get(parser.at) {
        return Err(ParseError::syntax(tok.pos, "unexpected trailing input"));
    }
    Ok((node.expr, node.kind))
}

struct Typed {
    expr: Expr,
    kind: Kind,
    pos: usize,
}

struct Parser {
    tokens: Vec<Spanned>,
    at: usize,
    dim: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|s| &s.token)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |s| s.pos)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let tok = self.tokens.get(self.at).cloned();
        if tok.is_some() {
            self.at += 1;
        }
        tok
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token::Ident(name)) if name == word)
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(ParseError::syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn or(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.and()?;
        while self.is_keyword("or") {
            self.at += 1;
            let rhs = self.and()?;
            lhs = logic(LogicOp::Or, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.not()?;
        while self.is_keyword("and") {
            self.at += 1;
            let rhs = self.not()?;
            lhs = logic(LogicOp::And, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Typed, ParseError> {
        if self.is_keyword("not") {
            let pos = self.pos();
            self.at += 1;
            let inner = self.not()?;
            expect_kind(&inner, Kind::Bool, "`not` needs a boolean operand")?;
            return Ok(Typed {
                expr: Expr::Not(Box::new(inner.expr)),
                kind: Kind::Bool,
                pos,
            });
        }
        self.compare()
    }

    fn compare(&mut self) -> Result<Typed, ParseError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(Token::Lt) => CmpOp::Lt,
            Some(Token::Le) => CmpOp::Le,
            Some(Token::Gt) => CmpOp::Gt,
            Some(Token::Ge) => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        self.at += 1;
        let rhs = self.sum()?;
        expect_kind(&lhs, Kind::Real, "comparison needs real operands")?;
        expect_kind(&rhs, Kind::Real, "comparison needs real operands")?;
        if matches!(
            self.peek(),
            Some(Token::Lt | Token::Le | Token::Gt | Token::Ge)
        ) {
            return Err(ParseError::syntax(
                self.pos(),
                "comparisons do not chain; combine them with `and`",
            ));
        }
        Ok(Typed {
            pos: lhs.pos,
            expr: Expr::Compare(op, Box::new(lhs.expr), Box::new(rhs.expr)),
            kind: Kind::Bool,
        })
    }

    fn sum(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => ArithOp::Add,
                Some(Token::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.at += 1;
            let rhs = self.product()?;
            lhs = arith(op, lhs, rhs)?;
        }
    }

    fn product(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => ArithOp::Mul,
                Some(Token::Slash) => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.at += 1;
            let rhs = self.unary()?;
            lhs = arith(op, lhs, rhs)?;
        }
    }

    fn unary(&mut self) -> Result<Typed, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            let pos = self.pos();
            self.at += 1;
            let inner = self.unary()?;
            expect_kind(&inner, Kind::Real, "negation needs a real operand")?;
            return Ok(Typed {
                expr: Expr::Neg(Box::new(inner.expr)),
                kind: Kind::Real,
                pos,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Typed, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.at += 1;
            let exponent = self.unary()?;
            return arith(ArithOp::Pow, base, exponent);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Typed, ParseError> {
        let pos = self.pos();
        let Some(tok) = self.bump() else {
            return Err(ParseError::syntax(pos, "unexpected end of input"));
        };
        match tok.token {
            Token::Num(v) => Ok(real(Expr::Num(v), pos)),
            Token::LParen => {
                let inner = self.or()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(Typed { pos, ..inner })
            }
            Token::Ident(name) => self.identifier(name, pos),
            _ => Err(ParseError::syntax(pos, "expected a value")),
        }
    }

    fn identifier(&mut self, name: String, pos: usize) -> Result<Typed, ParseError> {
        match name.as_str() {
            "pi" => return Ok(real(Expr::Num(PI), pos)),
            "e" => return Ok(real(Expr::Num(E), pos)),
            "and" | "or" | "not" => {
                return Err(ParseError::syntax(pos, format!("unexpected keyword `{name}`")))
            }
            _ => {}
        }
        if let Some(index) = variable_index(&name) {
            if index == 0 || index > self.dim {
                return Err(ParseError {
                    position: pos,
                    kind: ParseErrorKind::UnknownVariable {
                        name,
                        dim: self.dim,
                    },
                });
            }
            return Ok(real(Expr::Var(index - 1), pos));
        }
        if self.peek() != Some(&Token::LParen) {
            return Err(ParseError {
                position: pos,
                kind: ParseErrorKind::UnknownVariable {
                    name,
                    dim: self.dim,
                },
            });
        }
        let func = Func::from_name(&name).ok_or_else(|| ParseError {
            position: pos,
            kind: ParseErrorKind::UnknownFunction(name.clone()),
        })?;
        self.at += 1;
        let mut args = Vec::new();
        loop {
            let arg = self.or()?;
            expect_kind(&arg, Kind::Real, "function arguments must be real")?;
            args.push(arg.expr);
            match self.peek() {
                Some(Token::Comma) => self.at += 1,
                _ => break,
            }
        }
        self.expect(Token::RParen, "`)` or `,`")?;
        if args.len() != func.arity() {
            return Err(ParseError::syntax(
                pos,
                format!(
                    "`{}` takes {} argument(s), found {}",
                    func.name(),
                    func.arity(),
                    args.len()
                ),
            ));
        }
        Ok(real(Expr::Call(func, args), pos))
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn real(expr: Expr, pos: usize) -> Typed {
    Typed {
        expr,
        kind: Kind::Real,
        pos,
    }
}

fn expect_kind(node: &Typed, kind: Kind, msg: &str) -> Result<(), ParseError> {
    if node.kind == kind {
        Ok(())
    } else {
        Err(ParseError {
            position: node.pos,
            kind: ParseErrorKind::Type(msg.to_string()),
        })
    }
}

fn arith(op: ArithOp, lhs: Typed, rhs: Typed) -> Result<Typed, ParseError> {
    expect_kind(&lhs, Kind::Real, "arithmetic needs real operands")?;
    expect_kind(&rhs, Kind::Real, "arithmetic needs real operands")?;
    Ok(Typed {
        pos: lhs.pos,
        expr: Expr::Arith(op, Box::new(lhs.expr), Box::new(rhs.expr)),
        kind: Kind::Real,
    })
}

fn logic(op: LogicOp, lhs: Typed, rhs: Typed) -> Result<Typed, ParseError> {
    let msg = match op {
        LogicOp::And => "`and` needs boolean operands",
        LogicOp::Or => "`or` needs boolean operands",
    };
    expect_kind(&lhs, Kind::Bool, msg)?;
    expect_kind(&rhs, Kind::Bool, msg)?;
    Ok(Typed {
        pos: lhs.pos,
        expr: Expr::Logic(op, Box::new(lhs.expr), Box::new(rhs.expr)),
        kind: Kind::Bool,
    })
}
