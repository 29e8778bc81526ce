//! Closed-form expression strings for run configs: the binary
//! operators + − * / ^, unary minus, parentheses, the functions exp,
//! sin, cos, abs, and the variables t, x, y, v, u (x, y position
//! components; v, u velocity components).  The Unicode spellings ×
//! and − are accepted as aliases for * and -.
//!
//! Expressions are parsed once into a small tree and evaluated with
//! plain f64 arithmetic; division by zero and similar follow IEEE
//! semantics, and downstream coefficient validation rejects
//! non-finite values where they matter.  `needs_dim2` reports whether
//! y or u occurs, so one-dimensional runs can refuse an expression at
//! bind time instead of silently reading zeros.

use std::error::Error;
use std::fmt;

use crate::transforms::PhaseState;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprError {
    /// Byte position and description of a tokenizer or parser failure.
    Parse { pos: usize, msg: String },
    /// An identifier that is neither a variable nor a known function.
    UnknownName { pos: usize, name: String },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Parse { pos, msg } => write!(f, "parse error at byte {pos}: {msg}"),
            ExprError::UnknownName { pos, name } => {
                write!(f, "unknown name `{name}` at byte {pos}; variables are t, x, y, v, u and functions are exp, sin, cos, abs")
            }
        }
    }
}

impl Error for ExprError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X,
    Y,
    V,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fun {
    Exp,
    Sin,
    Cos,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Fun(Fun, Box<Node>),
}

/// A parsed expression; keeps its source text for error messages and
/// reproducibility records.
#[derive(Debug, Clone)]
pub struct Expr {
    src: String,
    root: Node,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens: &tokens, cursor: 0, src_len: src.len() };
        let root = p.expression(0)?;
        if let Some(&(pos, _)) = p.peek() {
            return Err(ExprError::Parse { pos, msg: "unexpected trailing input".into() });
        }
        Ok(Expr { src: src.to_string(), root })
    }

    pub fn eval(&self, t: f64, x: [f64; 2], v: [f64; 2]) -> f64 {
        eval_node(&self.root, t, x, v)
    }

    pub fn eval_state(&self, z: &PhaseState) -> f64 {
        self.eval(z.t, z.x, z.v)
    }

    /// True when the expression reads y or u, the second position or
    /// velocity component.
    pub fn needs_dim2(&self) -> bool {
        uses_second(&self.root)
    }
}

fn eval_node(n: &Node, t: f64, x: [f64; 2], v: [f64; 2]) -> f64 {
    match n {
        Node::Num(c) => *c,
        Node::Var(Var::T) => t,
        Node::Var(Var::X) => x[0],
        Node::Var(Var::Y) => x[1],
        Node::Var(Var::V) => v[0],
        Node::Var(Var::U) => v[1],
        Node::Neg(a) => -eval_node(a, t, x, v),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval_node(a, t, x, v), eval_node(b, t, x, v));
            match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => a / b,
                Op::Pow => a.powf(b),
            }
        }
        Node::Fun(f, a) => {
            let a = eval_node(a, t, x, v);
            match f {
                Fun::Exp => a.exp(),
                Fun::Sin => a.sin(),
                Fun::Cos => a.cos(),
                Fun::Abs => a.abs(),
            }
        }
    }
}

fn uses_second(n: &Node) -> bool {
    match n {
        Node::Num(_) => false,
        Node::Var(v) => matches!(v, Var::Y | Var::U),
        Node::Neg(a) | Node::Fun(_, a) => uses_second(a),
        Node::Bin(_, a, b) => uses_second(a) || uses_second(b),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let pos = i;
        let ch = src[i..].chars().next().unwrap();
        match ch {
            c if c.is_whitespace() => i += c.len_utf8(),
            '+' => {
                out.push((pos, Tok::Plus));
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push((pos, Tok::Minus));
                i += ch.len_utf8();
            }
            '*' | '\u{00d7}' => {
                out.push((pos, Tok::Star));
                i += ch.len_utf8();
            }
            '/' => {
                out.push((pos, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((pos, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                let mut saw_digit = false;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                    saw_digit = true;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                        saw_digit = true;
                    }
                }
                if !saw_digit {
                    return Err(ExprError::Parse { pos, msg: "lone `.` is not a number".into() });
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    let digits = k;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    // only claim the exponent if digits follow
                    if k > digits {
                        j = k;
                    }
                }
                let text = &src[i..j];
                let value: f64 = text.parse().map_err(|_| ExprError::Parse {
                    pos,
                    msg: format!("malformed number `{text}`"),
                })?;
                out.push((pos, Tok::Num(value)));
                i = j;
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((pos, Tok::Name(src[i..j].to_string())));
                i = j;
            }
            other => {
                return Err(ExprError::Parse { pos, msg: format!("unexpected character `{other}`") })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Tok)],
    cursor: usize,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.tokens.get(self.cursor)
    }

    fn next(&mut self) -> Option<&(usize, Tok)> {
        let t = self.tokens.get(self.cursor);
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn end_pos(&self) -> usize {
        self.src_len
    }

    /// Pratt loop: binding powers +/− (1,2), *// (3,4), unary − 5,
    /// ^ (8,7) so exponentiation is right-associative and binds the
    /// unary minus loosely: -x^2 reads -(x^2).
    fn expression(&mut self, min_bp: u8) -> Result<Node, ExprError> {
        let mut lhs = match self.next() {
            None => {
                return Err(ExprError::Parse {
                    pos: self.end_pos(),
                    msg: "expected an operand".into(),
                })
            }
            Some(&(_, Tok::Num(v))) => Node::Num(v),
            Some((pos, Tok::Name(name))) => {
                let (pos, name) = (*pos, name.clone());
                self.name_operand(pos, name)?
            }
            Some(&(_, Tok::Minus)) => {
                let operand = self.expression(5)?;
                Node::Neg(Box::new(operand))
            }
            Some(&(_, Tok::LParen)) => {
                let inner = self.expression(0)?;
                match self.next() {
                    Some(&(_, Tok::RParen)) => inner,
                    Some(&(pos, _)) => {
                        return Err(ExprError::Parse { pos, msg: "expected `)`".into() })
                    }
                    None => {
                        return Err(ExprError::Parse {
                            pos: self.end_pos(),
                            msg: "unclosed `(`".into(),
                        })
                    }
                }
            }
            Some(&(pos, _)) => {
                return Err(ExprError::Parse { pos, msg: "expected an operand".into() })
            }
        };

        loop {
            let (op, lbp, rbp) = match self.peek() {
                Some(&(_, Tok::Plus)) => (Op::Add, 1, 2),
                Some(&(_, Tok::Minus)) => (Op::Sub, 1, 2),
                Some(&(_, Tok::Star)) => (Op::Mul, 3, 4),
                Some(&(_, Tok::Slash)) => (Op::Div, 3, 4),
                Some(&(_, Tok::Caret)) => (Op::Pow, 8, 7),
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.cursor += 1;
            let rhs = self.expression(rbp)?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn name_operand(&mut self, pos: usize, name: String) -> Result<Node, ExprError> {
        match name.as_str() {
            "t" => return Ok(Node::Var(Var::T)),
            "x" => return Ok(Node::Var(Var::X)),
            "y" => return Ok(Node::Var(Var::Y)),
            "v" => return Ok(Node::Var(Var::V)),
            "u" => return Ok(Node::Var(Var::U)),
            _ => {}
        }
        let fun = match name.as_str() {
            "exp" => Fun::Exp,
            "sin" => Fun::Sin,
            "cos" => Fun::Cos,
            "abs" => Fun::Abs,
            _ => return Err(ExprError::UnknownName { pos, name }),
        };
        match self.next() {
            Some(&(_, Tok::LParen)) => {}
            Some(&(pos, _)) => {
                return Err(ExprError::Parse {
                    pos,
                    msg: format!("function `{name}` needs parenthesized argument"),
                })
            }
            None => {
                return Err(ExprError::Parse {
                    pos: self.end_pos(),
                    msg: format!("function `{name}` needs parenthesized argument"),
                })
            }
        }
        let arg = self.expression(0)?;
        match self.next() {
            Some(&(_, Tok::RParen)) => Ok(Node::Fun(fun, Box::new(arg))),
            Some(&(pos, _)) => Err(ExprError::Parse { pos, msg: "expected `)`".into() }),
            None => Err(ExprError::Parse { pos: self.end_pos(), msg: "unclosed `(`".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval0(src: &str) -> f64 {
        Expr::parse(src).unwrap().eval(0.0, [0.0; 2], [0.0; 2])
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval0("2+3*4"), 14.0);
        assert_eq!(eval0("(2+3)*4"), 20.0);
        assert_eq!(eval0("6/3/2"), 1.0);
        assert_eq!(eval0("2^3^2"), 512.0);
        assert_eq!(eval0("-2^2"), -4.0);
        assert_eq!(eval0("(-2)^2"), 4.0);
        assert_eq!(eval0("2*-3"), -6.0);
        assert_eq!(eval0("--2"), 2.0);
        assert_eq!(eval0("2-3-4"), -5.0);
    }

    #[test]
    fn numbers_in_all_spellings() {
        assert_eq!(eval0("1.5"), 1.5);
        assert_eq!(eval0(".5"), 0.5);
        assert_eq!(eval0("2."), 2.0);
        assert_eq!(eval0("1e-3"), 1e-3);
        assert_eq!(eval0("2.5E+2"), 250.0);
        // `e` without digits is multiplication-free trailing garbage
        assert!(Expr::parse("1e").is_err());
    }

    #[test]
    fn functions_compose() {
        assert_eq!(eval0("exp(0)"), 1.0);
        assert_eq!(eval0("sin(0)"), 0.0);
        assert_eq!(eval0("cos(0)"), 1.0);
        assert_eq!(eval0("abs(-2)"), 2.0);
        let e = Expr::parse("exp(sin(t) + cos(t))").unwrap();
        let t = 0.7;
        assert!((e.eval(t, [0.0; 2], [0.0; 2]) - (t.sin() + t.cos()).exp()).abs() < 1e-15);
    }

    #[test]
    fn variables_bind_to_phase_coordinates() {
        let e = Expr::parse("t + 2*x + 3*y + 5*v + 7*u").unwrap();
        assert_eq!(e.eval(1.0, [10.0, 100.0], [1000.0, 10000.0]), 1.0 + 20.0 + 300.0 + 5000.0 + 70000.0);
        let z = PhaseState::new_2d(1.0, [10.0, 100.0], [1000.0, 10000.0]);
        assert_eq!(e.eval_state(&z), 75321.0);
    }

    #[test]
    fn dimension_requirements_are_visible() {
        assert!(!Expr::parse("t + x*v").unwrap().needs_dim2());
        assert!(Expr::parse("x + u").unwrap().needs_dim2());
        assert!(Expr::parse("abs(y)").unwrap().needs_dim2());
        assert!(!Expr::parse("exp(v)").unwrap().needs_dim2());
    }

    #[test]
    fn unicode_operator_aliases() {
        assert_eq!(eval0("3 \u{00d7} 2 \u{2212} 1"), 5.0);
    }

    #[test]
    fn parse_errors_carry_positions() {
        for bad in ["", "2 +", "(1", "1)", "sin 3", "1 2", "z", "foo(1)", "2..5", "$", "."] {
            let err = Expr::parse(bad);
            assert!(err.is_err(), "`{bad}` should not parse");
        }
        match Expr::parse("a + 1") {
            Err(ExprError::UnknownName { pos: 0, name }) => assert_eq!(name, "a"),
            other => panic!("expected unknown name, got {other:?}"),
        }
        match Expr::parse("1 + $") {
            Err(ExprError::Parse { pos: 4, .. }) => {}
            other => panic!("expected parse error at byte 4, got {other:?}"),
        }
        // display keeps the source text
        let e = Expr::parse("2 + 2").unwrap();
        assert_eq!(e.to_string(), "2 + 2");
    }

    #[test]
    fn ieee_semantics_for_singular_arithmetic() {
        assert!(eval0("1/0").is_infinite());
        assert!(eval0("0/0").is_nan());
        assert_eq!(eval0("0^0"), 1.0);
    }
}
