//! Arithmetic over node coordinates, used by `expr:` data specs.
//!
//! ```text
//! expr  := sum (("<" | "<=" | ">" | ">=" | "==" | "!=") sum)?
//! sum   := prod (("+" | "-") prod)*
//! prod  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" unary)?
//! atom  := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! Comparisons yield 1 or 0. Variables: `x`, `y`, `z` (first three coordinates,
//! 0 when absent), `d` (ℓ¹ norm of the coordinates), `r` (Euclidean norm),
//! `n` (number of coordinates, the depth for tree nodes) and `t` (time, 0 for
//! static data). Constants `pi`, `e`.

use std::fmt;

use graphflow_core::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub struct ExprError(pub String);

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ExprError {}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Var {
    X,
    Y,
    Z,
    D,
    R,
    N,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
    Tanh,
    Sign,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "exp" => (Func::Exp, 1),
            "ln" => (Func::Ln, 1),
            "sqrt" => (Func::Sqrt, 1),
            "abs" => (Func::Abs, 1),
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "tanh" => (Func::Tanh, 1),
            "sign" => (Func::Sign, 1),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Op(&'static str),
    LParen,
    RParen,
    Comma,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ExprError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| ExprError(format!("bad number {text:?}")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(chars[start..i].iter().collect()));
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let op2 = ["<=", ">=", "==", "!="].into_iter().find(|o| *o == two);
            if let Some(op) = op2 {
                out.push(Tok::Op(op));
                i += 2;
                continue;
            }
            out.push(match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '+' => Tok::Op("+"),
                '-' => Tok::Op("-"),
                '*' => Tok::Op("*"),
                '/' => Tok::Op("/"),
                '^' => Tok::Op("^"),
                '<' => Tok::Op("<"),
                '>' => Tok::Op(">"),
                _ => return Err(ExprError(format!("unexpected character {c:?}"))),
            });
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat_op(&mut self, ops: &[&'static str]) -> Option<&'static str> {
        match self.peek() {
            Some(Tok::Op(o)) if ops.contains(o) => {
                let o = *o;
                self.pos += 1;
                Some(o)
            }
            _ => None,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ExprError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ExprError(format!("expected {want:?}, found {t:?}"))),
            None => Err(ExprError(format!("expected {want:?} at end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let lhs = self.sum()?;
        let op = match self.eat_op(&["<", "<=", ">", ">=", "==", "!="]) {
            Some("<") => Op::Lt,
            Some("<=") => Op::Le,
            Some(">") => Op::Gt,
            Some(">=") => Op::Ge,
            Some("==") => Op::Eq,
            Some(_) => Op::Ne,
            None => return Ok(lhs),
        };
        Ok(Node::Bin(op, Box::new(lhs), Box::new(self.sum()?)))
    }

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.prod()?;
        while let Some(o) = self.eat_op(&["+", "-"]) {
            let op = if o == "+" { Op::Add } else { Op::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.prod()?));
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(o) = self.eat_op(&["*", "/"]) {
            let op = if o == "*" { Op::Mul } else { Op::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat_op(&["-"]).is_some() {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op(&["+"]).is_some() {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.eat_op(&["^"]).is_some() {
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Name(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let (f, arity) =
                        Func::lookup(&name).ok_or_else(|| ExprError(format!("unknown function {name}")))?;
                    let mut args = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    if args.len() != arity {
                        return Err(ExprError(format!("{name} takes {arity} argument(s), got {}", args.len())));
                    }
                    return Ok(Node::Call(f, args));
                }
                Ok(match name.as_str() {
                    "x" => Node::Var(Var::X),
                    "y" => Node::Var(Var::Y),
                    "z" => Node::Var(Var::Z),
                    "d" => Node::Var(Var::D),
                    "r" => Node::Var(Var::R),
                    "n" => Node::Var(Var::N),
                    "t" => Node::Var(Var::T),
                    "pi" => Node::Num(std::f64::consts::PI),
                    "e" => Node::Num(std::f64::consts::E),
                    _ => return Err(ExprError(format!("unknown variable {name}"))),
                })
            }
            Some(t) => Err(ExprError(format!("unexpected token {t:?}"))),
            None => Err(ExprError("unexpected end of expression".into())),
        }
    }
}

struct Env<'a> {
    coords: &'a [i64],
    t: f64,
}

fn eval(node: &Node, env: &Env<'_>) -> f64 {
    let c = |i: usize| env.coords.get(i).map_or(0.0, |&v| v as f64);
    match node {
        Node::Num(v) => *v,
        Node::Var(v) => match v {
            Var::X => c(0),
            Var::Y => c(1),
            Var::Z => c(2),
            Var::D => env.coords.iter().map(|&v| (v as f64).abs()).sum(),
            Var::R => env.coords.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt(),
            Var::N => env.coords.len() as f64,
            Var::T => env.t,
        },
        Node::Neg(a) => -eval(a, env),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            let truth = |p: bool| if p { 1.0 } else { 0.0 };
            match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => a / b,
                Op::Pow => a.powf(b),
                Op::Lt => truth(a < b),
                Op::Le => truth(a <= b),
                Op::Gt => truth(a > b),
                Op::Ge => truth(a >= b),
                Op::Eq => truth(a == b),
                Op::Ne => truth(a != b),
            }
        }
        Node::Call(f, args) => {
            let a = eval(&args[0], env);
            match f {
                Func::Exp => a.exp(),
                Func::Ln => a.ln(),
                Func::Sqrt => a.sqrt(),
                Func::Abs => a.abs(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tanh => a.tanh(),
                // sign(0) = 0, unlike f64::signum
                Func::Sign => {
                    if a > 0.0 {
                        1.0
                    } else if a < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                }
                Func::Min => a.min(eval(&args[1], env)),
                Func::Max => a.max(eval(&args[1], env)),
            }
        }
    }
}

fn uses_time(node: &Node) -> bool {
    match node {
        Node::Var(Var::T) => true,
        Node::Num(_) | Node::Var(_) => false,
        Node::Neg(a) => uses_time(a),
        Node::Bin(_, a, b) => uses_time(a) || uses_time(b),
        Node::Call(_, args) => args.iter().any(uses_time),
    }
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr, ExprError> {
        let mut p = Parser { toks: tokenize(s)?, pos: 0 };
        let root = p.expr()?;
        if let Some(t) = p.peek() {
            return Err(ExprError(format!("trailing input at {t:?}")));
        }
        Ok(Expr { root })
    }

    pub fn eval(&self, x: &NodeId, t: f64) -> f64 {
        eval(&self.root, &Env { coords: x.coords(), t })
    }

    pub fn depends_on_time(&self) -> bool {
        uses_time(&self.root)
    }
}
