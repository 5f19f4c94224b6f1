//! A small exact expression language used to state family formulas as data.
//!
//! Values are rationals, booleans or lists of rationals. Operators: `+ - * / %`,
//! `^` (integer exponent), comparisons, `a | b` (a divides b, both integers,
//! a nonzero), `&&`, `||`, `!`. Functions: `lcm gcd min max floor ceil abs
//! rad int binom if len`, and the binders `sum prod lcmof gcdof all any` taking
//! `(i, lo, hi, body)`. Lists are indexed from 1 with `c[i]`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, Integer, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Val {
    Num(Rational),
    Bool(bool),
    List(Arc<Vec<Rational>>),
}

impl Val {
    pub fn num(&self) -> Result<&Rational> {
        match self {
            Val::Num(r) => Ok(r),
            other => Err(Error::Domain(format!("expected a number, got {other}"))),
        }
    }
    pub fn boolean(&self) -> Result<bool> {
        match self {
            Val::Bool(b) => Ok(*b),
            other => Err(Error::Domain(format!("expected a boolean, got {other}"))),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Num(r) => write!(f, "{r}"),
            Val::Bool(b) => write!(f, "{b}"),
            Val::List(l) => {
                write!(f, "[")?;
                for (i, v) in l.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Pow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Divides,
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Rational),
    Var(String),
    Index(String, Box<Expr>),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    Bind(String, String, Box<Expr>, Box<Expr>, Box<Expr>),
}

/// Variable bindings, searched from the most recent.
#[derive(Debug, Clone, Default)]
pub struct Env {
    vars: Vec<(String, Val)>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }
    pub fn set(&mut self, name: &str, v: Val) {
        self.vars.push((name.to_string(), v));
    }
    pub fn get(&self, name: &str) -> Option<&Val> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }
    pub fn pop(&mut self) {
        self.vars.pop();
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Integer),
    Ident(String),
    Op(&'static str),
}

const OPS: [&str; 21] = [
    "&&", "||", "==", "!=", "<=", ">=", "+", "-", "*", "/", "%", "^", "<", ">", "|", "!", "(", ")", "[", "]", ",",
];

fn lex(src: &str) -> Result<Vec<Tok>> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    'outer: while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(src[s..i].parse().unwrap()));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < b.len() && ((b[i] as char).is_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Tok::Ident(src[s..i].to_string()));
            continue;
        }
        for op in OPS {
            if src[i..].starts_with(op) {
                out.push(Tok::Op(op));
                i += op.len();
                continue 'outer;
            }
        }
        return Err(Error::Parse(format!("unexpected character {c:?} in {src:?}")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

const BINDERS: [&str; 6] = ["sum", "prod", "lcmof", "gcdof", "all", "any"];

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn eat(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Op(o)) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, op: &str) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {op:?} at token {} in {:?}", self.pos, self.src)))
        }
    }

    fn or(&mut self) -> Result<Expr> {
        let mut l = self.and()?;
        while self.eat("||") {
            l = Expr::Bin(BinOp::Or, Box::new(l), Box::new(self.and()?));
        }
        Ok(l)
    }
    fn and(&mut self) -> Result<Expr> {
        let mut l = self.cmp()?;
        while self.eat("&&") {
            l = Expr::Bin(BinOp::And, Box::new(l), Box::new(self.cmp()?));
        }
        Ok(l)
    }
    fn cmp(&mut self) -> Result<Expr> {
        let l = self.add()?;
        let op = match self.peek() {
            Some(Tok::Op("==")) => BinOp::Eq,
            Some(Tok::Op("!=")) => BinOp::Ne,
            Some(Tok::Op("<")) => BinOp::Lt,
            Some(Tok::Op("<=")) => BinOp::Le,
            Some(Tok::Op(">")) => BinOp::Gt,
            Some(Tok::Op(">=")) => BinOp::Ge,
            Some(Tok::Op("|")) => BinOp::Divides,
            _ => return Ok(l),
        };
        self.pos += 1;
        let r = self.add()?;
        Ok(Expr::Bin(op, Box::new(l), Box::new(r)))
    }
    fn add(&mut self) -> Result<Expr> {
        let mut l = self.mul()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(l);
            };
            l = Expr::Bin(op, Box::new(l), Box::new(self.mul()?));
        }
    }
    fn mul(&mut self) -> Result<Expr> {
        let mut l = self.unary()?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/") {
                BinOp::Div
            } else if self.eat("%") {
                BinOp::Rem
            } else {
                return Ok(l);
            };
            l = Expr::Bin(op, Box::new(l), Box::new(self.unary()?));
        }
    }
    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat("!") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat("^") {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }
    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Lit(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat("(") {
                    if BINDERS.contains(&name.as_str()) {
                        let var = match self.peek().cloned() {
                            Some(Tok::Ident(v)) => v,
                            _ => return Err(Error::Parse(format!("{name} needs an index variable in {:?}", self.src))),
                        };
                        self.pos += 1;
                        self.expect(",")?;
                        let lo = self.or()?;
                        self.expect(",")?;
                        let hi = self.or()?;
                        self.expect(",")?;
                        let body = self.or()?;
                        self.expect(")")?;
                        return Ok(Expr::Bind(name, var, Box::new(lo), Box::new(hi), Box::new(body)));
                    }
                    let mut args = Vec::new();
                    if !self.eat(")") {
                        loop {
                            args.push(self.or()?);
                            if self.eat(")") {
                                break;
                            }
                            self.expect(",")?;
                        }
                    }
                    return Ok(Expr::Call(name, args));
                }
                if self.eat("[") {
                    let idx = self.or()?;
                    self.expect("]")?;
                    return Ok(Expr::Index(name, Box::new(idx)));
                }
                Ok(Expr::Var(name))
            }
            Some(Tok::Op("(")) => {
                self.pos += 1;
                let e = self.or()?;
                self.expect(")")?;
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?} in {:?}", self.src))),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, src };
    let e = p.or()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {src:?}")));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// evaluation

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

fn as_int(r: &Rational, what: &str) -> Result<Integer> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        err(format!("{what}: {r} is not an integer"))
    }
}

fn small(r: &Rational, what: &str) -> Result<i64> {
    as_int(r, what)?.to_i64().ok_or_else(|| Error::Domain(format!("{what}: {r} out of range")))
}

fn pow(b: &Rational, e: &Rational) -> Result<Rational> {
    let e = small(e, "exponent")?;
    if e.unsigned_abs() > 4096 {
        return err("exponent too large");
    }
    if b.is_zero() && e < 0 {
        return err("zero to a negative power");
    }
    let p = num_traits::pow(b.clone(), e.unsigned_abs() as usize);
    Ok(if e < 0 { p.recip() } else { p })
}

fn divides(a: &Rational, b: &Rational) -> bool {
    if !a.is_integer() || !b.is_integer() || a.is_zero() {
        return false;
    }
    (b.to_integer() % a.to_integer()).is_zero()
}

pub fn eval(e: &Expr, env: &mut Env) -> Result<Val> {
    Ok(match e {
        Expr::Lit(r) => Val::Num(r.clone()),
        Expr::Var(n) => env.get(n).cloned().ok_or_else(|| Error::Domain(format!("unbound name {n}")))?,
        Expr::Index(n, i) => {
            let i = small(eval(i, env)?.num()?, "index")?;
            match env.get(n) {
                Some(Val::List(l)) => {
                    if i < 1 || i as usize > l.len() {
                        return err(format!("index {n}[{i}] out of range 1..{}", l.len()));
                    }
                    Val::Num(l[i as usize - 1].clone())
                }
                _ => return err(format!("{n} is not a list")),
            }
        }
        Expr::Neg(x) => Val::Num(-eval(x, env)?.num()?.clone()),
        Expr::Not(x) => Val::Bool(!eval(x, env)?.boolean()?),
        Expr::Bin(BinOp::And, a, b) => Val::Bool(eval(a, env)?.boolean()? && eval(b, env)?.boolean()?),
        Expr::Bin(BinOp::Or, a, b) => Val::Bool(eval(a, env)?.boolean()? || eval(b, env)?.boolean()?),
        Expr::Bin(op, a, b) => {
            let x = eval(a, env)?;
            let y = eval(b, env)?;
            let (x, y) = (x.num()?, y.num()?);
            match op {
                BinOp::Add => Val::Num(x + y),
                BinOp::Sub => Val::Num(x - y),
                BinOp::Mul => Val::Num(x * y),
                BinOp::Div => {
                    if y.is_zero() {
                        return err("division by zero");
                    }
                    Val::Num(x / y)
                }
                BinOp::Rem => {
                    let (p, q) = (as_int(x, "%")?, as_int(y, "%")?);
                    if q.is_zero() {
                        return err("modulo by zero");
                    }
                    Val::Num(Rational::from_integer(p.mod_floor(&q)))
                }
                BinOp::Pow => Val::Num(pow(x, y)?),
                BinOp::Eq => Val::Bool(x == y),
                BinOp::Ne => Val::Bool(x != y),
                BinOp::Lt => Val::Bool(x < y),
                BinOp::Le => Val::Bool(x <= y),
                BinOp::Gt => Val::Bool(x > y),
                BinOp::Ge => Val::Bool(x >= y),
                BinOp::Divides => Val::Bool(divides(x, y)),
                BinOp::And | BinOp::Or => unreachable!(),
            }
        }
        Expr::Call(f, args) => call(f, args, env)?,
        Expr::Bind(f, var, lo, hi, body) => {
            let lo = small(eval(lo, env)?.num()?, "binder bound")?;
            let hi = small(eval(hi, env)?.num()?, "binder bound")?;
            if hi - lo > 10_000 {
                return err("binder range too large");
            }
            let mut acc: Val = match f.as_str() {
                "sum" => Val::Num(Rational::zero()),
                "prod" | "lcmof" => Val::Num(Rational::one()),
                "gcdof" => Val::Num(Rational::zero()),
                "all" => Val::Bool(true),
                _ => Val::Bool(false),
            };
            for i in lo..=hi {
                env.set(var, Val::Num(Rational::from_integer(i.into())));
                let v = eval(body, env);
                env.pop();
                let v = v?;
                acc = match (f.as_str(), acc) {
                    ("sum", Val::Num(a)) => Val::Num(a + v.num()?),
                    ("prod", Val::Num(a)) => Val::Num(a * v.num()?),
                    ("lcmof", Val::Num(a)) => {
                        let (p, q) = (as_int(&a, "lcmof")?, as_int(v.num()?, "lcmof")?);
                        Val::Num(Rational::from_integer(arith::lcm(&p, &q)))
                    }
                    ("gcdof", Val::Num(a)) => {
                        let (p, q) = (as_int(&a, "gcdof")?, as_int(v.num()?, "gcdof")?);
                        Val::Num(Rational::from_integer(p.gcd(&q)))
                    }
                    ("all", Val::Bool(a)) => {
                        if !v.boolean()? {
                            return Ok(Val::Bool(false));
                        }
                        Val::Bool(a)
                    }
                    ("any", Val::Bool(_)) => {
                        if v.boolean()? {
                            return Ok(Val::Bool(true));
                        }
                        Val::Bool(false)
                    }
                    _ => unreachable!(),
                };
            }
            acc
        }
    })
}

fn call(f: &str, args: &[Expr], env: &mut Env) -> Result<Val> {
    if f == "if" {
        if args.len() != 3 {
            return err("if takes 3 arguments");
        }
        return if eval(&args[0], env)?.boolean()? { eval(&args[1], env) } else { eval(&args[2], env) };
    }
    if f == "len" {
        return match args {
            [Expr::Var(n)] => match env.get(n) {
                Some(Val::List(l)) => Ok(Val::Num(Rational::from_integer(l.len().into()))),
                _ => err(format!("{n} is not a list")),
            },
            _ => err("len takes a list name"),
        };
    }
    let vals: Vec<Rational> = args.iter().map(|a| eval(a, env).and_then(|v| v.num().cloned())).collect::<Result<_>>()?;
    let ints = |what: &str| -> Result<Vec<Integer>> { vals.iter().map(|v| as_int(v, what)).collect() };
    let one = |name: &str| -> Result<&Rational> {
        if vals.len() == 1 {
            Ok(&vals[0])
        } else {
            err(format!("{name} takes one argument"))
        }
    };
    Ok(match f {
        "lcm" => {
            let xs = ints("lcm")?;
            Val::Num(Rational::from_integer(xs.iter().fold(Integer::one(), |a, x| arith::lcm(&a, x))))
        }
        "gcd" => {
            let xs = ints("gcd")?;
            Val::Num(Rational::from_integer(xs.iter().fold(Integer::zero(), |a, x| a.gcd(x))))
        }
        "min" => Val::Num(vals.iter().min().cloned().ok_or_else(|| Error::Domain("min of nothing".into()))?),
        "max" => Val::Num(vals.iter().max().cloned().ok_or_else(|| Error::Domain("max of nothing".into()))?),
        "floor" => Val::Num(one("floor")?.floor()),
        "ceil" => Val::Num(one("ceil")?.ceil()),
        "abs" => Val::Num(one("abs")?.abs()),
        "int" => Val::Bool(one("int")?.is_integer()),
        "rad" => {
            let x = as_int(one("rad")?, "rad")?;
            if !x.is_positive() {
                return err("rad of a non-positive value");
            }
            Val::Num(Rational::from_integer(arith::factorize(&x)?.radical()))
        }
        "binom" => {
            let xs = ints("binom")?;
            if xs.len() != 2 {
                return err("binom takes two arguments");
            }
            let k = xs[1].to_i64().filter(|&k| (0..=64).contains(&k)).ok_or_else(|| Error::Domain("binom k".into()))?;
            let mut acc = Rational::one();
            for j in 0..k {
                acc = acc * Rational::from_integer(&xs[0] - j) / Rational::from_integer((j + 1).into());
            }
            Val::Num(acc)
        }
        other => return err(format!("unknown function {other}")),
    })
}
