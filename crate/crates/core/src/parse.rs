//! Parsers for command-line values: arithmetic expressions in `M`, frame-set
//! specifications, integer ranges and comma-separated lists.

use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frameset::{FrameSet, FrameSetSpec, Side};

/// An arithmetic expression in the dimension `M`, e.g. `4*log(M)/M^0.75`.
///
/// Supports numbers, `M`, `+ - * / ^`, parentheses and the functions `log`
/// (natural), `sqrt` and `exp`. `^` is right-associative and binds tighter
/// than unary minus.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    node: Node,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Dim,
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Log,
    Sqrt,
    Exp,
}

const MAX_DEPTH: usize = 64;

impl Expr {
    pub fn eval(&self, m: f64) -> f64 {
        eval(&self.node, m)
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, depth: 0 };
        let node = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Self { source: s.trim().to_string(), node })
    }
}

fn eval(node: &Node, m: f64) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Dim => m,
        Node::Neg(a) => -eval(a, m),
        Node::Bin(op, a, b) => {
            let (x, y) = (eval(a, m), eval(b, m));
            match op {
                Op::Add => x + y,
                Op::Sub => x - y,
                Op::Mul => x * y,
                Op::Div => x / y,
                Op::Pow => x.powf(y),
            }
        }
        Node::Call(f, a) => {
            let x = eval(a, m);
            match f {
                Func::Log => x.ln(),
                Func::Sqrt => x.sqrt(),
                Func::Exp => x.exp(),
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in expression", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node> {
        self.enter()?;
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let op = if c == b'+' { Op::Add } else { Op::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let op = if c == b'*' { Op::Mul } else { Op::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.enter()?;
            let exp = self.unary()?;
            self.depth -= 1;
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let func = match name {
                    "M" => return Ok(Node::Dim),
                    "log" | "ln" => Func::Log,
                    "sqrt" => Func::Sqrt,
                    "exp" => Func::Exp,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown name `{name}`")));
                    }
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit() || *c == b'.') {
            self.pos += 1;
        }
        // optional exponent, e.g. 1e-3
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Node::Num).map_err(|_| {
            self.pos = start;
            self.error(&format!("malformed number `{text}`"))
        })
    }
}

/// A frame-set description as given on the command line:
/// `full`, `product:F=<list>:{time|freq}`, `bernoulli:tau=<expr>` or
/// `file=<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSpec {
    Full,
    Product { set: Vec<usize>, side: Side },
    Bernoulli { tau: Expr },
    File(PathBuf),
}

impl LambdaSpec {
    pub fn is_random(&self) -> bool {
        matches!(self, LambdaSpec::Bernoulli { .. })
    }

    /// Builds the frame set in dimension `m`. Bernoulli sets need a seed.
    pub fn build(&self, m: usize, seed: Option<u64>) -> Result<FrameSet> {
        match self {
            LambdaSpec::Full => FrameSet::build(m, &FrameSetSpec::Full),
            LambdaSpec::Product { set, side } => FrameSet::build(m, &FrameSetSpec::Product { set: set.clone(), side: *side }),
            LambdaSpec::Bernoulli { tau } => {
                let seed = seed.ok_or_else(|| Error::InvalidParameter("a seed is required for bernoulli frame sets".into()))?;
                let tau = tau.eval(m as f64);
                FrameSet::build(m, &FrameSetSpec::Bernoulli { tau, seed })
            }
            LambdaSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
                let set = FrameSet::from_json(&text)?;
                if set.dim() != m {
                    return Err(Error::DimensionMismatch { expected: m, found: set.dim() });
                }
                Ok(set)
            }
        }
    }
}

impl FromStr for LambdaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "full" {
            return Ok(LambdaSpec::Full);
        }
        if let Some(path) = s.strip_prefix("file=") {
            if path.is_empty() {
                return Err(Error::Parse("empty path in `file=`".into()));
            }
            return Ok(LambdaSpec::File(PathBuf::from(path)));
        }
        if let Some(rest) = s.strip_prefix("bernoulli:tau=") {
            return Ok(LambdaSpec::Bernoulli { tau: rest.parse()? });
        }
        if let Some(rest) = s.strip_prefix("product:F=") {
            let (list, side) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse("product spec needs a side, e.g. product:F=0,1:time".into()))?;
            let side = match side {
                "time" => Side::Time,
                "freq" => Side::Frequency,
                other => return Err(Error::Parse(format!("unknown side `{other}`, expected time or freq"))),
            };
            return Ok(LambdaSpec::Product { set: parse_list(list)?, side });
        }
        Err(Error::Parse(format!(
            "unrecognized frame set `{s}`; expected full, product:F=<list>:{{time|freq}}, bernoulli:tau=<expr> or file=<path>"
        )))
    }
}

/// Parses `a:b:step` into `a, a + step, ...` up to and including `b`.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad range component `{p}`"))))
        .collect::<Result<_>>()?;
    let (a, b, step) = match nums[..] {
        [a, b] => (a, b, 1),
        [a, b, step] => (a, b, step),
        _ => return Err(Error::Parse(format!("range `{s}` must look like a:b or a:b:step"))),
    };
    if step == 0 || a > b {
        return Err(Error::Parse(format!("range `{s}` needs step > 0 and a <= b")));
    }
    if (b - a) / step >= 1_000_000 {
        return Err(Error::Parse(format!("range `{s}` has too many values")));
    }
    Ok((a..=b).step_by(step).collect())
}

/// Parses a comma-separated list of values.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    if s.trim().is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    s.split(',')
        .map(|v| v.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad list entry `{}`", v.trim()))))
        .collect()
}
