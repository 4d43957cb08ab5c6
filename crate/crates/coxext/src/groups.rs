//! Finite Coxeter groups as products of irreducible factors.
//!
//! A [`GroupDescriptor`] is an ordered list of irreducible factors of types
//! A, B, D, or I2(m), parsed from the textual grammar
//!
//! ```text
//! factor := ("A" | "B" | "D") int | "I2(" int ")"
//! expr   := factor ("^" int)? (("x" | "*") expr)?
//! ```
//!
//! Whitespace is ignored and `x`/`*` are interchangeable product symbols.
//! Powers bind tighter than products, so `B2 x I2(5)^2` expands to the
//! three factors `B2, I2(5), I2(5)`.

use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FactorKind {
    A,
    B,
    D,
    I2,
}

/// One irreducible factor. `param` is the rank for A/B/D and the edge count
/// m for I2(m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IrreducibleFactor {
    kind: FactorKind,
    param: u64,
}

impl IrreducibleFactor {
    pub fn new(kind: FactorKind, param: u64) -> Result<Self> {
        let min = match kind {
            FactorKind::A => 1,
            FactorKind::B | FactorKind::D => 2,
            FactorKind::I2 => 3,
        };
        if param < min {
            return Err(Error::Parameter(format!(
                "{kind:?} requires parameter >= {min}, got {param}"
            )));
        }
        Ok(Self { kind, param })
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn param(&self) -> u64 {
        self.param
    }

    pub fn rank(&self) -> u64 {
        match self.kind {
            FactorKind::A | FactorKind::B | FactorKind::D => self.param,
            FactorKind::I2 => 2,
        }
    }

    /// The degree multiset of this factor, unsorted.
    ///
    /// A(n): 2..n+1; B(n): 2,4,..,2n; D(n): 2,4,..,2n-2 together with n;
    /// I2(m): {2, m}. These are validated against the brute-force oracle.
    pub fn degrees(&self) -> Vec<u64> {
        let n = self.param;
        match self.kind {
            FactorKind::A => (2..=n + 1).collect(),
            FactorKind::B => (1..=n).map(|i| 2 * i).collect(),
            FactorKind::D => {
                let mut d: Vec<u64> = (1..=n - 1).map(|i| 2 * i).collect();
                d.push(n);
                d
            }
            FactorKind::I2 => vec![2, n],
        }
    }

    /// Largest degree of this factor.
    pub fn max_degree(&self) -> u64 {
        let n = self.param;
        match self.kind {
            FactorKind::A => n + 1,
            FactorKind::B => 2 * n,
            FactorKind::D => (2 * n - 2).max(n),
            FactorKind::I2 => n.max(2),
        }
    }
}

impl fmt::Display for IrreducibleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FactorKind::A => write!(f, "A{}", self.param),
            FactorKind::B => write!(f, "B{}", self.param),
            FactorKind::D => write!(f, "D{}", self.param),
            FactorKind::I2 => write!(f, "I2({})", self.param),
        }
    }
}

/// A finite Coxeter group as an ordered product of irreducible factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    factors: Vec<IrreducibleFactor>,
}

impl GroupDescriptor {
    pub fn new(factors: Vec<IrreducibleFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Parameter("descriptor must have rank > 0".into()));
        }
        Ok(Self { factors })
    }

    /// Parse the descriptor grammar. Powers are unrolled in input order.
    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).parse()
    }

    pub fn factors(&self) -> &[IrreducibleFactor] {
        &self.factors
    }

    pub fn rank(&self) -> u64 {
        self.factors.iter().map(|f| f.rank()).sum()
    }

    /// Number of reflections, Σ (dᵢ - 1); equals the degree of the Mahonian
    /// generating function and the length of the longest element.
    pub fn reflection_count(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| f.degrees().iter().map(|d| d - 1).sum::<u64>())
            .sum()
    }

    /// Concatenation of per-factor degree lists, sorted ascending.
    pub fn degrees(&self) -> Vec<u64> {
        let mut d: Vec<u64> = self.factors.iter().flat_map(|f| f.degrees()).collect();
        d.sort_unstable();
        d
    }

    pub fn max_degree(&self) -> u64 {
        self.factors.iter().map(|f| f.max_degree()).max().unwrap()
    }

    /// Group order as an exact integer, Π degrees.
    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::from(1u32);
        for f in &self.factors {
            for d in f.degrees() {
                acc *= BigUint::from(d);
            }
        }
        acc
    }

    /// Σ log dᵢ, usable when the exact order overflows any fixed width.
    pub fn log_order(&self) -> f64 {
        self.factors
            .iter()
            .flat_map(|f| f.degrees())
            .map(|d| (d as f64).ln())
            .sum()
    }

    pub fn summary(&self) -> GroupSummary {
        GroupSummary {
            descriptor: self.to_string(),
            rank: self.rank(),
            reflection_count: self.reflection_count(),
            order: self.order(),
            log_order: self.log_order(),
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub descriptor: String,
    pub rank: u64,
    pub reflection_count: u64,
    #[serde(serialize_with = "crate::groups::serialize_biguint")]
    pub order: BigUint,
    pub log_order: f64,
}

pub(crate) fn serialize_biguint<S: serde::Serializer>(
    v: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn parse(mut self) -> Result<GroupDescriptor> {
        let mut factors = Vec::new();
        loop {
            let factor = self.factor()?;
            let count = if self.eat(b'^') { self.integer()? } else { 1 };
            if count == 0 {
                return Err(Error::Parameter("power must be >= 1".into()));
            }
            if count > 100_000 {
                return Err(Error::CapExceeded(format!("power {count} too large")));
            }
            for _ in 0..count {
                factors.push(factor);
            }
            self.skip_ws();
            if self.pos >= self.bytes.len() {
                break;
            }
            if !(self.eat(b'x') || self.eat(b'*')) {
                return Err(self.err("expected 'x', '*', '^', or end of input"));
            }
        }
        GroupDescriptor::new(factors)
    }

    fn factor(&mut self) -> Result<IrreducibleFactor> {
        self.skip_ws();
        let kind = match self.peek() {
            Some(b'A') => FactorKind::A,
            Some(b'B') => FactorKind::B,
            Some(b'D') => FactorKind::D,
            Some(b'I') => {
                self.pos += 1;
                if !self.eat(b'2') || !self.eat(b'(') {
                    return Err(self.err("expected 'I2('"));
                }
                let m = self.integer()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                return IrreducibleFactor::new(FactorKind::I2, m);
            }
            _ => return Err(self.err("expected factor type A, B, D, or I2(")),
        };
        self.pos += 1;
        let n = self.integer()?;
        IrreducibleFactor::new(kind, n)
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((c - b'0') as u64))
                .ok_or_else(|| Error::Syntax {
                    pos: start,
                    msg: "integer overflow".into(),
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected integer"));
        }
        Ok(value)
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }
}
