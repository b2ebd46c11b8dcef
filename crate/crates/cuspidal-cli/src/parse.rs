//! Divisor specs such as `1*(1),-1*(11)` or `2*(1) - (6)`.
//!
//! A spec is a list of terms `c*(d)` separated by `,`, `+` or `-`. The
//! coefficient may be omitted (meaning 1) and a term may carry its own sign.
//! Repeated levels are summed.

use cuspidal::divisors::CuspDivisor;
use cuspidal::{Error, Result};

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    i: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { chars: text.char_indices().collect(), i: 0, text }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.i).map_or(self.text.len(), |c| c.0)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|c| c.1)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.i += 1;
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    /// Consumes a run of ASCII digits.
    fn number(&mut self) -> Result<Option<(usize, u128)>> {
        self.skip_ws();
        let start = self.pos();
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.i += 1;
        }
        if digits.is_empty() {
            return Ok(None);
        }
        match digits.parse() {
            Ok(v) => Ok(Some((start, v))),
            Err(_) => Err(Error::Parse { pos: start, msg: "number too large".into() }),
        }
    }

    /// Consumes optional `+`, `-` or `−` signs and returns the product.
    fn signs(&mut self) -> i128 {
        let mut s = 1;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {}
                Some('-') | Some('−') => s = -s,
                _ => return s,
            }
            self.i += 1;
        }
    }
}

pub fn parse_divisor_spec(text: &str, n: u64) -> Result<CuspDivisor> {
    let mut cur = Cursor::new(text);
    let mut terms: Vec<(u64, i128)> = Vec::new();
    loop {
        let sign = cur.signs();
        cur.skip_ws();
        let coeff = match cur.peek() {
            Some('(') => 1,
            _ => {
                let Some((at, c)) = cur.number()? else {
                    return cur.err("expected a coefficient or '('");
                };
                let c = i128::try_from(c).map_err(|_| Error::Parse { pos: at, msg: "coefficient too large".into() })?;
                cur.expect('*')?;
                c
            }
        };
        cur.expect('(')?;
        let Some((at, d)) = cur.number()? else {
            return cur.err("expected a divisor of N");
        };
        if d == 0 || d > u64::MAX as u128 || n % d as u64 != 0 {
            return Err(Error::Parse { pos: at, msg: format!("{d} does not divide {n}") });
        }
        cur.expect(')')?;
        terms.push((d as u64, sign * coeff));
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some(',') => cur.i += 1,
            Some('+') | Some('-') | Some('−') => {}
            Some(c) => return cur.err(format!("unexpected '{c}'")),
        }
    }
    let mut merged: std::collections::BTreeMap<u64, i128> = Default::default();
    for (d, c) in terms {
        *merged.entry(d).or_default() += c;
    }
    let terms: Vec<_> = merged.into_iter().collect();
    CuspDivisor::from_terms(n, &terms)
}
