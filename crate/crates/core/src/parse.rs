//! Reading and writing equations as text.
//!
//! Two input formats are accepted:
//!
//! * a JSON array of `[re, im]` pairs, leading coefficient first:
//!   `[[1,0],[0,0.5],[-1,0]]`;
//! * a monomial string such as `z^5+0.5i z^4-6i z^3-2.4z^2+z+6i`, optionally
//!   followed by `= 0`. Coefficients may be real, imaginary (`2.5i`, `i`) or a
//!   parenthesised sum (`(1-2i)z^3`); a missing coefficient means 1, and terms
//!   may appear in any order, repeated exponents being summed.

use std::collections::BTreeMap;

use num_complex::Complex64 as C;

use crate::{ComplexPoly, Error, Result};

/// Parses either input format into a polynomial of degree at least one.
pub fn parse_equation(text: &str) -> Result<ComplexPoly> {
    let start = text.len() - text.trim_start().len();
    let coeffs = if text[start..].starts_with('[') {
        parse_json(text)?
    } else {
        Monomials::new(text).parse()?
    };
    if coeffs.len() <= 1 {
        return Err(Error::ConstantPolynomial);
    }
    ComplexPoly::new(coeffs)
}

/// JSON coefficient array with shortest round-trip floats.
pub fn to_json(p: &ComplexPoly) -> String {
    let pairs: Vec<[f64; 2]> = p.coeffs().iter().map(|c| [c.re, c.im]).collect();
    serde_json::to_string(&pairs).expect("finite floats serialize")
}

fn parse_json(text: &str) -> Result<Vec<C>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| {
        // serde_json reports 1-based line/column; convert to a byte offset.
        let offset: usize = text
            .split_inclusive('\n')
            .take(e.line().saturating_sub(1))
            .map(str::len)
            .sum::<usize>()
            + e.column().saturating_sub(1);
        Error::ParseError {
            position: offset,
            message: e.to_string(),
        }
    })?;
    let mut coeffs: Vec<C> = pairs.iter().map(|&[re, im]| C::new(re, im)).collect();
    if coeffs.first().is_some_and(|c| *c == C::new(0.0, 0.0)) {
        return Err(Error::LeadingZero);
    }
    if coeffs.is_empty() {
        coeffs.push(C::new(0.0, 0.0));
    }
    Ok(coeffs)
}

struct Monomials<'a> {
    text: &'a str,
    pos: usize,
    variable: Option<char>,
}

impl<'a> Monomials<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            pos: 0,
            variable: None,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<Vec<C>> {
        let mut terms: BTreeMap<usize, C> = BTreeMap::new();
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.error("empty equation"));
        }
        let mut first = true;
        loop {
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('=') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs_start = self.pos;
                    let rhs = self.number()?;
                    if rhs != 0.0 {
                        self.pos = rhs_start;
                        return Err(self.error("right-hand side must be 0"));
                    }
                    self.skip_ws();
                    if self.peek().is_some() {
                        return Err(self.error("unexpected input after right-hand side"));
                    }
                    break;
                }
                _ => {}
            }
            let sign = if self.eat('+') {
                1.0
            } else if self.eat('-') {
                -1.0
            } else if first {
                1.0
            } else {
                return Err(self.error("expected '+' or '-'"));
            };
            first = false;
            let (exponent, coeff) = self.term()?;
            *terms.entry(exponent).or_default() += coeff * sign;
        }
        let degree = terms
            .iter()
            .rev()
            .find(|(_, c)| **c != C::new(0.0, 0.0))
            .map_or(0, |(&e, _)| e);
        let mut coeffs = vec![C::new(0.0, 0.0); degree + 1];
        for (e, c) in terms.into_iter().filter(|(e, _)| *e <= degree) {
            coeffs[degree - e] = c;
        }
        Ok(coeffs)
    }

    /// `coefficient? ('*'? variable ('^' integer)?)?`
    fn term(&mut self) -> Result<(usize, C)> {
        self.skip_ws();
        let coeff = match self.peek() {
            Some('(') => Some(self.parenthesised()?),
            Some(c) if c.is_ascii_digit() || c == '.' => Some(self.literal()?),
            Some('i') => {
                self.pos += 1;
                Some(C::new(0.0, 1.0))
            }
            _ => None,
        };
        let had_star = self.eat('*');
        self.skip_ws();
        match self.peek() {
            Some(v) if v.is_ascii_alphabetic() && v != 'i' => {
                match self.variable {
                    Some(prev) if prev != v => {
                        return Err(self.error(format!("mixed variables '{prev}' and '{v}'")));
                    }
                    _ => self.variable = Some(v),
                }
                self.pos += 1;
                let exponent = if self.eat('^') { self.integer()? } else { 1 };
                Ok((exponent, coeff.unwrap_or(C::new(1.0, 0.0))))
            }
            _ if had_star => Err(self.error("expected a variable after '*'")),
            _ => coeff
                .map(|c| (0, c))
                .ok_or_else(|| self.error("expected a coefficient or a variable")),
        }
    }

    /// Real literal with an optional trailing `i`.
    fn literal(&mut self) -> Result<C> {
        let v = self.number()?;
        if self.peek() == Some('i') {
            self.pos += 1;
            Ok(C::new(0.0, v))
        } else {
            Ok(C::new(v, 0.0))
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let v = self.text[start..end]
            .parse::<f64>()
            .map_err(|_| self.error("malformed number"))?;
        self.pos = end;
        Ok(v)
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.text[start..self.pos].parse().map_err(|_| {
            self.pos = start;
            self.error("expected a non-negative integer exponent")
        })
    }

    /// `( ±a ± bi ... )`
    fn parenthesised(&mut self) -> Result<C> {
        self.pos += 1;
        let mut sum = C::new(0.0, 0.0);
        let mut first = true;
        loop {
            if self.eat(')') {
                if first {
                    return Err(self.error("empty parentheses"));
                }
                return Ok(sum);
            }
            let sign = if self.eat('+') {
                1.0
            } else if self.eat('-') {
                -1.0
            } else if first {
                1.0
            } else {
                return Err(self.error("expected '+', '-' or ')'"));
            };
            first = false;
            self.skip_ws();
            let part = match self.peek() {
                Some('i') => {
                    self.pos += 1;
                    C::new(0.0, 1.0)
                }
                Some(c) if c.is_ascii_digit() || c == '.' => self.literal()?,
                _ => return Err(self.error("expected a number inside parentheses")),
            };
            sum += part * sign;
        }
    }
}
