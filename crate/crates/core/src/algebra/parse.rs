//! Text form of polynomials.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := number | identifier | 'i' | '(' expr ')'
//! ```
//!
//! `i` is the imaginary unit. The canonical printed form writes every term
//! as `(re+im*i)*x^a*y^b`, terms in descending graded-lexicographic order,
//! and parses back to the identical polynomial.

use std::fmt::Write as _;
use std::sync::Arc;

use super::poly::MPoly;
use super::ring::Ring;
use super::Cx;
use crate::error::{Error, Result};

pub fn format_coefficient(c: Cx) -> String {
    if c.im.is_sign_negative() {
        format!("({:?}-{:?}*i)", c.re, -c.im)
    } else {
        format!("({:?}+{:?}*i)", c.re, c.im)
    }
}

pub fn format_poly(p: &MPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let ring = p.ring();
    let mut out = String::new();
    for (k, (m, &c)) in p.terms().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        out.push_str(&format_coefficient(c));
        for (v, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => write!(out, "*{}", ring.name(v)).unwrap(),
                _ => write!(out, "*{}^{}", ring.name(v), e).unwrap(),
            }
        }
    }
    out
}

pub fn parse_poly(ring: &Arc<Ring>, text: &str) -> Result<MPoly> {
    let mut parser = Parser {
        ring,
        src: text.as_bytes(),
        pos: 0,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    ring: &'a Arc<Ring>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MPoly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.factor()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected a non-negative integer exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.error("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.number()?;
                Ok(MPoly::constant(self.ring, Cx::new(v, 0.0)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "i" {
                    return Ok(MPoly::constant(self.ring, Cx::new(0.0, 1.0)));
                }
                match self.ring.var_index(name) {
                    Some(v) => Ok(MPoly::var(self.ring, v)),
                    None => {
                        self.pos = start;
                        Err(self.error(&format!("unknown variable {name:?}")))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|_| Error::Parse {
            pos: start,
            msg: format!("malformed number {text:?}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring() -> Arc<Ring> {
        Ring::single(&["x", "y", "z"]).unwrap()
    }

    #[test]
    fn parses_plain_expressions() {
        let r = ring();
        let p = parse_poly(&r, "x^2 - 2*x*y + (1.5-2*i)").unwrap();
        let v = p
            .evaluate(&[Cx::new(1.0, 0.0), Cx::new(2.0, 0.0), Cx::new(0.0, 0.0)])
            .unwrap();
        assert_eq!(v, Cx::new(1.0 - 4.0 + 1.5, -2.0));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let r = ring();
        let p = parse_poly(&r, "-x^2").unwrap();
        let v = p.evaluate(&[Cx::new(3.0, 0.0), Cx::default(), Cx::default()]).unwrap();
        assert_eq!(v, Cx::new(-9.0, 0.0));
    }

    #[test]
    fn rejects_unknown_variables_and_garbage() {
        let r = ring();
        assert!(matches!(parse_poly(&r, "x + w"), Err(Error::Parse { pos: 4, .. })));
        assert!(parse_poly(&r, "x +").is_err());
        assert!(parse_poly(&r, "x ^ y").is_err());
        assert!(parse_poly(&r, "(x").is_err());
        assert!(parse_poly(&r, "x y").is_err());
    }

    #[test]
    fn canonical_form_is_stable() {
        let r = ring();
        let p = parse_poly(&r, "3*y + x^2*z - 1e-7*i").unwrap();
        let s = format_poly(&p);
        assert_eq!(s, "(1.0+0.0*i)*x^2*z + (0.0+3.0*i)*y + (0.0-1e-7*i)".replace("(0.0+3.0*i)", "(3.0+0.0*i)"));
        assert_eq!(parse_poly(&r, &s).unwrap(), p);
    }

    fn coeff() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e3..1e3f64,
            (-1e-300..1e-300f64),
            Just(0.0),
            (-1e300..1e300f64),
        ]
    }

    proptest! {
        #[test]
        fn printer_round_trips_bit_exactly(
            terms in proptest::collection::vec(
                ((0u32..4, 0u32..4, 0u32..4), coeff(), coeff()), 0..8)
        ) {
            let r = ring();
            let p = MPoly::from_terms(
                &r,
                terms.into_iter().map(|((a, b, c), re, im)| (vec![a, b, c], Cx::new(re, im))),
            ).unwrap();
            let text = format_poly(&p);
            let q = parse_poly(&r, &text).unwrap();
            prop_assert_eq!(format_poly(&q), text);
            prop_assert_eq!(q, p);
        }
    }
}
