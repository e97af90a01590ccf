//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! poly   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' integer)?
//! atom   := integer ('/' integer)? | var | '(' poly ')'
//! var    := 'x' index ('^(' order ')')?
//! ```
//!
//! Whitespace is ignored everywhere. `x3` means `x3^(0)`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{JetVar, Monomial, Poly, Rational};
use crate::error::{Error, Result};

/// How a bare `x<k>` (no `^(j)` suffix) is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarStyle {
    /// `x<k>` is the base variable `x_k^(0)`, `k ≥ 1`.
    #[default]
    Standard,
    /// Univariate jet shorthand: `x<k>` is `x_1^(k)`, `k ≥ 0`. Explicit
    /// `x<i>^(j)` keeps its usual meaning.
    UnivariateJets,
}

pub fn parse(text: &str) -> Result<Poly> {
    parse_with(text, VarStyle::Standard)
}

pub fn parse_with(text: &str, style: VarStyle) -> Result<Poly> {
    let mut p = Parser::new(text, style);
    let poly = p.poly()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(poly)
}

/// Parses text that must denote a single monomial with coefficient 1.
pub fn parse_monomial(text: &str, style: VarStyle) -> Result<Monomial> {
    let poly = parse_with(text, style)?;
    let mut terms = poly.terms();
    match (terms.next(), terms.next()) {
        (Some((m, c)), None) if *c == Rational::from_integer(1.into()) => Ok(m.clone()),
        _ => Err(Error::Syntax {
            pos: 0,
            message: format!("`{text}` is not a monomial"),
        }),
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    style: VarStyle,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, style: VarStyle) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            style,
        }
    }

    fn syntax(&self, message: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
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

    fn poly(&mut self) -> Result<Poly> {
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            if self.eat(b'+') {
                acc += &self.term()?;
            } else if self.eat(b'-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        // `^(` directly after a variable was consumed by `var`; here `^` is a power.
        if self.eat(b'^') {
            let e = self.integer()?;
            let e = u32::try_from(e).map_err(|_| self.syntax("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.poly()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let numer = self.integer_big()?;
                if self.eat(b'/') {
                    let denom = self.integer_big()?;
                    if denom.is_zero() {
                        return Err(self.syntax("zero denominator"));
                    }
                    Ok(Poly::constant(Rational::new(numer, denom)))
                } else {
                    Ok(Poly::constant(Rational::from_integer(numer)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => Ok(Poly::var(self.var()?)),
            Some(_) => Err(self.syntax("expected a coefficient, variable or `(`")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn var(&mut self) -> Result<JetVar> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
        let unknown = || Error::UnknownVariable {
            pos: start,
            name: name.to_string(),
        };
        let digits = name.strip_prefix('x').ok_or_else(unknown)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let index: u32 = digits.parse().map_err(|_| unknown())?;

        let explicit_order = self.jet_suffix()?;
        match (explicit_order, self.style) {
            (Some(order), _) => {
                if index == 0 {
                    return Err(unknown());
                }
                Ok(JetVar::new(index, order))
            }
            (None, VarStyle::Standard) => {
                if index == 0 {
                    return Err(unknown());
                }
                Ok(JetVar::base_var(index))
            }
            (None, VarStyle::UnivariateJets) => Ok(JetVar::new(1, index)),
        }
    }

    /// Consumes `^(<order>)` if present.
    fn jet_suffix(&mut self) -> Result<Option<u32>> {
        let save = self.pos;
        if !self.eat(b'^') {
            return Ok(None);
        }
        if !self.eat(b'(') {
            self.pos = save;
            return Ok(None);
        }
        let order = self.integer()?;
        let order = u32::try_from(order).map_err(|_| self.syntax("jet order too large"))?;
        if !self.eat(b')') {
            return Err(self.syntax("expected `)` after jet order"));
        }
        Ok(Some(order))
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an integer"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits"))
    }

    fn integer(&mut self) -> Result<u64> {
        let digits = self.digits()?;
        digits.parse().map_err(|_| self.syntax("integer too large"))
    }

    fn integer_big(&mut self) -> Result<BigInt> {
        let digits = self.digits()?;
        Ok(digits.parse().expect("ascii digits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, rat};

    fn xj(i: u32, j: u32) -> Poly {
        Poly::var(JetVar::new(i, j))
    }

    #[test]
    fn literal_term_list() {
        let p = parse("x1^(0)*x2^(1) + x1^(1)*x2^(0)").unwrap();
        let expected = &(&xj(1, 0) * &xj(2, 1)) + &(&xj(1, 1) * &xj(2, 0));
        assert_eq!(p, expected);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn rational_coefficient_and_power() {
        let p = parse("3/2*x1^2").unwrap();
        assert_eq!(p, xj(1, 0).pow(2).scale(&rat(3, 2)));
    }

    #[test]
    fn distribution_over_parentheses() {
        let p = parse("x1*(x1 - 1)").unwrap();
        assert_eq!(p, &xj(1, 0).pow(2) - &xj(1, 0));
    }

    #[test]
    fn jet_order_then_power() {
        let p = parse("x1^(2)^3").unwrap();
        assert_eq!(p, xj(1, 2).pow(3));
        let q = parse("  x 1 ^ ( 2 ) ^ 3 ");
        // whitespace inside the variable name splits the identifier
        assert!(q.is_err());
        let r = parse(" x1 ^ ( 2 ) ^ 3 ").unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn leading_sign_and_constants() {
        assert_eq!(parse("-x2 + 5").unwrap(), &Poly::constant(int(5)) - &xj(2, 0));
        assert_eq!(parse("0").unwrap(), Poly::zero());
        assert_eq!(parse("-1/3").unwrap(), Poly::constant(rat(-1, 3)));
    }

    #[test]
    fn unknown_variables() {
        assert!(matches!(parse("y1"), Err(Error::UnknownVariable { pos: 0, .. })));
        assert!(matches!(parse("x0"), Err(Error::UnknownVariable { .. })));
        assert!(matches!(parse("2*x"), Err(Error::UnknownVariable { pos: 2, .. })));
        assert!(matches!(parse("x1a"), Err(Error::UnknownVariable { .. })));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("x1 + * x2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(x1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("1/0"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x1 x2"), Err(Error::Syntax { .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { .. })));
    }

    #[test]
    fn univariate_jet_shorthand() {
        let p = parse_with("x0*x2", VarStyle::UnivariateJets).unwrap();
        assert_eq!(p, &xj(1, 0) * &xj(1, 2));
        let q = parse_with("x2^(1)", VarStyle::UnivariateJets).unwrap();
        assert_eq!(q, xj(2, 1));
    }

    #[test]
    fn monomial_text() {
        let m = parse_monomial("x1^(1)*x2", VarStyle::Standard).unwrap();
        assert_eq!(m.to_string(), "x1^(1)*x2^(0)");
        assert!(parse_monomial("2*x1", VarStyle::Standard).is_err());
        assert!(parse_monomial("x1 + x2", VarStyle::Standard).is_err());
    }
}
