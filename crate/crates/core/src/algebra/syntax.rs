//! Text form of elements: `2*(a.b|c.b) + (|)` is `2 s_ab s_cb^* + 1`.
//! Coefficients are rationals `p` or `p/q`, or `(p+qi)` for complex ones;
//! `0` is the zero element.

use std::sync::Arc;

use num::{BigRational, Signed, Zero};

use super::{coeff, AlgebraElement, AlgebraError, Coeff};
use crate::matrix::Matrix01;

fn rational_text(r: &BigRational) -> String {
    r.to_string()
}

impl AlgebraElement {
    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let m = &self.matrix;
        let mut out = String::new();
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let pair = format!("({}|{})", m.format_letters(k.alpha()), m.format_letters(k.beta()));
            let (negative, magnitude) = if c.im.is_zero() {
                (c.re.is_negative(), c.re.abs())
            } else {
                (false, BigRational::zero())
            };
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if !c.im.is_zero() {
                let sign = if c.im.is_negative() { '-' } else { '+' };
                out.push_str(&format!("({}{sign}{}i)*", rational_text(&c.re), rational_text(&c.im.abs())));
            } else if magnitude != BigRational::from_integer(1.into()) {
                out.push_str(&format!("{}*", rational_text(&magnitude)));
            }
            out.push_str(&pair);
        }
        out
    }

    pub fn parse(matrix: &Arc<Matrix01>, text: &str) -> Result<AlgebraElement, AlgebraError> {
        Parser { text, pos: 0, matrix }.element()
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    matrix: &'a Arc<Matrix01>,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> AlgebraError {
        AlgebraError::Syntax(format!("{what} at offset {} in `{}`", self.pos, self.text))
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn element(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let mut raw = Vec::new();
        self.skip_ws();
        if self.rest() == "0" {
            return Ok(AlgebraElement::zero(self.matrix.clone()));
        }
        let mut negative = self.eat('-');
        loop {
            let (alpha, beta, mut c) = self.term()?;
            if negative {
                c = -c;
            }
            raw.push((alpha, beta, c));
            self.skip_ws();
            if self.rest().is_empty() {
                break;
            }
            negative = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Err(self.error("expected `+` or `-`"));
            };
        }
        AlgebraElement::from_raw(self.matrix.clone(), raw)
    }

    /// Text between the parenthesis at the cursor and its match.
    fn group(&self) -> Option<&str> {
        let rest = self.rest();
        rest.strip_prefix('(')?;
        rest.find(')').map(|end| &rest[1..end])
    }

    fn term(&mut self) -> Result<(Vec<usize>, Vec<usize>, Coeff), AlgebraError> {
        self.skip_ws();
        let c = match self.group() {
            Some(inner) if inner.contains('|') => coeff(1),
            _ => {
                let c = self.coefficient()?;
                if !self.eat('*') {
                    return Err(self.error("expected `*`"));
                }
                c
            }
        };
        self.skip_ws();
        let inner = self.group().ok_or_else(|| self.error("expected `(α|β)`"))?.to_string();
        let (alpha, beta) = inner.split_once('|').ok_or_else(|| self.error("expected `|`"))?;
        let alpha = self.matrix.parse_letters(alpha.trim())?;
        let beta = self.matrix.parse_letters(beta.trim())?;
        self.pos += inner.len() + 2;
        Ok((alpha, beta, c))
    }

    fn rational(&mut self) -> Result<BigRational, AlgebraError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(i, ch)| !(ch.is_ascii_digit() || ch == '/' || (i == 0 && ch == '-')))
            .map_or(rest.len(), |(i, _)| i);
        let token = &rest[..len];
        let value = token.parse::<BigRational>().map_err(|_| self.error("expected a rational number"))?;
        self.pos += len;
        Ok(value)
    }

    fn coefficient(&mut self) -> Result<Coeff, AlgebraError> {
        if self.eat('(') {
            let re = self.rational()?;
            let negative = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Err(self.error("expected `+` or `-` in complex coefficient"));
            };
            let im = self.rational()?;
            if !self.eat('i') || !self.eat(')') {
                return Err(self.error("expected `i)`"));
            }
            Ok(Coeff::new(re, if negative { -im } else { im }))
        } else {
            Ok(Coeff::new(self.rational()?, BigRational::zero()))
        }
    }
}
