//! Sparse multivariate polynomials over a [`Field`], with a plain-text parser.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::{Field, Scalar};

/// Polynomial in `nvars` variables `z1..zn`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Polynomial {
    pub fn zero(field: Field, nvars: usize) -> Self {
        Polynomial { field, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, nvars: usize, c: Scalar) -> Self {
        Self::monomial(field, nvars, vec![0; nvars], c)
    }

    pub fn variable(field: Field, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(field, nvars, e, field.one())
    }

    pub fn monomial(field: Field, nvars: usize, exponents: Vec<u32>, c: Scalar) -> Self {
        assert_eq!(exponents.len(), nvars);
        let mut p = Self::zero(field, nvars);
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// The linear form `sum c_i z_i`.
    pub fn linear(field: Field, coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(field, n);
        for (i, c) in coeffs.iter().enumerate() {
            p = p.add(&Self::variable(field, n, i).scale(c));
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Scalar {
        self.terms.get(exponents).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn add_term(&mut self, e: Vec<u32>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&e) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(e, merged);
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        Polynomial { terms, ..self.clone() }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let mut out = Self::zero(self.field, self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.field, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Self::constant(self.field, self.nvars, self.field.one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Largest total degree of a term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Smallest total degree of a term; `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Composition: replaces `z_i` by `images[i]` (all images share a variable count).
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map_or(0, |p| p.nvars);
        let mut out = Self::zero(self.field, target);
        for (e, c) in &self.terms {
            let mut t = Self::constant(self.field, target, c.clone());
            for (img, &k) in images.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&img.pow(k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Self::zero(self.field, self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(ne, c * &self.field.from_i64(e[i] as i64));
        }
        out
    }

    /// Coefficients in the graded monomial basis of degree `m` (see [`monomials_of_degree`]).
    pub fn dense_coefficients(&self, m: u32) -> Vec<Scalar> {
        monomials_of_degree(self.nvars, m).iter().map(|e| self.coefficient(e)).collect()
    }

    pub fn from_dense(field: Field, nvars: usize, m: u32, coeffs: &[Scalar]) -> Result<Self> {
        let basis = monomials_of_degree(nvars, m);
        if basis.len() != coeffs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} monomials",
                coeffs.len(),
                basis.len()
            )));
        }
        let mut p = Self::zero(field, nvars);
        for (e, c) in basis.into_iter().zip(coeffs) {
            p.add_term(e, field.convert(c)?);
        }
        Ok(p)
    }

    /// Parses a plain polynomial string in `z1..zn`, e.g. `z1^2*z3 - 1/2*z2^3`.
    pub fn parse(text: &str, nvars: usize, field: Field) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0, nvars, field };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(parse_error(format!("unexpected trailing input at token {}", parser.pos)));
        }
        Ok(p)
    }
}

/// Exponent vectors of total degree `m` in `n` variables, `z1^m` first (lexicographically descending).
pub fn monomials_of_degree(n: usize, m: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, m: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(m);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=m).rev() {
            prefix.push(k);
            rec(n, m - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if m == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, m, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // descending graded order
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then(b.cmp(a))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let text = c.to_display_string();
            let (neg, mag) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("z{}", i + 1) } else { format!("z{}^{p}", i + 1) })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Var(usize),
    Op(char),
}

fn parse_error(message: String) -> Error {
    Error::Parse { context: "polynomial".into(), message }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Num(s.parse().expect("digits")));
        } else if c == 'z' || c == 'x' {
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let idx: usize = s.parse().map_err(|_| parse_error(format!("variable without index at {start}")))?;
            if idx == 0 {
                return Err(parse_error("variables are numbered from 1".into()));
            }
            out.push(Token::Var(idx - 1));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(parse_error(format!("unexpected character {c:?} at {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nvars: usize,
    field: Field,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek().cloned() {
                Some(Token::Op('*')) => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(Token::Op('/')) => {
                    self.pos += 1;
                    let Some(Token::Num(d)) = self.peek().cloned() else {
                        return Err(parse_error("only division by integer constants".into()));
                    };
                    self.pos += 1;
                    if d == BigInt::from(0) {
                        return Err(parse_error("division by zero".into()));
                    }
                    let inv = self.field.from_rational(&BigRational::new(1.into(), d))?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let Some(Token::Num(e)) = self.peek().cloned() else {
                return Err(parse_error("exponent must be a nonnegative integer".into()));
            };
            self.pos += 1;
            let e: u32 = e.try_into().map_err(|_| parse_error("exponent too large".into()))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.field, self.nvars, self.field.from_int(&n)))
            }
            Some(Token::Var(i)) => {
                self.pos += 1;
                if i >= self.nvars {
                    return Err(parse_error(format!(
                        "variable z{} exceeds the rank {}",
                        i + 1,
                        self.nvars
                    )));
                }
                Ok(Polynomial::variable(self.field, self.nvars, i))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let p = self.expr()?;
                if self.peek() != Some(&Token::Op(')')) {
                    return Err(parse_error("missing closing parenthesis".into()));
                }
                self.pos += 1;
                Ok(p)
            }
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            other => Err(parse_error(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    #[test]
    fn monomial_basis_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(3, 3).len(), 10);
        assert_eq!(monomials_of_degree(3, 2)[0], vec![2, 0, 0]);
        assert_eq!(monomials_of_degree(1, 4), vec![vec![4]]);
    }

    #[test]
    fn parse_and_display_round_trip() {
        let p = Polynomial::parse("z1^2*z3 - 3*z2^3 + z1*z2*z3", 3, Q).unwrap();
        assert_eq!(p.degree(), Some(3));
        assert!(p.is_homogeneous());
        let again = Polynomial::parse(&p.to_string(), 3, Q).unwrap();
        assert_eq!(p, again);
        let q = Polynomial::parse("(z1 + z2)^2 - z1^2 - 2*z1*z2", 2, Q).unwrap();
        assert_eq!(q, Polynomial::parse("z2^2", 2, Q).unwrap());
        assert!(Polynomial::parse("z4", 3, Q).is_err());
        assert!(Polynomial::parse("z1 +", 3, Q).is_err());
    }

    #[test]
    fn parse_fractions_in_prime_field() {
        let f = Field::Prime(7);
        let p = Polynomial::parse("z1/2", 1, f).unwrap();
        assert_eq!(p.coefficient(&[1]), f.from_i64(4));
        assert!(Polynomial::parse("z1/7", 1, f).is_err());
    }

    #[test]
    fn derivative_and_eval() {
        let p = Polynomial::parse("z1^3 + z1*z2", 2, Q).unwrap();
        let d = p.derivative(0);
        assert_eq!(d, Polynomial::parse("3*z1^2 + z2", 2, Q).unwrap());
        let v = p.eval(&[Q.from_i64(2), Q.from_i64(5)]);
        assert_eq!(v, Q.from_i64(18));
    }

    #[test]
    fn substitution_composes() {
        let p = Polynomial::parse("z1*z2", 2, Q).unwrap();
        let a = Polynomial::parse("z1 + z2", 2, Q).unwrap();
        let b = Polynomial::parse("z1 - z2", 2, Q).unwrap();
        assert_eq!(p.substitute(&[a, b]), Polynomial::parse("z1^2 - z2^2", 2, Q).unwrap());
    }

    #[test]
    fn dense_round_trip() {
        let p = Polynomial::parse("z1^2 - 2*z2*z3 + 5*z3^2", 3, Q).unwrap();
        let dense = p.dense_coefficients(2);
        assert_eq!(Polynomial::from_dense(Q, 3, 2, &dense).unwrap(), p);
    }
}
