//! Shared expression grammar for polynomials, Weyl expressions and TGW
//! words.
//!
//! ```text
//! expr := ['-'] prod (('+'|'-') prod)*
//! prod := pow (['*'] pow)*          (juxtaposition multiplies)
//! pow  := atom ['^' <nonnegative integer>]
//! atom := '(' expr ')' | <number> | <symbol>
//! ```
//!
//! Numbers are integers or fractions `p/q`; the symbol `i` is the imaginary
//! unit.  Symbols are interpreted by the caller: polynomial variables
//! `u_<edge>`, Weyl generators `x_<edge>`/`y_<edge>` (`x`, `y`, `u` address
//! a single anonymous edge), and TGW generators `X_<vertex>`/`Y_<vertex>`.

use crate::error::Error;
use crate::graph::DegreeV;
use crate::poly::Poly;
use crate::scalar::Scalar;
use num::{BigInt, BigRational};

/// Parsed expression tree, interpreted per context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ast {
    /// Terms with a negation flag each.
    Sum(Vec<(bool, Ast)>),
    Prod(Vec<Ast>),
    Pow(Box<Ast>, u32),
    Num(BigRational),
    Sym(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Num(BigRational),
    Sym(String),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn lex(input: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
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
            let numerator: String = chars[start..i].iter().collect();
            let num = numerator
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad integer `{numerator}`")))?;
            // A `/` directly followed by digits continues the literal as a
            // fraction; `/` is not an operator in this grammar.
            if i < chars.len() && chars[i] == '/' {
                let mut j = i + 1;
                let dstart = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == dstart {
                    return Err(Error::Parse("expected digits after `/`".into()));
                }
                let denominator: String = chars[dstart..j].iter().collect();
                let den = denominator
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad integer `{denominator}`")))?;
                if den == BigInt::from(0) {
                    return Err(Error::Parse("zero denominator".into()));
                }
                out.push(Token::Num(BigRational::new(num, den)));
                i = j;
            } else {
                out.push(Token::Num(BigRational::from_integer(num)));
            }
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Sym(chars[start..i].iter().collect()));
        } else {
            let tok = match c {
                '+' => Token::Plus,
                '-' => Token::Minus,
                '*' => Token::Star,
                '^' => Token::Caret,
                '(' => Token::Open,
                ')' => Token::Close,
                other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
            };
            out.push(tok);
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Ast, Error> {
        let mut terms = Vec::new();
        let mut negate = matches!(self.peek(), Some(Token::Minus));
        if negate || matches!(self.peek(), Some(Token::Plus)) {
            self.bump();
        }
        loop {
            terms.push((negate, self.prod()?));
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    negate = false;
                }
                Some(Token::Minus) => {
                    self.bump();
                    negate = true;
                }
                _ => break,
            }
        }
        if terms.len() == 1 && !terms[0].0 {
            Ok(terms.pop().unwrap().1)
        } else {
            Ok(Ast::Sum(terms))
        }
    }

    fn prod(&mut self) -> Result<Ast, Error> {
        let mut factors = vec![self.pow()?];
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    factors.push(self.pow()?);
                }
                // Juxtaposition: another atom starts immediately.
                Some(Token::Num(_)) | Some(Token::Sym(_)) | Some(Token::Open) => {
                    factors.push(self.pow()?);
                }
                _ => break,
            }
        }
        if factors.len() == 1 {
            Ok(factors.pop().unwrap())
        } else {
            Ok(Ast::Prod(factors))
        }
    }

    fn pow(&mut self) -> Result<Ast, Error> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            match self.bump() {
                Some(Token::Num(n)) if n.is_integer() && n.numer() >= &BigInt::from(0) => {
                    let e = u32::try_from(n.to_integer())
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(Ast::Pow(Box::new(base), e))
                }
                _ => Err(Error::Parse(
                    "exponent must be a nonnegative integer".into(),
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Ast, Error> {
        match self.bump() {
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(Error::Parse("missing `)`".into())),
                }
            }
            Some(Token::Num(n)) => Ok(Ast::Num(n)),
            Some(Token::Sym(s)) => Ok(Ast::Sym(s)),
            Some(tok) => Err(Error::Parse(format!("unexpected token {tok:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

/// Parses the shared grammar into an [`Ast`].
pub fn parse_ast(input: &str) -> Result<Ast, Error> {
    let tokens = lex(input)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    let mut p = Parser { tokens, pos: 0 };
    let ast = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!(
            "trailing tokens starting at {:?}",
            p.tokens[p.pos]
        )));
    }
    Ok(ast)
}

/// Interprets an [`Ast`] as a polynomial in the `u_<edge>` variables.
pub fn ast_to_poly(ast: &Ast) -> Result<Poly, Error> {
    match ast {
        Ast::Sum(terms) => {
            let mut acc = Poly::zero();
            for (neg, t) in terms {
                let p = ast_to_poly(t)?;
                acc += if *neg { -p } else { p };
            }
            Ok(acc)
        }
        Ast::Prod(factors) => {
            let mut acc = Poly::one();
            for f in factors {
                acc = acc.checked_mul(&ast_to_poly(f)?)?;
            }
            Ok(acc)
        }
        Ast::Pow(base, e) => ast_to_poly(base)?.checked_pow(*e),
        Ast::Num(n) => Ok(Poly::constant(Scalar::new(
            n.clone(),
            BigRational::from_integer(BigInt::from(0)),
        ))),
        Ast::Sym(s) => {
            if s == "i" {
                Ok(Poly::constant(Scalar::i()))
            } else if s == "u" {
                Ok(Poly::var(""))
            } else if let Some(id) = s.strip_prefix("u_") {
                Ok(Poly::var(id))
            } else {
                Err(Error::Parse(format!(
                    "symbol `{s}` is not a polynomial variable"
                )))
            }
        }
    }
}

/// Parses a polynomial such as `u_a^2 - 2*u_b + 1/2` or `(u-4)(u-3)`.
pub fn parse_poly(input: &str) -> Result<Poly, Error> {
    ast_to_poly(&parse_ast(input)?)
}

/// Parses a vertex degree such as `v1+v2` or `2*v1 - v3`.  A bare integer
/// is a vertex id (graphs often number their vertices), except that a
/// lone `0` is the zero degree; in a product the last factor is the
/// vertex and everything before it multiplies the coefficient.
pub fn parse_degree_v(input: &str) -> Result<DegreeV, Error> {
    fn as_int(n: &BigRational) -> Result<i64, Error> {
        if !n.is_integer() {
            return Err(Error::Parse(
                "degree terms must be `<int>*<vertex>` or `<vertex>`".into(),
            ));
        }
        i64::try_from(n.to_integer()).map_err(|_| Error::Parse("coefficient too large".into()))
    }
    fn walk(ast: &Ast, sign: i64, out: &mut DegreeV) -> Result<(), Error> {
        match ast {
            Ast::Sum(terms) => {
                for (neg, t) in terms {
                    walk(t, if *neg { -sign } else { sign }, out)?;
                }
                Ok(())
            }
            Ast::Prod(factors) => {
                let (last, coeffs) = factors
                    .split_last()
                    .ok_or_else(|| Error::Parse("degree term is missing a vertex id".into()))?;
                let mut coeff = sign;
                for f in coeffs {
                    match f {
                        Ast::Num(n) => coeff *= as_int(n)?,
                        _ => {
                            return Err(Error::Parse(
                                "degree terms must be `<int>*<vertex>` or `<vertex>`".into(),
                            ))
                        }
                    }
                }
                match last {
                    Ast::Sym(s) => out.add_to(s, coeff),
                    Ast::Num(n) => out.add_to(&as_int(n)?.to_string(), coeff),
                    _ => {
                        return Err(Error::Parse(
                            "degree terms must be `<int>*<vertex>` or `<vertex>`".into(),
                        ))
                    }
                }
                Ok(())
            }
            Ast::Sym(s) => {
                out.add_to(s, sign);
                Ok(())
            }
            Ast::Num(n) if n.is_integer() && n.to_integer() == BigInt::from(0) => Ok(()),
            Ast::Num(n) => {
                out.add_to(&as_int(n)?.to_string(), sign);
                Ok(())
            }
            _ => Err(Error::Parse(
                "degree terms must be `<int>*<vertex>` or `<vertex>`".into(),
            )),
        }
    }
    let ast = parse_ast(input)?;
    let mut out = DegreeV::new();
    walk(&ast, 1, &mut out)?;
    Ok(out)
}

/// Parses an integer matrix given as JSON (`[[2,-1],[-1,2]]`) or as
/// semicolon-separated rows of space-separated entries (`2 -1; -1 2`).
pub fn parse_int_matrix(input: &str) -> Result<Vec<Vec<i64>>, Error> {
    let trimmed = input.trim();
    if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))
    } else {
        trimmed
            .split(';')
            .map(|row| {
                row.split_whitespace()
                    .map(|x| {
                        x.parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad integer `{x}`")))
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_round_trip_through_display() {
        for text in [
            "u_a^2 - u_a*u_b + 3",
            "u - 1",
            "1/2*i",
            "-u_a + 1/3",
            "(2+i)*u_e1",
            "0",
        ] {
            let p = parse_poly(text).unwrap();
            assert_eq!(p.to_string(), text);
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn juxtaposition_multiplies() {
        let a = parse_poly("(u-4)(u-3)").unwrap();
        let b = parse_poly("(u-4)*(u-3)").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "u^2 - 7*u + 12");
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        assert_eq!(parse_poly("i^2").unwrap(), parse_poly("-1").unwrap());
        assert_eq!(parse_poly("i i").unwrap(), parse_poly("-1").unwrap());
    }

    #[test]
    fn degree_expressions() {
        let d = parse_degree_v("v1+v2").unwrap();
        assert_eq!(d.get("v1"), 1);
        assert_eq!(d.get("v2"), 1);
        let d = parse_degree_v("2*v1 - v3").unwrap();
        assert_eq!(d.get("v1"), 2);
        assert_eq!(d.get("v3"), -1);
        assert!(parse_degree_v("v1*v2").is_err());
    }

    #[test]
    fn degree_expressions_over_numbered_vertices() {
        let d = parse_degree_v("1 + 3").unwrap();
        assert_eq!(d.get("1"), 1);
        assert_eq!(d.get("3"), 1);
        let d = parse_degree_v("2*3 - 1").unwrap();
        assert_eq!(d.get("3"), 2);
        assert_eq!(d.get("1"), -1);
        assert!(parse_degree_v("0").unwrap().is_zero());
        assert!(parse_degree_v("1/2").is_err());
    }

    #[test]
    fn matrices_parse_in_both_syntaxes() {
        assert_eq!(
            parse_int_matrix("[[2,-1],[-1,2]]").unwrap(),
            vec![vec![2, -1], vec![-1, 2]]
        );
        assert_eq!(
            parse_int_matrix("2 -1; -1 2").unwrap(),
            vec![vec![2, -1], vec![-1, 2]]
        );
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(parse_poly("").is_err());
        assert!(parse_poly("u +").is_err());
        assert!(parse_poly("(u").is_err());
        assert!(parse_poly("u^-1").is_err());
        assert!(parse_poly("x_a").is_err());
        assert!(parse_poly("3/0").is_err());
    }
}
