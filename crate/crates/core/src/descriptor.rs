//! Text descriptors for [`FunctionSpec`]: `name` or `name(arg, ...)`, where
//! an argument is a number or another descriptor.
//!
//! ```text
//! power(2.5)   const(1)    poly(1,0,3)   monomial(4)   exp_decay(1)
//! geom         todd        log(2)        sin(1)        cos(0.5)
//! rational_decay           gaussian
//! scaled(f,d)  xpow(f,a)   damped(f,c)   sum(w1,f1,w2,f2,...)
//! ```
//!
//! `Display` on [`FunctionSpec`] prints this syntax, so descriptors
//! round-trip.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::function::FunctionSpec;

pub const GRAMMAR_HINT: &str = "expected name or name(params), e.g. \"power(2.5)\", \"sin(1)\", \"todd\", \"poly(1,0,3)\", \"scaled(geom,2)\"";

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Open,
    Close,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            ')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            ',' => {
                out.push((i, Token::Comma));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Token::Ident(chars[start..i].iter().collect())));
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                let start = i;
                i += 1;
                while i < chars.len() {
                    let d = chars[i];
                    let after_exp = matches!(chars[i - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || (after_exp && (d == '-' || d == '+')) {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| parse_error(src, start, &format!("bad number {text:?}")))?;
                out.push((start, Token::Number(v)));
            }
            other => return Err(parse_error(src, i, &format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

fn parse_error(src: &str, pos: usize, detail: &str) -> Error {
    Error::Parse(format!("{detail} at position {pos} in {src:?}; {GRAMMAR_HINT}"))
}

#[derive(Debug)]
enum Arg {
    Number(f64),
    Function(FunctionSpec),
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.src.len(), |t| t.0)
    }

    fn error(&self, detail: &str) -> Error {
        parse_error(self.src, self.offset(), detail)
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn function(&mut self) -> Result<FunctionSpec> {
        let start = self.offset();
        let name = match self.peek() {
            Some(Token::Ident(name)) => name.clone(),
            _ => return Err(self.error("expected a function name")),
        };
        self.pos += 1;
        let mut args = Vec::new();
        if self.peek() == Some(&Token::Open) {
            self.pos += 1;
            if self.peek() != Some(&Token::Close) {
                loop {
                    args.push(self.arg()?);
                    if self.peek() == Some(&Token::Comma) {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
            self.expect(Token::Close, "')'")?;
        }
        build(&name, args).map_err(|e| match e {
            Error::Parse(detail) => parse_error(self.src, start, &detail),
            other => other,
        })
    }

    fn arg(&mut self) -> Result<Arg> {
        match self.peek() {
            Some(Token::Number(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(Arg::Number(v))
            }
            Some(Token::Ident(_)) => Ok(Arg::Function(self.function()?)),
            _ => Err(self.error("expected a number or a function")),
        }
    }
}

fn numbers(name: &str, args: &[Arg], count: usize) -> Result<Vec<f64>> {
    if args.len() != count {
        return Err(Error::Parse(format!(
            "{name} takes {count} numeric argument(s), got {}",
            args.len()
        )));
    }
    args.iter()
        .map(|a| match a {
            Arg::Number(v) => Ok(*v),
            Arg::Function(_) => Err(Error::Parse(format!("{name} expects numbers, got a function"))),
        })
        .collect()
}

fn nonneg_integer(name: &str, v: f64) -> Result<u32> {
    if v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
        Ok(v as u32)
    } else {
        Err(Error::Parse(format!("{name} needs a non-negative integer, got {v}")))
    }
}

fn function_and_number(name: &str, args: Vec<Arg>) -> Result<(FunctionSpec, f64)> {
    let mut it = args.into_iter();
    match (it.next(), it.next(), it.next()) {
        (Some(Arg::Function(f)), Some(Arg::Number(v)), None) => Ok((f, v)),
        _ => Err(Error::Parse(format!("{name} takes (function, number)"))),
    }
}

fn build(name: &str, args: Vec<Arg>) -> Result<FunctionSpec> {
    match name {
        "power" => FunctionSpec::power(numbers(name, &args, 1)?[0]),
        "const" => FunctionSpec::constant(numbers(name, &args, 1)?[0]),
        "poly" => {
            if args.is_empty() {
                return Err(Error::Parse("poly needs at least one coefficient".into()));
            }
            FunctionSpec::poly(numbers(name, &args, args.len())?)
        }
        "monomial" => Ok(FunctionSpec::monomial(nonneg_integer(name, numbers(name, &args, 1)?[0])? as usize)),
        "exp_decay" => FunctionSpec::exp_decay(numbers(name, &args, 1)?[0]),
        "geom" => numbers(name, &args, 0).map(|_| FunctionSpec::geom()),
        "todd" => numbers(name, &args, 0).map(|_| FunctionSpec::todd()),
        "log" | "log_power" => Ok(FunctionSpec::log_power(nonneg_integer(name, numbers(name, &args, 1)?[0])?)),
        "sin" | "sine" => FunctionSpec::sine(numbers(name, &args, 1)?[0]),
        "cos" | "cosine" => FunctionSpec::cosine(numbers(name, &args, 1)?[0]),
        "rational_decay" => numbers(name, &args, 0).map(|_| FunctionSpec::rational_decay()),
        "gaussian" => numbers(name, &args, 0).map(|_| FunctionSpec::gaussian()),
        "scaled" => {
            let (f, d) = function_and_number(name, args)?;
            f.scaled(d)
        }
        "xpow" => {
            let (f, a) = function_and_number(name, args)?;
            f.times_power(a)
        }
        "damped" => {
            let (f, c) = function_and_number(name, args)?;
            f.damped(c)
        }
        "sum" => {
            if args.is_empty() || args.len() % 2 != 0 {
                return Err(Error::Parse("sum takes pairs (weight, function)".into()));
            }
            let mut terms = Vec::with_capacity(args.len() / 2);
            let mut it = args.into_iter();
            while let (Some(w), Some(f)) = (it.next(), it.next()) {
                match (w, f) {
                    (Arg::Number(w), Arg::Function(f)) => terms.push((w, f)),
                    _ => return Err(Error::Parse("sum takes pairs (weight, function)".into())),
                }
            }
            FunctionSpec::combination(terms)
        }
        other => Err(Error::Parse(format!("unknown function {other:?}"))),
    }
}

/// Parses a descriptor such as `"damped(sin(2),0.5)"`.
pub fn parse(src: &str) -> Result<FunctionSpec> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(parse_error(src, 0, "empty descriptor"));
    }
    let mut parser = Parser { src, tokens, pos: 0 };
    let f = parser.function()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(f)
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionKind;

    #[test]
    fn parses_catalog_examples() {
        assert_eq!(parse("power(2.5)").unwrap(), FunctionSpec::power(2.5).unwrap());
        assert_eq!(parse("sin(1)").unwrap(), FunctionSpec::sine(1.0).unwrap());
        assert_eq!(parse("todd").unwrap(), FunctionSpec::todd());
        assert_eq!(parse("poly(1,0,3)").unwrap(), FunctionSpec::poly(vec![1.0, 0.0, 3.0]).unwrap());
        assert_eq!(parse("const(1)").unwrap(), FunctionSpec::constant(1.0).unwrap());
        assert_eq!(parse(" exp_decay( 1e-1 ) ").unwrap(), FunctionSpec::exp_decay(0.1).unwrap());
        assert_eq!(parse("log(3)").unwrap(), FunctionSpec::log_power(3));
        assert_eq!(parse("geom()").unwrap(), FunctionSpec::geom());
        assert_eq!(parse("monomial(3)").unwrap(), FunctionSpec::monomial(3));
    }

    #[test]
    fn parses_nested_combinators() {
        let f = parse("sum(2,damped(cos(0.5),1),-1.5,scaled(xpow(gaussian,0.5),2))").unwrap();
        match f.kind() {
            FunctionKind::Combination(terms) => {
                assert_eq!(terms.len(), 2);
                assert_eq!(terms[1].0, -1.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        let srcs = [
            "power(-0.3)",
            "poly(1,0,3)",
            "exp_decay(2)",
            "log(2)",
            "sum(2,damped(cos(0.5),1),-1.5,scaled(xpow(gaussian,0.5),2))",
            "rational_decay",
        ];
        for src in srcs {
            let f = parse(src).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{src}");
        }
    }

    #[test]
    fn errors_name_the_grammar() {
        for bad in ["", "power(", "power(1,2)", "foo(1)", "sin(x)", "poly()", "todd)", "log(1.5)", "scaled(2,geom)", "sin(1) cos(1)", "power(1e)"] {
            match parse(bad) {
                Err(Error::Parse(msg)) => assert!(msg.contains("name(params)"), "{bad}: {msg}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
        // well-formed but out of range: the constructor's own error
        assert!(matches!(parse("exp_decay(-1)"), Err(Error::Domain { .. })));
    }

    #[test]
    fn from_str_works() {
        let f: FunctionSpec = "gaussian".parse().unwrap();
        assert_eq!(f, FunctionSpec::gaussian());
    }
}
