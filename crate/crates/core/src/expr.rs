//! Integer expressions over the genus parameters, used by `{...}` templates,
//! `requires`/`when` conditions, and seed templates.
//!
//! Grammar: `||`, `&&`, comparisons, `+ -`, `* / %`, unary `-`, parentheses,
//! integer literals and variables. Booleans are integers (0 is false).

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unexpected `{found}` at offset {pos} in `{text}`")]
    Syntax {
        text: String,
        pos: usize,
        found: String,
    },
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("division by zero in `{0}`")]
    DivByZero(String),
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Default)]
pub struct Vars(BTreeMap<String, i64>);

impl Vars {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: i64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.0.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Op(&'static str),
}

const OPS: [&str; 16] = [
    "||", "&&", "==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/", "%", "(", ")", "!",
];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse().map_err(|_| ExprError::Syntax {
                text: text.to_string(),
                pos: start,
                found: text[start..i].to_string(),
            })?;
            out.push((start, Tok::Num(n)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        for op in OPS {
            if text[i..].starts_with(op) {
                out.push((i, Tok::Op(op)));
                i += op.len();
                continue 'outer;
            }
        }
        return Err(ExprError::Syntax {
            text: text.to_string(),
            pos: i,
            found: c.to_string(),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a Vars,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<&'static str> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Op(o))) => Some(o),
            _ => None,
        }
    }

    fn err(&self) -> ExprError {
        match self.toks.get(self.pos) {
            Some((p, t)) => ExprError::Syntax {
                text: self.text.to_string(),
                pos: *p,
                found: match t {
                    Tok::Num(n) => n.to_string(),
                    Tok::Ident(s) => s.clone(),
                    Tok::Op(o) => o.to_string(),
                },
            },
            None => ExprError::Syntax {
                text: self.text.to_string(),
                pos: self.text.len(),
                found: "end of input".into(),
            },
        }
    }

    fn binary(
        &mut self,
        ops: &[&'static str],
        next: fn(&mut Self) -> Result<i64, ExprError>,
    ) -> Result<i64, ExprError> {
        let mut lhs = next(self)?;
        while let Some(op) = self.peek_op().filter(|o| ops.contains(o)) {
            self.pos += 1;
            let rhs = next(self)?;
            lhs = match op {
                "||" => ((lhs != 0) || (rhs != 0)) as i64,
                "&&" => ((lhs != 0) && (rhs != 0)) as i64,
                "==" => (lhs == rhs) as i64,
                "!=" => (lhs != rhs) as i64,
                "<" => (lhs < rhs) as i64,
                "<=" => (lhs <= rhs) as i64,
                ">" => (lhs > rhs) as i64,
                ">=" => (lhs >= rhs) as i64,
                "+" => lhs + rhs,
                "-" => lhs - rhs,
                "*" => lhs * rhs,
                "/" | "%" => {
                    if rhs == 0 {
                        return Err(ExprError::DivByZero(self.text.to_string()));
                    }
                    if op == "/" {
                        lhs.div_euclid(rhs)
                    } else {
                        lhs.rem_euclid(rhs)
                    }
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<i64, ExprError> {
        self.binary(&["||"], Self::and)
    }
    fn and(&mut self) -> Result<i64, ExprError> {
        self.binary(&["&&"], Self::cmp)
    }
    fn cmp(&mut self) -> Result<i64, ExprError> {
        self.binary(&["==", "!=", "<=", ">=", "<", ">"], Self::sum)
    }
    fn sum(&mut self) -> Result<i64, ExprError> {
        self.binary(&["+", "-"], Self::prod)
    }
    fn prod(&mut self) -> Result<i64, ExprError> {
        self.binary(&["*", "/", "%"], Self::unary)
    }

    fn unary(&mut self) -> Result<i64, ExprError> {
        match self.peek_op() {
            Some("-") => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some("!") => {
                self.pos += 1;
                Ok((self.unary()? == 0) as i64)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<i64, ExprError> {
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::Num(n))) => {
                self.pos += 1;
                Ok(n)
            }
            Some((_, Tok::Ident(name))) => {
                self.pos += 1;
                self.vars.get(&name).ok_or(ExprError::UnknownVar(name))
            }
            Some((_, Tok::Op("("))) => {
                self.pos += 1;
                let v = self.or()?;
                if self.peek_op() != Some(")") {
                    return Err(self.err());
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err()),
        }
    }
}

/// Evaluates an integer expression.
pub fn eval(text: &str, vars: &Vars) -> Result<i64, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        text,
        toks,
        pos: 0,
        vars,
    };
    let v = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.err());
    }
    Ok(v)
}

/// Evaluates a condition; nonzero is true.
pub fn holds(text: &str, vars: &Vars) -> Result<bool, ExprError> {
    Ok(eval(text, vars)? != 0)
}

/// Replaces every `{expr}` in `text` by its value.
pub fn expand(text: &str, vars: &Vars) -> Result<String, ExprError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').ok_or_else(|| ExprError::Syntax {
            text: text.to_string(),
            pos: text.len() - rest.len() + open,
            found: "{".into(),
        })?;
        out.push_str(&eval(&rest[open + 1..open + close], vars)?.to_string());
        rest = &rest[open + close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Vars {
        Vars::new().with("g", 30).with("k", 7)
    }

    #[test]
    fn precedence_and_parens() {
        assert_eq!(eval("1 + 2 * 3", &vars()).unwrap(), 7);
        assert_eq!(eval("(1 + 2) * 3", &vars()).unwrap(), 9);
        assert_eq!(eval("4*k+1", &vars()).unwrap(), 29);
        assert_eq!(eval("-3 % 5", &vars()).unwrap(), 2);
        assert_eq!(eval("g - -2", &vars()).unwrap(), 32);
    }

    #[test]
    fn conditions() {
        assert!(holds("g % 4 == 2 && g >= 30", &vars()).unwrap());
        assert!(!holds("g == 27 || k > 7", &vars()).unwrap());
        assert!(holds("!(g < 10)", &vars()).unwrap());
    }

    #[test]
    fn templates() {
        assert_eq!(expand("C{2*k-1} * D{4*k+1}^-1", &vars()).unwrap(), "C13 * D29^-1");
        assert_eq!(expand("no braces", &vars()).unwrap(), "no braces");
        assert!(expand("B{k", &vars()).is_err());
    }

    #[test]
    fn errors() {
        assert_eq!(eval("h", &vars()), Err(ExprError::UnknownVar("h".into())));
        assert!(matches!(eval("1 +", &vars()), Err(ExprError::Syntax { .. })));
        assert!(matches!(eval("1 / 0", &vars()), Err(ExprError::DivByZero(_))));
        assert!(matches!(eval("2 3", &vars()), Err(ExprError::Syntax { .. })));
    }
}
