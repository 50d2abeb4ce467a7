//! Text notation.
//!
//! ```text
//! term  := abs | app
//! abs   := λ term
//! app   := atom {atom}        (left associative)
//! atom  := index | '(' term ')'
//! index := [0-9]+             (value >= 1)
//! ```
//!
//! `L` and `\` are accepted for `λ`. Whitespace is only needed between two
//! adjacent indices.

use super::Term;
use crate::error::{Error, Result};

struct Frame {
    lambdas: u32,
    acc: Option<Term>,
    open: Option<usize>,
}

impl Frame {
    fn new(open: Option<usize>) -> Frame {
        Frame { lambdas: 0, acc: None, open }
    }

    fn push(&mut self, atom: Term) {
        self.acc = Some(match self.acc.take() {
            None => atom,
            Some(left) => Term::app(left, atom),
        });
    }

    fn finish(self, offset: usize) -> Result<Term> {
        match self.acc {
            Some(t) => Ok(Term::abs_n(self.lambdas, t)),
            None => Err(syntax(offset, "expected a term")),
        }
    }
}

fn syntax(offset: usize, message: &str) -> Error {
    Error::Syntax { offset, message: message.to_string() }
}

/// Parses a term. Open terms are accepted; closedness is a separate check.
pub fn parse_debruijn(text: &str) -> Result<Term> {
    let bytes = text.as_bytes();
    let mut stack = vec![Frame::new(None)];
    let mut chars = text.char_indices().peekable();
    while let Some((pos, c)) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            'λ' | 'L' | '\\' => {
                let top = stack.last_mut().unwrap();
                if top.acc.is_some() {
                    return Err(syntax(pos, "an abstraction inside an application must be parenthesized"));
                }
                top.lambdas += 1;
            }
            '0'..='9' => {
                let mut end = pos + 1;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    chars.next();
                    end += 1;
                }
                let digits = &text[pos..end];
                let value: u32 = digits.parse().map_err(|_| syntax(pos, "index does not fit in 32 bits"))?;
                if value == 0 {
                    return Err(Error::ZeroIndex { offset: pos });
                }
                stack.last_mut().unwrap().push(Term::Var(value));
            }
            '(' => stack.push(Frame::new(Some(pos))),
            ')' => {
                let frame = stack.pop().unwrap();
                if frame.open.is_none() {
                    return Err(syntax(pos, "unbalanced ')'"));
                }
                let t = frame.finish(pos)?;
                stack.last_mut().unwrap().push(t);
            }
            _ => return Err(syntax(pos, &format!("unexpected character {c:?}"))),
        }
    }
    let frame = stack.pop().unwrap();
    if let Some(open) = frame.open {
        return Err(syntax(open, "unclosed '('"));
    }
    frame.finish(text.len())
}

enum Piece<'a> {
    Term(&'a Term),
    Text(&'static str),
}

/// Canonical text: `λ1`, `λ((λ(2 1)) 1)`, `12`.
///
/// Abstraction bodies that are applications get parentheses, as do
/// abstractions in function position and non-variables in argument position.
pub fn render_debruijn(t: &Term) -> String {
    let mut out = String::new();
    let mut todo = vec![Piece::Term(t)];
    while let Some(p) = todo.pop() {
        match p {
            Piece::Text(s) => out.push_str(s),
            Piece::Term(Term::Var(i)) => out.push_str(&i.to_string()),
            Piece::Term(Term::Abs(b)) => {
                out.push('λ');
                if matches!(**b, Term::App(..)) {
                    out.push('(');
                    todo.push(Piece::Text(")"));
                }
                todo.push(Piece::Term(b));
            }
            Piece::Term(Term::App(l, r)) => {
                let wrap_r = !matches!(**r, Term::Var(_));
                if wrap_r {
                    todo.push(Piece::Text(")"));
                }
                todo.push(Piece::Term(r));
                todo.push(Piece::Text(if wrap_r { " (" } else { " " }));
                if matches!(**l, Term::Abs(_)) {
                    todo.push(Piece::Text(")"));
                    todo.push(Piece::Term(l));
                    out.push('(');
                } else {
                    todo.push(Piece::Term(l));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        assert_eq!(parse_debruijn("λ1").unwrap(), Term::abs(Term::var(1)));
        let fig = Term::abs(Term::app(
            Term::abs(Term::app(Term::var(2), Term::var(1))),
            Term::var(1),
        ));
        assert_eq!(parse_debruijn("λ(λ2 1)1").unwrap(), fig);
        assert_eq!(parse_debruijn("2").unwrap(), Term::var(2));
        assert_eq!(parse_debruijn("L(\\2 1)1").unwrap(), fig);
    }

    #[test]
    fn renders_examples() {
        assert_eq!(render_debruijn(&Term::abs(Term::var(1))), "λ1");
        let fig = parse_debruijn("λ(λ2 1)1").unwrap();
        assert_eq!(render_debruijn(&fig), "λ((λ(2 1)) 1)");
        assert_eq!(render_debruijn(&Term::var(12)), "12");
        let t = Term::app(Term::app(Term::var(1), Term::var(2)), Term::abs(Term::abs(Term::var(3))));
        assert_eq!(render_debruijn(&t), "1 2 (λλ3)");
        assert_eq!(parse_debruijn(&render_debruijn(&t)).unwrap(), t);
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse_debruijn("1 2 3").unwrap();
        assert_eq!(t, Term::app(Term::app(Term::var(1), Term::var(2)), Term::var(3)));
        let t = parse_debruijn("1 (2 3)").unwrap();
        assert_eq!(t, Term::app(Term::var(1), Term::app(Term::var(2), Term::var(3))));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse_debruijn("λ0"), Err(Error::ZeroIndex { offset: 2 }));
        assert!(matches!(parse_debruijn(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_debruijn("λ"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_debruijn("(1"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_debruijn("1)"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse_debruijn("1 λ1"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_debruijn("()"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse_debruijn("λx"), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn deep_nesting_round_trips() {
        let mut t = Term::var(1);
        for i in 0..20_000 {
            t = if i % 2 == 0 { Term::abs(t) } else { Term::app(Term::var(1), t) };
        }
        let text = render_debruijn(&t);
        let back = parse_debruijn(&text).unwrap();
        assert_eq!(render_debruijn(&back), text);
    }
}
