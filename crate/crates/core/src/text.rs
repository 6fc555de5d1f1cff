//! Concrete syntax for diagram terms.
//!
//! ```text
//! term  := seq
//! seq   := par { ";" par }
//! par   := atom { "*" atom }
//! atom  := IDENT | "id[" word "]" | "copy[" word "]" | "del[" word "]"
//!        | "cmp[" word "]" | "cap[" word "]" | "swap[" word "|" word "]"
//!        | "unit[" word "]" | "(" term ")"
//! word  := [ IDENT { "," IDENT } ]
//! ```
//!
//! `*` binds tighter than `;`, both associate to the left. Whitespace is
//! insignificant and `#` starts a comment running to the end of the line.

use std::fmt;

use serde::Serialize;

use crate::diagram::{DiagramTerm, ObjectType, Signature};
use crate::error::{Error, Result};

/// Byte offsets into the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Star,
    Comma,
    Bar,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let single = match c {
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b';' => Some(Tok::Semi),
            b'*' => Some(Tok::Star),
            b',' => Some(Tok::Comma),
            b'|' => Some(Tok::Bar),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, SourceSpan::new(i, i + 1)));
            i += 1;
        } else if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), SourceSpan::new(start, i)));
        } else {
            let ch = text[i..].chars().next().expect("in bounds");
            return Err(Error::Syntax {
                message: format!("unexpected character `{ch}`"),
                span: SourceSpan::new(i, i + ch.len_utf8()),
            });
        }
    }
    out.push((Tok::Eof, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Syntax {
            message: format!("expected {expected}, found {}", self.peek()),
            span: self.span(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(expected)
        }
    }

    fn seq(&mut self) -> Result<DiagramTerm> {
        let mut t = self.par()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            t = DiagramTerm::seq(t, self.par()?);
        }
        Ok(t)
    }

    fn par(&mut self) -> Result<DiagramTerm> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::Star {
            self.bump();
            t = DiagramTerm::par(t, self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<DiagramTerm> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.seq()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(name) if *self.peek2() == Tok::LBracket && is_keyword(&name) => {
                self.bump();
                self.bump();
                let first = self.word()?;
                let t = match name.as_str() {
                    "id" => DiagramTerm::Id(first),
                    "copy" => DiagramTerm::Copy(first),
                    "del" => DiagramTerm::Discard(first),
                    "cmp" => DiagramTerm::Compare(first),
                    "cap" => DiagramTerm::Cap(first),
                    "unit" => DiagramTerm::Unit(first),
                    "swap" => {
                        self.expect(Tok::Bar, "`|`")?;
                        DiagramTerm::Swap(first, self.word()?)
                    }
                    _ => unreachable!("keyword list"),
                };
                self.expect(Tok::RBracket, "`]`")?;
                Ok(t)
            }
            Tok::Ident(name) => {
                let span = self.span();
                if !self.sig.has_generator(&name) {
                    return Err(Error::UnknownGenerator {
                        name,
                        span: Some(span),
                    });
                }
                self.bump();
                Ok(DiagramTerm::Gen(name))
            }
            _ => self.error("a generator, a structural morphism or `(`"),
        }
    }

    fn word(&mut self) -> Result<ObjectType> {
        let mut names = Vec::new();
        if let Tok::Ident(n) = self.peek().clone() {
            self.bump();
            names.push(n);
            while *self.peek() == Tok::Comma {
                self.bump();
                match self.bump() {
                    (Tok::Ident(n), _) => names.push(n),
                    (tok, span) => {
                        return Err(Error::Syntax {
                            message: format!("expected an object name, found {tok}"),
                            span,
                        })
                    }
                }
            }
        }
        Ok(ObjectType::new(names))
    }
}

const KEYWORDS: [&str; 7] = ["id", "copy", "del", "cmp", "cap", "swap", "unit"];

fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

/// Parses one term. The result is not typechecked.
pub fn parse(text: &str, sig: &Signature) -> Result<DiagramTerm> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let t = p.seq()?;
    if *p.peek() != Tok::Eof {
        return p.error("`;`, `*` or end of input");
    }
    Ok(t)
}

/// Canonical fully parenthesized text; `parse(render(t)) == t`.
pub fn render(term: &DiagramTerm) -> String {
    let mut out = String::new();
    render_into(term, &mut out);
    out
}

fn word(w: &ObjectType) -> String {
    w.names().join(",")
}

fn render_into(term: &DiagramTerm, out: &mut String) {
    use DiagramTerm::*;
    match term {
        Gen(n) => out.push_str(n),
        Id(x) => out.push_str(&format!("id[{}]", word(x))),
        Copy(x) => out.push_str(&format!("copy[{}]", word(x))),
        Discard(x) => out.push_str(&format!("del[{}]", word(x))),
        Compare(x) => out.push_str(&format!("cmp[{}]", word(x))),
        Cap(x) => out.push_str(&format!("cap[{}]", word(x))),
        Unit(x) => out.push_str(&format!("unit[{}]", word(x))),
        Swap(x, y) => out.push_str(&format!("swap[{}|{}]", word(x), word(y))),
        Seq(a, b) | Par(a, b) => {
            out.push('(');
            render_into(a, out);
            out.push_str(if matches!(term, Seq(..)) { " ; " } else { " * " });
            render_into(b, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Generator;
    use proptest::prelude::*;

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_object("X", 2).add_object("Y", 2);
        for g in ["f", "g", "h"] {
            sig.add_generator(g, Generator::new(ObjectType::new(["X"]), ObjectType::new(["Y"])))
                .unwrap();
        }
        sig
    }

    fn w(names: &[&str]) -> ObjectType {
        ObjectType::new(names.iter().copied())
    }

    #[test]
    fn precedence_and_grouping() {
        let sig = sig();
        assert_eq!(
            parse("f ; del[Y]", &sig).unwrap(),
            DiagramTerm::seq(DiagramTerm::gen("f"), DiagramTerm::Discard(w(&["Y"])))
        );
        assert_eq!(
            parse("copy[X] ; (f * f)", &sig).unwrap(),
            DiagramTerm::seq(
                DiagramTerm::Copy(w(&["X"])),
                DiagramTerm::par(DiagramTerm::gen("f"), DiagramTerm::gen("f"))
            )
        );
        // `*` binds tighter than `;`
        assert_eq!(
            parse("f * g ; h", &sig).unwrap(),
            DiagramTerm::seq(
                DiagramTerm::par(DiagramTerm::gen("f"), DiagramTerm::gen("g")),
                DiagramTerm::gen("h")
            )
        );
        // left associativity
        assert_eq!(
            parse("f ; g ; h", &sig).unwrap(),
            DiagramTerm::seq(
                DiagramTerm::seq(DiagramTerm::gen("f"), DiagramTerm::gen("g")),
                DiagramTerm::gen("h")
            )
        );
    }

    #[test]
    fn structural_atoms() {
        let sig = sig();
        assert_eq!(parse("id[]", &sig).unwrap(), DiagramTerm::Id(ObjectType::unit()));
        assert_eq!(
            parse("swap[X,Y|Y]", &sig).unwrap(),
            DiagramTerm::Swap(w(&["X", "Y"]), w(&["Y"]))
        );
        assert_eq!(parse("cmp[X]", &sig).unwrap(), DiagramTerm::Compare(w(&["X"])));
        assert_eq!(parse("cap[ X , Y ]", &sig).unwrap(), DiagramTerm::Cap(w(&["X", "Y"])));
        assert_eq!(parse("unit[X]", &sig).unwrap(), DiagramTerm::Unit(w(&["X"])));
    }

    #[test]
    fn comments_and_whitespace() {
        let sig = sig();
        let t = parse("# leading comment\n f\n  ; # trailing\n del[Y]\n", &sig).unwrap();
        assert_eq!(t, parse("f;del[Y]", &sig).unwrap());
    }

    #[test]
    fn syntax_errors_carry_spans() {
        let sig = sig();
        match parse("f ; ; g", &sig) {
            Err(Error::Syntax { span, .. }) => assert_eq!(span, SourceSpan::new(4, 5)),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse("(f ; g", &sig), Err(Error::Syntax { .. })));
        assert!(matches!(parse("f g", &sig), Err(Error::Syntax { .. })));
        assert!(matches!(parse("copy[X", &sig), Err(Error::Syntax { .. })));
        assert!(matches!(parse("swap[X]", &sig), Err(Error::Syntax { .. })));
        assert!(matches!(parse("", &sig), Err(Error::Syntax { .. })));
        assert!(matches!(parse("f $ g", &sig), Err(Error::Syntax { .. })));
        match parse("f ; k", &sig) {
            Err(Error::UnknownGenerator { name, span }) => {
                assert_eq!(name, "k");
                assert_eq!(span, Some(SourceSpan::new(4, 5)));
            }
            other => panic!("expected unknown generator, got {other:?}"),
        }
    }

    #[test]
    fn canonical_rendering() {
        assert_eq!(
            render(&DiagramTerm::seq(DiagramTerm::gen("f"), DiagramTerm::Discard(w(&["Y"])))),
            "(f ; del[Y])"
        );
        assert_eq!(render(&DiagramTerm::Id(ObjectType::unit())), "id[]");
        assert_eq!(
            render(&DiagramTerm::par(DiagramTerm::gen("f"), DiagramTerm::gen("g"))),
            "(f * g)"
        );
    }

    fn arb_word() -> impl Strategy<Value = ObjectType> {
        prop::collection::vec(prop_oneof![Just("X"), Just("Y")], 0..3).prop_map(ObjectType::new)
    }

    fn arb_term() -> impl Strategy<Value = DiagramTerm> {
        let leaf = prop_oneof![
            prop_oneof![Just("f"), Just("g"), Just("h")].prop_map(DiagramTerm::gen),
            arb_word().prop_map(DiagramTerm::Id),
            arb_word().prop_map(DiagramTerm::Copy),
            arb_word().prop_map(DiagramTerm::Discard),
            arb_word().prop_map(DiagramTerm::Compare),
            arb_word().prop_map(DiagramTerm::Cap),
            arb_word().prop_map(DiagramTerm::Unit),
            (arb_word(), arb_word()).prop_map(|(a, b)| DiagramTerm::Swap(a, b)),
        ];
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| DiagramTerm::seq(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| DiagramTerm::par(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(t in arb_term()) {
            let sig = sig();
            prop_assert_eq!(parse(&render(&t), &sig).unwrap(), t);
        }

        #[test]
        fn parse_is_deterministic(t in arb_term()) {
            let sig = sig();
            let text = render(&t);
            prop_assert_eq!(parse(&text, &sig).unwrap(), parse(&text, &sig).unwrap());
        }
    }
}
