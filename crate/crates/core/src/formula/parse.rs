//! Recursive-descent parser for
//!
//! ```text
//! expr   := term ('|' term)*
//! term   := factor ('&' factor)*
//! factor := '!' factor | 'x' INT | '0' | '1' | '(' expr ')'
//! ```
//!
//! Chains are folded left-associatively.

use super::Node;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: Option<usize>,
}

pub(super) fn parse(text: &str, n: Option<usize>) -> Result<Node> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        n,
    };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(node)
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
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

    fn expr(&mut self) -> Result<Node> {
        let mut node = self.term()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            node = Node::or(node, self.term()?);
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<Node> {
        let mut node = self.factor()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            node = Node::and(node, self.factor()?);
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                let inner = self.factor()?;
                // literal negation stays a leaf, anything else keeps its Not node
                Ok(match inner {
                    Node::Lit { var, negated: false } => Node::neg_lit(var),
                    other => Node::not(other),
                })
            }
            Some(b'(') => {
                self.pos += 1;
                let node = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(node)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.error("expected variable index after 'x'"));
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let index: usize = text.parse().map_err(|_| self.error("bad index"))?;
                if index == 0 {
                    return Err(Error::VarOutOfRange {
                        index,
                        n: self.n.unwrap_or(0),
                    });
                }
                if let Some(n) = self.n {
                    if index > n {
                        return Err(Error::VarOutOfRange { index, n });
                    }
                }
                Ok(Node::lit(index - 1))
            }
            Some(c @ (b'0' | b'1')) => {
                self.pos += 1;
                if self.src.get(self.pos).is_some_and(|d| d.is_ascii_digit()) {
                    return Err(self.error("constants are '0' or '1'"));
                }
                Ok(Node::Const(c == b'1'))
            }
            Some(_) => Err(self.error("expected '!', '(', 'x<index>', '0' or '1'")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_are_left_associative() {
        let node = parse("x1 & x2 & x3", None).unwrap();
        assert_eq!(
            node,
            Node::and(Node::and(Node::lit(0), Node::lit(1)), Node::lit(2))
        );
        let node = parse("x1 | x2 & x3", None).unwrap();
        assert_eq!(
            node,
            Node::or(Node::lit(0), Node::and(Node::lit(1), Node::lit(2)))
        );
    }

    #[test]
    fn whitespace_and_constants() {
        let node = parse("  (\n1 |x12)&0 ", None).unwrap();
        assert_eq!(
            node,
            Node::and(Node::or(Node::Const(true), Node::lit(11)), Node::Const(false))
        );
    }

    #[test]
    fn errors_report_position() {
        match parse("x1 & (x2 | x3", None) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 13),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x1 &", None), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x", None), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse("12", None), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse("x4", Some(3)),
            Err(Error::VarOutOfRange { index: 4, n: 3 })
        ));
        assert!(matches!(parse("x0", Some(3)), Err(Error::VarOutOfRange { .. })));
    }
}
