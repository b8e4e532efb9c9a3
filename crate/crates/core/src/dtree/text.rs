//! Text form of decision trees.
//!
//! ```text
//! tree := "L0" | "L1" | "(" "x" <id> " " tree " " tree ")"
//! ```
//!
//! The zero child comes first. Output uses single spaces and round-trips
//! byte for byte; the parser accepts any ASCII whitespace between tokens.

use std::fmt;
use std::str::FromStr;

use super::{DecisionTree, Node, NodeId, Var};
use crate::Error;

impl fmt::Display for DecisionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Item {
            Node(NodeId),
            Text(&'static str),
        }
        let mut stack = vec![Item::Node(self.root())];
        while let Some(item) = stack.pop() {
            match item {
                Item::Text(s) => f.write_str(s)?,
                Item::Node(id) => match self.node(id) {
                    Node::Leaf(false) => f.write_str("L0")?,
                    Node::Leaf(true) => f.write_str("L1")?,
                    Node::Internal { var, zero, one } => {
                        write!(f, "({var} ")?;
                        stack.push(Item::Text(")"));
                        stack.push(Item::Node(one));
                        stack.push(Item::Text(" "));
                        stack.push(Item::Node(zero));
                    }
                },
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    nodes: Vec<Node>,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), Error> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", byte as char)))
        }
    }

    fn var(&mut self) -> Result<Var, Error> {
        self.expect(b'x')?;
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
        digits
            .parse::<u32>()
            .map(Var)
            .map_err(|_| self.error("expected a variable index after 'x'"))
    }

    fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        NodeId(self.nodes.len() as u32 - 1)
    }

    fn tree(&mut self) -> Result<NodeId, Error> {
        // Pending internal nodes waiting for children; explicit so that deep
        // chains do not exhaust the call stack.
        struct Frame {
            var: Var,
            zero: Option<NodeId>,
        }
        let mut frames: Vec<Frame> = Vec::new();
        loop {
            self.skip_ws();
            let mut done = match self.bytes.get(self.pos) {
                Some(b'L') => {
                    self.pos += 1;
                    let value = match self.bytes.get(self.pos) {
                        Some(b'0') => false,
                        Some(b'1') => true,
                        _ => return Err(self.error("expected L0 or L1")),
                    };
                    self.pos += 1;
                    self.push(Node::Leaf(value))
                }
                Some(b'(') => {
                    self.pos += 1;
                    let var = self.var()?;
                    frames.push(Frame { var, zero: None });
                    continue;
                }
                Some(_) => return Err(self.error("expected '(' or a leaf")),
                None => return Err(self.error("unexpected end of input")),
            };
            // Attach the finished subtree to its parent, closing parents as
            // they become complete.
            loop {
                let Some(frame) = frames.last_mut() else {
                    return Ok(done);
                };
                match frame.zero {
                    None => {
                        frame.zero = Some(done);
                        break;
                    }
                    Some(zero) => {
                        let var = frame.var;
                        frames.pop();
                        self.expect(b')')?;
                        done = self.push(Node::Internal { var, zero, one: done });
                    }
                }
            }
        }
    }
}

impl FromStr for DecisionTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut parser = Parser {
            bytes: s.as_bytes(),
            pos: 0,
            nodes: Vec::new(),
        };
        let root = parser.tree()?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(parser.error("trailing input after tree"));
        }
        Ok(DecisionTree::new(parser.nodes, root)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for text in ["L0", "L1", "(x0 L0 L1)", "(x3 (x1 L1 L0) (x12 L0 (x2 L1 L1)))"] {
            let tree: DecisionTree = text.parse().unwrap();
            assert_eq!(tree.to_string(), text);
        }
    }

    #[test]
    fn accepts_loose_whitespace() {
        let tree: DecisionTree = "  ( x0\n L0\tL1 ) ".parse().unwrap();
        assert_eq!(tree.to_string(), "(x0 L0 L1)");
    }

    #[test]
    fn reports_offsets() {
        match "(x0 L0 L2)".parse::<DecisionTree>() {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 8),
            other => panic!("unexpected {other:?}"),
        }
        assert!("(x0 L0)".parse::<DecisionTree>().is_err());
        assert!("(x0 L0 L1) L1".parse::<DecisionTree>().is_err());
        assert!("(y0 L0 L1)".parse::<DecisionTree>().is_err());
        assert!("".parse::<DecisionTree>().is_err());
    }

    #[test]
    fn rejects_repeated_variable() {
        let err = "(x0 (x0 L0 L1) L1)".parse::<DecisionTree>().unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn deep_chain_round_trips() {
        let depth = 5000;
        let mut text = String::new();
        for i in 0..depth {
            text.push_str(&format!("(x{i} "));
        }
        text.push_str("L1");
        for _ in 0..depth {
            text.push_str(" L0)");
        }
        let tree: DecisionTree = text.parse().unwrap();
        assert_eq!(tree.to_string(), text);
    }
}
