use std::fmt;

use super::{Formula, Node};

fn is_binary(f: &Formula) -> bool {
    matches!(f.node(), Node::And(..) | Node::Or(..))
}

fn same_op(a: &Formula, b: &Formula) -> bool {
    std::mem::discriminant(a.node()) == std::mem::discriminant(b.node())
}

fn write_child(
    out: &mut fmt::Formatter<'_>,
    parent: &Formula,
    child: &Formula,
    left: bool,
) -> fmt::Result {
    let wrap = match (parent.node(), child.node()) {
        (_, Node::And(..) | Node::Or(..)) if !is_binary(parent) => true,
        (Node::And(..), Node::Or(..)) => true,
        _ if is_binary(child) && same_op(parent, child) => left,
        _ => false,
    };
    if wrap {
        write!(out, "({child})")
    } else {
        write!(out, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.node() {
            Node::True => return out.write_str("true"),
            Node::False => return out.write_str("false"),
            Node::Pi => return out.write_str("pi"),
            Node::Atom(p) => return out.write_str(p),
            Node::And(a, b) | Node::Or(a, b) => {
                let op = if matches!(self.node(), Node::And(..)) {
                    "&"
                } else {
                    "|"
                };
                write_child(out, self, a, true)?;
                write!(out, " {op} ")?;
                return write_child(out, self, b, false);
            }
            Node::Not(_) => "~",
            Node::HsB(_) => "<B>",
            Node::HsE(_) => "<E>",
            Node::BoxB(_) => "[B]",
            Node::BoxE(_) => "[E]",
            Node::BoxG(_) => "[G]",
        };
        out.write_str(prefix)?;
        write_child(out, self, self.children()[0], false)
    }
}

#[cfg(test)]
mod tests {
    use crate::formula::parse;

    #[test]
    fn prints_minimal_parens() {
        for s in [
            "<B><B><E>(pi & p)",
            "a & b | c",
            "(a | b) & c",
            "(a & b) & c",
            "a & b & c",
            "~(a | b)",
            "[G](~pi | <B>true)",
        ] {
            assert_eq!(parse(s).unwrap().to_string(), s);
        }
    }
}
