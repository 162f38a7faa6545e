//! Graphviz DOT export.

use std::fmt::Write as _;

use catmn_core::Category;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

/// Objects as nodes, non-identity morphisms as labelled edges, in label
/// order. Objects fixed by a monad are drawn as double circles, objects
/// fixed by a comonad are filled.
pub fn to_dot(name: &str, c: &Category, monad_fixed: &[bool], comonad_fixed: &[bool]) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {} {{", quote(name)).unwrap();
    writeln!(s, "  node [shape=ellipse];").unwrap();
    for o in c.objects() {
        let mut attrs = Vec::new();
        if monad_fixed.get(o.index()).copied().unwrap_or(false) {
            attrs.push("shape=doublecircle");
        }
        if comonad_fixed.get(o.index()).copied().unwrap_or(false) {
            attrs.push("style=filled");
            attrs.push("fillcolor=lightgray");
        }
        if attrs.is_empty() {
            writeln!(s, "  {};", quote(c.obj_id(o).as_str())).unwrap();
        } else {
            writeln!(s, "  {} [{}];", quote(c.obj_id(o).as_str()), attrs.join(", ")).unwrap();
        }
    }
    for m in c.morphisms().filter(|&m| !c.is_identity(m)) {
        writeln!(
            s,
            "  {} -> {} [label={}];",
            quote(c.obj_id(c.src(m)).as_str()),
            quote(c.obj_id(c.dst(m)).as_str()),
            quote(c.mor_id(m).as_str())
        )
        .unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_is_a_single_node() {
        let dot = to_dot("t", &Category::terminal(), &[], &[]);
        assert_eq!(dot, "digraph \"t\" {\n  node [shape=ellipse];\n  \"*\";\n}\n");
    }

    #[test]
    fn quotes_are_escaped() {
        assert_eq!(quote("a\"b\\"), "\"a\\\"b\\\\\"");
    }
}
