use std::fmt::Write;

use quatree::quotient::QuotientGraph;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders a quotient graph in DOT.
///
/// Vertices are labelled by stabilizer order; vertices with stabilizer of
/// order q^2-1 are drawn as filled double circles. Parallel edges are written
/// one per line and labelled by their stabilizer order.
pub fn render(g: &QuotientGraph, title: &str) -> String {
    let terminal = (g.q * g.q - 1) as usize;
    let mut s = String::new();
    s.push_str("graph quotient {\n");
    let _ = writeln!(s, "  label=\"{}\";", escape(title));
    s.push_str("  node [shape=circle, fontname=\"Helvetica\"];\n");
    s.push_str("  edge [fontname=\"Helvetica\", fontsize=10];\n");
    for (k, v) in g.vertices.iter().enumerate() {
        let style = if v.stabilizer_order == terminal {
            ", shape=doublecircle, style=filled, fillcolor=\"#d9d9d9\""
        } else {
            ""
        };
        let _ = writeln!(s, "  v{k} [label=\"{}\", tooltip=\"{}\"{style}];", v.stabilizer_order, escape(&v.lift));
    }
    for e in &g.edges {
        for _ in 0..e.multiplicity {
            let _ = writeln!(s, "  v{} -- v{} [label=\"{}\"];", e.a, e.b, e.stabilizer_order);
        }
    }
    s.push_str("}\n");
    s
}
