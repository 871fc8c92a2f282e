//! Diagram output for histories: Graphviz DOT with one dashed cluster per
//! session, and a plain-text grid with the same conventions. Both renderers
//! are pure functions of the history; equal histories render byte-identically.
//!
//! Conventions: documents appear in chronological order, sessions group into
//! clusters, and hierarchy edges are drawn only towards active children.
//! Inactive, active, and fully active documents are visually distinct.

use std::fmt::Write as _;

use crate::history::{History, SessionId};

fn escape_label(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Sessions in order of first appearance, with the positions of their docs.
fn session_groups(h: &History) -> Vec<(&SessionId, Vec<usize>)> {
    let mut groups: Vec<(&SessionId, Vec<usize>)> = Vec::new();
    for (i, d) in h.docs().iter().enumerate() {
        match groups.iter_mut().find(|(s, _)| *s == &d.session) {
            Some((_, positions)) => positions.push(i),
            None => groups.push((&d.session, vec![i])),
        }
    }
    groups
}

/// Parent -> active-child edges as position pairs, ordered by child.
fn active_child_edges(h: &History) -> Vec<(usize, usize)> {
    h.docs()
        .iter()
        .enumerate()
        .filter(|(_, d)| d.active)
        .filter_map(|(i, d)| {
            d.parent
                .as_ref()
                .and_then(|p| h.position(p))
                .map(|pi| (pi, i))
        })
        .collect()
}

/// Renders a history as a Graphviz digraph. Nodes are named by chronological
/// position; fully active documents are filled dark, active ones light,
/// inactive ones left plain.
pub fn render_dot(h: &History) -> String {
    let fully = h.fully_active_flags_public();
    let mut out = String::new();
    out.push_str("digraph history {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    for (cluster, (session, positions)) in session_groups(h).iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{cluster} {{");
        out.push_str("    style=dashed;\n");
        let _ = writeln!(out, "    label=\"{}\";", escape_label(session.as_str()));
        for &i in positions {
            let d = &h.docs()[i];
            let style = if fully[i] {
                ", style=\"bold,filled\", fillcolor=\"gray25\", fontcolor=\"white\""
            } else if d.active {
                ", style=\"filled\", fillcolor=\"gray85\""
            } else {
                ""
            };
            let _ = writeln!(out, "    n{i} [label=\"{}\"{style}];", escape_label(d.id.as_str()));
        }
        out.push_str("  }\n");
    }
    for (parent, child) in active_child_edges(h) {
        let _ = writeln!(out, "  n{parent} -> n{child};");
    }
    out.push_str("}\n");
    out
}

/// Renders a history as a fixed-width text grid: one row per session (in
/// first-appearance order), one column per document (chronological). Cells
/// mark fully active documents as `[id]`, active ones as `<id>`, inactive
/// ones as `(id)`. A trailing line lists the active-child edges.
pub fn render_ascii(h: &History) -> String {
    let fully = h.fully_active_flags_public();
    let groups = session_groups(h);
    let session_width = groups
        .iter()
        .map(|(s, _)| s.as_str().len())
        .max()
        .unwrap_or(1);
    let cell_width = h
        .docs()
        .iter()
        .map(|d| d.id.as_str().len())
        .max()
        .unwrap_or(1)
        + 2;

    let mut out = String::new();
    for (session, positions) in &groups {
        let _ = write!(out, "{:>session_width$} |", session.as_str());
        let last = *positions.last().expect("non-empty session");
        for i in 0..=last {
            out.push(' ');
            if positions.contains(&i) {
                let d = &h.docs()[i];
                let cell = if fully[i] {
                    format!("[{}]", d.id)
                } else if d.active {
                    format!("<{}>", d.id)
                } else {
                    format!("({})", d.id)
                };
                let _ = write!(out, "{cell:^cell_width$}");
            } else {
                let _ = write!(out, "{:cell_width$}", "");
            }
        }
        // Trailing blanks carry no information.
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    }
    let edges = active_child_edges(h);
    if edges.is_empty() {
        out.push_str("edges: (none)\n");
    } else {
        out.push_str("edges:");
        for (parent, child) in edges {
            let _ = write!(out, " {}->{}", h.docs()[parent].id, h.docs()[child].id);
        }
        out.push('\n');
    }
    out
}

impl History {
    /// Per-position fully-active flags, exposed for the renderers.
    pub(crate) fn fully_active_flags_public(&self) -> Vec<bool> {
        let fully = self.fully_active_set();
        self.docs().iter().map(|d| fully.contains(&d.id)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> History {
        s.parse().expect("test history parses")
    }

    #[test]
    fn dot_of_a_singleton() {
        let got = render_dot(&History::initial("0", "T"));
        let expected = "digraph history {\n\
                        \x20 rankdir=LR;\n\
                        \x20 node [shape=box, fontname=\"monospace\"];\n\
                        \x20 subgraph cluster_0 {\n\
                        \x20   style=dashed;\n\
                        \x20   label=\"T\";\n\
                        \x20   n0 [label=\"0\", style=\"bold,filled\", fillcolor=\"gray25\", fontcolor=\"white\"];\n\
                        \x20 }\n\
                        }\n";
        assert_eq!(got, expected);
    }

    #[test]
    fn dot_of_catalog_case_1_has_three_clusters_and_two_edges() {
        let dot = render_dot(&h("0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)"));
        assert_eq!(dot.matches("subgraph cluster_").count(), 3);
        assert!(dot.contains("label=\"T\""));
        assert!(dot.contains("label=\"A\""));
        assert!(dot.contains("label=\"B\""));
        assert!(dot.contains("  n0 -> n1;\n"));
        assert!(dot.contains("  n0 -> n2;\n"));
        assert_eq!(dot.matches(" -> ").count(), 2);
    }

    #[test]
    fn dot_distinguishes_active_from_fully_active() {
        // After navigating session A to 6, document 4 is active but its
        // parent 1 is not: edge 1->4 still drawn, 4 styled active-only.
        let nav = h("0.T(-)* 1.A(0) 2.B(1) 3.C(0)* 4.B(1)* 6.A(0)*");
        let dot = render_dot(&nav);
        assert!(dot.contains("n0 -> n5;"), "edge 0->6:\n{dot}");
        assert!(dot.contains("n1 -> n4;"), "edge 1->4:\n{dot}");
        assert!(dot.contains("n4 [label=\"4\", style=\"filled\", fillcolor=\"gray85\"];"));
        assert!(dot.contains("n5 [label=\"6\", style=\"bold,filled\""));
    }

    #[test]
    fn ascii_of_a_singleton() {
        assert_eq!(
            render_ascii(&History::initial("0", "T")),
            "T | [0]\nedges: (none)\n"
        );
    }

    #[test]
    fn ascii_of_catalog_case_1() {
        let text = render_ascii(&h("0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)"));
        assert_eq!(
            text,
            "T | [0]\n\
             A |     [1]     (3)\n\
             B |         [2]     (4)\n\
             edges: 0->1 0->2\n"
        );
    }

    #[test]
    fn rendering_is_a_function_of_the_value() {
        let a = h("0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)");
        let b = h("0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)");
        assert_eq!(render_dot(&a), render_dot(&b));
        assert_eq!(render_ascii(&a), render_ascii(&b));
    }
}
