//! Graphviz output for class diagrams.

use std::fmt::Write as _;

use crate::lattice::{ClassStore, HasseDiagram};
use crate::pattern::format_partition;

/// Digraph with one box per class, lower classes at the bottom; labels give
/// ν and the column partitions.
pub fn hasse_dot(store: &ClassStore, diagram: &HasseDiagram) -> String {
    let mut out = String::new();
    writeln!(out, "digraph classes_n{} {{", store.n).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=box, fontname=\"monospace\"];").unwrap();
    for (i, key) in diagram.nodes.iter().enumerate() {
        let record = &store.records[key];
        let parts: Vec<String> = record
            .signature
            .partitions
            .iter()
            .map(|p| format_partition(p))
            .collect();
        let style = if record.maximal { ", style=bold" } else { "" };
        writeln!(
            out,
            "  c{i} [label=\"ν={}\\n{}\", tooltip=\"{}\"{style}];",
            record.signature.nu,
            parts.join(" | "),
            key.to_hex()
        )
        .unwrap();
    }
    for &(lo, hi) in &diagram.edges {
        writeln!(out, "  c{lo} -> c{hi};").unwrap();
    }
    out.push_str("}\n");
    out
}
