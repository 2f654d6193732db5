use std::fmt::Write as _;

use supertree_tw::dgraph::{DisplayGraph, VertexKind};
use supertree_tw::planar::Face;

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

fn color(tree: usize) -> &'static str {
    PALETTE[tree % PALETTE.len()]
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Faces with their dual labels, used to annotate edges.
pub struct FaceAnnotation<'a> {
    pub faces: &'a [Face],
    pub labels: &'a [usize],
}

/// Taxa are boxes; inner vertices are circles colored by tree, as are edges.
pub fn render(d: &DisplayGraph, faces: Option<FaceAnnotation<'_>>) -> String {
    let mut out = String::from("graph display {\n");
    out.push_str("  node [fontname=\"Helvetica\", fontsize=10];\n");
    for v in 0..d.vertex_count() {
        let name = quote(&d.vertex_name(v));
        match d.vertex(v).kind {
            VertexKind::Taxon(_) => writeln!(out, "  v{v} [label={name}, shape=box];").unwrap(),
            VertexKind::Internal { tree, .. } => writeln!(
                out,
                "  v{v} [label={name}, shape=circle, color={}];",
                quote(color(tree))
            )
            .unwrap(),
        }
    }
    // each edge id lies on two face sides
    let mut sides: Vec<Vec<usize>> = vec![Vec::new(); d.edge_count()];
    if let Some(fa) = &faces {
        for (i, f) in fa.faces.iter().enumerate() {
            for &(_, e) in &f.boundary {
                sides[e].push(i);
            }
        }
    }
    for (e, edge) in d.edges().iter().enumerate() {
        let mut attrs = format!("color={}", quote(color(edge.tree)));
        if let Some(fa) = &faces {
            let tags: Vec<String> = sides[e]
                .iter()
                .map(|&f| format!("f{f}:{}", fa.labels[f]))
                .collect();
            write!(attrs, ", label={}", quote(&tags.join(" "))).unwrap();
        }
        writeln!(out, "  v{} -- v{} [{attrs}];", edge.a, edge.b).unwrap();
    }
    if let Some(fa) = &faces {
        for (i, f) in fa.faces.iter().enumerate() {
            let kind = if f.is_outer { " outer" } else { "" };
            writeln!(out, "  // f{i}{kind} label={} len={}", fa.labels[i], f.len()).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
