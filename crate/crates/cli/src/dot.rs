//! Graphviz export of the AR quiver.

use std::fmt::Write as _;

use trirank::functor::orbit_index;
use trirank::CategoryPresentation;

const PALETTE: [&str; 8] = [
    "lightblue", "lightsalmon", "palegreen", "khaki", "plum", "lightgray", "pink", "wheat",
];

/// One node per indecomposable, one edge per irreducible map
/// (`dim rad/rad²` parallel edges), fill colour by Σ-orbit.
pub fn ar_quiver_dot(p: &CategoryPresentation) -> String {
    let orbit = orbit_index(p);
    let mut s = String::from("digraph ar_quiver {\n  node [style=filled];\n");
    for (x, name) in p.objects().iter().enumerate() {
        writeln!(
            s,
            "  \"{}\" [fillcolor={}, orbit={}];",
            escape(name),
            PALETTE[orbit[x] % PALETTE.len()],
            orbit[x]
        )
        .unwrap();
    }
    for x in 0..p.num_objects() {
        for y in 0..p.num_objects() {
            for _ in 0..p.irreducible_dim(x, y) {
                writeln!(s, "  \"{}\" -> \"{}\";", escape(p.name(x)), escape(p.name(y))).unwrap();
            }
        }
    }
    s.push_str("}\n");
    s
}

fn escape(name: &str) -> String {
    name.replace('\\', "\\\\").replace('"', "\\\"")
}
