use super::{GTree, TreeModel, Vertex};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;

/// Graphviz rendering of the ball of the given radius around `center`.
/// Vertices of infinite valence show only a truncated set of neighbours.
pub fn ball_dot(t: &TreeModel, center: &Vertex, radius: usize, highlight: &[Vertex]) -> String {
    let mut dist: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut edges: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    dist.insert(center.clone(), 0);
    let mut queue = VecDeque::from([center.clone()]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for n in t.neighbors(&v) {
            let key = if v < n {
                (v.clone(), n.clone())
            } else {
                (n.clone(), v.clone())
            };
            edges.insert(key);
            if !dist.contains_key(&n) {
                dist.insert(n.clone(), d + 1);
                queue.push_back(n);
            }
        }
    }
    let ids: BTreeMap<&Vertex, usize> = dist.keys().enumerate().map(|(i, v)| (v, i)).collect();
    let mut out = String::from("graph ball {\n  node [shape=circle, fontsize=10];\n");
    for (v, i) in &ids {
        let style = if highlight.contains(v) {
            ", style=filled, fillcolor=\"#f4b942\""
        } else {
            ""
        };
        let _ = writeln!(out, "  v{i} [label=\"{}\"{style}];", t.format_vertex(v));
    }
    for (a, b) in &edges {
        if let (Some(i), Some(j)) = (ids.get(a), ids.get(b)) {
            let _ = writeln!(out, "  v{i} -- v{j};");
        }
    }
    out.push_str("}\n");
    out
}
