//! Line-oriented text format for graphs, morphisms and move logs.
//!
//! ```text
//! vertices 2
//! base 0
//! edge 0 1 3/2
//! mark 0+ 1-
//! ```
//!
//! A morphism wraps two graphs in `source` … `end` and `target` … `end`
//! blocks followed by `vertex_map v0 v1 …` and one `image e d1 d2 …` line per
//! edge. Oriented edges are written `3+` or `3-`; `#` starts a comment.

use super::decompose::{FoldMove, FoldSequence, Identification};
use super::{Edge, GraphMorphism, Length, MarkedGraph, OEdge};
use crate::error::{Error, Result};
use std::fmt::Write;

struct Line<'a> {
    no: usize,
    words: Vec<&'a str>,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("");
            let words: Vec<&str> = l.split_whitespace().collect();
            (!words.is_empty()).then_some(Line { no: i + 1, words })
        })
        .collect()
}

impl Line<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.no, 1, msg)
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.words.len() == n + 1 {
            Ok(())
        } else {
            Err(self.err(format!("`{}` takes {n} argument(s)", self.words[0])))
        }
    }

    fn usize_at(&self, i: usize) -> Result<usize> {
        self.words[i]
            .parse()
            .map_err(|_| self.err(format!("expected a nonnegative integer, found `{}`", self.words[i])))
    }

    fn length_at(&self, i: usize) -> Result<Length> {
        self.words[i]
            .parse()
            .map_err(|_| self.err(format!("expected a rational length, found `{}`", self.words[i])))
    }

    fn oedges_from(&self, i: usize) -> Result<Vec<OEdge>> {
        self.words[i..].iter().map(|w| parse_oedge(w).ok_or_else(|| self.err(format!("bad oriented edge `{w}`")))).collect()
    }
}

fn parse_oedge(w: &str) -> Option<OEdge> {
    let (num, rev) = match w.as_bytes().last()? {
        b'+' => (&w[..w.len() - 1], false),
        b'-' => (&w[..w.len() - 1], true),
        _ => return None,
    };
    Some(OEdge { edge: num.parse().ok()?, rev })
}

fn join(path: &[OEdge]) -> String {
    path.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

fn graph_from(ls: &[Line]) -> Result<MarkedGraph> {
    let mut n = None;
    let mut base = 0;
    let mut edges = Vec::new();
    let mut marking = Vec::new();
    for l in ls {
        match l.words[0] {
            "vertices" => {
                l.arity(1)?;
                n = Some(l.usize_at(1)?);
            }
            "base" => {
                l.arity(1)?;
                base = l.usize_at(1)?;
            }
            "edge" => {
                l.arity(3)?;
                edges.push(Edge {
                    tail: l.usize_at(1)?,
                    head: l.usize_at(2)?,
                    length: l.length_at(3)?,
                });
            }
            "mark" => marking.push(l.oedges_from(1)?),
            w => return Err(l.err(format!("unknown graph directive `{w}`"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(ls.first().map_or(1, |l| l.no), 1, "missing `vertices` line"))?;
    if let Some(bad) = marking.iter().flatten().find(|d| d.edge >= edges.len()) {
        return Err(Error::InvalidGraph(format!("marking uses unknown edge {}", bad.edge)));
    }
    MarkedGraph::new(n, edges, base, marking)
}

pub fn parse_graph(text: &str) -> Result<MarkedGraph> {
    graph_from(&lines(text))
}

pub fn format_graph(g: &MarkedGraph) -> String {
    let mut s = format!("vertices {}\nbase {}\n", g.num_vertices, g.base);
    for e in &g.edges {
        let _ = writeln!(s, "edge {} {} {}", e.tail, e.head, e.length);
    }
    for m in &g.marking {
        let _ = writeln!(s, "mark {}", join(m));
    }
    s
}

/// Splits off a `name` … `end` block starting at `ls[i]`.
fn block<'a, 'b>(ls: &'b [Line<'a>], i: usize, name: &str) -> Result<(&'b [Line<'a>], usize)> {
    let head = ls.get(i).ok_or_else(|| Error::parse(ls.last().map_or(1, |l| l.no), 1, format!("missing `{name}` block")))?;
    if head.words != [name] {
        return Err(head.err(format!("expected `{name}`")));
    }
    let end = ls[i + 1..]
        .iter()
        .position(|l| l.words == ["end"])
        .ok_or_else(|| head.err(format!("unterminated `{name}` block")))?;
    Ok((&ls[i + 1..i + 1 + end], i + end + 2))
}

pub fn parse_morphism(text: &str) -> Result<GraphMorphism> {
    let ls = lines(text);
    let (src, i) = block(&ls, 0, "source")?;
    let (tgt, i) = block(&ls, i, "target")?;
    let source = graph_from(src)?;
    let target = graph_from(tgt)?;
    let mut vertex_map = None;
    let mut edge_map: Vec<Option<Vec<OEdge>>> = vec![None; source.edges.len()];
    for l in &ls[i..] {
        match l.words[0] {
            "vertex_map" => {
                vertex_map = Some((1..l.words.len()).map(|k| l.usize_at(k)).collect::<Result<Vec<_>>>()?);
            }
            "image" => {
                if l.words.len() < 2 {
                    return Err(l.err("`image` needs an edge index"));
                }
                let e = l.usize_at(1)?;
                let p = l.oedges_from(2)?;
                if p.iter().any(|d| d.edge >= target.edges.len()) {
                    return Err(l.err("image uses an unknown target edge"));
                }
                *edge_map.get_mut(e).ok_or_else(|| l.err(format!("edge {e} out of range")))? = Some(p);
            }
            w => return Err(l.err(format!("unknown morphism directive `{w}`"))),
        }
    }
    let vertex_map = vertex_map.ok_or_else(|| Error::parse(1, 1, "missing `vertex_map` line"))?;
    let edge_map = edge_map
        .into_iter()
        .enumerate()
        .map(|(e, p)| p.ok_or_else(|| Error::InvalidGraph(format!("no image for edge {e}"))))
        .collect::<Result<Vec<_>>>()?;
    GraphMorphism::new(source, target, vertex_map, edge_map)
}

pub fn format_morphism(f: &GraphMorphism) -> String {
    let mut s = format!("source\n{}end\ntarget\n{}end\n", format_graph(&f.source), format_graph(&f.target));
    let vm: Vec<String> = f.vertex_map.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "vertex_map {}", vm.join(" "));
    for (i, p) in f.edge_map.iter().enumerate() {
        let _ = writeln!(s, "image {i} {}", join(p));
    }
    s.lines().map(|l| l.trim_end().to_string() + "\n").collect()
}

pub fn format_fold_sequence(seq: &FoldSequence) -> String {
    let mut s = String::new();
    for m in &seq.moves {
        let _ = match m {
            FoldMove::Rescale { edge, length } => writeln!(s, "rescale {edge} {length}"),
            FoldMove::Subdivide { edge, at } => writeln!(s, "subdivide {edge} {at}"),
            FoldMove::Collapse { edge, length } => writeln!(s, "collapse {edge} {length}"),
            FoldMove::Fold { first, second } => writeln!(s, "fold {first} {second}"),
        };
    }
    let vm: Vec<String> = seq.identification.vertex_map.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "prefix {}", seq.prefix_len);
    let _ = writeln!(s, "subdivided_edges {}", seq.subdivided_edges);
    let _ = writeln!(s, "identify_vertices {}", vm.join(" "));
    let _ = writeln!(s, "identify_edges {}", join(&seq.identification.edge_map));
    s.lines().map(|l| l.trim_end().to_string() + "\n").collect()
}

pub fn parse_fold_sequence(text: &str) -> Result<FoldSequence> {
    let mut seq = FoldSequence {
        moves: Vec::new(),
        identification: Identification {
            vertex_map: Vec::new(),
            edge_map: Vec::new(),
        },
        prefix_len: 0,
        subdivided_edges: 0,
    };
    for l in lines(text) {
        let oedge = |i: usize| parse_oedge(l.words[i]).ok_or_else(|| l.err(format!("bad oriented edge `{}`", l.words[i])));
        match l.words[0] {
            "rescale" | "subdivide" | "collapse" => {
                l.arity(2)?;
                let (edge, x) = (l.usize_at(1)?, l.length_at(2)?);
                seq.moves.push(match l.words[0] {
                    "rescale" => FoldMove::Rescale { edge, length: x },
                    "subdivide" => FoldMove::Subdivide { edge, at: x },
                    _ => FoldMove::Collapse { edge, length: x },
                });
            }
            "fold" => {
                l.arity(2)?;
                seq.moves.push(FoldMove::Fold {
                    first: oedge(1)?,
                    second: oedge(2)?,
                });
            }
            "prefix" => {
                l.arity(1)?;
                seq.prefix_len = l.usize_at(1)?;
            }
            "subdivided_edges" => {
                l.arity(1)?;
                seq.subdivided_edges = l.usize_at(1)?;
            }
            "identify_vertices" => {
                seq.identification.vertex_map = (1..l.words.len()).map(|k| l.usize_at(k)).collect::<Result<_>>()?;
            }
            "identify_edges" => seq.identification.edge_map = l.oedges_from(1)?,
            w => return Err(l.err(format!("unknown move `{w}`"))),
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::super::{fold_decompose, random_morphism};
    use super::*;

    #[test]
    fn graph_round_trip() {
        let g = MarkedGraph::theta([Length::new(1, 2), Length::from_integer(1), Length::new(7, 3)]).unwrap();
        assert_eq!(parse_graph(&format_graph(&g)).unwrap(), g);
    }

    #[test]
    fn morphism_and_moves_round_trip() {
        for seed in 0..10 {
            let f = random_morphism(seed).unwrap();
            assert_eq!(parse_morphism(&format_morphism(&f)).unwrap(), f);
            let seq = fold_decompose(&f).unwrap();
            assert_eq!(parse_fold_sequence(&format_fold_sequence(&seq)).unwrap(), seq);
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_graph("vertices 1\n# note\nedge 0 0 x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(parse_graph("vertices 1\nedge 0 0 1\nmark 1+\n").is_err());
    }
}
