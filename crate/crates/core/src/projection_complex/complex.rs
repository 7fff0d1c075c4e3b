use super::{ProjectionFamily, ProjectionTable};
use crate::error::{Error, Result};
use crate::report::LemmaReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write;

pub const SANDWICH: &str = "distance_sandwich";
pub const HYPERBOLICITY: &str = "hyperbolicity";

const UNREACHED: u64 = u64::MAX;

/// C_K on a window: integer points p ∈ [−R, R] of every class, unit edges
/// along each class, and edges of length K between π_Y(X) and π_X(Y)
/// whenever no third class Z has d_Z(X, Y) > K.
#[derive(Debug, Clone)]
pub struct QuasiTreeGraph {
    pub k: usize,
    pub radius: i64,
    pub classes: usize,
    /// Unordered class pairs joined by inter-axis edges.
    pub joined_pairs: Vec<(usize, usize)>,
    adj: Vec<Vec<(u32, u32)>>,
}

impl QuasiTreeGraph {
    /// 8·max‖φ(g)‖, doubled until every projection lies inside the window.
    pub fn default_radius(family: &ProjectionFamily, table: &ProjectionTable) -> i64 {
        let p = &family.presentation;
        let longest = family.representatives.iter().map(|r| p.cyclic_length(&r.image)).max().unwrap_or(1);
        let reach = table
            .rows
            .iter()
            .flatten()
            .flatten()
            .map(|i| i.lo.abs().max(i.hi.abs()))
            .max()
            .unwrap_or(0);
        let mut r = 8 * longest as i64;
        while r < reach {
            r *= 2;
        }
        r
    }

    pub fn build(table: &ProjectionTable, k: usize, radius: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("K must be at least 1".into()));
        }
        if radius < 1 || table.is_empty() {
            return Err(Error::InvalidParameter("empty window".into()));
        }
        let n = table.len();
        let joined_pairs: Vec<(usize, usize)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|x| {
                (x + 1..n)
                    .filter(move |&y| (0..n).all(|z| z == x || z == y || table.d(z, x, y) <= k))
                    .map(move |y| (x, y))
            })
            .collect();
        let width = (2 * radius + 1) as usize;
        let mut g = QuasiTreeGraph {
            k,
            radius,
            classes: n,
            joined_pairs: Vec::new(),
            adj: vec![Vec::new(); n * width],
        };
        for c in 0..n {
            for p in -radius..radius {
                g.add_edge(g.id(c, p), g.id(c, p + 1), 1);
            }
        }
        for &(x, y) in &joined_pairs {
            let (on_y, on_x) = (table.pi(y, x), table.pi(x, y));
            for a in on_y.lo.max(-radius)..=on_y.hi.min(radius) {
                for b in on_x.lo.max(-radius)..=on_x.hi.min(radius) {
                    g.add_edge(g.id(y, a), g.id(x, b), k as u32);
                }
            }
        }
        g.joined_pairs = joined_pairs;
        Ok(g)
    }

    fn add_edge(&mut self, a: usize, b: usize, w: u32) {
        self.adj[a].push((b as u32, w));
        self.adj[b].push((a as u32, w));
    }

    fn width(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    pub fn id(&self, class: usize, p: i64) -> usize {
        class * self.width() + (p + self.radius) as usize
    }

    pub fn point(&self, v: usize) -> (usize, i64) {
        (v / self.width(), (v % self.width()) as i64 - self.radius)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Single-source distances with predecessors.
    pub fn dijkstra(&self, src: usize) -> (Vec<u64>, Vec<u32>) {
        let mut dist = vec![UNREACHED; self.adj.len()];
        let mut prev = vec![u32::MAX; self.adj.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0;
        heap.push(Reverse((0u64, src as u32)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for &(u, w) in &self.adj[v as usize] {
                let nd = d + w as u64;
                if nd < dist[u as usize] {
                    dist[u as usize] = nd;
                    prev[u as usize] = v;
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        (dist, prev)
    }

    /// Component label of every vertex.
    pub fn components(&self) -> Vec<u32> {
        let mut label = vec![u32::MAX; self.adj.len()];
        let mut next = 0;
        for s in 0..self.adj.len() {
            if label[s] != u32::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(v) = stack.pop() {
                for &(u, _) in &self.adj[v] {
                    if label[u as usize] == u32::MAX {
                        label[u as usize] = next;
                        stack.push(u as usize);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Weighted adjacency list, one `u v w` line per edge.
    pub fn to_adjacency(&self) -> String {
        let mut s = String::new();
        for (v, out) in self.adj.iter().enumerate() {
            for &(u, w) in out {
                if (u as usize) > v {
                    let _ = writeln!(s, "{v} {u} {w}");
                }
            }
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("graph C_K {{\n  // K = {}, window radius {}\n", self.k, self.radius);
        for (v, out) in self.adj.iter().enumerate() {
            for &(u, w) in out {
                if (u as usize) > v {
                    let ((cv, pv), (cu, pu)) = (self.point(v), self.point(u as usize));
                    let _ = writeln!(s, "  \"{cv}:{pv}\" -- \"{cu}:{pu}\" [weight={w}];");
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichStats {
    pub k: usize,
    pub theta: usize,
    pub samples: usize,
    pub checked: usize,
    pub window_artifacts: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// min over checked pairs of 4·d_C − ρ and of 2ρ + 3K − d_C.
    pub min_lower_margin: Option<i64>,
    pub min_upper_margin: Option<i64>,
    /// Counts of d_C/ρ in [0,¼), [¼,½), [½,1), [1,∞) for ρ > 0.
    pub ratio_histogram: [usize; 4],
}

/// ¼ρ(x,z) ≤ d_C(x,z) ≤ 2ρ(x,z) + 3K for same-class pairs. A pair whose
/// shortest path touches the window boundary is a window artifact and is
/// counted instead of checked. Endpoints are drawn off the boundary.
pub fn distance_sandwich_check(
    graph: &QuasiTreeGraph,
    theta: usize,
    samples: usize,
    seed: u64,
) -> (LemmaReport, SandwichStats) {
    let mut stats = SandwichStats {
        k: graph.k,
        theta,
        samples,
        checked: 0,
        window_artifacts: 0,
        lower_violations: 0,
        upper_violations: 0,
        min_lower_margin: None,
        min_upper_margin: None,
        ratio_histogram: [0; 4],
    };
    let report = LemmaReport::new(SANDWICH)
        .input("k", graph.k)
        .input("theta", theta)
        .input("samples", samples)
        .input("seed", seed);
    if graph.k <= 11 * theta {
        return (report.skip("K must exceed 11·theta"), stats);
    }
    const PER_SOURCE: usize = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = graph.radius;
    let mut jobs = Vec::new();
    let mut left = samples;
    while left > 0 {
        let c = rng.gen_range(0..graph.classes);
        let x = rng.gen_range(1 - r..r);
        let zs: Vec<i64> = (0..PER_SOURCE.min(left)).map(|_| rng.gen_range(1 - r..r)).collect();
        left -= zs.len();
        jobs.push((c, x, zs));
    }
    let results: Vec<(i64, u64, bool)> = jobs
        .par_iter()
        .flat_map_iter(|(c, x, zs)| {
            let (dist, prev) = graph.dijkstra(graph.id(*c, *x));
            zs.iter()
                .map(|&z| {
                    let v = graph.id(*c, z);
                    let mut touches = false;
                    let mut cur = v as u32;
                    loop {
                        if graph.point(cur as usize).1.abs() == r {
                            touches = true;
                        }
                        if prev[cur as usize] == u32::MAX {
                            break;
                        }
                        cur = prev[cur as usize];
                    }
                    ((x - z).abs(), dist[v], touches)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    for (rho, d, touches) in results {
        if touches {
            stats.window_artifacts += 1;
            continue;
        }
        stats.checked += 1;
        let d = d as i64;
        let lower = 4 * d - rho;
        let upper = 2 * rho + 3 * graph.k as i64 - d;
        stats.lower_violations += usize::from(lower < 0);
        stats.upper_violations += usize::from(upper < 0);
        stats.min_lower_margin = Some(stats.min_lower_margin.map_or(lower, |m| m.min(lower)));
        stats.min_upper_margin = Some(stats.min_upper_margin.map_or(upper, |m| m.min(upper)));
        if rho > 0 {
            let b = if 4 * d < rho {
                0
            } else if 2 * d < rho {
                1
            } else if d < rho {
                2
            } else {
                3
            };
            stats.ratio_histogram[b] += 1;
        }
    }
    let report = report
        .quantity("checked", stats.checked)
        .quantity("window_artifacts", stats.window_artifacts)
        .quantity("lower_violations", stats.lower_violations)
        .quantity("upper_violations", stats.upper_violations)
        .check(stats.lower_violations == 0 && stats.upper_violations == 0, "distance outside the sandwich")
        .check(20 * stats.window_artifacts < samples, "window artifacts reach 5% of samples");
    (report, stats)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaEstimate {
    pub k: usize,
    pub points: usize,
    pub quadruples: usize,
    /// 2δ̂, kept integral.
    pub twice_delta: u64,
    pub components_probed: usize,
}

impl DeltaEstimate {
    pub fn delta(&self) -> f64 {
        self.twice_delta as f64 / 2.0
    }
}

/// Four-point defect over random quadruples of `points` sampled vertices,
/// each quadruple taken inside one connected component.
pub fn hyperbolicity_probe(
    graph: &QuasiTreeGraph,
    points: usize,
    quadruples: usize,
    seed: u64,
) -> (LemmaReport, DeltaEstimate) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comp = graph.components();
    let pts: Vec<usize> = (0..points).map(|_| rng.gen_range(0..graph.vertex_count())).collect();
    let rows: Vec<Vec<u64>> = pts
        .par_iter()
        .map(|&s| {
            let (d, _) = graph.dijkstra(s);
            pts.iter().map(|&t| d[t]).collect()
        })
        .collect();
    let mut groups: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for (i, &v) in pts.iter().enumerate() {
        groups.entry(comp[v]).or_default().push(i);
    }
    let usable: Vec<&Vec<usize>> = groups.values().filter(|g| g.len() >= 4).collect();
    let mut est = DeltaEstimate {
        k: graph.k,
        points,
        quadruples: 0,
        twice_delta: 0,
        components_probed: usable.len(),
    };
    if !usable.is_empty() {
        for _ in 0..quadruples {
            let grp = usable[rng.gen_range(0..usable.len())];
            let q: Vec<usize> = (0..4).map(|_| grp[rng.gen_range(0..grp.len())]).collect();
            let d = |a: usize, b: usize| rows[q[a]][q[b]];
            let mut s = [d(0, 1) + d(2, 3), d(0, 2) + d(1, 3), d(0, 3) + d(1, 2)];
            s.sort_unstable();
            est.twice_delta = est.twice_delta.max(s[2] - s[1]);
            est.quadruples += 1;
        }
    }
    let report = LemmaReport::new(HYPERBOLICITY)
        .input("k", graph.k)
        .input("points", points)
        .input("quadruples", quadruples)
        .input("seed", seed)
        .quantity("delta", est.delta())
        .quantity("components_probed", est.components_probed)
        .check(est.quadruples > 0, "no component with four sampled points")
        .check(est.twice_delta <= 4 * graph.k as u64, "delta exceeds 2K");
    (report, est)
}

#[cfg(test)]
mod tests {
    use super::super::{build_family, Interval};
    use super::*;
    use crate::free_group::{nielsen_pool, parse_word, GroupPresentation};

    fn table(rows: Vec<Vec<Option<(i64, i64)>>>) -> ProjectionTable {
        ProjectionTable {
            rows: rows
                .into_iter()
                .map(|r| r.into_iter().map(|c| c.map(|(lo, hi)| Interval { lo, hi })).collect())
                .collect(),
        }
    }

    #[test]
    fn two_classes_join_at_feet() {
        let t = table(vec![vec![None, Some((2, 2))], vec![Some((-1, 0)), None]]);
        let g = QuasiTreeGraph::build(&t, 5, 4).unwrap();
        assert_eq!(g.joined_pairs, vec![(0, 1)]);
        let (d, _) = g.dijkstra(g.id(0, 2));
        assert_eq!(d[g.id(1, -1)], 5);
        assert_eq!(d[g.id(1, 0)], 5);
        assert_eq!(d[g.id(1, 3)], 8);
        assert!(QuasiTreeGraph::build(&t, 0, 4).is_err());
    }

    #[test]
    fn large_projection_blocks_edges() {
        // d_2(0, 1) = 10 > K.
        let t = table(vec![
            vec![None, Some((0, 0)), Some((0, 0))],
            vec![Some((0, 0)), None, Some((0, 0))],
            vec![Some((0, 0)), Some((10, 10)), None],
        ]);
        let g = QuasiTreeGraph::build(&t, 3, 12).unwrap();
        assert_eq!(g.joined_pairs, vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn a_single_line_has_no_defect() {
        let t = table(vec![vec![None]]);
        let g = QuasiTreeGraph::build(&t, 1, 20).unwrap();
        let (r, e) = hyperbolicity_probe(&g, 12, 500, 3);
        assert!(r.passed());
        assert_eq!(e.twice_delta, 0);
    }

    #[test]
    fn sandwich_on_a_small_family() {
        let p = GroupPresentation::free(2);
        let g = parse_word(&p, "aabAbbAB").unwrap();
        let fam = build_family(&p, &g, &nielsen_pool(&p, 2)).unwrap();
        let t = fam.projection_table().unwrap();
        let theta = t.theta_empirical();
        let r = QuasiTreeGraph::default_radius(&fam, &t);
        let graph = QuasiTreeGraph::build(&t, 11 * theta + 1, r).unwrap();
        let (rep, stats) = distance_sandwich_check(&graph, theta, 100, 1);
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(stats.checked + stats.window_artifacts, 100);
        let low = QuasiTreeGraph::build(&t, 11 * theta, r).unwrap();
        assert_eq!(distance_sandwich_check(&low, theta, 10, 1).0.verdict, crate::report::Verdict::Skipped);
    }
}
