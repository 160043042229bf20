//! Planar networks: acyclic digraphs with a straight-line plane embedding,
//! boundary sources and sinks, and nonnegative rational vertex weights.

use std::collections::BTreeMap;

use num::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{orient, segments_meet, Point, SegmentMeet};
use crate::rational::{format_rational, parse_rational, rat_one, Rational};

pub type VertexId = usize;

#[derive(Debug, Clone)]
pub struct Vertex {
    pub name: String,
    pub pos: Point,
}

/// A directed graph with straight-line positions, `n` sources and `n'` sinks.
///
/// Invariants (checked by [`PlanarNetwork::validate`], not by construction):
/// acyclic; edges meet only at common endpoints; terminals in convex
/// position in the clockwise cyclic order `s_n..s_1, t_1..t_{n'}`; every
/// edge on some source-to-sink path.
#[derive(Debug, Clone)]
pub struct PlanarNetwork {
    vertices: Vec<Vertex>,
    edges: Vec<(VertexId, VertexId)>,
    sources: Vec<VertexId>,
    sinks: Vec<VertexId>,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
}

impl PlanarNetwork {
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<(VertexId, VertexId)>,
        sources: Vec<VertexId>,
        sinks: Vec<VertexId>,
    ) -> Result<Self> {
        let n = vertices.len();
        let mut names = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if names.insert(v.name.clone(), i).is_some() {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate vertex id {:?}",
                    v.name
                )));
            }
        }
        for &(t, h) in &edges {
            if t >= n || h >= n {
                return Err(Error::InvalidNetwork("edge endpoint out of range".into()));
            }
            if t == h {
                return Err(Error::InvalidNetwork("self-loop".into()));
            }
        }
        for &s in sources.iter().chain(&sinks) {
            if s >= n {
                return Err(Error::InvalidNetwork("terminal out of range".into()));
            }
        }
        if sources.iter().any(|s| sinks.contains(s)) {
            return Err(Error::InvalidNetwork("a vertex is both source and sink".into()));
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(t, h) in &edges {
            out_adj[t].push(h);
            in_adj[h].push(t);
        }
        for adj in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            adj.sort_unstable();
        }
        Ok(PlanarNetwork {
            vertices,
            edges,
            sources,
            sinks,
            out_adj,
            in_adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    pub fn sinks(&self) -> &[VertexId] {
        &self.sinks
    }

    /// 1-based source accessor.
    pub fn source(&self, i: usize) -> VertexId {
        self.sources[i - 1]
    }

    /// 1-based sink accessor.
    pub fn sink(&self, j: usize) -> VertexId {
        self.sinks[j - 1]
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v]
    }

    pub fn edge_index(&self, tail: VertexId, head: VertexId) -> Option<usize> {
        self.edges.iter().position(|&e| e == (tail, head))
    }

    /// Vertices in a topological order, or `None` if a directed cycle exists.
    pub fn topological_order(&self) -> Option<Vec<VertexId>> {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_adj[v].len()).collect();
        let mut queue: Vec<VertexId> = (0..n).filter(|&v| indeg[v] == 0).collect();
        queue.sort_unstable();
        let mut order = Vec::with_capacity(n);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            order.push(v);
            for &w in &self.out_adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Diagnostic validation against all structural and geometric invariants.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        if self.topological_order().is_none() {
            violations.push(Violation::Cycle);
        }

        // Pairwise edge geometry.
        for i in 0..self.edges.len() {
            for j in (i + 1)..self.edges.len() {
                let (a, b) = self.edges[i];
                let (c, d) = self.edges[j];
                let meet = segments_meet(
                    &self.vertices[a].pos,
                    &self.vertices[b].pos,
                    &self.vertices[c].pos,
                    &self.vertices[d].pos,
                );
                if meet == SegmentMeet::Improper {
                    violations.push(Violation::EdgeCrossing(i, j));
                }
            }
        }

        // No vertex in the interior of an edge.
        for (ei, &(t, h)) in self.edges.iter().enumerate() {
            for v in 0..self.vertices.len() {
                if v == t || v == h {
                    continue;
                }
                let p = &self.vertices[v].pos;
                if crate::geometry::on_segment(&self.vertices[t].pos, &self.vertices[h].pos, p) {
                    violations.push(Violation::VertexOnEdge(v, ei));
                }
            }
        }

        self.check_terminal_order(&mut violations);

        // Redundant edges: tail must be reachable from a source and head
        // must reach a sink.
        let from_sources = self.reachable(&self.sources, true);
        let to_sinks = self.reachable(&self.sinks, false);
        for (ei, &(t, h)) in self.edges.iter().enumerate() {
            if !(from_sources[t] && to_sinks[h]) {
                violations.push(Violation::RedundantEdge(ei));
            }
        }

        ValidationReport { violations }
    }

    fn reachable(&self, seeds: &[VertexId], forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack: Vec<VertexId> = seeds.to_vec();
        for &s in seeds {
            seen[s] = true;
        }
        while let Some(v) = stack.pop() {
            let next = if forward { &self.out_adj[v] } else { &self.in_adj[v] };
            for &w in next {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Terminals must sit in convex position, traversed clockwise in the
    /// order `s_n, …, s_1, t_1, …, t_{n'}` (equivalently: sources left to
    /// right along the lower arc, sinks right to left along the upper arc,
    /// counterclockwise). Runs of collinear terminals are allowed as long
    /// as they advance consistently.
    fn check_terminal_order(&self, violations: &mut Vec<Violation>) {
        let cycle: Vec<VertexId> = self
            .sources
            .iter()
            .rev()
            .chain(self.sinks.iter())
            .copied()
            .collect();
        let pts: Vec<&Point> = cycle.iter().map(|&v| &self.vertices[v].pos).collect();
        let k = pts.len();
        for i in 0..k {
            for j in (i + 1)..k {
                if pts[i] == pts[j] {
                    violations.push(Violation::TerminalOrder("coincident terminals".into()));
                    return;
                }
            }
        }
        if k <= 2 {
            return;
        }
        let mut strict_turn = false;
        for i in 0..k {
            let a = pts[i];
            let b = pts[(i + 1) % k];
            let c = pts[(i + 2) % k];
            match orient(a, b, c) {
                -1 => strict_turn = true,
                1 => {
                    violations.push(Violation::TerminalOrder(format!(
                        "counterclockwise turn at terminal {:?}",
                        self.vertices[cycle[(i + 1) % k]].name
                    )));
                    return;
                }
                _ => {
                    let dot = (&b.x - &a.x) * (&c.x - &b.x) + (&b.y - &a.y) * (&c.y - &b.y);
                    if !dot.is_positive() {
                        violations.push(Violation::TerminalOrder(format!(
                            "degenerate turn at terminal {:?}",
                            self.vertices[cycle[(i + 1) % k]].name
                        )));
                        return;
                    }
                }
            }
        }
        if !strict_turn {
            violations.push(Violation::TerminalOrder("all terminals collinear".into()));
            return;
        }
        // Clockwise turns everywhere plus a simple boundary polygon pin the
        // cyclic order down completely.
        for i in 0..k {
            for j in (i + 1)..k {
                let share = (i + 1) % k == j || (j + 1) % k == i;
                if share {
                    continue;
                }
                let meet = segments_meet(pts[i], pts[(i + 1) % k], pts[j], pts[(j + 1) % k]);
                if meet == SegmentMeet::Improper {
                    violations.push(Violation::TerminalOrder(
                        "terminal polygon is self-intersecting".into(),
                    ));
                    return;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Cycle,
    /// Edge indices whose segments meet outside common endpoints.
    EdgeCrossing(usize, usize),
    /// Vertex lying in the interior of an edge.
    VertexOnEdge(VertexId, usize),
    TerminalOrder(String),
    /// Edge not on any source-to-sink directed path.
    RedundantEdge(usize),
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Nonnegative vertex weights, aligned with the vertex list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weighting {
    values: Vec<Rational>,
}

impl Weighting {
    pub fn new(net: &PlanarNetwork, values: Vec<Rational>) -> Result<Self> {
        if values.len() != net.vertex_count() {
            return Err(Error::InvalidNetwork(
                "weighting does not cover the vertex set".into(),
            ));
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::NegativeWeight(net.vertex(i).name.clone()));
            }
        }
        Ok(Weighting { values })
    }

    pub fn unit(net: &PlanarNetwork) -> Self {
        Weighting {
            values: vec![rat_one(); net.vertex_count()],
        }
    }

    pub fn get(&self, v: VertexId) -> &Rational {
        &self.values[v]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

// ---------------------------------------------------------------------------
// JSON wire format.
// Rationals are serialized as "p/q" or plain integer strings.

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: String,
    x: String,
    y: String,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    tail: String,
    head: String,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
    sources: Vec<String>,
    sinks: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    weights: BTreeMap<String, String>,
}

/// Serializes a network (and optional weighting) to the JSON wire format.
pub fn network_to_json(net: &PlanarNetwork, weights: Option<&Weighting>) -> serde_json::Value {
    let doc = NetworkJson {
        vertices: net
            .vertices
            .iter()
            .map(|v| VertexJson {
                id: v.name.clone(),
                x: format_rational(&v.pos.x),
                y: format_rational(&v.pos.y),
            })
            .collect(),
        edges: net
            .edges
            .iter()
            .map(|&(t, h)| EdgeJson {
                tail: net.vertices[t].name.clone(),
                head: net.vertices[h].name.clone(),
            })
            .collect(),
        sources: net.sources.iter().map(|&s| net.vertices[s].name.clone()).collect(),
        sinks: net.sinks.iter().map(|&t| net.vertices[t].name.clone()).collect(),
        weights: match weights {
            Some(w) => net
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| (v.name.clone(), format_rational(w.get(i))))
                .collect(),
            None => BTreeMap::new(),
        },
    };
    serde_json::to_value(doc).expect("network serialization cannot fail")
}

/// Parses the JSON wire format back into a network and optional weighting.
pub fn network_from_json(value: &serde_json::Value) -> Result<(PlanarNetwork, Option<Weighting>)> {
    let doc: NetworkJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut vertices = Vec::with_capacity(doc.vertices.len());
    for (i, v) in doc.vertices.iter().enumerate() {
        if index.insert(v.id.clone(), i).is_some() {
            return Err(Error::Parse(format!("duplicate vertex id {:?}", v.id)));
        }
        vertices.push(Vertex {
            name: v.id.clone(),
            pos: Point::new(parse_rational(&v.x)?, parse_rational(&v.y)?),
        });
    }
    let lookup = |name: &str| -> Result<usize> {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown vertex id {name:?}")))
    };
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        edges.push((lookup(&e.tail)?, lookup(&e.head)?));
    }
    let sources = doc.sources.iter().map(|s| lookup(s)).collect::<Result<Vec<_>>>()?;
    let sinks = doc.sinks.iter().map(|s| lookup(s)).collect::<Result<Vec<_>>>()?;
    let net = PlanarNetwork::new(vertices, edges, sources, sinks)?;
    let weighting = if doc.weights.is_empty() {
        None
    } else {
        let mut values = vec![rat_one(); net.vertex_count()];
        for (name, val) in &doc.weights {
            values[lookup(name)?] = parse_rational(val)?;
        }
        Some(Weighting::new(&net, values)?)
    };
    Ok((net, weighting))
}

/// Convenience constructor used throughout the tests and generators.
pub fn build_network(
    verts: &[(&str, i64, i64)],
    edges: &[(&str, &str)],
    sources: &[&str],
    sinks: &[&str],
) -> PlanarNetwork {
    use crate::rational::rat;
    let vertices: Vec<Vertex> = verts
        .iter()
        .map(|&(name, x, y)| Vertex {
            name: name.to_string(),
            pos: Point::new(rat(x), rat(y)),
        })
        .collect();
    let index = |name: &str| {
        vertices
            .iter()
            .position(|v| v.name == name)
            .unwrap_or_else(|| panic!("unknown vertex {name}"))
    };
    let edges: Vec<(usize, usize)> = edges.iter().map(|&(t, h)| (index(t), index(h))).collect();
    let sources: Vec<usize> = sources.iter().map(|s| index(s)).collect();
    let sinks: Vec<usize> = sinks.iter().map(|s| index(s)).collect();
    PlanarNetwork::new(vertices, edges, sources, sinks).expect("inline network is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_network_is_valid() {
        let net = build_network(
            &[("s1", 0, 0), ("t1", 0, 2)],
            &[("s1", "t1")],
            &["s1"],
            &["t1"],
        );
        assert!(net.validate().is_valid());
    }

    #[test]
    fn crossing_edges_reported() {
        // Terminals in the required cyclic order but the two straight edges
        // s1->t2 and s2->t1 must cross.
        let net = build_network(
            &[("s1", 1, 0), ("s2", 2, 0), ("t1", 1, 2), ("t2", 2, 2)],
            &[("s1", "t2"), ("s2", "t1")],
            &["s1", "s2"],
            &["t1", "t2"],
        );
        let report = net.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EdgeCrossing(_, _))));
    }

    #[test]
    fn redundant_edge_reported() {
        let net = build_network(
            &[("s1", 0, 0), ("t1", 0, 2), ("a", 3, 1), ("b", 4, 1)],
            &[("s1", "t1"), ("a", "b")],
            &["s1"],
            &["t1"],
        );
        let report = net.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::RedundantEdge(1))));
    }

    #[test]
    fn cycle_reported() {
        let net = build_network(
            &[("s1", 0, 0), ("t1", 0, 3), ("a", 1, 1), ("b", 1, 2)],
            &[("s1", "a"), ("a", "b"), ("b", "a"), ("b", "t1")],
            &["s1"],
            &["t1"],
        );
        assert!(net.validate().violations.contains(&Violation::Cycle));
    }

    #[test]
    fn terminal_order_enforced() {
        // Sinks swapped: the boundary polygon turns the wrong way.
        let net = build_network(
            &[("s1", 1, 0), ("s2", 2, 0), ("t1", 2, 2), ("t2", 1, 2)],
            &[("s1", "t2"), ("s2", "t1")],
            &["s1", "s2"],
            &["t1", "t2"],
        );
        let report = net.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::TerminalOrder(_))));
    }

    #[test]
    fn json_round_trip() {
        let net = build_network(
            &[("s1", 1, 0), ("s2", 2, 0), ("m", 1, 1), ("t1", 1, 2), ("t2", 2, 2)],
            &[("s1", "m"), ("s2", "m"), ("m", "t1"), ("m", "t2")],
            &["s1", "s2"],
            &["t1", "t2"],
        );
        let w = Weighting::unit(&net);
        let json = network_to_json(&net, Some(&w));
        let (back, back_w) = network_from_json(&json).unwrap();
        assert_eq!(back.vertex_count(), net.vertex_count());
        assert_eq!(back.edges(), net.edges());
        assert_eq!(back_w.unwrap(), w);
    }
}
