//! The vertex-splitting transform: every vertex `v` becomes a split-edge
//! `v' -> v''`, original edges reroute from `u''` to `v'`, and fresh
//! boundary terminals attach outside the old ones. The result has the
//! degree laws the double-flow calculus rests on: one split-edge per
//! non-terminal vertex, and single-edge terminals.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::{PlanarNetwork, Vertex, VertexId, Weighting};
use crate::rational::{rat, rat_one, Rational};

#[derive(Debug, Clone)]
pub struct HatNetwork {
    net: PlanarNetwork,
    /// Edge index of the split-edge of each original vertex.
    split_edges: Vec<usize>,
    /// Original vertex behind each split-edge, aligned with `split_edges`.
    originals: usize,
}

impl HatNetwork {
    pub fn network(&self) -> &PlanarNetwork {
        &self.net
    }

    pub fn original_vertex_count(&self) -> usize {
        self.originals
    }

    /// Split-edge index for the k-th original vertex.
    pub fn split_edge(&self, orig: usize) -> usize {
        self.split_edges[orig]
    }

    pub fn split_edges(&self) -> &[usize] {
        &self.split_edges
    }

    /// Entry half of the k-th original vertex.
    pub fn vertex_in(&self, orig: usize) -> VertexId {
        2 * orig
    }

    /// Exit half of the k-th original vertex.
    pub fn vertex_out(&self, orig: usize) -> VertexId {
        2 * orig + 1
    }

    /// Checks the degree laws; errors signal a host that is not an actual
    /// vertex-splitting image.
    pub fn verify_structure(&self) -> Result<()> {
        let net = &self.net;
        let is_terminal = |v: VertexId| net.sources().contains(&v) || net.sinks().contains(&v);
        for &s in net.sources() {
            if net.out_neighbors(s).len() != 1 || !net.in_neighbors(s).is_empty() {
                return Err(Error::Structure(format!(
                    "source {:?} must have exactly one leaving and no entering edge",
                    net.vertex(s).name
                )));
            }
        }
        for &t in net.sinks() {
            if net.in_neighbors(t).len() != 1 || !net.out_neighbors(t).is_empty() {
                return Err(Error::Structure(format!(
                    "sink {:?} must have exactly one entering and no leaving edge",
                    net.vertex(t).name
                )));
            }
        }
        let mut incident = vec![0usize; net.vertex_count()];
        for &ei in &self.split_edges {
            let Some(&(u, v)) = net.edges().get(ei) else {
                return Err(Error::Structure("split-edge index out of range".into()));
            };
            if net.out_neighbors(u).len() != 1 {
                return Err(Error::Structure(format!(
                    "split-edge tail {:?} has extra leaving edges",
                    net.vertex(u).name
                )));
            }
            if net.in_neighbors(v).len() != 1 {
                return Err(Error::Structure(format!(
                    "split-edge head {:?} has extra entering edges",
                    net.vertex(v).name
                )));
            }
            incident[u] += 1;
            incident[v] += 1;
        }
        for v in 0..net.vertex_count() {
            if is_terminal(v) {
                continue;
            }
            if incident[v] != 1 {
                return Err(Error::Structure(format!(
                    "vertex {:?} is incident with {} split-edges",
                    net.vertex(v).name,
                    incident[v]
                )));
            }
        }
        Ok(())
    }

    /// Vertex weights on the transformed network that reproduce flow weights
    /// of the original: the entry half carries the original weight, all
    /// other new vertices carry 1.
    pub fn lift_weights(&self, w: &Weighting) -> Weighting {
        let mut values = vec![rat_one(); self.net.vertex_count()];
        for orig in 0..self.originals {
            values[self.vertex_in(orig)] = w.get(orig).clone();
        }
        Weighting::new(&self.net, values).expect("lifted weights stay nonnegative")
    }

    /// Wraps an existing network with explicit split-edge data, checking the
    /// degree laws.
    pub fn from_network(net: PlanarNetwork, split_edges: Vec<usize>) -> Result<Self> {
        let hat = HatNetwork {
            originals: split_edges.len(),
            net,
            split_edges,
        };
        hat.verify_structure()?;
        Ok(hat)
    }
}

/// Applies the vertex-splitting transform.
///
/// The placement is geometric best effort: each half-pair straddles the old
/// position along an outgoing direction, scaled well below the minimum
/// clearance of the drawing; new terminals are pushed radially outward from
/// the terminal centroid, which preserves their cyclic order. The degree
/// laws always hold; callers needing a certified plane drawing should run
/// the validator.
pub fn hat_transform(g: &PlanarNetwork) -> Result<HatNetwork> {
    let report = g.validate();
    if !report.is_valid() {
        return Err(Error::InvalidNetwork(format!(
            "{} violation(s), first: {:?}",
            report.violations.len(),
            report.violations[0]
        )));
    }
    let nv = g.vertex_count();
    let delta = placement_margin(g);

    let mut vertices: Vec<Vertex> = Vec::with_capacity(2 * nv + g.sources().len() + g.sinks().len());
    for v in 0..nv {
        let dir = offset_direction(g, v);
        let pos = &g.vertex(v).pos;
        let half = &delta / rat(2);
        vertices.push(Vertex {
            name: format!("{}'", g.vertex(v).name),
            pos: Point::new(&pos.x - &half * &dir.0, &pos.y - &half * &dir.1),
        });
        vertices.push(Vertex {
            name: format!("{}''", g.vertex(v).name),
            pos: Point::new(&pos.x + &half * &dir.0, &pos.y + &half * &dir.1),
        });
    }

    let centroid = terminal_centroid(g);
    let push_terminal = |v: VertexId, name: String, vertices: &mut Vec<Vertex>| -> VertexId {
        let p = &g.vertex(v).pos;
        let scale = rat_one() + delta.clone();
        let x = &centroid.x + &scale * (&p.x - &centroid.x);
        let y = &centroid.y + &scale * (&p.y - &centroid.y);
        vertices.push(Vertex { name, pos: Point::new(x, y) });
        vertices.len() - 1
    };

    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut split_edges = Vec::with_capacity(nv);
    for v in 0..nv {
        split_edges.push(edges.len());
        edges.push((2 * v, 2 * v + 1));
    }
    for &(u, v) in g.edges() {
        edges.push((2 * u + 1, 2 * v));
    }

    let mut sources = Vec::with_capacity(g.sources().len());
    for (i, &s) in g.sources().iter().enumerate() {
        let id = push_terminal(s, format!("^s{}", i + 1), &mut vertices);
        edges.push((id, 2 * s));
        sources.push(id);
    }
    let mut sinks = Vec::with_capacity(g.sinks().len());
    for (j, &t) in g.sinks().iter().enumerate() {
        let id = push_terminal(t, format!("^t{}", j + 1), &mut vertices);
        edges.push((2 * t + 1, id));
        sinks.push(id);
    }

    let net = PlanarNetwork::new(vertices, edges, sources, sinks)?;
    let hat = HatNetwork {
        net,
        split_edges,
        originals: nv,
    };
    hat.verify_structure()?;
    Ok(hat)
}

/// L1-normalized direction along which a vertex is split: the averaged
/// outgoing direction when present, otherwise the reversed incoming one,
/// otherwise horizontal.
fn offset_direction(g: &PlanarNetwork, v: VertexId) -> (Rational, Rational) {
    let pos = &g.vertex(v).pos;
    let mut dx = Rational::zero();
    let mut dy = Rational::zero();
    let mut accumulate = |target: &Point, sign: i64| {
        let ex = &target.x - &pos.x;
        let ey = &target.y - &pos.y;
        let norm = ex.abs() + ey.abs();
        if !norm.is_zero() {
            dx += rat(sign) * ex / norm.clone();
            dy += rat(sign) * ey / norm;
        }
    };
    if !g.out_neighbors(v).is_empty() {
        for &w in g.out_neighbors(v) {
            accumulate(&g.vertex(w).pos, 1);
        }
    } else {
        for &w in g.in_neighbors(v) {
            accumulate(&g.vertex(w).pos, -1);
        }
    }
    let norm = dx.abs() + dy.abs();
    if norm.is_zero() {
        (rat_one(), Rational::zero())
    } else {
        (dx / norm.clone(), dy / norm)
    }
}

fn terminal_centroid(g: &PlanarNetwork) -> Point {
    let mut x = Rational::zero();
    let mut y = Rational::zero();
    let mut count = 0i64;
    for &v in g.sources().iter().chain(g.sinks()) {
        x += g.vertex(v).pos.x.clone();
        y += g.vertex(v).pos.y.clone();
        count += 1;
    }
    Point::new(x / rat(count), y / rat(count))
}

/// A rational margin strictly below a quarter of the minimum clearance
/// (distance between distinct vertices or vertex-to-edge gaps), via
/// `g^2 / (4 (1 + g^2)) <= min(g, g^2) / 4`.
fn placement_margin(g: &PlanarNetwork) -> Rational {
    let mut min_sq: Option<Rational> = None;
    let mut consider = |d: Rational| {
        if d.is_zero() {
            return;
        }
        match &min_sq {
            Some(m) if *m <= d => {}
            _ => min_sq = Some(d),
        }
    };
    let nv = g.vertex_count();
    for a in 0..nv {
        for b in (a + 1)..nv {
            let pa = &g.vertex(a).pos;
            let pb = &g.vertex(b).pos;
            let dx = &pa.x - &pb.x;
            let dy = &pa.y - &pb.y;
            consider(&dx * &dx + &dy * &dy);
        }
    }
    let g_sq = min_sq.unwrap_or_else(rat_one);
    &g_sq / (rat(4) * (rat_one() + &g_sq))
}
