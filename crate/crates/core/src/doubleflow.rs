//! Double flows and their rearrangement. A double flow couples a flow for
//! `(X∪C | X'∪C')` with one for the complementary selection; the symmetric
//! difference of their edge sets splits into circuits and boundary-to-
//! boundary paths, the paths induce a feasible matching, and switching
//! along a sub-matching produces the double flow of the exchanged pair
//! with the same total edge multiset.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flow::{enumerate_flows, Flow};
use crate::hat::HatNetwork;
use crate::matching::{exchange, Couple, Matching};
use crate::model::{Context, Ground, ProperPair, Side};
use crate::network::VertexId;

type EdgeKey = (VertexId, VertexId);

#[derive(Debug, Clone)]
pub struct DoubleFlow {
    host: Arc<HatNetwork>,
    ctx: Context,
    pair: ProperPair,
    phi: Flow,
    phi_prime: Flow,
}

/// Endpoint pattern of a decomposition path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathClass {
    /// Joins a selected and an unselected free row.
    RowToRow,
    /// Joins a selected free row with a selected free column.
    WhiteCross,
    /// Joins an unselected free row with an unselected free column.
    BlackCross,
    /// Joins a selected and an unselected free column.
    ColToCol,
}

#[derive(Debug, Clone)]
pub struct DecompPath {
    pub edges: Vec<EdgeKey>,
    pub endpoints: Couple,
    pub class: PathClass,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub circuits: Vec<Vec<EdgeKey>>,
    pub paths: Vec<DecompPath>,
}

impl DoubleFlow {
    pub fn new(
        host: Arc<HatNetwork>,
        ctx: Context,
        pair: ProperPair,
        phi: Flow,
        phi_prime: Flow,
    ) -> Result<Self> {
        let expect = |flow: &Flow, rows: &BTreeSet<usize>, cols: &BTreeSet<usize>| -> Result<()> {
            let rows_v: Vec<usize> = rows.iter().copied().collect();
            let cols_v: Vec<usize> = cols.iter().copied().collect();
            if flow.source_indices != rows_v || flow.sink_indices != cols_v {
                return Err(Error::Structure(
                    "flow terminals do not match the proper pair".into(),
                ));
            }
            Ok(())
        };
        expect(&phi, &pair.minor_rows(&ctx), &pair.minor_cols(&ctx))?;
        expect(&phi_prime, &pair.co_minor_rows(&ctx), &pair.co_minor_cols(&ctx))?;
        Ok(DoubleFlow {
            host,
            ctx,
            pair,
            phi,
            phi_prime,
        })
    }

    pub fn host(&self) -> &Arc<HatNetwork> {
        &self.host
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn pair(&self) -> &ProperPair {
        &self.pair
    }

    pub fn phi(&self) -> &Flow {
        &self.phi
    }

    pub fn phi_prime(&self) -> &Flow {
        &self.phi_prime
    }

    /// Edges used by either flow, with multiplicity 2 on shared edges.
    pub fn edge_multiset(&self) -> BTreeMap<EdgeKey, u32> {
        let mut out: BTreeMap<EdgeKey, u32> = BTreeMap::new();
        for e in self.phi.edge_set() {
            *out.entry(e).or_insert(0) += 1;
        }
        for e in self.phi_prime.edge_set() {
            *out.entry(e).or_insert(0) += 1;
        }
        out
    }
}

/// All double flows of a proper pair on the given host.
pub fn double_flows(
    host: &Arc<HatNetwork>,
    ctx: &Context,
    pair: &ProperPair,
) -> Result<Vec<DoubleFlow>> {
    let phis = enumerate_flows(host.network(), &pair.minor_rows(ctx), &pair.minor_cols(ctx))?;
    let phi_primes = enumerate_flows(
        host.network(),
        &pair.co_minor_rows(ctx),
        &pair.co_minor_cols(ctx),
    )?;
    let mut out = Vec::with_capacity(phis.len() * phi_primes.len());
    for phi in &phis {
        for phi_prime in &phi_primes {
            out.push(DoubleFlow::new(
                host.clone(),
                ctx.clone(),
                pair.clone(),
                phi.clone(),
                phi_prime.clone(),
            )?);
        }
    }
    Ok(out)
}

/// Splits the symmetric difference of the two edge sets into vertex-disjoint
/// circuits and boundary-to-boundary simple paths. Paths are discovered from
/// the boundary terminals in circular order; circuits by sweeping what
/// remains in edge order.
pub fn decompose(df: &DoubleFlow) -> Result<Decomposition> {
    df.host.verify_structure()?;
    let net = df.host.network();

    let e_phi = df.phi.edge_set();
    let e_phi_prime = df.phi_prime.edge_set();
    let sym: BTreeSet<EdgeKey> = e_phi.symmetric_difference(&e_phi_prime).copied().collect();

    // Undirected incidence of the symmetric difference.
    let mut incident: BTreeMap<VertexId, Vec<EdgeKey>> = BTreeMap::new();
    for &e in &sym {
        incident.entry(e.0).or_default().push(e);
        incident.entry(e.1).or_default().push(e);
    }
    for (v, es) in &incident {
        if es.len() > 2 {
            return Err(Error::Structure(format!(
                "vertex {:?} has degree {} in the symmetric difference",
                net.vertex(*v).name,
                es.len()
            )));
        }
    }

    let terminal_ground = terminal_ground_map(&df.host);
    let mut visited: BTreeSet<EdgeKey> = BTreeSet::new();
    let mut paths = Vec::new();

    // Boundary terminals in the circular order of the free indices.
    let mut boundary: Vec<(Ground, VertexId)> = Vec::new();
    for &i in df.ctx.free_rows() {
        boundary.push((Ground::row(i), net.source(i)));
    }
    for &j in df.ctx.free_cols().iter().rev() {
        boundary.push((Ground::col(j), net.sink(j)));
    }

    for &(start_ground, start) in &boundary {
        let Some(es) = incident.get(&start) else { continue };
        debug_assert!(es.len() <= 1, "terminals have a single incident edge");
        let Some(&first) = es.first() else { continue };
        if visited.contains(&first) {
            continue;
        }
        let (edges, end) = walk_component(&incident, &mut visited, start, first);
        let end_ground = *terminal_ground.get(&end).ok_or_else(|| {
            Error::Structure(format!(
                "path endpoint {:?} is not a boundary terminal of a free index",
                net.vertex(end).name
            ))
        })?;
        let class = classify(&df.pair, start_ground, end_ground)?;
        paths.push(DecompPath {
            edges,
            endpoints: Couple::new(start_ground, end_ground),
            class,
        });
    }

    // Whatever is left closes into circuits.
    let mut circuits = Vec::new();
    for &e in &sym {
        if visited.contains(&e) {
            continue;
        }
        let (edges, end) = walk_component(&incident, &mut visited, e.0, e);
        if end != e.0 {
            return Err(Error::Structure(
                "leftover component is not closed".into(),
            ));
        }
        circuits.push(edges);
    }

    let m = df.ctx.free_rows().len();
    let m_prime = df.ctx.free_cols().len();
    if paths.len() != (m + m_prime) / 2 {
        return Err(Error::Structure(format!(
            "expected {} boundary paths, found {}",
            (m + m_prime) / 2,
            paths.len()
        )));
    }
    Ok(Decomposition { circuits, paths })
}

/// Walks an undirected degree-≤2 component starting at `at` through `first`,
/// marking edges visited; returns the traversed edges and the final vertex.
fn walk_component(
    incident: &BTreeMap<VertexId, Vec<EdgeKey>>,
    visited: &mut BTreeSet<EdgeKey>,
    at: VertexId,
    first: EdgeKey,
) -> (Vec<EdgeKey>, VertexId) {
    let mut edges = Vec::new();
    let mut here = at;
    let mut edge = first;
    loop {
        visited.insert(edge);
        edges.push(edge);
        here = if edge.0 == here { edge.1 } else { edge.0 };
        let next = incident
            .get(&here)
            .into_iter()
            .flatten()
            .find(|e| !visited.contains(*e));
        match next {
            Some(&e) => edge = e,
            None => return (edges, here),
        }
    }
}

fn terminal_ground_map(host: &Arc<HatNetwork>) -> BTreeMap<VertexId, Ground> {
    let net = host.network();
    let mut map = BTreeMap::new();
    for (i, &s) in net.sources().iter().enumerate() {
        map.insert(s, Ground::row(i + 1));
    }
    for (j, &t) in net.sinks().iter().enumerate() {
        map.insert(t, Ground::col(j + 1));
    }
    map
}

fn classify(pair: &ProperPair, a: Ground, b: Ground) -> Result<PathClass> {
    let class = match (a.side, b.side) {
        (Side::Row, Side::Row) => PathClass::RowToRow,
        (Side::Col, Side::Col) => PathClass::ColToCol,
        _ => {
            if pair.is_white(a) {
                PathClass::WhiteCross
            } else {
                PathClass::BlackCross
            }
        }
    };
    let consistent = match class {
        PathClass::RowToRow | PathClass::ColToCol => pair.is_white(a) != pair.is_white(b),
        PathClass::WhiteCross => pair.is_white(a) && pair.is_white(b),
        PathClass::BlackCross => !pair.is_white(a) && !pair.is_white(b),
    };
    if !consistent {
        return Err(Error::Structure(format!(
            "path endpoints {a} and {b} violate the color pattern"
        )));
    }
    Ok(class)
}

/// The perfect matching induced by the decomposition paths. Always feasible
/// for the double flow's pair.
pub fn matching_of(df: &DoubleFlow) -> Result<Matching> {
    let decomp = decompose(df)?;
    Ok(Matching::new(
        decomp.paths.iter().map(|p| p.endpoints).collect(),
    ))
}

/// Rearranges the double flow along the couples in `m0`: both edge sets take
/// the symmetric difference with the edges of the selected paths, producing
/// the unique double flow of the exchanged pair. Applying the same `m0`
/// twice returns the original.
pub fn switch(df: &DoubleFlow, m0: &[Couple]) -> Result<DoubleFlow> {
    let decomp = decompose(df)?;
    let matching = Matching::new(decomp.paths.iter().map(|p| p.endpoints).collect());
    for c in m0 {
        if !matching.contains(c) {
            return Err(Error::NotSubset {
                what: "M0 is not contained in the induced matching",
            });
        }
    }
    let mut switched: BTreeSet<EdgeKey> = BTreeSet::new();
    for p in &decomp.paths {
        if m0.contains(&p.endpoints) {
            switched.extend(p.edges.iter().copied());
        }
    }

    let new_pair = exchange(&df.ctx, &df.pair, &matching, m0)?;
    let psi_edges: BTreeSet<EdgeKey> = df
        .phi
        .edge_set()
        .symmetric_difference(&switched)
        .copied()
        .collect();
    let psi_prime_edges: BTreeSet<EdgeKey> = df
        .phi_prime
        .edge_set()
        .symmetric_difference(&switched)
        .copied()
        .collect();

    let psi = flow_from_edges(
        &df.host,
        &psi_edges,
        &new_pair.minor_rows(&df.ctx),
        &new_pair.minor_cols(&df.ctx),
    )?;
    let psi_prime = flow_from_edges(
        &df.host,
        &psi_prime_edges,
        &new_pair.co_minor_rows(&df.ctx),
        &new_pair.co_minor_cols(&df.ctx),
    )?;
    DoubleFlow::new(df.host.clone(), df.ctx.clone(), new_pair, psi, psi_prime)
}

/// Reassembles a flow from a bag of edges; every vertex must have in- and
/// out-degree at most one, and the maximal paths must run exactly from the
/// expected sources to the expected sinks.
fn flow_from_edges(
    host: &Arc<HatNetwork>,
    edges: &BTreeSet<EdgeKey>,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
) -> Result<Flow> {
    let net = host.network();
    let mut next: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut has_in: BTreeSet<VertexId> = BTreeSet::new();
    for &(u, v) in edges {
        if next.insert(u, v).is_some() {
            return Err(Error::Structure("switched edges branch at a vertex".into()));
        }
        if !has_in.insert(v) {
            return Err(Error::Structure("switched edges merge at a vertex".into()));
        }
    }
    let mut paths = Vec::new();
    for &i in rows {
        let start = net.source(i);
        if !next.contains_key(&start) {
            return Err(Error::Structure(format!(
                "no switched path leaves source {i}"
            )));
        }
        let mut path = vec![start];
        let mut here = start;
        while let Some(&to) = next.get(&here) {
            path.push(to);
            here = to;
        }
        paths.push(path);
    }
    let used: usize = paths.iter().map(|p| p.len() - 1).sum();
    if used != edges.len() {
        return Err(Error::Structure(
            "switched edges contain material off the source paths".into(),
        ));
    }
    let mut sink_hits: Vec<usize> = Vec::new();
    for p in &paths {
        let last = *p.last().expect("paths are nonempty");
        match net.sinks().iter().position(|&t| t == last) {
            Some(j) => sink_hits.push(j + 1),
            None => {
                return Err(Error::Structure(
                    "a switched path does not end at a sink".into(),
                ))
            }
        }
    }
    let mut sorted_hits = sink_hits.clone();
    sorted_hits.sort_unstable();
    let cols_v: Vec<usize> = cols.iter().copied().collect();
    if sorted_hits != cols_v || sink_hits != cols_v {
        return Err(Error::Structure(
            "switched paths pair sources and sinks out of order".into(),
        ));
    }
    Ok(Flow {
        source_indices: rows.iter().copied().collect(),
        sink_indices: cols_v,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hat::hat_transform;
    use crate::matching::is_feasible_for;
    use crate::model::Context;
    use crate::network::build_network;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    /// Three sources, two sinks, a shared middle corridor: X = ∅, X' = {1'},
    /// Y = {1,2,3}, Y' = {2'}.
    fn corridor() -> (Arc<HatNetwork>, Context) {
        let g = build_network(
            &[
                ("s1", 1, 0),
                ("s2", 2, 0),
                ("s3", 3, 0),
                ("c", 5, 2),
                ("d", 4, 4),
                ("t1", 2, 6),
                ("t2", 4, 6),
            ],
            &[
                ("s1", "t1"),
                ("s2", "c"),
                ("s3", "c"),
                ("c", "d"),
                ("d", "t1"),
                ("d", "t2"),
            ],
            &["s1", "s2", "s3"],
            &["t1", "t2"],
        );
        let hat = Arc::new(hat_transform(&g).unwrap());
        let ctx = Context::new(3, 2, set(&[]), set(&[1, 2, 3]), set(&[1]), set(&[2])).unwrap();
        (hat, ctx)
    }

    fn corridor_double_flow() -> (Arc<HatNetwork>, Context, DoubleFlow) {
        let (hat, ctx) = corridor();
        let pair = ProperPair::new(&ctx, set(&[1, 3]), set(&[2])).unwrap();
        let dfs = double_flows(&hat, &ctx, &pair).unwrap();
        assert_eq!(dfs.len(), 1);
        let df = dfs.into_iter().next().unwrap();
        (hat, ctx, df)
    }

    #[test]
    fn corridor_decomposition_has_expected_paths() {
        let (_, _, df) = corridor_double_flow();
        let d = decompose(&df).unwrap();
        assert_eq!(d.paths.len(), 2);
        let mut endpoint_sets: Vec<Couple> = d.paths.iter().map(|p| p.endpoints).collect();
        endpoint_sets.sort();
        assert_eq!(
            endpoint_sets,
            vec![
                Couple::new(Ground::row(1), Ground::col(2)),
                Couple::new(Ground::row(2), Ground::row(3)),
            ]
        );
        let classes: BTreeMap<Couple, PathClass> =
            d.paths.iter().map(|p| (p.endpoints, p.class)).collect();
        assert_eq!(
            classes[&Couple::new(Ground::row(2), Ground::row(3))],
            PathClass::RowToRow
        );
        assert_eq!(
            classes[&Couple::new(Ground::row(1), Ground::col(2))],
            PathClass::WhiteCross
        );
    }

    #[test]
    fn induced_matching_is_feasible() {
        let (_, ctx, df) = corridor_double_flow();
        let m = matching_of(&df).unwrap();
        assert!(is_feasible_for(&ctx, df.pair(), &m));
    }

    #[test]
    fn switch_moves_to_exchanged_pair_and_back() {
        let (_, _ctx, df) = corridor_double_flow();
        let m0 = [Couple::new(Ground::row(2), Ground::row(3))];
        let switched = switch(&df, &m0).unwrap();
        assert_eq!(switched.pair().white_rows(), &set(&[1, 2]));
        assert_eq!(switched.pair().white_cols(), &set(&[2]));
        // Total edge multiset is conserved.
        assert_eq!(df.edge_multiset(), switched.edge_multiset());
        // Matching is stable under switching.
        assert_eq!(matching_of(&df).unwrap(), matching_of(&switched).unwrap());
        // Involution.
        let back = switch(&switched, &m0).unwrap();
        assert_eq!(back.pair(), df.pair());
        assert_eq!(back.phi().edge_set(), df.phi().edge_set());
        assert_eq!(back.phi_prime().edge_set(), df.phi_prime().edge_set());
    }

    #[test]
    fn switch_with_empty_subset_is_identity() {
        let (_, _ctx, df) = corridor_double_flow();
        let same = switch(&df, &[]).unwrap();
        assert_eq!(same.pair(), df.pair());
        assert_eq!(same.phi().edge_set(), df.phi().edge_set());
    }

    #[test]
    fn switch_rejects_foreign_couples() {
        let (_, _ctx, df) = corridor_double_flow();
        let foreign = [Couple::new(Ground::row(1), Ground::row(2))];
        assert!(matches!(switch(&df, &foreign), Err(Error::NotSubset { .. })));
    }

    #[test]
    fn decompose_requires_hat_host() {
        // A raw network disguised as a hat image must be rejected.
        let g = build_network(
            &[("s1", 0, 0), ("a", 0, 2), ("t1", 0, 4)],
            &[("s1", "a"), ("a", "t1")],
            &["s1"],
            &["t1"],
        );
        assert!(HatNetwork::from_network(g, vec![]).is_err());
    }

    #[test]
    fn path_count_matches_half_of_free_indices() {
        let (hat, ctx) = corridor();
        for pair in ctx.proper_pairs() {
            for df in double_flows(&hat, &ctx, &pair).unwrap() {
                let d = decompose(&df).unwrap();
                assert_eq!(d.paths.len(), 2);
            }
        }
    }
}
