//! Systems of pairwise vertex-disjoint directed paths from selected sources
//! to selected sinks, and the functions they generate.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::network::{PlanarNetwork, VertexId, Weighting};
use crate::rational::{rat_one, Rational};

/// An (I|J)-flow: the i-th path runs from the i-th smallest selected source
/// to the i-th smallest selected sink.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flow {
    /// 1-based source indices, ascending.
    pub source_indices: Vec<usize>,
    /// 1-based sink indices, ascending.
    pub sink_indices: Vec<usize>,
    /// Vertex sequences, one per selected source.
    pub paths: Vec<Vec<VertexId>>,
}

impl Flow {
    /// Set of vertices occurring in the flow.
    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.paths.iter().flatten().copied().collect()
    }

    /// Set of edges occurring in the flow, as (tail, head) pairs.
    pub fn edge_set(&self) -> BTreeSet<(VertexId, VertexId)> {
        self.paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| (w[0], w[1])))
            .collect()
    }

    /// Product of vertex weights over the flow.
    pub fn weight(&self, w: &Weighting) -> Rational {
        let mut acc = rat_one();
        for &v in self.paths.iter().flatten() {
            acc *= w.get(v).clone();
        }
        acc
    }
}

fn check_selection(net: &PlanarNetwork, rows: &BTreeSet<usize>, cols: &BTreeSet<usize>) -> Result<()> {
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch {
            rows: rows.len(),
            cols: cols.len(),
        });
    }
    for &i in rows {
        if i == 0 || i > net.sources().len() {
            return Err(Error::Range {
                what: "sources",
                index: i,
                limit: net.sources().len(),
            });
        }
    }
    for &j in cols {
        if j == 0 || j > net.sinks().len() {
            return Err(Error::Range {
                what: "sinks",
                index: j,
                limit: net.sinks().len(),
            });
        }
    }
    Ok(())
}

/// Enumerates all (I|J)-flows, in lexicographic order of the concatenated
/// path vertex sequences. The empty selection yields exactly one empty flow.
pub fn enumerate_flows(
    net: &PlanarNetwork,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
) -> Result<Vec<Flow>> {
    let mut out = Vec::new();
    collect_flows(net, rows, cols, usize::MAX, &mut out)?;
    Ok(out)
}

/// Counts (I|J)-flows, giving up once `cap` is reached. Useful when only the
/// distinction 0 / 1 / "more than one" matters.
pub fn count_flows_capped(
    net: &PlanarNetwork,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
    cap: usize,
) -> Result<usize> {
    let mut out = Vec::new();
    collect_flows(net, rows, cols, cap, &mut out)?;
    Ok(out.len())
}

fn collect_flows(
    net: &PlanarNetwork,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
    cap: usize,
    out: &mut Vec<Flow>,
) -> Result<()> {
    check_selection(net, rows, cols)?;
    let srcs: Vec<VertexId> = rows.iter().map(|&i| net.source(i)).collect();
    let tgts: Vec<VertexId> = cols.iter().map(|&j| net.sink(j)).collect();
    let mut used = vec![false; net.vertex_count()];
    let mut paths: Vec<Vec<VertexId>> = Vec::with_capacity(srcs.len());
    extend_system(net, &srcs, &tgts, 0, &mut used, &mut paths, cap, out);
    // Tag endpoints onto every enumerated system.
    for f in out.iter_mut() {
        f.source_indices = rows.iter().copied().collect();
        f.sink_indices = cols.iter().copied().collect();
    }
    Ok(())
}

fn extend_system(
    net: &PlanarNetwork,
    srcs: &[VertexId],
    tgts: &[VertexId],
    k: usize,
    used: &mut Vec<bool>,
    paths: &mut Vec<Vec<VertexId>>,
    cap: usize,
    out: &mut Vec<Flow>,
) {
    if out.len() >= cap {
        return;
    }
    if k == srcs.len() {
        out.push(Flow {
            source_indices: Vec::new(),
            sink_indices: Vec::new(),
            paths: paths.clone(),
        });
        return;
    }
    let start = srcs[k];
    if used[start] {
        return;
    }
    let mut path = vec![start];
    used[start] = true;
    walk(net, tgts[k], &mut path, used, |used, path| {
        paths.push(path.to_vec());
        extend_system(net, srcs, tgts, k + 1, used, paths, cap, out);
        paths.pop();
    });
    used[start] = false;
}

/// Depth-first directed path extension toward `target`, visiting neighbors
/// in ascending vertex order; `found` fires for every simple path reaching
/// the target, with its vertices marked used.
fn walk<F>(net: &PlanarNetwork, target: VertexId, path: &mut Vec<VertexId>, used: &mut Vec<bool>, mut found: F)
where
    F: FnMut(&mut Vec<bool>, &[VertexId]),
{
    walk_inner(net, target, path, used, &mut found);
}

fn walk_inner<F>(
    net: &PlanarNetwork,
    target: VertexId,
    path: &mut Vec<VertexId>,
    used: &mut Vec<bool>,
    found: &mut F,
) where
    F: FnMut(&mut Vec<bool>, &[VertexId]),
{
    let here = *path.last().expect("path never empty");
    if here == target {
        found(used, path);
        return;
    }
    for &next in net.out_neighbors(here) {
        if used[next] {
            continue;
        }
        used[next] = true;
        path.push(next);
        walk_inner(net, target, path, used, found);
        path.pop();
        used[next] = false;
    }
}

/// The flow-generated function: sum over (I|J)-flows of the product of
/// vertex weights, zero when no flow exists.
pub fn fg_function(
    net: &PlanarNetwork,
    w: &Weighting,
    rows: &BTreeSet<usize>,
    cols: &BTreeSet<usize>,
) -> Result<Rational> {
    let flows = enumerate_flows(net, rows, cols)?;
    let mut acc = crate::rational::rat_zero();
    for f in &flows {
        acc += f.weight(w);
    }
    Ok(acc)
}

/// The matrix whose (i, j) entry is the generated function of ({i}|{j}).
/// With nonnegative weights every minor equals the corresponding generated
/// function value, so the result is totally nonnegative.
pub fn lindstrom_matrix(net: &PlanarNetwork, w: &Weighting) -> Result<Matrix> {
    let report = net.validate();
    if !report.is_valid() {
        return Err(Error::InvalidNetwork(format!(
            "{} violation(s), first: {:?}",
            report.violations.len(),
            report.violations[0]
        )));
    }
    let n = net.sources().len();
    let n_prime = net.sinks().len();
    let mut entries = Vec::with_capacity(n * n_prime);
    for i in 1..=n {
        for j in 1..=n_prime {
            let rows: BTreeSet<usize> = [i].into_iter().collect();
            let cols: BTreeSet<usize> = [j].into_iter().collect();
            entries.push(fg_function(net, w, &rows, &cols)?);
        }
    }
    Ok(Matrix::from_entries(n, n_prime, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_network;
    use crate::rational::rat;

    fn setd(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    /// s1 -> t1, s1 -> t2, s2 -> t2 as direct edges.
    fn three_edge_network() -> PlanarNetwork {
        build_network(
            &[("s1", 1, 0), ("s2", 2, 0), ("t1", 1, 4), ("t2", 2, 4)],
            &[("s1", "t1"), ("s1", "t2"), ("s2", "t2")],
            &["s1", "s2"],
            &["t1", "t2"],
        )
    }

    #[test]
    fn single_edge_single_flow() {
        let net = build_network(&[("s1", 0, 0), ("t1", 0, 2)], &[("s1", "t1")], &["s1"], &["t1"]);
        let flows = enumerate_flows(&net, &setd(&[1]), &setd(&[1])).unwrap();
        assert_eq!(flows.len(), 1);
        assert_eq!(flows[0].paths, vec![vec![0, 1]]);
    }

    #[test]
    fn disjointness_forces_unique_two_flow() {
        let net = three_edge_network();
        let flows = enumerate_flows(&net, &setd(&[1, 2]), &setd(&[1, 2])).unwrap();
        assert_eq!(flows.len(), 1);
    }

    #[test]
    fn empty_selection_has_one_empty_flow() {
        let net = three_edge_network();
        let flows = enumerate_flows(&net, &setd(&[]), &setd(&[])).unwrap();
        assert_eq!(flows.len(), 1);
        assert!(flows[0].paths.is_empty());
        let w = Weighting::unit(&net);
        assert_eq!(fg_function(&net, &w, &setd(&[]), &setd(&[])).unwrap(), rat(1));
    }

    #[test]
    fn size_mismatch_rejected() {
        let net = three_edge_network();
        assert!(matches!(
            enumerate_flows(&net, &setd(&[1]), &setd(&[])),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn fg_zero_without_connection() {
        let net = three_edge_network();
        let w = Weighting::unit(&net);
        assert_eq!(fg_function(&net, &w, &setd(&[2]), &setd(&[1])).unwrap(), rat(0));
    }

    #[test]
    fn fg_multiplies_vertex_weights() {
        let net = build_network(&[("s1", 0, 0), ("t1", 0, 2)], &[("s1", "t1")], &["s1"], &["t1"]);
        let w = Weighting::new(&net, vec![rat(3), rat(5)]).unwrap();
        let rows = setd(&[1]);
        let cols = setd(&[1]);
        assert_eq!(fg_function(&net, &w, &rows, &cols).unwrap(), rat(15));
    }

    #[test]
    fn lindstrom_matrix_of_three_edge_network() {
        let net = three_edge_network();
        let w = Weighting::unit(&net);
        let q = lindstrom_matrix(&net, &w).unwrap();
        assert_eq!(q.entry(1, 1), &rat(1));
        assert_eq!(q.entry(1, 2), &rat(1));
        assert_eq!(q.entry(2, 1), &rat(0));
        assert_eq!(q.entry(2, 2), &rat(1));
    }

    #[test]
    fn capped_count_stops_early() {
        let net = three_edge_network();
        assert_eq!(count_flows_capped(&net, &setd(&[1]), &setd(&[2]), 2).unwrap(), 1);
        assert_eq!(count_flows_capped(&net, &setd(&[1]), &setd(&[2]), 0).unwrap(), 0);
    }
}
