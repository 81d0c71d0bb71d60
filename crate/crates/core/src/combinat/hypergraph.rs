use serde::{Deserialize, Serialize};

use super::graph::{bits, variable_names, Graph};
use crate::error::{Error, Result};
use crate::ideal::{Monomial, MonomialIdeal, TotalOrder};

/// A Sperner hypergraph: no edge contains another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    labels: Vec<String>,
    edges: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    vertices: Vec<String>,
    edges: Vec<Vec<String>>,
}

impl Hypergraph {
    /// Edges are vertex bit masks over `labels`.
    pub fn new(labels: Vec<String>, edges: Vec<u64>) -> Result<Self> {
        if labels.len() > 64 {
            return Err(Error::InvalidGraph("more than 64 vertices".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{l}`")));
            }
        }
        let full = if labels.len() == 64 {
            u64::MAX
        } else {
            (1u64 << labels.len()) - 1
        };
        for (i, &e) in edges.iter().enumerate() {
            if e == 0 || e & !full != 0 {
                return Err(Error::InvalidGraph(format!("edge {i} is empty or out of range")));
            }
            for (j, &f) in edges.iter().enumerate() {
                if i != j && e & f == e {
                    return Err(Error::NotSperner(format!("edge {i} is contained in edge {j}")));
                }
            }
        }
        Ok(Hypergraph { labels, edges })
    }

    pub fn from_named_edges(labels: &[&str], edges: &[&[&str]]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let masks = edges
            .iter()
            .map(|e| {
                e.iter().try_fold(0u64, |acc, v| {
                    let i = labels
                        .iter()
                        .position(|l| l == v)
                        .ok_or_else(|| Error::InvalidGraph(format!("unknown vertex `{v}`")))?;
                    Ok(acc | 1 << i)
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        Hypergraph::new(labels, masks)
    }

    /// The 2-uniform hypergraph of a graph.
    pub fn from_graph(g: &Graph) -> Self {
        let edges = g.edges().into_iter().map(|(u, v)| 1 << u | 1 << v).collect();
        Hypergraph {
            labels: g.labels().to_vec(),
            edges,
        }
    }

    /// `{"vertices": [...], "edges": [[...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: HypergraphJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let labels: Vec<&str> = raw.vertices.iter().map(String::as_str).collect();
        let edges: Vec<Vec<&str>> = raw
            .edges
            .iter()
            .map(|e| e.iter().map(String::as_str).collect())
            .collect();
        let edge_refs: Vec<&[&str]> = edges.iter().map(Vec::as_slice).collect();
        Hypergraph::from_named_edges(&labels, &edge_refs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(HypergraphJson {
            vertices: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|&e| bits(e).map(|v| self.labels[v].clone()).collect())
                .collect(),
        })
        .expect("hypergraph serializes")
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[u64] {
        &self.edges
    }

    /// One squarefree generator per edge, in edge order.
    pub fn hyperedge_ideal(&self) -> Result<MonomialIdeal> {
        let raw = self
            .edges
            .iter()
            .map(|&e| Monomial::from_support(self.n(), e))
            .collect();
        MonomialIdeal::normalize_mingens(raw, variable_names(&self.labels))
    }
}

/// A tree on the vertices of a hypergraph, optionally rooted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostTree {
    pub tree: Graph,
    pub root: Option<usize>,
}

impl HostTree {
    pub fn new(tree: Graph, root: Option<usize>) -> Result<Self> {
        if !tree.is_tree() {
            return Err(Error::NotATree);
        }
        if root.is_some_and(|r| r >= tree.n()) {
            return Err(Error::HostTree("root out of range".into()));
        }
        Ok(HostTree { tree, root })
    }

    pub fn depths(&self) -> Option<Vec<usize>> {
        self.root.map(|r| self.tree.depths(r))
    }
}

/// Maps each hypergraph vertex to the tree vertex with the same label.
fn vertex_map(h: &Hypergraph, t: &Graph) -> Result<Vec<usize>> {
    if h.n() != t.n() {
        return Err(Error::VertexMismatch);
    }
    h.labels()
        .iter()
        .map(|l| t.labels().iter().position(|m| m == l).ok_or(Error::VertexMismatch))
        .collect()
}

fn map_mask(mask: u64, map: &[usize]) -> u64 {
    bits(mask).fold(0, |acc, v| acc | 1 << map[v])
}

fn induces_connected(t: &Graph, mask: u64) -> bool {
    let start = mask & mask.wrapping_neg();
    let mut seen = start;
    let mut frontier = start;
    while frontier != 0 {
        let mut next = 0;
        for v in bits(frontier) {
            next |= t.neighbors(v);
        }
        frontier = next & mask & !seen;
        seen |= frontier;
    }
    seen == mask
}

/// Every hyperedge induces a connected subgraph of the tree.
pub fn verify_host(h: &Hypergraph, t: &Graph) -> Result<bool> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    let map = vertex_map(h, t)?;
    Ok(h.edges().iter().all(|&e| induces_connected(t, map_mask(e, &map))))
}

/// Every hyperedge has pairwise distinct depths from `root` (a vertex of `t`).
pub fn is_rooted_at(h: &Hypergraph, t: &Graph, root: usize) -> Result<bool> {
    if !verify_host(h, t)? {
        return Err(Error::HostTree("not a host tree of the hypergraph".into()));
    }
    Ok(rooted_unchecked(h, t, &vertex_map(h, t)?, root))
}

fn rooted_unchecked(h: &Hypergraph, t: &Graph, map: &[usize], root: usize) -> bool {
    let depth = t.depths(root);
    h.edges().iter().all(|&e| {
        let mut seen = 0u64;
        bits(map_mask(e, map)).all(|v| {
            let bit = 1u64 << depth[v];
            let fresh = seen & bit == 0;
            seen |= bit;
            fresh
        })
    })
}

/// Tree on `n` labelled vertices encoded by a Prüfer sequence.
fn tree_from_pruefer(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf remains");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Searches all labelled trees on the vertex set, and all roots, for a rooted host.
///
/// `max_trees` bounds the number of trees examined; exceeding it is an error.
pub fn find_rooted_host_tree(h: &Hypergraph, max_trees: Option<u64>) -> Result<Option<HostTree>> {
    let n = h.n();
    let host = |edges: &[(usize, usize)]| -> Result<Option<HostTree>> {
        let mut t = Graph::with_labels(h.labels().to_vec());
        for &(u, v) in edges {
            t.add_edge(u, v)?;
        }
        let identity: Vec<usize> = (0..n).collect();
        if !h.edges().iter().all(|&e| induces_connected(&t, e)) {
            return Ok(None);
        }
        Ok((0..n)
            .find(|&r| rooted_unchecked(h, &t, &identity, r))
            .map(|r| HostTree { tree: t, root: Some(r) }))
    };
    match n {
        0 => return Ok(None),
        1 => return host(&[]),
        2 => return host(&[(0, 1)]),
        _ => {}
    }
    let mut seq = vec![0usize; n - 2];
    let mut examined = 0u64;
    loop {
        if max_trees.is_some_and(|m| examined >= m) {
            return Err(Error::BudgetExceeded);
        }
        examined += 1;
        if let Some(found) = host(&tree_from_pruefer(&seq, n))? {
            return Ok(Some(found));
        }
        // odometer increment over [0, n)^(n-2)
        let mut k = 0;
        loop {
            if k == seq.len() {
                return Ok(None);
            }
            seq[k] += 1;
            if seq[k] < n {
                break;
            }
            seq[k] = 0;
            k += 1;
        }
    }
}

/// Orders generators by ascending minimum vertex rank (depth), then by the
/// sorted rank sequence, then by index. Requires a rooted host.
pub fn hypertree_order(h: &Hypergraph, host: &HostTree) -> Result<TotalOrder> {
    let root = host
        .root
        .ok_or_else(|| Error::HostTree("host tree has no root".into()))?;
    if !is_rooted_at(h, &host.tree, root)? {
        return Err(Error::HostTree("hypergraph is not rooted at this vertex".into()));
    }
    let map = vertex_map(h, &host.tree)?;
    let depth = host.tree.depths(root);
    let mut keyed = Vec::with_capacity(h.edges().len());
    for (i, &e) in h.edges().iter().enumerate() {
        let mut ranks: Vec<usize> = bits(map_mask(e, &map)).map(|v| depth[v]).collect();
        ranks.sort_unstable();
        if ranks.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::HostTree(format!("edge {i} does not have consecutive ranks")));
        }
        keyed.push((ranks, i));
    }
    keyed.sort();
    TotalOrder::new(keyed.into_iter().map(|(_, i)| i).collect())
}

/// Vertex sets of the directed paths on `t` vertices running away from `root`.
pub fn path_ideal(tree: &Graph, root: usize, t: usize) -> Result<Hypergraph> {
    if t < 2 {
        return Err(Error::PathLength(t));
    }
    if !tree.is_tree() {
        return Err(Error::NotATree);
    }
    let depth = tree.depths(root);
    let parent: Vec<Option<usize>> = (0..tree.n())
        .map(|v| bits(tree.neighbors(v)).find(|&w| depth[w] + 1 == depth[v]))
        .collect();
    let mut edges = Vec::new();
    for top in 0..tree.n() {
        // paths are listed by their vertex closest to the root
        let mut frontier = vec![(top, 1u64 << top, 1usize)];
        while let Some((v, mask, len)) = frontier.pop() {
            if len == t {
                edges.push(mask);
                continue;
            }
            let children: Vec<usize> = bits(tree.neighbors(v)).filter(|&w| parent[w] == Some(v)).collect();
            for &c in children.iter().rev() {
                frontier.push((c, mask | 1 << c, len + 1));
            }
        }
    }
    Hypergraph::new(tree.labels().to_vec(), edges)
}
