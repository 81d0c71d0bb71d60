use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::ideal::{Monomial, MonomialIdeal, TotalOrder};

/// A simple undirected graph on at most 64 vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<u64>,
}

/// `a, b, c, …` up to 26 vertices, `x0, x1, …` beyond.
pub fn default_labels(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (0..n).map(|i| format!("x{i}")).collect()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph::with_labels(default_labels(n))
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        assert!(labels.len() <= 64, "at most 64 vertices");
        let n = labels.len();
        Graph {
            labels,
            adj: vec![0; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!("edge {u}-{v} out of range")));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
        }
        if self.has_edge(u, v) {
            return Err(Error::InvalidGraph(format!("repeated edge {u}-{v}")));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.n());
        self.labels = labels;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order. This is the
    /// generator order of [`Graph::edge_ideal`].
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|u| {
                ((u + 1)..self.n())
                    .filter(move |&v| self.has_edge(u, v))
                    .map(move |v| (u, v))
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == all
    }

    pub fn is_tree(&self) -> bool {
        self.n() >= 1 && self.edge_count() == self.n() - 1 && self.is_connected()
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::with_labels(self.labels.clone());
        for u in 0..self.n() {
            for v in (u + 1)..self.n() {
                if !self.has_edge(u, v) {
                    g.adj[u] |= 1 << v;
                    g.adj[v] |= 1 << u;
                }
            }
        }
        g
    }

    /// Distance from `root` to every vertex; `usize::MAX` when unreachable.
    pub fn depths(&self, root: usize) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.n()];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for w in bits(self.adj[v]) {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        depth
    }

    /// The squarefree quadratic ideal with one generator per edge, one variable per vertex.
    pub fn edge_ideal(&self) -> Result<MonomialIdeal> {
        let edges = self.edges();
        if edges.is_empty() {
            return Err(Error::EdgelessGraph);
        }
        let raw = edges
            .iter()
            .map(|&(u, v)| Monomial::from_support(self.n(), 1 << u | 1 << v))
            .collect();
        MonomialIdeal::normalize_mingens(raw, variable_names(&self.labels))
    }

    /// Graph relabelled so that vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::with_labels(default_labels(self.n()));
        for (u, v) in self.edges() {
            g.adj[perm[u]] |= 1 << perm[v];
            g.adj[perm[v]] |= 1 << perm[u];
        }
        g
    }

    /// All vertex permutations preserving adjacency, identity included.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut out = Vec::new();
        let mut image = vec![usize::MAX; n];
        let mut used = 0u64;
        self.extend_automorphism(0, &mut image, &mut used, &mut out);
        out
    }

    fn extend_automorphism(&self, v: usize, image: &mut Vec<usize>, used: &mut u64, out: &mut Vec<Vec<usize>>) {
        if v == self.n() {
            out.push(image.clone());
            return;
        }
        for w in 0..self.n() {
            if *used >> w & 1 == 1 || self.degree(w) != self.degree(v) {
                continue;
            }
            let consistent = (0..v).all(|u| self.has_edge(u, v) == self.has_edge(image[u], w));
            if consistent {
                image[v] = w;
                *used |= 1 << w;
                self.extend_automorphism(v + 1, image, used, out);
                *used &= !(1 << w);
            }
        }
        image[v] = usize::MAX;
    }

    /// Isomorphism invariant: the smallest upper-triangle bit code over all
    /// relabellings that list vertices by non-increasing degree.
    pub fn canonical_code(&self) -> (usize, u128) {
        let n = self.n();
        assert!(n <= 16, "canonical codes are defined for at most 16 vertices");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.degree(v)));
        let slot_degree: Vec<usize> = order.iter().map(|&v| self.degree(v)).collect();
        let mut best = u128::MAX;
        let mut inverse = vec![0usize; n];
        self.canonical_search(&slot_degree, 0, &mut inverse, &mut 0u64, &mut best);
        (n, best)
    }

    fn canonical_search(
        &self,
        slot_degree: &[usize],
        slot: usize,
        inverse: &mut Vec<usize>,
        placed: &mut u64,
        best: &mut u128,
    ) {
        let n = self.n();
        if slot == n {
            let mut code = 0u128;
            for j in 1..n {
                for i in 0..j {
                    code = code << 1 | u128::from(self.has_edge(inverse[i], inverse[j]));
                }
            }
            *best = (*best).min(code);
            return;
        }
        for v in 0..n {
            if *placed >> v & 1 == 0 && self.degree(v) == slot_degree[slot] {
                inverse[slot] = v;
                *placed |= 1 << v;
                self.canonical_search(slot_degree, slot + 1, inverse, placed, best);
                *placed &= !(1 << v);
            }
        }
    }
}

/// Variable names for vertex labels: labels that are valid identifiers are
/// kept, others get an `x` prefix.
pub fn variable_names(labels: &[String]) -> Vec<String> {
    labels
        .iter()
        .map(|l| {
            let mut chars = l.chars();
            let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
            if ok {
                l.clone()
            } else {
                format!("x{l}")
            }
        })
        .collect()
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            b
        })
    })
}

/// One of the named families: `cycle n`, `path n`, `complete n`, `sunlet n`,
/// `net`, `cyclohexane-123`, `cyclohexane-135`.
pub fn named_graph(name: &str, param: Option<usize>) -> Result<Graph> {
    let need = |what: &str| param.ok_or_else(|| Error::UnknownGraph(format!("{what} needs a size")));
    let cycle = |n: usize, extra: usize| -> Result<Graph> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let mut g = Graph::empty(n + extra);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n)?;
        }
        Ok(g)
    };
    let with_pendants = |n: usize, at: &[usize]| -> Result<Graph> {
        let mut g = cycle(n, at.len())?;
        for (k, &v) in at.iter().enumerate() {
            g.add_edge(v, n + k)?;
        }
        Ok(g)
    };
    match name {
        "cycle" => cycle(need("cycle")?, 0),
        "path" => {
            let n = need("path")?;
            let mut g = Graph::empty(n);
            for i in 1..n {
                g.add_edge(i - 1, i)?;
            }
            Ok(g)
        }
        "complete" => {
            let n = need("complete")?;
            let mut g = Graph::empty(n);
            for v in 0..n {
                for u in 0..v {
                    g.add_edge(u, v)?;
                }
            }
            Ok(g)
        }
        "sunlet" => {
            let n = need("sunlet")?;
            with_pendants(n, &(0..n).collect::<Vec<_>>())
        }
        "net" => with_pendants(3, &[0, 1, 2]),
        "cyclohexane-123" => with_pendants(6, &[0, 1, 2]),
        "cyclohexane-135" => with_pendants(6, &[0, 2, 4]),
        other => Err(Error::UnknownGraph(other.to_string())),
    }
}

/// Parses `"sunlet 5"`, `"cycle 4"`, `"net"` and similar.
pub fn parse_named_graph(spec: &str) -> Result<Graph> {
    let mut parts = spec.split_whitespace();
    let name = parts.next().ok_or_else(|| Error::UnknownGraph(spec.to_string()))?;
    let param = match parts.next() {
        Some(p) => Some(p.parse().map_err(|_| Error::UnknownGraph(spec.to_string()))?),
        None => None,
    };
    if parts.next().is_some() {
        return Err(Error::UnknownGraph(spec.to_string()));
    }
    named_graph(name, param)
}

/// Decodes one graph6 line (at most 62 vertices).
pub fn parse_graph6(text: &str) -> Result<Graph> {
    let bytes = text.trim().as_bytes();
    let (&head, body) = bytes
        .split_first()
        .ok_or_else(|| Error::Graph6("empty string".into()))?;
    if !(63..=126).contains(&head) {
        return Err(Error::Graph6(format!("invalid header byte {head}")));
    }
    if head == 126 {
        return Err(Error::Graph6("more than 62 vertices is not supported".into()));
    }
    let n = (head - 63) as usize;
    let nbits = n * n.saturating_sub(1) / 2;
    if body.len() != nbits.div_ceil(6) {
        return Err(Error::Graph6(format!(
            "expected {} data bytes for {n} vertices, found {}",
            nbits.div_ceil(6),
            body.len()
        )));
    }
    if let Some(b) = body.iter().find(|b| !(63..=126).contains(*b)) {
        return Err(Error::Graph6(format!("invalid data byte {b}")));
    }
    let bit = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    let mut g = Graph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                g.add_edge(i, j)?;
            }
            k += 1;
        }
    }
    if (k..body.len() * 6).any(bit) {
        return Err(Error::Graph6("nonzero padding bits".into()));
    }
    Ok(g)
}

pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    assert!(n <= 62, "graph6 short form holds at most 62 vertices");
    let mut bitvec = Vec::new();
    for j in 1..n {
        for i in 0..j {
            bitvec.push(g.has_edge(i, j));
        }
    }
    let mut out = String::new();
    out.push((63 + n as u8) as char);
    for chunk in bitvec.chunks(6) {
        let mut byte = 0u8;
        for (k, &b) in chunk.iter().enumerate() {
            byte |= u8::from(b) << (5 - k);
        }
        out.push((byte + 63) as char);
    }
    out
}

/// `u v` lines; labels are arbitrary tokens, numbered in order of first appearance.
/// A line with a single token declares an isolated vertex. `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let index = |t: &str, labels: &mut Vec<String>| match labels.iter().position(|l| l == t) {
        Some(i) => i,
        None => {
            labels.push(t.to_string());
            labels.len() - 1
        }
    };
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[..] {
            [a] => {
                index(a, &mut labels);
            }
            [a, b] => {
                let u = index(a, &mut labels);
                let v = index(b, &mut labels);
                edges.push((k + 1, u, v));
            }
            _ => {
                return Err(Error::Parse {
                    line: k + 1,
                    message: "expected `u v`".into(),
                })
            }
        }
    }
    if labels.len() > 64 {
        return Err(Error::InvalidGraph("more than 64 vertices".into()));
    }
    let mut g = Graph::with_labels(labels);
    for (line, u, v) in edges {
        g.add_edge(u, v).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
    }
    Ok(g)
}

fn dedupe(graphs: impl IntoIterator<Item = Graph>) -> Vec<Graph> {
    let mut seen = BTreeSet::new();
    graphs.into_iter().filter(|g| seen.insert(g.canonical_code())).collect()
}

/// Adds one new vertex adjacent to each nonempty subset of the old ones.
fn grow_by_vertex(graphs: &[Graph], only_leaves: bool) -> Vec<Graph> {
    let mut out = Vec::new();
    for g in graphs {
        let n = g.n();
        for mask in 1u64..1 << n {
            if only_leaves && mask.count_ones() != 1 {
                continue;
            }
            let mut h = Graph::empty(n + 1);
            for (u, v) in g.edges() {
                h.add_edge(u, v).expect("copied edge");
            }
            for u in bits(mask) {
                h.add_edge(u, n).expect("new edge");
            }
            out.push(h);
        }
    }
    dedupe(out)
}

/// Connected graphs on exactly `n` vertices, one per isomorphism class.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![Graph::empty(1)];
    for _ in 1..n {
        level = grow_by_vertex(&level, false);
    }
    level
}

/// Trees on exactly `n` vertices up to isomorphism.
pub fn trees(n: usize) -> Vec<Graph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![Graph::empty(1)];
    for _ in 1..n {
        level = grow_by_vertex(&level, true);
    }
    level
}

/// Connected unicyclic graphs with at most `max_edges` edges up to isomorphism.
pub fn unicyclic_graphs(max_edges: usize) -> Vec<Graph> {
    let mut all = Vec::new();
    let mut level: Vec<Graph> = Vec::new();
    for n in 3..=max_edges {
        let mut grown = grow_by_vertex(&level, true);
        grown.push(named_graph("cycle", Some(n)).expect("cycle"));
        level = dedupe(grown);
        all.extend(level.iter().cloned());
    }
    all
}

/// Vertices of the unique cycle of a connected unicyclic graph, in cyclic order.
pub fn unique_cycle(g: &Graph) -> Result<Vec<usize>> {
    if !g.is_connected() || g.edge_count() != g.n() {
        return Err(Error::NotUnicyclic);
    }
    let mut alive: u64 = if g.n() == 64 { u64::MAX } else { (1 << g.n()) - 1 };
    loop {
        let leaves: Vec<usize> = bits(alive)
            .filter(|&v| (g.neighbors(v) & alive).count_ones() <= 1)
            .collect();
        if leaves.is_empty() {
            break;
        }
        for v in leaves {
            alive &= !(1 << v);
        }
    }
    let start = alive.trailing_zeros() as usize;
    let mut cycle = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = bits(g.neighbors(cur) & alive)
            .find(|&w| w != prev)
            .expect("2-core vertices have two cycle neighbors");
        if next == start {
            break;
        }
        cycle.push(next);
        prev = cur;
        cur = next;
    }
    Ok(cycle)
}

/// True iff the cycle is `C₃` or `C₅` with a vertex of degree 2, or `C₆` with
/// two degree-2 vertices at cycle distance 3.
pub fn unicyclic_bf_predicate(g: &Graph) -> Result<bool> {
    let cycle = unique_cycle(g)?;
    let two = |v: usize| g.degree(v) == 2;
    Ok(match cycle.len() {
        3 | 5 => cycle.iter().any(|&v| two(v)),
        6 => (0..3).any(|i| two(cycle[i]) && two(cycle[i + 3])),
        _ => false,
    })
}

/// Level labels `(depth, index within depth)` of a rooted tree. Within a depth,
/// vertices are numbered by their parent's index, then by vertex number.
pub fn tree_levels(t: &Graph, root: usize) -> Result<Vec<(usize, usize)>> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    let depth = t.depths(root);
    let mut label = vec![(0usize, 0usize); t.n()];
    let mut level = vec![root];
    let mut d = 0;
    while !level.is_empty() {
        for (j, &v) in level.iter().enumerate() {
            label[v] = (d, j);
        }
        let mut next = Vec::new();
        for &v in &level {
            next.extend(bits(t.neighbors(v)).filter(|&w| depth[w] == d + 1));
        }
        level = next;
        d += 1;
    }
    Ok(label)
}

/// Orders the edges of a rooted tree by `(i, j, k)` for the edge
/// `x_{i,j} x_{i+1,k}`, smallest key first (largest in the order). The result
/// indexes the generators of `t.edge_ideal()`.
pub fn rooted_tree_edge_order(t: &Graph, root: usize) -> Result<TotalOrder> {
    let label = tree_levels(t, root)?;
    let mut keyed: Vec<((usize, usize, usize), usize)> = t
        .edges()
        .into_iter()
        .enumerate()
        .map(|(e, (u, v))| {
            let (p, c) = if label[u].0 < label[v].0 { (u, v) } else { (v, u) };
            ((label[p].0, label[p].1, label[c].1), e)
        })
        .collect();
    keyed.sort();
    TotalOrder::new(keyed.into_iter().map(|(_, e)| e).collect())
}
