//! Graphs, hypergraphs, named families, and the order constructions for trees
//! and rooted hypertrees.

pub mod graph;
pub mod hypergraph;

pub use graph::{
    connected_graphs, named_graph, parse_edge_list, parse_graph6, parse_named_graph, rooted_tree_edge_order, to_graph6,
    trees, unicyclic_bf_predicate, unicyclic_graphs, unique_cycle, Graph,
};
pub use hypergraph::{
    find_rooted_host_tree, hypertree_order, is_rooted_at, path_ideal, verify_host, HostTree, Hypergraph,
};
