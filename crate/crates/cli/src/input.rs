use std::path::Path;

use bmres::combinat::{parse_edge_list, parse_graph6, parse_named_graph};
use bmres::{Graph, Hypergraph, MonomialIdeal};
use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    /// Guess from the file extension and contents.
    Auto,
    /// One monomial per line, `x^2*y`.
    Ideal,
    /// One `u v` edge per line.
    Edges,
    /// One graph6 string per line; every line is a separate item.
    Graph6,
}

pub enum Subject {
    Ideal(MonomialIdeal),
    Graph(Graph),
    Hypergraph(Hypergraph),
}

impl Subject {
    pub fn ideal(&self) -> bmres::Result<MonomialIdeal> {
        match self {
            Subject::Ideal(i) => Ok(i.clone()),
            Subject::Graph(g) => g.edge_ideal(),
            Subject::Hypergraph(h) => h.hyperedge_ideal(),
        }
    }
}

/// One unit of work: the exact text it came from and the parsed value.
pub struct Item {
    pub name: String,
    pub text: String,
    pub subject: bmres::Result<Subject>,
}

/// Reads the items of an input file, or a single named graph.
pub fn load(path: Option<&Path>, named: Option<&str>, kind: InputKind) -> Result<Vec<Item>, String> {
    if let Some(spec) = named {
        return Ok(vec![Item {
            name: spec.to_string(),
            text: spec.to_string(),
            subject: parse_named_graph(spec).map(Subject::Graph),
        }]);
    }
    let path = path.ok_or("no input: give a file or --named")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let name = path.display().to_string();
    let kind = match kind {
        InputKind::Auto => sniff(path, &text),
        k => k,
    };
    Ok(match kind {
        InputKind::Graph6 => text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|line| Item {
                name: line.to_string(),
                text: line.to_string(),
                subject: parse_graph6(line).map(Subject::Graph),
            })
            .collect(),
        InputKind::Edges => vec![Item {
            name,
            subject: parse_edge_list(&text).map(Subject::Graph),
            text,
        }],
        InputKind::Ideal | InputKind::Auto => vec![Item {
            name,
            subject: MonomialIdeal::parse(&text).map(Subject::Ideal),
            text,
        }],
    })
}

fn sniff(path: &Path, text: &str) -> InputKind {
    match path.extension().and_then(|e| e.to_str()) {
        Some("g6" | "graph6") => return InputKind::Graph6,
        Some("edges") => return InputKind::Edges,
        _ => {}
    }
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    let edge_like = |l: &&str| l.split_whitespace().count() == 2 && !l.contains(['*', '^']);
    if !lines.is_empty() && lines.iter().all(edge_like) {
        InputKind::Edges
    } else {
        InputKind::Ideal
    }
}

/// A hypergraph from `{"vertices": [...], "edges": [[...]]}` or, for any
/// other content, the 2-uniform hypergraph of a graph input.
pub fn load_hypergraph(path: Option<&Path>, named: Option<&str>, kind: InputKind) -> Result<Item, String> {
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        if text.trim_start().starts_with('{') {
            return Ok(Item {
                name: path.display().to_string(),
                subject: Hypergraph::from_json(&text).map(Subject::Hypergraph),
                text,
            });
        }
    }
    let mut items = load(path, named, kind)?;
    if items.len() != 1 {
        return Err("hypertree takes a single input".into());
    }
    Ok(items.remove(0))
}
