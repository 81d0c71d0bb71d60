use bmres::betti::{certify_minimal_gbm, is_minimal_against};
use bmres::bridge_friendly::BridgeFriendlySearch;
use bmres::combinat::{find_rooted_host_tree, hypertree_order, is_rooted_at, parse_edge_list, rooted_tree_edge_order};
use bmres::morse::DEFAULT_PATH_BUDGET;
use bmres::{
    betti_numbers, bm_matching, critical_cells, is_bridge_friendly, morse_differential, search_bridge_friendly,
    BridgeFriendlyOutcome, Error, Graph, HostTree, Hypergraph, Matching, MonomialIdeal, SearchConfig, TotalOrder,
    DEFAULT_ENUMERATION_CAP as CAP,
};
use serde_json::{json, Value};

use crate::input::Subject;
use crate::output::{Outcome, Status};

fn order_strings(ideal: &MonomialIdeal, order: &TotalOrder) -> Vec<String> {
    order.ranking().iter().map(|&g| ideal.format_generator(g)).collect()
}

fn matching_json(ideal: &MonomialIdeal, m: &Matching) -> Value {
    m.edges()
        .iter()
        .map(|e| json!({ "sigma": ideal.format_subset(e.sigma), "tau": ideal.format_subset(e.tau) }))
        .collect()
}

fn given_order(ideal: &MonomialIdeal, order: Option<&str>) -> bmres::Result<Option<TotalOrder>> {
    order.map(|text| ideal.parse_order(text)).transpose()
}

pub fn betti(subject: &Subject) -> bmres::Result<Outcome> {
    let ideal = subject.ideal()?;
    let table = betti_numbers(&ideal, CAP)?;
    Ok(Outcome::new(
        Status::Ok,
        json!({
            "generators": order_strings(&ideal, &TotalOrder::identity(ideal.ngens())),
            "betti": table.to_json(&ideal),
        }),
    ))
}

pub fn bm(subject: &Subject, order: Option<&str>, with_complex: bool) -> bmres::Result<Outcome> {
    let ideal = subject.ideal()?;
    let given = given_order(&ideal, order)?;
    let source = if given.is_some() {
        "given"
    } else {
        "input order (no --order given)"
    };
    let order = given.unwrap_or_else(|| TotalOrder::identity(ideal.ngens()));
    let matching = bm_matching(&ideal, &order, CAP)?;
    let counts = critical_cells(&ideal, &matching, CAP)?.counts();
    let betti = betti_numbers(&ideal, CAP)?;
    let report = is_minimal_against(&ideal, &matching, &betti, CAP)?;
    let surplus: Vec<Value> = report
        .surplus
        .iter()
        .map(|s| json!({ "multidegree": ideal.format_monomial(&s.multidegree), "critical": s.critical, "betti": s.betti }))
        .collect();
    let mut result = json!({
        "order": order_strings(&ideal, &order),
        "order_source": source,
        "matching": matching_json(&ideal, &matching),
        "critical_counts": counts,
        "betti_totals": betti.totals(),
        "minimal": report.minimal,
        "surplus": surplus,
    });
    if with_complex {
        let complex = morse_differential(&ideal, &matching, CAP, DEFAULT_PATH_BUDGET)?;
        result["complex"] = complex.to_json();
    }
    let status = if report.minimal { Status::Ok } else { Status::Negative };
    Ok(Outcome::new(status, result))
}

pub fn bridge_friendly(subject: &Subject, order: Option<&str>, config: &SearchConfig) -> bmres::Result<Outcome> {
    let ideal = subject.ideal()?;
    let given = given_order(&ideal, order)?;
    let (heuristics, symmetry) = match subject {
        Subject::Graph(g) => graph_search_hints(g, &ideal)?,
        _ => (Vec::new(), Vec::new()),
    };
    let search = search_bridge_friendly(&ideal, given.as_ref(), &heuristics, &symmetry, config, CAP)?;
    let BridgeFriendlySearch {
        outcome,
        order,
        counterexample,
        orders_tested,
    } = search;
    let status = match outcome {
        BridgeFriendlyOutcome::Found => Status::Ok,
        BridgeFriendlyOutcome::NotBridgeFriendly => Status::Negative,
        BridgeFriendlyOutcome::Unknown => Status::BudgetExhausted,
    };
    Ok(Outcome {
        status,
        result: json!({
            "outcome": outcome,
            "order": order.map(|o| order_strings(&ideal, &o)),
            "counterexample": counterexample.map(|s| ideal.format_subset(s)),
            "symmetries": symmetry.len(),
        }),
        orders_tested,
    })
}

/// Rooted-tree orders for trees, and graph automorphisms as variable symmetries.
fn graph_search_hints(g: &Graph, ideal: &MonomialIdeal) -> bmres::Result<(Vec<TotalOrder>, Vec<Vec<usize>>)> {
    let heuristics = if g.is_tree() {
        (0..g.n())
            .map(|r| rooted_tree_edge_order(g, r))
            .collect::<bmres::Result<_>>()?
    } else {
        Vec::new()
    };
    // isolated vertices carry no variable, so vertex maps are not variable maps
    let symmetry = if ideal.nvars() == g.n() {
        g.automorphisms()
    } else {
        Vec::new()
    };
    Ok((heuristics, symmetry))
}

pub fn certify_gbm(subject: &Subject, config: &SearchConfig) -> bmres::Result<Outcome> {
    let Subject::Graph(g) = subject else {
        return Err(Error::InvalidGraph("certify-gbm needs a graph input".into()));
    };
    let cert = certify_minimal_gbm(g, config, CAP)?;
    let status = if cert.result {
        Status::Ok
    } else {
        Status::BudgetExhausted
    };
    Ok(Outcome {
        status,
        orders_tested: cert.budget_spent,
        result: serde_json::to_value(&cert).expect("certificate serializes"),
    })
}

pub struct HostChoice<'a> {
    pub host_text: Option<&'a str>,
    pub root: Option<&'a str>,
    pub search: bool,
    pub max_trees: Option<u64>,
}

pub fn hypertree(subject: &Subject, choice: &HostChoice) -> bmres::Result<Outcome> {
    let h = match subject {
        Subject::Hypergraph(h) => h.clone(),
        Subject::Graph(g) => Hypergraph::from_graph(g),
        Subject::Ideal(_) => {
            return Err(Error::InvalidGraph(
                "hypertree needs a hypergraph or graph input".into(),
            ));
        }
    };
    let tree = match (choice.host_text, choice.search, subject) {
        (Some(text), _, _) => Some(parse_edge_list(text)?),
        (None, true, _) => None,
        (None, false, Subject::Graph(g)) if g.is_tree() => Some(g.clone()),
        _ => return Err(Error::HostTree("give --host, or --search-host".into())),
    };
    let host = match tree {
        Some(tree) => {
            let root = match choice.root {
                Some(label) => Some(
                    tree.labels()
                        .iter()
                        .position(|l| l == label)
                        .ok_or_else(|| Error::HostTree(format!("root `{label}` is not a host vertex")))?,
                ),
                None => {
                    let mut found = None;
                    for r in 0..tree.n() {
                        if is_rooted_at(&h, &tree, r)? {
                            found = Some(r);
                            break;
                        }
                    }
                    found
                }
            };
            match root {
                Some(r) => HostTree::new(tree, Some(r))?,
                None => {
                    return Ok(Outcome::new(
                        Status::Negative,
                        json!({ "rooted_host_tree": null, "message": "host tree is not rooted at any vertex" }),
                    ))
                }
            }
        }
        None => match find_rooted_host_tree(&h, choice.max_trees)? {
            Some(host) => host,
            None => {
                return Ok(Outcome::new(
                    Status::Negative,
                    json!({ "rooted_host_tree": null, "message": "no rooted host tree" }),
                ))
            }
        },
    };
    let root = host.root.expect("rooted host");
    if !is_rooted_at(&h, &host.tree, root)? {
        return Ok(Outcome::new(
            Status::Negative,
            json!({
                "rooted_host_tree": null,
                "message": format!("hypergraph is not rooted at `{}`", host.tree.labels()[root]),
            }),
        ));
    }
    let ideal = h.hyperedge_ideal()?;
    let order = hypertree_order(&h, &host)?;
    let bf = is_bridge_friendly(&ideal, &order, CAP)?;
    let matching = bm_matching(&ideal, &order, CAP)?;
    let betti = betti_numbers(&ideal, CAP)?;
    let minimal = is_minimal_against(&ideal, &matching, &betti, CAP)?.minimal;
    let labels = host.tree.labels();
    let host_edges: Vec<[&str; 2]> = host
        .tree
        .edges()
        .into_iter()
        .map(|(u, v)| [labels[u].as_str(), labels[v].as_str()])
        .collect();
    let status = if bf.bridge_friendly && minimal {
        Status::Ok
    } else {
        Status::Negative
    };
    Ok(Outcome::new(
        status,
        json!({
            "hypergraph": h.to_json(),
            "rooted_host_tree": { "edges": host_edges, "root": labels[root] },
            "order": order_strings(&ideal, &order),
            "bridge_friendly": bf.bridge_friendly,
            "counterexample": bf.counterexample.map(|s| ideal.format_subset(s)),
            "minimal": minimal,
            "betti_totals": betti.totals(),
        }),
    ))
}
