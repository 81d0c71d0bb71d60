//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! `cargo test -p bmres-core --test acceptance -- --extended` adds the
//! 5-sunlet exhaustive run.

use std::collections::BTreeMap;
use std::time::Instant;

use bmres::betti::{betti_numbers_koszul, betti_numbers_taylor, is_minimal_against};
use bmres::bridge_friendly::generator_permutation;
use bmres::classify::{
    generic_fiber_orders, is_cochordal, is_generic, linear_quotients_order, lq_fiber_orders, lq_structure,
};
use bmres::combinat::{
    connected_graphs, find_rooted_host_tree, hypertree_order, named_graph, path_ideal, trees, unicyclic_bf_predicate,
    unicyclic_graphs,
};
use bmres::matching::{compare_ml_sbridge, gbm_matching_in_fibers, BmEngine};
use bmres::morse::DEFAULT_PATH_BUDGET;
use bmres::search::{search_orders, Outcome};
use bmres::{
    betti_numbers, bm_matching, critical_cells, gbm_matching, is_bridge_friendly, is_minimal, lyubeznik_matching,
    morse_differential, search_bridge_friendly, validate_matching, verify_resolution, BettiTable,
    BridgeFriendlyOutcome, FiberedOrders, Graph, HostTree, Hypergraph, LcmGrading, LcmTable, Matching, MonomialIdeal,
    SearchConfig, Strategy, TotalOrder, DEFAULT_ENUMERATION_CAP,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: usize = DEFAULT_ENUMERATION_CAP;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(failures: &[String], summary: String) -> Verdict {
    if failures.is_empty() {
        Verdict {
            pass: true,
            detail: summary,
        }
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        Verdict {
            pass: false,
            detail: format!("{summary}; {} failure(s): {}", failures.len(), shown.join(" | ")),
        }
    }
}

fn random_ideal(rng: &mut ChaCha8Rng) -> MonomialIdeal {
    let nvars = rng.gen_range(1..=6);
    let ngens = rng.gen_range(1..=6);
    let mut gens = Vec::with_capacity(ngens);
    while gens.len() < ngens {
        let e: Vec<u16> = (0..nvars)
            .map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..=3) })
            .collect();
        if e.iter().any(|&x| x > 0) {
            gens.push(e);
        }
    }
    MonomialIdeal::from_exponents(gens).expect("nonzero exponent vectors")
}

fn random_order(n: usize, rng: &mut ChaCha8Rng) -> TotalOrder {
    let mut r: Vec<usize> = (0..n).collect();
    r.shuffle(rng);
    TotalOrder::new(r).unwrap()
}

fn graph_corpus(max_n: usize) -> Vec<Graph> {
    (2..=max_n).flat_map(connected_graphs).collect()
}

fn oracle_corpus() -> Vec<(String, MonomialIdeal)> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut out: Vec<(String, MonomialIdeal)> = (0..500)
        .map(|k| (format!("random#{k}"), random_ideal(&mut rng)))
        .collect();
    for g in graph_corpus(6) {
        out.push((to_graph6(&g), g.edge_ideal().unwrap()));
    }
    out
}

fn to_graph6(g: &Graph) -> String {
    bmres::combinat::to_graph6(g)
}

fn generator_automorphisms(g: &Graph, ideal: &MonomialIdeal) -> Vec<Vec<usize>> {
    g.automorphisms()
        .iter()
        .map(|p| generator_permutation(ideal, p).unwrap())
        .collect()
}

fn criterion_1(corpus: &[(String, MonomialIdeal)]) -> Verdict {
    let mut failures = Vec::new();
    let mut entries = 0;
    for (name, ideal) in corpus {
        let t = betti_numbers_taylor(ideal, CAP).unwrap();
        let k = betti_numbers_koszul(ideal, CAP).unwrap();
        entries += t.entries().count();
        if t != k {
            failures.push(format!("{name}: taylor {:?} vs koszul {:?}", t.totals(), k.totals()));
        }
    }
    verdict(
        &failures,
        format!("{} ideals, {entries} nonzero entries compared", corpus.len()),
    )
}

fn check_resolution(ideal: &MonomialIdeal, m: &Matching) -> Result<(), String> {
    let violations = validate_matching(ideal, &LcmGrading, m);
    if !violations.is_empty() {
        return Err(format!("{} violations, first {:?}", violations.len(), violations[0]));
    }
    let complex = morse_differential(ideal, m, CAP, DEFAULT_PATH_BUDGET).map_err(|e| e.to_string())?;
    if !verify_resolution(ideal, &complex) {
        return Err("resolution check failed".into());
    }
    Ok(())
}

fn criterion_2(corpus: &[(String, MonomialIdeal)]) -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (k, (name, ideal)) in corpus.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let n = ideal.ngens();
        let mut matchings: Vec<(String, bmres::Result<Matching>)> = (0..3)
            .map(|j| (format!("bm{j}"), bm_matching(ideal, &random_order(n, &mut rng), CAP)))
            .collect();
        let classes = ideal.lcm_lattice(CAP).unwrap();
        let fibered = FiberedOrders {
            orders: classes
                .into_iter()
                .map(|m| (m, random_order(n, &mut rng)))
                .collect::<BTreeMap<_, _>>(),
            default: TotalOrder::identity(n),
        };
        matchings.push((
            "lyubeznik".into(),
            lyubeznik_matching(ideal, &LcmGrading, &fibered, CAP),
        ));
        matchings.push(("gbm".into(), gbm_matching(ideal, &LcmGrading, &fibered, CAP)));
        for (kind, m) in matchings {
            checked += 1;
            let outcome = m.map_err(|e| e.to_string()).and_then(|m| check_resolution(ideal, &m));
            if let Err(e) = outcome {
                failures.push(format!("{name} {kind}: {e}"));
            }
        }
    }
    verdict(&failures, format!("{checked} matchings validated"))
}

/// Staged search for an order whose Barile-Macchia matching is minimal.
fn minimal_bm_order(g: &Graph) -> (Option<TotalOrder>, u64) {
    let ideal = g.edge_ideal().unwrap();
    let betti = betti_numbers(&ideal, CAP).unwrap();
    let table = LcmTable::build(&ideal, CAP).unwrap();
    let engine = BmEngine::new(&table);
    let targets: Vec<usize> = table.classes.iter().map(|m| betti.sum_at(m)).collect();
    let mut heuristics = Vec::new();
    if g.is_tree() {
        heuristics.push(bmres::combinat::rooted_tree_edge_order(g, 0).unwrap());
    }
    let group = generator_automorphisms(g, &ideal);
    let mut config = SearchConfig::new(Strategy::Exhaustive);
    config.random_orders = 16;
    let report = search_orders(ideal.ngens(), None, &heuristics, &group, &config, |o| {
        (0..targets.len()).all(|c| engine.fiber_critical_count(c, o) == targets[c])
    });
    match report.outcome {
        Outcome::Found(o) => (Some(o), report.orders_tested),
        _ => (None, report.orders_tested),
    }
}

fn criterion_3() -> Verdict {
    let graphs = graph_corpus(5);
    let mut failures = Vec::new();
    let mut tested = 0;
    for g in &graphs {
        let (order, spent) = minimal_bm_order(g);
        tested += spent;
        let ideal = g.edge_ideal().unwrap();
        match order {
            Some(o) => {
                let m = bm_matching(&ideal, &o, CAP).unwrap();
                if !is_minimal(&ideal, &m, CAP).unwrap().minimal {
                    failures.push(format!("{}: found order not minimal on recheck", to_graph6(g)));
                }
            }
            None => failures.push(format!("{}: no order", to_graph6(g))),
        }
    }
    verdict(&failures, format!("{} graphs, {tested} orders tested", graphs.len()))
}

fn not_bridge_friendly(g: &Graph, max_orders: u64) -> Result<u64, String> {
    let ideal = g.edge_ideal().unwrap();
    let config = SearchConfig::new(Strategy::Exhaustive);
    let r = search_bridge_friendly(&ideal, None, &[], &g.automorphisms(), &config, CAP).unwrap();
    if r.outcome != BridgeFriendlyOutcome::NotBridgeFriendly {
        return Err(format!("outcome {:?} after {} orders", r.outcome, r.orders_tested));
    }
    if r.orders_tested > max_orders {
        return Err(format!("{} orders exceeds {max_orders}", r.orders_tested));
    }
    Ok(r.orders_tested)
}

fn criterion_4(extended: bool) -> Verdict {
    let mut cases = vec![
        ("net", named_graph("net", None).unwrap(), 720),
        (
            "cyclohexane-123",
            named_graph("cyclohexane-123", None).unwrap(),
            362_880,
        ),
        (
            "cyclohexane-135",
            named_graph("cyclohexane-135", None).unwrap(),
            362_880,
        ),
    ];
    if extended {
        cases.push(("sunlet-5", named_graph("sunlet", Some(5)).unwrap(), 3_628_800));
    }
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (name, g, cap) in &cases {
        let start = Instant::now();
        match not_bridge_friendly(g, *cap) {
            Ok(n) => parts.push(format!("{name}: {n} orders in {:.1}s", start.elapsed().as_secs_f64())),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    if !extended {
        parts.push("sunlet-5 skipped (use --extended)".into());
    }
    verdict(&failures, parts.join(", "))
}

fn criterion_5() -> Verdict {
    let graphs = unicyclic_graphs(7);
    let mut failures = Vec::new();
    let mut positive = 0;
    for g in &graphs {
        let predicted = unicyclic_bf_predicate(g).unwrap();
        let ideal = g.edge_ideal().unwrap();
        let config = SearchConfig::new(Strategy::Exhaustive);
        let r = search_bridge_friendly(&ideal, None, &[], &g.automorphisms(), &config, CAP).unwrap();
        let found = match r.outcome {
            BridgeFriendlyOutcome::Found => true,
            BridgeFriendlyOutcome::NotBridgeFriendly => false,
            BridgeFriendlyOutcome::Unknown => {
                failures.push(format!("{}: search inconclusive", to_graph6(g)));
                continue;
            }
        };
        positive += usize::from(found);
        if found != predicted {
            failures.push(format!(
                "{} (cycle {:?}): predicate {predicted}, search {found}",
                to_graph6(g),
                bmres::combinat::unique_cycle(g).unwrap().len()
            ));
        }
    }
    verdict(
        &failures,
        format!("{} unicyclic graphs, {positive} bridge-friendly", graphs.len()),
    )
}

fn check_hypertree(h: &Hypergraph, host: &HostTree) -> Result<(), String> {
    let ideal = h.hyperedge_ideal().map_err(|e| e.to_string())?;
    let order = hypertree_order(h, host).map_err(|e| e.to_string())?;
    let report = is_bridge_friendly(&ideal, &order, CAP).map_err(|e| e.to_string())?;
    if !report.bridge_friendly {
        return Err(format!("not bridge-friendly at {:?}", report.counterexample));
    }
    let m = bm_matching(&ideal, &order, CAP).map_err(|e| e.to_string())?;
    if !is_minimal(&ideal, &m, CAP).map_err(|e| e.to_string())?.minimal {
        return Err("resolution not minimal".into());
    }
    Ok(())
}

fn criterion_6() -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 2..=7 {
        for t in trees(n) {
            for root in 0..n {
                let host = HostTree::new(t.clone(), Some(root)).unwrap();
                let mut cases = vec![("tree".to_string(), Hypergraph::from_graph(&t))];
                for len in [2, 3] {
                    let h = path_ideal(&t, root, len).unwrap();
                    if !h.edges().is_empty() {
                        cases.push((format!("paths{len}"), h));
                    }
                }
                for (kind, h) in cases {
                    checked += 1;
                    if let Err(e) = check_hypertree(&h, &host) {
                        failures.push(format!("{} root {root} {kind}: {e}", to_graph6(&t)));
                    }
                }
            }
        }
    }
    verdict(&failures, format!("{checked} rooted hypertrees"))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7_000_007);
    let mut failures = Vec::new();
    let mut accepted = 0;
    let mut drawn = 0;
    while accepted < 100 && drawn < 1_000_000 {
        drawn += 1;
        let ideal = random_ideal(&mut rng);
        if !is_generic(&ideal).generic {
            continue;
        }
        accepted += 1;
        let (grading, orders) = generic_fiber_orders(&ideal, CAP).unwrap();
        let check = || -> Result<(), String> {
            let m = gbm_matching(&ideal, &grading, &orders, CAP).map_err(|e| e.to_string())?;
            if !is_minimal(&ideal, &m, CAP).unwrap().minimal {
                return Err("gbm matching not minimal".into());
            }
            let mismatches = compare_ml_sbridge(&ideal, &grading, &orders, CAP).unwrap();
            if !mismatches.is_empty() {
                return Err(format!("{} m_L/sbridge mismatches", mismatches.len()));
            }
            Ok(())
        };
        if let Err(e) = check() {
            failures.push(format!(
                "{:?}: {e}",
                ideal
                    .generators()
                    .iter()
                    .map(|g| ideal.format_monomial(g))
                    .collect::<Vec<_>>()
            ));
        }
    }
    if accepted < 100 {
        failures.push(format!("only {accepted} generic ideals in {drawn} draws"));
    }
    verdict(&failures, format!("{accepted} generic ideals from {drawn} draws"))
}

fn criterion_8() -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    for g in graph_corpus(6).into_iter().filter(is_cochordal) {
        checked += 1;
        let ideal = g.edge_ideal().unwrap();
        let check = || -> Result<(), String> {
            let order = linear_quotients_order(&ideal, CAP)
                .map_err(|e| e.to_string())?
                .ok_or("no linear quotients order")?;
            let s = lq_structure(&ideal, &order, CAP).map_err(|e| e.to_string())?;
            let (grading, orders) = lq_fiber_orders(&s);
            let m = gbm_matching_in_fibers(&ideal, &grading, &orders, CAP).map_err(|e| e.to_string())?;
            let violations = validate_matching(&ideal, &grading, &m);
            if !violations.is_empty() {
                return Err(format!("invalid matching: {:?}", violations[0]));
            }
            let betti = betti_numbers(&ideal, CAP).unwrap();
            if !is_minimal_against(&ideal, &m, &betti, CAP).unwrap().minimal {
                return Err("gbm matching not minimal".into());
            }
            let mismatches = compare_ml_sbridge(&ideal, &grading, &orders, CAP).unwrap();
            if !mismatches.is_empty() {
                return Err(format!("{} m_L/sbridge mismatches", mismatches.len()));
            }
            Ok(())
        };
        if let Err(e) = check() {
            failures.push(format!("{}: {e}", to_graph6(&g)));
        }
    }
    verdict(&failures, format!("{checked} co-chordal graphs"))
}

fn criterion_9() -> Verdict {
    let mut failures = Vec::new();
    let six = Hypergraph::from_named_edges(
        &["a", "b", "b'", "c", "c'", "d", "d'"],
        &[
            &["a", "b", "b'"],
            &["a", "c", "c'"],
            &["a", "d", "d'"],
            &["a", "b", "c"],
            &["a", "c", "d"],
            &["a", "b", "d"],
        ],
    )
    .unwrap();
    match find_rooted_host_tree(&six, None) {
        Ok(None) => {}
        other => failures.push(format!("six-edge example: expected no rooted host, got {other:?}")),
    }
    let small = Hypergraph::from_named_edges(&["a", "b", "c", "d"], &[&["a", "b", "c"], &["b", "c", "d"]]).unwrap();
    match find_rooted_host_tree(&small, None) {
        Ok(Some(host)) => {
            let root = host.root.unwrap();
            if !bmres::combinat::is_rooted_at(&small, &host.tree, root).unwrap() {
                failures.push("witness for {abc, bcd} does not check out".into());
            }
        }
        other => failures.push(format!("{{abc, bcd}}: expected a witness, got {other:?}")),
    }
    verdict(
        &failures,
        "six-edge example has no rooted host; {abc, bcd} has one".into(),
    )
}

/// Critical counts of the Barile-Macchia matching, padded to `len`.
fn bm_counts(ideal: &MonomialIdeal, order: &TotalOrder, len: usize) -> Vec<usize> {
    let m = bm_matching(ideal, order, CAP).unwrap();
    let mut c = critical_cells(ideal, &m, CAP).unwrap().counts();
    c.resize(len.max(c.len()), 0);
    c
}

fn padded_totals(b: &BettiTable, len: usize) -> Vec<usize> {
    let mut t = b.totals();
    t.resize(len.max(t.len()), 0);
    t
}

fn criterion_10() -> Verdict {
    let mut failures = Vec::new();

    let c3 = named_graph("cycle", Some(3)).unwrap().edge_ideal().unwrap();
    let c3_counts = bm_counts(&c3, &TotalOrder::identity(3), 4);
    let c3_betti = betti_numbers(&c3, CAP).unwrap();
    if c3_counts != padded_totals(&c3_betti, 4) || c3_counts != [1, 3, 2, 0] {
        failures.push(format!("C3 counts {c3_counts:?}, betti {:?}", c3_betti.totals()));
    }

    let p4 = named_graph("path", Some(4)).unwrap().edge_ideal().unwrap();
    let p4_counts = bm_counts(&p4, &TotalOrder::identity(3), 4);
    let p4_betti = betti_numbers(&p4, CAP).unwrap();
    if p4_counts != padded_totals(&p4_betti, 4) || p4_counts != [1, 3, 2, 0] {
        failures.push(format!("P4 counts {p4_counts:?}, betti {:?}", p4_betti.totals()));
    }
    let abcd = p4.lcm_of(p4.full_set());
    if p4_betti.get(2, &abcd) != 0 {
        failures.push(format!("P4 beta_2 at abcd is {}", p4_betti.get(2, &abcd)));
    }

    let xy = MonomialIdeal::parse("x\ny").unwrap();
    let m = bm_matching(&xy, &TotalOrder::identity(2), CAP).unwrap();
    let complex = morse_differential(&xy, &m, CAP, DEFAULT_PATH_BUDGET).unwrap();
    let shape: Vec<usize> = complex.cells.iter().map(Vec::len).collect();
    let xy_betti = betti_numbers(&xy, CAP).unwrap();
    let all_ones = (0..2).all(|j| complex.entry(2, j, 0)) && (0..2).all(|j| complex.entry(1, 0, j));
    if shape != xy_betti.totals() || shape != [1, 2, 1] || !all_ones || !verify_resolution(&xy, &complex) {
        failures.push(format!("(x, y) complex shape {shape:?}, koszul entries {all_ones}"));
    }
    verdict(&failures, "C3, P4 and (x, y) micro-examples".into())
}

type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let extended = args.iter().any(|a| a == "--extended");
    // libtest-style listing: report no tests so `cargo test -- --list` stays quiet
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let corpus = oracle_corpus();
    let criteria: Vec<(&str, Check<'_>)> = vec![
        ("oracle self-consistency", Box::new(|| criterion_1(&corpus))),
        ("resolution validity", Box::new(|| criterion_2(&corpus))),
        ("minimal orders on small graphs", Box::new(criterion_3)),
        ("named graphs not bridge-friendly", Box::new(|| criterion_4(extended))),
        ("unicyclic predicate vs search", Box::new(criterion_5)),
        ("rooted hypertree orders", Box::new(criterion_6)),
        ("generic ideals", Box::new(criterion_7)),
        ("co-chordal linear quotients", Box::new(criterion_8)),
        ("rooted host trees", Box::new(criterion_9)),
        ("micro-examples", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        failed += usize::from(!v.pass);
        println!(
            "criterion {:>2} {} {name}: {} [{:.1}s]",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
