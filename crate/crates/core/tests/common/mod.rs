//! Random graphs and dependencies, plus oracles that do not reuse the library's reasoning code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use gonorm::gofd::VarSet;
use gonorm::graph::{labels, Edge, Node, Properties};
use gonorm::transform::TransformationKind;
use gonorm::{Direction, GoFd, Graph, GraphPattern, ObjectId, ObjectPattern, Value, Variable};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const NODE_KEYS: [&str; 3] = ["a1", "a2", "a3"];
pub const EDGE_KEYS: [&str; 3] = ["b1", "b2", "b3"];

pub fn load(text: &str) -> Graph {
    Graph::from_json_str(text).expect("fixture parses")
}

fn pick_keys(rng: &mut StdRng, pool: &[&str], min: usize, max: usize) -> Vec<String> {
    let n = rng.gen_range(min..=max.min(pool.len()));
    let mut keys: Vec<String> = pool.iter().map(|s| s.to_string()).collect();
    keys.shuffle(rng);
    keys.truncate(n);
    keys.sort();
    keys
}

fn prop_vars(var: &str, keys: &[String]) -> Vec<Variable> {
    keys.iter().map(|k| Variable::prop(var, k)).collect()
}

/// A strict dependency of the given kind together with a graph of at most
/// 50 nodes that satisfies it.
///
/// Graphs are schema-conformant: every node carries all node keys and every
/// edge carries all edge keys, and node and edge key names are disjoint.
pub struct Case {
    pub kind: TransformationKind,
    pub dep: GoFd,
    pub graph: Graph,
}

pub const STRICT_KINDS: [TransformationKind; 6] = [
    TransformationKind::WithinN,
    TransformationKind::WithinE,
    TransformationKind::BetweenNEp,
    TransformationKind::BetweenNpEp,
    TransformationKind::BetweenEpNp,
    TransformationKind::BetweenEpN,
];

pub fn strict_case(rng: &mut StdRng) -> Case {
    use TransformationKind::*;
    let kind = *STRICT_KINDS.choose(rng).expect("non-empty");
    let node_labels: Vec<&str> = if rng.gen_bool(0.5) { vec!["A"] } else { vec!["A", "B"] };
    let x = ObjectPattern::new("x", node_labels.clone(), NODE_KEYS);
    let y = ObjectPattern::new("y", ["E"], EDGE_KEYS);
    let direction = if rng.gen_bool(0.5) { Direction::Out } else { Direction::In };
    let node_edge = GraphPattern::node_edge(x.clone(), y.clone(), direction);
    let wide = rng.gen_bool(0.3);

    let (scope, lhs, rhs): (GraphPattern, Vec<Variable>, Vec<Variable>) = match kind {
        WithinN => {
            let xs = pick_keys(rng, &NODE_KEYS, 1, 2);
            let rest: Vec<&str> = NODE_KEYS.iter().copied().filter(|k| !xs.iter().any(|x| x == k)).collect();
            let a = pick_keys(rng, &rest, 1, 2);
            let q = if wide { node_edge.clone() } else { GraphPattern::node(x.clone()) };
            (q, prop_vars("x", &xs), prop_vars("x", &a))
        }
        WithinE => {
            let xs = pick_keys(rng, &EDGE_KEYS, 1, 2);
            let rest: Vec<&str> = EDGE_KEYS.iter().copied().filter(|k| !xs.iter().any(|x| x == k)).collect();
            let a = pick_keys(rng, &rest, 1, 2);
            let q = if wide { node_edge.clone() } else { GraphPattern::edge(y.clone()) };
            (q, prop_vars("y", &xs), prop_vars("y", &a))
        }
        BetweenNEp => (
            node_edge.clone(),
            vec![Variable::object("x")],
            prop_vars("y", &pick_keys(rng, &EDGE_KEYS, 1, 2)),
        ),
        BetweenNpEp => (
            node_edge.clone(),
            prop_vars("x", &pick_keys(rng, &NODE_KEYS, 1, 2)),
            prop_vars("y", &pick_keys(rng, &EDGE_KEYS, 1, 2)),
        ),
        BetweenEpNp => (
            node_edge.clone(),
            prop_vars("y", &pick_keys(rng, &EDGE_KEYS, 1, 2)),
            prop_vars("x", &pick_keys(rng, &NODE_KEYS, 1, 2)),
        ),
        BetweenEpN => (
            node_edge.clone(),
            prop_vars("y", &pick_keys(rng, &EDGE_KEYS, 1, 2)),
            vec![Variable::object("x")],
        ),
        NoRedundancy => unreachable!(),
    };
    let dep = GoFd::new(scope, lhs, rhs).expect("bound variables");
    let graph = satisfying_graph(rng, &dep, &node_labels, direction);
    Case { kind, dep, graph }
}

fn random_props(rng: &mut StdRng, keys: &[&str]) -> Properties {
    keys.iter().map(|k| (k.to_string(), Value::Int(rng.gen_range(0..3)))).collect()
}

/// Random graph, then rewritten so that `dep` holds.
fn satisfying_graph(rng: &mut StdRng, dep: &GoFd, node_labels: &[&str], direction: Direction) -> Graph {
    let n = rng.gen_range(3..=50);
    let mut nodes: Vec<(ObjectId, Node)> = (0..n)
        .map(|i| {
            let roll = rng.gen_range(0..10);
            let l = if roll < 7 {
                labels(node_labels.iter().copied())
            } else if roll < 8 {
                labels(["A"])
            } else {
                labels(["C"])
            };
            (
                ObjectId::new(format!("n{i}")),
                Node {
                    labels: l,
                    props: random_props(rng, &NODE_KEYS),
                },
            )
        })
        .collect();
    let m = rng.gen_range(0..=2 * n);
    let mut edges: Vec<(ObjectId, Edge)> = (0..m)
        .map(|i| {
            let l = if rng.gen_bool(0.8) { labels(["E"]) } else { labels(["F"]) };
            (
                ObjectId::new(format!("e{i}")),
                Edge {
                    src: nodes[rng.gen_range(0..n)].0.clone(),
                    tgt: nodes[rng.gen_range(0..n)].0.clone(),
                    labels: l,
                    props: random_props(rng, &EDGE_KEYS),
                },
            )
        })
        .collect();

    let keys = |side: &BTreeSet<Variable>| -> Vec<String> { side.iter().filter_map(|v| v.key.clone()).collect() };
    let (xk, ak) = (keys(dep.lhs()), keys(dep.rhs()));
    let fx = dep.lhs().iter().next().expect("non-empty").object.clone();
    let fa = dep.rhs().iter().next().expect("non-empty").object.clone();
    let mut table: HashMap<Vec<Value>, Vec<Value>> = HashMap::new();
    let mut lookup = |rng: &mut StdRng, x: Vec<Value>, len: usize| -> Vec<Value> {
        table
            .entry(x)
            .or_insert_with(|| (0..len).map(|_| Value::Int(rng.gen_range(0..3))).collect())
            .clone()
    };
    let index: BTreeMap<ObjectId, usize> = nodes.iter().enumerate().map(|(i, (id, _))| (id.clone(), i)).collect();
    let attached = |e: &Edge| -> usize {
        index[match direction {
            Direction::Out => &e.src,
            Direction::In => &e.tgt,
        }]
    };

    let node_side = |v: &str| dep.scope.node_part().is_some_and(|p| p.var == v);
    match (node_side(&fx), node_side(&fa), fx == fa) {
        (true, _, true) => {
            for (_, node) in &mut nodes {
                let xv: Vec<Value> = xk.iter().map(|k| node.props[k].clone()).collect();
                for (k, v) in ak.iter().zip(lookup(rng, xv, ak.len())) {
                    node.props.insert(k.clone(), v);
                }
            }
        }
        (false, _, true) => {
            for (_, edge) in &mut edges {
                let xv: Vec<Value> = xk.iter().map(|k| edge.props[k].clone()).collect();
                for (k, v) in ak.iter().zip(lookup(rng, xv, ak.len())) {
                    edge.props.insert(k.clone(), v);
                }
            }
        }
        (true, false, false) => {
            // Node side determines the edge properties.
            for (_, edge) in &mut edges {
                let i = attached(edge);
                let xv: Vec<Value> = if xk.is_empty() {
                    vec![Value::Int(i as i64)]
                } else {
                    xk.iter().map(|k| nodes[i].1.props[k].clone()).collect()
                };
                for (k, v) in ak.iter().zip(lookup(rng, xv, ak.len())) {
                    edge.props.insert(k.clone(), v);
                }
            }
        }
        (false, true, false) => {
            // Edge properties determine the node (or its properties): the
            // first left-hand key encodes a class of the attached node.
            let first = xk.first().expect("edge-side keys").clone();
            let class: Vec<i64> = (0..n).map(|i| if ak.is_empty() { i as i64 } else { rng.gen_range(0..3) }).collect();
            let modulus = if ak.is_empty() { n as i64 } else { 3 };
            for (i, (_, node)) in nodes.iter_mut().enumerate() {
                let values = lookup(rng, vec![Value::Int(class[i])], ak.len());
                for (k, v) in ak.iter().zip(values) {
                    node.props.insert(k.clone(), v);
                }
            }
            for (_, edge) in &mut edges {
                let i = attached(edge);
                let v = class[i] + modulus * rng.gen_range(0..2);
                edge.props.insert(first.clone(), Value::Int(v));
            }
        }
        _ => unreachable!("strict dependencies have one family per side"),
    }

    let mut g = Graph::new();
    for (id, node) in nodes {
        g.insert_node(id, node).expect("fresh id");
    }
    for (id, edge) in edges {
        g.insert_edge(id, edge).expect("endpoints exist");
    }
    g
}

/// Random graph with no dependency enforced; small value domains.
pub fn random_graph(rng: &mut StdRng, max_nodes: usize) -> Graph {
    let mut g = Graph::new();
    let n = rng.gen_range(1..=max_nodes);
    let pool = ["A", "B", "C"];
    let ids: Vec<ObjectId> = (0..n)
        .map(|_| {
            let l: Vec<&str> = pool.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            let keys: Vec<&str> = ["k1", "k2", "k3"].into_iter().filter(|_| rng.gen_bool(0.7)).collect();
            let p = random_props(rng, &keys);
            g.add_node(labels(l), p)
        })
        .collect();
    for _ in 0..rng.gen_range(0..=2 * n) {
        let l: Vec<&str> = ["E", "F"].into_iter().filter(|_| rng.gen_bool(0.6)).collect();
        let keys: Vec<&str> = ["k1", "k4"].into_iter().filter(|_| rng.gen_bool(0.7)).collect();
        let p = random_props(rng, &keys);
        let (s, t) = (ids.choose(rng).expect("nodes").clone(), ids.choose(rng).expect("nodes").clone());
        g.add_edge(&s, &t, labels(l), p).expect("endpoints exist");
    }
    g
}

fn random_object(rng: &mut StdRng, var: &str, label_pool: &[&str], key_pool: &[&str]) -> ObjectPattern {
    let l: Vec<&str> = label_pool.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    let k: Vec<&str> = key_pool.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    ObjectPattern::new(var, l, k)
}

pub fn random_pattern(rng: &mut StdRng, node_var: &str, edge_var: &str) -> GraphPattern {
    let node = random_object(rng, node_var, &["A", "B", "C"], &["k1", "k2", "k3"]);
    let edge = random_object(rng, edge_var, &["E", "F"], &["k1", "k4"]);
    match rng.gen_range(0..3) {
        0 => GraphPattern::node(node),
        1 => GraphPattern::edge(edge),
        _ => GraphPattern::node_edge(node, edge, if rng.gen_bool(0.5) { Direction::Out } else { Direction::In }),
    }
}

fn generalize_object(rng: &mut StdRng, op: &ObjectPattern, var: &str) -> ObjectPattern {
    let labels: Vec<String> = op.labels.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    let keys: Vec<String> = op.keys.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    ObjectPattern::new(var, labels, keys)
}

/// A pattern more general than `q`, using its own variable names.
pub fn generalize(rng: &mut StdRng, q: &GraphPattern) -> GraphPattern {
    match q {
        GraphPattern::Node(n) => GraphPattern::node(generalize_object(rng, n, "u")),
        GraphPattern::Edge(e) => GraphPattern::edge(generalize_object(rng, e, "v")),
        GraphPattern::NodeEdge { node, edge, direction } => match rng.gen_range(0..3) {
            0 => GraphPattern::node(generalize_object(rng, node, "u")),
            1 => GraphPattern::edge(generalize_object(rng, edge, "v")),
            _ => GraphPattern::node_edge(
                generalize_object(rng, node, "u"),
                generalize_object(rng, edge, "v"),
                *direction,
            ),
        },
    }
}

/// A pattern more specific than `q`: extra labels or keys, or an added edge or node.
pub fn specialize(rng: &mut StdRng, q: &GraphPattern) -> GraphPattern {
    let widen = |rng: &mut StdRng, op: &ObjectPattern, var: &str, label: &str, key: &str| {
        let mut out = ObjectPattern::new(var, op.labels.iter().cloned(), op.keys.iter().cloned());
        if rng.gen_bool(0.5) {
            out.labels.insert(label.to_owned());
        }
        if rng.gen_bool(0.5) {
            out.keys.insert(key.to_owned());
        }
        out
    };
    let dir = if rng.gen_bool(0.5) { Direction::Out } else { Direction::In };
    match q {
        GraphPattern::Node(n) => {
            let node = widen(rng, n, "p", "Z", "z1");
            if rng.gen_bool(0.5) {
                GraphPattern::node(node)
            } else {
                GraphPattern::node_edge(node, ObjectPattern::new("r", ["E"], Vec::<String>::new()), dir)
            }
        }
        GraphPattern::Edge(e) => {
            let edge = widen(rng, e, "r", "Z", "z2");
            if rng.gen_bool(0.5) {
                GraphPattern::edge(edge)
            } else {
                GraphPattern::node_edge(ObjectPattern::new("p", ["A"], Vec::<String>::new()), edge, dir)
            }
        }
        GraphPattern::NodeEdge { node, edge, direction } => {
            GraphPattern::node_edge(widen(rng, node, "p", "Z", "z1"), widen(rng, edge, "r", "Z", "z2"), *direction)
        }
    }
}

/// Plain fixpoint closure, written independently of the library.
pub fn oracle_closure(x: &VarSet, fds: &[(VarSet, VarSet)]) -> VarSet {
    let mut out = x.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for (l, r) in fds {
            if l.iter().all(|v| out.contains(v)) {
                for v in r {
                    changed |= out.insert(v.clone());
                }
            }
        }
    }
    out
}

/// Semantic implication by two-tuple instances: `fds ⊨ x => a` iff every
/// agree-set closed under `fds` that contains `x` also contains `a`.
pub fn brute_force_implies(attrs: &[Variable], fds: &[(VarSet, VarSet)], x: &VarSet, a: &Variable) -> bool {
    let n = attrs.len();
    (0u32..(1 << n)).all(|mask| {
        let agree: VarSet = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| attrs[i].clone()).collect();
        let satisfies = fds
            .iter()
            .all(|(l, r)| !l.is_subset(&agree) || r.is_subset(&agree));
        !(satisfies && x.is_subset(&agree)) || agree.contains(a)
    })
}

/// The two structural rules spelled out directly: objects determine their
/// keys, and an edge determines the node it is matched with.
pub fn oracle_structural(q: &GraphPattern) -> Vec<(VarSet, VarSet)> {
    let mut out = Vec::new();
    for op in [q.node_part(), q.edge_part()].into_iter().flatten() {
        for k in &op.keys {
            out.push(([Variable::object(&op.var)].into(), [Variable::prop(&op.var, k)].into()));
        }
    }
    if let (Some(n), Some(e)) = (q.node_part(), q.edge_part()) {
        out.push(([Variable::object(&e.var)].into(), [Variable::object(&n.var)].into()));
    }
    out
}

pub fn as_pairs(deps: &[GoFd]) -> Vec<(VarSet, VarSet)> {
    deps.iter().map(|d| (d.lhs().clone(), d.rhs().clone())).collect()
}
