//! Redundancy-removing graph transformations.
//!
//! A strict dependency is matched against the catalog of redundancy
//! patterns, turned into a symbolic plan, and then expanded into concrete
//! actions for every match of its scope. Applying a batch runs every create
//! action (computed on the original graph) before any removal.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gofd::{satisfies, Descriptor, GoFd};
use crate::graph::{Edge, Graph, Label, Node, Object, ObjectId, Properties, PropertyKey, Value};
use crate::pattern::{format_tuple, Cell, Direction, GraphPattern, ObjectKind, ObjectPattern, Tuple, Variable};
use crate::skolem::{reifier_id, skolem_edge_id, skolem_label, skolem_node_id};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformationKind {
    WithinN,
    WithinE,
    BetweenNEp,
    BetweenNpEp,
    BetweenEpNp,
    BetweenEpN,
    NoRedundancy,
}

impl TransformationKind {
    pub fn tag(self) -> &'static str {
        match self {
            TransformationKind::WithinN => "within-n",
            TransformationKind::WithinE => "within-e",
            TransformationKind::BetweenNEp => "between-n-ep",
            TransformationKind::BetweenNpEp => "between-np-ep",
            TransformationKind::BetweenEpNp => "between-ep-np",
            TransformationKind::BetweenEpN => "between-ep-n",
            TransformationKind::NoRedundancy => "no-redundancy",
        }
    }

    fn reifies(self) -> bool {
        matches!(
            self,
            TransformationKind::WithinE | TransformationKind::BetweenEpNp | TransformationKind::BetweenEpN
        )
    }
}

impl fmt::Display for TransformationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

fn single_family<'a>(dep: &'a GoFd, side: &'a BTreeSet<Variable>) -> Result<&'a str> {
    let fams: BTreeSet<&str> = side.iter().map(|v| v.object.as_str()).collect();
    if fams.len() != 1 {
        return Err(Error::NonStrict(dep.to_string()));
    }
    Ok(fams.into_iter().next().expect("one family"))
}

/// Classifies a strict dependency by the kinds of variables on each side.
pub fn match_redundancy_pattern(dep: &GoFd) -> Result<TransformationKind> {
    use TransformationKind::*;
    let fx = single_family(dep, dep.lhs())?;
    let fa = single_family(dep, dep.rhs())?;
    if dep.is_trivial() {
        return Ok(NoRedundancy);
    }
    let kind = |name: &str| dep.scope.kind_of(name).ok_or_else(|| Error::UnboundVariable(name.to_owned()));
    let (kx, ka) = (kind(fx)?, kind(fa)?);
    let x_obj = dep.lhs().contains(&Variable::object(fx));
    let a_obj = dep.rhs().contains(&Variable::object(fa));

    if fx == fa {
        // Keys of an object, or an object determining its own properties.
        if x_obj || a_obj {
            return Ok(NoRedundancy);
        }
        return Ok(match kx {
            ObjectKind::Node => WithinN,
            ObjectKind::Edge => WithinE,
        });
    }
    Ok(match (kx, ka) {
        // The node determines its edge: at most one such edge per node.
        (ObjectKind::Node, ObjectKind::Edge) if a_obj => NoRedundancy,
        (ObjectKind::Node, ObjectKind::Edge) if x_obj => BetweenNEp,
        (ObjectKind::Node, ObjectKind::Edge) => BetweenNpEp,
        // An edge determines its endpoint and the endpoint's properties.
        (ObjectKind::Edge, ObjectKind::Node) if x_obj => NoRedundancy,
        (ObjectKind::Edge, ObjectKind::Node) if a_obj => BetweenEpN,
        (ObjectKind::Edge, ObjectKind::Node) => BetweenEpNp,
        _ => return Err(Error::NonStrict(dep.to_string())),
    })
}

/// Where a plan step reads or writes, relative to one match of the scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    /// The object bound to a pattern variable.
    Var(String),
    /// The node standing in for the edge bound to the variable.
    Reifier(String),
    /// Endpoints of the edge bound to the variable.
    Src(String),
    Tgt(String),
    /// The transformation's value node.
    Value,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Var(v) => f.write_str(v),
            Slot::Reifier(v) => write!(f, "ν({v})"),
            Slot::Src(v) => write!(f, "src({v})"),
            Slot::Tgt(v) => write!(f, "tgt({v})"),
            Slot::Value => f.write_str("ν"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeLabel {
    Fixed(Label),
    /// Labels of the reified edge joined, plus a suffix such as `_det`.
    OfEdge { edge: String, suffix: &'static str },
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Fixed(l) => f.write_str(l),
            EdgeLabel::OfEdge { edge, suffix } => write!(f, "λ({edge}){suffix}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanStep {
    /// Replace the edge by a node linked from its source and to its target.
    Reify { edge: String },
    /// A value node identified by the transformation kind, `labels` and the
    /// values of `id_vars`, holding the values of `store`.
    NewValueNode {
        label: Label,
        labels: Vec<Label>,
        id_vars: Vec<Variable>,
        store: Vec<(PropertyKey, Variable)>,
    },
    NewEdge { label: EdgeLabel, from: Slot, to: Slot },
    MoveProp { from: Variable, to: Slot },
    DelProp { on: Slot, key: PropertyKey },
    DelEdge { edge: String },
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanStep::Reify { edge } => write!(f, "reify {edge} as ν({edge})"),
            PlanStep::NewValueNode {
                label, labels, id_vars, store,
            } => {
                let ids: Vec<String> = id_vars.iter().map(|v| v.to_string()).collect();
                let props: Vec<String> = store.iter().map(|(k, v)| format!("{k} <- {v}")).collect();
                write!(
                    f,
                    "new node ν({{{}}}, {}):{label} {{{}}}",
                    labels.join(","),
                    ids.join(", "),
                    props.join(", ")
                )
            }
            PlanStep::NewEdge { label, from, to } => write!(f, "new edge {from} -[:{label}]-> {to}"),
            PlanStep::MoveProp { from, to } => write!(f, "move {from} to {to}"),
            PlanStep::DelProp { on, key } => write!(f, "delete {on}.{key}"),
            PlanStep::DelEdge { edge } => write!(f, "delete edge {edge}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformation {
    pub kind: TransformationKind,
    /// The dependency this transformation resolves.
    pub source: GoFd,
    pub create: Vec<PlanStep>,
    pub remove: Vec<PlanStep>,
    /// Key dependency for the created value nodes.
    pub key_dep: Option<GoFd>,
}

/// One concrete step of applying a transformation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Action {
    NewNode {
        id: ObjectId,
        labels: BTreeSet<Label>,
        properties: Properties,
        #[serde(skip_serializing_if = "Option::is_none")]
        reifies: Option<ObjectId>,
    },
    NewEdge {
        id: ObjectId,
        src: ObjectId,
        tgt: ObjectId,
        labels: BTreeSet<Label>,
        properties: Properties,
    },
    MoveProp {
        from: ObjectId,
        to: ObjectId,
        key: PropertyKey,
        value: Value,
    },
    DelEdge {
        id: ObjectId,
    },
    DelProp {
        id: ObjectId,
        key: PropertyKey,
    },
}

impl Action {
    pub fn is_create(&self) -> bool {
        matches!(self, Action::NewNode { .. } | Action::NewEdge { .. } | Action::MoveProp { .. })
    }
}

fn edge_label_base(labels: &BTreeSet<Label>) -> String {
    if labels.is_empty() {
        "edge".to_owned()
    } else {
        labels.iter().cloned().collect::<Vec<_>>().join("_")
    }
}

/// Builds the transformation for a dependency whose right-hand side names one object family.
pub fn instantiate(dep: &GoFd) -> Result<Transformation> {
    use TransformationKind::*;
    let kind = match_redundancy_pattern(dep)?;
    if kind == NoRedundancy {
        return Err(Error::NothingToDo(dep.to_string()));
    }
    let q = &dep.scope;
    let fx = single_family(dep, dep.lhs())?.to_owned();
    let fa = single_family(dep, dep.rhs())?.to_owned();
    let (x_pat, _) = q.object(&fx).expect("validated by match");
    let xk: Vec<PropertyKey> = dep.lhs().iter().filter_map(|v| v.key.clone()).collect();
    let ak: Vec<PropertyKey> = dep.rhs().iter().filter_map(|v| v.key.clone()).collect();

    let labels: Vec<Label> = x_pat.labels.iter().cloned().collect();
    let label = skolem_label(&labels, &xk);
    let mut store: Vec<(PropertyKey, Variable)> = xk.iter().map(|k| (k.clone(), Variable::prop(&fx, k))).collect();
    if kind != BetweenEpN {
        for k in &ak {
            let name = if xk.contains(k) { format!("{fa}_{k}") } else { k.clone() };
            store.push((name, Variable::prop(&fa, k)));
        }
    }
    let value_node = PlanStep::NewValueNode {
        label: label.clone(),
        labels,
        id_vars: dep.lhs().iter().cloned().collect(),
        store: store.clone(),
    };
    let det = PlanStep::NewEdge {
        label: EdgeLabel::OfEdge {
            edge: fx.clone(),
            suffix: "_det",
        },
        from: Slot::Reifier(fx.clone()),
        to: Slot::Value,
    };
    let del = |on: Slot, keys: &[PropertyKey]| -> Vec<PlanStep> {
        keys.iter()
            .map(|k| PlanStep::DelProp {
                on: on.clone(),
                key: k.clone(),
            })
            .collect()
    };
    let both: Vec<PropertyKey> = xk.iter().chain(&ak).cloned().collect();

    let (create, remove) = match kind {
        WithinN => (
            vec![
                value_node,
                PlanStep::NewEdge {
                    label: EdgeLabel::Fixed(label.clone()),
                    from: Slot::Var(fx.clone()),
                    to: Slot::Value,
                },
            ],
            del(Slot::Var(fx.clone()), &both),
        ),
        WithinE => {
            let mut remove = del(Slot::Reifier(fx.clone()), &both);
            remove.push(PlanStep::DelEdge { edge: fx.clone() });
            (vec![PlanStep::Reify { edge: fx.clone() }, value_node, det], remove)
        }
        BetweenNEp => (
            ak.iter()
                .map(|k| PlanStep::MoveProp {
                    from: Variable::prop(&fa, k),
                    to: Slot::Var(fx.clone()),
                })
                .collect(),
            del(Slot::Var(fa.clone()), &ak),
        ),
        BetweenNpEp => {
            let mut remove = del(Slot::Var(fx.clone()), &xk);
            remove.extend(del(Slot::Var(fa.clone()), &ak));
            (
                vec![
                    value_node,
                    PlanStep::NewEdge {
                        label: EdgeLabel::Fixed(label.clone()),
                        from: Slot::Var(fx.clone()),
                        to: Slot::Value,
                    },
                ],
                remove,
            )
        }
        BetweenEpNp => {
            let mut remove = del(Slot::Reifier(fx.clone()), &xk);
            remove.push(PlanStep::DelEdge { edge: fx.clone() });
            remove.extend(del(Slot::Var(fa.clone()), &ak));
            (vec![PlanStep::Reify { edge: fx.clone() }, value_node, det], remove)
        }
        BetweenEpN => {
            let mut remove = del(Slot::Reifier(fx.clone()), &xk);
            remove.push(PlanStep::DelEdge { edge: fx.clone() });
            (vec![PlanStep::Reify { edge: fx.clone() }, value_node, det], remove)
        }
        NoRedundancy => unreachable!(),
    };

    let key_dep = if kind == BetweenNEp {
        None
    } else {
        let scope = GraphPattern::node(ObjectPattern::new(
            fx.clone(),
            [label.clone()],
            store.iter().map(|(k, _)| k.clone()),
        ));
        Some(GoFd {
            scope,
            descriptor: Descriptor::new(xk.iter().map(|k| Variable::prop(&fx, k)), [Variable::object(&fx)]),
        })
    };

    Ok(Transformation {
        kind,
        source: dep.clone(),
        create,
        remove,
        key_dep,
    })
}

fn object_at(t: &Tuple, var: &str) -> ObjectId {
    match t.get(&Variable::object(var)) {
        Some(Cell::Object(id)) => id.clone(),
        _ => panic!("tuple lacks object variable `{var}`"),
    }
}

fn value_at(t: &Tuple, var: &Variable) -> Value {
    match t.get(var) {
        Some(Cell::Value(v)) => v.clone(),
        _ => panic!("tuple lacks property variable `{var}`"),
    }
}

impl Transformation {
    fn value_node_step(&self) -> Option<(&Label, &Vec<(PropertyKey, Variable)>)> {
        self.create.iter().find_map(|s| match s {
            PlanStep::NewValueNode { label, store, .. } => Some((label, store)),
            _ => None,
        })
    }

    /// Concrete actions for every match of the scope in `g`: creates first,
    /// then removals, without duplicates.
    pub fn actions(&self, g: &Graph) -> Vec<Action> {
        let rel = self.source.scope.evaluate(g);
        let mut creates = Vec::new();
        let mut removes = Vec::new();
        for t in &rel.tuples {
            self.expand(g, t, &mut creates, &mut removes);
        }
        let mut seen = HashSet::new();
        creates
            .into_iter()
            .chain(removes)
            .filter(|a| seen.insert(a.clone()))
            .collect()
    }

    fn expand(&self, g: &Graph, t: &Tuple, creates: &mut Vec<Action>, removes: &mut Vec<Action>) {
        let edge_of = |var: &str| -> (ObjectId, &Edge) {
            let id = object_at(t, var);
            let e = g.edge(&id).expect("matched edge exists");
            (id, e)
        };
        let mut value_id: Option<ObjectId> = None;
        let resolve = |slot: &Slot, value_id: &Option<ObjectId>| -> ObjectId {
            match slot {
                Slot::Var(v) => object_at(t, v),
                Slot::Reifier(v) => reifier_id(&object_at(t, v)),
                Slot::Src(v) => edge_of(v).1.src.clone(),
                Slot::Tgt(v) => edge_of(v).1.tgt.clone(),
                Slot::Value => value_id.clone().expect("value node is created before it is used"),
            }
        };
        for step in &self.create {
            match step {
                PlanStep::Reify { edge } => {
                    let (id, e) = edge_of(edge);
                    let rid = reifier_id(&id);
                    let base = edge_label_base(&e.labels);
                    creates.push(Action::NewNode {
                        id: rid.clone(),
                        labels: e.labels.clone(),
                        properties: e.props.clone(),
                        reifies: Some(id.clone()),
                    });
                    for (label, src, tgt) in [
                        (format!("{base}_src"), &e.src, &rid),
                        (format!("{base}_tgt"), &rid, &e.tgt),
                    ] {
                        creates.push(Action::NewEdge {
                            id: skolem_edge_id(&label, src, tgt),
                            src: src.clone(),
                            tgt: tgt.clone(),
                            labels: [label].into(),
                            properties: Properties::new(),
                        });
                    }
                }
                PlanStep::NewValueNode {
                    label, labels, id_vars, store,
                } => {
                    let kv: Vec<(PropertyKey, Value)> = id_vars
                        .iter()
                        .map(|v| (v.key.clone().unwrap_or_default(), value_at(t, v)))
                        .collect();
                    let id = skolem_node_id(self.kind.tag(), labels, &kv);
                    creates.push(Action::NewNode {
                        id: id.clone(),
                        labels: [label.clone()].into(),
                        properties: store.iter().map(|(k, v)| (k.clone(), value_at(t, v))).collect(),
                        reifies: None,
                    });
                    value_id = Some(id);
                }
                PlanStep::NewEdge { label, from, to } => {
                    let label = match label {
                        EdgeLabel::Fixed(l) => l.clone(),
                        EdgeLabel::OfEdge { edge, suffix } => format!("{}{suffix}", edge_label_base(&edge_of(edge).1.labels)),
                    };
                    let (src, tgt) = (resolve(from, &value_id), resolve(to, &value_id));
                    creates.push(Action::NewEdge {
                        id: skolem_edge_id(&label, &src, &tgt),
                        src,
                        tgt,
                        labels: [label].into(),
                        properties: Properties::new(),
                    });
                }
                PlanStep::MoveProp { from, to } => {
                    creates.push(Action::MoveProp {
                        from: object_at(t, &from.object),
                        to: resolve(to, &value_id),
                        key: from.key.clone().unwrap_or_default(),
                        value: value_at(t, from),
                    });
                }
                PlanStep::DelProp { .. } | PlanStep::DelEdge { .. } => {}
            }
        }
        for step in &self.remove {
            match step {
                PlanStep::DelProp { on, key } => removes.push(Action::DelProp {
                    id: resolve(on, &value_id),
                    key: key.clone(),
                }),
                PlanStep::DelEdge { edge } => removes.push(Action::DelEdge { id: object_at(t, edge) }),
                _ => {}
            }
        }
    }
}

fn merge_props(g: &mut Graph, id: &ObjectId, props: &Properties) -> Result<()> {
    for (k, v) in props {
        match g.prop(id, k) {
            Some(old) if old != v => {
                return Err(Error::PropertyConflict {
                    object: id.clone(),
                    key: k.clone(),
                })
            }
            Some(_) => {}
            None => g.set_prop(id, k.clone(), v.clone())?,
        }
    }
    Ok(())
}

fn run_create(g: &mut Graph, action: &Action, reified: &mut BTreeMap<ObjectId, ObjectId>) -> Result<()> {
    match action {
        Action::NewNode {
            id, labels, properties, reifies,
        } => {
            if let Some(edge) = reifies {
                reified.insert(edge.clone(), id.clone());
            }
            if g.edge(id).is_some() {
                return Err(Error::Invariant(format!("created node id `{id}` is already an edge")));
            }
            if g.node(id).is_some() {
                g.labels_mut(id)?.extend(labels.iter().cloned());
                merge_props(g, id, properties)
            } else {
                g.insert_node(
                    id.clone(),
                    Node {
                        labels: labels.clone(),
                        props: properties.clone(),
                    },
                )
            }
        }
        Action::NewEdge {
            id, src, tgt, labels, properties,
        } => match g.edge(id) {
            Some(e) if (&e.src, &e.tgt) != (src, tgt) => {
                Err(Error::Invariant(format!("created edge `{id}` already exists with other endpoints")))
            }
            Some(_) => {
                g.labels_mut(id)?.extend(labels.iter().cloned());
                merge_props(g, id, properties)
            }
            None => g.insert_edge(
                id.clone(),
                Edge {
                    src: src.clone(),
                    tgt: tgt.clone(),
                    labels: labels.clone(),
                    props: properties.clone(),
                },
            ),
        },
        Action::MoveProp { to, key, value, .. } => merge_props(g, to, &[(key.clone(), value.clone())].into()),
        _ => Ok(()),
    }
}

fn run_remove(g: &mut Graph, action: &Action, reified: &BTreeMap<ObjectId, ObjectId>) -> Result<()> {
    match action {
        Action::DelProp { id, key } => {
            if g.contains(id) {
                g.remove_prop(id, key)?;
            }
            if let Some(r) = reified.get(id) {
                if g.contains(r) {
                    g.remove_prop(r, key)?;
                }
            }
            Ok(())
        }
        Action::DelEdge { id } => {
            if g.edge(id).is_some() {
                g.remove_object(id)?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Applies a batch of transformations: every create action, computed on the
/// original graph, runs before any removal.
pub fn apply_all(g: &Graph, ts: &[Transformation]) -> Result<Graph> {
    for t in ts {
        let sat = satisfies(g, &t.source, 5)?;
        if !sat.holds {
            return Err(Error::UnsatisfiedDependency {
                dependency: t.source.to_string(),
                witnesses: sat
                    .witnesses
                    .iter()
                    .map(|(a, b)| (format_tuple(a), format_tuple(b)))
                    .collect(),
            });
        }
    }
    let actions: Vec<Action> = ts.iter().flat_map(|t| t.actions(g)).collect();
    let mut out = g.clone();
    let mut reified = BTreeMap::new();
    for a in actions.iter().filter(|a| a.is_create()) {
        run_create(&mut out, a, &mut reified)?;
    }
    for a in actions.iter().filter(|a| !a.is_create()) {
        run_remove(&mut out, a, &reified)?;
    }
    Ok(out)
}

fn endpoint(e: &Edge, direction: Direction) -> &ObjectId {
    match direction {
        Direction::Out => &e.src,
        Direction::In => &e.tgt,
    }
}

/// Edges of `g` matching the edge part of `q` by labels, with the node they attach to.
fn scope_edges(g: &Graph, q: &GraphPattern) -> Vec<(ObjectId, ObjectId)> {
    let (Some(ep), Some(dir)) = (q.edge_part(), q.direction()) else {
        return Vec::new();
    };
    g.edges()
        .filter(|(_, e)| ep.labels.is_subset(&e.labels))
        .map(|(id, e)| (id.clone(), endpoint(e, dir).clone()))
        .collect()
}

/// Rebuilds the scope's matches from `after` by joining along the created
/// objects, and compares them with the matches in `before`.
pub fn verify_lossless(before: &Graph, after: &Graph, t: &Transformation) -> bool {
    reconstruct(before, after, t).map_or(false, |g| t.source.scope.evaluate(&g) == t.source.scope.evaluate(before))
}

fn reconstruct(before: &Graph, after: &Graph, t: &Transformation) -> Option<Graph> {
    use TransformationKind::*;
    let q = &t.source.scope;
    let actions = t.actions(before);
    let mut created = BTreeSet::new();
    let mut reifiers = BTreeMap::new();
    for a in &actions {
        if let Action::NewNode { id, reifies, .. } = a {
            created.insert(id.clone());
            if let Some(e) = reifies {
                reifiers.insert(id.clone(), e.clone());
            }
        }
    }
    let mut g = after.clone();
    let fx = t.source.lhs().iter().next()?.object.clone();

    // Reified edges come back first, carrying the reifier's labels and properties.
    if t.kind.reifies() {
        for (rid, eid) in &reifiers {
            let r = g.node(rid)?.clone();
            let base = edge_label_base(&r.labels);
            let src = g
                .edges()
                .find(|(_, e)| &e.tgt == rid && e.labels.contains(&format!("{base}_src")))
                .map(|(_, e)| e.src.clone())?;
            let tgt = g
                .edges()
                .find(|(_, e)| &e.src == rid && e.labels.contains(&format!("{base}_tgt")))
                .map(|(_, e)| e.tgt.clone())?;
            let mut props = r.props.clone();
            let det = format!("{base}_det");
            if let Some((label, store)) = t.value_node_step() {
                let value: Node = g
                    .edges()
                    .filter(|(_, e)| &e.src == rid && e.labels.contains(&det))
                    .filter_map(|(_, e)| g.node(&e.tgt))
                    .find(|n| n.labels.contains(label))?
                    .clone();
                let direction = q.direction();
                for (name, var) in store {
                    let v = value.props.get(name)?.clone();
                    let k = var.key.clone()?;
                    if var.object == fx {
                        props.insert(k, v);
                    } else if let Some(dir) = direction {
                        let node = match dir {
                            Direction::Out => &src,
                            Direction::In => &tgt,
                        };
                        g.set_prop(node, k, v).ok()?;
                    }
                }
            }
            g.insert_edge(
                eid.clone(),
                Edge {
                    src,
                    tgt,
                    labels: r.labels.clone(),
                    props,
                },
            )
            .ok()?;
        }
    }

    match t.kind {
        WithinN | BetweenNpEp => {
            let (label, store) = t.value_node_step()?;
            let links: Vec<(ObjectId, ObjectId)> = g
                .edges()
                .filter(|(_, e)| e.labels.contains(label))
                .filter(|(_, e)| g.node(&e.tgt).is_some_and(|n| n.labels.contains(label)))
                .map(|(_, e)| (e.src.clone(), e.tgt.clone()))
                .collect();
            let edges = scope_edges(&g, q);
            for (x, v) in links {
                let value = g.node(&v)?.props.clone();
                for (name, var) in store {
                    let val = value.get(name)?.clone();
                    let k = var.key.clone()?;
                    if var.object == fx {
                        g.set_prop(&x, k, val).ok()?;
                    } else {
                        for (eid, n) in &edges {
                            if *n == x {
                                g.set_prop(eid, k.clone(), val.clone()).ok()?;
                            }
                        }
                    }
                }
            }
        }
        BetweenNEp => {
            let keys: Vec<PropertyKey> = t.source.rhs().iter().filter_map(|v| v.key.clone()).collect();
            for (eid, n) in scope_edges(&g, q) {
                for k in &keys {
                    if let Some(val) = g.prop(&n, k).cloned() {
                        g.set_prop(&eid, k.clone(), val).ok()?;
                    }
                }
            }
        }
        _ => {}
    }

    for id in &created {
        if g.node(id).is_some() {
            g.remove_object(id).ok()?;
        }
    }
    Some(g)
}

/// Whether `object` still matches any part of a scope; used for reporting touched objects.
pub fn touches(q: &GraphPattern, object: Object<'_>) -> bool {
    q.objects().iter().any(|(op, _)| op.matches(object))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::profile;
    use crate::pattern::ObjectPattern;

    fn v(s: &str) -> Variable {
        match s.split_once('.') {
            Some((o, k)) => Variable::prop(o, k),
            None => Variable::object(s),
        }
    }

    fn dep(q: &GraphPattern, lhs: &[&str], rhs: &[&str]) -> GoFd {
        GoFd::new(q.clone(), lhs.iter().map(|s| v(s)), rhs.iter().map(|s| v(s))).unwrap()
    }

    fn group_no() -> GoFd {
        let q = GraphPattern::edge(ObjectPattern::new("y", ["inGroupWith"], ["groupNo", "name"]));
        dep(&q, &["y.groupNo"], &["y.name"])
    }

    fn book() -> GoFd {
        let q = GraphPattern::node_edge(
            ObjectPattern::new("c", ["Course"], Vec::<String>::new()),
            ObjectPattern::new("t", ["TEACHES"], ["usingBook"]),
            Direction::In,
        );
        dep(&q, &["c"], &["t.usingBook"])
    }

    fn load(text: &str) -> Graph {
        Graph::from_json_str(text).unwrap()
    }

    #[test]
    fn catalog_matching() {
        use TransformationKind::*;
        assert_eq!(match_redundancy_pattern(&group_no()).unwrap(), WithinE);
        assert_eq!(match_redundancy_pattern(&book()).unwrap(), BetweenNEp);
        let course = GraphPattern::node(ObjectPattern::new("x", ["Course"], ["title", "year"]));
        assert_eq!(match_redundancy_pattern(&dep(&course, &["x.title", "x.year"], &["x"])).unwrap(), NoRedundancy);

        let ne = GraphPattern::node_edge(
            ObjectPattern::new("x", ["A"], ["k1"]),
            ObjectPattern::new("y", ["E"], ["k2"]),
            Direction::Out,
        );
        assert_eq!(match_redundancy_pattern(&dep(&ne, &["x.k1"], &["y.k2"])).unwrap(), BetweenNpEp);
        assert_eq!(match_redundancy_pattern(&dep(&ne, &["y.k2"], &["x.k1"])).unwrap(), BetweenEpNp);
        assert_eq!(match_redundancy_pattern(&dep(&ne, &["y.k2"], &["x"])).unwrap(), BetweenEpN);
        assert_eq!(match_redundancy_pattern(&dep(&ne, &["y"], &["x.k1"])).unwrap(), NoRedundancy);
        assert_eq!(match_redundancy_pattern(&dep(&ne, &["x"], &["y"])).unwrap(), NoRedundancy);
        assert_eq!(match_redundancy_pattern(&dep(&ne, &["x.k1"], &["y"])).unwrap(), NoRedundancy);
        assert!(matches!(
            match_redundancy_pattern(&dep(&ne, &["x.k1", "y.k2"], &["x"])),
            Err(Error::NonStrict(_))
        ));
    }

    #[test]
    fn trivial_and_key_dependencies_need_nothing() {
        let q = GraphPattern::node(ObjectPattern::new("x", ["A"], ["k"]));
        assert!(matches!(instantiate(&dep(&q, &["x.k"], &["x.k"])), Err(Error::NothingToDo(_))));
        assert!(matches!(instantiate(&dep(&q, &["x.k"], &["x"])), Err(Error::NothingToDo(_))));
    }

    #[test]
    fn group_number_transformation_has_reified_shape() {
        let g = load(include_str!("../fixtures/groupno.json"));
        let t = instantiate(&group_no()).unwrap();
        let key = t.key_dep.clone().unwrap();
        assert_eq!(
            key.to_string(),
            "(y:{Sk_InGroupWithGroupNo}:{groupNo,name}) :: y.groupNo => y"
        );
        let out = apply_all(&g, &[t.clone()]).unwrap();
        assert_eq!(out.node_count(), 6);
        assert_eq!(out.edge_count(), 6);
        let values: Vec<_> = out
            .nodes()
            .filter(|(_, n)| n.labels.contains("Sk_InGroupWithGroupNo"))
            .collect();
        assert_eq!(values.len(), 1);
        assert_eq!(values[0].1.props.get("name"), Some(&Value::from("Heroes")));
        assert_eq!(values[0].1.props.get("groupNo"), Some(&Value::Int(1)));
        let reifiers: Vec<_> = out.nodes().filter(|(_, n)| n.labels.contains("inGroupWith")).collect();
        assert_eq!(reifiers.len(), 2);
        assert!(reifiers.iter().all(|(_, n)| n.props.is_empty()));
        assert!(out.edges().all(|(_, e)| !e.labels.contains("inGroupWith")));
        assert!(verify_lossless(&g, &out, &t));

        let p = profile(&out, &key).unwrap();
        assert_eq!((p.max, p.avg_f64(), p.minimality_f64()), (1, 1.0, 1.0));
    }

    #[test]
    fn book_moves_to_course() {
        let g = load(include_str!("../fixtures/university.json"));
        let t = instantiate(&book()).unwrap();
        assert!(t.key_dep.is_none());
        let out = apply_all(&g, &[t.clone()]).unwrap();
        assert_eq!(out, load(include_str!("../fixtures/university_normalized.json")));
        assert!(verify_lossless(&g, &out, &t));
    }

    #[test]
    fn full_graph_keeps_untouched_edges() {
        let g = load(include_str!("../fixtures/fig1b.json"));
        let t = instantiate(&group_no()).unwrap();
        let out = apply_all(&g, &[t]).unwrap();
        assert_eq!(out.node_count(), g.node_count() + 3);
        assert_eq!(out.edge_count(), g.edge_count() - 2 + 6);
        for e in ["e6", "e7", "e8"] {
            assert_eq!(out.edge(&e.into()), g.edge(&e.into()));
        }
    }

    #[test]
    fn empty_batch_is_identity() {
        let g = load(include_str!("../fixtures/fig1b.json"));
        assert_eq!(apply_all(&g, &[]).unwrap(), g);
    }

    #[test]
    fn unsatisfied_dependency_aborts() {
        let mut g = load(include_str!("../fixtures/groupno.json"));
        g.set_prop(&"e5".into(), "name", "Villains".into()).unwrap();
        let t = instantiate(&group_no()).unwrap();
        match apply_all(&g, &[t]) {
            Err(Error::UnsatisfiedDependency { witnesses, .. }) => assert_eq!(witnesses.len(), 1),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn reapplying_on_transformed_graph_is_a_no_op() {
        let g = load(include_str!("../fixtures/groupno.json"));
        let t = instantiate(&group_no()).unwrap();
        let once = apply_all(&g, &[t.clone()]).unwrap();
        let twice = apply_all(&once, &[t]).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn batch_order_does_not_matter() {
        let g = load(include_str!("../fixtures/fig1b.json"));
        let q = GraphPattern::node(ObjectPattern::new("x", ["Course", "Annual"], ["title", "language"]));
        let a = instantiate(&dep(&q, &["x.title"], &["x.language"])).unwrap();
        let b = instantiate(&group_no()).unwrap();
        let ab = apply_all(&g, &[a.clone(), b.clone()]).unwrap();
        let ba = apply_all(&g, &[b, a]).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn within_node_collapses_equal_values() {
        let g = load(include_str!("../fixtures/fig1b.json"));
        let q = GraphPattern::node(ObjectPattern::new("x", ["Course", "Annual"], ["title", "language"]));
        let t = instantiate(&dep(&q, &["x.title"], &["x.language"])).unwrap();
        let out = apply_all(&g, &[t.clone()]).unwrap();
        let values: Vec<_> = out.nodes().filter(|(id, _)| id.as_str().starts_with("sk:")).collect();
        assert_eq!(values.len(), 1);
        assert_eq!(out.prop(&"n5".into(), "title"), None);
        assert_eq!(out.prop(&"n5".into(), "year"), Some(&Value::Int(2024)));
        assert!(verify_lossless(&g, &out, &t));
    }

    #[test]
    fn actions_serialize_with_op_tags() {
        let g = load(include_str!("../fixtures/university.json"));
        let acts = instantiate(&book()).unwrap().actions(&g);
        let json = serde_json::to_value(&acts).unwrap();
        assert_eq!(json[0]["op"], "move-prop");
        assert_eq!(json.as_array().unwrap().last().unwrap()["op"], "del-prop");
    }
}
