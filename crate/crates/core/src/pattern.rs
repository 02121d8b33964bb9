//! Basic graph patterns and their evaluation into relations.
//!
//! Three shapes are supported: a single node, a single edge with anonymous
//! endpoints, and a node together with one incident edge. A pattern with
//! labels `L` matches objects carrying at least the labels in `L` and at
//! least the keys listed in the pattern.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::graph::{Graph, Label, Object, ObjectId, PropertyKey, Value};

/// Object identity variable `x` or property variable `x.k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub object: String,
    pub key: Option<PropertyKey>,
}

impl Variable {
    pub fn object(name: impl Into<String>) -> Self {
        Variable {
            object: name.into(),
            key: None,
        }
    }

    pub fn prop(name: impl Into<String>, key: impl Into<PropertyKey>) -> Self {
        Variable {
            object: name.into(),
            key: Some(key.into()),
        }
    }

    pub fn is_object(&self) -> bool {
        self.key.is_none()
    }

    /// Same variable attached to another object name.
    pub fn renamed(&self, object: &str) -> Self {
        Variable {
            object: object.to_owned(),
            key: self.key.clone(),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ident(f, &self.object)?;
        if let Some(k) = &self.key {
            f.write_str(".")?;
            write_ident(f, k)?;
        }
        Ok(())
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Writes a name, falling back to backtick quoting when it is not a plain identifier.
pub(crate) fn write_ident(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    if is_ident(s) {
        f.write_str(s)
    } else {
        f.write_char('`')?;
        f.write_str(&s.replace('`', "``"))?;
        f.write_char('`')
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectKind {
    Node,
    Edge,
}

/// Edge direction relative to the pattern's node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// The node is the edge's source.
    Out,
    /// The node is the edge's target.
    In,
}

/// One object of a pattern: `(var:{labels}:{keys})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectPattern {
    pub var: String,
    pub labels: BTreeSet<Label>,
    pub keys: BTreeSet<PropertyKey>,
}

impl ObjectPattern {
    pub fn new<L, K>(var: impl Into<String>, labels: L, keys: K) -> Self
    where
        L: IntoIterator,
        L::Item: Into<Label>,
        K: IntoIterator,
        K::Item: Into<PropertyKey>,
    {
        ObjectPattern {
            var: var.into(),
            labels: labels.into_iter().map(Into::into).collect(),
            keys: keys.into_iter().map(Into::into).collect(),
        }
    }

    pub fn matches(&self, object: Object<'_>) -> bool {
        self.labels.is_subset(object.labels()) && self.keys.iter().all(|k| object.props().contains_key(k))
    }

    /// Componentwise inclusion: `self` asks for no more labels and keys than `other`.
    pub fn subsumes(&self, other: &ObjectPattern) -> bool {
        self.labels.is_subset(&other.labels) && self.keys.is_subset(&other.keys)
    }

    pub fn attrs(&self) -> BTreeSet<Variable> {
        std::iter::once(Variable::object(&self.var))
            .chain(self.keys.iter().map(|k| Variable::prop(&self.var, k)))
            .collect()
    }

    fn bind(&self, id: &ObjectId, object: Object<'_>, row: &mut Tuple) {
        row.insert(Variable::object(&self.var), Cell::Object(id.clone()));
        for k in &self.keys {
            row.insert(Variable::prop(&self.var, k), Cell::Value(object.props()[k].clone()));
        }
    }

    fn write_body(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ident(f, &self.var)?;
        f.write_str(":")?;
        write_set(f, &self.labels)?;
        f.write_str(":")?;
        write_set(f, &self.keys)
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, items: &BTreeSet<String>) -> fmt::Result {
    f.write_str("{")?;
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write_ident(f, item)?;
    }
    f.write_str("}")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphPattern {
    Node(ObjectPattern),
    Edge(ObjectPattern),
    NodeEdge {
        node: ObjectPattern,
        edge: ObjectPattern,
        direction: Direction,
    },
}

/// A value bound to a variable: an object identity or a property value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Object(ObjectId),
    Value(Value),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Object(id) => write!(f, "{id}"),
            Cell::Value(v) => f.write_str(&v.literal()),
        }
    }
}

pub type Tuple = BTreeMap<Variable, Cell>;

/// A set of tuples that are total over `schema`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Relation {
    pub schema: BTreeSet<Variable>,
    pub tuples: BTreeSet<Tuple>,
}

impl Relation {
    pub fn new(schema: BTreeSet<Variable>) -> Self {
        Relation {
            schema,
            tuples: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn project(&self, vars: &BTreeSet<Variable>) -> Relation {
        let schema: BTreeSet<Variable> = self.schema.intersection(vars).cloned().collect();
        let tuples = self.tuples.iter().map(|t| restrict(t, &schema)).collect();
        Relation { schema, tuples }
    }

    /// Renames object names according to `map`; unmapped names stay.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Relation {
        let rn = |v: &Variable| match map.get(&v.object) {
            Some(o) => v.renamed(o),
            None => v.clone(),
        };
        Relation {
            schema: self.schema.iter().map(rn).collect(),
            tuples: self
                .tuples
                .iter()
                .map(|t| t.iter().map(|(v, c)| (rn(v), c.clone())).collect())
                .collect(),
        }
    }
}

/// The part of `tuple` on `vars`.
pub fn restrict(tuple: &Tuple, vars: &BTreeSet<Variable>) -> Tuple {
    tuple
        .iter()
        .filter(|(v, _)| vars.contains(*v))
        .map(|(v, c)| (v.clone(), c.clone()))
        .collect()
}

/// `x=n1, x.title="Databases"` rendering of a tuple.
pub fn format_tuple(tuple: &Tuple) -> String {
    tuple
        .iter()
        .map(|(v, c)| format!("{v}={c}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl GraphPattern {
    pub fn node(op: ObjectPattern) -> Self {
        GraphPattern::Node(op)
    }

    pub fn edge(op: ObjectPattern) -> Self {
        GraphPattern::Edge(op)
    }

    pub fn node_edge(node: ObjectPattern, edge: ObjectPattern, direction: Direction) -> Self {
        GraphPattern::NodeEdge { node, edge, direction }
    }

    pub fn node_part(&self) -> Option<&ObjectPattern> {
        match self {
            GraphPattern::Node(n) | GraphPattern::NodeEdge { node: n, .. } => Some(n),
            GraphPattern::Edge(_) => None,
        }
    }

    pub fn edge_part(&self) -> Option<&ObjectPattern> {
        match self {
            GraphPattern::Edge(e) | GraphPattern::NodeEdge { edge: e, .. } => Some(e),
            GraphPattern::Node(_) => None,
        }
    }

    pub fn direction(&self) -> Option<Direction> {
        match self {
            GraphPattern::NodeEdge { direction, .. } => Some(*direction),
            _ => None,
        }
    }

    /// Object variables with their kind, node first.
    pub fn objects(&self) -> Vec<(&ObjectPattern, ObjectKind)> {
        let mut out = Vec::with_capacity(2);
        if let Some(n) = self.node_part() {
            out.push((n, ObjectKind::Node));
        }
        if let Some(e) = self.edge_part() {
            out.push((e, ObjectKind::Edge));
        }
        out
    }

    pub fn object(&self, var: &str) -> Option<(&ObjectPattern, ObjectKind)> {
        self.objects().into_iter().find(|(op, _)| op.var == var)
    }

    pub fn kind_of(&self, var: &str) -> Option<ObjectKind> {
        self.object(var).map(|(_, k)| k)
    }

    pub fn attrs(&self) -> BTreeSet<Variable> {
        self.objects().into_iter().flat_map(|(op, _)| op.attrs()).collect()
    }

    pub fn evaluate(&self, g: &Graph) -> Relation {
        let mut rel = Relation::new(self.attrs());
        match self {
            GraphPattern::Node(n) => {
                for (id, node) in g.nodes() {
                    if n.matches(Object::Node(node)) {
                        let mut row = Tuple::new();
                        n.bind(id, Object::Node(node), &mut row);
                        rel.tuples.insert(row);
                    }
                }
            }
            GraphPattern::Edge(e) => {
                for (id, edge) in g.edges() {
                    if e.matches(Object::Edge(edge)) {
                        let mut row = Tuple::new();
                        e.bind(id, Object::Edge(edge), &mut row);
                        rel.tuples.insert(row);
                    }
                }
            }
            GraphPattern::NodeEdge { node, edge, direction } => {
                for (eid, ed) in g.edges() {
                    if !edge.matches(Object::Edge(ed)) {
                        continue;
                    }
                    let nid = match direction {
                        Direction::Out => &ed.src,
                        Direction::In => &ed.tgt,
                    };
                    let Some(nd) = g.node(nid) else { continue };
                    if node.matches(Object::Node(nd)) {
                        let mut row = Tuple::new();
                        node.bind(nid, Object::Node(nd), &mut row);
                        edge.bind(eid, Object::Edge(ed), &mut row);
                        rel.tuples.insert(row);
                    }
                }
            }
        }
        rel
    }

    /// `self ⊒ other`: every match of `other` projects onto a match of `self`.
    pub fn more_general_than(&self, other: &GraphPattern) -> bool {
        use GraphPattern::*;
        match (self, other) {
            (Node(a), Node(b)) => a.subsumes(b),
            (Node(a), NodeEdge { node: b, .. }) => a.subsumes(b),
            (Edge(a), Edge(b)) => a.subsumes(b),
            (Edge(a), NodeEdge { edge: b, .. }) => a.subsumes(b),
            (
                NodeEdge {
                    node: a,
                    edge: ea,
                    direction: da,
                },
                NodeEdge {
                    node: b,
                    edge: eb,
                    direction: db,
                },
            ) => da == db && a.subsumes(b) && ea.subsumes(eb),
            _ => false,
        }
    }

    /// Positional renaming from this pattern's object names to `other`'s:
    /// node to node, edge to edge.
    pub fn rename_map(&self, other: &GraphPattern) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        if let (Some(a), Some(b)) = (self.node_part(), other.node_part()) {
            map.insert(a.var.clone(), b.var.clone());
        }
        if let (Some(a), Some(b)) = (self.edge_part(), other.edge_part()) {
            map.insert(a.var.clone(), b.var.clone());
        }
        map
    }
}

impl fmt::Display for GraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphPattern::Node(n) => {
                f.write_str("(")?;
                n.write_body(f)?;
                f.write_str(")")
            }
            GraphPattern::Edge(e) => {
                f.write_str("()-[")?;
                e.write_body(f)?;
                f.write_str("]->()")
            }
            GraphPattern::NodeEdge { node, edge, direction } => {
                f.write_str("(")?;
                node.write_body(f)?;
                f.write_str(match direction {
                    Direction::Out => ")-[",
                    Direction::In => ")<-[",
                })?;
                edge.write_body(f)?;
                f.write_str(match direction {
                    Direction::Out => "]->()",
                    Direction::In => "]-()",
                })
            }
        }
    }
}
