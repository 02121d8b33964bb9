//! In-memory labeled property graph.
//!
//! Nodes and edges share one identifier space. Every edge has exactly one
//! source and one target node, and every object carries a (possibly empty)
//! label set plus a map of atomic property values.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Label = String;
pub type PropertyKey = String;
pub type Properties = BTreeMap<PropertyKey, Value>;

/// Opaque identifier of a node or an edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(String);

impl ObjectId {
    pub fn new(id: impl Into<String>) -> Self {
        ObjectId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> Self {
        ObjectId(s.to_owned())
    }
}

/// Atomic property value. Dates are carried as ISO-8601 strings.
#[derive(Debug, Clone)]
pub enum Value {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Value {
    fn rank(&self) -> u8 {
        match self {
            Value::Bool(_) => 0,
            Value::Int(_) => 1,
            Value::Float(_) => 2,
            Value::Str(_) => 3,
        }
    }

    /// JSON literal of the value (strings quoted and escaped).
    pub fn literal(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("atomic values always serialize")
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Str(s) => serde_json::Value::String(s.clone()),
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Float(f) => serde_json::Number::from_f64(*f)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Value::Bool(b) => serde_json::Value::Bool(*b),
        }
    }

    /// Converts a JSON scalar. Arrays, objects and null are not atomic values.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        match value {
            serde_json::Value::String(s) => Ok(Value::Str(s.clone())),
            serde_json::Value::Bool(b) => Ok(Value::Bool(*b)),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Value::Int(i))
                } else if let Some(f) = n.as_f64() {
                    Ok(Value::Float(f))
                } else {
                    Err(Error::Format(format!("number {n} is out of range")))
                }
            }
            serde_json::Value::Array(_) => Err(Error::Format("list values are not atomic".into())),
            serde_json::Value::Object(_) => Err(Error::Format("map values are not atomic".into())),
            serde_json::Value::Null => Err(Error::Format("null is not a property value".into())),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Float(a), Value::Float(b)) => a.total_cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Str(s) => s.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Float(f) => f.to_bits().hash(state),
            Value::Bool(b) => b.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => f.write_str(s),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Node {
    pub labels: BTreeSet<Label>,
    pub props: Properties,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: ObjectId,
    pub tgt: ObjectId,
    pub labels: BTreeSet<Label>,
    pub props: Properties,
}

/// Either side of the object space, borrowed.
#[derive(Debug, Clone, Copy)]
pub enum Object<'a> {
    Node(&'a Node),
    Edge(&'a Edge),
}

impl<'a> Object<'a> {
    pub fn labels(&self) -> &'a BTreeSet<Label> {
        match self {
            Object::Node(n) => &n.labels,
            Object::Edge(e) => &e.labels,
        }
    }

    pub fn props(&self) -> &'a Properties {
        match self {
            Object::Node(n) => &n.props,
            Object::Edge(e) => &e.props,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: BTreeMap<ObjectId, Node>,
    edges: BTreeMap<ObjectId, Edge>,
    counter: u64,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Graph {}

pub fn labels<I, S>(items: I) -> BTreeSet<Label>
where
    I: IntoIterator<Item = S>,
    S: Into<Label>,
{
    items.into_iter().map(Into::into).collect()
}

pub fn props<I, K, V>(items: I) -> Properties
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<PropertyKey>,
    V: Into<Value>,
{
    items.into_iter().map(|(k, v)| (k.into(), v.into())).collect()
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&ObjectId, &Node)> {
        self.nodes.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&ObjectId, &Edge)> {
        self.edges.iter()
    }

    pub fn node(&self, id: &ObjectId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn edge(&self, id: &ObjectId) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn object(&self, id: &ObjectId) -> Option<Object<'_>> {
        self.nodes
            .get(id)
            .map(Object::Node)
            .or_else(|| self.edges.get(id).map(Object::Edge))
    }

    pub fn contains(&self, id: &ObjectId) -> bool {
        self.nodes.contains_key(id) || self.edges.contains_key(id)
    }

    pub fn prop(&self, id: &ObjectId, key: &str) -> Option<&Value> {
        self.object(id).and_then(|o| o.props().get(key))
    }

    fn fresh_id(&mut self, prefix: char) -> ObjectId {
        loop {
            self.counter += 1;
            let id = ObjectId(format!("{prefix}{}", self.counter));
            if !self.contains(&id) {
                return id;
            }
        }
    }

    pub fn add_node(&mut self, labels: BTreeSet<Label>, props: Properties) -> ObjectId {
        let id = self.fresh_id('n');
        self.nodes.insert(id.clone(), Node { labels, props });
        id
    }

    pub fn add_edge(
        &mut self,
        src: &ObjectId,
        tgt: &ObjectId,
        labels: BTreeSet<Label>,
        props: Properties,
    ) -> Result<ObjectId> {
        self.check_endpoint(src)?;
        self.check_endpoint(tgt)?;
        let id = self.fresh_id('e');
        self.edges.insert(
            id.clone(),
            Edge {
                src: src.clone(),
                tgt: tgt.clone(),
                labels,
                props,
            },
        );
        Ok(id)
    }

    /// Inserts a node under a caller-chosen id.
    pub fn insert_node(&mut self, id: ObjectId, node: Node) -> Result<()> {
        if self.contains(&id) {
            return Err(Error::Invariant(format!("duplicate object id `{id}`")));
        }
        self.nodes.insert(id, node);
        Ok(())
    }

    /// Inserts an edge under a caller-chosen id.
    pub fn insert_edge(&mut self, id: ObjectId, edge: Edge) -> Result<()> {
        if self.contains(&id) {
            return Err(Error::Invariant(format!("duplicate object id `{id}`")));
        }
        self.check_endpoint(&edge.src)?;
        self.check_endpoint(&edge.tgt)?;
        self.edges.insert(id, edge);
        Ok(())
    }

    fn check_endpoint(&self, id: &ObjectId) -> Result<()> {
        if self.nodes.contains_key(id) {
            Ok(())
        } else if self.edges.contains_key(id) {
            Err(Error::Endpoint(format!("`{id}` is an edge, not a node")))
        } else {
            Err(Error::Endpoint(format!("node `{id}` does not exist")))
        }
    }

    /// Removes a node or an edge. Removing a node also removes its incident edges.
    pub fn remove_object(&mut self, id: &ObjectId) -> Result<()> {
        if self.edges.remove(id).is_some() {
            return Ok(());
        }
        if self.nodes.remove(id).is_none() {
            return Err(Error::NotFound(id.clone()));
        }
        self.edges.retain(|_, e| &e.src != id && &e.tgt != id);
        Ok(())
    }

    pub fn incident_edges<'a>(&'a self, node: &'a ObjectId) -> impl Iterator<Item = &'a ObjectId> + 'a {
        self.edges
            .iter()
            .filter(move |(_, e)| &e.src == node || &e.tgt == node)
            .map(|(id, _)| id)
    }

    fn props_mut(&mut self, id: &ObjectId) -> Result<&mut Properties> {
        if let Some(n) = self.nodes.get_mut(id) {
            return Ok(&mut n.props);
        }
        match self.edges.get_mut(id) {
            Some(e) => Ok(&mut e.props),
            None => Err(Error::NotFound(id.clone())),
        }
    }

    pub fn labels_mut(&mut self, id: &ObjectId) -> Result<&mut BTreeSet<Label>> {
        if let Some(n) = self.nodes.get_mut(id) {
            return Ok(&mut n.labels);
        }
        match self.edges.get_mut(id) {
            Some(e) => Ok(&mut e.labels),
            None => Err(Error::NotFound(id.clone())),
        }
    }

    pub fn set_prop(&mut self, id: &ObjectId, key: impl Into<PropertyKey>, value: Value) -> Result<()> {
        self.props_mut(id)?.insert(key.into(), value);
        Ok(())
    }

    pub fn remove_prop(&mut self, id: &ObjectId, key: &str) -> Result<()> {
        self.props_mut(id)?.remove(key);
        Ok(())
    }

    pub fn load<R: Read>(reader: R) -> Result<Graph> {
        let doc: GraphDoc = serde_json::from_reader(reader).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            offset: 0,
            message: e.to_string(),
            expected: Vec::new(),
        })?;
        doc.into_graph()
    }

    pub fn from_json_str(text: &str) -> Result<Graph> {
        Graph::load(text.as_bytes())
    }

    pub fn save<W: Write>(&self, mut writer: W) -> Result<()> {
        let text = self.to_json_string();
        writer.write_all(text.as_bytes())?;
        Ok(())
    }

    /// Canonical serialization: objects ordered by id, properties by key.
    pub fn to_json_string(&self) -> String {
        let doc = GraphDoc::from_graph(self);
        let mut text = serde_json::to_string_pretty(&doc).expect("graph documents always serialize");
        text.push('\n');
        text
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    #[serde(default)]
    nodes: Vec<NodeDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: ObjectId,
    #[serde(default)]
    labels: Vec<Label>,
    #[serde(default)]
    properties: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: ObjectId,
    src: ObjectId,
    tgt: ObjectId,
    #[serde(default)]
    labels: Vec<Label>,
    #[serde(default)]
    properties: serde_json::Map<String, serde_json::Value>,
}

fn props_from_doc(id: &ObjectId, map: &serde_json::Map<String, serde_json::Value>) -> Result<Properties> {
    map.iter()
        .map(|(k, v)| {
            Value::from_json(v)
                .map(|v| (k.clone(), v))
                .map_err(|e| Error::Format(format!("property `{k}` of `{id}`: {e}")))
        })
        .collect()
}

fn props_to_doc(props: &Properties) -> serde_json::Map<String, serde_json::Value> {
    props.iter().map(|(k, v)| (k.clone(), v.to_json())).collect()
}

impl GraphDoc {
    fn into_graph(self) -> Result<Graph> {
        let mut g = Graph::new();
        for n in self.nodes {
            let props = props_from_doc(&n.id, &n.properties)?;
            g.insert_node(
                n.id,
                Node {
                    labels: n.labels.into_iter().collect(),
                    props,
                },
            )?;
        }
        for e in self.edges {
            let props = props_from_doc(&e.id, &e.properties)?;
            let id = e.id;
            g.insert_edge(
                id.clone(),
                Edge {
                    src: e.src,
                    tgt: e.tgt,
                    labels: e.labels.into_iter().collect(),
                    props,
                },
            )
            .map_err(|err| match err {
                Error::Endpoint(msg) => Error::Invariant(format!("edge `{id}` has a dangling endpoint: {msg}")),
                other => other,
            })?;
        }
        Ok(g)
    }

    fn from_graph(g: &Graph) -> Self {
        GraphDoc {
            nodes: g
                .nodes
                .iter()
                .map(|(id, n)| NodeDoc {
                    id: id.clone(),
                    labels: n.labels.iter().cloned().collect(),
                    properties: props_to_doc(&n.props),
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|(id, e)| EdgeDoc {
                    id: id.clone(),
                    src: e.src.clone(),
                    tgt: e.tgt.clone(),
                    labels: e.labels.iter().cloned().collect(),
                    properties: props_to_doc(&e.props),
                })
                .collect(),
        }
    }
}
