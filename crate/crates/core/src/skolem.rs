//! Deterministic constructors for identities and labels of created objects.
//!
//! Equal arguments always give the same identity, so objects built from the
//! same matched values collapse into one when a transformation is applied.

use crate::graph::{Label, ObjectId, PropertyKey, Value};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            '|' => out.push_str("%7C"),
            ',' => out.push_str("%2C"),
            '=' => out.push_str("%3D"),
            _ => out.push(c),
        }
    }
    out
}

/// `kind|l1,l2|k1=v1,k2=v2` with sorted labels and key/value pairs.
pub fn canonical(kind_tag: &str, labels: &[Label], kv: &[(PropertyKey, Value)]) -> String {
    let mut labels: Vec<String> = labels.iter().map(|l| escape(l)).collect();
    labels.sort();
    let mut pairs: Vec<String> = kv
        .iter()
        .map(|(k, v)| format!("{}={}", escape(k), escape(&v.literal())))
        .collect();
    pairs.sort();
    format!("{}|{}|{}", escape(kind_tag), labels.join(","), pairs.join(","))
}

pub fn skolem_node_id(kind_tag: &str, labels: &[Label], kv: &[(PropertyKey, Value)]) -> ObjectId {
    ObjectId::new(format!("sk:{}", canonical(kind_tag, labels, kv)))
}

/// Identity of the node that stands in for edge `edge` once it is reified.
pub fn reifier_id(edge: &ObjectId) -> ObjectId {
    skolem_node_id("reify", &[], &[("id".into(), Value::Str(edge.to_string()))])
}

pub fn skolem_edge_id(label: &str, src: &ObjectId, tgt: &ObjectId) -> ObjectId {
    ObjectId::new(format!(
        "ske:{}|{}|{}",
        escape(label),
        escape(src.as_str()),
        escape(tgt.as_str())
    ))
}

fn capitalized(s: &str) -> String {
    let cleaned: String = s.chars().filter(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
    let mut chars = cleaned.chars();
    match chars.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

/// Label for created value nodes: `Sk_` followed by the capitalized labels and keys.
pub fn skolem_label(labels: &[Label], keys: &[PropertyKey]) -> Label {
    let mut labels: Vec<&Label> = labels.iter().collect();
    labels.sort();
    let mut keys: Vec<&PropertyKey> = keys.iter().collect();
    keys.sort();
    let mut out = String::from("Sk_");
    for part in labels.into_iter().chain(keys) {
        out.push_str(&capitalized(part));
    }
    out
}
