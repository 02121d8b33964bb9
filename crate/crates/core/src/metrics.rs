//! Size and redundancy measurements for graphs, schemas and single dependencies.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::gofd::{DepClass, GnSchema, GoFd};
use crate::graph::Graph;
use crate::pattern::restrict;

pub type Rational = Ratio<u64>;

/// Two-decimal rendering used in reports.
pub fn round2(r: Rational) -> f64 {
    (to_f64(r) * 100.0).round() / 100.0
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn mean(total: u64, count: u64) -> Rational {
    if count == 0 {
        Rational::from_integer(0)
    } else {
        Rational::new(total, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphMetrics {
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_node_props: Rational,
    pub avg_edge_props: Rational,
}

impl GraphMetrics {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "nodeCount": self.node_count,
            "edgeCount": self.edge_count,
            "avgNodeProps": round2(self.avg_node_props),
            "avgEdgeProps": round2(self.avg_edge_props),
        })
    }
}

pub fn per_graph_metrics(g: &Graph) -> GraphMetrics {
    let node_props: usize = g.nodes().map(|(_, n)| n.props.len()).sum();
    let edge_props: usize = g.edges().map(|(_, e)| e.props.len()).sum();
    GraphMetrics {
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        avg_node_props: mean(node_props as u64, g.node_count() as u64),
        avg_edge_props: mean(edge_props as u64, g.edge_count() as u64),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SchemaCounts {
    pub total: usize,
    pub within_node: usize,
    pub within_edge: usize,
    pub between: usize,
}

pub fn schema_counts(sigma: &GnSchema) -> SchemaCounts {
    let mut c = SchemaCounts::default();
    for dep in sigma {
        c.total += 1;
        match dep.classify() {
            DepClass::WithinNode => c.within_node += 1,
            DepClass::WithinEdge => c.within_edge += 1,
            DepClass::Between => c.between += 1,
        }
    }
    c
}

/// Group sizes of the scope's matches grouped by all descriptor variables,
/// ordered by group.
pub fn redundancy_potentials(g: &Graph, dep: &GoFd) -> Result<Vec<u64>> {
    let attrs = dep.scope.attrs();
    let vars = dep.descriptor.vars();
    if let Some(v) = vars.iter().find(|v| !attrs.contains(v)) {
        return Err(Error::UnboundVariable(v.to_string()));
    }
    let mut groups = BTreeMap::new();
    for t in &dep.scope.evaluate(g).tuples {
        *groups.entry(restrict(t, &vars)).or_insert(0u64) += 1;
    }
    Ok(groups.into_values().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedundancyProfile {
    pub potentials: Vec<u64>,
    pub max: u64,
    pub avg: Rational,
    pub minimality: Rational,
    /// The scope had no matches; minimality is then reported as 1.
    pub empty: bool,
}

impl RedundancyProfile {
    pub fn from_potentials(potentials: Vec<u64>) -> Self {
        let matches: u64 = potentials.iter().sum();
        let groups = potentials.len() as u64;
        let minimality = if matches <= 1 {
            Rational::from_integer(1)
        } else {
            Rational::new(groups - 1, matches - 1)
        };
        RedundancyProfile {
            max: potentials.iter().copied().max().unwrap_or(0),
            avg: mean(matches, groups),
            minimality,
            empty: matches == 0,
            potentials,
        }
    }

    pub fn avg_f64(&self) -> f64 {
        to_f64(self.avg)
    }

    pub fn minimality_f64(&self) -> f64 {
        to_f64(self.minimality)
    }

    /// No group holds more than one match.
    pub fn is_unit(&self) -> bool {
        self.max <= 1
    }
}

pub fn profile(g: &Graph, dep: &GoFd) -> Result<RedundancyProfile> {
    redundancy_potentials(g, dep).map(RedundancyProfile::from_potentials)
}

/// The full metrics document for a graph and schema.
pub fn report(g: &Graph, sigma: &GnSchema) -> Result<serde_json::Value> {
    let mut per_dep = Vec::new();
    for dep in sigma {
        let p = profile(g, dep)?;
        let mut entry = json!({
            "gofd": dep.to_string(),
            "M": p.potentials,
            "max": p.max,
            "avg": round2(p.avg),
            "minimality": round2(p.minimality),
        });
        if p.empty {
            entry["empty"] = json!(true);
        }
        per_dep.push(entry);
    }
    Ok(json!({
        "graph": per_graph_metrics(g).to_json(),
        "schema": schema_counts(sigma),
        "perDependency": per_dep,
    }))
}
