//! Scoped and full normalization passes.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::error::{Error, Result};
use crate::gofd::{applicable_deps, minimal_cover, satisfies, Descriptor, GnSchema, GoFd, VarSet};
use crate::graph::{Graph, ObjectId};
use crate::pattern::{format_tuple, GraphPattern};
use crate::transform::{apply_all, Action, instantiate, match_redundancy_pattern, Transformation, TransformationKind};

/// What one scoped pass did.
#[derive(Debug, Clone, Default)]
pub struct PassLog {
    pub scope: Option<GraphPattern>,
    pub applicable: Vec<GoFd>,
    pub min_cover: Vec<GoFd>,
    pub transformations: Vec<Transformation>,
    /// Concrete actions of each transformation, on the graph the pass started from.
    pub actions: Vec<Vec<Action>>,
    /// Non-strict dependencies left untransformed.
    pub skipped: Vec<GoFd>,
    /// Dependencies removed because their scope no longer matches anything.
    pub dropped: Vec<GoFd>,
    /// Original objects that were changed or deleted.
    pub modified: BTreeSet<ObjectId>,
    pub created: BTreeSet<ObjectId>,
    pub nodes_added: usize,
    pub nodes_removed: usize,
    pub edges_added: usize,
    pub edges_removed: usize,
}

impl PassLog {
    fn record_delta(&mut self, before: &Graph, after: &Graph) {
        for (id, n) in before.nodes() {
            match after.node(id) {
                Some(m) if m == n => {}
                Some(_) => {
                    self.modified.insert(id.clone());
                }
                None => {
                    self.modified.insert(id.clone());
                    self.nodes_removed += 1;
                }
            }
        }
        for (id, e) in before.edges() {
            match after.edge(id) {
                Some(f) if f == e => {}
                Some(_) => {
                    self.modified.insert(id.clone());
                }
                None => {
                    self.modified.insert(id.clone());
                    self.edges_removed += 1;
                }
            }
        }
        for (id, _) in after.nodes() {
            if before.node(id).is_none() {
                self.created.insert(id.clone());
                self.nodes_added += 1;
            }
        }
        for (id, _) in after.edges() {
            if before.edge(id).is_none() {
                self.created.insert(id.clone());
                self.edges_added += 1;
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let texts = |deps: &[GoFd]| deps.iter().map(|d| d.to_string()).collect::<Vec<_>>();
        json!({
            "scope": self.scope.as_ref().map(|q| q.to_string()),
            "applicable": texts(&self.applicable),
            "minimalCover": texts(&self.min_cover),
            "transformations": self.transformations.iter().zip(&self.actions).map(|(t, actions)| json!({
                "kind": t.kind.tag(),
                "source": t.source.to_string(),
                "keyDependency": t.key_dep.as_ref().map(|k| k.to_string()),
                "plan": t.create.iter().chain(&t.remove).map(|s| s.to_string()).collect::<Vec<_>>(),
                "actions": actions,
            })).collect::<Vec<_>>(),
            "skipped": texts(&self.skipped),
            "dropped": texts(&self.dropped),
            "modified": self.modified,
            "created": self.created,
            "nodesAdded": self.nodes_added,
            "nodesRemoved": self.nodes_removed,
            "edgesAdded": self.edges_added,
            "edgesRemoved": self.edges_removed,
        })
    }
}

#[derive(Debug, Clone)]
pub struct NormalizationResult {
    pub graph: Graph,
    pub schema: GnSchema,
    pub log: Vec<PassLog>,
}

impl NormalizationResult {
    pub fn has_skipped(&self) -> bool {
        self.log.iter().any(|p| !p.skipped.is_empty())
    }

    pub fn key_deps(&self) -> impl Iterator<Item = &GoFd> {
        self.log.iter().flat_map(|p| p.transformations.iter().filter_map(|t| t.key_dep.as_ref()))
    }
}

fn check_all(g: &Graph, deps: &[GoFd]) -> Result<()> {
    for dep in deps {
        let sat = satisfies(g, dep, 5)?;
        if !sat.holds {
            return Err(Error::UnsatisfiedDependency {
                dependency: dep.to_string(),
                witnesses: sat
                    .witnesses
                    .iter()
                    .map(|(a, b)| (format_tuple(a), format_tuple(b)))
                    .collect(),
            });
        }
    }
    Ok(())
}

fn regroup(q: &GraphPattern, parts: BTreeMap<VarSet, VarSet>) -> impl Iterator<Item = GoFd> + '_ {
    parts.into_iter().map(move |(lhs, rhs)| GoFd {
        scope: q.clone(),
        descriptor: Descriptor { lhs, rhs },
    })
}

/// One normalization pass for scope `q`: gather the applicable dependencies,
/// reduce them to a minimal cover, build a transformation per redundancy
/// pattern and apply them all at once.
pub fn scoped_normalize(q: &GraphPattern, sigma: &GnSchema, g: &Graph) -> Result<NormalizationResult> {
    let mut log = PassLog {
        scope: Some(q.clone()),
        ..PassLog::default()
    };
    log.applicable = applicable_deps(sigma, q);
    check_all(g, &log.applicable)?;
    log.min_cover = minimal_cover(&log.applicable)?;

    let mut to_transform: BTreeMap<(TransformationKind, VarSet), VarSet> = BTreeMap::new();
    let mut kept: BTreeMap<VarSet, VarSet> = BTreeMap::new();
    let mut skipped: BTreeMap<VarSet, VarSet> = BTreeMap::new();
    for part in log.min_cover.iter().flat_map(|d| d.split()) {
        let (lhs, rhs) = (part.descriptor.lhs.clone(), part.descriptor.rhs.clone());
        match match_redundancy_pattern(&part) {
            Ok(TransformationKind::NoRedundancy) => kept.entry(lhs).or_default().extend(rhs),
            Ok(kind) => to_transform.entry((kind, lhs)).or_default().extend(rhs),
            Err(Error::NonStrict(_)) => skipped.entry(lhs).or_default().extend(rhs),
            Err(e) => return Err(e),
        }
    }
    for ((_, lhs), rhs) in to_transform {
        let dep = GoFd {
            scope: q.clone(),
            descriptor: Descriptor { lhs, rhs },
        };
        log.transformations.push(instantiate(&dep)?);
    }
    log.skipped = regroup(q, skipped).collect();
    log.actions = log.transformations.iter().map(|t| t.actions(g)).collect();

    let graph = apply_all(g, &log.transformations)?;
    log.record_delta(g, &graph);

    let mut schema: GnSchema = sigma.iter().filter(|d| d.scope != *q).cloned().collect();
    schema.extend(regroup(q, kept));
    schema.extend(log.skipped.iter().cloned());
    schema.extend(log.transformations.iter().filter_map(|t| t.key_dep.clone()));

    Ok(NormalizationResult {
        graph,
        schema,
        log: vec![log],
    })
}

/// Orders scopes so that every scope comes before the scopes more general
/// than it; otherwise by canonical text.
pub fn sort_scopes(scopes: impl IntoIterator<Item = GraphPattern>) -> Vec<GraphPattern> {
    let mut remaining: Vec<(String, GraphPattern)> = scopes
        .into_iter()
        .map(|q| (q.to_string(), q))
        .collect::<BTreeMap<_, _>>()
        .into_iter()
        .collect();
    let mut out = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let minimal = |i: usize| {
            let (text, q) = &remaining[i];
            !remaining
                .iter()
                .any(|(t, r)| t != text && q.more_general_than(r) && !r.more_general_than(q))
        };
        let pick = (0..remaining.len()).find(|&i| minimal(i)).unwrap_or(0);
        out.push(remaining.remove(pick).1);
    }
    out
}

/// Runs a scoped pass for every scope of `sigma`, most specific first,
/// threading the graph and schema through the passes.
pub fn full_normalize(sigma: &GnSchema, g: &Graph) -> Result<NormalizationResult> {
    let original: BTreeSet<String> = sigma
        .iter()
        .filter(|d| !d.scope.evaluate(g).is_empty())
        .map(|d| d.to_string())
        .collect();
    let mut graph = g.clone();
    let mut schema = sigma.clone();
    let mut log = Vec::new();
    for q in sort_scopes(sigma.scopes()) {
        let mut r = scoped_normalize(&q, &schema, &graph)?;
        let mut pass = r.log.pop().expect("one pass");
        let dropped: Vec<GoFd> = r
            .schema
            .iter()
            .filter(|d| original.contains(&d.to_string()) && d.scope.evaluate(&r.graph).is_empty())
            .cloned()
            .collect();
        for d in &dropped {
            r.schema.remove(d);
        }
        pass.dropped = dropped;
        graph = r.graph;
        schema = r.schema;
        log.push(pass);
    }
    Ok(NormalizationResult { graph, schema, log })
}
