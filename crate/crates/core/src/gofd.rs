//! Graph object functional dependencies `Q :: X => Y` and reasoning over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::{restrict, GraphPattern, ObjectKind, Tuple, Variable};

pub type VarSet = BTreeSet<Variable>;

/// The functional part `X => Y` of a dependency.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Descriptor {
    pub lhs: VarSet,
    pub rhs: VarSet,
}

impl Descriptor {
    pub fn new(lhs: impl IntoIterator<Item = Variable>, rhs: impl IntoIterator<Item = Variable>) -> Self {
        Descriptor {
            lhs: lhs.into_iter().collect(),
            rhs: rhs.into_iter().collect(),
        }
    }

    pub fn vars(&self) -> VarSet {
        self.lhs.union(&self.rhs).cloned().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.rhs.is_subset(&self.lhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoFd {
    pub scope: GraphPattern,
    pub descriptor: Descriptor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DepClass {
    WithinNode,
    WithinEdge,
    Between,
}

impl GoFd {
    /// Builds a dependency, checking that both sides are non-empty and bound by the scope.
    pub fn new(
        scope: GraphPattern,
        lhs: impl IntoIterator<Item = Variable>,
        rhs: impl IntoIterator<Item = Variable>,
    ) -> Result<Self> {
        let descriptor = Descriptor::new(lhs, rhs);
        if descriptor.lhs.is_empty() || descriptor.rhs.is_empty() {
            return Err(Error::Invariant("both sides of a dependency must be non-empty".into()));
        }
        let attrs = scope.attrs();
        if let Some(v) = descriptor.vars().iter().find(|v| !attrs.contains(v)) {
            return Err(Error::UnboundVariable(v.to_string()));
        }
        Ok(GoFd { scope, descriptor })
    }

    pub fn lhs(&self) -> &VarSet {
        &self.descriptor.lhs
    }

    pub fn rhs(&self) -> &VarSet {
        &self.descriptor.rhs
    }

    pub fn is_trivial(&self) -> bool {
        self.descriptor.is_trivial()
    }

    /// Object names whose variables occur in the descriptor.
    pub fn families(&self) -> BTreeSet<&str> {
        self.lhs().iter().chain(self.rhs()).map(|v| v.object.as_str()).collect()
    }

    pub fn classify(&self) -> DepClass {
        let fams = self.families();
        if fams.len() == 1 {
            let name = fams.into_iter().next().expect("one family");
            match self.scope.kind_of(name) {
                Some(ObjectKind::Edge) => DepClass::WithinEdge,
                _ => DepClass::WithinNode,
            }
        } else {
            DepClass::Between
        }
    }

    /// At most one object family on each side.
    pub fn is_strict(&self) -> bool {
        let fam = |s: &VarSet| s.iter().map(|v| v.object.as_str()).collect::<BTreeSet<_>>().len();
        fam(self.lhs()) <= 1 && fam(self.rhs()) <= 1
    }

    /// Splits the right-hand side into one dependency per variable.
    pub fn split(&self) -> Vec<GoFd> {
        self.rhs()
            .iter()
            .map(|a| GoFd {
                scope: self.scope.clone(),
                descriptor: Descriptor::new(self.lhs().iter().cloned(), [a.clone()]),
            })
            .collect()
    }

    pub fn with_descriptor(&self, descriptor: Descriptor) -> GoFd {
        GoFd {
            scope: self.scope.clone(),
            descriptor,
        }
    }
}

impl fmt::Display for GoFd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :: ", self.scope)?;
        write_vars(f, self.lhs())?;
        f.write_str(" => ")?;
        write_vars(f, self.rhs())
    }
}

fn write_vars(f: &mut fmt::Formatter<'_>, vars: &VarSet) -> fmt::Result {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl PartialOrd for GoFd {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoFd {
    /// Dependencies order by their canonical text.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

/// A set of dependencies, kept in canonical text order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GnSchema {
    deps: BTreeMap<String, GoFd>,
}

impl GnSchema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when an equal dependency was already present.
    pub fn insert(&mut self, dep: GoFd) -> bool {
        let key = dep.to_string();
        if self.deps.contains_key(&key) {
            return false;
        }
        self.deps.insert(key, dep);
        true
    }

    pub fn remove(&mut self, dep: &GoFd) -> bool {
        self.deps.remove(&dep.to_string()).is_some()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&GoFd) -> bool) {
        self.deps.retain(|_, d| keep(d));
    }

    pub fn contains(&self, dep: &GoFd) -> bool {
        self.deps.contains_key(&dep.to_string())
    }

    pub fn len(&self) -> usize {
        self.deps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GoFd> {
        self.deps.values()
    }

    /// Distinct scopes occurring in the schema.
    pub fn scopes(&self) -> BTreeSet<GraphPattern> {
        self.iter().map(|d| d.scope.clone()).collect()
    }
}

impl FromIterator<GoFd> for GnSchema {
    fn from_iter<I: IntoIterator<Item = GoFd>>(iter: I) -> Self {
        let mut s = GnSchema::new();
        for d in iter {
            s.insert(d);
        }
        s
    }
}

impl Extend<GoFd> for GnSchema {
    fn extend<I: IntoIterator<Item = GoFd>>(&mut self, iter: I) {
        for d in iter {
            self.insert(d);
        }
    }
}

impl<'a> IntoIterator for &'a GnSchema {
    type Item = &'a GoFd;
    type IntoIter = std::collections::btree_map::Values<'a, String, GoFd>;

    fn into_iter(self) -> Self::IntoIter {
        self.deps.values()
    }
}

impl fmt::Display for GnSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.iter() {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Outcome of checking one dependency against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Satisfaction {
    pub holds: bool,
    /// Violating tuple pairs, capped by the caller's limit.
    pub witnesses: Vec<(Tuple, Tuple)>,
}

/// Checks `G ⊨ φ` by grouping the scope's matches on the left-hand side.
pub fn satisfies(g: &Graph, dep: &GoFd, max_witnesses: usize) -> Result<Satisfaction> {
    let attrs = dep.scope.attrs();
    if let Some(v) = dep.descriptor.vars().iter().find(|v| !attrs.contains(v)) {
        return Err(Error::UnboundVariable(v.to_string()));
    }
    let rel = dep.scope.evaluate(g);
    let mut first: BTreeMap<Tuple, &Tuple> = BTreeMap::new();
    let mut holds = true;
    let mut witnesses = Vec::new();
    for t in &rel.tuples {
        let x = restrict(t, dep.lhs());
        match first.get(&x) {
            None => {
                first.insert(x, t);
            }
            Some(rep) => {
                if restrict(rep, dep.rhs()) != restrict(t, dep.rhs()) {
                    holds = false;
                    if witnesses.len() < max_witnesses {
                        witnesses.push(((*rep).clone(), t.clone()));
                    }
                }
            }
        }
    }
    Ok(Satisfaction { holds, witnesses })
}

/// Dependencies every graph satisfies for scope `Q`: an object determines
/// its properties, and the edge determines its matched endpoint.
pub fn structurally_implied(q: &GraphPattern) -> Vec<GoFd> {
    let mut out = Vec::new();
    for (op, _) in q.objects() {
        for k in &op.keys {
            out.push(GoFd {
                scope: q.clone(),
                descriptor: Descriptor::new([Variable::object(&op.var)], [Variable::prop(&op.var, k)]),
            });
        }
    }
    if let (Some(n), Some(e)) = (q.node_part(), q.edge_part()) {
        out.push(GoFd {
            scope: q.clone(),
            descriptor: Descriptor::new([Variable::object(&e.var)], [Variable::object(&n.var)]),
        });
    }
    out
}

/// Attribute closure of `x` under `deps`.
pub fn closure<'a, I>(x: &VarSet, deps: I) -> VarSet
where
    I: IntoIterator<Item = &'a Descriptor>,
    I::IntoIter: Clone,
{
    let deps = deps.into_iter();
    let mut out = x.clone();
    loop {
        let before = out.len();
        for d in deps.clone() {
            if d.lhs.is_subset(&out) {
                out.extend(d.rhs.iter().cloned());
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

/// Dependencies of `sigma` that apply to `q` by restriction, rewritten onto `q`'s variables.
pub fn applicable_deps<'a>(sigma: impl IntoIterator<Item = &'a GoFd>, q: &GraphPattern) -> Vec<GoFd> {
    let attrs = q.attrs();
    let mut out: BTreeSet<GoFd> = BTreeSet::new();
    for dep in sigma {
        if !dep.scope.more_general_than(q) {
            continue;
        }
        let map = dep.scope.rename_map(q);
        let rn = |v: &Variable| v.renamed(&map[&v.object]);
        let descriptor = Descriptor::new(dep.lhs().iter().map(rn), dep.rhs().iter().map(rn));
        if descriptor.vars().is_subset(&attrs) {
            out.insert(GoFd {
                scope: q.clone(),
                descriptor,
            });
        }
    }
    out.into_iter().collect()
}

fn common_scope<'a>(deps: impl IntoIterator<Item = &'a GoFd>) -> Result<Option<&'a GraphPattern>> {
    let mut scope: Option<&GraphPattern> = None;
    for d in deps {
        match scope {
            None => scope = Some(&d.scope),
            Some(s) if *s != d.scope => return Err(Error::ScopeMismatch(s.to_string(), d.scope.to_string())),
            _ => {}
        }
    }
    Ok(scope)
}

fn with_structural(q: &GraphPattern, deps: &[GoFd]) -> Vec<Descriptor> {
    deps.iter()
        .map(|d| d.descriptor.clone())
        .chain(structurally_implied(q).into_iter().map(|d| d.descriptor))
        .collect()
}

/// `Σ_Q ⊨ φ` using the reasoning rules together with the structural axioms of the scope.
pub fn implies(sigma_q: &[GoFd], dep: &GoFd) -> Result<bool> {
    common_scope(sigma_q.iter().chain(std::iter::once(dep)))?;
    let all = with_structural(&dep.scope, sigma_q);
    Ok(dep.rhs().is_subset(&closure(dep.lhs(), &all)))
}

/// Minimal cover of dependencies sharing one scope. The result has
/// left-reduced sides, no redundant member, and right-hand sides regrouped
/// per left-hand side.
pub fn minimal_cover(sigma_q: &[GoFd]) -> Result<Vec<GoFd>> {
    let Some(scope) = common_scope(sigma_q)? else {
        return Ok(Vec::new());
    };
    let structural: Vec<Descriptor> = structurally_implied(scope).into_iter().map(|d| d.descriptor).collect();

    let mut fds: Vec<Descriptor> = sigma_q
        .iter()
        .flat_map(|d| d.split())
        .filter(|d| !d.is_trivial())
        .map(|d| d.descriptor)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let implied_by = |fds: &[Descriptor], lhs: &VarSet, rhs: &VarSet| {
        let all: Vec<&Descriptor> = fds.iter().chain(&structural).collect();
        rhs.is_subset(&closure(lhs, all.iter().copied()))
    };

    for i in 0..fds.len() {
        let vars: Vec<Variable> = fds[i].lhs.iter().cloned().collect();
        for v in vars {
            if fds[i].lhs.len() == 1 {
                break;
            }
            let mut smaller = fds[i].lhs.clone();
            smaller.remove(&v);
            if implied_by(&fds, &smaller, &fds[i].rhs) {
                fds[i].lhs = smaller;
            }
        }
    }
    let mut fds: Vec<Descriptor> = fds.into_iter().collect::<BTreeSet<_>>().into_iter().collect();

    let mut i = 0;
    while i < fds.len() {
        let candidate = fds.remove(i);
        if !implied_by(&fds, &candidate.lhs, &candidate.rhs) {
            fds.insert(i, candidate);
            i += 1;
        }
    }

    let mut grouped: BTreeMap<VarSet, VarSet> = BTreeMap::new();
    for d in fds {
        grouped.entry(d.lhs).or_default().extend(d.rhs);
    }
    let mut out: Vec<GoFd> = grouped
        .into_iter()
        .map(|(lhs, rhs)| GoFd {
            scope: scope.clone(),
            descriptor: Descriptor { lhs, rhs },
        })
        .collect();
    out.sort();
    Ok(out)
}
