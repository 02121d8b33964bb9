//! Candidate keys and the graph-native normal forms.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gofd::{applicable_deps, closure, structurally_implied, Descriptor, GnSchema, GoFd, VarSet};
use crate::graph::Graph;
use crate::pattern::{GraphPattern, Variable};

/// Default cap on `|attrs(Q)|` for exhaustive subset enumeration.
pub const DEFAULT_MAX_ATTRS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NormalForm {
    #[serde(rename = "GN-1NF")]
    Gn1nf,
    #[serde(rename = "GN-2NF")]
    Gn2nf,
    #[serde(rename = "GN-3NF")]
    Gn3nf,
    #[serde(rename = "GN-BCNF")]
    GnBcnf,
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalForm::Gn1nf => "GN-1NF",
            NormalForm::Gn2nf => "GN-2NF",
            NormalForm::Gn3nf => "GN-3NF",
            NormalForm::GnBcnf => "GN-BCNF",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationReason {
    NotSuperkey,
    NotPrime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub scope: GraphPattern,
    pub dependency: GoFd,
    pub reason: ViolationReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormReport {
    pub form: NormalForm,
    pub holds: bool,
    pub violations: Vec<Violation>,
}

impl NormalFormReport {
    fn from_violations(form: NormalForm, violations: Vec<Violation>) -> Self {
        NormalFormReport {
            form,
            holds: violations.is_empty(),
            violations,
        }
    }
}

fn check_size(q: &GraphPattern, max_attrs: usize) -> Result<VarSet> {
    let attrs = q.attrs();
    if attrs.len() > max_attrs {
        return Err(Error::SizeLimit {
            attrs: attrs.len(),
            limit: max_attrs,
        });
    }
    Ok(attrs)
}

fn descriptors(q: &GraphPattern, sigma_q: &[GoFd]) -> Vec<Descriptor> {
    sigma_q
        .iter()
        .map(|d| d.descriptor.clone())
        .chain(structurally_implied(q).into_iter().map(|d| d.descriptor))
        .collect()
}

/// All subset-minimal `X ⊆ attrs(Q)` whose closure is `attrs(Q)`.
pub fn candidate_keys(q: &GraphPattern, sigma_q: &[GoFd], max_attrs: usize) -> Result<Vec<VarSet>> {
    let attrs: Vec<Variable> = check_size(q, max_attrs)?.into_iter().collect();
    let all: VarSet = attrs.iter().cloned().collect();
    let deps = descriptors(q, sigma_q);
    let n = attrs.len();
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut found: Vec<u32> = Vec::new();
    for m in masks {
        if found.iter().any(|k| k & m == *k) {
            continue;
        }
        let x: VarSet = (0..n).filter(|i| m & (1 << i) != 0).map(|i| attrs[i].clone()).collect();
        if closure(&x, &deps) == all {
            found.push(m);
        }
    }
    let mut keys: Vec<VarSet> = found
        .into_iter()
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| attrs[i].clone()).collect())
        .collect();
    keys.sort();
    Ok(keys)
}

/// GN-1NF asks for atomic property values, which the graph type enforces.
pub fn check_gn1nf(_g: &Graph) -> NormalFormReport {
    NormalFormReport::from_violations(NormalForm::Gn1nf, Vec::new())
}

/// GN-2NF holds vacuously for every schema.
pub fn check_gn2nf(_sigma: &GnSchema) -> NormalFormReport {
    NormalFormReport::from_violations(NormalForm::Gn2nf, Vec::new())
}

/// Left-hand sides worth testing: unions of the dependencies' left sides plus single attributes.
fn lhs_candidates(attrs: &VarSet, sigma_q: &[GoFd]) -> BTreeSet<VarSet> {
    let lhs: Vec<VarSet> = sigma_q
        .iter()
        .filter(|d| !d.is_trivial())
        .map(|d| d.lhs().clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out: BTreeSet<VarSet> = attrs.iter().map(|a| VarSet::from([a.clone()])).collect();
    if lhs.len() <= 10 {
        for m in 1u32..(1 << lhs.len()) {
            let u: VarSet = (0..lhs.len())
                .filter(|i| m & (1 << i) != 0)
                .flat_map(|i| lhs[i].iter().cloned())
                .collect();
            out.insert(u);
        }
    } else {
        out.extend(lhs);
    }
    out
}

/// Checks GN-3NF or GN-BCNF for one scope.
///
/// An implied `Q :: X => A` is acceptable when the closure of `X` contains
/// every object `X` talks about as well as the object owning `A`; for
/// single-object scopes this is the usual superkey test. GN-3NF also accepts
/// a prime `A`.
pub fn check_scoped(form: NormalForm, q: &GraphPattern, sigma: &GnSchema, max_attrs: usize) -> Result<NormalFormReport> {
    if matches!(form, NormalForm::Gn1nf | NormalForm::Gn2nf) {
        return Ok(NormalFormReport::from_violations(form, Vec::new()));
    }
    let attrs = check_size(q, max_attrs)?;
    let sigma_q = applicable_deps(sigma, q);
    let deps = descriptors(q, &sigma_q);
    let prime: VarSet = if form == NormalForm::Gn3nf {
        candidate_keys(q, &sigma_q, max_attrs)?.into_iter().flatten().collect()
    } else {
        VarSet::new()
    };

    let mut candidates: Vec<VarSet> = lhs_candidates(&attrs, &sigma_q).into_iter().collect();
    candidates.sort_by_key(|x| x.len());
    let mut violations: Vec<Violation> = Vec::new();
    for x in candidates {
        // Supersets of a violating side only repeat it.
        if violations.iter().any(|v| v.dependency.lhs().is_subset(&x)) {
            continue;
        }
        let cl = closure(&x, &deps);
        let owners_known = x.iter().all(|v| cl.contains(&Variable::object(&v.object)));
        let bad: VarSet = cl
            .difference(&x)
            .filter(|a| !(owners_known && cl.contains(&Variable::object(&a.object))))
            .filter(|a| !prime.contains(*a))
            .cloned()
            .collect();
        if !bad.is_empty() {
            violations.push(Violation {
                scope: q.clone(),
                dependency: GoFd {
                    scope: q.clone(),
                    descriptor: Descriptor { lhs: x, rhs: bad },
                },
                reason: if form == NormalForm::Gn3nf {
                    ViolationReason::NotPrime
                } else {
                    ViolationReason::NotSuperkey
                },
            });
        }
    }
    Ok(NormalFormReport::from_violations(form, violations))
}

/// Conjunction of [`check_scoped`] over every scope occurring in `sigma`.
pub fn check_gn_nf(form: NormalForm, sigma: &GnSchema, max_attrs: usize) -> Result<NormalFormReport> {
    let mut violations = Vec::new();
    for q in sigma.scopes() {
        violations.extend(check_scoped(form, &q, sigma, max_attrs)?.violations);
    }
    Ok(NormalFormReport::from_violations(form, violations))
}
