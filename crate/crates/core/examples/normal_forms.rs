//! Candidate keys and GN-3NF / GN-BCNF checks before and after normalization.

use gonorm::normalform::{candidate_keys, check_gn_nf, NormalForm, DEFAULT_MAX_ATTRS};
use gonorm::normalize::full_normalize;
use gonorm::parser::parse_schema;
use gonorm::Graph;

fn main() -> gonorm::Result<()> {
    let sigma = parse_schema(include_str!("../fixtures/scenarios/no-1.gofd"))?;
    for q in sigma.scopes() {
        let deps: Vec<_> = sigma.iter().filter(|d| d.scope == q).cloned().collect();
        println!("keys of {q}:");
        for k in candidate_keys(&q, &deps, DEFAULT_MAX_ATTRS)? {
            let names: Vec<String> = k.iter().map(|v| v.to_string()).collect();
            println!("  {{{}}}", names.join(", "));
        }
    }
    for form in [NormalForm::Gn3nf, NormalForm::GnBcnf] {
        let r = check_gn_nf(form, &sigma, DEFAULT_MAX_ATTRS)?;
        println!("{form}: {} ({} violation(s))", r.holds, r.violations.len());
    }

    let g = Graph::from_json_str(include_str!("../fixtures/courses.json"))?;
    let sigma = parse_schema(include_str!("../fixtures/courses.gofd"))?;
    let before = check_gn_nf(NormalForm::GnBcnf, &sigma, DEFAULT_MAX_ATTRS)?;
    let after = check_gn_nf(NormalForm::GnBcnf, &full_normalize(&sigma, &g)?.schema, DEFAULT_MAX_ATTRS)?;
    println!("courses schema in GN-BCNF: before {}, after {}", before.holds, after.holds);
    Ok(())
}
