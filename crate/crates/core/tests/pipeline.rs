mod common;

use common::*;
use gonorm::gofd::satisfies;
use gonorm::metrics::{profile, schema_counts};
use gonorm::normalize::full_normalize;
use gonorm::parser::parse_schema;
use gonorm::transform::{apply_all, instantiate, verify_lossless};
use gonorm::GnSchema;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strict_dependencies_normalize_losslessly(seed in any::<u64>()) {
        let case = strict_case(&mut StdRng::seed_from_u64(seed));
        prop_assert!(satisfies(&case.graph, &case.dep, 1).unwrap().holds);
        let t = instantiate(&case.dep).unwrap();
        let out = apply_all(&case.graph, &[t.clone()]).unwrap();
        prop_assert!(verify_lossless(&case.graph, &out, &t), "{}", case.dep);
    }

    #[test]
    fn normalizing_twice_changes_nothing(seed in any::<u64>()) {
        let case = strict_case(&mut StdRng::seed_from_u64(seed));
        let sigma: GnSchema = [case.dep.clone()].into_iter().collect();
        let once = full_normalize(&sigma, &case.graph).unwrap();
        let twice = full_normalize(&once.schema, &once.graph).unwrap();
        prop_assert_eq!(&twice.graph, &once.graph);
        for k in once.key_deps() {
            prop_assert!(profile(&once.graph, k).unwrap().is_unit());
        }
    }
}

fn scenario(name: &str) -> GnSchema {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_schema(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn schema_counts_by_class() {
    let c = schema_counts(&scenario("running.gofd"));
    assert_eq!((c.total, c.within_node, c.within_edge, c.between), (4, 2, 1, 1));
    let c = schema_counts(&scenario("scenarios/ts-2.gofd"));
    assert_eq!((c.total, c.within_node, c.within_edge, c.between), (7, 3, 1, 3));
}
