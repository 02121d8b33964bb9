//! Parse every bundled scenario schema and show that formatting round-trips.

use gonorm::parser::{format_schema, parse_schema_document};

const SCENARIOS: &[(&str, &str)] = &[
    ("lon", include_str!("../fixtures/scenarios/lon.gofd")),
    ("nw", include_str!("../fixtures/scenarios/nw.gofd")),
    ("no-3", include_str!("../fixtures/scenarios/no-3.gofd")),
    ("off-3", include_str!("../fixtures/scenarios/off-3.gofd")),
    ("ts-2", include_str!("../fixtures/scenarios/ts-2.gofd")),
    ("uni-2", include_str!("../fixtures/scenarios/uni-2.gofd")),
];

fn main() -> gonorm::Result<()> {
    for (name, text) in SCENARIOS {
        let doc = parse_schema_document(text)?;
        let sigma = doc.schema();
        let again = parse_schema_document(&format_schema(&sigma))?.schema();
        println!("{name}: {} declaration(s), round-trip {}", sigma.len(), again == sigma);
    }
    match parse_schema_document("(x:{A}:{k}) :: x.k => x.missing\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
