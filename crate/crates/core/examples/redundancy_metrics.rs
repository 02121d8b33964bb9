//! Redundancy potentials and minimality for a dependency, plus the JSON report.

use gonorm::metrics::{profile, report};
use gonorm::parser::parse_schema;
use gonorm::Graph;

fn main() -> gonorm::Result<()> {
    let g = Graph::from_json_str(include_str!("../fixtures/metrics_example.json"))?;
    let sigma = parse_schema(include_str!("../fixtures/metrics_example.gofd"))?;
    for dep in &sigma {
        let p = profile(&g, dep)?;
        println!("{dep}");
        println!("  M = {:?}, max {}, avg {}, minimality {}", p.potentials, p.max, p.avg, p.minimality);
    }
    println!("{}", serde_json::to_string_pretty(&report(&g, &sigma)?).expect("report serializes"));
    Ok(())
}
