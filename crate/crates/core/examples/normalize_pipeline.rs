//! Full normalization of a course graph: specific scopes first, then general ones.

use gonorm::metrics::{per_graph_metrics, round2};
use gonorm::normalize::{full_normalize, sort_scopes};
use gonorm::parser::{format_schema, parse_schema};
use gonorm::Graph;

fn main() -> gonorm::Result<()> {
    let g = Graph::from_json_str(include_str!("../fixtures/courses.json"))?;
    let sigma = parse_schema(include_str!("../fixtures/courses.gofd"))?;
    for (i, q) in sort_scopes(sigma.scopes()).iter().enumerate() {
        println!("pass {}: {q}", i + 1);
    }

    let r = full_normalize(&sigma, &g)?;
    for pass in &r.log {
        let changed: Vec<&str> = pass.modified.iter().map(|id| id.as_str()).collect();
        println!(
            "{} transformation(s), changed [{}], +{} nodes, +{} edges",
            pass.transformations.len(),
            changed.join(", "),
            pass.nodes_added,
            pass.edges_added
        );
    }
    let (a, b) = (per_graph_metrics(&g), per_graph_metrics(&r.graph));
    println!(
        "avg node props {} -> {}, avg edge props {} -> {}",
        round2(a.avg_node_props),
        round2(b.avg_node_props),
        round2(a.avg_edge_props),
        round2(b.avg_edge_props)
    );
    print!("resulting schema:\n{}", format_schema(&r.schema));
    Ok(())
}
