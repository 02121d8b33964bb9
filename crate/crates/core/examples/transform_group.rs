//! Resolve the group-number dependency on the student subgraph by reifying its edges.

use gonorm::metrics::profile;
use gonorm::parser::parse_gofd;
use gonorm::transform::{apply_all, instantiate, verify_lossless};
use gonorm::Graph;

fn main() -> gonorm::Result<()> {
    let g = Graph::from_json_str(include_str!("../fixtures/groupno.json"))?;
    let dep = parse_gofd("()-[y:{inGroupWith}:{groupNo,name}]->() :: y.groupNo => y.name")?;
    let t = instantiate(&dep)?;
    println!("{} plan:", t.kind);
    for step in t.create.iter().chain(&t.remove) {
        println!("  {step}");
    }
    println!("actions:\n{}", serde_json::to_string_pretty(&t.actions(&g)).expect("actions serialize"));

    let out = apply_all(&g, &[t.clone()])?;
    println!("nodes {} -> {}, edges {} -> {}", g.node_count(), out.node_count(), g.edge_count(), out.edge_count());
    println!("lossless: {}", verify_lossless(&g, &out, &t));
    if let Some(key) = &t.key_dep {
        let p = profile(&out, key)?;
        println!("key dependency {key}: max {} minimality {}", p.max, p.minimality);
    }
    Ok(())
}
