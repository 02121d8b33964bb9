//! Collect the dependencies that apply to a scope and reduce them to a minimal cover.

use gonorm::gofd::{applicable_deps, implies, minimal_cover};
use gonorm::parser::{parse_pattern, parse_schema};

fn main() -> gonorm::Result<()> {
    let sigma = parse_schema(include_str!("../fixtures/courses.gofd"))?;
    let q = parse_pattern("(x:{Course,International}:{language,program,title})-[y:{teaches}:{usingBook}]->()")?;

    let applicable = applicable_deps(&sigma, &q);
    println!("applicable to {q}:");
    for d in &applicable {
        println!("  {d}");
    }
    let cover = minimal_cover(&applicable)?;
    println!("minimal cover:");
    for d in &cover {
        println!("  {d}");
    }
    let dropped: Vec<_> = applicable.iter().filter(|d| !cover.contains(d)).collect();
    for d in dropped {
        println!("dropped {d}; implied by the cover: {}", implies(&cover, d)?);
    }
    Ok(())
}
