//! Build a small graph, match a pattern against it and print the JSON form.

use gonorm::graph::{labels, props};
use gonorm::{Direction, Graph, GraphPattern, ObjectPattern, Value};

fn main() -> gonorm::Result<()> {
    let mut g = Graph::new();
    let course = g.add_node(labels(["Course"]), props([("title", Value::from("Database Systems"))]));
    for name in ["Johannes", "Maxime"] {
        let lecturer = g.add_node(labels(["Lecturer"]), props([("name", Value::from(name))]));
        g.add_edge(&lecturer, &course, labels(["TEACHES"]), props([("usingBook", Value::from("Alice"))]))?;
    }

    let q = GraphPattern::node_edge(
        ObjectPattern::new("c", ["Course"], ["title"]),
        ObjectPattern::new("t", ["TEACHES"], ["usingBook"]),
        Direction::In,
    );
    println!("matches of {q}:");
    for t in &q.evaluate(&g).tuples {
        println!("  {}", gonorm::pattern::format_tuple(t));
    }
    print!("{}", g.to_json_string());
    Ok(())
}
