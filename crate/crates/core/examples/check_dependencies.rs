//! Check a schema against a graph, then break one dependency and show the witnesses.

use gonorm::gofd::satisfies;
use gonorm::parser::parse_schema;
use gonorm::pattern::format_tuple;
use gonorm::Graph;

fn main() -> gonorm::Result<()> {
    let mut g = Graph::from_json_str(include_str!("../fixtures/fig1b.json"))?;
    let sigma = parse_schema(include_str!("../fixtures/running.gofd"))?;
    for dep in &sigma {
        println!("{:5} {dep}", satisfies(&g, dep, 3)?.holds);
    }

    g.set_prop(&"e5".into(), "name", "Villains".into())?;
    for dep in &sigma {
        let sat = satisfies(&g, dep, 3)?;
        if !sat.holds {
            println!("violated after edit: {dep}");
            for (a, b) in &sat.witnesses {
                println!("  {}\n  {}", format_tuple(a), format_tuple(b));
            }
        }
    }
    Ok(())
}
