//! Validate a converted graph, then break it and look at the report.
//!
//!     cargo run --example validate_graph

use meds_graph::mapping::{convert, MappingContext};
use meds_graph::shapes::{builtin_meds_suite, validate};
use meds_graph::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate(&SynthConfig { n_subjects: 5, ..SynthConfig::default() })?;
    let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
    let mut graph = convert(&ds, &ctx)?.graph;
    let suite = builtin_meds_suite(&ctx.vocab);
    println!("clean graph conforms: {}", validate(&graph, &suite).conforms);

    // Drop the code link of the first event.
    let (shard, row, _) = ds.events().next().expect("synth produced events");
    let event = ctx.event_iri(shard, row);
    let link = graph
        .triples_with_subject(&event)
        .find(|t| t.predicate == &ctx.vocab.has_code)
        .map(|t| t.to_owned())
        .expect("every event has a code");
    graph.remove(&link);

    let report = validate(&graph, &suite);
    println!("after mutation conforms: {}", report.conforms);
    for v in &report.violations {
        println!("  {v}");
    }
    Ok(())
}
