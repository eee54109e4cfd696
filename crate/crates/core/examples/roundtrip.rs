//! Convert a dataset, invert the graph, and diff the tables.
//!
//!     cargo run --example roundtrip

use meds_graph::mapping::{convert, MappingContext};
use meds_graph::roundtrip::{fidelity, invert};
use meds_graph::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate(&SynthConfig { seed: 3, n_shards: 2, ..SynthConfig::default() })?;
    let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
    let graph = convert(&ds, &ctx)?.graph;
    let back = invert(&graph, &ctx)?;
    println!("{}", serde_json::to_string_pretty(&fidelity(&ds, &back))?);

    // A lossy copy shows up as field-level diffs.
    let mut lossy = back.clone();
    if let Some(e) = lossy.shards[0].events.iter_mut().find(|e| e.numeric_value.is_some()) {
        e.numeric_value = None;
    }
    for d in fidelity(&ds, &lossy).diffs {
        println!("{:?} {} {}: {:?} -> {:?}", d.table, d.key, d.field, d.expected, d.actual);
    }
    Ok(())
}
