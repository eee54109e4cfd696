//! Serialize a graph as Turtle with the MEDS-OWL prefixes.
//!
//!     cargo run --example turtle_output

use meds_graph::mapping::{convert, MappingContext};
use meds_graph::rdf::to_turtle_string;
use meds_graph::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SynthConfig { n_subjects: 2, events_per_subject: 2..=3, n_codes: 4, ..SynthConfig::default() };
    let ds = generate(&cfg)?;
    let ctx = MappingContext::new("https://data.example.org/", &ds.metadata.dataset_name)?;
    let graph = convert(&ds, &ctx)?.graph;
    print!("{}", to_turtle_string(&graph, &ctx.vocab.prefixes()));
    Ok(())
}
