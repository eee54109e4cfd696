//! Dump the built-in shapes, tighten one constraint, and re-validate.
//!
//!     cargo run --example custom_shapes

use meds_graph::mapping::{convert, MappingContext};
use meds_graph::shapes::{builtin_meds_suite, parse_suite, validate, write_suite};
use meds_graph::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate(&SynthConfig { n_subjects: 10, p_time: 0.5, ..SynthConfig::default() })?;
    let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
    let graph = convert(&ds, &ctx)?.graph;

    let text = write_suite(&builtin_meds_suite(&ctx.vocab), &ctx.vocab.prefixes());
    println!("{text}");

    // Require a timestamp on every event.
    let strict = parse_suite(&text.replace("prop meds:time min=0", "prop meds:time min=1"))?;
    let report = validate(&graph, &strict);
    println!("untimed events now rejected: {} violations", report.violations.len());
    if let Some(v) = report.violations.first() {
        println!("  e.g. {v}");
    }
    Ok(())
}
