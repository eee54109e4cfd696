//! Triples per event with only the time field populated 31% of the time.
//!
//!     cargo run --release --example graph_stats

use meds_graph::mapping::{convert, MappingContext};
use meds_graph::stats::{compute_stats, render_stats_table, stats_json};
use meds_graph::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SynthConfig {
        seed: 31,
        n_subjects: 1_000,
        events_per_subject: 20..=30,
        p_time: 0.31,
        p_numeric: 0.0,
        p_text: 0.0,
        ..SynthConfig::default()
    };
    let ds = generate(&cfg)?;
    let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
    let stats = compute_stats(&convert(&ds, &ctx)?.graph, &ctx.vocab);
    print!("{}", render_stats_table(&stats));
    if std::env::args().any(|a| a == "--json") {
        print!("{}", stats_json(&stats));
    }
    Ok(())
}
