//! Generate a seeded MEDS root on disk.
//!
//!     cargo run --example synth_dataset -- /tmp/synth-root

use std::path::PathBuf;

use meds_graph::meds::write_dataset;
use meds_graph::synth::{generate, LabelKind, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SynthConfig {
        seed: 2024,
        n_subjects: 200,
        n_shards: 4,
        label_kind: LabelKind::Categorical,
        ..SynthConfig::default()
    };
    let ds = generate(&cfg)?;
    let tmp;
    let root = match std::env::args_os().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            tmp = tempfile::tempdir()?;
            tmp.path().to_path_buf()
        }
    };
    write_dataset(&ds, &root)?;
    println!(
        "{} events, {} codes, {} labels in {} shards -> {}",
        ds.event_count(),
        ds.codes.len(),
        ds.labels.len(),
        ds.shards.len(),
        root.display()
    );
    Ok(())
}
