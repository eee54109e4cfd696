//! Write a small MEDS root to disk, convert it, and print the N-Triples.
//!
//!     cargo run --example convert_dataset

use meds_graph::mapping::{convert_root, MappingContext};
use meds_graph::meds::{
    write_dataset, CodeRecord, DatasetMetadataRecord, EventRecord, EventShard, MedsDataset, Timestamp,
};
use meds_graph::rdf::to_ntriples_string;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut ds = MedsDataset::new(DatasetMetadataRecord::new("neuro demo", "0.3.3", Timestamp::parse("2025-03-01T00:00:00Z")?));
    ds.shards.push(EventShard {
        name: "held_out/0.parquet".into(),
        events: vec![
            EventRecord::new("42", "ATC:C08CA06").with_time(Timestamp::parse("2021-06-01T08:30:00Z")?),
            EventRecord::new("42", "LAB:GCS").with_time(Timestamp::parse("2021-06-01T09:00:00Z")?).with_numeric(13.0),
        ],
    });
    ds.codes.push(CodeRecord::new("ATC:C08CA06").with_description("Nimodipine").with_parents(["ATC:C08CA"]));
    write_dataset(&ds, dir.path())?;

    let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
    let conv = convert_root(dir.path(), &ctx)?;
    print!("{}", to_ntriples_string(&conv.graph));
    eprintln!("{} triples", conv.graph.len());
    Ok(())
}
